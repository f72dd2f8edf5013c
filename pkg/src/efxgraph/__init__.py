"""EFX fair division of items on graphs."""
