"""Test suite configuration; keeps the tests directory importable."""
