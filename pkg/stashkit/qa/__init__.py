"""Test suite, reference oracles and synthetic fixtures."""
