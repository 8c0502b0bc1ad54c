"""Shared pytest configuration (adds the tests directory to sys.path)."""
