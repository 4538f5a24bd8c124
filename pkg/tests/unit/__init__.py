"""Unit tests for the kmweyl package."""
