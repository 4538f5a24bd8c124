"""Tests for the kmweyl package."""
