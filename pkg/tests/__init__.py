"""Tests for python-fatpoints."""
