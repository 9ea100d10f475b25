"""Tests for the change faithfulness toolkit."""
