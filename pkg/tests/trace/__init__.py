"""Tests for sparsestream.trace."""
