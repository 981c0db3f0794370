"""Tests for sparsestream.dse."""
