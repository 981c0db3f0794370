"""Test suite for the sparsestream package.

This package contains tests for the sparsestream package, including:
    - Unit tests for individual components
    - Integration tests for component interactions
    - Validation tests against published reference figures
"""
