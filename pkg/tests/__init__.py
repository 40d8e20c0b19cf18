"""Tests for xxz-quench."""
