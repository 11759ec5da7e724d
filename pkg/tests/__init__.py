"""Tests for eigenacs."""
