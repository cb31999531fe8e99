"""Test suite for ddc-tools."""
