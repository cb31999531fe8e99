"""Integration tests for ddc_tools."""
