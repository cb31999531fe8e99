"""Unit tests for ddc_tools."""
