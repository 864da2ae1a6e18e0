"""Bundled reference-table data files."""
