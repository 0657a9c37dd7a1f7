"""Reporting: deterministic CSV/JSON export. Plot helpers live in ``reporting.plots``."""

from .export import csv_text, json_text, write_csv, write_json

__all__ = ["csv_text", "json_text", "write_csv", "write_json"]
