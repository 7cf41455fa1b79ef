"""Storage abstraction layer for run artifacts."""

from .base import BaseStorage, StorageResult, csv_text, format_cell, to_jsonable
from .filesystem import FileSystemStorage

__all__ = ["BaseStorage", "StorageResult", "FileSystemStorage", "csv_text", "format_cell", "to_jsonable"]
