"""Base storage interface for experiment artifacts.

This module defines the abstract interface for artifact backends. Reports,
CSV tables, binary dumps and run logs all go through it, so a run can be
pointed at another backend without touching the pipelines.
"""

import csv
import io
import json
import math
import uuid
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np


@dataclass
class StorageResult:
    """Outcome of a storage call; ``etag`` is the content hash of the artifact."""
    success: bool
    data: Optional[Any] = None
    error: Optional[str] = None
    etag: Optional[str] = None


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy values and non-finite floats for JSON output.

    inf and nan become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def format_cell(value: Any) -> str:
    """CSV cell text; floats use repr so equal runs give equal bytes."""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Dict[str, Any]], meta: Optional[Dict[str, Any]] = None) -> str:
    """CSV with an optional leading ``# key=value; ...`` comment line."""
    buffer = io.StringIO()
    if meta:
        buffer.write("# " + "; ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(c, "")) for c in columns])
    return buffer.getvalue()


class BaseStorage(ABC):
    """Abstract artifact backend.

    Subclasses provide raw text and byte access. JSON, CSV and operation
    logs are layered on top here.
    """

    @abstractmethod
    async def read(self, path: str) -> StorageResult:
        """Read text content.

        Args:
            path: Artifact path relative to the run directory

        Returns:
            StorageResult with the content and its etag
        """

    @abstractmethod
    async def write(self, path: str, content: str) -> StorageResult:
        """Write text content, replacing any previous artifact.

        Args:
            path: Artifact path relative to the run directory
            content: Content to write

        Returns:
            StorageResult with the content hash as etag
        """

    @abstractmethod
    async def read_bytes(self, path: str) -> StorageResult:
        pass

    @abstractmethod
    async def write_bytes(self, path: str, content: bytes) -> StorageResult:
        pass

    @abstractmethod
    async def list(self, prefix: str = "", pattern: str = "*") -> StorageResult:
        """Artifact paths below ``prefix`` matching a glob pattern."""

    @abstractmethod
    async def exists(self, path: str) -> bool:
        pass

    @abstractmethod
    async def get_metadata(self, path: str) -> StorageResult:
        """Size and modification time of an artifact, with its etag."""

    async def read_json(self, path: str) -> StorageResult:
        result = await self.read(path)
        if not result.success:
            return result
        try:
            return StorageResult(success=True, data=json.loads(result.data), etag=result.etag)
        except json.JSONDecodeError as e:
            return StorageResult(success=False, error=f"JSON parse error: {e}")

    async def write_json(self, path: str, data: Any) -> StorageResult:
        """Write data as sorted, indented JSON.

        numpy values are converted and non-finite floats become strings.
        """
        try:
            content = json.dumps(to_jsonable(data), ensure_ascii=False, indent=2, sort_keys=True)
        except (TypeError, ValueError) as e:
            return StorageResult(success=False, error=f"JSON serialize error: {e}")
        return await self.write(path, content + "\n")

    async def write_csv(self, path: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]],
                        meta: Optional[Dict[str, Any]] = None) -> StorageResult:
        """Write rows as CSV.

        Args:
            path: Path to CSV file
            columns: Column order
            rows: Dicts keyed by column name
            meta: Written as ``# key=value; ...`` before the header
        """
        return await self.write(path, csv_text(columns, rows, meta))

    async def log_operation(self, operation: str, details: Dict[str, Any], run_id: str = "shelab") -> StorageResult:
        """Write one JSON entry under logs/.

        Args:
            operation: Pipeline name (e.g., "analyze", "simulate")
            details: Exit code, timings, artifact names
            run_id: Prefix of the log file name

        Returns:
            StorageResult with the log id as data
        """
        timestamp = datetime.now(timezone.utc)
        log_id = uuid.uuid4().hex[:8]
        filename = f"logs/{run_id}_{timestamp.strftime('%Y%m%d_%H%M%S')}_{log_id}.json"
        result = await self.write_json(filename, {
            "log_id": log_id,
            "timestamp": timestamp.isoformat(),
            "operation": operation,
            "details": details,
        })
        if not result.success:
            return result
        return StorageResult(success=True, data=log_id, etag=result.etag)

    async def list_logs(self) -> List[str]:
        result = await self.list("logs", "*.json")
        return result.data if result.success else []
