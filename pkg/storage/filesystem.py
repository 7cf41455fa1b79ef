"""Filesystem storage implementation.

Artifacts live under the run's output directory. Writes go to a sibling
``.tmp`` file that is then renamed over the target.
"""

import hashlib
import os
from datetime import datetime
from pathlib import Path

from .base import BaseStorage, StorageResult


class FileSystemStorage(BaseStorage):
    """Filesystem-based artifact backend.

    The ETag is a SHA-256 prefix of the content, so two runs that wrote the
    same bytes report the same etag.
    """

    def __init__(self, base_path: str = "./runs"):
        """Initialize filesystem storage.

        Args:
            base_path: Output directory of the run (created if missing)
        """
        self.base_path = Path(base_path)
        self.base_path.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def _etag(content: bytes) -> str:
        return hashlib.sha256(content).hexdigest()[:16]

    def _locate(self, path: str) -> Path:
        return self.base_path / path

    def _missing(self, path: str) -> StorageResult:
        return StorageResult(success=False, error=f"File not found: {path}")

    def _put(self, path: str, content: bytes) -> StorageResult:
        target = self._locate(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            tmp = target.with_name(target.name + ".tmp")
            tmp.write_bytes(content)
            os.replace(tmp, target)
        except OSError as e:
            return StorageResult(success=False, error=str(e))
        return StorageResult(success=True, data=str(target), etag=self._etag(content))

    def _get(self, path: str) -> StorageResult:
        source = self._locate(path)
        if not source.is_file():
            return self._missing(path)
        try:
            content = source.read_bytes()
        except OSError as e:
            return StorageResult(success=False, error=str(e))
        return StorageResult(success=True, data=content, etag=self._etag(content))

    async def read(self, path: str) -> StorageResult:
        """Read a UTF-8 artifact."""
        result = self._get(path)
        if result.success:
            result.data = result.data.decode("utf-8")
        return result

    async def write(self, path: str, content: str) -> StorageResult:
        return self._put(path, content.encode("utf-8"))

    async def read_bytes(self, path: str) -> StorageResult:
        return self._get(path)

    async def write_bytes(self, path: str, content: bytes) -> StorageResult:
        return self._put(path, content)

    async def list(self, prefix: str = "", pattern: str = "*") -> StorageResult:
        """Relative paths of the files under ``prefix`` matching ``pattern``, sorted."""
        root = self._locate(prefix) if prefix else self.base_path
        if not root.exists():
            return StorageResult(success=True, data=[])
        try:
            names = sorted(
                str(item.relative_to(self.base_path))
                for item in root.rglob(pattern)
                if item.is_file() and not item.name.endswith(".tmp")
            )
        except OSError as e:
            return StorageResult(success=False, error=str(e))
        return StorageResult(success=True, data=names)

    async def exists(self, path: str) -> bool:
        return self._locate(path).is_file()

    async def get_metadata(self, path: str) -> StorageResult:
        """Size, modification time and etag of an artifact."""
        result = self._get(path)
        if not result.success:
            return result
        modified = datetime.fromtimestamp(self._locate(path).stat().st_mtime)
        return StorageResult(
            success=True,
            data={"path": path, "size": len(result.data), "modified": modified.isoformat()},
            etag=result.etag,
        )
