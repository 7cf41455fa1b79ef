"""Base pipeline with common functionality for the experiment drivers."""

import json
import logging
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence

from common.errors import BlowUpError, GateFailure, SheLabError
from config import VERSION, ExperimentConfig
from storage import BaseStorage, FileSystemStorage

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_GATE = 2


@dataclass
class PipelineResult:
    """Outcome of one pipeline run, as the CLI sees it."""

    success: bool
    exit_code: int = EXIT_OK
    error: Optional[str] = None
    artifacts: List[str] = field(default_factory=list)
    data: Any = None
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "exit_code": self.exit_code,
            "error": self.error,
            "artifacts": list(self.artifacts),
            "warnings": list(self.warnings),
        }

    def __str__(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


class PipelineError(SheLabError):
    """An artifact could not be written."""


class BasePipeline:
    """Base class for analyze / simulate / islands.

    Subclasses implement :meth:`execute`. :meth:`run` converts exceptions
    into exit codes, records the artifacts written, and appends an
    operation log entry to the output storage.
    """

    operation = "pipeline"

    def __init__(
        self,
        config: ExperimentConfig,
        output_dir: str = "./runs",
        threads: int = 1,
        unsafe: bool = False,
        storage: Optional[BaseStorage] = None,
        progress=None,
    ):
        """Initialize pipeline.

        Args:
            config: Validated experiment config
            output_dir: Directory artifacts are written to
            threads: Worker threads for replica blocks
            unsafe: Skip the well-posedness gate
            storage: Storage backend (defaults to the filesystem at output_dir)
            progress: Optional callback(done, total) for long runs
        """
        self.config = config
        self.threads = threads
        self.unsafe = unsafe
        self.storage = storage or FileSystemStorage(output_dir)
        self.progress = progress
        self.run_id = f"{self.operation}-{uuid.uuid4().hex[:8]}"
        self.artifacts: List[str] = []
        self.warnings: List[str] = []

    @property
    def meta(self) -> Dict[str, Any]:
        """Embedded in every artifact."""
        return {
            "config_hash": self.config.config_hash,
            "version": VERSION,
            "seed": self.config.seed,
        }

    async def execute(self) -> Any:
        """Run the experiment and write its artifacts.

        Subclasses must override.
        """
        raise NotImplementedError("Subclasses must implement execute")

    async def run(self) -> PipelineResult:
        started = time.perf_counter()
        try:
            data = await self.execute()
            result = PipelineResult(True, EXIT_OK, None, list(self.artifacts), data, list(self.warnings))
        except GateFailure as e:
            logger.error("Gate failure: %s", e)
            result = PipelineResult(False, EXIT_GATE, f"Gate failure: {e}", list(self.artifacts))
        except BlowUpError as e:
            logger.error("Blow-up at step %d in replicas %s", e.step, e.replicas[:10])
            result = PipelineResult(False, EXIT_ERROR, str(e), list(self.artifacts),
                                    {"step": e.step, "replicas": list(e.replicas)})
        except SheLabError as e:
            logger.error("%s failed: %s", self.operation, e)
            result = PipelineResult(False, EXIT_ERROR, str(e), list(self.artifacts))
        except Exception as e:
            logger.exception("Internal error in %s", self.operation)
            result = PipelineResult(False, EXIT_ERROR, f"Internal error: {e}", list(self.artifacts))

        await self.storage.log_operation(self.operation, {
            **self.meta,
            "success": result.success,
            "exit_code": result.exit_code,
            "error": result.error,
            "artifacts": result.artifacts,
            "threads": self.threads,
            "seconds": round(time.perf_counter() - started, 3),
        }, run_id=self.run_id)
        return result

    # =========================================================================
    # Artifact writers
    # =========================================================================

    def _check(self, path: str, result) -> str:
        if not result.success:
            raise PipelineError(f"Could not write {path}: {result.error}")
        self.artifacts.append(path)
        return path

    async def write_json(self, path: str, data: Dict[str, Any], schema: str) -> str:
        payload = {"meta": {"schema": schema, **self.meta}, **data}
        return self._check(path, await self.storage.write_json(path, payload))

    async def write_csv(self, path: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]], schema: str) -> str:
        meta = {"schema": schema, **self.meta}
        return self._check(path, await self.storage.write_csv(path, columns, rows, meta))

    async def write_bytes(self, path: str, content: bytes) -> str:
        return self._check(path, await self.storage.write_bytes(path, content))

    def warn(self, message: str) -> None:
        logger.warning(message)
        self.warnings.append(message)
