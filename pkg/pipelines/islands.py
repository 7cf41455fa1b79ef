"""Island scans for the parabolic Anderson model."""

import logging
from typing import Any, Dict

from common.errors import ConfigError
from islands import IslandReport, Window, scan_async
from kernels import Family
from solver import SigmaFamily

from .base import BasePipeline

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ("alpha", "N", "replica_count", "median_dim", "q25", "q75", "theory_dim", "zero_measure_count")
SMOOTHED_COLUMNS = ("alpha", "N", "median_lower", "median_measure", "median_upper")
SUP_COLUMNS = ("N", "median", "theory", "replica_count")
TAIL_COLUMNS = ("a", "probability", "count", "samples", "slope", "theory")

PAM_SCOPE = "island statistics are defined only for linear sigma driven by space-time white noise in d = 1"


class IslandsPipeline(BasePipeline):
    """Run the PAM ensemble and write island, sup-growth and tail tables."""

    operation = "islands"

    def _check_scope(self) -> None:
        cfg = self.config
        problems = []
        if cfg.kernel.family != Family.WHITE_NOISE:
            problems.append(f"kernel is {cfg.kernel.family.value}")
        if cfg.kernel.d != 1:
            problems.append(f"d = {cfg.kernel.d}")
        if cfg.solver.sigma.family != SigmaFamily.LINEAR:
            problems.append(f"sigma is {cfg.solver.sigma.family.value}")
        if cfg.grid is None:
            problems.append("no [grid] section")
        if problems:
            raise ConfigError(f"{PAM_SCOPE} ({'; '.join(problems)})")

    async def execute(self) -> IslandReport:
        self._check_scope()
        cfg = self.config
        isl = cfg.islands
        grid = cfg.solver_grid()
        lengths = [n * grid.dx for n in isl.N_values]
        if not lengths:
            raise ConfigError("islands.N_values must not be empty")
        report = await scan_async(
            grid, isl.t, isl.alphas, lengths,
            replicas=isl.replicas or cfg.solver.replicas,
            seed=cfg.seed,
            a_values=isl.a_values,
            window=Window(isl.window),
            pool_cells=isl.pool_cells,
            threads=self.threads,
            batch_size=cfg.solver.batch_size,
            scheme=isl.scheme,
            progress=self.progress,
        )
        self.warnings.extend(report.scan.warnings)

        await self.write_csv("islands.csv", SCAN_COLUMNS, report.scan.rows(), "island_scan")
        await self.write_csv("islands_smoothed.csv", SMOOTHED_COLUMNS, report.scan.smoothed_rows(),
                             "island_smoothed")
        await self.write_csv("sup_growth.csv", SUP_COLUMNS, report.sup.rows(), "sup_growth")
        if report.tail is not None:
            tail = report.tail
            self.warnings.extend(tail.warnings)
            rows = [
                {"a": a, "probability": p, "count": c, "samples": tail.samples,
                 "slope": tail.slope, "theory": tail.theory}
                for a, p, c in zip(tail.a_values, tail.probabilities, tail.counts)
            ]
            await self.write_csv("tail.csv", TAIL_COLUMNS, rows, "tail_exponent")
        summary: Dict[str, Any] = report.to_dict()
        summary["scan"].pop("rows")
        summary["scan"].pop("smoothed")
        await self.write_json("islands_summary.json", summary, "island_summary")
        return report
