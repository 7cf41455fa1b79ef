"""Ensemble simulation followed by the configured statistics."""

import logging
from typing import Any, Dict, List

from common.errors import ConfigError
from noise import dump_bytes
from solver import EnsembleRun, solve_async
from stats import AverageSpec, covariance_decay, default_suite, ergodicity_test, variance_vs_N

from .base import BasePipeline

logger = logging.getLogger(__name__)

SNAPSHOT_COLUMNS = ("t", "step", "mean", "variance", "max_mean_deviation_stderr")
POINCARE_COLUMNS = ("N", "k", "g_family", "shift_id", "var", "stderr", "bound", "ratio", "within_band")
ERGODICITY_COLUMNS = ("member", "N", "var", "stderr", "verdict", "positive_level")
DECAY_COLUMNS = ("g_family", "lag", "distance", "cov", "stderr")


class SimulatePipeline(BasePipeline):
    """Solve the configured ensemble and write its statistics.

    Artifacts: ``summary.json`` and ``snapshots.csv`` always;
    ``poincare.csv``, ``ergodicity.csv`` and ``covariance_decay.csv`` when
    the analysis runs name them; ``fields.bin`` when ``output.dump`` is set.
    """

    operation = "simulate"

    async def execute(self) -> Dict[str, Any]:
        cfg = self.config
        runs = set(cfg.analysis.runs)
        if runs & {"poincare", "ergodicity"} and len(cfg.stats.N_values) < 1:
            raise ConfigError("stats.N_values is required for poincare and ergodicity runs")

        snapshots = list(cfg.solver.snapshots)
        if cfg.stats.t is not None:
            snapshots.append(cfg.stats.t)
        run = await solve_async(
            cfg.solver_grid(), cfg.kernel, cfg.solver.sigma, cfg.solver.t_final,
            snapshot_times=snapshots,
            replicas=cfg.solver.replicas,
            seed=cfg.seed,
            scheme=cfg.solver.scheme,
            batch_size=cfg.solver.batch_size,
            threads=self.threads,
            unsafe=self.unsafe,
            progress=self.progress,
        )
        self.warnings.extend(run.warnings)

        outcome: Dict[str, Any] = {"summary": run.summary()}
        await self.write_csv("snapshots.csv", SNAPSHOT_COLUMNS, outcome["summary"]["snapshots"], "snapshots")

        if "poincare" in runs:
            outcome["poincare"] = await self._poincare(run)
        if "ergodicity" in runs:
            outcome["ergodicity"] = await self._ergodicity(run)
        if "mixing" in runs:
            outcome["mixing"] = await self._mixing(run)
        if cfg.dump_fields:
            final = run.field_at(run.times[-1])
            await self.write_bytes("fields.bin", dump_bytes(final.grid, final.values))

        await self.write_json("summary.json", outcome, "simulation_summary")
        return outcome

    async def _poincare(self, run: EnsembleRun) -> List[dict]:
        cfg = self.config
        rows, checks = [], []
        for factor in cfg.stats.factors:
            check = variance_vs_N(run, AverageSpec.single(factor, run.grid.d), cfg.stats.N_values,
                                  cfg.kernel, t=cfg.stats.t)
            rows.extend(check.rows())
            self.warnings.extend(check.warnings)
            if not check.passed:
                self.warn(f"Poincare bound exceeded for {check.g_family}")
            checks.append(check.to_dict())
        await self.write_csv("poincare.csv", POINCARE_COLUMNS, rows, "poincare")
        return checks

    async def _ergodicity(self, run: EnsembleRun) -> dict:
        cfg = self.config
        grid = run.grid
        result = ergodicity_test(run, default_suite(grid.d, 4 * grid.dx), cfg.stats.N_values,
                                 alpha=cfg.stats.alpha, t=cfg.stats.t)
        rows = [
            {
                "member": m.label, "N": n, "var": v, "stderr": s,
                "verdict": m.verdict.value, "positive_level": m.positive_level,
            }
            for m in result.members
            for n, v, s in zip(m.n_values, m.variances, m.stderr)
        ]
        await self.write_csv("ergodicity.csv", ERGODICITY_COLUMNS, rows, "ergodicity")
        logger.info("Ergodicity verdict: %s", result.verdict.value)
        return result.to_dict()

    async def _mixing(self, run: EnsembleRun) -> List[dict]:
        cfg = self.config
        rows, curves = [], []
        for factor in cfg.stats.factors:
            curve = covariance_decay(run, factor, cfg.stats.lags, t=cfg.stats.t)
            for row, distance in zip(curve.rows(), curve.distances):
                rows.append({"g_family": factor.label(), "distance": distance, **row})
            curves.append({"g_family": factor.label(), **curve.to_dict()})
        await self.write_csv("covariance_decay.csv", DECAY_COLUMNS, rows, "covariance_decay")
        return curves
