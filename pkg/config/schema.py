"""Experiment configuration.

A config is one TOML file with the sections below. Every section and key
is checked against the schema before any computation; unknown keys and a
missing seed are errors.

    [kernel]          family, d and family parameters
    [grid]            n_cells, dx, dt
    [solver]          scheme, dt, t_final, snapshots, replicas, seed, batch_size
    [solver.sigma]    family and parameters
    [stats]           N_values, lags, g_family or factors, alpha, t
    [islands]         t, alphas, N_values (cells), replicas, a_values, window, pool_cells, scheme
    [analysis]        runs, sigma_constant, lambda, deltas
    [output]          directory, dump
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from common.errors import ConfigError, SheLabError
from kernels.spec import KernelSpec
from noise.grid import Grid
from noise.rng import DEFAULT_BATCH_SIZE
from solver.scheme import Scheme
from solver.sigma import SigmaSpec
from stats.functionals import GFamily, LipschitzFactor

ANALYSES = ("report", "ergodicity", "mixing", "poincare", "islands")

SECTION_KEYS: Dict[str, Tuple[str, ...]] = {
    "grid": ("n_cells", "dx", "dt"),
    "solver": ("scheme", "dt", "t_final", "snapshots", "replicas", "seed", "batch_size", "sigma"),
    "stats": ("N_values", "lags", "g_family", "factors", "alpha", "t"),
    "islands": ("t", "alphas", "N_values", "replicas", "a_values", "window", "pool_cells", "scheme"),
    "analysis": ("runs", "sigma_constant", "lambda", "deltas"),
    "output": ("directory", "dump"),
}
TOP_LEVEL = ("kernel", *SECTION_KEYS)


@dataclass
class SolverConfig:
    seed: int
    t_final: float = 1.0
    scheme: Scheme = Scheme.EXP_EULER
    dt: Optional[float] = None
    snapshots: List[float] = field(default_factory=list)
    replicas: int = 1000
    batch_size: int = DEFAULT_BATCH_SIZE
    sigma: SigmaSpec = field(default_factory=SigmaSpec.linear)


@dataclass
class StatsConfig:
    #: window lengths N
    N_values: List[float] = field(default_factory=list)
    #: lags in cells
    lags: List[int] = field(default_factory=lambda: [0, 1, 2, 4, 8])
    factors: List[LipschitzFactor] = field(default_factory=lambda: [LipschitzFactor(GFamily.CLIP01, 1.0)])
    alpha: float = 0.01
    t: Optional[float] = None


@dataclass
class IslandsConfig:
    t: float = 6.0
    alphas: List[float] = field(default_factory=lambda: [0.1, 0.2, 0.3])
    #: window sizes in cells
    N_values: List[int] = field(default_factory=lambda: [2 ** 10, 2 ** 12, 2 ** 14])
    replicas: Optional[int] = None
    a_values: List[float] = field(default_factory=list)
    window: str = "half"
    pool_cells: bool = False
    scheme: Scheme = Scheme.EXP_EULER_LATTICE


@dataclass
class AnalysisConfig:
    runs: List[str] = field(default_factory=lambda: ["report"])
    sigma_constant: bool = False
    lam: float = 1.0
    deltas: List[float] = field(default_factory=lambda: [0.1, 0.5, 1.0])


@dataclass
class ExperimentConfig:
    kernel: KernelSpec
    solver: SolverConfig
    grid: Optional[Grid] = None
    stats: StatsConfig = field(default_factory=StatsConfig)
    islands: IslandsConfig = field(default_factory=IslandsConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output_directory: Optional[str] = None
    #: write the final fields as a binary dump next to the CSVs
    dump_fields: bool = False
    #: the parsed TOML document, used for the config hash
    raw: Dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def seed(self) -> int:
        return self.solver.seed

    def with_seed(self, seed: int) -> "ExperimentConfig":
        raw = json.loads(json.dumps(self.raw))
        raw.setdefault("solver", {})["seed"] = seed
        return parse_config(raw)

    def solver_grid(self) -> Grid:
        if self.grid is None:
            raise ConfigError("a [grid] section is required for simulation")
        if self.solver.dt is not None:
            return self.grid.with_dt(self.solver.dt)
        return self.grid

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)

    def to_dict(self) -> Dict[str, Any]:
        return json.loads(json.dumps(self.raw))


def config_hash(raw: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a parsed config."""
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# =============================================================================
# Parsing
# =============================================================================

def _check_keys(name: str, section: Any, allowed: Tuple[str, ...]) -> Dict[str, Any]:
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown keys in [{name}]: {unknown}")
    return section


def _number_list(name: str, values: Any, kind=float) -> List:
    if not isinstance(values, list):
        raise ConfigError(f"{name} must be a list")
    try:
        return [kind(v) for v in values]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: {e}") from e


def _default_factor(name: str) -> LipschitzFactor:
    family = GFamily(name)
    if family == GFamily.CUSTOM:
        raise ConfigError("custom factors need a [[stats.factors]] table with knots, values and lip")
    return LipschitzFactor(family, 0.0 if family == GFamily.IDENTITY_MINUS_1 else 1.0)


def parse_config(raw: Dict[str, Any]) -> ExperimentConfig:
    """Validate a parsed TOML document and build the typed config.

    Raises:
        ConfigError: on unknown sections or keys, a missing seed, or any
            invalid value.
    """
    unknown = sorted(set(raw) - set(TOP_LEVEL))
    if unknown:
        raise ConfigError(f"Unknown config sections: {unknown}")
    if "kernel" not in raw:
        raise ConfigError("config needs a [kernel] section")
    try:
        return _parse(raw)
    except ConfigError:
        raise
    except (SheLabError, ValueError, TypeError, KeyError) as e:
        raise ConfigError(str(e)) from e


def _parse(raw: Dict[str, Any]) -> ExperimentConfig:
    kernel = KernelSpec.from_dict(raw["kernel"])

    solver_raw = _check_keys("solver", raw.get("solver", {}), SECTION_KEYS["solver"])
    if "seed" not in solver_raw:
        raise ConfigError("solver.seed is mandatory")
    seed = solver_raw["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0 or seed >= 2 ** 64:
        raise ConfigError(f"solver.seed must be an unsigned 64-bit integer, got {seed!r}")
    sigma = SigmaSpec.from_dict(solver_raw["sigma"]) if "sigma" in solver_raw else SigmaSpec.linear()
    solver = SolverConfig(
        seed=seed,
        t_final=float(solver_raw.get("t_final", 1.0)),
        scheme=Scheme(solver_raw.get("scheme", Scheme.EXP_EULER.value)),
        dt=float(solver_raw["dt"]) if "dt" in solver_raw else None,
        snapshots=_number_list("solver.snapshots", solver_raw.get("snapshots", [])),
        replicas=int(solver_raw.get("replicas", 1000)),
        batch_size=int(solver_raw.get("batch_size", DEFAULT_BATCH_SIZE)),
        sigma=sigma,
    )
    if solver.replicas < 1:
        raise ConfigError("solver.replicas must be positive")

    grid = None
    if "grid" in raw:
        g = _check_keys("grid", raw["grid"], SECTION_KEYS["grid"])
        if "n_cells" not in g or "dx" not in g:
            raise ConfigError("[grid] needs n_cells and dx")
        grid = Grid(kernel.d, int(g["n_cells"]), float(g["dx"]), float(g["dt"]) if "dt" in g else None)

    s = _check_keys("stats", raw.get("stats", {}), SECTION_KEYS["stats"])
    stats = StatsConfig()
    if "N_values" in s:
        stats.N_values = _number_list("stats.N_values", s["N_values"])
    if "lags" in s:
        stats.lags = _number_list("stats.lags", s["lags"], int)
    if "g_family" in s and "factors" in s:
        raise ConfigError("give either stats.g_family or stats.factors, not both")
    if "g_family" in s:
        stats.factors = [_default_factor(name) for name in s["g_family"]]
    if "factors" in s:
        stats.factors = [LipschitzFactor.from_dict(f) for f in s["factors"]]
    stats.alpha = float(s.get("alpha", stats.alpha))
    stats.t = float(s["t"]) if "t" in s else None

    i = _check_keys("islands", raw.get("islands", {}), SECTION_KEYS["islands"])
    islands = IslandsConfig()
    islands.t = float(i.get("t", islands.t))
    if "alphas" in i:
        islands.alphas = _number_list("islands.alphas", i["alphas"])
    if "N_values" in i:
        islands.N_values = _number_list("islands.N_values", i["N_values"], int)
    if "a_values" in i:
        islands.a_values = _number_list("islands.a_values", i["a_values"])
    islands.replicas = int(i["replicas"]) if "replicas" in i else None
    islands.window = str(i.get("window", islands.window))
    if islands.window not in ("half", "symmetric"):
        raise ConfigError(f"islands.window must be 'half' or 'symmetric', got {islands.window!r}")
    islands.pool_cells = bool(i.get("pool_cells", False))
    try:
        islands.scheme = Scheme(i.get("scheme", islands.scheme.value))
    except ValueError:
        raise ConfigError(f"islands.scheme must be one of {[s.value for s in Scheme]}, got {i['scheme']!r}") from None
    if "N_values" in i and grid is not None and any(n * grid.dx <= 1 for n in islands.N_values):
        raise ConfigError(f"islands.N_values must give windows longer than 1 (N * dx > 1 with dx={grid.dx:g})")

    a = _check_keys("analysis", raw.get("analysis", {}), SECTION_KEYS["analysis"])
    analysis = AnalysisConfig()
    if "runs" in a:
        runs = list(a["runs"])
        bad = sorted(set(runs) - set(ANALYSES))
        if bad:
            raise ConfigError(f"Unknown analyses {bad}; choose from {list(ANALYSES)}")
        analysis.runs = runs
    analysis.sigma_constant = bool(a.get("sigma_constant", solver.sigma.is_constant))
    analysis.lam = float(a.get("lambda", 1.0))
    if "deltas" in a:
        analysis.deltas = _number_list("analysis.deltas", a["deltas"])

    o = _check_keys("output", raw.get("output", {}), SECTION_KEYS["output"])
    return ExperimentConfig(kernel, solver, grid, stats, islands, analysis, o.get("directory"),
                            bool(o.get("dump", False)), raw)
