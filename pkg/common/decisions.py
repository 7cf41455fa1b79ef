"""Operational decision rules for asymptotic statements.

Both the atom detector and the ergodicity test ask whether a positive
sequence measured on increasing scales decays to zero or settles at a
positive level. These helpers implement that rule in one place.
"""

from enum import Enum
from typing import Sequence

import numpy as np

DECAY_SLOPE = -0.5
DECAY_RATIO = 1e-3
STABLE_TOLERANCE = 0.01


class SequenceVerdict(str, Enum):
    DECAYS = "decays"
    STABILIZES = "stabilizes"
    UNDECIDED = "undecided"


def loglog_slope(scales: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log|values| against log(scales).

    Zero values are dropped; fewer than two usable points give ``nan``.
    """
    x = np.asarray(scales, dtype=float)
    y = np.abs(np.asarray(values, dtype=float))
    keep = (y > 0) & np.isfinite(y) & (x > 0)
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def decays(scales: Sequence[float], values: Sequence[float]) -> bool:
    """True when the sequence falls off at least like a half power."""
    v = np.abs(np.asarray(values, dtype=float))
    if len(v) < 2:
        return False
    first, last = v[0], v[-1]
    if first == 0.0:
        return bool(np.all(v == 0.0))
    slope = loglog_slope(scales, v)
    if not np.isfinite(slope):
        # trailing zeros: everything after the first value vanished
        return bool(np.all(v[1:] == 0.0))
    realized = (scales[0] / scales[-1]) ** 0.5
    return bool(slope < DECAY_SLOPE and (last < DECAY_RATIO * first or last <= first * realized))


def stabilizes(values: Sequence[float], tolerance: float = STABLE_TOLERANCE) -> bool:
    """True when the last three values agree pairwise within ``tolerance``."""
    v = np.asarray(values, dtype=float)
    if len(v) < 3:
        return False
    tail = v[-3:]
    scale = np.max(np.abs(tail))
    if scale == 0.0:
        return False
    spread = np.max(tail) - np.min(tail)
    return bool(spread < tolerance * scale)


def classify_sequence(scales: Sequence[float], values: Sequence[float]) -> SequenceVerdict:
    if decays(scales, values):
        return SequenceVerdict.DECAYS
    if stabilizes(values):
        return SequenceVerdict.STABILIZES
    return SequenceVerdict.UNDECIDED
