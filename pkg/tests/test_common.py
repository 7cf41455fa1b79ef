"""Tests for decision rules and mergeable aggregators."""

import math
import sys

import numpy as np
import pytest

from common.aggregate import RunningMoments, batch_means_variance_stderr, jackknife_variance_stderr
from common.decisions import SequenceVerdict, classify_sequence, decays, loglog_slope, stabilizes
if sys.version_info < (3, 11):  # pragma: no cover
    from exceptiongroup import ExceptionGroup

from common.errors import BlowUpError, DomainError, PreconditionError, SheLabError, unwrap_group

SCALES = [16.0, 64.0, 256.0, 1024.0]


def test_loglog_slope_of_power_law():
    values = [n ** -1.0 for n in SCALES]
    assert loglog_slope(SCALES, values) == pytest.approx(-1.0)


def test_loglog_slope_needs_two_points():
    assert math.isnan(loglog_slope([1.0, 2.0], [1.0, 0.0]))


def test_power_decay_is_decay():
    assert decays(SCALES, [n ** -1.0 for n in SCALES])
    assert classify_sequence(SCALES, [n ** -1.0 for n in SCALES]) == SequenceVerdict.DECAYS


def test_slow_decay_is_not_decay():
    values = [n ** -0.1 for n in SCALES]
    assert not decays(SCALES, values)


def test_constant_sequence_stabilizes():
    assert stabilizes([2.0, 2.0, 2.0, 2.0])
    assert classify_sequence(SCALES, [0.25] * 4) == SequenceVerdict.STABILIZES


def test_all_zero_sequence_decays():
    assert classify_sequence(SCALES, [0.0] * 4) == SequenceVerdict.DECAYS


def test_trailing_zeros_decay():
    assert decays(SCALES, [1.0, 0.0, 0.0, 0.0])


def test_wandering_sequence_is_undecided():
    assert classify_sequence(SCALES, [1.0, 2.0, 1.0, 2.0]) == SequenceVerdict.UNDECIDED


def test_running_moments_merge_matches_numpy():
    rng = np.random.default_rng(0)
    data = rng.normal(size=(200, 5))
    a = RunningMoments().update_batch(data[:64])
    b = RunningMoments().update_batch(data[64:])
    merged = a.merge(b)
    assert merged.count == 200
    np.testing.assert_allclose(merged.mean, data.mean(axis=0))
    np.testing.assert_allclose(merged.variance, data.var(axis=0, ddof=1))


def test_running_moments_merge_with_empty():
    m = RunningMoments().update_batch(np.ones((3, 2)))
    assert RunningMoments().merge(m).count == 3
    assert m.merge(RunningMoments()).count == 3


def test_variance_stderr_estimators_agree_roughly():
    rng = np.random.default_rng(1)
    x = rng.normal(size=4000)
    jk = jackknife_variance_stderr(x)
    bm = batch_means_variance_stderr(x)
    # normal theory: sqrt(2 / (n - 1)) for unit variance
    expected = math.sqrt(2 / 3999)
    assert jk == pytest.approx(expected, rel=0.25)
    assert bm == pytest.approx(expected, rel=0.6)


def test_stderr_estimators_need_samples():
    assert math.isnan(jackknife_variance_stderr([1.0, 2.0]))
    assert math.isnan(batch_means_variance_stderr([1.0, 2.0, 3.0]))


def test_error_hierarchy():
    assert issubclass(DomainError, ValueError)
    err = BlowUpError(12, [3, 4])
    assert isinstance(err, SheLabError)
    assert err.step == 12 and err.replicas == [3, 4]
    assert "step 12" in str(err)


def test_unwrap_group_merges_blowups_at_the_earliest_step():
    group = ExceptionGroup("workers", [
        BlowUpError(5, [70]),
        BlowUpError(3, [65]),
        ExceptionGroup("nested", [BlowUpError(3, [1])]),
    ])
    merged = unwrap_group(group)
    assert isinstance(merged, BlowUpError)
    assert merged.step == 3
    assert merged.replicas == [1, 65]


def test_unwrap_group_prefers_lab_errors():
    error = PreconditionError("bad block")
    assert unwrap_group(ExceptionGroup("workers", [RuntimeError("x"), error])) is error
    group = ExceptionGroup("workers", [RuntimeError("x")])
    assert unwrap_group(group) is group
