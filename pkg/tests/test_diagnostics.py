import math

import numpy as np
import pytest

from smoothrank import (
    AffineObservationOperator,
    BoundUndefinedError,
    QraProfile,
    TrivialNullSpaceError,
    alpha_delta,
    qra_check,
    rank_assumption_holds,
    recovery_bound,
    spherical_section_estimate,
)
from tests.conftest import small_instance


def test_alpha_delta_frozen_values():
    # delta * sqrt(2 ln n), computed independently and frozen
    assert alpha_delta(QraProfile(0.1), 4) == pytest.approx(0.16651092223153952, abs=1e-16)
    assert alpha_delta(QraProfile(1.0), 2) == pytest.approx(1.1774100225154747, abs=1e-16)


def test_alpha_delta_degenerate_and_invalid():
    assert alpha_delta(QraProfile(5.0), 1) == 0.0
    with pytest.raises(ValueError):
        alpha_delta(QraProfile(1.0), 0)


def test_alpha_delta_linear_in_width():
    a1 = alpha_delta(QraProfile(1.0), 10)
    a3 = alpha_delta(QraProfile(3.0), 10)
    assert a3 == pytest.approx(3.0 * a1, rel=1e-15)


def test_recovery_bound_formula():
    rb = recovery_bound(QraProfile(0.5), n=4, spherical_constant=2.0)
    alpha = 0.5 * math.sqrt(2.0 * math.log(4))
    assert rb.alpha_delta == pytest.approx(alpha)
    assert rb.bound == pytest.approx(4 * alpha / (math.sqrt(2.0) - 1.0))
    assert rb.n == 4 and rb.delta == 0.5 and rb.spherical_constant == 2.0


def test_recovery_bound_unit_constant_has_unit_denominator():
    rb = recovery_bound(QraProfile(1.0), n=3, spherical_constant=1.0)
    assert rb.bound == pytest.approx(3 * alpha_delta(QraProfile(1.0), 3))


def test_recovery_bound_shrinks_with_delta():
    wide = recovery_bound(QraProfile(1.0), 5, 2.0)
    narrow = recovery_bound(QraProfile(0.01), 5, 2.0)
    assert narrow.bound == pytest.approx(0.01 * wide.bound, rel=1e-12)


def test_recovery_bound_undefined_for_flat_denominator():
    # At huge constants sqrt(D) - sqrt(ceil(D - 1)) vanishes in floats.
    with pytest.raises(BoundUndefinedError):
        recovery_bound(QraProfile(1.0), 5, 1e32)
    with pytest.raises(ValueError):
        recovery_bound(QraProfile(1.0), 5, 0.0)


def test_rank_assumption_advisory():
    assert rank_assumption_holds(1, 2.5)
    assert not rank_assumption_holds(2, 4.0)
    with pytest.raises(ValueError):
        rank_assumption_holds(-1, 2.0)


def test_operator_from_instance_keeps_features_and_ones():
    _, _, inst, obs_x, _ = small_instance(seed=0, n=6, d=4, t=2)
    op = AffineObservationOperator.from_instance(inst)
    assert op.shape == (6, 2 + 4 + 1)
    for i, j in zip(*np.nonzero(obs_x)):
        assert (i, 2 + j) in op.fixed_coords
    for i in range(6):
        assert (i, 6) in op.fixed_coords
    # label coordinates are never equality-constrained
    assert all(j >= 2 for _, j in op.fixed_coords)
    free = op.free_mask
    assert free.shape == op.shape
    assert free.sum() == 6 * 7 - len(op.fixed_coords)


def test_operator_rejects_out_of_range_coords():
    with pytest.raises(ValueError):
        AffineObservationOperator(shape=(2, 2), fixed_coords={(2, 0)})
    with pytest.raises(ValueError):
        AffineObservationOperator(shape=(0, 2), fixed_coords=set())


def test_spherical_estimate_rank_one_null_space_is_one():
    # A single free row: every null-space matrix is rank 1, so the nuclear
    # and Frobenius norms agree and the ratio is exactly 1.
    op = AffineObservationOperator(shape=(1, 5), fixed_coords=set())
    assert spherical_section_estimate(op, samples=50, seed=0) == 1.0


def test_spherical_estimate_trivial_null_space():
    op = AffineObservationOperator(
        shape=(2, 2), fixed_coords={(0, 0), (0, 1), (1, 0), (1, 1)}
    )
    with pytest.raises(TrivialNullSpaceError):
        spherical_section_estimate(op)


def test_spherical_estimate_bounds_and_monotonicity():
    op = AffineObservationOperator(shape=(4, 5), fixed_coords={(0, 0), (3, 4)})
    few = spherical_section_estimate(op, samples=20, seed=1)
    many = spherical_section_estimate(op, samples=200, seed=1)
    assert many <= few  # min over nested draws of a shared stream
    assert many >= 1.0


def test_spherical_estimate_deterministic():
    op = AffineObservationOperator(shape=(3, 4), fixed_coords={(1, 1)})
    a = spherical_section_estimate(op, samples=64, seed=9)
    b = spherical_section_estimate(op, samples=64, seed=9)
    assert a == b


def test_spherical_estimate_rejects_bad_samples():
    op = AffineObservationOperator(shape=(1, 2), fixed_coords=set())
    with pytest.raises(ValueError):
        spherical_section_estimate(op, samples=0)


def test_qra_check_passes_on_wide_grid():
    p = QraProfile(2.0)
    grid = np.linspace(-10.0, 10.0, 101)  # 5 widths out, includes 0
    report = qra_check(p, grid)
    assert report.symmetric
    assert report.unit_only_at_zero
    assert report.concave_near_zero
    assert report.tail_decays
    assert report.all_pass


def test_qra_check_flags_short_tail():
    p = QraProfile(2.0)
    report = qra_check(p, np.linspace(-4.0, 4.0, 41))  # only 2 widths out
    assert not report.tail_decays
    assert not report.all_pass


def test_qra_check_needs_symmetric_grid():
    with pytest.raises(ValueError):
        qra_check(QraProfile(1.0), [-1.0, 0.0, 2.0])
    with pytest.raises(ValueError):
        qra_check(QraProfile(1.0), [-1.0, 1.0])


def test_qra_check_grid_without_zero_lacks_peak():
    p = QraProfile(1.0)
    grid = np.concatenate([np.linspace(-5, -0.1, 25), np.linspace(0.1, 5, 25)])
    report = qra_check(p, grid)
    assert not report.unit_only_at_zero


def test_qra_second_difference_turns_at_the_width():
    # The Gaussian bump switches from concave to convex at |x| = delta; the
    # core check stays inside delta/2 where concavity is strict.
    p = QraProfile(1.0)
    x = np.linspace(-3, 3, 601)
    from smoothrank import qra_value

    f = qra_value(p, x)
    second = np.diff(f, 2)
    inner = np.abs(x[1:-1]) < 0.5
    outer = np.abs(x[1:-1]) > 1.5
    assert np.all(second[inner] < 0)
    assert np.all(second[outer] > 0)
