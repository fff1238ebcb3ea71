import math
from dataclasses import dataclass

import numpy as np
import pytest

from padelab.errors import PadeLabError
from padelab.lab import (
    ClusterReport,
    build_sweep,
    default_tail,
    exactness_subsequence,
    interpolation_distribution_test,
    rate_sequence,
    sup_norm_on_grid,
    zero_cluster_scan,
)
from padelab.models import from_partial_fractions, rational
from padelab.pade import ExceptionalSet
from padelab.polynomial import RootSet
from padelab.potential import LevelRegion, UniformCircleMeasure, e_minus_potential
from padelab.regions import Circle, Disk, GridConfig
from padelab.tables import arc_table, roots_of_unity_table

UNIT_CIRCLE = UniformCircleMeasure(0, 1)
CFG_FAST = GridConfig(resolution=80, boundary_samples=256)


def montessus_model():
    return from_partial_fractions([(2, 1), (3, 1), (4, 1)])


def test_sup_norm_constant():
    assert sup_norm_on_grid(lambda z: np.full(z.shape, -3 + 4j), Disk(0, 1), cfg=CFG_FAST) == 5.0


def test_sup_norm_identity_on_circle():
    val = sup_norm_on_grid(lambda z: z, Circle(0, 1.5), cfg=CFG_FAST)
    assert abs(val - 1.5) < 1e-12


def test_sup_norm_e_minus_potential_closed_form():
    val = sup_norm_on_grid(
        lambda z: e_minus_potential(UNIT_CIRCLE, z), Circle(0, 1.5), cfg=CFG_FAST
    )
    assert abs(val - 1.5) < 1e-12


def test_sup_norm_exclusion_only_lowers():
    spike = lambda z: 1.0 / (np.abs(z - 0.5) + 1e-3)
    full = sup_norm_on_grid(spike, Disk(0, 1), cfg=CFG_FAST)
    omega = ExceptionalSet(((0.5 + 0j, 0.05),), 0.1)
    masked = sup_norm_on_grid(spike, Disk(0, 1), exclusions=omega, cfg=CFG_FAST)
    assert masked <= full


def test_sup_norm_exclusion_swallowing_errors():
    omega = ExceptionalSet(((0.0 + 0j, 0.4),), 1.0)
    with pytest.raises(PadeLabError, match="swallowed"):
        sup_norm_on_grid(lambda z: z, Circle(0, 0.2), exclusions=omega, cfg=CFG_FAST)


def test_default_tail_upper_half():
    assert default_tail([4, 5, 6, 7]) == (6, 7)
    assert default_tail([1, 2, 3]) == (2, 3)


def test_rate_sequence_m0_polynomial_interpolation():
    # f = 1/(z-2), m = 0, K = E = unit disk: tail root rates near 1/2
    f = rational([1], [-2, 1])
    series = rate_sequence(
        f,
        roots_of_unity_table(max_row=40),
        0,
        Disk(0, 1),
        eps=0.01,
        n_values=range(4, 31),
        measure=UNIT_CIRCLE,
        E=Disk(0, 1),
        cfg=CFG_FAST,
    )
    assert series.target == pytest.approx(0.5, abs=1e-12)
    assert abs(series.tail_geomean - 0.5) < 0.05
    assert series.radius == pytest.approx(2.0)
    assert not series.exact_series
    assert series.omega_radii_sum == 0.0  # m=0: no denominator zeros


def test_rate_sequence_rational_flags_exact():
    f = rational([1.0, 0.5], [1.0, -0.25, 0.125])
    series = rate_sequence(
        f,
        roots_of_unity_table(max_row=24),
        2,
        Circle(0, 1.5),
        eps=0.01,
        n_values=range(2, 9),
        measure=UNIT_CIRCLE,
        E=Disk(0, 1),
        cfg=CFG_FAST,
    )
    assert series.exact_series


def test_rate_sequence_montessus_short():
    f = montessus_model()
    series = rate_sequence(
        f,
        roots_of_unity_table(max_row=32),
        2,
        Circle(0, 1.5),
        eps=0.01,
        n_values=range(8, 29),
        measure=UNIT_CIRCLE,
        E=Disk(0, 1),
        cfg=CFG_FAST,
    )
    assert series.target == pytest.approx(0.375)
    assert series.omega_radii_sum <= 0.01
    assert abs(series.tail_geomean - 0.375) < 0.05
    # Theorem-B direction: inferred R never exceeds the true radius by >10%
    assert series.inferred_radius <= series.radius * 1.1


def test_exactness_montessus_detects_subsequence():
    f = montessus_model()
    report = exactness_subsequence(
        f,
        roots_of_unity_table(max_row=40),
        2,
        Circle(0, 1.5),
        delta=0.05,
        n_values=range(16, 37),
        measure=UNIT_CIRCLE,
        E=Disk(0, 1),
        cfg=GridConfig(boundary_samples=128),
    )
    assert report.target == pytest.approx(0.375)
    assert len(report.subsequence) >= 3
    assert not report.degenerate
    assert report.density_ratio is not None and report.density_ratio < 2.0
    for n, h in zip(report.n_values, report.h_roots):
        if n in report.subsequence:
            assert abs(h - 0.375) <= 0.05


def test_exactness_rational_degenerate_empty_lambda():
    # f of type (0,2): every approximant reproduces it, norms sit at the floor
    f = rational([2.0], [1.0, 0.0, -0.2])
    report = exactness_subsequence(
        f,
        roots_of_unity_table(max_row=24),
        2,
        Circle(0, 1.5),
        delta=0.05,
        n_values=range(2, 10),
        measure=UNIT_CIRCLE,
        E=Disk(0, 1),
        cfg=GridConfig(boundary_samples=64),
    )
    assert report.degenerate
    assert report.subsequence == ()
    assert math.isinf(report.radius)


def test_exactness_zero_delta_empty():
    f = montessus_model()
    report = exactness_subsequence(
        f,
        roots_of_unity_table(max_row=24),
        2,
        Circle(0, 1.5),
        delta=0.0,
        n_values=range(10, 16),
        measure=UNIT_CIRCLE,
        E=Disk(0, 1),
        cfg=GridConfig(boundary_samples=64),
    )
    assert report.subsequence == ()


def test_exactness_infinite_radius_degenerate():
    from padelab.models import exp_model

    report = exactness_subsequence(
        exp_model(),
        roots_of_unity_table(max_row=12),
        1,
        Circle(0, 1.5),
        delta=0.05,
        n_values=range(2, 6),
        measure=UNIT_CIRCLE,
        E=Disk(0, 1),
        cfg=GridConfig(boundary_samples=64),
    )
    assert report.degenerate and report.subsequence == ()
    assert report.target == 0.0


def test_distribution_roots_of_unity_converges():
    results = dict(
        interpolation_distribution_test(
            roots_of_unity_table(max_row=64),
            UNIT_CIRCLE,
            Disk(0, 1),
            [1, 8, 64],
            [2.0, 1.8j, -2.5],
        )
    )
    assert results[64] <= 1e-2
    assert results[8] <= 0.1
    assert math.isfinite(results[1])


def test_distribution_arc_control_fails_to_converge():
    results = dict(
        interpolation_distribution_test(
            arc_table(max_row=64),
            UNIT_CIRCLE,
            Disk(0, 1),
            [64],
            [2.0, 1.8j, -2.5],
        )
    )
    assert results[64] > 0.1


@dataclass
class _StubApprox:
    free_zeros: RootSet


def test_cluster_masses_match_brute_force():
    rng = np.random.default_rng(17)
    zs = rng.uniform(-5, 5, 30) + 1j * rng.uniform(-5, 5, 30)
    stub = _StubApprox(RootSet([(z, 1) for z in zs]))
    region = LevelRegion(UNIT_CIRCLE, 4.0)
    report = zero_cluster_scan(
        {7: stub}, [7], region, r=0.5, boundary_samples=32, resolution=200
    )
    assert report.used_lambda
    for i, z0 in enumerate(report.boundary_points):
        brute = np.count_nonzero(np.abs(zs - z0) <= 0.5 + 1e-12) / 30
        assert report.masses[i][0] == pytest.approx(brute)


def test_cluster_all_far_zeros_summary_zero():
    stub = _StubApprox(RootSet([(20.0 + 0j, 1), (-15.0 + 0j, 2)]))
    region = LevelRegion(UNIT_CIRCLE, 4.0)
    report = zero_cluster_scan(
        {3: stub}, [3], region, r=0.5, boundary_samples=16, resolution=200
    )
    assert report.summary == 0.0


def test_cluster_no_lambda_scans_all_built():
    stub = _StubApprox(RootSet([(4.0 + 0j, 1)]))
    region = LevelRegion(UNIT_CIRCLE, 4.0)
    report = zero_cluster_scan(
        {5: stub}, [], region, r=0.5, boundary_samples=16, resolution=200
    )
    assert not report.used_lambda
    assert report.n_values == (5,)
    assert report.summary == pytest.approx(1.0)


def test_build_sweep_records_failures_and_continues():
    f = montessus_model()
    # rows above max_row fail inside the sweep but do not kill it
    approx, failures = build_sweep(f, roots_of_unity_table(max_row=12), 2, [6, 8, 20])
    assert set(approx) == {6, 8}
    assert 20 in failures
