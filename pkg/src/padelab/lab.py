"""End-to-end convergence experiments.

Four instruments built on the engine: maximal-convergence rate sweeps
against the potential-theoretic target, detection of exact maximally
convergent subsequences from the linearized error, node-equidistribution
tests through potential discrepancies, and boundary zero-clustering scans.

All asymptotic statements are evaluated on finite tail windows (default the
upper half of the sweep) with geometric means; the windows are carried in
the reports.
"""

from __future__ import annotations

import logging
import math
import os
import threading
from dataclasses import dataclass

import numpy as np

from .errors import PadeLabError, StageError
from .models import TargetFunction
from .pade import ExceptionalSet, PadeApproximant, build_pade, exceptional_set
from .polynomial import poly_eval
from .potential import (
    DiscreteMeasure,
    LevelRegion,
    Measure,
    e_minus_potential,
    meromorphy_region,
    potential_discrepancy,
    radius_of_meromorphy,
)
from .regions import Disk, GridConfig, grid_points
from .tables import DiscretePointMeasure, TriangularTable

LOGGER = logging.getLogger(__name__)

# Series whose raw norms sit at this relative floor count as numerically exact.
EXACT_FLOOR_FACTOR = 1e-12
# Default digits for extended-precision norm evaluation in exactness scans.
EXACTNESS_EVAL_DIGITS = 40

_MP_LOCK = threading.Lock()


def thread_count() -> int:
    """Worker cap from PADE_LAB_THREADS (default 1)."""
    raw = os.environ.get("PADE_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sup_norm_on_grid(
    g,
    K,
    exclusions: ExceptionalSet | None = None,
    cfg: GridConfig = GridConfig(),
) -> float:
    """max |g| over K's grid, minus any exceptional disks (the K_eps set)."""
    pts = grid_points(K, cfg)
    if exclusions is not None:
        pts = pts[~exclusions.covers(pts)]
    if pts.size == 0:
        raise PadeLabError("exclusion swallowed K: no grid points remain")
    vals = np.abs(np.asarray(g(pts)))
    return float(np.max(vals))


def sup_e_minus_potential(mu: Measure, K, cfg: GridConfig = GridConfig()) -> float:
    """max of exp(-U) over K's grid."""
    return sup_norm_on_grid(lambda z: e_minus_potential(mu, z), K, cfg=cfg)


def build_sweep(
    f: TargetFunction,
    table: TriangularTable,
    m: int,
    n_values,
    region: LevelRegion | None = None,
    precision="auto",
    threads: int | None = None,
):
    """Build approximants for each n; failures are recorded, not fatal.

    Returns (approximants dict n -> PadeApproximant, failures dict n -> str).
    Builds run on a small thread pool capped by PADE_LAB_THREADS; results are
    keyed by n so ordering is deterministic regardless of scheduling.
    """
    n_values = list(n_values)
    workers = thread_count() if threads is None else max(1, threads)
    approximants: dict[int, PadeApproximant] = {}
    failures: dict[int, str] = {}

    def one(n):
        # the extended backend mutates mpmath's global context: serialize it
        with _MP_LOCK:
            return build_pade(f, table, n, m, region=region, precision=precision)

    if workers == 1 or len(n_values) <= 1:
        for n in n_values:
            try:
                approximants[n] = one(n)
            except (PadeLabError, ValueError) as exc:
                failures[n] = str(exc)
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {n: pool.submit(one, n) for n in n_values}
        for n, fut in futs.items():
            try:
                approximants[n] = fut.result()
            except (PadeLabError, ValueError) as exc:
                failures[n] = str(exc)
    if n_values and not approximants:
        raise StageError("sweep", "every build in the sweep failed")
    return approximants, failures


def default_tail(n_values) -> tuple:
    """Upper half of the sweep, the window standing in for limsup statements."""
    ns = sorted(n_values)
    if not ns:
        return ()
    return tuple(ns[len(ns) // 2 :])


@dataclass(frozen=True)
class RateSeries:
    """Per-n sup errors on K minus the exceptional set, with the rate target."""

    m: int
    eps: float
    n_values: tuple
    errors: tuple  # sup |f - pi_n| per n (nan where the build failed)
    root_rates: tuple  # errors ** (1/n)
    target: float  # sup_K exp(-U) / R_m (0 when R_m is infinite)
    sup_potential: float
    radius: float
    tail_window: tuple
    tail_geomean: float
    inferred_radius: float
    exact_series: bool
    omega_radii_sum: float
    failures: tuple


def rate_sequence(
    f: TargetFunction,
    table: TriangularTable,
    m: int,
    K,
    eps: float,
    n_values,
    measure: Measure,
    E=None,
    cfg: GridConfig = GridConfig(),
    approximants: dict | None = None,
    precision="auto",
    tail: tuple | None = None,
    threads: int | None = None,
) -> RateSeries:
    """Sweep n, measure sup |f - pi_{n,m}| on K \\ Omega(eps), compare targets.

    The exceptional set is the union over the whole sweep of the per-n disk
    systems around inside denominator zeros, exactly the paper-side covering
    whose radii sum stays below eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    report = radius_of_meromorphy(f, measure, m, E)
    region = meromorphy_region(report, measure)
    if approximants is None:
        approximants, failures = build_sweep(
            f, table, m, n_values, region=region, precision=precision, threads=threads
        )
    else:
        failures = {}
    ns = sorted(approximants)
    omega = ExceptionalSet.union(
        [exceptional_set(approximants[n], eps) for n in ns], eps
    )
    sup_pot = sup_e_minus_potential(measure, K, cfg)
    target = 0.0 if math.isinf(report.radius) else sup_pot / report.radius

    pts = grid_points(K, cfg)
    pts = pts[~omega.covers(pts)]
    if pts.size == 0:
        raise PadeLabError("exclusion swallowed K: no grid points remain")
    f_vals = f.eval(pts)
    scale = max(1.0, float(np.max(np.abs(f_vals))))

    errors = {}
    for n in ns:
        a = approximants[n]
        errors[n] = float(np.max(np.abs(f_vals - a.eval(pts))))
    window = tuple(tail) if tail is not None else default_tail(ns)
    window = tuple(n for n in window if n in errors)
    rates = {n: errors[n] ** (1.0 / n) for n in ns if n > 0}
    if window:
        tail_geomean = float(
            np.exp(np.mean([math.log(rates[n]) for n in window if n in rates]))
        )
    else:
        tail_geomean = float("nan")
    inferred_radius = sup_pot / tail_geomean if tail_geomean > 0 else float("inf")
    exact_series = bool(np.median(list(errors.values())) <= EXACT_FLOOR_FACTOR * scale)
    all_n = sorted(set(ns) | set(failures))
    return RateSeries(
        m=m,
        eps=eps,
        n_values=tuple(all_n),
        errors=tuple(errors.get(n, float("nan")) for n in all_n),
        root_rates=tuple(rates.get(n, float("nan")) for n in all_n),
        target=target,
        sup_potential=sup_pot,
        radius=report.radius,
        tail_window=window,
        tail_geomean=tail_geomean,
        inferred_radius=inferred_radius,
        exact_series=exact_series,
        omega_radii_sum=omega.radii_sum(),
        failures=tuple(sorted(failures.items())),
    )


@dataclass(frozen=True)
class ExactnessReport:
    """n-th roots of the linearized error against the maximal-convergence rate.

    h_n = sup_K |F Q_n - Q_f P_n| ** (1/n) with F = f * Q_f; the detected
    subsequence holds every n with |h_n - target| <= delta. A numerically
    exact series (norms at the floor) reports an empty subsequence.
    """

    n_values: tuple
    h_raw: tuple
    h_roots: tuple
    target: float
    delta: float
    subsequence: tuple
    density_ratio: float | None
    degenerate: bool
    radius: float


def _linearized_sups_double(f, q_f, approximants, pts):
    f_vals = f.eval(pts)
    qf_vals = poly_eval(q_f, pts)
    sups = {}
    for n, a in approximants.items():
        lin = qf_vals * (f_vals * poly_eval(a.denominator, pts) - poly_eval(a.numerator, pts))
        sups[n] = float(np.max(np.abs(lin)))
    return sups


def _linearized_sups_extended(f, q_f, approximants, pts, digits):
    import mpmath
    from mpmath import mpc

    from .pade import _mp_eval_poly, _mp_model_values

    sups = {}
    with _MP_LOCK, mpmath.workdps(digits):
        zs = [mpc(complex(z)) for z in pts]
        f_vals = _mp_model_values(f, zs)
        qf_c = [mpc(c) for c in q_f.coefficients]
        qf_vals = [_mp_eval_poly(qf_c, z) for z in zs]
        for n, a in approximants.items():
            pc = [mpc(c) for c in a.numerator.coefficients]
            qc = [mpc(c) for c in a.denominator.coefficients]
            sup = max(
                abs(qf * (fv * _mp_eval_poly(qc, z) - _mp_eval_poly(pc, z)))
                for z, fv, qf in zip(zs, f_vals, qf_vals)
            )
            sups[n] = float(sup)
    return sups


def exactness_subsequence(
    f: TargetFunction,
    table: TriangularTable,
    m: int,
    K,
    delta: float,
    n_values,
    measure: Measure,
    E=None,
    cfg: GridConfig | None = None,
    approximants: dict | None = None,
    precision="auto",
    threads: int | None = None,
) -> ExactnessReport:
    """Detect the n along which the linearized error attains the target rate.

    The norms decay like target**n, far below binary64 resolution for large
    n, so the sup evaluation runs on the extended backend by default (the
    boundary sample count is reduced accordingly; the curve is analytic).
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    report = radius_of_meromorphy(f, measure, m, E)
    region = meromorphy_region(report, measure)
    if approximants is None:
        approximants, _ = build_sweep(
            f, table, m, n_values, region=region, precision=precision, threads=threads
        )
    cfg = cfg or GridConfig(boundary_samples=512)
    pts = grid_points(K, cfg)
    q_f = report.pole_polynomial

    use_extended = precision != "double"
    if use_extended:
        sups = _linearized_sups_extended(
            f, q_f, approximants, pts, EXACTNESS_EVAL_DIGITS
        )
    else:
        sups = _linearized_sups_double(f, q_f, approximants, pts)

    ns = sorted(sups)
    f_scale = max(1.0, float(np.max(np.abs(f.eval(pts)))))
    # an everywhere-m-meromorphic model (R infinite) or norms at the storage
    # floor across the whole sweep mean the series is numerically exact: no
    # rate detection is meaningful, the subsequence is empty by convention
    at_floor = bool(np.max([sups[n] for n in ns]) <= EXACT_FLOOR_FACTOR * f_scale)
    degenerate = math.isinf(report.radius) or at_floor
    target = 0.0 if math.isinf(report.radius) else (
        sup_e_minus_potential(measure, K, cfg) / report.radius
    )
    h_roots = {n: sups[n] ** (1.0 / n) for n in ns if n > 0}
    if degenerate or delta == 0:
        lam: tuple = ()
    else:
        lam = tuple(n for n in ns if n in h_roots and abs(h_roots[n] - target) <= delta)
    density_ratio = None
    if len(lam) >= 2:
        density_ratio = float(max(b / a for a, b in zip(lam, lam[1:])))
    return ExactnessReport(
        n_values=tuple(ns),
        h_raw=tuple(sups[n] for n in ns),
        h_roots=tuple(h_roots.get(n, float("nan")) for n in ns),
        target=target,
        delta=delta,
        subsequence=lam,
        density_ratio=density_ratio,
        degenerate=degenerate,
        radius=report.radius,
    )


def interpolation_distribution_test(
    table: TriangularTable,
    mu: Measure,
    E,
    n_list,
    test_points,
) -> list[tuple[int, float]]:
    """Potential discrepancy between row counting measures and mu, per n."""
    out = []
    for n in n_list:
        row = table.row(n)
        counting = DiscreteMeasure(row)
        out.append((n, potential_discrepancy(counting, mu, test_points, E=E)))
    return out


@dataclass(frozen=True)
class ClusterReport:
    """Zero masses of the numerators in disks along the region boundary."""

    boundary_points: tuple
    disk_radius: float
    n_values: tuple
    masses: tuple  # masses[i][j]: disk at boundary point i, sweep index j
    summary: float  # max over boundary points of max over the tail n
    used_lambda: bool  # False when no subsequence was available ("no-lambda")


def zero_cluster_scan(
    approximants: dict,
    lam,
    region: LevelRegion,
    r: float,
    boundary_samples: int = 256,
    tail_range: tuple | None = None,
    box_radius: float | None = None,
    resolution: int = 400,
) -> ClusterReport:
    """Mass of each numerator's zero counting measure near the boundary of D.

    Scans the n in lam (intersected with tail_range when given); with an
    empty lam the scan covers every built n and flags the report. Numerators
    of degree zero contribute mass 0.
    """
    if r <= 0:
        raise ValueError("disk radius must be positive")
    ns = sorted(approximants)
    lam = [n for n in lam if n in approximants]
    if tail_range is not None:
        lo, hi = tail_range
        lam = [n for n in lam if lo <= n <= hi]
    used_lambda = bool(lam)
    scan_ns = lam if used_lambda else ns
    if box_radius is None:
        box_radius = 1.5 * region.r
    boundary = region.boundary_trace(boundary_samples, box_radius, resolution)
    masses = np.zeros((len(boundary), len(scan_ns)))
    for j, n in enumerate(scan_ns):
        zeros = approximants[n].free_zeros.flatten()
        if zeros.size == 0:
            continue
        counting = DiscretePointMeasure(zeros)
        for i, z0 in enumerate(boundary):
            masses[i, j] = counting.mass(Disk(complex(z0), r))
    summary = float(np.max(masses)) if masses.size else 0.0
    return ClusterReport(
        boundary_points=tuple(complex(z) for z in boundary),
        disk_radius=r,
        n_values=tuple(scan_ns),
        masses=tuple(tuple(row) for row in masses),
        summary=summary,
        used_lambda=used_lambda,
    )
