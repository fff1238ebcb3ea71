"""Multipoint Pade approximants on triangular tables via divided differences.

The order-(n, m) approximant of f on a table consumes the n+m+1 nodes of row
n+m+1. Writing q(z) = sum c_i z^i for the unknown denominator, the defining
condition -- f q - p vanishes at the nodes with deg p <= n -- says the Newton
coefficients of f*q over the nodes vanish at orders n+1 .. n+m. That is a
homogeneous m x (m+1) linear system in the c_i, solved by the minimal right
singular vector; the numerator is the Newton interpolant of f*q truncated to
orders 0 .. n. Nodes are Leja-ordered (repeats kept adjacent) before
differencing to bound intermediate growth; confluent blocks use the
derivative rule g^(j)(x)/j!.

The computed pair is made coprime by tolerance-based cancellation and the
denominator is normalized with respect to a level region D: monic factors
(z - a) for zeros inside D and factors (1 - z/a) for zeros outside. With no
region supplied, every zero counts as outside, which reduces to the classical
normalization Q(0) = 1.

Precision. The divided-difference stage runs behind a scalar abstraction.
Binary64 keeps the coefficient columns relatively accurate, but the weakest
pole signal inside the homogeneous system decays geometrically with n and
sinks below the binary64 noise floor (absolute eps * scale) near n ~ 28 for
desk-scale pole configurations. Builds therefore switch to an exact-input
extended-precision backend (mpmath) for larger node counts; the final
coefficients are O(1) and cast back to binary64 without loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedBuildError, NormalizationError, PoleProximityError
from .models import TargetFunction
from .polynomial import Polynomial, RootSet, cluster_roots, eig_roots, remove_common_factors
from .potential import LevelRegion
from .tables import TriangularTable

# Zeros within this level slack of the region boundary classify as inside.
BOUNDARY_CLASSIFY_TOL = 1e-9
# Relative singular-value threshold below which the null space counts as fat.
NULL_SPACE_TOL = 1e-9
# Trailing denominator coefficients below this relative size are dropped.
DENOMINATOR_TRIM_TOL = 1e-10
# Node count beyond which 'auto' precision switches to the extended backend.
AUTO_EXTENDED_NODES = 26
# Working digits of the extended backend (resolves signals down to ~1e-36).
EXTENDED_DIGITS = 40


class ProductOracle:
    """Evaluation/Taylor oracle for f(z) * p(z) with p a polynomial."""

    def __init__(self, f: TargetFunction, poly: Polynomial):
        self.f = f
        self.poly = poly

    def eval(self, z):
        return self.f.eval(z) * self.poly(z)

    def taylor(self, z0: complex, k: int) -> np.ndarray:
        ft = self.f.taylor(z0, k)
        pt = self.poly.taylor_at(z0, k)
        return np.convolve(ft, pt)[: k + 1]


def leja_order(nodes) -> np.ndarray:
    """Leja ordering of distinct values, multiplicities kept adjacent.

    Starts from the largest modulus (lexicographic tie-break) and repeatedly
    appends the value maximizing the product of distances to those already
    chosen, weighted by multiplicity; each chosen value is emitted as a block
    of its repeats so confluent divided differences see adjacent equal nodes.
    """
    values = [complex(z) for z in nodes]
    counts: dict[complex, int] = {}
    for z in values:
        counts[z] = counts.get(z, 0) + 1
    unique = sorted(counts, key=lambda z: (-abs(z), z.real, z.imag))
    if not unique:
        return np.asarray([], dtype=complex)
    chosen = [unique.pop(0)]
    while unique:
        best = None
        best_score = -math.inf
        for z in unique:
            score = sum(
                counts[c] * math.log(abs(z - c)) if z != c else -math.inf
                for c in chosen
            )
            if score > best_score or (
                score == best_score and (z.real, z.imag) < (best.real, best.imag)
            ):
                best, best_score = z, score
        chosen.append(best)
        unique.remove(best)
    out = []
    for z in chosen:
        out.extend([z] * counts[z])
    return np.asarray(out, dtype=complex)


def newton_coefficients(oracle, nodes) -> np.ndarray:
    """Newton (divided difference) coefficients of the oracle over the nodes.

    Repeated nodes must be adjacent; a block of j+1 equal nodes x contributes
    the confluent entry g^(j)(x)/j! taken from the oracle's Taylor expansion.
    """
    pts = [complex(z) for z in nodes]
    size = len(pts)
    if size == 0:
        raise ValueError("need at least one node")
    mult: dict[complex, int] = {}
    for z in pts:
        mult[z] = mult.get(z, 0) + 1
    taylor_cache = {
        z: oracle.taylor(z, k - 1) for z, k in mult.items() if k > 1
    }
    col = np.asarray(oracle.eval(np.asarray(pts)), dtype=complex)
    coeffs = np.empty(size, dtype=complex)
    coeffs[0] = col[0]
    for j in range(1, size):
        new = np.empty(size - j, dtype=complex)
        for i in range(size - j):
            if pts[i + j] == pts[i]:
                new[i] = taylor_cache[pts[i]][j]
            else:
                new[i] = (col[i + 1] - col[i]) / (pts[i + j] - pts[i])
        col = new
        coeffs[j] = col[0]
    return coeffs


def divided_difference(oracle, nodes) -> complex:
    """Top-order divided difference of the oracle over the ordered nodes."""
    return complex(newton_coefficients(oracle, nodes)[-1])


def newton_to_monomial(coeffs, nodes) -> Polynomial:
    """Monomial form of sum coeffs[j] * prod_{l<j} (z - nodes[l])."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size == 0:
        return Polynomial([0.0])
    poly = np.asarray([coeffs[-1]], dtype=complex)
    for j in range(len(coeffs) - 2, -1, -1):
        poly = np.convolve(poly, np.asarray([-complex(nodes[j]), 1.0], dtype=complex))
        poly[0] += coeffs[j]
    return Polynomial(poly)


@dataclass(frozen=True)
class ExceptionalSet:
    """Union of small disks around the denominator zeros inside the region.

    The per-approximant radius eps/(2 m n^2) keeps the total radius sum of a
    whole sweep below eps (the full series over n is eps * pi^2 / 12).
    """

    disks: tuple  # (center, radius) pairs
    epsilon: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.radii_sum() > self.epsilon + 1e-12:
            raise ValueError("exceptional-set radii exceed the epsilon budget")

    def radii_sum(self) -> float:
        return float(sum(r for _, r in self.disks))

    def covers(self, z) -> np.ndarray:
        """True where z falls in some (open) disk."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        hit = np.zeros(z.shape, dtype=bool)
        for center, radius in self.disks:
            hit |= np.abs(z - center) < radius
        return hit

    @staticmethod
    def union(sets, epsilon: float) -> "ExceptionalSet":
        disks = tuple(d for s in sets for d in s.disks)
        return ExceptionalSet(disks, epsilon)


@dataclass(frozen=True)
class PadeApproximant:
    """The coprime pair (P, Q) of order (n, m) with build diagnostics.

    ``inside_zeros`` lists the denominator zeros classified inside the
    normalization region (the alpha-prime zeros); ``k_inside`` is their count,
    never exceeding m. ``residual`` is the worst interpolation defect
    |f Q - P| over the build nodes including confluent derivative conditions.
    """

    n: int
    m: int
    numerator: Polynomial
    denominator: Polynomial
    free_zeros: RootSet
    free_poles: RootSet
    inside_zeros: tuple
    degenerate: bool
    residual: float
    condition_estimate: float | None = None

    @property
    def k_inside(self) -> int:
        return len(self.inside_zeros)

    def eval(self, z):
        return self.numerator(z) / self.denominator(z)

    def __call__(self, z):
        return self.eval(z)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "P": self.numerator.to_json(),
            "Q": self.denominator.to_json(),
            "free_zeros": [[r.real, r.imag] for r in self.free_zeros.flatten()],
            "free_poles": [[r.real, r.imag] for r in self.free_poles.flatten()],
            "residual": self.residual,
            "degenerate": self.degenerate,
        }


def normalize_denominator(
    q_raw: Polynomial,
    region: LevelRegion | None,
    boundary_tol: float = BOUNDARY_CLASSIFY_TOL,
) -> tuple[Polynomial, tuple, tuple]:
    """Rescale q to prod (z - a') * prod (1 - z/a'') form.

    a' are zeros inside the region (boundary points count as inside), a''
    zeros outside. With region None every zero classifies as outside. Returns
    (Q, inside_zeros, outside_zeros). The rescaling is a scalar multiple, so
    the zeros themselves are untouched.
    """
    if q_raw.is_zero:
        raise ValueError("q must not be identically zero")
    if q_raw.degree == 0:
        return Polynomial([1.0]), (), ()
    zeros = eig_roots(q_raw)
    zeros = sorted((complex(z) for z in zeros), key=lambda z: (z.real, z.imag))
    inside, outside = [], []
    for z in zeros:
        if region is not None and bool(
            np.asarray(region.contains(z, boundary_tol=boundary_tol)).item()
        ):
            inside.append(z)
        else:
            outside.append(z)
    factor = 1.0 / q_raw.leading
    for z in outside:
        if abs(z) < 1e-12:
            raise NormalizationError(
                "normalization singular: denominator zero at the origin outside the region"
            )
        factor *= -1.0 / z
    return q_raw.scale(factor), tuple(inside), tuple(outside)


def exceptional_set(approx: PadeApproximant, eps: float) -> ExceptionalSet:
    """One open disk of radius eps/(2 m n^2) per inside denominator zero."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not approx.inside_zeros:
        return ExceptionalSet((), eps)
    if approx.m < 1 or approx.n < 1:
        raise ValueError("exceptional disks need m >= 1 and n >= 1")
    radius = eps / (2.0 * approx.m * approx.n**2)
    return ExceptionalSet(tuple((z, radius) for z in approx.inside_zeros), eps)


def _mp_eval_poly(coeffs, z):
    acc = coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def _mp_model_values(f: TargetFunction, pts):
    """Model values at mpmath points, inputs converted exactly from binary64."""
    from mpmath import exp as mp_exp
    from mpmath import mpc

    num = [mpc(c) for c in f.numerator.coefficients]
    den = [mpc(c) for c in f.denominator.coefficients]
    vals = []
    for t in pts:
        v = _mp_eval_poly(num, t) / _mp_eval_poly(den, t)
        if f.entire is not None:
            from .models import ExpTerm

            if isinstance(f.entire, ExpTerm):
                v += mpc(f.entire.c) * mp_exp(mpc(f.entire.a) * t)
            else:
                v += _mp_eval_poly([mpc(c) for c in f.entire.coefficients], t)
        vals.append(v)
    return vals


def _mp_dd_column(values, pts):
    """Full Newton coefficient column over distinct mpmath nodes."""
    col = list(values)
    coeffs = [col[0]]
    size = len(pts)
    for j in range(1, size):
        col = [
            (col[i + 1] - col[i]) / (pts[i + j] - pts[i]) for i in range(size - j)
        ]
        coeffs.append(col[0])
    return coeffs


def _mp_det(rows):
    """Recursive Laplace determinant of a small mpmath matrix."""
    size = len(rows)
    if size == 1:
        return rows[0][0]
    total = 0
    for j in range(size):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _mp_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _mp_null_direction(A_rows, m: int):
    """Cramer-style null vector of a rank-m system: signed maximal minors."""
    comps = []
    for i in range(m + 1):
        minor = [row[:i] + row[i + 1 :] for row in A_rows]
        comps.append((-1) ** i * _mp_det(minor))
    return comps


def _null_direction(A: np.ndarray) -> tuple[np.ndarray, bool, float | None]:
    """Minimal right singular vector of the m x (m+1) system.

    Returns (coefficients, degenerate, condition estimate). When more than one
    singular value vanishes relative to the largest, the nullity exceeds one
    (a degenerate Pade block); the smallest-singular-value vector is still the
    canonical minimal-norm representative. The leading nonzero coefficient is
    rotated to be real and positive so builds are deterministic.
    """
    m = A.shape[0]
    if m == 0:
        return np.asarray([1.0 + 0j]), False, None
    _, s, vh = np.linalg.svd(A)
    c = np.conj(vh[-1])
    smax = float(s[0])
    if smax == 0.0:
        degenerate = True
        condition = math.inf
    else:
        degenerate = bool(s[-1] <= NULL_SPACE_TOL * smax)
        condition = smax / float(s[-1]) if s[-1] > 0 else math.inf
    pivot = np.nonzero(np.abs(c) > 1e-12 * np.max(np.abs(c)))[0]
    if pivot.size:
        phase = c[pivot[0]] / abs(c[pivot[0]])
        c = c / phase
    return c, degenerate, condition


def _interpolation_residual(
    f: TargetFunction, P: Polynomial, Q: Polynomial, nodes
) -> float:
    """Worst defect of f*Q - P over the nodes, confluent orders included."""
    pts = [complex(z) for z in nodes]
    mult: dict[complex, int] = {}
    for z in pts:
        mult[z] = mult.get(z, 0) + 1
    worst = 0.0
    for z, k in mult.items():
        if k == 1:
            defect = abs(f.eval(z) * Q(z) - P(z))
        else:
            fq = np.convolve(f.taylor(z, k - 1), Q.taylor_at(z, k - 1))[:k]
            defect = float(np.max(np.abs(fq - P.taylor_at(z, k - 1)[:k])))
        worst = max(worst, defect)
    return worst


def _solve_double(f, nodes, n, m):
    """Binary64 system solve: (P_raw, q_raw, degenerate, condition)."""
    columns = [
        newton_coefficients(ProductOracle(f, Polynomial([0.0] * i + [1.0])), nodes)
        for i in range(m + 1)
    ]
    A = np.empty((m, m + 1), dtype=complex)
    for k in range(m):
        for i in range(m + 1):
            A[k, i] = columns[i][n + 1 + k]
    c, degenerate, condition = _null_direction(A)
    keep = np.nonzero(np.abs(c) > DENOMINATOR_TRIM_TOL * np.max(np.abs(c)))[0]
    c = c[: keep[-1] + 1] if keep.size else np.asarray([1.0 + 0j])
    newton = sum(ci * columns[i] for i, ci in enumerate(c))
    P_raw = newton_to_monomial(newton[: n + 1], nodes[: n + 1])
    return P_raw, Polynomial(c), degenerate, condition


def _solve_extended(f, nodes, n, m, digits):
    """Extended-precision system solve for distinct nodes.

    The degeneracy flag and condition estimate still come from the binary64
    SVD of the (cast) system: rank defects at the documented 1e-9 relative
    level are visible there, while the extended null solve recovers the
    subdominant pole signals binary64 cannot represent.
    """
    import mpmath

    with mpmath.workdps(digits):
        pts = [mpmath.mpc(complex(z)) for z in nodes]
        f_vals = _mp_model_values(f, pts)
        columns = []
        for i in range(m + 1):
            vals = [v * t**i for v, t in zip(f_vals, pts)]
            columns.append(_mp_dd_column(vals, pts))
        A_rows = [
            [columns[i][n + 1 + k] for i in range(m + 1)] for k in range(m)
        ]
        A_float = np.asarray([[complex(e) for e in r] for r in A_rows], dtype=complex)
        c_float, degenerate, condition = _null_direction(A_float)
        if degenerate:
            c_mp = [mpmath.mpc(v) for v in c_float]
        else:
            c_mp = _mp_null_direction(A_rows, m)
            top = max(abs(v) for v in c_mp)
            if top == 0:
                degenerate = True
                c_mp = [mpmath.mpc(v) for v in c_float]
            else:
                c_mp = [v / top for v in c_mp]
        top = max(abs(v) for v in c_mp)
        keep = [i for i, v in enumerate(c_mp) if abs(v) > DENOMINATOR_TRIM_TOL * top]
        c_mp = c_mp[: keep[-1] + 1] if keep else [mpmath.mpc(1)]
        a_mp = [
            sum(ci * columns[i][j] for i, ci in enumerate(c_mp))
            for j in range(min(n + 1, len(pts)))
        ]
        # Newton form -> monomials, still in extended precision
        poly = [a_mp[-1]]
        for j in range(len(a_mp) - 2, -1, -1):
            out = [mpmath.mpc(0)] * (len(poly) + 1)
            for i, p in enumerate(poly):  # multiply by (z - pts[j])
                out[i + 1] += p
                out[i] -= pts[j] * p
            out[0] += a_mp[j]
            poly = out
        P_raw = Polynomial([complex(v) for v in poly])
        q_raw = Polynomial([complex(v) for v in c_mp])
    return P_raw, q_raw, degenerate, condition


def build_pade(
    f: TargetFunction,
    table: TriangularTable,
    n: int,
    m: int,
    region: LevelRegion | None = None,
    tol_gcd: float = 1e-8,
    tol_residual_factor: float = 1e-8,
    precision: str | int = "auto",
) -> PadeApproximant:
    """Construct the order-(n, m) multipoint Pade approximant of f.

    ``region`` is the level region used to normalize the denominator (the
    ground-truth domain of m-meromorphy in experiments); None gives the
    classical normalization Q(0) = 1. ``precision`` is "double", "auto"
    (extended backend beyond AUTO_EXTENDED_NODES distinct nodes), or an
    explicit digit count. Raises IllConditionedBuildError when the
    interpolation residual of the final pair exceeds
    tol_residual_factor * max(1, max |f| over the nodes).
    """
    if n < 0 or m < 0:
        raise ValueError("order indices must be nonnegative")
    row = table.row(n + m + 1)
    pole_locs = f.pole_locations
    if pole_locs.size:
        dmin = np.min(np.abs(row[:, None] - pole_locs[None, :]))
        if dmin <= 1e-12:
            raise PoleProximityError("a table node coincides with a pole of f")
    nodes = leja_order(row)

    distinct = len({complex(z) for z in row}) == len(row)
    if precision == "double":
        use_extended, digits = False, 0
    elif precision == "auto":
        use_extended = distinct and 1 <= m <= 6 and len(row) > AUTO_EXTENDED_NODES
        digits = EXTENDED_DIGITS
    elif isinstance(precision, int):
        use_extended = distinct and 1 <= m <= 6
        digits = precision
    else:
        raise ValueError(f"unknown precision {precision!r}")

    if use_extended:
        P_raw, q_raw, degenerate, condition = _solve_extended(f, nodes, n, m, digits)
    else:
        P_raw, q_raw, degenerate, condition = _solve_double(f, nodes, n, m)

    p1, q1 = remove_common_factors(P_raw, q_raw, tol_gcd=tol_gcd)
    Q, inside, _ = normalize_denominator(q1, region)
    scalar = (
        Q.coefficients[-1] / q1.coefficients[-1]
        if q1.degree >= 1
        else 1.0 / q1.coefficients[0]
    )
    P = p1.scale(scalar)

    node_values = np.abs(np.asarray(f.eval(np.unique(np.asarray(nodes)))))
    scale = max(1.0, float(np.max(node_values)))
    residual = _interpolation_residual(f, P, Q, nodes)
    if residual > tol_residual_factor * scale:
        raise IllConditionedBuildError(
            f"ill-conditioned build: residual {residual:.3e} exceeds "
            f"{tol_residual_factor:.1e} * scale {scale:.3e}",
            condition_estimate=condition,
            residual=residual,
        )

    free_zeros = (
        cluster_roots(eig_roots(P)) if P.degree >= 1 and not P.is_zero else RootSet([])
    )
    free_poles = cluster_roots(eig_roots(Q)) if Q.degree >= 1 else RootSet([])
    return PadeApproximant(
        n=n,
        m=m,
        numerator=P,
        denominator=Q,
        free_zeros=free_zeros,
        free_poles=free_poles,
        inside_zeros=inside,
        degenerate=degenerate,
        residual=residual,
        condition_estimate=condition,
    )
