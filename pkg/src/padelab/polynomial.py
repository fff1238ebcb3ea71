"""Complex polynomial arithmetic, rootfinding, and tolerance-based factor cancellation.

Coefficients are stored in ascending degree order as complex binary64 values.
Everything here is pure: polynomials are immutable after construction and safe
to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RootfindingError

# Floor for merging numerically split roots (relative to max(1, |root|)).
# A k-fold root perturbed at machine level splits by ~eps^(1/k), so the
# effective threshold for a candidate k-cluster is max(floor, BETA^(1/k)).
# Beyond MAX_DETECTED_MULTIPLICITY the required threshold would swallow
# genuinely distinct roots, so larger clusters are never formed.
MULTIPLICITY_CLUSTER_TOL = 1e-7
_CLUSTER_BETA = 1e-13
MAX_DETECTED_MULTIPLICITY = 5


def _as_coeff_array(coefficients) -> np.ndarray:
    arr = np.asarray(coefficients, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError("coefficients must be one-dimensional")
    return arr


def _trim(arr: np.ndarray) -> np.ndarray:
    """Drop exactly-zero leading coefficients; keep [0] for the zero polynomial."""
    nz = np.nonzero(arr)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return arr[: nz[-1] + 1]


@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial in canonical trimmed form, ascending coefficients."""

    coefficients: np.ndarray

    def __init__(self, coefficients):
        arr = _trim(_as_coeff_array(coefficients))
        arr.setflags(write=False)
        object.__setattr__(self, "coefficients", arr)

    @property
    def degree(self) -> int:
        """Degree after trimming; the zero polynomial reports degree 0."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coefficients[0] == 0

    @property
    def leading(self) -> complex:
        return complex(self.coefficients[-1])

    def __call__(self, z):
        return poly_eval(self, z)

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0.0])
        c = self.coefficients[1:] * np.arange(1, self.degree + 1)
        return Polynomial(c)

    def scale(self, factor: complex) -> "Polynomial":
        return Polynomial(self.coefficients * complex(factor))

    def multiply(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(np.convolve(self.coefficients, other.coefficients))

    def taylor_at(self, z0: complex, k: int) -> np.ndarray:
        """Coefficients of p(z0 + h) in powers of h, orders 0..k (Horner shifts)."""
        work = np.array(self.coefficients, dtype=complex)
        out = np.zeros(k + 1, dtype=complex)
        for j in range(min(k, len(work) - 1) + 1):
            # synthetic division by (z - z0); the remainder is the next coefficient
            for i in range(len(work) - 2, -1, -1):
                work[i] = work[i] + z0 * work[i + 1]
            out[j] = work[0]
            work = work[1:]
            if work.size == 0:
                break
        return out

    def coeff_scale(self) -> float:
        """Max coefficient magnitude; the reference scale for residual tests."""
        return float(np.max(np.abs(self.coefficients)))

    def to_json(self) -> list:
        """JSON wire format: array of [re, im] pairs, ascending degree."""
        return [[float(c.real), float(c.imag)] for c in self.coefficients]

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        return cls([complex(re, im) for re, im in data])


@dataclass(frozen=True)
class RootSet:
    """Roots with positive integer multiplicities, paired as (location, order)."""

    roots: tuple = field(default_factory=tuple)

    def __init__(self, roots):
        pairs = tuple((complex(r), int(m)) for r, m in roots)
        if any(m <= 0 for _, m in pairs):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "roots", pairs)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    def flatten(self) -> np.ndarray:
        """Roots repeated by multiplicity, in stored order."""
        out = []
        for r, m in self.roots:
            out.extend([r] * m)
        return np.asarray(out, dtype=complex)

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _lex_key(z: complex):
    return (z.real, z.imag)


def poly_eval(p: Polynomial, z):
    """Evaluate p at z (scalar or ndarray) by Horner's nested multiplication."""
    z = np.asarray(z, dtype=complex)
    result = np.full(z.shape, p.coefficients[-1], dtype=complex)
    for c in p.coefficients[-2::-1]:
        result = result * z + c
    if result.ndim == 0:
        return complex(result)
    return result


def poly_from_roots(roots, leading: complex = 1.0) -> Polynomial:
    """Expand leading * prod (z - r) over the given roots.

    ``roots`` may be a RootSet or an iterable of complex locations. Factors are
    multiplied in deterministic lexicographic (real, imag) order.
    """
    if leading == 0:
        raise ValueError("leading coefficient must be nonzero")
    if isinstance(roots, RootSet):
        flat = list(roots.flatten())
    else:
        flat = [complex(r) for r in roots]
    flat.sort(key=_lex_key)
    coeffs = np.array([complex(leading)], dtype=complex)
    for r in flat:
        coeffs = np.convolve(coeffs, np.array([-r, 1.0], dtype=complex))
    return Polynomial(coeffs)


def eig_roots(p: Polynomial) -> np.ndarray:
    """Raw companion-matrix eigenvalues of p, without residual certification.

    Coefficients with a strong geometric trend (leading coefficient many
    orders below the constant term, as in truncated-series numerators) are
    first balanced by the variable scaling z = s*w with
    s = (|c_first|/|c_last|)^(1/span); the companion matrix of the balanced
    polynomial keeps its eigenvalues meaningful. Used where roots feed
    counting measures or factor matching and the strict |p(r)| gate of
    poly_roots would reject well-located roots of ill-conditioned high-degree
    monomial representations.
    """
    if p.is_zero:
        raise RootfindingError("undefined roots: zero polynomial")
    if p.degree < 1:
        raise RootfindingError("undefined roots: constant polynomial")
    coeffs = np.array(p.coefficients, dtype=complex)
    nz = np.nonzero(coeffs)[0]
    zero_roots = int(nz[0])  # roots at the origin from trailing zero terms
    coeffs = coeffs[zero_roots:]
    roots = [0.0 + 0j] * zero_roots
    n = len(coeffs) - 1
    if n >= 1:
        span = n
        ratio = abs(coeffs[0]) / abs(coeffs[-1])
        s = float(np.clip(ratio ** (1.0 / span), 1e-6, 1e6)) if ratio > 0 else 1.0
        balanced = coeffs * s ** np.arange(n + 1)
        monic = balanced / balanced[-1]
        companion = np.zeros((n, n), dtype=complex)
        companion[1:, :-1] = np.eye(n - 1)
        companion[:, -1] = -monic[:-1]
        try:
            roots.extend(s * np.linalg.eigvals(companion))
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
            raise RootfindingError(
                "companion eigensolver did not converge",
                diagnostics={"degree": n, "error": str(exc)},
            ) from exc
    return np.asarray(roots, dtype=complex)


def _linkage_groups(points: list[complex], indices: list[int], rel_tol: float):
    """Single-linkage groups of indices at the given relative distance."""
    parent = {i: i for i in indices}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a_pos, i in enumerate(indices):
        for j in indices[a_pos + 1 :]:
            scale = max(1.0, abs(points[i]), abs(points[j]))
            if abs(points[i] - points[j]) <= rel_tol * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in indices:
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _cluster_roots(raw: np.ndarray) -> RootSet:
    """Group numerically split multiple roots; report centroids with multiplicity.

    Works top-down over candidate multiplicities: a k-cluster may span the
    eps^(1/k)-sized splitting an eigensolver produces for a k-fold root, so
    candidate groups of size >= k are accepted at that scale before smaller
    multiplicities are considered at tighter scales.
    """
    points = [complex(z) for z in raw]
    remaining = list(range(len(points)))
    clusters = []
    for k in range(min(len(points), MAX_DETECTED_MULTIPLICITY), 1, -1):
        if len(remaining) < k:
            continue
        tol_k = max(MULTIPLICITY_CLUSTER_TOL, _CLUSTER_BETA ** (1.0 / k))
        for group in _linkage_groups(points, remaining, tol_k):
            if len(group) >= k:
                centroid = complex(np.mean([points[i] for i in group]))
                clusters.append((centroid, len(group)))
                remaining = [i for i in remaining if i not in set(group)]
    for i in remaining:
        clusters.append((points[i], 1))
    clusters.sort(key=lambda rm: _lex_key(rm[0]))
    return RootSet(clusters)


def poly_roots(p: Polynomial, tol: float = 1e-8) -> RootSet:
    """All roots of p with multiplicities, via companion-matrix eigenvalues.

    The companion matrix of the monic-scaled polynomial is fed to the QR
    eigensolver; clusters of eigenvalues closer than the multiplicity
    tolerance are merged to a centroid. Each reported root r must satisfy
    |p(r)| <= tol * max-coefficient-magnitude, else RootfindingError carries
    the worst offender.
    """
    raw = eig_roots(p)
    scale = p.coeff_scale()
    residuals = np.abs(poly_eval(p, raw))
    worst = float(np.max(residuals))
    if worst > tol * scale:
        raise RootfindingError(
            f"root residual {worst:.3e} exceeds {tol:.1e} * scale {scale:.3e}",
            diagnostics={"worst_residual": worst, "scale": scale, "degree": p.degree},
        )
    return _cluster_roots(raw)


def cluster_roots(raw) -> RootSet:
    """Public wrapper: multiplicities from a flat array of root estimates."""
    return _cluster_roots(np.asarray(raw, dtype=complex))


def deflate(p: Polynomial, root: complex) -> Polynomial:
    """Divide p by (z - root) via synthetic division, discarding the remainder."""
    if p.degree < 1:
        raise ValueError("cannot deflate a constant polynomial")
    c = p.coefficients
    out = np.zeros(len(c) - 1, dtype=complex)
    acc = c[-1]
    for i in range(len(c) - 2, -1, -1):
        out[i] = acc
        acc = c[i] + root * acc
    return Polynomial(out)


def remove_common_factors(
    p: Polynomial, q: Polynomial, tol_gcd: float = 1e-8
) -> tuple[Polynomial, Polynomial]:
    """Cancel nearly-common roots of p and q (Froissart doublet removal).

    Roots of p and q within relative distance tol_gcd are matched one-to-one,
    nearest pairs first (ties broken lexicographically), and both members of
    each pair are removed by deflation. The ratio p/q is preserved away from
    the cancelled neighborhoods. Returns (p, q) unchanged when nothing cancels.
    """
    if q.is_zero:
        raise ValueError("q must not be identically zero")
    if p.is_zero or p.degree < 1 or q.degree < 1:
        return p, q
    p_roots = eig_roots(p)
    q_roots = eig_roots(q)
    pairs = []
    for i, rp in enumerate(p_roots):
        for j, rq in enumerate(q_roots):
            dist = abs(rp - rq)
            if dist <= tol_gcd * max(1.0, abs(rp), abs(rq)):
                pairs.append((dist, _lex_key(rp), _lex_key(rq), i, j))
    if not pairs:
        return p, q
    pairs.sort()
    drop_p: set[int] = set()
    drop_q: set[int] = set()
    for _, _, _, i, j in pairs:
        if i in drop_p or j in drop_q:
            continue
        drop_p.add(i)
        drop_q.add(j)
    new_p, new_q = p, q
    for i in sorted(drop_p, key=lambda i: _lex_key(p_roots[i])):
        new_p = deflate(new_p, p_roots[i])
    for j in sorted(drop_q, key=lambda j: _lex_key(q_roots[j])):
        new_q = deflate(new_q, q_roots[j])
    return new_p, new_q
