"""Logarithmic potentials, level regions, and the radius of m-meromorphy.

Unit measures come in three kinds: discrete counting measures, the uniform
measure on a circle, and the arcsine (equilibrium) measure of a real
interval. The potential of a unit measure mu is

    U(z) = integral of log(1/|z - t|) d mu(t),

evaluated in closed form for the reference kinds and as a mean of logs for
counting measures. The value +inf at an atom is legal; e^(-U) is 0 there by
convention, which keeps sublevel-region membership total.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import PadeLabError
from .models import TargetFunction
from .polynomial import Polynomial, poly_from_roots
from .regions import Circle, Disk, GridConfig, Interval, boundary_points, grid_points

LOGGER = logging.getLogger(__name__)

ATOM_TOL = 1e-300  # distances below this count as sitting on an atom


@dataclass(frozen=True)
class DiscreteMeasure:
    """Equal mass 1/N on each of N points."""

    points: np.ndarray

    def __init__(self, points):
        arr = np.asarray(points, dtype=complex).ravel()
        if arr.size == 0:
            raise ValueError("discrete measure needs at least one atom")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    def potential(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        dist = np.abs(np.atleast_1d(z)[..., None] - self.points[None, ...])
        with np.errstate(divide="ignore"):
            vals = -np.mean(np.log(dist), axis=-1)
        return float(vals[0]) if scalar else vals

    def is_atom(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.min(np.abs(z[..., None] - self.points[None, ...]), axis=-1) <= ATOM_TOL

    def support_radius(self) -> float:
        return float(np.max(np.abs(self.points)))

    def to_json(self):
        return {"kind": "discrete", "points": [[p.real, p.imag] for p in self.points]}


@dataclass(frozen=True)
class UniformCircleMeasure:
    """Normalized arclength on the circle |z - center| = radius."""

    center: complex
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def potential(self, z):
        z = np.asarray(z, dtype=complex)
        vals = -np.log(np.maximum(np.abs(z - self.center), self.radius))
        return vals if vals.ndim else float(vals)

    def is_atom(self, z):
        z = np.asarray(z, dtype=complex)
        return np.zeros(z.shape, dtype=bool)

    def support_radius(self) -> float:
        return abs(self.center) + self.radius

    def to_json(self):
        return {
            "kind": "uniform_circle",
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
        }


@dataclass(frozen=True)
class ArcsineIntervalMeasure:
    """Equilibrium measure of the real interval [a, b]."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("arcsine interval requires a < b")

    def potential(self, z):
        z = np.asarray(z, dtype=complex)
        w = (2 * z - (self.a + self.b)) / (self.b - self.a)
        s = np.sqrt(w - 1) * np.sqrt(w + 1)
        joukowski = w + s
        flip = np.abs(joukowski) < 1
        joukowski = np.where(flip, w - s, joukowski)
        mag = np.abs(joukowski)
        mag = np.maximum(mag, 1.0)  # on the cut |w + sqrt(w^2-1)| = 1 up to rounding
        vals = math.log(4.0 / (self.b - self.a)) - np.log(mag)
        return vals if vals.ndim else float(vals)

    def is_atom(self, z):
        z = np.asarray(z, dtype=complex)
        return np.zeros(z.shape, dtype=bool)

    def support_radius(self) -> float:
        return max(abs(self.a), abs(self.b))

    def to_json(self):
        return {"kind": "arcsine_interval", "a": self.a, "b": self.b}


Measure = DiscreteMeasure | UniformCircleMeasure | ArcsineIntervalMeasure


def measure_from_json(data: dict) -> Measure:
    kind = data.get("kind")
    if kind == "discrete":
        return DiscreteMeasure([complex(re, im) for re, im in data["points"]])
    if kind == "uniform_circle":
        return UniformCircleMeasure(complex(*data["center"]), float(data["radius"]))
    if kind == "arcsine_interval":
        return ArcsineIntervalMeasure(float(data["a"]), float(data["b"]))
    raise ValueError(f"unknown measure kind {kind!r}")


def potential_value(mu: Measure, z):
    """U(z); +inf at atoms of discrete measures."""
    return mu.potential(z)


def e_minus_potential(mu: Measure, z):
    """exp(-U(z)), with 0 at atoms by convention."""
    u = np.asarray(mu.potential(z))
    with np.errstate(over="ignore"):
        vals = np.exp(-u)
    vals = np.where(np.isinf(u) & (u > 0), 0.0, vals)
    return vals if vals.ndim else float(vals)


@dataclass(frozen=True)
class LevelRegion:
    """Open sublevel region { z : exp(-U(z)) < r }."""

    measure: Measure
    r: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("level must be positive")

    def contains(self, z, boundary_tol: float = 0.0):
        """Membership; boundary_tol > 0 extends the region outward by that level slack."""
        vals = np.asarray(e_minus_potential(self.measure, z))
        out = vals < self.r + boundary_tol
        return out if out.ndim else bool(out)

    def field_on_grid(self, box_radius: float, resolution: int):
        """(xs, ys, F) with F[i, j] = exp(-U(xs[j] + 1i ys[i]))."""
        xs = np.linspace(-box_radius, box_radius, resolution)
        ys = np.linspace(-box_radius, box_radius, resolution)
        zz = xs[None, :] + 1j * ys[:, None]
        return xs, ys, np.asarray(e_minus_potential(self.measure, zz))

    def connected_on_grid(self, box_radius: float, resolution: int = 400) -> bool:
        """Flood-fill connectivity of the inside mask on the sampling grid."""
        _, _, field = self.field_on_grid(box_radius, resolution)
        mask = field < self.r
        if not mask.any():
            return False
        _, num = ndimage.label(mask)
        return num == 1

    def boundary_trace(
        self, count: int, box_radius: float, resolution: int = 400
    ) -> np.ndarray:
        """Sample the level curve exp(-U) = r by tracing grid-edge crossings.

        Crossing points are located by linear interpolation along grid edges,
        ordered by angle around their centroid, and resampled uniformly in
        arclength. Assumes a single closed star-shaped contour, which holds
        for every catalog measure at levels above rho_max.
        """
        xs, ys, field = self.field_on_grid(box_radius, resolution)
        diff = field - self.r
        pts = []
        # vertical crossings: sign change along each row
        sign_change = diff[:, :-1] * diff[:, 1:] < 0
        ii, jj = np.nonzero(sign_change)
        for i, j in zip(ii, jj):
            t = diff[i, j] / (diff[i, j] - diff[i, j + 1])
            pts.append(complex(xs[j] + t * (xs[j + 1] - xs[j]), ys[i]))
        # horizontal crossings: sign change along each column
        sign_change = diff[:-1, :] * diff[1:, :] < 0
        ii, jj = np.nonzero(sign_change)
        for i, j in zip(ii, jj):
            t = diff[i, j] / (diff[i, j] - diff[i + 1, j])
            pts.append(complex(xs[j], ys[i] + t * (ys[i + 1] - ys[i])))
        if len(pts) < 8:
            raise PadeLabError(
                f"level curve at r={self.r:g} not resolved on the grid "
                f"(box {box_radius:g}, resolution {resolution})"
            )
        pts = np.asarray(pts)
        centroid = pts.mean()
        pts = pts[np.argsort(np.angle(pts - centroid))]
        closed = np.concatenate([pts, pts[:1]])
        seg = np.abs(np.diff(closed))
        arclen = np.concatenate([[0.0], np.cumsum(seg)])
        total = arclen[-1]
        targets = np.linspace(0.0, total, count, endpoint=False)
        out = np.empty(count, dtype=complex)
        for k, s in enumerate(targets):
            i = int(np.searchsorted(arclen, s, side="right") - 1)
            i = min(i, len(seg) - 1)
            t = (s - arclen[i]) / seg[i] if seg[i] > 0 else 0.0
            out[k] = closed[i] + t * (closed[i + 1] - closed[i])
        return out

    def export_grid_csv(self, path, box_radius: float, resolution: int = 400):
        """CSV rows (x, y, e_minus_U, inside_flag) over the sampling grid."""
        xs, ys, field = self.field_on_grid(box_radius, resolution)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write("x,y,e_minus_u,inside\n")
            for i in range(len(ys)):
                for j in range(len(xs)):
                    inside = 1 if field[i, j] < self.r else 0
                    handle.write(f"{xs[j]!r},{ys[i]!r},{field[i, j]!r},{inside}\n")


@dataclass(frozen=True)
class MeromorphyReport:
    """Radius/domain data of m-meromorphy for a model relative to a measure."""

    m: int
    radius: float  # +inf when the model has at most m poles overall
    pole_levels: tuple
    poles_inside: tuple  # (location, order) pairs strictly below the radius
    pole_polynomial: Polynomial  # monic, zeros at the inside poles


def rho_extrema(E, mu: Measure, cfg: GridConfig = GridConfig()) -> tuple[float, float]:
    """(inf, max) of exp(-U) over E, exact for matched catalog pairs.

    Exact constants: uniform circle measure over a concentric disk or circle
    it encloses, and the arcsine measure over its own interval. Everything
    else is sampled on E's boundary+interior grid; atoms of discrete measures
    lying in E contribute the conventional value 0.
    """
    if isinstance(mu, UniformCircleMeasure):
        if isinstance(E, (Disk, Circle)) and E.center == mu.center:
            hi = max(E.radius, mu.radius)
            lo = mu.radius if isinstance(E, Disk) else hi
            if isinstance(E, Disk) and E.radius <= mu.radius:
                return (mu.radius, mu.radius)
            return (lo, hi)
    if isinstance(mu, ArcsineIntervalMeasure) and isinstance(E, Interval):
        if E.a == mu.a and E.b == mu.b:
            c = (mu.b - mu.a) / 4.0
            return (c, c)
    pts = grid_points(E, cfg)
    if isinstance(mu, DiscreteMeasure):
        # atoms carry exp(-U) = 0 by convention; include the ones inside E
        from .regions import point_in_compact

        atoms_in = mu.points[point_in_compact(E, mu.points)]
        pts = np.concatenate([pts, atoms_in])
    vals = np.asarray(e_minus_potential(mu, pts))
    return (float(np.min(vals)), float(np.max(vals)))


def radius_of_meromorphy(
    f: TargetFunction, mu: Measure, m: int, E=None
) -> MeromorphyReport:
    """Largest sublevel region in which f keeps at most m poles.

    Pole levels are exp(-U) at each pole, repeated by order; the radius is
    the (m+1)-th smallest level, or +inf when the total pole order is <= m.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    poles = f.poles()
    flat = poles.flatten()
    if flat.size:
        if isinstance(mu, DiscreteMeasure) and bool(np.any(mu.is_atom(flat))):
            raise PadeLabError("potential undefined at pole: pole sits on an atom of mu")
        levels = np.asarray(e_minus_potential(mu, flat), dtype=float)
    else:
        levels = np.asarray([], dtype=float)
    order = np.argsort(levels, kind="stable")
    sorted_levels = levels[order]
    if len(sorted_levels) <= m:
        radius = math.inf
    else:
        radius = float(sorted_levels[m])
    inside = []
    for p, k in poles:
        lvl = float(e_minus_potential(mu, np.asarray([p]))[0])
        if lvl < radius:
            inside.append((p, k))
    q_poly = poly_from_roots(
        [p for p, k in inside for _ in range(k)], leading=1.0
    ) if inside else Polynomial([1.0])
    return MeromorphyReport(
        m=m,
        radius=radius,
        pole_levels=tuple(float(v) for v in sorted_levels),
        poles_inside=tuple(inside),
        pole_polynomial=q_poly,
    )


def meromorphy_region(report: MeromorphyReport, mu: Measure) -> LevelRegion | None:
    """The level region at the meromorphy radius; None when the radius is infinite."""
    if math.isinf(report.radius):
        return None
    return LevelRegion(mu, report.radius)


def potential_discrepancy(mu1: Measure, mu2: Measure, test_points, E=None) -> float:
    """max |U1 - U2| over test points; points on atoms are skipped with a warning."""
    pts = np.asarray(test_points, dtype=complex).ravel()
    if E is not None:
        from .regions import point_in_compact

        if bool(np.any(point_in_compact(E, pts))):
            raise ValueError("test points must lie outside E")
    usable = np.ones(pts.shape, dtype=bool)
    for mu in (mu1, mu2):
        if isinstance(mu, DiscreteMeasure):
            usable &= ~mu.is_atom(pts)
    skipped = int(np.count_nonzero(~usable))
    if skipped:
        LOGGER.warning("potential_discrepancy skipped %d test point(s) on atoms", skipped)
    pts = pts[usable]
    if pts.size == 0:
        raise ValueError("no usable test points (all sit on atoms)")
    u1 = np.asarray(mu1.potential(pts), dtype=float)
    u2 = np.asarray(mu2.potential(pts), dtype=float)
    return float(np.max(np.abs(u1 - u2)))
