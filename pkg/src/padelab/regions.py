"""Compact-set descriptors and their sampling grids.

These describe the sets E (where the target is holomorphic) and K (where
errors are measured): disks, circles, real intervals, polygons, and annuli
(annuli only as counting regions). Grids carry both boundary samples and,
for two-dimensional sets, interior points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridConfig:
    """Sampling resolution: interior grid density and boundary sample count."""

    resolution: int = 400
    boundary_samples: int = 2048
    box_factor: float = 1.5


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("circle radius must be positive")


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("interval requires a < b")


@dataclass(frozen=True)
class Polygon:
    vertices: tuple

    def __init__(self, vertices):
        verts = tuple(complex(v) for v in vertices)
        if len(verts) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        object.__setattr__(self, "vertices", verts)


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_inner: float
    r_outer: float

    def __post_init__(self):
        if not 0 <= self.r_inner < self.r_outer:
            raise ValueError("annulus requires 0 <= r_inner < r_outer")


SetDescriptor = Disk | Circle | Interval | Polygon | Annulus

# Closed counting regions include boundary points within this absolute slack.
BOUNDARY_INCLUSION_TOL = 1e-12


def region_contains(region, z) -> np.ndarray:
    """Membership in a closed counting region (disk or annulus)."""
    z = np.asarray(z, dtype=complex)
    if isinstance(region, Disk):
        return np.abs(z - region.center) <= region.radius + BOUNDARY_INCLUSION_TOL
    if isinstance(region, Annulus):
        d = np.abs(z - region.center)
        return (d >= region.r_inner - BOUNDARY_INCLUSION_TOL) & (
            d <= region.r_outer + BOUNDARY_INCLUSION_TOL
        )
    raise TypeError(f"counting regions are disks or annuli, got {type(region).__name__}")


def bounding_radius(region) -> float:
    """Radius of the smallest origin-centered disk containing the set."""
    if isinstance(region, (Disk, Circle)):
        return abs(region.center) + region.radius
    if isinstance(region, Annulus):
        return abs(region.center) + region.r_outer
    if isinstance(region, Interval):
        return max(abs(region.a), abs(region.b))
    if isinstance(region, Polygon):
        return max(abs(v) for v in region.vertices)
    raise TypeError(f"unknown region {type(region).__name__}")


def _polygon_interior_mask(poly: Polygon, pts: np.ndarray) -> np.ndarray:
    """Even-odd crossing test, vectorized over pts."""
    x, y = pts.real, pts.imag
    inside = np.zeros(pts.shape, dtype=bool)
    verts = poly.vertices
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i].real, verts[i].imag
        x2, y2 = verts[(i + 1) % n].real, verts[(i + 1) % n].imag
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < x_at)
    return inside


def boundary_points(region, count: int) -> np.ndarray:
    """Evenly spaced samples of the set's boundary (or the set, for curves)."""
    if isinstance(region, (Disk, Circle)):
        theta = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return region.center + region.radius * np.exp(1j * theta)
    if isinstance(region, Annulus):
        half = count // 2
        t1 = np.linspace(0.0, 2 * np.pi, half, endpoint=False)
        t2 = np.linspace(0.0, 2 * np.pi, count - half, endpoint=False)
        return np.concatenate(
            [
                region.center + region.r_inner * np.exp(1j * t1)
                if region.r_inner > 0
                else np.asarray([region.center]),
                region.center + region.r_outer * np.exp(1j * t2),
            ]
        )
    if isinstance(region, Interval):
        return np.linspace(region.a, region.b, count).astype(complex)
    if isinstance(region, Polygon):
        verts = np.asarray(region.vertices + (region.vertices[0],))
        seg_len = np.abs(np.diff(verts))
        total = float(np.sum(seg_len))
        stops = np.concatenate([[0.0], np.cumsum(seg_len)])
        s = np.linspace(0.0, total, count, endpoint=False)
        out = np.empty(count, dtype=complex)
        for k, sk in enumerate(s):
            i = int(np.searchsorted(stops, sk, side="right") - 1)
            i = min(i, len(seg_len) - 1)
            t = (sk - stops[i]) / seg_len[i]
            out[k] = verts[i] + t * (verts[i + 1] - verts[i])
        return out
    raise TypeError(f"unknown region {type(region).__name__}")


def grid_points(region, cfg: GridConfig = GridConfig()) -> np.ndarray:
    """Evaluation grid: boundary samples plus interior points for 2-D sets."""
    boundary = boundary_points(region, cfg.boundary_samples)
    if isinstance(region, (Circle, Interval)):
        return boundary
    if isinstance(region, Disk):
        n = cfg.resolution
        xs = np.linspace(region.center.real - region.radius, region.center.real + region.radius, n)
        ys = np.linspace(region.center.imag - region.radius, region.center.imag + region.radius, n)
        zz = xs[None, :] + 1j * ys[:, None]
        interior = zz[np.abs(zz - region.center) <= region.radius]
        return np.concatenate([boundary, interior.ravel()])
    if isinstance(region, Annulus):
        n = cfg.resolution
        r_out = region.r_outer
        xs = np.linspace(region.center.real - r_out, region.center.real + r_out, n)
        ys = np.linspace(region.center.imag - r_out, region.center.imag + r_out, n)
        zz = xs[None, :] + 1j * ys[:, None]
        d = np.abs(zz - region.center)
        interior = zz[(d >= region.r_inner) & (d <= r_out)]
        return np.concatenate([boundary, interior.ravel()])
    if isinstance(region, Polygon):
        n = cfg.resolution
        xs = np.array([v.real for v in region.vertices])
        ys = np.array([v.imag for v in region.vertices])
        gx = np.linspace(xs.min(), xs.max(), n)
        gy = np.linspace(ys.min(), ys.max(), n)
        zz = gx[None, :] + 1j * gy[:, None]
        interior = zz[_polygon_interior_mask(region, zz)]
        return np.concatenate([boundary, interior.ravel()])
    raise TypeError(f"unknown region {type(region).__name__}")


def point_in_compact(region, z, tol: float = 1e-9) -> np.ndarray:
    """Membership mask in the closed compact set the descriptor denotes.

    Circles and intervals are treated as curves/segments: membership means
    lying on them within tol. Always returns an array (scalars become
    one-element masks).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(region, Disk):
        return np.abs(z - region.center) <= region.radius + tol
    if isinstance(region, Circle):
        return np.abs(np.abs(z - region.center) - region.radius) <= tol
    if isinstance(region, Annulus):
        d = np.abs(z - region.center)
        return (d >= region.r_inner - tol) & (d <= region.r_outer + tol)
    if isinstance(region, Interval):
        return (
            (np.abs(z.imag) <= tol)
            & (z.real >= region.a - tol)
            & (z.real <= region.b + tol)
        )
    if isinstance(region, Polygon):
        return _polygon_interior_mask(region, z)
    raise TypeError(f"unknown region {type(region).__name__}")


def region_to_json(region) -> dict:
    if isinstance(region, Disk):
        return {"kind": "disk", "center": [region.center.real, region.center.imag], "radius": region.radius}
    if isinstance(region, Circle):
        return {"kind": "circle", "center": [region.center.real, region.center.imag], "radius": region.radius}
    if isinstance(region, Interval):
        return {"kind": "interval", "a": region.a, "b": region.b}
    if isinstance(region, Polygon):
        return {"kind": "polygon", "vertices": [[v.real, v.imag] for v in region.vertices]}
    if isinstance(region, Annulus):
        return {
            "kind": "annulus",
            "center": [region.center.real, region.center.imag],
            "r_inner": region.r_inner,
            "r_outer": region.r_outer,
        }
    raise TypeError(f"unknown region {type(region).__name__}")


def region_from_json(data: dict):
    kind = data.get("kind")
    if kind == "disk":
        return Disk(complex(*data["center"]), float(data["radius"]))
    if kind == "circle":
        return Circle(complex(*data["center"]), float(data["radius"]))
    if kind == "interval":
        return Interval(float(data["a"]), float(data["b"]))
    if kind == "polygon":
        return Polygon([complex(*v) for v in data["vertices"]])
    if kind == "annulus":
        return Annulus(complex(*data["center"]), float(data["r_inner"]), float(data["r_outer"]))
    raise ValueError(f"unknown region kind {kind!r}")
