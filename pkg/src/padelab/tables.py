"""Triangular interpolation tables and counting measures of point sets.

Row n of a table carries exactly n nodes. Catalog generators keep nodes on
the declared support by construction: roots-of-unity rows on a circle,
confluent rows at a single point, arc rows on a circular arc (the negative
control for equidistribution tests). Explicit tables load arbitrary rows.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .polynomial import Polynomial, poly_from_roots
from .regions import Annulus, Disk, region_contains


@dataclass(frozen=True)
class TriangularTable:
    """Point scheme with n nodes in row n, 1 <= n <= max_row."""

    kind: str
    max_row: int = 128
    center: complex = 0.0
    radius: float = 1.0
    rotation: float = 0.0
    point: complex = 0.0
    arc: tuple = (0.0, 2 * np.pi)
    rows: tuple = field(default_factory=tuple)
    support: str = "boundary"  # 'boundary' when the nodes live on the declared curve

    def __post_init__(self):
        if self.kind not in {"roots_of_unity", "confluent", "arc", "explicit"}:
            raise ValueError(f"unknown table kind {self.kind!r}")
        if self.max_row < 1:
            raise ValueError("max_row must be >= 1")
        if self.kind in {"roots_of_unity", "arc"} and self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.kind == "explicit":
            for idx, row in enumerate(self.rows, start=1):
                if len(row) != idx:
                    raise ValueError(f"explicit row {idx} must have {idx} points")

    def row(self, n: int) -> np.ndarray:
        """The n nodes of row n, deterministic for a fixed table."""
        if not 1 <= n <= self.max_row:
            raise ValueError(f"row {n} out of range [1, {self.max_row}]")
        if self.kind == "roots_of_unity":
            theta = 2 * np.pi * np.arange(n) / n + self.rotation
            return self.center + self.radius * np.exp(1j * theta)
        if self.kind == "confluent":
            return np.full(n, complex(self.point))
        if self.kind == "arc":
            a, b = self.arc
            theta = a + (b - a) * (np.arange(n) + 0.5) / n
            return self.center + self.radius * np.exp(1j * theta)
        if n > len(self.rows):
            raise ValueError(f"explicit table has no row {n}")
        return np.asarray(self.rows[n - 1], dtype=complex)

    def omega(self, n: int) -> Polynomial:
        """Monic node polynomial of row n: prod (z - node)."""
        return poly_from_roots(self.row(n), leading=1.0)

    def to_json(self) -> dict:
        if self.kind == "roots_of_unity":
            return {
                "kind": self.kind,
                "center": [self.center.real, self.center.imag],
                "radius": self.radius,
                "rotation": self.rotation,
                "max_row": self.max_row,
            }
        if self.kind == "confluent":
            return {
                "kind": self.kind,
                "point": [self.point.real, self.point.imag],
                "max_row": self.max_row,
            }
        if self.kind == "arc":
            return {
                "kind": self.kind,
                "center": [self.center.real, self.center.imag],
                "radius": self.radius,
                "arc": list(self.arc),
                "max_row": self.max_row,
            }
        return {
            "kind": "explicit",
            "rows": [[[z.real, z.imag] for z in row] for row in self.rows],
            "max_row": self.max_row,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TriangularTable":
        kind = data["kind"]
        max_row = int(data.get("max_row", 128))
        if kind == "roots_of_unity":
            return cls(
                kind,
                max_row=max_row,
                center=complex(*data.get("center", [0, 0])),
                radius=float(data.get("radius", 1.0)),
                rotation=float(data.get("rotation", 0.0)),
            )
        if kind == "confluent":
            return cls(kind, max_row=max_row, point=complex(*data.get("point", [0, 0])))
        if kind == "arc":
            return cls(
                kind,
                max_row=max_row,
                center=complex(*data.get("center", [0, 0])),
                radius=float(data.get("radius", 1.0)),
                arc=tuple(float(t) for t in data.get("arc", [0.0, np.pi])),
            )
        if kind == "explicit":
            rows = tuple(
                tuple(complex(re, im) for re, im in row) for row in data["rows"]
            )
            return cls(kind, max_row=min(max_row, len(rows)), rows=rows)
        raise ValueError(f"unknown table kind {kind!r}")

    @classmethod
    def from_csv(cls, path) -> "TriangularTable":
        """Explicit table from CSV rows (row index, k, re, im)."""
        cells: dict[int, dict[int, complex]] = {}
        with open(path, newline="", encoding="utf-8") as handle:
            for record in csv.reader(handle):
                if not record or record[0].strip().lower() in {"row", "n"}:
                    continue
                n, k, re, im = int(record[0]), int(record[1]), float(record[2]), float(record[3])
                cells.setdefault(n, {})[k] = complex(re, im)
        rows = []
        for n in range(1, max(cells) + 1):
            if n not in cells or sorted(cells[n]) != list(range(1, n + 1)):
                raise ValueError(f"CSV table is missing entries for row {n}")
            rows.append(tuple(cells[n][k] for k in range(1, n + 1)))
        return cls("explicit", max_row=len(rows), rows=tuple(rows))


def roots_of_unity_table(center=0.0, radius=1.0, rotation=0.0, max_row=128) -> TriangularTable:
    return TriangularTable("roots_of_unity", max_row=max_row, center=complex(center), radius=radius, rotation=rotation)


def confluent_table(point=0.0, max_row=128) -> TriangularTable:
    return TriangularTable("confluent", max_row=max_row, point=complex(point), support="interior")


def arc_table(center=0.0, radius=1.0, arc=(0.0, np.pi), max_row=128) -> TriangularTable:
    return TriangularTable("arc", max_row=max_row, center=complex(center), radius=radius, arc=tuple(arc))


@dataclass(frozen=True)
class DiscretePointMeasure:
    """Unit counting measure: equal weight 1/count on each point."""

    points: np.ndarray

    def __init__(self, points):
        arr = np.asarray(points, dtype=complex).ravel()
        if arr.size == 0:
            raise ValueError("counting measure needs at least one point")
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @property
    def count(self) -> int:
        return int(self.points.size)

    def mass(self, region: Disk | Annulus) -> float:
        """Fraction of points inside the closed region."""
        inside = region_contains(region, self.points)
        return float(np.count_nonzero(inside)) / self.count


def counting_measure_mass(measure: DiscretePointMeasure, region) -> float:
    return measure.mass(region)
