"""Experiment configuration: schema validation, canonical form, stable hash."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .errors import ConfigError
from .models import TargetFunction
from .potential import Measure, measure_from_json, radius_of_meromorphy
from .regions import GridConfig, bounding_radius, point_in_compact, region_from_json
from .tables import TriangularTable

STAGES = ("sweep", "rates", "exactness", "distribution", "clusters")

_DEFAULT_GRID = {"resolution": 400, "boundary_samples": 2048, "box_factor": 1.5}


def _require(data: dict, key: str, path: str):
    if key not in data:
        raise ConfigError(f"missing required field '{key}'", path)
    return data[key]


def _as_points(raw, path: str):
    try:
        return [complex(re, im) for re, im in raw]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"expected [re, im] pairs: {exc}", path) from None


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, fully-resolved experiment description."""

    name: str
    function: TargetFunction
    table: TriangularTable
    domain: object  # E
    measure: Measure
    m: int
    n_range: tuple
    probe: object  # K
    eps: float
    delta: float
    grid: GridConfig
    exactness_boundary_samples: int
    distribution_n: tuple
    distribution_points: tuple
    cluster_radius: float
    cluster_boundary_samples: int
    cluster_tail: tuple
    stages: tuple
    precision: object
    resolved: dict = field(repr=False, default_factory=dict)

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.resolved, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @property
    def short_hash(self) -> str:
        return self.config_hash[:12]

    def n_values(self):
        lo, hi = self.n_range
        return list(range(lo, hi + 1))

    def outermost_radius(self) -> float:
        """Radius bounding every geometric actor, including the level domain."""
        radii = [bounding_radius(self.domain), bounding_radius(self.probe)]
        radii.append(self.measure.support_radius())
        if self.table.kind in {"roots_of_unity", "arc"}:
            radii.append(abs(self.table.center) + self.table.radius)
        report = radius_of_meromorphy(self.function, self.measure, self.m)
        if math.isfinite(report.radius):
            radii.append(report.radius)
        poles = self.function.pole_locations
        if poles.size:
            radii.append(float(max(abs(p) for p in poles)))
        return max(radii)


def parse_config(data: dict, name: str = "") -> ExperimentConfig:
    """Validate a raw config dict; raises ConfigError with the offending path."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    name = data.get("name", name or "experiment")

    try:
        function = TargetFunction.from_json(_require(data, "function", "function"))
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "function") from None

    try:
        table = TriangularTable.from_json(_require(data, "table", "table"))
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "table") from None

    try:
        domain = region_from_json(_require(data, "E", "E"))
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "E") from None

    try:
        measure = measure_from_json(_require(data, "measure", "measure"))
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "measure") from None

    m = _require(data, "m", "m")
    if not isinstance(m, int) or m < 0:
        raise ConfigError("m must be a nonnegative integer", "m")

    n_range = tuple(_require(data, "n_range", "n_range"))
    if (
        len(n_range) != 2
        or not all(isinstance(v, int) for v in n_range)
        or not 0 <= n_range[0] <= n_range[1]
    ):
        raise ConfigError("n_range must be [n_min, n_max] with 0 <= n_min <= n_max", "n_range")

    try:
        probe = region_from_json(_require(data, "K", "K"))
    except ConfigError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "K") from None

    eps = float(data.get("eps", 0.01))
    if eps <= 0:
        raise ConfigError("eps must be positive", "eps")
    delta = float(data.get("delta", 0.05))
    if delta < 0:
        raise ConfigError("delta must be nonnegative", "delta")

    grid_raw = dict(_DEFAULT_GRID)
    grid_raw.update(data.get("grid", {}))
    try:
        grid = GridConfig(
            resolution=int(grid_raw["resolution"]),
            boundary_samples=int(grid_raw["boundary_samples"]),
            box_factor=float(grid_raw["box_factor"]),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "grid") from None
    if grid.resolution < 8 or grid.boundary_samples < 8:
        raise ConfigError("grid resolution and boundary_samples must be >= 8", "grid")

    exact_bs = int(data.get("exactness_boundary_samples", 512))

    dist = data.get("distribution", {})
    dist_n = tuple(int(v) for v in dist.get("n_list", []))
    dist_points = tuple(_as_points(dist.get("test_points", [[2.0, 0.0], [0.0, 1.8], [-2.5, 0.0]]), "distribution.test_points"))

    cluster = data.get("cluster", {})
    cluster_radius = float(cluster.get("radius", 0.5))
    if cluster_radius <= 0:
        raise ConfigError("cluster radius must be positive", "cluster.radius")
    cluster_bs = int(cluster.get("boundary_samples", 256))
    cluster_tail = tuple(cluster.get("tail", [n_range[0] + (n_range[1] - n_range[0]) // 2, n_range[1]]))
    if len(cluster_tail) != 2 or cluster_tail[0] > cluster_tail[1]:
        raise ConfigError("cluster tail must be [lo, hi]", "cluster.tail")

    stages = tuple(data.get("stages", list(STAGES)))
    for s in stages:
        if s not in STAGES:
            raise ConfigError(f"unknown stage {s!r} (valid: {', '.join(STAGES)})", "stages")

    precision = data.get("precision", "auto")
    if not (precision in ("auto", "double") or isinstance(precision, int)):
        raise ConfigError("precision must be 'auto', 'double', or a digit count", "precision")

    # cross-reference checks
    needed_row = n_range[1] + m + 1
    if needed_row > table.max_row and {"sweep", "rates", "exactness", "clusters"} & set(stages):
        raise ConfigError(
            f"n_range needs table row {needed_row} but max_row is {table.max_row}",
            "n_range",
        )
    if dist_n and "distribution" in stages:
        if max(dist_n) > table.max_row:
            raise ConfigError(
                f"distribution n_list needs row {max(dist_n)} but max_row is {table.max_row}",
                "distribution.n_list",
            )
        for i, z in enumerate(dist_points):
            if bool(point_in_compact(domain, z)[0]):
                raise ConfigError(
                    f"test point {i} lies in E", "distribution.test_points"
                )
    for p in function.pole_locations:
        if bool(point_in_compact(domain, p)[0]):
            raise ConfigError(
                f"denominator has a zero on E (pole near {p:.6g})", "function"
            )

    cfg = ExperimentConfig(
        name=name,
        function=function,
        table=table,
        domain=domain,
        measure=measure,
        m=m,
        n_range=n_range,
        probe=probe,
        eps=eps,
        delta=delta,
        grid=grid,
        exactness_boundary_samples=exact_bs,
        distribution_n=dist_n,
        distribution_points=dist_points,
        cluster_radius=cluster_radius,
        cluster_boundary_samples=cluster_bs,
        cluster_tail=cluster_tail,
        stages=stages,
        precision=precision,
        resolved=_resolved_dict(
            name, data, grid, eps, delta, exact_bs, dist_n, dist_points,
            cluster_radius, cluster_bs, cluster_tail, stages, precision, n_range, m,
        ),
    )
    box = grid.box_factor * cfg.outermost_radius()
    if bounding_radius(probe) > box + 1e-9:
        raise ConfigError("K does not fit in the sampling bounding box", "K")
    return cfg


def _resolved_dict(
    name, data, grid, eps, delta, exact_bs, dist_n, dist_points,
    cluster_radius, cluster_bs, cluster_tail, stages, precision, n_range, m,
):
    """Fully-resolved semantic content; the hash input."""
    return {
        "name": name,
        "function": data["function"],
        "table": data["table"],
        "E": data["E"],
        "measure": data["measure"],
        "m": m,
        "n_range": list(n_range),
        "K": data["K"],
        "eps": eps,
        "delta": delta,
        "grid": {
            "resolution": grid.resolution,
            "boundary_samples": grid.boundary_samples,
            "box_factor": grid.box_factor,
        },
        "exactness_boundary_samples": exact_bs,
        "distribution": {
            "n_list": list(dist_n),
            "test_points": [[z.real, z.imag] for z in dist_points],
        },
        "cluster": {
            "radius": cluster_radius,
            "boundary_samples": cluster_bs,
            "tail": list(cluster_tail),
        },
        "stages": list(stages),
        "precision": precision,
    }


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    return parse_config(data)


def preset_names() -> list[str]:
    files = resources.files("padelab").joinpath("presets")
    return sorted(
        p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json")
    )


def load_preset(name: str) -> ExperimentConfig:
    files = resources.files("padelab").joinpath("presets")
    candidate = files.joinpath(f"{name}.json")
    if not candidate.is_file():
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        )
    data = json.loads(candidate.read_text(encoding="utf-8"))
    return parse_config(data, name=name)
