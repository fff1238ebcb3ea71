"""Pipeline runner: executes configured stages and writes CSV/JSON outputs.

The outputs are a bit-exact contract: UTF-8, '\\n' line endings, '.' decimal
separator, header row, floats rendered by repr (shortest round-trip form).
Identical configs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .errors import PadeLabError, StageError
from .lab import (
    build_sweep,
    exactness_subsequence,
    interpolation_distribution_test,
    rate_sequence,
    zero_cluster_scan,
)
from .potential import LevelRegion, meromorphy_region, radius_of_meromorphy
from .regions import GridConfig


def _fmt(x) -> str:
    """Canonical scalar rendering for CSV cells."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    if isinstance(x, (np.floating,)):
        return repr(float(x))
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path):
    with open(path, encoding="utf-8") as handle:
        lines = [ln.rstrip("\n") for ln in handle if ln.strip()]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    return header, rows


@dataclass
class RunManifest:
    """What a run produced: config identity, stage files, warnings."""

    config_hash: str
    name: str
    version: str = __version__
    files: dict = field(default_factory=dict)  # stage -> [paths]
    warnings: list = field(default_factory=list)

    def add(self, stage: str, path):
        self.files.setdefault(stage, []).append(str(path))

    def to_json(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "name": self.name,
            "version": self.version,
            "files": self.files,
            "warnings": self.warnings,
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="") as handle:
            json.dump(self.to_json(), handle, indent=2, sort_keys=True)
            handle.write("\n")

    @classmethod
    def load(cls, path) -> "RunManifest":
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        return cls(
            config_hash=data["config_hash"],
            name=data["name"],
            version=data.get("version", "unknown"),
            files=data.get("files", {}),
            warnings=data.get("warnings", []),
        )


def _stage_path(out_dir, cfg: ExperimentConfig, stage: str, ext: str) -> str:
    return os.path.join(out_dir, f"{cfg.name}_{cfg.short_hash}_{stage}.{ext}")


def run_experiment(cfg: ExperimentConfig, out_dir) -> RunManifest:
    """Execute the configured stages in pipeline order; returns the manifest.

    Build results are shared across stages. Per-n build failures are
    warnings; a stage that cannot produce output raises StageError.
    """
    os.makedirs(out_dir, exist_ok=True)
    manifest = RunManifest(config_hash=cfg.config_hash, name=cfg.name)
    stages = set(cfg.stages)

    report = radius_of_meromorphy(cfg.function, cfg.measure, cfg.m, cfg.domain)
    region = meromorphy_region(report, cfg.measure)
    box_radius = cfg.grid.box_factor * cfg.outermost_radius()
    if region is not None:
        if not region.connected_on_grid(box_radius, cfg.grid.resolution):
            manifest.warnings.append(
                "level domain D is not connected on the sampling grid; "
                "equidistribution conclusions may not apply"
            )

    approximants = {}
    failures = {}
    needs_builds = stages & {"sweep", "rates", "exactness", "clusters"}
    if needs_builds:
        try:
            approximants, failures = build_sweep(
                cfg.function,
                cfg.table,
                cfg.m,
                cfg.n_values(),
                region=region,
                precision=cfg.precision,
            )
        except (PadeLabError, ValueError) as exc:
            raise StageError("sweep", str(exc)) from exc
        for n, msg in sorted(failures.items()):
            manifest.warnings.append(f"build n={n} failed: {msg}")

    if "sweep" in stages:
        path = _stage_path(out_dir, cfg, "approximants", "json")
        payload = [approximants[n].to_json() for n in sorted(approximants)]
        with open(path, "w", encoding="utf-8", newline="") as handle:
            json.dump(payload, handle, sort_keys=True)
            handle.write("\n")
        manifest.add("sweep", path)

    rates = None
    if "rates" in stages:
        try:
            rates = rate_sequence(
                cfg.function,
                cfg.table,
                cfg.m,
                cfg.probe,
                cfg.eps,
                cfg.n_values(),
                measure=cfg.measure,
                E=cfg.domain,
                cfg=cfg.grid,
                approximants=approximants or None,
                precision=cfg.precision,
            )
        except (PadeLabError, ValueError) as exc:
            raise StageError("rates", str(exc)) from exc
        path = _stage_path(out_dir, cfg, "rates", "csv")
        rows = [
            (n, e, r, rates.target)
            for n, e, r in zip(rates.n_values, rates.errors, rates.root_rates)
            if not math.isnan(e)
        ]
        write_csv(path, ["n", "error", "root_rate", "target"], rows)
        manifest.add("rates", path)

    exactness = None
    if "exactness" in stages:
        try:
            exactness = exactness_subsequence(
                cfg.function,
                cfg.table,
                cfg.m,
                cfg.probe,
                cfg.delta,
                cfg.n_values(),
                measure=cfg.measure,
                E=cfg.domain,
                cfg=GridConfig(
                    resolution=cfg.grid.resolution,
                    boundary_samples=cfg.exactness_boundary_samples,
                    box_factor=cfg.grid.box_factor,
                ),
                approximants=approximants or None,
                precision=cfg.precision,
            )
        except (PadeLabError, ValueError) as exc:
            raise StageError("exactness", str(exc)) from exc
        path = _stage_path(out_dir, cfg, "exactness", "csv")
        lam = set(exactness.subsequence)
        rows = [
            (n, raw, h, exactness.target, 1 if n in lam else 0)
            for n, raw, h in zip(exactness.n_values, exactness.h_raw, exactness.h_roots)
        ]
        write_csv(path, ["n", "h_raw", "h_root", "target", "in_lambda"], rows)
        manifest.add("exactness", path)

    if "distribution" in stages:
        if not cfg.distribution_n:
            raise StageError("distribution", "config lists no distribution n values")
        try:
            results = interpolation_distribution_test(
                cfg.table,
                cfg.measure,
                cfg.domain,
                cfg.distribution_n,
                np.asarray(cfg.distribution_points),
            )
        except (PadeLabError, ValueError) as exc:
            raise StageError("distribution", str(exc)) from exc
        path = _stage_path(out_dir, cfg, "distribution", "csv")
        write_csv(path, ["n", "discrepancy"], results)
        manifest.add("distribution", path)

    if "clusters" in stages:
        if region is None:
            raise StageError(
                "clusters", "radius of m-meromorphy is infinite: no boundary to scan"
            )
        lam = exactness.subsequence if exactness is not None else ()
        if exactness is None:
            manifest.warnings.append(
                "cluster scan ran without an exactness stage: no-lambda scan over all built n"
            )
        try:
            clusters = zero_cluster_scan(
                approximants,
                lam,
                region,
                cfg.cluster_radius,
                boundary_samples=cfg.cluster_boundary_samples,
                tail_range=cfg.cluster_tail,
                box_radius=box_radius,
                resolution=cfg.grid.resolution,
            )
        except (PadeLabError, ValueError) as exc:
            raise StageError("clusters", str(exc)) from exc
        if not clusters.used_lambda:
            manifest.warnings.append("cluster scan had no subsequence: scanned all built n")
        path = _stage_path(out_dir, cfg, "clusters", "csv")
        rows = [
            (z0.real, z0.imag, n, clusters.masses[i][j])
            for i, z0 in enumerate(clusters.boundary_points)
            for j, n in enumerate(clusters.n_values)
        ]
        write_csv(path, ["z0_re", "z0_im", "n", "mass"], rows)
        manifest.add("clusters", path)

    manifest_path = os.path.join(out_dir, f"{cfg.name}_{cfg.short_hash}_manifest.json")
    manifest.save(manifest_path)
    missing = [
        p for paths in manifest.files.values() for p in paths if not os.path.exists(p)
    ]
    if missing:
        raise StageError("manifest", f"missing outputs: {missing}")
    return manifest


def _summarize_rates(path) -> dict:
    header, rows = read_csv(path)
    idx = {h: i for i, h in enumerate(header)}
    ns = [int(r[idx["n"]]) for r in rows]
    rates = [float(r[idx["root_rate"]]) for r in rows]
    errors = [float(r[idx["error"]]) for r in rows]
    target = float(rows[0][idx["target"]]) if rows else float("nan")
    tail = ns[len(ns) // 2 :]
    tail_rates = [r for n, r in zip(ns, rates) if n in set(tail) and r > 0]
    geo = float(np.exp(np.mean(np.log(tail_rates)))) if tail_rates else float("nan")
    return {
        "n_min": min(ns) if ns else None,
        "n_max": max(ns) if ns else None,
        "target": target,
        "tail_window": [min(tail), max(tail)] if tail else None,
        "tail_geomean": geo,
        "min_error": min(errors) if errors else None,
        "max_error": max(errors) if errors else None,
    }


def _summarize_exactness(path) -> dict:
    header, rows = read_csv(path)
    idx = {h: i for i, h in enumerate(header)}
    lam = [int(r[idx["n"]]) for r in rows if r[idx["in_lambda"]] == "1"]
    target = float(rows[0][idx["target"]]) if rows else float("nan")
    density = max((b / a for a, b in zip(lam, lam[1:])), default=None)
    return {
        "target": target,
        "lambda": lam,
        "lambda_size": len(lam),
        "density_ratio": density,
    }


def _summarize_distribution(path) -> dict:
    header, rows = read_csv(path)
    idx = {h: i for i, h in enumerate(header)}
    return {
        "per_n": {r[idx["n"]]: float(r[idx["discrepancy"]]) for r in rows},
    }


def _summarize_clusters(path) -> dict:
    header, rows = read_csv(path)
    idx = {h: i for i, h in enumerate(header)}
    masses = [float(r[idx["mass"]]) for r in rows]
    ns = sorted({int(r[idx["n"]]) for r in rows})
    return {
        "summary": max(masses) if masses else 0.0,
        "n_values": ns,
        "boundary_samples": len({(r[idx["z0_re"]], r[idx["z0_im"]]) for r in rows}),
    }


def _summarize_sweep(path) -> dict:
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    residuals = [item["residual"] for item in payload]
    return {
        "built": len(payload),
        "degenerate": sum(1 for item in payload if item["degenerate"]),
        "max_residual": max(residuals) if residuals else None,
    }


_SUMMARIZERS = {
    "sweep": _summarize_sweep,
    "rates": _summarize_rates,
    "exactness": _summarize_exactness,
    "distribution": _summarize_distribution,
    "clusters": _summarize_clusters,
}


def export_report(manifest: RunManifest, out_dir, fmt: str = "json") -> str:
    """Consolidated summary of the manifest's stage outputs.

    JSON nests one section per completed stage; CSV flattens to key,value
    rows. Numeric fields are rendered by repr and survive a json -> csv
    round trip beyond 15 significant digits.
    """
    if fmt not in {"json", "csv"}:
        raise ValueError(f"unknown export format {fmt!r}")
    missing = [
        p for paths in manifest.files.values() for p in paths if not os.path.exists(p)
    ]
    if missing:
        raise PadeLabError(f"missing stage outputs: {', '.join(missing)}")
    sections = {}
    for stage, paths in sorted(manifest.files.items()):
        summarizer = _SUMMARIZERS.get(stage)
        if summarizer and paths:
            sections[stage] = summarizer(paths[0])
    summary = {
        "name": manifest.name,
        "config_hash": manifest.config_hash,
        "version": manifest.version,
        "warnings": manifest.warnings,
        "sections": sections,
    }
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"{manifest.name}_{manifest.config_hash[:12]}_summary")
    if fmt == "json":
        path = base + ".json"
        with open(path, "w", encoding="utf-8", newline="") as handle:
            json.dump(summary, handle, indent=2, sort_keys=True)
            handle.write("\n")
        return path
    path = base + ".csv"
    rows = []

    def flatten(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                flatten(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, (list, tuple)):
            rows.append((prefix, ";".join(_fmt(v) for v in value)))
        else:
            rows.append((prefix, _fmt(value)))

    flatten("", summary)
    write_csv(path, ["key", "value"], rows)
    return path
