"""Command-line interface: configuration-driven experiment runner.

Exit codes: 0 success, 2 configuration/schema problem, 3 numerical stage
failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ExperimentConfig, load_config, load_preset, preset_names
from .errors import ConfigError, PadeLabError, StageError
from .pade import build_pade
from .potential import meromorphy_region, radius_of_meromorphy
from .runner import RunManifest, export_report, run_experiment

EXIT_CONFIG = 2
EXIT_STAGE = 3


def _add_common(parser):
    parser.add_argument("--config", help="path to an experiment config JSON")
    parser.add_argument("--preset", help="name of a shipped preset")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--n-min", type=int, default=None)
    parser.add_argument("--n-max", type=int, default=None)
    parser.add_argument("--eps", type=float, default=None)
    parser.add_argument("--delta", type=float, default=None)


def _resolve_config(args, stages=None) -> ExperimentConfig:
    if not args.config and not args.preset:
        raise ConfigError("one of --config or --preset is required")
    if args.config and args.preset:
        raise ConfigError("--config and --preset are mutually exclusive")
    cfg = load_config(args.config) if args.config else load_preset(args.preset)
    overrides = {}
    if getattr(args, "n_min", None) is not None or getattr(args, "n_max", None) is not None:
        lo = args.n_min if args.n_min is not None else cfg.n_range[0]
        hi = args.n_max if args.n_max is not None else cfg.n_range[1]
        overrides["n_range"] = [lo, hi]
    if getattr(args, "eps", None) is not None:
        overrides["eps"] = args.eps
    if getattr(args, "delta", None) is not None:
        overrides["delta"] = args.delta
    if stages is not None:
        overrides["stages"] = list(stages)
    if overrides:
        from .config import parse_config

        raw = dict(cfg.resolved)
        raw.update(overrides)
        cfg = parse_config(raw, name=cfg.name)
    return cfg


def _cmd_compute(args) -> int:
    cfg = _resolve_config(args, stages=[])
    n = args.n if args.n is not None else cfg.n_range[0]
    m = args.m if args.m is not None else cfg.m
    report = radius_of_meromorphy(cfg.function, cfg.measure, m, cfg.domain)
    region = meromorphy_region(report, cfg.measure)
    approx = build_pade(
        cfg.function, cfg.table, n, m, region=region, precision=cfg.precision
    )
    payload = approx.to_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            json.dump(payload, handle, sort_keys=True)
            handle.write("\n")
    else:
        json.dump(payload, sys.stdout, sort_keys=True)
        sys.stdout.write("\n")
    if args.level_grid:
        if region is None:
            print("level-grid skipped: radius of meromorphy is infinite", file=sys.stderr)
        else:
            box = cfg.grid.box_factor * cfg.outermost_radius()
            region.export_grid_csv(args.level_grid, box, cfg.grid.resolution)
    return 0


def _run_stages(args, stages) -> int:
    cfg = _resolve_config(args, stages=stages)
    manifest = run_experiment(cfg, args.out)
    print(f"wrote {sum(len(v) for v in manifest.files.values())} file(s) to {args.out}")
    for warning in manifest.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_run(args) -> int:
    cfg = _resolve_config(args)
    manifest = run_experiment(cfg, args.out)
    print(f"run complete: {cfg.name} ({cfg.short_hash}) -> {args.out}")
    for warning in manifest.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_export(args) -> int:
    manifest = RunManifest.load(args.manifest)
    path = export_report(manifest, args.out, fmt=args.format)
    print(path)
    return 0


def _cmd_presets(_args) -> int:
    for name in preset_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padelab",
        description="multipoint Pade approximation laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="build one approximant and print its JSON")
    _add_common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--output", help="write the approximant JSON here instead of stdout")
    p.add_argument("--level-grid", help="also export the level-region grid CSV to this path")
    p.set_defaults(func=_cmd_compute)

    for name, stages, help_text in (
        ("sweep", ["sweep", "rates"], "build the sweep and write the rate series"),
        ("exactness", ["sweep", "exactness"], "detect the exact maximally convergent subsequence"),
        ("distribution", ["distribution"], "node equidistribution test"),
        ("clusters", ["sweep", "exactness", "clusters"], "boundary zero-clustering scan"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        p.set_defaults(func=lambda a, s=tuple(stages): _run_stages(a, list(s)))

    p = sub.add_parser("run", help="run the preset/config pipeline as configured")
    _add_common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("export", help="consolidate a manifest into a summary file")
    p.add_argument("--manifest", required=True, help="path to a run manifest JSON")
    p.add_argument("--out", default="out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("presets", help="list shipped presets")
    p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except PadeLabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
