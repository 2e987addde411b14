"""Command-line scenario runner.

    photonmol <command> [preset] [--config FILE | --preset NAME] [--workers N] [--out DIR]

Writes ``results.csv`` (one row per grid point, canonical order), any
per-point tables, and ``manifest.json``.  ``PHOTONMOL_OUT`` overrides the
output directory of the config; ``--out`` overrides both.

Exit codes: 0 ok, 2 configuration error, 3 solver failure (details in
``error.json``).
"""

import argparse
import json
import logging
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ConfigError, load_preset, override, parse_config, preset_names
from .model import assemble_blocks
from .polariton import polariton_params
from .runners import RUNNERS
from .sweep import sweep
from .transfer import optical_depth

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3
OUT_ENV = "PHOTONMOL_OUT"

log = logging.getLogger("photonmol")


def build_parser():
    p = argparse.ArgumentParser(prog="photonmol", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(RUNNERS))
    p.add_argument("preset_name", nargs="?", metavar="preset", help="bundled preset name")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="YAML scenario file")
    src.add_argument("--preset", help="bundled preset (%s)" % ", ".join(preset_names()))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path)
    p.add_argument("--c-lambda", type=float, dest="c_lambda", help="design-budget override")
    p.add_argument("--beta", type=float, help="design-budget override")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args):
    if args.preset_name and (args.config or args.preset):
        raise ConfigError(["give the preset either positionally or with --preset/--config"])
    if args.config:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError([f"{args.config}: {exc.strerror}"]) from None
        cfg = parse_config(text)
    elif args.preset or args.preset_name:
        cfg = load_preset(args.preset or args.preset_name)
    elif args.command == "design-budget":
        cfg = load_preset("design_budget")
    else:
        raise ConfigError(["no scenario given: use --config FILE or --preset NAME"])
    design = {k: v for k, v in (("c_lambda", args.c_lambda), ("beta", args.beta)) if v is not None}
    if design:
        cfg = override(cfg, design=design)
    return cfg


def output_dir(args, cfg):
    if args.out is not None:
        return args.out
    return Path(os.environ.get(OUT_ENV) or cfg.output.dir)


def derived_parameters(cfg):
    """Quantities computed from the config, recorded for provenance."""
    out = {}
    lv = cfg.levels.build()
    pot = cfg.potential.build()
    out["levels"] = {"probe_detuning": lv.probe_detuning,
                     "renormalized_detuning": lv.renormalized_detuning}
    out["optical_depth"] = optical_depth(cfg.chain.count, lv.gamma_1d, lv.gamma_prime)
    out["loss_rate_s"] = pot.loss_rate_s
    if lv.rabi_control != 0 and lv.gamma_1d > 0:
        pp = polariton_params(lv)
        out["polariton"] = {"group_velocity": pp.group_velocity,
                            "mass": [pp.mass.real, pp.mass.imag]}
    return out


def _write_table(path, header, data):
    np.savetxt(path, np.asarray(data, float), delimiter=",", header=",".join(header),
               comments="", fmt="%.17g")


def run(command, cfg, workers=1, out=None):
    """Run a command and write its artifacts; returns the exit code."""
    out = Path(out or cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    result = sweep(command, cfg, workers)
    wall = time.perf_counter() - start

    files = ["results.csv"]
    (out / "results.csv").write_text(result.to_csv())
    single = len(result.points) == 1
    for k, res in enumerate(result.results):
        if res is None:
            continue
        for name, (header, data) in res.tables.items():
            fname = f"{name}.csv" if single else f"{name}_{k:05d}.csv"
            _write_table(out / fname, header, data)
            files.append(fname)

    manifest = {
        "command": command,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "config": cfg.to_dict(),
        "derived": derived_parameters(cfg),
        "points": len(result.points),
        "failed": len(result.failed),
        "workers": workers,
        "wall_time_s": wall,
        "files": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    if result.failed:
        report = {"command": command,
                  "failures": [{"point": p, "error": e} for p, e in result.failed]}
        (out / "error.json").write_text(json.dumps(report, indent=2))
        for p, e in result.failed:
            log.error("point %s failed: %s", p, e)
        return EXIT_SOLVER
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        if args.workers < 1:
            raise ConfigError([f"--workers must be >= 1, got {args.workers}"])
        # fail early on parameters that only the physics layer can check
        for _, point in cfg.points()[:1]:
            assemble_blocks(point.chain_obj(), point.levels.build(), point.potential.build())
    except (ConfigError, ValueError, OSError) as exc:
        errors = exc.errors if isinstance(exc, ConfigError) else [str(exc)]
        json.dump({"error": "config", "messages": errors}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    code = run(args.command, cfg, args.workers, output_dir(args, cfg))
    if code == EXIT_SOLVER:
        json.dump({"error": "solver", "report": str(output_dir(args, cfg) / "error.json")},
                  sys.stderr)
        sys.stderr.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
