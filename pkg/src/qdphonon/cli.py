"""Command-line entry point: ``qdphonon run|sweep|check|kernel|presets``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure
(quadrature, divergence, or an invariant outside tolerance), 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import ConfigError, InvalidParameterError, QDPhononError

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _parse_values(raw: str) -> list[float]:
    return [float(x) for x in raw.split(",") if x.strip()]


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdphonon",
        description="Phonon-dressed quantum-dot / cavity dynamics and photon statistics.",
        epilog="CONFIG is a JSON scenario file or a bundled preset name (see `qdphonon presets`). "
               "Set QDPHONON_OUTPUT_DIR to redirect all outputs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="Run a scenario and write CSV + manifest per variant.")
    p.add_argument("config", metavar="CONFIG")
    p.add_argument("--variant", default=None, help="Run only this variant label.")

    p = sub.add_parser("sweep", help="Run a scenario across values of one parameter.")
    p.add_argument("config", metavar="CONFIG")
    p.add_argument("--axis", required=True, help="One of A, a, delta, g, T, N_trunc.")
    p.add_argument("--values", required=True, help="Comma-separated list; may be empty.")
    p.add_argument("--jobs", type=int, default=1, help="Parallel worker processes.")

    p = sub.add_parser("check", help="Validate a scenario and print resolved units.")
    p.add_argument("config", metavar="CONFIG")

    p = sub.add_parser("kernel", help="Write only the K/Gamma table for a scenario.")
    p.add_argument("config", metavar="CONFIG")

    sub.add_parser("presets", help="List bundled presets.")
    return parser


def _cmd_run(args) -> int:
    from . import scenario

    cfg = scenario.load_config(args.config)
    cfgs = [cfg.variant(args.variant)] if args.variant else cfg.expand()
    failed = False
    for c in cfgs:
        res = scenario.run_single(c)
        m = res.manifest
        out = scenario.output_dir(c)
        print(f"{m.name}: {m.status} ({m.wall_time_s:.1f} s) -> {out / m.outputs['csv']}")
        for w in m.warnings:
            print(f"  warning: {w}", file=sys.stderr)
        failed |= m.status != "ok"
    return EXIT_NUMERICAL if failed else EXIT_OK


def _cmd_sweep(args) -> int:
    from . import scenario

    manifests = scenario.sweep(args.config, args.axis, _parse_values(args.values), jobs=args.jobs)
    for m in manifests:
        conv = m.convergence.get("max_abs_delta_n_mean")
        extra = f", delta<n> vs previous {conv!r}" if conv is not None else ""
        print(f"{m.name}: {m.status}{extra}")
    if not manifests:
        print("no values given; wrote an empty summary")
    return EXIT_NUMERICAL if any(m.status != "ok" for m in manifests) else EXIT_OK


def _cmd_check(args) -> int:
    from . import scenario

    report = scenario.check(args.config)
    _emit(report)
    print("valid" if report["valid"] else "invalid")
    return EXIT_OK if report["valid"] else EXIT_CONFIG


def _cmd_kernel(args) -> int:
    from . import scenario

    res = scenario.kernel_only(args.config)
    m = res.manifest
    print(f"{m.name}: kernel table -> {scenario.output_dir(scenario.load_config(args.config)) / m.outputs['csv']}")
    return EXIT_OK


def _cmd_presets(args) -> int:
    from . import scenario

    for name in scenario.preset_names():
        desc = scenario.load_preset(name).get("description", "")
        print(f"{name:20s} {desc}")
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "check": _cmd_check, "kernel": _cmd_kernel,
             "presets": _cmd_presets}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QDPhononError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
