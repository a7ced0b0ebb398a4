"""Command line interface.

Verbs:
    run <config>        reproduce an experiment, write the report bundle
    presets             list the embedded spin systems
    decompose <n>       verify the n-control CNOT network (n = 2 or 3)
    scan <config>       pulse-selectivity curve for the configured gate

Exit codes: 0 success, 2 configuration error, 3 physics-check failure.
"""

from __future__ import annotations

import argparse
import sys

from . import compiler, gates
from .experiment import ConfigError, load_config, run, scan
from .presets import describe_presets

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run(cfg, out_dir=args.out)
    print(result.report_text, end="")
    print(f"wrote {len(result.files)} files to {result.out_dir}")
    return EXIT_OK if result.passed else EXIT_PHYSICS


def _cmd_presets(_args) -> int:
    print(describe_presets())
    return EXIT_OK


def _cmd_decompose(args) -> int:
    if args.n_controls == 2:
        seq = compiler.decompose_toffoli()
    elif args.n_controls == 3:
        seq = compiler.decompose_lambda3()
    else:
        print("config error: decompositions exist for 2 or 3 controls",
              file=sys.stderr)
        return EXIT_CONFIG
    exact = gates.lambda_not(args.n_controls)
    fidelity = gates.gate_fidelity(compiler.sequence_unitary(seq), exact)
    print(f"{seq.two_qubit_count} two-qubit gates, fidelity {fidelity:.6f}")
    print(compiler.sequence_to_text(seq), end="")
    return EXIT_OK if fidelity >= 1.0 - 1e-9 else EXIT_PHYSICS


def _cmd_scan(args) -> int:
    try:
        cfg = load_config(args.config)
        curve = scan(cfg, out_dir=args.out)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for amp, fid in curve:
        print(f"amplitude_hz={amp:.6g} fidelity={fid:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nmrgates",
        description="Simulate multi-controlled NOT gates on liquid-state "
                    "NMR spin registers and their spectral readout.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="YAML experiment configuration")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.set_defaults(func=_cmd_run)

    p_presets = sub.add_parser("presets", help="list embedded spin systems")
    p_presets.set_defaults(func=_cmd_presets)

    p_dec = sub.add_parser("decompose", help="verify a CNOT-network decomposition")
    p_dec.add_argument("n_controls", type=int, help="number of controls (2 or 3)")
    p_dec.set_defaults(func=_cmd_decompose)

    p_scan = sub.add_parser("scan", help="pulse-selectivity curve")
    p_scan.add_argument("config", help="YAML experiment configuration")
    p_scan.add_argument("--out", default=None, help="output directory override")
    p_scan.set_defaults(func=_cmd_scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
