"""Command-line interface.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    ConfigError,
    CosfilterError,
    FidelityBelowFloor,
    SeriesNonConvergence,
    ZeroNorm,
)
from .filtering import EvolutionTrace
from .harness import (
    ExperimentConfig,
    RunSummary,
    compare_report,
    reference_resource_table,
    run_experiment,
    write_outputs,
)
from .pauli import spectral_info
from .plotting import PLOT_KINDS, write_plot
from .problems import parse_dimacs, sat_to_hamiltonian, tfim_hamiltonian
from .variational import ANSATZ_PRESETS
from . import fixtures

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (ZeroNorm, SeriesNonConvergence, FidelityBelowFloor)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosfilter",
        description="Cosine-filter ground-state experiments on a dense statevector.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None, help="output directory override")
    p_run.add_argument("--seed-override", type=int, default=None, help="run only this seed")

    p_cmp = sub.add_parser("compare", help="side-by-side report from summary.json files")
    p_cmp.add_argument("summaries", nargs="+", type=Path)
    p_cmp.add_argument("--out", type=Path, default=None, help="directory for compare.csv")

    p_plot = sub.add_parser("plot", help="render trace CSVs to an SVG")
    p_plot.add_argument("traces", nargs="+", type=Path)
    p_plot.add_argument("--kind", choices=PLOT_KINDS, default="energy-vs-step")
    p_plot.add_argument("--out", type=Path, default=None, help="output directory")

    p_fix = sub.add_parser("fixtures", help="built-in problems, presets, reference resources")
    p_fix.add_argument("what", choices=("list", "resources"))

    p_oracle = sub.add_parser("oracle", help="print exact spectral data for a problem")
    p_oracle.add_argument(
        "problem",
        help="fixture key (tfim4, tfim8, sat5, sat8), tfim:<n>[:open], or sat:<dimacs path>",
    )
    return parser


def _oracle_hamiltonian(spec: str):
    if spec in fixtures.PROBLEMS:
        return spec, fixtures.PROBLEMS[spec]()
    if spec.startswith("tfim:"):
        parts = spec.split(":")
        n = int(parts[1])
        periodic = not (len(parts) > 2 and parts[2] == "open")
        return spec, tfim_hamiltonian(
            n, fixtures.TFIM_COUPLING, fixtures.TFIM_COUPLING, periodic
        )
    if spec.startswith("sat:"):
        path = Path(spec[4:])
        return spec, sat_to_hamiltonian(parse_dimacs(path.read_text()))
    raise ConfigError(f"unknown problem spec {spec!r}")


def _cmd_run(args) -> int:
    try:
        payload = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = ExperimentConfig.from_json(payload)
    if args.seed_override is not None:
        cfg.seeds = (args.seed_override,)
    out_dir = args.out or cfg.output_dir
    result = run_experiment(cfg)
    if out_dir is not None:
        for path in write_outputs(result, out_dir):
            print(path)
    for seed in cfg.seeds:
        s = result.summaries[seed]
        steps = "not reached" if s.steps_to_accuracy is None else s.steps_to_accuracy
        print(
            f"seed {seed}: E_f={s.final_energy:.8g} E_g={s.ground_energy:.8g} "
            f"rel_err={s.relative_error:.4g} steps_to_1%={steps} norm={s.final_norm:.4g}"
        )
    return EXIT_OK


def _cmd_compare(args) -> int:
    summaries = []
    for path in args.summaries:
        payload = json.loads(Path(path).read_text())
        for entry in payload.get("per_seed", []):
            summaries.append(RunSummary.from_json(entry))
    if not summaries:
        print("no summaries found", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text, csv_text = compare_report(summaries)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    print(text, end="")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / "compare.csv"
        path.write_text(csv_text)
        print(path)
    return EXIT_OK


def _cmd_plot(args) -> int:
    traces = []
    for path in args.traces:
        with open(path) as fh:
            traces.append((Path(path).stem, EvolutionTrace.read_csv(fh)))
    out_dir = args.out or Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"plot_{args.kind.replace('-', '_')}.svg"
    write_plot(out_path, traces, args.kind)
    print(out_path)
    return EXIT_OK


def _cmd_fixtures(args) -> int:
    if args.what == "list":
        print("problems:")
        for key in fixtures.PROBLEMS:
            print(f"  {key}")
        print("ansatz presets:")
        for key in ANSATZ_PRESETS:
            print(f"  {key}")
    else:
        print(reference_resource_table(), end="")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    label, ham = _oracle_hamiltonian(args.problem)
    info = spectral_info(ham)
    print(f"problem: {label}")
    print(f"n_qubits: {ham.n_qubits}")
    print(f"terms: {len(ham.terms)}")
    print(f"identity_offset: {ham.identity_offset!r}")
    print(f"e_min: {info.e_min!r}")
    print(f"e_max: {info.e_max!r}")
    print(f"ground_energy: {info.ground_energy!r}")
    print(f"gap: {info.gap!r}")
    print(f"ground_degeneracy: {info.ground_degeneracy}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "compare": _cmd_compare,
        "plot": _cmd_plot,
        "fixtures": _cmd_fixtures,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CosfilterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
