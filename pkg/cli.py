import argparse

from config import FORMATS, RunConfig, build_run_config, load_config_file

FLAG_DESTS = {
    "scenario": "scenario",
    "phase_steps": "phase-steps",
    "trials": "trials",
    "seed": "seed",
    "dims": "dims",
    "eta1": "eta1",
    "eta2": "eta2",
    "tolerance": "tolerance",
    "output": "output",
    "output_format": "format",
    "workers": "workers",
    "samples": "samples",
    "param": "param",
    "inject_indefinite": "inject_indefinite",
    "replay": "replay",
}


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--trials",
        type=int,
        default=None,
        help="Monte Carlo trials (run) or instances per dimension (fuzz)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Unsigned 64-bit run seed (generated and reported when omitted)",
    )
    parser.add_argument(
        "--tolerance",
        action="append",
        default=None,
        metavar="NAME=VALUE",
        help="Tolerance override, e.g. kernel=1e-9 (repeatable)",
    )
    parser.add_argument(
        "--output",
        default=None,
        help="Report path (stdout when omitted or '-')",
    )
    parser.add_argument(
        "--format",
        dest="output_format",
        choices=FORMATS,
        default=None,
        help="Report format",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Worker threads for partitioned work; results do not depend on it",
    )
    parser.add_argument(
        "--config",
        dest="config_path",
        default=None,
        help="Flat key = value config file; flags override its values",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Single-quantum interferometry - scenarios and theorem checks"
    )
    subparsers = parser.add_subparsers(dest="mode", required=True)

    run = subparsers.add_parser("run", help="Run a preset scenario and write its report")
    run.add_argument("--scenario", default=None, help="Scenario name")
    run.add_argument(
        "--phase-steps",
        dest="phase_steps",
        type=int,
        default=None,
        help="Fringe grid points (mach_zehnder_a) or screen positions (two_slit)",
    )
    run.add_argument("--eta1", type=float, default=None, help="Efficiency of detector 1")
    run.add_argument("--eta2", type=float, default=None, help="Efficiency of detector 2")
    run.add_argument(
        "--param",
        action="append",
        default=None,
        metavar="KEY=VALUE",
        help="Any scenario parameter (repeatable)",
    )
    _add_common_args(run)

    fuzz = subparsers.add_parser("fuzz", help="Fuzz the coincidence theorem on random instances")
    fuzz.add_argument("--dims", default=None, help="Dimension range, e.g. 2..8")
    fuzz.add_argument(
        "--samples",
        type=int,
        default=None,
        help="Random coefficient pairs per instance",
    )
    fuzz.add_argument(
        "--replay",
        default=None,
        metavar="BUNDLE",
        help="Re-check one serialized instance (fuzz report, first_failure or .replay.json)",
    )
    fuzz.add_argument("--inject-indefinite", action="store_true", help=argparse.SUPPRESS)
    _add_common_args(fuzz)

    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def to_run_config(args: argparse.Namespace) -> RunConfig:
    """Layer the parsed flags over environment and config-file values."""
    file_values = load_config_file(args.config_path) if args.config_path else None
    flags = {
        key: getattr(args, dest)
        for dest, key in FLAG_DESTS.items()
        if hasattr(args, dest)
    }
    if not flags.get("inject_indefinite"):
        flags.pop("inject_indefinite", None)
    return build_run_config(args.mode, flags, file_values)


def parse_run_args(argv: list[str]) -> RunConfig:
    return to_run_config(parse_args(["run", *argv]))


def parse_fuzz_args(argv: list[str]) -> RunConfig:
    return to_run_config(parse_args(["fuzz", *argv]))
