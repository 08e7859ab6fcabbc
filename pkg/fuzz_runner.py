"""
Theorem fuzzer: random positive effects with a planted two-state kernel.

Each instance (dim, index) draws from its own substream
(seed, FUZZ_STREAM, dim, index), so any failure replays from its bundle alone
(`fuzz --replay BUNDLE` re-checks a serialized instance).
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from config import RunConfig
from detection.sampling import FUZZ_STREAM, philox
from detection.theorem import (
    indefinite_counterexample,
    scan_superpositions,
    verify_reduction_theorem,
)
from quantum.errors import ConfigError, InterferometryError, NotPositiveError
from quantum.hilbert import Operator, StateVector, Tolerances, kernel_member
from quantum.random_ops import constructed_kernel_effect, random_coefficients, random_state
from runner import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, status
from tools.report import Check, build_report, render_csv, render_json, write_output
from tools.serialize import matrix_from_json, matrix_to_json, state_from_json, state_to_json

logger = logging.getLogger(__name__)

AGGREGATE_COLUMNS = (
    "dim",
    "instances",
    "max_normalized_expectation",
    "max_normalized_kernel_residual",
    "failures",
)

# dimension 0 never occurs among real instances
NEGATIVE_CONTROL_STREAM = (FUZZ_STREAM, 0, 0)


@dataclass(frozen=True)
class InstanceResult:
    dim: int
    index: int
    normalized_expectation: float
    normalized_kernel_residual: float
    passed: bool
    reason: str = ""
    replay: dict[str, Any] | None = None


def replay_bundle(
    seed: int,
    dim: int,
    index: int,
    op: Operator,
    psi1: StateVector,
    psi2: StateVector,
    substream: tuple[int, ...] | None = None,
) -> dict[str, Any]:
    return {
        "seed": seed,
        "dim": dim,
        "index": index,
        "substream": [seed, *(substream or (FUZZ_STREAM, dim, index))],
        "A": matrix_to_json(op),
        "psi1": state_to_json(psi1),
        "psi2": state_to_json(psi2),
    }


def check_instance(
    seed: int,
    dim: int,
    index: int,
    op: Operator,
    psi1: StateVector,
    psi2: StateVector,
    rng: np.random.Generator,
    samples: int,
    tol: Tolerances,
    substream: tuple[int, ...] | None = None,
) -> InstanceResult:
    report = verify_reduction_theorem(op, psi1, psi2, samples, rng, tol)
    a_norm = report.operator_norm
    kernels = [kernel_member(op, psi, tol) for psi in (psi1, psi2)]
    kernel_residual = max(k.residual for k in kernels) / a_norm if a_norm > 0 else 0.0

    reasons = []
    if not report.passed:
        reasons.append(f"bound exceeded by {report.worst_excess!r}")
    if report.max_superposition_expectation > tol.kernel * a_norm:
        reasons.append(f"superposition expectation {report.max_superposition_expectation!r}")
    if not all(kernels):
        reasons.append(f"kernel residual {kernel_residual!r}")
    return InstanceResult(
        dim,
        index,
        report.normalized_max,
        kernel_residual,
        not reasons,
        "; ".join(reasons),
        replay_bundle(seed, dim, index, op, psi1, psi2, substream) if reasons else None,
    )


def run_instance(seed: int, dim: int, index: int, samples: int, tol: Tolerances) -> InstanceResult:
    rng = philox(seed, FUZZ_STREAM, dim, index)
    psi1 = random_state(rng, dim)
    psi2 = random_state(rng, dim)
    effect = constructed_kernel_effect(rng, psi1, psi2)
    return check_instance(seed, dim, index, effect.op, psi1, psi2, rng, samples, tol)


def indefinite_instance(seed: int, samples: int, tol: Tolerances) -> InstanceResult:
    """Negative control: a hermitian but indefinite A must be rejected."""
    op, psi1, psi2 = indefinite_counterexample()
    rng = philox(seed, *NEGATIVE_CONTROL_STREAM)
    coefficients = random_coefficients(rng, samples)
    worst = float(np.max(np.abs(scan_superpositions(op, psi1, psi2, coefficients))))
    try:
        verify_reduction_theorem(op, psi1, psi2, samples, rng, tol)
        reason = "indefinite operator accepted"
    except NotPositiveError as e:
        reason = f"rejected: {e}"
    bundle = replay_bundle(seed, op.dim, -1, op, psi1, psi2, NEGATIVE_CONTROL_STREAM)
    return InstanceResult(op.dim, -1, worst, float("inf"), False, reason, bundle)


def replay_path(output: str | None) -> str | None:
    """Sidecar for the first failure when the report itself is CSV; None means stderr."""
    return None if output in (None, "-") else f"{output}.replay.json"


def write_replay(first_failure: dict[str, Any], output: str | None) -> None:
    text = render_json(first_failure)
    path = replay_path(output)
    if path is None:
        status(text.rstrip())
    else:
        write_output(text, path)
        status(f"Replay bundle written to {path}")


def aggregate(results: list[InstanceResult]) -> list[dict[str, Any]]:
    rows = []
    for dim in sorted({r.dim for r in results}):
        group = [r for r in results if r.dim == dim]
        rows.append(
            {
                "dim": dim,
                "instances": len(group),
                "max_normalized_expectation": max(r.normalized_expectation for r in group),
                "max_normalized_kernel_residual": max(
                    r.normalized_kernel_residual for r in group
                ),
                "failures": sum(not r.passed for r in group),
            }
        )
    return rows


def load_replay(path: str) -> dict[str, Any]:
    """A fuzz JSON report, its first_failure entry, or the bare bundle."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise ConfigError(f"Cannot read replay bundle {path}: {e}") from e
    if isinstance(data, dict) and "tables" in data:
        data = data["tables"].get("first_failure") or {}
    if isinstance(data, dict) and "replay" in data:
        data = data["replay"]
    if not isinstance(data, dict) or "A" not in data:
        raise ConfigError(f"{path} holds no replay bundle")
    return data


def replay_instance(bundle: dict[str, Any], samples: int, tol: Tolerances) -> InstanceResult:
    """Re-check a serialized instance, drawing coefficients from its recorded substream."""
    try:
        op = matrix_from_json(bundle["A"])
        psi1 = state_from_json(bundle["psi1"])
        psi2 = state_from_json(bundle["psi2"])
        seed, *substream = (int(k) for k in bundle["substream"])
        dim, index = int(bundle["dim"]), int(bundle["index"])
    except (KeyError, TypeError, ValueError, InterferometryError) as e:
        raise ConfigError(f"Malformed replay bundle: {e}") from e
    rng = philox(seed, *substream)
    try:
        return check_instance(
            seed, dim, index, op, psi1, psi2, rng, samples, tol, tuple(substream)
        )
    except NotPositiveError as e:
        nan = float("nan")
        return InstanceResult(dim, index, nan, nan, False, f"rejected: {e}", bundle)


def cmd_replay(config: RunConfig) -> int:
    try:
        bundle = load_replay(config.replay or "")
        result = replay_instance(bundle, config.samples, config.tolerances)
    except ConfigError as e:
        status(f"Error: {e}")
        return EXIT_USAGE
    status(f"\n=== Replaying dim {result.dim} #{result.index} from {config.replay} ===")

    rows = aggregate([result])
    checks = [Check("replay", result.passed, result.normalized_expectation)]
    tables = {"aggregate": rows, "replay": {"reason": result.reason, "bundle": bundle}}
    if config.output_format == "csv":
        text = render_csv(AGGREGATE_COLUMNS, [[row[c] for c in AGGREGATE_COLUMNS] for row in rows])
    else:
        text = render_json(build_report(config.to_dict(), config.seed, tables, checks))
    write_output(text, config.output)

    if not result.passed:
        status(f"Replayed instance fails: {result.reason}")
        return EXIT_CHECK_FAILED
    status("=== Replayed instance passes ===")
    return EXIT_OK


def cmd_fuzz_theorem(config: RunConfig) -> int:
    if config.replay:
        return cmd_replay(config)

    lo, hi = config.dims
    n_trials = config.n_trials or 0
    jobs = [(dim, index) for dim in range(lo, hi + 1) for index in range(n_trials)]
    status(f"\n=== Fuzzing dims {lo}..{hi}, {n_trials} instance(s) each (seed {config.seed}) ===")

    def run(job: tuple[int, int]) -> InstanceResult:
        dim, index = job
        try:
            return run_instance(config.seed, dim, index, config.samples, config.tolerances)
        except InterferometryError as e:
            return InstanceResult(dim, index, float("nan"), float("nan"), False, str(e))

    if config.workers > 1 and jobs:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    rows = aggregate(results)
    checks = [
        Check(f"theorem_dim_{row['dim']}", row["failures"] == 0, row["max_normalized_expectation"])
        for row in rows
    ]
    if config.inject_indefinite:
        injected = indefinite_instance(config.seed, config.samples, config.tolerances)
        results.append(injected)
        checks.append(Check("injected_indefinite", False, injected.normalized_expectation))
    failures = [r for r in results if not r.passed]

    tables: dict[str, Any] = {"aggregate": rows}
    if failures:
        first = failures[0]
        tables["first_failure"] = {"reason": first.reason, "replay": first.replay}
        status(f"{len(failures)} failing instance(s); first: dim {first.dim} #{first.index}")

    if config.output_format == "csv":
        text = render_csv(AGGREGATE_COLUMNS, [[row[c] for c in AGGREGATE_COLUMNS] for row in rows])
        if failures:
            write_replay(tables["first_failure"], config.output)
    else:
        text = render_json(build_report(config.to_dict(), config.seed, tables, checks))
    write_output(text, config.output)

    if failures:
        return EXIT_CHECK_FAILED
    status(f"=== All {len(results)} instance(s) passed ===")
    return EXIT_OK
