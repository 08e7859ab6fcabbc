"""
Preset experiments.

Detector layouts:
  a - full Mach-Zehnder (splitter, arms, recombining splitter), one detector per output port
  b - one detector inside each arm, no recombination
  c - two detectors in series in arm I, the first one transmitting
"""

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from detection.povm import (
    DetectorSpec,
    OutcomePOVM,
    anticoincidence_effect,
    build_joint_povm,
    coincidence_probability,
    outcome_probabilities,
    serial_correlation,
)
from detection.sampling import (
    MIXTURE_STREAM,
    THEOREM_STREAM,
    philox,
    sample_categorical,
    sample_events,
)
from detection.theorem import verify_reduction_theorem
from optics.elements import BeamSplitter, Blocker, Mirror, PhaseShifter
from optics.interferometer import (
    Arrangement,
    fringe_scan,
    phase_grid,
    run_arrangement,
    visibility,
)
from quantum.errors import (
    InvalidParamsError,
    UnknownScenarioError,
    ZeroSurvivalError,
)
from quantum.hilbert import (
    DEFAULT_TOLERANCES,
    DensityOperator,
    Effect,
    Operator,
    StateVector,
    Tolerances,
    basis_state,
    expectation,
    superpose,
)
from tools.report import Check
from tools.serialize import arrangement_to_dict

logger = logging.getLogger(__name__)

ARMS = ("I", "II")
THEOREM_SAMPLES = 1000
MIXTURES = 16
BINOMIAL_SIGMAS = 4.0
EXACT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: type
    default: Any
    low: float | None = None
    high: float | None = None
    choices: tuple[str, ...] = ()
    doc: str = ""

    def parse(self, raw: Any) -> Any:
        try:
            value = self.kind(raw)
        except (TypeError, ValueError):
            raise InvalidParamsError(f"{self.name}: cannot read {raw!r} as {self.kind.__name__}") from None
        if self.kind is float and not math.isfinite(value):
            raise InvalidParamsError(f"{self.name} must be finite, got {raw!r}")
        if self.choices and value not in self.choices:
            raise InvalidParamsError(f"{self.name} must be one of {self.choices}, got {value!r}")
        if self.low is not None and value < self.low:
            raise InvalidParamsError(f"{self.name} must be >= {self.low}, got {value!r}")
        if self.high is not None and value > self.high:
            raise InvalidParamsError(f"{self.name} must be <= {self.high}, got {value!r}")
        return value

    def to_dict(self) -> dict[str, Any]:
        schema: dict[str, Any] = {"type": self.kind.__name__, "default": self.default}
        if self.low is not None:
            schema["min"] = self.low
        if self.high is not None:
            schema["max"] = self.high
        if self.choices:
            schema["choices"] = list(self.choices)
        if self.doc:
            schema["doc"] = self.doc
        return schema


TRIALS = ParamSpec("trials", int, 100_000, low=0, doc="Monte Carlo trials")
ETA1 = ParamSpec("eta1", float, 1.0, low=0.0, high=1.0, doc="efficiency of detector 1")
ETA2 = ParamSpec("eta2", float, 1.0, low=0.0, high=1.0, doc="efficiency of detector 2")
THETA = ParamSpec("theta", float, math.pi / 4, doc="beam splitter mixing angle [rad]")


@dataclass
class ScenarioReport:
    scenario: str
    parameters: dict[str, Any]
    seed: int
    tables: dict[str, dict[str, float]]
    checks: list[Check]
    fringe: list[tuple[float, float]] | None = None
    counts: dict[str, int] | None = None
    metrics: dict[str, float] = field(default_factory=dict)
    arrangement: dict[str, Any] | None = None
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self) -> None:
        for name, table in self.tables.items():
            values = list(table.values())
            out_of_range = max((max(-v, v - 1.0, 0.0) for v in values), default=0.0)
            residual = abs(sum(values) - 1.0)
            self.checks.append(
                Check(
                    f"normalized:{name}",
                    residual <= self.tol.complete and out_of_range == 0.0,
                    max(residual, out_of_range),
                )
            )

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_tables(self) -> dict[str, Any]:
        tables: dict[str, Any] = {"probabilities": self.tables, "metrics": self.metrics}
        if self.fringe is not None:
            tables["fringe"] = [[phi, p] for phi, p in self.fringe]
        if self.counts is not None:
            tables["counts"] = self.counts
        if self.arrangement is not None:
            tables["arrangement"] = self.arrangement
        return tables


Runner = Callable[[dict[str, Any], int, int, Tolerances], ScenarioReport]


@dataclass(frozen=True)
class ScenarioInfo:
    name: str
    figure: str
    description: str
    params: tuple[ParamSpec, ...]
    runner: Runner = field(repr=False, compare=False)

    def schema(self) -> dict[str, dict[str, Any]]:
        return {p.name: p.to_dict() for p in self.params}

    def defaults(self) -> dict[str, Any]:
        return {p.name: p.default for p in self.params}

    def resolve(self, overrides: Mapping[str, Any] | None = None) -> dict[str, Any]:
        specs = {p.name: p for p in self.params}
        unknown = set(overrides or {}) - set(specs)
        if unknown:
            raise InvalidParamsError(
                f"Unknown parameter(s) {sorted(unknown)} for {self.name}; known: {sorted(specs)}"
            )
        resolved = self.defaults()
        for key, raw in (overrides or {}).items():
            resolved[key] = specs[key].parse(raw)
        return resolved


# --- shared checks ---------------------------------------------------------


def _named(povm: OutcomePOVM, values: Mapping[Any, float | int]) -> dict[str, Any]:
    return {povm.name(o): v for o, v in values.items()}


def _completeness_check(povm: OutcomePOVM, tol: Tolerances, name: str = "povm_complete") -> Check:
    residual = povm.completeness_residual()
    return Check(name, residual <= tol.complete, residual)


def _coincidence_checks(exact: Mapping[str, float], counts: Mapping[str, int] | None) -> list[Check]:
    checks = [Check("coincidence_exact_zero", exact["coincidence"] == 0.0, exact["coincidence"])]
    if counts is not None:
        n = counts["coincidence"]
        checks.append(Check("coincidence_sampled_zero", n == 0, float(n)))
    return checks


def _binomial_check(exact: Mapping[str, float], counts: Mapping[str, int], n: int) -> Check:
    """Every count within BINOMIAL_SIGMAS binomial σ of n·p (exact when σ = 0)."""
    worst = 0.0
    passed = True
    for name, p in exact.items():
        deviation = abs(counts[name] - n * p)
        sigma = math.sqrt(n * p * (1 - p))
        if sigma == 0.0:
            ok, z = deviation < 0.5, deviation
        else:
            z = deviation / sigma
            ok = z <= BINOMIAL_SIGMAS
        passed = passed and ok
        worst = max(worst, z)
    return Check("sampling_binomial", passed, worst)


def _theorem_check(
    name: str, effect: Effect, psi1: StateVector, psi2: StateVector, seed: int, tol: Tolerances
) -> Check:
    report = verify_reduction_theorem(
        effect, psi1, psi2, THEOREM_SAMPLES, philox(seed, THEOREM_STREAM), tol
    )
    ok = report.passed and report.max_superposition_expectation <= tol.kernel * max(
        report.operator_norm, 1.0
    )
    return Check(name, ok, report.max_superposition_expectation)


def _sample_table(
    table: Mapping[str, float], trials: int, seed: int, workers: int
) -> dict[str, int]:
    p = np.array(list(table.values()), dtype=float)
    counts = sample_categorical(p, trials, seed, workers)
    return {name: int(c) for name, c in zip(table, counts, strict=True)}


def _arm_states() -> tuple[StateVector, StateVector]:
    return basis_state(ARMS, "I"), basis_state(ARMS, "II")


# --- presets ---------------------------------------------------------------


def _mach_zehnder_a(p: dict[str, Any], seed: int, workers: int, tol: Tolerances) -> ScenarioReport:
    elements: list[Any] = [BeamSplitter(p["theta"]), PhaseShifter("I", p["phase"], swept=True)]
    if p["block"] != "none":
        elements.append(Blocker(p["block"], p["transmission"]))
    elements.append(BeamSplitter(p["theta"]))
    arr = Arrangement(ARMS, tuple(elements), "a")
    povm = build_joint_povm(
        "a", [DetectorSpec("I", p["eta1"]), DetectorSpec("II", p["eta2"])], ARMS, tol
    )
    source = arr.source_state()

    fringe = fringe_scan(arr, phase_grid(p["phase_steps"]), povm["01"], source, workers, tol)
    values = [prob for _, prob in fringe]
    vis = visibility(values)

    try:
        result = run_arrangement(arr.with_phase(p["phase"]), source, tol)
        survival = result.survival_probability
        exact = _named(povm, outcome_probabilities(povm, result.conditional_state, tol))
        exact = {k: survival * v for k, v in exact.items()}
    except ZeroSurvivalError:
        survival = 0.0
        exact = dict.fromkeys(("coincidence", "D1", "D2", "none"), 0.0)
    exact["absorbed"] = max(0.0, 1.0 - survival)
    counts = _sample_table(exact, p["trials"], seed, workers)

    checks = [_completeness_check(povm, tol), *_coincidence_checks(exact, counts)]
    if p["trials"] > 0:
        checks.append(_binomial_check(exact, counts, p["trials"]))
    if p["block"] == "none" and p["theta"] == math.pi / 4:
        law = max(
            abs(prob - p["eta2"] * (1 + math.cos(phi)) / 2) for phi, prob in fringe
        )
        checks.append(Check("fringe_law", law <= EXACT_TOLERANCE, law))
        if p["eta2"] > 0 and len(fringe) > 1:
            checks.append(Check("visibility_unit", abs(vis - 1.0) <= 1e-9, abs(vis - 1.0)))
    if p["block"] != "none" and p["transmission"] == 0.0:
        checks.append(Check("visibility_zero", vis <= 1e-9, vis))

    return ScenarioReport(
        "mach_zehnder_a",
        p,
        seed,
        {"detectors": exact},
        checks,
        fringe=fringe,
        counts=counts,
        metrics={"visibility": vis, "survival_probability": survival},
        arrangement=arrangement_to_dict(arr),
        tol=tol,
    )


def _coincidence_b(p: dict[str, Any], seed: int, workers: int, tol: Tolerances) -> ScenarioReport:
    arr = Arrangement(ARMS, (BeamSplitter(p["theta"]),), "b")
    state = run_arrangement(arr, arr.source_state(), tol).conditional_state
    povm = build_joint_povm(
        "b", [DetectorSpec("I", p["eta1"]), DetectorSpec("II", p["eta2"])], ARMS, tol
    )
    exact = _named(povm, outcome_probabilities(povm, state, tol))
    counts = _named(povm, sample_events(povm, state, p["trials"], seed, workers, tol))

    phi1, phi2 = _arm_states()
    rng = philox(seed, MIXTURE_STREAM)
    mixed = 0.0
    for w in rng.uniform(0.0, 1.0, size=MIXTURES):
        rho = DensityOperator.mixture([w, 1.0 - w], [phi1, phi2])
        mixed = max(mixed, coincidence_probability(povm, rho, tol))

    checks = [
        _completeness_check(povm, tol),
        *_coincidence_checks(exact, counts),
        _theorem_check("theorem_coincidence", povm["11"], phi1, phi2, seed, tol),
        Check("mixed_state_null", mixed <= EXACT_TOLERANCE, mixed),
    ]
    if p["trials"] > 0:
        checks.append(_binomial_check(exact, counts, p["trials"]))
    return ScenarioReport(
        "coincidence_b",
        p,
        seed,
        {"detectors": exact},
        checks,
        counts=counts,
        arrangement=arrangement_to_dict(arr),
        tol=tol,
    )


def serial_input(weight_i: float, relative_phase: float) -> StateVector:
    phi1, phi2 = _arm_states()
    return superpose(
        math.sqrt(weight_i), phi1, math.sqrt(1.0 - weight_i) * np.exp(1j * relative_phase), phi2
    )


def serial_outcome_tree(weight_i: float, eta1: float, eta2: float) -> dict[str, float]:
    """Enumerate arm choice, then each detector's independent firing."""
    tree = {"both": 0.0, "first_only": 0.0, "second_only": 0.0, "none": 0.0}
    for in_arm_i, p_arm in ((True, weight_i), (False, 1.0 - weight_i)):
        for fires1, p1 in ((True, eta1), (False, 1.0 - eta1)):
            for fires2, p2 in ((True, eta2), (False, 1.0 - eta2)):
                f1, f2 = in_arm_i and fires1, in_arm_i and fires2
                name = {
                    (True, True): "both",
                    (True, False): "first_only",
                    (False, True): "second_only",
                    (False, False): "none",
                }[(f1, f2)]
                tree[name] += p_arm * p1 * p2
    return tree


def _serial_c(p: dict[str, Any], seed: int, workers: int, tol: Tolerances) -> ScenarioReport:
    state = serial_input(p["weight_i"], p["relative_phase"])
    povm = build_joint_povm(
        "c",
        [DetectorSpec("I", p["eta1"], transmitting=True), DetectorSpec("I", p["eta2"])],
        ARMS,
        tol,
    )
    exact = serial_correlation(povm, state, tol)
    counts = _named(povm, sample_events(povm, state, p["trials"], seed, workers, tol))
    tree = serial_outcome_tree(p["weight_i"], p["eta1"], p["eta2"])
    tree_residual = max(abs(exact[k] - tree[k]) for k in tree)

    checks = [
        _completeness_check(povm, tol),
        Check("outcome_tree", tree_residual <= EXACT_TOLERANCE, tree_residual),
    ]
    if p["trials"] > 0:
        checks.append(_binomial_check(exact, counts, p["trials"]))
    if p["eta1"] == 1.0 and p["eta2"] == 1.0:
        grid = [
            serial_correlation(povm, serial_input(w, phase), tol)
            for w in (0.0, 0.2, 0.5, 0.9)
            for phase in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
        ]
        residual = max(
            max(d["first_only"] + d["second_only"], abs(d["both"] + d["none"] - 1.0)) for d in grid
        )
        phi1, phi2 = _arm_states()
        checks += [
            Check("anticoincidence_grid", residual <= EXACT_TOLERANCE, residual),
            _theorem_check(
                "theorem_anticoincidence", anticoincidence_effect(povm, tol), phi1, phi2, seed, tol
            ),
            Check(
                "anticoincidence_sampled_zero",
                counts["first_only"] + counts["second_only"] == 0,
                float(counts["first_only"] + counts["second_only"]),
            ),
        ]
    return ScenarioReport(
        "serial_c", p, seed, {"detectors": exact}, checks, counts=counts, tol=tol
    )


def screen_effects(points: int) -> list[tuple[float, Effect]]:
    """
    Screen positions as relative phases δ_k = 2πk/K with
    E_k = (2/K)|s_k><s_k|, s_k = (1, e^{iδ_k})/√2; complete for K >= 2.
    """
    effects = []
    for delta in phase_grid(points):
        s = np.array([1.0, np.exp(1j * delta)]) / math.sqrt(2)
        effects.append((delta, Effect(Operator((2.0 / points) * np.outer(s, s.conj())))))
    return effects


def _two_slit(p: dict[str, Any], seed: int, workers: int, tol: Tolerances) -> ScenarioReport:
    slits = ("slit1", "slit2")
    s1, s2 = basis_state(slits, "slit1"), basis_state(slits, "slit2")
    w = p["weight_slit1"]
    state = superpose(math.sqrt(w), s1, math.sqrt(1.0 - w) * np.exp(1j * p["source_phase"]), s2)

    screen = screen_effects(p["phase_steps"])
    fringe = [(delta, expectation(effect, state, tol)) for delta, effect in screen]
    screen_sum = sum(e.matrix for _, e in screen)
    screen_residual = float(np.max(np.abs(screen_sum - np.eye(2))))
    amp = 2 * math.sqrt(w * (1.0 - w))
    law = max(
        abs(prob - (1 + amp * math.cos(p["source_phase"] - delta)) / p["phase_steps"])
        for delta, prob in fringe
    )

    povm = build_joint_povm(
        "b", [DetectorSpec("slit1", p["eta1"]), DetectorSpec("slit2", p["eta2"])], slits, tol
    )
    exact = _named(povm, outcome_probabilities(povm, state, tol))
    counts = _named(povm, sample_events(povm, state, p["trials"], seed, workers, tol))
    checks = [
        _completeness_check(povm, tol),
        Check("screen_complete", screen_residual <= tol.complete, screen_residual),
        Check("screen_fringe_law", law <= EXACT_TOLERANCE, law),
        *_coincidence_checks(exact, counts),
        _theorem_check("theorem_coincidence", povm["11"], s1, s2, seed, tol),
    ]
    if p["trials"] > 0:
        checks.append(_binomial_check(exact, counts, p["trials"]))
    return ScenarioReport(
        "two_slit",
        p,
        seed,
        {"slit_detectors": exact, "screen": {f"{k}": prob for k, (_, prob) in enumerate(fringe)}},
        checks,
        fringe=fringe,
        counts=counts,
        metrics={"visibility": visibility([prob for _, prob in fringe])},
        tol=tol,
    )


SG_BASIS = ("I|up", "I|down", "II|up", "II|down")


def _stern_gerlach(p: dict[str, Any], seed: int, workers: int, tol: Tolerances) -> ScenarioReport:
    up, down = basis_state(SG_BASIS, "I|up"), basis_state(SG_BASIS, "I|down")
    half = p["polar"] / 2
    source = superpose(math.cos(half), up, math.sin(half) * np.exp(1j * p["azimuth"]), down)
    # spin-controlled path unitary: spin-down is deflected into path II
    arr = Arrangement(SG_BASIS, (Mirror(("I|down", "II|down")),), "b")
    state = run_arrangement(arr, source, tol).conditional_state

    povm = build_joint_povm(
        "b", [DetectorSpec("I", p["eta1"]), DetectorSpec("II", p["eta2"])], SG_BASIS, tol
    )
    exact = _named(povm, outcome_probabilities(povm, state, tol))
    counts = _named(povm, sample_events(povm, state, p["trials"], seed, workers, tol))
    singles = max(
        abs(exact["D1"] - p["eta1"] * math.cos(half) ** 2),
        abs(exact["D2"] - p["eta2"] * math.sin(half) ** 2),
    )
    beam1, beam2 = basis_state(SG_BASIS, "I|up"), basis_state(SG_BASIS, "II|down")
    checks = [
        _completeness_check(povm, tol),
        *_coincidence_checks(exact, counts),
        Check("singles_law", singles <= EXACT_TOLERANCE, singles),
        _theorem_check("theorem_coincidence", povm["11"], beam1, beam2, seed, tol),
    ]
    if p["trials"] > 0:
        checks.append(_binomial_check(exact, counts, p["trials"]))
    return ScenarioReport(
        "stern_gerlach",
        p,
        seed,
        {"detectors": exact},
        checks,
        counts=counts,
        arrangement=arrangement_to_dict(arr),
        tol=tol,
    )


_SCENARIOS = (
    ScenarioInfo(
        "mach_zehnder_a",
        "Fig. 1a",
        "Fig. 1a: Mach-Zehnder fringes at the output ports; blocking an arm removes them.",
        (
            ParamSpec("phase_steps", int, 64, low=1, high=1_000_000, doc="fringe grid points"),
            ParamSpec("phase", float, 0.0, doc="reference phase for the detector table [rad]"),
            THETA,
            ParamSpec("block", str, "none", choices=("none", "I", "II"), doc="blocked arm"),
            ParamSpec("transmission", float, 0.0, low=0.0, high=1.0, doc="blocker transmission"),
            ETA1,
            ETA2,
            TRIALS,
        ),
        _mach_zehnder_a,
    ),
    ScenarioInfo(
        "coincidence_b",
        "Fig. 1b",
        "Fig. 1b: one detector in each arm; a single quantum never gives a coincidence.",
        (THETA, ETA1, ETA2, TRIALS),
        _coincidence_b,
    ),
    ScenarioInfo(
        "serial_c",
        "Fig. 1c",
        "Fig. 1c: two detectors in series in arm I; at unit efficiency both fire or none.",
        (
            ParamSpec("weight_i", float, 0.5, low=0.0, high=1.0, doc="|c1|^2, weight of arm I"),
            ParamSpec("relative_phase", float, 0.0, doc="phase of c2 relative to c1 [rad]"),
            ETA1,
            ETA2,
            TRIALS,
        ),
        _serial_c,
    ),
    ScenarioInfo(
        "two_slit",
        "Fig. 1b (two-slit variant)",
        "Two-slit variant of Fig. 1b: screen fringes, and no coincidences between slit detectors.",
        (
            ParamSpec("phase_steps", int, 64, low=2, high=1_000_000, doc="screen positions"),
            ParamSpec("weight_slit1", float, 0.5, low=0.0, high=1.0, doc="|c1|^2 at slit 1"),
            ParamSpec("source_phase", float, 0.0, doc="relative phase between slits [rad]"),
            ETA1,
            ETA2,
            TRIALS,
        ),
        _two_slit,
    ),
    ScenarioInfo(
        "stern_gerlach",
        "Fig. 1b (Stern-Gerlach variant)",
        "Stern-Gerlach variant of Fig. 1b: spin sorted into two beams, one detector per beam.",
        (
            ParamSpec("polar", float, math.pi / 2, low=0.0, high=math.pi, doc="spin polar angle"),
            ParamSpec("azimuth", float, 0.0, doc="spin azimuth [rad]"),
            ETA1,
            ETA2,
            TRIALS,
        ),
        _stern_gerlach,
    ),
)
SCENARIOS: dict[str, ScenarioInfo] = {s.name: s for s in _SCENARIOS}


def list_scenarios() -> tuple[ScenarioInfo, ...]:
    return _SCENARIOS


def get_scenario(name: str) -> ScenarioInfo:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UnknownScenarioError(
            f"Unknown scenario '{name}'; available: {', '.join(SCENARIOS)}"
        ) from None


def run_scenario(
    name: str,
    params: Mapping[str, Any] | None = None,
    seed: int = 0,
    workers: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ScenarioReport:
    info = get_scenario(name)
    resolved = info.resolve(params)
    logger.info("running %s with %s (seed %d)", name, resolved, seed)
    return info.runner(resolved, seed, workers, tol)
