"""
Seeded Monte Carlo sampling of joint detector outcomes.

Trials are cut into fixed blocks of BLOCK_SIZE. Block b draws from its own
Philox substream, SeedSequence(seed, spawn_key=(SAMPLING_STREAM, b)), so the
merged counts depend on (seed, n_trials) only and never on how blocks are
spread over workers. Other consumers of a run seed use their own stream ids.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from detection.povm import JointOutcome, OutcomePOVM, outcome_probabilities
from quantum.errors import DegenerateDistributionError, InvalidParamsError
from quantum.hilbert import DEFAULT_TOLERANCES, DensityOperator, StateVector, Tolerances

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1 << 16
DISTRIBUTION_TOLERANCE = 1e-9

SAMPLING_STREAM = 0
THEOREM_STREAM = 1
MIXTURE_STREAM = 2
FUZZ_STREAM = 3


def philox(seed: int, *spawn_key: int) -> np.random.Generator:
    """Counter-based Philox generator for substream (seed, *spawn_key)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def _block_counts(probabilities: np.ndarray, n_trials: int, seed: int, block: int) -> np.ndarray:
    size = min(BLOCK_SIZE, n_trials - block * BLOCK_SIZE)
    rng = philox(seed, SAMPLING_STREAM, block)
    draws = rng.choice(len(probabilities), size=size, p=probabilities)
    return np.bincount(draws, minlength=len(probabilities))


def sample_categorical(
    probabilities: np.ndarray, n_trials: int, seed: int, workers: int = 1
) -> np.ndarray:
    """Counts per category for n_trials independent draws."""
    if n_trials < 0:
        raise InvalidParamsError(f"n_trials must be >= 0, got {n_trials}")
    probabilities = np.asarray(probabilities, dtype=float)
    total = float(probabilities.sum())
    negative = bool(np.any(probabilities < -DISTRIBUTION_TOLERANCE))
    if negative or abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
        raise DegenerateDistributionError(
            f"Not a distribution: {probabilities.tolist()!r} sums to {total!r}"
        )
    probabilities = np.clip(probabilities, 0.0, None)
    probabilities = probabilities / probabilities.sum()
    k = len(probabilities)
    n_blocks = -(-n_trials // BLOCK_SIZE)
    if n_blocks == 0:
        return np.zeros(k, dtype=np.int64)

    def run(blocks: range) -> np.ndarray:
        total = np.zeros(k, dtype=np.int64)
        for b in blocks:
            total += _block_counts(probabilities, n_trials, seed, b)
        return total

    workers = max(1, min(workers, n_blocks))
    if workers == 1:
        return run(range(n_blocks))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(run, [range(w, n_blocks, workers) for w in range(workers)])
        return sum(parts, start=np.zeros(k, dtype=np.int64))


def sample_events(
    povm: OutcomePOVM,
    state: StateVector | DensityOperator,
    n_trials: int,
    seed: int,
    workers: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> dict[JointOutcome, int]:
    exact = outcome_probabilities(povm, state, tol)
    p = np.array(list(exact.values()), dtype=float)
    counts = sample_categorical(p, n_trials, seed, workers)
    logger.debug("sampled %d trials over %d workers", n_trials, workers)
    return {outcome: int(c) for outcome, c in zip(exact, counts, strict=True)}
