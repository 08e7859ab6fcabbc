"""Random states, coefficients and positive effects for property checks."""

from collections.abc import Sequence

import numpy as np

from quantum.errors import InvalidParamsError
from quantum.hilbert import Effect, Operator, StateVector


def default_labels(dim: int) -> tuple[str, ...]:
    return tuple(f"e{i + 1}" for i in range(dim))


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_state(
    rng: np.random.Generator, dim: int, labels: Sequence[str] | None = None
) -> StateVector:
    v = ginibre(rng, dim, 1)[:, 0]
    return StateVector.from_amplitudes(v, labels or default_labels(dim), normalize=True)


def random_orthonormal_pair(
    rng: np.random.Generator, dim: int, labels: Sequence[str] | None = None
) -> tuple[StateVector, StateVector]:
    q, _ = np.linalg.qr(ginibre(rng, dim, 2))
    labels = labels or default_labels(dim)
    return (
        StateVector.from_amplitudes(q[:, 0], labels, normalize=True),
        StateVector.from_amplitudes(q[:, 1], labels, normalize=True),
    )


def random_coefficients(rng: np.random.Generator, n: int) -> np.ndarray:
    """
    n pairs (c1, c2), uniform on the unit 3-sphere of
    (Re c1, Im c1, Re c2, Im c2). Shape (n, 2), complex.
    """
    x = rng.standard_normal((n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return np.stack([x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3]], axis=1)


def complement_projector(vectors: Sequence[StateVector]) -> np.ndarray:
    """Projector onto the orthogonal complement of span{vectors}."""
    stacked = np.stack([v.amplitudes for v in vectors], axis=1)
    u, s, _ = np.linalg.svd(stacked, full_matrices=True)
    rank = int(np.sum(s > 1e-12 * max(s[0], 1.0)))
    complement = u[:, rank:]
    return complement @ complement.conj().T


def _scaled_to_unit(m: np.ndarray, scale: float = 1.0) -> np.ndarray:
    m = (m + m.conj().T) / 2
    top = float(np.linalg.eigvalsh(m)[-1])
    return m if top <= 0 else m * (scale / top)


def random_psd_effect(rng: np.random.Generator, dim: int) -> Effect:
    """B†B / ||B†B|| for a complex Ginibre B."""
    b = ginibre(rng, dim, dim)
    return Effect(Operator(_scaled_to_unit(b.conj().T @ b)))


def constructed_kernel_effect(
    rng: np.random.Generator, psi1: StateVector, psi2: StateVector, scale: float | None = None
) -> Effect:
    """
    A = P·B†B·P scaled so its top eigenvalue is `scale` (random in (0.5, 1]
    when omitted), with P annihilating psi1 and psi2.
    """
    dim = psi1.dim
    p = complement_projector([psi1, psi2])
    b = ginibre(rng, dim, dim)
    a = p @ (b.conj().T @ b) @ p
    s = float(rng.uniform(0.5, 1.0)) if scale is None else scale
    return Effect(Operator(_scaled_to_unit(a, s)))


def perturbed_kernel_effect(
    rng: np.random.Generator,
    psi1: StateVector,
    psi2: StateVector,
    eps1: float,
    eps2: float,
) -> Effect:
    """
    Constructed-kernel effect plus |w><w|, w = √eps1·e^{ia}·psi1 + √eps2·e^{ib}·psi2.

    For orthonormal psi1, psi2 this gives <psi_i|A|psi_i> = eps_i exactly and
    saturates the Cauchy-Schwarz bound at the matching relative phase.
    """
    if eps1 < 0 or eps2 < 0 or eps1 + eps2 > 1:
        raise InvalidParamsError(f"Need eps1, eps2 >= 0 and eps1 + eps2 <= 1, got {eps1}, {eps2}")
    a, b = rng.uniform(0.0, 2 * np.pi, size=2)
    w = np.sqrt(eps1) * np.exp(1j * a) * psi1.amplitudes + np.sqrt(eps2) * np.exp(
        1j * b
    ) * psi2.amplitudes
    base = constructed_kernel_effect(rng, psi1, psi2, scale=1.0 - (eps1 + eps2))
    m = base.matrix + np.outer(w, w.conj())
    return Effect(Operator((m + m.conj().T) / 2))
