from quantum.hilbert import (
    DEFAULT_TOLERANCES,
    DensityOperator,
    Effect,
    EffectDiagnostics,
    KernelCheck,
    Operator,
    StateVector,
    Tolerances,
    basis_state,
    expectation,
    expectation_mixed,
    kernel_member,
    superpose,
    validate_effect,
)

__all__ = [
    "DEFAULT_TOLERANCES",
    "DensityOperator",
    "Effect",
    "EffectDiagnostics",
    "KernelCheck",
    "Operator",
    "StateVector",
    "Tolerances",
    "basis_state",
    "expectation",
    "expectation_mixed",
    "kernel_member",
    "superpose",
    "validate_effect",
]
