"""Random CMV matrix toolkit: sampling, determinants, exponents, spectra and checks."""

from ._core import (
    DomainError,
    NumericalFailure,
    ParameterError,
    SingularSystemError,
    cmv_matrix,
    coefficients,
    det_P,
    eigenvalues,
    ldt_tail,
    lyapunov,
    resonance,
    run_cli,
    verify_suite,
)

__all__ = [
    "DomainError",
    "NumericalFailure",
    "ParameterError",
    "SingularSystemError",
    "cmv_matrix",
    "coefficients",
    "det_P",
    "eigenvalues",
    "ldt_tail",
    "lyapunov",
    "resonance",
    "run_cli",
    "verify_suite",
]
