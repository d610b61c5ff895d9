"""Nonlocal Choquard equation solvers and diagnostics."""

from ._core import (
    ChoquardError,
    DegenerateInput,
    Grid,
    IoError,
    Model,
    NodalCollapse,
    NonConvergence,
    ParameterError,
    Params,
    PotentialViolation,
    UnsupportedRegime,
    brezis_lieb_local,
    brezis_lieb_nonlocal,
    brezis_lieb_pairing,
    compare_levels,
    cross_gagliardo,
    energy_splitting,
    exponent_window,
    fractional_laplacian,
    gaussian_bump,
    gradient_fd_suite,
    groundstate_solve,
    hls_sweep,
    random_field,
    riesz_convolve,
    run_cli,
    signchanging_solve,
    translate,
    validate_params,
)

__all__ = [name for name in dir() if not name.startswith("_")]
