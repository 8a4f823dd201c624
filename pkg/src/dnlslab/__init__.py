"""Numerical laboratory for the cubic discrete nonlinear Schroedinger
equation on a periodic lattice: spectral tools, modified energies, and
Sobolev-norm growth diagnostics."""

from .lattice import (
    LatticeState,
    discrete_laplacian,
    hamiltonian,
    l2_norm,
    l4_norm,
    linf_norm,
    rescale,
    sobolev_norm,
)
from .spectral import (
    SpectralState,
    continuous_sobolev,
    dft,
    idft,
    nonlinear_symbol,
    shannon_eval,
    symbol_norm,
)
from .dynamics import Trajectory, integrate, step_rk4, step_splitstep
from .energies import (
    OddCosineSeries,
    ResonancePoint,
    build_fn,
    energy_derivative_direct,
    eval_fn,
    lambda_m,
    lambda_time_derivative,
    modified_energy,
    mu_eval,
)
from .bounds import (
    BoundReport,
    check_gagliardo_nirenberg,
    check_holder_interpolation,
    check_lemma_hehe,
    check_scaling_invariance,
    m_quantity,
    run_growth_experiment,
    theorem_rhs,
)

__all__ = [
    "LatticeState",
    "SpectralState",
    "Trajectory",
    "OddCosineSeries",
    "ResonancePoint",
    "BoundReport",
    "discrete_laplacian",
    "l2_norm",
    "l4_norm",
    "linf_norm",
    "sobolev_norm",
    "hamiltonian",
    "rescale",
    "dft",
    "idft",
    "symbol_norm",
    "continuous_sobolev",
    "shannon_eval",
    "nonlinear_symbol",
    "step_splitstep",
    "step_rk4",
    "integrate",
    "build_fn",
    "eval_fn",
    "mu_eval",
    "lambda_m",
    "lambda_time_derivative",
    "modified_energy",
    "energy_derivative_direct",
    "m_quantity",
    "theorem_rhs",
    "run_growth_experiment",
    "check_gagliardo_nirenberg",
    "check_lemma_hehe",
    "check_holder_interpolation",
    "check_scaling_invariance",
]

__version__ = "0.1.0"
