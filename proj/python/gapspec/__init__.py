from ._gapspec import (
    GapspecError,
    __version__,
    amplitude_bound,
    count_eigenvalues_below,
    effective_potential,
    energy_closed_form,
    energy_quadrature,
    eval_Q,
    evolve,
    find_gap_eigenvalues,
    largek_gap_scan,
    migration_curve,
    nonlinear_source,
    omega_weight,
    renormalized_f,
    sweep_lambda,
    zero_mode,
)

__all__ = [
    "GapspecError",
    "__version__",
    "amplitude_bound",
    "count_eigenvalues_below",
    "effective_potential",
    "energy_closed_form",
    "energy_quadrature",
    "eval_Q",
    "evolve",
    "find_gap_eigenvalues",
    "largek_gap_scan",
    "migration_curve",
    "nonlinear_source",
    "omega_weight",
    "renormalized_f",
    "sweep_lambda",
    "zero_mode",
]
