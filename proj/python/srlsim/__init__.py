"""Superradiant laser simulator: mean-field steady states, quantum-regression
spectra, parameter sweeps and a Dicke-basis master-equation oracle."""

from _srlsim import (  # noqa: F401
    DerivedQuantities,
    MeanFieldState,
    PhysicalParams,
    SrlBudgetError,
    SrlConfigError,
    SrlNumericalError,
    __version__,
    cold_cavity_loss,
    derive,
    evolve,
    group_index,
    linewidth,
    linewidth_bad_cavity_haken,
    linewidth_bad_cavity_photon,
    linewidth_cooperativity,
    linewidth_schawlow_townes,
    me_steady_photon,
    steady_state,
    sweep_photon,
)
