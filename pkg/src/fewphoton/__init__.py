"""Dissipative dynamics, Wigner functions and photon statistics of few-photon cavity states."""

from .errors import DomainError, PostSelectionError, VacuumUndefinedError
from .evolution import evolve_rk4, evolve_trajectory
from .fock import DensityMatrix, StateVector, density_from_state, fock_state, make_superposition
from .qed import PrepParams, measured_wigner, two_atom_prepare
from .statistics import correlation_sweep, g2_antinormal_closed, g2_closed, g2_from_rho
from .wigner import InitialStateParams, PhasePoint, WignerGrid, closed_form, wigner_from_rho, wigner_grid

__all__ = [
    "DensityMatrix",
    "DomainError",
    "InitialStateParams",
    "PhasePoint",
    "PostSelectionError",
    "PrepParams",
    "StateVector",
    "VacuumUndefinedError",
    "WignerGrid",
    "closed_form",
    "correlation_sweep",
    "density_from_state",
    "evolve_rk4",
    "evolve_trajectory",
    "fock_state",
    "g2_antinormal_closed",
    "g2_closed",
    "g2_from_rho",
    "make_superposition",
    "measured_wigner",
    "two_atom_prepare",
    "wigner_from_rho",
    "wigner_grid",
]
