"""Two interacting ultracold bosons in a time-dependent 1D triple well.

Split-operator simulation of spatial-adiabatic-passage protocols
(pair transport, NOON-state generation, particle separation) with
von Neumann entanglement-entropy diagnostics, plus the reduced
three-mode dark-state model. Natural units hbar = m = omega = 1
throughout.
"""

from sapsim.busch import g_from_eg, eg_from_g
from sapsim.grid import Grid1D, TwoBodyWavefunction
from sapsim.hamiltonian import (
    TrapConfiguration,
    potential_at,
    interaction_diagonal,
    total_energy,
    prepare_ground_state,
)
from sapsim.propagate import PropagationSettings, step, evolve
from sapsim.schedules import (
    ProtocolSchedule,
    transport_schedule,
    noon_schedule,
    separation_schedule,
)
from sapsim.observables import (
    ReducedDensityMatrix,
    TrapPopulations,
    reduced_density,
    vn_entropy,
    trap_populations,
    state_fidelity,
)
from sapsim import threemode

__all__ = [
    "g_from_eg",
    "eg_from_g",
    "Grid1D",
    "TwoBodyWavefunction",
    "TrapConfiguration",
    "potential_at",
    "interaction_diagonal",
    "total_energy",
    "prepare_ground_state",
    "PropagationSettings",
    "step",
    "evolve",
    "ProtocolSchedule",
    "transport_schedule",
    "noon_schedule",
    "separation_schedule",
    "ReducedDensityMatrix",
    "TrapPopulations",
    "reduced_density",
    "vn_entropy",
    "trap_populations",
    "state_fidelity",
    "threemode",
]

__version__ = "0.1.0"
