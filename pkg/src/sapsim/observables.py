"""Populations, fidelities, reduced density matrix and entanglement entropy.

The reduced single-particle density matrix of a two-body state is

    rho(x, x') = integral psi*(x, x2) psi(x', x2) dx2,

represented on the grid with the quadrature weight folded in so the
matrix has unit trace. The von Neumann entropy S = -sum_i l_i ln(l_i)
over its eigenvalues (natural log) is the entanglement measure used
throughout; ln 2 ~ 0.6931 is the reference plateau of one atom
delocalized over two traps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sapsim.grid import TwoBodyWavefunction, overlap
from sapsim.hamiltonian import TrapConfiguration, region_boundaries

EIGENVALUE_FLOOR = 1e-12


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """Hermitian unit-trace one-body matrix with its sorted spectrum."""

    matrix: np.ndarray
    spectrum: np.ndarray  # eigenvalues, descending

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


def reduced_density(state: TwoBodyWavefunction) -> ReducedDensityMatrix:
    """Partial trace over one particle of |psi><psi|.

    rho[i, j] = dx^2 * sum_k conj(psi[i, k]) psi[j, k]; Hermitian and
    positive semidefinite by construction.
    """
    psi = state.psi
    rho = (psi.conj() @ psi.T) * state.grid.dx**2
    rho = 0.5 * (rho + rho.conj().T)
    spectrum = np.linalg.eigvalsh(rho)[::-1].copy()
    return ReducedDensityMatrix(rho, spectrum)


def vn_entropy(rho) -> float:
    """von Neumann entropy -sum l ln(l) in nats.

    Accepts a ReducedDensityMatrix or a bare eigenvalue array; terms with
    l <= 1e-12 are dropped.
    """
    spectrum = rho.spectrum if isinstance(rho, ReducedDensityMatrix) else np.asarray(rho)
    lam = spectrum[spectrum > EIGENVALUE_FLOOR]
    if lam.size == 0:
        return 0.0
    return float(max(-np.sum(lam * np.log(lam)), 0.0))


@dataclass(frozen=True)
class TrapPopulations:
    """Two-atom configuration probabilities by trap-region pair.

    Off-diagonal entries fold the two orderings (one atom in each of the
    two named regions); the six entries sum to one.
    """

    p_ll: float
    p_mm: float
    p_rr: float
    p_lm: float
    p_lr: float
    p_mr: float

    def as_dict(self) -> dict[str, float]:
        return {
            "p_LL": self.p_ll, "p_MM": self.p_mm, "p_RR": self.p_rr,
            "p_LM": self.p_lm, "p_LR": self.p_lr, "p_MR": self.p_mr,
        }

    def total(self) -> float:
        return self.p_ll + self.p_mm + self.p_rr + self.p_lm + self.p_lr + self.p_mr


def trap_populations(state: TwoBodyWavefunction, config: TrapConfiguration,
                     boundaries: tuple[float, float] | None = None) -> TrapPopulations:
    """Integrate |psi|^2 over the trap-region pairs.

    Regions are split at the potential maxima between adjacent traps
    (computed from config unless boundaries is given explicitly).
    """
    if boundaries is None:
        boundaries = region_boundaries(config)
    b_lm, b_mr = boundaries
    x = state.grid.x
    i1 = int(np.searchsorted(x, b_lm))
    i2 = int(np.searchsorted(x, b_mr))
    slices = [slice(0, i1), slice(i1, i2), slice(i2, x.size)]
    prob = np.abs(state.psi) ** 2 * state.grid.dx**2
    block = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            block[a, b] = np.sum(prob[slices[a], slices[b]])
    return TrapPopulations(
        p_ll=float(block[0, 0]),
        p_mm=float(block[1, 1]),
        p_rr=float(block[2, 2]),
        p_lm=float(block[0, 1] + block[1, 0]),
        p_lr=float(block[0, 2] + block[2, 0]),
        p_mr=float(block[1, 2] + block[2, 1]),
    )


def state_fidelity(state: TwoBodyWavefunction,
                   reference: TwoBodyWavefunction) -> float:
    """|<reference|psi>|^2; invariant under a global phase of either state."""
    return float(abs(overlap(reference, state)) ** 2)


def noon_superposition(pair_left: TwoBodyWavefunction,
                       pair_right: TwoBodyWavefunction) -> TwoBodyWavefunction:
    """(|2 0 0> - |0 0 2>)/sqrt(2) built from two localized pair states.

    The relative minus sign is the dark-state convention and is part of
    the state definition, not a fitting freedom.
    """
    if pair_left.grid != pair_right.grid:
        raise ValueError("pair states live on different grids")
    psi = (pair_left.psi - pair_right.psi) / np.sqrt(2.0)
    state = TwoBodyWavefunction(psi, pair_left.grid)
    return state.normalize()
