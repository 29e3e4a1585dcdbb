"""Triple-well two-body Hamiltonian on the grid and ground-state preparation.

H = sum_j [ -(1/2) d^2/dx_j^2 + V(x_j, t) ] + g delta(x1 - x2)

with V the pointwise minimum of three offset harmonic parabolas. The
contact term is discretized as g/dx on the grid diagonal, consistent
with rectangle-rule quadrature of the delta function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from sapsim.grid import Grid1D, TwoBodyWavefunction


class ConvergenceError(RuntimeError):
    """Imaginary-time relaxation failed to reach the energy tolerance."""


class LocalizationError(RuntimeError):
    """Prepared state leaked out of the requested trap region."""


@dataclass(frozen=True)
class TrapConfiguration:
    """Three trap centers and onsite energy offsets at one instant.

    centers = (lambda_L, lambda_M, lambda_R) must be ordered left to
    right; offsets are additive constants on the individual parabolas.
    """

    centers: tuple[float, float, float]
    offsets: tuple[float, float, float] = (0.0, 0.0, 0.0)
    frequency: float = 1.0

    def __post_init__(self):
        if len(self.centers) != 3 or len(self.offsets) != 3:
            raise ValueError("need exactly three centers and three offsets")
        l, m, r = self.centers
        if not (l <= m <= r):
            raise ValueError(f"trap centers must be ordered, got {self.centers}")
        if not all(np.isfinite(v) for v in self.centers + self.offsets):
            raise ValueError("centers and offsets must be finite")
        if self.frequency < 0:
            raise ValueError("trap frequency must be non-negative")


def potential_at(config: TrapConfiguration, x):
    """Piecewise-harmonic potential: min_i [ (w^2/2)(x - c_i)^2 + eps_i ].

    Accepts a scalar or an array of positions.
    """
    x = np.asarray(x, dtype=float)
    w2 = 0.5 * config.frequency**2
    branches = [w2 * (x - c) ** 2 + e for c, e in zip(config.centers, config.offsets)]
    v = np.minimum(np.minimum(branches[0], branches[1]), branches[2])
    return v if v.ndim else float(v)


def region_boundaries(config: TrapConfiguration) -> tuple[float, float]:
    """Potential-maximum points between adjacent traps.

    These are the crossings of neighbouring offset parabolas,
        b = (c_i + c_j)/2 + (eps_j - eps_i) / (w^2 (c_j - c_i)),
    and require strictly separated trap centers.
    """
    l, m, r = config.centers
    el, em, er = config.offsets
    w2 = config.frequency**2
    if not (l < m < r):
        raise ValueError("region boundaries need strictly separated traps")
    b_lm = 0.5 * (l + m) + (em - el) / (w2 * (m - l))
    b_mr = 0.5 * (m + r) + (er - em) / (w2 * (r - m))
    return b_lm, b_mr


def interaction_diagonal(g: float, grid: Grid1D) -> np.ndarray:
    """Contact term g*delta(x1-x2) discretized as g/dx on diagonal cells."""
    if g < 0:
        raise ValueError("only repulsive couplings are supported")
    field = np.zeros((grid.n_points, grid.n_points))
    np.fill_diagonal(field, g / grid.dx)
    return field


def potential_2d(config: TrapConfiguration, g: float, grid: Grid1D) -> np.ndarray:
    """Full diagonal part of H on the grid: V(x1) + V(x2) + g/dx on x1 = x2."""
    v = potential_at(config, grid.x)
    v2 = v[:, None] + v[None, :]
    if g != 0.0:
        idx = np.arange(grid.n_points)
        v2[idx, idx] += g / grid.dx
    return v2


def apply_hamiltonian(psi: np.ndarray, config: TrapConfiguration, g: float,
                      grid: Grid1D) -> np.ndarray:
    """H|psi> with the spectral kinetic operator and the grid potential."""
    k2 = 0.5 * (grid.k[:, None] ** 2 + grid.k[None, :] ** 2)
    t_psi = sfft.ifft2(k2 * sfft.fft2(psi))
    return t_psi + potential_2d(config, g, grid) * psi


def total_energy(state: TwoBodyWavefunction, config: TrapConfiguration,
                 g: float) -> float:
    """<psi|H|psi> for a normalized state; the imaginary residue is discarded."""
    h_psi = apply_hamiltonian(state.psi, config, g, state.grid)
    return float(np.real(np.vdot(state.psi, h_psi)) * state.grid.dx**2)


def gaussian_orbital(grid: Grid1D, center: float, width: float = 1.0) -> np.ndarray:
    """Normalized harmonic-oscillator-like Gaussian on the grid."""
    phi = np.exp(-((grid.x - center) ** 2) / (2.0 * width**2))
    return phi / np.sqrt(np.sum(phi**2) * grid.dx)


def symmetrized_product(phi_a: np.ndarray, phi_b: np.ndarray,
                        grid: Grid1D) -> TwoBodyWavefunction:
    """Bosonic two-body state built from two single-particle orbitals."""
    psi = np.outer(phi_a, phi_b) + np.outer(phi_b, phi_a)
    state = TwoBodyWavefunction(psi.astype(np.complex128), grid)
    return state.normalize()


_TRAP_INDEX = {"L": 0, "M": 1, "R": 2}


def _occupancy_indices(occupancy: str) -> tuple[int, int]:
    occ = occupancy.upper()
    if len(occ) != 2 or any(c not in _TRAP_INDEX for c in occ):
        raise ValueError(
            f"occupancy must be two letters from L/M/R (e.g. 'LL', 'LR'), got {occupancy!r}"
        )
    i, j = sorted(_TRAP_INDEX[c] for c in occ)
    return i, j


def _region_slices(config: TrapConfiguration, grid: Grid1D):
    b_lm, b_mr = region_boundaries(config)
    i1 = int(np.searchsorted(grid.x, b_lm))
    i2 = int(np.searchsorted(grid.x, b_mr))
    return [slice(0, i1), slice(i1, i2), slice(i2, grid.n_points)]


def occupancy_probability(state: TwoBodyWavefunction, config: TrapConfiguration,
                          occupancy: str) -> float:
    """Probability of finding the two atoms in the named trap regions."""
    i, j = _occupancy_indices(occupancy)
    regions = _region_slices(config, state.grid)
    prob = np.abs(state.psi) ** 2 * state.grid.dx**2
    p = float(np.sum(prob[regions[i], regions[j]]))
    if i != j:
        p += float(np.sum(prob[regions[j], regions[i]]))
    return p


def prepare_ground_state(config: TrapConfiguration, g: float, grid: Grid1D,
                         occupancy: str = "LL", dtau: float = 1e-3,
                         energy_tol: float = 1e-10, max_steps: int = 400_000,
                         localization_tol: float = 0.01) -> TwoBodyWavefunction:
    """Lowest symmetric state with the pair in the requested trap(s).

    Imaginary-time split-operator relaxation from a symmetrized Gaussian
    seed placed in the requested trap(s). Runs a coarse step first and
    finishes at dtau; converged when the energy change per step drops
    below energy_tol. For separated traps the relaxation stays in the
    seeded (metastable) configuration because inter-trap tunneling is
    negligible on the relaxation timescale.

    Raises ConvergenceError if the energy tolerance is not met within
    max_steps, LocalizationError if more than localization_tol of the
    probability ends up outside the requested trap regions.
    """
    if g < 0:
        raise ValueError("only repulsive couplings are supported")
    i, j = _occupancy_indices(occupancy)
    phi_i = gaussian_orbital(grid, config.centers[i])
    phi_j = gaussian_orbital(grid, config.centers[j])
    state = symmetrized_product(phi_i, phi_j, grid)

    n = grid.n_points
    idx = np.arange(n)
    v1d = potential_at(config, grid.x)
    k2 = 0.5 * (grid.k[:, None] ** 2 + grid.k[None, :] ** 2)

    stages = [(10.0 * dtau, 100.0 * energy_tol), (dtau, energy_tol)]
    check_every = 25
    energy = total_energy(state, config, g)
    steps_used = 0
    for dt_im, tol in stages:
        decay_k = np.exp(-dt_im * k2)
        decay_v = np.exp(-0.5 * dt_im * v1d)
        decay_int = np.exp(-0.5 * dt_im * g / grid.dx)
        psi = state.psi
        converged = False
        while steps_used < max_steps:
            for _ in range(check_every):
                psi *= decay_v[:, None]
                psi *= decay_v[None, :]
                if g != 0.0:
                    psi[idx, idx] *= decay_int
                psi = sfft.ifft2(decay_k * sfft.fft2(psi, overwrite_x=True),
                                 overwrite_x=True)
                psi *= decay_v[:, None]
                psi *= decay_v[None, :]
                if g != 0.0:
                    psi[idx, idx] *= decay_int
                psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx**2)
            steps_used += check_every
            state.psi = psi
            new_energy = total_energy(state, config, g)
            if abs(new_energy - energy) / check_every < tol:
                energy = new_energy
                converged = True
                break
            energy = new_energy
        if not converged:
            raise ConvergenceError(
                f"imaginary-time relaxation not converged after {steps_used} steps "
                f"(last energy {energy:.10f})"
            )

    state.normalize()
    l, m, r = config.centers
    if min(m - l, r - m) > 2.0:
        p_in = occupancy_probability(state, config, occupancy)
        if p_in < 1.0 - localization_tol:
            raise LocalizationError(
                f"only {p_in:.4f} of the probability is in the {occupancy} region"
            )
    return state
