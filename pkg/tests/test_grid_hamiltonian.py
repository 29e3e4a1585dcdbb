"""Grid, potential, contact term, energies and ground-state preparation."""

import numpy as np
import pytest

from sapsim import (
    Grid1D,
    TrapConfiguration,
    TwoBodyWavefunction,
    g_from_eg,
    interaction_diagonal,
    potential_at,
    prepare_ground_state,
    total_energy,
)
from sapsim.grid import load_wavefunction, mirror, overlap, save_wavefunction
from sapsim.hamiltonian import (
    LocalizationError,
    apply_hamiltonian,
    gaussian_orbital,
    occupancy_probability,
    region_boundaries,
    symmetrized_product,
)
from sapsim.propagate import step


class TestGrid1D:
    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            Grid1D(n_points=300)

    def test_rejects_empty_extent(self):
        with pytest.raises(ValueError):
            Grid1D(n_points=64, x_min=1.0, x_max=1.0)

    def test_spacing_and_wavenumbers(self):
        grid = Grid1D(n_points=256, x_min=-12.0, x_max=12.0)
        assert grid.dx == pytest.approx(24.0 / 256)
        assert grid.x[0] == -12.0
        assert grid.x[-1] == pytest.approx(12.0 - grid.dx)
        assert grid.k_max == pytest.approx(np.pi / grid.dx)
        assert np.max(np.abs(grid.k)) == pytest.approx(np.pi / grid.dx)

    def test_index_of(self):
        grid = Grid1D(n_points=256, x_min=-12.0, x_max=12.0)
        assert grid.x[grid.index_of(-9.0)] == pytest.approx(-9.0)


class TestPotential:
    CONFIG = TrapConfiguration((-5.0, 0.0, 5.0))

    def test_trap_minimum(self):
        assert potential_at(self.CONFIG, 0.0) == 0.0

    def test_parabola_crossing(self):
        # Adjacent parabolas at equal offset agree at the midpoint.
        assert potential_at(self.CONFIG, -2.5) == pytest.approx(3.125)

    def test_offset_enters_additively(self):
        config = TrapConfiguration((-5.0, 0.0, 5.0), (0.0, 0.4, 0.4))
        assert potential_at(config, 5.0) == pytest.approx(0.4)

    def test_continuity_at_crossings(self):
        config = TrapConfiguration((-5.0, 0.0, 5.0), (0.0, 0.4, 0.4))
        b_lm, b_mr = region_boundaries(config)
        for b in (b_lm, b_mr):
            left = potential_at(config, b - 1e-9)
            right = potential_at(config, b + 1e-9)
            assert left == pytest.approx(right, abs=1e-7)

    def test_region_boundaries_shift_with_offsets(self):
        config = TrapConfiguration((-5.0, 0.0, 5.0), (0.0, 0.4, 0.4))
        b_lm, b_mr = region_boundaries(config)
        assert b_lm == pytest.approx(-2.5 + 0.4 / 5.0)
        assert b_mr == pytest.approx(2.5)

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            TrapConfiguration((1.0, 0.0, 5.0))


class TestInteractionDiagonal:
    def test_zero_coupling(self):
        grid = Grid1D(n_points=64, x_min=-8.0, x_max=8.0)
        assert np.all(interaction_diagonal(0.0, grid) == 0.0)

    def test_discrete_delta_value(self):
        grid = Grid1D(n_points=256, x_min=-12.8, x_max=12.8)  # dx = 0.1
        field = interaction_diagonal(2.0, grid)
        assert np.allclose(np.diag(field), 20.0)
        off = field - np.diag(np.diag(field))
        assert np.all(off == 0.0)

    def test_rejects_attractive(self):
        grid = Grid1D(n_points=64, x_min=-8.0, x_max=8.0)
        with pytest.raises(ValueError):
            interaction_diagonal(-1.0, grid)


class TestEnergies:
    def test_noninteracting_ground_energy(self, single_trap):
        grid = Grid1D(n_points=256, x_min=-12.8, x_max=12.8)  # dx = 0.1
        phi = gaussian_orbital(grid, 0.0)
        state = symmetrized_product(phi, phi, grid)
        assert total_energy(state, single_trap, 0.0) == pytest.approx(1.0, abs=1e-4)

    def test_one_excitation_energy(self, single_trap):
        grid = Grid1D(n_points=256, x_min=-12.8, x_max=12.8)
        phi0 = gaussian_orbital(grid, 0.0)
        phi1 = grid.x * phi0
        phi1 /= np.sqrt(np.sum(phi1**2) * grid.dx)
        state = symmetrized_product(phi0, phi1, grid)
        assert total_energy(state, single_trap, 0.0) == pytest.approx(2.0, abs=1e-3)

    def test_hermiticity(self, small_grid, single_trap, rng):
        g = 1.3
        shape = (small_grid.n_points, small_grid.n_points)
        a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        b = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        ha = apply_hamiltonian(a, single_trap, g, small_grid)
        hb = apply_hamiltonian(b, single_trap, g, small_grid)
        lhs = np.vdot(a, hb) * small_grid.dx**2
        rhs = np.conj(np.vdot(b, ha) * small_grid.dx**2)
        assert abs(lhs - rhs) < 1e-9

    def test_energy_imaginary_residue(self, small_grid, single_trap, prepared):
        g = g_from_eg(1.4)
        state = prepared(single_trap, g, small_grid, "MM")
        h_psi = apply_hamiltonian(state.psi, single_trap, g, small_grid)
        residue = np.imag(np.vdot(state.psi, h_psi)) * small_grid.dx**2
        assert abs(residue) < 1e-9


class TestPrepareGroundState:
    def test_noninteracting_pair(self, small_grid, single_trap, prepared):
        state = prepared(single_trap, 0.0, small_grid, "MM")
        assert total_energy(state, single_trap, 0.0) == pytest.approx(1.0, abs=2e-3)
        # product state: amplitudes factorize
        psi = state.psi
        i0 = small_grid.index_of(0.0)
        approx_product = np.outer(psi[:, i0], psi[i0, :]) / psi[i0, i0]
        assert np.max(np.abs(psi - approx_product)) < 1e-6

    def test_interacting_pair_energy(self, small_grid, single_trap, prepared):
        g = g_from_eg(1.4)
        state = prepared(single_trap, g, small_grid, "MM")
        assert total_energy(state, single_trap, g) == pytest.approx(1.4, abs=0.02)

    def test_hard_core_limit(self, small_grid, single_trap, prepared):
        state = prepared(single_trap, 100.0, small_grid, "MM")
        energy = total_energy(state, single_trap, 100.0)
        assert 1.9 < energy < 2.0

    def test_normalization_and_symmetry(self, small_grid, single_trap, prepared):
        state = prepared(single_trap, g_from_eg(1.4), small_grid, "MM")
        assert state.norm() == pytest.approx(1.0, abs=1e-9)
        assert state.exchange_defect() < 1e-12

    def test_localized_in_requested_trap(self, triple_grid, prepared):
        config = TrapConfiguration((-9.0, 0.0, 9.0))
        state = prepared(config, g_from_eg(1.2), triple_grid, "LL")
        assert occupancy_probability(state, config, "LL") > 0.99

    def test_split_pair_occupancy(self, triple_grid, prepared):
        config = TrapConfiguration((-9.0, 0.0, 9.0))
        state = prepared(config, g_from_eg(1.4), triple_grid, "LR")
        assert occupancy_probability(state, config, "LR") > 0.99
        assert state.exchange_defect() < 1e-12

    def test_occupancy_validation(self, small_grid, single_trap):
        with pytest.raises(ValueError):
            prepare_ground_state(single_trap, 0.0, small_grid, "XX")

    def test_localization_guard_trips(self, triple_grid):
        config = TrapConfiguration((-9.0, 0.0, 9.0))
        with pytest.raises(LocalizationError):
            prepare_ground_state(config, 0.0, triple_grid, "LL",
                                 localization_tol=1e-12)


class TestExchangeSymmetryPreservation:
    def test_real_time_step_preserves_symmetry(self, triple_grid, rng):
        config = TrapConfiguration((-9.0, 0.0, 9.0))
        x = triple_grid.x
        field = np.exp(-((x[:, None] + 9) ** 2) / 2 - ((x[None, :] + 9) ** 2) / 2)
        field = field + field.T + 0.1 * np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / 3)
        state = TwoBodyWavefunction(field.astype(complex), triple_grid).normalize()
        out = step(state, config, 1.5, 2e-3)
        assert out.exchange_defect() < 1e-12


class TestWavefunctionIO:
    def test_round_trip(self, small_grid, tmp_path):
        rng = np.random.default_rng(7)
        psi = rng.normal(size=(128, 128)) + 1j * rng.normal(size=(128, 128))
        state = TwoBodyWavefunction(psi, small_grid).normalize()
        path = tmp_path / "snap.wf"
        save_wavefunction(path, state)
        loaded = load_wavefunction(path)
        assert loaded.grid == small_grid
        assert np.array_equal(loaded.psi, state.psi)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.wf"
        path.write_bytes(b"not a snapshot")
        with pytest.raises(ValueError):
            load_wavefunction(path)


class TestMirror:
    def test_involution(self, small_grid, rng):
        psi = rng.normal(size=(128, 128)) + 1j * rng.normal(size=(128, 128))
        state = TwoBodyWavefunction(psi, small_grid).normalize()
        twice = mirror(mirror(state))
        assert np.array_equal(twice.psi, state.psi)

    def test_norm_preserved(self, small_grid, rng):
        psi = rng.normal(size=(128, 128)) + 1j * rng.normal(size=(128, 128))
        state = TwoBodyWavefunction(psi, small_grid).normalize()
        assert mirror(state).norm() == pytest.approx(1.0, abs=1e-12)


def test_overlap_grid_mismatch(small_grid, triple_grid):
    a = TwoBodyWavefunction(np.ones((128, 128), complex), small_grid)
    b = TwoBodyWavefunction(np.ones((128, 128), complex), triple_grid)
    with pytest.raises(ValueError):
        overlap(a, b)
