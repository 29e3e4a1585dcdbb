"""Uniform spatial grid and the two-body wavefunction container."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [x_min, x_max) with its FFT wavenumber ladder.

    n_points must be a power of two. The grid excludes the right endpoint
    so that the FFT sees exactly one period; dx = (x_max - x_min)/n_points.
    """

    n_points: int = 512
    x_min: float = -12.0
    x_max: float = 12.0
    dx: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False, compare=False)
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n_points
        if n <= 0 or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two, got {n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        dx = (self.x_max - self.x_min) / n
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x", self.x_min + dx * np.arange(n))
        object.__setattr__(self, "k", 2.0 * np.pi * np.fft.fftfreq(n, d=dx))
        self.x.setflags(write=False)
        self.k.setflags(write=False)

    @property
    def k_max(self) -> float:
        """Largest wavenumber magnitude on the ladder, pi/dx."""
        return np.pi / self.dx

    def index_of(self, x: float) -> int:
        """Index of the grid point nearest to x."""
        i = int(round((x - self.x_min) / self.dx))
        return min(max(i, 0), self.n_points - 1)


class TwoBodyWavefunction:
    """Complex amplitude field psi(x1, x2) on an n x n grid.

    Physical states are normalized (sum |psi|^2 dx^2 = 1) and symmetric
    under particle exchange psi(x1, x2) = psi(x2, x1).
    """

    def __init__(self, psi: np.ndarray, grid: Grid1D):
        psi = np.asarray(psi, dtype=np.complex128)
        n = grid.n_points
        if psi.shape != (n, n):
            raise ValueError(f"amplitude field must be {n}x{n}, got {psi.shape}")
        self.psi = psi
        self.grid = grid

    def norm(self) -> float:
        """sum |psi|^2 dx^2."""
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx**2)

    def normalize(self) -> "TwoBodyWavefunction":
        """Rescale in place to unit norm; returns self."""
        self.psi /= np.sqrt(self.norm())
        return self

    def copy(self) -> "TwoBodyWavefunction":
        return TwoBodyWavefunction(self.psi.copy(), self.grid)

    def exchange_defect(self) -> float:
        """Largest pointwise deviation from bosonic exchange symmetry."""
        return float(np.max(np.abs(self.psi - self.psi.T)))

    def density(self) -> np.ndarray:
        """Single-particle density n(x) = integral |psi(x, x2)|^2 dx2."""
        return np.sum(np.abs(self.psi) ** 2, axis=1) * self.grid.dx


def overlap(a: TwoBodyWavefunction, b: TwoBodyWavefunction) -> complex:
    """<a|b> with the grid quadrature weight; grids must match."""
    if a.grid != b.grid:
        raise ValueError("wavefunctions live on different grids")
    return complex(np.vdot(a.psi, b.psi) * a.grid.dx**2)


def mirror(state: TwoBodyWavefunction) -> TwoBodyWavefunction:
    """Spatial reflection x -> -x of both coordinates.

    Exact on the periodic grid (index permutation j -> -j mod n).
    """
    idx = (-np.arange(state.grid.n_points)) % state.grid.n_points
    return TwoBodyWavefunction(state.psi[np.ix_(idx, idx)].copy(), state.grid)


_WF_MAGIC = b"SAP2WF1\x00"


def save_wavefunction(path, state: TwoBodyWavefunction) -> None:
    """Flat binary snapshot: header (n, x_min, x_max) + row-major complex pairs."""
    g = state.grid
    with open(path, "wb") as fh:
        fh.write(_WF_MAGIC)
        fh.write(struct.pack("<qdd", g.n_points, g.x_min, g.x_max))
        fh.write(np.ascontiguousarray(state.psi, dtype=np.complex128).tobytes())


def load_wavefunction(path) -> TwoBodyWavefunction:
    """Inverse of save_wavefunction."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_WF_MAGIC))
        if magic != _WF_MAGIC:
            raise ValueError(f"{path}: not a wavefunction snapshot")
        n, x_min, x_max = struct.unpack("<qdd", fh.read(24))
        data = np.frombuffer(fh.read(), dtype=np.complex128)
    if data.size != n * n:
        raise ValueError(f"{path}: truncated snapshot")
    grid = Grid1D(n_points=int(n), x_min=x_min, x_max=x_max)
    return TwoBodyWavefunction(data.reshape(n, n).copy(), grid)
