"""Reduced three-level model: dark-state algebra and coupled-mode dynamics.

With the trap ground-state energies renormalized to zero, the model
Hamiltonian in the (left, middle, right) basis is

    H = -1/2 [[0, J_LM, 0], [J_LM, 0, J_MR], [0, J_MR, 0]].

Its zero-energy eigenstate |D(theta)> = (cos theta, 0, -sin theta) with
tan theta = J_LM / J_MR is the dark state followed by all SAP protocols.
The same matrix describes the pair manifold (|2 0 0>, |0 2 0>, |0 0 2>)
with co-tunneling amplitudes; only the labels change. Coupling profiles
are user inputs: the trap-distance-to-rate map is never needed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def hamiltonian_matrix(j_lm: float, j_mr: float) -> np.ndarray:
    """Three-mode Hamiltonian for the given tunneling rates (both >= 0)."""
    if j_lm < 0 or j_mr < 0:
        raise ValueError("tunneling rates must be non-negative")
    return -0.5 * np.array([
        [0.0, j_lm, 0.0],
        [j_lm, 0.0, j_mr],
        [0.0, j_mr, 0.0],
    ])


def mixing_angle(j_lm: float, j_mr: float) -> float:
    """theta = atan2(J_LM, J_MR) in [0, pi/2]; undefined when both vanish."""
    if j_lm < 0 or j_mr < 0:
        raise ValueError("tunneling rates must be non-negative")
    if j_lm == 0.0 and j_mr == 0.0:
        raise ValueError("mixing angle undefined for vanishing couplings")
    return float(np.arctan2(j_lm, j_mr))


def dark_state(theta: float) -> np.ndarray:
    """Zero-energy eigenstate (cos theta, 0, -sin theta)."""
    return np.array([np.cos(theta), 0.0, -np.sin(theta)])


@dataclass(frozen=True)
class CouplingProfile:
    """Tunneling rates as functions of time on [0, duration]."""

    j_lm: Callable[[float], float]
    j_mr: Callable[[float], float]
    duration: float


def gaussian_profile(duration: float, peak: float = 1.0,
                     width: float | None = None, delay: float | None = None,
                     order: str = "counterintuitive") -> CouplingProfile:
    """Two Gaussian pulses straddling the midpoint of the run.

    In the counter-intuitive order J_MR peaks first (at duration/2 -
    delay) and J_LM second; "intuitive" swaps them. Defaults width =
    duration/6 and delay = width are a robust STIRAP working point.
    """
    if order not in ("counterintuitive", "intuitive"):
        raise ValueError(f"unknown pulse order {order!r}")
    width = duration / 6.0 if width is None else width
    delay = width if delay is None else delay
    t_first = duration / 2.0 - delay
    t_second = duration / 2.0 + delay

    def pulse(center):
        return lambda t: peak * np.exp(-((t - center) ** 2) / (2.0 * width**2))

    if order == "counterintuitive":
        return CouplingProfile(j_lm=pulse(t_second), j_mr=pulse(t_first),
                               duration=duration)
    return CouplingProfile(j_lm=pulse(t_first), j_mr=pulse(t_second),
                           duration=duration)


def raised_cosine_profile(duration: float, peak: float = 1.0,
                          order: str = "counterintuitive") -> CouplingProfile:
    """Overlapping raised-cosine pulses, each spanning 2/3 of the run."""
    if order not in ("counterintuitive", "intuitive"):
        raise ValueError(f"unknown pulse order {order!r}")
    window = 2.0 * duration / 3.0

    def pulse(start):
        def f(t):
            u = (t - start) / window
            if u <= 0.0 or u >= 1.0:
                return 0.0
            return peak * np.sin(np.pi * u) ** 2
        return f

    first, second = pulse(0.0), pulse(duration / 3.0)
    if order == "counterintuitive":
        return CouplingProfile(j_lm=second, j_mr=first, duration=duration)
    return CouplingProfile(j_lm=first, j_mr=second, duration=duration)


def evolve_three_mode(state0: np.ndarray, profile: CouplingProfile,
                      dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Integrate i dc/dt = H(t) c with fixed-step classic Runge-Kutta.

    Returns (times, amplitudes) including the initial state; amplitudes
    has shape (len(times), 3). Aborts if the norm drifts by more than
    1e-6, which signals a too-large step.
    """
    c = np.asarray(state0, dtype=np.complex128).copy()
    if c.shape != (3,):
        raise ValueError("state must be an amplitude triple")
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round(profile.duration / dt))

    def deriv(t, y):
        h = hamiltonian_matrix(profile.j_lm(t), profile.j_mr(t))
        return -1j * (h @ y)

    times = np.empty(n_steps + 1)
    amps = np.empty((n_steps + 1, 3), dtype=np.complex128)
    times[0] = 0.0
    amps[0] = c
    for i in range(n_steps):
        t = i * dt
        k1 = deriv(t, c)
        k2 = deriv(t + 0.5 * dt, c + 0.5 * dt * k1)
        k3 = deriv(t + 0.5 * dt, c + 0.5 * dt * k2)
        k4 = deriv(t + dt, c + dt * k3)
        c = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        times[i + 1] = (i + 1) * dt
        amps[i + 1] = c
        if abs(np.sum(np.abs(c) ** 2) - 1.0) > 1e-6:
            raise RuntimeError(
                f"norm drift exceeded 1e-6 at t={times[i + 1]:g}; reduce dt"
            )
    return times, amps
