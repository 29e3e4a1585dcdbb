"""Trap trajectories and onsite offsets for the three SAP protocols.

All protocols keep the middle trap fixed at the origin and move the
outer traps with raised-cosine ramps separated by a dwell at closest
approach:

  transport   - right trap approaches, dwells at d_near and retracts over
                the first 2/3 of the run; the left trap does the same
                delayed by 1/3, so the couplings follow the
                counter-intuitive order and the dark-state mixing angle
                sweeps 0 -> pi/2, crossing pi/4 at mid-protocol where
                both outer traps sit at d_near.
  noon        - identical to transport until the geometry is left-right
                symmetric (half time); from there the left trap mirrors
                the right one so the couplings stay equal and the mixing
                angle freezes at pi/4.
  separation  - transport trap motion plus constant onsite offsets
                (0, e_g - 1, e_g - 1), which makes the two-atoms-left,
                one-each and one-left-one-right configurations
                degenerate so a single atom is passed to the right trap.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from sapsim.hamiltonian import TrapConfiguration


@dataclass(frozen=True)
class ProtocolSchedule:
    """Time-parametrized trap trajectory for one protocol run."""

    kind: str
    duration: float
    d_far: float
    d_near: float
    config_fn: Callable[[float], TrapConfiguration]

    def at(self, t: float) -> TrapConfiguration:
        """Configuration at time t, clamped to [0, duration]."""
        return self.config_fn(min(max(t, 0.0), self.duration))


def _excursion(u):
    """Approach-dwell-retract profile on [0, 1]: 0 at rest, 1 at d_near.

    Raised-cosine ramps on the first and last quarter of the window with
    a dwell in between. The dwell is what makes both outer traps sit at
    d_near simultaneously at the coupling crossover; without it the
    crossover happens at a large trap distance where the tunneling rates
    are exponentially small and no adiabatic transfer is possible.
    """
    u = np.clip(u, 0.0, 1.0)
    if u < 0.25:
        return float(np.sin(2.0 * np.pi * u) ** 2)
    if u > 0.75:
        return float(np.sin(2.0 * np.pi * (1.0 - u)) ** 2)
    return 1.0


def _validate_geometry(duration: float, d_far: float, d_near: float) -> None:
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if not 0.0 < d_near < d_far:
        raise ValueError(
            f"need 0 < d_near < d_far to keep the traps ordered, "
            f"got d_near={d_near}, d_far={d_far}"
        )


def _transport_centers(t: float, duration: float, d_far: float,
                       d_near: float) -> tuple[float, float, float]:
    # Right trap active on the first 2/3 of the run, left trap delayed by
    # 1/3 (overlapping windows). At t = duration/2 both sit at d_near.
    span = d_far - d_near
    window = 2.0 * duration / 3.0
    lam_r = d_far - span * _excursion(t / window if duration else 1.0)
    lam_l = -d_far + span * _excursion(
        (t - duration / 3.0) / window if duration else 0.0
    )
    return float(lam_l), 0.0, float(lam_r)


def transport_schedule(duration: float, d_far: float = 9.0,
                       d_near: float = 1.8) -> ProtocolSchedule:
    """Pair transport |2 0 0> -> |0 0 2>: counter-intuitive approach order."""
    _validate_geometry(duration, d_far, d_near)

    def config_fn(t: float) -> TrapConfiguration:
        return TrapConfiguration(_transport_centers(t, duration, d_far, d_near))

    return ProtocolSchedule("transport", duration, d_far, d_near, config_fn)


def noon_schedule(duration: float, d_far: float = 9.0,
                  d_near: float = 1.8) -> ProtocolSchedule:
    """NOON generation: transport until symmetric, then symmetric retraction.

    The switch happens at duration/2, the instant both outer traps reach
    d_near; from there the left trap mirrors the right one, so the
    couplings stay equal and the mixing angle is frozen at pi/4. Both
    traps are momentarily at rest there, so the trajectory stays
    continuously differentiable through the switch.
    """
    _validate_geometry(duration, d_far, d_near)
    t_switch = duration / 2.0

    def config_fn(t: float) -> TrapConfiguration:
        lam_l, lam_m, lam_r = _transport_centers(t, duration, d_far, d_near)
        if t >= t_switch:
            lam_l = -lam_r
        return TrapConfiguration((lam_l, lam_m, lam_r))

    return ProtocolSchedule("noon", duration, d_far, d_near, config_fn)


def separation_schedule(duration: float, d_far: float = 9.0,
                        d_near: float = 1.8, e_g: float = 1.4) -> ProtocolSchedule:
    """Particle separation |2 0 0> -> |1 0 1>: transport motion + offsets.

    Constant offsets eps_M = eps_R = e_g - 1 (the pair's interaction
    energy above two free atoms) restore the degeneracy between the
    two-atoms-left, one-left-one-middle and one-left-one-right states.
    """
    _validate_geometry(duration, d_far, d_near)
    if not 1.0 <= e_g < 2.0:
        raise ValueError(f"pair energy must lie in [1, 2), got {e_g}")
    offsets = (0.0, e_g - 1.0, e_g - 1.0)

    def config_fn(t: float) -> TrapConfiguration:
        return TrapConfiguration(
            _transport_centers(t, duration, d_far, d_near), offsets
        )

    return ProtocolSchedule("separation", duration, d_far, d_near, config_fn)


def static_schedule(config: TrapConfiguration, duration: float) -> ProtocolSchedule:
    """Hold a fixed configuration; useful for stationarity checks."""
    d = config.centers[2] - config.centers[1]
    return ProtocolSchedule("static", duration, max(d, 1.0), max(d, 1.0) * 0.5,
                            lambda t: config)


@lru_cache(maxsize=4096)
def tunneling_splitting(distance: float, n: int = 1024, pad: float = 6.0) -> float:
    """Single-particle tunneling rate proxy for two traps a given distance apart.

    Half the symmetric-antisymmetric splitting of the two lowest states
    of the isolated double well min((x-d/2)^2, (x+d/2)^2)/2, from a dense
    finite-difference eigensolve. Diagnostic only: the grid dynamics
    never uses it.
    """
    if distance <= 0:
        raise ValueError("trap distance must be positive")
    half = distance / 2.0 + pad
    x = np.linspace(-half, half, n)
    dx = x[1] - x[0]
    v = 0.5 * np.minimum((x - distance / 2.0) ** 2, (x + distance / 2.0) ** 2)
    w = eigh_tridiagonal(1.0 / dx**2 + v, np.full(n - 1, -0.5 / dx**2),
                         select="i", select_range=(0, 1))[0]
    return float(0.5 * (w[1] - w[0]))


def coupling_trace(schedule: ProtocolSchedule, times) -> np.ndarray:
    """(J_LM, J_MR) tunneling-rate proxies along the schedule.

    Returns an array of shape (len(times), 2); used for reporting the
    mixing angle, not for driving the dynamics.
    """
    out = np.empty((len(times), 2))
    for i, t in enumerate(times):
        l, m, r = schedule.at(t).centers
        out[i, 0] = tunneling_splitting(round(m - l, 9))
        out[i, 1] = tunneling_splitting(round(r - m, 9))
    return out


def schedule_to_csv(schedule: ProtocolSchedule, path, n_samples: int = 401) -> None:
    """Write (t, lambda_L, lambda_M, lambda_R, eps_L, eps_M, eps_R) rows."""
    times = np.linspace(0.0, schedule.duration, n_samples)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "lambda_L", "lambda_M", "lambda_R",
                         "eps_L", "eps_M", "eps_R"])
        for t in times:
            cfg = schedule.at(float(t))
            writer.writerow([f"{t:.9g}"] + [f"{v:.9g}" for v in cfg.centers]
                            + [f"{v:.9g}" for v in cfg.offsets])
