"""Photon loss at zero temperature: numerical and analytic density-matrix evolution.

All times are the dimensionless product kappa*t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .fock import DensityMatrix, lowering

DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class DecayParams:
    kappa: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"loss coefficient must be positive, got {self.kappa}")


@dataclass(frozen=True)
class Trajectory:
    times: tuple[float, ...]
    states: tuple[DensityMatrix, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(zip(self.times, self.states))


@lru_cache(maxsize=32)
def _operators(dim: int):
    a = lowering(dim)
    adag = a.conj().T
    return a, adag, adag @ a


def _rhs(rho: np.ndarray, kappa: float) -> np.ndarray:
    a, adag, n = _operators(rho.shape[0])
    return -kappa * (n @ rho + rho @ n - 2.0 * a @ rho @ adag)


def lindblad_rhs(rho: DensityMatrix, kappa: float = 1.0) -> np.ndarray:
    """d(rho)/dt = -kappa (a^dag a rho + rho a^dag a - 2 a rho a^dag)."""
    return _rhs(rho.elements, kappa)


def _rk4_step(rho: np.ndarray, h: float) -> np.ndarray:
    k1 = _rhs(rho, 1.0)
    k2 = _rhs(rho + 0.5 * h * k1, 1.0)
    k3 = _rhs(rho + 0.5 * h * k2, 1.0)
    k4 = _rhs(rho + h * k3, 1.0)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate(rho: np.ndarray, duration: float, step: float) -> np.ndarray:
    """Fixed-step RK4 over ``duration``; the final step is shortened to land exactly."""
    if duration <= 0.0:
        return rho
    nsteps = int(np.ceil(duration / step - 1e-9))
    h = duration / nsteps
    for _ in range(nsteps):
        rho = _rk4_step(rho, h)
    return rho


def _check_step(step: float) -> None:
    if not step > 0:
        raise DomainError(f"integration step must be positive, got {step}")


def evolve_rk4(rho0: DensityMatrix, kappa_t_final: float, step: float = DEFAULT_STEP) -> DensityMatrix:
    """Integrate the loss master equation from 0 to ``kappa_t_final`` with classical RK4.

    The step is adjusted down so that an integer number of equal steps
    reaches the target time exactly.
    """
    _check_step(step)
    if kappa_t_final < 0:
        raise DomainError(f"kappa_t must be nonnegative, got {kappa_t_final}")
    if kappa_t_final == 0:
        return rho0
    return DensityMatrix(_integrate(np.array(rho0.elements), kappa_t_final, step))


def evolve_trajectory(rho0: DensityMatrix, kappa_t_samples, step: float = DEFAULT_STEP) -> Trajectory:
    """Single integration pass, sampled at each requested time."""
    _check_step(step)
    samples = [float(t) for t in kappa_t_samples]
    if any(t < 0 for t in samples):
        raise DomainError("sample times must be nonnegative")
    if any(b < a for a, b in zip(samples, samples[1:])):
        raise DomainError("sample times must be ascending")

    states = []
    rho = np.array(rho0.elements)
    now = 0.0
    for t in samples:
        rho = _integrate(rho, t - now, step)
        now = t
        states.append(rho0 if t == 0 else DensityMatrix(rho))
    return Trajectory(times=tuple(samples), states=tuple(states))


def diagonals_analytic(rho0_diag, kappa_t: float) -> tuple[float, float, float]:
    """Closed-form populations (rho00, rho11, rho22) for a state supported on n <= 2."""
    p0, p1, p2 = (float(v) for v in rho0_diag)
    if min(p0, p1, p2) < 0:
        raise DomainError("populations must be nonnegative")
    if abs(p0 + p1 + p2 - 1.0) > 1e-10:
        raise DomainError("populations must sum to 1")
    if kappa_t < 0:
        raise DomainError(f"kappa_t must be nonnegative, got {kappa_t}")
    e2 = np.exp(-2.0 * kappa_t)
    e4 = np.exp(-4.0 * kappa_t)
    rho11 = (p1 + 2.0 * p2) * e2 - 2.0 * p2 * e4
    rho22 = p2 * e4
    return 1.0 - rho11 - rho22, float(rho11), float(rho22)
