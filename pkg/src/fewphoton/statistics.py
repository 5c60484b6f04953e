"""Normal- and anti-normal-ordered second-order correlation functions at zero delay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, VacuumUndefinedError
from .fock import DensityMatrix
from .wigner import InitialStateParams, WignerGrid

VACUUM_THRESHOLD = 1e-12
DEFAULT_SWEEP = tuple(np.linspace(0.0, 3.0, 61))


@dataclass(frozen=True)
class CorrelationSample:
    """One point of a correlation sweep; ``g2`` is nan where it is undefined (vacuum)."""

    kappa_t: float
    g2: float
    g2a: float
    mean_n: float
    second_factorial_moment: float


def _check_time(kappa_t: float) -> None:
    if kappa_t < 0:
        raise DomainError(f"kappa_t must be nonnegative, got {kappa_t}")


def mean_photon_closed(params: InitialStateParams, kappa_t: float) -> float:
    """<a^dag a>(t), evaluated term by term as the four-term expression.

    Algebraically equal to (|C1|^2 + 2|C2|^2) e^{-2kt}.
    """
    _check_time(kappa_t)
    c1s, c2s = params.mod_c1 ** 2, params.mod_c2 ** 2
    e2 = np.exp(-2.0 * kappa_t)
    e4 = np.exp(-4.0 * kappa_t)
    return float(4.0 * c2s * e4 + 2.0 * c2s * e2 * (1.0 - 2.0 * e2) + c1s * e2)


def second_factorial_moment_closed(params: InitialStateParams, kappa_t: float) -> float:
    """<a^dag^2 a^2>(t) = 2|C2|^2 e^{-4kt}."""
    _check_time(kappa_t)
    return float(2.0 * params.mod_c2 ** 2 * np.exp(-4.0 * kappa_t))


def _g2(m2: float, mean: float) -> float:
    if mean <= VACUUM_THRESHOLD:
        raise VacuumUndefinedError(f"g2 is undefined at vacuum (<n> = {mean:.3g})")
    return m2 / mean ** 2


def g2_closed(params: InitialStateParams, kappa_t: float) -> float:
    # Deliberately the time-dependent ratio, so that invariance is observed, not assumed.
    return _g2(second_factorial_moment_closed(params, kappa_t), mean_photon_closed(params, kappa_t))


def fock_moments(rho: DensityMatrix) -> tuple[float, float]:
    """(sum n rho_nn, sum n(n-1) rho_nn)."""
    n = np.arange(rho.dim, dtype=float)
    diag = rho.diagonal()
    return float(n @ diag), float((n * (n - 1.0)) @ diag)


def g2_from_rho(rho: DensityMatrix) -> float:
    mean, m2 = fock_moments(rho)
    return _g2(m2, mean)


def _g2a(m2: float, mean: float) -> float:
    return (m2 + 4.0 * mean + 2.0) / (mean + 1.0) ** 2


def g2_antinormal_closed(params: InitialStateParams, kappa_t: float) -> float:
    _check_time(kappa_t)
    c1s, c2s = params.mod_c1 ** 2, params.mod_c2 ** 2
    e2 = np.exp(-2.0 * kappa_t)
    e4 = np.exp(-4.0 * kappa_t)
    num = 4.0 * c1s * e2 + 8.0 * c2s * e2 + 2.0 * c2s * e4 + 2.0
    den = (c1s * e2 + 2.0 * c2s * e2 + 1.0) ** 2
    return float(num / den)


def g2_antinormal_from_rho(rho: DensityMatrix) -> float:
    mean, m2 = fock_moments(rho)
    return _g2a(m2, mean)


def moments_from_wigner(grid: WignerGrid) -> tuple[float, float]:
    """Mean photon number and <a^dag^2 a^2> from symmetric-ordered symbols.

    Uses |a|^2 - 1/2 and |a|^4 - 2|a|^2 + 1/2 integrated against W.
    """
    covers = grid.x_min <= -4 and grid.x_max >= 4 and grid.p_min <= -4 and grid.p_max >= 4
    if not covers:
        raise DomainError("grid must cover |x|, |p| <= 4 for moment quadrature")
    if grid.nx < 101 or grid.n_p < 101:
        raise DomainError(f"grid needs >= 101 points per axis, got {grid.nx}x{grid.n_p}")
    mean = grid.integrate(lambda a: np.abs(a) ** 2 - 0.5)
    m2 = grid.integrate(lambda a: np.abs(a) ** 4 - 2.0 * np.abs(a) ** 2 + 0.5)
    return mean, m2


def g2_from_wigner(grid: WignerGrid) -> float:
    mean, m2 = moments_from_wigner(grid)
    return _g2(m2, mean)


def correlation_sweep(params: InitialStateParams, kappa_t_samples=DEFAULT_SWEEP) -> list[CorrelationSample]:
    samples = []
    for t in kappa_t_samples:
        t = float(t)
        mean = mean_photon_closed(params, t)
        m2 = second_factorial_moment_closed(params, t)
        try:
            g2 = g2_closed(params, t)
        except VacuumUndefinedError:
            g2 = float("nan")
        samples.append(CorrelationSample(t, g2, g2_antinormal_closed(params, t), mean, m2))
    return samples
