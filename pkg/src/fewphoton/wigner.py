"""Wigner function evaluation by three independent routes, plus negativity metrics.

Normalization convention throughout: the integral of W over d^2(alpha) is 1,
so the vacuum has W(0) = 2/pi. Phase-space points are alpha = x + i p.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import factorial, sqrt
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError
from .fock import DEFAULT_DIM, DensityMatrix, StateVector, laguerre_assoc, laguerre_coefficients, make_superposition

TWO_OVER_PI = 2.0 / np.pi


@dataclass(frozen=True)
class PhasePoint:
    alpha: complex

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not np.isfinite(alpha):
            raise DomainError(f"phase-space point must be finite, got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_xp(cls, x: float, p: float) -> PhasePoint:
        return cls(complex(x, p))

    @classmethod
    def from_polar(cls, modulus: float, theta: float) -> PhasePoint:
        return cls(modulus * np.exp(1j * theta))

    @property
    def x(self) -> float:
        return self.alpha.real

    @property
    def p(self) -> float:
        return self.alpha.imag

    @property
    def modulus(self) -> float:
        return abs(self.alpha)

    @property
    def theta(self) -> float:
        return float(np.angle(self.alpha))

    def __complex__(self):
        return self.alpha


Point = Union[PhasePoint, complex, np.ndarray]


def _alpha(point: Point):
    if isinstance(point, PhasePoint):
        return point.alpha
    return np.asarray(point, dtype=complex)


def _scalarize(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class InitialStateParams:
    """Moduli and phases of |C0|e^{i phi}|0> + |C1||1> + |C2|e^{i varphi}|2>."""

    mod_c0: float
    mod_c1: float
    mod_c2: float
    phi: float = 0.0
    varphi: float = 0.0

    def __post_init__(self):
        mods = (self.mod_c0, self.mod_c1, self.mod_c2)
        if min(mods) < 0:
            raise DomainError("amplitude moduli must be nonnegative")
        total = sum(m * m for m in mods)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"squared moduli sum to {total!r}, expected 1")

    @classmethod
    def from_moduli(cls, mod_c1: float, mod_c2: float, phi: float = 0.0, varphi: float = 0.0) -> InitialStateParams:
        """Fill in |C0| from normalization."""
        rest = 1.0 - mod_c1 ** 2 - mod_c2 ** 2
        if rest < -1e-12:
            raise DomainError(f"|C1|^2 + |C2|^2 exceeds 1 by {-rest:.3g}")
        return cls(sqrt(max(rest, 0.0)), mod_c1, mod_c2, phi, varphi)

    @classmethod
    def from_state(cls, psi: StateVector) -> InitialStateParams:
        """Extract moduli and phases, fixing the global phase so that C1 is real.

        Raises if the state has weight above n = 2.
        """
        c = psi.amplitudes
        if np.sum(np.abs(c[3:]) ** 2) > 1e-12:
            raise DomainError("state has support above n = 2")
        ref = np.angle(c[1]) if abs(c[1]) > 0 else 0.0
        c0, c1, c2 = c[:3] * np.exp(-1j * ref)
        return cls(abs(c0), abs(c1), abs(c2), float(np.angle(c0)), float(np.angle(c2)))

    def amplitudes(self) -> tuple[complex, complex, complex]:
        return (
            self.mod_c0 * np.exp(1j * self.phi),
            complex(self.mod_c1),
            self.mod_c2 * np.exp(1j * self.varphi),
        )

    def state(self, dim: int = DEFAULT_DIM) -> StateVector:
        return make_superposition(*self.amplitudes(), dim=dim)


# ---------------------------------------------------------------------------
# Route 1: Fock-basis sum


def wigner_kernel(m: int, n: int, alpha):
    """Wigner function of the operator |n><m|, i.e. W = sum_{m,n} rho[n, m] * kernel(m, n).

    For n >= m this is (2/pi)(-1)^m sqrt(m!/n!) (2 alpha*)^(n-m) e^{-2|alpha|^2}
    L_m^(n-m)(4|alpha|^2); n < m follows from Hermitian symmetry.
    """
    if n < m:
        return np.conj(wigner_kernel(n, m, alpha))
    r2 = np.abs(alpha) ** 2
    pref = TWO_OVER_PI * (-1) ** m * sqrt(factorial(m) / factorial(n))
    return pref * (2.0 * np.conj(alpha)) ** (n - m) * np.exp(-2.0 * r2) * laguerre_assoc(m, n - m, 4.0 * r2)


def wigner_from_rho(rho: DensityMatrix, point: Point):
    alpha = _alpha(point)
    elems = rho.elements
    total = np.zeros(np.shape(alpha), dtype=complex)
    for m in range(rho.dim):
        for n in range(rho.dim):
            if elems[n, m] != 0:
                total = total + elems[n, m] * wigner_kernel(m, n, alpha)
    residue = np.max(np.abs(total.imag), initial=0.0)
    if residue > 1e-10:
        raise ArithmeticError(f"Wigner sum has imaginary residue {residue:.3g}")
    return _scalarize(total.real)


# ---------------------------------------------------------------------------
# Route 2: closed forms for states on n <= 2


def wigner_initial_closed(params: InitialStateParams, point: Point):
    alpha = _alpha(point)
    r = np.abs(alpha)
    theta = np.angle(alpha)
    x = 4.0 * r ** 2
    g = np.exp(-2.0 * r ** 2)
    c0, c1, c2 = params.mod_c0, params.mod_c1, params.mod_c2
    phi, varphi = params.phi, params.varphi

    w = TWO_OVER_PI * (c0 ** 2 - c1 ** 2 * laguerre_assoc(1, 0, x) + c2 ** 2 * laguerre_assoc(2, 0, x)) * g
    w = w + 8.0 * sqrt(2.0) / np.pi * g * c0 * c2 * r ** 2 * np.cos(2.0 * theta - varphi + phi)
    w = w - 4.0 * sqrt(2.0) / np.pi * g * c1 * c2 * r * np.cos(theta - varphi) * laguerre_assoc(1, 1, x)
    w = w + 8.0 / np.pi * g * c0 * c1 * r * np.cos(theta + phi)
    return _scalarize(w)


def _scaled_laguerre(n: int, s, u):
    """s^n L_n^0(-u/s), expanded so that s = 0 is regular."""
    coeffs = laguerre_coefficients(n, 0)
    return sum(c * (-1) ** k * u ** k * s ** (n - k) for k, c in enumerate(coeffs))


def wigner_evolved_closed(params: InitialStateParams, kappa_t: float, point: Point):
    """Closed-form Wigner function after loss for time ``kappa_t``.

    Diagonal part: |C0|^2 + |C1|^2 s L_1(-u/s) + |C2|^2 s^2 L_2(-u/s) with
    s = 1 - 2e^{-2kt} and u = |2 alpha e^{-kt}|^2, all times (2/pi)e^{-2|alpha|^2}.
    """
    if kappa_t < 0:
        raise DomainError(f"kappa_t must be nonnegative, got {kappa_t}")
    alpha = _alpha(point)
    r = np.abs(alpha)
    theta = np.angle(alpha)
    g = np.exp(-2.0 * r ** 2)
    eta = np.exp(-2.0 * kappa_t)
    s = 1.0 - 2.0 * eta
    u = 4.0 * r ** 2 * eta
    c0, c1, c2 = params.mod_c0, params.mod_c1, params.mod_c2
    phi, varphi = params.phi, params.varphi

    w = TWO_OVER_PI * g * (c0 ** 2 + c1 ** 2 * _scaled_laguerre(1, s, u) + c2 ** 2 * _scaled_laguerre(2, s, u))
    w = w + 8.0 * sqrt(2.0) / np.pi * c0 * c2 * g * eta * r ** 2 * np.cos(2.0 * theta - varphi + phi)
    w = w + 8.0 / np.pi * c0 * c1 * g * np.sqrt(eta) * r * np.cos(theta + phi)
    w = w + (
        8.0 * sqrt(2.0) / np.pi * c1 * c2 * g * np.sqrt(eta) * r * np.cos(theta - varphi)
        * (2.0 * (r ** 2 - 1.0) * eta + 1.0)
    )
    return _scalarize(w)


def closed_form(params: InitialStateParams, kappa_t: float = 0.0) -> Callable:
    """Vectorized evaluator alpha -> W for use with :func:`wigner_grid`."""
    if kappa_t == 0:
        return lambda alpha: wigner_initial_closed(params, alpha)
    return lambda alpha: wigner_evolved_closed(params, kappa_t, alpha)


def rho_form(rho: DensityMatrix) -> Callable:
    return lambda alpha: wigner_from_rho(rho, alpha)


# ---------------------------------------------------------------------------
# Route 3: Gaussian convolution of the initial Wigner function

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def wigner_convolution(
    initial: Callable,
    kappa_t: float,
    point: Point,
    order: int = 80,
    half_width: float = 5.0,
    chunk: int = 256,
):
    """Propagate an initial Wigner function through the loss channel by quadrature.

    W(a, t) = 2/(1-e^{-2kt}) int d^2a0/pi exp[-2|a - a0 e^{-kt}|^2/(1-e^{-2kt})] W(a0, 0)

    Tensor Gauss-Legendre of ``order`` nodes per axis over the square
    |Re a0|, |Im a0| <= ``half_width``, cut down per target point to 12
    kernel widths around the kernel center when the kernel is narrower.
    ``initial`` must accept complex numpy arrays.
    """
    if kappa_t < 0:
        raise DomainError(f"kappa_t must be nonnegative, got {kappa_t}")
    alpha = _alpha(point)
    if kappa_t == 0:
        return _scalarize(initial(alpha))

    eta = np.exp(-2.0 * kappa_t)
    decay = np.exp(-kappa_t)
    spread = 1.0 - eta
    sigma = np.sqrt(spread / (4.0 * eta))
    nodes, weights = _gauss_legendre(order)

    flat = np.ravel(alpha)
    out = np.empty(flat.shape, dtype=float)
    for start in range(0, flat.size, chunk):
        a = flat[start:start + chunk]
        center = a / decay
        lo_x = np.maximum(-half_width, center.real - 12 * sigma)
        hi_x = np.minimum(half_width, center.real + 12 * sigma)
        lo_p = np.maximum(-half_width, center.imag - 12 * sigma)
        hi_p = np.minimum(half_width, center.imag + 12 * sigma)
        empty = (hi_x <= lo_x) | (hi_p <= lo_p)
        hx = np.where(empty, 0.0, 0.5 * (hi_x - lo_x))
        hp = np.where(empty, 0.0, 0.5 * (hi_p - lo_p))
        xs = 0.5 * (hi_x + lo_x)[:, None] + hx[:, None] * nodes[None, :]
        ps = 0.5 * (hi_p + lo_p)[:, None] + hp[:, None] * nodes[None, :]
        a0 = xs[:, :, None] + 1j * ps[:, None, :]
        w0 = np.asarray(initial(a0), dtype=float)
        kernel = np.exp(-2.0 * np.abs(a[:, None, None] - a0 * decay) ** 2 / spread)
        integrand = kernel * w0
        inner = np.einsum("nij,i,j->n", integrand, weights, weights)
        out[start:start + chunk] = (2.0 / spread) / np.pi * hx * hp * inner
    return _scalarize(out.reshape(np.shape(alpha)))


# ---------------------------------------------------------------------------
# Grids and negativity


@dataclass(frozen=True)
class WignerGrid:
    """W sampled on a rectangular lattice; values[i, j] = W(xs[i] + i ps[j])."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or min(values.shape) < 2:
            raise DomainError(f"grid values must be a 2-D array with >= 2 points per axis, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("grid contains non-finite values")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise DomainError("grid bounds must satisfy min < max")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def n_p(self) -> int:
        return self.values.shape[1]

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def alphas(self) -> np.ndarray:
        return self.xs[:, None] + 1j * self.ps[None, :]

    def integrate(self, weight=None) -> float:
        """Trapezoid quadrature of weight(alpha) * W over the grid (d^2 alpha = dx dp)."""
        f = self.values if weight is None else self.values * weight(self.alphas)
        return float(trapezoid(trapezoid(f, self.ps, axis=1), self.xs))


def lattice(x_min: float, x_max: float, p_min: float, p_max: float, nx: int, n_p: int) -> np.ndarray:
    if nx < 2 or n_p < 2:
        raise DomainError("a grid needs at least 2 points per axis")
    if not (x_max > x_min and p_max > p_min):
        raise DomainError("grid bounds must satisfy min < max")
    xs = np.linspace(x_min, x_max, nx)
    ps = np.linspace(p_min, p_max, n_p)
    return xs[:, None] + 1j * ps[None, :]


def wigner_grid(
    source,
    x_min: float = -3.0,
    x_max: float = 3.0,
    p_min: float = -3.0,
    p_max: float = 3.0,
    nx: int = 101,
    n_p: int = 101,
    workers: int = 1,
) -> WignerGrid:
    """Sample ``source`` (a DensityMatrix or a vectorized alpha -> W callable) on a lattice.

    With ``workers`` > 1 the rows are split across a thread pool.
    """
    alphas = lattice(x_min, x_max, p_min, p_max, nx, n_p)
    func = rho_form(source) if isinstance(source, DensityMatrix) else source
    if workers > 1:
        rows = np.array_split(np.arange(nx), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda idx: np.asarray(func(alphas[idx])), rows))
        values = np.concatenate(parts, axis=0)
    else:
        values = np.asarray(func(alphas))
    return WignerGrid(x_min, x_max, p_min, p_max, values)


class NegativityMetrics(NamedTuple):
    min_value: float
    min_location: PhasePoint
    negative_volume: float


def negativity_metrics(grid: WignerGrid) -> NegativityMetrics:
    i, j = np.unravel_index(np.argmin(grid.values), grid.values.shape)
    neg = np.maximum(-grid.values, 0.0)
    volume = float(trapezoid(trapezoid(neg, grid.ps, axis=1), grid.xs))
    return NegativityMetrics(
        float(grid.values[i, j]),
        PhasePoint.from_xp(grid.xs[i], grid.ps[j]),
        volume,
    )


def parity_value(rho: DensityMatrix) -> float:
    """W(0) = (2/pi) sum_n (-1)^n rho_nn."""
    signs = (-1.0) ** np.arange(rho.dim)
    return TWO_OVER_PI * float(signs @ rho.diagonal())


__all__ = [
    "InitialStateParams",
    "NegativityMetrics",
    "PhasePoint",
    "WignerGrid",
    "closed_form",
    "lattice",
    "negativity_metrics",
    "parity_value",
    "rho_form",
    "wigner_convolution",
    "wigner_evolved_closed",
    "wigner_from_rho",
    "wigner_grid",
    "wigner_initial_closed",
    "wigner_kernel",
]
