"""Simulated cavity-QED preparation and Ramsey-parity measurement.

Preparation: atoms cross the cavity one at a time (resonant Jaynes-Cummings
exchange), then a classical microwave pulse, and are finally detected.
Measurement: displaced-parity readout via two Ramsey phases.

Joint amplitudes are stored with shape (dim, 2, ..., 2): the cavity Fock index
first, then one axis per atom with level index 0 = e, 1 = g.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .errors import PostSelectionError
from .fock import DEFAULT_DIM, DensityMatrix, StateVector, lowering, make_superposition
from .wigner import PhasePoint, _alpha

E, G = 0, 1
MODELS = ("paper", "exact")

# Cavity state produced by the reference two-atom parameter set.
TARGET_AMPLITUDES = (np.sqrt(6) / 6, np.sqrt(6) / 3, np.sqrt(6) / 6)


@dataclass(frozen=True)
class AtomCavityState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim not in (2, 3) or any(s != 2 for s in amps.shape[1:]):
            raise ValueError(f"expected shape (dim, 2) or (dim, 2, 2), got {amps.shape}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"joint state is not normalized (norm^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_atoms(self) -> int:
        return self.amplitudes.ndim - 1

    @classmethod
    def product(cls, cavity_n: int = 0, levels=(E,), dim: int = DEFAULT_DIM) -> AtomCavityState:
        """|cavity_n> (x) |levels[0]> (x) ..."""
        amps = np.zeros((dim,) + (2,) * len(levels), dtype=complex)
        amps[(cavity_n,) + tuple(levels)] = 1.0
        return cls(amps)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


@dataclass(frozen=True)
class PrepParams:
    gt1: float = np.pi / 4
    gt2: float = np.pi / 4
    theta1: float = 7 * np.pi / 2
    theta2: float = np.pi / 2
    phi1: float = np.pi
    phi2: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(v) for v in self.as_tuple()):
            raise ValueError("preparation parameters must be finite")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.gt1, self.gt2, self.theta1, self.theta2, self.phi1, self.phi2)


class Preparation(NamedTuple):
    cavity: StateVector
    success_probability: float


@dataclass(frozen=True)
class MeasurementRecord:
    alpha: PhasePoint
    p_e_phase0: float
    p_e_phase_pi: float
    shots: int
    w_estimate: float


def _jc(state: AtomCavityState, gt: float, atom: int, exact: bool) -> AtomCavityState:
    amps = np.moveaxis(state.amplitudes, atom + 1, 1)
    out = amps.copy()
    dim = state.dim
    # pair |n, e> with |n+1, g>; |0, g> and |dim-1, e> have no partner in the truncated space
    n = np.arange(dim - 1)
    angle = gt * (np.sqrt(n + 1.0) if exact else np.ones(dim - 1))
    shape = (dim - 1,) + (1,) * (amps.ndim - 2)
    c = np.cos(angle).reshape(shape)
    s = np.sin(angle).reshape(shape)
    e_n = amps[:-1, E]
    g_n1 = amps[1:, G]
    out[:-1, E] = c * e_n - 1j * s * g_n1
    out[1:, G] = c * g_n1 - 1j * s * e_n
    return AtomCavityState(np.moveaxis(out, 1, atom + 1))


def jc_evolve_paper(state: AtomCavityState, gt: float, atom: int = 0) -> AtomCavityState:
    """Rotate every |n, e> <-> |n+1, g> pair by the same angle ``gt``.

    This reproduces the printed preparation amplitudes, which carry no
    sqrt(n+1) Rabi enhancement.
    """
    return _jc(state, gt, atom, exact=False)


def jc_evolve_exact(state: AtomCavityState, gt: float, atom: int = 0) -> AtomCavityState:
    """Resonant Jaynes-Cummings evolution: the |n, e> <-> |n+1, g> block rotates by sqrt(n+1) gt."""
    return _jc(state, gt, atom, exact=True)


def rotation_matrix(theta: float, phi: float) -> np.ndarray:
    """Microwave pulse in the (e, g) basis: columns are the images of |e> and |g>."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, 1j * np.exp(1j * phi) * s], [1j * np.exp(-1j * phi) * s, c]])


def microwave_rotation(state: AtomCavityState, atom_index: int, theta: float, phi: float) -> AtomCavityState:
    if not 0 <= atom_index < state.n_atoms:
        raise IndexError(f"atom index {atom_index} out of range for {state.n_atoms} atom(s)")
    u = rotation_matrix(theta, phi)
    amps = np.moveaxis(state.amplitudes, atom_index + 1, -1) @ u.T
    return AtomCavityState(np.moveaxis(amps, -1, atom_index + 1))


def _run_two_atoms(params: PrepParams, model: str, dim: int) -> AtomCavityState:
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    jc = jc_evolve_paper if model == "paper" else jc_evolve_exact
    state = AtomCavityState.product(0, (E, E), dim)
    state = jc(state, params.gt1, atom=0)
    state = microwave_rotation(state, 0, params.theta1, params.phi1)
    state = jc(state, params.gt2, atom=1)
    return microwave_rotation(state, 1, params.theta2, params.phi2)


def outcome_probabilities(params: PrepParams, model: str = "paper", dim: int = DEFAULT_DIM) -> dict[str, float]:
    """Detection probabilities of the four atomic outcomes, keyed 'ee', 'eg', 'ge', 'gg'."""
    amps = _run_two_atoms(params, model, dim).amplitudes
    weights = np.sum(np.abs(amps) ** 2, axis=0)
    return {f"{'eg'[i]}{'eg'[j]}": float(weights[i, j]) for i in (E, G) for j in (E, G)}


def two_atom_prepare(params: PrepParams, model: str = "paper", dim: int = DEFAULT_DIM) -> Preparation:
    """Run both atoms and post-select the cavity on detecting (e1, e2)."""
    amps = _run_two_atoms(params, model, dim).amplitudes
    cavity = amps[:, E, E]
    prob = float(np.vdot(cavity, cavity).real)
    if prob < 1e-15:
        raise PostSelectionError("these parameters never yield the (e, e) detection outcome")
    return Preparation(StateVector(cavity / np.sqrt(prob)), prob)


def prepared_amplitudes_closed(params: PrepParams) -> np.ndarray:
    """Unnormalized (e1, e2)-conditioned cavity amplitudes on |0>, |1>, |2>."""
    gt1, gt2, th1, th2, ph1, ph2 = params.as_tuple()
    c1, s1 = np.cos(gt1), np.sin(gt1)
    c2, s2 = np.cos(gt2), np.sin(gt2)
    ct1, st1 = np.cos(th1 / 2), np.sin(th1 / 2)
    ct2, st2 = np.cos(th2 / 2), np.sin(th2 / 2)
    return np.array([
        c1 * c2 * ct1 * ct2,
        np.exp(1j * ph1) * s1 * c2 * st1 * ct2 + np.exp(1j * ph2) * c1 * s2 * ct1 * st2,
        np.exp(1j * (ph1 + ph2)) * s1 * s2 * st1 * st2,
    ])


def postselection_norm_closed(params: PrepParams) -> float:
    """Normalization N of the post-selected state (the success probability)."""
    gt1, gt2, th1, th2, ph1, ph2 = params.as_tuple()
    c1, s1 = np.cos(gt1), np.sin(gt1)
    c2, s2 = np.cos(gt2), np.sin(gt2)
    ct1, st1 = np.cos(th1 / 2), np.sin(th1 / 2)
    ct2, st2 = np.cos(th2 / 2), np.sin(th2 / 2)
    return float(
        (c1 * c2 * ct1 * ct2) ** 2
        + (s1 * s2 * st1 * st2) ** 2
        + (s1 * c2 * st1 * ct2) ** 2
        + (c1 * s2 * ct1 * st2) ** 2
        + np.cos(ph1 - ph2) * np.sin(2 * gt1) * np.sin(2 * gt2) * np.sin(th1) * np.sin(th2) / 8
    )


def target_state(dim: int = DEFAULT_DIM) -> StateVector:
    return make_superposition(*TARGET_AMPLITUDES, dim=dim)


# ---------------------------------------------------------------------------
# Ramsey parity measurement


def probe_dim(alpha: complex, base: int = 16) -> int:
    """Working dimension for the displacement: at least ``base``, grown with |alpha|.

    The truncated matrix exponential converges to ~1e-13 for states on
    n <= 2 at this size (checked up to |alpha| = 4.5).
    """
    r = abs(alpha)
    return max(base, int(ceil(16 + 10 * r + 2 * r * r)))


def displacement(alpha: complex, dim: int) -> np.ndarray:
    """exp(alpha a^dag - alpha* a) on the truncated space."""
    a = lowering(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def displaced_parity(rho: DensityMatrix, alpha: complex) -> float:
    """<P> = tr[D(-alpha) rho D(alpha) P] with P = exp(i pi a^dag a)."""
    dim = probe_dim(alpha, max(16, rho.dim))
    big = np.zeros((dim, dim), dtype=complex)
    big[: rho.dim, : rho.dim] = rho.elements
    d = displacement(alpha, dim)
    shifted = d.conj().T @ big @ d
    parity = (-1.0) ** np.arange(dim)
    return float(np.real(parity @ shifted.diagonal()))


def ramsey_probe_probability(rho: DensityMatrix, alpha, ramsey_phase: float) -> float:
    """P_e(phase, alpha) = (1 + <P> cos(phase)) / 2."""
    p = 0.5 * (1.0 + displaced_parity(rho, complex(_alpha(alpha))) * np.cos(ramsey_phase))
    if p < -1e-9 or p > 1 + 1e-9:
        raise ArithmeticError(f"probe probability {p!r} left [0, 1]")
    return min(max(p, 0.0), 1.0)


def measured_wigner(rho: DensityMatrix, alpha, shots: int = 0, seed: int = 0) -> MeasurementRecord:
    """Estimate W(alpha) from two Ramsey experiments (phases 0 and pi).

    With ``shots`` = 0 the exact probabilities are used. Otherwise each phase
    gets an independent binomial sample from ``numpy.random.default_rng(seed)``.
    The estimate is returned in the unit-integral convention, i.e.
    2 (P_e(0) - P_e(pi)) / pi.
    """
    if shots < 0:
        raise ValueError("shots must be nonnegative")
    point = alpha if isinstance(alpha, PhasePoint) else PhasePoint(complex(alpha))
    parity = displaced_parity(rho, point.alpha)
    p0 = min(max(0.5 * (1.0 + parity), 0.0), 1.0)
    ppi = min(max(0.5 * (1.0 - parity), 0.0), 1.0)
    if shots:
        rng = np.random.default_rng(seed)
        p0 = rng.binomial(shots, p0) / shots
        ppi = rng.binomial(shots, ppi) / shots
    return MeasurementRecord(point, float(p0), float(ppi), int(shots), 2.0 * (p0 - ppi) / np.pi)


def measurement_sigma(p_e_phase0: float, p_e_phase_pi: float, shots: int) -> float:
    """Binomial standard error of the W estimate (unit-integral convention)."""
    var = (p_e_phase0 * (1 - p_e_phase0) + p_e_phase_pi * (1 - p_e_phase_pi)) / shots
    return 2.0 / np.pi * float(np.sqrt(var))


def negativity_criterion(rho: DensityMatrix, alpha) -> bool:
    """True iff P_e(0, alpha) < P_e(pi, alpha), i.e. W(alpha) < 0."""
    return ramsey_probe_probability(rho, alpha, 0.0) < ramsey_probe_probability(rho, alpha, np.pi)
