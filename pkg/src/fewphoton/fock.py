"""Truncated Fock-space states, operators and associated Laguerre polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import DomainError

DEFAULT_DIM = 8
MIN_DIM = 3


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over the Fock basis |0>, ..., |dim-1>."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size < MIN_DIM:
            raise DomainError(f"dimension must be >= {MIN_DIM}, got {amps.size}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > 1e-12:
            raise DomainError(f"state is not normalized (norm^2 = {norm2!r})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def fidelity(self, other: StateVector) -> float:
        """|<self|other>|^2; insensitive to global phase."""
        n = min(self.dim, other.dim)
        overlap = np.vdot(self.amplitudes[:n], other.amplitudes[:n])
        return float(abs(overlap) ** 2)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix over the Fock basis."""

    elements: np.ndarray
    check: bool = True

    def __post_init__(self):
        rho = _frozen(self.elements)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DomainError(f"density matrix must be square, got shape {rho.shape}")
        if self.check:
            herm = np.max(np.abs(rho - rho.conj().T))
            if herm > 1e-12:
                raise DomainError(f"density matrix is not Hermitian (deviation {herm:.3g})")
            tr = np.trace(rho).real
            if abs(tr - 1.0) > 1e-10:
                raise DomainError(f"density matrix trace is {tr!r}, expected 1")
            lowest = np.linalg.eigvalsh(rho)[0]
            if lowest < -1e-10:
                raise DomainError(f"density matrix has negative eigenvalue {lowest:.3g}")
        object.__setattr__(self, "elements", rho)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def diagonal(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()

    def fidelity_pure(self, psi: StateVector) -> float:
        """<psi|rho|psi> for a pure reference state."""
        n = min(self.dim, psi.dim)
        v = psi.amplitudes[:n]
        return float(np.vdot(v, self.elements[:n, :n] @ v).real)


@dataclass(frozen=True)
class LadderOperator:
    matrix: np.ndarray
    kind: str


def lowering(dim: int = DEFAULT_DIM) -> np.ndarray:
    """Annihilation operator a with a[n-1, n] = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def raising(dim: int = DEFAULT_DIM) -> np.ndarray:
    return lowering(dim).conj().T


def number(dim: int = DEFAULT_DIM) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def ladder_operator(kind: str, dim: int = DEFAULT_DIM) -> LadderOperator:
    builders = {"lowering": lowering, "raising": raising, "number": number}
    try:
        matrix = builders[kind](dim)
    except KeyError:
        raise ValueError(f"unknown ladder operator kind {kind!r}") from None
    matrix.setflags(write=False)
    return LadderOperator(matrix=matrix, kind=kind)


def fock_state(n: int, dim: int = DEFAULT_DIM) -> StateVector:
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return StateVector(amps)


def make_superposition(c0: complex, c1: complex, c2: complex, dim: int = DEFAULT_DIM) -> StateVector:
    """Normalized c0|0> + c1|1> + c2|2> in a ``dim``-dimensional Fock space.

    Normalization is always applied, so amplitudes may be passed unnormalized.
    """
    if dim < MIN_DIM:
        raise DomainError(f"dimension must be >= {MIN_DIM}, got {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[:3] = (c0, c1, c2)
    norm = np.sqrt(np.vdot(amps, amps).real)
    if norm == 0.0:
        raise DomainError("cannot normalize the zero vector")
    return StateVector(amps / norm)


def density_from_state(psi: StateVector) -> DensityMatrix:
    return DensityMatrix(np.outer(psi.amplitudes, psi.amplitudes.conj()))


def expectation(rho: DensityMatrix, op: np.ndarray) -> complex:
    """tr(op @ rho)."""
    op = np.asarray(op)
    if op.shape != rho.elements.shape:
        raise DomainError(f"operator shape {op.shape} does not match density matrix {rho.elements.shape}")
    return complex(np.einsum("ij,ji->", op, rho.elements))


def laguerre_coefficients(n: int, J: int) -> list[float]:
    """Power-series coefficients of L_n^J(x), lowest order first.

    Factorial ratios are formed in exact integer arithmetic before the
    conversion to float.
    """
    if n < 0 or J < 0:
        raise DomainError("laguerre_assoc needs nonnegative n and J")
    top = factorial(n + J)
    coeffs = []
    for k in range(n + 1):
        num = top
        den = factorial(n - k) * factorial(J + k) * factorial(k)
        coeffs.append((-1) ** k * num / den)
    return coeffs


def laguerre_assoc(n: int, J: int, x):
    """Associated Laguerre polynomial L_n^J(x) as an explicit finite sum.

    Works elementwise on numpy arrays.
    """
    coeffs = laguerre_coefficients(n, J)
    x = np.asarray(x, dtype=float)
    # Horner, highest order first
    out = np.full_like(x, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        out = out * x + c
    return out if out.ndim else float(out)
