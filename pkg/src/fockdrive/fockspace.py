"""Truncated-Fock-space linear algebra: states, operators, elementary unitaries.

Conventions used throughout the package: the commutator scale is
[x, p] = i*lam with a dimensionless Planck constant lam (default 0.25),
a = (x + i p)/sqrt(2 lam), and the Schrodinger equation reads
i*lam d|psi>/dt = H|psi>, so propagators are exp(-i H t / lam).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


class CutoffRisk(UserWarning):
    """Emitted when an operation is likely to push support into the truncation edge."""


GUARD_BAND = 10  # unitarity/identity checks exclude the top GUARD_BAND levels


@dataclass(frozen=True)
class HilbertConfig:
    """Truncated oscillator space with Fock basis |0> .. |dim-1>.

    lam is the dimensionless Planck constant: [x, p] = i*lam.
    """

    dim: int = 60
    lam: float = 0.25

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.lam <= 0:
            raise ValueError("lam must be positive")

    @property
    def guard(self) -> int:
        """Size of the low-Fock block unaffected by cutoff artifacts."""
        return max(self.dim - GUARD_BAND, 2)


@dataclass(frozen=True)
class Operator:
    entries: np.ndarray
    config: HilbertConfig

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.config.dim, self.config.dim):
            raise ValueError(f"operator shape {m.shape} != dim {self.config.dim}")
        object.__setattr__(self, "entries", m)

    def dag(self) -> "Operator":
        return Operator(self.entries.conj().T, self.config)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.entries @ other.entries, self.config)
        return self.entries @ np.asarray(other)

    def hermiticity_defect(self) -> float:
        return float(np.linalg.norm(self.entries - self.entries.conj().T))

    def unitarity_defect(self) -> float:
        """Frobenius defect of U†U − I on the guarded low-Fock block."""
        g = self.config.guard
        prod = self.entries.conj().T @ self.entries
        return float(np.linalg.norm(prod[:g, :g] - np.eye(g)))


@dataclass
class StateVector:
    amplitudes: np.ndarray
    config: HilbertConfig

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.shape != (self.config.dim,):
            raise ValueError("state length mismatch")
        self.amplitudes = v

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize zero vector")
        return StateVector(self.amplitudes / n, self.config)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.config)


@dataclass
class DensityMatrix:
    amplitudes: np.ndarray
    config: HilbertConfig

    def __post_init__(self):
        m = np.asarray(self.amplitudes, dtype=complex)
        if m.shape != (self.config.dim, self.config.dim):
            raise ValueError("density-matrix shape mismatch")
        self.amplitudes = m

    def trace(self) -> float:
        return float(np.real(np.trace(self.amplitudes)))

    def validate(self, trace_tol=1e-9, herm_tol=1e-9, eig_floor=-1e-9):
        m = self.amplitudes
        if np.linalg.norm(m - m.conj().T) > herm_tol:
            raise ValueError("density matrix not Hermitian")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"trace deviates from 1 by {self.trace() - 1.0:.3e}")
        w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if w.min() < eig_floor:
            raise ValueError(f"negative eigenvalue {w.min():.3e}")
        return self


# ----------------------------------------------------------------------------
# elementary operators


def ladder(config: HilbertConfig) -> Operator:
    """Annihilation operator a with <n-1|a|n> = sqrt(n)."""
    return Operator(np.diag(np.sqrt(np.arange(1, config.dim, dtype=float)), 1), config)


def number_op(config: HilbertConfig) -> Operator:
    return Operator(np.diag(np.arange(config.dim, dtype=float)).astype(complex), config)


def position(config: HilbertConfig) -> Operator:
    a = ladder(config).entries
    return Operator(np.sqrt(config.lam / 2.0) * (a + a.conj().T), config)


def momentum(config: HilbertConfig) -> Operator:
    a = ladder(config).entries
    return Operator(-1j * np.sqrt(config.lam / 2.0) * (a - a.conj().T), config)


def expm_hermitian(h: np.ndarray, scale: complex = 1j) -> np.ndarray:
    """exp(scale * h) for Hermitian h via eigendecomposition (exact and stable)."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def plane_wave(config: HilbertConfig, kx: float, kp: float) -> Operator:
    """exp(i (kx*x + kp*p)) by exact exponentiation of the Hermitian generator."""
    gen = kx * position(config).entries + kp * momentum(config).entries
    return Operator(expm_hermitian(gen), config)


def rotation(config: HilbertConfig, theta: float) -> Operator:
    """Phase rotation R(theta) = exp(-i theta n), diagonal in the Fock basis."""
    n = np.arange(config.dim)
    return Operator(np.diag(np.exp(-1j * theta * n)), config)


def parity(config: HilbertConfig) -> Operator:
    """Photon-number parity exp(i pi n) = diag((-1)^n)."""
    return Operator(np.diag((-1.0 + 0j) ** np.arange(config.dim)), config)


def squeeze(config: HilbertConfig, z: float) -> Operator:
    """Squeezing operator S(z) = exp((z* a^2 - z a†^2)/2); S†(z) x S(z) = e^{-z} x.

    Warns when the squeezed support of low-lying states approaches the cutoff.
    """
    if np.exp(abs(z)) * np.sqrt(max(config.guard, 1)) > config.dim:
        warnings.warn(
            f"squeeze z={z:.3f} may push support past the cutoff dim={config.dim}",
            CutoffRisk,
            stacklevel=2,
        )
    a = ladder(config).entries
    gen = 0.5 * (np.conj(z) * (a @ a) - z * (a.conj().T @ a.conj().T))
    # gen is anti-Hermitian for real z: exponentiate i*(-i*gen) with Hermitian -i*gen
    h = -1j * gen
    return Operator(expm_hermitian(h, scale=1j), config)


def displacement(config: HilbertConfig, xi: complex) -> Operator:
    """Displacement D(xi) = exp(xi a† - xi* a)."""
    a = ladder(config).entries
    h = -1j * (xi * a.conj().T - np.conj(xi) * a)  # Hermitian
    return Operator(expm_hermitian(h, scale=1j), config)


# ----------------------------------------------------------------------------
# states


def fock_state(config: HilbertConfig, n: int) -> StateVector:
    if not 0 <= n < config.dim:
        raise ValueError("Fock index outside truncated space")
    v = np.zeros(config.dim, dtype=complex)
    v[n] = 1.0
    return StateVector(v, config)


def coherent_state(config: HilbertConfig, alpha: complex) -> StateVector:
    """|alpha> with amplitudes e^{-|a|^2/2} alpha^n / sqrt(n!), log-domain stable."""
    n = np.arange(config.dim)
    if alpha == 0:
        return fock_state(config, 0)
    log_mod = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * _log_factorial(n)
    phase = np.exp(1j * n * np.angle(alpha))
    if abs(alpha) ** 2 > config.dim - GUARD_BAND:
        warnings.warn("coherent amplitude close to cutoff", CutoffRisk, stacklevel=2)
    return StateVector(np.exp(log_mod) * phase, config)


def _log_factorial(n):
    from scipy.special import gammaln

    return gammaln(np.asarray(n, dtype=float) + 1.0)
