"""Cat and binomial code words, sweet-spot solving, Knill-Laflamme checking.

Cat words are built from their exact mod-4 Fock series rather than by summing
displaced Gaussians, which keeps the support pattern exact and the cutoff
controllable:

    |0_c> ~ sum_n  alpha^{4n}  /sqrt((4n)!)   |4n>      parity +1
    |1_c> ~ sum_n  alpha^{4n+2}/sqrt((4n+2)!) |4n+2>    parity +1
    |0_e> ~ sum_n  alpha^{4n+1}/sqrt((4n+1)!) |4n+1>    parity -1
    |1_e> ~ sum_n  alpha^{4n+3}/sqrt((4n+3)!) |4n+3>    parity -1
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .fockspace import CutoffRisk, HilbertConfig, Operator, StateVector, ladder, number_op


class CodeFamily(enum.Enum):
    CAT4 = "cat4"
    BINOMIAL = "binomial"


@dataclass(frozen=True)
class CodeWordSet:
    zero_c: StateVector
    one_c: StateVector
    zero_e: StateVector | None
    one_e: StateVector | None
    alpha: float
    family: CodeFamily

    def words(self):
        out = [self.zero_c, self.one_c]
        if self.zero_e is not None:
            out += [self.zero_e, self.one_e]
        return out


def sweet_spot(j: int) -> float:
    """j-th positive root alpha^2 of tan(x) = -tanh(x), by bracketed bisection.

    Each root is pinned between consecutive poles of tan at (j-1/2)pi and
    (j+1/2)pi, where g(x) = tan(x) + tanh(x) runs from -inf to +inf.
    """
    if j < 1:
        raise ValueError("root index must be >= 1")
    lo = (j - 0.5) * np.pi + 1e-12
    hi = (j + 0.5) * np.pi - 1e-12

    def g(x):
        return np.tan(x) + np.tanh(x)

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _mod4_series(config: HilbertConfig, alpha: float, residue: int) -> np.ndarray:
    """Unnormalized Fock amplitudes alpha^n/sqrt(n!) restricted to n = residue mod 4."""
    n = np.arange(residue, config.dim, 4)
    amps = np.zeros(config.dim)
    amps[n] = np.exp(n * np.log(alpha) - 0.5 * gammaln(n + 1.0))
    return amps


def cat_norm_factor(alpha: float, residue: int) -> float:
    """Normalization N_m of the four-component coherent superpositions.

    N_0, N_2 = 8 e^{-a^2}[cosh a^2 +/- cos a^2];
    N_1, N_3 = 8 e^{-a^2}[sinh a^2 +/- sin a^2].
    """
    a2 = alpha * alpha
    if residue == 0:
        return 8 * np.exp(-a2) * (np.cosh(a2) + np.cos(a2))
    if residue == 2:
        return 8 * np.exp(-a2) * (np.cosh(a2) - np.cos(a2))
    if residue == 1:
        return 8 * np.exp(-a2) * (np.sinh(a2) + np.sin(a2))
    if residue == 3:
        return 8 * np.exp(-a2) * (np.sinh(a2) - np.sin(a2))
    raise ValueError("residue must be in 0..3")


def cat_words(config: HilbertConfig, alpha: float) -> CodeWordSet:
    """Four-legged cat code words and the single-loss error words.

    Code words live on n = 0, 2 (mod 4); error words on n = 1, 3 (mod 4).
    The error-word labels follow the loss cycle: a|0_c> lands on the 4n+3
    ladder (proportional to |1_e>) and a|1_c> on 4n+1 (|0_e>).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if alpha**2 + 6 * alpha >= config.dim:
        warnings.warn(
            f"cat amplitude alpha={alpha:.3f} too close to cutoff dim={config.dim}",
            CutoffRisk,
            stacklevel=2,
        )
    vecs = {}
    for residue in range(4):
        raw = _mod4_series(config, alpha, residue)
        vecs[residue] = StateVector(raw / np.linalg.norm(raw), config)
    return CodeWordSet(
        zero_c=vecs[0],
        one_c=vecs[2],
        zero_e=vecs[1],
        one_e=vecs[3],
        alpha=alpha,
        family=CodeFamily.CAT4,
    )


def binomial_words(config: HilbertConfig) -> CodeWordSet:
    """|0_b> = (|0> + sqrt(3)|4>)/2,  |1_b> = (sqrt(3)|2> + |6>)/2."""
    if config.dim < 7:
        raise ValueError("binomial words need dim >= 7")
    zero = np.zeros(config.dim, dtype=complex)
    one = np.zeros(config.dim, dtype=complex)
    zero[0], zero[4] = 0.5, np.sqrt(3) / 2
    one[2], one[6] = np.sqrt(3) / 2, 0.5
    return CodeWordSet(
        zero_c=StateVector(zero, config),
        one_c=StateVector(one, config),
        zero_e=None,
        one_e=None,
        alpha=0.0,
        family=CodeFamily.BINOMIAL,
    )


@dataclass(frozen=True)
class KLReport:
    """Knill-Laflamme residuals for every error pair (eps_i† eps_j)."""

    diagonal: np.ndarray  # |<0|E|0> - <1|E|1>| per pair
    off_diagonal: np.ndarray  # |<0|E|1>| per pair
    max_residual: float


def kl_matrix(words: CodeWordSet, errors: list[Operator]) -> KLReport:
    """Check <0|E|0> = <1|E|1> and <0|E|1> = 0 for E = eps_i† eps_j."""
    if not errors:
        raise ValueError("error set must include at least the identity")
    z = words.zero_c.amplitudes
    o = words.one_c.amplitudes
    diag, off = [], []
    for ei in errors:
        for ej in errors:
            e = ei.entries.conj().T @ ej.entries
            diag.append(abs(np.vdot(z, e @ z) - np.vdot(o, e @ o)))
            off.append(abs(np.vdot(z, e @ o)))
    diag = np.array(diag)
    off = np.array(off)
    return KLReport(diag, off, float(max(diag.max(), off.max())))


def loss_cycle_overlaps(config: HilbertConfig, alpha: float, start="zero_c") -> list[float]:
    """Overlap moduli of normalized a^k-images of a cat word, k = 1..4.

    Repeated single-photon losses circulate the words:
    |0_c> -> |1_e> -> |1_c> -> |0_e> -> |0_c> (and the 1_c cycle shifted by two).
    """
    words = cat_words(config, alpha)
    cycle_from = {
        "zero_c": [words.one_e, words.one_c, words.zero_e, words.zero_c],
        "one_c": [words.zero_e, words.zero_c, words.one_e, words.one_c],
    }
    a = ladder(config).entries
    psi = getattr(words, start).amplitudes.copy()
    out = []
    for target in cycle_from[start]:
        psi = a @ psi
        psi = psi / np.linalg.norm(psi)
        out.append(abs(np.vdot(target.amplitudes, psi)))
    return out


def mean_photon(words: CodeWordSet, config: HilbertConfig):
    n = number_op(config).entries
    z, o = words.zero_c.amplitudes, words.one_c.amplitudes
    return (
        float(np.real(np.vdot(z, n @ z))),
        float(np.real(np.vdot(o, n @ o))),
    )
