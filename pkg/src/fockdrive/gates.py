"""Quantum lattice gates and the one-period gate compiler.

The elementary brick is the phase-space lattice (PSL) gate
exp(i gamma cos(zeta x + sigma p + delta)); a drive chart compiles into rows
of commuting PSL gates (one row per time slice) whose ordered product is the
one-period Xi gate.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .fockspace import HilbertConfig, Operator, momentum, position, rotation, squeeze
from .ncft import DriveChart


class DegenerateDirection(ValueError):
    """(zeta, sigma) = (0, 0) picks no phase-space direction."""


@dataclass(frozen=True)
class GateParams:
    zeta: float
    sigma: float
    gamma: float
    delta: float

    def __post_init__(self):
        for name in ("zeta", "sigma", "gamma", "delta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.zeta == 0.0 and self.sigma == 0.0 and self.gamma != 0.0:
            raise DegenerateDirection(
                "zeta = sigma = 0 with nonzero gamma: constant generator"
            )


@dataclass(frozen=True)
class GateSequence:
    """Ordered gate list; application order is list order (first entry hits the
    state first)."""

    gates: tuple
    k_index: tuple
    t_index: tuple
    chart_id: str
    beta: float
    omega: float
    floquet_period: int = 0

    def __len__(self):
        return len(self.gates)


# ----------------------------------------------------------------------------
# elementary gates


def psl(config: HilbertConfig, params: GateParams) -> Operator:
    """exp(i gamma cos(zeta x + sigma p + delta)), exactly unitary.

    One eigendecomposition of the Hermitian direction operator, then a scalar
    function of its spectrum.
    """
    gen = params.zeta * position(config).entries + params.sigma * momentum(config).entries
    w, v = np.linalg.eigh(gen)
    phases = np.exp(1j * params.gamma * np.cos(w + params.delta))
    return Operator((v * phases) @ v.conj().T, config)


def xsl(config: HilbertConfig, rho: float, gamma: float, delta: float) -> Operator:
    """exp(i gamma cos(rho x + delta)) — the sigma = 0 case of psl."""
    return psl(config, GateParams(zeta=rho, sigma=0.0, gamma=gamma, delta=delta))


def psl_via_rotation(config: HilbertConfig, params: GateParams) -> Operator:
    """R(-theta) XSL(rho) R(theta) with rho = |(zeta, sigma)|, theta = atan2(sigma, zeta)."""
    if params.zeta == 0.0 and params.sigma == 0.0:
        raise DegenerateDirection("cannot orient a zero wave vector")
    rho = math.hypot(params.zeta, params.sigma)
    theta = math.atan2(params.sigma, params.zeta)
    x_gate = xsl(config, rho, params.gamma, params.delta)
    return rotation(config, -theta) @ x_gate @ rotation(config, theta)


def xsl_via_squeeze(config: HilbertConfig, rho: float, gamma: float, delta: float) -> Operator:
    """Squeeze-conjugated unit-wavenumber gate; equals xsl(rho, ...) away from
    the cutoff.

    Our squeeze convention has S(z)† x S(z) = e^{-z} x, so rescaling x -> rho x
    takes z = -ln rho. Any CutoffRisk from the squeeze propagates.
    """
    if rho <= 0.0:
        raise ValueError(f"rho must be positive, got {rho}")
    s = squeeze(config, -math.log(rho))
    return s.dag() @ xsl(config, 1.0, gamma, delta) @ s


# ----------------------------------------------------------------------------
# chart-driven gates


def grid_gate(chart: DriveChart, n: int, m: int, beta: float) -> GateParams:
    """Gate parameters at chart node (k_n, t_m) for drive strength beta."""
    if not 0 <= n <= chart.N:
        raise IndexError(f"n = {n} outside 0..{chart.N}")
    if not 0 <= m <= chart.M:
        raise IndexError(f"m = {m} outside 0..{chart.M}")
    k_n = n * chart.delta_k
    tau = 2.0 * np.pi * m / chart.M
    gamma = -(beta * chart.amplitude[n, m] * chart.delta_k * chart.delta_t) / chart.lam
    return GateParams(
        zeta=k_n * math.cos(tau),
        sigma=k_n * math.sin(tau),
        gamma=float(gamma),
        delta=float(chart.phase[n, m]),
    )


def tm_psl(config: HilbertConfig, chart: DriveChart, m: int, beta: float) -> Operator:
    """Row gate at time slice m: product over n = 0..N of the node gates.

    Within a row every generator is a function of the same rotated quadrature,
    so the product equals the exponential of the summed generator to rounding.
    Gates apply in ascending n (the n = 0 factor reaches the state first).
    """
    out = np.eye(config.dim, dtype=complex)
    for n in range(chart.N + 1):
        out = psl(config, grid_gate(chart, n, m, beta)).entries @ out
    return Operator(out, config)


def xi_gate(config: HilbertConfig, chart: DriveChart, beta: float, method: str = "fast") -> Operator:
    """One Floquet period: product of the M+1 row gates, ascending m.

    method="fast" closes each row analytically in the position eigenbasis
    (identical to the literal product to rounding); method="literal" multiplies
    the individual node gates.
    """
    if method == "literal":
        out = np.eye(config.dim, dtype=complex)
        for m in range(chart.M + 1):
            out = tm_psl(config, chart, m, beta).entries @ out
        return Operator(out, config)
    if method != "fast":
        raise ValueError(f"unknown method {method!r}")
    d, q = position_eigensystem(config)
    q_dag = q.conj().T
    levels = np.arange(config.dim)
    out = np.eye(config.dim, dtype=complex)
    for m in range(chart.M + 1):
        core = (q * np.exp(1j * _row_potential(chart, m, beta, d))) @ q_dag
        tau = 2.0 * np.pi * m / chart.M
        rot = np.exp(-1j * tau * levels)
        out = (rot.conj()[:, None] * core * rot[None, :]) @ out
    return Operator(out, config)


def _row_potential(chart: DriveChart, m: int, beta: float, x: np.ndarray) -> np.ndarray:
    """V_m(x) = sum_n gamma_nm cos(k_n x + delta_nm) on the sample points x."""
    k = chart.k_axis()
    gam = -(beta * chart.delta_k * chart.delta_t / chart.lam) * chart.amplitude[:, m]
    return (gam[:, None] * np.cos(k[:, None] * x[None, :] + chart.phase[:, m][:, None])).sum(
        axis=0
    )


_EIG_CACHE: dict = {}


def position_eigensystem(config: HilbertConfig):
    """Cached eigendecomposition (d, Q) of the position operator, x = Q diag(d) Q†."""
    hit = _EIG_CACHE.get(config)
    if hit is None:
        hit = np.linalg.eigh(position(config).entries)
        _EIG_CACHE[config] = hit
    return hit


# ----------------------------------------------------------------------------
# sequence compilation and serialization


def chart_fingerprint(chart: DriveChart) -> str:
    """Stable content hash of a chart (shape, scales, and both sampled fields)."""
    h = hashlib.sha256()
    h.update(
        repr((chart.N, chart.M, float(chart.k_max), float(chart.omega), float(chart.lam))).encode()
    )
    h.update(np.ascontiguousarray(chart.amplitude).tobytes())
    h.update(np.ascontiguousarray(chart.phase).tobytes())
    return h.hexdigest()[:16]


def compile_sequence(chart: DriveChart, beta: float, floquet_period: int = 0) -> GateSequence:
    """Flatten one period of the chart into an ordered GateSequence.

    Order is ascending m (time slices), and ascending n within each slice —
    the same order xi_gate multiplies in.
    """
    gates, kk, tt = [], [], []
    for m in range(chart.M + 1):
        for n in range(chart.N + 1):
            gates.append(grid_gate(chart, n, m, beta))
            kk.append(n)
            tt.append(m)
    return GateSequence(
        gates=tuple(gates),
        k_index=tuple(kk),
        t_index=tuple(tt),
        chart_id=chart_fingerprint(chart),
        beta=float(beta),
        omega=float(chart.omega),
        floquet_period=int(floquet_period),
    )


def sequence_to_json(seq: GateSequence) -> str:
    records = [
        {
            "zeta": g.zeta,
            "sigma": g.sigma,
            "gamma": g.gamma,
            "delta": g.delta,
            "k_index": seq.k_index[i],
            "t_index": seq.t_index[i],
            "floquet_period": seq.floquet_period,
        }
        for i, g in enumerate(seq.gates)
    ]
    payload = {
        "chart_id": seq.chart_id,
        "beta": seq.beta,
        "omega": seq.omega,
        "floquet_period": seq.floquet_period,
        "gates": records,
    }
    return json.dumps(payload, indent=2)


def sequence_from_json(text: str) -> GateSequence:
    payload = json.loads(text)
    gates = tuple(
        GateParams(zeta=r["zeta"], sigma=r["sigma"], gamma=r["gamma"], delta=r["delta"])
        for r in payload["gates"]
    )
    return GateSequence(
        gates=gates,
        k_index=tuple(r["k_index"] for r in payload["gates"]),
        t_index=tuple(r["t_index"] for r in payload["gates"]),
        chart_id=payload["chart_id"],
        beta=payload["beta"],
        omega=payload["omega"],
        floquet_period=payload["floquet_period"],
    )
