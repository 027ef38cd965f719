"""Adiabatic-ramp evolution engine.

Sigmoid drive schedules, stroboscopic rotating-frame evolution through
one-period lattice-gate products (or a stepwise RK4 integrator of the same
schedule), target-Hamiltonian construction from code words, and fidelity /
geometric-phase diagnostics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .codes import binomial_words, cat_words, sweet_spot
from .fockspace import DensityMatrix, HilbertConfig, Operator, StateVector, parity
from .gates import position_eigensystem
from .ncft import (
    AqecCat,
    EmbedBinomial,
    NcftSpec,
    SingleState,
    Transform,
    coefficient_matrix,
    drive_chart,
    f_target_grid,
)


class NonUnitaryDrift(RuntimeError):
    """State norm wandered further than the evolution tolerance allows."""


class ZeroOverlap(ValueError):
    """Phase extraction needs nonzero overlap with both code words."""


# ----------------------------------------------------------------------------
# schedules


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass(frozen=True)
class RampSchedule:
    """Normalized sigmoid turn-on of drive strength and detuning.

    beta rises 0 -> beta_f and omega moves omega_init -> omega0, both exactly
    at the endpoints (the Z normalizations divide out the finite sigmoid
    offsets at t=0 and t=tf).
    """

    beta_f: float
    tf: float
    omega0: float = 1.0
    omega_init: float | None = None
    s1: float | None = None
    s2: float | None = None
    tc1: float | None = None
    tc2: float | None = None

    def __post_init__(self):
        if self.tf <= 0:
            raise ValueError("tf must be positive")
        defaults = {
            "omega_init": self.omega0 / (1.0 + np.pi * 1e-3),
            "s1": 40.0 / self.tf,
            "s2": 30.0 / self.tf,
            "tc1": self.tf / 6.0,
            "tc2": 2.0 * self.tf / 3.0,
        }
        for name, value in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)

    @property
    def z1(self) -> float:
        return float(
            _sigmoid(self.s1 * (self.tf - self.tc1)) - _sigmoid(-self.s1 * self.tc1)
        )

    @property
    def z2(self) -> float:
        return float(
            _sigmoid(self.s2 * (self.tf - self.tc2)) - _sigmoid(-self.s2 * self.tc2)
        )

    def beta(self, t):
        lo = _sigmoid(-self.s1 * self.tc1)
        return self.beta_f / self.z1 * (_sigmoid(self.s1 * (t - self.tc1)) - lo)

    def omega(self, t):
        lo = _sigmoid(-self.s2 * self.tc2)
        rise = (_sigmoid(self.s2 * (t - self.tc2)) - lo) / self.z2
        return self.omega_init + (self.omega0 - self.omega_init) * rise


def schedule_eval(sched: RampSchedule, t: float):
    """(beta, omega) at time t in [0, tf]."""
    if not 0.0 <= t <= sched.tf:
        raise ValueError(f"t = {t} outside [0, {sched.tf}]")
    return float(sched.beta(t)), float(sched.omega(t))


def transition_h(t: float, tf: float) -> float:
    """Mixing weight sin^2[(pi/2) sin^2(pi t / 2 tf)]: 0 at t=0, 1 at t=tf."""
    if not 0.0 <= t <= tf:
        raise ValueError(f"t = {t} outside [0, {tf}]")
    inner = math.sin(math.pi * t / (2.0 * tf)) ** 2
    return math.sin(math.pi * inner / 2.0) ** 2


# ----------------------------------------------------------------------------
# run specification and targets


_BACKENDS = ("gate_sequence", "direct_integration")


@dataclass(frozen=True)
class TargetSpec:
    """What to prepare and how: scenario, initial Fock amplitudes, backend.

    `initial` lists (fock_index, amplitude) pairs, e.g. ((0, 1.0),) for vacuum
    or ((0, c0), (2, c1)) for a bare-state superposition.
    """

    ncft: NcftSpec
    initial: tuple = ((0, 1.0),)
    backend: str = "gate_sequence"

    def __post_init__(self):
        if self.backend not in _BACKENDS:
            raise ValueError(f"backend must be one of {_BACKENDS}, got {self.backend!r}")
        pairs = tuple((int(n), complex(a)) for n, a in self.initial)
        if any(n < 0 for n, _ in pairs):
            raise ValueError("Fock indices must be non-negative")
        norm = sum(abs(a) ** 2 for _, a in pairs)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"initial state norm^2 = {norm!r}, expected 1")
        object.__setattr__(self, "initial", pairs)


def initial_state(tspec: TargetSpec, config: HilbertConfig) -> StateVector:
    v = np.zeros(config.dim, dtype=complex)
    for n, a in tspec.initial:
        if n >= config.dim:
            raise ValueError(f"Fock index {n} outside dim {config.dim}")
        v[n] += a
    return StateVector(v, config)


def build_target(spec: NcftSpec, config: HilbertConfig) -> Operator:
    """Exact projector-built target Hamiltonian (rank 1, 2, 2, or 4)."""
    h = np.zeros((config.dim, config.dim), dtype=complex)
    sc = spec.scenario
    if isinstance(sc, SingleState):
        words = binomial_words(config)
        psi = sc.c0 * words.zero_c.amplitudes + sc.c1 * words.one_c.amplitudes
        h -= spec.gap * np.outer(psi, psi.conj())
    elif isinstance(sc, EmbedBinomial):
        words = binomial_words(config)
        for w in (words.zero_c, words.one_c):
            h -= spec.gap * np.outer(w.amplitudes, w.amplitudes.conj())
    elif isinstance(sc, Transform):
        b = binomial_words(config)
        c = cat_words(config, sc.alpha)
        for wb, wc in ((b.zero_c, c.zero_c), (b.one_c, c.one_c)):
            w = math.sqrt(1.0 - sc.h) * wb.amplitudes + math.sqrt(sc.h) * wc.amplitudes
            h -= spec.gap * np.outer(w, w.conj())
    elif isinstance(sc, AqecCat):
        c = cat_words(config, sc.alpha)
        for w in (c.zero_c, c.one_c, c.zero_e, c.one_e):
            h -= spec.gap * np.outer(w.amplitudes, w.amplitudes.conj())
    else:
        raise TypeError(f"unknown scenario {sc!r}")
    return Operator(h, config)


def target_state(tspec: TargetSpec, config: HilbertConfig) -> StateVector:
    """The state the run is steering toward (bare residues mapped to words)."""
    sc = tspec.ncft.scenario
    if isinstance(sc, SingleState):
        words = binomial_words(config)
        v = sc.c0 * words.zero_c.amplitudes + sc.c1 * words.one_c.amplitudes
        return StateVector(v, config)
    if isinstance(sc, EmbedBinomial):
        words = binomial_words(config)
        lifted = {0: words.zero_c.amplitudes, 2: words.one_c.amplitudes}
        v = np.zeros(config.dim, dtype=complex)
        for n, a in tspec.initial:
            if n not in lifted:
                raise ValueError(
                    "embedding runs start from bare |0> / |2> amplitudes"
                )
            v += a * lifted[n]
        return StateVector(v, config)
    if isinstance(sc, Transform):
        c = cat_words(config, sc.alpha)
        c0, c1 = _transform_coefficients(tspec, config)
        return StateVector(c0 * c.zero_c.amplitudes + c1 * c.one_c.amplitudes, config)
    raise ValueError(f"no single target state for scenario {sc!r}")


def _transform_coefficients(tspec: TargetSpec, config: HilbertConfig):
    """Logical (c0, c1) of the initial state in the binomial word basis."""
    words = binomial_words(config)
    psi0 = initial_state(tspec, config).amplitudes
    c0 = words.zero_c.amplitudes.conj() @ psi0
    c1 = words.one_c.amplitudes.conj() @ psi0
    leftover = np.linalg.norm(psi0 - c0 * words.zero_c.amplitudes - c1 * words.one_c.amplitudes)
    if leftover > 1e-9:
        raise ValueError("transformation runs start inside the binomial code plane")
    return complex(c0), complex(c1)


# ----------------------------------------------------------------------------
# diagnostics


def fidelity(rho, rho_t) -> float:
    """Uhlmann fidelity; reduces to overlap modulus when both inputs are pure."""
    if isinstance(rho, StateVector) and isinstance(rho_t, StateVector):
        return float(abs(np.vdot(rho_t.amplitudes, rho.amplitudes)))
    a = rho.amplitudes if isinstance(rho, DensityMatrix) else np.outer(
        rho.amplitudes, rho.amplitudes.conj()
    )
    b = rho_t.amplitudes if isinstance(rho_t, DensityMatrix) else np.outer(
        rho_t.amplitudes, rho_t.amplitudes.conj()
    )
    sq = _psd_sqrt(b)
    inner = sq @ a @ sq
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2.0)
    w = _clamp_spectrum(w)
    return float(np.sqrt(w).sum())


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    w = _clamp_spectrum(w)
    return (v * np.sqrt(w)) @ v.conj().T


def _clamp_spectrum(w: np.ndarray) -> np.ndarray:
    if w.min() < -1e-9:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w.min()})")
    return np.clip(w, 0.0, None)


def geometric_phase(psi: StateVector, word0: StateVector, word1: StateVector) -> float:
    """arg(<word1|psi><psi|word0>), principal value in (-pi, pi]."""
    o1 = np.vdot(word1.amplitudes, psi.amplitudes)
    o0 = np.vdot(psi.amplitudes, word0.amplitudes)
    if abs(o1) < 1e-8 or abs(o0) < 1e-8:
        raise ZeroOverlap(
            f"overlap moduli {abs(o0):.2e}, {abs(o1):.2e} too small for phase extraction"
        )
    return float(np.angle(o1 * o0))


# ----------------------------------------------------------------------------
# stroboscopic evolution


@dataclass
class Trajectory:
    steps: np.ndarray
    times: np.ndarray
    betas: np.ndarray
    omegas: np.ndarray
    infidelities: np.ndarray
    parities: np.ndarray | None
    states: list  # StateVector at each stroboscopic step

    def final_state(self) -> StateVector:
        return self.states[-1]


class _ChartEngine:
    """Per-period applicator for one drive chart shape.

    Rows close in the position eigenbasis: the slice-m kick is
    R(-tau_m) Q diag(e^{i c S[m]}) Q^dag R(tau_m) with c = -beta dk dt / lam
    and S[m, j] = sum_n A[n, m] cos(k_n d_j + phi[n, m]).
    """

    def __init__(self, config: HilbertConfig, k, tau, delta_k, lam, omega0: float = 1.0):
        self.config = config
        self.k = k
        self.tau = tau
        self.delta_k = delta_k
        self.lam = lam
        self.omega0 = omega0
        self.d, self.q = position_eigensystem(config)
        self.q_dag = self.q.conj().T
        self.levels = np.arange(config.dim)
        # e^{-i tau_m n} for each row, applied before the kick (and conjugated after)
        self.rots = np.exp(-1j * np.outer(tau, self.levels))
        self.profiles = None

    def set_field(self, field: np.ndarray):
        """field[n, m] = k_n f_T(k_n, tau_m); refresh row kick profiles."""
        amp = np.abs(field)
        phase = np.angle(field)
        args = self.k[:, None, None] * self.d[None, None, :] + phase[:, :, None]
        self.profiles = np.einsum("nm,nmj->mj", amp, np.cos(args))

    def _row_rotations(self, omega: float) -> np.ndarray:
        # conjugation angles run at the oscillator clock omega0, not the drive
        # clock: within a detuned period the slice at drive phase tau_m sits at
        # lab time tau_m / omega, so its frame angle is tau_m * (omega0/omega)
        if omega == self.omega0:
            return self.rots
        return np.exp(-1j * (self.omega0 / omega) * np.outer(self.tau, self.levels))

    def apply_period(self, psi: np.ndarray, beta: float, omega: float) -> np.ndarray:
        # rows m = 0 .. M-1: each slice kicks once per period; the tau = 2 pi
        # endpoint belongs to the next period (double-kicking the shared row
        # mixes degenerate code words at first order in the slice weight)
        dt = (2.0 * np.pi / omega) / (self.tau.size - 1)
        c = -(beta * self.delta_k * dt) / self.lam
        rots = self._row_rotations(omega)
        for m in range(self.tau.size - 1):
            psi = rots[m] * psi
            psi = self.q_dag @ psi
            psi = np.exp(1j * c * self.profiles[m]) * psi
            psi = self.q @ psi
            psi = rots[m].conj() * psi
        return psi

    def apply_period_rk4(self, psi: np.ndarray, beta: float, omega: float,
                         substeps: int = 4) -> np.ndarray:
        """Stepwise time-ordered integration of the same frozen-slice schedule."""
        dt = (2.0 * np.pi / omega) / (self.tau.size - 1)
        c = -(beta * self.delta_k * dt) / self.lam
        rots = self._row_rotations(omega)
        for m in range(self.tau.size - 1):
            core = (self.q * (c * self.profiles[m])) @ self.q_dag
            gen = 1j * (rots[m].conj()[:, None] * core * rots[m][None, :])
            a = gen / substeps
            for _ in range(substeps):
                k1 = a @ psi
                k2 = a @ (psi + 0.5 * k1)
                k3 = a @ (psi + 0.5 * k2)
                k4 = a @ (psi + k3)
                psi = psi + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        return psi


def _transform_component_fields(spec: NcftSpec, k, tau):
    """Drive fields of the word-pair pieces of the interpolating Hamiltonian.

    Returns (bb, cc, cross), each k_n f_T(k_n, tau_m) with the gap folded in,
    such that field(h) = (1-h) bb + h cc + sqrt(h(1-h)) cross.
    """
    sc = spec.scenario
    base = {"gap": spec.gap, "lam": spec.lam}
    bb = f_target_grid(NcftSpec(scenario=EmbedBinomial(), **base), k, tau)
    half = f_target_grid(
        NcftSpec(scenario=Transform(h=0.5, alpha=sc.alpha), **base), k, tau
    )
    cc = f_target_grid(NcftSpec(scenario=Transform(h=1.0, alpha=sc.alpha), **base), k, tau)
    # at h = 1/2 the assembled field is (bb + cc)/2 + cross/2
    cross = 2.0 * half - bb - cc
    scale = np.asarray(k)[:, None]
    return scale * bb, scale * cc, scale * cross


def evolve(
    tspec: TargetSpec,
    sched: RampSchedule,
    config: HilbertConfig,
    N: int = 20,
    M: int = 20,
    k_max: float = 8.0,
    record_parity: bool = False,
    substeps: int = 4,
) -> Trajectory:
    """Run the ramp stroboscopically: one chart period per schedule step.

    Preparation/embedding scenarios ramp (beta, omega) along `sched`;
    transformation scenarios hold beta = beta_f, omega = omega0 and animate
    the word-mixing weight h(t) instead. The schedule clock ticks in nominal
    periods T0 = 2 pi / omega0; detuning omega != omega0 adds a free-rotation
    factor after each period.
    """
    spec = tspec.ncft
    period = 2.0 * np.pi / sched.omega0
    n_periods = int(round(sched.tf / period))
    if abs(n_periods * period - sched.tf) > 1e-9 * sched.tf:
        raise ValueError("tf must be a whole number of nominal periods")

    is_transform = isinstance(spec.scenario, Transform)
    chart = drive_chart(spec, N=N, M=M, k_max=k_max, omega=sched.omega0)
    eng = _ChartEngine(config, chart.k_axis(), 2.0 * np.pi / M * np.arange(M + 1),
                       chart.delta_k, spec.lam, omega0=sched.omega0)
    if is_transform:
        pieces = _transform_component_fields(spec, eng.k, eng.tau)
        tgt = target_state(tspec, config)
    else:
        eng.set_field(chart.amplitude * np.exp(1j * chart.phase))
        tgt = target_state(tspec, config)

    psi = initial_state(tspec, config).amplitudes.copy()
    par_op = parity(config).entries if record_parity else None
    gate_backend = tspec.backend == "gate_sequence"

    steps = np.arange(n_periods + 1)
    times = steps * period
    betas = np.empty(n_periods + 1)
    omegas = np.empty(n_periods + 1)
    infs = np.empty(n_periods + 1)
    pars = np.empty(n_periods + 1) if record_parity else None
    states = []

    levels = np.arange(config.dim)
    t_amps = tgt.amplitudes
    for s in range(n_periods + 1):
        t_now = times[s]
        if is_transform:
            beta_s, omega_s = sched.beta_f, sched.omega0
        else:
            beta_s, omega_s = schedule_eval(sched, min(t_now, sched.tf))
        betas[s], omegas[s] = beta_s, omega_s
        infs[s] = 1.0 - abs(np.vdot(t_amps, psi))
        if record_parity:
            pars[s] = (psi.conj() @ (par_op @ psi)).real
        states.append(StateVector(psi.copy(), config))
        if s == n_periods:
            break

        if is_transform:
            h = transition_h(t_now, sched.tf)
            bb, cc, cross = pieces
            eng.set_field((1.0 - h) * bb + h * cc + math.sqrt(h * (1.0 - h)) * cross)
        if gate_backend:
            psi = eng.apply_period(psi, beta_s, omega_s)
        else:
            psi = eng.apply_period_rk4(psi, beta_s, omega_s, substeps=substeps)
        # detuned early phase: residual free rotation over the period
        angle = (sched.omega0 - omega_s) * (2.0 * np.pi / omega_s)
        if angle != 0.0:
            psi = np.exp(-1j * angle * levels) * psi
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-6:
            raise NonUnitaryDrift(f"norm drifted to {norm!r} at period {s}")

    return Trajectory(
        steps=steps, times=times, betas=betas, omegas=omegas,
        infidelities=infs, parities=pars, states=states,
    )


# ----------------------------------------------------------------------------
# trajectory output


def trajectory_to_csv(traj: Trajectory, path) -> str:
    import os

    cols = ["step", "time", "beta", "omega", "infidelity"]
    arrays = [traj.steps, traj.times, traj.betas, traj.omegas, traj.infidelities]
    if traj.parities is not None:
        cols.append("parity_expectation")
        arrays.append(traj.parities)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(traj.steps.size):
            row = [repr(int(traj.steps[i]))] + [repr(float(a[i])) for a in arrays[1:]]
            fh.write(",".join(row) + "\n")
    return os.path.abspath(path)


def state_to_pairs(psi: StateVector) -> list:
    return [[float(a.real), float(a.imag)] for a in psi.amplitudes]


def snapshots_to_json(traj: Trajectory, path, every: int = 100) -> str:
    import os

    idx = list(range(0, traj.steps.size, every))
    if idx[-1] != traj.steps.size - 1:
        idx.append(traj.steps.size - 1)
    payload = {
        "times": [float(traj.times[i]) for i in idx],
        "states": [state_to_pairs(traj.states[i]) for i in idx],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")
    return os.path.abspath(path)
