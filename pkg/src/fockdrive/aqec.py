"""Parity-measurement error correction for driven cat codes.

Photon loss corrupts a four-fold cat superposition; projective parity checks
plus a cyclic update of the reference words recover the encoded information
without feedback pulses. Between checks the density matrix follows a Lindblad
equation whose Hamiltonian is either absent, the exact four-word projector,
or the stroboscopic lattice drive that approximates it.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .codes import CodeWordSet, cat_words, sweet_spot
from .fockspace import DensityMatrix, HilbertConfig, StateVector
from .gates import position_eigensystem
from .ncft import AqecCat, NcftSpec, drive_chart


class TraceDrift(RuntimeError):
    """Density-matrix trace wandered further than the integration tolerance."""


class ImprobableOutcome(ValueError):
    """Projection onto an outcome whose probability is numerically zero."""


PROTECTIONS = ("none", "ideal_target", "drive")


@dataclass(frozen=True)
class AqecConfig:
    """Loss rate, drive strength, measurement cadence, and ensemble shape.

    `protection` selects the Hamiltonian between measurements: "none" evolves
    under loss alone, "ideal_target" uses the exact four-word projector, and
    "drive" uses the stepwise lattice drive synthesized from it.
    """

    kappa: float = 1e-3
    beta: float = 0.02
    measure_every: int = 5
    n_traj: int = 200
    seed: int = 7041
    protection: str = "drive"
    n_measurements: int = 40
    gap: float = 0.2
    alpha: float | None = None  # default: first Kerr-free cat size
    n_wavenumber: int = 20
    m_time: int = 100
    k_max: float = 8.0
    substeps: int = 1

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.measure_every < 1:
            raise ValueError("measure_every must be >= 1")
        if self.n_traj < 1:
            raise ValueError("n_traj must be >= 1")
        if self.n_measurements < 1:
            raise ValueError("n_measurements must be >= 1")
        if self.protection not in PROTECTIONS:
            raise ValueError(f"protection must be one of {PROTECTIONS}")

    def cat_alpha(self) -> float:
        return float(self.alpha) if self.alpha is not None else float(np.sqrt(sweet_spot(1)))


# ----------------------------------------------------------------------------
# cyclic reference words


@dataclass(frozen=True)
class TargetCycle:
    """Reference word pair, advanced by substitution at each parity flip.

    The four stations keep the coefficients attached to slots, not letters:
    c1|0c>+c2|1c> -> c1|1e>+c2|0e> -> c1|1c>+c2|0c> -> c1|0e>+c2|1e> -> back.
    """

    c1: complex
    c2: complex
    index: int = 0

    def advance(self) -> "TargetCycle":
        return TargetCycle(self.c1, self.c2, (self.index + 1) % 4)

    def state(self, words: CodeWordSet, config: HilbertConfig) -> StateVector:
        stations = (
            (words.zero_c, words.one_c),
            (words.one_e, words.zero_e),
            (words.one_c, words.zero_c),
            (words.zero_e, words.one_e),
        )
        first, second = stations[self.index % 4]
        v = self.c1 * first.amplitudes + self.c2 * second.amplitudes
        return StateVector(v / np.linalg.norm(v), config)


# ----------------------------------------------------------------------------
# Lindblad stepping


def _loss_terms(rho: np.ndarray, weights: np.ndarray, nsum: np.ndarray) -> np.ndarray:
    """kappa * (a rho a^dag - {n, rho}/2) without building ladder matrices."""
    out = np.zeros_like(rho)
    out[..., :-1, :-1] = weights * rho[..., 1:, 1:]
    out -= 0.5 * nsum * rho
    return out


class _Stepper:
    """Fixed-step RK4 for d rho/dt = -(i/lam)[H_m, rho] + kappa L[a] rho.

    `hs` holds one Hamiltonian per time slice of a drive period (a single
    entry means a constant generator); slices advance cyclically. Works on a
    batch of density matrices stacked along the leading axis.
    """

    def __init__(self, config: HilbertConfig, hs: list | None, period: float,
                 m_time: int, kappa: float, substeps: int = 1):
        self.hs = hs
        self.dt = period / m_time
        self.m_time = m_time
        self.kappa = kappa
        self.substeps = max(1, int(substeps))
        self.lam = config.lam
        n = np.arange(config.dim, dtype=float)
        root = np.sqrt(n[1:])
        self.weights = kappa * np.outer(root, root)
        self.nsum = kappa * (n[:, None] + n[None, :])

    def _rhs(self, rho: np.ndarray, h: np.ndarray | None) -> np.ndarray:
        out = _loss_terms(rho, self.weights, self.nsum) if self.kappa > 0 else np.zeros_like(rho)
        if h is not None:
            out += (-1j / self.lam) * (h @ rho - rho @ h)
        return out

    def window(self, rho: np.ndarray, n_periods: int) -> np.ndarray:
        for _ in range(n_periods):
            for m in range(self.m_time):
                h = None
                if self.hs is not None:
                    h = self.hs[m % len(self.hs)]
                dt = self.dt / self.substeps
                for _ in range(self.substeps):
                    k1 = self._rhs(rho, h)
                    k2 = self._rhs(rho + 0.5 * dt * k1, h)
                    k3 = self._rhs(rho + 0.5 * dt * k2, h)
                    k4 = self._rhs(rho + dt * k3, h)
                    rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return rho


def drive_slice_hamiltonians(config: HilbertConfig, cfg: AqecConfig) -> list:
    """Dense rotating-frame Hamiltonians, one per time slice of the drive."""
    spec = NcftSpec(scenario=AqecCat(alpha=cfg.cat_alpha()), gap=cfg.gap, lam=config.lam)
    chart = drive_chart(spec, N=cfg.n_wavenumber, M=cfg.m_time, k_max=cfg.k_max)
    k = chart.k_axis()
    tau = 2.0 * np.pi / cfg.m_time * np.arange(cfg.m_time)
    d, q = position_eigensystem(config)
    args = k[:, None, None] * d[None, None, :] + chart.phase[:, : cfg.m_time, None]
    profiles = np.einsum("nm,nmj->mj", chart.amplitude[:, : cfg.m_time], np.cos(args))
    levels = np.arange(config.dim)
    hs = []
    for m in range(cfg.m_time):
        core = (q * profiles[m]) @ q.conj().T
        rot = np.exp(-1j * tau[m] * levels)
        hs.append(cfg.beta * chart.delta_k * (rot.conj()[:, None] * core * rot[None, :]))
    return hs


def _hamiltonian_slices(config: HilbertConfig, cfg: AqecConfig):
    if cfg.protection == "none":
        return None
    if cfg.protection == "ideal_target":
        from .engine import build_target

        spec = NcftSpec(scenario=AqecCat(alpha=cfg.cat_alpha()), gap=cfg.gap, lam=config.lam)
        return [build_target(spec, config).entries]
    return drive_slice_hamiltonians(config, cfg)


def lindblad_evolve(rho: DensityMatrix, drive, kappa: float, t0: float, t1: float,
                    m_time: int = 100, substeps: int = 1) -> DensityMatrix:
    """Integrate the loss channel plus an optional Hamiltonian from t0 to t1.

    `drive` is None (no Hamiltonian), a single dense matrix / Operator
    (constant), or a list of per-slice matrices covering one 2 pi period.
    """
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    config = rho.config
    hs = drive
    if hs is not None:
        if hasattr(hs, "entries"):
            hs = [np.asarray(hs.entries)]
        elif isinstance(hs, np.ndarray) and hs.ndim == 2:
            hs = [hs]
        else:
            hs = [np.asarray(h) for h in hs]
    period = 2.0 * np.pi
    span = t1 - t0
    n_periods = int(round(span / period))
    if abs(n_periods * period - span) > 1e-9 * max(span, 1.0):
        raise ValueError("evolution span must be a whole number of drive periods")
    stepper = _Stepper(config, hs, period, m_time, kappa, substeps)
    out = stepper.window(rho.amplitudes.copy(), n_periods)
    tr = float(np.real(np.trace(out)))
    if abs(tr - 1.0) > 1e-8:
        raise TraceDrift(f"trace drifted to {tr!r} over [{t0}, {t1}]")
    return DensityMatrix(out, config)


# ----------------------------------------------------------------------------
# parity measurement


def parity_probs(rho: DensityMatrix) -> tuple:
    """(P_even, P_odd) from the diagonal; they sum to one for unit trace."""
    diag = np.real(np.diagonal(rho.amplitudes, axis1=-2, axis2=-1))
    p0 = float(diag[..., 0::2].sum())
    return p0, float(diag[..., 1::2].sum())


def project(rho: DensityMatrix, m: int) -> DensityMatrix:
    """Collapse onto the parity-m sector and renormalize; idempotent."""
    if m not in (0, 1):
        raise ValueError("parity outcome must be 0 or 1")
    probs = parity_probs(rho)
    if probs[m] <= 1e-12:
        raise ImprobableOutcome(f"parity-{m} probability {probs[m]!r}")
    mask = np.zeros(rho.config.dim)
    mask[m::2] = 1.0
    out = rho.amplitudes * mask[:, None] * mask[None, :]
    return DensityMatrix(out / probs[m], rho.config)


# ----------------------------------------------------------------------------
# trajectories


@dataclass
class MeasurementSeries:
    """Per-measurement record of one trajectory (or an ensemble average)."""

    times: np.ndarray
    pre_infidelity: np.ndarray
    post_infidelity: np.ndarray
    p1: np.ndarray
    outcomes: np.ndarray | None = None
    cycle_index: np.ndarray | None = None


def _code_coefficients(initial: StateVector, words: CodeWordSet):
    psi = initial.amplitudes
    c1 = complex(words.zero_c.amplitudes.conj() @ psi)
    c2 = complex(words.one_c.amplitudes.conj() @ psi)
    residue = psi - c1 * words.zero_c.amplitudes - c2 * words.one_c.amplitudes
    if np.linalg.norm(residue) > 1e-9:
        raise ValueError("initial state must lie in the cat code plane")
    return c1, c2


def _batch_run(config: HilbertConfig, cfg: AqecConfig, initial: StateVector,
               rngs: list) -> MeasurementSeries:
    """Evolve a stack of trajectories window by window, measuring together.

    The Lindblad map is linear and shared, so all density matrices advance in
    one batched RK4 sweep; only the measurement draw, projection, and cycle
    bookkeeping are per-trajectory.
    """
    words = cat_words(config, cfg.cat_alpha())
    c1, c2 = _code_coefficients(initial, words)
    targets = np.stack([
        TargetCycle(c1, c2, index=i).state(words, config).amplitudes for i in range(4)
    ])

    n = len(rngs)
    hs = _hamiltonian_slices(config, cfg)
    stepper = _Stepper(config, hs, 2.0 * np.pi, cfg.m_time, cfg.kappa, cfg.substeps)
    rho = np.broadcast_to(
        np.outer(initial.amplitudes, initial.amplitudes.conj()), (n, config.dim, config.dim)
    ).copy()
    cycles = np.zeros(n, dtype=int)
    last_outcome = np.zeros(n, dtype=int)  # parity checks start from the even sector
    even = np.zeros(config.dim)
    even[0::2] = 1.0

    period = 2.0 * np.pi
    n_meas = cfg.n_measurements
    times = period * cfg.measure_every * np.arange(1, n_meas + 1)
    pre = np.empty((n_meas, n))
    post = np.empty((n_meas, n))
    p1s = np.empty((n_meas, n))
    outcomes = np.empty((n_meas, n), dtype=int)
    cycle_log = np.empty((n_meas, n), dtype=int)

    def batch_fidelity(rho_b, cycle_idx):
        f = np.empty(n)
        for ci in range(4):
            sel = cycle_idx == ci
            if not np.any(sel):
                continue
            t = targets[ci]
            quad = np.real(np.einsum("i,bij,j->b", t.conj(), rho_b[sel], t))
            f[sel] = np.sqrt(np.clip(quad, 0.0, None))
        return f

    for k in range(n_meas):
        rho = stepper.window(rho, cfg.measure_every)
        traces = np.real(np.einsum("bii->b", rho))
        if np.max(np.abs(traces - 1.0)) > 1e-8:
            raise TraceDrift(f"trace drifted to {traces[np.argmax(np.abs(traces-1))]!r}")

        diag = np.real(np.einsum("bii->bi", rho))
        p0 = diag[:, 0::2].sum(axis=1)
        p1 = 1.0 - p0
        pre[k] = 1.0 - batch_fidelity(rho, cycles)
        p1s[k] = p1

        eps = np.array([rng.uniform() for rng in rngs])
        got = (eps >= p0).astype(int)
        outcomes[k] = got

        mask = np.where(got[:, None] == 0, even[None, :], 1.0 - even[None, :])
        rho = rho * mask[:, :, None] * mask[:, None, :]
        norm = np.where(got == 0, p0, p1)
        if np.min(norm) <= 1e-12:
            raise ImprobableOutcome(f"parity outcome probability {np.min(norm)!r}")
        rho /= norm[:, None, None]

        flipped = got != last_outcome
        cycles = np.where(flipped, (cycles + 1) % 4, cycles)
        last_outcome = got
        cycle_log[k] = cycles
        post[k] = 1.0 - batch_fidelity(rho, cycles)

    return MeasurementSeries(
        times=times,
        pre_infidelity=pre,
        post_infidelity=post,
        p1=p1s,
        outcomes=outcomes,
        cycle_index=cycle_log,
    )


def run_trajectory(cfg: AqecConfig, initial: StateVector, rng) -> MeasurementSeries:
    """Single stochastic trajectory: windows of loss, then parity checks."""
    series = _batch_run(initial.config, cfg, initial, [rng])
    return MeasurementSeries(
        times=series.times,
        pre_infidelity=series.pre_infidelity[:, 0],
        post_infidelity=series.post_infidelity[:, 0],
        p1=series.p1[:, 0],
        outcomes=series.outcomes[:, 0],
        cycle_index=series.cycle_index[:, 0],
    )


@dataclass
class EnsembleResult:
    config: AqecConfig
    times: np.ndarray
    mean_pre: np.ndarray
    mean_post: np.ndarray
    std_post: np.ndarray
    stderr_post: np.ndarray
    mean_p1: np.ndarray

    def to_csv(self, path) -> str:
        import os

        with open(path, "w") as fh:
            fh.write("measurement_index,time,mean_infidelity,std_infidelity,mean_P1\n")
            for i in range(self.times.size):
                fh.write(
                    f"{i + 1},{self.times[i]!r},{self.mean_post[i]!r},"
                    f"{self.std_post[i]!r},{self.mean_p1[i]!r}\n"
                )
        return os.path.abspath(path)

    def manifest(self, path) -> str:
        import os

        payload = asdict(self.config)
        payload["alpha"] = self.config.cat_alpha()
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return os.path.abspath(path)


def default_initial(config: HilbertConfig, cfg: AqecConfig) -> StateVector:
    """Unbalanced code superposition sqrt(5/8)|0c> + sqrt(3/8)|1c>."""
    words = cat_words(config, cfg.cat_alpha())
    v = np.sqrt(5.0 / 8.0) * words.zero_c.amplitudes + np.sqrt(3.0 / 8.0) * words.one_c.amplitudes
    return StateVector(v / np.linalg.norm(v), config)


def run_ensemble(cfg: AqecConfig, initial: StateVector | None = None,
                 config: HilbertConfig | None = None) -> EnsembleResult:
    """Seed-stable trajectory ensemble; per-point means across trajectories."""
    config = config or HilbertConfig()
    if initial is None:
        initial = default_initial(config, cfg)
    streams = [
        np.random.Generator(np.random.Philox(ss))
        for ss in np.random.SeedSequence(cfg.seed).spawn(cfg.n_traj)
    ]
    series = _batch_run(config, cfg, initial, streams)
    n = cfg.n_traj
    std = series.post_infidelity.std(axis=1, ddof=1) if n > 1 else np.zeros(series.times.size)
    return EnsembleResult(
        config=cfg,
        times=series.times,
        mean_pre=series.pre_infidelity.mean(axis=1),
        mean_post=series.post_infidelity.mean(axis=1),
        std_post=std,
        stderr_post=std / np.sqrt(n),
        mean_p1=series.p1.mean(axis=1),
    )
