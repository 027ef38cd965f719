"""Wigner and Husimi-Q evaluation on phase-space grids, with CSV/JSON export.

Conventions (anchored to the vacuum): W(alpha) = (2/pi) e^{-2|alpha|^2} for
|0><0|, alpha = (x + i p)/sqrt(2 lam), measure d^2alpha = dx dp / (2 lam),
so that the Wigner function integrates to one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .fockspace import DensityMatrix, HilbertConfig, Operator, StateVector


@dataclass
class PhaseGrid:
    x_min: float
    x_max: float
    p_min: float
    p_max: float
    nx: int
    np: int
    values: np.ndarray  # shape (nx, np), values[i, j] = f(x_i, p_j)
    lam: float
    kind: str = "wigner"

    def x_axis(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    def p_axis(self):
        return np.linspace(self.p_min, self.p_max, self.np)

    def integral(self) -> float:
        """Trapezoid-rule integral with the d^2alpha = dx dp/(2 lam) measure."""
        dx = (self.x_max - self.x_min) / (self.nx - 1)
        dp = (self.p_max - self.p_min) / (self.np - 1)
        wx = np.ones(self.nx)
        wx[0] = wx[-1] = 0.5
        wp = np.ones(self.np)
        wp[0] = wp[-1] = 0.5
        return float(wx @ self.values @ wp * dx * dp / (2 * self.lam))


DEFAULT_GRID = dict(x_min=-5.0, x_max=5.0, p_min=-5.0, p_max=5.0, nx=201, np=201)


def _alpha_grid(config: HilbertConfig, spec: dict):
    x = np.linspace(spec["x_min"], spec["x_max"], spec["nx"])
    p = np.linspace(spec["p_min"], spec["p_max"], spec["np"])
    return (x[:, None] + 1j * p[None, :]) / np.sqrt(2 * config.lam)


def genlaguerre_table(order: int, n_max: int, x: np.ndarray) -> np.ndarray:
    """L_n^{(order)}(x) for n = 0..n_max via the stable three-term recurrence.

    Returns shape (n_max+1,) + x.shape. The recurrence in the lower index n,
    (n+1) L_{n+1} = (2n + order + 1 - x) L_n - (n + order) L_{n-1},
    avoids the factorial overflow of the explicit sum.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 + order - x
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + order + 1 - x) * out[n] - (n + order) * out[n - 1]) / (n + 1)
    return out


def wigner(rho, grid_spec: dict | None = None) -> PhaseGrid:
    """W(alpha) = sum_{m m'} rho_{m m'} W_{m m'}(alpha).

    Matrix elements (m >= m'):
      W_{m m'} = (2/pi)(-1)^{m'} sqrt(m'!/m!) (2 conj(alpha))^{m-m'}
                 e^{-2|alpha|^2} L_{m'}^{(m-m')}(4|alpha|^2),
    the m < m' half follows by conjugate symmetry. Evaluation walks the
    nonzero diagonals of rho with log-domain amplitudes.
    """
    rho_m, config = _as_matrix(rho)
    spec = dict(DEFAULT_GRID if grid_spec is None else grid_spec)
    alpha = _alpha_grid(config, spec)
    r2 = np.abs(alpha) ** 2
    x4 = 4.0 * r2
    dim = config.dim
    gauss = np.exp(-2.0 * r2)

    from scipy.special import gammaln

    total = np.zeros(alpha.shape)
    for offset in range(dim):
        diag = np.diagonal(rho_m, -offset)  # rho[m'+offset, m']
        if not np.any(diag):
            continue
        n_top = dim - offset - 1
        lag = genlaguerre_table(offset, n_top, x4)
        if offset == 0:
            contrib = np.zeros(alpha.shape)
            for mp in range(dim):
                if diag[mp] == 0:
                    continue
                contrib += diag[mp].real * (-1.0) ** mp * lag[mp]
            total += contrib
        else:
            # (2 conj(alpha))^offset carried as modulus (log domain) + phase
            phase = np.exp(-1j * offset * np.angle(alpha))
            mod_log = offset * np.log(np.maximum(2.0 * np.abs(alpha), 1e-300))
            crossed = np.zeros(alpha.shape, dtype=complex)
            for mp in range(n_top + 1):
                if diag[mp] == 0:
                    continue
                amp_log = 0.5 * (gammaln(mp + 1) - gammaln(mp + offset + 1))
                crossed += (diag[mp] * (-1.0) ** mp * np.exp(amp_log + mod_log)) * lag[mp]
            total += 2.0 * np.real(crossed * phase)
    values = (2.0 / np.pi) * gauss * total
    return PhaseGrid(values=values, lam=config.lam, kind="wigner", **spec)


def q_function(rho, grid_spec: dict | None = None) -> PhaseGrid:
    """Q(x,p) = <alpha|rho|alpha> via coherent-state amplitudes.

    Accepts a DensityMatrix or any Hermitian Operator (for target-Hamiltonian
    surfaces the result can be negative).
    """
    rho_m, config = _as_matrix(rho)
    spec = dict(DEFAULT_GRID if grid_spec is None else grid_spec)
    alpha = _alpha_grid(config, spec).reshape(-1)
    coh = coherent_amplitudes(config, alpha)  # (npts, dim)
    q = np.einsum("gm,mn,gn->g", coh.conj(), rho_m, coh).real
    values = q.reshape(spec["nx"], spec["np"])
    return PhaseGrid(values=values, lam=config.lam, kind="q", **spec)


def coherent_amplitudes(config: HilbertConfig, alpha: np.ndarray) -> np.ndarray:
    """<n|alpha> for an array of alphas, log-domain stable; shape (len, dim)."""
    from scipy.special import gammaln

    alpha = np.asarray(alpha, dtype=complex).reshape(-1)
    n = np.arange(config.dim)
    mod = np.abs(alpha)
    safe = np.maximum(mod, 1e-300)
    log_mod = -0.5 * mod[:, None] ** 2 + n[None, :] * np.log(safe)[:, None] - 0.5 * gammaln(
        n + 1.0
    )[None, :]
    phase = np.exp(1j * n[None, :] * np.angle(alpha)[:, None])
    out = np.exp(log_mod) * phase
    out[mod == 0] = 0.0
    out[mod == 0, 0] = 1.0
    return out


def _as_matrix(rho):
    if isinstance(rho, DensityMatrix):
        return rho.amplitudes, rho.config
    if isinstance(rho, Operator):
        return rho.entries, rho.config
    if isinstance(rho, StateVector):
        v = rho.amplitudes
        return np.outer(v, v.conj()), rho.config
    raise TypeError("expected StateVector, DensityMatrix, or Operator")


# ----------------------------------------------------------------------------
# export


def grid_to_csv(grid: PhaseGrid, path):
    """Row-major CSV: header row carries the p axis, first column the x axis."""
    x, p = grid.x_axis(), grid.p_axis()
    with open(path, "w") as fh:
        fh.write("x\\p," + ",".join(repr(float(v)) for v in p) + "\n")
        for i in range(grid.nx):
            row = ",".join(repr(float(v)) for v in grid.values[i])
            fh.write(f"{float(x[i])!r},{row}\n")


def grid_metadata(grid: PhaseGrid) -> dict:
    return {
        "lambda": grid.lam,
        "axes": {
            "x": [grid.x_min, grid.x_max, grid.nx],
            "p": [grid.p_min, grid.p_max, grid.np],
        },
        "kind": grid.kind,
    }


def grid_to_json_sidecar(grid: PhaseGrid, path):
    with open(path, "w") as fh:
        json.dump(grid_metadata(grid), fh, indent=2, sort_keys=True)
        fh.write("\n")
