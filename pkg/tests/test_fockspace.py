import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import expm as scipy_expm

from fockdrive.fockspace import (
    CutoffRisk,
    DensityMatrix,
    HilbertConfig,
    StateVector,
    coherent_state,
    displacement,
    expm_hermitian,
    fock_state,
    ladder,
    momentum,
    number_op,
    parity,
    plane_wave,
    position,
    rotation,
    squeeze,
)

CFG = HilbertConfig(dim=60, lam=0.25)


def test_ladder_elements():
    a = ladder(HilbertConfig(dim=3)).entries
    assert a[0, 1] == pytest.approx(1.0)
    assert a[1, 2] == pytest.approx(np.sqrt(2))
    assert np.count_nonzero(a) == 2


def test_number_operator():
    a = ladder(CFG).entries
    n = a.conj().T @ a
    assert np.allclose(n, np.diag(np.arange(CFG.dim)), atol=1e-14)
    assert np.allclose(number_op(CFG).entries, n, atol=1e-14)


def test_canonical_commutator():
    # [x, p] = i*lam on the block untouched by truncation; the corner entry
    # is the unavoidable cutoff artifact.
    x = position(CFG).entries
    p = momentum(CFG).entries
    comm = x @ p - p @ x
    target = 1j * CFG.lam * np.eye(CFG.dim)
    top = CFG.dim - 1
    assert np.linalg.norm((comm - target)[:top, :top]) <= 1e-10
    assert abs(comm[top, top] - 1j * CFG.lam) > 0.1 * CFG.lam


def test_plane_wave_identity_at_zero():
    assert np.allclose(plane_wave(CFG, 0.0, 0.0).entries, np.eye(CFG.dim), atol=1e-14)


def test_plane_wave_vacuum_element_gaussian_oracle():
    # Oracle: <0|e^{ikx}|0> = integral of |psi_0(x)|^2 e^{ikx} with the vacuum
    # wavefunction psi_0(x) = (pi*lam)^(-1/4) exp(-x^2/(2 lam)).
    k, lam = 1.0, CFG.lam
    re, _ = quad(lambda x: np.exp(-x * x / lam) * np.cos(k * x) / np.sqrt(np.pi * lam), -8, 8)
    im, _ = quad(lambda x: np.exp(-x * x / lam) * np.sin(k * x) / np.sqrt(np.pi * lam), -8, 8)
    oracle = re + 1j * im
    assert oracle == pytest.approx(np.exp(-lam * k * k / 4), abs=1e-12)
    elem = plane_wave(CFG, k, 0.0).entries[0, 0]
    assert abs(elem - oracle) <= 1e-8


def test_plane_wave_inverse():
    u = plane_wave(CFG, 1.3, 0.0)
    v = plane_wave(CFG, -1.3, 0.0)
    g = CFG.guard
    assert np.linalg.norm((u @ v).entries[:g, :g] - np.eye(g)) <= 1e-10


def test_rotation_basics():
    assert np.allclose(rotation(CFG, 0.0).entries, np.eye(CFG.dim), atol=0)
    assert np.allclose(rotation(CFG, np.pi).entries, parity(CFG).entries, atol=1e-12)
    prod = rotation(CFG, 0.7).entries @ rotation(CFG, -0.7).entries
    assert np.allclose(prod, np.eye(CFG.dim), atol=1e-15)


def test_parity_eigenstates():
    P = parity(CFG).entries
    assert np.allclose(P @ fock_state(CFG, 4).amplitudes, fock_state(CFG, 4).amplitudes)
    assert np.allclose(P @ fock_state(CFG, 3).amplitudes, -fock_state(CFG, 3).amplitudes)
    assert np.allclose(P @ P, np.eye(CFG.dim), atol=0)


def test_squeeze_scaling_property():
    # Oracle for the operator itself: dense scaling-and-squaring exponential.
    z = 0.3
    s = squeeze(CFG, z).entries
    a = ladder(CFG).entries
    gen = 0.5 * (z * (a @ a) - z * (a.conj().T @ a.conj().T))
    assert np.linalg.norm(s - scipy_expm(gen)) <= 1e-11
    # The sandwich S†xS spreads Fock support by e^{2z}, so the comparison
    # block must satisfy block*e^{2z} + tail < dim: at dim=60 that caps the
    # clean block near 23 (measured defect 8.3e-7 at 23, 4.1e-6 at 24).
    x = position(CFG).entries
    lhs = (s.conj().T @ x @ s)[:23, :23]
    assert np.linalg.norm(lhs - np.exp(-z) * x[:23, :23]) <= 1e-6
    # With the cutoff doubled the full 50-level guard block meets 1e-6.
    big = HilbertConfig(dim=120, lam=0.25)
    sb = squeeze(big, z).entries
    xb = position(big).entries
    lhs_b = (sb.conj().T @ xb @ sb)[:50, :50]
    assert np.linalg.norm(lhs_b - np.exp(-z) * xb[:50, :50]) <= 1e-6


def test_squeeze_inverse_and_identity():
    assert np.allclose(squeeze(CFG, 0.0).entries, np.eye(CFG.dim), atol=1e-14)
    g = CFG.guard
    prod = (squeeze(CFG, 0.25) @ squeeze(CFG, -0.25)).entries
    assert np.linalg.norm(prod[:g, :g] - np.eye(g)) <= 1e-9


def test_squeeze_cutoff_warning():
    with pytest.warns(CutoffRisk):
        squeeze(HilbertConfig(dim=20), 2.0)


def test_plane_wave_rotation_conjugation():
    # e^{i(kx x + kp p)} = R(-theta) e^{i k x} R(theta), the identity behind
    # the lattice-gate decomposition.
    kx, kp = 0.8, -1.1
    k = np.hypot(kx, kp)
    theta = np.arctan2(kp, kx)
    lhs = plane_wave(CFG, kx, kp).entries
    rhs = (rotation(CFG, -theta) @ plane_wave(CFG, k, 0.0) @ rotation(CFG, theta)).entries
    g = CFG.guard
    assert np.linalg.norm((lhs - rhs)[:g, :g]) <= 1e-9


def test_expm_backend_against_scipy():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(CFG.dim, CFG.dim)) + 1j * rng.normal(size=(CFG.dim, CFG.dim))
    h = 0.5 * (m + m.conj().T)
    h /= np.linalg.norm(h)
    assert np.linalg.norm(expm_hermitian(h) - scipy_expm(1j * h)) <= 1e-11


def test_constructors_are_unitary_on_guard_block():
    ops = [
        plane_wave(CFG, 0.9, 0.4),
        rotation(CFG, 1.234),
        squeeze(CFG, 0.2),
        displacement(CFG, 0.7 + 0.3j),
        parity(CFG),
    ]
    for op in ops:
        assert op.unitarity_defect() <= 1e-10


def test_coherent_state_moments():
    alpha = 1.5 + 0.5j
    psi = coherent_state(CFG, alpha)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    a = ladder(CFG).entries
    assert np.vdot(psi.amplitudes, a @ psi.amplitudes) == pytest.approx(alpha, abs=1e-10)
    nbar = np.vdot(psi.amplitudes, number_op(CFG).entries @ psi.amplitudes)
    assert nbar.real == pytest.approx(abs(alpha) ** 2, abs=1e-9)


def test_displacement_generates_coherent_state():
    alpha = 0.9 - 0.4j
    moved = displacement(CFG, alpha).entries[:, 0]
    assert np.linalg.norm(moved - coherent_state(CFG, alpha).amplitudes) <= 1e-10


def test_state_and_density_validation():
    v = StateVector(np.ones(CFG.dim), CFG).normalize()
    assert v.norm() == pytest.approx(1.0, abs=1e-12)
    rho = v.density()
    rho.validate()
    bad = DensityMatrix(np.eye(CFG.dim, dtype=complex), CFG)
    with pytest.raises(ValueError):
        bad.validate()
