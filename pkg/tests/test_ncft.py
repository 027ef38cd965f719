import json

import mpmath as mp
import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
from scipy.special import eval_genlaguerre, gammaln

from fockdrive.codes import cat_words
from fockdrive.fockspace import HilbertConfig, position, rotation
from fockdrive.ncft import (
    AqecCat,
    DriveChart,
    EmbedBinomial,
    NcftSpec,
    SeriesTruncation,
    SingleState,
    Transform,
    cat_word_vector,
    chart_sidecar,
    chart_to_files,
    coefficient_matrix,
    drive_chart,
    f_component,
    f_target,
    f_target_grid,
    husimi_target,
    kummer_1f1,
    reconstruct,
    target_operator,
)
from fockdrive.phase_space import q_function

LAM = 0.25

SINGLE = NcftSpec(scenario=SingleState(c0=0.5, c1=np.sqrt(3.0) / 2.0), gap=1.3)
EMBED = NcftSpec(scenario=EmbedBinomial(), gap=1.4)


# ---------------------------------------------------------------------------
# independent oracles


def _f_oracle_hypergeometric(m, m2, k, tau, lam=LAM):
    """Literal closed form with mpmath: the growing Gaussian factor pairs
    against the decaying confluent series, evaluated at 60 digits."""
    mp.mp.dps = 60
    hi, lo = (m, m2) if m - m2 > -1 else (m2, m)
    dist = hi - lo
    kk = mp.mpf(k)
    radial = (
        mp.mpf(lam)
        * mp.exp(lam * kk**2 / 4)
        * mp.sqrt(mp.factorial(hi) / mp.factorial(lo))
        * (kk * mp.sqrt(mp.mpf(lam) / 2)) ** dist
        / mp.factorial(dist)
        * mp.hyp1f1(1 + hi, 1 + dist, -lam * kk**2 / 2)
    )
    phase = mp.e ** (-1j * dist * mp.pi / 2 - 1j * (m - m2) * mp.mpf(tau))
    return complex(radial * phase)


def _f_oracle_laguerre(m, m2, k, tau, lam=LAM):
    """Equivalent associated-Laguerre form (scipy route)."""
    hi, lo = (m, m2) if m - m2 > -1 else (m2, m)
    dist = hi - lo
    x = lam * k**2 / 2.0
    amp = (
        lam
        * np.exp(-lam * k**2 / 4.0 + 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)))
        * (k * np.sqrt(lam / 2.0)) ** dist
        * eval_genlaguerre(lo, dist, x)
    )
    return amp * np.exp(-1j * dist * np.pi / 2.0 - 1j * (m - m2) * tau)


def _f_oracle_displacement(m, m2, k, tau, lam=LAM, dim=140):
    """f = lam * conj(<m|exp(i k u_tau)|m2>) with a dense matrix exponential."""
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    xi = 1j * k * np.sqrt(lam / 2.0) * np.exp(1j * tau)
    d_op = scipy.linalg.expm(xi * a.conj().T - np.conj(xi) * a)
    return lam * np.conj(d_op[m, m2])


def test_kummer_terminating_and_mpmath():
    mp.mp.dps = 40
    cases = [(-3, 5.0, 2.2), (-7, 2.0, -4.4), (0.5, 1.5, 3.0), (2.0, 6.0, -7.5)]
    for a, b, z in cases:
        got = complex(kummer_1f1(a, b, np.array([z], dtype=complex))[0])
        want = complex(mp.hyp1f1(a, b, z))
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_kummer_reflects_large_arguments():
    # |z| = 28 sits far past float64 Taylor viability; the reflected branch
    # must still agree with mpmath.
    mp.mp.dps = 50
    got = complex(kummer_1f1(-4, 3.0, np.array([-28.0], dtype=complex))[0])
    want = complex(mp.hyp1f1(-4, 3, -28))
    assert abs(got - want) <= 1e-10 * abs(want)


def test_f_component_matches_hypergeometric_oracle():
    pairs = [(0, 0), (2, 0), (0, 4), (3, 3), (6, 2), (5, 9), (12, 8)]
    for m, m2 in pairs:
        for k in (0.3, 1.7, 4.0, 7.9, 8.1, 12.0):
            for tau in (0.0, 0.7):
                got = f_component(m, m2, k, tau, LAM)
                want = _f_oracle_hypergeometric(m, m2, k, tau)
                assert abs(got - want) <= 1e-11 * max(1e-6, abs(want))


def test_f_component_matches_laguerre_oracle():
    rng = np.random.default_rng(7)
    for _ in range(60):
        m = int(rng.integers(0, 41))
        m2 = int(rng.integers(0, 41))
        k = float(rng.uniform(0.05, 12.0))
        tau = float(rng.uniform(0.0, 2 * np.pi))
        got = f_component(m, m2, k, tau, LAM)
        want = _f_oracle_laguerre(m, m2, k, tau)
        assert abs(got - want) <= 1e-10 * max(1e-10, abs(want))


def test_f_component_matches_displacement_oracle():
    for m, m2 in [(0, 0), (1, 0), (4, 2), (7, 7), (3, 10)]:
        for k, tau in [(1.1, 0.4), (5.3, 2.2)]:
            got = f_component(m, m2, k, tau, LAM)
            want = _f_oracle_displacement(m, m2, k, tau)
            assert abs(got - want) <= 1e-9


def test_f_component_vacuum_gaussian():
    k = np.linspace(0.0, 10.0, 41)
    got = f_component(0, 0, k, 1.23, LAM)
    np.testing.assert_allclose(got, LAM * np.exp(-LAM * k**2 / 4.0), atol=1e-14)

    # quadrature oracle: ground-state wavefunction FT
    def integrand(x, kk):
        return np.exp(-(x**2) / LAM) / np.sqrt(np.pi * LAM) * np.cos(kk * x)

    for kk in (0.7, 3.1):
        val, _ = scipy.integrate.quad(integrand, -12, 12, args=(kk,))
        assert abs(f_component(0, 0, kk, 0.0, LAM) - LAM * val) <= 1e-8


def test_f_component_zero_wavenumber_is_kronecker():
    for m in range(6):
        for m2 in range(6):
            got = f_component(m, m2, 0.0, 0.9, LAM)
            want = LAM if m == m2 else 0.0
            assert abs(got - want) <= 1e-15


def test_f_component_conjugation_symmetry():
    # Swapping the Fock indices conjugates the value half a turn later:
    # f_{m2 m}(k, tau) = conj(f_{m m2}(k, tau + pi)).
    for (m, m2), k, tau in [((0, 4), 1.3, 0.7), ((5, 2), 3.9, 2.0)]:
        lhs = f_component(m2, m, k, tau, LAM)
        rhs = np.conj(f_component(m, m2, k, tau + np.pi, LAM))
        assert abs(lhs - rhs) <= 1e-12


def test_f_component_rejects_bad_arguments():
    with pytest.raises(ValueError):
        f_component(-1, 0, 1.0, 0.0, LAM)
    with pytest.raises(ValueError):
        f_component(0, 0, -0.5, 0.0, LAM)


# ---------------------------------------------------------------------------
# targets and their transforms


def test_single_state_coefficients_hand_expansion():
    # psi = c0|0_b> + c1|1_b> written out in Fock amplitudes by hand:
    psi = np.zeros(7)
    psi[0] = 0.25            # c0/2
    psi[2] = 0.75            # sqrt(3) c1 / 2 with c1 = sqrt(3)/2
    psi[4] = np.sqrt(3.0) / 4.0
    psi[6] = np.sqrt(3.0) / 4.0
    want = -1.3 * np.outer(psi, psi)
    np.testing.assert_allclose(coefficient_matrix(SINGLE), want, atol=1e-15)


def test_coefficient_matrix_traces():
    # f_T(0, tau) = lam * Tr H_T for every scenario
    for spec, trace in [
        (SINGLE, -1.3),
        (EMBED, -2 * 1.4),
        (NcftSpec(scenario=AqecCat(alpha=1.5), gap=0.2), -4 * 0.2),
    ]:
        c = coefficient_matrix(spec)
        assert abs(np.trace(c) - trace) <= 1e-10
        assert abs(f_target(spec, 0.0, 1.1) - LAM * trace) <= 1e-10
    # the embedding value is the quotable one: f_T(0) = -2 Delta lam
    assert abs(f_target(EMBED, 0.0, 0.0) - (-2 * 1.4 * LAM)) <= 1e-15


def test_f_target_matches_dense_trace_oracle():
    dim = 160
    cfg = HilbertConfig(dim=dim, lam=LAM)
    a = np.diag(np.sqrt(np.arange(1.0, dim)), 1)
    specs = [
        SINGLE,
        EMBED,
        NcftSpec(scenario=SingleState(c0=1 / np.sqrt(2), c1=1j / np.sqrt(2)), gap=0.8),
        NcftSpec(scenario=Transform(h=0.35, alpha=1.54), gap=0.1),
    ]
    for spec in specs:
        h = target_operator(spec, cfg).entries
        for k, tau in [(0.9, 0.3), (4.7, 1.9), (11.0, 5.0)]:
            xi = 1j * k * np.sqrt(LAM / 2.0) * np.exp(1j * tau)
            d_op = scipy.linalg.expm(xi * a.conj().T - np.conj(xi) * a)
            want = LAM * np.trace(h @ d_op.conj().T)
            got = f_target(spec, k, tau)
            assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_f_target_hermitian_symmetry():
    k = np.array([0.4, 2.7, 6.0])
    tau = np.array([0.0, 1.3, 4.4])
    for spec in (SINGLE, EMBED):
        a = f_target_grid(spec, k, tau)
        b = f_target_grid(spec, k, tau + np.pi)
        np.testing.assert_allclose(a, np.conj(b), atol=1e-14)


def test_embed_component_sum_regression():
    # The embedding f_T written out component by component (no stray
    # factorial factors on the cross terms).
    gap = 1.4
    for k, tau in [(1.9, 0.55), (6.5, 3.0)]:
        f = lambda m, m2: f_component(m, m2, k, tau, LAM)
        want = -(gap / 4.0) * (
            f(0, 0)
            + 3 * f(2, 2)
            + 3 * f(4, 4)
            + f(6, 6)
            + np.sqrt(3.0) * (f(0, 4) + f(4, 0) + f(2, 6) + f(6, 2))
        )
        assert abs(f_target(EMBED, k, tau) - want) <= 1e-14


def test_transform_limits():
    alpha = 1.5380
    h0 = NcftSpec(scenario=Transform(h=0.0, alpha=alpha), gap=1.4)
    got0 = coefficient_matrix(h0)
    want0 = np.zeros_like(got0)
    want0[:7, :7] = coefficient_matrix(EMBED)
    np.testing.assert_allclose(got0, want0, atol=1e-15)
    h1 = NcftSpec(scenario=Transform(h=1.0, alpha=alpha), gap=1.4)
    c0 = cat_word_vector(alpha, 0)
    c2 = cat_word_vector(alpha, 2)
    size = max(len(c0), len(c2))
    want = np.zeros((size, size))
    for w in (c0, c2):
        want[: len(w), : len(w)] += -1.4 * np.outer(w, w)
    got = coefficient_matrix(h1)
    assert got.shape == want.shape
    np.testing.assert_allclose(got, want, atol=1e-13)


def test_cat_word_vector_matches_codes_module():
    cfg = HilbertConfig(dim=80, lam=LAM)
    words = cat_words(cfg, alpha=1.5)
    by_residue = {0: words.zero_c, 2: words.one_c, 1: words.zero_e, 3: words.one_e}
    for residue, word in by_residue.items():
        vec = cat_word_vector(1.5, residue)
        padded = np.zeros(cfg.dim)
        padded[: len(vec)] = vec
        overlap = np.vdot(word.amplitudes, padded)
        assert abs(overlap - 1.0) <= 1e-12


def test_cat_word_truncation_warns():
    with pytest.warns(SeriesTruncation):
        cat_word_vector(2.0, 0, n_cap=3)


def test_spec_validation():
    with pytest.raises(ValueError):
        NcftSpec(scenario=EmbedBinomial(), gap=0.0)
    with pytest.raises(ValueError):
        NcftSpec(scenario=SingleState(c0=1.0, c1=0.5), gap=1.0)
    with pytest.raises(ValueError):
        NcftSpec(scenario=Transform(h=1.2, alpha=1.5), gap=1.0)
    with pytest.raises(ValueError):
        NcftSpec(scenario=AqecCat(alpha=-1.0), gap=1.0)
    with pytest.raises(ValueError):
        NcftSpec(scenario=EmbedBinomial(), gap=1.0, lam=-0.25)


def test_target_operator_guards():
    small = HilbertConfig(dim=4, lam=LAM)
    with pytest.raises(ValueError):
        target_operator(SINGLE, small)
    mismatched = HilbertConfig(dim=60, lam=0.5)
    with pytest.raises(ValueError):
        target_operator(SINGLE, mismatched)


# ---------------------------------------------------------------------------
# drive charts


def test_chart_identity_row0_and_shape():
    chart = drive_chart(SINGLE, N=20, M=20, k_max=8.0, omega=1.0)
    assert chart.amplitude.shape == (21, 21)
    np.testing.assert_array_equal(chart.amplitude[0], 0.0)
    k = chart.k_axis()
    tau = chart.omega * chart.t_axis()
    ft = f_target_grid(SINGLE, k, tau)
    field = chart.amplitude * np.exp(1j * chart.phase)
    np.testing.assert_allclose(field, k[:, None] * ft, atol=1e-13)
    assert np.all(chart.phase > -np.pi - 1e-12) and np.all(chart.phase <= np.pi + 1e-12)


def test_embed_chart_quarter_period():
    # Fock support on multiples of 4 photons apart makes the embedding drive
    # repeat every quarter period.
    chart = drive_chart(EMBED, N=20, M=20, k_max=8.0, omega=1.0)
    np.testing.assert_allclose(
        chart.amplitude[:, :5], chart.amplitude[:, 5:10], atol=1e-12
    )
    field = chart.amplitude * np.exp(1j * chart.phase)
    np.testing.assert_allclose(field[:, :5], field[:, 5:10], atol=1e-12)


def test_chart_tail_is_heavy_then_decays():
    # The |f_T| surface for binomial-word targets keeps a secondary hump out
    # to k ~ 14; only near k ~ 18 does the envelope drop below 1% of its peak.
    chart = drive_chart(EMBED, N=100, M=20, k_max=20.0, omega=1.0)
    profile = chart.amplitude.max(axis=1)
    k = chart.k_axis()
    peak = profile.max()
    at8 = profile[np.argmin(np.abs(k - 8.0))]
    assert at8 / peak >= 0.3
    assert profile[k >= 18.0].max() / peak <= 0.02


def test_chart_validation():
    with pytest.raises(ValueError):
        drive_chart(SINGLE, N=0, M=20, k_max=8.0, omega=1.0)
    with pytest.raises(ValueError):
        drive_chart(SINGLE, N=20, M=20, k_max=0.0, omega=1.0)


def test_chart_serialization_roundtrip(tmp_path):
    chart = drive_chart(SINGLE, N=6, M=5, k_max=8.0, omega=1.0)
    stem = tmp_path / "single"
    paths = chart_to_files(chart, SINGLE, str(stem))
    amp = np.genfromtxt(paths[0], delimiter=",", skip_header=1)
    np.testing.assert_array_equal(amp[:, 0], chart.k_axis())
    np.testing.assert_array_equal(amp[:, 1:], chart.amplitude)
    ph = np.genfromtxt(paths[1], delimiter=",", skip_header=1)
    np.testing.assert_array_equal(ph[:, 1:], chart.phase)
    meta = json.loads((tmp_path / "single.json").read_text())
    assert meta["N"] == 6 and meta["M"] == 5
    assert meta["k_max"] == 8.0 and meta["lambda"] == LAM
    assert meta["scenario"]["name"] == "SingleState"
    assert meta["scenario"]["c0"] == [0.5, 0.0]
    # header rows restorable into an identical chart
    rebuilt = DriveChart(
        N=meta["N"], M=meta["M"], k_max=meta["k_max"], omega=meta["omega"],
        lam=meta["lambda"], amplitude=amp[:, 1:], phase=ph[:, 1:],
    )
    np.testing.assert_array_equal(rebuilt.amplitude, chart.amplitude)


# ---------------------------------------------------------------------------
# Husimi surface and operator reconstruction


def test_husimi_matches_q_function_route():
    cfg = HilbertConfig(dim=60, lam=LAM)
    grid_spec = dict(x_min=-4, x_max=4, p_min=-4, p_max=4, nx=81, np=81)
    direct = husimi_target(EMBED, grid_spec)
    via_q = q_function(target_operator(EMBED, cfg), grid_spec)
    np.testing.assert_allclose(direct.values, via_q.values, atol=1e-12)


def test_husimi_origin_value():
    grid_spec = dict(x_min=-1, x_max=1, p_min=-1, p_max=1, nx=3, np=3)
    grid = husimi_target(EMBED, grid_spec)
    # <alpha=0|H_T|alpha=0> = -Delta |<0|0_b>|^2 = -Delta/4
    assert abs(grid.values[1, 1] - (-1.4 / 4.0)) <= 1e-14


def test_husimi_symmetries():
    grid_spec = dict(x_min=-5, x_max=5, p_min=-5, p_max=5, nx=101, np=101)
    single = husimi_target(SINGLE, grid_spec).values
    # two-photon spacing: pi rotation symmetry
    np.testing.assert_allclose(single, single[::-1, ::-1], atol=1e-13)
    embed = husimi_target(EMBED, grid_spec).values
    # four-photon spacing: pi/2 rotation symmetry
    np.testing.assert_allclose(embed, embed.T[:, ::-1], atol=1e-13)


def test_reconstruct_converges_at_wide_chart():
    cfg = HilbertConfig(dim=40, lam=LAM)
    target = target_operator(EMBED, cfg).entries
    rec = reconstruct(EMBED, cfg, N=60, M=60, k_max=16.0).entries
    assert np.max(np.abs(rec - rec.conj().T)) <= 1e-12
    block = slice(0, 12)
    err = np.linalg.norm((rec - target)[block, block]) / np.linalg.norm(target[block, block])
    assert err <= 0.02


def test_reconstruct_tail_loss_at_narrow_chart():
    # The k <= 8 disc misses most of the secondary hump: reconstruction there
    # is structurally wrong no matter how fine the grid.
    cfg = HilbertConfig(dim=40, lam=LAM)
    target = target_operator(EMBED, cfg).entries
    block = slice(0, 12)
    errs = []
    for n in (20, 40, 80):
        rec = reconstruct(EMBED, cfg, N=n, M=n, k_max=8.0).entries
        errs.append(
            np.linalg.norm((rec - target)[block, block])
            / np.linalg.norm(target[block, block])
        )
    assert errs[0] > 0.5
    # refining the quadrature still improves things monotonically
    assert errs[0] > errs[1] > errs[2]


def test_reconstruct_lambda_guard():
    cfg = HilbertConfig(dim=40, lam=0.5)
    with pytest.raises(ValueError):
        reconstruct(EMBED, cfg, N=10, M=10, k_max=8.0)
