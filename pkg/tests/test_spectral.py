import numpy as np
import pytest

from dnls_ring import (LatticeConfig, Potential, alpha_beta, block_basis,
                       block_data, classify_stability, expected_spectrum,
                       full_spectrum, hessian_at_equilibrium, matching_distance)


CFG = LatticeConfig(6, 1)
CUBIC = Potential.cubic(1.0)


def test_alpha_beta_closed_forms():
    # n=6, m=1: alpha_k = 2 sin^2(k pi/6), beta_k = sqrt(3) sin(k pi/3)
    for k in range(1, 7):
        alpha, beta = alpha_beta(CFG, k)
        assert alpha == pytest.approx(2.0 * np.sin(k * np.pi / 6) ** 2, abs=1e-14)
        assert beta == pytest.approx(np.sqrt(3.0) * np.sin(k * np.pi / 3), abs=1e-14)


def test_block_basis_orthonormality():
    rng = np.random.default_rng(0)
    for n, m in [(5, 1), (6, 1), (7, 3)]:
        cfg = LatticeConfig(n, m)
        cols = []
        for k in range(1, n + 1):
            for z in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
                cols.append(block_basis(cfg, k, z))
        T = np.array(cols).T
        assert np.abs(T.conj().T @ T - np.eye(2 * n)).max() <= 1e-12


def test_block_basis_constant_mode():
    cfg = LatticeConfig(6, 0)
    v = block_basis(cfg, 6, np.array([1.0, 0.0]))
    expected = np.tile([1.0, 0.0], 6) / np.sqrt(6.0)
    assert np.abs(v - expected).max() <= 1e-14


def test_block_diagonalization_against_hessian():
    # D^2H(a_m) T_k z = T_k B_k z for every mode and random z
    rng = np.random.default_rng(1)
    for n, m, pot, a in [(6, 1, CUBIC, 0.2), (5, 2, Potential.saturable(1.0), 0.6),
                         (8, 3, Potential.cubic(-1.0), 1.0), (3, 1, CUBIC, 0.4)]:
        cfg = LatticeConfig(n, m)
        H = hessian_at_equilibrium(cfg, pot, a)
        for k in range(1, n + 1):
            bd = block_data(cfg, pot, a, k)
            for _ in range(10):
                z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                lhs = H @ block_basis(cfg, k, z)
                rhs = block_basis(cfg, k, bd.B @ z)
                assert np.abs(lhs - rhs).max() <= 1e-10


def test_block_fixture_k1():
    bd = block_data(CFG, CUBIC, 0.2, 1)
    assert bd.alpha == pytest.approx(0.5)
    assert bd.beta == pytest.approx(1.5)
    assert bd.phi == pytest.approx(0.16)
    assert bd.gamma == pytest.approx(-8.0)
    assert bd.nu_plus.real == pytest.approx(1.9582575694955841, abs=1e-12)
    assert bd.nu_minus.real == pytest.approx(1.0417424305044159, abs=1e-12)


def test_block_fixture_k3():
    bd = block_data(CFG, CUBIC, 0.2, 3)
    assert bd.alpha == pytest.approx(2.0)
    assert bd.beta == pytest.approx(0.0, abs=1e-15)
    assert bd.phi == pytest.approx(0.04)
    assert bd.gamma == pytest.approx(1.0)
    assert bd.nu_plus.real == pytest.approx(2.0 * np.sqrt(0.96), abs=1e-12)
    assert bd.nu_minus.real == pytest.approx(-2.0 * np.sqrt(0.96), abs=1e-12)


def test_block_k_equals_n():
    bd = block_data(CFG, CUBIC, 0.2, 6)
    assert bd.phi is None and bd.gamma is None
    assert np.abs(bd.B - np.diag([2 * 0.04 * 1.0, 0.0])).max() <= 1e-14


def test_zero_amplitude_frequencies():
    for k in range(1, 6):
        bd = block_data(CFG, CUBIC, 0.0, k)
        assert bd.phi == 0.0
        assert bd.nu_plus.real == pytest.approx(bd.beta + abs(bd.alpha), abs=1e-13)
        assert bd.nu_minus.real == pytest.approx(bd.beta - abs(bd.alpha), abs=1e-13)


def test_mode_reflection_identity():
    # {nu_{n-k}^+-} = {-nu_k^+-}: alpha is even, beta odd under k -> n-k
    for n, m, a in [(6, 1, 0.2), (7, 2, 0.5), (8, 1, 0.9)]:
        cfg = LatticeConfig(n, m)
        for k in range(1, n):
            b1 = block_data(cfg, CUBIC, a, k)
            b2 = block_data(cfg, CUBIC, a, n - k)
            s1 = sorted([b1.nu_plus, b1.nu_minus], key=lambda z: (z.real, z.imag))
            s2 = sorted([-b2.nu_plus, -b2.nu_minus], key=lambda z: (z.real, z.imag))
            assert np.abs(np.array(s1) - np.array(s2)).max() <= 1e-12


def test_full_spectrum_matches_blocks():
    got = full_spectrum(CFG, CUBIC, 0.2, cluster_tol=1e-6)
    want = expected_spectrum(CFG, CUBIC, 0.2)
    assert matching_distance(got, want) <= 1e-8


def test_spectrum_closed_under_negation_and_conjugation():
    eig = full_spectrum(LatticeConfig(7, 2), Potential.saturable(1.0), 0.6)
    assert matching_distance(eig, -eig) <= 1e-7
    assert matching_distance(eig, eig.conj()) <= 1e-7


def test_gauge_double_zero():
    eig = full_spectrum(LatticeConfig(3, 0), CUBIC, 0.0)
    zeros = np.sort(np.abs(eig))[:2]
    assert zeros.max() <= 1e-10


def test_phi_monotone_in_k_focusing():
    # for sigma > 0 (focusing, m < n/4) phi_k decreases with k up to n/2
    for a in [0.2, 0.5, 0.9]:
        phis = [block_data(CFG, CUBIC, a, k).phi for k in range(1, 4)]
        assert phis[0] >= phis[1] >= phis[2]


def test_frequency_signs_match_cases():
    # phi < gamma: nu^+ > 0 > nu^-; gamma < phi < 1: both positive
    rng = np.random.default_rng(5)
    for _ in range(40):
        n = int(rng.integers(3, 9))
        m = int(rng.integers(0, n // 2 + 1))
        if 4 * m == n:
            continue
        cfg = LatticeConfig(n, m)
        a = float(rng.uniform(0.05, 1.0))
        c = float(rng.choice([-1.0, 1.0]))
        pot = Potential.cubic(c)
        for k in range(1, n):
            bd = block_data(cfg, pot, a, k)
            if bd.phi < bd.gamma:
                assert bd.nu_plus.real > 0 > bd.nu_minus.real
            elif bd.gamma < bd.phi < 1.0 and 2 * k < n:
                # both roots carry the sign of beta, positive below n/2
                assert bd.nu_plus.real > 0 and bd.nu_minus.real > 0


def test_stability_fixture_values():
    v = classify_stability(CFG, CUBIC, 0.2)
    assert v.sigma == 1
    assert v.phi_1 == pytest.approx(0.16)
    assert v.stable and v.covered and v.empirical_stable

    v2 = classify_stability(CFG, CUBIC, 0.6)
    assert v2.phi_1 == pytest.approx(1.44)
    assert not v2.covered
    assert not v2.empirical_stable
    assert v2.max_real_part > 1e-4


def test_stability_large_wavenumber_and_defocusing():
    cfg3 = LatticeConfig(6, 3)
    for a in np.linspace(0.05, 2.0, 15):
        assert classify_stability(cfg3, CUBIC, float(a)).stable
        assert classify_stability(CFG, Potential.cubic(-1.0), float(a)).stable


def test_stability_per_k_real_flags():
    v = classify_stability(CFG, CUBIC, 0.2)
    assert len(v.per_k) == 5
    assert all(r.real_pair for r in v.per_k)
