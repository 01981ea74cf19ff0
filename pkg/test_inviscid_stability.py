"""无粘稳定性：Lopatinski 行列式、Liu–Majda 判据与掠射集"""
import numpy as np
import pytest

from app.analysis.inviscid_stability import (Frequency, LopatinskiDeterminant, glancing_distance, glancing_set,
                                             hyperbolic_symbol_subspaces, liu_majda_delta, lopatinski_det,
                                             lopatinski_scan)
from app.analysis.profile_solver import rankine_hugoniot, shock_from_closure
from app.models import Burgers, NavierStokes
from app.utils.errors import ConfigError

SOUND_SPEED = np.sqrt(1.4 * 0.4)


@pytest.fixture(scope="module")
def ns_triple():
    system = NavierStokes()
    return system, shock_from_closure(system, system.from_natural(np.array([1.0, 0.0, 1.0])), mach=1.5)


def test_frequency_polar_coordinates():
    freq = Frequency.from_polar(2.0, [0.6], 0.8j)
    assert freq.rho == pytest.approx(2.0)
    rho, xi0, lam0 = freq.polar()
    np.testing.assert_allclose(xi0, [0.6])
    assert lam0 == pytest.approx(0.8j)
    assert freq.tau == pytest.approx(1.6)
    with pytest.raises(ConfigError):
        Frequency((0.0,), 0j).polar()


def test_burgers_determinant_is_linear_in_lambda(burgers, burgers_triple):
    lop = LopatinskiDeterminant(burgers, burgers_triple)
    assert lop([], 1.0) == pytest.approx(-2.0)
    assert lop([], 0.5 + 2.0j) == pytest.approx(-2.0 * (0.5 + 2.0j))
    assert liu_majda_delta(burgers, burgers_triple) == pytest.approx(-2.0)
    scan = lopatinski_scan(burgers, burgers_triple)
    assert scan.weak_stable and scan.strong_stable
    assert scan.liu_majda_delta == pytest.approx(-2.0)


def test_gas_dynamics_liu_majda(ns_triple):
    """一维 Δ(0, λ) = λδ 且理想气体 Lax 激波 δ ≠ 0"""
    system, triple = ns_triple
    delta = liu_majda_delta(system, triple)
    assert abs(delta) > 1e-6
    for lam in (1.0, 2.0 + 1.0j, 0.1 - 3.0j):
        value = lopatinski_det(system, triple, Frequency((), complex(lam))).value
        assert value == pytest.approx(lam * delta, rel=1e-8)
    scan = lopatinski_scan(system, triple)
    assert scan.weak_stable and scan.strong_stable
    assert not scan.unstable_witnesses


def test_decaying_subspace_dimensions(ns_triple):
    system, triple = ns_triple
    freq = Frequency((), 1.0 + 0.5j)
    lop = LopatinskiDeterminant(system, triple)
    plus = hyperbolic_symbol_subspaces(system, triple, "+", freq)
    minus = hyperbolic_symbol_subspaces(system, triple, "-", freq)
    assert plus.basis.shape[1] == lop.k_plus
    assert minus.basis.shape[1] == lop.k_minus
    assert lop.k_plus + lop.k_minus == system.n - 1
    with pytest.raises(ConfigError):
        hyperbolic_symbol_subspaces(system, triple, "0", freq)


def test_origin_is_not_a_frequency(ns_triple):
    system, triple = ns_triple
    with pytest.raises(ConfigError):
        lopatinski_det(system, triple, Frequency((), 0j))


def test_glancing_set_empty_in_one_dimension(ns_triple):
    system, triple = ns_triple
    assert glancing_set(system, triple.U_plus, 0, [[1.0]]).curves == []


def test_acoustic_glancing_point():
    """a(ξ) = u₁ξ₁ − c|ξ| 在 ξ₁/|ξ| = u₁/c 处驻定"""
    system = NavierStokes(d=2)
    U = system.from_natural(np.array([1.0, 0.3, 0.0, 1.0]))
    gset = glancing_set(system, U, 0, [[1.0], [2.0]])
    ratio = 0.3 / SOUND_SPEED
    x1 = ratio / np.sqrt(1.0 - ratio ** 2)
    assert len(gset.curves) == 1
    (xi_a, tau_a, x1_a), (xi_b, tau_b, x1_b) = gset.curves[0]
    assert x1_a == pytest.approx(x1, rel=1e-8)
    assert x1_b == pytest.approx(2.0 * x1, rel=1e-8)
    assert tau_a == pytest.approx(-(0.3 * x1 - SOUND_SPEED * np.sqrt(1.0 + x1 ** 2)), rel=1e-8)
    assert gset.multiplicities == [2]
    assert glancing_distance([gset], xi_a, tau_a) == pytest.approx(0.0, abs=1e-12)
    assert glancing_distance([gset], [1.0], 0.0) > 0.1


@pytest.fixture(scope="module")
def ns2d_triple():
    system = NavierStokes(d=2)
    U_minus = system.mach_state(np.array([1.0, 0.0, 0.0, 1.0]), 1.5)
    return system, rankine_hugoniot(system, U_minus, U_plus=system.normal_shock_guess(U_minus))


@pytest.mark.parametrize("xi, lam", [(0.4, 0.3 + 0.5j), (-0.7, 1.0 + 0.2j), (0.2, 0.05 - 0.9j), (0.0, 0.6 + 0.8j)])
def test_two_dimensional_homogeneity_and_conjugation(ns2d_triple, xi, lam):
    """Δ(cξ̃, cλ) = cΔ(ξ̃, λ)，Δ(−ξ̃, λ̄) = conj Δ(ξ̃, λ)"""
    system, triple = ns2d_triple
    lop = LopatinskiDeterminant(system, triple)
    value = lop([xi], lam)
    assert abs(value) > 1e-6
    for c in (2.0, 10.0):
        assert lop([c * xi], c * lam) == pytest.approx(c * value, rel=1e-8)
    assert lop([-xi], np.conj(lam)) == pytest.approx(np.conj(value), rel=1e-10)


def test_multid_burgers_is_only_weakly_stable(burgers_2d, burgers_2d_triple):
    """[F^ξ̃] = 0 时 Δ = λ[u]，中性零点为 τ = 0 上的 ξ̃ = ±1"""
    lop = LopatinskiDeterminant(burgers_2d, burgers_2d_triple)
    assert lop([1.0], 1e-8) == pytest.approx(-2e-8, rel=1e-6)
    scan = lopatinski_scan(burgers_2d, burgers_2d_triple)
    assert scan.weak_stable
    assert not scan.strong_stable
    assert not scan.unstable_witnesses
    assert scan.min_abs_delta <= scan.threshold
    assert sorted(root["xi_tilde"][0] for root in scan.neutral_roots) == pytest.approx([-1.0, 1.0], abs=1e-6)
    assert all(abs(root["tau"]) < 1e-6 for root in scan.neutral_roots)


def test_transverse_speed_moves_neutral_root():
    """F² = cu：中性零点位于 τ = −cξ̃，需在采样点之间精化"""
    system = Burgers(d=2, transverse_speed=0.5)
    triple = rankine_hugoniot(system, [1.0], U_plus=[-1.0])
    scan = lopatinski_scan(system, triple, points=64)
    assert scan.weak_stable and not scan.strong_stable
    assert len(scan.neutral_roots) == 2
    for root in scan.neutral_roots:
        xi = root["xi_tilde"][0]
        assert abs(root["tau"] + 0.5 * xi) < 1e-6
        assert xi ** 2 + root["tau"] ** 2 == pytest.approx(1.0, abs=1e-9)


def test_three_dimensional_scan_finds_neutral_equator():
    """d = 3 时中性零点构成赤道 τ = 0，采用最近邻判定局部极小"""
    system = Burgers(d=3)
    triple = rankine_hugoniot(system, [1.0], U_plus=[-1.0])
    scan = lopatinski_scan(system, triple, points=96)
    assert scan.weak_stable and not scan.strong_stable
    assert scan.neutral_roots
    for root in scan.neutral_roots:
        assert abs(root["tau"]) < 1e-6
        assert np.linalg.norm(root["xi_tilde"]) == pytest.approx(1.0, abs=1e-6)
