"""Evans 函数：复合矩阵、绕数与谱判定"""
import numpy as np
import pytest

from app.analysis.discrete_operator import assemble_operator, discrete_spectrum, discrete_spectrum_and_resolvent
from app.analysis.evans import (EvansFunction, compound_matrix, high_frequency_radius, limiting_splitting,
                                spectral_verdict, wedge, wedge_pairing, winding_number)
from app.analysis.profile_solver import solve_profile
from app.utils.contour import adaptive_winding, half_disc_contour


def test_compound_matrix_eigenvalues_are_pair_sums():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((4, 4))
    np.testing.assert_allclose(compound_matrix(A, 1), A)
    values = np.linalg.eigvals(A)
    expected = np.sort_complex(np.array([values[i] + values[j] for i in range(4) for j in range(i + 1, 4)]))
    np.testing.assert_allclose(np.sort_complex(np.linalg.eigvals(compound_matrix(A, 2))), expected, atol=1e-10)
    assert compound_matrix(A, 4)[0, 0] == pytest.approx(np.trace(A))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_wedge_pairing_is_block_determinant(m):
    rng = np.random.default_rng(m)
    Y = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    left, right = Y[:, :m], Y[:, m:]
    pairing = wedge_pairing(wedge(left), wedge(right), 4, m)
    assert pairing == pytest.approx(np.linalg.det(Y), rel=1e-10)
    assert wedge(Y)[0] == pytest.approx(np.linalg.det(Y), rel=1e-10)


def test_argument_principle_on_polynomial():
    path = half_disc_contour(4.0, 0.05)
    result = adaptive_winding(lambda z: (z - 1.0) * (z - 2.0 - 1.0j) * (z + 1.0), path)
    assert result.winding == 2


def test_burgers_evans_function(burgers_profile):
    """平移零点在原点，Re λ ≥ 0.05 的半圆盘内无零点"""
    evans = EvansFunction(burgers_profile)
    assert evans.d == 1
    assert evans.coefficients.N == 2
    scale = abs(evans([], 1.0))
    assert scale > 0.0
    # 原点处单零点：|D| 随 λ 线性趋于零
    assert abs(evans([], 1e-4)) / abs(evans([], 1e-3)) == pytest.approx(0.1, abs=5e-3)
    certificate = limiting_splitting(evans.system([], 1.0))
    assert certificate.k + (certificate.N - certificate.k) == 2
    assert certificate.gap_plus > 0.0 and certificate.gap_minus > 0.0

    assert high_frequency_radius(burgers_profile) == pytest.approx(4.0)
    assert winding_number(evans, [], 4.0, 0.05).winding == 0
    verdict = spectral_verdict(burgers_profile, [], radius=4.0, shift=0.05, evans=evans)
    assert verdict.weak_spectral and verdict.strong_spectral
    assert verdict.status == "stable"
    assert not verdict.witnesses


def test_evans_cache_reuses_evaluations(burgers_profile):
    evans = EvansFunction(burgers_profile)
    first = evans.evaluate([], 0.5 + 0.5j)
    assert evans.evaluate([], 0.5 + 0.5j) is first
    assert len(evans.cache) == 1


def test_orthogonal_method_same_winding(burgers_profile):
    evans = EvansFunction(burgers_profile, method="orthogonal")
    assert abs(evans([], 1.0)) > 0.0
    assert winding_number(evans, [], 4.0, 0.05).winding == 0


@pytest.mark.slow
def test_unstable_front_has_growing_mode(front_profile):
    """ξ̃ = 1 时 λ = 1 为孤立本征值"""
    verdict = spectral_verdict(front_profile, [[0.0], [1.0]], radius=4.0, shift=0.05)
    assert verdict.weak_spectral is False
    windings = {tuple(w["xi_tilde"]): w["winding"] for w in verdict.windings}
    assert windings[(0.0,)] == 0
    assert windings[(1.0,)] == 1
    zeros = [z for item in verdict.witnesses for z in item.get("zeros", [])]
    assert any(abs(complex(z["re"], z["im"]) - 1.0) < 1e-2 for z in zeros)

    spectrum = discrete_spectrum_and_resolvent(front_profile, [1.0], resolvent_at=[2.0])
    assert any(abs(z - 1.0) < 2e-2 for z in spectrum.eigenvalues)
    assert spectrum.resolvent["coarse"][0] > 0.0


def test_doubling_domain_leaves_evans_function_unchanged(burgers, burgers_triple):
    """迹归一化后 D 与截断长度 L 无关"""
    short = EvansFunction(solve_profile(burgers, burgers_triple, L=20.0))
    long = EvansFunction(solve_profile(burgers, burgers_triple, L=40.0, grid_points=3201))
    for lam in (1.0, 0.5 + 1.0j):
        assert long([], lam) == pytest.approx(short([], lam), rel=1e-6)


@pytest.mark.parametrize("lam", [1.0, 0.5 + 1.0j, 2.0 - 0.5j])
def test_compound_and_orthogonal_methods_agree(burgers_profile, lam):
    compound = EvansFunction(burgers_profile, method="compound")
    orthogonal = EvansFunction(burgers_profile, method="orthogonal")
    assert abs(orthogonal([], lam)) == pytest.approx(abs(compound([], lam)), rel=1e-6)


@pytest.mark.slow
def test_weak_navier_stokes_shock_is_spectrally_stable(ns_mach105_profile):
    """Mach 1.05：{Re λ ≥ 0.02, |λ| ≤ R} 内无零点，点数加倍绕数不变"""
    evans = EvansFunction(ns_mach105_profile)
    radius = high_frequency_radius(ns_mach105_profile)
    assert winding_number(evans, [], radius, 0.02).winding == 0
    assert winding_number(evans, [], radius, 0.02, initial_points=128, max_points=8192).winding == 0
    verdict = spectral_verdict(ns_mach105_profile, [], radius=radius, shift=0.02, evans=evans)
    assert verdict.strong_spectral


def test_translation_eigenvalue_vanishes_on_wide_domain(burgers, burgers_triple):
    """守恒格式下平移特征值只受 ±L 处截断影响"""
    profile = solve_profile(burgers, burgers_triple, L=20.0)
    eigenvalues = discrete_spectrum(assemble_operator(profile, [], nodes=400))
    assert np.min(np.abs(eigenvalues)) < 1e-6
    assert eigenvalues[0].real == pytest.approx(0.0, abs=1e-6)


@pytest.mark.slow
def test_unstable_eigenvalue_converges_at_second_order(front_profile):
    """ξ̃ = 1 的孤立特征值：Richardson 比值给出二阶收敛"""
    values = []
    for nodes in (200, 400, 800):
        eigenvalues = discrete_spectrum(assemble_operator(front_profile, [1.0], nodes=nodes), re_min=0.5)
        values.append(eigenvalues[np.argmin(np.abs(eigenvalues - 1.0))])
    order = np.log2(abs(values[0] - values[1]) / abs(values[1] - values[2]))
    assert order == pytest.approx(2.0, abs=0.3)
    assert abs(values[-1] - 1.0) < 2e-2
