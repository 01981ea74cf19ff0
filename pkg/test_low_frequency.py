"""低频结构：γ、β、根追踪与掠射分支展开"""
import numpy as np
import pytest

from app.analysis.evans import EvansFunction
from app.analysis.inviscid_stability import GlancingSet, glancing_set, lopatinski_scan
from app.analysis.low_frequency import (BranchData, analyze_low_frequency, beta_coefficient, branch_expansion,
                                        default_rays, jordan_branch_comparison, perturbed_jordan_block,
                                        predicted_branch_eigenvalues, reduced_evans_gamma, root_tracking,
                                        vanishing_order)
from app.models import NavierStokes
from app.utils.errors import IndeterminateError

TAU0 = 0.7
BETA = 0.3 + 0.1j


def _model_evans(xi, lam):
    """零点恰为 λ* = iρτ₀ − βρ² 的模型函数"""
    rho = float(np.linalg.norm(xi))
    return lam - 1j * TAU0 * rho + BETA * rho ** 2


def test_gamma_from_model_function():
    def lop(xi, lam):
        return lam + 0.5j * float(np.sum(xi))

    def evans(xi, lam):
        return 2.0 * lop(xi, lam) + lam ** 3

    estimate = reduced_evans_gamma(evans, lop, [0.6], 0.8)
    assert estimate.gamma == pytest.approx(2.0, abs=1e-6)
    assert estimate.remainder_order > 1.5
    assert estimate.tangency_ok
    assert vanishing_order(evans, [0.6], 0.8) == 1


def test_gamma_refuses_zero_lopatinski_direction():
    with pytest.raises(IndeterminateError):
        reduced_evans_gamma(lambda xi, lam: lam, lambda xi, lam: 0.0, [1.0], 1.0)


def test_beta_from_model_function():
    estimate = beta_coefficient(_model_evans, [1.0], TAU0)
    assert estimate.beta == pytest.approx(BETA, abs=1e-6)
    assert estimate.denominator == pytest.approx(1.0, abs=1e-6)


def test_beta_refused_near_glancing_set():
    glancing = [GlancingSet(family=0, curves=[[([1.0], TAU0, 0.0)]], multiplicities=[2])]
    with pytest.raises(IndeterminateError):
        beta_coefficient(_model_evans, [1.0], TAU0, glancing=glancing)


def test_root_tracking_recovers_expansion():
    track = root_tracking(_model_evans, [1.0], TAU0, beta_guess=BETA)
    assert len(track.roots) == 6
    for rho, z in zip(track.rhos, track.roots):
        assert z == pytest.approx(1j * TAU0 * rho - BETA * rho ** 2, abs=1e-9)
    assert track.beta_fit == pytest.approx(BETA, abs=1e-6)
    assert not track.onset


def test_root_tracking_detects_onset():
    def evans(xi, lam):
        rho = float(np.linalg.norm(xi))
        return lam - 1j * TAU0 * rho - 0.5 * rho ** 2

    track = root_tracking(evans, [1.0], TAU0)
    assert track.onset


def test_default_rays_in_closed_right_half_plane():
    for d in (1, 2, 3):
        rays = default_rays(d)
        assert len(rays) >= 3
        for xi0, lam0 in rays:
            assert len(xi0) == d - 1
            assert lam0.real >= 0.0
            assert np.linalg.norm(xi0) ** 2 + abs(lam0) ** 2 == pytest.approx(1.0)


@pytest.mark.parametrize("s,m", [(2, 1), (2, 2), (3, 1)])
def test_jordan_branch_expansion_order(s, m):
    """摄动块 Jordan 的特征值与 ε^j·i·(pσ − iqρ)^{1/s} 展开之差按 2/s 阶衰减"""
    Q = np.diag([1.0, 2.0][:m])
    data = BranchData(s=s, m=m, p=1.0, Q=Q)
    assert data.definite
    grid = [(t, t) for t in np.logspace(-6, -3, 7)]
    expansion = jordan_branch_comparison(data, grid, seed=5)
    assert expansion.fitted_order >= 2.0 / s - 0.15
    assert len(expansion.predicted_eigenvalues[0]) == s * m


def test_unperturbed_jordan_block_matches_prediction():
    J = perturbed_jordan_block(2, 1, -1.0, np.array([[0.5]]), 1e-2, 2e-2)
    measured = np.sort_complex(1j * np.linalg.eigvals(J))
    predicted = np.sort_complex(np.array(predicted_branch_eigenvalues(2, -1.0, np.array([[0.5]]), 1e-2, 2e-2)))
    np.testing.assert_allclose(measured, predicted, atol=1e-12)


def test_indefinite_branch_detected():
    data = BranchData(s=2, m=2, p=1.0, Q=np.diag([1.0, -1.0]))
    assert not data.definite


def test_acoustic_glancing_branch():
    """亚声速状态的声学族掠射点：s = 2，m = 1，sgn(p)Q 正定"""
    system = NavierStokes(d=2)
    U = system.from_natural(np.array([1.0, 0.3, 0.0, 1.0]))
    gset = glancing_set(system, U, 0, [[1.0]])
    xi_tilde, _, x1 = gset.curves[0][0]
    expansion = branch_expansion(system, U, 0, xi_tilde, x1)
    assert expansion.s == 2
    assert expansion.m == 1
    assert expansion.p < 0.0
    assert expansion.definite
    assert expansion.fitted_order > 0.8


def test_burgers_low_frequency(burgers, burgers_triple, burgers_profile):
    """一维：ℓ = 1，γ 与射线无关，精化判定退化为 Lopatinski 判定"""
    evans = EvansFunction(burgers_profile)
    scan = lopatinski_scan(burgers, burgers_triple)
    report = analyze_low_frequency(evans, scan)
    assert report.ell == 1
    assert report.transversal
    assert report.gamma_spread < 1e-2
    assert report.weak_refined == scan.weak_stable
    assert report.strong_refined == scan.strong_stable


def test_multid_burgers_beta_matches_root_tracking(burgers_2d, burgers_2d_triple, burgers_2d_profile):
    """各向同性粘性：λ*(ξ̃) = −ν_T|ξ̃|²，中性根 (±1, 0) 处 β = ν_T = 1"""
    evans = EvansFunction(burgers_2d_profile)
    scan = lopatinski_scan(burgers_2d, burgers_2d_triple)
    report = analyze_low_frequency(evans, scan)
    assert len(report.beta) == 2
    for estimate in report.beta:
        assert estimate.beta.real > 0
        assert estimate.beta == pytest.approx(1.0, rel=0.02)
    assert report.weak_refined and report.strong_refined
    track = report.root_track
    assert track is not None
    assert not track.onset
    assert track.beta_fit == pytest.approx(report.beta[0].beta, rel=0.02)


def test_front_coupling_flips_beta(front_system, front_profile):
    """B²² = ν_T − κ(1 − ū²) 时 β = ν_T − 2κ/3 < 0，精化弱稳定性失败"""
    evans = EvansFunction(front_profile)
    scan = lopatinski_scan(front_system, front_profile.triple)
    report = analyze_low_frequency(evans, scan)
    assert report.beta
    for estimate in report.beta:
        assert estimate.beta.real == pytest.approx(1.0 - 2.0 * 2.5 / 3.0, rel=0.03)
    assert report.weak_refined is False
    assert report.strong_refined is False
