"""结构证书：真耦合、补偿矩阵与严格耗散性的等价关系"""
import numpy as np
import pytest

from app.analysis.structure_checks import (build_compensating_matrix, compensating_matrix_family,
                                           dissipativity_scan, endpoint_matrices, genuine_coupling_check,
                                           genuine_coupling_matrices, structure_certificate, symmetrize)
from app.dao import ModelCatalogDAO
from app.models import NavierStokes
from app.utils.errors import GenuineCouplingError


def _random_symmetric(rng, n):
    M = rng.standard_normal((n, n))
    return 0.5 * (M + M.T)


def _coupled_case(rng, n):
    """秩亏的 B = GGᵀ，一般位置下满足真耦合"""
    A = _random_symmetric(rng, n)
    G = rng.standard_normal((n, rng.integers(1, n)))
    return A, G @ G.T


def _decoupled_case(rng, n):
    """B 以 A 的某个特征向量为核，真耦合不成立"""
    A = _random_symmetric(rng, n)
    _, vectors = np.linalg.eigh(A)
    v = vectors[:, rng.integers(n)]
    P = np.eye(n) - np.outer(v, v)
    G = rng.standard_normal((n, n))
    return A, P @ G @ G.T @ P


def test_coupling_compensator_and_dissipativity_agree():
    """随机对称系统上 (K0)、(K2)、(K3) 三者同真同假"""
    rng = np.random.default_rng(20240611)
    checked = 0
    for trial in range(200):
        n = int(rng.integers(2, 6))
        A, B = (_coupled_case if trial % 2 == 0 else _decoupled_case)(rng, n)
        coupling = genuine_coupling_matrices(A, B)
        if 1e-10 < coupling.margin < 1e-2:
            continue
        diss = dissipativity_scan([A], B[None, None])
        if coupling.holds:
            comp = build_compensating_matrix(np.eye(n), A, B)
            assert comp.theta > 0.0
            assert comp.identity_residual <= 1e-10 * max(1.0, np.linalg.norm(B))
            K = comp.in_state_coordinates()
            np.testing.assert_allclose(K, -K.T, atol=1e-12)
            sym = 0.5 * ((B - K @ A) + (B - K @ A).T)
            assert np.min(np.linalg.eigvalsh(sym)) > 0.0
            assert diss.passed
        else:
            with pytest.raises(GenuineCouplingError):
                build_compensating_matrix(np.eye(n), A, B)
            assert not diss.passed
        checked += 1
    assert checked > 150


def test_full_rank_viscosity_needs_no_compensator():
    rng = np.random.default_rng(1)
    A = _random_symmetric(rng, 3)
    comp = build_compensating_matrix(np.eye(3), A, np.eye(3))
    assert np.all(comp.K == 0.0)
    assert comp.theta == pytest.approx(1.0)


def test_navier_stokes_endpoint_certificate():
    system = NavierStokes(d=2)
    U = system.from_natural(np.array([1.0, 0.4, -0.2, 1.3]))
    assert genuine_coupling_check(system, U).holds
    cert = structure_certificate(system, U)
    assert cert["passed"]
    assert cert["compensating_matrix"]["theta"] > 0.0
    assert cert["dissipativity"]["pass"]

    form = symmetrize(system, U)
    K = compensating_matrix_family(form, [0.6, 0.8])
    np.testing.assert_allclose(compensating_matrix_family(form, [1.2, 1.6]), 2.0 * K, rtol=1e-10, atol=1e-12)


def test_spinodal_state_fails_genuine_coupling():
    """van der Waals 拐点 p_ρ = 0：熵波落入粘性核"""
    system = ModelCatalogDAO.create("navier_stokes", {"eos": "van_der_waals"})
    U = system.from_natural(np.array([1.5, 0.0, 2.25]))
    result = genuine_coupling_check(system, U)
    assert not result.holds
    assert result.witness is not None
    # 熵波：动量分量为零
    assert abs(result.witness[1]) < 1e-6
    cert = structure_certificate(system, U)
    assert not cert["passed"]
    assert not cert["dissipativity"]["pass"]

    good = system.from_natural(np.array([1.0, 0.0, 4.0]))
    assert structure_certificate(system, good)["passed"]


def test_unsymmetrizable_state_still_coupled():
    """p_ρ < 0 但 c² > 0：对称化失败，真耦合成立"""
    system = ModelCatalogDAO.create("navier_stokes", {"eos": "van_der_waals"})
    U = system.from_natural(np.array([1.0, 0.0, 2.0]))
    assert genuine_coupling_check(system, U).holds
    cert = structure_certificate(system, U)
    assert cert["symmetrizer"]["first_order_symmetric"] is False
    assert not cert["passed"]


def test_threaded_scan_matches_serial():
    system = NavierStokes(d=2)
    A_list, B_tensor = endpoint_matrices(system, system.reference_states()[0])
    serial = dissipativity_scan(A_list, B_tensor)
    threaded = dissipativity_scan(A_list, B_tensor, threads=3)
    assert serial.theta == threaded.theta
    assert serial.worst_xi == threaded.worst_xi
