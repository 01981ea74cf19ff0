"""Rankine–Hugoniot 闭包、激波分类与剖面求解"""
import numpy as np
import pytest

from app.analysis.profile_solver import (ShockTriple, classify_shock, rankine_hugoniot, shock_from_closure,
                                         solve_profile)
from app.dao import ModelCatalogDAO, ProfileDAO
from app.models import Burgers, IsentropicGas, NavierStokes
from app.utils.errors import ClassificationError, ConfigError, ProfileSolveError


def test_burgers_closures(burgers):
    by_state = rankine_hugoniot(burgers, [1.0], U_plus=[-1.0])
    assert by_state.s == pytest.approx(0.0)
    assert by_state.residual < 1e-12
    by_speed = rankine_hugoniot(burgers, [1.0], speed=0.0)
    np.testing.assert_allclose(by_speed.U_plus, [-1.0], atol=1e-10)
    moving = rankine_hugoniot(burgers, [2.0], U_plus=[0.0])
    assert moving.s == pytest.approx(1.0)


def test_closure_needs_exactly_one_input(burgers):
    with pytest.raises(ConfigError):
        rankine_hugoniot(burgers, [1.0])
    with pytest.raises(ConfigError):
        rankine_hugoniot(burgers, [1.0], speed=0.0, U_plus=[-1.0])


def test_trivial_branch_is_flagged(burgers):
    triple = rankine_hugoniot(burgers, [1.0], U_plus=[1.0])
    assert triple.trivial
    with pytest.raises(ConfigError):
        triple.require_shock()


def test_inconsistent_endpoints_rejected():
    system = IsentropicGas()
    with pytest.raises(ProfileSolveError):
        rankine_hugoniot(system, [1.0, 0.5], U_plus=[2.0, 0.1])


def test_burgers_classification(burgers, burgers_triple):
    result = classify_shock(burgers, burgers_triple)
    assert result.lax
    assert result.p == 1
    assert (result.i_minus, result.i_plus) == (1, 1)
    assert result.ell_hat == 1
    assert result.index_relation


def test_characteristic_endpoint_refused(burgers):
    triple = ShockTriple(U_minus=np.array([1.0]), U_plus=np.array([-1.0]), s=1.0, residual=0.0)
    with pytest.raises(ClassificationError):
        classify_shock(burgers, triple)


def test_isentropic_mach_closure():
    system = IsentropicGas()
    triple = shock_from_closure(system, [1.0, 0.0], mach=1.5)
    assert triple.s == 0.0
    jump = system.flux(triple.U_plus, 0) - system.flux(triple.U_minus, 0)
    assert np.linalg.norm(jump) < 1e-9
    assert classify_shock(system, triple).lax


def test_ideal_gas_closure_matches_normal_shock_relations():
    system = NavierStokes()
    triple = shock_from_closure(system, system.from_natural(np.array([1.0, 0.0, 1.0])), mach=1.5)
    expected = system.normal_shock_guess(triple.U_minus)
    np.testing.assert_allclose(triple.U_plus, expected, rtol=1e-8)
    assert triple.entropy_jump is not None and triple.entropy_jump > 0.0


def test_mach_closure_needs_model_support():
    with pytest.raises(ConfigError):
        shock_from_closure(Burgers(), [1.0], mach=1.5)


def test_burgers_profile_matches_tanh(burgers, burgers_profile):
    exact = burgers.exact_profile(burgers_profile.grid)
    assert np.max(np.abs(burgers_profile.values[:, 0] - exact)) < 1e-6
    assert max(burgers_profile.decay_rate_agreement()) < 0.05
    assert burgers_profile.L == pytest.approx(12.0)
    U0, dU0 = burgers_profile.evaluate(0.0)
    assert U0[0] == pytest.approx(0.0, abs=1e-8)
    assert dU0[0] == pytest.approx(-0.5, abs=1e-6)


def test_profile_phase_location(burgers, burgers_triple):
    shifted = solve_profile(burgers, burgers_triple, phase_location=1.0, grid_points=401)
    exact = burgers.exact_profile(shifted.grid, x0=1.0)
    assert np.max(np.abs(shifted.values[:, 0] - exact)) < 1e-6
    with pytest.raises(ConfigError):
        solve_profile(burgers, burgers_triple, phase_location=50.0)


def test_profile_round_trip(tmp_path, burgers, burgers_profile):
    ProfileDAO.save(burgers_profile, str(tmp_path), "abc")
    loaded = ProfileDAO.load(str(tmp_path), burgers, "abc")
    np.testing.assert_allclose(loaded.values, burgers_profile.values, rtol=1e-11, atol=1e-12)
    assert loaded.L == burgers_profile.L
    assert ProfileDAO.load(str(tmp_path), burgers, "other") is None


@pytest.mark.slow
def test_navier_stokes_profile(ns_mach105_profile):
    """弱激波：ℓ̂ = 1，(F¹)^I 沿剖面守恒"""
    classification = ns_mach105_profile.classification
    assert classification.lax
    assert classification.ell_hat == 1
    assert classification.index_relation
    assert ns_mach105_profile.conservation_error < 1e-8
    assert max(ns_mach105_profile.endpoint_errors) < 1e-4
    assert max(ns_mach105_profile.decay_rate_agreement()) < 0.05


@pytest.mark.slow
def test_isentropic_profile():
    system = ModelCatalogDAO.create("isentropic_gas")
    triple = shock_from_closure(system, [1.0, 0.0], mach=1.5)
    profile = solve_profile(system, triple)
    assert profile.conservation_error < 1e-8
    assert profile.classification.ell_hat == 1


@pytest.mark.slow
@pytest.mark.parametrize("mach", [1.1, 1.5])
def test_navier_stokes_index_relation(ns_system, mach):
    """ℓ̂ = d₊ + d₋ − r = i₊ + i₋ − n = 1，1-激波 i₊ = 1、i₋ = n"""
    U_minus = ns_system.from_natural(np.array([1.0, 0.0, 1.0]))
    profile = solve_profile(ns_system, shock_from_closure(ns_system, U_minus, mach=mach))
    result = profile.classification
    assert result.lax
    assert (result.i_plus, result.i_minus) == (1, ns_system.n)
    assert result.d_plus + result.d_minus - ns_system.r == 1
    assert result.i_plus + result.i_minus - ns_system.n == 1
    assert result.ell_hat == 1
    assert profile.conservation_error < 1e-8
