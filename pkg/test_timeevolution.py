"""时间演化：指数率拟合、常系数热核衰减、线性化与非线性演化"""
import numpy as np
import pytest

from app.analysis.timeevolution import (endpoint_decay, evolve_linearized_mode, evolve_nonlinear_1d,
                                        fit_exponential_rate)
from app.dao import ModelCatalogDAO
from app.models import Burgers
from app.utils.errors import ConfigError


def test_fit_exponential_rate():
    t = np.linspace(0.0, 5.0, 51)
    norms = 3.0 * np.exp(0.7 * t)
    assert fit_exponential_rate(t, norms, (1.0, 5.0)) == pytest.approx(0.7, rel=1e-10)
    assert np.isnan(fit_exponential_rate(t, norms, (10.0, 20.0)))


@pytest.mark.parametrize("kind,expected", [("bump", -0.25), ("derivative", -0.75)])
def test_burgers_heat_kernel_decay_1d(kind, expected):
    experiment = endpoint_decay(Burgers(), [-1.0], d=1, T=200.0, kind=kind)
    assert experiment.slope_expected == pytest.approx(expected)
    assert experiment.slope == pytest.approx(expected, abs=0.03)
    assert experiment.parseval_error < 1e-10
    assert experiment.stagnating is None


def test_burgers_heat_kernel_decay_2d():
    experiment = endpoint_decay(Burgers(d=2), [-1.0], d=2, T=100.0)
    assert experiment.slope == pytest.approx(-0.5, abs=0.05)
    assert experiment.stagnating is None


def test_decay_dimension_checks():
    with pytest.raises(ConfigError):
        endpoint_decay(Burgers(), [-1.0], d=2)
    with pytest.raises(ConfigError):
        endpoint_decay(Burgers(), [-1.0], d=1, T=10.0, kind="step")


def test_spinodal_endpoint_stagnates():
    """真耦合失败时常系数符号存在不衰减的频率"""
    system = ModelCatalogDAO.create("navier_stokes", {"eos": "van_der_waals"})
    U = system.from_natural(np.array([1.5, 0.0, 2.25]))
    experiment = endpoint_decay(system, U, d=1, T=20.0)
    assert experiment.stagnating is not None


def test_burgers_linearized_bump_does_not_grow(burgers_profile):
    run = evolve_linearized_mode(burgers_profile, [], initial="bump", T=10.0, nodes=200, check_refinement=False)
    assert not run.blowup
    assert run.fitted_rate < 0.02
    assert run.fit_window == (1.0, run.times[-1])


def test_unknown_initial_data(burgers_profile):
    with pytest.raises(ConfigError):
        evolve_linearized_mode(burgers_profile, [], initial="step", T=1.0, nodes=50, check_refinement=False)


@pytest.mark.slow
def test_unstable_front_growth_rate(front_profile):
    """ξ̃ = 1 处唯一不稳定特征值 λ = 1 决定增长率"""
    run = evolve_linearized_mode(front_profile, [1.0], initial="bump", T=10.0, check_refinement=False)
    assert not run.blowup
    assert run.fitted_rate == pytest.approx(1.0, rel=0.05)
    assert run.extra["rightmost_eigenvalue"]["re"] == pytest.approx(1.0, rel=0.05)


@pytest.mark.slow
def test_burgers_nonlinear_shift(burgers, burgers_profile):
    """非零质量扰动：激波平移量等于质量除以跳跃"""
    run = evolve_nonlinear_1d(burgers, burgers_profile, epsilon=1e-2, T=40.0)
    assert not run.blowup
    predicted = run.extra["predicted_shift"]
    assert predicted == pytest.approx(np.sqrt(np.pi) * 1e-2 / 2.0, rel=0.02)
    assert run.extra["measured_shift"] == pytest.approx(predicted, rel=0.05)
    assert run.extra["mass_residual"] < 1e-9


def test_translation_mode_norm_is_constant(burgers_profile):
    """Ū′ 为 L₀ 的核：范数在拟合窗口内不变"""
    run = evolve_linearized_mode(burgers_profile, [], initial="translation", T=20.0, nodes=400,
                                 check_refinement=False)
    assert not run.blowup
    assert abs(run.fitted_rate) < 1e-3
    assert abs(run.extra["rightmost_eigenvalue"]["re"]) < 1e-3


@pytest.mark.slow
@pytest.mark.parametrize("kind,expected", [("bump", -0.25), ("derivative", -0.75)])
def test_navier_stokes_endpoint_heat_kernel_decay(ns_system, kind, expected):
    U = ns_system.from_natural(np.array([1.0, 0.0, 1.0]))
    experiment = endpoint_decay(ns_system, U, d=1, T=200.0, kind=kind)
    assert experiment.slope == pytest.approx(expected, abs=0.05)
    assert experiment.parseval_error < 1e-10
    assert experiment.stagnating is None


@pytest.mark.slow
def test_unperturbed_shock_stays_put(burgers, burgers_profile):
    """ε = 0：离散定常态逐步残差不超过 1e−8，且无平移"""
    run = evolve_nonlinear_1d(burgers, burgers_profile, epsilon=0.0, T=10.0)
    assert not run.blowup
    assert run.extra["step_residual"] <= 1e-8
    assert run.extra["predicted_shift"] == 0.0
    assert run.extra["measured_shift"] == pytest.approx(0.0, abs=1e-6)


@pytest.mark.slow
def test_zero_mass_perturbation_does_not_shift(burgers, burgers_profile):
    run = evolve_nonlinear_1d(burgers, burgers_profile, epsilon=1e-2, T=40.0, perturbation="antisymmetric")
    assert not run.blowup
    assert abs(run.extra["predicted_shift"]) < 1e-12
    assert run.extra["measured_shift"] == pytest.approx(0.0, abs=1e-4)
    assert run.extra["mass_residual"] < 1e-9
