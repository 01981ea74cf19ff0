"""守恒律模型：通量、雅可比、粘性块结构与对称化"""
import numpy as np
import pytest

from app.analysis.structure_checks import symmetric_form_consistency, symmetrize
from app.dao import ModelCatalogDAO
from app.models import (Burgers, IdealGas, NavierStokes, VanDerWaalsGas, flux_and_jacobian, hyperbolicity_report,
                        jacobian_consistency, sphere_directions, viscosity_tensor)
from app.utils.errors import ConfigError, InadmissibleStateError, StructureError

CATALOG_CASES = [
    ("burgers", {}),
    ("burgers", {"d": 2, "transverse_speed": 0.3}),
    ("unstable_front", {}),
    ("isentropic_gas", {}),
    ("navier_stokes", {}),
    ("navier_stokes", {"d": 2}),
    ("navier_stokes", {"eos": "van_der_waals"}),
]


@pytest.mark.parametrize("name,params", CATALOG_CASES)
def test_flux_jacobian_matches_finite_difference(name, params):
    """解析雅可比与中心差分一致"""
    system = ModelCatalogDAO.create(name, params)
    for U in system.reference_states():
        for j in range(system.d):
            assert jacobian_consistency(system, U, j) < 1e-6


@pytest.mark.parametrize("name,params", CATALOG_CASES)
def test_viscosity_first_block_rows_vanish(name, params):
    """B 的前 q 行为零，(II,II) 块椭圆"""
    system = ModelCatalogDAO.create(name, params)
    rng = np.random.default_rng(0)
    for U in system.reference_states():
        for xi in sphere_directions(system.d, 8):
            tensor = viscosity_tensor(system, U, xi, check_ellipticity=True)
            assert np.all(tensor[:system.q, :] == 0.0)
    U = system.random_state(rng)
    assert system.is_admissible(U)


def test_burgers_flux_and_viscosity():
    system = Burgers(d=2, viscosity=0.5, transverse_viscosity=2.0, transverse_speed=0.7, front_coupling=1.0)
    F, A = flux_and_jacobian(system, np.array([0.6]), 0)
    assert F[0] == pytest.approx(0.18)
    assert A[0, 0] == pytest.approx(0.6)
    F1, A1 = flux_and_jacobian(system, np.array([0.6]), 1)
    assert F1[0] == pytest.approx(0.42)
    assert A1[0, 0] == pytest.approx(0.7)
    assert system.viscosity(np.array([0.6]), 0, 0)[0, 0] == pytest.approx(0.5)
    # ν_T − κ(1 − u²)
    assert system.viscosity(np.array([0.6]), 1, 1)[0, 0] == pytest.approx(2.0 - 0.64)
    assert system.viscosity(np.array([0.6]), 0, 1)[0, 0] == pytest.approx(0.0)


def test_burgers_exact_profile():
    x = np.linspace(-5.0, 5.0, 11)
    np.testing.assert_allclose(Burgers().exact_profile(x), -np.tanh(x / 2.0), atol=1e-14)


def test_ideal_gas_thermodynamics():
    eos = IdealGas(gamma=1.4, cv=1.0)
    assert eos.R == pytest.approx(0.4)
    assert eos.p_rho(1.3, 2.0) == pytest.approx(0.4 * 2.0)
    assert eos.sound_speed_squared(1.3, 2.0) == pytest.approx(1.4 * 0.4 * 2.0)


def test_van_der_waals_spinodal_temperature():
    eos = VanDerWaalsGas(a=3.0, b=1.0 / 3.0, gas_constant=1.0)
    assert eos.spinodal_temperature(1.5) == pytest.approx(2.25)
    assert abs(eos.p_rho(1.5, 2.25)) < 1e-12
    assert eos.p_rho(1.0, 2.0) < 0.0 < eos.sound_speed_squared(1.0, 2.0)


def test_natural_variables_round_trip():
    system = NavierStokes(d=2)
    W = np.array([1.2, 0.3, -0.4, 1.7])
    np.testing.assert_allclose(system.to_natural(system.from_natural(W)), W, rtol=1e-13)


def test_inadmissible_state_rejected():
    system = NavierStokes()
    with pytest.raises(InadmissibleStateError):
        system.check_admissible(np.array([-1.0, 0.0, 1.0]))
    with pytest.raises(InadmissibleStateError):
        flux_and_jacobian(system, np.array([1.0, 0.0, -5.0]), 0)


@pytest.mark.parametrize("d", [1, 2])
def test_navier_stokes_symmetrizer(d):
    """Ã⁰ 对称正定，Ã^j 对称，且谱与守恒形式一致"""
    system = NavierStokes(d=d)
    rng = np.random.default_rng(3)
    for _ in range(5):
        U = system.random_state(rng)
        form = symmetrize(system, U)
        assert form.first_order_symmetric
        assert np.min(np.linalg.eigvalsh(form.A0)) > 0.0
        for xi in sphere_directions(d, 6):
            assert symmetric_form_consistency(system, form, xi) < 1e-9


def test_negative_p_rho_loses_first_order_symmetry():
    system = ModelCatalogDAO.create("navier_stokes", {"eos": "van_der_waals"})
    form = symmetrize(system, system.from_natural(np.array([1.0, 0.0, 2.0])))
    assert not form.first_order_symmetric
    form = symmetrize(system, system.from_natural(np.array([1.0, 0.0, 4.0])))
    assert form.first_order_symmetric


def test_models_without_symmetrizer_raise():
    class _Bare(Burgers):
        def symmetric_form(self, U):
            return None

    bare = _Bare(d=2)
    with pytest.raises(StructureError):
        symmetrize(bare, np.array([0.5]))


def test_hyperbolicity_report_navier_stokes():
    system = NavierStokes(d=2)
    report = hyperbolicity_report(system, system.reference_states()[0])
    assert report.real_semisimple
    assert report.constant_multiplicity


def test_sphere_directions_one_dimensional():
    np.testing.assert_array_equal(sphere_directions(1, 4), [[1.0], [-1.0], [1.0], [-1.0]])
    directions = sphere_directions(3, 20)
    np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)


def test_catalog_rejects_unknown_entries():
    with pytest.raises(ConfigError):
        ModelCatalogDAO.create("euler_magnetic")
    with pytest.raises(ConfigError):
        ModelCatalogDAO.create("burgers", {"mu": 1.0})
    with pytest.raises(ConfigError):
        ModelCatalogDAO.create("navier_stokes", {"eos": "stiffened"})
    names = {entry["name"] for entry in ModelCatalogDAO.describe()}
    assert names == {"burgers", "unstable_front", "isentropic_gas", "navier_stokes"}
