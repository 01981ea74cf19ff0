"""守恒律系统模型包"""
from .base import (
    ComovingSystem,
    HyperbolicityReport,
    StateVector,
    SymmetricForm,
    SystemDefinition,
    flux_and_jacobian,
    hyperbolicity_report,
    jacobian_consistency,
    sphere_directions,
    viscosity_tensor,
)
from .burgers import Burgers
from .gas_dynamics import IdealGas, IsentropicGas, NavierStokes, VanDerWaalsGas

__all__ = [
    "SystemDefinition",
    "ComovingSystem",
    "StateVector",
    "SymmetricForm",
    "HyperbolicityReport",
    "flux_and_jacobian",
    "jacobian_consistency",
    "viscosity_tensor",
    "hyperbolicity_report",
    "sphere_directions",
    "Burgers",
    "IsentropicGas",
    "NavierStokes",
    "IdealGas",
    "VanDerWaalsGas",
]
