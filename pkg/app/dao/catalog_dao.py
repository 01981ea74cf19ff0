"""模型目录数据访问对象"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from app.models import Burgers, IdealGas, IsentropicGas, NavierStokes, SystemDefinition, VanDerWaalsGas
from app.utils.errors import ConfigError


@dataclass(frozen=True)
class ModelCatalogEntry:
    """目录条目：名称、默认参数与构造函数"""
    name: str
    description: str
    parameters: Dict[str, Any]
    constructor: Callable[..., SystemDefinition] = field(repr=False)
    scaling: str = ""

    def build(self, params: Optional[Dict[str, Any]] = None) -> SystemDefinition:
        """用默认参数与覆盖参数构造系统"""
        params = dict(params or {})
        unknown = sorted(set(params) - set(self.parameters))
        if unknown:
            raise ConfigError(f"模型 {self.name} 不支持参数: {', '.join(unknown)}", witness=unknown)
        merged = {**self.parameters, **params}
        return self.constructor(**merged)


def _build_burgers(d, viscosity, transverse_viscosity, transverse_speed, front_coupling):
    return Burgers(d=d, viscosity=viscosity, transverse_viscosity=transverse_viscosity,
                   transverse_speed=transverse_speed, front_coupling=front_coupling)


def _build_unstable_front(transverse_viscosity, front_coupling):
    system = Burgers(d=2, transverse_viscosity=transverse_viscosity, front_coupling=front_coupling)
    system.name = "unstable_front"
    return system


def _build_navier_stokes(d, eos, gamma, cv, mu, lam, kappa, a, b, gas_constant):
    if eos == "ideal":
        equation = IdealGas(gamma=gamma, cv=cv)
    elif eos == "van_der_waals":
        equation = VanDerWaalsGas(a=a, b=b, gas_constant=gas_constant, cv=cv)
    else:
        raise ConfigError(f"未知状态方程: {eos}")
    return NavierStokes(d=d, eos=equation, mu=mu, lam=lam, kappa=kappa)


_CATALOG: Dict[str, ModelCatalogEntry] = {
    "burgers": ModelCatalogEntry(
        name="burgers",
        description="粘性 Burgers 方程 (n=1, r=1, d 任意)",
        parameters={"d": 1, "viscosity": 1.0, "transverse_viscosity": 1.0,
                    "transverse_speed": 0.0, "front_coupling": 0.0},
        constructor=_build_burgers,
        scaling="单位粘性，驻波 ū = −tanh(x/2) 对应 u± = ∓1",
    ),
    "unstable_front": ModelCatalogEntry(
        name="unstable_front",
        description="横向粘性在激波内部变为负值的二维标量模型，ξ̃=1 时存在本征值 λ=1",
        parameters={"transverse_viscosity": 1.0, "front_coupling": 2.5},
        constructor=_build_unstable_front,
        scaling="B²² = ν_T − κ(1 − u²)，ν_T = 1，κ = 2.5",
    ),
    "isentropic_gas": ModelCatalogEntry(
        name="isentropic_gas",
        description="一维等熵 Navier–Stokes / p-系统 (n=2, r=1)",
        parameters={"gamma": 1.4, "kappa_p": 1.0, "viscosity": 1.0},
        constructor=IsentropicGas,
        scaling="p = κ_p ρ^γ，粘性系数 ν 作用于速度",
    ),
    "navier_stokes": ModelCatalogEntry(
        name="navier_stokes",
        description="可压缩 Navier–Stokes (n=d+2, r=d+1)，理想气体或 van der Waals 状态方程",
        parameters={"d": 1, "eos": "ideal", "gamma": 1.4, "cv": 1.0, "mu": 1.0, "lam": 1.0,
                    "kappa": 1.0, "a": 3.0, "b": 1.0 / 3.0, "gas_constant": 1.0},
        constructor=_build_navier_stokes,
        scaling="c_v = 1，R = (γ − 1) c_v，μ = λ = κ = 1（量纲一化参考尺度）",
    ),
}


class ModelCatalogDAO:
    """模型目录相关操作"""

    @staticmethod
    def list_entries() -> List[ModelCatalogEntry]:
        """获取全部目录条目"""
        return list(_CATALOG.values())

    @staticmethod
    def get_entry(name: str) -> ModelCatalogEntry:
        """根据名称获取目录条目"""
        entry = _CATALOG.get(name)
        if entry is None:
            raise ConfigError(f"未知模型: {name}，可选: {', '.join(sorted(_CATALOG))}")
        return entry

    @staticmethod
    def create(name: str, params: Optional[Dict[str, Any]] = None) -> SystemDefinition:
        """按名称与参数构造系统"""
        return ModelCatalogDAO.get_entry(name).build(params)

    @staticmethod
    def describe() -> List[Dict[str, Any]]:
        """目录概要（用于 API 与 CLI 输出）"""
        return [
            {"name": e.name, "description": e.description, "parameters": e.parameters, "scaling": e.scaling}
            for e in _CATALOG.values()
        ]
