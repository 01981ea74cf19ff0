"""分析配置的数据验证模型"""
import hashlib
import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.dao.catalog_dao import ModelCatalogDAO
from app.utils.errors import ConfigError

STAGES = ("check-structure", "solve-profile", "lopatinski", "evans", "low-freq", "evolve")


class _Strict(BaseModel):
    """拒绝未知键"""
    model_config = ConfigDict(extra="forbid")


class ModelConfig(_Strict):
    """模型选择与参数"""
    name: str = Field(..., description="目录中的模型名称")
    params: Dict[str, Any] = Field(default_factory=dict, description="覆盖默认参数")

    @model_validator(mode="after")
    def check_catalog(self):
        try:
            entry = ModelCatalogDAO.get_entry(self.name)
        except ConfigError as exc:
            raise ValueError(exc.message) from exc
        unknown = sorted(set(self.params) - set(entry.parameters))
        if unknown:
            raise ValueError(f"模型 {self.name} 不支持参数: {', '.join(unknown)}")
        return self


class ClosureConfig(_Strict):
    """Rankine–Hugoniot 闭包：speed、plus_state、mach 三选一"""
    speed: Optional[float] = None
    plus_state: Optional[List[float]] = None
    mach: Optional[float] = Field(None, gt=1.0)

    @model_validator(mode="after")
    def exactly_one(self):
        given = [k for k in ("speed", "plus_state", "mach") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"closure 需且仅需给定 speed / plus_state / mach 之一，得到 {given or '无'}")
        return self


class ShockConfig(_Strict):
    """激波端点与闭包"""
    minus_state: List[float] = Field(..., min_length=1)
    variables: Literal["conserved", "natural"] = "conserved"
    closure: ClosureConfig


class NumericsConfig(_Strict):
    """数值控制参数"""
    L: Optional[float] = Field(None, gt=0, description="剖面截断半长，默认 12/θ")
    profile_tol: float = Field(1e-10, gt=0)
    grid_points: int = Field(1601, gt=10)
    lopatinski_points: int = Field(64, gt=4)
    contour_radius: Optional[float] = Field(None, gt=0, description="默认按高频标度规则")
    contour_shift: float = Field(0.02, gt=0)
    contour_points: int = Field(64, gt=8)
    contour_max_points: int = Field(4096, gt=8)
    axis_points: int = Field(64, gt=2)
    evans_method: Literal["auto", "compound", "orthogonal"] = "auto"
    xi_grid: Optional[List[List[float]]] = Field(None, description="显式 ξ̃ 网格，默认按 xi_max/xi_count 生成")
    xi_max: float = Field(1.0, gt=0)
    xi_count: int = Field(5, gt=0)
    glancing_tolerance: float = Field(1e-2, gt=0)
    glancing_samples: int = Field(401, gt=10)
    gamma_rhos: List[float] = Field(default_factory=lambda: [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4])
    beta_rhos: List[float] = Field(default_factory=lambda: [1e-2, 5e-3, 2.5e-3])
    track_rhos: List[float] = Field(default_factory=lambda: [0.2, 0.16, 0.12, 0.09, 0.06, 0.04])
    discrete_nodes: int = Field(400, gt=10)
    discrete_re_min: float = Field(0.05, gt=0)
    discrete_tolerance: float = Field(2e-2, gt=0)

    @field_validator("gamma_rhos", "beta_rhos", "track_rhos")
    @classmethod
    def positive_rhos(cls, value: List[float]) -> List[float]:
        if len(value) < 2 or any(r <= 0 for r in value):
            raise ValueError("ρ 序列至少两项且全部为正")
        return value


class StructureConfig(_Strict):
    """附加的结构检验状态（与 shock.variables 同一变量约定）"""
    states: List[List[float]] = Field(default_factory=list)
    include_endpoints: bool = True


class LinearRunConfig(_Strict):
    """单模线性化演化"""
    xi_tilde: List[float] = Field(default_factory=list)
    initial: Literal["translation", "bump", "zero_mean"] = "bump"
    T: float = Field(10.0, gt=0)
    nodes: int = Field(400, gt=10)
    check_refinement: bool = True


class NonlinearRunConfig(_Strict):
    """一维非线性扰动"""
    epsilon: float = Field(1e-2, ge=0)
    perturbation: Literal["gaussian", "antisymmetric"] = "gaussian"
    T: float = Field(40.0, gt=0)
    cells: int = Field(400, gt=10)


class DecayConfig(_Strict):
    """常系数热核衰减"""
    dimensions: List[Literal[1, 2]] = Field(default_factory=lambda: [1])
    kind: Literal["bump", "derivative"] = "bump"
    endpoint: Literal["minus", "plus"] = "plus"
    T: float = Field(200.0, gt=0)


class EvolutionConfig(_Strict):
    """时间演化实验"""
    linear: List[LinearRunConfig] = Field(default_factory=list)
    nonlinear: List[NonlinearRunConfig] = Field(default_factory=list)
    decay: Optional[DecayConfig] = None


class AnalysisConfig(_Strict):
    """完整的分析配置"""
    model: ModelConfig
    shock: ShockConfig
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    stages: List[Literal[STAGES]] = Field(default_factory=lambda: list(STAGES))
    structure: StructureConfig = Field(default_factory=StructureConfig)
    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    seed: int = 0
    output_dir: Optional[str] = None
    auto_resolve: bool = True

    def canonical_json(self) -> str:
        """排序键、紧凑分隔符的规范 JSON"""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def xi_grid(self, d: int) -> List[List[float]]:
        """ξ̃ 扫描网格；d = 1 时为空"""
        if d == 1:
            return []
        if self.numerics.xi_grid is not None:
            return [list(x) for x in self.numerics.xi_grid]
        count, top = self.numerics.xi_count, self.numerics.xi_max
        grid = []
        for i in range(count):
            value = top * i / max(count - 1, 1)
            grid.append([value] + [0.0] * (d - 2))
        return grid


def load_config(path: str) -> AnalysisConfig:
    """
    读取并验证配置文件

    Raises:
        ConfigError: 文件不可读或 schema 校验失败（witness 中含键路径）
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"无法读取配置 {path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: Dict[str, Any]) -> AnalysisConfig:
    """验证配置字典，校验错误转换为 ConfigError"""
    try:
        return AnalysisConfig.model_validate(raw)
    except ValidationError as exc:
        issues = [{"loc": ".".join(str(p) for p in err["loc"]), "msg": err["msg"]} for err in exc.errors()]
        summary = "; ".join(f"{item['loc']}: {item['msg']}" for item in issues)
        raise ConfigError(f"配置校验失败: {summary}", witness=issues) from exc
