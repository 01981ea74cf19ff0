"""稳定性报告的数据模型与判定逻辑"""
import json
from importlib import metadata
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.utils.linalg import to_jsonable

NECESSARY_VIOLATED = "necessary conditions violated"
SUFFICIENT_MET = "sufficient conditions met"
INCONCLUSIVE = "inconclusive"

TRACKED_PACKAGES = ("numpy", "scipy", "pandas", "pydantic", "matplotlib")


class StageResult(BaseModel):
    """单个阶段的执行结果"""
    success: bool
    code: Optional[int] = None
    error: Optional[str] = None
    data: Optional[Dict[str, Any]] = None


class Verdicts(BaseModel):
    """各阶段结论；None 表示该阶段未运行或结论不确定"""
    model_config = ConfigDict(extra="forbid")

    structure_certified: Optional[bool] = Field(None, description="端点结构证书（对称化、真耦合、耗散性）")
    structural: Optional[bool] = Field(None, description="横截性 γ ≠ 0")
    inviscid_weak: Optional[bool] = None
    inviscid_strong: Optional[bool] = None
    spectral_weak: Optional[bool] = None
    spectral_strong: Optional[bool] = None
    refined_weak: Optional[bool] = None
    refined_strong: Optional[bool] = None


def conclude(verdicts: Verdicts) -> str:
    """
    由阶段结论得到总体判定

    弱谱稳定或弱精化稳定不成立 ⇒ 必要条件被破坏；
    强谱稳定、横截性与强精化稳定同时成立 ⇒ 充分条件满足；其余不确定。
    """
    if verdicts.spectral_weak is False or verdicts.refined_weak is False:
        return NECESSARY_VIOLATED
    if verdicts.spectral_strong is True and verdicts.structural is True and verdicts.refined_strong is True:
        return SUFFICIENT_MET
    return INCONCLUSIVE


def package_versions() -> Dict[str, str]:
    """数值依赖的版本号"""
    versions = {}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


class Provenance(BaseModel):
    """可复现信息"""
    config_hash: str
    seed: int
    versions: Dict[str, str] = Field(default_factory=package_versions)


class StabilityReport(BaseModel):
    """分析报告"""
    provenance: Provenance
    model: Dict[str, Any]
    stages: Dict[str, StageResult] = Field(default_factory=dict)
    verdicts: Verdicts = Field(default_factory=Verdicts)
    conclusion: str = INCONCLUSIVE
    witnesses: List[Dict[str, Any]] = Field(default_factory=list)

    def finalize(self) -> "StabilityReport":
        """按当前阶段结论刷新总体判定"""
        self.conclusion = conclude(self.verdicts)
        return self

    def to_json(self) -> str:
        """确定性的 JSON 文本（无时间戳，键有序）"""
        return json.dumps(to_jsonable(self.model_dump(mode="python")), sort_keys=True, indent=2,
                          ensure_ascii=False)
