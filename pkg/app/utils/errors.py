"""工作台异常定义模块"""
from typing import Any, Dict, Optional


class WorkbenchError(Exception):
    """
    工作台异常基类

    code 与 API 响应码保持一致：4xxx 为输入/结构问题，5xxx 为计算失败
    """

    code: int = 5000

    def __init__(self, message: str, *, witness: Any = None, location: Optional[float] = None):
        super().__init__(message)
        self.message = message
        self.witness = witness
        self.location = location

    def to_dict(self) -> Dict[str, Any]:
        """转换为可序列化的字典"""
        data: Dict[str, Any] = {"code": self.code, "error": self.message}
        if self.witness is not None:
            from app.utils.linalg import to_jsonable
            data["witness"] = to_jsonable(self.witness)
        if self.location is not None:
            data["location"] = float(self.location)
        return data


class ConfigError(WorkbenchError):
    """配置或目录参数错误"""
    code = 4000


class InadmissibleStateError(WorkbenchError):
    """状态不在模型的可容许集合内"""
    code = 4001


class StructureError(WorkbenchError):
    """块结构被破坏（粘性矩阵首块行非零等）"""
    code = 4002


class GenuineCouplingError(StructureError):
    """真耦合条件 (K0) 不成立"""
    code = 4003


class ClassificationError(WorkbenchError):
    """激波端点为特征点，拒绝分类"""
    code = 4004


class DependencyError(WorkbenchError):
    """依赖阶段缺失"""
    code = 4005


class ProfileSolveError(WorkbenchError):
    """激波剖面求解失败"""
    code = 5001


class EvansError(WorkbenchError):
    """Evans 函数计算失败"""
    code = 5002


class ContourError(WorkbenchError):
    """围道与谱相交（|D| 低于阈值）"""
    code = 5003


class IndeterminateError(WorkbenchError):
    """数值结果不确定"""
    code = 5004
