"""工具函数模块"""
from .errors import (
    ClassificationError,
    ConfigError,
    ContourError,
    DependencyError,
    EvansError,
    GenuineCouplingError,
    InadmissibleStateError,
    IndeterminateError,
    ProfileSolveError,
    StructureError,
    WorkbenchError,
)

__all__ = [
    "WorkbenchError",
    "ConfigError",
    "InadmissibleStateError",
    "StructureError",
    "GenuineCouplingError",
    "ClassificationError",
    "DependencyError",
    "ProfileSolveError",
    "EvansError",
    "ContourError",
    "IndeterminateError",
]
