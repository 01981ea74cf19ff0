"""数据验证和序列化模型模块"""

from .config_schemas import STAGES, AnalysisConfig, load_config, parse_config
from .report_schemas import (INCONCLUSIVE, NECESSARY_VIOLATED, SUFFICIENT_MET, StabilityReport, StageResult,
                             Verdicts, conclude)

__all__ = [
    "STAGES",
    "AnalysisConfig",
    "load_config",
    "parse_config",
    "StabilityReport",
    "StageResult",
    "Verdicts",
    "conclude",
    "NECESSARY_VIOLATED",
    "SUFFICIENT_MET",
    "INCONCLUSIVE",
]
