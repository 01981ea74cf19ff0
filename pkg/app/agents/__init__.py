"""分析流水线 Agent"""
from .base_agent import BaseAgent
from .pipeline_agent import STAGE_DEPENDENCIES, StabilityPipelineAgent, confined_output_dir, default_output_dir

__all__ = ["BaseAgent", "StabilityPipelineAgent", "STAGE_DEPENDENCIES", "confined_output_dir", "default_output_dir"]
