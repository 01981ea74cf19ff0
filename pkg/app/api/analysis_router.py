"""稳定性分析相关API接口"""
import logging
import os
from typing import Any, Dict, List, Optional

from fastapi import APIRouter, Body, Query
from fastapi.concurrency import run_in_threadpool

from app.agents.pipeline_agent import StabilityPipelineAgent, confined_output_dir
from app.dao import ModelCatalogDAO
from app.schemas.config_schemas import STAGES, parse_config
from app.settings.config import config
from app.settings.response import error_response, success_response, workbench_error_response
from app.utils.errors import ConfigError, WorkbenchError

logger = logging.getLogger(__name__)

# 创建稳定性分析相关的路由器
analysis_router = APIRouter(prefix="/analysis", tags=["analysis"])


@analysis_router.get("/models", response_model=dict)
async def list_models() -> dict:
    """
    列出模型目录

    Returns:
        目录条目（名称、说明、默认参数、量纲约定）
    """
    return success_response(message="获取模型目录成功", data=ModelCatalogDAO.describe())


@analysis_router.post("/run", response_model=dict)
async def run_analysis(
    analysis_config: Dict[str, Any] = Body(..., description="AnalysisConfig JSON"),
    stages: Optional[List[str]] = Query(None, description="要执行的阶段，默认取配置中的 stages"),
    threads: Optional[int] = Query(None, ge=1, description="线程预算")
) -> dict:
    """
    对内联配置执行分析流水线

    Args:
        analysis_config: 分析配置
        stages: 阶段列表
        threads: 线程预算，默认 SHOCK_NUM_THREADS

    Returns:
        包含 StabilityReport 的响应
    """
    try:
        parsed = parse_config(analysis_config)
        output_dir = confined_output_dir(parsed, os.path.join(config.OUTPUT_DIR, "reports"))
    except ConfigError as exc:
        return workbench_error_response(exc)

    unknown = [s for s in stages or [] if s not in STAGES]
    if unknown:
        return error_response(code=ConfigError.code, message=f"未知阶段: {', '.join(unknown)}", status_code=422)

    try:
        agent = StabilityPipelineAgent(parsed, output_dir, threads or config.SHOCK_NUM_THREADS)
        report = await run_in_threadpool(agent.run, stages)
    except WorkbenchError as exc:
        logger.error("分析请求失败 [%d]: %s", exc.code, exc.message)
        return workbench_error_response(exc)

    return success_response(
        message=f"分析完成：{report.conclusion}",
        data={"output_dir": output_dir, "report": report.model_dump(mode="python")}
    )
