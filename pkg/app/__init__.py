"""FastAPI应用初始化"""
import logging
import os
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware

from app.api import api_router
from app.dao import ModelCatalogDAO
from app.schemas.config_schemas import STAGES
from app.settings.config import config
from app.settings.response import success_response, workbench_error_response
from app.utils.errors import WorkbenchError

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """启动时准备报告目录；分析在请求内同步执行，关闭时无需清理"""
    reports = os.path.join(config.OUTPUT_DIR, "reports")
    os.makedirs(reports, exist_ok=True)
    logger.info("报告目录: %s，模型目录 %d 项，线程预算 %d",
                reports, len(ModelCatalogDAO.describe()), config.SHOCK_NUM_THREADS)
    yield
    logger.info("服务关闭")


fastapi_app = FastAPI(
    title=config.APP_NAME + " API",
    description="粘性激波稳定性分析工作台 - 结构检验、剖面、Lopatinski、Evans、低频与演化实验",
    version="1.0.0",
    lifespan=lifespan,
    docs_url="/docs",
    redoc_url="/redoc",
    debug=config.DEBUG
)

fastapi_app.add_middleware(
    CORSMiddleware,
    allow_origins=[config.ALLOW_ORIGINS],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

fastapi_app.include_router(api_router)


@fastapi_app.exception_handler(WorkbenchError)
async def handle_workbench_error(request: Request, exc: WorkbenchError):
    logger.error("%s %s 失败 [%d]: %s", request.method, request.url.path, exc.code, exc.message)
    return workbench_error_response(exc)


@fastapi_app.get("/")
async def root():
    return success_response(
        message=f"{config.APP_NAME} API 运行中",
        data={"status": "running", "stages": list(STAGES)}
    )


@fastapi_app.get("/health")
async def health_check():
    return success_response(
        message="服务健康状态正常",
        data={"status": "healthy", "service": config.APP_NAME}
    )


app = fastapi_app
