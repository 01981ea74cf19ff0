"""API路由模块"""
from fastapi import APIRouter

from .analysis_router import analysis_router

# 创建主API路由器
api_router = APIRouter()

# 注册各模块路由
api_router.include_router(analysis_router)

__all__ = ["api_router"]
