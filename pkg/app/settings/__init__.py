"""配置模块"""
from .config import config, setup_logging
from .response import create_response, error_response, success_response

__all__ = ["config", "setup_logging", "create_response", "success_response", "error_response"]
