"""配置管理模块"""
import logging
import os
from typing import Optional

from dotenv import load_dotenv

# 加载.env文件
load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Config:
    """配置类，从环境变量中读取配置"""

    # 应用配置
    APP_NAME: str = os.getenv("APP_NAME", "Shock Stability Workbench")
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"

    # 服务器配置
    HOST: str = os.getenv("HOST", "0.0.0.0")
    PORT: int = int(os.getenv("PORT", "8001"))

    # CORS配置
    ALLOW_ORIGINS: str = os.getenv("ALLOW_ORIGINS", "*")

    # 输出与日志
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "workspace")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # 频率网格扫描的线程预算，CLI 的 --threads 优先
    SHOCK_NUM_THREADS: int = max(1, int(os.getenv("SHOCK_NUM_THREADS", "1")))


def setup_logging(level: Optional[str] = None) -> None:
    """
    配置根日志记录器

    Args:
        level: 日志级别名称，默认取 LOG_LEVEL
    """
    name = (level or config.LOG_LEVEL).upper()
    logging.basicConfig(level=getattr(logging, name, logging.INFO), format=LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, name, logging.INFO))
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


# 创建全局配置实例
config = Config()
