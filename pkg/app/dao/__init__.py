"""数据访问对象(DAO)模块"""
# DAO负责模型目录与结果文件的读写，作为分析流程和文件系统之间的中间层
from .catalog_dao import ModelCatalogDAO, ModelCatalogEntry
from .profile_dao import ProfileDAO, ReportDAO, write_csv

__all__ = ["ModelCatalogDAO", "ModelCatalogEntry", "ProfileDAO", "ReportDAO", "write_csv"]
