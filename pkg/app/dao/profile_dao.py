"""剖面与报告的文件持久化"""
import json
import logging
import os
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from app.analysis.profile_solver import (ProfileODE, ShockProfile, ShockTriple, classify_shock,
                                         endpoint_linearization)
from app.models import SystemDefinition
from app.utils.linalg import to_jsonable

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.12e"
PROFILE_CSV = "profile.csv"
PROFILE_JSON = "profile.json"
REPORT_JSON = "report.json"


def write_csv(frame: pd.DataFrame, path: str) -> str:
    """统一的 CSV 写出格式"""
    frame.to_csv(path, float_format=CSV_FLOAT_FORMAT, index=False, lineterminator="\n")
    return path


class ProfileDAO:
    """剖面文件的读写：profile.csv 存 (x, Ū)，profile.json 存三元组与拟合信息"""

    @staticmethod
    def save(profile: ShockProfile, directory: str, key: str) -> str:
        """
        保存剖面

        Args:
            profile: 剖面
            directory: 输出目录
            key: 生成该剖面的配置摘要，读取时用于判断能否复用

        Returns:
            profile.csv 路径
        """
        os.makedirs(directory, exist_ok=True)
        columns = {"x": profile.grid}
        for i in range(profile.values.shape[1]):
            columns[f"U{i}"] = profile.values[:, i]
        path = write_csv(pd.DataFrame(columns), os.path.join(directory, PROFILE_CSV))
        meta = {"key": key, **profile.metadata()}
        meta["triple"].pop("branches", None)
        with open(os.path.join(directory, PROFILE_JSON), "w", encoding="utf-8") as f:
            json.dump(to_jsonable(meta), f, ensure_ascii=False, indent=2, sort_keys=True)
        logger.info("剖面已保存: %s", path)
        return path

    @staticmethod
    def exists(directory: str) -> bool:
        return all(os.path.exists(os.path.join(directory, name)) for name in (PROFILE_CSV, PROFILE_JSON))

    @staticmethod
    def load(directory: str, system: SystemDefinition, key: Optional[str] = None) -> Optional[ShockProfile]:
        """
        读取剖面；文件缺失或摘要不一致时返回 None

        Ū′ 由剖面 ODE 在读入的 Ū 上重新计算。

        Args:
            directory: 输出目录
            system: 守恒律系统（实验室坐标）
            key: 期望的配置摘要，None 表示不检查
        """
        if not ProfileDAO.exists(directory):
            return None
        with open(os.path.join(directory, PROFILE_JSON), "r", encoding="utf-8") as f:
            meta = json.load(f)
        if key is not None and meta.get("key") != key:
            logger.info("已保存剖面的配置摘要不一致，忽略 %s", directory)
            return None
        frame = pd.read_csv(os.path.join(directory, PROFILE_CSV))
        grid = frame["x"].to_numpy(dtype=float)
        values = frame[[f"U{i}" for i in range(system.n)]].to_numpy(dtype=float)

        raw = meta["triple"]
        triple = ShockTriple(U_minus=np.asarray(raw["U_minus"], dtype=float),
                             U_plus=np.asarray(raw["U_plus"], dtype=float), s=float(raw["s"]),
                             residual=float(raw["residual"]), near_sonic=bool(raw.get("near_sonic", False)),
                             entropy_jump=raw.get("entropy_jump"))
        ode = ProfileODE(system, triple)
        derivative = np.array([ode.derivative(ode.system.to_natural(U)) for U in values])
        profile = ShockProfile(
            triple=triple,
            classification=classify_shock(system, triple),
            linearization=endpoint_linearization(system, triple),
            grid=grid, values=values, derivative=derivative, L=float(meta["L"]),
            theta_decay=tuple(meta["theta_decay"]), theta_expected=tuple(meta["theta_expected"]),
            phase_component=int(meta["phase_component"]), phase_location=float(meta["phase_location"]),
            ode_residual=float(meta["ode_residual"]), conservation_error=float(meta["conservation_error"]),
            endpoint_errors=tuple(meta["endpoint_errors"]),
            system=ode.system,
        )
        logger.info("复用已保存的剖面: %s", directory)
        return profile


class ReportDAO:
    """report.json 的读写"""

    @staticmethod
    def save(text: str, directory: str) -> str:
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, REPORT_JSON)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    @staticmethod
    def load(directory: str) -> Optional[Dict[str, Any]]:
        path = os.path.join(directory, REPORT_JSON)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
