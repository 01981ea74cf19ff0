"""绘图数据导出 - 固定列格式的 CSV 文件"""
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.dao.profile_dao import PROFILE_CSV, write_csv

logger = logging.getLogger(__name__)


@dataclass
class PlotBundle:
    """已完成阶段的内存结果；缺失项对应的 CSV 不输出"""
    d: int = 1
    lopatinski: Any = None
    glancing: Optional[Sequence[Any]] = None
    spectral: Any = None
    evans: Any = None
    low_frequency: Any = None
    runs: List[Any] = field(default_factory=list)
    decay: List[Any] = field(default_factory=list)


def _xi_columns(d: int) -> List[str]:
    return [f"xi_tilde_{i}" for i in range(d - 1)]


def lopatinski_frame(scan, d: int) -> pd.DataFrame:
    rows = []
    for xi, tau, value in scan.samples:
        rows.append([*list(xi)[:d - 1], tau, complex(value).real, complex(value).imag])
    return pd.DataFrame(rows, columns=_xi_columns(d) + ["tau", "re_delta", "im_delta"])


def glancing_frame(glancing, d: int) -> pd.DataFrame:
    rows = []
    for gset in glancing:
        for curve, mult in zip(gset.curves, gset.multiplicities):
            for xi, tau, _ in curve:
                rows.append([*list(xi)[:d - 1], tau, gset.family, mult])
    frame = pd.DataFrame(rows, columns=_xi_columns(d) + ["tau", "family", "multiplicity"])
    return frame.astype({"family": int, "multiplicity": int})


def contour_frame(contour, xi_tilde: Sequence[float], evans=None) -> pd.DataFrame:
    rows = []
    key_xi = tuple(float(x) for x in xi_tilde)
    for lam, value in zip(contour.points, contour.values):
        factor = 1.0
        if evans is not None:
            cached = evans.cache.get((key_xi, complex(lam)))
            if cached is not None:
                factor = cached.norm_factor
        rows.append([complex(lam).real, complex(lam).imag, complex(value).real, complex(value).imag, factor])
    return pd.DataFrame(rows, columns=["re_lambda", "im_lambda", "re_D", "im_D", "norm_factor"])


def history_frame(history: Dict[str, List[float]], columns: Sequence[str]) -> pd.DataFrame:
    return pd.DataFrame({c: np.asarray(history[c], dtype=float) for c in columns})


def root_track_frame(track) -> pd.DataFrame:
    return pd.DataFrame({"rho": track.rhos, "re_lambda": [z.real for z in track.roots],
                         "im_lambda": [z.imag for z in track.roots]})


def emit_plotdata(directory: str, bundle: PlotBundle) -> Dict[str, Any]:
    """
    写出全部可用的 CSV

    Args:
        directory: 报告目录
        bundle: 阶段结果

    Returns:
        {"written": [...], "omitted": [...]}，文件名排序
    """
    os.makedirs(directory, exist_ok=True)
    written, omitted = [], []

    def emit(name: str, frame: pd.DataFrame):
        write_csv(frame, os.path.join(directory, name))
        written.append(name)

    if os.path.exists(os.path.join(directory, PROFILE_CSV)):
        written.append(PROFILE_CSV)
    else:
        omitted.append(PROFILE_CSV)

    if bundle.lopatinski is not None:
        emit("lopatinski_scan.csv", lopatinski_frame(bundle.lopatinski, bundle.d))
    else:
        omitted.append("lopatinski_scan.csv")

    if bundle.glancing is not None and bundle.d > 1:
        emit("glancing.csv", glancing_frame(bundle.glancing, bundle.d))
    elif bundle.d > 1:
        omitted.append("glancing.csv")

    if bundle.spectral is not None and bundle.spectral.contours:
        for k, (contour, cell) in enumerate(zip(bundle.spectral.contours, bundle.spectral.windings)):
            emit(f"evans_contour_{k}.csv", contour_frame(contour, cell["xi_tilde"], bundle.evans))
    else:
        omitted.append("evans_contour_<k>.csv")

    track = getattr(bundle.low_frequency, "root_track", None)
    if track is not None and track.rhos:
        emit("root_track.csv", root_track_frame(track))
    elif bundle.d > 1:
        omitted.append("root_track.csv")

    if bundle.runs:
        for k, run in enumerate(bundle.runs):
            emit(f"norm_history_{run.name}_{k}.csv", history_frame(run.history(), ["t", "l2", "linf"]))
    else:
        omitted.append("norm_history_<name>.csv")

    if bundle.decay:
        for experiment in bundle.decay:
            emit(f"decay_{experiment.d}.csv", history_frame(experiment.history(), ["t", "l2", "low", "high"]))
    else:
        omitted.append("decay_<d>.csv")

    if omitted:
        logger.info("以下绘图数据缺少对应阶段结果，未输出: %s", ", ".join(omitted))
    return {"written": sorted(written), "omitted": omitted}
