"""图表生成工具模块 - 由 CSV 绘图数据生成剖面、Evans 围道像、Lopatinski 扫描与范数历史图"""
import glob
import logging
import os
from typing import List, Optional

import matplotlib
matplotlib.use('Agg')  # 使用非交互式后端
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

# 尝试多种中文字体
plt.rcParams['font.sans-serif'] = ['Arial Unicode MS', 'PingFang SC', 'Hiragino Sans GB', 'SimHei',
                                   'WenQuanYi Micro Hei', 'DejaVu Sans']
plt.rcParams['axes.unicode_minus'] = False  # 用来正常显示负号
plt.rcParams['savefig.facecolor'] = 'white'  # 确保保存的图片背景是白色

logger = logging.getLogger(__name__)


class ChartGenerator:
    """
    图表生成器类，读取报告目录中的 CSV 并输出 PNG
    """

    def __init__(self, output_dir: str):
        """
        初始化图表生成器

        Args:
            output_dir: 图表保存目录
        """
        self.output_dir = output_dir
        os.makedirs(self.output_dir, exist_ok=True)

    def _save(self, name: str) -> str:
        chart_path = os.path.join(self.output_dir, name)
        plt.tight_layout()
        plt.savefig(chart_path, dpi=120)
        plt.close()
        logger.info("图表已生成: %s", chart_path)
        return chart_path

    def generate_profile_chart(self, frame: pd.DataFrame) -> str:
        """
        剖面各分量

        Args:
            frame: profile.csv 内容

        Returns:
            生成的图表文件路径
        """
        plt.figure(figsize=(8, 5))
        for column in frame.columns:
            if column != "x":
                plt.plot(frame["x"], frame[column], label=column)
        plt.xlabel("x")
        plt.title('激波剖面', fontsize=14, fontweight='bold')
        plt.legend()
        plt.grid(True, linestyle='--', alpha=0.5)
        return self._save("profile.png")

    def generate_contour_chart(self, frame: pd.DataFrame, index: int) -> str:
        """Evans 函数在围道上的像 D(∂Ω)"""
        fig, (left, right) = plt.subplots(1, 2, figsize=(11, 5))
        left.plot(frame["re_lambda"], frame["im_lambda"], '.-', markersize=2)
        left.set_title('围道 ∂Ω')
        left.set_xlabel('Re λ')
        left.set_ylabel('Im λ')
        left.axis('equal')
        right.plot(frame["re_D"], frame["im_D"], '-', linewidth=1)
        right.plot([0], [0], 'r+', markersize=12)
        right.set_title('D(∂Ω)')
        right.set_xlabel('Re D')
        right.set_ylabel('Im D')
        fig.suptitle(f'Evans 函数围道像 #{index}', fontsize=14, fontweight='bold')
        return self._save(f"evans_contour_{index}.png")

    def generate_lopatinski_chart(self, frame: pd.DataFrame) -> str:
        """球面扫描上的 |Δ|"""
        modulus = np.hypot(frame["re_delta"].to_numpy(), frame["im_delta"].to_numpy())
        plt.figure(figsize=(8, 5))
        xi_columns = [c for c in frame.columns if c.startswith("xi_tilde_")]
        if xi_columns:
            angle = np.arctan2(frame["tau"].to_numpy(), frame[xi_columns[0]].to_numpy())
            order = np.argsort(angle)
            plt.semilogy(angle[order], modulus[order], '.-')
            plt.xlabel('arg(ξ̃₀ + iτ)')
        else:
            plt.semilogy(frame["tau"], modulus, 'o')
            plt.xlabel('τ')
        plt.ylabel('|Δ|')
        plt.title('Lopatinski 行列式球面扫描', fontsize=14, fontweight='bold')
        plt.grid(True, which='both', linestyle='--', alpha=0.5)
        return self._save("lopatinski_scan.png")

    def generate_norm_chart(self, frame: pd.DataFrame, name: str) -> str:
        """范数历史（对数纵轴）"""
        plt.figure(figsize=(8, 5))
        for column in frame.columns:
            if column != "t":
                values = frame[column].to_numpy()
                plt.semilogy(frame["t"].to_numpy()[values > 0], values[values > 0], label=column)
        plt.xlabel('t')
        plt.title(f'范数历史 {name}', fontsize=14, fontweight='bold')
        plt.legend()
        plt.grid(True, which='both', linestyle='--', alpha=0.5)
        return self._save(f"{name}.png")

    def generate_all(self, report_dir: str) -> List[str]:
        """
        为报告目录中的全部 CSV 生成图表

        Args:
            report_dir: 报告目录

        Returns:
            生成的图表路径列表
        """
        charts: List[str] = []
        profile = self._read(os.path.join(report_dir, "profile.csv"))
        if profile is not None:
            charts.append(self.generate_profile_chart(profile))
        scan = self._read(os.path.join(report_dir, "lopatinski_scan.csv"))
        if scan is not None and len(scan):
            charts.append(self.generate_lopatinski_chart(scan))
        for path in sorted(glob.glob(os.path.join(report_dir, "evans_contour_*.csv"))):
            index = int(os.path.basename(path)[len("evans_contour_"):-len(".csv")])
            charts.append(self.generate_contour_chart(pd.read_csv(path), index))
        for pattern in ("norm_history_*.csv", "decay_*.csv"):
            for path in sorted(glob.glob(os.path.join(report_dir, pattern))):
                name = os.path.basename(path)[:-len(".csv")]
                charts.append(self.generate_norm_chart(pd.read_csv(path), name))
        return charts

    @staticmethod
    def _read(path: str) -> Optional[pd.DataFrame]:
        return pd.read_csv(path) if os.path.exists(path) else None
