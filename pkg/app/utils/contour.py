"""复平面围道工具 - 参数化、自适应幅角原理与根的精化"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np
from scipy.optimize import root

from app.utils.errors import ContourError, IndeterminateError

logger = logging.getLogger(__name__)

Path = Callable[[float], complex]


def half_disc_contour(radius: float, shift: float = 0.0) -> Path:
    """
    {Re λ ≥ shift, |λ| ≤ radius} 的逆时针边界，t ∈ [0, 1)

    先沿右侧圆弧自下而上，再沿直线 Re λ = shift 自上而下。
    """
    if not 0.0 <= abs(shift) < radius:
        raise ValueError("shift 必须满足 |shift| < radius")
    half_angle = float(np.arccos(shift / radius))
    height = radius * np.sin(half_angle)
    arc_length = 2.0 * half_angle * radius
    segment_length = 2.0 * height
    split = arc_length / (arc_length + segment_length)

    def path(t: float) -> complex:
        t = t % 1.0
        if t < split:
            angle = -half_angle + 2.0 * half_angle * t / split
            return complex(radius * np.cos(angle), radius * np.sin(angle))
        u = (t - split) / (1.0 - split)
        return complex(shift, height - 2.0 * height * u)

    return path


def rectangle_contour(lower_left: complex, upper_right: complex) -> Path:
    """矩形的逆时针边界，t ∈ [0, 1)"""
    x0, y0 = lower_left.real, lower_left.imag
    x1, y1 = upper_right.real, upper_right.imag
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    lengths = np.array([x1 - x0, y1 - y0, x1 - x0, y1 - y0], dtype=float)
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)]) / lengths.sum()

    def path(t: float) -> complex:
        t = t % 1.0
        side = min(int(np.searchsorted(cumulative, t, side="right")) - 1, 3)
        u = (t - cumulative[side]) / (cumulative[side + 1] - cumulative[side])
        return corners[side] + u * (corners[(side + 1) % 4] - corners[side])

    return path


@dataclass
class WindingResult:
    """围道积分结果"""
    winding: int
    parameters: List[float] = field(default_factory=list)
    points: List[complex] = field(default_factory=list)
    values: List[complex] = field(default_factory=list)
    min_modulus: float = np.inf

    @property
    def total_argument(self) -> float:
        values = np.asarray(self.values)
        ratios = np.roll(values, -1) / values
        return float(np.sum(np.angle(ratios)))


def adaptive_winding(func: Callable[[complex], complex], path: Path, initial_points: int = 64,
                     max_points: int = 4096, threshold: float = 0.0,
                     max_increment: float = 0.5 * np.pi) -> WindingResult:
    """
    幅角原理计数：自适应加密直到相邻幅角增量小于 max_increment

    Args:
        func: 解析函数
        path: 闭合围道参数化 t ∈ [0, 1)
        initial_points: 初始采样点数
        max_points: 采样预算
        threshold: |func| 的下限，低于此值视为围道与零点相交
        max_increment: 相邻样本允许的最大幅角增量

    Returns:
        WindingResult

    Raises:
        ContourError: 围道上 |func| 低于阈值
        IndeterminateError: 采样预算耗尽
    """
    params = list(np.linspace(0.0, 1.0, int(initial_points), endpoint=False))
    points = [path(t) for t in params]
    values = [complex(func(z)) for z in points]

    def check(z: complex, v: complex) -> None:
        if not np.isfinite(v) or abs(v) <= threshold:
            raise ContourError(f"围道上 |D| = {abs(v):.3e} 低于阈值，围道与谱相交", witness=z)

    for z, v in zip(points, values):
        check(z, v)
    while True:
        vals = np.asarray(values)
        increments = np.angle(np.roll(vals, -1) / vals)
        bad = np.nonzero(np.abs(increments) >= max_increment)[0]
        if bad.size == 0:
            break
        if len(params) + bad.size > max_points:
            raise IndeterminateError(f"幅角原理采样预算 {max_points} 耗尽", witness=len(params))
        inserts = []
        for k in bad:
            t0 = params[k]
            t1 = params[(k + 1) % len(params)] + (1.0 if k == len(params) - 1 else 0.0)
            t_mid = 0.5 * (t0 + t1) % 1.0
            z = path(t_mid)
            v = complex(func(z))
            check(z, v)
            inserts.append((t_mid, z, v))
        merged = sorted(list(zip(params, points, values)) + inserts, key=lambda item: item[0])
        params = [m[0] for m in merged]
        points = [m[1] for m in merged]
        values = [m[2] for m in merged]
    vals = np.asarray(values)
    total = float(np.sum(np.angle(np.roll(vals, -1) / vals)))
    winding = int(round(total / (2.0 * np.pi)))
    logger.debug("围道采样 %d 点，幅角总增量 %.6f，绕数 %d", len(params), total, winding)
    return WindingResult(winding=winding, parameters=params, points=points, values=values,
                         min_modulus=float(np.min(np.abs(vals))))


def refine_root(func: Callable[[complex], complex], guess: complex, tol: float = 1e-12) -> Tuple[complex, bool]:
    """以 (Re, Im) 二维实方程组精化复零点"""
    scale = max(1.0, abs(guess))

    def real_system(v):
        value = func(complex(v[0], v[1]))
        return [value.real, value.imag]

    sol = root(real_system, [guess.real, guess.imag], method="hybr", tol=tol * scale)
    z = complex(sol.x[0], sol.x[1])
    return z, bool(sol.success)


def locate_zeros(func: Callable[[complex], complex], lower_left: complex, upper_right: complex,
                 min_size: float = 1e-2, initial_points: int = 32, max_points: int = 2048,
                 threshold: float = 0.0, _depth: int = 0) -> List[Tuple[complex, int]]:
    """
    矩形递归细分定位零点

    Returns:
        [(零点, 重数)]，重数为最小单元上的绕数
    """
    path = rectangle_contour(lower_left, upper_right)
    count = adaptive_winding(func, path, initial_points, max_points, threshold).winding
    if count <= 0:
        return []
    width = upper_right.real - lower_left.real
    height = upper_right.imag - lower_left.imag
    if max(width, height) <= min_size or _depth > 30:
        centre = 0.5 * (lower_left + upper_right)
        z, ok = refine_root(func, centre)
        if not ok or not (lower_left.real - width <= z.real <= upper_right.real + width
                          and lower_left.imag - height <= z.imag <= upper_right.imag + height):
            z = centre
        return [(z, count)]
    # 沿长边二分；分割线稍作偏移以避开对称位置的零点
    found: List[Tuple[complex, int]] = []
    if width >= height:
        mid = lower_left.real + 0.5 * width * (1.0 + 1e-3)
        halves = [(lower_left, complex(mid, upper_right.imag)), (complex(mid, lower_left.imag), upper_right)]
    else:
        mid = lower_left.imag + 0.5 * height * (1.0 + 1e-3)
        halves = [(lower_left, complex(upper_right.real, mid)), (complex(lower_left.real, mid), upper_right)]
    for a, b in halves:
        found.extend(locate_zeros(func, a, b, min_size, initial_points, max_points, threshold, _depth + 1))
    return found

