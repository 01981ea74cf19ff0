"""线性代数辅助工具 - 谱投影、不变子空间、有限差分等"""
from typing import Any, Callable, List, Tuple

import numpy as np
from scipy import linalg as sla

from app.utils.errors import IndeterminateError


def fd_jacobian(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """
    中心差分雅可比矩阵

    Args:
        func: 向量函数
        x: 求值点
        step: 相对步长

    Returns:
        雅可比矩阵 (m × n)
    """
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(func(x))
    jac = np.zeros((f0.size, x.size))
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (np.atleast_1d(func(xp)) - np.atleast_1d(func(xm))) / (2.0 * h)
    return jac


def split_by_real_part(eigenvalues: np.ndarray, k: int, smallest: bool = True) -> Tuple[float, float]:
    """
    按实部排序后在第 k 个和第 k+1 个特征值之间取分割阈值

    Returns:
        (阈值, 间隙)
    """
    re = np.sort(np.real(eigenvalues))
    if not smallest:
        re = re[::-1]
    gap = abs(re[k] - re[k - 1])
    return 0.5 * (re[k] + re[k - 1]), gap


def spectral_projector(matrix: np.ndarray, k: int, smallest: bool = True) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    计算对应 k 个实部最小（或最大）特征值的谱投影

    通过排序复 Schur 分解与 Sylvester 方程得到 Riesz 投影 P = Q [[I, Y], [0, 0]] Q*。

    Args:
        matrix: 方阵
        k: 选取的特征值个数
        smallest: True 选实部最小者，False 选实部最大者

    Returns:
        (投影矩阵, 选中的特征值, 分割间隙)
    """
    matrix = np.asarray(matrix, dtype=complex)
    size = matrix.shape[0]
    if k == 0:
        return np.zeros((size, size), dtype=complex), np.zeros(0, dtype=complex), np.inf
    if k == size:
        return np.eye(size, dtype=complex), np.linalg.eigvals(matrix), np.inf
    eigenvalues = np.linalg.eigvals(matrix)
    threshold, gap = split_by_real_part(eigenvalues, k, smallest)
    if smallest:
        selector = lambda z: z.real < threshold  # noqa: E731
    else:
        selector = lambda z: z.real > threshold  # noqa: E731
    t_mat, q_mat, sdim = sla.schur(matrix, output="complex", sort=selector)
    if sdim != k:
        raise IndeterminateError(f"谱分割失败：期望 {k} 个特征值，Schur 排序得到 {sdim} 个")
    t11 = t_mat[:k, :k]
    t12 = t_mat[:k, k:]
    t22 = t_mat[k:, k:]
    y_mat = sla.solve_sylvester(t11, -t22, t12)
    block = np.zeros((size, size), dtype=complex)
    block[:k, :k] = np.eye(k)
    block[:k, k:] = y_mat
    projector = q_mat @ block @ q_mat.conj().T
    return projector, np.diag(t11).copy(), gap


def real_invariant_frame(matrix: np.ndarray, selector: Callable[[float, float], bool]) -> np.ndarray:
    """
    实矩阵不变子空间的实正交基（实 Schur 排序）

    Args:
        matrix: 实方阵
        selector: 接收 (实部, 虚部) 的筛选函数；共轭对必须同时选中

    Returns:
        正交基 (n × m)
    """
    matrix = np.asarray(matrix, dtype=float)
    _, z_mat, sdim = sla.schur(matrix, output="real", sort=selector)
    return fix_frame_signs(z_mat[:, :sdim].copy())


def fix_frame_signs(frame: np.ndarray) -> np.ndarray:
    """将每一列最大模分量调整为正实数"""
    frame = np.array(frame)
    for j in range(frame.shape[1]):
        column = frame[:, j]
        idx = int(np.argmax(np.abs(column)))
        pivot = column[idx]
        if abs(pivot) > 0:
            frame[:, j] = column * (abs(pivot) / pivot)
    return frame


def symmetric_sqrt(matrix: np.ndarray) -> np.ndarray:
    """对称正定矩阵的平方根"""
    values, vectors = np.linalg.eigh(0.5 * (matrix + matrix.T))
    return (vectors * np.sqrt(values)) @ vectors.T


def cluster_values(values: np.ndarray, tol: float) -> List[np.ndarray]:
    """
    将已排序的实数值按间距聚类

    Returns:
        每个聚类的下标数组
    """
    order = np.argsort(values)
    clusters: List[List[int]] = []
    for idx in order:
        if clusters and abs(values[idx] - values[clusters[-1][-1]]) <= tol:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    return [np.array(c) for c in clusters]


def eigenvector_condition(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """特征分解及特征向量矩阵条件数"""
    values, vectors = np.linalg.eig(matrix)
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(vectors))
    if not np.isfinite(cond):
        cond = np.inf
    return values, vectors, cond


def householder_orthonormalize(frame: np.ndarray) -> Tuple[np.ndarray, complex]:
    """
    QR 正交化，返回正交基及 log det R

    Returns:
        (Q, log det R)
    """
    q_mat, r_mat = np.linalg.qr(frame)
    diag = np.diag(r_mat).astype(complex)
    return q_mat, complex(np.sum(np.log(diag)))


def to_jsonable(obj: Any) -> Any:
    """将 numpy / 复数对象递归转换为 JSON 可序列化对象"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(np.real(obj)), "im": float(np.imag(obj))}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if np.isfinite(value) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
