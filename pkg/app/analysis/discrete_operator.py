"""离散线性化算子 L_ξ̃ - 二阶守恒差分组装、离散谱与预解式范数"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg as sla

from app.analysis.profile_solver import ShockProfile
from app.models.base import SystemDefinition
from app.utils.errors import ConfigError

logger = logging.getLogger(__name__)


def linearized_flux(system: SystemDefinition, U: np.ndarray, Up: np.ndarray, j: int) -> np.ndarray:
    """A^j = dF^j − (dB^{j0}·)Ū′"""
    A = np.array(system.flux_jacobian(U, j), dtype=float)
    if np.any(Up != 0.0):
        for i in range(system.n):
            e = np.zeros(system.n)
            e[i] = 1.0
            A[:, i] -= system.viscosity_derivative(U, j, 0, e) @ Up
    return A


@dataclass
class DiscreteOperator:
    """
    [−L, L] 内点上的离散 L_ξ̃，两端零 Dirichlet 边界

    viscous 为含 B 的项，convective 为含 A 的项，matrix = viscous + convective。
    """
    xi_tilde: tuple
    L: float
    nodes: np.ndarray
    n: int
    viscous: np.ndarray
    convective: np.ndarray
    max_speed: float
    min_viscosity: float

    @property
    def h(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def matrix(self) -> np.ndarray:
        return self.viscous + self.convective

    def sample(self, func) -> np.ndarray:
        """把 x ↦ ℂⁿ 的函数采样为离散向量"""
        return np.concatenate([np.asarray(func(x), dtype=complex).reshape(self.n) for x in self.nodes])


def assemble_operator(profile: ShockProfile, xi_tilde: Sequence[float] = (), nodes: int = 400,
                      L: Optional[float] = None) -> DiscreteOperator:
    """
    组装 L_ξ̃U = (B⁰⁰U′ − A⁰U + iΣξ_kB^{0k}U)′ + iΣξ_jB^{j0}U′ − iΣξ_jA^jU − Σξ_jξ_kB^{jk}U

    Args:
        profile: 剖面（随激波坐标系）
        xi_tilde: 横向频率
        nodes: 内点数
        L: 截断半长，默认剖面截断长度

    Returns:
        DiscreteOperator
    """
    system = profile.system
    n, d = system.n, system.d
    xi = np.asarray(xi_tilde, dtype=float).reshape(-1) if d > 1 else np.zeros(0)
    if xi.size not in (0, d - 1):
        raise ConfigError(f"ξ̃ 维数 {xi.size} 与 d − 1 = {d - 1} 不符")
    if xi.size == 0:
        xi = np.zeros(d - 1)
    L = float(L or profile.L)
    h = 2.0 * L / (nodes + 1)
    x = -L + h * np.arange(0, nodes + 2)
    states = [profile.evaluate(xx) for xx in x]
    mids = [profile.evaluate(xx + 0.5 * h) for xx in x[:-1]]

    B_mid = [system.viscosity(U, 0, 0) for U, _ in mids]
    A0 = [linearized_flux(system, U, Up, 0) for U, Up in states]
    mixed = [sum((1j * xk * system.viscosity(U, 0, k) for k, xk in enumerate(xi, start=1) if xk != 0.0),
                 np.zeros((n, n), dtype=complex)) for U, _ in states]
    cross = [sum((1j * xj * system.viscosity(U, j, 0) for j, xj in enumerate(xi, start=1) if xj != 0.0),
                 np.zeros((n, n), dtype=complex)) for U, _ in states]
    trans_visc = [sum((xj * xk * system.viscosity(U, j, k)
                       for j, xj in enumerate(xi, start=1) for k, xk in enumerate(xi, start=1)
                       if xj != 0.0 and xk != 0.0), np.zeros((n, n), dtype=complex)) for U, _ in states]
    trans_conv = [sum((1j * xj * linearized_flux(system, U, Up, j) for j, xj in enumerate(xi, start=1) if xj != 0.0),
                      np.zeros((n, n), dtype=complex)) for U, Up in states]

    size = n * nodes
    visc = np.zeros((size, size), dtype=complex)
    conv = np.zeros((size, size), dtype=complex)

    def block(mat, i, j, value):
        if 1 <= j <= nodes:
            mat[(i - 1) * n:i * n, (j - 1) * n:j * n] += value

    for i in range(1, nodes + 1):
        # (B⁰⁰U′)′
        block(visc, i, i + 1, B_mid[i] / h ** 2)
        block(visc, i, i, -(B_mid[i] + B_mid[i - 1]) / h ** 2)
        block(visc, i, i - 1, B_mid[i - 1] / h ** 2)
        # (iΣξ_kB^{0k}U)′ 与 iΣξ_jB^{j0}U′
        block(visc, i, i + 1, (mixed[i + 1] + cross[i]) / (2.0 * h))
        block(visc, i, i - 1, -(mixed[i - 1] + cross[i]) / (2.0 * h))
        block(visc, i, i, -trans_visc[i])
        # −(A⁰U)′ − iΣξ_jA^jU
        block(conv, i, i + 1, -A0[i + 1] / (2.0 * h))
        block(conv, i, i - 1, A0[i - 1] / (2.0 * h))
        block(conv, i, i, -trans_conv[i])

    speeds = [np.max(np.abs(np.linalg.eigvals(A))) for A in A0]
    diffusion = [np.min(np.linalg.eigvals(B[system.q:, system.q:]).real) if system.r else 0.0 for B in B_mid]
    logger.debug("组装离散算子: n=%d, 内点 %d, h=%.4g, ξ̃=%s", n, nodes, h, xi.tolist())
    return DiscreteOperator(xi_tilde=tuple(xi.tolist()), L=L, nodes=x[1:-1], n=n, viscous=visc, convective=conv,
                            max_speed=float(max(speeds)), min_viscosity=float(min(diffusion)))


def discrete_spectrum(op: DiscreteOperator, re_min: float = -np.inf) -> np.ndarray:
    """Re λ ≥ re_min 的离散特征值，按实部降序"""
    eigs = sla.eigvals(op.matrix)
    eigs = eigs[np.isfinite(eigs)]
    eigs = eigs[eigs.real >= re_min]
    return eigs[np.argsort(-eigs.real, kind="stable")]


def resolvent_norm(op: DiscreteOperator, lam: complex) -> float:
    """‖(λ − L_h)^{−1}‖₂ = 1/σ_min(λ − L_h)"""
    shifted = lam * np.eye(op.matrix.shape[0]) - op.matrix
    smallest = float(sla.svdvals(shifted)[-1])
    return np.inf if smallest == 0.0 else 1.0 / smallest


@dataclass
class SpectrumProbe:
    """离散谱与预解式探测结果"""
    xi_tilde: tuple
    nodes: List[int]
    eigenvalues: List[complex]
    rejected: List[complex]
    resolvent: Dict[str, List[float]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"xi_tilde": list(self.xi_tilde), "nodes": self.nodes,
                "eigenvalues": [{"re": z.real, "im": z.imag} for z in self.eigenvalues],
                "rejected": [{"re": z.real, "im": z.imag} for z in self.rejected],
                "resolvent": self.resolvent}


def discrete_spectrum_and_resolvent(profile: ShockProfile, xi_tilde: Sequence[float] = (),
                                    resolvent_at: Sequence[complex] = (), re_min: float = 0.05,
                                    nodes: int = 400, tolerance: float = 2e-2) -> SpectrumProbe:
    """
    N_x 与 2N_x 两套网格上的离散谱；只保留加密后收敛的特征值

    Args:
        profile: 剖面
        xi_tilde: 横向频率
        resolvent_at: 计算预解式范数的 λ
        re_min: 实部下限
        nodes: 粗网格内点数
        tolerance: 加密前后特征值允许的最大偏移

    Returns:
        SpectrumProbe
    """
    coarse = assemble_operator(profile, xi_tilde, nodes)
    fine = assemble_operator(profile, xi_tilde, 2 * nodes)
    eig_coarse = discrete_spectrum(coarse, re_min)
    eig_fine = discrete_spectrum(fine, re_min - tolerance)
    kept, rejected = [], []
    for z in eig_coarse:
        if eig_fine.size and np.min(np.abs(eig_fine - z)) <= tolerance:
            kept.append(complex(eig_fine[np.argmin(np.abs(eig_fine - z))]))
        else:
            rejected.append(complex(z))
    resolvent = {"lambda": [], "coarse": [], "fine": []}
    for lam in resolvent_at:
        resolvent["lambda"].append([complex(lam).real, complex(lam).imag])
        resolvent["coarse"].append(resolvent_norm(coarse, complex(lam)))
        resolvent["fine"].append(resolvent_norm(fine, complex(lam)))
    if rejected:
        logger.warning("%d 个离散特征值在加密下不收敛，已从对照集合中剔除", len(rejected))
    return SpectrumProbe(xi_tilde=coarse.xi_tilde, nodes=[nodes, 2 * nodes], eigenvalues=kept,
                         rejected=rejected, resolvent=resolvent)
