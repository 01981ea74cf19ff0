"""低频结构 - 约化 Evans 函数、横截系数 γ、精化系数 β、根追踪与掠射分支展开"""
import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.analysis.evans import EvansCoefficients, EvansFunction
from app.analysis.inviscid_stability import (Frequency, GlancingSet, LopatinskiDeterminant, LopatinskiScan,
                                             family_eigenvalue, glancing_distance)
from app.models.base import ComovingSystem, SystemDefinition
from app.utils.contour import refine_root
from app.utils.errors import IndeterminateError, StructureError
from app.utils.linalg import spectral_projector, symmetric_sqrt

logger = logging.getLogger(__name__)

EvansCallable = Callable[[Sequence[float], complex], complex]

DEFAULT_GAMMA_RHOS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
DEFAULT_BETA_RHOS = (1e-2, 5e-3, 2.5e-3)
DEFAULT_TRACK_RHOS = (0.2, 0.16, 0.12, 0.09, 0.06, 0.04)


def _extrapolate_to_zero(rhos: Sequence[float], values: Sequence[complex]) -> complex:
    """过全部样本的多项式在 ρ = 0 处的值（Richardson 外推）"""
    rhos = np.asarray(rhos, dtype=float)
    vander = np.vander(rhos, increasing=True)
    return complex(np.linalg.solve(vander, np.asarray(values, dtype=complex))[0])


def _fit_order(rhos: Sequence[float], errors: Sequence[float]) -> float:
    """log–log 回归斜率"""
    rhos = np.asarray(rhos, dtype=float)
    errors = np.asarray(errors, dtype=float)
    mask = errors > 0
    if mask.sum() < 2:
        return float("inf")
    return float(np.polyfit(np.log(rhos[mask]), np.log(errors[mask]), 1)[0])


# ---------------------------------------------------------------------------
# γ 与 ℓ
# ---------------------------------------------------------------------------

@dataclass
class GammaEstimate:
    """D(ρξ̃₀, ρλ₀) ≈ γΔ(ξ̃₀, λ₀)ρ 的拟合"""
    xi0: List[float]
    lam0: complex
    gamma: complex
    delta: complex
    rhos: List[float]
    ratios: List[complex]
    remainder_order: float

    @property
    def tangency_ok(self) -> bool:
        return self.remainder_order > 0

    def to_dict(self) -> Dict[str, Any]:
        return {"xi0": self.xi0, "lam0": {"re": self.lam0.real, "im": self.lam0.imag},
                "gamma": {"re": self.gamma.real, "im": self.gamma.imag},
                "Delta_bar": {"re": self.delta.real, "im": self.delta.imag},
                "rhos": self.rhos, "ratios": [{"re": r.real, "im": r.imag} for r in self.ratios],
                "remainder_order": self.remainder_order, "tangency_ok": self.tangency_ok}


def reduced_evans_gamma(evans: EvansCallable, lopatinski: Callable[[Sequence[float], complex], complex],
                        xi0: Sequence[float], lam0: complex,
                        rhos: Sequence[float] = DEFAULT_GAMMA_RHOS, ell: int = 1) -> GammaEstimate:
    """
    沿射线 (ρξ̃₀, ρλ₀) 拟合 ρ^{−ℓ}D = γΔ(ξ̃₀, λ₀) + o(1)

    γ 由最小两个 ρ 线性外推，余项阶数由其余样本的 log–log 斜率给出。

    Args:
        evans: (ξ̃, λ) ↦ D
        lopatinski: (ξ̃, λ) ↦ Δ
        xi0: 射线方向的 ξ̃ 分量
        lam0: 射线方向的 λ 分量
        rhos: ρ 序列（降序）
        ell: 原点零点阶数

    Returns:
        GammaEstimate
    """
    xi0 = np.asarray(xi0, dtype=float)
    rhos = sorted((float(r) for r in rhos), reverse=True)
    delta = complex(lopatinski(xi0, complex(lam0)))
    if delta == 0:
        raise IndeterminateError("射线方向上 Δ(ξ̃₀, λ₀) = 0，无法归一化", witness={"xi0": xi0.tolist()})
    ratios = [complex(evans(rho * xi0, rho * complex(lam0))) / (rho ** ell * delta) for rho in rhos]
    (ra, rb), (ga, gb) = rhos[-2:], ratios[-2:]
    gamma = (ra * gb - rb * ga) / (ra - rb)
    errors = [abs(r - gamma) for r in ratios[:-2]]
    order = _fit_order(rhos[:-2], errors)
    logger.debug("射线 (%s, %s): γ=%s，余项阶 %.3f", xi0.tolist(), lam0, gamma, order)
    return GammaEstimate(xi0=xi0.tolist(), lam0=complex(lam0), gamma=complex(gamma), delta=delta,
                         rhos=list(rhos), ratios=ratios, remainder_order=order)


def vanishing_order(evans: EvansCallable, xi0: Sequence[float], lam0: complex,
                    rhos: Sequence[float] = (1e-2, 3e-3, 1e-3)) -> int:
    """原点零点沿射线的消失阶数 ℓ"""
    xi0 = np.asarray(xi0, dtype=float)
    values = [abs(complex(evans(rho * xi0, rho * complex(lam0)))) for rho in rhos]
    slope = _fit_order(rhos, values)
    return int(round(slope)) if np.isfinite(slope) else 0


def slow_mode_limit_error(coefficients: EvansCoefficients, xi0: Sequence[float], lam0: complex,
                          rho: float) -> float:
    """ρ → 0 时慢模标架 P(𝔸±)R_ref 与其极限 R_ref 的相对偏差"""
    freq = Frequency.from_polar(rho, xi0, lam0)
    worst = 0.0
    for endpoint in ("+", "-"):
        ref = coefficients.reference_frames[endpoint]
        if ref.shape[1] == 0:
            continue
        A = coefficients.limit_matrix(endpoint, freq)
        projector, _, _ = spectral_projector(A, ref.shape[1], smallest=(endpoint == "+"))
        worst = max(worst, float(np.linalg.norm(projector @ ref - ref) / np.linalg.norm(ref)))
    return worst


# ---------------------------------------------------------------------------
# β
# ---------------------------------------------------------------------------

@dataclass
class BetaEstimate:
    """β = ∂_ρ g / ∂_λ g，g(ρ, λ) = ρ^{−ℓ}D(ρξ̃, ρλ)"""
    xi_tilde: List[float]
    tau: float
    beta: complex
    numerator: complex
    denominator: complex
    glancing_distance: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"xi_tilde": self.xi_tilde, "tau": self.tau,
                "beta": {"re": self.beta.real, "im": self.beta.imag},
                "numerator": {"re": self.numerator.real, "im": self.numerator.imag},
                "denominator": {"re": self.denominator.real, "im": self.denominator.imag},
                "glancing_distance": self.glancing_distance}


def beta_coefficient(evans: EvansCallable, xi_tilde: Sequence[float], tau: float,
                     rhos: Sequence[float] = DEFAULT_BETA_RHOS, ell: int = 1, lam_step: float = 1e-3,
                     glancing: Optional[Sequence[GlancingSet]] = None, glancing_tolerance: float = 1e-2,
                     threshold: float = 1e-8) -> BetaEstimate:
    """
    中性根 (ξ̃, iτ) 处的精化系数 β

    分子 ∂_ρg(0, iτ) = lim g(ρ, iτ)/ρ，分母 ∂_λg(0, iτ) 为 λ 方向中心差分，
    二者都对 ρ 做 Richardson 外推。

    Raises:
        IndeterminateError: 点落在掠射带内，或分母低于阈值
    """
    xi = np.asarray(xi_tilde, dtype=float)
    distance = glancing_distance(glancing, xi, tau) if glancing else None
    if distance is not None and distance < glancing_tolerance:
        raise IndeterminateError(f"(ξ̃, τ) 距掠射集 {distance:.2e} < {glancing_tolerance}",
                                 witness={"xi_tilde": xi.tolist(), "tau": tau})

    def g(rho, lam):
        return complex(evans(rho * xi, rho * lam)) / rho ** ell

    lam = complex(0.0, tau)
    numerators = [g(rho, lam) / rho for rho in rhos]
    denominators = [(g(rho, lam + lam_step) - g(rho, lam - lam_step)) / (2.0 * lam_step) for rho in rhos]
    numerator = _extrapolate_to_zero(rhos, numerators)
    denominator = _extrapolate_to_zero(rhos, denominators)
    scale = max(abs(g(rhos[-1], lam + 1.0)), 1e-300)
    if abs(denominator) <= threshold * scale:
        raise IndeterminateError(f"|∂_λ g| = {abs(denominator):.2e} 低于阈值，Δ_λ ≠ 0 不成立",
                                 witness={"xi_tilde": xi.tolist(), "tau": tau})
    beta = numerator / denominator
    logger.info("β(ξ̃=%s, τ=%.4g) = %s", xi.tolist(), tau, beta)
    return BetaEstimate(xi_tilde=xi.tolist(), tau=float(tau), beta=complex(beta), numerator=numerator,
                        denominator=denominator, glancing_distance=distance)


# ---------------------------------------------------------------------------
# 根追踪
# ---------------------------------------------------------------------------

@dataclass
class RootTrack:
    """λ*(ρξ̃₀) 的采样与展开系数"""
    xi0: List[float]
    tau0: float
    rhos: List[float] = field(default_factory=list)
    roots: List[complex] = field(default_factory=list)
    coefficients: List[complex] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def onset(self) -> bool:
        """存在 Re λ* > 0 的采样"""
        return any(z.real > 0 for z in self.roots)

    @property
    def beta_fit(self) -> Optional[complex]:
        return -self.coefficients[2] if len(self.coefficients) == 3 else None

    def to_dict(self) -> Dict[str, Any]:
        return {"xi0": self.xi0, "tau0": self.tau0, "rhos": self.rhos,
                "roots": [{"re": z.real, "im": z.imag} for z in self.roots],
                "coefficients": [{"re": c.real, "im": c.imag} for c in self.coefficients],
                "onset": self.onset, "warnings": self.warnings}


def root_tracking(evans: EvansCallable, xi0: Sequence[float], tau0: float = 0.0,
                  rhos: Sequence[float] = DEFAULT_TRACK_RHOS, beta_guess: complex = 0.0,
                  max_halvings: int = 3) -> RootTrack:
    """
    从原点平移零点向外延续 Evans 零点 λ*(ρξ̃₀)，并拟合 λ* = c₀ + c₁ρ + c₂ρ²

    Args:
        evans: (ξ̃, λ) ↦ D
        xi0: 横向方向（单位向量）
        tau0: 一阶中性频率 τ₀
        rhos: ρ 序列（自小到大延续）
        beta_guess: 初始预测 iρτ₀ − βρ² 中的 β

    Returns:
        RootTrack
    """
    xi0 = np.asarray(xi0, dtype=float)
    track = RootTrack(xi0=xi0.tolist(), tau0=float(tau0))
    pending = sorted(float(r) for r in rhos)
    done_rhos: List[float] = []
    done_roots: List[complex] = []

    def predict(rho: float) -> complex:
        if len(done_roots) >= 3:
            basis = np.vander(np.asarray(done_rhos[-3:]), 3, increasing=True).astype(complex)
            coeffs = np.linalg.solve(basis, np.asarray(done_roots[-3:], dtype=complex))
            return complex(coeffs @ np.array([1.0, rho, rho * rho]))
        return complex(0.0, rho * tau0) - beta_guess * rho ** 2

    while pending:
        rho = pending.pop(0)
        guess = predict(rho)
        z, ok = refine_root(lambda lam: evans(rho * xi0, lam), guess)
        if ok and abs(z - guess) > 10.0 * rho ** 2 + 1e-3 * rho and len(done_roots) >= 3:
            track.warnings.append(f"ρ={rho:.3g} 处根偏离预测 {abs(z - guess):.2e}，可能与其他零点碰撞")
        if not ok:
            previous = done_rhos[-1] if done_rhos else 0.0
            if max_halvings > 0 and rho - previous > 1e-6:
                max_halvings -= 1
                pending = [0.5 * (previous + rho), rho] + pending
                track.warnings.append(f"ρ={rho:.3g} 处 Newton 发散，步长减半")
            else:
                track.warnings.append(f"ρ={rho:.3g} 处丢失根")
            continue
        done_rhos.append(rho)
        done_roots.append(z)
    track.rhos, track.roots = done_rhos, done_roots
    if len(done_roots) >= 3:
        basis = np.vander(np.asarray(done_rhos), 3, increasing=True).astype(complex)
        coeffs, *_ = np.linalg.lstsq(basis, np.asarray(done_roots), rcond=None)
        track.coefficients = [complex(c) for c in coeffs]
    if track.onset:
        logger.warning("根追踪发现 Re λ* > 0：小 ρ 处失稳")
    return track


# ---------------------------------------------------------------------------
# 分支展开
# ---------------------------------------------------------------------------

@dataclass
class BranchData:
    """掠射点处的 Jordan 链数据"""
    s: int
    m: int
    p: float
    Q: np.ndarray
    alpha: complex = 0j
    kernel: Optional[np.ndarray] = None
    ident_residual: Optional[float] = None

    @property
    def definite(self) -> bool:
        """sgn(p)·Q ≻ 0"""
        sym = np.sign(self.p) * 0.5 * (self.Q + self.Q.T)
        return bool(np.min(np.linalg.eigvalsh(sym)) > 0)


@dataclass
class BranchExpansion:
    """块 Jordan 摄动的预测/实测特征值对照"""
    s: int
    m: int
    p: float
    Q: np.ndarray
    definite: bool
    grid: List[Tuple[float, float]] = field(default_factory=list)
    predicted_eigenvalues: List[List[complex]] = field(default_factory=list)
    measured_eigenvalues: List[List[complex]] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)
    fitted_order: float = float("nan")
    ident_residual: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        def pack(rows):
            return [[{"re": z.real, "im": z.imag} for z in row] for row in rows]
        return {"s": self.s, "m": self.m, "p": self.p, "Q": self.Q.tolist(), "definite": self.definite,
                "grid": [list(g) for g in self.grid], "predicted": pack(self.predicted_eigenvalues),
                "measured": pack(self.measured_eigenvalues), "errors": self.errors,
                "fitted_order": self.fitted_order, "ident_residual": self.ident_residual}


def perturbed_jordan_block(s: int, m: int, p: float, Q: np.ndarray, sigma: float, rho: float,
                           perturbation: Optional[np.ndarray] = None) -> np.ndarray:
    """
    sm × sm 块伴随矩阵：超对角为 I_m，左下块为 σpI_m − iρQ

    perturbation 按 (|σ| + |ρ|) 缩放后加到左下块以外的位置。
    """
    size = s * m
    J = np.zeros((size, size), dtype=complex)
    for b in range(s - 1):
        J[b * m:(b + 1) * m, (b + 1) * m:(b + 2) * m] = np.eye(m)
    J[(s - 1) * m:, :m] = sigma * p * np.eye(m) - 1j * rho * np.asarray(Q)
    if perturbation is not None:
        E = np.array(perturbation, dtype=complex)
        E[(s - 1) * m:, :m] = 0.0
        J = J + (abs(sigma) + abs(rho)) * E
    return J


def predicted_branch_eigenvalues(s: int, p: float, Q: np.ndarray, sigma: float, rho: float,
                                 alpha: complex = 0j) -> List[complex]:
    """π = α + ε^j·i·(pσ − iq_kρ)^{1/s}，按幅角字典序排列"""
    q_values = np.linalg.eigvals(np.asarray(Q, dtype=complex))
    out = []
    for q in q_values:
        base = complex(p * sigma - 1j * q * rho) ** (1.0 / s)
        for j in range(s):
            out.append(alpha + np.exp(2j * np.pi * j / s) * 1j * base)
    return sorted(out, key=lambda z: (round(float(np.angle(z - alpha)), 12), abs(z - alpha)))


def _match(predicted: Sequence[complex], measured: Sequence[complex]) -> Tuple[List[complex], float]:
    cost = np.abs(np.subtract.outer(np.asarray(predicted), np.asarray(measured)))
    rows, cols = linear_sum_assignment(cost)
    ordered = [complex(measured[c]) for c in cols[np.argsort(rows)]]
    return ordered, float(cost[rows, cols].max())


def jordan_branch_comparison(data: BranchData, grid: Sequence[Tuple[float, float]],
                             seed: int = 0, perturbation_scale: float = 0.5) -> BranchExpansion:
    """
    在 (σ, ρ) 网格上比较摄动块 Jordan 矩阵的特征值与分支展开预测

    Args:
        data: Jordan 链数据 (s, m, p, Q)
        grid: (σ, ρ) 采样点
        seed: 高阶摄动的随机种子
        perturbation_scale: 高阶摄动幅度

    Returns:
        BranchExpansion，fitted_order 为误差对 |σ| + |ρ| 的 log–log 斜率
    """
    rng = np.random.default_rng(seed)
    size = data.s * data.m
    perturbation = perturbation_scale * rng.standard_normal((size, size))
    result = BranchExpansion(s=data.s, m=data.m, p=data.p, Q=np.asarray(data.Q), definite=data.definite,
                             ident_residual=data.ident_residual)
    scales = []
    for sigma, rho in grid:
        J = perturbed_jordan_block(data.s, data.m, data.p, data.Q, sigma, rho, perturbation)
        measured = list(data.alpha + 1j * np.linalg.eigvals(J))
        predicted = predicted_branch_eigenvalues(data.s, data.p, data.Q, sigma, rho, data.alpha)
        ordered, error = _match(predicted, measured)
        result.grid.append((float(sigma), float(rho)))
        result.predicted_eigenvalues.append(predicted)
        result.measured_eigenvalues.append(ordered)
        result.errors.append(error)
        scales.append(abs(sigma) + abs(rho))
    result.fitted_order = _fit_order(scales, result.errors)
    if not data.definite:
        logger.warning("sgn(p)·Q 非正定：掠射方向上真正耦合不成立")
    return result


def _xi1_derivatives(system: SystemDefinition, U: np.ndarray, xi: np.ndarray, family: int,
                     max_order: int = 4) -> np.ndarray:
    """a(ξ) 关于 ξ₁ 的 0..max_order 阶导数（多项式拟合）"""
    h = 2e-2 * max(float(np.linalg.norm(xi[1:])), 1e-12)
    offsets = np.linspace(-5 * h, 5 * h, 11)
    samples = []
    for dx in offsets:
        point = xi.copy()
        point[0] += dx
        samples.append(family_eigenvalue(system, U, point, family)[0])
    coeffs = np.polyfit(offsets / h, np.asarray(samples), 6)[::-1]
    return np.array([coeffs[k] * factorial(k) / h ** k for k in range(max_order + 1)])


def glancing_branch_data(system: SystemDefinition, U: Sequence[float], family: int, xi_tilde: Sequence[float],
                         x1: float, s: float = 0.0, max_order: int = 4) -> BranchData:
    """
    掠射点 ξ₀ = (x1, ξ̃) 处的 Jordan 链长度 s、核维数 m、p = 1/(s!·∂^s a) 与 Q = pRᵀB̂R

    R 为 A₀^{1/2} 归一化对称符号在特征值 a(ξ₀) 处的正交核基。
    """
    U = np.asarray(U, dtype=float)
    comoving = ComovingSystem(system, s)
    xi = np.concatenate([[float(x1)], np.atleast_1d(np.asarray(xi_tilde, dtype=float))])
    derivatives = _xi1_derivatives(comoving, U, xi, family, max_order)
    amp = max(1.0, abs(derivatives[0]))
    h = 2e-2 * max(float(np.linalg.norm(xi[1:])), 1e-12)
    chain = next((k for k in range(2, max_order + 1) if abs(derivatives[k]) * h ** k > 1e-7 * amp), None)
    if chain is None:
        raise IndeterminateError(f"ξ₁ 导数直到 {max_order} 阶均为零，无法确定 Jordan 链长度", witness=xi.tolist())
    p = 1.0 / (factorial(chain) * derivatives[chain])

    form = system.symmetric_form(U)
    if form is None:
        raise StructureError(f"{system.name} 未提供对称化形式，无法构造分支展开")
    S = symmetric_sqrt(form.A0)
    S_inv = np.linalg.inv(S)
    normal = S_inv @ (form.Aj[0] - s * form.A0) @ S_inv
    symbol = S_inv @ (form.symbol(xi) - s * xi[0] * form.A0) @ S_inv
    symbol = 0.5 * (symbol + symbol.T)
    values, vectors = np.linalg.eigh(symbol)
    a_value = derivatives[0]
    mask = np.abs(values - a_value) <= 1e-6 * amp
    if not mask.any():
        raise IndeterminateError("对称符号中找不到掠射特征值", witness={"a": a_value, "eigenvalues": values.tolist()})
    R = vectors[:, mask]
    viscosity = S_inv @ form.viscosity_symbol(xi) @ S_inv
    viscosity = 0.5 * (viscosity + viscosity.T)
    Q = p * R.T @ viscosity @ R
    ident = R.T @ (0.5 * (normal + normal.T)) @ R
    residual = float(np.linalg.norm(ident - derivatives[1] * np.eye(R.shape[1])))
    logger.info("掠射点 ξ=%s: s=%d, m=%d, p=%.4g", xi.tolist(), chain, R.shape[1], p)
    return BranchData(s=chain, m=R.shape[1], p=float(p), Q=Q, alpha=complex(0.0, -a_value), kernel=R,
                      ident_residual=residual)


def branch_expansion(system: SystemDefinition, U: Sequence[float], family: int, xi_tilde: Sequence[float],
                     x1: float, grid: Optional[Sequence[Tuple[float, float]]] = None, s: float = 0.0,
                     seed: int = 0) -> BranchExpansion:
    """
    掠射点处的分支展开：链数据 + 摄动块 Jordan 对照

    Args:
        system: 守恒律系统
        U: 端点状态
        family: 特征族
        xi_tilde, x1: 掠射点 ξ₀ = (x1, ξ̃)
        grid: (σ, ρ) 网格，默认沿 (1, 1) 方向跨三个数量级
        s: 激波速度

    Returns:
        BranchExpansion
    """
    data = glancing_branch_data(system, U, family, xi_tilde, x1, s)
    grid = grid or [(t, t) for t in np.logspace(-6, -3, 7)]
    return jordan_branch_comparison(data, grid, seed)


# ---------------------------------------------------------------------------
# 汇总
# ---------------------------------------------------------------------------

@dataclass
class LowFrequencyReport:
    """低频结构汇总"""
    ell: int
    gamma: complex
    gamma_rays: List[GammaEstimate] = field(default_factory=list)
    gamma_spread: float = 0.0
    beta: List[BetaEstimate] = field(default_factory=list)
    root_track: Optional[RootTrack] = None
    convergence_order: float = float("nan")
    weak_refined: Optional[bool] = None
    strong_refined: Optional[bool] = None
    refused: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def transversal(self) -> bool:
        return abs(self.gamma) > 1e-10

    def to_dict(self) -> Dict[str, Any]:
        return {"ell": self.ell, "gamma": {"re": self.gamma.real, "im": self.gamma.imag},
                "transversal": self.transversal,
                "Delta_bar": [g.to_dict() for g in self.gamma_rays], "gamma_spread": self.gamma_spread,
                "beta": [b.to_dict() for b in self.beta],
                "root_track": self.root_track.to_dict() if self.root_track else None,
                "convergence_order": self.convergence_order, "weak_refined": self.weak_refined,
                "strong_refined": self.strong_refined, "refused": self.refused}


def default_rays(d: int) -> List[Tuple[List[float], complex]]:
    """至少三条 Re λ₀ ≥ 0 的单位射线"""
    if d == 1:
        return [([], 1.0 + 0j), ([], np.exp(0.25j * np.pi)), ([], np.exp(-0.25j * np.pi))]
    e = np.zeros(d - 1)
    e[0] = 1.0
    return [(list(0.0 * e), 1.0 + 0j), (list(0.6 * e), 0.8 + 0j), (list(0.6 * e), 0.8 * np.exp(0.25j * np.pi))]


def analyze_low_frequency(evans: EvansFunction, scan: Optional[LopatinskiScan] = None,
                          glancing: Optional[Sequence[GlancingSet]] = None,
                          rays: Optional[Sequence[Tuple[Sequence[float], complex]]] = None,
                          gamma_rhos: Sequence[float] = DEFAULT_GAMMA_RHOS,
                          beta_rhos: Sequence[float] = DEFAULT_BETA_RHOS,
                          track_rhos: Sequence[float] = DEFAULT_TRACK_RHOS,
                          glancing_tolerance: float = 1e-2) -> LowFrequencyReport:
    """
    低频分析：ℓ、各射线上的 γ、中性根处的 β 与根追踪、精化稳定性判定

    Args:
        evans: 剖面上的 Evans 函数
        scan: Lopatinski 扫描结果（提供中性根与弱稳定性）
        glancing: 掠射集
        rays: (ξ̃₀, λ₀) 射线

    Returns:
        LowFrequencyReport
    """
    lop: LopatinskiDeterminant = evans.coefficients.lopatinski
    d = evans.d
    rays = list(rays or default_rays(d))
    ell = vanishing_order(evans, np.zeros(d - 1), 1.0)
    estimates = [reduced_evans_gamma(evans, lop, xi0, lam0, gamma_rhos, max(ell, 1)) for xi0, lam0 in rays]
    reference = estimates[0]
    gammas = np.array([g.gamma for g in estimates])
    spread = float(np.max(np.abs(gammas - gammas.mean())) / max(abs(gammas.mean()), 1e-300))
    report = LowFrequencyReport(ell=ell, gamma=reference.gamma, gamma_rays=estimates, gamma_spread=spread,
                                convergence_order=reference.remainder_order)
    if not reference.tangency_ok:
        logger.warning("ρ^{-ℓ}D − γΔ 的余项不衰减（拟合阶 %.3f），横截性拟合失败", reference.remainder_order)

    weak_lop = scan.weak_stable if scan is not None else None
    strong_lop = scan.strong_stable if scan is not None else None
    neutral = list(scan.neutral_roots) if scan is not None else []
    if d == 1:
        report.weak_refined, report.strong_refined = weak_lop, strong_lop
        return report

    report.weak_refined = weak_lop
    report.strong_refined = bool(weak_lop)
    for root in neutral:
        if not root.get("off_glancing", True):
            report.refused.append({"xi_tilde": root["xi_tilde"], "tau": root["tau"], "reason": "掠射带内"})
            report.strong_refined = False
            continue
        try:
            estimate = beta_coefficient(evans, root["xi_tilde"], root["tau"], beta_rhos, max(ell, 1),
                                        glancing=glancing, glancing_tolerance=glancing_tolerance)
        except IndeterminateError as exc:
            report.refused.append({"xi_tilde": root["xi_tilde"], "tau": root["tau"], **exc.to_dict()})
            report.strong_refined = False
            continue
        report.beta.append(estimate)
        if estimate.beta.real < 0:
            report.weak_refined = False
            report.strong_refined = False
        elif estimate.beta.real == 0:
            report.strong_refined = False
    if report.beta:
        first = report.beta[0]
        xi = np.asarray(first.xi_tilde, dtype=float)
        norm = float(np.linalg.norm(xi))
        report.root_track = root_tracking(evans, xi / norm, first.tau / norm, track_rhos,
                                          beta_guess=first.beta / norm ** 2)
    logger.info("低频分析: ℓ=%d γ=%s 弱精化=%s 强精化=%s", ell, report.gamma,
                report.weak_refined, report.strong_refined)
    return report
