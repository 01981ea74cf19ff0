"""Evans 函数 - 一阶相变量系统、相容分裂、复合矩阵/连续正交化求值与绕数"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from app.analysis.discrete_operator import linearized_flux
from app.analysis.inviscid_stability import Frequency, LopatinskiDeterminant
from app.analysis.profile_solver import ShockProfile
from app.utils.contour import WindingResult, adaptive_winding, half_disc_contour, locate_zeros
from app.utils.errors import ConfigError, ContourError, EvansError, IndeterminateError, WorkbenchError
from app.utils.linalg import householder_orthonormalize, real_invariant_frame, spectral_projector

logger = logging.getLogger(__name__)

RTOL = 1e-10
ATOL = 1e-12
COMPOUND_MAX_DIM = 6


# ---------------------------------------------------------------------------
# 系数
# ---------------------------------------------------------------------------

@dataclass
class _NodeCoefficients:
    C0: np.ndarray
    Clam: np.ndarray
    C1: np.ndarray
    C2: np.ndarray


class EvansCoefficients:
    """
    沿剖面预先计算的相变量系数

    W = (z, ω)，z = B⁰⁰U′ + iΣξ_k B^{0k}U − A⁰U ∈ ℂⁿ，ω = (∂W/∂U)^{II} U ∈ ℂʳ，
    𝔸(x; ξ̃, λ) = C0 + λ Cλ + Σ ξ_j C1_j + Σ ξ_j ξ_k C2_jk。
    """

    def __init__(self, profile: ShockProfile):
        if profile.system is None:
            raise EvansError("剖面缺少系统定义，无法构造 Evans 系统")
        self.profile = profile
        self.system = profile.system
        self.n, self.r, self.q = self.system.n, self.system.r, self.system.q
        self.N = self.n + self.r
        self.d = self.system.d
        self.grid = profile.grid
        nodes = [self._node(U, Up) for U, Up in zip(profile.values, profile.derivative)]
        self.C0 = np.array([c.C0 for c in nodes])
        self.Clam = np.array([c.Clam for c in nodes])
        # 方向轴在前：C1 为 (d−1, G, N, N)，C2 为 (d−1, d−1, G, N, N)
        self.C1 = np.moveaxis(np.array([c.C1 for c in nodes]), 0, 1)
        self.C2 = np.moveaxis(np.array([c.C2 for c in nodes]), 0, 2)
        zero = np.zeros(self.n)
        self.limits = {"-": self._node(profile.triple.U_minus, zero),
                       "+": self._node(profile.triple.U_plus, zero)}
        self.lopatinski = LopatinskiDeterminant(profile.system.base, profile.triple, profile.classification)
        self.k = self._stable_dimension()
        self.reference_frames = {"+": self._reference_frame("+"), "-": self._reference_frame("-")}

    def _node(self, U: np.ndarray, Up: np.ndarray) -> _NodeCoefficients:
        n, r, q, N, d = self.n, self.r, self.q, self.N, self.d
        system = self.system
        W = system.to_natural(U)
        dw = system.natural_jacobian(U)[q:, :]
        A0 = linearized_flux(system, U, Up, 0)
        T = np.vstack([-A0[:q, :], dw])
        T_inv = np.linalg.inv(T)
        V = np.zeros((n, N))
        V[:, :q] = T_inv[:, :q]
        V[:, n:] = T_inv[:, q:]
        b = system.natural_viscosity(W, 0, 0)[q:, :]
        E = np.zeros((r, N))
        E[:, q:n] = np.eye(r)
        Pz = np.linalg.solve(b, E + A0[q:, :] @ V)
        norm_up = float(np.linalg.norm(Up))
        if norm_up > 0.0:
            h = 1e-6 * max(1.0, float(np.linalg.norm(U))) / norm_up
            D = (system.natural_jacobian(U + h * Up)[q:, :] - system.natural_jacobian(U - h * Up)[q:, :]) / (2.0 * h)
        else:
            D = np.zeros((r, n))
        C0 = np.zeros((N, N), dtype=complex)
        C0[n:, :] = Pz + D @ V
        Clam = np.zeros((N, N), dtype=complex)
        Clam[:n, :] = V
        C1 = np.zeros((max(d - 1, 0), N, N), dtype=complex)
        C2 = np.zeros((max(d - 1, 0), max(d - 1, 0), N, N), dtype=complex)
        if d > 1:
            P = [-np.linalg.solve(b, system.natural_viscosity(W, 0, k)[q:, :] @ dw @ V) for k in range(1, d)]
            for j in range(1, d):
                beta_j0 = system.natural_viscosity(W, j, 0)
                Aj = linearized_flux(system, U, Up, j)
                C1[j - 1, :n, :] = -1j * beta_j0 @ Pz + 1j * Aj @ V
                C1[j - 1, n:, :] = 1j * P[j - 1]
                for k in range(1, d):
                    C2[j - 1, k - 1, :n, :] = beta_j0 @ P[k - 1] + system.viscosity(U, j, k) @ V
        return _NodeCoefficients(C0, Clam, C1, C2)

    def combine(self, C0, Clam, C1, C2, freq: Frequency) -> np.ndarray:
        out = C0 + freq.lam * Clam
        xi = np.asarray(freq.xi_tilde, dtype=float)
        for j, xj in enumerate(xi):
            if xj == 0.0:
                continue
            out = out + xj * C1[j]
            for k, xk in enumerate(xi):
                if xk != 0.0:
                    out = out + xj * xk * C2[j, k]
        return out

    def limit_matrix(self, endpoint: str, freq: Frequency) -> np.ndarray:
        """𝔸± (x → ±∞)"""
        c = self.limits[endpoint]
        return self.combine(c.C0, c.Clam, c.C1, c.C2, freq)

    def grid_matrices(self, freq: Frequency) -> np.ndarray:
        return self.combine(self.C0, self.Clam, self.C1, self.C2, freq)

    def _stable_dimension(self) -> int:
        """大实 λ 处 𝔸₊ 的稳定维数 k，并检查 𝔸₋ 不稳定维数为 N − k"""
        lam = 10.0 * (1.0 + float(np.max(np.abs(self.profile.classification.characteristic_speeds_plus))))
        freq = Frequency(tuple(np.zeros(self.d - 1)), complex(lam))
        k = int(np.sum(np.linalg.eigvals(self.limit_matrix("+", freq)).real < 0))
        m = int(np.sum(np.linalg.eigvals(self.limit_matrix("-", freq)).real > 0))
        if k + m != self.N:
            raise EvansError(f"大 λ 处分裂维数 {k} + {m} ≠ N = {self.N}")
        return k

    def _lift(self, vectors: np.ndarray, U: np.ndarray) -> np.ndarray:
        """无粘向量 r 提升为慢模 (−A⁰r, (∂W/∂U)^{II} r)"""
        A0 = self.system.flux_jacobian(U, 0)
        dw = self.system.natural_jacobian(U)[self.q:, :]
        return np.vstack([-A0 @ vectors, dw @ vectors])

    def _reference_frame(self, endpoint: str) -> np.ndarray:
        """原点处的实参考标架：快模取 𝔸±(0,0) 的非零特征子空间，慢模取提升的 Lopatinski 基"""
        origin = Frequency(tuple(np.zeros(self.d - 1)), 0j)
        A = self.limit_matrix(endpoint, origin).real
        scale = max(1.0, float(np.linalg.norm(A)))
        if endpoint == "+":
            fast = real_invariant_frame(A, lambda re, im: re < -1e-8 * scale)
            slow = self._lift(self.lopatinski.ref_plus, self.profile.triple.U_plus)
            expected = self.k
        else:
            fast = real_invariant_frame(A, lambda re, im: re > 1e-8 * scale)
            slow = self._lift(self.lopatinski.ref_minus, self.profile.triple.U_minus)
            expected = self.N - self.k
        frame = np.hstack([fast, slow])
        if frame.shape[1] != expected:
            raise EvansError(f"{endpoint} 端参考标架维数 {frame.shape[1]} ≠ {expected}")
        return frame


# ---------------------------------------------------------------------------
# Evans 系统与分裂
# ---------------------------------------------------------------------------

@dataclass
class SplittingCertificate:
    """相容分裂证书"""
    k: int
    N: int
    gap_plus: float
    gap_minus: float
    mode_types_plus: List[str] = field(default_factory=list)
    mode_types_minus: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "N": self.N, "gap_plus": self.gap_plus, "gap_minus": self.gap_minus,
                "mode_types_plus": self.mode_types_plus, "mode_types_minus": self.mode_types_minus}


class EvansSystem:
    """给定频率下的 Evans ODE W′ = 𝔸(x)W"""

    def __init__(self, coefficients: EvansCoefficients, freq: Frequency):
        self.coefficients = coefficients
        self.freq = freq
        self.N = coefficients.N
        self.L = coefficients.profile.L
        self.limits = {"+": coefficients.limit_matrix("+", freq), "-": coefficients.limit_matrix("-", freq)}
        self._spline = CubicSpline(coefficients.grid, coefficients.grid_matrices(freq), axis=0)

    @property
    def profile(self) -> ShockProfile:
        return self.coefficients.profile

    def matrix(self, x: float) -> np.ndarray:
        if x >= self.L:
            return self.limits["+"]
        if x <= -self.L:
            return self.limits["-"]
        return self._spline(x)

    def characteristic_residual(self, endpoint: str) -> float:
        """
        𝔸± 的特征值代入特征方程
        det(μ²B⁰⁰ − μ(A⁰ − iΣξ_k(B^{0k}+B^{k0})) − iΣξ_jA^j − Σξ_jξ_kB^{jk} − λ) 的相对残差
        """
        system = self.coefficients.system
        U = self.profile.triple.U_plus if endpoint == "+" else self.profile.triple.U_minus
        n = system.n
        xi = np.asarray(self.freq.xi_tilde, dtype=float)
        B00 = system.viscosity(U, 0, 0)
        A0 = system.flux_jacobian(U, 0)
        mixed = np.zeros((n, n), dtype=complex)
        transverse = np.zeros((n, n), dtype=complex)
        for j, xj in enumerate(xi, start=1):
            mixed += xj * (system.viscosity(U, 0, j) + system.viscosity(U, j, 0))
            transverse += 1j * xj * system.flux_jacobian(U, j)
            for k, xk in enumerate(xi, start=1):
                transverse += xj * xk * system.viscosity(U, j, k)
        worst = 0.0
        for mu in np.linalg.eigvals(self.limits[endpoint]):
            M = mu * mu * B00 - mu * (A0 - 1j * mixed) - transverse - self.freq.lam * np.eye(n)
            scale = max(1.0, float(np.linalg.norm(M))) ** n
            worst = max(worst, abs(np.linalg.det(M)) / scale)
        return worst


def build_evans_system(profile: ShockProfile, freq: Frequency,
                       coefficients: Optional[EvansCoefficients] = None) -> EvansSystem:
    """
    构造频率 (ξ̃, λ) 下的一阶 Evans 系统

    Args:
        profile: 已求解剖面
        freq: 频率
        coefficients: 可复用的剖面系数

    Returns:
        EvansSystem
    """
    coefficients = coefficients or EvansCoefficients(profile)
    return EvansSystem(coefficients, freq)


def _mode_types(eigs: np.ndarray, lam: complex) -> List[str]:
    scale = abs(lam) ** 0.75
    return ["parabolic" if abs(mu) > scale else "hyperbolic" for mu in eigs]


def limiting_splitting(evsys: EvansSystem) -> SplittingCertificate:
    """
    𝔸₊ 稳定维数与 𝔸₋ 不稳定维数

    Raises:
        EvansError: 存在 |Re μ| < 1e−10‖𝔸‖ 的近中心特征值（频率不在 Λ 内）
    """
    k, N = evsys.coefficients.k, evsys.N
    out = {}
    for endpoint in ("+", "-"):
        A = evsys.limits[endpoint]
        eigs = np.linalg.eigvals(A)
        scale = max(1.0, float(np.linalg.norm(A)))
        if np.min(np.abs(eigs.real)) < 1e-10 * scale:
            raise EvansError(f"𝔸{endpoint} 存在近中心特征值，频率不在 Λ 内",
                             witness={"lambda": evsys.freq.lam, "xi_tilde": list(evsys.freq.xi_tilde)})
        count = int(np.sum(eigs.real < 0)) if endpoint == "+" else int(np.sum(eigs.real > 0))
        expected = k if endpoint == "+" else N - k
        if count != expected:
            raise EvansError(f"𝔸{endpoint} 分裂维数 {count} ≠ {expected}",
                             witness={"lambda": evsys.freq.lam, "xi_tilde": list(evsys.freq.xi_tilde)})
        out[endpoint] = (float(np.min(np.abs(eigs.real))), _mode_types(eigs, evsys.freq.lam))
    return SplittingCertificate(k=k, N=N, gap_plus=out["+"][0], gap_minus=out["-"][0],
                                mode_types_plus=out["+"][1], mode_types_minus=out["-"][1])


# ---------------------------------------------------------------------------
# 复合矩阵
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _compound_structure(N: int, k: int):
    """𝔸^{(k)} 的稀疏结构：(目标下标, 源下标, 行 m, 列 i_t, 符号)"""
    subsets = list(itertools.combinations(range(N), k))
    index = {s: i for i, s in enumerate(subsets)}
    rows, cols, ms, its, signs = [], [], [], [], []
    for src, I in enumerate(subsets):
        for t, i_t in enumerate(I):
            for m in range(N):
                if m != i_t and m in I:
                    continue
                replaced = list(I)
                replaced[t] = m
                order = np.argsort(replaced)
                target = tuple(np.asarray(replaced)[order])
                # 排列奇偶性
                perm = list(order)
                sign, seen = 1, [False] * k
                for a in range(k):
                    if seen[a]:
                        continue
                    length, b = 0, a
                    while not seen[b]:
                        seen[b] = True
                        b = perm[b]
                        length += 1
                    if length % 2 == 0:
                        sign = -sign
                rows.append(index[target])
                cols.append(src)
                ms.append(m)
                its.append(i_t)
                signs.append(sign)
    return (subsets, np.array(rows), np.array(cols), np.array(ms), np.array(its), np.array(signs, dtype=float))


def compound_matrix(A: np.ndarray, k: int) -> np.ndarray:
    """k 阶复合矩阵 𝔸^{(k)}"""
    N = A.shape[0]
    subsets, rows, cols, ms, its, signs = _compound_structure(N, k)
    out = np.zeros((len(subsets), len(subsets)), dtype=complex)
    np.add.at(out, (rows, cols), signs * A[ms, its])
    return out


def wedge(frame: np.ndarray) -> np.ndarray:
    """列向量外积的 Plücker 坐标"""
    N, k = frame.shape
    subsets = _compound_structure(N, k)[0]
    return np.array([np.linalg.det(frame[list(I), :]) for I in subsets], dtype=complex)


def wedge_pairing(y_minus: np.ndarray, y_plus: np.ndarray, N: int, m: int) -> complex:
    """det[Y⁻, Y⁺] = Σ_I ε(I) y⁻_I y⁺_{I^c}"""
    subsets_minus = _compound_structure(N, m)[0]
    subsets_plus = {s: i for i, s in enumerate(_compound_structure(N, N - m)[0])}
    total = 0j
    full = set(range(N))
    for i, I in enumerate(subsets_minus):
        complement = tuple(sorted(full - set(I)))
        sign = -1.0 if sum(a - t for t, a in enumerate(I)) % 2 else 1.0
        total += sign * y_minus[i] * y_plus[subsets_plus[complement]]
    return total


# ---------------------------------------------------------------------------
# 求值
# ---------------------------------------------------------------------------

@dataclass
class EvansEvaluation:
    """Evans 函数求值结果"""
    value: complex
    method: str
    L_used: float
    norm_factor: float
    growth_normalization: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"value": {"re": self.value.real, "im": self.value.imag}, "method": self.method,
                "L_used": self.L_used, "norm_factor": self.norm_factor,
                "growth_normalization": self.growth_normalization}


def _initial_frame(evsys: EvansSystem, endpoint: str) -> Tuple[np.ndarray, complex]:
    """端点初始标架 P(𝔸±)·R_ref 及迹 σ = tr(𝔸± 在该子空间上)"""
    coeffs = evsys.coefficients
    ref = coeffs.reference_frames[endpoint]
    A = evsys.limits[endpoint]
    k = ref.shape[1]
    if k == 0:
        return ref.astype(complex), 0j
    if evsys.freq.rho == 0.0:
        frame = ref.astype(complex)
        sigma = complex(np.trace(np.linalg.pinv(frame) @ A @ frame))
        return frame, sigma
    projector, selected, _ = spectral_projector(A, k, smallest=(endpoint == "+"))
    frame = projector @ ref
    if np.linalg.cond(frame) > 1e12:
        raise EvansError(f"{endpoint} 端初始标架退化", witness={"lambda": evsys.freq.lam})
    return frame, complex(np.sum(selected))


def _solve(rhs, start: float, stop: float, y0: np.ndarray, label: str) -> np.ndarray:
    sol = solve_ivp(rhs, (start, stop), y0, method="DOP853", rtol=RTOL, atol=ATOL)
    if sol.status != 0 or not np.all(np.isfinite(sol.y[:, -1])):
        raise EvansError(f"{label} 积分失败: {sol.message}", location=float(sol.t[-1]))
    return sol.y[:, -1]


def _integrate_compound(evsys: EvansSystem, endpoint: str) -> np.ndarray:
    frame, sigma = _initial_frame(evsys, endpoint)
    k = frame.shape[1]
    start = evsys.L if endpoint == "+" else -evsys.L
    if k == 0:
        return np.ones(1, dtype=complex)

    def rhs(x, y):
        return compound_matrix(evsys.matrix(x), k) @ y - sigma * y

    return _solve(rhs, start, 0.0, wedge(frame), f"复合矩阵({endpoint})")


def _integrate_orthogonal(evsys: EvansSystem, endpoint: str) -> Tuple[np.ndarray, complex]:
    frame, sigma = _initial_frame(evsys, endpoint)
    N, k = frame.shape
    start = evsys.L if endpoint == "+" else -evsys.L
    if k == 0:
        return frame, 0j
    Q0, log_det = householder_orthonormalize(frame)

    def rhs(x, y):
        Q = y[:-1].reshape(N, k)
        A = evsys.matrix(x)
        AQ = A @ Q
        QhAQ = Q.conj().T @ AQ
        dQ = AQ - Q @ QhAQ
        dzeta = np.trace(QhAQ) - sigma
        return np.concatenate([dQ.ravel(), [dzeta]])

    y = _solve(rhs, start, 0.0, np.concatenate([Q0.ravel(), [log_det]]), f"连续正交化({endpoint})")
    return y[:-1].reshape(N, k), complex(y[-1])


def evans_evaluate(evsys: EvansSystem, method: str = "auto") -> EvansEvaluation:
    """
    Evans 函数 D(ξ̃, λ)

    Args:
        evsys: Evans 系统
        method: compound / orthogonal / auto（N ≤ 6 时用复合矩阵）

    Returns:
        EvansEvaluation
    """
    N, k = evsys.N, evsys.coefficients.k
    if method == "auto":
        method = "compound" if N <= COMPOUND_MAX_DIM else "orthogonal"
    if method == "compound":
        y_plus = _integrate_compound(evsys, "+")
        y_minus = _integrate_compound(evsys, "-")
        if k == 0:
            value = y_minus[0] if y_minus.size == 1 else complex(np.prod(y_minus))
        elif k == N:
            value = complex(y_plus[0])
        else:
            value = wedge_pairing(y_minus, y_plus, N, N - k)
        factor = 1.0
    elif method == "orthogonal":
        Q_plus, zeta_plus = _integrate_orthogonal(evsys, "+")
        Q_minus, zeta_minus = _integrate_orthogonal(evsys, "-")
        factor_c = np.exp(zeta_plus + zeta_minus)
        value = complex(np.linalg.det(np.hstack([Q_minus, Q_plus])) * factor_c)
        factor = float(abs(factor_c))
    else:
        raise EvansError(f"未知 Evans 求值方法: {method}")
    return EvansEvaluation(value=complex(value), method=method, L_used=evsys.L, norm_factor=factor,
                           growth_normalization={"convention": "迹归一化（减去 tr(P𝔸±)）",
                                                 "frame": "P(𝔸±)·R_ref，R_ref 为原点处实标架"})


class EvansFunction:
    """剖面上的 Evans 函数 (ξ̃, λ) ↦ D，系数只计算一次"""

    def __init__(self, profile: ShockProfile, method: str = "auto"):
        self.profile = profile
        self.method = method
        self.coefficients = EvansCoefficients(profile)
        self.d = self.coefficients.d
        self.cache: Dict[Tuple[Tuple[float, ...], complex], EvansEvaluation] = {}

    def evaluate(self, xi_tilde: Sequence[float], lam: complex) -> EvansEvaluation:
        xi = tuple(float(x) for x in np.atleast_1d(np.asarray(xi_tilde, dtype=float)))
        if not xi:
            xi = tuple(np.zeros(self.d - 1))
        if len(xi) != self.d - 1:
            raise ConfigError(f"ξ̃ 维数 {len(xi)} 与空间维数 d − 1 = {self.d - 1} 不符")
        key = (xi, complex(lam))
        if key not in self.cache:
            evsys = EvansSystem(self.coefficients, Frequency(xi, complex(lam)))
            self.cache[key] = evans_evaluate(evsys, self.method)
        return self.cache[key]

    def __call__(self, xi_tilde: Sequence[float], lam: complex) -> complex:
        return self.evaluate(xi_tilde, lam).value

    def system(self, xi_tilde: Sequence[float], lam: complex) -> EvansSystem:
        return EvansSystem(self.coefficients, Frequency(tuple(np.atleast_1d(xi_tilde).astype(float)), complex(lam)))


# ---------------------------------------------------------------------------
# 绕数与谱判定
# ---------------------------------------------------------------------------

def high_frequency_radius(profile: ShockProfile, minimum: float = 4.0) -> float:
    """R = max(minimum, 2·max|a|²/min b)"""
    system = profile.system
    speeds = np.abs(np.concatenate([profile.classification.characteristic_speeds_minus,
                                    profile.classification.characteristic_speeds_plus]) - profile.triple.s)
    b_min = np.inf
    for U in (profile.triple.U_minus, profile.triple.U_plus):
        block = system.natural_viscosity(system.to_natural(U), 0, 0)[system.q:, :]
        b_min = min(b_min, float(np.min(np.linalg.eigvals(block).real)))
    return float(max(minimum, 2.0 * float(np.max(speeds)) ** 2 / b_min))


def winding_number(evans: EvansFunction, xi_tilde: Sequence[float], radius: float, shift: float,
                   initial_points: int = 64, max_points: int = 4096, threshold: float = 0.0) -> WindingResult:
    """
    半圆盘 {Re λ ≥ shift, |λ| ≤ radius} 边界上 D 的绕数

    Raises:
        ContourError: 围道上 |D| 低于阈值
        IndeterminateError: 加密预算耗尽
    """
    path = half_disc_contour(radius, shift)
    return adaptive_winding(lambda lam: evans(xi_tilde, lam), path, initial_points, max_points, threshold)


@dataclass
class SpectralVerdict:
    """谱稳定性结论"""
    weak_spectral: Optional[bool]
    strong_spectral: Optional[bool]
    radius: float
    shift: float
    windings: List[Dict[str, Any]] = field(default_factory=list)
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    unresolved: List[Dict[str, Any]] = field(default_factory=list)
    contours: List[WindingResult] = field(default_factory=list, repr=False)

    @property
    def status(self) -> str:
        if self.unresolved:
            return "unresolved"
        return "stable" if self.strong_spectral else ("weakly stable" if self.weak_spectral else "unstable")

    def to_dict(self) -> Dict[str, Any]:
        return {"weak_spectral": self.weak_spectral, "strong_spectral": self.strong_spectral,
                "status": self.status, "radius": self.radius, "shift": self.shift,
                "windings": self.windings, "witnesses": self.witnesses, "unresolved": self.unresolved}


def spectral_verdict(profile: ShockProfile, xi_grid: Sequence[Sequence[float]], radius: Optional[float] = None,
                     shift: float = 0.02, initial_points: int = 64, max_points: int = 4096,
                     axis_points: int = 64, method: str = "auto", threads: int = 1,
                     evans: Optional[EvansFunction] = None) -> SpectralVerdict:
    """
    逐 ξ̃ 的半圆盘绕数；非零绕数处细分定位零点作为见证

    Args:
        profile: 剖面
        xi_grid: ξ̃ 网格
        radius: 围道半径，默认高频标度规则
        shift: 排除原点小球的右移量
        axis_points: 虚轴上检验 |D| 的采样数
        threads: 并行线程数（按 ξ̃ 单元）

    Returns:
        SpectralVerdict
    """
    evans = evans or EvansFunction(profile, method)
    radius = radius or high_frequency_radius(profile)
    d = evans.d
    if d == 1:
        grid = [np.zeros(0)]
    else:
        grid = [np.atleast_1d(np.asarray(x, dtype=float)) for x in xi_grid] or [np.zeros(d - 1)]

    def cell(xi):
        try:
            result = winding_number(evans, xi, radius, shift, initial_points, max_points)
        except (ContourError, IndeterminateError, EvansError) as exc:
            return xi, None, exc
        return xi, result, None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cells = list(pool.map(cell, grid))
    else:
        cells = [cell(xi) for xi in grid]

    verdict = SpectralVerdict(weak_spectral=True, strong_spectral=True, radius=radius, shift=shift)
    for xi, result, exc in cells:
        if result is None:
            verdict.unresolved.append({"xi_tilde": xi.tolist(), **exc.to_dict()})
            continue
        verdict.contours.append(result)
        verdict.windings.append({"xi_tilde": xi.tolist(), "winding": result.winding,
                                 "samples": len(result.points), "min_abs_D": result.min_modulus})
        if result.winding != 0:
            verdict.weak_spectral = False
            verdict.strong_spectral = False
            height = radius
            try:
                zeros = locate_zeros(lambda lam: evans(xi, lam), complex(shift, -height), complex(radius, height),
                                     min_size=1e-2 * radius)
            except WorkbenchError as exc:
                zeros = []
                logger.warning("零点定位失败: %s", exc.message)
            verdict.witnesses.append({"xi_tilde": xi.tolist(), "winding": result.winding,
                                      "zeros": [{"re": z.real, "im": z.imag, "multiplicity": m} for z, m in zeros]})

    # 虚轴 Re λ = 0（原点小球外）上 |D| 不得消失
    if verdict.weak_spectral and not verdict.unresolved:
        for result, xi in zip(verdict.contours, [c[0] for c in cells if c[1] is not None]):
            taus = np.concatenate([np.linspace(-radius, -shift, axis_points // 2),
                                   np.linspace(shift, radius, axis_points // 2)])
            values = []
            for tau in taus:
                try:
                    values.append(abs(evans(xi, complex(0.0, tau))))
                except WorkbenchError:
                    values.append(0.0)
            scale = float(np.median(np.abs(result.values)))
            if min(values) <= 1e-6 * scale:
                verdict.strong_spectral = False
                verdict.witnesses.append({"xi_tilde": xi.tolist(), "neutral_axis_min": min(values)})
    if verdict.unresolved:
        verdict.weak_spectral = None if verdict.weak_spectral else False
        verdict.strong_spectral = None if verdict.strong_spectral else False
    logger.info("谱判定: %s（%d 个 ξ̃ 单元，R=%.3g）", verdict.status, len(grid), radius)
    return verdict
