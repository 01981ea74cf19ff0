"""无粘稳定性 - Lopatinski 行列式、Liu–Majda 行列式、掠射集与球面扫描"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla
from scipy.optimize import brentq, minimize, minimize_scalar

from app.analysis.profile_solver import ShockClassification, ShockTriple, classify_shock
from app.models import ComovingSystem, SystemDefinition, sphere_directions
from app.utils.contour import adaptive_winding, half_disc_contour
from app.utils.errors import ConfigError, IndeterminateError, WorkbenchError
from app.utils.linalg import real_invariant_frame, spectral_projector

logger = logging.getLogger(__name__)

BOUNDARY_OFFSET = 1e-8


@dataclass(frozen=True)
class Frequency:
    """频率 (ξ̃, λ) 及其极坐标 (ρ, ξ̃₀, λ₀)"""
    xi_tilde: Tuple[float, ...]
    lam: complex

    @classmethod
    def from_polar(cls, rho: float, xi0: Sequence[float], lam0: complex) -> "Frequency":
        return cls(tuple(float(rho) * np.asarray(xi0, dtype=float)), complex(rho * lam0))

    @property
    def rho(self) -> float:
        xi = np.asarray(self.xi_tilde, dtype=float)
        return float(np.sqrt(xi @ xi + abs(self.lam) ** 2))

    @property
    def tau(self) -> float:
        return float(self.lam.imag)

    def polar(self) -> Tuple[float, np.ndarray, complex]:
        rho = self.rho
        if rho == 0.0:
            raise ConfigError("原点 (ξ̃, λ) = (0, 0) 没有极坐标表示")
        return rho, np.asarray(self.xi_tilde, dtype=float) / rho, self.lam / rho

    def scaled(self, c: float) -> "Frequency":
        return Frequency(tuple(c * np.asarray(self.xi_tilde, dtype=float)), c * self.lam)


@dataclass
class SubspaceBasis:
    """𝒜± 的衰减子空间基"""
    basis: np.ndarray
    eigenvalues: np.ndarray
    gap: float
    center_count: int


@dataclass
class LopatinskiEvaluation:
    """Lopatinski 行列式求值结果"""
    value: complex
    bases_minus: np.ndarray
    bases_plus: np.ndarray
    jump_terms: np.ndarray
    normalization: str = "spectral projector × 实参考标架（λ>0, ξ̃=0 处 A¹± 出射特征子空间的实 Schur 基）"


@dataclass
class GlancingSet:
    """掠射集：曲线 τ = η_q(ξ̃) 及重数"""
    family: int
    curves: List[List[Tuple[List[float], float, float]]] = field(default_factory=list)
    multiplicities: List[int] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def points(self) -> List[Tuple[List[float], float, int]]:
        """展平为 (ξ̃, τ, 重数)"""
        out = []
        for curve, mult in zip(self.curves, self.multiplicities):
            out.extend((xi, tau, mult) for xi, tau, _ in curve)
        return out


class LopatinskiDeterminant:
    """
    Lopatinski 行列式 Δ(ξ̃, λ) = det(r₋…, r₊…, λ[U] + i[F^ξ̃])

    +∞ 处取 𝒜₊ = (A¹₊)⁻¹(λ + iA^ξ̃₊) 的 n − p 个 Re μ > 0 特征方向，
    −∞ 处取 𝒜₋ 的 p − 1 个 Re μ < 0 特征方向；基为谱投影作用于固定实参考标架，
    因此 Δ 关于 (ξ̃, λ) 一次齐次。
    """

    def __init__(self, system: SystemDefinition, triple: ShockTriple,
                 classification: Optional[ShockClassification] = None):
        self.base = system
        self.system = ComovingSystem(system, triple.s)
        self.triple = triple
        self.classification = classification or classify_shock(system, triple)
        if not self.classification.lax:
            raise ConfigError("Lopatinski 行列式仅对 Lax 激波定义")
        self.p = self.classification.p
        n = system.n
        self.A1_minus = self.system.flux_jacobian(triple.U_minus, 0)
        self.A1_plus = self.system.flux_jacobian(triple.U_plus, 0)
        self.k_plus = n - self.p
        self.k_minus = self.p - 1
        self.ref_plus = real_invariant_frame(self.A1_plus, lambda re, im: re > 0)
        self.ref_minus = real_invariant_frame(self.A1_minus, lambda re, im: re < 0)
        self.jump = triple.U_plus - triple.U_minus
        self.flux_jumps = [system.flux(triple.U_plus, j) - system.flux(triple.U_minus, j)
                           for j in range(1, system.d)]

    def transverse_symbol(self, U: np.ndarray, xi_tilde: Sequence[float]) -> np.ndarray:
        """A^ξ̃ = Σ_{j≥1} ξ_j A^j"""
        out = np.zeros((self.base.n, self.base.n))
        for j, x in enumerate(xi_tilde, start=1):
            out += float(x) * self.system.flux_jacobian(U, j)
        return out

    def symbol_matrix(self, endpoint: str, freq: Frequency) -> np.ndarray:
        """𝒜± = (A¹±)⁻¹(λ + iA^ξ̃±)"""
        U, A1 = (self.triple.U_plus, self.A1_plus) if endpoint == "+" else (self.triple.U_minus, self.A1_minus)
        n = self.base.n
        rhs = freq.lam * np.eye(n) + 1j * self.transverse_symbol(U, freq.xi_tilde)
        return np.linalg.solve(A1, rhs)

    def subspace(self, endpoint: str, freq: Frequency) -> SubspaceBasis:
        """
        衰减子空间基（+∞：Re μ > 0；−∞：Re μ < 0）

        Raises:
            IndeterminateError: Re λ > 0 时出现中心子空间
        """
        matrix = self.symbol_matrix(endpoint, freq)
        k, ref, smallest = ((self.k_plus, self.ref_plus, False) if endpoint == "+"
                            else (self.k_minus, self.ref_minus, True))
        eigs = np.linalg.eigvals(matrix)
        scale = max(1.0, float(np.linalg.norm(matrix)))
        center = int(np.sum(np.abs(eigs.real) <= 1e-10 * scale))
        if freq.lam.real > 0 and center > 0:
            raise IndeterminateError(f"Re λ > 0 时 𝒜{endpoint} 存在中心子空间，双曲性被破坏",
                                     witness={"lambda": freq.lam, "xi_tilde": list(freq.xi_tilde)})
        selected_count = int(np.sum(eigs.real > 0)) if endpoint == "+" else int(np.sum(eigs.real < 0))
        if freq.lam.real > 0 and selected_count != k:
            raise IndeterminateError(f"𝒜{endpoint} 衰减子空间维数 {selected_count} ≠ {k}")
        projector, selected, gap = spectral_projector(matrix, k, smallest=smallest)
        return SubspaceBasis(basis=projector @ ref, eigenvalues=selected, gap=gap, center_count=center)

    def jump_column(self, freq: Frequency) -> np.ndarray:
        column = freq.lam * self.jump.astype(complex)
        for x, fj in zip(freq.xi_tilde, self.flux_jumps):
            column = column + 1j * float(x) * fj
        return column

    def evaluate(self, freq: Frequency) -> LopatinskiEvaluation:
        if freq.rho == 0.0:
            raise ConfigError("Lopatinski 行列式在 (0, 0) 处无定义")
        minus = self.subspace("-", freq)
        plus = self.subspace("+", freq)
        column = self.jump_column(freq)
        matrix = np.column_stack([minus.basis, plus.basis, column])
        return LopatinskiEvaluation(value=complex(np.linalg.det(matrix)), bases_minus=minus.basis,
                                    bases_plus=plus.basis, jump_terms=column)

    def __call__(self, xi_tilde: Sequence[float], lam: complex) -> complex:
        return self.evaluate(Frequency(tuple(np.atleast_1d(xi_tilde).astype(float)), complex(lam))).value

    def boundary_value(self, xi_tilde: Sequence[float], tau: float, offset: float = BOUNDARY_OFFSET) -> complex:
        """Re λ = 0 处取 Re λ = offset 的值"""
        return self(xi_tilde, complex(offset, tau))

    def lambda_derivative(self, xi_tilde: Sequence[float], lam: complex, h: float = 1e-5) -> complex:
        """∂Δ/∂λ 的中心差分（沿实方向）"""
        return (self(xi_tilde, lam + h) - self(xi_tilde, lam - h)) / (2.0 * h)


# ---------------------------------------------------------------------------
# 模块操作
# ---------------------------------------------------------------------------

def hyperbolic_symbol_subspaces(system: SystemDefinition, triple: ShockTriple, endpoint: str,
                                freq: Frequency) -> SubspaceBasis:
    """𝒜± 衰减子空间的基（Re λ > 0）"""
    if endpoint not in ("+", "-"):
        raise ConfigError(f"endpoint 只能为 '+' 或 '-'，得到 {endpoint!r}")
    return LopatinskiDeterminant(system, triple).subspace(endpoint, freq)


def lopatinski_det(system: SystemDefinition, triple: ShockTriple, freq: Frequency) -> LopatinskiEvaluation:
    """
    计算 Lopatinski 行列式

    Args:
        system: 守恒律系统
        triple: Lax 激波三元组
        freq: 频率 (ξ̃, λ)，不得为原点

    Returns:
        LopatinskiEvaluation
    """
    return LopatinskiDeterminant(system, triple).evaluate(freq)


def liu_majda_delta(system: SystemDefinition, triple: ShockTriple) -> float:
    """一维 Liu–Majda 行列式 δ = det(r₋…, r₊…, [U])，满足 Δ(0, λ) = λδ"""
    lop = LopatinskiDeterminant(system, triple)
    matrix = np.column_stack([lop.ref_minus, lop.ref_plus, lop.jump])
    return float(np.linalg.det(matrix))


def family_eigenvalue(system: SystemDefinition, U: np.ndarray, xi: np.ndarray, family: int) -> Tuple[float, float]:
    """第 family 个特征值场 a_r(ξ) 及 ∂a_r/∂ξ₁（左右特征向量公式）"""
    A = system.symbol(U, xi)
    values, left, right = sla.eig(A, left=True, right=True)
    order = np.argsort(values.real)
    idx = order[family]
    l, r = left[:, idx], right[:, idx]
    dA = system.flux_jacobian(U, 0)
    derivative = (l.conj() @ dA @ r) / (l.conj() @ r)
    return float(values[idx].real), float(derivative.real)


def chain_length(system: SystemDefinition, U: np.ndarray, xi: np.ndarray, family: int, max_order: int = 4) -> int:
    """首个非零 ξ₁ 导数的阶数 s（多项式拟合）"""
    scale = max(float(np.linalg.norm(xi[1:])), 1e-12)
    h = 2e-2 * scale
    offsets = np.linspace(-5 * h, 5 * h, 11)
    samples = []
    for dx in offsets:
        point = xi.copy()
        point[0] += dx
        samples.append(family_eigenvalue(system, U, point, family)[0])
    coeffs = np.polyfit(offsets / h, np.asarray(samples), 6)[::-1]
    amp = max(1.0, float(np.max(np.abs(samples))))
    for order in range(2, max_order + 1):
        derivative = coeffs[order] * factorial(order) / h ** order
        if abs(derivative) * h ** order > 1e-7 * amp:
            return order
    return max_order + 1


def glancing_set(system: SystemDefinition, U: np.ndarray, family: int, xi_grid: Sequence[Sequence[float]],
                 s: float = 0.0, search_factor: float = 20.0, samples: int = 401) -> GlancingSet:
    """
    掠射集：对每个 ξ̃ 求 ∂a_r/∂ξ₁ = 0 的实根 ξ₁，记录 (ξ̃, τ = −a_r(ξ₁, ξ̃))

    Args:
        system: 守恒律系统
        U: 端点状态
        family: 特征族下标（按实部升序，从 0 开始）
        xi_grid: ξ̃ 网格（每项长度 d − 1）
        s: 激波速度（随激波坐标系）
        search_factor: ξ₁ 搜索范围 ±search_factor·|ξ̃|
        samples: 括区采样点数
    """
    result = GlancingSet(family=family)
    if system.d == 1:
        return result
    comoving = ComovingSystem(system, s)
    U = np.asarray(U, dtype=float)
    open_curves: List[int] = []
    for xi_tilde in xi_grid:
        xi_tilde = np.atleast_1d(np.asarray(xi_tilde, dtype=float))
        norm = float(np.linalg.norm(xi_tilde))
        if norm == 0.0:
            continue

        def dadxi(x1):
            return family_eigenvalue(comoving, U, np.concatenate([[x1], xi_tilde]), family)[1]

        grid = np.linspace(-search_factor * norm, search_factor * norm, samples)
        values = np.array([dadxi(x) for x in grid])
        roots = []
        for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
            if fa == 0.0:
                roots.append(a)
            elif fa * fb < 0.0:
                roots.append(brentq(dadxi, a, b, xtol=1e-14 * max(1.0, norm)))
        points = []
        for x1 in roots:
            xi = np.concatenate([[x1], xi_tilde])
            a_val, da = family_eigenvalue(comoving, U, xi, family)
            if abs(da) > 1e-8:
                result.warnings.append(f"ξ̃={xi_tilde.tolist()} 处导数残差 {da:.2e}")
                continue
            points.append((xi_tilde.tolist(), -a_val, float(x1), chain_length(comoving, U, xi, family)))
        # 按与上一点的距离延续曲线
        matched = set()
        for xi_list, tau, x1, mult in points:
            best, best_dist = None, np.inf
            for c in open_curves:
                last_xi, last_tau, _ = result.curves[c][-1]
                dist = np.hypot(np.linalg.norm(np.subtract(last_xi, xi_list)), last_tau - tau)
                if dist < best_dist and c not in matched:
                    best, best_dist = c, dist
            if best is not None and best_dist < 0.5 * (1.0 + norm) and result.multiplicities[best] == mult:
                result.curves[best].append((xi_list, tau, x1))
                matched.add(best)
            else:
                if best is not None and result.multiplicities[best] != mult:
                    result.warnings.append(f"ξ̃={xi_list} 处重数由 {result.multiplicities[best]} 变为 {mult}，曲线断开")
                result.curves.append([(xi_list, tau, x1)])
                result.multiplicities.append(mult)
                open_curves.append(len(result.curves) - 1)
                matched.add(len(result.curves) - 1)
    for warning in result.warnings:
        logger.warning("掠射集: %s", warning)
    return result


def glancing_distance(glancing: Sequence[GlancingSet], xi_tilde: Sequence[float], tau: float) -> float:
    """(ξ̃, τ) 与掠射点在单位球面上的最小距离"""
    target = np.concatenate([np.atleast_1d(xi_tilde), [tau]]).astype(float)
    target = target / max(np.linalg.norm(target), 1e-300)
    best = np.inf
    for gset in glancing:
        for xi, t, _ in gset.points():
            point = np.concatenate([np.atleast_1d(xi), [t]]).astype(float)
            point = point / max(np.linalg.norm(point), 1e-300)
            best = min(best, float(np.linalg.norm(point - target)))
    return best


# ---------------------------------------------------------------------------
# 球面扫描
# ---------------------------------------------------------------------------

@dataclass
class LopatinskiScan:
    """Lopatinski 球面扫描结论"""
    weak_stable: bool
    strong_stable: bool
    min_abs_delta: float
    threshold: float
    samples: List[Tuple[List[float], float, complex]] = field(default_factory=list)
    neutral_roots: List[Dict[str, Any]] = field(default_factory=list)
    unstable_witnesses: List[Dict[str, Any]] = field(default_factory=list)
    indeterminate: List[Dict[str, Any]] = field(default_factory=list)
    liu_majda_delta: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weak_stable": self.weak_stable,
            "strong_stable": self.strong_stable,
            "min_abs_delta": self.min_abs_delta,
            "threshold": self.threshold,
            "neutral_roots": self.neutral_roots,
            "unstable_witnesses": self.unstable_witnesses,
            "indeterminate": self.indeterminate,
            "liu_majda_delta": self.liu_majda_delta,
        }


def _boundary_directions(d: int, count: int) -> np.ndarray:
    """
    单位球面 |ξ̃|² + τ² = 1 上的 (ξ̃, τ) 采样

    d = 2 时为含 τ = 0 与 ξ̃ = 0 的等角网格；d ≥ 3 时在 Fibonacci 采样外补上赤道 τ = 0
    与两极 ξ̃ = 0。
    """
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        count = 4 * max(1, -(-count // 4))
        angles = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    equator = np.column_stack([sphere_directions(d - 1, max(8, count // 2)), np.zeros(max(8, count // 2))])
    poles = np.zeros((2, d))
    poles[:, -1] = [1.0, -1.0]
    return np.vstack([sphere_directions(d, count), equator, poles])


def _neighbours(points: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """每个采样点的 k 个最近邻下标与距离"""
    distances = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    np.fill_diagonal(distances, np.inf)
    k = min(k, len(points) - 1)
    order = np.argsort(distances, axis=1)[:, :k]
    return order, np.take_along_axis(distances, order, axis=1)


def lopatinski_scan(system: SystemDefinition, triple: ShockTriple, points: int = 64,
                    boundary_offset: float = BOUNDARY_OFFSET, zero_factor: float = 1e-6,
                    threads: int = 1, glancing: Optional[Sequence[GlancingSet]] = None,
                    glancing_tolerance: float = 1e-2) -> LopatinskiScan:
    """
    弱/强 Lopatinski 稳定性扫描

    边界 Re λ = 0 上以 Re λ = boundary_offset 求值；强稳定 ⇔ 球面上 min |Δ| 超过
    zero_factor × 中位数；弱不稳定由固定 ξ̃ 切片上 Re λ > 0 半圆盘的绕数见证。
    |Δ| 在采样近邻中的每个局部极小值都在球面上精化，低于阈值者记为中性根。

    Returns:
        LopatinskiScan
    """
    lop = LopatinskiDeterminant(system, triple)
    d = system.d
    directions = _boundary_directions(d, points)

    def evaluate(v):
        xi_tilde, tau = v[:-1], float(v[-1])
        try:
            return lop.boundary_value(xi_tilde, tau, boundary_offset), None
        except WorkbenchError as exc:
            return None, exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            evaluated = list(pool.map(evaluate, directions))
    else:
        evaluated = [evaluate(v) for v in directions]

    samples, indeterminate, located = [], [], []
    for v, (value, exc) in zip(directions, evaluated):
        if value is None:
            indeterminate.append({"xi_tilde": v[:-1].tolist(), "tau": float(v[-1]), **exc.to_dict()})
        else:
            samples.append((v[:-1].tolist(), float(v[-1]), value))
            located.append(v)
    moduli = np.array([abs(s[2]) for s in samples])
    scale = float(np.median(moduli)) if moduli.size else 1.0
    threshold = zero_factor * scale
    min_abs = float(moduli.min()) if moduli.size else 0.0

    neutral: List[Dict[str, Any]] = []
    if d >= 2 and moduli.size > 2:
        order, distances = _neighbours(np.asarray(located), 2 * (d - 1))
        for i in range(len(samples)):
            if moduli[i] > moduli[order[i]].min():
                continue
            root_info = _refine_neutral(lop, samples[i], boundary_offset, d, float(distances[i].max()))
            if root_info["abs_delta"] > threshold:
                continue
            point = np.array(root_info["xi_tilde"] + [root_info["tau"]])
            if any(np.linalg.norm(point - np.array(r["xi_tilde"] + [r["tau"]])) < 1e-6 for r in neutral):
                continue
            root_info["glancing_distance"] = (glancing_distance(glancing, root_info["xi_tilde"],
                                                                root_info["tau"]) if glancing else None)
            root_info["off_glancing"] = (root_info["glancing_distance"] is None
                                         or root_info["glancing_distance"] >= glancing_tolerance)
            neutral.append(root_info)
        min_abs = min([min_abs] + [r["abs_delta"] for r in neutral])

    # Re λ > 0 内部零点：固定 ξ̃ 切片上的幅角原理
    unstable = []
    slices = [np.zeros(d - 1)] if d == 1 else list(sphere_directions(d - 1, 8 if d > 2 else 2))
    speeds = np.concatenate([np.linalg.eigvals(lop.A1_minus).real, np.linalg.eigvals(lop.A1_plus).real])
    radius = 20.0 * (1.0 + float(np.max(np.abs(speeds))))
    for omega in slices:
        if d == 1:
            continue
        shift = max(1e-3, 1e-4 * radius)
        try:
            winding = adaptive_winding(lambda lam: lop(omega, lam), half_disc_contour(radius, shift),
                                       initial_points=64, max_points=4096, threshold=0.0).winding
        except WorkbenchError as exc:
            indeterminate.append({"xi_tilde": list(omega), "slice": True, **exc.to_dict()})
            continue
        if winding > 0:
            unstable.append({"xi_tilde": list(omega), "zeros_in_right_half_plane": winding})

    weak = not unstable and not any(item.get("slice") for item in indeterminate)
    strong = weak and min_abs > threshold and not indeterminate
    result = LopatinskiScan(weak_stable=bool(weak), strong_stable=bool(strong), min_abs_delta=min_abs,
                            threshold=threshold, samples=samples, neutral_roots=neutral,
                            unstable_witnesses=unstable, indeterminate=indeterminate)
    if d == 1:
        # 一维时 Δ(0, λ) = λδ，弱、强稳定都等价于 δ ≠ 0
        result.liu_majda_delta = liu_majda_delta(system, triple)
        nonzero = abs(result.liu_majda_delta) > 1e-12 * max(1.0, float(np.linalg.norm(lop.jump)))
        result.weak_stable = bool(nonzero and not indeterminate)
        result.strong_stable = result.weak_stable
    logger.info("Lopatinski 扫描: 弱稳定=%s 强稳定=%s min|Δ|=%.3e 中性根 %d 个",
                result.weak_stable, result.strong_stable, min_abs, len(neutral))
    return result


def _refine_neutral(lop: LopatinskiDeterminant, sample: Tuple[List[float], float, complex],
                    offset: float, d: int, step: float) -> Dict[str, Any]:
    """在边界球面上精化 |Δ| 的局部极小值，step 为到近邻采样的距离"""
    xi0 = np.asarray(sample[0], dtype=float)
    tau0 = sample[1]
    xi_tilde, tau, best = xi0.tolist(), float(tau0), abs(sample[2])
    if d == 2:
        phi0 = float(np.arctan2(tau0, xi0[0]))

        def modulus(phi):
            return abs(lop.boundary_value([np.cos(phi)], np.sin(phi), offset))

        res = minimize_scalar(modulus, bounds=(phi0 - step, phi0 + step), method="bounded",
                              options={"xatol": 1e-12})
        candidate = ([float(np.cos(res.x))], float(np.sin(res.x)))
    else:
        def modulus(v):
            v = v / max(np.linalg.norm(v), 1e-300)
            return abs(lop.boundary_value(v[:-1], float(v[-1]), offset))

        v0 = np.concatenate([xi0, [tau0]])
        simplex = np.vstack([v0, v0 + 0.5 * step * np.eye(d)])
        res = minimize(modulus, v0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-16, "maxiter": 400 * d})
        v = res.x / np.linalg.norm(res.x)
        candidate = (v[:-1].tolist(), float(v[-1]))
    if float(res.fun) < best:
        xi_tilde, tau = candidate
    value = lop.boundary_value(xi_tilde, tau, offset)
    derivative = lop.lambda_derivative(xi_tilde, complex(offset, tau))
    return {
        "xi_tilde": xi_tilde,
        "tau": tau,
        "abs_delta": abs(value),
        "delta_lambda": {"re": derivative.real, "im": derivative.imag},
        "classification": "neutral",
    }
