"""激波剖面求解 - Rankine–Hugoniot 条件、激波分类与驻波剖面边值问题"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla
from scipy.integrate import solve_bvp
from scipy.interpolate import CubicSpline
from scipy.optimize import root

from app.models import ComovingSystem, SystemDefinition
from app.utils.errors import ClassificationError, ConfigError, ProfileSolveError
from app.utils.linalg import real_invariant_frame

logger = logging.getLogger(__name__)

RH_TOL = 1e-10
DEGENERATE_TOL = 1e-8


# ---------------------------------------------------------------------------
# 数据类型
# ---------------------------------------------------------------------------

@dataclass
class ShockTriple:
    """端点三元组 (U₋, U₊, s)"""
    U_minus: np.ndarray
    U_plus: np.ndarray
    s: float
    residual: float
    trivial: bool = False
    near_sonic: bool = False
    entropy_jump: Optional[float] = None
    branches: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def jump(self) -> np.ndarray:
        """[U] = U₊ − U₋"""
        return self.U_plus - self.U_minus

    def require_shock(self) -> "ShockTriple":
        if self.trivial:
            raise ConfigError("平凡分支 U₊ = U₋ 不能作为激波使用")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "U_minus": self.U_minus.tolist(),
            "U_plus": self.U_plus.tolist(),
            "s": self.s,
            "residual": self.residual,
            "trivial": self.trivial,
            "near_sonic": self.near_sonic,
            "entropy_jump": self.entropy_jump,
            "branches": self.branches,
        }


@dataclass
class EndpointLinearization:
    """端点处剖面 ODE 的线性化 (w^{II})' = M± w^{II}"""
    M_minus: np.ndarray
    M_plus: np.ndarray
    spectrum_minus: np.ndarray
    spectrum_plus: np.ndarray

    def expected_rates(self) -> Tuple[float, float]:
        """左尾（M₋ 不稳定特征值）与右尾（M₊ 稳定特征值）的最慢衰减率"""
        left = self.spectrum_minus.real[self.spectrum_minus.real > 0]
        right = -self.spectrum_plus.real[self.spectrum_plus.real < 0]
        return (float(left.min()) if left.size else np.inf,
                float(right.min()) if right.size else np.inf)


@dataclass
class ShockClassification:
    """激波分类：Lax 指标与剖面 ODE 维数"""
    p: int
    i_plus: int
    i_minus: int
    d_plus: int
    d_minus: int
    ell_hat: int
    lax: bool
    n: int
    r: int
    characteristic_speeds_minus: List[float] = field(default_factory=list)
    characteristic_speeds_plus: List[float] = field(default_factory=list)

    @property
    def index_relation(self) -> bool:
        """ℓ̂ = d₊ + d₋ − r = i₊ + i₋ − n"""
        return self.ell_hat == self.i_plus + self.i_minus - self.n

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p, "i_plus": self.i_plus, "i_minus": self.i_minus,
            "d_plus": self.d_plus, "d_minus": self.d_minus, "ell_hat": self.ell_hat,
            "lax": self.lax, "index_relation": self.index_relation,
            "characteristic_speeds_minus": self.characteristic_speeds_minus,
            "characteristic_speeds_plus": self.characteristic_speeds_plus,
        }


@dataclass
class ShockProfile:
    """
    驻波剖面

    grid 为 [−L, L] 上的均匀网格，values / derivative 为守恒变量 Ū 及 Ū′，
    system 为随激波运动的坐标系下的系统。
    """
    triple: ShockTriple
    classification: ShockClassification
    linearization: EndpointLinearization
    grid: np.ndarray
    values: np.ndarray
    derivative: np.ndarray
    L: float
    theta_decay: Tuple[float, float]
    theta_expected: Tuple[float, float]
    phase_component: int
    phase_location: float
    ode_residual: float
    conservation_error: float
    endpoint_errors: Tuple[float, float]
    system: Optional[SystemDefinition] = field(default=None, repr=False)
    _splines: Any = field(default=None, repr=False)

    @property
    def M_minus(self) -> np.ndarray:
        return self.linearization.M_minus

    @property
    def M_plus(self) -> np.ndarray:
        return self.linearization.M_plus

    def evaluate(self, x: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        在 x 处插值 (Ū, Ū′)，区间外取端点状态
        """
        if x <= -self.L:
            return self.triple.U_minus.copy(), np.zeros_like(self.triple.U_minus)
        if x >= self.L:
            return self.triple.U_plus.copy(), np.zeros_like(self.triple.U_plus)
        if self._splines is None:
            self._splines = (CubicSpline(self.grid, self.values, axis=0),
                             CubicSpline(self.grid, self.derivative, axis=0))
        return self._splines[0](x), self._splines[1](x)

    def decay_rate_agreement(self) -> Tuple[float, float]:
        """拟合衰减率相对端点谱的偏差"""
        return tuple(abs(f - e) / e for f, e in zip(self.theta_decay, self.theta_expected))

    def metadata(self) -> Dict[str, Any]:
        """可序列化的元数据"""
        return {
            "triple": self.triple.to_dict(),
            "classification": self.classification.to_dict(),
            "M_minus": self.M_minus.tolist(),
            "M_plus": self.M_plus.tolist(),
            "L": self.L,
            "theta_decay": list(self.theta_decay),
            "theta_expected": list(self.theta_expected),
            "phase_component": self.phase_component,
            "phase_location": self.phase_location,
            "ode_residual": self.ode_residual,
            "conservation_error": self.conservation_error,
            "endpoint_errors": list(self.endpoint_errors),
        }


# ---------------------------------------------------------------------------
# Rankine–Hugoniot
# ---------------------------------------------------------------------------

def _rh_residual(system: SystemDefinition, U_minus: np.ndarray, U_plus: np.ndarray, s: float) -> float:
    return float(np.linalg.norm(s * (U_plus - U_minus) - (system.flux(U_plus, 0) - system.flux(U_minus, 0))))


def _entropy_jump(system: SystemDefinition, U_minus: np.ndarray, U_plus: np.ndarray) -> Optional[float]:
    left, right = system.entropy(U_minus), system.entropy(U_plus)
    if left is None or right is None:
        return None
    return float(right - left)


def _hugoniot_roots(system: SystemDefinition, U_minus: np.ndarray, s: float) -> List[np.ndarray]:
    """给定 s 求 s[U] = [F⁰(U)] 的全部非平凡实根"""
    const = system.flux(U_minus, 0) - s * U_minus
    scale = max(1.0, float(np.linalg.norm(U_minus)))

    def fun(U):
        if not system.is_admissible(U):
            return np.full(system.n, 1e6)
        return system.flux(U, 0) - s * U - const

    def jac(U):
        if not system.is_admissible(U):
            return np.eye(system.n)
        return system.flux_jacobian(U, 0) - s * np.eye(system.n)

    guesses = []
    model_guess = getattr(system, "normal_shock_guess", None)
    if callable(model_guess):
        g = model_guess(U_minus)
        if g is not None:
            guesses.append(g)
    _, vectors = np.linalg.eig(system.flux_jacobian(U_minus, 0))
    for k in range(system.n):
        v = np.real(vectors[:, k])
        v = v / max(np.linalg.norm(v), 1e-300)
        for t in (0.05, 0.1, 0.25, 0.5, 1.0, 2.0):
            guesses.append(U_minus + t * scale * v)
            guesses.append(U_minus - t * scale * v)

    roots: List[np.ndarray] = []
    for guess in guesses:
        if not system.is_admissible(guess):
            continue
        sol = root(fun, guess, jac=jac, method="hybr", tol=1e-14)
        U = sol.x
        if not system.is_admissible(U):
            continue
        if np.linalg.norm(fun(U)) > RH_TOL * (1.0 + np.linalg.norm(system.flux(U_minus, 0))):
            continue
        if np.linalg.norm(U - U_minus) <= 1e-8 * scale:
            continue
        if any(np.linalg.norm(U - other) <= 1e-8 * scale for other in roots):
            continue
        roots.append(U)
    return roots


def rankine_hugoniot(system: SystemDefinition, U_minus: Sequence[float], *, speed: Optional[float] = None,
                     U_plus: Optional[Sequence[float]] = None) -> ShockTriple:
    """
    求解 Rankine–Hugoniot 条件 s[U] = [F¹(U)]

    Args:
        system: 守恒律系统
        U_minus: 左端状态
        speed: 给定激波速度时求 U₊
        U_plus: 给定右端状态时求 s

    Returns:
        ShockTriple；给定 s 时 branches 列出全部实分支，选取 Lax 压缩分支
    """
    U_minus = system.check_admissible(U_minus)
    if (speed is None) == (U_plus is None):
        raise ConfigError("Rankine–Hugoniot 闭包需且仅需给定 speed 或 U_plus 之一")
    tol = RH_TOL * (1.0 + float(np.linalg.norm(system.flux(U_minus, 0))))

    if U_plus is not None:
        U_plus = system.check_admissible(U_plus)
        jump = U_plus - U_minus
        if np.linalg.norm(jump) == 0.0:
            logger.info("U₊ = U₋：平凡分支，s 任意")
            return ShockTriple(U_minus, U_plus, 0.0, 0.0, trivial=True)
        flux_jump = system.flux(U_plus, 0) - system.flux(U_minus, 0)
        s = float(flux_jump @ jump / (jump @ jump))
        residual = _rh_residual(system, U_minus, U_plus, s)
        if residual > tol:
            raise ProfileSolveError(f"给定端点不满足 Rankine–Hugoniot 条件，残差 {residual:.3e}",
                                    witness=(s * jump - flux_jump))
        return ShockTriple(U_minus, U_plus, s, residual,
                           entropy_jump=_entropy_jump(system, U_minus, U_plus),
                           branches=[{"U_plus": U_plus.tolist(), "s": s, "residual": residual}])

    s = float(speed)
    roots = _hugoniot_roots(system, U_minus, s)
    if not roots:
        raise ProfileSolveError(f"s = {s:g} 时不存在非平凡实分支", witness=U_minus)
    scale = max(1.0, float(np.linalg.norm(U_minus)))
    candidates = []
    for U in roots:
        triple = ShockTriple(U_minus, U, s, _rh_residual(system, U_minus, U, s),
                             near_sonic=bool(np.linalg.norm(U - U_minus) < 1e-4 * scale),
                             entropy_jump=_entropy_jump(system, U_minus, U))
        try:
            lax = classify_shock(system, triple).lax
        except ClassificationError:
            lax = False
        candidates.append((triple, lax))
    branches = [{"U_plus": t.U_plus.tolist(), "s": s, "residual": t.residual, "lax": lax,
                 "entropy_jump": t.entropy_jump} for t, lax in candidates]
    # Lax 分支优先，其次熵沿流动方向增加者
    candidates.sort(key=lambda item: (not item[1], -(item[0].entropy_jump or 0.0)))
    selected = candidates[0][0]
    selected.branches = branches
    if selected.near_sonic:
        logger.warning("所选分支接近声速点，‖[U]‖ = %.3e", np.linalg.norm(selected.jump))
    logger.info("Rankine–Hugoniot: 找到 %d 个实分支，选取 U₊=%s", len(branches), np.round(selected.U_plus, 8))
    return selected


def shock_from_closure(system: SystemDefinition, U_minus: Sequence[float], *, speed: Optional[float] = None,
                       plus_state: Optional[Sequence[float]] = None, mach: Optional[float] = None) -> ShockTriple:
    """
    按配置闭包构造激波三元组；mach 闭包在激波静止系中令 u₋ = M c₋、s = 0
    """
    if mach is not None:
        mach_state = getattr(system, "mach_state", None)
        if not callable(mach_state):
            raise ConfigError(f"模型 {system.name} 不支持 mach 闭包")
        if mach <= 1.0:
            raise ConfigError(f"mach 闭包要求 M > 1，得到 {mach}")
        U_minus = mach_state(system.to_natural(system.check_admissible(U_minus)), float(mach))
        return rankine_hugoniot(system, U_minus, speed=0.0)
    if plus_state is not None:
        return rankine_hugoniot(system, U_minus, U_plus=plus_state).require_shock()
    if speed is not None:
        return rankine_hugoniot(system, U_minus, speed=speed)
    raise ConfigError("shock.closure 需给定 speed、plus_state 或 mach 之一")


# ---------------------------------------------------------------------------
# 端点线性化与分类
# ---------------------------------------------------------------------------

def reduced_matrix(alpha: np.ndarray, q: int) -> np.ndarray:
    """Schur 补 α₂₂ − α₂₁ α₁₁⁻¹ α₁₂"""
    if q == 0:
        return np.array(alpha, dtype=float)
    a11, a12 = alpha[:q, :q], alpha[:q, q:]
    a21, a22 = alpha[q:, :q], alpha[q:, q:]
    return a22 - a21 @ np.linalg.solve(a11, a12)


def _alpha(comoving: SystemDefinition, U: np.ndarray) -> np.ndarray:
    """α = ∂(F¹ − sU)/∂W"""
    return comoving.flux_jacobian(U, 0) @ comoving.conserved_jacobian(comoving.to_natural(U))


def _profile_matrix(comoving: SystemDefinition, U: np.ndarray) -> np.ndarray:
    q = comoving.q
    alpha = _alpha(comoving, U)
    if q > 0:
        a11 = alpha[:q, :q]
        if abs(np.linalg.det(a11)) <= 1e-12 * max(1.0, np.linalg.norm(a11)) ** q:
            raise ClassificationError("端点处 α₁₁ 奇异，剖面 ODE 退化", witness=a11)
    b = comoving.natural_viscosity(comoving.to_natural(U), 0, 0)[q:, :]
    return np.linalg.solve(b, reduced_matrix(alpha, q))


def endpoint_linearization(system: SystemDefinition, triple: ShockTriple) -> EndpointLinearization:
    """
    端点线性化 M± = b̂⁻¹(α₂₂ − α₂₁α₁₁⁻¹α₁₂)±

    Raises:
        ClassificationError: α₁₁ 奇异或 M± 有 |Re| ≤ 1e−8 的特征值（退化静止点）
    """
    comoving = ComovingSystem(system, triple.s)
    M_minus = _profile_matrix(comoving, triple.U_minus)
    M_plus = _profile_matrix(comoving, triple.U_plus)
    spec_minus = np.linalg.eigvals(M_minus)
    spec_plus = np.linalg.eigvals(M_plus)
    for label, spec in (("M₋", spec_minus), ("M₊", spec_plus)):
        if np.min(np.abs(spec.real)) <= DEGENERATE_TOL:
            raise ClassificationError(f"{label} 存在纯虚特征值，静止点退化", witness=spec)
    return EndpointLinearization(M_minus, M_plus, spec_minus, spec_plus)


def classify_shock(system: SystemDefinition, triple: ShockTriple) -> ShockClassification:
    """
    计算 i±、d±、ℓ̂ 与 Lax 指标 p

    Raises:
        ClassificationError: 端点为特征点（某个 a_j± = s）
    """
    n, r = system.n, system.r
    a_minus = np.sort(np.linalg.eigvals(system.flux_jacobian(triple.U_minus, 0)).real) - triple.s
    a_plus = np.sort(np.linalg.eigvals(system.flux_jacobian(triple.U_plus, 0)).real) - triple.s
    scale = max(1.0, float(np.max(np.abs(np.concatenate([a_minus, a_plus])))))
    if min(np.min(np.abs(a_minus)), np.min(np.abs(a_plus))) <= 1e-10 * scale:
        raise ClassificationError("端点为特征点：存在 a_j± = s", witness={"a_minus": a_minus, "a_plus": a_plus})
    i_plus = int(np.sum(a_plus < 0))
    i_minus = int(np.sum(a_minus > 0))
    lin = endpoint_linearization(system, triple)
    d_plus = int(np.sum(lin.spectrum_plus.real < 0))
    d_minus = int(np.sum(lin.spectrum_minus.real > 0))
    p = i_plus
    lax = (i_plus + i_minus == n + 1 and 1 <= p <= n
           and a_minus[p - 1] > 0.0 > a_plus[p - 1])
    result = ShockClassification(p=p, i_plus=i_plus, i_minus=i_minus, d_plus=d_plus, d_minus=d_minus,
                                 ell_hat=d_plus + d_minus - r, lax=bool(lax), n=n, r=r,
                                 characteristic_speeds_minus=(a_minus + triple.s).tolist(),
                                 characteristic_speeds_plus=(a_plus + triple.s).tolist())
    logger.debug("激波分类: %s", result.to_dict())
    return result


# ---------------------------------------------------------------------------
# 剖面边值问题
# ---------------------------------------------------------------------------

class ProfileODE:
    """
    约化剖面 ODE：水平集 (F¹ − sU)^I = const 上的 b(W)(w^{II})′ = (F¹ − sU − const)^{II}
    """

    def __init__(self, system: SystemDefinition, triple: ShockTriple):
        self.system = ComovingSystem(system, triple.s)
        self.q = system.q
        self.r = system.r
        self.const = self.system.flux(triple.U_minus, 0)
        self.W_minus = self.system.to_natural(triple.U_minus)
        self.W_plus = self.system.to_natural(triple.U_plus)

    def _guess_inviscid(self, w2: np.ndarray) -> np.ndarray:
        jump2 = self.W_plus[self.q:] - self.W_minus[self.q:]
        t = float((w2 - self.W_minus[self.q:]) @ jump2 / max(jump2 @ jump2, 1e-300))
        t = min(max(t, 0.0), 1.0)
        return self.W_minus[:self.q] + t * (self.W_plus[:self.q] - self.W_minus[:self.q])

    def level_set(self, w2: np.ndarray, guess: Optional[np.ndarray] = None) -> np.ndarray:
        """逐点 Newton 求解 G^I(w^I, w^{II}) = 0，返回完整自然变量 W"""
        q = self.q
        W = np.concatenate([self._guess_inviscid(w2) if guess is None else guess, w2])
        if q == 0:
            return W
        for _ in range(30):
            U = self.system.from_natural(W)
            G = self.system.flux(U, 0)[:q] - self.const[:q]
            alpha = _alpha(self.system, U)
            step = np.linalg.solve(alpha[:q, :q], G)
            W[:q] -= step
            if np.max(np.abs(step)) <= 1e-12 * (1.0 + np.max(np.abs(W[:q]))):
                break
        return W

    def rhs_natural(self, W: np.ndarray) -> np.ndarray:
        """(w^{II})′"""
        U = self.system.from_natural(W)
        G = self.system.flux(U, 0) - self.const
        b = self.system.natural_viscosity(W, 0, 0)[self.q:, :]
        return np.linalg.solve(b, G[self.q:])

    def rhs(self, w2: np.ndarray) -> np.ndarray:
        return self.rhs_natural(self.level_set(w2))

    def derivative(self, W: np.ndarray) -> np.ndarray:
        """由 (w^{II})′ 与水平集切向得到 Ū′"""
        q = self.q
        w2p = self.rhs_natural(W)
        U = self.system.from_natural(W)
        if q > 0:
            alpha = _alpha(self.system, U)
            w1p = -np.linalg.solve(alpha[:q, :q], alpha[:q, q:] @ w2p)
        else:
            w1p = np.zeros(0)
        return self.system.conserved_jacobian(W) @ np.concatenate([w1p, w2p])


def _complement_rows(M: np.ndarray, unstable: bool) -> np.ndarray:
    """投影条件行：与 M 的不稳定（或稳定）子空间正交的补空间"""
    if unstable:
        frame = real_invariant_frame(M, lambda re, im: re > 0)
    else:
        frame = real_invariant_frame(M, lambda re, im: re < 0)
    if frame.shape[1] == 0:
        return np.eye(M.shape[0])
    return sla.null_space(frame.T).T


def fit_tail_rate(x: np.ndarray, deviation: np.ndarray) -> float:
    """对数线性拟合尾部衰减率"""
    x = np.abs(np.asarray(x, dtype=float))
    deviation = np.asarray(deviation, dtype=float)
    peak = float(np.max(deviation)) if deviation.size else 0.0
    mask = (deviation > 1e-10) & (deviation < 1e-3 * max(peak, 1e-300))
    if np.count_nonzero(mask) < 5:
        mask = deviation > 1e-13
    if np.count_nonzero(mask) < 2:
        return np.nan
    slope, _ = np.polyfit(x[mask], np.log(deviation[mask]), 1)
    return float(-slope)


def solve_profile(system: SystemDefinition, triple: ShockTriple, L: Optional[float] = None,
                  tol: float = 1e-10, phase_location: float = 0.0, grid_points: int = 1601,
                  max_nodes: int = 200000) -> ShockProfile:
    """
    求解驻波剖面

    在 [−L, x₀] 与 [x₀, L] 上分别建立 w^{II} 的方程，拼接为一个两点边值问题：
    x = −L 处投影到 M₋ 不稳定子空间，x = L 处投影到 M₊ 稳定子空间，
    x₀ 处连续且相位分量固定为端点平均值。

    Args:
        system: 守恒律系统（实验室坐标）
        triple: Lax 激波三元组
        L: 半区间长度，默认 12/θ_est
        tol: solve_bvp 容差
        phase_location: 相位条件位置 x₀
        grid_points: 输出均匀网格点数
        max_nodes: solve_bvp 最大节点数

    Returns:
        ShockProfile
    """
    triple.require_shock()
    classification = classify_shock(system, triple)
    if not classification.lax or classification.ell_hat != 1:
        raise ProfileSolveError(f"仅支持 ℓ̂ = 1 的 Lax 激波 (lax={classification.lax}, ℓ̂={classification.ell_hat})")
    lin = endpoint_linearization(system, triple)
    theta_expected = lin.expected_rates()
    theta_est = min(theta_expected)
    if L is None:
        L = float(np.clip(12.0 / theta_est, 8.0, 400.0))
    elif L < 10.0 / theta_est:
        logger.warning("L = %.3g 小于 10/θ = %.3g，截断误差可能偏大", L, 10.0 / theta_est)
    x0 = float(phase_location)
    if not -L < x0 < L:
        raise ConfigError(f"相位位置 {x0} 不在 (−L, L) 内")

    ode = ProfileODE(system, triple)
    q, r = ode.q, ode.r
    w_minus, w_plus = ode.W_minus[q:], ode.W_plus[q:]
    component = int(np.argmax(np.abs(w_plus - w_minus)))
    pin = 0.5 * (w_minus[component] + w_plus[component])
    rows_minus = _complement_rows(lin.M_minus, unstable=True)
    rows_plus = _complement_rows(lin.M_plus, unstable=False)
    len_left, len_right = L + x0, L - x0

    def fun(tau, y):
        out = np.empty_like(y)
        for i in range(y.shape[1]):
            out[:r, i] = len_left * ode.rhs(y[:r, i])
            out[r:, i] = len_right * ode.rhs(y[r:, i])
        return out

    def bc(ya, yb):
        return np.concatenate([
            rows_minus @ (ya[:r] - w_minus),
            rows_plus @ (yb[r:] - w_plus),
            yb[:r] - ya[r:],
            [ya[r + component] - pin],
        ])

    tau = np.linspace(0.0, 1.0, 401)
    rate = theta_est

    def ramp(x):
        weight = 0.5 * (1.0 + np.tanh(0.5 * rate * (x - x0)))
        return w_minus[:, None] + (w_plus - w_minus)[:, None] * weight[None, :]

    guess = np.vstack([ramp(-L + tau * len_left), ramp(x0 + tau * len_right)])
    logger.info("求解剖面: L=%.3g, r=%d, q=%d, 相位分量=%d", L, r, q, component)
    with np.errstate(all="ignore"):
        sol = solve_bvp(fun, bc, tau, guess, tol=tol, max_nodes=max_nodes)
    if not sol.success:
        raise ProfileSolveError(f"剖面边值问题求解失败: {sol.message}")
    residual = float(np.max(sol.rms_residuals))
    if residual > 1e-8:
        worst = int(np.argmax(sol.rms_residuals))
        raise ProfileSolveError(f"剖面 ODE 残差 {residual:.3e} 超过容差", location=float(sol.x[worst]))

    grid = np.linspace(-L, L, int(grid_points))
    values = np.zeros((grid.size, system.n))
    derivative = np.zeros_like(values)
    conservation = 0.0
    previous = None
    for i, x in enumerate(grid):
        if x <= x0:
            w2 = sol.sol((x + L) / len_left)[:r]
        else:
            w2 = sol.sol((x - x0) / len_right)[r:]
        W = ode.level_set(w2, previous)
        previous = W[:q].copy()
        U = ode.system.from_natural(W)
        values[i] = U
        derivative[i] = ode.derivative(W)
        if q > 0:
            conservation = max(conservation, float(np.max(np.abs(ode.system.flux(U, 0)[:q] - ode.const[:q]))))
    if conservation > 1e-8:
        raise ProfileSolveError(f"守恒量 (F¹)^I 沿剖面偏差 {conservation:.3e}")

    dev_minus = np.linalg.norm(values - triple.U_minus, axis=1)
    dev_plus = np.linalg.norm(values - triple.U_plus, axis=1)
    left, right = grid < x0, grid > x0
    theta_decay = (fit_tail_rate(grid[left], dev_minus[left]), fit_tail_rate(grid[right], dev_plus[right]))
    profile = ShockProfile(
        triple=triple, classification=classification, linearization=lin,
        grid=grid, values=values, derivative=derivative, L=float(L),
        theta_decay=theta_decay, theta_expected=theta_expected,
        phase_component=component, phase_location=x0,
        ode_residual=residual, conservation_error=conservation,
        endpoint_errors=(float(dev_minus[0]), float(dev_plus[-1])),
        system=ode.system,
    )
    logger.info("剖面求解完成: 节点 %d，残差 %.2e，衰减率 %s（端点谱 %s）",
                sol.x.size, residual, np.round(theta_decay, 4), np.round(theta_expected, 4))
    return profile
