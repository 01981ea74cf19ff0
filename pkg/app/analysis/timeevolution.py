"""时间演化实验 - 单模线性化演化、一维非线性扰动、常系数热核衰减"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import spsolve

from app.analysis.discrete_operator import assemble_operator, discrete_spectrum_and_resolvent
from app.analysis.profile_solver import ShockProfile
from app.analysis.structure_checks import endpoint_matrices
from app.models.base import ComovingSystem, SystemDefinition
from app.utils.errors import ConfigError

logger = logging.getLogger(__name__)

__all__ = [
    "EvolutionRun", "DecayExperiment", "evolve_linearized_mode", "evolve_nonlinear_1d",
    "constant_coeff_decay", "endpoint_decay", "discrete_spectrum_and_resolvent", "fit_exponential_rate",
]

InitialData = Union[str, Callable[[float], Sequence[complex]]]


@dataclass
class EvolutionRun:
    """一次演化的范数历史与拟合"""
    name: str
    nodes: int
    L: float
    scheme: Dict[str, Any]
    times: List[float] = field(default_factory=list)
    l2: List[float] = field(default_factory=list)
    linf: List[float] = field(default_factory=list)
    fitted_rate: Optional[float] = None
    fit_window: Tuple[float, float] = (0.0, 0.0)
    blowup: bool = False
    flags: List[str] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)

    def history(self) -> Dict[str, List[float]]:
        return {"t": self.times, "l2": self.l2, "linf": self.linf}

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "nodes": self.nodes, "L": self.L, "scheme": self.scheme,
                "fitted_rate": self.fitted_rate, "fit_window": list(self.fit_window), "blowup": self.blowup,
                "flags": self.flags, "final_l2": self.l2[-1] if self.l2 else None, **self.extra}


def fit_exponential_rate(times: Sequence[float], norms: Sequence[float], window: Tuple[float, float]) -> float:
    """log‖u‖ 对 t 的线性回归斜率"""
    t = np.asarray(times, dtype=float)
    y = np.asarray(norms, dtype=float)
    mask = (t >= window[0]) & (t <= window[1]) & (y > 0) & np.isfinite(y)
    if mask.sum() < 2:
        return float("nan")
    return float(np.polyfit(t[mask], np.log(y[mask]), 1)[0])


# ---------------------------------------------------------------------------
# 单模线性化演化
# ---------------------------------------------------------------------------

def _initial_vector(profile: ShockProfile, op, initial: InitialData) -> np.ndarray:
    n = op.n
    if callable(initial):
        return op.sample(initial)
    if initial == "translation":
        return op.sample(lambda x: profile.evaluate(x)[1])
    direction = profile.triple.U_minus - profile.triple.U_plus
    direction = direction / max(np.linalg.norm(direction), 1e-300)
    if initial == "bump":
        return op.sample(lambda x: np.exp(-x * x) * direction)
    if initial == "zero_mean":
        return op.sample(lambda x: x * np.exp(-x * x) * direction)
    raise ConfigError(f"未知初值类型: {initial!r}（可选 translation / bump / zero_mean 或函数）")


def _run_linear(profile: ShockProfile, xi_tilde, initial: InitialData, T: float, nodes: int,
                samples: int, safety: float) -> Tuple[EvolutionRun, np.ndarray]:
    op = assemble_operator(profile, xi_tilde, nodes)
    size = op.matrix.shape[0]
    h = op.h
    dt_target = safety * h / max(op.max_speed, 1e-12)
    steps = max(int(np.ceil(T / dt_target)), samples)
    steps = int(np.ceil(steps / samples) * samples)
    dt = T / steps
    identity = np.eye(size)
    # Strang 分裂：粘性项半步 Crank–Nicolson，对流项 SSP-RK3
    half = sla.solve(identity - 0.25 * dt * op.viscous, identity + 0.25 * dt * op.viscous)
    C = op.convective

    def convect(u):
        u1 = u + dt * (C @ u)
        u2 = 0.75 * u + 0.25 * (u1 + dt * (C @ u1))
        return u / 3.0 + 2.0 / 3.0 * (u2 + dt * (C @ u2))

    u = _initial_vector(profile, op, initial)
    run = EvolutionRun(name="linearized", nodes=nodes, L=op.L,
                       scheme={"type": "Strang(CN 粘性, SSP-RK3 对流)", "dt": dt, "h": h,
                               "xi_tilde": list(op.xi_tilde)})

    def record(t, vec):
        run.times.append(float(t))
        run.l2.append(float(np.sqrt(h) * np.linalg.norm(vec)))
        run.linf.append(float(np.max(np.abs(vec))))

    record(0.0, u)
    every = steps // samples
    for step in range(1, steps + 1):
        u = half @ convect(half @ u)
        if step % every == 0:
            if not np.all(np.isfinite(u)):
                run.blowup = True
                run.flags.append(f"t={step * dt:.3g} 处出现非有限值")
                break
            record(step * dt, u)
    return run, op.matrix


def evolve_linearized_mode(profile: ShockProfile, xi_tilde: Sequence[float] = (), initial: InitialData = "bump",
                           T: float = 10.0, nodes: int = 400, samples: int = 200, safety: float = 0.5,
                           check_refinement: bool = True) -> EvolutionRun:
    """
    固定 ξ̃ 的线性化演化 U_t = L_ξ̃U，拟合指数率并与最右离散特征值比较

    Args:
        profile: 剖面
        xi_tilde: 横向频率
        initial: translation / bump / zero_mean 或 x ↦ ℂⁿ
        T: 终止时间
        nodes: 内点数
        samples: 范数记录次数
        safety: 对流 CFL 安全系数
        check_refinement: 在 2·nodes 网格上复算并比较拟合率

    Returns:
        EvolutionRun
    """
    run, matrix = _run_linear(profile, xi_tilde, initial, T, nodes, samples, safety)
    window = (min(1.0, 0.25 * T), run.times[-1])
    run.fit_window = window
    run.fitted_rate = fit_exponential_rate(run.times, run.l2, window)
    eigs = np.linalg.eigvals(matrix)
    run.extra["rightmost_eigenvalue"] = {"re": float(np.max(eigs.real)),
                                         "im": float(eigs[np.argmax(eigs.real)].imag)}
    if check_refinement and not run.blowup:
        fine, _ = _run_linear(profile, xi_tilde, initial, T, 2 * nodes, samples, safety)
        fine_rate = fit_exponential_rate(fine.times, fine.l2, window)
        run.extra["refined_rate"] = fine_rate
        if abs(fine_rate - run.fitted_rate) > 0.05 * max(abs(run.fitted_rate), 1e-2):
            run.flags.append("拟合率在网格加密下不收敛，可能为网格引起的伪增长")
    logger.info("线性化演化 ξ̃=%s: 拟合率 %.4g（窗口 %s）", list(xi_tilde), run.fitted_rate, window)
    return run


# ---------------------------------------------------------------------------
# 一维非线性扰动
# ---------------------------------------------------------------------------

class _FiniteVolume:
    """守恒有限体积：Rusanov 通量 + 隐式粘性，边界为端点状态的 Dirichlet 虚单元"""

    def __init__(self, system: SystemDefinition, left: np.ndarray, right: np.ndarray, L: float, cells: int):
        self.system = system
        self.n = system.n
        self.left, self.right = left, right
        self.cells = cells
        self.h = 2.0 * L / cells
        self.x = -L + self.h * (np.arange(cells) + 0.5)

    def _padded(self, U: np.ndarray) -> np.ndarray:
        return np.vstack([self.left, U, self.right])

    def rusanov(self, U: np.ndarray) -> Tuple[np.ndarray, float]:
        """界面 i − 1/2（i = 0..cells）上的 Rusanov 通量与最大波速"""
        P = self._padded(U)
        flux = np.array([self.system.flux(u, 0) for u in P])
        jacobians = np.array([self.system.flux_jacobian(u, 0) for u in P])
        speed = np.max(np.abs(np.linalg.eigvals(jacobians)), axis=1)
        alpha = np.maximum(speed[:-1], speed[1:])
        numerical = 0.5 * (flux[:-1] + flux[1:]) - 0.5 * alpha[:, None] * (P[1:] - P[:-1])
        return numerical, float(speed.max())

    def face_viscosity(self, U: np.ndarray) -> np.ndarray:
        P = self._padded(U)
        return np.array([self.system.viscosity(0.5 * (a + b), 0, 0) for a, b in zip(P[:-1], P[1:])])

    def viscous_flux(self, U: np.ndarray, B: np.ndarray) -> np.ndarray:
        P = self._padded(U)
        return np.einsum("fab,fb->fa", B, (P[1:] - P[:-1]) / self.h)

    def step(self, U: np.ndarray, dt: float) -> Tuple[np.ndarray, float]:
        """一步；返回新状态与本步质量守恒残差"""
        n, N, h = self.n, self.cells, self.h
        F, _ = self.rusanov(U)
        B = self.face_viscosity(U)
        rhs = U - dt / h * (F[1:] - F[:-1])
        # 边界虚单元的已知值移到右端
        rhs[0] += dt / h ** 2 * B[0] @ self.left
        rhs[-1] += dt / h ** 2 * B[-1] @ self.right
        c = dt / h ** 2
        # 块三对角：对角块 I + c(B_{i−1/2} + B_{i+1/2})，非对角块 −cB
        diag = np.eye(n)[None] + c * (B[:-1] + B[1:])
        off = -c * B[1:N]
        a_idx, b_idx = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        cells = np.arange(N)[:, None, None]
        inner = np.arange(N - 1)[:, None, None]
        rows = np.concatenate([(cells * n + a_idx).ravel(), ((inner + 1) * n + a_idx).ravel(),
                               (inner * n + a_idx).ravel()])
        cols = np.concatenate([(cells * n + b_idx).ravel(), (inner * n + b_idx).ravel(),
                               ((inner + 1) * n + b_idx).ravel()])
        vals = np.concatenate([diag.ravel(), off.ravel(), off.ravel()])
        matrix = sp.csr_matrix((vals, (rows, cols)), shape=(n * N, n * N))
        new = np.asarray(spsolve(matrix, rhs.ravel())).reshape(N, n)
        G = self.viscous_flux(new, B)
        expected = -dt * (F[-1] - F[0]) + dt * (G[-1] - G[0])
        residual = float(np.max(np.abs(h * (new - U).sum(axis=0) - expected)))
        return new, residual


def evolve_nonlinear_1d(system: SystemDefinition, profile: ShockProfile, epsilon: float = 1e-2, T: float = 40.0,
                        cells: int = 400, perturbation: str = "gaussian", samples: int = 200,
                        safety: float = 0.4, relax_tol: float = 1e-10, relax_steps: int = 8000,
                        L: Optional[float] = None) -> EvolutionRun:
    """
    一维非线性扰动演化：扰动激波趋于 Ū 的平移，平移量与质量预测比较

    先在 ε = 0 下推进到离散定常态，再以其为基态加扰动。

    Args:
        system: 守恒律系统（静止坐标系）
        profile: 剖面
        epsilon: 扰动幅度
        T: 终止时间
        cells: 单元数
        perturbation: gaussian（非零质量）或 antisymmetric（零质量）
        relax_tol: 松弛到离散定常态的单步变化阈值
        L: 计算区域半长，默认 max(剖面截断长度, 20)

    Returns:
        EvolutionRun；extra 中含 predicted_shift / measured_shift / mass_residual / step_residual
    """
    L = float(L or max(profile.L, 20.0))
    comoving = ComovingSystem(system, profile.triple.s)
    U_minus, U_plus = profile.triple.U_minus, profile.triple.U_plus
    fv = _FiniteVolume(comoving, U_minus, U_plus, L, cells)
    _, speed = fv.rusanov(np.array([profile.evaluate(x)[0] for x in fv.x]))
    dt = safety * fv.h / max(speed, 1e-12)

    base = np.array([profile.evaluate(x)[0] for x in fv.x])
    change = np.inf
    for _ in range(relax_steps):
        new, _ = fv.step(base, dt)
        change = float(np.max(np.abs(new - base)))
        base = new
        if change <= relax_tol:
            break
    run = EvolutionRun(name=f"nonlinear_{perturbation}", nodes=cells, L=L,
                       scheme={"type": "有限体积 Rusanov + 隐式粘性", "dt": dt, "h": fv.h})
    if change > relax_tol:
        run.flags.append(f"离散定常态松弛未收敛（末步变化 {change:.2e}）")

    jump = U_minus - U_plus
    direction = jump / np.linalg.norm(jump)
    if perturbation == "gaussian":
        shape = np.exp(-fv.x ** 2)
    elif perturbation == "antisymmetric":
        shape = fv.x * np.exp(-fv.x ** 2)
    else:
        raise ConfigError(f"未知扰动类型: {perturbation!r}")
    U = base + epsilon * shape[:, None] * direction[None, :]
    mass = fv.h * (U - base).sum(axis=0)
    predicted = float(mass @ jump / (jump @ jump))

    def translate(delta: float) -> np.ndarray:
        return np.column_stack([np.interp(fv.x - delta, fv.x, base[:, k], left=U_minus[k], right=U_plus[k])
                                for k in range(fv.n)])

    def distance(state: np.ndarray, delta: float) -> float:
        return float(np.sqrt(fv.h) * np.linalg.norm(state - translate(delta)))

    target = translate(predicted)
    steps = max(int(np.ceil(T / dt)), samples)
    every = max(steps // samples, 1)
    run.times.append(0.0)
    run.l2.append(distance(U, predicted))
    run.linf.append(float(np.max(np.abs(U - target))))
    worst_mass, last_change = 0.0, 0.0
    for step in range(1, steps + 1):
        new, residual = fv.step(U, dt)
        worst_mass = max(worst_mass, residual)
        last_change = float(np.max(np.abs(new - U)))
        U = new
        if not np.all(np.isfinite(U)):
            run.blowup = True
            run.flags.append(f"t={step * dt:.3g} 处出现非有限值")
            break
        if step % every == 0:
            run.times.append(step * dt)
            run.l2.append(distance(U, predicted))
            run.linf.append(float(np.max(np.abs(U - target))))

    res = minimize_scalar(lambda delta: distance(U, delta), bounds=(predicted - 0.25 * L, predicted + 0.25 * L),
                          method="bounded", options={"xatol": 1e-10})
    measured = float(res.x)
    if abs(measured) > 0.5 * L:
        run.flags.append("激波离开计算区域")
    run.fit_window = (min(1.0, 0.25 * T), run.times[-1])
    run.fitted_rate = fit_exponential_rate(run.times, run.l2, run.fit_window)
    run.extra.update({"epsilon": epsilon, "predicted_shift": predicted, "measured_shift": measured,
                      "mass_residual": worst_mass, "step_residual": last_change,
                      "relaxation_change": change})
    logger.info("非线性演化 ε=%.3g: 预测平移 %.5g，实测 %.5g", epsilon, predicted, measured)
    return run


# ---------------------------------------------------------------------------
# 常系数衰减
# ---------------------------------------------------------------------------

@dataclass
class DecayExperiment:
    """常系数问题的 L² 衰减实验"""
    d: int
    kind: str
    cutoff: float
    times: List[float] = field(default_factory=list)
    l2: List[float] = field(default_factory=list)
    low: List[float] = field(default_factory=list)
    high: List[float] = field(default_factory=list)
    slope: float = float("nan")
    slope_expected: float = float("nan")
    fit_window: Tuple[float, float] = (0.0, 0.0)
    high_rate: float = float("nan")
    high_bound: float = float("nan")
    parseval_error: float = 0.0
    stagnating: Optional[Dict[str, Any]] = None

    def history(self) -> Dict[str, List[float]]:
        return {"t": self.times, "l2": self.l2, "low": self.low, "high": self.high}

    def to_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "kind": self.kind, "cutoff": self.cutoff, "slope": self.slope,
                "slope_expected": self.slope_expected, "fit_window": list(self.fit_window),
                "high_rate": self.high_rate, "high_bound": self.high_bound,
                "parseval_error": self.parseval_error, "stagnating": self.stagnating}


def constant_coeff_decay(A_list: Sequence[np.ndarray], B_tensor: np.ndarray, d: int, T: float = 200.0,
                         kind: str = "bump", box: Optional[float] = None, spacing: Optional[float] = None,
                         cutoff: float = 1.0, samples: int = 40, width: float = 1.0) -> DecayExperiment:
    """
    Û_t = (−iΣξ_jA^j − Σξ_jξ_kB^{jk})Û 在频率空间精确演化，拟合 log‖u‖ 对 log t 的斜率

    Args:
        A_list: A^j（至少 d 个）
        B_tensor: B^{jk}
        d: 空间维数 1 或 2
        T: 终止时间
        kind: bump（L¹ 归一化高斯）或 derivative（其 x₁ 导数）
        box: 周期盒半宽，默认按最大波速与扩散宽度确定
        spacing: 网格间距
        cutoff: 低/高频分割半径
        samples: 时间采样数

    Returns:
        DecayExperiment
    """
    if d not in (1, 2):
        raise ConfigError("常系数衰减实验只支持 d = 1 或 2")
    A = [np.asarray(a, dtype=float) for a in A_list[:d]]
    B = np.asarray(B_tensor, dtype=float)[:d, :d]
    n = A[0].shape[0]
    speed = max(float(np.max(np.abs(np.linalg.eigvals(a)))) for a in A)
    visc = max(float(np.max(np.abs(np.linalg.eigvals(B[j, j])))) for j in range(d))
    box = box or (speed * T + 6.0 * np.sqrt(visc * T) + 10.0 * width)
    spacing = spacing or (0.5 if d == 1 else 1.0)
    points = int(2 ** np.ceil(np.log2(2.0 * box / spacing)))
    h = 2.0 * box / points
    x = -box + h * np.arange(points)
    k = 2.0 * np.pi * np.fft.fftfreq(points, d=h)
    grids = np.meshgrid(*([k] * d), indexing="ij")
    xi = np.stack([g.ravel() for g in grids], axis=1)
    coords = np.meshgrid(*([x] * d), indexing="ij")
    r2 = sum(c ** 2 for c in coords)
    bump = np.exp(-r2 / (2.0 * width ** 2)) / (2.0 * np.pi * width ** 2) ** (d / 2.0)
    if kind == "derivative":
        bump = -coords[0] / width ** 2 * bump
    elif kind != "bump":
        raise ConfigError(f"未知初值类型: {kind!r}")
    vector = np.ones(n) / np.sqrt(n)
    f_hat = np.fft.fftn(bump).ravel()[:, None] * vector[None, :]

    E = -1j * np.einsum("kj,jab->kab", xi, np.array(A)) - np.einsum("kj,kl,jlab->kab", xi, xi, B)
    values, vectors = np.linalg.eig(E)
    coeffs = np.linalg.solve(vectors, f_hat[:, :, None])[:, :, 0]
    radius = np.linalg.norm(xi, axis=1)
    low_mask = radius <= cutoff
    volume = h ** d / points ** d

    result = DecayExperiment(d=d, kind=kind, cutoff=cutoff)
    nonzero = radius > 0
    worst = values.real.max(axis=1)
    if nonzero.any() and worst[nonzero].max() >= -1e-12:
        idx = int(np.argmax(np.where(nonzero, worst, -np.inf)))
        result.stagnating = {"xi": xi[idx].tolist(), "max_re": float(worst[idx])}
        logger.warning("常系数符号在 ξ=%s 处不衰减：真正耦合不成立", xi[idx].tolist())
    high = ~low_mask
    result.high_bound = float(worst[high].max()) if high.any() else float("nan")

    times = np.concatenate([[0.0], np.geomspace(0.1, T, samples)])
    for t in times:
        U_hat = np.einsum("kab,kb->ka", vectors, np.exp(t * values) * coeffs)
        total = np.sum(np.abs(U_hat) ** 2, axis=1)
        l2 = float(np.sqrt(volume * total.sum()))
        low = float(np.sqrt(volume * total[low_mask].sum()))
        hi = float(np.sqrt(volume * total[high].sum()))
        result.times.append(float(t))
        result.l2.append(l2)
        result.low.append(low)
        result.high.append(hi)
    result.parseval_error = abs(result.low[0] ** 2 + result.high[0] ** 2 - result.l2[0] ** 2) / result.l2[0] ** 2
    t_arr = np.asarray(result.times)
    window = (0.1 * T, T)
    mask = (t_arr >= window[0]) & (t_arr <= window[1])
    result.fit_window = window
    result.slope = float(np.polyfit(np.log(t_arr[mask]), np.log(np.asarray(result.l2)[mask]), 1)[0])
    result.slope_expected = -d / 4.0 - (0.5 if kind == "derivative" else 0.0)
    early = (t_arr > 0) & (t_arr <= min(2.0, T))
    highs = np.asarray(result.high)
    if early.sum() >= 2 and np.all(highs[early] > 0):
        result.high_rate = float(np.polyfit(t_arr[early], np.log(highs[early]), 1)[0])
    logger.info("常系数衰减 d=%d (%s): 斜率 %.4f，期望 %.4f", d, kind, result.slope, result.slope_expected)
    return result


def endpoint_decay(system: SystemDefinition, U: Sequence[float], d: int = 1, **kwargs) -> DecayExperiment:
    """以端点状态处的 A^j、B^{jk} 做常系数衰减实验"""
    if d > system.d:
        raise ConfigError(f"系统空间维数 {system.d} < 实验维数 {d}")
    A_list, B_tensor = endpoint_matrices(system, np.asarray(U, dtype=float))
    return constant_coeff_decay(A_list, B_tensor, d, **kwargs)

