"""结构性检查 - 对称化子、真耦合条件、Kawashima 补偿矩阵与严格耗散性"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.models import SymmetricForm, SystemDefinition, hyperbolicity_report, sphere_directions
from app.utils.errors import GenuineCouplingError, IndeterminateError, StructureError, WorkbenchError
from app.utils.linalg import cluster_values, eigenvector_condition, fix_frame_signs, symmetric_sqrt

logger = logging.getLogger(__name__)

COUPLING_TOL = 1e-10
DEFAULT_MAGNITUDES = np.logspace(-2, 2, 17)
DEFAULT_DIRECTIONS = 32


# ---------------------------------------------------------------------------
# 对称化
# ---------------------------------------------------------------------------

def symmetrize(system: SystemDefinition, U: np.ndarray) -> SymmetricForm:
    """
    构造并校验熵对称化形式

    Args:
        system: 守恒律系统
        U: 状态

    Returns:
        SymmetricForm（p_ρ ≤ 0 时 first_order_symmetric 为 False）
    """
    U = system.check_admissible(U)
    form = system.symmetric_form(U)
    if form is None:
        raise StructureError(f"模型 {system.name} 未提供对称化子")
    A0 = form.A0
    if np.max(np.abs(A0 - A0.T)) > 1e-12 or np.min(np.linalg.eigvalsh(A0)) <= 0.0:
        raise StructureError("Ã⁰ 不是对称正定矩阵", witness=A0)
    if form.first_order_symmetric:
        for j, A in enumerate(form.Aj):
            if np.max(np.abs(A - A.T)) > 1e-12:
                raise StructureError(f"Ã^{j} 非对称", witness=A)
    q = system.q
    for j in range(system.d):
        for k in range(system.d):
            block = form.Bjk[j, k]
            if np.any(block[:q, :] != 0.0) or np.any(block[:, :q] != 0.0):
                raise StructureError("B̃ 在右下块之外非零", witness=block)
    return form


def viscous_ellipticity_margin(form: SymmetricForm, q: int, directions: Optional[np.ndarray] = None) -> float:
    """Σ ξ_j ξ_k b̃^{jk} 在单位球面上的最小特征值"""
    d = len(form.Aj)
    directions = sphere_directions(d, DEFAULT_DIRECTIONS) if directions is None else directions
    margins = []
    for xi in directions:
        block = form.viscosity_symbol(xi)[q:, q:]
        margins.append(float(np.min(np.linalg.eigvalsh(0.5 * (block + block.T)))))
    return min(margins)


def symmetric_form_consistency(system: SystemDefinition, form: SymmetricForm, xi: Sequence[float]) -> float:
    """
    比较 σ((Ã⁰)⁻¹(iÃ(ξ) + B̃(ξ))) 与守恒变量下 σ(iA(ξ) + B(ξ))

    Returns:
        排序后谱的最大偏差（相对）
    """
    U = form.state
    lhs = np.linalg.solve(form.A0, 1j * form.symbol(xi) + form.viscosity_symbol(xi))
    rhs = 1j * system.symbol(U, xi) + system.viscosity_symbol(U, xi)
    a = np.sort_complex(np.linalg.eigvals(lhs))
    b = np.sort_complex(np.linalg.eigvals(rhs))
    return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b))))


# ---------------------------------------------------------------------------
# 真耦合条件 (K0)
# ---------------------------------------------------------------------------

@dataclass
class GenuineCouplingResult:
    """真耦合检查结果"""
    holds: bool
    margin: float
    witness: Optional[np.ndarray] = None
    direction: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "holds": self.holds,
            "margin": self.margin,
            "witness": None if self.witness is None else np.real_if_close(self.witness).tolist(),
            "direction": None if self.direction is None else self.direction.tolist(),
        }


def coupling_defect(A: np.ndarray, B: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    A 的各特征子空间上 ‖B v‖/‖v‖ 的最小值（相对 ‖B‖）

    Returns:
        (最小比值, 达到最小值的特征向量)
    """
    values, vectors, cond = eigenvector_condition(A)
    if cond >= 1e8:
        raise IndeterminateError(f"A(ξ) 特征向量矩阵条件数 {cond:.2e}，可对角化性不确定", witness=A)
    scale = max(1.0, float(np.linalg.norm(A)))
    norm_b = float(np.linalg.norm(B, 2))
    if norm_b == 0.0:
        return 0.0, vectors[:, 0]
    best, witness = np.inf, vectors[:, 0]
    for cluster in cluster_values(values.real, 1e-8 * scale):
        basis, _ = np.linalg.qr(vectors[:, cluster])
        _, sing, vh = np.linalg.svd(B @ basis)
        ratio = float(sing[-1]) / norm_b if sing.size == basis.shape[1] else 0.0
        if ratio < best:
            best = ratio
            witness = basis @ vh.conj()[-1]
    return best, witness


def genuine_coupling_matrices(A: np.ndarray, B: np.ndarray) -> GenuineCouplingResult:
    """单个方向上的 (K0) 检查"""
    margin, witness = coupling_defect(A, B)
    holds = margin > COUPLING_TOL
    return GenuineCouplingResult(holds=holds, margin=margin, witness=None if holds else witness)


def genuine_coupling_check(system: SystemDefinition, U: np.ndarray,
                           directions: Optional[np.ndarray] = None) -> GenuineCouplingResult:
    """
    检查 A(ξ) 的特征向量是否落在 B(ξ) 的核中

    Args:
        system: 守恒律系统
        U: 状态
        directions: ξ 采样方向，默认单位球面 32 个方向

    Returns:
        GenuineCouplingResult（布尔值语义：条件成立）
    """
    U = system.check_admissible(U)
    directions = sphere_directions(system.d, DEFAULT_DIRECTIONS) if directions is None else np.atleast_2d(directions)
    worst = GenuineCouplingResult(holds=True, margin=np.inf)
    for xi in directions:
        A = system.symbol(U, xi)
        B = system.viscosity_symbol(U, xi)
        margin, witness = coupling_defect(A, B)
        if margin < worst.margin:
            worst = GenuineCouplingResult(holds=margin > COUPLING_TOL, margin=margin,
                                          witness=witness, direction=np.asarray(xi, dtype=float))
    if worst.holds:
        worst.witness = None
    else:
        logger.info("真耦合条件不成立: ξ=%s，见证向量=%s", worst.direction, np.round(worst.witness, 6))
    return worst


# ---------------------------------------------------------------------------
# 补偿矩阵 (K2)
# ---------------------------------------------------------------------------

@dataclass
class CompensatingMatrix:
    """
    Kawashima 补偿矩阵

    K 在 A₀^{1/2} 归一化后的 A 特征正交标架中给出；in_state_coordinates() 返回原坐标下的
    反对称矩阵 K_s，满足 Re(B̃ − K_s A) ≻ 0。
    """
    K: np.ndarray
    theta: float
    frame: np.ndarray
    eigenvalues: np.ndarray
    sqrt_A0: np.ndarray
    identity_residual: float
    K_state: np.ndarray = field(repr=False, default=None)

    def in_state_coordinates(self) -> np.ndarray:
        return self.K_state

    def to_dict(self) -> Dict[str, Any]:
        return {"theta": self.theta, "identity_residual": self.identity_residual,
                "K": self.K.tolist(), "eigenvalues": self.eigenvalues.tolist()}


def build_compensating_matrix(A0: np.ndarray, A: np.ndarray, B: np.ndarray) -> CompensatingMatrix:
    """
    构造反对称补偿矩阵

    Ã = A0·A、B̃ = A0·B 经 A0^{1/2} 归一化后在 A 的正交特征标架中，
    K″_ij = 2 B″_ij / (a_j − a_i)（跨特征值簇），簇内为零，从而 Re(B″ − K″A″) = blockdiag(B″)。

    Args:
        A0: 对称正定矩阵
        A: 未对称化的对流矩阵
        B: 未对称化的粘性矩阵

    Returns:
        CompensatingMatrix
    """
    A0 = np.asarray(A0, dtype=float)
    n = A0.shape[0]
    S = symmetric_sqrt(A0)
    S_inv = np.linalg.inv(S)
    A_sym = A0 @ np.asarray(A, dtype=float)
    B_sym = A0 @ np.asarray(B, dtype=float)
    if np.max(np.abs(A_sym - A_sym.T)) > 1e-9 * max(1.0, np.linalg.norm(A_sym)):
        raise StructureError("A0·A 非对称", witness=A_sym)
    A1 = S_inv @ A_sym @ S_inv
    B1 = S_inv @ B_sym @ S_inv
    A1 = 0.5 * (A1 + A1.T)
    B1 = 0.5 * (B1 + B1.T)
    norm_b = max(float(np.linalg.norm(B1, 2)), 1e-300)

    values, vectors = np.linalg.eigh(A1)
    order = np.argsort(values)[::-1]
    values = values[order]
    frame = fix_frame_signs(vectors[:, order])
    B2 = frame.T @ B1 @ frame
    A2 = np.diag(values)
    scale = max(1.0, float(np.max(np.abs(values))))
    clusters = cluster_values(values, 1e-8 * scale)
    label = np.zeros(n, dtype=int)
    for c, members in enumerate(clusters):
        label[members] = c

    if np.min(np.linalg.eigvalsh(B1)) > COUPLING_TOL * norm_b:
        K2 = np.zeros((n, n))
        theta = float(np.min(np.linalg.eigvalsh(B1)))
    else:
        K2 = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if label[i] != label[j]:
                    K2[i, j] = 2.0 * B2[i, j] / (values[j] - values[i])
        theta = np.inf
        for members in clusters:
            block = B2[np.ix_(members, members)]
            w, v = np.linalg.eigh(block)
            if w[0] <= COUPLING_TOL * norm_b:
                witness = S_inv @ frame[:, members] @ v[:, 0]
                raise GenuineCouplingError(
                    f"(K0) 不成立：A 的特征向量位于 B 的核中 (a={values[members[0]]:.6g})",
                    witness=witness / np.linalg.norm(witness),
                )
            theta = min(theta, float(w[0]))

    M = B2 - K2 @ A2
    re_part = 0.5 * (M + M.T)
    target = np.zeros_like(B2)
    for members in clusters:
        target[np.ix_(members, members)] = B2[np.ix_(members, members)]
    if np.any(K2 != 0.0):
        residual = float(np.max(np.abs(re_part - target)))
    else:
        residual = float(np.max(np.abs(re_part - B2)))
    K1 = frame @ K2 @ frame.T
    K_state = S @ K1 @ S
    K_state = 0.5 * (K_state - K_state.T)
    return CompensatingMatrix(K=K2, theta=theta, frame=frame, eigenvalues=values, sqrt_A0=S,
                              identity_residual=residual, K_state=K_state)


def compensating_matrix_family(form: SymmetricForm, xi: Sequence[float]) -> np.ndarray:
    """
    一次齐次的多维补偿矩阵族 K(ξ) = |ξ| K(ξ/|ξ|)（状态坐标）
    """
    xi = np.asarray(xi, dtype=float)
    norm = float(np.linalg.norm(xi))
    if norm == 0.0:
        return np.zeros_like(form.A0)
    unit = xi / norm
    A = np.linalg.solve(form.A0, form.symbol(unit))
    B = np.linalg.solve(form.A0, form.viscosity_symbol(unit))
    return norm * build_compensating_matrix(form.A0, A, B).in_state_coordinates()


# ---------------------------------------------------------------------------
# 严格耗散性 (K3)
# ---------------------------------------------------------------------------

@dataclass
class DissipativityReport:
    """耗散性扫描报告"""
    theta: float
    samples: List[Tuple[List[float], float]]
    passed: bool
    worst_xi: Optional[List[float]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"theta": self.theta, "pass": self.passed, "worst_xi": self.worst_xi,
                "sample_count": len(self.samples)}


def _max_growth(A_list: Sequence[np.ndarray], B_tensor: np.ndarray, xi: np.ndarray) -> float:
    A = sum(x * a for x, a in zip(xi, A_list))
    B = np.einsum("j,k,jkab->ab", xi, xi, B_tensor)
    return float(np.max(np.linalg.eigvals(-1j * A - B).real))


def dissipativity_scan(A_list: Sequence[np.ndarray], B_tensor: np.ndarray,
                       magnitudes: Optional[Sequence[float]] = None,
                       directions: Optional[np.ndarray] = None,
                       threads: int = 1) -> DissipativityReport:
    """
    在 ξ 网格上计算 max Re σ(−iΣξ_jA^j − Σξ_jξ_kB^{jk}) 并拟合 θ

    Args:
        A_list: 端点处 A^j 列表
        B_tensor: 形状 (d, d, n, n) 的 B^{jk}
        magnitudes: |ξ| 取值，默认 1e−2…1e2 对数均匀
        directions: 单位球面方向
        threads: 线程数

    Returns:
        DissipativityReport，pass ⇔ θ > 0
    """
    A_list = [np.asarray(a, dtype=float) for a in A_list]
    B_tensor = np.asarray(B_tensor, dtype=float)
    d = len(A_list)
    magnitudes = DEFAULT_MAGNITUDES if magnitudes is None else np.asarray(magnitudes, dtype=float)
    directions = sphere_directions(d, DEFAULT_DIRECTIONS) if directions is None else np.atleast_2d(directions)
    grid = [m * w for w in directions for m in magnitudes]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            growth = list(pool.map(lambda x: _max_growth(A_list, B_tensor, x), grid))
    else:
        growth = [_max_growth(A_list, B_tensor, x) for x in grid]
    thetas = [-g * (1.0 + float(x @ x)) / float(x @ x) for x, g in zip(grid, growth)]
    idx = int(np.argmin(thetas))
    theta = float(thetas[idx])
    samples = [(x.tolist(), g) for x, g in zip(grid, growth)]
    return DissipativityReport(theta=theta, samples=samples, passed=theta > 1e-9, worst_xi=grid[idx].tolist())


def endpoint_matrices(system: SystemDefinition, U: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    """状态 U 处的 A^j 与 B^{jk}"""
    A_list = [system.flux_jacobian(U, j) for j in range(system.d)]
    B_tensor = np.zeros((system.d, system.d, system.n, system.n))
    for j in range(system.d):
        for k in range(system.d):
            B_tensor[j, k] = system.viscosity(U, j, k)
    return A_list, B_tensor


# ---------------------------------------------------------------------------
# 组合证书
# ---------------------------------------------------------------------------

def structure_certificate(system: SystemDefinition, U: np.ndarray, threads: int = 1) -> Dict[str, Any]:
    """
    单个状态的结构证书：双曲性、对称化、真耦合、补偿矩阵与耗散性

    Returns:
        可序列化字典，passed 为总体结论
    """
    U = system.check_admissible(U)
    result: Dict[str, Any] = {"state": U.tolist()}
    hyper = hyperbolicity_report(system, U)
    result["hyperbolicity"] = hyper.to_dict()
    passed = hyper.real_semisimple

    form = None
    try:
        form = symmetrize(system, U)
        result["symmetrizer"] = {
            "first_order_symmetric": form.first_order_symmetric,
            "ellipticity_margin": viscous_ellipticity_margin(form, system.q),
        }
        passed = passed and form.first_order_symmetric
    except WorkbenchError as exc:
        result["symmetrizer"] = exc.to_dict()
        passed = False

    try:
        coupling = genuine_coupling_check(system, U)
        result["genuine_coupling"] = coupling.to_dict()
        passed = passed and coupling.holds
    except IndeterminateError as exc:
        result["genuine_coupling"] = {"holds": None, **exc.to_dict()}
        passed = False

    if form is not None and form.first_order_symmetric:
        thetas = []
        try:
            for xi in sphere_directions(system.d, DEFAULT_DIRECTIONS if system.d > 1 else 2):
                A = np.linalg.solve(form.A0, form.symbol(xi))
                B = np.linalg.solve(form.A0, form.viscosity_symbol(xi))
                thetas.append(build_compensating_matrix(form.A0, A, B).theta)
            result["compensating_matrix"] = {"theta": min(thetas)}
        except WorkbenchError as exc:
            result["compensating_matrix"] = exc.to_dict()
            passed = False

    A_list, B_tensor = endpoint_matrices(system, U)
    diss = dissipativity_scan(A_list, B_tensor, threads=threads)
    result["dissipativity"] = diss.to_dict()
    passed = passed and diss.passed
    result["passed"] = bool(passed)
    return result
