"""守恒律系统基础模型 - 通量、粘性张量、雅可比矩阵与自然变量"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.utils.errors import InadmissibleStateError, StructureError
from app.utils.linalg import cluster_values, eigenvector_condition, fd_jacobian

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateVector:
    """带分量名称的状态向量"""
    components: np.ndarray
    labels: Tuple[str, ...]

    def as_dict(self) -> dict:
        return {label: float(value) for label, value in zip(self.labels, self.components)}


@dataclass(frozen=True)
class SymmetricForm:
    """
    对称双曲-抛物型形式 (Ã⁰, Ã^j, B̃^{jk})

    矩阵作用于自然变量 W，change_of_variables 为 dU/dW。
    """
    A0: np.ndarray
    Aj: Tuple[np.ndarray, ...]
    Bjk: np.ndarray
    state: np.ndarray
    change_of_variables: np.ndarray
    first_order_symmetric: bool = True

    def symbol(self, xi: Sequence[float]) -> np.ndarray:
        """Ã(ξ) = Σ ξ_j Ã^j"""
        return sum(x * a for x, a in zip(xi, self.Aj))

    def viscosity_symbol(self, xi: Sequence[float]) -> np.ndarray:
        """B̃(ξ) = Σ ξ_j ξ_k B̃^{jk}"""
        xi = np.asarray(xi, dtype=float)
        return np.einsum("j,k,jkab->ab", xi, xi, self.Bjk)


class SystemDefinition(ABC):
    """
    双曲-抛物型守恒律 U_t + Σ F^j(U)_{x_j} = Σ (B^{jk}(U) U_{x_k})_{x_j}

    方向下标从 0 开始，方向 0 为激波法向。粘性以自然变量 W 表示：
    B^{jk}(U) = β^{jk}(W) · (∂W/∂U)[q:]，其中 β^{jk} 为 n × r 矩阵且前 q = n − r 行为零。
    """

    name: str = "system"
    state_labels: Tuple[str, ...] = ()
    natural_labels: Tuple[str, ...] = ()

    def __init__(self, n: int, r: int, d: int):
        self.n = n
        self.r = r
        self.d = d

    @property
    def q(self) -> int:
        """双曲分量个数 n − r"""
        return self.n - self.r

    # ---- 通量 ----
    @abstractmethod
    def flux(self, U: np.ndarray, j: int) -> np.ndarray:
        """F^j(U)"""

    @abstractmethod
    def flux_jacobian(self, U: np.ndarray, j: int) -> np.ndarray:
        """A^j = dF^j(U)"""

    # ---- 自然变量 ----
    def to_natural(self, U: np.ndarray) -> np.ndarray:
        return np.asarray(U, dtype=float).copy()

    def from_natural(self, W: np.ndarray) -> np.ndarray:
        return np.asarray(W, dtype=float).copy()

    def natural_jacobian(self, U: np.ndarray) -> np.ndarray:
        """∂W/∂U"""
        return np.eye(self.n)

    def conserved_jacobian(self, W: np.ndarray) -> np.ndarray:
        """∂U/∂W"""
        return np.linalg.inv(self.natural_jacobian(self.from_natural(W)))

    # ---- 粘性 ----
    @abstractmethod
    def natural_viscosity(self, W: np.ndarray, j: int, k: int) -> np.ndarray:
        """β^{jk}(W)，n × r"""

    def viscosity(self, U: np.ndarray, j: int, k: int) -> np.ndarray:
        """B^{jk}(U)"""
        W = self.to_natural(U)
        return self.natural_viscosity(W, j, k) @ self.natural_jacobian(U)[self.q:, :]

    def viscosity_derivative(self, U: np.ndarray, j: int, k: int, v: np.ndarray) -> np.ndarray:
        """方向导数 dB^{jk}(U)v，默认中心差分"""
        U = np.asarray(U, dtype=float)
        v = np.asarray(v, dtype=float)
        scale = max(1.0, float(np.linalg.norm(U)))
        norm_v = float(np.linalg.norm(v))
        if norm_v == 0.0:
            return np.zeros((self.n, self.n))
        h = 1e-6 * scale / norm_v
        return (self.viscosity(U + h * v, j, k) - self.viscosity(U - h * v, j, k)) / (2.0 * h)

    # ---- 状态空间 ----
    def is_admissible(self, U: np.ndarray) -> bool:
        return bool(np.all(np.isfinite(U)))

    def check_admissible(self, U: np.ndarray) -> np.ndarray:
        """检查状态可容许性，不可容许时抛出异常"""
        U = np.asarray(U, dtype=float)
        if U.shape != (self.n,):
            raise InadmissibleStateError(f"状态维数错误: 期望 {self.n}，得到 {U.shape}", witness=U)
        if not self.is_admissible(U):
            raise InadmissibleStateError(f"{self.name} 状态不可容许: {U.tolist()}", witness=U)
        return U

    def symmetric_form(self, U: np.ndarray) -> Optional[SymmetricForm]:
        """熵对称化形式，模型未提供时返回 None"""
        return None

    def entropy(self, U: np.ndarray) -> Optional[float]:
        """物理熵（比熵），模型未提供时返回 None"""
        return None

    def random_state(self, rng: np.random.Generator) -> np.ndarray:
        """随机可容许状态（用于一致性检验）"""
        return rng.uniform(-2.0, 2.0, size=self.n)

    def reference_states(self) -> List[np.ndarray]:
        """目录参考状态"""
        return [np.ones(self.n)]

    # ---- 符号 ----
    def symbol(self, U: np.ndarray, xi: Sequence[float]) -> np.ndarray:
        """A(ξ) = Σ ξ_j A^j(U)"""
        return sum(float(x) * self.flux_jacobian(U, j) for j, x in enumerate(xi))

    def viscosity_symbol(self, U: np.ndarray, xi: Sequence[float]) -> np.ndarray:
        """B(ξ) = Σ ξ_j ξ_k B^{jk}(U)"""
        out = np.zeros((self.n, self.n))
        for j, xj in enumerate(xi):
            for k, xk in enumerate(xi):
                if xj != 0.0 and xk != 0.0:
                    out += float(xj) * float(xk) * self.viscosity(U, j, k)
        return out

    def natural_viscosity_symbol(self, U: np.ndarray, xi: Sequence[float]) -> np.ndarray:
        """自然变量下粘性符号的 (II,II) 块 Σ ξ_j ξ_k β^{jk}[q:]"""
        W = self.to_natural(U)
        out = np.zeros((self.r, self.r))
        for j, xj in enumerate(xi):
            for k, xk in enumerate(xi):
                if xj != 0.0 and xk != 0.0:
                    out += float(xj) * float(xk) * self.natural_viscosity(W, j, k)[self.q:, :]
        return out


class ComovingSystem(SystemDefinition):
    """以速度 s 运动的坐标系：法向通量替换为 F⁰ − sU"""

    def __init__(self, base: SystemDefinition, s: float):
        super().__init__(base.n, base.r, base.d)
        self.base = base
        self.s = float(s)
        self.name = f"{base.name}@s={self.s:g}"
        self.state_labels = base.state_labels
        self.natural_labels = base.natural_labels

    def flux(self, U, j):
        out = self.base.flux(U, j)
        return out - self.s * np.asarray(U, dtype=float) if j == 0 else out

    def flux_jacobian(self, U, j):
        out = self.base.flux_jacobian(U, j)
        return out - self.s * np.eye(self.n) if j == 0 else out

    def to_natural(self, U):
        return self.base.to_natural(U)

    def from_natural(self, W):
        return self.base.from_natural(W)

    def natural_jacobian(self, U):
        return self.base.natural_jacobian(U)

    def conserved_jacobian(self, W):
        return self.base.conserved_jacobian(W)

    def natural_viscosity(self, W, j, k):
        return self.base.natural_viscosity(W, j, k)

    def viscosity(self, U, j, k):
        return self.base.viscosity(U, j, k)

    def viscosity_derivative(self, U, j, k, v):
        return self.base.viscosity_derivative(U, j, k, v)

    def is_admissible(self, U):
        return self.base.is_admissible(U)

    def symmetric_form(self, U):
        form = self.base.symmetric_form(U)
        if form is None or self.s == 0.0:
            return form
        shifted = (form.Aj[0] - self.s * form.A0,) + tuple(form.Aj[1:])
        return SymmetricForm(form.A0, shifted, form.Bjk, form.state,
                             form.change_of_variables, form.first_order_symmetric)

    def entropy(self, U):
        return self.base.entropy(U)

    def random_state(self, rng):
        return self.base.random_state(rng)

    def reference_states(self):
        return self.base.reference_states()


# ---------------------------------------------------------------------------
# system_model 模块操作
# ---------------------------------------------------------------------------

def flux_and_jacobian(system: SystemDefinition, U: np.ndarray, j: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    计算通量及其雅可比矩阵

    Args:
        system: 守恒律系统
        U: 状态
        j: 方向下标（0 为法向）

    Returns:
        (F^j(U), A^j(U))
    """
    U = system.check_admissible(U)
    return system.flux(U, j), system.flux_jacobian(U, j)


def jacobian_consistency(system: SystemDefinition, U: np.ndarray, j: int, step: float = 1e-6) -> float:
    """解析雅可比与中心差分的相对误差"""
    U = system.check_admissible(U)
    analytic = system.flux_jacobian(U, j)
    numeric = fd_jacobian(lambda x: system.flux(x, j), U, step)
    return float(np.linalg.norm(analytic - numeric) / max(1.0, np.linalg.norm(analytic)))


def viscosity_tensor(system: SystemDefinition, U: np.ndarray, xi: Sequence[float],
                     check_ellipticity: bool = False) -> np.ndarray:
    """
    粘性符号 Σ ξ_j ξ_k B^{jk}(U)

    Args:
        system: 守恒律系统
        U: 状态
        xi: 频率向量
        check_ellipticity: 是否检查 (II,II) 块的椭圆性

    Returns:
        n × n 矩阵
    """
    U = system.check_admissible(U)
    tensor = system.viscosity_symbol(U, xi)
    if np.any(tensor[:system.q, :] != 0.0):
        raise StructureError(f"{system.name}: 粘性矩阵首块行非零", witness=tensor[:system.q, :])
    if check_ellipticity:
        xi = np.asarray(xi, dtype=float)
        norm2 = float(xi @ xi)
        if norm2 > 0.0:
            block = system.natural_viscosity_symbol(U, xi)
            margin = float(np.min(np.linalg.eigvals(block).real)) / norm2
            if margin <= 0.0:
                raise StructureError(f"{system.name}: (II,II) 块在 ξ={xi.tolist()} 处不椭圆 (θ={margin:.3e})",
                                     witness=xi)
    return tensor


def sphere_directions(d: int, count: int) -> np.ndarray:
    """单位球面上的确定性采样方向"""
    if d == 1:
        return np.array([[1.0], [-1.0]] * max(1, count // 2))
    if d == 2:
        angles = 2.0 * np.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    # Fibonacci 球面
    idx = np.arange(count) + 0.5
    polar = np.arccos(1.0 - 2.0 * idx / count)
    azimuth = np.pi * (1.0 + 5.0 ** 0.5) * idx
    base = np.column_stack([np.cos(polar), np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth)])
    if d == 3:
        return base
    out = np.zeros((count, d))
    out[:, :3] = base
    return out


@dataclass
class HyperbolicityReport:
    """双曲性报告"""
    real_semisimple: bool
    constant_multiplicity: bool
    eigenvalue_fields: List[List[float]] = field(default_factory=list)
    directions: List[List[float]] = field(default_factory=list)
    multiplicity_patterns: List[Tuple[int, ...]] = field(default_factory=list)
    max_condition: float = 0.0

    def to_dict(self) -> dict:
        return {
            "real_semisimple": self.real_semisimple,
            "constant_multiplicity": self.constant_multiplicity,
            "multiplicity_pattern": list(self.multiplicity_patterns[0]) if self.multiplicity_patterns else [],
            "max_condition": self.max_condition,
        }


def hyperbolicity_report(system: SystemDefinition, U: np.ndarray, sample_count: int = 32) -> HyperbolicityReport:
    """
    检查 A(ξ) 在单位球面采样方向上的实可对角化性与重数模式

    Args:
        system: 守恒律系统
        U: 状态
        sample_count: 采样方向数（至少 16）

    Returns:
        HyperbolicityReport
    """
    U = system.check_admissible(U)
    sample_count = max(16, int(sample_count))
    directions = sphere_directions(system.d, sample_count)
    real_semisimple = True
    patterns: List[Tuple[int, ...]] = []
    fields: List[List[float]] = []
    max_cond = 0.0
    for xi in directions:
        matrix = system.symbol(U, xi)
        scale = max(1.0, float(np.linalg.norm(matrix)))
        values, _, cond = eigenvector_condition(matrix)
        max_cond = max(max_cond, cond)
        if np.max(np.abs(values.imag)) > 1e-10 * scale or cond >= 1e8:
            real_semisimple = False
        clusters = cluster_values(values.real, 1e-8 * scale)
        patterns.append(tuple(len(c) for c in clusters))
        fields.append(sorted(values.real.tolist()))
    constant = all(p == patterns[0] for p in patterns)
    logger.debug("%s 双曲性检查: 实可对角化=%s 重数恒定=%s", system.name, real_semisimple, constant)
    return HyperbolicityReport(
        real_semisimple=real_semisimple,
        constant_multiplicity=constant,
        eigenvalue_fields=fields,
        directions=directions.tolist(),
        multiplicity_patterns=patterns,
        max_condition=max_cond,
    )
