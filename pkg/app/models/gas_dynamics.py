"""可压缩气体动力学模型 - 等熵 p-系统与 Navier–Stokes 方程"""
import logging
from abc import ABC, abstractmethod
from typing import List, Optional

import numpy as np

from app.models.base import SymmetricForm, SystemDefinition
from app.utils.errors import InadmissibleStateError

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# 状态方程
# ---------------------------------------------------------------------------

class EquationOfState(ABC):
    """状态方程 p(ρ,T)、e(ρ,T) 及其偏导数"""

    name = "eos"

    @abstractmethod
    def pressure(self, rho: float, T: float) -> float: ...

    @abstractmethod
    def p_rho(self, rho: float, T: float) -> float: ...

    @abstractmethod
    def p_T(self, rho: float, T: float) -> float: ...

    @abstractmethod
    def energy(self, rho: float, T: float) -> float: ...

    @abstractmethod
    def e_rho(self, rho: float, T: float) -> float: ...

    @abstractmethod
    def e_T(self, rho: float, T: float) -> float: ...

    @abstractmethod
    def temperature(self, rho: float, e: float) -> float:
        """由比内能反解温度"""

    @abstractmethod
    def entropy(self, rho: float, T: float) -> float: ...

    def is_admissible(self, rho: float, T: float) -> bool:
        return rho > 0.0 and T > 0.0

    def sound_speed_squared(self, rho: float, T: float) -> float:
        """c² = p_ρ + T p_T² / (ρ² e_T)"""
        return self.p_rho(rho, T) + T * self.p_T(rho, T) ** 2 / (rho * rho * self.e_T(rho, T))


class IdealGas(EquationOfState):
    """理想气体 p = ρRT，e = c_v T，R = (γ − 1) c_v"""

    name = "ideal"

    def __init__(self, gamma: float = 1.4, cv: float = 1.0):
        self.gamma = float(gamma)
        self.cv = float(cv)
        self.R = (self.gamma - 1.0) * self.cv

    def pressure(self, rho, T):
        return rho * self.R * T

    def p_rho(self, rho, T):
        return self.R * T

    def p_T(self, rho, T):
        return rho * self.R

    def energy(self, rho, T):
        return self.cv * T

    def e_rho(self, rho, T):
        return 0.0

    def e_T(self, rho, T):
        return self.cv

    def temperature(self, rho, e):
        return e / self.cv

    def entropy(self, rho, T):
        return self.cv * np.log(T) - self.R * np.log(rho)


class VanDerWaalsGas(EquationOfState):
    """van der Waals 气体 p = ρRT/(1 − bρ) − aρ²，e = c_v T − aρ"""

    name = "van_der_waals"

    def __init__(self, a: float = 3.0, b: float = 1.0 / 3.0, gas_constant: float = 1.0, cv: float = 1.0):
        self.a = float(a)
        self.b = float(b)
        self.R = float(gas_constant)
        self.cv = float(cv)

    def pressure(self, rho, T):
        return rho * self.R * T / (1.0 - self.b * rho) - self.a * rho * rho

    def p_rho(self, rho, T):
        return self.R * T / (1.0 - self.b * rho) ** 2 - 2.0 * self.a * rho

    def p_T(self, rho, T):
        return rho * self.R / (1.0 - self.b * rho)

    def energy(self, rho, T):
        return self.cv * T - self.a * rho

    def e_rho(self, rho, T):
        return -self.a

    def e_T(self, rho, T):
        return self.cv

    def temperature(self, rho, e):
        return (e + self.a * rho) / self.cv

    def entropy(self, rho, T):
        return self.cv * np.log(T) + self.R * np.log(1.0 / rho - self.b)

    def is_admissible(self, rho, T):
        return rho > 0.0 and T > 0.0 and self.b * rho < 1.0

    def spinodal_temperature(self, rho: float) -> float:
        """p_ρ = 0 对应的温度"""
        return 2.0 * self.a * rho * (1.0 - self.b * rho) ** 2 / self.R


# ---------------------------------------------------------------------------
# 等熵气体（p-系统）
# ---------------------------------------------------------------------------

class IsentropicGas(SystemDefinition):
    """
    一维等熵可压缩 Navier–Stokes：U = (ρ, m)，W = (ρ, u)，p = κ_p ρ^γ，粘性作用于 u
    """

    name = "isentropic_gas"
    state_labels = ("rho", "m")
    natural_labels = ("rho", "u")

    def __init__(self, gamma: float = 1.4, kappa_p: float = 1.0, viscosity: float = 1.0):
        super().__init__(n=2, r=1, d=1)
        self.gamma = float(gamma)
        self.kappa_p = float(kappa_p)
        self.nu = float(viscosity)

    def pressure(self, rho: float) -> float:
        return self.kappa_p * rho ** self.gamma

    def dpressure(self, rho: float) -> float:
        return self.kappa_p * self.gamma * rho ** (self.gamma - 1.0)

    def sound_speed(self, U: np.ndarray) -> float:
        return float(np.sqrt(self.dpressure(float(U[0]))))

    def flux(self, U, j):
        rho, m = float(U[0]), float(U[1])
        return np.array([m, m * m / rho + self.pressure(rho)])

    def flux_jacobian(self, U, j):
        rho, m = float(U[0]), float(U[1])
        u = m / rho
        return np.array([[0.0, 1.0], [-u * u + self.dpressure(rho), 2.0 * u]])

    def to_natural(self, U):
        return np.array([U[0], U[1] / U[0]], dtype=float)

    def from_natural(self, W):
        return np.array([W[0], W[0] * W[1]], dtype=float)

    def natural_jacobian(self, U):
        rho, m = float(U[0]), float(U[1])
        return np.array([[1.0, 0.0], [-m / rho ** 2, 1.0 / rho]])

    def conserved_jacobian(self, W):
        rho, u = float(W[0]), float(W[1])
        return np.array([[1.0, 0.0], [u, rho]])

    def natural_viscosity(self, W, j, k):
        return np.array([[0.0], [self.nu]])

    def viscosity_derivative(self, U, j, k, v):
        # B = [[0, 0], [−ν m/ρ², ν/ρ]]
        rho, m = float(U[0]), float(U[1])
        drho, dm = float(v[0]), float(v[1])
        d_b10 = self.nu * (2.0 * m * drho / rho ** 3 - dm / rho ** 2)
        d_b11 = -self.nu * drho / rho ** 2
        return np.array([[0.0, 0.0], [d_b10, d_b11]])

    def is_admissible(self, U):
        return bool(np.all(np.isfinite(U)) and U[0] > 0.0)

    def symmetric_form(self, U):
        U = self.check_admissible(U)
        rho, u = self.to_natural(U)
        c2 = self.dpressure(rho)
        A0 = np.diag([c2 / rho, rho])
        A1 = np.array([[c2 * u / rho, c2], [c2, rho * u]])
        Bjk = np.zeros((1, 1, 2, 2))
        Bjk[0, 0, 1, 1] = self.nu
        return SymmetricForm(A0=A0, Aj=(A1,), Bjk=Bjk, state=U,
                             change_of_variables=self.conserved_jacobian([rho, u]))

    def mach_state(self, W_minus: np.ndarray, mach: float) -> np.ndarray:
        """上游状态：ρ 取给定值，u₋ = M c₋"""
        rho = float(W_minus[0])
        return self.from_natural([rho, mach * np.sqrt(self.dpressure(rho))])

    def reference_states(self) -> List[np.ndarray]:
        return [self.from_natural([1.0, 0.5]), self.from_natural([2.0, -0.3])]

    def random_state(self, rng):
        return self.from_natural([rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0)])


# ---------------------------------------------------------------------------
# Navier–Stokes
# ---------------------------------------------------------------------------

class NavierStokes(SystemDefinition):
    """
    可压缩 Navier–Stokes 方程，d = 1, 2, 3

    守恒变量 U = (ρ, ρu, E)，自然变量 W = (ρ, u, T)，n = d + 2，r = d + 1。
    粘性应力 τ_ij = μ(∂_i u_j + ∂_j u_i) + λ δ_ij ∇·u，热传导系数 κ。
    """

    name = "navier_stokes"

    def __init__(self, d: int = 1, eos: Optional[EquationOfState] = None,
                 mu: float = 1.0, lam: float = 1.0, kappa: float = 1.0):
        d = int(d)
        super().__init__(n=d + 2, r=d + 1, d=d)
        self.eos = eos or IdealGas()
        self.mu = float(mu)
        self.lam = float(lam)
        self.kappa = float(kappa)
        axes = ["x", "y", "z"][:d]
        self.state_labels = ("rho",) + tuple(f"m_{a}" for a in axes) + ("E",)
        self.natural_labels = ("rho",) + tuple(f"u_{a}" for a in axes) + ("T",)

    # ---- 变量变换 ----
    def to_natural(self, U):
        U = np.asarray(U, dtype=float)
        rho = U[0]
        u = U[1:-1] / rho
        e = U[-1] / rho - 0.5 * float(u @ u)
        T = self.eos.temperature(rho, e)
        return np.concatenate([[rho], u, [T]])

    def from_natural(self, W):
        W = np.asarray(W, dtype=float)
        rho, u, T = W[0], W[1:-1], W[-1]
        E = rho * (self.eos.energy(rho, T) + 0.5 * float(u @ u))
        return np.concatenate([[rho], rho * u, [E]])

    def conserved_jacobian(self, W):
        W = np.asarray(W, dtype=float)
        d, eos = self.d, self.eos
        rho, u, T = W[0], W[1:-1], W[-1]
        e = eos.energy(rho, T)
        J = np.zeros((self.n, self.n))
        J[0, 0] = 1.0
        J[1:d + 1, 0] = u
        J[1:d + 1, 1:d + 1] = rho * np.eye(d)
        J[-1, 0] = e + 0.5 * float(u @ u) + rho * eos.e_rho(rho, T)
        J[-1, 1:d + 1] = rho * u
        J[-1, -1] = rho * eos.e_T(rho, T)
        return J

    def natural_jacobian(self, U):
        return np.linalg.inv(self.conserved_jacobian(self.to_natural(U)))

    # ---- 通量 ----
    def flux(self, U, j):
        W = self.to_natural(U)
        rho, u, T = W[0], W[1:-1], W[-1]
        p = self.eos.pressure(rho, T)
        U = np.asarray(U, dtype=float)
        out = U * u[j]
        out[1 + j] += p
        out[-1] += p * u[j]
        return out

    def natural_flux_jacobian(self, W: np.ndarray, j: int) -> np.ndarray:
        """∂F^j/∂W"""
        d, eos = self.d, self.eos
        rho, u, T = W[0], W[1:-1], W[-1]
        p = eos.pressure(rho, T)
        p_rho, p_T = eos.p_rho(rho, T), eos.p_T(rho, T)
        e = eos.energy(rho, T)
        E = rho * (e + 0.5 * float(u @ u))
        E_rho = e + 0.5 * float(u @ u) + rho * eos.e_rho(rho, T)
        E_T = rho * eos.e_T(rho, T)
        uj = u[j]
        ej = np.zeros(d)
        ej[j] = 1.0
        J = np.zeros((self.n, self.n))
        J[0, 0] = uj
        J[0, 1:d + 1] = rho * ej
        for i in range(d):
            J[1 + i, 0] = u[i] * uj + (p_rho if i == j else 0.0)
            J[1 + i, 1:d + 1] = rho * (np.eye(d)[i] * uj + u[i] * ej)
            J[1 + i, -1] = p_T if i == j else 0.0
        J[-1, 0] = (E_rho + p_rho) * uj
        J[-1, 1:d + 1] = rho * u * uj + (E + p) * ej
        J[-1, -1] = (E_T + p_T) * uj
        return J

    def flux_jacobian(self, U, j):
        W = self.to_natural(U)
        return np.linalg.solve(self.conserved_jacobian(W).T, self.natural_flux_jacobian(W, j).T).T

    # ---- 粘性 ----
    def stress_coefficient(self, j: int, k: int) -> np.ndarray:
        """(C^{jk})_{il} = λ δ_ij δ_kl + μ δ_jk δ_il + μ δ_ik δ_jl"""
        d = self.d
        C = np.zeros((d, d))
        C[j, k] += self.lam
        if j == k:
            C += self.mu * np.eye(d)
        C[k, j] += self.mu
        return C

    def natural_viscosity(self, W, j, k):
        d = self.d
        u = np.asarray(W, dtype=float)[1:-1]
        C = self.stress_coefficient(j, k)
        beta = np.zeros((self.n, self.r))
        beta[1:d + 1, :d] = C
        beta[-1, :d] = u @ C
        beta[-1, d] = self.kappa if j == k else 0.0
        return beta

    # ---- 状态空间 ----
    def is_admissible(self, U):
        U = np.asarray(U, dtype=float)
        if not np.all(np.isfinite(U)) or U[0] <= 0.0:
            return False
        W = self.to_natural(U)
        return bool(self.eos.is_admissible(W[0], W[-1]))

    def sound_speed(self, U: np.ndarray) -> float:
        W = self.to_natural(U)
        c2 = self.eos.sound_speed_squared(W[0], W[-1])
        return float(np.sqrt(max(c2, 0.0)))

    def entropy(self, U):
        W = self.to_natural(U)
        return float(self.eos.entropy(W[0], W[-1]))

    def symmetric_form(self, U):
        U = self.check_admissible(U)
        W = self.to_natural(U)
        d, eos = self.d, self.eos
        rho, u, T = W[0], W[1:-1], W[-1]
        p_rho, p_T, e_T = eos.p_rho(rho, T), eos.p_T(rho, T), eos.e_T(rho, T)
        if e_T <= 0.0:
            raise InadmissibleStateError(f"e_T = {e_T:.3e} ≤ 0，热力学不稳定", witness=W)
        symmetric = bool(p_rho > 0.0)
        # p_ρ ≤ 0 时连续性方程不加权，一阶对称性丢失
        w0 = p_rho / rho if symmetric else 1.0
        A0 = np.zeros((self.n, self.n))
        A0[0, 0] = w0
        A0[1:d + 1, 1:d + 1] = rho * np.eye(d)
        A0[-1, -1] = rho * e_T / T
        Aj = []
        for j in range(d):
            ej = np.eye(d)[j]
            A = np.zeros((self.n, self.n))
            A[0, 0] = w0 * u[j]
            A[0, 1:d + 1] = w0 * rho * ej
            A[1:d + 1, 0] = p_rho * ej
            A[1:d + 1, 1:d + 1] = rho * u[j] * np.eye(d)
            A[1:d + 1, -1] = p_T * ej
            A[-1, 1:d + 1] = p_T * ej
            A[-1, -1] = rho * e_T * u[j] / T
            Aj.append(A)
        Bjk = np.zeros((d, d, self.n, self.n))
        for j in range(d):
            for k in range(d):
                Bjk[j, k, 1:d + 1, 1:d + 1] = self.stress_coefficient(j, k)
                Bjk[j, k, -1, -1] = self.kappa / T if j == k else 0.0
        if not symmetric:
            logger.info("p_ρ = %.3e ≤ 0：返回非对称一阶形式", p_rho)
        return SymmetricForm(A0=A0, Aj=tuple(Aj), Bjk=Bjk, state=U,
                             change_of_variables=self.conserved_jacobian(W),
                             first_order_symmetric=symmetric)

    def mach_state(self, W_minus: np.ndarray, mach: float) -> np.ndarray:
        """上游状态：ρ、T 取给定值，法向速度 u₋ = M c₋，横向速度为零"""
        W = np.array(W_minus, dtype=float)
        W[1:-1] = 0.0
        W[1] = mach * np.sqrt(self.eos.sound_speed_squared(W[0], W[-1]))
        return self.from_natural(W)

    def normal_shock_guess(self, U_minus: np.ndarray) -> Optional[np.ndarray]:
        """理想气体正激波关系给出下游状态初值"""
        if not isinstance(self.eos, IdealGas):
            return None
        W = self.to_natural(U_minus)
        rho, u1, T = W[0], W[1], W[-1]
        g = self.eos.gamma
        c = np.sqrt(self.eos.sound_speed_squared(rho, T))
        M2 = (u1 / c) ** 2
        if M2 <= 1.0:
            return None
        ratio = (g + 1.0) * M2 / ((g - 1.0) * M2 + 2.0)
        p = self.eos.pressure(rho, T)
        p_plus = p * (1.0 + 2.0 * g / (g + 1.0) * (M2 - 1.0))
        rho_plus = rho * ratio
        W_plus = W.copy()
        W_plus[0] = rho_plus
        W_plus[1] = u1 / ratio
        W_plus[-1] = p_plus / (rho_plus * self.eos.R)
        return self.from_natural(W_plus)

    def reference_states(self) -> List[np.ndarray]:
        W1 = np.concatenate([[1.0], 0.5 * np.ones(self.d), [1.0]])
        W2 = np.concatenate([[1.5], -0.2 * np.ones(self.d), [2.0]])
        return [self.from_natural(W1), self.from_natural(W2)]

    def random_state(self, rng):
        if isinstance(self.eos, VanDerWaalsGas):
            rho = rng.uniform(0.2, 0.8 / self.eos.b)
            T = self.eos.spinodal_temperature(rho) * rng.uniform(1.2, 2.0)
        else:
            rho = rng.uniform(0.5, 2.0)
            T = rng.uniform(0.5, 2.0)
        W = np.concatenate([[rho], rng.uniform(-1.0, 1.0, self.d), [T]])
        return self.from_natural(W)
