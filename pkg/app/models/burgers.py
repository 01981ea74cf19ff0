"""Burgers 型标量守恒律"""
from typing import List, Optional, Sequence, Union

import numpy as np

from app.models.base import SymmetricForm, SystemDefinition


class Burgers(SystemDefinition):
    """
    标量粘性 Burgers 方程及其多维推广

    F⁰ = u²/2，F^j = c_j u (j ≥ 1)；B⁰⁰ = ν，B^{jj} = ν_T − κ(1 − u²) (j ≥ 1)。
    κ = 0 时为各向同性粘性；κ > 0 时横向粘性在 |u| < 1 的激波内部减弱。
    """

    name = "burgers"
    state_labels = ("u",)
    natural_labels = ("u",)

    def __init__(self, d: int = 1, viscosity: float = 1.0, transverse_viscosity: float = 1.0,
                 transverse_speed: Union[float, Sequence[float]] = 0.0, front_coupling: float = 0.0):
        super().__init__(n=1, r=1, d=int(d))
        self.nu = float(viscosity)
        self.nu_t = float(transverse_viscosity)
        self.kappa = float(front_coupling)
        speeds = np.broadcast_to(np.asarray(transverse_speed, dtype=float), (max(self.d - 1, 0),))
        self.transverse_speed = np.array(speeds, dtype=float)

    def transverse_coefficient(self, u: float) -> float:
        """横向粘性系数 ν_T − κ(1 − u²)"""
        return self.nu_t - self.kappa * (1.0 - u * u)

    def flux(self, U, j):
        u = float(U[0])
        if j == 0:
            return np.array([0.5 * u * u])
        return np.array([self.transverse_speed[j - 1] * u])

    def flux_jacobian(self, U, j):
        if j == 0:
            return np.array([[float(U[0])]])
        return np.array([[self.transverse_speed[j - 1]]])

    def natural_viscosity(self, W, j, k):
        if j != k:
            return np.zeros((1, 1))
        if j == 0:
            return np.array([[self.nu]])
        return np.array([[self.transverse_coefficient(float(W[0]))]])

    def viscosity_derivative(self, U, j, k, v):
        if j != k or j == 0:
            return np.zeros((1, 1))
        return np.array([[2.0 * self.kappa * float(U[0]) * float(v[0])]])

    def symmetric_form(self, U):
        U = np.asarray(U, dtype=float)
        Aj = tuple(self.flux_jacobian(U, j) for j in range(self.d))
        Bjk = np.zeros((self.d, self.d, 1, 1))
        for j in range(self.d):
            Bjk[j, j] = self.natural_viscosity(U, j, j)
        return SymmetricForm(A0=np.eye(1), Aj=Aj, Bjk=Bjk, state=U, change_of_variables=np.eye(1))

    def reference_states(self) -> List[np.ndarray]:
        return [np.array([1.0]), np.array([-1.0])]

    def random_state(self, rng):
        return rng.uniform(-2.0, 2.0, size=1)

    def exact_profile(self, x: np.ndarray, u_minus: float = 1.0, u_plus: float = -1.0,
                      x0: float = 0.0) -> Optional[np.ndarray]:
        """驻波解析解 ū = −a tanh(a(x − x0)/(2ν))，仅当 u₋ = −u₊ = a > 0"""
        if not np.isclose(u_minus, -u_plus) or u_minus <= 0:
            return None
        a = u_minus
        return -a * np.tanh(a * (np.asarray(x) - x0) / (2.0 * self.nu))
