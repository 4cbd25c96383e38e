from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from bsmu.almostproduct.core.errors import DimensionMismatch, NonFiniteComponents
from bsmu.almostproduct.geometry.tensor import Tensor

if TYPE_CHECKING:
    from bsmu.almostproduct.geometry.frame import FrameManifold, MetricPair, StructureConstants


@dataclass(frozen=True, eq=False)
class Connection:
    """Left-invariant linear connection: nabla_{e_i} e_j = sum_k gamma[i, j, k] e_k."""
    gamma: np.ndarray
    name: str = ''

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=np.float64)
        if gamma.ndim != 3 or len(set(gamma.shape)) != 1:
            raise DimensionMismatch(f'Connection coefficients must be a cube, got shape {gamma.shape}')
        if not np.all(np.isfinite(gamma)):
            raise NonFiniteComponents('Connection coefficients contain NaN or infinity')
        gamma.setflags(write=False)
        object.__setattr__(self, 'gamma', gamma)

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def lowered(self, g: np.ndarray) -> np.ndarray:
        """gamma_low[i, j, l] = g(nabla_{e_i} e_j, e_l)."""
        return self.gamma @ g

    def deformed(self, Q: Tensor, g_inv: np.ndarray, name: str = '') -> Connection:
        """nabla + Q, with Q given lowered: Q[x, y, z] = g(Q(x, y), z)."""
        return Connection(self.gamma + Q.components @ g_inv, name)

    def difference(self, other: Connection, g: np.ndarray) -> Tensor:
        """Lowered difference tensor g(nabla_x y - other_x y, z)."""
        return Tensor((self.gamma - other.gamma) @ g)

    def torsion(self, structure: StructureConstants, g: np.ndarray) -> Tensor:
        """T[x, y, z] = g(nabla_x y - nabla_y x - [x, y], z)."""
        gamma = self.gamma
        return Tensor((gamma - gamma.transpose(1, 0, 2) - structure.C) @ g)


def levi_civita(structure: StructureConstants, metric: MetricPair, name: str = 'levi-civita') -> Connection:
    """Koszul formula for constant metric coefficients (any signature)."""
    C_low = structure.lowered(metric.g)
    gamma_low = 0.5 * (C_low
                       - np.einsum('jli->ijl', C_low)
                       + np.einsum('lij->ijl', C_low))
    return Connection(gamma_low @ metric.g_inv, name)


def injected(manifold: FrameManifold, gamma: np.ndarray, name: str = 'injected') -> Connection:
    """Raw connection coefficients supplied by the caller instead of the Koszul formula."""
    connection = Connection(gamma, name)
    if connection.dim != manifold.dim:
        raise DimensionMismatch(f'Connection of dimension {connection.dim} for a manifold of dimension {manifold.dim}')
    return connection


def covariant_derivative(connection: Connection, t: Tensor) -> Tensor:
    """
    (nabla t)(v, x_1, ..., x_k) = (nabla_v t)(x_1, ..., x_k) for a left-invariant covariant tensor.
    Constant components give (nabla_v t)(x_1, ...) = -sum_s t(..., nabla_v x_s, ...).
    """
    if connection.dim != t.dim:
        raise DimensionMismatch(f'Connection of dimension {connection.dim} applied to a tensor of dimension {t.dim}')
    gamma = connection.gamma
    result = np.zeros((t.dim,) * (t.degree + 1))
    for slot in range(t.degree):
        # gamma[i, j, m] t[..., m, ...] with m in |slot|, the new axis j lands at 1 + slot
        term = np.tensordot(gamma, t.components, axes=([2], [slot]))
        result -= np.moveaxis(term, 1, 1 + slot)
    return Tensor(result, t.dim)


def derivative_of_endomorphism(connection: Connection, A: np.ndarray, g: np.ndarray) -> Tensor:
    """Lowered g((nabla_{e_i} A) e_j, e_k) for a constant endomorphism A[a, b] = A^a_b."""
    gamma = connection.gamma
    # (nabla_i A) e_j = nabla_i (A e_j) - A nabla_i e_j
    derivative = np.einsum('bj,iba->ija', A, gamma) - np.einsum('ijm,am->ija', gamma, A)
    return Tensor(derivative @ g)


def curvature(connection: Connection, structure: StructureConstants, g: np.ndarray) -> Tensor:
    """
    R[x, y, z, w] = g(R(x, y) z, w) with
    R(x, y) z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x, y] z.
    """
    gamma = connection.gamma
    C = structure.C
    R_up = (np.einsum('jkm,imp->ijkp', gamma, gamma)
            - np.einsum('ikm,jmp->ijkp', gamma, gamma)
            - np.einsum('ijm,mkp->ijkp', C, gamma))
    return Tensor(R_up @ g)


def nabla_P(manifold: FrameManifold, connection: Connection) -> Tensor:
    """F[x, y, z] = g((nabla_x P) y, z), from the derivative of the lowered P."""
    return covariant_derivative(connection, Tensor(manifold.P_low))
