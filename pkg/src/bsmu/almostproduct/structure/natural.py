from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from bsmu.almostproduct.core.errors import DegreeMismatch, NotTorsionLike
from bsmu.almostproduct.geometry.connection import (
    Connection, covariant_derivative, derivative_of_endomorphism, levi_civita)
from bsmu.almostproduct.geometry.tensor import Tensor, rearranged
from bsmu.almostproduct.structure.classification import (
    DEFAULT_CLASSIFICATION_TOL, compute_F, cyclic_F, cyclic_tolerance, levi_civita_of, require_w3)

if TYPE_CHECKING:
    from bsmu.almostproduct.geometry.frame import FrameManifold


TORSION_LIKE_TOL = 1e-12
NATURALITY_TOL = 1e-10


@dataclass(frozen=True)
class TorsionDecomposition:
    p1: Tensor
    p2: Tensor
    p3: Tensor
    p4: Tensor
    residual: float

    @property
    def components(self) -> tuple[Tensor, Tensor, Tensor, Tensor]:
        return self.p1, self.p2, self.p3, self.p4


@dataclass(frozen=True)
class NaturalityDefects:
    """Max-abs defects of nabla' g = 0, nabla' P = 0, nabla' g~ = 0 and of the equivalent conditions on Q."""
    nabla_g: float
    nabla_P: float
    nabla_associated_metric: float
    eq35: float
    eq36: float
    tol: float = NATURALITY_TOL

    @property
    def is_natural(self) -> bool:
        return max(self.nabla_g, self.nabla_P) <= self.tol

    @property
    def q_conditions_hold(self) -> bool:
        return max(self.eq35, self.eq36) <= self.tol

    @property
    def criteria_agree(self) -> bool:
        return self.is_natural == self.q_conditions_hold


@dataclass(frozen=True)
class CanonicalDefects:
    cyclic_condition: float
    p2: float
    p4: float
    tol: float = NATURALITY_TOL

    @property
    def is_canonical(self) -> bool:
        return self.cyclic_condition <= self.tol

    @property
    def projections_vanish(self) -> bool:
        return max(self.p2, self.p4) <= self.tol

    @property
    def criteria_agree(self) -> bool:
        return self.is_canonical == self.projections_vanish


@dataclass(frozen=True)
class ConnectionPair:
    nabla: Connection
    nabla_prime: Connection
    Q: Tensor
    T: Tensor
    route_difference: float | None = None


def phi_direct(manifold: FrameManifold) -> Tensor:
    """Phi(x, y, z) = g(nabla~_x y - nabla_x y, z), nabla~ the Levi-Civita connection of g~."""
    nabla_assoc = levi_civita(manifold.structure_constants, manifold.associated_metric, 'levi-civita-associated')
    return nabla_assoc.difference(levi_civita_of(manifold), manifold.g)


def phi_from_F(F: Tensor, P: np.ndarray) -> Tensor:
    """Phi(x, y, z) = 1/2 {-F(Pz, x, y) + F(x, y, Pz) + F(y, Pz, x)}."""
    return 0.5 * (-rearranged(F, 'Pz,x,y', P) + rearranged(F, 'x,y,Pz', P) + rearranged(F, 'y,Pz,x', P))


def f_from_phi(phi: Tensor, P: np.ndarray) -> Tensor:
    """F(x, y, z) = Phi(x, y, Pz) + Phi(x, z, Py)."""
    return rearranged(phi, 'x,y,Pz', P) + rearranged(phi, 'x,z,Py', P)


def phi_from_F_w3(F: Tensor, P: np.ndarray) -> Tensor:
    """On W3: Phi(x, y, z) = -F(x, Py, z) - F(y, Px, z)."""
    return -rearranged(F, 'x,Py,z', P) - rearranged(F, 'y,Px,z', P)


def phi_from_F_w3_short(F: Tensor, P: np.ndarray) -> Tensor:
    """On W3: Phi(x, y, z) = -F(Pz, x, y)."""
    return -rearranged(F, 'Pz,x,y', P)


def require_torsion_like(T: Tensor, tol: float = TORSION_LIKE_TOL):
    if T.degree != 3:
        raise DegreeMismatch(f'Torsion-type tensors have degree 3, got degree {T.degree}')
    defect = (T + rearranged(T, 'y,x,z')).max_abs()
    if defect > tol:
        raise NotTorsionLike(f'T(x, y, z) + T(y, x, z) has max component {defect:.3e}')


def project_torsion(T: Tensor, P: np.ndarray) -> TorsionDecomposition:
    """Split a torsion-type tensor into its four components along the invariant orthogonal subspaces."""
    require_torsion_like(T)

    def r(signature: str) -> Tensor:
        return rearranged(T, signature, P)

    base = 2 * T + r('Px,Py,z') * -2
    mixed = (r('y,z,x') + r('z,x,y') + r('Pz,x,Py') - r('Py,z,Px') - r('z,Px,Py')
             - r('Py,Pz,x') - r('Pz,Px,y') + r('y,Pz,Px'))
    p1 = (base - mixed) / 8
    p2 = (base + mixed) / 8
    p3 = (T + r('Px,Py,z') - r('Px,y,Pz') - r('x,Py,Pz')) / 4
    p4 = (T + r('Px,Py,z') + r('Px,y,Pz') + r('x,Py,Pz')) / 4
    residual = (T - p1 - p2 - p3 - p4).max_abs()
    return TorsionDecomposition(p1, p2, p3, p4, residual)


def deformation_of(connection: Connection, manifold: FrameManifold) -> Tensor:
    """Lowered Q of the transformation nabla -> |connection|."""
    return connection.difference(levi_civita_of(manifold), manifold.g)


def torsion_of(connection: Connection, manifold: FrameManifold) -> Tensor:
    return connection.torsion(manifold.structure_constants, manifold.g)


def is_natural(connection: Connection, manifold: FrameManifold, F: Tensor | None = None,
               tol: float = NATURALITY_TOL) -> NaturalityDefects:
    F = compute_F(manifold) if F is None else F
    P = manifold.P
    Q = deformation_of(connection, manifold)
    return NaturalityDefects(
        nabla_g=covariant_derivative(connection, Tensor(manifold.g)).max_abs(),
        nabla_P=derivative_of_endomorphism(connection, P, manifold.g).max_abs(),
        nabla_associated_metric=covariant_derivative(connection, Tensor(manifold.associated_metric.g)).max_abs(),
        eq35=(F - rearranged(Q, 'x,y,Pz', P) + rearranged(Q, 'x,Py,z', P)).max_abs(),
        eq36=(Q + rearranged(Q, 'x,z,y')).max_abs(),
        tol=tol,
    )


def canonical_condition(T: Tensor, P: np.ndarray) -> Tensor:
    """T(x, y, z) + T(y, z, x) + T(Px, y, Pz) + T(y, Pz, Px), zero exactly for the canonical connection."""
    return T + rearranged(T, 'y,z,x') + rearranged(T, 'Px,y,Pz', P) + rearranged(T, 'y,Pz,Px', P)


def is_canonical(T: Tensor, P: np.ndarray, tol: float = NATURALITY_TOL) -> CanonicalDefects:
    decomposition = project_torsion(T, P)
    return CanonicalDefects(
        cyclic_condition=canonical_condition(T, P).max_abs(),
        p2=decomposition.p2.max_abs(),
        p4=decomposition.p4.max_abs(),
        tol=tol,
    )


def canonical_q_from_phi(phi: Tensor, P: np.ndarray) -> Tensor:
    """Q(x, y, z) = 1/4 {Phi(x, y, z) - 2 Phi(z, x, y) - Phi(x, Py, Pz)}."""
    return (phi - 2 * rearranged(phi, 'z,x,y') - rearranged(phi, 'x,Py,Pz', P)) / 4


def torsion_from_phi(phi: Tensor, P: np.ndarray) -> Tensor:
    """
    Torsion of the canonical connection in terms of Phi, the antisymmetrization of |canonical_q_from_phi|:
    T(x, y, z) = 1/2 {Phi(z, y, x) - Phi(z, x, y)} + 1/4 {Phi(y, Px, Pz) - Phi(x, Py, Pz)}.
    """
    return ((rearranged(phi, 'z,y,x') - rearranged(phi, 'z,x,y')) / 2
            + (rearranged(phi, 'y,Px,Pz', P) - rearranged(phi, 'x,Py,Pz', P)) / 4)


def q_from_F(F: Tensor, P: np.ndarray, tol: float = DEFAULT_CLASSIFICATION_TOL) -> Tensor:
    """On W3: Q(x, y, z) = -1/4 {F(y, Px, z) - F(Py, x, z) + 2 F(x, Py, z)}."""
    require_w3(F, tol)
    return -(rearranged(F, 'y,Px,z', P) - rearranged(F, 'Py,x,z', P) + 2 * rearranged(F, 'x,Py,z', P)) / 4


def torsion_from_F(F: Tensor, P: np.ndarray, tol: float = DEFAULT_CLASSIFICATION_TOL) -> Tensor:
    """On W3: T(x, y, z) = -1/2 {F(x, Py, z) + F(Px, y, z)}."""
    require_w3(F, tol)
    return -(rearranged(F, 'x,Py,z', P) + rearranged(F, 'Px,y,z', P)) / 2


def f_from_torsion(T: Tensor, P: np.ndarray) -> Tensor:
    """F(x, y, z) = T(x, z, Py) - T(x, Py, z) for the canonical torsion on W3."""
    return rearranged(T, 'x,z,Py', P) - rearranged(T, 'x,Py,z', P)


def hayden_q_from_T(T: Tensor) -> Tensor:
    """Deformation tensor of a metric connection from its torsion: Q = 1/2 {T(x, y, z) - T(y, z, x) + T(z, x, y)}."""
    require_torsion_like(T)
    return (T - rearranged(T, 'y,z,x') + rearranged(T, 'z,x,y')) / 2


def natural_connection_from_Q(manifold: FrameManifold, Q: Tensor, name: str = 'natural') -> Connection:
    return levi_civita_of(manifold).deformed(Q, manifold.g_inv, name)


def natural_perturbation(raw: Tensor, P: np.ndarray) -> Tensor:
    """
    Project an arbitrary degree 3 tensor onto deformations that keep a natural connection natural:
    skew in the last two arguments and invariant under (y, z) -> (Py, Pz).
    """
    skew = (raw - rearranged(raw, 'x,z,y')) / 2
    return (skew + rearranged(skew, 'x,Py,Pz', P)) / 2


def canonical_connection(manifold: FrameManifold, tol: float = DEFAULT_CLASSIFICATION_TOL) -> ConnectionPair:
    """
    Canonical connection built from Phi. On W3 the construction from F is computed too,
    and |route_difference| is the max-abs gap between the two deformation tensors.
    """
    nabla = levi_civita_of(manifold)
    P = manifold.P
    Q = canonical_q_from_phi(phi_direct(manifold), P)
    nabla_prime = nabla.deformed(Q, manifold.g_inv, 'canonical')

    F = compute_F(manifold)
    route_difference = None
    cyclic_norm = cyclic_F(F).max_abs()
    if cyclic_norm <= cyclic_tolerance(F.max_abs(), tol):
        route_difference = (Q - q_from_F(F, P, tol)).max_abs()
    else:
        logging.debug(f'Skipping the F-route of the canonical connection: |S F| = {cyclic_norm:.3e}')

    return ConnectionPair(
        nabla=nabla,
        nabla_prime=nabla_prime,
        Q=Q,
        T=torsion_of(nabla_prime, manifold),
        route_difference=route_difference,
    )
