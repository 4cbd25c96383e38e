from __future__ import annotations

import logging
from dataclasses import dataclass
from timeit import default_timer as timer
from typing import TYPE_CHECKING

import numpy as np

from bsmu.almostproduct.geometry import tensor
from bsmu.almostproduct.geometry.connection import covariant_derivative, curvature
from bsmu.almostproduct.geometry.tensor import Tensor, compose_P, contract, rearranged
from bsmu.almostproduct.structure.classification import (
    DEFAULT_CLASSIFICATION_TOL, compute_F, require_w3, square_norm_nabla_P)
from bsmu.almostproduct.structure.natural import canonical_connection

if TYPE_CHECKING:
    from bsmu.almostproduct.geometry.connection import Connection
    from bsmu.almostproduct.geometry.frame import FrameManifold
    from bsmu.almostproduct.structure.natural import ConnectionPair


PARALLEL_TOL = 1e-10


@dataclass(frozen=True)
class CurvatureLikeDefects:
    antisymmetry_xy: float
    antisymmetry_zw: float
    bianchi: float
    p_invariance: float | None = None

    def is_curvature_like(self, tol: float) -> bool:
        return max(self.antisymmetry_xy, self.antisymmetry_zw, self.bianchi) <= tol

    def is_p_tensor(self, tol: float) -> bool:
        return self.is_curvature_like(tol) and self.p_invariance is not None and self.p_invariance <= tol


@dataclass(frozen=True)
class CurvatureSummary:
    R: Tensor
    R_prime: Tensor
    rho: Tensor
    rho_prime: Tensor
    rho_star: Tensor
    tau: float
    tau_prime: float
    tau_star: float
    tau_star_star: float
    nabla_P_square_norm: float

    @property
    def scalar_gap(self) -> float:
        return self.tau_prime - self.tau


@dataclass(frozen=True)
class ParallelTorsionAnalysis:
    """
    Covariant derivatives of T, Q, F under the canonical connection and, when the torsion is parallel,
    the curvature and scalar relations that follow from it.
    Relation fields stay None while the torsion is not parallel.
    """
    norm_nabla_prime_T: float
    norm_nabla_prime_Q: float
    norm_nabla_prime_F: float
    norm_T: float
    parallel: bool
    curvature_from_torsion_defect: float | None = None
    curvature_with_F_defect: float | None = None
    ricci_contracted_defect: float | None = None
    ricci_defect: float | None = None
    scalar_defect: float | None = None
    q_contraction: float | None = None
    f_torsion_contraction: float | None = None
    nabla_P_square_norm: float = 0.
    tau_gap: float = 0.

    @property
    def simultaneous(self) -> bool:
        norms = (self.norm_nabla_prime_T, self.norm_nabla_prime_Q, self.norm_nabla_prime_F)
        vanishing = [value <= PARALLEL_TOL * max(1., self.norm_T) for value in norms]
        return all(vanishing) or not any(vanishing)

    @property
    def quarter_scalar_defect(self) -> float | None:
        if not self.parallel:
            return None
        return abs(self.tau_gap - self.nabla_P_square_norm / 4)


def ricci(R: Tensor, g_inv: np.ndarray) -> Tensor:
    """rho(y, z) = g^{ij} R(e_i, y, z, e_j)."""
    return contract(R, g_inv, 0, 3)


def scalar(rho: Tensor, g_inv: np.ndarray) -> float:
    return contract(rho, g_inv, 0, 1).scalar()


def associated_ricci(R: Tensor, P: np.ndarray, g_inv: np.ndarray) -> Tensor:
    """rho*(y, z) = g^{ij} R(e_i, y, z, Pe_j)."""
    return contract(compose_P(R, P, 3), g_inv, 0, 3)


def tau_star_star(R: Tensor, P: np.ndarray, g_inv: np.ndarray) -> float:
    """tau** = g^{ij} g^{ks} R(e_i, e_k, Pe_s, Pe_j)."""
    substituted = compose_P(compose_P(R, P, 2), P, 3)
    return scalar(contract(substituted, g_inv, 0, 3), g_inv)


def curvature_of(connection: Connection, manifold: FrameManifold) -> Tensor:
    return curvature(connection, manifold.structure_constants, manifold.g)


def q_pairing(Q: Tensor, g_inv: np.ndarray) -> Tensor:
    """G(x, y, z, w) = g(Q(x, w), Q(y, z))."""
    return tensor.einsum('xwa,ab,yzb->xyzw', Q, g_inv, Q)


def deformed_curvature(R: Tensor, Q: Tensor, nabla: Connection, g_inv: np.ndarray) -> Tensor:
    """
    Curvature of nabla + Q for a metric deformation:
    R(x, y, z, w) + (nabla_x Q)(y, z, w) - (nabla_y Q)(x, z, w) - g(Q(x, w), Q(y, z)) + g(Q(y, w), Q(x, z)).
    """
    DQ = covariant_derivative(nabla, Q)
    pairing = q_pairing(Q, g_inv)
    return R + DQ - rearranged(DQ, 'y,x,z,w') - pairing + rearranged(pairing, 'y,x,z,w')


def deformed_ricci(rho: Tensor, Q: Tensor, nabla: Connection, g_inv: np.ndarray) -> Tensor:
    """rho(y, z) + g^{ij} (nabla_{e_i} Q)(y, z, e_j) + g^{ij} g(Q(y, e_j), Q(e_i, z))."""
    DQ = covariant_derivative(nabla, Q)
    derivative_term = tensor.einsum('iyzj,ij->yz', DQ, g_inv)
    product_term = tensor.einsum('yja,ab,izb,ij->yz', Q, g_inv, Q, g_inv)
    return rho + derivative_term + product_term


def crossed_q_contraction(Q: Tensor, g_inv: np.ndarray) -> float:
    """g^{ij} g^{ks} g(Q(e_k, e_j), Q(e_i, e_s))."""
    return tensor.einsum('kja,ab,isb,ij,ks->', Q, g_inv, Q, g_inv, g_inv).scalar()


def full_q_contraction(Q: Tensor, g_inv: np.ndarray) -> float:
    """g^{ij} g^{ks} g(Q(e_j, e_s), Q(e_i, e_k)), the squared norm of Q."""
    return tensor.norm_sq(Q, g_inv)


def nabla_P_auxiliary(F: Tensor, P: np.ndarray) -> Tensor:
    """A(j, k, .) = -(nabla_{e_j} P) P e_k + (nabla_{P e_j} P) e_k - 2 (nabla_{e_k} P) P e_j, lowered."""
    return (-rearranged(F, 'x,Py,z', P) + rearranged(F, 'Px,y,z', P) - 2 * rearranged(F, 'y,Px,z', P))


def auxiliary_contraction(F: Tensor, P: np.ndarray, g_inv: np.ndarray) -> float:
    """1/16 g^{ij} g^{ks} g(A_{jk}, A_{si})."""
    A = nabla_P_auxiliary(F, P)
    return tensor.einsum('jka,ab,sib,ij,ks->', A, g_inv, A, g_inv, g_inv).scalar() / 16


def is_curvature_like(L: Tensor) -> CurvatureLikeDefects:
    return CurvatureLikeDefects(
        antisymmetry_xy=(L + rearranged(L, 'y,x,z,w')).max_abs(),
        antisymmetry_zw=(L + rearranged(L, 'x,y,w,z')).max_abs(),
        bianchi=tensor.cyclic_sum_first3(L).max_abs(),
    )


def is_p_tensor(L: Tensor, P: np.ndarray) -> CurvatureLikeDefects:
    defects = is_curvature_like(L)
    return CurvatureLikeDefects(
        antisymmetry_xy=defects.antisymmetry_xy,
        antisymmetry_zw=defects.antisymmetry_zw,
        bianchi=defects.bianchi,
        p_invariance=(rearranged(L, 'x,y,Pz,Pw', P) - L).max_abs(),
    )


def torsion_bianchi_expression(pair: ConnectionPair, g_inv: np.ndarray) -> Tensor:
    """S_{x,y,z} {(nabla'_x T)(y, z, w) + T(T(x, y), z, w)}."""
    T = pair.T
    DT = covariant_derivative(pair.nabla_prime, T)
    T_of_T = tensor.einsum('xya,ab,bzw->xyzw', T, g_inv, T)
    return tensor.cyclic_sum_first3(DT + T_of_T)


def bianchi_defect_prime(manifold: FrameManifold, tol: float = DEFAULT_CLASSIFICATION_TOL,
                         pair: ConnectionPair | None = None) -> float:
    F = compute_F(manifold)
    require_w3(F, tol)
    pair = canonical_connection(manifold, tol) if pair is None else pair
    return torsion_bianchi_expression(pair, manifold.g_inv).max_abs()


def p_tensor_pairing(F: Tensor, P: np.ndarray, g_inv: np.ndarray) -> Tensor:
    """g((nabla_x P) P z + (nabla_{Px} P) z, (nabla_{Py} P) w - (nabla_y P) P w) as a tensor in (x, z, y, w)."""
    left = rearranged(F, 'x,Py,z', P) + rearranged(F, 'Px,y,z', P)
    right = rearranged(F, 'Px,y,z', P) - rearranged(F, 'x,Py,z', P)
    return tensor.einsum('xza,ab,ywb->xzyw', left, g_inv, right)


def thm52_check(manifold: FrameManifold, tol: float = DEFAULT_CLASSIFICATION_TOL) -> float:
    """Max-abs value of the pairing that must vanish when the canonical curvature is a P-tensor."""
    F = compute_F(manifold)
    require_w3(F, tol)
    return p_tensor_pairing(F, manifold.P, manifold.g_inv).max_abs()


def curvature_summary(manifold: FrameManifold, pair: ConnectionPair | None = None,
                      tol: float = DEFAULT_CLASSIFICATION_TOL) -> CurvatureSummary:
    start = timer()
    pair = canonical_connection(manifold, tol) if pair is None else pair
    g_inv = manifold.g_inv
    R = curvature_of(pair.nabla, manifold)
    R_prime = curvature_of(pair.nabla_prime, manifold)
    rho = ricci(R, g_inv)
    rho_prime = ricci(R_prime, g_inv)
    rho_star = associated_ricci(R, manifold.P, g_inv)
    summary = CurvatureSummary(
        R=R,
        R_prime=R_prime,
        rho=rho,
        rho_prime=rho_prime,
        rho_star=rho_star,
        tau=scalar(rho, g_inv),
        tau_prime=scalar(rho_prime, g_inv),
        tau_star=scalar(rho_star, g_inv),
        tau_star_star=tau_star_star(R, manifold.P, g_inv),
        nabla_P_square_norm=square_norm_nabla_P(manifold),
    )
    logging.debug(f'Curvature summary of {manifold.name!r} time: {timer() - start}')
    return summary


def parallel_torsion_analysis(manifold: FrameManifold, tol: float = PARALLEL_TOL,
                              pair: ConnectionPair | None = None,
                              summary: CurvatureSummary | None = None) -> ParallelTorsionAnalysis:
    F = compute_F(manifold)
    require_w3(F, DEFAULT_CLASSIFICATION_TOL)
    pair = canonical_connection(manifold) if pair is None else pair
    summary = curvature_summary(manifold, pair) if summary is None else summary
    nabla_prime = pair.nabla_prime
    g_inv = manifold.g_inv
    P = manifold.P
    T = pair.T
    Q = pair.Q

    norm_T = T.max_abs()
    norm_nabla_prime_T = covariant_derivative(nabla_prime, T).max_abs()
    parallel = norm_nabla_prime_T <= tol * max(1., norm_T)
    analysis = dict(
        norm_nabla_prime_T=norm_nabla_prime_T,
        norm_nabla_prime_Q=covariant_derivative(nabla_prime, Q).max_abs(),
        norm_nabla_prime_F=covariant_derivative(nabla_prime, F).max_abs(),
        norm_T=norm_T,
        parallel=parallel,
        nabla_P_square_norm=summary.nabla_P_square_norm,
        tau_gap=summary.scalar_gap,
    )
    if not parallel:
        return ParallelTorsionAnalysis(**analysis)

    R, R_prime = summary.R, summary.R_prime
    pairing = q_pairing(Q, g_inv)
    # Q(T(x, y), z, w)
    Q_of_T = tensor.einsum('xya,ab,bzw->xyzw', T, g_inv, Q)
    curvature_from_torsion = R + Q_of_T + pairing - rearranged(pairing, 'y,x,z,w')

    # g(Q(z, w), T(x, y)) - g((nabla_{Pw} P) z, T(x, y))
    Q_T = tensor.einsum('zwa,ab,xyb->xyzw', Q, g_inv, T)
    F_T = tensor.einsum('wza,ab,xyb->xyzw', compose_P(F, P, 0), g_inv, T)
    curvature_with_F = R + pairing - rearranged(pairing, 'y,x,z,w') + Q_T - F_T

    rho = summary.rho
    # g^{ij} g(Q(e_i, z), Q(y, e_j)), g^{ij} g(Q(z, e_j), T(e_i, y)), g^{ij} g((nabla_{Pe_j} P) z, T(e_i, y))
    qq = tensor.einsum('iza,ab,yjb,ij->yz', Q, g_inv, Q, g_inv)
    qt = tensor.einsum('zja,ab,iyb,ij->yz', Q, g_inv, T, g_inv)
    ft = tensor.einsum('jza,ab,iyb,ij->yz', compose_P(F, P, 0), g_inv, T, g_inv)
    ricci_contracted = rho - qq + qt - ft

    # g^{ij} g(Q(e_j, z), Q(e_i, y)), g^{ij} g((nabla_{Pz} P) e_j, T(e_i, y))
    qq_sym = tensor.einsum('jza,ab,iyb,ij->yz', Q, g_inv, Q, g_inv)
    f_pz = tensor.einsum('zja,ab,iyb,ij->yz', compose_P(F, P, 0), g_inv, T, g_inv)
    ricci_relation = rho - qq_sym + f_pz

    q_contraction = full_q_contraction(Q, g_inv)
    f_torsion_contraction = tensor.einsum(
        'sja,ab,ikb,ij,ks->', compose_P(F, P, 0), g_inv, T, g_inv, g_inv).scalar()
    scalar_relation = summary.tau - q_contraction + f_torsion_contraction

    analysis.update(
        curvature_from_torsion_defect=(R_prime - curvature_from_torsion).max_abs(),
        curvature_with_F_defect=(R_prime - curvature_with_F).max_abs(),
        ricci_contracted_defect=(summary.rho_prime - ricci_contracted).max_abs(),
        ricci_defect=(summary.rho_prime - ricci_relation).max_abs(),
        scalar_defect=abs(summary.tau_prime - scalar_relation),
        q_contraction=q_contraction,
        f_torsion_contraction=f_torsion_contraction,
    )
    return ParallelTorsionAnalysis(**analysis)
