from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from bsmu.almostproduct.core.errors import NotW3
from bsmu.almostproduct.geometry import tensor
from bsmu.almostproduct.geometry.connection import levi_civita, nabla_P
from bsmu.almostproduct.geometry.tensor import Tensor, rearranged

if TYPE_CHECKING:
    from bsmu.almostproduct.geometry.connection import Connection
    from bsmu.almostproduct.geometry.frame import FrameManifold


DEFAULT_CLASSIFICATION_TOL = 1e-9


class ClassLabel(Enum):
    W0 = 'W0'
    W3_STRICT = 'W3_strict'
    OUTSIDE_SCOPE = 'OUTSIDE_SCOPE'

    @property
    def is_w3(self) -> bool:
        return self in (ClassLabel.W0, ClassLabel.W3_STRICT)

    @property
    def display_name(self) -> str:
        return {
            ClassLabel.W0: 'Riemannian P-manifold',
            ClassLabel.W3_STRICT: 'strict W3 manifold',
            ClassLabel.OUTSIDE_SCOPE: 'outside W3',
        }[self]


@dataclass(frozen=True)
class Classification:
    class_label: ClassLabel
    norm_F: float
    norm_cyclic_F: float
    norm_N: float
    norm_N_star: float
    nabla_P_square_norm: float
    tolerance_used: float

    @property
    def is_w3(self) -> bool:
        return self.class_label.is_w3


def cyclic_tolerance(F_scale: float, tol: float) -> float:
    """Tolerance for cyclic-sum tests on an F of magnitude |F_scale|."""
    return tol * max(1., F_scale)


def require_w3(F: Tensor, tol: float = DEFAULT_CLASSIFICATION_TOL):
    """Raise NotW3 unless the cyclic sum of F vanishes within the classification tolerance."""
    cyclic_norm = cyclic_F(F).max_abs()
    threshold = cyclic_tolerance(F.max_abs(), tol)
    if cyclic_norm > threshold:
        raise NotW3(cyclic_norm, threshold)


def levi_civita_of(manifold: FrameManifold) -> Connection:
    return levi_civita(manifold.structure_constants, manifold.metric)


def compute_F(manifold: FrameManifold) -> Tensor:
    """F(x, y, z) = g((nabla_x P) y, z) for the Levi-Civita connection of g."""
    return nabla_P(manifold, levi_civita_of(manifold))


def cyclic_F(F: Tensor) -> Tensor:
    return tensor.cyclic_sum3(F)


def nijenhuis(manifold: FrameManifold, F: Tensor | None = None) -> Tensor:
    """
    Lowered Nijenhuis tensor g(N(x, y), z) with
    N(x, y) = (nabla_x P) P y - (nabla_y P) P x + (nabla_{Px} P) y - (nabla_{Py} P) x,
    which equals [Px, Py] + [x, y] - P[Px, y] - P[x, Py] and is antisymmetric in (x, y).
    """
    F = compute_F(manifold) if F is None else F
    P = manifold.P
    return (rearranged(F, 'x,Py,z', P) - rearranged(F, 'y,Px,z', P)
            + rearranged(F, 'Px,y,z', P) - rearranged(F, 'Py,x,z', P))


def associated_nijenhuis(manifold: FrameManifold, F: Tensor | None = None) -> Tensor:
    """g(N*(x, y), z), N*(x, y) = (nabla_x P) P y + (nabla_{Px} P) y + (nabla_y P) P x + (nabla_{Py} P) x."""
    F = compute_F(manifold) if F is None else F
    P = manifold.P
    return (rearranged(F, 'x,Py,z', P) + rearranged(F, 'Px,y,z', P)
            + rearranged(F, 'y,Px,z', P) + rearranged(F, 'Py,x,z', P))


def nijenhuis_from_brackets(manifold: FrameManifold) -> Tensor:
    """g([Px, Py] + [x, y] - P[Px, y] - P[x, Py], z) straight from the structure constants."""
    C = manifold.C
    P = manifold.P
    bracket_Px_Py = np.einsum('ax,by,abk->xyk', P, P, C)
    bracket_Px_y = np.einsum('ax,ayk->xyk', P, C)
    bracket_x_Py = np.einsum('by,xbk->xyk', P, C)
    vector = bracket_Px_Py + C - np.einsum('km,xym->xyk', P, bracket_Px_y + bracket_x_Py)
    return Tensor(vector @ manifold.g)


def square_norm_nabla_P(manifold: FrameManifold, F: Tensor | None = None) -> float:
    """||nabla P||^2 = g^{ij} g^{ks} g((nabla_{e_i} P) e_k, (nabla_{e_j} P) e_s)."""
    F = compute_F(manifold) if F is None else F
    return tensor.norm_sq(F, manifold.g_inv)


def crossed_square_norm_nabla_P(manifold: FrameManifold, F: Tensor | None = None) -> float:
    """-2 g^{ij} g^{ks} g((nabla_{e_i} P) e_k, (nabla_{e_s} P) e_j), equal to ||nabla P||^2 on W3."""
    F = compute_F(manifold) if F is None else F
    g_inv = manifold.g_inv
    return -2 * float(np.einsum('ika,sjb,ab,ij,ks->', F.components, F.components, g_inv, g_inv, g_inv))


def classify(manifold: FrameManifold, tol: float = DEFAULT_CLASSIFICATION_TOL) -> Classification:
    F = compute_F(manifold)
    norm_F = F.max_abs()
    norm_cyclic_F = cyclic_F(F).max_abs()
    tolerance_used = cyclic_tolerance(norm_F, tol)

    if norm_F <= tol:
        class_label = ClassLabel.W0
    elif norm_cyclic_F <= tolerance_used:
        class_label = ClassLabel.W3_STRICT
    else:
        class_label = ClassLabel.OUTSIDE_SCOPE

    classification = Classification(
        class_label=class_label,
        norm_F=norm_F,
        norm_cyclic_F=norm_cyclic_F,
        norm_N=nijenhuis(manifold, F).max_abs(),
        norm_N_star=associated_nijenhuis(manifold, F).max_abs(),
        nabla_P_square_norm=square_norm_nabla_P(manifold, F),
        tolerance_used=tolerance_used,
    )
    logging.debug(f'Classified {manifold.name!r} as {class_label.value} '
                  f'(|F| = {norm_F:.3e}, |S F| = {norm_cyclic_F:.3e})')
    return classification
