from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from bsmu.almostproduct.core.errors import (
    AssociatedMetricSingular, BracketNotAntisymmetric, DimensionMismatch, JacobiViolated, NonFiniteComponents,
    NotPositiveDefinite, NotSymmetric, OddDimension, PNotCompatible, PSquareNotIdentity, TraceNonZero)

if TYPE_CHECKING:
    from typing import Iterable, Mapping


EXACT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """Brackets of the frame: [e_i, e_j] = sum_k C[i, j, k] e_k."""
    C: np.ndarray

    def __post_init__(self):
        C = np.array(self.C, dtype=np.float64)
        C.setflags(write=False)
        object.__setattr__(self, 'C', C)

    @property
    def dim(self) -> int:
        return self.C.shape[0]

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable[Iterable[float]]) -> StructureConstants:
        """Build from (i, j, k, value) entries with i < j; the i > j half follows from antisymmetry."""
        C = np.zeros((dim, dim, dim))
        for entry in entries:
            i, j, k, value = entry
            i, j, k = int(i), int(j), int(k)
            if not (0 <= i < j < dim and 0 <= k < dim):
                raise DimensionMismatch(
                    f'Structure constant entry ({i}, {j}, {k}) must satisfy 0 <= i < j < {dim} and 0 <= k < {dim}',
                    entries=(i, j, k))
            C[i, j, k] = float(value)
            C[j, i, k] = -float(value)
        return cls(C)

    def entries(self) -> list[tuple[int, int, int, float]]:
        dim = self.dim
        return [(i, j, k, float(self.C[i, j, k]))
                for i in range(dim) for j in range(i + 1, dim) for k in range(dim)
                if self.C[i, j, k] != 0]

    def antisymmetry_defect(self) -> float:
        return float(np.max(np.abs(self.C + self.C.transpose(1, 0, 2)), initial=0.))

    def jacobi_tensor(self) -> np.ndarray:
        """J[i, j, k, l] = l-component of [[e_i, e_j], e_k] + [[e_j, e_k], e_i] + [[e_k, e_i], e_j]."""
        C = self.C
        return (np.einsum('ijm,mkl->ijkl', C, C)
                + np.einsum('jkm,mil->ijkl', C, C)
                + np.einsum('kim,mjl->ijkl', C, C))

    def jacobi_defect(self) -> float:
        return float(np.max(np.abs(self.jacobi_tensor()), initial=0.))

    def lowered(self, g: np.ndarray) -> np.ndarray:
        """C_low[i, j, l] = g([e_i, e_j], e_l)."""
        return np.einsum('ijk,kl->ijl', self.C, g)

    def bracket(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum('i,j,ijk->k', u, v, self.C)

    def scaled(self, factor: float) -> StructureConstants:
        return StructureConstants(self.C * factor)


@dataclass(frozen=True, eq=False)
class MetricPair:
    g: np.ndarray
    g_inv: np.ndarray

    @classmethod
    def from_matrix(cls, g: np.ndarray) -> MetricPair:
        g = np.array(g, dtype=np.float64)
        g_inv = np.linalg.inv(g)
        g.setflags(write=False)
        g_inv.setflags(write=False)
        return cls(g, g_inv)

    @property
    def dim(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True, eq=False)
class FrameManifold:
    """
    Left-invariant model of a Riemannian almost product manifold:
    a frame with constant brackets C, constant metric g and constant P (P[a, b] = P^a_b, P e_b = sum_a P[a, b] e_a).
    Build instances with |validate|, which checks every invariant.
    """
    structure_constants: StructureConstants
    metric: MetricPair
    P: np.ndarray
    associated_metric: MetricPair
    name: str = ''
    provenance: Mapping[str, object] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def C(self) -> np.ndarray:
        return self.structure_constants.C

    @property
    def g(self) -> np.ndarray:
        return self.metric.g

    @property
    def g_inv(self) -> np.ndarray:
        return self.metric.g_inv

    @property
    def P_low(self) -> np.ndarray:
        """P_low[j, k] = g(P e_j, e_k)."""
        return self.P.T @ self.g

    @property
    def plus_dim(self) -> int:
        return int(round((self.dim + np.trace(self.P)) / 2))

    def scaled(self, factor: float) -> FrameManifold:
        """Same frame with brackets multiplied by |factor| (equivalently the metric rescaled homothetically)."""
        return validate(self.dim, self.structure_constants.scaled(factor).C, self.g, self.P,
                        name=f'{self.name}*{factor:g}' if self.name else '',
                        provenance={**self.provenance, 'scaled_by': factor})

    def __repr__(self) -> str:
        return f'FrameManifold(name={self.name!r}, dim={self.dim})'


def _as_square(name: str, value, dim: int) -> np.ndarray:
    array = np.array(value, dtype=np.float64)
    if array.shape != (dim, dim):
        raise DimensionMismatch(f'{name} must have shape ({dim}, {dim}), got {array.shape}')
    return array


def _require_finite(name: str, array: np.ndarray):
    if not np.all(np.isfinite(array)):
        raise NonFiniteComponents(f'{name} contains NaN or infinity', entries=np.argwhere(~np.isfinite(array)))


def _structure_constants(dim: int, value) -> StructureConstants:
    if isinstance(value, StructureConstants):
        return value
    array = np.asarray(value, dtype=np.float64)
    if array.ndim != 3:
        if array.size and (array.ndim != 2 or array.shape[1] != 4):
            raise DimensionMismatch(f'Structure constant entries must be (i, j, k, value) rows, got shape {array.shape}')
        _require_finite('Structure constants', array)
        return StructureConstants.from_entries(dim, array.reshape(-1, 4))
    C = array
    if C.shape != (dim, dim, dim):
        raise DimensionMismatch(f'Structure constants must have shape ({dim}, {dim}, {dim}), got {C.shape}')
    return StructureConstants(C)


def validate(
        dim: int,
        structure_constants,
        metric,
        product_structure,
        name: str = '',
        provenance: Mapping[str, object] | None = None,
        tol: float = EXACT_TOL,
) -> FrameManifold:
    """
    Check every invariant of a left-invariant almost product model and return it.
    |structure_constants| is either an array C[i, j, k] or (i, j, k, value) entries with i < j.
    Raises the ManifoldValidationError subclass of the first violated invariant.
    """
    if dim < 2:
        raise DimensionMismatch(f'Dimension must be at least 2, got {dim}')
    g = _as_square('Metric', metric, dim)
    P = _as_square('Product structure', product_structure, dim)
    structure = _structure_constants(dim, structure_constants)
    C = structure.C

    _require_finite('Metric', g)
    _require_finite('Product structure', P)
    _require_finite('Structure constants', C)

    if not np.array_equal(g, g.T):
        raise NotSymmetric('Metric is not symmetric', entries=np.argwhere(g != g.T))
    min_eigenvalue = float(np.linalg.eigvalsh(g).min())
    if min_eigenvalue <= 0:
        raise NotPositiveDefinite(f'Metric has non-positive eigenvalue {min_eigenvalue:.3e}')

    antisymmetry_defect = structure.antisymmetry_defect()
    if antisymmetry_defect != 0:
        raise BracketNotAntisymmetric(f'Bracket antisymmetry defect is {antisymmetry_defect:.3e}')
    jacobi_defect = structure.jacobi_defect()
    if jacobi_defect > tol:
        raise JacobiViolated(f'Jacobi identity defect is {jacobi_defect:.3e}',
                             entries=np.argwhere(np.abs(structure.jacobi_tensor()) > tol))

    square_defect = float(np.max(np.abs(P @ P - np.eye(dim))))
    if square_defect > tol:
        raise PSquareNotIdentity(f'P^2 - I has max component {square_defect:.3e}')
    compatibility_defect = float(np.max(np.abs(P.T @ g @ P - g)))
    if compatibility_defect > tol:
        raise PNotCompatible(f'g(Px, Py) - g(x, y) has max component {compatibility_defect:.3e}')
    if dim % 2:
        raise OddDimension(f'Dimension {dim} is odd')
    trace = float(np.trace(P))
    if abs(trace) > tol:
        raise TraceNonZero(f'tr P = {trace:.3e}')

    g_assoc = g @ P
    asymmetry = float(np.max(np.abs(g_assoc - g_assoc.T)))
    if asymmetry > tol:
        raise PNotCompatible(f'Associated metric asymmetry is {asymmetry:.3e}')
    g_assoc = (g_assoc + g_assoc.T) / 2
    if np.linalg.matrix_rank(g_assoc) < dim:
        raise AssociatedMetricSingular('Associated metric g(x, Py) is singular')

    logging.debug(f'Validated manifold {name!r} of dimension {dim}')
    return FrameManifold(
        structure_constants=structure,
        metric=MetricPair.from_matrix(g),
        P=_read_only(P),
        associated_metric=MetricPair.from_matrix(g_assoc),
        name=name,
        provenance=dict(provenance or {}),
    )


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array
