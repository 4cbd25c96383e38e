from __future__ import annotations

import logging
from functools import cached_property
from timeit import default_timer as timer
from typing import TYPE_CHECKING

import numpy as np

from bsmu.almostproduct.geometry.tensor import Tensor
from bsmu.almostproduct.structure import classification, curvature, natural
from bsmu.almostproduct.verification.settings import VerificationSettings

if TYPE_CHECKING:
    from bsmu.almostproduct.geometry.connection import Connection
    from bsmu.almostproduct.geometry.frame import FrameManifold


PERTURBATION_SEED = 0


class Analysis:
    """Lazily computed geometric quantities of one manifold, shared by all checks."""

    def __init__(self, manifold: FrameManifold, settings: VerificationSettings | None = None):
        self._manifold = manifold
        self._settings = settings or VerificationSettings()
        self._timings: dict[str, float] = {}

    @property
    def manifold(self) -> FrameManifold:
        return self._manifold

    @property
    def settings(self) -> VerificationSettings:
        return self._settings

    @property
    def timings(self) -> dict[str, float]:
        return dict(self._timings)

    @property
    def P(self) -> np.ndarray:
        return self._manifold.P

    @property
    def g_inv(self) -> np.ndarray:
        return self._manifold.g_inv

    def _timed(self, phase: str, compute):
        start = timer()
        value = compute()
        elapsed = timer() - start
        self._timings[phase] = self._timings.get(phase, 0.) + elapsed
        logging.debug(f'{phase} of {self._manifold.name!r} time: {elapsed}')
        return value

    @cached_property
    def F(self) -> Tensor:
        return self._timed('fundamental_tensor', lambda: classification.compute_F(self._manifold))

    @cached_property
    def classification(self) -> classification.Classification:
        return self._timed('classification', lambda: classification.classify(
            self._manifold, self._settings.classification_tol))

    @property
    def is_w3(self) -> bool:
        return self.classification.is_w3

    @property
    def is_strict_w3(self) -> bool:
        return self.classification.class_label is classification.ClassLabel.W3_STRICT

    @cached_property
    def N(self) -> Tensor:
        return classification.nijenhuis(self._manifold, self.F)

    @cached_property
    def N_star(self) -> Tensor:
        return classification.associated_nijenhuis(self._manifold, self.F)

    @cached_property
    def phi(self) -> Tensor:
        return self._timed('phi', lambda: natural.phi_direct(self._manifold))

    @cached_property
    def pair(self) -> natural.ConnectionPair:
        return self._timed('canonical_connection', lambda: natural.canonical_connection(
            self._manifold, self._settings.classification_tol))

    @cached_property
    def perturbed_natural(self) -> Connection:
        """Canonical connection deformed by a seeded random deformation that keeps it natural."""
        rng = np.random.default_rng(PERTURBATION_SEED)
        raw = Tensor(rng.standard_normal((self._manifold.dim,) * 3))
        Q = self.pair.Q + natural.natural_perturbation(raw, self.P) * 0.5
        return natural.natural_connection_from_Q(self._manifold, Q, 'perturbed-natural')

    @cached_property
    def perturbed_torsion(self) -> Tensor:
        return natural.torsion_of(self.perturbed_natural, self._manifold)

    @cached_property
    def decomposition(self) -> natural.TorsionDecomposition:
        return natural.project_torsion(self.pair.T, self.P)

    @cached_property
    def perturbed_decomposition(self) -> natural.TorsionDecomposition:
        return natural.project_torsion(self.perturbed_torsion, self.P)

    @cached_property
    def summary(self) -> curvature.CurvatureSummary:
        return self._timed('curvature', lambda: curvature.curvature_summary(
            self._manifold, self.pair, self._settings.classification_tol))

    @cached_property
    def torsion_bianchi(self) -> Tensor:
        return curvature.torsion_bianchi_expression(self.pair, self.g_inv)

    @property
    def bianchi_holds(self) -> bool:
        return self.torsion_bianchi.max_abs() <= self._settings.inversion_tol

    @cached_property
    def parallel(self) -> curvature.ParallelTorsionAnalysis | None:
        if not self.is_w3:
            return None
        return self._timed('parallel_torsion', lambda: curvature.parallel_torsion_analysis(
            self._manifold, self._settings.inversion_tol, self.pair, self.summary))

    @property
    def is_parallel(self) -> bool:
        return self.parallel is not None and self.parallel.parallel

    @property
    def nabla_P_square_norm(self) -> float:
        return self.classification.nabla_P_square_norm
