from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from timeit import default_timer as timer
from typing import TYPE_CHECKING

import numpy as np
from scipy.linalg import null_space
from scipy.stats import ortho_group

from bsmu.almostproduct.core.config import Config
from bsmu.almostproduct.core.errors import ConfigError, NoSolutionFound
from bsmu.almostproduct.core.specio import read_manifold, write_manifold
from bsmu.almostproduct.geometry.frame import validate
from bsmu.almostproduct.structure.classification import ClassLabel, classify, compute_F, cyclic_F
from bsmu.almostproduct.verification.catalog import BUILTIN_CATALOG

if TYPE_CHECKING:
    from bsmu.almostproduct.geometry.frame import FrameManifold


class SearchFamily(Enum):
    NILPOTENT2 = 'nilpotent2'
    CATALOG = 'catalog'

    @property
    def display_name(self) -> str:
        return {
            SearchFamily.NILPOTENT2: 'two-step nilpotent brackets',
            SearchFamily.CATALOG: 'manifold catalog',
        }[self]


@dataclass
class SearchConfig(Config):
    dim: int = 4
    family: SearchFamily = SearchFamily.NILPOTENT2
    seed: int = 0
    max_candidates: int = 8
    tolerance: float = 1e-9
    rejection_factor: float = 1e3

    def validate(self):
        if self.dim < 4 or self.dim % 2:
            raise ConfigError(
                f'Search dimension must be even and at least 4 for a nontrivial cyclic condition, got {self.dim}')
        if self.max_candidates < 1:
            raise ConfigError(f'max_candidates must be at least 1, got {self.max_candidates}')
        if self.tolerance <= 0 or self.rejection_factor <= 0:
            raise ConfigError('Search tolerance and rejection factor must be positive')

    @property
    def rejection_threshold(self) -> float:
        return self.rejection_factor * self.tolerance


@dataclass(frozen=True)
class SplitFrame:
    """
    Orthonormal eigenframe of P: the first half spans the +1 eigenspace, the second half the -1 eigenspace.
    The bracket generators are the +1 eigenspace plus the first vector of the -1 eigenspace,
    and the remaining -1 eigenvectors span the center, so the grading is not adapted to P.
    """
    O: np.ndarray

    @property
    def dim(self) -> int:
        return self.O.shape[0]

    @property
    def half(self) -> int:
        return self.dim // 2

    @property
    def P(self) -> np.ndarray:
        signs = np.concatenate([np.ones(self.half), -np.ones(self.half)])
        P = self.O @ np.diag(signs) @ self.O.T
        return (P + P.T) / 2

    @property
    def generators(self) -> range:
        return range(self.half + 1)

    @property
    def center(self) -> range:
        return range(self.half + 1, self.dim)

    def bracket_basis(self) -> list[tuple[int, int, int]]:
        """Brackets [u_a, u_b] = u_c with generators a < b and c in the center."""
        return [(a, b, c) for a in self.generators for b in self.generators if a < b for c in self.center]

    def structure_constants(self, coefficients) -> np.ndarray:
        c = np.zeros((self.dim,) * 3)
        for (a, b, k), value in zip(self.bracket_basis(), coefficients):
            c[a, b, k] = value
            c[b, a, k] = -value
        O = self.O
        C = np.einsum('ia,jb,abc,kc->ijk', O, O, c, O)
        return (C - C.transpose(1, 0, 2)) / 2


def random_split_frame(dim: int, rng: np.random.Generator) -> SplitFrame:
    return SplitFrame(ortho_group.rvs(dim, random_state=rng))


@dataclass(frozen=True)
class CyclicConstraint:
    """
    Linear map from bracket coefficients to the cyclic sum of F, one column per basis bracket.
    |scale| is the largest max-abs F over the basis brackets.
    """
    matrix: np.ndarray
    scale: float

    @property
    def bracket_count(self) -> int:
        return self.matrix.shape[1]

    def solutions(self, tol: float) -> np.ndarray:
        """Orthonormal basis of the brackets whose cyclic sum stays below |tol| * max(1, |scale|)."""
        cutoff = tol * max(1., self.scale)
        largest = float(np.linalg.norm(self.matrix, 2))
        if largest <= cutoff:
            return np.eye(self.bracket_count)
        # null_space takes a cutoff relative to the largest singular value
        return null_space(self.matrix, rcond=cutoff / largest)


def cyclic_constraint(frame: SplitFrame) -> CyclicConstraint:
    """F is linear in the brackets for fixed g and P."""
    dim = frame.dim
    g = np.eye(dim)
    columns = []
    scale = 0.
    for index in range(len(frame.bracket_basis())):
        coefficients = np.zeros(len(frame.bracket_basis()))
        coefficients[index] = 1.
        manifold = validate(dim, frame.structure_constants(coefficients), g, frame.P)
        F = compute_F(manifold)
        scale = max(scale, F.max_abs())
        columns.append(cyclic_F(F).components.ravel())
    return CyclicConstraint(np.stack(columns, axis=1), scale)


def search_nilpotent2(config: SearchConfig) -> list[FrameManifold]:
    start = timer()
    rng = np.random.default_rng(config.seed)
    frame = random_split_frame(config.dim, rng)
    constraint = cyclic_constraint(frame)
    solutions = constraint.solutions(config.tolerance)
    null_space_dim = solutions.shape[1]
    logging.info(f'Cyclic constraint of {constraint.bracket_count} brackets has null space of dimension '
                 f'{null_space_dim}')
    if null_space_dim == 0:
        raise NoSolutionFound('Only the abelian bracket satisfies the cyclic condition', null_space_dim)

    found = []
    for candidate in range(config.max_candidates):
        coefficients = solutions @ rng.standard_normal(null_space_dim)
        coefficients *= rng.uniform(0.5, 2.) / np.linalg.norm(coefficients)
        name = f'w3-{config.family.value}-d{config.dim}-s{config.seed}-{candidate:03d}'
        manifold = validate(config.dim, frame.structure_constants(coefficients), np.eye(config.dim), frame.P,
                            name=name)
        classification = classify(manifold, config.tolerance)
        if classification.class_label is not ClassLabel.W3_STRICT \
                or classification.norm_F <= config.rejection_threshold:
            logging.debug(f'Rejected candidate {candidate}: {classification.class_label.value}, '
                          f'|F| = {classification.norm_F:.3e}')
            continue

        provenance = {
            'candidate': candidate,
            'family': config.family.value,
            'null_space_dim': null_space_dim,
            'norm_F': classification.norm_F,
            'norm_cyclic_F': classification.norm_cyclic_F,
            'seed': config.seed,
        }
        found.append(validate(manifold.dim, manifold.C, manifold.g, manifold.P, name=name, provenance=provenance))

    if not found:
        raise NoSolutionFound(f'All {config.max_candidates} candidates have F below the rejection threshold',
                              null_space_dim)
    logging.info(f'Found {len(found)} strict W3 manifolds time: {timer() - start}')
    return found


def _catalog_entries(catalog_dir: Path | None) -> list[tuple[str, FrameManifold]]:
    if catalog_dir is not None:
        paths = sorted(path for path in Path(catalog_dir).iterdir() if path.suffix == '.json')
        return [(path.stem, read_manifold(path)) for path in paths]
    return [(stem, construction()) for stem, construction in BUILTIN_CATALOG.items()]


def search_catalog(config: SearchConfig, catalog_dir: Path | None = None) -> list[FrameManifold]:
    entries = _catalog_entries(catalog_dir)
    found = []
    for stem, manifold in entries:
        if manifold.dim != config.dim:
            continue
        classification = classify(manifold, config.tolerance)
        if classification.class_label is not ClassLabel.W3_STRICT \
                or classification.norm_F <= config.rejection_threshold:
            logging.debug(f'Catalog entry {stem} is {classification.class_label.value}, skipped')
            continue
        provenance = {**manifold.provenance, 'family': config.family.value, 'source': stem}
        found.append(validate(manifold.dim, manifold.C, manifold.g, manifold.P,
                              name=f'w3-{config.family.value}-{stem}', provenance=provenance))

    if not found:
        raise NoSolutionFound(f'No strict W3 manifold of dimension {config.dim} among {len(entries)} catalog entries',
                              0)
    return found


def search_w3(config: SearchConfig, catalog_dir: Path | None = None) -> list[FrameManifold]:
    logging.info(f'Searching strict W3 manifolds in the {config.family.display_name} family '
                 f'(dim {config.dim}, seed {config.seed})')
    if config.family is SearchFamily.CATALOG:
        return search_catalog(config, catalog_dir)
    return search_nilpotent2(config)


def write_fixtures(manifolds: list[FrameManifold], out_dir: Path) -> list[Path]:
    paths = []
    for manifold in manifolds:
        path = Path(out_dir) / f'{manifold.name}.json'
        write_manifold(manifold, path)
        paths.append(path)
    return paths


def random_w3_manifold(dim: int = 4, seed: int = 0) -> FrameManifold:
    """First strict W3 manifold found by the two-step nilpotent search for |seed|."""
    config = SearchConfig(dim=dim, seed=seed, max_candidates=1)
    config.validate()
    return search_nilpotent2(config)[0]


def random_nilpotent_manifold(dim: int = 4, seed: int = 0) -> FrameManifold:
    """
    Random two-step nilpotent brackets from the first half of the frame to the second,
    with P conjugated by a random rotation. Generally outside W3.
    """
    rng = np.random.default_rng(seed)
    half = dim // 2
    C = np.zeros((dim,) * 3)
    for i in range(half):
        for j in range(i + 1, half):
            values = rng.standard_normal(dim - half)
            C[i, j, half:] = values
            C[j, i, half:] = -values
    frame = random_split_frame(dim, rng)
    return validate(dim, C, np.eye(dim), frame.P, name=f'nilpotent-d{dim}-s{seed}',
                    provenance={'family': 'random_nilpotent', 'seed': seed})
