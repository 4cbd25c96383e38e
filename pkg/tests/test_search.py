import shutil

import numpy as np
import pytest

from bsmu.almostproduct.core.errors import NoSolutionFound
from bsmu.almostproduct.core.specio import read_manifold
from bsmu.almostproduct.geometry import tensor
from bsmu.almostproduct.structure.classification import ClassLabel, classify
from bsmu.almostproduct.structure.curvature import curvature_summary
from bsmu.almostproduct.verification.registry import CheckStatus
from bsmu.almostproduct.verification.report import OverallStatus, verify
from bsmu.almostproduct.verification.search import (
    CyclicConstraint, SearchConfig, SearchFamily, cyclic_constraint, random_nilpotent_manifold, random_split_frame,
    random_w3_manifold, search_w3, write_fixtures)


def test_split_frame_product_structure():
    frame = random_split_frame(6, np.random.default_rng(3))
    P = frame.P
    assert np.allclose(P @ P, np.eye(6))
    assert np.allclose(P, P.T)
    assert np.trace(P) == pytest.approx(0., abs=1e-12)
    assert len(frame.bracket_basis()) == 12


@pytest.mark.parametrize('dim, null_space_dim', [(4, 1), (6, 6), (8, 18)])
def test_cyclic_constraint_solutions_are_plus_eigenspace_brackets(dim, null_space_dim):
    frame = random_split_frame(dim, np.random.default_rng(dim))
    constraint = cyclic_constraint(frame)
    assert np.linalg.norm(constraint.matrix, 2) > 1.
    assert constraint.scale > 0.

    solutions = constraint.solutions(1e-9)
    assert solutions.shape == (len(frame.bracket_basis()), null_space_dim)
    assert np.abs(constraint.matrix @ solutions).max() < 1e-12


def test_constraint_solutions_use_an_absolute_cutoff():
    roundoff = CyclicConstraint(np.full((16, 3), 4e-16), scale=1.)
    assert np.array_equal(roundoff.solutions(1e-9), np.eye(3))

    constraint = CyclicConstraint(np.diag([2., 1e-15, 0.]), scale=1.)
    solutions = constraint.solutions(1e-9)
    assert solutions.shape == (3, 2)
    assert np.abs(solutions[0]).max() < 1e-12


def test_nilpotent_search_is_deterministic():
    config = SearchConfig(dim=4, seed=7, max_candidates=3)
    first = search_w3(config)
    second = search_w3(config)
    assert [manifold.name for manifold in first] == [
        'w3-nilpotent2-d4-s7-000', 'w3-nilpotent2-d4-s7-001', 'w3-nilpotent2-d4-s7-002']
    for a, b in zip(first, second):
        assert np.array_equal(a.C, b.C)
        assert np.array_equal(a.P, b.P)


def test_nilpotent_search_finds_strict_w3():
    config = SearchConfig(dim=4, seed=0)
    found = search_w3(config)
    assert len(found) == config.max_candidates
    for manifold in found:
        classification = classify(manifold, config.tolerance)
        assert classification.class_label is ClassLabel.W3_STRICT
        assert classification.norm_F > config.rejection_threshold
        assert manifold.provenance['null_space_dim'] == 1
        assert manifold.provenance['family'] == 'nilpotent2'
        assert manifold.provenance['seed'] == 0


def test_catalog_search():
    found = search_w3(SearchConfig(family=SearchFamily.CATALOG))
    assert [manifold.name for manifold in found] == ['w3-catalog-heisenberg_r', 'w3-catalog-heisenberg_rotation']
    assert found[0].provenance['source'] == 'heisenberg_r'
    assert found[0].provenance['origin'] == 'hand construction'


def test_catalog_search_without_matching_dimension():
    with pytest.raises(NoSolutionFound) as exc_info:
        search_w3(SearchConfig(dim=6, family=SearchFamily.CATALOG))
    assert exc_info.value.null_space_dim == 0


def test_custom_catalog_skips_w0(fixtures_dir, tmp_path):
    for file_name in ('e0.json', 'w3x.json'):
        shutil.copy(fixtures_dir / file_name, tmp_path / file_name)
    found = search_w3(SearchConfig(family=SearchFamily.CATALOG), tmp_path)
    assert [manifold.name for manifold in found] == ['w3-catalog-w3x']


def test_written_fixtures_are_reproducible(tmp_path):
    config = SearchConfig(dim=4, seed=11, max_candidates=2)
    first_paths = write_fixtures(search_w3(config), tmp_path / 'first')
    second_paths = write_fixtures(search_w3(config), tmp_path / 'second')
    assert [path.name for path in first_paths] == ['w3-nilpotent2-d4-s11-000.json', 'w3-nilpotent2-d4-s11-001.json']
    for first, second in zip(first_paths, second_paths):
        assert first.read_bytes() == second.read_bytes()
        assert np.array_equal(read_manifold(first).C, read_manifold(second).C)


def test_random_nilpotent_manifold_is_valid():
    manifold = random_nilpotent_manifold(4, seed=5)
    assert manifold.dim == 4
    assert manifold.name == 'nilpotent-d4-s5'
    assert manifold.structure_constants.jacobi_defect() == 0.


@pytest.mark.parametrize('dim, seed_count', [(4, 100), (6, 20)])
def test_random_w3_population_has_no_failures(dim, seed_count):
    for seed in range(seed_count):
        manifold = random_w3_manifold(dim, seed)
        report = verify(manifold)
        failed = [check.id for check in report.checks if check.status is CheckStatus.FAIL]
        assert report.status is OverallStatus.PASS, f'seed {seed}: {failed}'
        assert report.classification['class_label'] == ClassLabel.W3_STRICT.value


def test_random_w3_population_varies_in_scale():
    taus = {round(curvature_summary(random_w3_manifold(4, seed)).tau, 9) for seed in range(10)}
    assert len(taus) == 10
    assert all(tau < 0 for tau in taus)


def test_random_w3_population_varies_in_shape():
    ratios = set()
    for seed in range(10):
        manifold = random_w3_manifold(6, seed)
        summary = curvature_summary(manifold)
        ratios.add(round(tensor.norm_sq(summary.rho, manifold.g_inv) / summary.tau ** 2, 6))
    assert len(ratios) > 1
