from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from bsmu.almostproduct.core.errors import AlmostProductError
from bsmu.almostproduct.geometry import tensor
from bsmu.almostproduct.geometry.connection import covariant_derivative
from bsmu.almostproduct.geometry.tensor import rearranged
from bsmu.almostproduct.structure import curvature, natural
from bsmu.almostproduct.structure.classification import (
    crossed_square_norm_nabla_P, cyclic_F, cyclic_tolerance, nijenhuis_from_brackets)

if TYPE_CHECKING:
    from typing import Callable

    from bsmu.almostproduct.verification.analysis import Analysis


class Gate(Enum):
    ALWAYS = 'always'
    W3 = 'w3'
    W3_STRICT = 'w3_strict'
    P_TENSOR = 'p_tensor'
    PARALLEL = 'parallel'

    def is_open(self, analysis: Analysis) -> bool:
        if self is Gate.ALWAYS:
            return True
        if not analysis.is_w3:
            return False
        if self is Gate.W3:
            return True
        if self is Gate.W3_STRICT:
            return analysis.is_strict_w3
        if self is Gate.P_TENSOR:
            return analysis.bianchi_holds
        return analysis.is_parallel


class CheckKind(Enum):
    VANISHES = 'vanishes'
    BOUNDED_AWAY = 'bounded_away'
    AGREES = 'agrees'


class CheckStatus(Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'
    WARN = 'WARN'
    SKIPPED = 'SKIPPED'


class Tolerance(Enum):
    EXACT = 'exact_tol'
    INVERSION = 'inversion_tol'
    RELATIVE = 'relative_tol'
    BOUNDED_AWAY = 'bounded_away_tol'
    P_TENSOR_PAIRING = 'p_tensor_pairing_tol'
    AGREEMENT = None


@dataclass(frozen=True)
class CheckDefinition:
    id: str
    description: str
    gate: Gate
    kind: CheckKind
    tolerance: Tolerance
    compute: Callable[[Analysis], float]
    refutable: bool = False

    def tolerance_value(self, analysis: Analysis) -> float:
        if self.tolerance is Tolerance.AGREEMENT:
            return 0.5
        return getattr(analysis.settings, self.tolerance.value)


@dataclass(frozen=True)
class CheckResult:
    id: str
    defect: float | None
    tol: float
    status: CheckStatus
    note: str = ''

    def to_dict(self) -> dict:
        return {'defect': self.defect, 'id': self.id, 'status': self.status.value, 'tol': self.tol}


def _relative(value: float, expected: float) -> float:
    return abs(value - expected) / max(1., abs(expected))


def _agreement(first: bool, second: bool) -> float:
    return 0. if first == second else 1.


def _max(*values: float) -> float:
    return max(values)


# --- checks valid on every manifold

def _fundamental_tensor_symmetries(a: Analysis) -> float:
    F, P = a.F, a.P
    return _max((F - rearranged(F, 'x,z,y')).max_abs(),
                (F + rearranged(F, 'x,Py,Pz', P)).max_abs(),
                (rearranged(F, 'x,y,Pz', P) + rearranged(F, 'x,Py,z', P)).max_abs())


def _w3_associated_nijenhuis_agreement(a: Analysis) -> float:
    threshold = cyclic_tolerance(a.F.max_abs(), a.settings.classification_tol)
    cyclic_vanishes = cyclic_F(a.F).max_abs() <= threshold
    n_star_vanishes = a.N_star.max_abs() <= 4 * a.manifold.dim * threshold
    return _agreement(cyclic_vanishes, n_star_vanishes)


def _nijenhuis_antisymmetry(a: Analysis) -> float:
    return (a.N + rearranged(a.N, 'y,x,z')).max_abs()


def _associated_nijenhuis_symmetry(a: Analysis) -> float:
    return (a.N_star - rearranged(a.N_star, 'y,x,z')).max_abs()


def _nijenhuis_bracket_form(a: Analysis) -> float:
    return (a.N - nijenhuis_from_brackets(a.manifold)).max_abs()


def _phi_from_F(a: Analysis) -> float:
    return (a.phi - natural.phi_from_F(a.F, a.P)).max_abs()


def _F_from_phi(a: Analysis) -> float:
    return (natural.f_from_phi(a.phi, a.P) - a.F).max_abs()


def _canonical_is_natural(a: Analysis) -> float:
    defects = natural.is_natural(a.pair.nabla_prime, a.manifold, a.F)
    return _max(defects.nabla_g, defects.nabla_P)


def _canonical_preserves_associated_metric(a: Analysis) -> float:
    return natural.is_natural(a.pair.nabla_prime, a.manifold, a.F).nabla_associated_metric


def _naturality_criteria_agree(a: Analysis) -> float:
    tol = a.settings.inversion_tol
    connections = (a.pair.nabla_prime, a.perturbed_natural, a.pair.nabla)
    return _max(*(_agreement(True, natural.is_natural(connection, a.manifold, a.F, tol).criteria_agree)
                  for connection in connections))


def _natural_torsion_p1_identity(decomposition: natural.TorsionDecomposition, a: Analysis) -> float:
    phi, P = a.phi, a.P
    expected = (-phi + rearranged(phi, 'y,z,x') - rearranged(phi, 'x,Py,Pz', P)
                - rearranged(phi, 'y,Pz,Px', P) + 2 * rearranged(phi, 'z,Px,Py', P))
    return (4 * decomposition.p1 - expected).max_abs()


def _natural_torsion_p3_identity(decomposition: natural.TorsionDecomposition, a: Analysis) -> float:
    phi, P = a.phi, a.P
    via_phi = 2 * (rearranged(phi, 'z,Px,Py', P) + rearranged(phi, 'z,x,y'))
    return _max((4 * decomposition.p3 + a.N).max_abs(), (a.N - via_phi).max_abs())


def _natural_torsion_p1(a: Analysis) -> float:
    return _max(_natural_torsion_p1_identity(a.decomposition, a),
                _natural_torsion_p1_identity(a.perturbed_decomposition, a))


def _natural_torsion_p3(a: Analysis) -> float:
    return _max(_natural_torsion_p3_identity(a.decomposition, a),
                _natural_torsion_p3_identity(a.perturbed_decomposition, a))


def _canonical_cyclic_condition(a: Analysis) -> float:
    return natural.is_canonical(a.pair.T, a.P).cyclic_condition


def _canonical_projections_vanish(a: Analysis) -> float:
    defects = natural.is_canonical(a.pair.T, a.P)
    return _max(defects.p2, defects.p4)


def _canonical_criteria_agree(a: Analysis) -> float:
    tol = a.settings.inversion_tol
    torsions = (a.pair.T, a.perturbed_torsion)
    return _max(*(_agreement(True, natural.is_canonical(T, a.P, tol).criteria_agree) for T in torsions))


def _canonical_torsion_from_phi(a: Analysis) -> float:
    return (a.pair.T - natural.torsion_from_phi(a.phi, a.P)).max_abs()


def _torsion_decomposition(a: Analysis) -> float:
    defects = [a.decomposition.residual, a.perturbed_decomposition.residual]
    for decomposition in (a.decomposition, a.perturbed_decomposition):
        parts = decomposition.components
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                defects.append(abs(tensor.inner(parts[i], parts[j], a.g_inv)))
    return _max(*defects)


def _deformed_curvature(a: Analysis) -> float:
    expected = curvature.deformed_curvature(a.summary.R, a.pair.Q, a.pair.nabla, a.g_inv)
    return (a.summary.R_prime - expected).max_abs()


def _canonical_curvature_symmetries(a: Analysis) -> float:
    defects = curvature.is_p_tensor(a.summary.R_prime, a.P)
    return _max(defects.antisymmetry_xy, defects.antisymmetry_zw, defects.p_invariance)


def _levi_civita_curvature_like(a: Analysis) -> float:
    defects = curvature.is_curvature_like(a.summary.R)
    return _max(defects.antisymmetry_xy, defects.antisymmetry_zw, defects.bianchi)


def _torsion_bianchi_identity(a: Analysis) -> float:
    return (tensor.cyclic_sum_first3(a.summary.R_prime) - a.torsion_bianchi).max_abs()


def _deformation_from_torsion(a: Analysis) -> float:
    return _max((a.pair.Q - natural.hayden_q_from_T(a.pair.T)).max_abs(),
                (natural.deformation_of(a.perturbed_natural, a.manifold)
                 - natural.hayden_q_from_T(a.perturbed_torsion)).max_abs())


def _parallel_simultaneity(a: Analysis) -> float:
    if a.parallel is not None:
        return _agreement(True, a.parallel.simultaneous)
    pair = a.pair
    norms = [covariant_derivative(pair.nabla_prime, value).max_abs() for value in (pair.T, pair.Q, a.F)]
    vanishing = [norm <= a.settings.inversion_tol * max(1., pair.T.max_abs()) for norm in norms]
    return _agreement(True, all(vanishing) or not any(vanishing))


# --- checks valid on W3

def _nabla_P_norm_crossed(a: Analysis) -> float:
    return _relative(crossed_square_norm_nabla_P(a.manifold, a.F), a.nabla_P_square_norm)


def _nabla_P_norm_scalar(a: Analysis) -> float:
    return _relative(2 * (a.summary.tau - a.summary.tau_star_star), a.nabla_P_square_norm)


def _phi_w3_forms(a: Analysis) -> float:
    return _max((a.phi - natural.phi_from_F_w3(a.F, a.P)).max_abs(),
                (a.phi - natural.phi_from_F_w3_short(a.F, a.P)).max_abs())


def _canonical_torsion_w3_symmetries(a: Analysis) -> float:
    T, P = a.pair.T, a.P
    P_x = rearranged(T, 'Px,y,z', P)
    return _max((P_x - rearranged(T, 'x,Py,z', P)).max_abs(),
                (P_x + rearranged(T, 'x,y,Pz', P)).max_abs(),
                (T + rearranged(T, 'y,x,z')).max_abs())


def _canonical_torsion_in_p3(a: Analysis) -> float:
    decomposition = a.decomposition
    return _max((a.pair.T - decomposition.p3).max_abs(),
                decomposition.p1.max_abs(), decomposition.p2.max_abs(), decomposition.p4.max_abs())


def _canonical_routes_agree(a: Analysis) -> float:
    difference = a.pair.route_difference
    return 0. if difference is None else difference


def _torsion_from_F(a: Analysis) -> float:
    tol = a.settings.classification_tol
    return _max((a.pair.T - natural.torsion_from_F(a.F, a.P, tol)).max_abs(),
                (a.F - natural.f_from_torsion(a.pair.T, a.P)).max_abs())


def _deformation_from_F(a: Analysis) -> float:
    Q, F, P = a.pair.Q, a.F, a.P
    return _max((Q - natural.q_from_F(F, P, a.settings.classification_tol)).max_abs(),
                (Q + rearranged(Q, 'y,x,z') + rearranged(F, 'Pz,x,y', P)).max_abs())


def _deformation_traces(a: Analysis) -> float:
    Q = a.pair.Q
    DQ = covariant_derivative(a.pair.nabla, Q)
    return _max(tensor.contract(Q, a.g_inv, 0, 1).max_abs(),
                tensor.contract(DQ, a.g_inv, 1, 2).max_abs())


def _ricci_deformation(a: Analysis) -> float:
    expected = curvature.deformed_ricci(a.summary.rho, a.pair.Q, a.pair.nabla, a.g_inv)
    return (a.summary.rho_prime - expected).max_abs()


def _scalar_deformation(a: Analysis) -> float:
    crossed = curvature.crossed_q_contraction(a.pair.Q, a.g_inv)
    return _relative(a.summary.tau_prime, a.summary.tau + crossed)


def _deformation_contraction_eighth(a: Analysis) -> float:
    crossed = curvature.crossed_q_contraction(a.pair.Q, a.g_inv)
    auxiliary = curvature.auxiliary_contraction(a.F, a.P, a.g_inv)
    expected = a.nabla_P_square_norm / 8
    return _max(_relative(crossed, expected), _relative(auxiliary, expected))


def _scalar_gap_eighth(a: Analysis) -> float:
    return _relative(a.summary.scalar_gap, a.nabla_P_square_norm / 8)


def _scalar_gap_characterizes_w0(a: Analysis) -> float:
    tol = a.settings.relative_tol
    scale = max(1., abs(a.summary.tau))
    return _agreement(abs(a.summary.scalar_gap) <= tol * scale, a.nabla_P_square_norm <= 8 * tol * scale)


# --- checks valid on strict W3

def _natural_torsion_p1_vanishes(a: Analysis) -> float:
    return _max(a.decomposition.p1.max_abs(), a.perturbed_decomposition.p1.max_abs())


def _natural_torsion_p3_magnitude(a: Analysis) -> float:
    return min(a.decomposition.p3.max_abs(), a.perturbed_decomposition.p3.max_abs())


def _levi_civita_p_invariance(a: Analysis) -> float:
    return curvature.is_p_tensor(a.summary.R, a.P).p_invariance


def _torsion_parallelism_ratio(a: Analysis) -> float:
    return a.parallel.norm_nabla_prime_T / max(a.parallel.norm_T, a.settings.tiny_torsion)


# --- conditional on the canonical curvature being a P-tensor

def _p_tensor_pairing(a: Analysis) -> float:
    return curvature.p_tensor_pairing(a.F, a.P, a.g_inv).max_abs()


# --- conditional on parallel canonical torsion

def _parallel_curvature_from_torsion(a: Analysis) -> float:
    return a.parallel.curvature_from_torsion_defect


def _parallel_curvature_formula(a: Analysis) -> float:
    return a.parallel.curvature_with_F_defect


def _parallel_ricci_contracted(a: Analysis) -> float:
    return a.parallel.ricci_contracted_defect


def _parallel_ricci_relation(a: Analysis) -> float:
    return a.parallel.ricci_defect


def _parallel_scalar_relation(a: Analysis) -> float:
    return a.parallel.scalar_defect / max(1., abs(a.summary.tau_prime))


def _parallel_q_norm_quarter(a: Analysis) -> float:
    return _relative(a.parallel.q_contraction, a.nabla_P_square_norm / 4)


def _parallel_torsion_contraction_half(a: Analysis) -> float:
    return _relative(a.parallel.f_torsion_contraction, a.nabla_P_square_norm / 2)


def _parallel_scalar_gap_quarter(a: Analysis) -> float:
    return _relative(a.summary.scalar_gap, a.nabla_P_square_norm / 4)


def _check(id: str, description: str, gate: Gate, tolerance: Tolerance, compute, kind=CheckKind.VANISHES,
           refutable: bool = False) -> CheckDefinition:
    if tolerance is Tolerance.AGREEMENT:
        kind = CheckKind.AGREES
    return CheckDefinition(id, description, gate, kind, tolerance, compute, refutable)


A, W3, STRICT, PT, PAR = Gate.ALWAYS, Gate.W3, Gate.W3_STRICT, Gate.P_TENSOR, Gate.PARALLEL
EXACT, INV, REL, AGREE = Tolerance.EXACT, Tolerance.INVERSION, Tolerance.RELATIVE, Tolerance.AGREEMENT

CHECKS: tuple[CheckDefinition, ...] = (
    _check('fundamental_tensor_symmetries', 'F symmetric in y, z and anti-invariant under (y, z) -> (Py, Pz)',
           A, EXACT, _fundamental_tensor_symmetries),
    _check('w3_associated_nijenhuis_agreement', 'cyclic sum of F vanishes iff N* vanishes',
           A, AGREE, _w3_associated_nijenhuis_agreement),
    _check('nijenhuis_antisymmetry', 'N antisymmetric in its vector arguments', A, EXACT, _nijenhuis_antisymmetry),
    _check('associated_nijenhuis_symmetry', 'N* symmetric in its vector arguments',
           A, EXACT, _associated_nijenhuis_symmetry),
    _check('nijenhuis_bracket_form', 'N from F equals N from brackets', A, INV, _nijenhuis_bracket_form),
    _check('phi_from_fundamental_tensor', 'Phi recovered from F', A, INV, _phi_from_F),
    _check('fundamental_tensor_from_phi', 'F recovered from Phi', A, INV, _F_from_phi),
    _check('canonical_is_natural', "nabla' g = nabla' P = 0", A, EXACT, _canonical_is_natural),
    _check('canonical_preserves_associated_metric', "nabla' g~ = 0", A, INV, _canonical_preserves_associated_metric),
    _check('naturality_criteria_agree', 'naturality iff the two conditions on Q',
           A, AGREE, _naturality_criteria_agree),
    _check('natural_torsion_p1', 'p1 of natural torsion determined by Phi', A, INV, _natural_torsion_p1),
    _check('natural_torsion_p3', 'p3 of natural torsion equals -N / 4', A, INV, _natural_torsion_p3),
    _check('canonical_cyclic_condition', 'canonical torsion cyclic condition', A, INV, _canonical_cyclic_condition),
    _check('canonical_projections_vanish', 'p2 = p4 = 0 for canonical torsion', A, INV, _canonical_projections_vanish),
    _check('canonical_criteria_agree', 'cyclic condition iff p2 = p4 = 0', A, AGREE, _canonical_criteria_agree),
    _check('canonical_torsion_from_phi', 'canonical torsion in terms of Phi', A, INV, _canonical_torsion_from_phi),
    _check('torsion_decomposition', 'p1 + p2 + p3 + p4 = T with mutually orthogonal parts',
           A, INV, _torsion_decomposition),
    _check('deformed_curvature', "R' from R and the deformation Q", A, INV, _deformed_curvature),
    _check('canonical_curvature_symmetries', "R' antisymmetric pairs and P-invariant",
           A, INV, _canonical_curvature_symmetries),
    _check('levi_civita_curvature_like', 'R is curvature-like', A, INV, _levi_civita_curvature_like),
    _check('torsion_bianchi_identity', "cyclic sum of R' equals the torsion expression",
           A, INV, _torsion_bianchi_identity),
    _check('deformation_from_torsion', 'metric deformation recovered from its torsion',
           A, INV, _deformation_from_torsion),
    _check('parallel_simultaneity', "T, Q, F parallel under nabla' together or not at all",
           A, AGREE, _parallel_simultaneity),
    _check('nabla_P_norm_crossed', '||nabla P||^2 equals the crossed contraction', W3, REL, _nabla_P_norm_crossed),
    _check('nabla_P_norm_scalar', '||nabla P||^2 = 2 (tau - tau**)', W3, REL, _nabla_P_norm_scalar),
    _check('phi_w3_forms', 'Phi = -F(x, Py, z) - F(y, Px, z) = -F(Pz, x, y)', W3, INV, _phi_w3_forms),
    _check('canonical_torsion_w3_symmetries', 'T(Px, y, z) = T(x, Py, z) = -T(x, y, Pz)',
           W3, INV, _canonical_torsion_w3_symmetries),
    _check('canonical_torsion_in_p3', 'canonical torsion lies in the third component',
           W3, INV, _canonical_torsion_in_p3),
    _check('canonical_routes_agree', 'canonical connection from Phi equals the one from F',
           W3, INV, _canonical_routes_agree),
    _check('torsion_from_fundamental_tensor', 'T from F and F from T', W3, INV, _torsion_from_F),
    _check('deformation_from_fundamental_tensor', 'Q from F and its exchange identity',
           W3, INV, _deformation_from_F),
    _check('deformation_traces', 'traces of Q and nabla Q over their first pair vanish',
           W3, INV, _deformation_traces),
    _check('ricci_deformation', "rho' from rho and Q", W3, INV, _ricci_deformation),
    _check('scalar_deformation', "tau' = tau + crossed contraction of Q", W3, REL, _scalar_deformation),
    _check('deformation_contraction_eighth', 'crossed contraction of Q equals ||nabla P||^2 / 8',
           W3, REL, _deformation_contraction_eighth),
    _check('scalar_gap_eighth', "tau' = tau + ||nabla P||^2 / 8", W3, REL, _scalar_gap_eighth),
    _check('scalar_gap_characterizes_w0', "tau' = tau iff nabla P = 0", W3, AGREE, _scalar_gap_characterizes_w0),
    _check('natural_torsion_p1_vanishes', 'p1 = 0 for natural torsion', STRICT, INV, _natural_torsion_p1_vanishes),
    _check('natural_torsion_p3_nonzero', 'p3 != 0 for natural torsion',
           STRICT, Tolerance.BOUNDED_AWAY, _natural_torsion_p3_magnitude, CheckKind.BOUNDED_AWAY),
    _check('levi_civita_not_p_tensor', 'R is not P-invariant',
           STRICT, Tolerance.BOUNDED_AWAY, _levi_civita_p_invariance, CheckKind.BOUNDED_AWAY),
    _check('parallel_torsion_rigidity', 'non-parallel canonical torsion when nabla P != 0',
           STRICT, Tolerance.BOUNDED_AWAY, _torsion_parallelism_ratio, CheckKind.BOUNDED_AWAY, refutable=True),
    _check('p_tensor_pairing', "nabla P pairing vanishes when R' is a P-tensor",
           PT, Tolerance.P_TENSOR_PAIRING, _p_tensor_pairing),
    _check('parallel_curvature_from_torsion', "R' from R, Q and T under parallel torsion",
           PAR, INV, _parallel_curvature_from_torsion),
    _check('parallel_curvature_formula', "R' from R, Q, T and nabla P under parallel torsion",
           PAR, INV, _parallel_curvature_formula),
    _check('parallel_ricci_contracted', "rho' contracted from the parallel curvature formula",
           PAR, INV, _parallel_ricci_contracted),
    _check('parallel_ricci_relation', "rho' from rho, Q, T and nabla P", PAR, INV, _parallel_ricci_relation),
    _check('parallel_scalar_relation', "tau' from tau, |Q|^2 and the nabla P torsion contraction",
           PAR, REL, _parallel_scalar_relation),
    _check('parallel_q_norm_quarter', '|Q|^2 = ||nabla P||^2 / 4 under parallel torsion',
           PAR, REL, _parallel_q_norm_quarter, refutable=True),
    _check('parallel_torsion_contraction_half', 'nabla P torsion contraction = ||nabla P||^2 / 2',
           PAR, REL, _parallel_torsion_contraction_half, refutable=True),
    _check('parallel_scalar_gap_quarter', "tau' = tau + ||nabla P||^2 / 4 under parallel torsion",
           PAR, REL, _parallel_scalar_gap_quarter, refutable=True),
)

CHECK_IDS: tuple[str, ...] = tuple(check.id for check in CHECKS)


def run_check(check: CheckDefinition, analysis: Analysis) -> CheckResult:
    tol = check.tolerance_value(analysis)
    if not check.gate.is_open(analysis):
        return CheckResult(check.id, None, tol, CheckStatus.SKIPPED, f'hypothesis {check.gate.value} unmet')

    try:
        value = float(check.compute(analysis))
    except AlmostProductError as e:
        logging.warning(f'Check {check.id} could not be evaluated: {e}')
        return CheckResult(check.id, None, tol, CheckStatus.FAIL, str(e))

    if check.kind is CheckKind.BOUNDED_AWAY:
        holds = value > tol
    else:
        holds = value <= tol

    note = ''
    if holds:
        status = CheckStatus.PASS
    elif check.refutable:
        status = CheckStatus.WARN
        note = 'counterexample: hypothesis holds, stated conclusion fails'
    else:
        status = CheckStatus.FAIL

    if check.id == 'parallel_torsion_rigidity' and analysis.parallel.norm_T < analysis.settings.tiny_torsion:
        status, note = CheckStatus.WARN, 'torsion below the resolvable magnitude'

    if status is not CheckStatus.PASS:
        logging.info(f'Check {check.id}: {status.value} (value {value:.3e}, tol {tol:.1e}) {note}')
    return CheckResult(check.id, value, tol, status, note)


def run_checks(analysis: Analysis) -> list[CheckResult]:
    return [run_check(check, analysis) for check in CHECKS]
