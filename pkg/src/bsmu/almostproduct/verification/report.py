from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from timeit import default_timer as timer
from typing import TYPE_CHECKING

from bsmu.almostproduct.verification.analysis import Analysis
from bsmu.almostproduct.verification.registry import CheckStatus, run_checks

if TYPE_CHECKING:
    from bsmu.almostproduct.geometry.frame import FrameManifold
    from bsmu.almostproduct.verification.registry import CheckResult
    from bsmu.almostproduct.verification.settings import VerificationSettings


class ReportFormat(Enum):
    JSON = 'json'
    TEXT = 'text'

    def __str__(self) -> str:
        return self.value


class OverallStatus(Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'


@dataclass
class VerificationReport:
    manifold: str
    classification: dict[str, float | str]
    checks: list[CheckResult]
    scalars: dict[str, float]
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def status(self) -> OverallStatus:
        if any(check.status is CheckStatus.FAIL for check in self.checks):
            return OverallStatus.FAIL
        return OverallStatus.PASS

    def count(self, status: CheckStatus) -> int:
        return sum(check.status is status for check in self.checks)

    def to_dict(self, include_timing: bool = False) -> dict:
        report = {
            'checks': [check.to_dict() for check in self.checks],
            'classification': dict(self.classification),
            'manifold': self.manifold,
            'scalars': dict(self.scalars),
            'status': self.status.value,
        }
        notes = {check.id: check.note for check in self.checks if check.status is CheckStatus.WARN}
        if notes:
            report['notes'] = notes
        if include_timing:
            report['timing'] = dict(self.timing)
        return report

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)

    def to_text(self, include_timing: bool = False) -> str:
        lines = [
            f'Manifold: {self.manifold}',
            f'Class: {self.classification["class_label"]} ({self.classification["display_name"]})',
            '',
        ]
        id_width = max((len(check.id) for check in self.checks), default=0)
        for check in self.checks:
            defect = '-' if check.defect is None else f'{check.defect:.3e}'
            line = f'{check.status.value:<8}{check.id:<{id_width}}  {defect:>10}  (tol {check.tol:.0e})'
            if check.note and check.status is not CheckStatus.SKIPPED:
                line += f'  {check.note}'
            lines.append(line)
        lines.append('')
        lines.extend(f'{name} = {value:.12g}' for name, value in self.scalars.items())
        if include_timing:
            lines.extend(f'{phase} time: {milliseconds:.3f} ms' for phase, milliseconds in self.timing.items())
        lines.append('')
        lines.append(
            f'Status: {self.status.value} '
            f'({self.count(CheckStatus.PASS)} passed, {self.count(CheckStatus.WARN)} warned, '
            f'{self.count(CheckStatus.FAIL)} failed, {self.count(CheckStatus.SKIPPED)} skipped)')
        return '\n'.join(lines)

    def formatted(self, report_format: ReportFormat, include_timing: bool = False) -> str:
        if report_format is ReportFormat.JSON:
            return self.to_json(include_timing)
        return self.to_text(include_timing)


def verify(manifold: FrameManifold, settings: VerificationSettings | None = None) -> VerificationReport:
    start = timer()
    analysis = Analysis(manifold, settings)
    checks = run_checks(analysis)

    classification = analysis.classification
    summary = analysis.summary
    report = VerificationReport(
        manifold=manifold.name,
        classification={
            'class_label': classification.class_label.value,
            'display_name': classification.class_label.display_name,
            'nabla_P_square_norm': classification.nabla_P_square_norm,
            'norm_F': classification.norm_F,
            'norm_N': classification.norm_N,
            'norm_N_star': classification.norm_N_star,
            'norm_cyclic_F': classification.norm_cyclic_F,
            'tolerance_used': classification.tolerance_used,
        },
        checks=checks,
        scalars={
            'nabla_P_square_norm': summary.nabla_P_square_norm,
            'tau': summary.tau,
            'tau_prime': summary.tau_prime,
            'tau_star': summary.tau_star,
            'tau_star_star': summary.tau_star_star,
        },
    )
    report.timing = {phase: seconds * 1000 for phase, seconds in analysis.timings.items()}
    report.timing['total'] = (timer() - start) * 1000
    logging.info(f'Verified {manifold.name!r}: {report.status.value} time: {timer() - start}')
    return report
