from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

from bsmu.almostproduct.core.errors import AlmostProductError
from bsmu.almostproduct.core.specio import read_manifold
from bsmu.almostproduct.verification.report import OverallStatus, ReportFormat, verify

if TYPE_CHECKING:
    from bsmu.almostproduct.verification.report import VerificationReport
    from bsmu.almostproduct.verification.settings import VerificationSettings


SPEC_FILE_SUFFIX = '.json'


@dataclass
class StatusCounts:
    passed: int = 0
    failed: int = 0
    errors: int = 0  # Files that could not be read or validated

    def __add__(self, other) -> StatusCounts:
        if not isinstance(other, StatusCounts):
            return NotImplemented
        return StatusCounts(
            passed=self.passed + other.passed,
            failed=self.failed + other.failed,
            errors=self.errors + other.errors,
        )

    def __iadd__(self, other) -> StatusCounts:
        if not isinstance(other, StatusCounts):
            return NotImplemented
        self.passed += other.passed
        self.failed += other.failed
        self.errors += other.errors
        return self

    @property
    def total(self) -> int:
        return self.passed + self.failed + self.errors

    @property
    def all_passed(self) -> bool:
        return self.failed == 0 and self.errors == 0

    def to_dict(self) -> dict[str, int]:
        return {'errors': self.errors, 'failed': self.failed, 'passed': self.passed, 'total': self.total}


@dataclass
class FileOutcome:
    path: Path
    report: VerificationReport | None = None
    error: str = ''

    @property
    def counts(self) -> StatusCounts:
        if self.report is None:
            return StatusCounts(errors=1)
        if self.report.status is OverallStatus.FAIL:
            return StatusCounts(failed=1)
        return StatusCounts(passed=1)

    def to_dict(self) -> dict:
        if self.report is None:
            return {'error': self.error, 'file': self.path.name, 'status': OverallStatus.FAIL.value}
        return {'file': self.path.name, 'report': self.report.to_dict()}


@dataclass
class BatchResult:
    outcomes: list[FileOutcome]

    @property
    def counts(self) -> StatusCounts:
        counts = StatusCounts()
        for outcome in self.outcomes:
            counts += outcome.counts
        return counts

    def to_json(self) -> str:
        return json.dumps(
            {'files': [outcome.to_dict() for outcome in self.outcomes], 'summary': self.counts.to_dict()},
            sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = []
        for outcome in self.outcomes:
            if outcome.report is None:
                lines.append(f'{OverallStatus.FAIL.value:<6}{outcome.path.name}  {outcome.error}')
            else:
                label = outcome.report.classification['class_label']
                lines.append(f'{outcome.report.status.value:<6}{outcome.path.name}  {label}')
        counts = self.counts
        lines.append(f'{counts.passed} passed, {counts.failed} failed, {counts.errors} unreadable')
        return '\n'.join(lines)

    def formatted(self, report_format: ReportFormat) -> str:
        return self.to_json() if report_format is ReportFormat.JSON else self.to_text()


def spec_files(directory: Path) -> list[Path]:
    return sorted(path for path in Path(directory).iterdir() if path.is_file() and path.suffix == SPEC_FILE_SUFFIX)


def verify_file(path: Path, settings: VerificationSettings | None = None) -> FileOutcome:
    try:
        manifold = read_manifold(path)
    except AlmostProductError as e:
        logging.error(f'Cannot verify {path.name}: {e}')
        return FileOutcome(path, error=f'{type(e).__name__}: {e}')
    return FileOutcome(path, report=verify(manifold, settings))


def verify_dir(directory: Path, settings: VerificationSettings | None = None, jobs: int = 1) -> BatchResult:
    """Verify every spec file of |directory|; outcomes are ordered by file name whatever the scheduling."""
    paths = spec_files(directory)
    if not paths:
        logging.warning(f'No manifold spec files in {directory}')
        return BatchResult([])

    logging.info(f'Verifying {len(paths)} files from {directory} with {jobs} jobs')
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        outcomes = list(executor.map(lambda path: verify_file(path, settings), paths))
    return BatchResult(outcomes)
