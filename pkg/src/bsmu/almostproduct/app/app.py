from __future__ import annotations

import argparse
import logging
import sys
from enum import IntEnum
from pathlib import Path
from typing import TYPE_CHECKING

import coloredlogs

from bsmu.almostproduct import __title__, __version__
from bsmu.almostproduct.core.config import env_default_tolerance
from bsmu.almostproduct.core.errors import (
    AlmostProductError, ConfigError, ManifoldValidationError, NoSolutionFound, SpecParseError)
from bsmu.almostproduct.core.specio import read_manifold
from bsmu.almostproduct.verification.batch import verify_dir
from bsmu.almostproduct.verification.report import OverallStatus, ReportFormat, verify
from bsmu.almostproduct.verification.search import SearchConfig, SearchFamily, search_w3, write_fixtures
from bsmu.almostproduct.verification.settings import VerificationSettings

if TYPE_CHECKING:
    from typing import Sequence

    from bsmu.almostproduct.core.config import Config


LOG_FORMAT = '%(asctime)s %(levelname)s %(message)s'


class ExitCode(IntEnum):
    PASS = 0
    VERIFICATION_FAILED = 1
    VALIDATION_ERROR = 2
    IO_ERROR = 3


class AlmostProductApp:
    TITLE = __title__
    VERSION = __version__

    def __init__(self, stdout=None, stderr=None):
        self._stdout = stdout or sys.stdout
        self._stderr = stderr or sys.stderr

    def run(self, argv: Sequence[str] | None = None) -> int:
        args = self._create_arg_parser().parse_args(argv)
        coloredlogs.install(level=args.log_level, fmt=LOG_FORMAT, stream=self._stderr)
        logging.debug(f'{self.TITLE} {self.VERSION}: {args.command}')

        try:
            return int(args.handler(args))
        except NoSolutionFound as e:
            logging.warning(f'No solution found (null space dimension {e.null_space_dim}): {e}')
            return ExitCode.PASS
        except SpecParseError as e:
            self._error(str(e))
            return ExitCode.IO_ERROR
        except ManifoldValidationError as e:
            message = str(e)
            if e.entries is not None:
                message += f'\noffending entries: {_entries_text(e.entries)}'
            self._error(message)
            return ExitCode.VALIDATION_ERROR
        except ConfigError as e:
            self._error(f'Config error: {e}')
            return ExitCode.VALIDATION_ERROR
        except AlmostProductError as e:
            self._error(str(e))
            return ExitCode.VALIDATION_ERROR
        except OSError as e:
            self._error(f'I/O error: {e}')
            return ExitCode.IO_ERROR

    def _create_arg_parser(self) -> argparse.ArgumentParser:
        arg_parser = argparse.ArgumentParser(prog='apm', description=f'{self.TITLE} {self.VERSION}')
        arg_parser.add_argument('--version', action='version', version=f'%(prog)s {self.VERSION}')
        arg_parser.add_argument(
            '--log-level', default='WARNING', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
            help='Logging level (default: WARNING)')
        arg_parser.add_argument(
            '--config', type=Path, help='Directory with *.conf.yaml files overriding the packaged defaults')
        subparsers = arg_parser.add_subparsers(dest='command', required=True)

        validate_parser = subparsers.add_parser('validate', help='Check every invariant of a manifold spec file')
        validate_parser.add_argument('path', type=Path)
        validate_parser.set_defaults(handler=self._validate)

        verify_parser = subparsers.add_parser('verify', help='Run every identity check on a manifold spec file')
        verify_parser.add_argument('path', type=Path)
        self._add_output_args(verify_parser)
        verify_parser.add_argument('--timing', action='store_true', help='Include per-phase timings')
        verify_parser.set_defaults(handler=self._verify)

        search_parser = subparsers.add_parser('search-w3', help='Search strict W3 manifolds and write them as specs')
        search_parser.add_argument('--dim', type=int)
        search_parser.add_argument('--seed', type=int)
        search_parser.add_argument('--family', choices=[family.value for family in SearchFamily])
        search_parser.add_argument('--max-candidates', type=int)
        search_parser.add_argument('--tol', type=float, help='Classification tolerance')
        search_parser.add_argument('--catalog', type=Path, help='Directory of specs screened by the catalog family')
        search_parser.add_argument('--out', type=Path, required=True, help='Output directory')
        search_parser.set_defaults(handler=self._search_w3)

        report_parser = subparsers.add_parser('report', help='Verify every spec file of a directory')
        report_parser.add_argument('directory', type=Path)
        self._add_output_args(report_parser)
        report_parser.add_argument('--jobs', type=int, default=1, help='Number of files verified in parallel')
        report_parser.set_defaults(handler=self._report)
        return arg_parser

    @staticmethod
    def _add_output_args(parser: argparse.ArgumentParser):
        parser.add_argument('--tol', type=float, help='Classification tolerance')
        parser.add_argument(
            '--format', dest='report_format', type=ReportFormat, default=ReportFormat.JSON,
            choices=list(ReportFormat), help='Output format (json or text)')

    def _validate(self, args: argparse.Namespace) -> ExitCode:
        manifold = read_manifold(args.path)
        self._print(f'{args.path}: valid manifold {manifold.name!r} of dimension {manifold.dim}')
        return ExitCode.PASS

    def _verify(self, args: argparse.Namespace) -> ExitCode:
        settings = self._verification_settings(args)
        manifold = read_manifold(args.path)
        report = verify(manifold, settings)
        self._print(report.formatted(args.report_format, args.timing))
        return ExitCode.VERIFICATION_FAILED if report.status is OverallStatus.FAIL else ExitCode.PASS

    def _search_w3(self, args: argparse.Namespace) -> ExitCode:
        config = _loaded_config(SearchConfig, args.config).merged(
            dim=args.dim,
            seed=args.seed,
            family=None if args.family is None else SearchFamily(args.family),
            max_candidates=args.max_candidates,
            tolerance=_tolerance_override(args),
        )
        manifolds = search_w3(config, args.catalog)
        for path in write_fixtures(manifolds, args.out):
            self._print(str(path))
        return ExitCode.PASS

    def _report(self, args: argparse.Namespace) -> ExitCode:
        if not args.directory.is_dir():
            self._error(f'Not a directory: {args.directory}')
            return ExitCode.IO_ERROR
        settings = self._verification_settings(args)
        result = verify_dir(args.directory, settings, args.jobs)
        self._print(result.formatted(args.report_format))
        return ExitCode.PASS if result.counts.all_passed else ExitCode.VERIFICATION_FAILED

    @staticmethod
    def _verification_settings(args: argparse.Namespace) -> VerificationSettings:
        return _loaded_config(VerificationSettings, args.config).merged(classification_tol=_tolerance_override(args))

    def _print(self, text: str):
        print(text, file=self._stdout)

    def _error(self, text: str):
        print(f'error: {text}', file=self._stderr)


def _loaded_config(config_cls: type[Config], config_dir: Path | None) -> Config:
    if config_dir is not None:
        config_file = config_dir / config_cls.config_file_name()
        if config_file.is_file():
            logging.info(f'Loading {config_cls.__name__} from {config_file}')
            return config_cls.from_yaml(config_file)
    return config_cls.load_default()


def _tolerance_override(args: argparse.Namespace) -> float | None:
    """--tol wins over the APM_DEFAULT_TOL environment variable."""
    if args.tol is not None:
        if args.tol <= 0:
            raise ConfigError(f'--tol must be positive, got {args.tol}')
        return args.tol
    return env_default_tolerance()


def _entries_text(entries) -> str:
    if hasattr(entries, 'tolist'):
        entries = entries.tolist()
    return str(entries)
