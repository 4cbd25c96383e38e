from __future__ import annotations

import dataclasses
import logging
import os
import typing
from dataclasses import dataclass, fields
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING

from ruamel.yaml import YAML, YAMLError

from bsmu.almostproduct.core.errors import ConfigError

if TYPE_CHECKING:
    from typing import Any, Mapping, Self


PACKAGE_NAME = 'bsmu.almostproduct'
DEFAULT_CONFIG_DIR = ('configs', 'default', PACKAGE_NAME)
CONFIG_FILE_SUFFIX = '.conf.yaml'
DEFAULT_TOL_ENV_VAR = 'APM_DEFAULT_TOL'


@dataclass
class Config:
    """Dataclass config whose defaults can be overridden by a YAML mapping of the same shape."""

    @classmethod
    def config_file_name(cls) -> str:
        module = cls.__module__.removeprefix(f'{PACKAGE_NAME}.')
        return f'{module}.{cls.__name__}{CONFIG_FILE_SUFFIX}'

    @classmethod
    def from_dict(cls, data: Mapping[str, Any] | None) -> Self:
        data = dict(data or {})
        type_hints = typing.get_type_hints(cls)
        known_fields = {f.name: f for f in fields(cls)}
        unknown = set(data) - set(known_fields)
        if unknown:
            raise ConfigError(f'Unknown {cls.__name__} fields: {", ".join(sorted(unknown))}')

        values = {}
        for name, value in data.items():
            values[name] = _converted(type_hints[name], value, f'{cls.__name__}.{name}')
        config = cls(**values)
        config.validate()
        return config

    @classmethod
    def from_yaml(cls, path: Path) -> Self:
        try:
            with open(path, encoding='utf-8') as file:
                data = YAML(typ='safe').load(file)
        except (OSError, YAMLError) as e:
            raise ConfigError(f'Cannot read config file {path}: {e}') from e
        if data is not None and not isinstance(data, dict):
            raise ConfigError(f'Config file {path} must contain a mapping')
        return cls.from_dict(data)

    @classmethod
    def load_default(cls) -> Self:
        config_file = resources.files(PACKAGE_NAME).joinpath(*DEFAULT_CONFIG_DIR, cls.config_file_name())
        if not config_file.is_file():
            logging.debug(f'No default config file for {cls.__name__}, using built-in values')
            return cls.from_dict({})
        with resources.as_file(config_file) as path:
            return cls.from_yaml(path)

    def merged(self, **overrides) -> Self:
        overrides = {name: value for name, value in overrides.items() if value is not None}
        config = dataclasses.replace(self, **overrides)
        config.validate()
        return config

    def validate(self):
        pass


def _converted(field_type, value, name: str):
    if isinstance(field_type, type):
        if issubclass(field_type, Config):
            if not isinstance(value, dict):
                raise ConfigError(f'{name} must be a mapping')
            return field_type.from_dict(value)
        if issubclass(field_type, Enum):
            try:
                return field_type(value)
            except ValueError as e:
                choices = ', '.join(member.value for member in field_type)
                raise ConfigError(f'{name} must be one of: {choices}') from e
        if field_type is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        if field_type is int and isinstance(value, int) and not isinstance(value, bool):
            return value
        if field_type in (float, int):
            raise ConfigError(f'{name} must be a number, got {value!r}')
    return value


def env_default_tolerance() -> float | None:
    value = os.environ.get(DEFAULT_TOL_ENV_VAR)
    if value is None or value == '':
        return None
    try:
        tolerance = float(value)
    except ValueError as e:
        raise ConfigError(f'{DEFAULT_TOL_ENV_VAR} must be a number, got {value!r}') from e
    if tolerance <= 0:
        raise ConfigError(f'{DEFAULT_TOL_ENV_VAR} must be positive, got {tolerance}')
    return tolerance
