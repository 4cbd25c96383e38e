from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from bsmu.almostproduct.core.errors import SpecParseError
from bsmu.almostproduct.geometry.frame import validate

if TYPE_CHECKING:
    from typing import Any

    from bsmu.almostproduct.geometry.frame import FrameManifold


REQUIRED_KEYS = ('dimension', 'structure_constants', 'metric', 'product_structure')
INDENT = '  '


def manifold_from_dict(data: dict, source: str = '<dict>') -> FrameManifold:
    """Parse a manifold description; raises SpecParseError on malformed input and validation errors otherwise."""
    if not isinstance(data, dict):
        raise SpecParseError(f'{source}: top level must be an object')
    missing = [key for key in REQUIRED_KEYS if key not in data]
    if missing:
        raise SpecParseError(f'{source}: missing keys {", ".join(missing)}')

    dimension = data['dimension']
    if not isinstance(dimension, int) or isinstance(dimension, bool):
        raise SpecParseError(f'{source}: dimension must be an integer')

    entries = data['structure_constants']
    if not isinstance(entries, list) or any(not isinstance(entry, list) or len(entry) != 4 for entry in entries):
        raise SpecParseError(f'{source}: structure_constants must be a list of [i, j, k, value] entries')
    for entry in entries:
        if any(not isinstance(index, int) or isinstance(index, bool) for index in entry[:3]):
            raise SpecParseError(f'{source}: structure constant indices must be integers, got {entry}')

    try:
        metric = np.array(data['metric'], dtype=np.float64)
        product_structure = np.array(data['product_structure'], dtype=np.float64)
        structure_constants = np.array(entries, dtype=np.float64).reshape(-1, 4)
    except (TypeError, ValueError) as e:
        raise SpecParseError(f'{source}: non-numeric matrix entries ({e})') from e

    provenance = data.get('provenance', {})
    if not isinstance(provenance, dict):
        raise SpecParseError(f'{source}: provenance must be an object')

    return validate(
        dimension,
        structure_constants,
        metric,
        product_structure,
        name=str(data.get('name', '')),
        provenance=provenance,
    )


def read_manifold(path: Path) -> FrameManifold:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise SpecParseError(f'Cannot read {path}: {e}') from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(f'{path}: invalid JSON ({e})') from e
    logging.debug(f'Read manifold description {path}')
    return manifold_from_dict(data, str(path))


def manifold_to_dict(manifold: FrameManifold) -> dict[str, Any]:
    return {
        'dimension': manifold.dim,
        'metric': manifold.g.tolist(),
        'name': manifold.name,
        'product_structure': manifold.P.tolist(),
        'provenance': dict(manifold.provenance),
        'structure_constants': [[i, j, k, value] for i, j, k, value in manifold.structure_constants.entries()],
    }


def format_fixed_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    if not math.isfinite(value):
        raise SpecParseError(f'Cannot serialize non-finite value {value}')
    return f'{value:.16e}'


def dumps_fixture(value, level: int = 0) -> str:
    """Key-sorted JSON with every float in 17-digit exponent form; integers and strings as json writes them."""
    indent = INDENT * (level + 1)
    closing_indent = INDENT * level
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f'{indent}{json.dumps(str(key))}: {dumps_fixture(value[key], level + 1)}' for key in sorted(value)]
        return '{\n' + ',\n'.join(items) + f'\n{closing_indent}}}'
    if isinstance(value, (list, tuple)):
        if not value:
            return '[]'
        if all(not isinstance(item, (dict, list, tuple)) for item in value):
            return '[' + ', '.join(dumps_fixture(item, level + 1) for item in value) + ']'
        items = [f'{indent}{dumps_fixture(item, level + 1)}' for item in value]
        return '[\n' + ',\n'.join(items) + f'\n{closing_indent}]'
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_fixed_float(float(value))
    raise SpecParseError(f'Cannot serialize value of type {type(value).__name__}')


def write_manifold(manifold: FrameManifold, path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_fixture(manifold_to_dict(manifold)) + '\n', encoding='utf-8')
    logging.info(f'Wrote manifold {manifold.name!r} to {path}')
