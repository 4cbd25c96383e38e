from __future__ import annotations

from typing import TYPE_CHECKING, Callable

import numpy as np

from bsmu.almostproduct.geometry.frame import validate

if TYPE_CHECKING:
    from bsmu.almostproduct.geometry.frame import FrameManifold


HAND_CONSTRUCTION = 'hand construction'
SPLIT_P = np.diag([1., 1., -1., -1.])


def _split_manifold(entries, name: str, construction: str) -> FrameManifold:
    return validate(4, entries, np.eye(4), SPLIT_P, name=name,
                    provenance={'construction': construction, 'origin': HAND_CONSTRUCTION})


def heisenberg_line(name: str = 'heisenberg_r') -> FrameManifold:
    """[e0, e1] = e2 with e3 central: strict W3 with parallel canonical torsion."""
    return _split_manifold(
        [[0, 1, 2, 1.]], name, 'Heisenberg algebra times a line, brackets from the +1 to the -1 eigenspace')


def heisenberg_rotation(name: str = 'heisenberg_rotation') -> FrameManifold:
    """Heisenberg brackets plus e0 rotating the -1 eigenspace: strict W3 with non-parallel canonical torsion."""
    return _split_manifold(
        [[0, 1, 2, 1.], [0, 2, 3, 1.], [0, 3, 2, -1.]], name, 'rotation acting on the Heisenberg center')


BUILTIN_CATALOG: dict[str, Callable[[], FrameManifold]] = {
    'heisenberg_r': heisenberg_line,
    'heisenberg_rotation': heisenberg_rotation,
}
