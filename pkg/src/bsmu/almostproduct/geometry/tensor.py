from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from bsmu.almostproduct.core.errors import DegreeMismatch, NonFiniteComponents, SlotOutOfRange

if TYPE_CHECKING:
    from typing import Sequence

    ArrayOrTensor = np.ndarray | 'Tensor'


DEFAULT_VARIABLES = 'xyzwuv'


@dataclass(frozen=True, eq=False)
class Tensor:
    """
    Dense multilinear form on the frame {e_1, ..., e_n}.
    components[i_1, ..., i_k] = T(e_i_1, ..., e_i_k). The array is copied and made read-only.
    A degree-0 tensor holds a scalar and needs an explicit |dim|.
    """
    components: np.ndarray
    dim: int | None = None

    def __post_init__(self):
        components = np.array(self.components, dtype=np.float64)
        if components.ndim == 0:
            if self.dim is None:
                raise DegreeMismatch('Scalar tensor needs an explicit dimension')
            dim = self.dim
        else:
            dim = components.shape[0]
            if any(size != dim for size in components.shape):
                raise DegreeMismatch(f'Tensor components must have equal axes, got shape {components.shape}')
            if self.dim is not None and self.dim != dim:
                raise DegreeMismatch(f'Declared dimension {self.dim} does not match components of size {dim}')
        if not np.all(np.isfinite(components)):
            raise NonFiniteComponents('Tensor components contain NaN or infinity')
        components.setflags(write=False)
        object.__setattr__(self, 'components', components)
        object.__setattr__(self, 'dim', dim)

    @property
    def degree(self) -> int:
        return self.components.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.components.shape

    def max_abs(self) -> float:
        if self.components.size == 0:
            return 0.
        return float(np.max(np.abs(self.components)))

    def scalar(self) -> float:
        if self.degree != 0:
            raise DegreeMismatch(f'Only degree-0 tensors are scalars, this one has degree {self.degree}')
        return float(self.components)

    def __add__(self, other: Tensor) -> Tensor:
        _require_same_shape(self, other)
        return Tensor(self.components + other.components, self.dim)

    def __sub__(self, other: Tensor) -> Tensor:
        _require_same_shape(self, other)
        return Tensor(self.components - other.components, self.dim)

    def __neg__(self) -> Tensor:
        return Tensor(-self.components, self.dim)

    def __mul__(self, factor: float) -> Tensor:
        return Tensor(self.components * factor, self.dim)

    __rmul__ = __mul__

    def __truediv__(self, divisor: float) -> Tensor:
        return Tensor(self.components / divisor, self.dim)

    def __repr__(self) -> str:
        return f'Tensor(degree={self.degree}, dim={self.dim})'


def _require_same_shape(a: Tensor, b: Tensor):
    if a.shape != b.shape:
        raise DegreeMismatch(f'Tensor shapes differ: {a.shape} and {b.shape}')


def components_of(value: ArrayOrTensor) -> np.ndarray:
    return value.components if isinstance(value, Tensor) else np.asarray(value, dtype=np.float64)


def _check_slot(t: Tensor, slot: int):
    if not 0 <= slot < t.degree:
        raise SlotOutOfRange(f'Slot {slot} is out of range for a tensor of degree {t.degree}')


def einsum(subscripts: str, *operands: ArrayOrTensor, dim: int | None = None) -> Tensor:
    result = np.einsum(subscripts, *(components_of(operand) for operand in operands))
    if dim is None:
        dim = next(components_of(operand).shape[0] for operand in operands)
    return Tensor(result, dim)


def compose_P(t: Tensor, P: np.ndarray, slot: int) -> Tensor:
    """Substitute P into one argument: result(..., v, ...) = t(..., P v, ...)."""
    _check_slot(t, slot)
    moved = np.tensordot(t.components, P, axes=([slot], [0]))
    return Tensor(np.moveaxis(moved, -1, slot), t.dim)


def rearranged(t: Tensor, signature: str, P: np.ndarray | None = None,
               variables: str = DEFAULT_VARIABLES) -> Tensor:
    """
    Evaluate |t| on permuted and P-substituted arguments.
    rearranged(T, 'Pz,x,Py', P) is the tensor (x, y, z) -> T(Pz, x, Py).
    Output slots follow the order of |variables|.
    """
    arguments = [argument.strip() for argument in signature.split(',')]
    if len(arguments) != t.degree:
        raise DegreeMismatch(f'Signature {signature!r} has {len(arguments)} arguments for a degree {t.degree} tensor')

    letters = ''
    result = t
    for slot, argument in enumerate(arguments):
        if argument.startswith('P'):
            if P is None:
                raise DegreeMismatch(f'Signature {signature!r} substitutes P, but no P was given')
            result = compose_P(result, P, slot)
            argument = argument[1:]
        if len(argument) != 1 or argument not in variables:
            raise DegreeMismatch(f'Unknown argument {argument!r} in signature {signature!r}')
        letters += argument

    output = variables[:t.degree]
    if sorted(letters) != sorted(output):
        raise DegreeMismatch(f'Signature {signature!r} must use each of {output!r} exactly once')
    return einsum(f'{letters}->{output}', result)


def raise_slot(t: Tensor, g_inv: np.ndarray, slot: int) -> Tensor:
    """Raise one index with g^{-1}; the result is stored with the same slot order."""
    _check_slot(t, slot)
    moved = np.tensordot(t.components, g_inv, axes=([slot], [0]))
    return Tensor(np.moveaxis(moved, -1, slot), t.dim)


def lower_slot(t: Tensor, g: np.ndarray, slot: int) -> Tensor:
    return raise_slot(t, g, slot)


def contract(t: Tensor, g_inv: np.ndarray, slot_a: int, slot_b: int) -> Tensor:
    """Metric trace g^{ij} t(..., e_i, ..., e_j, ...) over two distinct slots."""
    _check_slot(t, slot_a)
    _check_slot(t, slot_b)
    if slot_a == slot_b:
        raise SlotOutOfRange(f'Contraction needs two distinct slots, got {slot_a} twice')

    free = [slot for slot in range(t.degree) if slot not in (slot_a, slot_b)]
    pair_a, pair_b = t.degree, t.degree + 1
    t_indices = [pair_a if slot == slot_a else pair_b if slot == slot_b else slot for slot in range(t.degree)]
    result = np.einsum(t.components, t_indices, g_inv, [pair_a, pair_b], free)
    return Tensor(result, t.dim)


def raised_all(t: Tensor, g_inv: np.ndarray) -> Tensor:
    result = t
    for slot in range(t.degree):
        result = raise_slot(result, g_inv, slot)
    return result


def inner(t: Tensor, s: Tensor, g_inv: np.ndarray) -> float:
    _require_same_shape(t, s)
    return float(np.sum(raised_all(t, g_inv).components * s.components))


def norm_sq(t: Tensor, g_inv: np.ndarray) -> float:
    return inner(t, t, g_inv)


def norm(t: Tensor, g_inv: np.ndarray) -> float:
    return float(np.sqrt(max(norm_sq(t, g_inv), 0.)))


def cyclic_sum3(t: Tensor) -> Tensor:
    """S t(x, y, z) = t(x, y, z) + t(y, z, x) + t(z, x, y)."""
    if t.degree != 3:
        raise DegreeMismatch(f'Cyclic sum needs a degree 3 tensor, got degree {t.degree}')
    return t + rearranged(t, 'y,z,x') + rearranged(t, 'z,x,y')


def cyclic_sum_first3(t: Tensor) -> Tensor:
    """Cyclic sum over the first three arguments of a degree 4 tensor, the last one fixed."""
    if t.degree != 4:
        raise DegreeMismatch(f'Cyclic sum over first three slots needs a degree 4 tensor, got degree {t.degree}')
    return t + rearranged(t, 'y,z,x,w') + rearranged(t, 'z,x,y,w')


def zeros(dim: int, degree: int) -> Tensor:
    return Tensor(np.zeros((dim,) * degree), dim)


def stack_max_abs(tensors: Sequence[Tensor]) -> float:
    return max((t.max_abs() for t in tensors), default=0.)
