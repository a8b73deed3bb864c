#!/usr/bin/env python3
"""
Bit-string values, Hamming automorphisms, OneMax evaluation and the binary-value bijection.

Positions are 1-based throughout (position j of an n-bit string, j in [1..n]); the
underlying numpy array is 0-based and never leaves this module's API unwrapped.
"""

from dataclasses import dataclass
from itertools import permutations, product
from typing import FrozenSet, Iterable, Iterator, Sequence, Tuple, Union
import logging

import numpy as np

logger = logging.getLogger(__name__)


class RejectedInputError(ValueError):
    """Input strings of mismatching length or values outside their domain."""


def _require_same_length(*strings: 'BitString'):
    lengths = {len(s) for s in strings}
    if len(lengths) > 1:
        raise RejectedInputError(f"Length mismatch: {sorted(lengths)}")


class BitString:
    """Immutable fixed-length binary string."""

    __slots__ = ('_bits', '_key')

    def __init__(self, bits: Union[Sequence[int], np.ndarray]):
        arr = np.array(bits, dtype=np.uint8).reshape(-1)
        if arr.size == 0:
            raise RejectedInputError("BitString length must be positive")
        if np.any(arr > 1):
            raise RejectedInputError("BitString entries must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr
        self._key = arr.tobytes()

    # ---- construction ----

    @classmethod
    def from_string(cls, text: str) -> 'BitString':
        """Parse the textual rendering, e.g. '1011'."""
        text = text.strip()
        if not text or any(c not in '01' for c in text):
            raise RejectedInputError(f"Not a bit string: {text!r}")
        return cls(np.frombuffer(text.encode('ascii'), dtype=np.uint8) - ord('0'))

    @classmethod
    def zeros(cls, n: int) -> 'BitString':
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def ones(cls, n: int) -> 'BitString':
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def unit(cls, j: int, n: int) -> 'BitString':
        """The unit vector e_j of length n."""
        if not 1 <= j <= n:
            raise RejectedInputError(f"Position {j} outside [1..{n}]")
        arr = np.zeros(n, dtype=np.uint8)
        arr[j - 1] = 1
        return cls(arr)

    @classmethod
    def from_positions(cls, positions: Iterable[int], n: int) -> 'BitString':
        """Indicator string of a set of 1-based positions."""
        arr = np.zeros(n, dtype=np.uint8)
        idx = np.fromiter(positions, dtype=np.int64)
        if idx.size:
            if idx.min() < 1 or idx.max() > n:
                raise RejectedInputError(f"Positions outside [1..{n}]")
            arr[idx - 1] = 1
        return cls(arr)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> 'BitString':
        return cls(rng.integers(0, 2, size=n, dtype=np.uint8))

    @classmethod
    def all_strings(cls, n: int) -> Iterator['BitString']:
        """Every string of length n in binary-value order."""
        for bits in product((0, 1), repeat=n):
            yield cls(bits)

    # ---- access ----

    @property
    def array(self) -> np.ndarray:
        """Read-only 0-based view of the bits."""
        return self._bits

    def __len__(self) -> int:
        return self._bits.size

    def bit(self, j: int) -> int:
        """Bit at 1-based position j."""
        if not 1 <= j <= len(self):
            raise RejectedInputError(f"Position {j} outside [1..{len(self)}]")
        return int(self._bits[j - 1])

    def ones_count(self) -> int:
        return int(self._bits.sum())

    # ---- algebra ----

    def __xor__(self, other: 'BitString') -> 'BitString':
        _require_same_length(self, other)
        return BitString(self._bits ^ other._bits)

    def complement(self) -> 'BitString':
        return BitString(1 - self._bits)

    def flip_positions(self, mask: np.ndarray) -> 'BitString':
        """Flip every position where the 0-based boolean mask is set."""
        return BitString(self._bits ^ mask.astype(np.uint8))

    def hamming_distance(self, other: 'BitString') -> int:
        _require_same_length(self, other)
        return int(np.count_nonzero(self._bits != other._bits))

    # ---- value semantics ----

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __str__(self) -> str:
        return (self._bits + ord('0')).tobytes().decode('ascii')

    def __repr__(self) -> str:
        return f"BitString('{self}')"

    def __reduce__(self):
        return (BitString.from_string, (str(self),))


@dataclass(frozen=True)
class IndexSet:
    """A set of distinct 1-based positions within [1..universe]."""

    universe: int
    members: FrozenSet[int]

    def __post_init__(self):
        if self.universe < 1:
            raise RejectedInputError(f"Universe must be positive, got {self.universe}")
        object.__setattr__(self, 'members', frozenset(int(j) for j in self.members))
        bad = [j for j in self.members if not 1 <= j <= self.universe]
        if bad:
            raise RejectedInputError(f"Indices {sorted(bad)[:5]} outside [1..{self.universe}]")

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> 'IndexSet':
        return cls(int(mask.size), frozenset((np.flatnonzero(mask) + 1).tolist()))

    def mask(self) -> np.ndarray:
        out = np.zeros(self.universe, dtype=bool)
        if self.members:
            out[np.fromiter(self.members, dtype=np.int64) - 1] = True
        return out

    def sorted(self) -> Tuple[int, ...]:
        return tuple(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, j) -> bool:
        return j in self.members

    def __iter__(self):
        return iter(self.sorted())


class Automorphism:
    """
    Hamming automorphism alpha(x) = pi(x XOR shift).

    `perm` is 1-based: perm[j-1] = pi(j), and pi(x)_j = x_{pi(j)}. The shift is applied
    before the permutation.
    """

    __slots__ = ('perm', 'shift', '_perm0', '_inv0')

    def __init__(self, perm: Sequence[int], shift: BitString):
        perm = tuple(int(p) for p in perm)
        n = len(perm)
        if sorted(perm) != list(range(1, n + 1)):
            raise RejectedInputError("perm must be a bijection on [1..n]")
        if len(shift) != n:
            raise RejectedInputError(f"Shift length {len(shift)} does not match perm length {n}")
        self.perm = perm
        self.shift = shift
        self._perm0 = np.array(perm, dtype=np.int64) - 1
        self._inv0 = np.argsort(self._perm0)

    @classmethod
    def identity(cls, n: int) -> 'Automorphism':
        return cls(range(1, n + 1), BitString.zeros(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> 'Automorphism':
        perm = rng.permutation(n) + 1
        return cls(perm.tolist(), BitString.random(n, rng))

    @property
    def n(self) -> int:
        return len(self.perm)

    def __call__(self, x: BitString) -> BitString:
        return apply_automorphism(self, x)

    def map_index(self, j: int) -> int:
        """Where position j of x lands in alpha(x)."""
        return int(self._inv0[j - 1]) + 1

    def map_positions(self, positions: Iterable[int]) -> FrozenSet[int]:
        return frozenset(self.map_index(j) for j in positions)

    def inverse(self) -> 'Automorphism':
        # pi(x + v) = y  <=>  x = pi^-1(y) + v = pi^-1(y + pi(v))
        inv_perm = (self._inv0 + 1).tolist()
        return Automorphism(inv_perm, BitString(self.shift.array[self._perm0]))

    def compose(self, other: 'Automorphism') -> 'Automorphism':
        """self after other."""
        if other.n != self.n:
            raise RejectedInputError("Cannot compose automorphisms of different length")
        # pi1(pi2(x + v2) + v1) = pi1(pi2(x + v2 + pi2^-1(v1)))
        v1_back = BitString(self.shift.array[other._inv0])
        perm0 = other._perm0[self._perm0]
        return Automorphism((perm0 + 1).tolist(), other.shift ^ v1_back)

    def __eq__(self, other) -> bool:
        return isinstance(other, Automorphism) and self.perm == other.perm and self.shift == other.shift

    def __hash__(self) -> int:
        return hash((self.perm, self.shift))

    def __repr__(self) -> str:
        return f"Automorphism(perm={self.perm}, shift='{self.shift}')"


def all_automorphisms(n: int) -> Iterator[Automorphism]:
    """All n! * 2^n automorphisms; only sensible for n <= 6."""
    for perm in permutations(range(1, n + 1)):
        for shift in BitString.all_strings(n):
            yield Automorphism(perm, shift)


def onemax(x: BitString, z: BitString) -> int:
    """OM_z(x): number of positions where x and z agree."""
    _require_same_length(x, z)
    return int(np.count_nonzero(x.array == z.array))


def apply_automorphism(a: Automorphism, x: BitString) -> BitString:
    if len(x) != a.n:
        raise RejectedInputError(f"Automorphism of length {a.n} applied to string of length {len(x)}")
    return BitString((x.array ^ a.shift.array)[a._perm0])


def agreement_and_disagreement(x: BitString, y: BitString) -> Tuple[IndexSet, IndexSet]:
    """A(x, y) and D(x, y)."""
    _require_same_length(x, y)
    agree = x.array == y.array
    return IndexSet.from_mask(agree), IndexSet.from_mask(~agree)


def disagreement_mask(x: BitString, y: BitString) -> np.ndarray:
    """0-based boolean mask of D(x, y)."""
    _require_same_length(x, y)
    return x.array != y.array


def binary_value(w: BitString) -> int:
    """Bv(w) = sum_j 2^(b-j) w_j, most significant position first."""
    value = 0
    for bit in w.array.tolist():
        value = (value << 1) | bit
    return value


def binary_value_inverse(value: int, width: int) -> BitString:
    if width < 1:
        raise RejectedInputError(f"Width must be at least 1, got {width}")
    if not 0 <= value < (1 << width):
        raise RejectedInputError(f"Value {value} does not fit in {width} bits")
    return BitString([(value >> (width - 1 - j)) & 1 for j in range(width)])


def truncated_inverse(value: int, width: int) -> BitString:
    """Bv^-1 over width+1 bits with the leading (zero) bit dropped."""
    if width < 1:
        raise RejectedInputError(f"Width must be at least 1, got {width}")
    if not 0 <= value <= (1 << width) - 1:
        raise RejectedInputError(f"Value {value} out of range for width {width}")
    full = binary_value_inverse(value, width + 1)
    return BitString(full.array[1:])


def to_int(x: BitString) -> int:
    return binary_value(x)


def from_int(value: int, n: int) -> BitString:
    return binary_value_inverse(value, n)
