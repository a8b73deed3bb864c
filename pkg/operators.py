#!/usr/bin/env python3
"""
Unbiased variation operators for block-wise OneMax optimization.

Covers storage creation by repeated halving of D(x, y^0), the address bijection sigma,
the write/decode storage protocol, consistent-block sampling, the y-update, and the
equivariance harness used to test every operator against Hamming automorphisms.

Storage addresses are 1-based in [1..2^m]. Cell labels are m-bit integers whose most
significant bit is the depth-1 split: bit 1 means y^1_j != x_j, deeper bits mean
y^{s+1}_j != y^s_j. sigma(a) is the position labelled a - 1.
"""

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import logging

import numpy as np

from bitstring import (
    Automorphism, BitString, IndexSet, RejectedInputError, all_automorphisms,
    disagreement_mask, truncated_inverse,
)
from config import config
from distinguishing import (
    DistinguishingSequence, EnumerationBudgetError, FingerprintIndex, feasible_values,
)

logger = logging.getLogger(__name__)

STRICT = 'strict'
UNBIASED = 'unbiased'
OPERATOR_MODES = (STRICT, UNBIASED)

# Support sets are enumerated by brute force only up to this length
SUPPORT_LIMIT = 12


class PreconditionFault(RuntimeError):
    """An operator was called on inputs outside its event (invalid frame, l' = 0, ...)."""


@dataclass
class ArityLog:
    """Distinct-parent counts of every operator invocation in a run."""

    entries: List[Tuple[str, int]] = field(default_factory=list)

    def record(self, operator: str, arity: int):
        self.entries.append((operator, arity))

    @property
    def max_arity(self) -> int:
        return max((a for _, a in self.entries), default=0)

    def by_operator(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for name, arity in self.entries:
            out[name] = max(out.get(name, 0), arity)
        return out


def _record(log: Optional[ArityLog], operator: str, arity: int):
    if log is not None:
        log.record(operator, arity)


@dataclass(frozen=True)
class StorageFrame:
    """(x, y, y^0..y^depth) together with the storage exponent and block length l'."""

    x: BitString
    y: BitString
    m: int
    block_len: int
    levels: Tuple[BitString, ...]

    def __post_init__(self):
        object.__setattr__(self, 'levels', tuple(self.levels))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def refined(self) -> bool:
        return self.depth == self.m

    @property
    def storage_mask(self) -> np.ndarray:
        return disagreement_mask(self.x, self.levels[0])

    def parents(self) -> Tuple[BitString, ...]:
        return (self.x, self.y) + self.levels


@dataclass(frozen=True)
class SigmaMap:
    """Bijection [1..2^m] -> D(x, y^0); mapping[a-1] is the 1-based position sigma(a)."""

    mapping: Tuple[int, ...]

    def __call__(self, address: int) -> int:
        if not 1 <= address <= len(self.mapping):
            raise RejectedInputError(f"Address {address} outside [1..{len(self.mapping)}]")
        return self.mapping[address - 1]

    def __len__(self) -> int:
        return len(self.mapping)

    def address_of(self, position: int) -> int:
        return self.mapping.index(position) + 1

    def positions(self, addresses: Sequence[int]) -> np.ndarray:
        """0-based positions for 1-based addresses."""
        table = np.asarray(self.mapping, dtype=np.int64)
        return table[np.asarray(addresses, dtype=np.int64) - 1] - 1


@dataclass(frozen=True)
class WriteRequest:
    """Payload r written into the storage addresses P (ranked ascending)."""

    r: BitString
    addresses: IndexSet

    def __post_init__(self):
        if len(self.r) != len(self.addresses):
            raise RejectedInputError(f"Payload of length {len(self.r)} for {len(self.addresses)} addresses")


@dataclass(frozen=True)
class ConsistentChoice:
    """Output of choose_consistent plus the size of the set it was drawn from."""

    q: BitString
    feasible_size: int
    anomaly: Optional[str] = None


# ==================== Sampling helpers ====================

def _uniform_below(bound: int, rng: np.random.Generator) -> int:
    """Uniform integer in [0, bound) for arbitrarily large bound."""
    if bound <= (1 << 62):
        return int(rng.integers(0, bound))
    bits = bound.bit_length()
    nbytes = (bits + 7) // 8
    while True:
        value = int.from_bytes(rng.bytes(nbytes), 'big') >> (8 * nbytes - bits)
        if value < bound:
            return value


def _sample_split(rng: np.random.Generator, cell: np.ndarray, dmask: Optional[np.ndarray],
                  flips: int, keep_unflipped: int, keep_flipped: int) -> np.ndarray:
    """
    Uniform subset of `cell` of size `flips` such that at least `keep_flipped` chosen and
    `keep_unflipped` unchosen positions lie in dmask.
    """
    if dmask is None:
        return rng.choice(cell, flips, replace=False)
    in_d = cell[dmask[cell]]
    out_d = cell[~dmask[cell]]
    lo = max(keep_flipped, flips - out_d.size, 0)
    hi = min(in_d.size - keep_unflipped, flips)
    if lo > hi:
        raise PreconditionFault(f"No split of {cell.size} positions keeps {keep_unflipped}/{keep_flipped} in D(x,y)")
    weights = [comb(in_d.size, j) * comb(out_d.size, flips - j) for j in range(lo, hi + 1)]
    draw = _uniform_below(sum(weights), rng)
    k = lo
    for k, weight in zip(range(lo, hi + 1), weights):
        if draw < weight:
            break
        draw -= weight
    return np.concatenate([
        rng.choice(in_d, k, replace=False),
        rng.choice(out_d, flips - k, replace=False),
    ]).astype(np.int64)


def _cell_quota(block_len: int, m: int, depth: int) -> np.ndarray:
    """Block addresses [1..l'] held by each cell at the given depth."""
    size = 1 << (m - depth)
    starts = np.arange(1 << depth, dtype=np.int64) * size
    return np.clip(block_len - starts, 0, size)


def block_reference_depth(block_len: int, m: int) -> int:
    """Least depth whose cells tile the block addresses [1..l']."""
    if not 1 <= block_len <= (1 << m):
        raise PreconditionFault(f"Block length {block_len} outside [1..2^{m}]")
    for depth in range(m + 1):
        if block_len % (1 << (m - depth)) == 0:
            return depth
    return m


def storage_needs_y(depth: int, block_len: int, m: int) -> bool:
    """Whether refining from `depth` must look at D(x, y) (some cell partially holds the block)."""
    return depth < block_reference_depth(block_len, m)


def refine_arity(depth: int, block_len: int, m: int) -> int:
    return depth + 2 + (1 if storage_needs_y(depth, block_len, m) else 0)


def cell_labels(x: BitString, levels: Sequence[BitString], depth: Optional[int] = None) -> np.ndarray:
    """Per-position labels at `depth` (default: deepest level); -1 outside D(x, y^0)."""
    depth = len(levels) - 1 if depth is None else depth
    inside = levels[0].array != x.array
    labels = np.zeros(len(x), dtype=np.int64)
    prev = x.array
    for s in range(1, depth + 1):
        cur = levels[s].array
        labels = (labels << 1) | (cur != prev)
        prev = cur
    labels[~inside] = -1
    return labels


def cells(x: BitString, levels: Sequence[BitString], depth: Optional[int] = None) -> List[IndexSet]:
    """F^i for every i in {0,1}^depth, indexed by Bv(i)."""
    depth = len(levels) - 1 if depth is None else depth
    labels = cell_labels(x, levels, depth)
    n = len(x)
    return [IndexSet(n, frozenset((np.flatnonzero(labels == c) + 1).tolist())) for c in range(1 << depth)]


# ==================== Operators ====================

def sample_uniform(n: int, rng: np.random.Generator, log: Optional[ArityLog] = None) -> BitString:
    if n < 1:
        raise RejectedInputError(f"n must be at least 1, got {n}")
    _record(log, 'sample_uniform', 0)
    return BitString.random(n, rng)


def complement(x: BitString, log: Optional[ArityLog] = None) -> BitString:
    _record(log, 'complement', 1)
    return x.complement()


def find_storage(x: BitString, y: BitString, ell: int, m: int, rng: np.random.Generator,
                 log: Optional[ArityLog] = None) -> BitString:
    """
    Sample y^0 uniformly from {w : |D(x,w)| = 2^m, |D(x,w) & D(x,y)| >= min(ell, |D(x,y)|)}.

    Raises:
        RejectedInputError: if n < 2^m
        PreconditionFault: if D(x, y) is empty
    """
    n = len(x)
    size = 1 << m
    if size > n:
        raise RejectedInputError(f"Storage of 2^{m} positions does not fit n={n}")
    dmask = disagreement_mask(x, y)
    block_len = min(ell, int(dmask.sum()))
    if block_len == 0:
        raise PreconditionFault("find_storage called with D(x, y) empty")
    flips = _sample_split(rng, np.arange(n, dtype=np.int64), dmask, size, 0, block_len)
    mask = np.zeros(n, dtype=bool)
    mask[flips] = True
    _record(log, 'find_storage', 2)
    return x.flip_positions(mask)


def refine_storage(x: BitString, y: BitString, levels: Sequence[BitString], m: int, block_len: int,
                   rng: np.random.Generator, log: Optional[ArityLog] = None) -> BitString:
    """Sample y^{s+1}: flip exactly half of every current cell, honouring the block quota."""
    depth = len(levels) - 1
    if depth >= m:
        raise PreconditionFault(f"Frame already refined to depth {depth}")
    labels = cell_labels(x, levels)
    size = 1 << (m - depth)
    half = size // 2
    dmask = disagreement_mask(x, y) if storage_needs_y(depth, block_len, m) else None
    quotas = _cell_quota(block_len, m, depth)
    mask = np.zeros(len(x), dtype=bool)
    for c in range(1 << depth):
        cell = np.flatnonzero(labels == c)
        if cell.size != size:
            raise PreconditionFault(f"Cell {c} at depth {depth} has {cell.size} positions, expected {size}")
        keep0 = min(int(quotas[c]), half)
        mask[_sample_split(rng, cell, dmask, half, keep0, int(quotas[c]) - keep0)] = True
    _record(log, 'refine_storage', refine_arity(depth, block_len, m))
    base = x if depth == 0 else levels[depth]
    return base.flip_positions(mask)


def build_frame(x: BitString, y: BitString, ell: int, m: int, rng: np.random.Generator,
                log: Optional[ArityLog] = None) -> StorageFrame:
    """find_storage followed by m refine steps."""
    block_len = min(ell, x.hamming_distance(y))
    levels = [find_storage(x, y, ell, m, rng, log)]
    for _ in range(m):
        levels.append(refine_storage(x, y, levels, m, block_len, rng, log))
    return StorageFrame(x, y, m, block_len, tuple(levels))


def frame_problems(frame: StorageFrame) -> List[str]:
    """Reasons the frame violates the storage event; empty when valid."""
    x, m, block_len = frame.x, frame.m, frame.block_len
    n = len(x)
    if any(len(v) != n for v in frame.parents()):
        return ['length mismatch']
    if frame.depth > m:
        return [f'depth {frame.depth} exceeds m={m}']
    d0 = frame.storage_mask
    dxy = disagreement_mask(x, frame.y)
    if int(d0.sum()) != (1 << m):
        return [f'|D(x,y^0)| = {int(d0.sum())}, expected {1 << m}']
    if not 1 <= block_len <= min(int(dxy.sum()), 1 << m):
        return [f'block length {block_len} invalid for |D(x,y)| = {int(dxy.sum())}']
    if int((d0 & dxy).sum()) < block_len:
        return [f'storage overlaps D(x,y) in fewer than {block_len} positions']

    labels = np.zeros(n, dtype=np.int64)
    prev = x.array
    for s in range(1, frame.depth + 1):
        cur = frame.levels[s].array
        if np.any(cur[~d0] != x.array[~d0]):
            return [f'y^{s} leaves the storage region']
        bit = (cur != prev).astype(np.int64)
        flipped = np.bincount(labels[d0], weights=bit[d0], minlength=1 << (s - 1))
        if np.any(flipped != (1 << (m - s))):
            return [f'y^{s} does not halve every cell']
        labels = (labels << 1) | bit
        covered = np.bincount(labels[d0 & dxy], minlength=1 << s)
        if np.any(covered < _cell_quota(block_len, m, s)):
            return [f'y^{s} leaves a block cell short of D(x,y) positions']
        prev = cur
    return []


def frame_is_valid(frame: StorageFrame) -> bool:
    return not frame_problems(frame)


def _fallback(mode: str, n: int, rng: Optional[np.random.Generator], reason: str) -> BitString:
    if mode == STRICT:
        raise PreconditionFault(reason)
    if rng is None:
        raise RejectedInputError("Unbiased mode needs an rng for the uniform fallback")
    return BitString.random(n, rng)


def build_sigma(frame: StorageFrame) -> SigmaMap:
    if not frame.refined:
        raise PreconditionFault(f"sigma needs a frame refined to depth {frame.m}, got {frame.depth}")
    labels = cell_labels(frame.x, frame.levels)
    inside = np.flatnonzero(labels >= 0)
    counts = np.bincount(labels[inside], minlength=1 << frame.m)
    if inside.size != (1 << frame.m) or np.any(counts != 1):
        raise PreconditionFault("Deepest cells are not singletons")
    mapping = np.empty(1 << frame.m, dtype=np.int64)
    mapping[labels[inside]] = inside + 1
    return SigmaMap(tuple(mapping.tolist()))


def block_positions(frame: StorageFrame, sigma: Optional[SigmaMap] = None) -> IndexSet:
    """B = {sigma(1), ..., sigma(l')}."""
    sigma = sigma or build_sigma(frame)
    return IndexSet(frame.n, frozenset(sigma(a) for a in range(1, frame.block_len + 1)))


def make_block_reference(x: BitString, levels: Sequence[BitString], block_len: int, m: int,
                         log: Optional[ArityLog] = None) -> BitString:
    """y^B: x with the block cells flipped; reads levels y^0..y^d only."""
    depth = block_reference_depth(block_len, m)
    if len(levels) <= depth:
        raise PreconditionFault(f"Block reference needs levels up to depth {depth}")
    labels = cell_labels(x, levels, depth)
    covered = block_len >> (m - depth)
    _record(log, 'make_block_reference', depth + 2)
    return x.flip_positions((labels >= 0) & (labels < covered))


def record_addresses(index: int, kappa: int, m: int) -> IndexSet:
    """Storage addresses {(i-1)(kappa+1)+1, ..., i(kappa+1)} of the i-th record."""
    width = kappa + 1
    last = index * width
    if index < 1 or last > (1 << m):
        raise RejectedInputError(f"Record {index} of width {width} does not fit 2^{m} addresses")
    return IndexSet(1 << m, frozenset(range(last - width + 1, last + 1)))


def write(req: WriteRequest, w: BitString, frame: StorageFrame, mode: str = STRICT,
          rng: Optional[np.random.Generator] = None, sigma: Optional[SigmaMap] = None,
          log: Optional[ArityLog] = None) -> BitString:
    """
    Flip w at sigma(p) for every address p in P whose ranked payload bit is 1.

    Without a valid frame, strict mode raises PreconditionFault and unbiased mode returns a
    uniform random string.
    """
    if len(w) != frame.n:
        raise RejectedInputError(f"Carrier of length {len(w)} for frame with n={frame.n}")
    if req.addresses.universe != (1 << frame.m):
        raise RejectedInputError(f"Addresses over [1..{req.addresses.universe}] for 2^{frame.m} storage")
    _record(log, 'write', frame.m + 4)
    problems = frame_problems(frame)
    if problems or not frame.refined:
        return _fallback(mode, frame.n, rng, f"write on invalid frame: {problems or ['not refined']}")
    sigma = sigma or build_sigma(frame)
    positions = sigma.positions(req.addresses.sorted())
    mask = np.zeros(frame.n, dtype=bool)
    mask[positions[req.r.array == 1]] = True
    return w.flip_positions(mask)


def store_delta(delta: int, index: int, kappa: int, s: BitString, frame: StorageFrame,
                mode: str = STRICT, rng: Optional[np.random.Generator] = None,
                sigma: Optional[SigmaMap] = None, log: Optional[ArityLog] = None) -> BitString:
    """Write the (kappa+1)-bit encoding of delta into record `index` of s."""
    req = WriteRequest(truncated_inverse(delta, kappa + 1), record_addresses(index, kappa, frame.m))
    return write(req, s, frame, mode, rng, sigma, log)


def decode_delta(frame: StorageFrame, sigma: SigmaMap, s: BitString, index: int, kappa: int,
                 mode: str = STRICT) -> int:
    """Read record `index` back: bit j is 1 where x and s differ at the addressed position."""
    d0 = frame.storage_mask
    if np.any(s.array[~d0] != frame.x.array[~d0]):
        if mode == STRICT:
            raise PreconditionFault("s differs from x outside the storage region")
        logger.debug("Decoding from s that leaves the storage region")
    positions = sigma.positions(record_addresses(index, kappa, frame.m).sorted())
    value = 0
    for bit in (frame.x.array[positions] != s.array[positions]).tolist():
        value = (value << 1) | int(bit)
    return value


def _consistent_problems(frame: StorageFrame, y_b: BitString, s: BitString) -> List[str]:
    problems = frame_problems(frame)
    if problems:
        return problems
    if not frame.refined:
        return ['frame not refined']
    if y_b != make_block_reference(frame.x, frame.levels, frame.block_len, frame.m):
        return ['y^B is not the block reference of the frame']
    d0 = frame.storage_mask
    if np.any(s.array[~d0] != frame.x.array[~d0]):
        return ['s differs from x outside the storage region']
    return []


def _place_block(x: BitString, sigma: SigmaMap, block_len: int, value: int) -> BitString:
    """x with sigma(p) flipped wherever bit p of the l'-bit value is 1."""
    bits = np.array([(value >> (block_len - p)) & 1 for p in range(1, block_len + 1)], dtype=bool)
    mask = np.zeros(len(x), dtype=bool)
    mask[sigma.positions(range(1, block_len + 1))[bits]] = True
    return x.flip_positions(mask)


def consistent_candidates(frame: StorageFrame, sigma: SigmaMap, s: BitString, seq: DistinguishingSequence,
                          kappa: int, index: Optional[FingerprintIndex] = None,
                          limit: Optional[int] = None) -> np.ndarray:
    """
    F_B in rank coordinates: integers u with OM(r^i, u) = Delta^i for every record i.

    u's bit p is 1 where the member differs from x at sigma(p).
    """
    if seq.ell != frame.block_len:
        raise RejectedInputError(f"Sequence for ell={seq.ell} used on a block of length {frame.block_len}")
    deltas = [decode_delta(frame, sigma, s, i, kappa) for i in range(1, seq.t + 1)]
    if index is not None:
        return index.lookup(deltas)
    return feasible_values(deltas, seq.strings, seq.ell, limit)


def choose_consistent(frame: StorageFrame, y_b: BitString, s: BitString, seq: DistinguishingSequence,
                      rng: np.random.Generator, kappa: int, fitness_x: Optional[int] = None,
                      fitness_yb: Optional[int] = None, index: Optional[FingerprintIndex] = None,
                      mode: str = STRICT, limit: Optional[int] = None, sigma: Optional[SigmaMap] = None,
                      log: Optional[ArityLog] = None) -> ConsistentChoice:
    """
    Sample q uniformly from F_B: strings equal to x off the block whose block bits are
    consistent with every decoded Delta^i.

    Falls back to a uniform random string (flagged) when F_B is empty, the block is too
    long to decode, or the reference fitness values have the wrong parity.
    """
    if seq.ell != frame.block_len:
        raise RejectedInputError(f"Sequence for ell={seq.ell} used on a block of length {frame.block_len}")
    _record(log, 'choose_consistent', frame.m + 5)
    problems = _consistent_problems(frame, y_b, s)
    if problems:
        return ConsistentChoice(_fallback(mode, frame.n, rng, f"choose_consistent: {problems}"), 0, 'invalid-input')

    if fitness_x is not None and fitness_yb is not None:
        offset2 = fitness_x + fitness_yb - frame.block_len
        if offset2 < 0 or offset2 % 2:
            logger.warning(f"Reference fitness values {fitness_x}/{fitness_yb} have odd offset")
            return ConsistentChoice(BitString.random(frame.n, rng), 0, 'parity')

    limit = config.ENUMERATION_LIMIT if limit is None else limit
    if frame.block_len > limit and (index is None or not index.decodable):
        return ConsistentChoice(BitString.random(frame.n, rng), 1, 'undecodable')

    sigma = sigma or build_sigma(frame)
    try:
        found = consistent_candidates(frame, sigma, s, seq, kappa, index, limit)
    except EnumerationBudgetError:
        return ConsistentChoice(BitString.random(frame.n, rng), 1, 'undecodable')
    if found.size == 0:
        logger.warning(f"Empty consistency set for block of length {frame.block_len}")
        return ConsistentChoice(BitString.random(frame.n, rng), 0, 'empty')
    value = int(found[int(rng.integers(0, found.size))])
    return ConsistentChoice(_place_block(frame.x, sigma, frame.block_len, value), int(found.size))


def update_y(x: BitString, y: BitString, y_b: BitString, q: BitString,
             log: Optional[ArityLog] = None) -> BitString:
    """y'_j = y_j where y^B agrees with x, q_j elsewhere."""
    if not len(x) == len(y) == len(y_b) == len(q):
        raise RejectedInputError("update_y inputs differ in length")
    _record(log, 'update_y', 4)
    return BitString(np.where(y_b.array == x.array, y.array, q.array))


# ==================== Support sets ====================

def in_storage_support(w: BitString, x: BitString, y: BitString, ell: int, m: int) -> bool:
    d_w = disagreement_mask(x, w)
    block_len = min(ell, x.hamming_distance(y))
    return int(d_w.sum()) == (1 << m) and int((d_w & disagreement_mask(x, y)).sum()) >= block_len


def in_refine_support(w: BitString, x: BitString, y: BitString, levels: Sequence[BitString],
                      m: int, block_len: int) -> bool:
    return frame_is_valid(StorageFrame(x, y, m, block_len, tuple(levels) + (w,)))


def enumerate_support(predicate: Callable[[BitString], bool], n: int,
                      limit: int = SUPPORT_LIMIT) -> FrozenSet[BitString]:
    """All strings of length n accepted by the predicate."""
    if n > limit:
        raise EnumerationBudgetError(f"Support enumeration over 2^{n} strings exceeds 2^{limit}")
    return frozenset(w for w in BitString.all_strings(n) if predicate(w))


def consistent_support(frame: StorageFrame, y_b: BitString, s: BitString, seq: DistinguishingSequence,
                       kappa: int) -> FrozenSet[BitString]:
    """Every string choose_consistent can return on valid inputs."""
    if _consistent_problems(frame, y_b, s):
        raise PreconditionFault("Support of choose_consistent is only defined on valid inputs")
    sigma = build_sigma(frame)
    found = consistent_candidates(frame, sigma, s, seq, kappa)
    if found.size == 0:
        return enumerate_support(lambda w: True, frame.n)
    return frozenset(_place_block(frame.x, sigma, frame.block_len, int(v)) for v in found)


# ==================== Equivariance harness ====================

@dataclass(frozen=True)
class OperatorSpec:
    """
    An operator under test. Deterministic operators give `sample`; randomized ones also
    give `support`, the exact set their uniform distribution ranges over.
    """

    name: str
    sample: Callable[..., BitString]
    support: Optional[Callable[..., FrozenSet[BitString]]] = None

    @property
    def deterministic(self) -> bool:
        return self.support is None


@dataclass(frozen=True)
class Counterexample:
    automorphism: Automorphism
    inputs: Tuple[BitString, ...]
    expected: object
    actual: object


@dataclass(frozen=True)
class EquivarianceReport:
    operator: str
    passed: bool
    checked: int
    counterexample: Optional[Counterexample] = None


def check_equivariance(spec: OperatorSpec, inputs: Sequence[BitString], trials: int = 200,
                       rng: Optional[np.random.Generator] = None, exhaustive: bool = False,
                       automorphisms: Optional[Iterable[Automorphism]] = None) -> EquivarianceReport:
    """
    Check alpha(op(inputs)) = op(alpha(inputs)) for deterministic operators and
    alpha(support(inputs)) = support(alpha(inputs)) for randomized ones.
    """
    inputs = tuple(inputs)
    n = len(inputs[0])
    if automorphisms is None and exhaustive:
        automorphisms = all_automorphisms(n)
    elif automorphisms is None:
        rng = rng or np.random.default_rng()
        automorphisms = (Automorphism.random(n, rng) for _ in range(trials))

    if spec.deterministic:
        baseline = spec.sample(*inputs)
    else:
        baseline = spec.support(*inputs)

    checked = 0
    for alpha in automorphisms:
        moved = tuple(alpha(v) for v in inputs)
        if spec.deterministic:
            expected = alpha(baseline)
            actual = spec.sample(*moved)
        else:
            expected = frozenset(alpha(w) for w in baseline)
            actual = spec.support(*moved)
        checked += 1
        if expected != actual:
            logger.info(f"{spec.name} is not equivariant under {alpha!r}")
            return EquivarianceReport(spec.name, False, checked, Counterexample(alpha, inputs, expected, actual))
    return EquivarianceReport(spec.name, True, checked)


def flip_first_position(x: BitString) -> BitString:
    """Deliberately biased mutant: always flips position 1."""
    mask = np.zeros(len(x), dtype=bool)
    mask[0] = True
    return x.flip_positions(mask)
