#!/usr/bin/env python3
"""
String-distinguishing sequences: construction, exhaustive verification, invariance
transforms, feasible-set computation and the on-disk sequence cache.

Candidates are enumerated as integers 0..2^ell-1 whose binary value (most significant
position first) is the candidate string, so agreement counts reduce to popcounts.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple
import math
import logging
import os
import tempfile

import numpy as np

from bitstring import (
    Automorphism, BitString, RejectedInputError, from_int, onemax, to_int,
)
from config import config

logger = logging.getLogger(__name__)

# Fingerprint tables are materialised up to this block length
INDEX_LIMIT = 16


class EnumerationBudgetError(RuntimeError):
    """Exhaustive enumeration over 2^ell candidates exceeds the configured limit."""


class SequenceCacheError(ValueError):
    """A cached sequence file is malformed or fails re-verification."""


@dataclass(frozen=True)
class Fingerprint:
    """Fitness values (OM_z(r^1), ..., OM_z(r^t)) of a hidden z."""

    values: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class DistinguishingSequence:
    """Length-ell query strings r^1..r^t with their verification status."""

    ell: int
    strings: Tuple[BitString, ...]
    verified: bool = False
    origin: str = 'custom'

    def __post_init__(self):
        object.__setattr__(self, 'strings', tuple(self.strings))
        if self.ell < 1:
            raise RejectedInputError(f"Block length must be positive, got {self.ell}")
        bad = [len(s) for s in self.strings if len(s) != self.ell]
        if bad:
            raise RejectedInputError(f"Sequence strings must have length {self.ell}, got {bad[:3]}")

    @property
    def t(self) -> int:
        return len(self.strings)

    def fingerprint(self, z: BitString) -> Fingerprint:
        return fingerprint_of(z, self.strings)


@dataclass
class SearchResult:
    """Outcome of a randomized search; `sequence` is None when the budget ran out."""

    ell: int
    t: int
    attempts_used: int
    sequence: Optional[DistinguishingSequence] = None

    @property
    def found(self) -> bool:
        return self.sequence is not None


def fingerprint_of(z: BitString, strings: Sequence[BitString]) -> Fingerprint:
    return Fingerprint(tuple(onemax(r, z) for r in strings))


def _check_limit(ell: int, limit: Optional[int]):
    limit = config.ENUMERATION_LIMIT if limit is None else limit
    if ell > limit:
        raise EnumerationBudgetError(f"Enumerating 2^{ell} candidates exceeds limit 2^{limit}")


def _agreements(candidates: np.ndarray, query: int, ell: int) -> np.ndarray:
    return ell - np.bitwise_count(candidates ^ query).astype(np.int64)


def feasible_values(values: Sequence[int], strings: Sequence[BitString], ell: int,
                    limit: Optional[int] = None) -> np.ndarray:
    """Integer encodings of every y with OM_y(r^i) = values[i] for all i."""
    _check_limit(ell, limit)
    if len(values) != len(strings):
        raise RejectedInputError(f"Fingerprint of length {len(values)} for {len(strings)} queries")
    candidates = np.arange(1 << ell, dtype=np.int64)
    # Prune incrementally; each query only shrinks the candidate set
    for value, r in zip(values, strings):
        if len(r) != ell:
            raise RejectedInputError(f"Query of length {len(r)} for block length {ell}")
        candidates = candidates[_agreements(candidates, to_int(r), ell) == value]
        if candidates.size == 0:
            break
    return candidates


def feasible_set(fingerprint: Fingerprint, seq: Sequence[BitString], ell: Optional[int] = None,
                 limit: Optional[int] = None) -> Set[BitString]:
    """S_feas: all targets consistent with the observed fingerprint."""
    strings = list(seq.strings) if isinstance(seq, DistinguishingSequence) else list(seq)
    if ell is None:
        if isinstance(seq, DistinguishingSequence):
            ell = seq.ell
        elif strings:
            ell = len(strings[0])
        else:
            raise RejectedInputError("Block length is required for an empty query list")
    found = feasible_values(fingerprint.values, strings, ell, limit)
    return {from_int(int(v), ell) for v in found}


def _distinct_fingerprints(strings: Sequence[BitString], ell: int) -> int:
    """Number of distinct fingerprints over all 2^ell targets."""
    candidates = np.arange(1 << ell, dtype=np.int64)
    keys = np.zeros(1 << ell, dtype=np.int64)
    bound = 1
    base = ell + 1
    for r in strings:
        if bound * base >= (1 << 62):
            # Re-rank so the running key stays below 2^ell
            _, keys = np.unique(keys, return_inverse=True)
            keys = keys.astype(np.int64)
            bound = 1 << ell
        keys = keys * base + _agreements(candidates, to_int(r), ell)
        bound *= base
    return int(np.unique(keys).size)


def is_distinguishing(seq: DistinguishingSequence, limit: Optional[int] = None) -> bool:
    """True iff z -> fingerprint(z) is injective over all 2^ell targets."""
    _check_limit(seq.ell, limit)
    if (seq.ell + 1) ** seq.t < (1 << seq.ell):
        return False
    return _distinct_fingerprints(seq.strings, seq.ell) == (1 << seq.ell)


def is_distinguishing_pairwise(seq: DistinguishingSequence) -> bool:
    """Definition-level check: every pair y != z is separated by some query. O(4^ell t)."""
    _check_limit(seq.ell, 10)
    targets = list(BitString.all_strings(seq.ell))
    prints = [tuple(onemax(r, z) for r in seq.strings) for z in targets]
    for a in range(len(targets)):
        for b in range(a + 1, len(targets)):
            if prints[a] == prints[b]:
                return False
    return True


def _verified_or_flagged(seq: DistinguishingSequence, limit: Optional[int]) -> DistinguishingSequence:
    """Verify exhaustively when affordable, else keep the analytic verification flag."""
    limit = config.ENUMERATION_LIMIT if limit is None else limit
    if seq.ell <= limit:
        ok = is_distinguishing(seq, limit)
        if not ok:
            raise RuntimeError(f"{seq.origin} sequence for ell={seq.ell} failed verification")
    return replace(seq, verified=True)


def canonical_sequence(ell: int, limit: Optional[int] = None) -> DistinguishingSequence:
    """0^ell followed by e_1..e_ell: |z| from the first query, z_i from the rest."""
    if ell < 1:
        raise RejectedInputError(f"ell must be at least 1, got {ell}")
    strings = [BitString.zeros(ell)] + [BitString.unit(i, ell) for i in range(1, ell + 1)]
    return _verified_or_flagged(DistinguishingSequence(ell, strings, origin='canonical'), limit)


def grouped_sequence(ell: int, limit: Optional[int] = None) -> DistinguishingSequence:
    """
    Coin-weighing construction of length ell for ell divisible by 4.

    Positions split into groups of four. The all-zeros query gives |z|; a group-total
    query per group (except the last, whose total follows) and the pair queries
    {a,b}, {a,c}, {a,d} per group recover every bit: a = (s_ab + s_ac + s_ad - T_g) / 2.
    """
    if ell < 4 or ell % 4:
        raise RejectedInputError(f"Grouped sequences need ell divisible by 4, got {ell}")
    strings = [BitString.zeros(ell)]
    groups = ell // 4
    for g in range(groups):
        base = 4 * g + 1
        if g < groups - 1:
            strings.append(BitString.from_positions(range(base, base + 4), ell))
        for other in (1, 2, 3):
            strings.append(BitString.from_positions((base, base + other), ell))
    return _verified_or_flagged(DistinguishingSequence(ell, strings, origin='grouped'), limit)


def constructive_sequence(ell: int, limit: Optional[int] = None) -> DistinguishingSequence:
    """Shortest deterministic construction available for ell."""
    if ell >= 4 and ell % 4 == 0:
        return grouped_sequence(ell, limit)
    return canonical_sequence(ell, limit)


def random_sequence(ell: int, t: int, rng: np.random.Generator) -> DistinguishingSequence:
    """Unverified sequence of t i.i.d. uniform strings."""
    return DistinguishingSequence(ell, [BitString.random(ell, rng) for _ in range(t)], origin='random')


def information_lower_bound(ell: int) -> int:
    """Fewest queries that can possibly separate 2^ell targets into (ell+1)-valued prints."""
    t = 1
    while (ell + 1) ** t < (1 << ell):
        t += 1
    return t


def constructive_t(ell: int) -> int:
    """Length of the sequence constructive_sequence(ell) returns."""
    if ell < 1:
        raise RejectedInputError(f"ell must be at least 1, got {ell}")
    return ell if ell >= 4 and ell % 4 == 0 else ell + 1


def sampling_t(n: int) -> int:
    """Queries per round of the random-sampling baseline, ceil((1 + 4 loglog n / log n) 2n / log n)."""
    if n < 2:
        raise RejectedInputError(f"sampling_t needs n >= 2, got {n}")
    log_n = math.log2(n)
    loglog = math.log2(log_n) if log_n > 1 else 0.0
    return math.ceil((1 + 4 * loglog / log_n) * 2 * n / log_n)


def paper_t(ell: int) -> int:
    """ceil(3.5 * ell / log2(ell))."""
    if ell < 2:
        raise RejectedInputError(f"paper_t needs ell >= 2, got {ell}")
    return math.ceil(3.5 * ell / math.log2(ell))


def _verify_candidate(args) -> bool:
    ell, rows = args
    strings = [BitString(row) for row in rows]
    return is_distinguishing(DistinguishingSequence(ell, strings), limit=ell)


def find_sequence(ell: int, t: int, attempts: int, rng: np.random.Generator,
                  limit: Optional[int] = None, jobs: int = 1) -> SearchResult:
    """
    Search for a distinguishing sequence of exactly t i.i.d. uniform strings.

    Candidates are drawn up front so the result depends only on (ell, t, attempts,
    rng state), whatever the number of worker processes.
    """
    _check_limit(ell, limit)
    if t < 1:
        raise RejectedInputError(f"t must be at least 1, got {t}")
    if (ell + 1) ** t < (1 << ell):
        logger.debug(f"t={t} cannot separate 2^{ell} targets; skipping search")
        return SearchResult(ell, t, 0)

    candidates = rng.integers(0, 2, size=(attempts, t, ell), dtype=np.uint8)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_verify_candidate, ((ell, c) for c in candidates), chunksize=8))
        hits = [i for i, ok in enumerate(outcomes) if ok]
        if hits:
            first = hits[0]
            seq = DistinguishingSequence(ell, [BitString(row) for row in candidates[first]],
                                         verified=True, origin='search')
            return SearchResult(ell, t, first + 1, seq)
        return SearchResult(ell, t, attempts)

    for i, rows in enumerate(candidates):
        if _verify_candidate((ell, rows)):
            seq = DistinguishingSequence(ell, [BitString(row) for row in rows], verified=True, origin='search')
            logger.debug(f"Found distinguishing sequence ell={ell} t={t} after {i + 1} attempts")
            return SearchResult(ell, t, i + 1, seq)
    return SearchResult(ell, t, attempts)


def shortest_sequence(ell: int, rng: np.random.Generator, attempts: Optional[int] = None,
                      limit: Optional[int] = None) -> DistinguishingSequence:
    """
    Shortest verified sequence the search finds, never longer than the constructive one.

    Walks t downward from the constructive length and stops at the first t whose
    search budget runs out.
    """
    attempts = config.SEARCH_ATTEMPTS if attempts is None else attempts
    best = constructive_sequence(ell, limit)
    t = best.t - 1
    floor = information_lower_bound(ell)
    while t >= floor:
        result = find_sequence(ell, t, attempts, rng, limit)
        if not result.found:
            break
        best = result.sequence
        t -= 1
    logger.info(f"Shortest sequence for ell={ell}: t={best.t} ({best.origin})")
    return best


def transform_sequence(seq: DistinguishingSequence, shift: BitString, perm: Sequence[int],
                       limit: Optional[int] = None) -> DistinguishingSequence:
    """Map every r^i to perm(r^i XOR shift); re-verify when affordable."""
    if len(shift) != seq.ell or len(perm) != seq.ell:
        raise RejectedInputError(f"Transform of length {len(shift)}/{len(perm)} for ell={seq.ell}")
    alpha = Automorphism(perm, shift)
    moved = DistinguishingSequence(seq.ell, [alpha(r) for r in seq.strings], origin=seq.origin)
    limit = config.ENUMERATION_LIMIT if limit is None else limit
    if seq.verified and seq.ell <= limit:
        return replace(moved, verified=is_distinguishing(moved, limit))
    return replace(moved, verified=seq.verified)


class FingerprintIndex:
    """Fingerprint -> consistent targets, tabulated once per sequence."""

    def __init__(self, seq: DistinguishingSequence, limit: Optional[int] = None):
        self.seq = seq
        self.limit = config.ENUMERATION_LIMIT if limit is None else limit
        self._table: Optional[Dict[Tuple[int, ...], np.ndarray]] = None
        if seq.ell <= min(INDEX_LIMIT, self.limit):
            self._table = self._build()

    @property
    def decodable(self) -> bool:
        return self.seq.ell <= self.limit

    def _build(self) -> Dict[Tuple[int, ...], np.ndarray]:
        ell = self.seq.ell
        candidates = np.arange(1 << ell, dtype=np.int64)
        prints = np.stack([_agreements(candidates, to_int(r), ell) for r in self.seq.strings], axis=1) \
            if self.seq.t else np.zeros((1 << ell, 0), dtype=np.int64)
        order = np.lexsort(prints.T[::-1]) if self.seq.t else np.arange(1 << ell)
        table: Dict[Tuple[int, ...], List[int]] = {}
        for idx in order.tolist():
            table.setdefault(tuple(prints[idx].tolist()), []).append(idx)
        return {key: np.array(members, dtype=np.int64) for key, members in table.items()}

    def lookup(self, values: Sequence[int]) -> np.ndarray:
        """Integer encodings consistent with the fingerprint, ascending."""
        if self._table is not None:
            return self._table.get(tuple(int(v) for v in values), np.zeros(0, dtype=np.int64))
        return feasible_values(values, self.seq.strings, self.seq.ell, self.limit)


# ==================== Sequence cache ====================

def cache_path(cache_dir: str, ell: int) -> Path:
    return Path(cache_dir) / f"sequence_l{ell}.txt"


def save_sequence(seq: DistinguishingSequence, path: Path):
    """Write '<ell> <t> <flag>' then one string per line, atomically."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{seq.ell} {seq.t} {1 if seq.verified else 0}"] + [str(s) for s in seq.strings]
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix='.seq-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            f.write('\n'.join(lines) + '\n')
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"Cached sequence ell={seq.ell} t={seq.t} at {path}")


def load_sequence(path: Path, limit: Optional[int] = None,
                  expected_ell: Optional[int] = None) -> DistinguishingSequence:
    """
    Parse a cache file; verified files are re-verified when ell is within the limit.

    Raises:
        SequenceCacheError: on malformed files or a header ell other than expected_ell
    """
    path = Path(path)
    try:
        lines = [line.strip() for line in path.read_text(encoding='utf-8').splitlines() if line.strip()]
    except OSError as e:
        raise SequenceCacheError(f"Cannot read {path}: {e}") from e
    if not lines:
        raise SequenceCacheError(f"{path}: empty cache file")
    header = lines[0].split()
    if len(header) != 3:
        raise SequenceCacheError(f"{path}:1: expected '<ell> <t> <flag>', got {lines[0]!r}")
    try:
        ell, t, flag = (int(v) for v in header)
    except ValueError as e:
        raise SequenceCacheError(f"{path}:1: non-integer header {lines[0]!r}") from e
    if flag not in (0, 1):
        raise SequenceCacheError(f"{path}:1: verified flag must be 0 or 1, got {flag}")
    if expected_ell is not None and ell != expected_ell:
        raise SequenceCacheError(f"{path}:1: cache file holds ell={ell}, expected ell={expected_ell}")
    body = lines[1:]
    if len(body) != t:
        raise SequenceCacheError(f"{path}: header announces t={t} strings, found {len(body)}")
    try:
        strings = [BitString.from_string(s) for s in body]
        seq = DistinguishingSequence(ell, strings, verified=False, origin='cache')
    except RejectedInputError as e:
        raise SequenceCacheError(f"{path}: {e}") from e

    limit = config.ENUMERATION_LIMIT if limit is None else limit
    if flag == 1:
        if ell <= limit and not is_distinguishing(seq, limit):
            raise SequenceCacheError(f"{path}: sequence marked verified is not distinguishing")
        seq = replace(seq, verified=True)
    return seq
