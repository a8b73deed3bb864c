#!/usr/bin/env python3
"""
Black-box OneMax oracle: hides a target string, counts queries and records the
first-hitting time.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union
import logging

import numpy as np

from bitstring import BitString, RejectedInputError, onemax

logger = logging.getLogger(__name__)

RETENTION_MODES = ('full', 'count')


@dataclass(frozen=True)
class QueryLedger:
    """Immutable snapshot of an oracle's query accounting."""

    n: int
    count: int
    first_hit: Optional[int]
    history: Tuple[Tuple[BitString, int], ...]
    retention: str

    def fitness_trace(self) -> List[int]:
        return [fitness for _, fitness in self.history]


class FitnessOracle:
    """OM_z for a hidden z. One instance belongs to exactly one run."""

    def __init__(self, target: BitString, retention: str = 'full'):
        if retention not in RETENTION_MODES:
            raise ValueError(f"Unknown history retention {retention!r}")
        self.__target = target
        self.n = len(target)
        self.retention = retention
        self._count = 0
        self._first_hit: Optional[int] = None
        self._history: List[Tuple[BitString, int]] = []

    def query(self, x: BitString) -> int:
        """Evaluate OM_z(x); the query index is 1-based."""
        if len(x) != self.n:
            raise RejectedInputError(f"Query of length {len(x)} for oracle with n={self.n}")
        fitness = onemax(x, self.__target)
        self._count += 1
        if self.retention == 'full':
            self._history.append((x, fitness))
        if fitness == self.n and self._first_hit is None:
            self._first_hit = self._count
            logger.debug(f"Optimum first queried at query {self._count}")
        return fitness

    @property
    def count(self) -> int:
        return self._count

    @property
    def first_hit(self) -> Optional[int]:
        return self._first_hit

    def report(self) -> QueryLedger:
        return QueryLedger(
            n=self.n,
            count=self._count,
            first_hit=self._first_hit,
            history=tuple(self._history),
            retention=self.retention,
        )

    def _reveal(self) -> BitString:
        return self.__target


def make_oracle(target: Optional[BitString] = None, seed: Union[int, np.random.SeedSequence, None] = None,
                n: Optional[int] = None, retention: str = 'full') -> FitnessOracle:
    """
    Create an oracle from a fixed target or from a seed.

    Args:
        target: Explicit hidden string (white-box tests)
        seed: Seed for a uniformly drawn target of length n
        n: Target length when drawing from a seed
        retention: 'full' keeps the query history, 'count' only counts

    Returns:
        A fresh oracle with an empty ledger
    """
    if target is None:
        if seed is None or n is None:
            raise ValueError("Either target or both seed and n are required")
        if n < 1:
            raise ValueError(f"n must be at least 1, got {n}")
        target = BitString.random(n, np.random.default_rng(seed))
    return FitnessOracle(target, retention=retention)


def reveal_target(oracle: FitnessOracle) -> BitString:
    """White-box accessor for tests and success checks; never called by algorithms."""
    return oracle._reveal()
