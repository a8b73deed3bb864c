#!/usr/bin/env python3
"""
End-to-end OneMax optimizers: the block-wise storage algorithm, the random-sampling
baseline and a randomized local search baseline, with exact query prediction and
arity auditing.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Mapping, NamedTuple, Optional
import math
import logging

import numpy as np

from bitstring import BitString, IndexSet, from_int
from config import Config, config as default_config
from distinguishing import (
    DistinguishingSequence, EnumerationBudgetError, FingerprintIndex, feasible_values,
    paper_t, sampling_t,
)
from operators import (
    STRICT, UNBIASED, ArityLog, SigmaMap, StorageFrame, WriteRequest, build_sigma,
    choose_consistent, complement, find_storage, make_block_reference, refine_storage,
    sample_uniform, store_delta, update_y, write,
)
from oracle import FitnessOracle, QueryLedger
from validators import ConfigurationError, Parameters

logger = logging.getLogger(__name__)

BlockHook = Callable[[int, BitString, BitString], None]


class QueryBound(NamedTuple):
    per_block: int
    total: int
    per_block_last: Optional[int] = None
    paper_total: Optional[int] = None


@dataclass
class BlockState:
    """Everything one block of the storage algorithm produces."""

    index: int
    frame: StorageFrame
    sigma: SigmaMap
    y_b: BitString
    s: BitString
    deltas: List[int] = field(default_factory=list)
    f_yb: int = 0
    contribution: int = 0

    @property
    def block_len(self) -> int:
        return self.frame.block_len


@dataclass
class RunReport:
    """Per-run query accounting."""

    algorithm: str
    n: int
    queries: int
    first_hit: Optional[int]
    success: bool
    max_arity: int
    arity_log: ArityLog = field(default_factory=ArityLog, repr=False)
    predicted_queries: Optional[int] = None
    block_queries: List[int] = field(default_factory=list)
    repeat_iterations: List[int] = field(default_factory=list)
    feasible_sizes: List[int] = field(default_factory=list)
    anomalies: List[str] = field(default_factory=list)
    ledger: Optional[QueryLedger] = field(default=None, repr=False)

    @property
    def total_repeats(self) -> int:
        return sum(self.repeat_iterations)


class _HitReached(Exception):
    """Raised to unwind a run once the optimum has been queried."""


class _Session:
    """Oracle access shared by one run: counts, halts, and collects arity and anomalies."""

    def __init__(self, oracle: FitnessOracle, halt_on_hit: bool):
        self.oracle = oracle
        self.halt_on_hit = halt_on_hit
        self.log = ArityLog()
        self.anomalies: List[str] = []

    def ask(self, x: BitString) -> int:
        fitness = self.oracle.query(x)
        if self.halt_on_hit and self.oracle.first_hit is not None:
            raise _HitReached()
        return fitness

    def report(self, algorithm: str, success: Optional[bool] = None, **extra) -> RunReport:
        first_hit = self.oracle.first_hit
        return RunReport(
            algorithm=algorithm,
            n=self.oracle.n,
            queries=self.oracle.count,
            first_hit=first_hit,
            success=(first_hit is not None) if success is None else success,
            max_arity=self.log.max_arity,
            arity_log=self.log,
            anomalies=list(self.anomalies),
            ledger=self.oracle.report(),
            **extra,
        )


# ==================== Query accounting ====================

def block_query_count(m: int, t: int) -> int:
    """Levels y^0..y^m, y^B, t write-queries, t store-queries, q and the y-update."""
    return (m + 1) + 1 + 2 * t + 2


def query_bound(p: Parameters) -> QueryBound:
    """Exact query count of a run with verified sequences and one repeat per block."""
    if p.algorithm != 'alg3':
        raise ConfigurationError(f"query_bound applies to alg3, not {p.algorithm}")
    per_block = block_query_count(p.m, p.t)
    full_blocks = p.n // p.ell
    per_block_last = block_query_count(p.m, p.t_last) if p.ell_last else None
    total = full_blocks * per_block + (per_block_last or 0) + 2
    paper_total = p.blocks * per_block + 2
    return QueryBound(per_block, total, per_block_last, paper_total)


def paper_block_queries(kappa: int) -> int:
    """kappa + 2t + 6 with t = paper_t(2^kappa)."""
    return kappa + 2 * paper_t(1 << kappa) + 6


def paper_total_bound(n: int, kappa: int) -> int:
    return math.ceil(n / (1 << kappa)) * paper_block_queries(kappa) + 2


# ==================== Storage algorithm ====================

def _run_block(session: _Session, p: Parameters, index: int, x: BitString, fx: int, y: BitString,
               seq: DistinguishingSequence, rng: np.random.Generator, mode: str) -> BlockState:
    """Storage creation, block reference, sequence queries and Delta storage for one block."""
    log = session.log
    block_len = min(p.ell, x.hamming_distance(y))
    levels = [find_storage(x, y, p.ell, p.m, rng, log)]
    session.ask(levels[0])
    for _ in range(p.m):
        levels.append(refine_storage(x, y, levels, p.m, block_len, rng, log))
        session.ask(levels[-1])
    frame = StorageFrame(x, y, p.m, block_len, tuple(levels))
    sigma = build_sigma(frame)

    y_b = make_block_reference(x, frame.levels, block_len, p.m, log)
    f_yb = session.ask(y_b)
    offset2 = fx + f_yb - block_len
    if offset2 % 2:
        session.anomalies.append(f"block {index}: odd off-block contribution")
    contribution = offset2 // 2

    block_addresses = IndexSet(1 << p.m, frozenset(range(1, block_len + 1)))
    state = BlockState(index, frame, sigma, y_b, x, f_yb=f_yb, contribution=contribution)
    for r in seq.strings:
        written = write(WriteRequest(r, block_addresses), x, frame, mode, rng, sigma, log)
        state.deltas.append(session.ask(written) - contribution)

    s = x
    for i, delta in enumerate(state.deltas, start=1):
        s = store_delta(delta, i, p.kappa, s, frame, mode, rng, sigma, log)
        session.ask(s)
    state.s = s
    return state


def run_algorithm3(p: Parameters, oracle: FitnessOracle, sequences: Mapping[int, DistinguishingSequence],
                   rng: np.random.Generator, block_hook: Optional[BlockHook] = None,
                   cfg: Optional[Config] = None) -> RunReport:
    """
    Optimize OM_z block by block through unbiased operators only.

    Args:
        p: Validated alg3 parameters
        oracle: Fresh oracle hiding z
        sequences: Distinguishing sequence per block length (ell and n mod ell)
        rng: Algorithm randomness
        block_hook: Called with (completed blocks, x, y) at every block boundary
        cfg: Limits (enumeration, repeat cap); defaults to the module config

    Returns:
        RunReport with the exact query count and audited arity
    """
    cfg = cfg or default_config
    if p.algorithm != 'alg3':
        raise ConfigurationError(f"run_algorithm3 needs alg3 parameters, got {p.algorithm}")
    for block_len in p.block_lengths():
        seq = sequences.get(block_len)
        if seq is None:
            raise ConfigurationError(f"No distinguishing sequence for block length {block_len}")
        if seq.t != p.t_for(block_len):
            raise ConfigurationError(f"Sequence for ell={block_len} has t={seq.t}, parameters say {p.t_for(block_len)}")
    indexes = {L: FingerprintIndex(sequences[L], cfg.ENUMERATION_LIMIT) for L in p.block_lengths()}

    mode = STRICT if p.strict else UNBIASED
    bound = query_bound(p)
    session = _Session(oracle, p.halt_on_hit)
    log = session.log
    block_queries: List[int] = []
    repeats: List[int] = []
    sizes: List[int] = []
    capped = False

    def finish() -> RunReport:
        return session.report(
            'alg3',
            success=(oracle.first_hit is not None) and not capped,
            predicted_queries=bound.total,
            block_queries=block_queries,
            repeat_iterations=repeats,
            feasible_sizes=sizes,
        )

    try:
        x = sample_uniform(p.n, rng, log)
        fx = session.ask(x)
        y = complement(x, log)
        session.ask(y)

        completed = 0
        while x.hamming_distance(y) > 0:
            if block_hook is not None:
                block_hook(completed, x, y)
            start = oracle.count
            block_len = min(p.ell, x.hamming_distance(y))
            seq = sequences[block_len]
            state = _run_block(session, p, completed + 1, x, fx, y, seq, rng, mode)

            cap = cfg.REPEAT_CAP_FACTOR
            iterations = 0
            flagged = False
            while True:
                choice = choose_consistent(
                    state.frame, state.y_b, state.s, seq, rng, p.kappa,
                    fitness_x=fx, fitness_yb=state.f_yb, index=indexes[block_len],
                    mode=mode, limit=cfg.ENUMERATION_LIMIT, sigma=state.sigma, log=log,
                )
                if choice.anomaly and not flagged:
                    session.anomalies.append(f"block {state.index}: {choice.anomaly}")
                    flagged = True
                if iterations == 0:
                    sizes.append(choice.feasible_size)
                    cap = cfg.REPEAT_CAP_FACTOR * max(1, choice.feasible_size)
                fq = session.ask(choice.q)
                iterations += 1
                if fq - state.contribution == block_len:
                    break
                if iterations >= cap:
                    logger.warning(f"Block {state.index}: repeat loop capped after {iterations} draws")
                    session.anomalies.append(f"block {state.index}: repeat cap {cap} reached")
                    capped = True
                    repeats.append(iterations)
                    block_queries.append(oracle.count - start)
                    return finish()

            y = update_y(x, y, state.y_b, choice.q, log)
            session.ask(y)
            x, fx = choice.q, fq
            repeats.append(iterations)
            block_queries.append(oracle.count - start)
            completed += 1
            logger.debug(f"Block {completed} done: l'={block_len}, {block_queries[-1]} queries, {iterations} draws")

        if block_hook is not None:
            block_hook(completed, x, y)
    except _HitReached:
        logger.debug(f"Optimum hit at query {oracle.first_hit}; halting")

    return finish()


# ==================== Baselines ====================

def run_random_sampling(p: Parameters, oracle: FitnessOracle, rng: np.random.Generator,
                        cfg: Optional[Config] = None) -> RunReport:
    """
    Rounds of t uniform samples followed by a uniformly chosen consistent string,
    until the consistent string is the optimum.

    Raises:
        EnumerationBudgetError: if n exceeds SAMPLING_MAX_N
    """
    cfg = cfg or default_config
    if p.n > cfg.SAMPLING_MAX_N:
        raise EnumerationBudgetError(f"Random sampling enumerates 2^{p.n} strings; limit is 2^{cfg.SAMPLING_MAX_N}")
    t = sampling_t(p.n)
    session = _Session(oracle, halt_on_hit=True)
    log = session.log
    sizes: List[int] = []
    rounds = 0
    try:
        while True:
            rounds += 1
            samples = [sample_uniform(p.n, rng, log) for _ in range(t)]
            fitness = [session.ask(x) for x in samples]
            found = feasible_values(fitness, samples, p.n, limit=cfg.SAMPLING_MAX_N)
            sizes.append(int(found.size))
            log.record('choose_consistent', t)
            guess = from_int(int(found[int(rng.integers(0, found.size))]), p.n)
            session.ask(guess)
    except _HitReached:
        pass
    logger.debug(f"Random sampling finished after {rounds} rounds of {t + 1} queries")
    return session.report('sampling', repeat_iterations=[rounds], feasible_sizes=sizes)


def run_rls(p: Parameters, oracle: FitnessOracle, rng: np.random.Generator,
            cfg: Optional[Config] = None) -> RunReport:
    """Elitist single-bit-flip hill climber; stops at the first hit or the query budget."""
    cfg = cfg or default_config
    budget = cfg.rls_budget(p.n)
    session = _Session(oracle, halt_on_hit=True)
    log = session.log
    try:
        x = sample_uniform(p.n, rng, log)
        fx = session.ask(x)
        while oracle.count < budget:
            mask = np.zeros(p.n, dtype=bool)
            mask[int(rng.integers(0, p.n))] = True
            log.record('rls_mutation', 1)
            candidate = x.flip_positions(mask)
            fc = session.ask(candidate)
            if fc >= fx:
                x, fx = candidate, fc
        session.anomalies.append(f"query budget {budget} exhausted")
        logger.warning(f"RLS on n={p.n} exhausted its budget of {budget} queries")
    except _HitReached:
        pass
    return session.report('rls')


def audit_arity(report: RunReport) -> int:
    """Largest distinct-parent count over every operator call of the run."""
    audited = report.arity_log.max_arity
    if audited != report.max_arity:
        logger.warning(f"Arity log ({audited}) disagrees with report ({report.max_arity})")
    return audited
