#!/usr/bin/env python3
"""
Service layer between the command line and the algorithms: sequence cache management,
seed sweeps and CSV summaries.
"""

import csv
import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config import Config, config as default_config
from distinguishing import (
    DistinguishingSequence, SequenceCacheError, cache_path, canonical_sequence, find_sequence,
    load_sequence, random_sequence, sampling_t, save_sequence, shortest_sequence,
)
from oracle import make_oracle
from operators import PreconditionFault
from runner import RunReport, run_algorithm3, run_random_sampling, run_rls
from validators import ALGORITHM_IDS, ExperimentConfig, Parameters, validate_model

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    'run_id', 'algorithm', 'n', 'kappa', 'ell', 'm', 't', 'mode', 'seed', 'queries',
    'predicted_queries', 'repeat_iterations', 'max_arity', 'success', 'wall_ms', 'error',
]

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_ANOMALY = 2


class SummaryError(ValueError):
    """A results CSV could not be parsed."""


def derive_run_seed(base_seed: int, algorithm: str, n: int, kappa: int, trial: int) -> int:
    """First 64-bit word of SeedSequence(base, spawn_key=(algorithm id, n, kappa, trial))."""
    seq = np.random.SeedSequence(base_seed, spawn_key=(ALGORITHM_IDS[algorithm], n, kappa, trial))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def run_streams(run_seed: int) -> Tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """(oracle target stream, algorithm stream) of a run."""
    return np.random.SeedSequence([run_seed, 0]), np.random.SeedSequence([run_seed, 1])


class SequenceService:
    """Provides distinguishing sequences per block length, backed by the on-disk cache."""

    def __init__(self, cache_dir: Optional[str] = None, cfg: Optional[Config] = None):
        self.cfg = cfg or default_config
        self.cache_dir = cache_dir or self.cfg.SEQUENCE_CACHE_DIR

    def ensure_sequence(self, ell: int, kind: str = 'shortest') -> Tuple[DistinguishingSequence, str]:
        """
        Return a verified sequence for ell and whether it was 'cached', 'created' or 'analytic'.

        Raises:
            SequenceCacheError: if an existing cache file is corrupt
        """
        if kind == 'canonical':
            return canonical_sequence(ell, self.cfg.ENUMERATION_LIMIT), 'analytic'
        if ell > self.cfg.ENUMERATION_LIMIT:
            return canonical_sequence(ell, self.cfg.ENUMERATION_LIMIT), 'analytic'

        path = cache_path(self.cache_dir, ell)
        if path.exists():
            return load_sequence(path, self.cfg.ENUMERATION_LIMIT, expected_ell=ell), 'cached'

        rng = np.random.default_rng(np.random.SeedSequence([ell]))
        seq = shortest_sequence(ell, rng, self.cfg.SEARCH_ATTEMPTS, self.cfg.ENUMERATION_LIMIT)
        save_sequence(seq, path)
        return seq, 'created'

    def paper_sequence(self, ell: int, t: int) -> DistinguishingSequence:
        """A length-t sequence: searched and verified when affordable, random otherwise."""
        rng = np.random.default_rng(np.random.SeedSequence([ell, t]))
        if ell <= self.cfg.ENUMERATION_LIMIT:
            result = find_sequence(ell, t, self.cfg.SEARCH_ATTEMPTS, rng, self.cfg.ENUMERATION_LIMIT)
            if result.found:
                return result.sequence
        logger.warning(f"Using an unverified random sequence for ell={ell}, t={t}")
        return random_sequence(ell, t, rng)

    def verify_sequences(self, ells: List[int]) -> List[Dict[str, Any]]:
        """Make sure every ell has a verified cached sequence; ell over the limit is skipped."""
        report = []
        for ell in sorted(set(ells)):
            if ell < 1:
                report.append({'ell': ell, 't': None, 'status': 'skipped', 'reason': 'ell must be positive'})
                continue
            if ell > self.cfg.ENUMERATION_LIMIT:
                report.append({'ell': ell, 't': None, 'status': 'skipped',
                               'reason': f'exceeds enumeration limit {self.cfg.ENUMERATION_LIMIT}'})
                continue
            seq, status = self.ensure_sequence(ell)
            report.append({'ell': ell, 't': seq.t, 'status': status, 'reason': ''})
            logger.info(f"ell={ell}: t={seq.t} ({status})")
        return report


@dataclass
class RunTask:
    """One (algorithm, n, kappa, trial) run, picklable for worker processes."""

    algorithm: str
    n: int
    kappa: int
    trial: int
    run_seed: int
    params: Dict[str, Any]
    sequences: Dict[int, DistinguishingSequence] = field(default_factory=dict)
    cfg: Optional[Config] = None

    @property
    def run_id(self) -> str:
        return f"{self.algorithm}-n{self.n}-k{self.kappa}-r{self.trial}"


@dataclass
class ExperimentResult:
    rows: List[Dict[str, Any]]
    anomalies: List[str]
    output_path: str
    exit_code: int


def execute_run(task: RunTask) -> Tuple[Dict[str, Any], List[str]]:
    """Run one task and return its CSV row and anomalies."""
    cfg = task.cfg or default_config
    p = Parameters(**task.params)
    oracle_stream, algo_stream = run_streams(task.run_seed)
    oracle = make_oracle(seed=oracle_stream, n=task.n, retention=cfg.HISTORY_RETENTION)
    rng = np.random.default_rng(algo_stream)

    row = {
        'run_id': task.run_id, 'algorithm': task.algorithm, 'n': task.n, 'kappa': task.kappa,
        'ell': '', 'm': '', 't': '', 'mode': p.mode, 'seed': task.run_seed, 'queries': '',
        'predicted_queries': '', 'repeat_iterations': '', 'max_arity': '', 'success': False,
        'wall_ms': '', 'error': '',
    }
    started = time.perf_counter()
    try:
        if task.algorithm == 'alg3':
            row.update(ell=p.ell, m=p.m, t=p.t)
            report = run_algorithm3(p, oracle, task.sequences, rng, cfg=cfg)
        elif task.algorithm == 'sampling':
            row.update(t=sampling_t(p.n))
            report = run_random_sampling(p, oracle, rng, cfg=cfg)
        else:
            report = run_rls(p, oracle, rng, cfg=cfg)
    except PreconditionFault as e:
        logger.error(f"{task.run_id} aborted: {e}")
        row.update(error=str(e), wall_ms=round((time.perf_counter() - started) * 1000, 3))
        return row, [f"{task.run_id}: {e}"]

    row.update(_report_columns(report))
    row['wall_ms'] = round((time.perf_counter() - started) * 1000, 3)
    return row, [f"{task.run_id}: {a}" for a in report.anomalies]


def _report_columns(report: RunReport) -> Dict[str, Any]:
    return {
        'queries': report.queries,
        'predicted_queries': '' if report.predicted_queries is None else report.predicted_queries,
        'repeat_iterations': report.total_repeats,
        'max_arity': report.max_arity,
        'success': report.success,
    }


def _error_row(algorithm: str, n: int, kappa: int, mode: str, reason: str) -> Dict[str, Any]:
    row = {col: '' for col in CSV_COLUMNS}
    row.update(run_id=f"{algorithm}-n{n}-k{kappa}-invalid", algorithm=algorithm, n=n, kappa=kappa,
               mode=mode, success=False, error=reason)
    return row


def _row_key(row: Dict[str, Any]) -> tuple:
    trial = row['run_id'].rsplit('-r', 1)[-1]
    return (row['algorithm'], int(row['n']), int(row['kappa']), int(trial) if trial.isdigit() else -1)


def write_csv(rows: List[Dict[str, Any]], path: str):
    """Write rows with a header, atomically (temporary file then rename)."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix='.results-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for row in rows:
                writer.writerow({col: row.get(col, '') for col in CSV_COLUMNS})
        os.replace(tmp, target)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class ExperimentService:
    """Plans, executes and records seed sweeps."""

    def __init__(self, cfg: Optional[Config] = None, sequence_service: Optional[SequenceService] = None):
        self.cfg = cfg or default_config
        self.sequence_service = sequence_service

    def plan(self, experiment: ExperimentConfig) -> Tuple[List[RunTask], List[Dict[str, Any]]]:
        """Validate every combination up front; invalid ones become error rows."""
        sequences = self.sequence_service or SequenceService(experiment.cache_dir, self.cfg)
        tasks: List[RunTask] = []
        errors: List[Dict[str, Any]] = []
        for algorithm, n, kappa in experiment.combinations():
            base = {'algorithm': algorithm, 'n': n, 'mode': experiment.mode, 'seed': experiment.seed,
                    'strict': experiment.strict, 'halt_on_hit': experiment.halt_on_hit}
            seq_map: Dict[int, DistinguishingSequence] = {}
            if algorithm == 'alg3':
                base.update(kappa=kappa, m=experiment.m)
                ok, reason, seq_map = self._prepare_alg3(base, experiment, sequences)
                if not ok:
                    errors.append(_error_row(algorithm, n, kappa, experiment.mode, reason))
                    continue
            elif algorithm == 'sampling' and n > self.cfg.SAMPLING_MAX_N:
                errors.append(_error_row(algorithm, n, kappa, experiment.mode,
                                         f"n={n} exceeds SAMPLING_MAX_N={self.cfg.SAMPLING_MAX_N}"))
                continue

            is_valid, params, error = validate_model(base, Parameters)
            if not is_valid:
                errors.append(_error_row(algorithm, n, kappa, experiment.mode, error))
                continue
            params_dict = params.model_dump()
            for trial in range(experiment.trials):
                run_seed = derive_run_seed(experiment.seed, algorithm, n, kappa, trial)
                tasks.append(RunTask(algorithm, n, kappa, trial, run_seed, params_dict, seq_map, self.cfg))
        return tasks, errors

    def _prepare_alg3(self, base: Dict[str, Any], experiment: ExperimentConfig,
                      sequences: SequenceService) -> Tuple[bool, str, Dict[int, DistinguishingSequence]]:
        """Fill t / t_last from the sequences actually used and validate the parameters."""
        kappa, n = base['kappa'], base['n']
        ell = 1 << kappa
        lengths = [ell] + ([n % ell] if n % ell else [])
        if experiment.mode == 'paper':
            is_valid, params, error = validate_model(base, Parameters)
            if not is_valid:
                return False, error, {}
            seq_map = {L: sequences.paper_sequence(L, params.t_for(L)) for L in lengths}
            return True, '', seq_map

        if ell >= n:
            return False, f"Block length {ell} must be smaller than n = {n}", {}
        seq_map = {}
        for L in lengths:
            seq, _ = sequences.ensure_sequence(L, experiment.sequences)
            seq_map[L] = seq
        base['t'] = seq_map[ell].t
        if len(lengths) > 1:
            base['t_last'] = seq_map[lengths[1]].t
        is_valid, _, error = validate_model(base, Parameters)
        return is_valid, error or '', seq_map

    def run_experiment(self, experiment: ExperimentConfig) -> ExperimentResult:
        """Execute every planned run, write the CSV and derive the exit status."""
        tasks, rows = self.plan(experiment)
        logger.info(f"Running {len(tasks)} runs with {experiment.jobs} job(s)")

        if experiment.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=experiment.jobs) as pool:
                outcomes = list(pool.map(execute_run, tasks, chunksize=max(1, len(tasks) // (4 * experiment.jobs))))
        else:
            outcomes = [execute_run(task) for task in tasks]

        anomalies: List[str] = []
        for row, found in outcomes:
            rows.append(row)
            anomalies.extend(found)
        rows.sort(key=_row_key)

        write_csv(rows, experiment.output_path)
        logger.info(f"Wrote {len(rows)} rows to {experiment.output_path}")
        for anomaly in anomalies:
            logger.warning(f"Anomaly: {anomaly}")

        exit_code = EXIT_ANOMALY if anomalies and experiment.strict else EXIT_OK
        return ExperimentResult(rows, anomalies, experiment.output_path, exit_code)


# ==================== Summaries ====================

_INT_COLUMNS = ('n', 'kappa', 'queries', 'max_arity')


def read_results(path: str) -> List[Dict[str, Any]]:
    """
    Parse a results CSV.

    Raises:
        SummaryError: on a missing file, a wrong header or an unparsable row (with its line number)
    """
    try:
        with open(path, encoding='utf-8', newline='') as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or list(reader.fieldnames) != CSV_COLUMNS:
                raise SummaryError(f"{path}:1: unexpected header {reader.fieldnames}")
            rows = []
            for row in reader:
                line = reader.line_num
                if None in row or any(v is None for v in row.values()):
                    raise SummaryError(f"{path}:{line}: wrong number of fields")
                if row['error']:
                    rows.append(row)
                    continue
                try:
                    for col in _INT_COLUMNS:
                        row[col] = int(row[col])
                    row['predicted_queries'] = int(row['predicted_queries']) if row['predicted_queries'] else None
                    if row['success'] not in ('True', 'False'):
                        raise ValueError(f"success must be True or False, got {row['success']!r}")
                    row['success'] = row['success'] == 'True'
                except ValueError as e:
                    raise SummaryError(f"{path}:{line}: {e}") from e
                rows.append(row)
            return rows
    except OSError as e:
        raise SummaryError(f"Cannot read {path}: {e}") from e


def summarize(path: str) -> str:
    """Per-(algorithm, n, kappa) query statistics, success rate, max arity and discrepancies."""
    rows = read_results(path)
    groups: Dict[tuple, List[Dict[str, Any]]] = {}
    errors = 0
    for row in rows:
        if row['error']:
            errors += 1
            continue
        groups.setdefault((row['algorithm'], row['n'], row['kappa']), []).append(row)

    lines = [f"{'algorithm':<10} {'n':>6} {'kappa':>5} {'runs':>5} {'mean':>10} {'min':>8} {'max':>8} "
             f"{'success':>8} {'arity':>5} {'mismatch':>8}"]
    for key in sorted(groups):
        members = groups[key]
        queries = [r['queries'] for r in members]
        mismatches = sum(1 for r in members
                         if r['algorithm'] == 'alg3' and r['predicted_queries'] is not None
                         and r['queries'] != r['predicted_queries'])
        success_rate = sum(1 for r in members if r['success']) / len(members)
        lines.append(
            f"{key[0]:<10} {key[1]:>6} {key[2]:>5} {len(members):>5} {np.mean(queries):>10.2f} "
            f"{min(queries):>8} {max(queries):>8} {success_rate:>8.2f} "
            f"{max(r['max_arity'] for r in members):>5} {mismatches:>8}"
        )
    if errors:
        lines.append(f"{errors} combination(s) rejected")
    return '\n'.join(lines)


def get_sequence_service(cache_dir: Optional[str] = None, cfg: Optional[Config] = None) -> SequenceService:
    """Get a sequence service bound to a cache directory."""
    return SequenceService(cache_dir, cfg)


def get_experiment_service(cfg: Optional[Config] = None, cache_dir: Optional[str] = None) -> ExperimentService:
    """Get an experiment service; the cache directory defaults to the experiment's own."""
    sequence_service = SequenceService(cache_dir, cfg) if cache_dir else None
    return ExperimentService(cfg, sequence_service)
