#!/usr/bin/env python3
"""
Input validation models using Pydantic for run parameters and experiment sweeps.
"""

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from typing import Any, List, Literal, Optional
import logging

from distinguishing import paper_t

logger = logging.getLogger(__name__)

ALGORITHMS = ('alg3', 'sampling', 'rls')
ALGORITHM_IDS = {'rls': 1, 'sampling': 2, 'alg3': 3}


class ConfigurationError(ValueError):
    """Parameters or an experiment configuration failed validation."""


class Parameters(BaseModel):
    """Validated parameters of a single run."""
    algorithm: Literal['alg3', 'sampling', 'rls'] = 'alg3'
    n: int = Field(ge=1)
    kappa: int = Field(default=1, ge=1, le=20)
    m: Optional[int] = Field(default=None, ge=1)
    t: Optional[int] = Field(default=None, ge=1)
    t_last: Optional[int] = Field(default=None, ge=1)
    mode: Literal['paper', 'desk'] = 'desk'
    seed: int = Field(default=0, ge=0)
    strict: bool = True
    halt_on_hit: bool = False

    @property
    def ell(self) -> int:
        return 1 << self.kappa

    @property
    def ell_last(self) -> int:
        """Length of the trailing short block; 0 when ell divides n."""
        return self.n % self.ell

    @property
    def blocks(self) -> int:
        return -(-self.n // self.ell)

    @property
    def k(self) -> int:
        """Arity budget kappa + 7 in paper mode."""
        return self.kappa + 7

    def block_lengths(self) -> List[int]:
        return [self.ell] + ([self.ell_last] if self.ell_last else [])

    def t_for(self, block_len: int) -> int:
        return self.t if block_len == self.ell else self.t_last

    @model_validator(mode='after')
    def validate_storage(self):
        """Fill derived lengths and check the storage inequalities."""
        if self.algorithm != 'alg3':
            if self.algorithm == 'sampling' and self.n < 2:
                raise ValueError("Random sampling needs n >= 2")
            return self

        if self.ell >= self.n:
            raise ValueError(f"Block length 2^{self.kappa} = {self.ell} must be smaller than n = {self.n}")

        if self.mode == 'paper':
            if self.m is not None and self.m != self.kappa + 2:
                raise ValueError(f"Paper mode fixes m = kappa + 2 = {self.kappa + 2}, got {self.m}")
            if self.t is not None and self.t != paper_t(self.ell):
                raise ValueError(f"Paper mode fixes t = {paper_t(self.ell)}, got {self.t}")
            self.m = self.kappa + 2
            self.t = paper_t(self.ell)
            if self.ell_last and self.t_last is None:
                self.t_last = paper_t(self.ell_last) if self.ell_last >= 2 else 2
        else:
            if self.t is None:
                self.t = self.ell + 1
            if self.ell_last and self.t_last is None:
                self.t_last = self.ell_last + 1

        if not self.ell_last:
            self.t_last = None

        width = self.kappa + 1
        longest = max(self.t, self.t_last or 0)
        if self.m is None:
            m = self.kappa + 2
            while longest * width > (1 << m):
                m += 1
            self.m = m

        errors = []
        if self.m < self.kappa + 2:
            errors.append(f"m = {self.m} is below kappa + 2 = {self.kappa + 2}")
        if (1 << self.m) > self.n:
            errors.append(f"storage 2^{self.m} = {1 << self.m} exceeds n = {self.n}")
        if self.t * width > (1 << self.m):
            errors.append(f"t(kappa+1) = {self.t * width} exceeds storage 2^{self.m}")
        if self.t_last is not None and self.t_last * width > (1 << self.m):
            errors.append(f"t_last(kappa+1) = {self.t_last * width} exceeds storage 2^{self.m}")
        if errors:
            raise ValueError('; '.join(errors))
        return self


class ExperimentConfig(BaseModel):
    """Validates a sweep request from the command line."""
    algorithms: List[Literal['alg3', 'sampling', 'rls']] = Field(min_length=1)
    n_values: List[int] = Field(min_length=1)
    kappa_values: List[int] = Field(default_factory=lambda: [1])
    mode: Literal['paper', 'desk'] = 'desk'
    trials: int = Field(default=10, ge=1)
    seed: int = Field(default=0, ge=0)
    output_path: str = 'results.csv'
    cache_dir: str = 'data/sequences'
    strict: bool = True
    jobs: int = Field(default=1, ge=1, le=256)
    sequences: Literal['shortest', 'canonical'] = 'shortest'
    m: Optional[int] = Field(default=None, ge=1)
    halt_on_hit: bool = False

    @field_validator('n_values')
    @classmethod
    def validate_n_values(cls, v):
        """Every n must be positive; duplicates are dropped."""
        if any(n < 1 for n in v):
            raise ValueError(f"n values must be positive, got {v}")
        return sorted(set(v))

    @field_validator('kappa_values')
    @classmethod
    def validate_kappa_values(cls, v):
        if not v:
            raise ValueError("At least one kappa value is required")
        if any(k < 1 or k > 20 for k in v):
            raise ValueError(f"kappa values must be in [1..20], got {v}")
        return sorted(set(v))

    @field_validator('algorithms')
    @classmethod
    def validate_algorithms(cls, v):
        return sorted(set(v), key=ALGORITHMS.index)

    @field_validator('output_path', 'cache_dir')
    @classmethod
    def validate_paths(cls, v):
        if not v or not v.strip():
            raise ValueError("Path cannot be empty")
        return v.strip()

    def combinations(self) -> List[tuple]:
        """(algorithm, n, kappa) triples; kappa is irrelevant to the baselines and pinned to 0."""
        combos = []
        for algorithm in self.algorithms:
            for n in self.n_values:
                kappas = self.kappa_values if algorithm == 'alg3' else [0]
                for kappa in kappas:
                    combos.append((algorithm, n, kappa))
        return combos


def validate_model(data: dict, model_class: type) -> tuple[bool, Any, Optional[str]]:
    """
    Generic validation function for model data.

    Returns:
        tuple: (is_valid, validated_model, error_message)
    """
    try:
        validated = model_class(**data)
        return True, validated, None
    except ValidationError as e:
        error_messages = []
        for error in e.errors():
            field = '.'.join(str(x) for x in error['loc'])
            message = error['msg']
            error_messages.append(f"{field}: {message}" if field else message)

        error_message = "; ".join(error_messages)
        logger.warning(f"Validation failed: {error_message}")
        return False, None, error_message
    except Exception as e:
        logger.error(f"Unexpected validation error: {e}")
        return False, None, str(e)


def require_model(data: dict, model_class: type):
    """validate_model, raising ConfigurationError on failure."""
    is_valid, validated, error = validate_model(data, model_class)
    if not is_valid:
        raise ConfigurationError(error)
    return validated
