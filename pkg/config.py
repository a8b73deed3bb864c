#!/usr/bin/env python3
"""
Experiment configuration management.
"""

import math
import os
from dataclasses import dataclass
from typing import Optional

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == 'true'


@dataclass
class Config:
    """Simulation and sweep configuration."""

    # Enumeration budgets
    ENUMERATION_LIMIT: int = int(os.getenv('ENUMERATION_LIMIT', '24'))
    SAMPLING_MAX_N: int = int(os.getenv('SAMPLING_MAX_N', '24'))

    # Sequence search settings
    SEARCH_ATTEMPTS: int = int(os.getenv('SEARCH_ATTEMPTS', '200'))
    SEQUENCE_CACHE_DIR: str = os.getenv('SEQUENCE_CACHE_DIR', 'data/sequences')

    # Run settings
    REPEAT_CAP_FACTOR: int = int(os.getenv('REPEAT_CAP_FACTOR', '64'))
    RLS_MAX_QUERIES: int = int(os.getenv('RLS_MAX_QUERIES', '0'))  # 0 = derived from n
    HISTORY_RETENTION: str = os.getenv('HISTORY_RETENTION', 'count')

    # Sweep settings
    OUTPUT_PATH: str = os.getenv('OUTPUT_PATH', 'results.csv')
    DEFAULT_TRIALS: int = int(os.getenv('DEFAULT_TRIALS', '10'))
    DEFAULT_MODE: str = os.getenv('DEFAULT_MODE', 'desk')
    STRICT: bool = _env_bool('STRICT', 'true')
    JOBS: int = int(os.getenv('JOBS', '1'))

    # Logging settings
    LOG_LEVEL: str = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FORMAT: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    LOG_FILE: Optional[str] = os.getenv('LOG_FILE', None)

    @classmethod
    def from_env(cls):
        """Create config from environment variables."""
        instance = cls()
        return instance

    def rls_budget(self, n: int) -> int:
        """Query cap for the RLS baseline; generous multiple of e*n*ln(n)."""
        if self.RLS_MAX_QUERIES > 0:
            return self.RLS_MAX_QUERIES
        return max(64, int(40 * n * max(1.0, math.log(n))))

    def validate(self):
        """Validate configuration settings."""
        errors = []

        if self.ENUMERATION_LIMIT < 1 or self.ENUMERATION_LIMIT > 30:
            errors.append(f"ENUMERATION_LIMIT must be between 1 and 30, got {self.ENUMERATION_LIMIT}")

        if self.SAMPLING_MAX_N < 2 or self.SAMPLING_MAX_N > 30:
            errors.append(f"SAMPLING_MAX_N must be between 2 and 30, got {self.SAMPLING_MAX_N}")

        if self.SEARCH_ATTEMPTS < 1:
            errors.append(f"SEARCH_ATTEMPTS must be at least 1, got {self.SEARCH_ATTEMPTS}")

        if self.REPEAT_CAP_FACTOR < 1:
            errors.append(f"REPEAT_CAP_FACTOR must be at least 1, got {self.REPEAT_CAP_FACTOR}")

        if self.HISTORY_RETENTION not in ('full', 'count'):
            errors.append(f"HISTORY_RETENTION must be 'full' or 'count', got {self.HISTORY_RETENTION}")

        if self.DEFAULT_MODE not in ('paper', 'desk'):
            errors.append(f"DEFAULT_MODE must be 'paper' or 'desk', got {self.DEFAULT_MODE}")

        if self.DEFAULT_TRIALS < 1:
            errors.append(f"DEFAULT_TRIALS must be at least 1, got {self.DEFAULT_TRIALS}")

        if self.JOBS < 1:
            errors.append(f"JOBS must be at least 1, got {self.JOBS}")

        if errors:
            raise ValueError(f"Configuration validation failed: {'; '.join(errors)}")

        return True


# Create a global config instance
config = Config.from_env()


# Development config override
@dataclass
class DevelopmentConfig(Config):
    """Development-specific configuration."""
    LOG_LEVEL: str = 'DEBUG'
    HISTORY_RETENTION: str = 'full'


# Large sweep config override
@dataclass
class SweepConfig(Config):
    """Configuration for long seed sweeps."""
    LOG_LEVEL: str = 'WARNING'
    HISTORY_RETENTION: str = 'count'


# Testing config override
@dataclass
class TestingConfig(Config):
    """Testing-specific configuration."""
    __test__ = False

    LOG_LEVEL: str = 'ERROR'
    HISTORY_RETENTION: str = 'full'
    ENUMERATION_LIMIT: int = 16
    SEARCH_ATTEMPTS: int = 50


def get_config(env: str = None) -> Config:
    """
    Get configuration based on environment.

    Args:
        env: Environment name (development, sweep, testing)

    Returns:
        Config instance
    """
    if env is None:
        env = os.getenv('ONEMAX_ENV', 'development')

    configs = {
        'development': DevelopmentConfig,
        'sweep': SweepConfig,
        'testing': TestingConfig
    }

    config_class = configs.get(env, Config)
    return config_class()
