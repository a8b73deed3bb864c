#!/usr/bin/env python3
"""
Configuration and input validation tests.
"""

import pytest

from config import Config, DevelopmentConfig, SweepConfig, TestingConfig, get_config
from validators import ConfigurationError, ExperimentConfig, Parameters, require_model, validate_model


@pytest.mark.unit
class TestConfig:

    def test_defaults_validate(self):
        assert Config().validate()

    def test_collects_every_problem(self):
        cfg = Config(ENUMERATION_LIMIT=0, HISTORY_RETENTION='none', JOBS=0)
        with pytest.raises(ValueError) as exc:
            cfg.validate()
        message = str(exc.value)
        assert 'ENUMERATION_LIMIT' in message
        assert 'HISTORY_RETENTION' in message
        assert 'JOBS' in message

    @pytest.mark.parametrize('env,cls', [('development', DevelopmentConfig), ('sweep', SweepConfig),
                                         ('testing', TestingConfig), ('other', Config)])
    def test_get_config(self, env, cls):
        assert type(get_config(env)) is cls

    def test_environment_selects_config(self, monkeypatch):
        monkeypatch.setenv('ONEMAX_ENV', 'sweep')
        cfg = get_config()
        assert isinstance(cfg, SweepConfig)
        assert cfg.HISTORY_RETENTION == 'count'

    def test_testing_overrides(self):
        cfg = TestingConfig()
        assert cfg.HISTORY_RETENTION == 'full'
        assert cfg.ENUMERATION_LIMIT == 16

    def test_rls_budget(self):
        assert Config(RLS_MAX_QUERIES=0).rls_budget(64) == 10646
        assert Config(RLS_MAX_QUERIES=0).rls_budget(1) == 64
        assert Config(RLS_MAX_QUERIES=500).rls_budget(64) == 500


@pytest.mark.unit
class TestParameters:
    """Derived lengths and storage inequalities."""

    def test_desk_defaults(self):
        p = Parameters(algorithm='alg3', n=32, kappa=2)
        assert (p.ell, p.m, p.t, p.t_last, p.blocks) == (4, 4, 5, None, 8)
        assert p.k == 9

    def test_short_last_block(self):
        p = Parameters(algorithm='alg3', n=30, kappa=2)
        assert p.ell_last == 2
        assert p.block_lengths() == [4, 2]
        assert p.t_for(2) == 3

    def test_block_must_be_shorter_than_n(self):
        with pytest.raises(ValueError, match='smaller than n'):
            Parameters(algorithm='alg3', n=4, kappa=2)

    def test_storage_must_fit(self):
        with pytest.raises(ValueError, match='exceeds n'):
            Parameters(algorithm='alg3', n=12, kappa=2)

    def test_records_must_fit(self):
        with pytest.raises(ValueError, match='exceeds storage'):
            Parameters(algorithm='alg3', n=64, kappa=2, m=4, t=6)

    def test_m_lower_bound(self):
        with pytest.raises(ValueError, match='below'):
            Parameters(algorithm='alg3', n=64, kappa=2, m=3, t=2)

    def test_paper_mode(self):
        p = Parameters(algorithm='alg3', n=512, kappa=7, mode='paper')
        assert (p.m, p.t) == (9, 64)

    def test_paper_mode_small_kappa_fails_storage(self):
        with pytest.raises(ValueError):
            Parameters(algorithm='alg3', n=1024, kappa=2, mode='paper')

    def test_paper_mode_fixes_m(self):
        with pytest.raises(ValueError, match='fixes m'):
            Parameters(algorithm='alg3', n=1024, kappa=7, mode='paper', m=10)

    @pytest.mark.parametrize('n,t_last', [(520, 10), (513, 2)])
    def test_paper_last_block(self, n, t_last):
        assert Parameters(algorithm='alg3', n=n, kappa=7, mode='paper').t_last == t_last

    def test_baselines_ignore_storage(self):
        p = Parameters(algorithm='rls', n=3)
        assert p.m is None

    def test_sampling_needs_two_bits(self):
        with pytest.raises(ValueError):
            Parameters(algorithm='sampling', n=1)

    def test_kappa_range(self):
        assert not validate_model({'algorithm': 'alg3', 'n': 64, 'kappa': 21}, Parameters)[0]


@pytest.mark.unit
class TestExperimentConfig:

    def test_normalises_lists(self):
        cfg = ExperimentConfig(algorithms=['rls', 'alg3', 'rls'], n_values=[64, 32, 64], kappa_values=[2, 1])
        assert cfg.algorithms == ['alg3', 'rls']
        assert cfg.n_values == [32, 64]
        assert cfg.kappa_values == [1, 2]

    def test_combinations_pin_baseline_kappa(self):
        cfg = ExperimentConfig(algorithms=['alg3', 'rls'], n_values=[32], kappa_values=[1, 2])
        assert cfg.combinations() == [('alg3', 32, 1), ('alg3', 32, 2), ('rls', 32, 0)]

    @pytest.mark.parametrize('data', [
        {'algorithms': ['alg3'], 'n_values': []},
        {'algorithms': [], 'n_values': [32]},
        {'algorithms': ['alg4'], 'n_values': [32]},
        {'algorithms': ['alg3'], 'n_values': [0]},
        {'algorithms': ['alg3'], 'n_values': [32], 'kappa_values': [0]},
        {'algorithms': ['alg3'], 'n_values': [32], 'trials': 0},
        {'algorithms': ['alg3'], 'n_values': [32], 'output_path': '  '},
    ])
    def test_rejects(self, data):
        is_valid, model, error = validate_model(data, ExperimentConfig)
        assert not is_valid
        assert model is None
        assert error

    def test_require_model(self):
        with pytest.raises(ConfigurationError):
            require_model({'algorithms': ['alg3'], 'n_values': []}, ExperimentConfig)
        assert require_model({'algorithms': ['rls'], 'n_values': [8]}, ExperimentConfig).trials == 10
