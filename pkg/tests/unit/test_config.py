import json
import os
import tempfile
import unittest
from unittest import mock

from fq.decomp.config import SUITE_NAMES, ExperimentConfig
from fq.decomp.exceptions import ConfigError


class TestExperimentConfig(unittest.TestCase):
    def setUp(self):
        self.raw = {
            "prime": 101,
            "degree": 1,
            "sets": {"A": "interval:0,10"},
            "function": "0,0,1",
            "suite": "partition",
            "trials": 3,
            "seed": 11,
            "out": "records.csv",
            "m": 8.0,
        }

    def test_aliases_are_translated(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            config = ExperimentConfig.parse(self.raw)
        self.assertEqual(config.p, 101)
        self.assertEqual(config.suites, ["partition"])
        self.assertEqual(config.output, "records.csv")
        self.assertEqual(config.m_override, 8.0)
        self.assertEqual(config.sets, {"A": "interval:0,10"})

    def test_defaults(self):
        config = ExperimentConfig()
        self.assertEqual(config.p, 1009)
        self.assertEqual(config.function, "1/0,1")
        self.assertEqual(tuple(config.suites), SUITE_NAMES)
        self.assertIsNone(config.m_override)

    def test_alias_and_canonical_key_together(self):
        raw = dict(self.raw, p=101)
        with self.assertRaises(ConfigError) as cm:
            ExperimentConfig.parse(raw)
        self.assertEqual(cm.exception.key, "p")

    def test_environment_overrides(self):
        env = {"FQ_DECOMP_SEED": "99", "FQ_DECOMP_THREADS": "4", "FQ_DECOMP_OUTPUT": "env.csv"}
        with mock.patch.dict(os.environ, env, clear=True):
            config = ExperimentConfig.parse(self.raw)
        self.assertEqual(config.seed, 99)
        self.assertEqual(config.threads, 4)
        self.assertEqual(config.output, "env.csv")

    def test_bad_environment_value(self):
        with mock.patch.dict(os.environ, {"FQ_DECOMP_SEED": "many"}, clear=True):
            with self.assertRaises(ConfigError) as cm:
                ExperimentConfig.parse(self.raw)
        self.assertEqual(cm.exception.key, "seed")

    def test_unknown_key_is_named(self):
        with self.assertRaises(ConfigError) as cm:
            ExperimentConfig.parse(dict(self.raw, colour="blue"))
        self.assertEqual(cm.exception.key, "colour")

    def test_schema_errors_name_the_key(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            with self.assertRaises(ConfigError) as cm:
                ExperimentConfig.parse(dict(self.raw, trials="many"))
            self.assertEqual(cm.exception.key, "trials")
            with self.assertRaises(ConfigError) as cm:
                ExperimentConfig.parse(dict(self.raw, sets={"A": 3}))
            self.assertEqual(cm.exception.key, "sets.A")

    def test_semantic_checks(self):
        cases = {
            "suites": {"suite": "nonsense"},
            "primes": {"primes": [101, 100]},
            "fields": {"fields": [4, 6]},
            "threads": {"threads": 0},
            "m_override": {"m": -1.0},
        }
        with mock.patch.dict(os.environ, {}, clear=True):
            for key, change in cases.items():
                with self.assertRaises(ConfigError, msg=key) as cm:
                    ExperimentConfig.parse(dict(self.raw, **change))
                self.assertEqual(cm.exception.key, key)

    def test_seed_must_fit_in_32_bits(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            for seed in (-1, 2**32):
                with self.assertRaises(ConfigError, msg=seed) as cm:
                    ExperimentConfig.parse(dict(self.raw, seed=seed))
                self.assertEqual(cm.exception.key, "seed")
            self.assertEqual(ExperimentConfig.parse(dict(self.raw, seed=2**32 - 1)).seed, 2**32 - 1)
        with mock.patch.dict(os.environ, {"FQ_DECOMP_SEED": "-1"}, clear=True):
            with self.assertRaises(ConfigError) as cm:
                ExperimentConfig.parse(self.raw)
        self.assertEqual(cm.exception.key, "seed")
        with self.assertRaises(ConfigError):
            ExperimentConfig().with_overrides(seed=-1)

    def test_not_an_object(self):
        with self.assertRaises(ConfigError):
            ExperimentConfig.parse([1, 2, 3])

    def test_load_from_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "config.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(self.raw, fh)
            with mock.patch.dict(os.environ, {}, clear=True):
                config = ExperimentConfig.load(path)
            self.assertEqual(config.trials, 3)
            broken = os.path.join(tmp, "broken.json")
            with open(broken, "w", encoding="utf-8") as fh:
                fh.write("{not json")
            with self.assertRaises(ConfigError):
                ExperimentConfig.load(broken)
            with self.assertRaises(ConfigError):
                ExperimentConfig.load(os.path.join(tmp, "missing.json"))

    def test_shipped_configs_parse(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            default = ExperimentConfig.shipped("default")
            acceptance = ExperimentConfig.shipped("acceptance")
        self.assertEqual(default.m_override, 16.0)
        self.assertEqual(acceptance.trials, 100)
        self.assertEqual(acceptance.output, "acceptance.csv")

    def test_with_overrides_skips_none(self):
        config = ExperimentConfig().with_overrides(seed=5, trials=None)
        self.assertEqual(config.seed, 5)
        self.assertEqual(config.trials, 20)
        with self.assertRaises(ConfigError):
            ExperimentConfig().with_overrides(threads=0)
