import copy
import pickle

import pytest

from iwacoh.config import DEFAULT_CONFIG, make_config
from iwacoh.errors import ConfigError


class TestConfig:
    def test_defaults(self):
        assert DEFAULT_CONFIG.degree_cap == 3
        assert DEFAULT_CONFIG.group_order_cap == 24
        assert DEFAULT_CONFIG.random_cases.signs == 500

    def test_overrides_copy_the_base(self):
        cfg = make_config(degree_cap=2, random_cases={"tate": 3})
        assert cfg.degree_cap == 2
        assert cfg.random_cases.tate == 3
        assert cfg.random_cases.cups == DEFAULT_CONFIG.random_cases.cups
        assert DEFAULT_CONFIG.random_cases.tate == 40
        assert DEFAULT_CONFIG.degree_cap == 3

    def test_default_copy_round_trips(self):
        cfg = make_config()
        assert cfg == DEFAULT_CONFIG
        assert cfg is not DEFAULT_CONFIG and cfg.random_cases is not DEFAULT_CONFIG.random_cases
        cfg.random_cases.signs = 1
        assert DEFAULT_CONFIG.random_cases.signs == 500

    def test_copies_and_pickles(self):
        cfg = make_config(window=3)
        for clone in (copy.deepcopy(cfg), pickle.loads(pickle.dumps(cfg))):
            assert clone == cfg
            assert clone.window == 3 and clone.random_cases.cups == 200

    def test_missing_keys_read_as_none(self):
        assert make_config().nothing is None
        with pytest.raises(AttributeError):
            make_config().__nothing__

    def test_layered_overrides(self):
        base = make_config(window=2)
        cfg = make_config(base, seed=5)
        assert (cfg.window, cfg.seed) == (2, 5)

    def test_values_are_coerced(self):
        assert make_config(tate_depth="2").tate_depth == 2

    @pytest.mark.parametrize("overrides", [{"colour": 1}, {"random_cases": {"nope": 1}}])
    def test_unknown_keys(self, overrides):
        with pytest.raises(ConfigError):
            make_config(**overrides)
