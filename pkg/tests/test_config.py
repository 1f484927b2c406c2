import pytest

from dnaotp.config import (ConfigError, RunConfig, config_from_dict,
                           config_to_dict, load_config, save_config)


class TestSchema:
    def test_defaults(self):
        cfg = config_from_dict({})
        assert cfg.synthesis.diversity == 10000
        assert cfg.sequencing.depth == 4.0
        assert cfg.pipeline.min_payload_q == 30
        assert cfg.attack.scenario == "none"

    def test_partial_override(self):
        cfg = config_from_dict({"synthesis": {"diversity": 123},
                                "sequencing": {"sub_rate": 0.02}})
        assert cfg.synthesis.diversity == 123
        assert cfg.sequencing.sub_rate == 0.02
        assert cfg.sequencing.depth == 4.0  # untouched default

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"sequencer": {}})

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"sequencing": {"sub_rte": 0.01}})

    def test_unknown_seed_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"seeds": {"bottleneck": 1}})

    def test_non_mapping_section_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"sequencing": [1, 2]})

    def test_bad_bias_kind_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"bias": {"kind": "solexa"}})

    def test_bad_attack_scenario_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"attack": {"scenario": "mitm"}})


class TestRoundtrip:
    def test_dict_roundtrip(self):
        cfg = config_from_dict({"pad_id": "pad-9",
                                "synthesis": {"diversity": 777},
                                "seeds": {"pool_a": 999}})
        back = config_from_dict(config_to_dict(cfg))
        assert back == cfg

    def test_yaml_roundtrip(self, tmp_path):
        cfg = config_from_dict({"pipeline": {"min_payload_q": 0,
                                             "median_ratio": 0.0},
                                "attack": {"scenario": "steal",
                                           "fraction": 0.9}})
        path = tmp_path / "run.yaml"
        save_config(cfg, path)
        assert load_config(path) == cfg

    def test_default_equals_empty_dict(self):
        assert config_from_dict({}) == RunConfig()
