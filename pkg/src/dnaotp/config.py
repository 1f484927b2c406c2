"""Declarative run configuration (YAML), schema-validated.

Every stochastic step has an explicit seed; unknown fields are
rejected so typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import yaml


class ConfigError(ValueError):
    pass


def _from_dict(cls, data, path="config"):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"{path}: unknown field(s) {sorted(unknown)}")
    return cls(**{name: data[name] for name in known if name in data})


@dataclass
class TemplateConfig:
    blocks_per_strand: int = 14
    block_len: int = 5


@dataclass
class BiasConfig:
    kind: str = "nanopore"        # uniform | drift | nanopore
    corr_order: int = 1
    drift_start: float = 0.28
    drift_slope: float = -0.0005

    def __post_init__(self):
        if self.kind not in ("uniform", "drift", "nanopore"):
            raise ConfigError(f"unknown bias kind {self.kind!r}")


@dataclass
class SynthesisConfig:
    pool_size: int = 100000
    diversity: int = 10000        # assembled keys


@dataclass
class AmplifyConfig:
    cycles: int = 2
    efficiency: float = 1.0
    err_rate: float = 1.0e-6


@dataclass
class UmiConfig:
    length: int = 5
    mis_tag_rate: float = 0.0


@dataclass
class SequencingConfig:
    sub_rate: float = 0.01
    ins_rate: float = 0.005
    del_rate: float = 0.01
    depth: float = 4.0
    q_sigma: float = 4.0


@dataclass
class PipelineConfig:
    min_median_q: float = 10.0
    len_window_lo: float = 0.85
    len_window_hi: float = 1.15
    band: int = 12
    min_score_frac: float = 0.5
    min_payload_q: int = 30
    median_ratio: float = 0.5
    min_cluster_size: int = 2


@dataclass
class ProtocolConfig:
    tau: float = 0.5


@dataclass
class AttackConfig:
    scenario: str = "none"        # none | steal | copy_replace
    fraction: float = 0.5         # steal: fraction of molecules diverted
    cycles: int = 1               # copy_replace: Eve's PCR cycles
    efficiency: float = 0.95
    err_rate: float = 1.0e-6
    return_fraction: float = 0.5  # copy_replace: fraction sent on to Bob
    eve_depth: float = 4.0        # Eve's own sequencing depth

    def __post_init__(self):
        if self.scenario not in ("none", "steal", "copy_replace"):
            raise ConfigError(f"unknown attack scenario {self.scenario!r}")


@dataclass
class ReconcileConfig:
    dfr_exponent: int = 128       # target DFR = 2^-exponent
    safety: str = "auto"          # auto | none
    m_min: int = 4
    m_max: int = 16


@dataclass
class SeedsConfig:
    pool_a: int = 101
    pool_b: int = 102
    assemble: int = 103
    amplify: int = 104
    split: int = 105
    attack: int = 106
    umi_alice: int = 107
    umi_bob: int = 108
    umi_eve: int = 113
    seq_alice: int = 109
    seq_bob: int = 110
    seq_eve: int = 111
    sift: int = 112


@dataclass
class RunConfig:
    pad_id: str = "pad-000"
    template: TemplateConfig = field(default_factory=TemplateConfig)
    bias: BiasConfig = field(default_factory=BiasConfig)
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    amplify: AmplifyConfig = field(default_factory=AmplifyConfig)
    umi: UmiConfig = field(default_factory=UmiConfig)
    sequencing: SequencingConfig = field(default_factory=SequencingConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    attack: AttackConfig = field(default_factory=AttackConfig)
    reconcile: ReconcileConfig = field(default_factory=ReconcileConfig)
    seeds: SeedsConfig = field(default_factory=SeedsConfig)


_SECTIONS = {
    "template": TemplateConfig, "bias": BiasConfig,
    "synthesis": SynthesisConfig, "amplify": AmplifyConfig,
    "umi": UmiConfig, "sequencing": SequencingConfig,
    "pipeline": PipelineConfig, "protocol": ProtocolConfig,
    "attack": AttackConfig, "reconcile": ReconcileConfig,
    "seeds": SeedsConfig,
}


def config_from_dict(data: dict) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping")
    unknown = set(data) - set(_SECTIONS) - {"pad_id"}
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}")
    kwargs = {}
    if "pad_id" in data:
        if not isinstance(data["pad_id"], str):
            raise ConfigError("pad_id must be a string")
        kwargs["pad_id"] = data["pad_id"]
    for name, cls in _SECTIONS.items():
        if name in data:
            kwargs[name] = _from_dict(cls, data[name], name)
    return RunConfig(**kwargs)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return config_from_dict(data)


def config_to_dict(cfg: RunConfig) -> dict:
    out = {"pad_id": cfg.pad_id}
    for name, cls in _SECTIONS.items():
        section = getattr(cfg, name)
        out[name] = {f.name: getattr(section, f.name) for f in fields(cls)}
    return out


def save_config(cfg: RunConfig, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=False)
