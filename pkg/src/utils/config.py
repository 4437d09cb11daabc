"""YAML scenario files.

Every key is optional. Component seeds (traffic, hops) that the file leaves
out are derived from the master ``seed``; a seed given on the command line
replaces the master seed and every component seed derived from it.
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Any

import yaml

from models.channel import ChannelConfig, RateAdaptation
from models.classifier import ClassifierConfig
from models.errors import ConfigError
from models.scenario import Placement, ScenarioConfig, SecretSource
from models.steg import DEFAULT_KEY_HEX, DEFAULT_NONCE_HEX, KeyMaterial
from models.traffic import TrafficProfile

from .seeding import Stream, derive_seed
from .steg_engine import CIPHERS

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = frozenset(
    {
        "mode",
        "utilization",
        "duration_s",
        "seed",
        "epoch",
        "profile",
        "classifier",
        "governor",
        "channel",
        "upstream",
        "downstream",
        "adaptation",
        "keys",
        "secret",
    }
)


def _section(data: dict[str, Any], key: str) -> dict[str, Any]:
    value = data.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be a mapping, got {type(value).__name__}")
    return value


def _keys_from_dict(data: dict[str, Any]) -> KeyMaterial:
    unknown = set(data) - {"key", "nonce", "cipher"}
    if unknown:
        raise ConfigError(f"unknown keys entries: {sorted(unknown)}")
    cipher = data.get("cipher", "chacha20")
    if cipher not in CIPHERS:
        raise ConfigError(f"unknown cipher {cipher!r}; choose from {sorted(CIPHERS)}")
    return KeyMaterial.from_hex(
        str(data.get("key", DEFAULT_KEY_HEX)), str(data.get("nonce", DEFAULT_NONCE_HEX)), cipher
    )


def _secret_from_dict(data: dict[str, Any], base_dir: Path | None) -> SecretSource:
    unknown = set(data) - {"path", "random_bytes"}
    if unknown:
        raise ConfigError(f"unknown secret entries: {sorted(unknown)}")
    path = data.get("path")
    if path is not None and base_dir is not None and not Path(path).is_absolute():
        path = str(base_dir / path)
    return SecretSource(path=path, random_bytes=int(data.get("random_bytes", SecretSource.random_bytes)))


def scenario_from_dict(
    data: dict[str, Any], seed: int | None = None, base_dir: Path | None = None
) -> ScenarioConfig:
    """Validate a parsed scenario mapping.

    Args:
        data: Parsed YAML document.
        seed: Master seed override; when set, component seeds are re-derived from it.
        base_dir: Directory that relative secret paths are resolved against.

    Raises:
        ConfigError: On unknown keys, bad types or out-of-range values.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"scenario must be a mapping, got {type(data).__name__}")
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    try:
        master = int(data.get("seed", 1)) if seed is None else seed
        forced = seed is not None

        profile_data = dict(_section(data, "profile"))
        if forced or "seed" not in profile_data:
            profile_data["seed"] = master

        def hop(key: str, stream: Stream) -> ChannelConfig:
            hop_data = dict(_section(data, key))
            if forced:
                hop_data.pop("seed", None)
            return ChannelConfig.from_dict(hop_data, default_seed=derive_seed(master, stream))

        governor = _section(data, "governor")
        if set(governor) - {"threshold"}:
            raise ConfigError(f"unknown governor keys: {sorted(set(governor) - {'threshold'})}")
        return ScenarioConfig(
            mode=Placement(data.get("mode", Placement.END_TO_END.value)),
            utilization=float(data.get("utilization", 1.0)),
            profile=TrafficProfile.from_dict(profile_data),
            channel=hop("channel", Stream.CHANNEL),
            upstream=hop("upstream", Stream.UPSTREAM),
            downstream=hop("downstream", Stream.DOWNSTREAM),
            classifier=ClassifierConfig.from_dict(_section(data, "classifier")),
            governor_threshold=float(governor.get("threshold", 0.70)),
            adaptation=RateAdaptation.from_dict(_section(data, "adaptation")),
            keys=_keys_from_dict(_section(data, "keys")),
            duration_s=float(data.get("duration_s", 300.0)),
            secret=_secret_from_dict(_section(data, "secret"), base_dir),
            seed=master,
            epoch=int(data.get("epoch", 0)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def load_scenario(path: str | Path | None = None, seed: int | None = None) -> ScenarioConfig:
    """Load a scenario file, or the defaults when ``path`` is None.

    Raises:
        ConfigError: If the file is not valid YAML or fails validation.
        OSError: If the file cannot be read.
    """
    if path is None:
        return scenario_from_dict({}, seed)
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        try:
            data = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    logger.debug("loaded scenario from %s", path)
    return scenario_from_dict(data or {}, seed, base_dir=path.parent)


def reseed(cfg: ScenarioConfig, seed: int) -> ScenarioConfig:
    """Copy of ``cfg`` whose every random stream follows from ``seed``."""
    return replace(
        cfg,
        seed=seed,
        profile=replace(cfg.profile, seed=seed),
        channel=replace(cfg.channel, seed=derive_seed(seed, Stream.CHANNEL)),
        upstream=replace(cfg.upstream, seed=derive_seed(seed, Stream.UPSTREAM)),
        downstream=replace(cfg.downstream, seed=derive_seed(seed, Stream.DOWNSTREAM)),
    )


def dump_scenario(cfg: ScenarioConfig) -> str:
    """Resolved scenario as YAML, for the results directory."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
