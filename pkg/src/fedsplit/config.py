"""Flat dotted-key configuration files and override handling.

Format: one ``key = value`` pair per line, ``#`` comments, blank lines
ignored.  The flat shape keeps sweep overrides diff-friendly: a sweep
mutates exactly one key.  Unknown keys and unparsable values are rejected
with the offending key named.
"""

from __future__ import annotations

from .errors import ConfigError
from .he import HeCostModel, HeParams
from .models import ModelSpec
from .runtime import (DataConfig, ExperimentConfig, ProtectionMode,
                      RatioSchedule, RoundConfig)
from .voting import PartitionStrategy

__all__ = ["parse_kv_text", "apply_overrides", "config_from_flat",
           "load_config", "KNOWN_KEYS"]


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_hidden_dims(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(part) for part in text.split(","))


_SCHEMA = {
    "dataset.kind": str,
    "dataset.num_samples": int,
    "dataset.input_dim": int,
    "dataset.num_classes": int,
    "dataset.separation": float,
    "dataset.path": str,
    "dataset.partition": str,
    "dataset.dirichlet_alpha": float,
    "dataset.test_fraction": float,
    "model.kind": str,
    "model.hidden_dims": _parse_hidden_dims,
    "round.clients_total_N": int,
    "round.clients_sampled_n": int,
    "round.local_epochs_K": int,
    "round.learning_rate_eta": float,
    "round.batch_size": int,
    "round.rounds_T": int,
    "protection.kind": str,
    "protection.amplitude_scale": float,
    "schedule.mode": str,
    "schedule.r0": float,
    "schedule.lambda": float,
    "voting.strategy": str,
    "dp.epsilon": float,
    "dp.delta": float,
    "dp.theta": float,
    "he.backend": str,
    "he.ring_degree": int,
    "he.scale_bits": int,
    "he.modulus_bits": int,
    "he.max_additions": int,
    "he.per_slot_seconds": float,
    "he.per_op_seconds": float,
    "report.include_wall_time": _parse_bool,
    "seed": int,
    "workers": int,
}

KNOWN_KEYS = tuple(sorted(_SCHEMA))


def parse_kv_text(text: str, source: str = "<config>") -> dict:
    """Parse flat key = value lines into a raw string map."""
    flat = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}: line {line_no}: expected 'key = value', "
                              f"got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"{source}: line {line_no}: empty key")
        flat[key] = value.strip()
    return flat


def apply_overrides(flat: dict, overrides) -> dict:
    """Overlay 'key=value' strings (CLI --set) on top of file values."""
    merged = dict(flat)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like key=value")
        key, value = item.split("=", 1)
        merged[key.strip()] = value.strip()
    return merged


def _typed(flat: dict) -> dict:
    typed = {}
    for key, raw in flat.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            typed[key] = _SCHEMA[key](raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from None
    return typed


def config_from_flat(flat: dict) -> ExperimentConfig:
    """Build a validated experiment config; defaults fill missing keys."""
    v = _typed(flat)

    def section(prefix: str, cls, rename=None):
        rename = rename or {}
        kwargs = {}
        for key, value in v.items():
            if key.startswith(prefix + "."):
                name = key[len(prefix) + 1:]
                kwargs[rename.get(name, name)] = value
        try:
            return cls(**kwargs)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"config section {prefix!r}: {exc}") from None

    data = section("dataset", DataConfig)
    rounds = section("round", RoundConfig)
    protection = section("protection", ProtectionMode)
    schedule = section("schedule", RatioSchedule, rename={"lambda": "lam"})
    try:
        model = ModelSpec(kind=v.get("model.kind", "logistic"),
                          input_dim=data.input_dim,
                          num_classes=data.num_classes,
                          hidden_dims=v.get("model.hidden_dims", ()))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"config section 'model': {exc}") from None
    he_kwargs = {name: v[f"he.{name}"] for name in
                 ("ring_degree", "scale_bits", "modulus_bits", "max_additions")
                 if f"he.{name}" in v}
    cost_kwargs = {f"{name}": v[f"he.{name}"] for name in
                   ("per_slot_seconds", "per_op_seconds") if f"he.{name}" in v}
    try:
        he_params = HeParams(**he_kwargs)
        he_cost = HeCostModel(**cost_kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"config section 'he': {exc}") from None
    backend = v.get("he.backend", "mock")
    if backend not in ("mock", "ckks"):
        raise ConfigError(f"config key 'he.backend': must be mock or ckks, "
                          f"got {backend!r}")
    try:
        strategy = PartitionStrategy(v.get("voting.strategy", "max"))
    except ValueError:
        raise ConfigError(
            f"config key 'voting.strategy': must be one of "
            f"{[s.value for s in PartitionStrategy]}, got {v['voting.strategy']!r}"
        ) from None
    try:
        return ExperimentConfig(
            data=data, model=model, rounds=rounds, protection=protection,
            schedule=schedule, strategy=strategy,
            dp_epsilon=v.get("dp.epsilon", 1.0),
            dp_delta=v.get("dp.delta", 1e-5),
            dp_theta=v.get("dp.theta", 1.0),
            he_backend=backend, he_params=he_params, he_cost=he_cost,
            seed=v.get("seed", 0),
            workers=v.get("workers", 1),
            include_wall_time=v.get("report.include_wall_time", False),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str, overrides=None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    flat = apply_overrides(parse_kv_text(text, source=path), overrides)
    return config_from_flat(flat)
