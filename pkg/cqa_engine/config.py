#!/usr/bin/env python3
'''Configuration loading for the CQA engine.

Values come from, in increasing precedence: dataclass defaults, an optional YAML file
(path given explicitly or through CQA_ENGINE_CONFIG), and CQA_ENGINE_* environment
variables. A `.env` file in the working directory is loaded first.
'''

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from .errors import ConfigError

DEFAULT_REPAIR_CAP = 2 ** 20
DEFAULT_GARBAGE_ORACLE_BLOCK_CAP = 12
DEFAULT_BRUTE_LONGCYCLE_VERTEX_CAP = 14

_ENV_KEYS = {
    'log_level': 'CQA_ENGINE_LOG_LEVEL',
    'repair_cap': 'CQA_ENGINE_REPAIR_CAP',
    'garbage_oracle_block_cap': 'CQA_ENGINE_GARBAGE_ORACLE_CAP',
    'brute_longcycle_vertex_cap': 'CQA_ENGINE_BRUTE_LONGCYCLE_CAP',
    'faithful_codegen': 'CQA_ENGINE_FAITHFUL',
    'constant_order': 'CQA_ENGINE_CONSTANT_ORDER',
}


@dataclass(frozen=True)
class EngineConfig:
    log_level: str = 'INFO'
    repair_cap: int = DEFAULT_REPAIR_CAP
    garbage_oracle_block_cap: int = DEFAULT_GARBAGE_ORACLE_BLOCK_CAP
    brute_longcycle_vertex_cap: int = DEFAULT_BRUTE_LONGCYCLE_VERTEX_CAP
    faithful_codegen: bool = True
    constant_order: str = 'ascending'

    def __post_init__(self) -> None:
        if self.constant_order not in ('ascending', 'descending'):
            raise ConfigError(f"constant_order must be ascending or descending, "
                              f"got {self.constant_order!r}")
        for name in ('repair_cap', 'garbage_oracle_block_cap', 'brute_longcycle_vertex_cap'):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")


def _coerce(name: str, raw: Any) -> Any:
    '''Convert a raw YAML/env value to the type of the named field.'''
    try:
        if name == 'faithful_codegen':
            if isinstance(raw, bool):
                return raw
            return str(raw).strip().lower() in ('1', 'true', 'yes', 'on')
        if name in ('repair_cap', 'garbage_oracle_block_cap', 'brute_longcycle_vertex_cap'):
            if isinstance(raw, bool):
                raise ValueError("boolean given")
            return int(raw)
        return str(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value for {name}: {raw!r} ({e})")


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    known = {f.name for f in fields(EngineConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return data


def load_config(path: Optional[str] = None) -> EngineConfig:
    '''Load configuration from a YAML file and environment variables.'''
    load_dotenv()
    config = EngineConfig()
    file_path = path or os.getenv('CQA_ENGINE_CONFIG')
    if file_path:
        data = _read_yaml(Path(file_path))
        config = replace(config, **{k: _coerce(k, v) for k, v in data.items()})
    overrides = {}
    for name, key in _ENV_KEYS.items():
        raw = os.getenv(key)
        if raw is not None and raw != '':
            overrides[name] = _coerce(name, raw)
    if overrides:
        config = replace(config, **overrides)
    return config
