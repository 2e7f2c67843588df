"""JSON run-configuration loading.

One file configures backends (per pipeline role), the verification
bound, stage knobs, and optional template/decontamination paths. The
path comes from a CLI flag or the SVAFORGE_CONFIG environment variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .gateway import BackendProfile
from .pipeline import DropPolicy, StageConfig
from .verify import Bound

ENV_VAR = "SVAFORGE_CONFIG"

_ROLES = ("generator", "back_translator", "judge", "weak", "reasoner")


@dataclass
class RunConfig:
    stage: StageConfig
    template_dir: Optional[str] = None
    manifest: Optional[str] = None


def resolve_config_path(flag_value: Optional[str]) -> Optional[Path]:
    if flag_value:
        return Path(flag_value)
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else None


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(data, base=path.parent)


def parse_config(data: dict, base: Optional[Path] = None) -> RunConfig:
    base = base or Path.cwd()

    def _resolve(p):
        if p is None:
            return None
        p = Path(p)
        return str(p if p.is_absolute() else base / p)

    try:
        backends = {}
        for role, profile in data.get("backends", {}).items():
            if role not in _ROLES:
                raise ConfigError(f"unknown backend role {role!r}; "
                                  f"expected one of {_ROLES}")
            profile = dict(profile)
            if profile.get("fixture"):
                profile["fixture"] = _resolve(profile["fixture"])
            backends[role] = BackendProfile.from_dict(profile)
        bound = Bound(**data.get("bound", {}))
        drop_policy = DropPolicy(**data.get("drop_policy", {}))
        stage = StageConfig(
            bound=bound,
            backends=backends,
            difficulty_samples=data.get("difficulty_samples", 5),
            drop_policy=drop_policy,
            seed=data.get("seed", 0),
            equivalence_mode=data.get("equivalence_mode", "design"),
            widths={k: int(v) for k, v in data.get("widths", {}).items()},
            reset_ticks=data.get("reset_ticks", 1),
            reset_patterns=data.get("reset_patterns"),
            decontam_corpus=_resolve(data.get("decontam_corpus")),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(stage=stage,
                     template_dir=_resolve(data.get("template_dir")),
                     manifest=_resolve(data.get("manifest")))
