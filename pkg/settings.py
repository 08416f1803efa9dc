# \file    settings.py
# \brief   Run-time settings resolved from TROPSING_* environment variables,
#          overridable from the command line.

import os
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from errors import SchemaError

G_CONVENTIONS = ("direct", "closed_form", "calibrated")

DEFAULT_SEED = 20240220


@dataclass(frozen=True)
class Settings:
    seed: int = DEFAULT_SEED
    jobs: int = 1
    g_convention: str = "direct"
    rescale: bool = True

    def __post_init__(self):
        if self.jobs < 1:
            raise SchemaError("jobs must be positive", jobs=self.jobs)
        if self.g_convention not in G_CONVENTIONS:
            raise SchemaError(
                f"unknown G convention `{self.g_convention}`",
                allowed=list(G_CONVENTIONS))

    def override(self, **changes) -> "Settings":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _int_from_env(env: Mapping[str, str], key: str, default: int) -> int:
    raw = env.get(key)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"{key} must be an integer", value=raw) from None


def from_environment(env: Optional[Mapping[str, str]] = None) -> Settings:
    env = os.environ if env is None else env
    return Settings(
        seed=_int_from_env(env, "TROPSING_SEED", DEFAULT_SEED),
        jobs=_int_from_env(env, "TROPSING_JOBS", 1),
        g_convention=env.get("TROPSING_G_CONVENTION", "direct") or "direct",
        rescale=bool(_int_from_env(env, "TROPSING_RESCALE", 1)),
    )
