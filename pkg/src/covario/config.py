"""Session-wide settings shared by the CLI and the self-test."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace

FORMATS = ("json", "csv")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    geom_tol: float = 1e-9
    classify_tol: float = 1e-7
    recon_tol: float = 1e-8
    samples: int = 33
    box_scale: float = 20.0
    seed: int = 0
    fmt: str = "json"

    def __post_init__(self):
        for name in ("geom_tol", "classify_tol", "recon_tol", "box_scale"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and val > 0 and val == val and val != float("inf")):
                raise ConfigError(f"{name} must be a positive finite number, got {val!r}")
        if not isinstance(self.samples, int) or self.samples < 9 or self.samples % 2 == 0:
            raise ConfigError(f"samples must be an odd integer >= 9, got {self.samples!r}")
        if self.fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.fmt!r}")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")

    @classmethod
    def from_env(cls, **overrides):
        """Build from overrides; ``COVARIO_SEED`` replaces the seed when set."""
        env = os.environ.get("COVARIO_SEED")
        if env is not None:
            try:
                overrides["seed"] = int(env)
            except ValueError:
                raise ConfigError(f"COVARIO_SEED must be an integer, got {env!r}") from None
        return cls(**overrides)

    def with_(self, **changes):
        return replace(self, **changes)

    def tolerances(self):
        d = asdict(self)
        d.pop("fmt")
        return d
