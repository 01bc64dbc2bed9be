"""Run configuration: defaults, a flat key=value file, then QUATBANACH_* environment overrides."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .padic import vp_int
from .quaternion import AlgebraParams

ENV_PREFIX = "QUATBANACH_"

# accepted spellings in config files and environment variables
_ALIASES = {
    "n_prec": "prec", "precision": "prec", "digits": "prec",
    "truncation": "M", "m": "M",
    "lambda_i": "lam_I", "lam_i": "lam_I",
    "lambda_h": "lam_h",
    "chi_delta": "chi",
    "level": "n",
    "tail_window": "window",
    "out_path": "out", "output": "out",
    "output_format": "format",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    DEFAULT_PREC = 200

    p: int = 5
    iota: int | None = None
    prec: int = DEFAULT_PREC
    M: int = 160
    lam_I: int = 0
    lam_h: int = 1
    chi: int = 1
    c_w: int = 25
    c_v: int = 5
    c_h: int = 0
    c_I: int = 0
    n: int = 1
    window: int = 40
    out: str | None = None
    format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        try:
            params = AlgebraParams(self.p, self.iota, self.prec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        object.__setattr__(self, "iota", params.iota)
        if self.M < 1:
            raise ConfigError("M must be positive")
        if self.n < 0:
            raise ConfigError("level n must be non-negative")
        if not 2 <= self.window <= (self.M + 1) // 2:
            raise ConfigError(f"window must lie in [2, {(self.M + 1) // 2}] for M = {self.M}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        for name in ("c_w", "c_v", "c_h", "c_I"):
            c = getattr(self, name)
            if c != 0 and vp_int(self.p, c) < 1:
                raise ConfigError(f"{name} = {c} must be divisible by p = {self.p}")

    @property
    def params(self) -> AlgebraParams:
        return AlgebraParams(self.p, self.iota, self.prec)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _canonical_key(key: str) -> str:
    k = key.strip()
    if k in _FIELDS:
        return k
    if k == "N":  # precision; the level is n (or LEVEL in the environment)
        return "prec"
    low = k.lower()
    for name in _FIELDS:
        if name.lower() == low:
            return name
    if low in _ALIASES:
        return _ALIASES[low]
    raise ConfigError(f"unknown config key {key!r}")


def _coerce(name: str, raw: str):
    raw = raw.strip()
    if name == "out":
        return raw or None
    if name == "format":
        return raw.lower()
    if name == "iota" and raw.lower() in ("", "none", "auto"):
        return None
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise ConfigError(f"{name}: expected an integer, got {raw!r}") from exc


def parse_text(text: str) -> dict:
    """key = value lines; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        name = _canonical_key(key)
        out[name] = _coerce(name, value)
    return out


def env_overrides(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for key, value in environ.items():
        if key.startswith(ENV_PREFIX):
            name = _canonical_key(key[len(ENV_PREFIX):])
            out[name] = _coerce(name, value)
    return out


def load_config(path: str | None = None, environ=None, **overrides) -> RunConfig:
    """Defaults < file < environment < explicit overrides (None values are ignored)."""
    values: dict = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                values.update(parse_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values.update(env_overrides(environ))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)
