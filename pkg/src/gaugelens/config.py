"""Run configuration: flat ``key = value`` files overridden by CLI flags."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError

__all__ = ["RunConfig", "read_config_file", "parse_kappa_list"]

DEFAULT_KAPPAS = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0)


def parse_kappa_list(text) -> tuple[float, ...]:
    try:
        values = tuple(float(t) for t in str(text).replace(" ", "").split(",") if t)
    except ValueError:
        raise ConfigError(f"kappa list {text!r} is not a comma-separated list of numbers") from None
    if not values:
        raise ConfigError("kappa list is empty")
    return values


@dataclass(frozen=True)
class RunConfig:
    dataset: str = "blobs"
    d_in: int = 16
    classes: int = 4
    n: int = 1000
    spread: float = 5.0
    test_fraction: float = 0.2
    d_h: int = 64
    epochs: int = 50
    lr: float = 0.1
    model: str = ""
    seed: int = 0
    seeds: int = 5
    kind: str = "general"
    # empty means the command's own default grid
    kappa: tuple = field(default=())
    k: int = 10
    energy: float = 0.99
    fd_step: float = 1e-5
    probes: int = 5
    workers: int = 1
    out: str = "out"

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    def kappas(self, default=DEFAULT_KAPPAS) -> tuple[float, ...]:
        return tuple(self.kappa) if self.kappa else tuple(default)

    def updated(self, values: dict) -> "RunConfig":
        """Return a copy with string or typed ``values`` coerced and applied."""
        coerced = {}
        types = {f.name: type(f.default) if f.name != "kappa" else tuple for f in fields(self)}
        for key, raw in values.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            if raw is None:
                continue
            typ = types[key]
            try:
                if typ is tuple:
                    coerced[key] = raw if isinstance(raw, tuple) else parse_kappa_list(raw)
                elif typ is int:
                    coerced[key] = int(raw)
                elif typ is float:
                    coerced[key] = float(raw)
                else:
                    coerced[key] = str(raw)
            except ValueError:
                raise ConfigError(f"config key {key!r}: cannot parse {raw!r}") from None
        cfg = replace(self, **coerced)
        cfg.validate()
        return cfg

    def validate(self):
        if not (self.dataset == "blobs" or self.dataset.startswith("csv:")):
            raise ConfigError(f"dataset must be 'blobs' or 'csv:<path>', got {self.dataset!r}")
        for key in ("d_in", "classes", "n", "d_h", "epochs", "seeds", "k", "probes", "workers"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1")
        if self.classes < 2:
            raise ConfigError("classes must be >= 2")
        if not self.lr > 0:
            raise ConfigError("lr must be > 0")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if not 0.0 < self.energy <= 1.0:
            raise ConfigError("energy must lie in (0, 1]")
        if not self.fd_step > 0:
            raise ConfigError("fd_step must be > 0")
        if self.kind not in ("general", "diagonal", "orthogonal"):
            raise ConfigError(f"kind must be general, diagonal or orthogonal, got {self.kind!r}")
        if any(not kp >= 1.0 for kp in self.kappa):
            raise ConfigError("every kappa must be >= 1")


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in RunConfig.keys():
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values
