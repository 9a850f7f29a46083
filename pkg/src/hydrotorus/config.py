"""Run configuration: TOML documents describing metrics and integrals."""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .integral import CONFORMAL, SEMIGEODESIC, IntegralCoeffs
from .metric import (
    ConformalMetric,
    LiouvilleSpec,
    Metric,
    SemiGeodesicMetric,
    expr_field,
    field_from_samples,
    liouville_conformal_factor,
    metric_positivity_scan,
)


class ConfigError(ValueError):
    pass


@dataclass
class MetricConfig:
    """``kind`` is one of semigeodesic, conformal, liouville, samples."""

    kind: str
    periods: tuple[float, float] = (1.0, 1.0)
    g: str | None = None
    lam: str | None = None
    f1: str | None = None
    f2: str | None = None
    directions: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 1.0)
    samples: str | None = None
    model: str = CONFORMAL
    base_dir: Path = field(default=Path("."), repr=False)

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path = Path(".")) -> "MetricConfig":
        kind = d.get("kind")
        if kind not in ("semigeodesic", "conformal", "liouville", "samples"):
            raise ConfigError(f"metric kind must be semigeodesic, conformal, liouville or samples; got {kind!r}")
        periods = tuple(float(p) for p in d.get("periods", (1.0, 1.0)))
        if len(periods) != 2 or min(periods) <= 0:
            raise ConfigError("periods must be two positive numbers")
        cfg = cls(kind, periods, base_dir=base_dir)
        if kind == "semigeodesic":
            cfg.g = _required(d, "g")
        elif kind == "conformal":
            cfg.lam = _required(d, "lambda")
        elif kind == "liouville":
            cfg.f1, cfg.f2 = str(_required(d, "f1")), str(_required(d, "f2"))
            dirs = d.get("directions", (1, 0, 0, 1))
            if len(dirs) != 4:
                raise ConfigError("directions must be [m1, n1, m2, n2]")
            cfg.directions = tuple(float(v) for v in dirs)
        else:
            cfg.samples = str(_required(d, "file"))
            cfg.model = d.get("model", CONFORMAL)
            if cfg.model not in (CONFORMAL, SEMIGEODESIC):
                raise ConfigError(f"unknown model {cfg.model!r}")
        return cfg

    @property
    def model_name(self) -> str:
        if self.kind == "samples":
            return self.model
        return SEMIGEODESIC if self.kind == "semigeodesic" else CONFORMAL

    def liouville(self) -> LiouvilleSpec:
        if self.kind != "liouville":
            raise ConfigError("not a Liouville metric")
        return LiouvilleSpec.from_strings(self.f1, self.f2, self.directions)

    def build(self) -> Metric:
        if self.kind == "semigeodesic":
            m = SemiGeodesicMetric(expr_field(str(self.g), self.periods))
        elif self.kind == "conformal":
            m = ConformalMetric(expr_field(str(self.lam), self.periods))
        elif self.kind == "liouville":
            return liouville_conformal_factor(self.liouville(), self.periods)
        else:
            path = self.base_dir / self.samples
            if not path.exists():
                raise ConfigError(f"sample file not found: {path}")
            values = np.load(path) if path.suffix == ".npy" else np.loadtxt(path, delimiter=",")
            f = field_from_samples(values, self.periods)
            m = ConformalMetric(f) if self.model == CONFORMAL else SemiGeodesicMetric(f)
        rep = metric_positivity_scan(m)
        if not rep.passed:
            raise ConfigError(f"metric is not positive: min {rep.minimum:g} at {tuple(rep.location)}")
        return m


@dataclass
class IntegralConfig:
    """``coefficients`` lists a_0..a_n (lowest power of p2 first) as expressions."""

    coefficients: tuple[str, ...]
    model: str = SEMIGEODESIC
    normalized: bool = False

    @classmethod
    def from_dict(cls, d: dict) -> "IntegralConfig":
        coeffs = d.get("coefficients")
        if not isinstance(coeffs, list) or len(coeffs) < 2:
            raise ConfigError("integral needs a list 'coefficients' with at least two entries")
        model = d.get("model", SEMIGEODESIC)
        if model not in (SEMIGEODESIC, CONFORMAL):
            raise ConfigError(f"unknown model {model!r}")
        return cls(tuple(str(c) for c in coeffs), model, bool(d.get("normalized", False)))

    def build(self, periods) -> IntegralCoeffs:
        return IntegralCoeffs.from_strings(self.coefficients, self.model, periods, self.normalized)


def read_toml(path) -> tuple[dict, bytes]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        return tomllib.loads(raw.decode()), raw
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc


def _required(d: dict, key: str):
    if key not in d:
        raise ConfigError(f"missing key {key!r}")
    return d[key]


def load_metric(path) -> tuple[MetricConfig, bytes]:
    d, raw = read_toml(path)
    section = d.get("metric", d)
    return MetricConfig.from_dict(section, Path(path).parent), raw


def load_integral(path) -> tuple[IntegralConfig, bytes]:
    d, raw = read_toml(path)
    section = d.get("integral", d)
    return IntegralConfig.from_dict(section), raw


def run_header(parts, seed: int | None = None) -> dict:
    """Comment-header record: tool version, hash of the inputs, seed."""
    h = hashlib.sha256()
    for p in parts:
        h.update(p if isinstance(p, bytes) else str(p).encode())
        h.update(b"\0")
    return {"tool": "hydrotorus", "version": __version__, "config_sha256": h.hexdigest(), "seed": seed}


def header_line(header: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in header.items())
