"""Scenario configuration: dataclass, INI-style file format, validation, hashing."""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field, fields, replace


class ConfigError(ValueError):
    """A scenario parameter violates an invariant."""


# section layout of the config file; every dataclass field appears exactly once
_SECTIONS = {
    "waveform": ["tau", "beta", "nu"],
    "pilot": ["P", "Q", "sia"],
    "channel": ["L"],
    "receiver": ["modulation", "ce_criterion", "eq_criterion", "csi", "n_ista"],
    "sim": ["N", "sigma_s2", "ebn0_grid_db", "tau_grid", "seed",
            "min_trials", "max_trials", "target_bit_errors", "se_convention"],
}

_BOOLS = {"on": True, "off": False, "true": True, "false": False,
          "1": True, "0": False, "yes": True, "no": False}


@dataclass(frozen=True)
class FtnConfig:
    """All scenario parameters, defaulting to the reference FTN setup."""

    tau: float = 0.8
    beta: float = 0.5
    nu: int = 10
    P: int = 8
    Q: int = 16
    sia: bool = True
    L: int = 8
    modulation: str = "qpsk"
    ce_criterion: str = "mmse"
    eq_criterion: str = "mmse"
    csi: str = "estimated"
    n_ista: int = 3
    N: int = 128
    sigma_s2: float = 1.0
    ebn0_grid_db: tuple = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)
    tau_grid: tuple = ()
    seed: int = 12345
    min_trials: int = 100
    max_trials: int = 200_000
    target_bit_errors: int = 200
    se_convention: str = "info_dims"

    def taus(self):
        return self.tau_grid if self.tau_grid else (self.tau,)

    def validate(self):
        errs = []
        if not 0.0 < self.tau <= 1.0:
            errs.append(f"tau={self.tau} outside (0, 1]")
        for t in self.taus():
            if not 0.0 < t <= 1.0:
                errs.append(f"tau_grid entry {t} outside (0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            errs.append(f"beta={self.beta} outside [0, 1]")
        if self.N != self.P * self.Q:
            errs.append(f"N={self.N} != P*Q={self.P * self.Q}")
        if self.P < self.L:
            errs.append(f"P={self.P} < L={self.L}")
        if self.L > self.nu:
            errs.append(f"L={self.L} > nu={self.nu}")
        if 2 * self.nu + 1 > self.N:
            errs.append(f"2*nu+1={2 * self.nu + 1} > N={self.N}")
        if self.sia and self.Q < 2:
            errs.append("alignment requires Q >= 2")
        if self.modulation != "qpsk":
            errs.append(f"unsupported modulation {self.modulation!r}")
        if self.ce_criterion not in ("ls", "mmse"):
            errs.append(f"ce_criterion={self.ce_criterion!r} not in (ls, mmse)")
        if self.eq_criterion not in ("ls", "mmse"):
            errs.append(f"eq_criterion={self.eq_criterion!r} not in (ls, mmse)")
        if self.csi not in ("estimated", "perfect"):
            errs.append(f"csi={self.csi!r} not in (estimated, perfect)")
        if self.se_convention not in ("info_dims", "paper_all_n"):
            errs.append(f"se_convention={self.se_convention!r} unknown")
        if self.sigma_s2 < 0:
            errs.append(f"sigma_s2={self.sigma_s2} negative")
        if self.n_ista < 0:
            errs.append("n_ista must be >= 0")
        if self.min_trials < 1 or self.max_trials < self.min_trials:
            errs.append("need 1 <= min_trials <= max_trials")
        if self.target_bit_errors < 1:
            errs.append("target_bit_errors must be >= 1")
        if errs:
            raise ConfigError("; ".join(errs))
        return self


def _parse_value(name, raw, kind):
    raw = raw.strip()
    if kind is bool:
        try:
            return _BOOLS[raw.lower()]
        except KeyError:
            raise ConfigError(f"{name}: expected on/off, got {raw!r}") from None
    if kind is tuple:
        if not raw:
            return ()
        return tuple(float(v) for v in raw.replace(",", " ").split())
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {kind.__name__}") from None


def _field_types():
    defaults = FtnConfig()
    return {f.name: type(getattr(defaults, f.name)) for f in fields(FtnConfig)}


def load_config(path, overrides=()) -> FtnConfig:
    """Read a key = value config file and apply ``key=value`` override strings."""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keep keys like P and Q case sensitive
    with open(path) as fh:
        parser.read_file(fh)
    types = _field_types()
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key not in types:
                raise ConfigError(f"unknown config key {key!r} in [{section}]")
            values[key] = _parse_value(key, raw, types[key])
    cfg = FtnConfig(**values)
    return apply_overrides(cfg, overrides)


def apply_overrides(cfg: FtnConfig, overrides) -> FtnConfig:
    types = _field_types()
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"override {ov!r} is not of the form key=value")
        key, raw = ov.split("=", 1)
        key = key.strip()
        if key not in types:
            raise ConfigError(f"unknown override key {key!r}")
        cfg = replace(cfg, **{key: _parse_value(key, raw, types[key])})
    return cfg


def dump_config(cfg: FtnConfig) -> str:
    """Canonical fully-resolved text form (also the hashing input)."""
    out = io.StringIO()
    for section, keys in _SECTIONS.items():
        out.write(f"[{section}]\n")
        for key in keys:
            val = getattr(cfg, key)
            if isinstance(val, bool):
                val = "on" if val else "off"
            elif isinstance(val, tuple):
                val = ", ".join(f"{v:g}" for v in val)
            out.write(f"{key} = {val}\n")
        out.write("\n")
    return out.getvalue()


def scenario_hash(cfg: FtnConfig) -> str:
    return hashlib.sha256(dump_config(cfg).encode()).hexdigest()[:12]


def as_dict(cfg: FtnConfig) -> dict:
    return {f.name: (list(v) if isinstance(v := getattr(cfg, f.name), tuple) else v)
            for f in fields(FtnConfig)}
