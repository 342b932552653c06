"""Pipeline configuration: key=value text with typed defaults.

Defaults follow the clinical-analysis parameter set (4 Hz resampling,
45 s lag, order-11 wavelets, 2000 frequency bins, ridge penalty 0.5).
Unknown keys and constraint violations are rejected; a parsed config
round-trips through its canonical text form.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

__all__ = ["PipelineConfig", "parse_config", "ConfigError"]


class ConfigError(ValueError):
    pass


_BOOL = {"on": True, "true": True, "1": True, "off": False, "false": False, "0": False}


@dataclass
class PipelineConfig:
    eta: float = 4.0  # EDR resampling rate (Hz)
    dt: float = 0.25  # SST sample period (s)
    lag: float = 45.0  # SST allowed lag (s)
    m: int = 11  # wavelet spline order
    n: int = 11  # vanishing moments
    n_xi: int = 2000  # frequency bins
    lam: float = 0.5  # ridge penalty (key: lambda)
    gamma: float | None = None  # squeeze threshold; None = auto
    band_halfwidth: float = 0.02  # rhythmic band half width (Hz)
    freq_floor: float = 0.1  # nonrhythmic power lower frequency (Hz)
    harmonics: int = 1  # rhythmic bands at ridge multiples
    polarity: str = "R"  # ECG peak polarity
    pvc: bool = True  # premature-beat exclusion
    pvc_ratio: float = 0.7  # prematurity threshold on RR
    blend_order: int = 4  # spline order for interpolation pipelines
    seed: int = 0  # simulation seed

    def validate(self):
        if self.eta <= 0 or self.dt <= 0 or self.lag <= 0:
            raise ConfigError("eta, dt and lag must be positive")
        if self.lag <= (self.m + self.n) * self.dt / 2:
            raise ConfigError(
                f"lag={self.lag} violates lag > (m+n)*dt/2 = {(self.m + self.n) * self.dt / 2}"
            )
        if self.m < 2 or self.n < 1:
            raise ConfigError("need m >= 2 and n >= 1")
        if self.n_xi < 1:
            raise ConfigError("n_xi must be positive")
        if self.lam < 0:
            raise ConfigError("lambda must be nonnegative")
        if self.gamma is not None and self.gamma < 0:
            raise ConfigError("gamma must be nonnegative")
        if self.polarity not in ("R", "S"):
            raise ConfigError("polarity must be R or S")
        if self.blend_order < 3:
            raise ConfigError("blend_order must be >= 3")
        if self.harmonics < 1:
            raise ConfigError("harmonics must be >= 1")
        return self

    def to_text(self):
        lines = []
        for key, attr in _KEY_TO_ATTR.items():
            val = getattr(self, attr)
            if attr == "gamma" and val is None:
                val = "auto"
            elif isinstance(val, bool):
                val = "on" if val else "off"
            lines.append(f"{key}={val}")
        return "\n".join(lines) + "\n"


_KEY_TO_ATTR = {
    "eta": "eta",
    "dt": "dt",
    "lag": "lag",
    "m": "m",
    "n": "n",
    "n_xi": "n_xi",
    "lambda": "lam",
    "gamma": "gamma",
    "band_halfwidth": "band_halfwidth",
    "freq_floor": "freq_floor",
    "harmonics": "harmonics",
    "polarity": "polarity",
    "pvc": "pvc",
    "pvc_ratio": "pvc_ratio",
    "blend_order": "blend_order",
    "seed": "seed",
}

_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _convert(key, attr, raw):
    raw = raw.strip()
    ftype = _FIELD_TYPES[attr]
    try:
        if attr == "gamma":
            return None if raw.lower() in ("auto", "none") else float(raw)
        if ftype == "bool":
            if raw.lower() not in _BOOL:
                raise ValueError
            return _BOOL[raw.lower()]
        if ftype == "int":
            return int(raw)
        if ftype == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse_config(text, base=None):
    """Parse key=value lines (# comments allowed) onto defaults."""
    cfg = PipelineConfig() if base is None else base
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _KEY_TO_ATTR:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr = _KEY_TO_ATTR[key]
        setattr(cfg, attr, _convert(key, attr, raw))
    return cfg.validate()
