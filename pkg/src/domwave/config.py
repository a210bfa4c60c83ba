"""Pipeline configuration: flat ``key=value`` files with a canonical key order.

The canonical one-line serialization (``key=value`` pairs joined by single
spaces, keys in :data:`KEYS` order) is what gets hashed into the config
fingerprint, so two configs compare equal iff their canonical lines do.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .wavelet import BOUNDARIES, FAMILIES, WaveletSpec, make_wavelet


@dataclass(frozen=True)
class PcaPolicy:
    """Either keep a fixed number of components or enough to explain a variance fraction."""

    kind: str = "variance"  # "variance" | "fixed"
    value: float = 0.95

    def __post_init__(self):
        if self.kind == "variance":
            if not 0.0 < self.value <= 1.0:
                raise ConfigError(f"variance fraction must be in (0, 1], got {self.value}")
        elif self.kind == "fixed":
            if self.value != int(self.value) or self.value < 1:
                raise ConfigError(f"fixed dimension must be a positive integer, got {self.value}")
            object.__setattr__(self, "value", int(self.value))
        else:
            raise ConfigError(f"unknown PCA policy {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "PcaPolicy":
        kind, sep, value = text.partition(":")
        if not sep:
            raise ConfigError(f"PCA policy must look like 'variance:0.95' or 'fixed:40', got {text!r}")
        try:
            num = float(value)
        except ValueError:
            raise ConfigError(f"bad PCA policy value {value!r}") from None
        return cls(kind.strip(), num)

    def __str__(self):
        return f"{self.kind}:{_fmt(self.value)}"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(int(v)) + ".0" if v.is_integer() else repr(v)
    return str(v)


# (config key, attribute name, parser)
_SCHEMA = (
    ("bands.n", "n_bands", int),
    ("bands.height", "band_height", int),
    ("bands.num_bins", "num_bins", int),
    ("modules.width", "module_width", int),
    ("features.theta", "theta_percent", float),
    ("dwt.family", "wavelet_family", str),
    ("dwt.boundary", "boundary", str),
    ("illum.target_mean", "target_mean", float),
    ("illum.target_std", "target_std", float),
    ("pca.policy", "pca", PcaPolicy.parse),
)
KEYS = tuple(k for k, _, _ in _SCHEMA)


@dataclass(frozen=True)
class PipelineConfig:
    n_bands: int = 2
    band_height: int = 16
    num_bins: int = 256
    module_width: int = 16
    theta_percent: float = 20.0
    wavelet_family: str = "haar"
    boundary: str = "periodic"
    target_mean: float = 128.0
    target_std: float = 64.0
    pca: PcaPolicy = PcaPolicy()

    def __post_init__(self):
        for name in ("n_bands", "band_height", "module_width"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.num_bins < 2:
            raise ConfigError(f"num_bins must be >= 2, got {self.num_bins}")
        if not 0.0 < self.theta_percent <= 100.0:
            raise ConfigError(f"theta must be in (0, 100], got {self.theta_percent}")
        if self.wavelet_family not in FAMILIES:
            raise ConfigError(f"dwt.family must be one of {FAMILIES}, got {self.wavelet_family!r}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"dwt.boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.target_std < 0:
            raise ConfigError(f"illum.target_std must be >= 0, got {self.target_std}")
        # normalize numeric types so equal configs serialize identically
        object.__setattr__(self, "theta_percent", float(self.theta_percent))
        object.__setattr__(self, "target_mean", float(self.target_mean))
        object.__setattr__(self, "target_std", float(self.target_std))

    @property
    def wavelet(self) -> WaveletSpec:
        return make_wavelet(self.wavelet_family, self.boundary)

    def items(self):
        return [(key, getattr(self, attr)) for key, attr, _ in _SCHEMA]

    def canonical(self) -> str:
        return " ".join(f"{k}={_fmt(v)}" for k, v in self.items())

    def fingerprint(self) -> str:
        return hashlib.sha256(self.canonical().encode("ascii")).hexdigest()[:16]

    def to_text(self) -> str:
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.items())

    def with_(self, **changes) -> "PipelineConfig":
        return replace(self, **changes)

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "PipelineConfig":
        by_key = {k: (attr, parse) for k, attr, parse in _SCHEMA}
        kwargs = {}
        for key, raw in mapping.items():
            if key not in by_key:
                raise ConfigError(f"unknown config key {key!r}")
            attr, parse = by_key[key]
            try:
                kwargs[attr] = parse(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from None
        return cls(**kwargs)

    @classmethod
    def parse(cls, text: str) -> "PipelineConfig":
        """Parse newline- or space-separated ``key=value`` pairs; ``#`` starts a comment."""
        mapping = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            for pair in line.split():
                key, sep, value = pair.partition("=")
                if not sep:
                    raise ConfigError(f"expected key=value, got {pair!r}")
                if key in mapping:
                    raise ConfigError(f"duplicate config key {key!r}")
                mapping[key] = value
        return cls.from_mapping(mapping)


PROFILES = ("orl", "yale")


def load_profile(name: str) -> PipelineConfig:
    if name not in PROFILES:
        raise ConfigError(f"unknown profile {name!r}; expected one of {PROFILES}")
    text = resources.files("domwave.profiles").joinpath(f"{name}.cfg").read_text()
    return PipelineConfig.parse(text)


def load_config(source) -> PipelineConfig:
    """Load a config file, or a bundled profile by name (``orl``, ``yale``)."""
    if isinstance(source, PipelineConfig):
        return source
    if str(source) in PROFILES and not Path(source).exists():
        return load_profile(str(source))
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror or exc})") from None
    return PipelineConfig.parse(text)


assert tuple(f.name for f in fields(PipelineConfig)) == tuple(a for _, a, _ in _SCHEMA)
