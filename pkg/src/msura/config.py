"""System configuration shared by transmitter, receiver, analysis and harness.

Configurations are flat ``key = value`` text files. Unknown keys and values
that do not parse are rejected; every derived quantity (slot length, block
length, powers) is a property so a config is fully described by its fields.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

VARIANTS = ("MS-MRA", "MS-MRA-WOPBE", "MSUG-MRA", "MS-SRA", "MSUG-SRA")


@dataclass(frozen=True)
class SystemConfig:
    """Parameters of one scheme at one operating point.

    Powers are derived from ``ebn0_db`` with the noise variance fixed by
    ``noise_var``; ``phi`` is the pilot-to-coded power ratio.
    """

    variant: str = "MS-MRA"
    B: int = 100
    r: int = 11
    r1: int = 6
    r2: int = 5
    J: int = 2
    pilot_bits: int = 5
    n_c: int = 128
    S: int = 2
    M: int = 16
    V: int = 1
    K_a: int = 12
    gamma: float = 0.1
    phi: float = 1.0
    ebn0_db: float = 0.0
    G: int = 1
    list_size: int = 64
    identity_interleaver: bool = False
    noise_var: float = 1.0
    iisd_max_iter: int = 8
    seed: int = 0
    trials: int = 200

    def __post_init__(self):
        self.validate()

    # -- derived sizes -------------------------------------------------
    @property
    def n_p(self) -> int:
        return 1 << self.pilot_bits

    @property
    def L(self) -> int:
        return self.J * self.n_p + self.n_c

    @property
    def B_c(self) -> int:
        return self.B - self.J * self.pilot_bits

    @property
    def block_length(self) -> int:
        return 2 * self.n_c

    @property
    def uses_grouping(self) -> bool:
        return self.variant.startswith("MSUG")

    @property
    def single_antenna_repetition(self) -> bool:
        return self.variant.endswith("SRA")

    @property
    def wopbe(self) -> bool:
        return self.variant == "MS-MRA-WOPBE"

    @property
    def info_length(self) -> int:
        if self.wopbe:
            return self.B_c + self.r1 + self.r2
        return self.B + self.r

    @property
    def receive_dims(self) -> int:
        """Antennas seen by the decoder (sub-frames count as antennas)."""
        return self.M * self.V

    @property
    def frame_length(self) -> int:
        return self.S * self.L * self.V

    @property
    def users_per_group_slot(self) -> float:
        return self.K_a / (self.S * self.G)

    # -- powers --------------------------------------------------------
    @property
    def avg_power(self) -> float:
        """Average per-sample transmit power giving ``ebn0_db``."""
        return 10 ** (self.ebn0_db / 10) * self.noise_var * self.B / (self.V * self.L)

    @property
    def coded_power(self) -> float:
        return self.L * self.avg_power / (self.J * self.n_p * self.phi + self.n_c)

    @property
    def pilot_power(self) -> float:
        return self.phi * self.coded_power

    # -- validation and I/O ---------------------------------------------
    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        for name in ("B", "J", "pilot_bits", "n_c", "S", "M", "V", "G", "list_size", "trials"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not 1 <= self.pilot_bits <= 16:
            raise ConfigError("pilot_bits must lie in [1, 16]")
        if self.K_a < 0:
            raise ConfigError("K_a must be non-negative")
        if self.B_c <= 0:
            raise ConfigError(f"B={self.B} leaves no coded bits after {self.J} pilot parts of {self.pilot_bits} bits")
        if self.block_length & (self.block_length - 1):
            raise ConfigError(f"2*n_c = {self.block_length} must be a power of two")
        if self.wopbe:
            if self.r1 < 1 or self.r2 < 1:
                raise ConfigError("both CRC degrees must be positive")
        elif self.r < 1:
            raise ConfigError("CRC degree r must be positive")
        if self.info_length > self.block_length:
            raise ConfigError(f"info length {self.info_length} exceeds block length {self.block_length}")
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must lie in (0, 1)")
        if not self.phi > 0 or not self.noise_var > 0:
            raise ConfigError("phi and noise_var must be positive")
        if not math.isfinite(self.ebn0_db):
            raise ConfigError("ebn0_db must be finite")
        if self.G > 1 and not self.uses_grouping:
            raise ConfigError(f"G={self.G} requires a grouping variant")
        if self.V > 1 and not self.single_antenna_repetition:
            raise ConfigError(f"V={self.V} requires a repetition variant")
        if self.iisd_max_iter < 1:
            raise ConfigError("iisd_max_iter must be positive")

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {_format(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, **overrides) -> "SystemConfig":
        values = parse_key_values(text)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict) -> "SystemConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ConfigError(f"unknown configuration key {key!r}")
            kwargs[key] = _coerce(key, raw, known[key].type)
        return cls(**kwargs)

    @classmethod
    def load(cls, path, **overrides) -> "SystemConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, **overrides)


def parse_key_values(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(key, raw, type_name):
    if not isinstance(raw, str):
        return raw
    try:
        if type_name in ("int", int):
            return int(raw)
        if type_name in ("float", float):
            return float(raw)
        if type_name in ("bool", bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {type_name}") from None
    return raw
