"""Channel configuration: operating point, delays, driver and noise models.

The defaults reproduce the 1.65 Gbps operating point of the modeled
transmitter channel (3.3 V receiver pull-up, 50 ohm remote termination,
10-bit parallel words).  Configurations round-trip losslessly through a
flat ``key = value`` text file.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError

EDGE_MODELS = ("EXPONENTIAL", "RAISED_COSINE")


@dataclass
class DriverParams:
    """Electrical parameters of the current-mode open-drain output stage."""

    avcc_v: float = 3.3               # receiver pull-up supply
    r_term_ohm: float = 50.0          # termination resistance per line
    i_sink_a: float = 9.942e-3        # extra sink current while driving LOW
    i_standby_a: float = 20e-6        # leakage/bias sink in standby
    i_bias_a: float = 534.3e-9        # cascade bias current
    v_bias_v: float = 2.8             # cascade bias voltage
    t_rf_ps: float = 104.0            # 20%-80% transition time
    edge_model: str = "EXPONENTIAL"

    @property
    def v_standby(self) -> float:
        return self.avcc_v - self.i_standby_a * self.r_term_ohm

    @property
    def v_sink(self) -> float:
        # standby/leakage path stays on while the main sink is active
        return self.avcc_v - (self.i_standby_a + self.i_sink_a) * self.r_term_ohm

    def validate(self) -> None:
        if self.edge_model not in EDGE_MODELS:
            raise ConfigError(f"unknown edge model {self.edge_model!r}")
        if self.r_term_ohm <= 0 or self.avcc_v <= 0:
            raise ConfigError("avcc_v and r_term_ohm must be positive")
        if self.t_rf_ps < 0:
            raise ConfigError("t_rf_ps must be >= 0")
        if self.i_standby_a * self.r_term_ohm > 10e-3:
            raise ConfigError("standby drop exceeds the 10 mV budget")


@dataclass
class SpikeModel:
    """Supply-current disturbance model: triangular spike per line transition."""

    q_c: float = 50e-15       # charge per pre-driver transition
    w_ps: float = 60.0        # triangular spike base width
    i_dc_a: float = 1.005e-3  # quiescent core current

    def validate(self) -> None:
        if self.q_c < 0 or self.w_ps <= 0 or self.i_dc_a < 0:
            raise ConfigError("spike model parameters out of range")


# default keep-out hexagon, (UI offset from eye center, differential volts);
# a documented stand-in, not a normative mask
DEFAULT_MASK = (
    (-0.25, 0.0),
    (-0.15, 0.2),
    (0.15, 0.2),
    (0.25, 0.0),
    (0.15, -0.2),
    (-0.15, -0.2),
)


@dataclass
class ChannelConfig:
    serial_rate_hz: int = 1_650_000_000
    word_width: int = 10              # 8, 10 or 16 supported
    dt_ps: float = 10.0               # analog sample interval
    ff_delay_ps: int = 30             # flip-flop clock-to-output delay
    buffer_delay_ps: int = 15         # single buffer / gate stage delay
    skew_ps: int = 20                 # Nclk delay relative to inverted Dclk
    loop_limit: int = 1000            # same-timestamp event bound
    eye_bins_t: int = 128
    eye_bins_v: int = 128
    horizon_words: int = 100
    seed: int = 1
    driver: DriverParams = field(default_factory=DriverParams)
    spike: SpikeModel = field(default_factory=SpikeModel)
    mask_vertices: tuple[tuple[float, float], ...] = DEFAULT_MASK

    @property
    def bit_period(self) -> Fraction:
        """Exact serial bit period in picoseconds (rational, drift-free)."""
        return Fraction(10**12, self.serial_rate_hz)

    @property
    def bit_period_ps(self) -> int:
        return round(10**12 / self.serial_rate_hz)

    @property
    def ui_ps(self) -> float:
        return float(self.bit_period)

    @property
    def pixel_period(self) -> Fraction:
        return self.bit_period * self.word_width

    @property
    def fo4_delay_ps(self) -> int:
        # FO4 buffer modeled as four cascaded buffer stages
        return 4 * self.buffer_delay_ps

    def validate(self) -> None:
        if self.serial_rate_hz <= 0:
            raise ConfigError("serial_rate_hz must be positive")
        if self.word_width not in (8, 10, 16):
            raise ConfigError("word_width must be one of 8, 10, 16")
        if self.ff_delay_ps <= 0 or self.buffer_delay_ps <= 0:
            raise ConfigError("gate delays must be positive")
        if self.skew_ps < 0 or self.skew_ps >= self.bit_period / 2:
            raise ConfigError("skew_ps must satisfy 0 <= skew < half serial period")
        if self.dt_ps <= 0:
            raise ConfigError("dt_ps must be positive")
        if self.loop_limit <= 0:
            raise ConfigError("loop_limit must be positive")
        if self.eye_bins_t < 64 or self.eye_bins_v < 64:
            raise ConfigError("eye histogram needs at least 64x64 bins")
        self.driver.validate()
        self.spike.validate()


def _flatten(cfg: ChannelConfig) -> dict[str, object]:
    out: dict[str, object] = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "driver":
            for g in fields(DriverParams):
                out[f"driver.{g.name}"] = getattr(v, g.name)
        elif f.name == "spike":
            for g in fields(SpikeModel):
                out[f"spike.{g.name}"] = getattr(v, g.name)
        elif f.name == "mask_vertices":
            out[f.name] = ";".join(f"{x!r}:{y!r}" for x, y in v)
        else:
            out[f.name] = v
    return out


def config_to_text(cfg: ChannelConfig) -> str:
    lines = [f"{k} = {v!r}" if isinstance(v, (int, float)) else f"{k} = {v}"
             for k, v in _flatten(cfg).items()]
    return "\n".join(lines) + "\n"


def save_config(cfg: ChannelConfig, path: str | Path) -> None:
    Path(path).write_text(config_to_text(cfg))


def _parse_scalar(text: str, kind: type) -> object:
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad numeric value {text!r}") from exc
    return text


def parse_config(text: str) -> ChannelConfig:
    cfg = ChannelConfig()
    driver = DriverParams()
    spike = SpikeModel()
    field_types = {f.name: f.type for f in fields(ChannelConfig)}
    drv_types = {f.name: f.type for f in fields(DriverParams)}
    spk_types = {f.name: f.type for f in fields(SpikeModel)}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "mask_vertices":
            try:
                verts = tuple(
                    tuple(float(c) for c in pair.split(":"))
                    for pair in val.split(";") if pair
                )
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad mask vertex list") from exc
            cfg = replace(cfg, mask_vertices=verts)
        elif key.startswith("driver."):
            name = key[len("driver."):]
            if name not in drv_types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            kind = float if "float" in str(drv_types[name]) else str
            driver = replace(driver, **{name: _parse_scalar(val, kind)})
        elif key.startswith("spike."):
            name = key[len("spike."):]
            if name not in spk_types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            spike = replace(spike, **{name: float(val)})
        elif key in field_types:
            tname = str(field_types[key])
            kind = int if "int" in tname else float
            cfg = replace(cfg, **{key: _parse_scalar(val, kind)})
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    cfg = replace(cfg, driver=driver, spike=spike)
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> ChannelConfig:
    return parse_config(Path(path).read_text())
