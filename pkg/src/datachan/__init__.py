"""Behavioral simulator and analysis toolkit for a gigabit serializer channel.

Submodules:

- ``logic`` / ``netlist``: three-valued event-driven simulation of the
  one-hot ring serializer, its reset/enable protocol and wired line muxing
- ``golden`` / ``protocol``: functional reference model and protocol checks
- ``driver``: behavioral output stage and supply-current models
- ``measure`` / ``eye`` / ``spectrum`` / ``report``: measurement kernels
  and compliance evaluation
- ``stimulus`` / ``scenario`` / ``cli``: stimulus generation and runners
"""

__version__ = "0.1.0"

from .config import ChannelConfig, DriverParams, SpikeModel
from .logic import HIGH, LOW, UNKNOWN, Level, NetEvent, SignalTraces
from .netlist import ChannelNetlist, advance, build_channel, eval_reset, mux_lines

__all__ = [
    "ChannelConfig", "DriverParams", "SpikeModel",
    "HIGH", "LOW", "UNKNOWN", "Level", "NetEvent", "SignalTraces",
    "ChannelNetlist", "advance", "build_channel", "eval_reset", "mux_lines",
    "__version__",
]
