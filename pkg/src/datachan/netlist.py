"""Event-driven model of the serializer channel's digital netlist.

The netlist is a token-passing ring: a splitter derives the two working
clocks from the single serial clock, eleven falling-edge flip-flops
circulate the Start token as the one-hot selects Sel1..Sel10 (plus the
parallel iSel1), a reset block arms the token from the Disable/Enable
pair or recirculates it from the buffered last select, and ten selector
blocks wire-multiplex the parallel data bits onto the four active-low
pre-driver lines Even/Odd/nEven/nOdd.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .config import ChannelConfig
from .errors import ConfigError, ContentionError, OscillationError
from .logic import HIGH, LOW, UNKNOWN, Level, NetEvent, SignalTraces, k_and, k_not, k_or


# --------------------------------------------------------------------------
# reset block decision logic

@dataclass
class ResetState:
    """Sample-and-hold state of the reset block.

    ``armed`` is refreshed at every falling working-clock edge from the
    Disable/Enable pair captured at the preceding rising edge.
    """

    sampled_disable: Level = UNKNOWN
    sampled_enable: Level = UNKNOWN
    armed: Level = UNKNOWN

    def start_level(self, disable: Level, enable: Level, buffered_last: Level) -> Level:
        """Combinational Start value for the current input levels.

        Disable high forces low.  The token recirculates whenever both
        control inputs are low and the buffered last select is high; this
        path is level-sensitive so the recurring Start pulse overlaps the
        last select instead of trailing it by a full clock.
        """
        armed_term = k_and(k_not(disable), self.armed)
        recirc_term = k_and(k_not(disable), k_not(enable), buffered_last)
        return k_or(armed_term, recirc_term)


def eval_reset(state: ResetState, edge: str, disable: Level, enable: Level,
               buffered_last: Level) -> Level:
    """Step the reset block over one working-clock edge and return Start.

    ``edge`` is ``"rise"`` or ``"fall"``.  A rising edge samples the
    Disable/Enable pair and leaves Start unchanged; a falling edge commits
    the sampled pair into the armed flag and re-evaluates Start.
    """
    if edge == "rise":
        state.sampled_disable = disable
        state.sampled_enable = enable
    elif edge == "fall":
        state.armed = k_and(k_not(state.sampled_disable), state.sampled_enable)
    else:
        raise ValueError(f"edge must be 'rise' or 'fall', got {edge!r}")
    return state.start_level(disable, enable, buffered_last)


# --------------------------------------------------------------------------
# netlist components

class Buffer:
    def __init__(self, src: str, dst: str, delay_ps: int, invert: bool = False):
        self.src, self.dst = src, dst
        self.delay_ps = delay_ps
        self.invert = invert

    @property
    def inputs(self):
        return (self.src,)

    def reset(self):
        pass

    def poke(self, sim: "Simulator", net: str, old: Level, new: Level, t: int):
        sim.schedule(t + self.delay_ps, self.dst, k_not(new) if self.invert else new)


class DFlipFlop:
    def __init__(self, clk: str, d: str, q: str, delay_ps: int, edge: str = "fall"):
        if delay_ps <= 0:
            raise ConfigError("flip-flop delay must be positive")
        self.clk, self.d, self.q = clk, d, q
        self.delay_ps = delay_ps
        self.edge = edge

    @property
    def inputs(self):
        return (self.clk,)

    def reset(self):
        pass

    def poke(self, sim: "Simulator", net: str, old: Level, new: Level, t: int):
        trigger = (HIGH, LOW) if self.edge == "fall" else (LOW, HIGH)
        if (old, new) == trigger:
            sim.schedule(t + self.delay_ps, self.q, sim.values[self.d])


class ResetBlock:
    def __init__(self, dclk: str, disable: str, enable: str, buffered_last: str,
                 start: str, delay_ps: int):
        self.dclk, self.disable, self.enable = dclk, disable, enable
        self.buffered_last = buffered_last
        self.start = start
        self.delay_ps = delay_ps
        self.state = ResetState()
        self._target: Level | None = None

    @property
    def inputs(self):
        return (self.dclk, self.disable, self.enable, self.buffered_last)

    def reset(self):
        self.state = ResetState()
        self._target = None

    def poke(self, sim: "Simulator", net: str, old: Level, new: Level, t: int):
        dis = sim.values[self.disable]
        en = sim.values[self.enable]
        blast = sim.values[self.buffered_last]
        if net == self.dclk:
            if (old, new) == (LOW, HIGH):
                start = eval_reset(self.state, "rise", dis, en, blast)
            elif (old, new) == (HIGH, LOW):
                start = eval_reset(self.state, "fall", dis, en, blast)
            else:
                start = self.state.start_level(dis, en, blast)
        else:
            start = self.state.start_level(dis, en, blast)
        if start is not self._target:
            self._target = start
            sim.schedule(t + self.delay_ps, self.start, start)


class SharedLine:
    """Active-low wired line with pull-up, driven by up to five selector blocks.

    ``pullers`` is a list of (select_net, source_net, active_bit): the block
    pulls the line low while its select is high and its source bit equals
    ``active_bit`` (1 for the true line, 0 for the complement line).
    """

    def __init__(self, line: str, pullers: list[tuple[str, str, int]], delay_ps: int):
        self.line = line
        self.pullers = pullers
        self.delay_ps = delay_ps
        self._target: Level | None = None

    @property
    def inputs(self):
        nets = []
        for sel, src, _ in self.pullers:
            nets.append(sel)
            nets.append(src)
        return tuple(dict.fromkeys(nets))

    def reset(self):
        self._target = None

    def _pull_terms(self, values: dict[str, Level]) -> list[tuple[str, Level, Level]]:
        out = []
        for sel, src, active in self.pullers:
            bit = values[src] if active else k_not(values[src])
            out.append((sel, values[sel], k_and(values[sel], bit)))
        return out

    def poke(self, sim: "Simulator", net: str, old: Level, new: Level, t: int):
        terms = self._pull_terms(sim.values)
        active = [(sel, pull) for sel, sel_lvl, pull in terms if sel_lvl is HIGH]
        if len(active) >= 2 and len({p for _, p in active}) > 1:
            raise ContentionError(
                f"conflicting drive on {self.line} at {t} ps from "
                + ", ".join(sel for sel, _ in active)
            )
        level = k_not(k_or(*(pull for _, _, pull in terms)))
        if level is not self._target:
            self._target = level
            sim.schedule(t + self.delay_ps, self.line, level)


# --------------------------------------------------------------------------
# netlist container and builder

@dataclass
class ChannelNetlist:
    config: ChannelConfig
    nets: list[str]
    primary_inputs: list[str]
    components: list = field(default_factory=list)

    @property
    def ring_flip_flops(self) -> list[DFlipFlop]:
        return [c for c in self.components
                if isinstance(c, DFlipFlop) and c.clk == "Dclk"]

    @property
    def hold_flip_flops(self) -> list[DFlipFlop]:
        return [c for c in self.components
                if isinstance(c, DFlipFlop) and c.clk != "Dclk"]

    @property
    def selector_count(self) -> int:
        return sum(len(c.pullers) for c in self.components if isinstance(c, SharedLine))

    @property
    def splitter(self) -> list[Buffer]:
        return [c for c in self.components
                if isinstance(c, Buffer) and c.dst in ("Dclk", "Nclk")]

    @property
    def reset_block(self) -> ResetBlock:
        return next(c for c in self.components if isinstance(c, ResetBlock))

    @property
    def sel_nets(self) -> list[str]:
        return [f"Sel{k}" for k in range(1, self.config.word_width + 1)]

    @property
    def line_nets(self) -> list[str]:
        return ["Even", "Odd", "nEven", "nOdd"]


def build_channel(config: ChannelConfig) -> ChannelNetlist:
    """Wire the full channel netlist for the configured word width."""
    config.validate()
    n = config.word_width
    last = f"Sel{n}"
    buffered_last = f"Buffered_Sel{n}"
    hold_src = (f"D{n - 2}", f"D{n - 1}")
    hold_out = (f"HoldD{n - 2}", f"HoldD{n - 1}")

    data_nets = [f"D{i}" for i in range(n)]
    nets = (
        ["Clock", "Disable", "Enable"] + data_nets
        + ["Dclk", "Nclk", "Start", "iSel1"]
        + [f"Sel{k}" for k in range(1, n + 1)]
        + [buffered_last, "Show", "Read", *hold_out,
           "Even", "Odd", "nEven", "nOdd"]
    )

    ffd = config.ff_delay_ps
    bufd = config.buffer_delay_ps
    comps: list = [
        Buffer("Clock", "Dclk", bufd),
        Buffer("Dclk", "Nclk", config.skew_ps, invert=True),
        DFlipFlop("Dclk", "Start", "Sel1", ffd),
        DFlipFlop("Dclk", "Start", "iSel1", ffd),
    ]
    comps += [DFlipFlop("Dclk", f"Sel{k - 1}", f"Sel{k}", ffd) for k in range(2, n + 1)]
    comps += [
        Buffer(last, buffered_last, config.fo4_delay_ps),
        ResetBlock("Dclk", "Disable", "Enable", buffered_last, "Start", bufd),
        # word-hold strobes derived from the third select
        Buffer("Sel3", "Show", 2 * bufd),
        Buffer("Show", "Read", bufd, invert=True),
        DFlipFlop("Show", hold_src[0], hold_out[0], ffd, edge="fall"),
        DFlipFlop("Read", hold_src[1], hold_out[1], ffd, edge="rise"),
    ]

    def source(k: int) -> str:
        # selects k = n-1, n pick up the held copies of the last two bits
        if k == n - 1:
            return hold_out[0]
        if k == n:
            return hold_out[1]
        return f"D{k - 1}"

    odd_sels = [k for k in range(1, n + 1) if k % 2 == 1]
    even_sels = [k for k in range(1, n + 1) if k % 2 == 0]
    comps += [
        SharedLine("Odd", [(f"Sel{k}", source(k), 1) for k in odd_sels], bufd),
        SharedLine("nOdd", [(f"Sel{k}", source(k), 0) for k in odd_sels], bufd),
        SharedLine("Even", [(f"Sel{k}", source(k), 1) for k in even_sels], bufd),
        SharedLine("nEven", [(f"Sel{k}", source(k), 0) for k in even_sels], bufd),
    ]

    return ChannelNetlist(
        config=config,
        nets=nets,
        primary_inputs=["Clock", "Disable", "Enable"] + data_nets,
        components=comps,
    )


# --------------------------------------------------------------------------
# simulation kernel

class Simulator:
    """Single-threaded deterministic event loop over one netlist instance."""

    def __init__(self, netlist: ChannelNetlist):
        self.netlist = netlist
        self.values: dict[str, Level] = {net: UNKNOWN for net in netlist.nets}
        self.traces: dict[str, list[tuple[int, Level]]] = {
            net: [(0, UNKNOWN)] for net in netlist.nets
        }
        self.sensitivity: dict[str, list] = {}
        for comp in netlist.components:
            comp.reset()
            for net in comp.inputs:
                self.sensitivity.setdefault(net, []).append(comp)
        self._heap: list[tuple[int, int, str, Level]] = []
        self._seq = itertools.count()

    def schedule(self, time_ps: int, net: str, level: Level):
        heapq.heappush(self._heap, (time_ps, next(self._seq), net, level))

    def _record(self, net: str, t: int, level: Level):
        hist = self.traces[net]
        if hist and hist[-1][0] == t:
            hist[-1] = (t, level)
            if len(hist) > 1 and hist[-2][1] is level:
                hist.pop()
        else:
            hist.append((t, level))

    def run(self, stimulus: list[NetEvent], until_ps: int) -> SignalTraces:
        last_t = 0
        for ev in stimulus:
            if ev.net not in self.netlist.primary_inputs:
                raise ValueError(f"stimulus on non-primary net {ev.net!r}")
            if ev.time_ps < last_t:
                raise ValueError("stimulus events must be time-ordered")
            last_t = ev.time_ps
            self.schedule(ev.time_ps, ev.net, ev.level)
        if until_ps < last_t:
            raise ValueError("simulation horizon ends before the last stimulus event")

        limit = self.netlist.config.loop_limit
        cur_t, count = -1, 0
        heap = self._heap
        while heap and heap[0][0] <= until_ps:
            t, _, net, level = heapq.heappop(heap)
            if t != cur_t:
                cur_t, count = t, 0
            count += 1
            if count > limit:
                raise OscillationError(
                    f"more than {limit} zero-delay events at {t} ps (net {net})"
                )
            old = self.values[net]
            if level is old:
                continue
            self.values[net] = level
            self._record(net, t, level)
            for comp in self.sensitivity.get(net, ()):
                comp.poke(self, net, old, level, t)
        return SignalTraces(events=self.traces, horizon_ps=until_ps)


def advance(netlist: ChannelNetlist, stimulus: list[NetEvent],
            until_ps: int) -> SignalTraces:
    """Run the netlist over ``stimulus`` and return the recorded traces.

    Fully deterministic: identical inputs yield identical traces.  Each
    call starts from power-on (all nets unknown).
    """
    return Simulator(netlist).run(stimulus, until_ps)


# --------------------------------------------------------------------------
# functional line multiplexing (delay-free recomputation of the wired lines)

def mux_lines(traces: SignalTraces, word_source: dict[str, list[tuple[int, Level]]],
              width: int = 10) -> dict[str, list[tuple[int, Level]]]:
    """Recompute the four shared lines from select traces and data histories.

    ``word_source`` maps D0..D{width-1} to event histories holding the value
    each selector should serialize.  Pure and delay-free; serves as an
    independent reference for the in-netlist wired lines.
    """
    groups = {
        "Odd": [(k, 1) for k in range(1, width + 1) if k % 2 == 1],
        "nOdd": [(k, 0) for k in range(1, width + 1) if k % 2 == 1],
        "Even": [(k, 1) for k in range(1, width + 1) if k % 2 == 0],
        "nEven": [(k, 0) for k in range(1, width + 1) if k % 2 == 0],
    }

    histories: dict[str, list[tuple[int, Level]]] = {}
    for k in range(1, width + 1):
        histories[f"Sel{k}"] = traces.events[f"Sel{k}"]
    for i in range(width):
        histories[f"D{i}"] = word_source.get(f"D{i}", [(0, UNKNOWN)])

    times = sorted({t for hist in histories.values() for t, _ in hist})
    cursors = {name: 0 for name in histories}
    current = {name: UNKNOWN for name in histories}

    out: dict[str, list[tuple[int, Level]]] = {name: [] for name in groups}
    for t in times:
        for name, hist in histories.items():
            i = cursors[name]
            while i < len(hist) and hist[i][0] <= t:
                current[name] = hist[i][1]
                i += 1
            cursors[name] = i
        sel_lvls = {k: current[f"Sel{k}"] for k in range(1, width + 1)}
        bit_lvls = {i: current[f"D{i}"] for i in range(width)}
        for name, members in groups.items():
            pulls = []
            active = []
            for k, active_bit in members:
                bit = bit_lvls[k - 1] if active_bit else k_not(bit_lvls[k - 1])
                pull = k_and(sel_lvls[k], bit)
                pulls.append(pull)
                if sel_lvls[k] is HIGH:
                    active.append((k, pull))
            if len(active) >= 2 and len({p for _, p in active}) > 1:
                raise ContentionError(
                    f"conflicting drive on {name} at {t} ps "
                    f"(selects {[k for k, _ in active]})"
                )
            level = k_not(k_or(*pulls))
            hist = out[name]
            if not hist or hist[-1][1] is not level:
                hist.append((t, level))
    return out
