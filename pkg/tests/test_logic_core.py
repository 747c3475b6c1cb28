"""Event kernel, ring netlist and wired-line multiplexing."""

import pytest
from hypothesis import given, strategies as st

from datachan import ChannelConfig, advance, build_channel
from datachan.errors import ConfigError, ContentionError, OscillationError
from datachan.logic import (HIGH, LOW, UNKNOWN, Level, NetEvent, SignalTraces,
                            k_and, k_not, k_or, merge_events)
from datachan.netlist import (Buffer, ChannelNetlist, ResetState, Simulator,
                              eval_reset, mux_lines)
from datachan import stimulus

LEVELS = (LOW, HIGH, UNKNOWN)


# --------------------------------------------------------------------------
# three-valued logic

def test_not_truth_table():
    assert k_not(LOW) is HIGH
    assert k_not(HIGH) is LOW
    assert k_not(UNKNOWN) is UNKNOWN


def test_and_or_dominant_values():
    # LOW dominates AND and HIGH dominates OR even against UNKNOWN
    assert k_and(LOW, UNKNOWN) is LOW
    assert k_or(HIGH, UNKNOWN) is HIGH
    assert k_and(HIGH, UNKNOWN) is UNKNOWN
    assert k_or(LOW, UNKNOWN) is UNKNOWN
    assert k_and(HIGH, HIGH) is HIGH
    assert k_or(LOW, LOW) is LOW


@given(st.lists(st.sampled_from(LEVELS), min_size=1, max_size=5))
def test_de_morgan(terms):
    assert k_not(k_and(*terms)) is k_or(*(k_not(t) for t in terms))


def test_vcd_chars():
    assert [lvl.vcd_char for lvl in (LOW, HIGH, UNKNOWN)] == ["0", "1", "x"]


# --------------------------------------------------------------------------
# traces

def _traces():
    return SignalTraces(
        events={"A": [(0, UNKNOWN), (5, LOW), (10, HIGH), (20, LOW), (30, HIGH)]},
        horizon_ps=40,
    )


def test_level_at_bisects_history():
    tr = _traces()
    assert tr.level_at("A", 0) is UNKNOWN
    assert tr.level_at("A", 9) is LOW
    assert tr.level_at("A", 10) is HIGH
    assert tr.level_at("A", 39) is HIGH


def test_edges_and_intervals():
    tr = _traces()
    assert tr.edges("A", "rise") == [10, 30]
    assert tr.edges("A", "fall") == [20]
    assert tr.intervals("A", HIGH) == [(10, 20), (30, 40)]
    assert tr.last_time_at("A", LOW) == 20


def test_merge_events_is_stable():
    a = [NetEvent(5, "X", HIGH), NetEvent(7, "X", LOW)]
    b = [NetEvent(5, "Y", LOW)]
    merged = merge_events([a, b])
    assert [ev.time_ps for ev in merged] == [5, 5, 7]
    assert merged[0].net == "X"  # same-time order follows stream order


# --------------------------------------------------------------------------
# reset block decision logic

def test_reset_arms_from_enable_sample():
    state = ResetState()
    assert eval_reset(state, "rise", LOW, HIGH, LOW) in (LOW, UNKNOWN)
    assert eval_reset(state, "fall", LOW, HIGH, LOW) is HIGH  # armed commits
    # armed persists while disable stays low and enable returns low
    assert state.start_level(LOW, LOW, LOW) is HIGH


def test_reset_disable_forces_low():
    state = ResetState(armed=HIGH)
    assert state.start_level(HIGH, LOW, HIGH) is LOW


def test_reset_recirculates_from_buffered_last():
    state = ResetState(armed=LOW)
    assert state.start_level(LOW, LOW, HIGH) is HIGH
    assert state.start_level(LOW, HIGH, HIGH) is LOW  # enable blocks recirc
    assert state.start_level(LOW, LOW, LOW) is LOW


def test_reset_rejects_bad_edge():
    with pytest.raises(ValueError):
        eval_reset(ResetState(), "sideways", LOW, LOW, LOW)


# --------------------------------------------------------------------------
# netlist structure

def test_channel_structure_default_width(config):
    nl = build_channel(config)
    assert len(nl.ring_flip_flops) == 11        # Sel1..Sel10 plus iSel1
    assert len(nl.hold_flip_flops) == 2
    assert nl.selector_count == 20              # ten selects x true/complement
    assert {b.dst for b in nl.splitter} == {"Dclk", "Nclk"}
    assert nl.sel_nets[0] == "Sel1" and nl.sel_nets[-1] == "Sel10"
    assert set(nl.line_nets) == {"Even", "Odd", "nEven", "nOdd"}
    assert "HoldD8" in nl.nets and "HoldD9" in nl.nets


def test_channel_structure_width_8():
    cfg = ChannelConfig(word_width=8)
    nl = build_channel(cfg)
    assert len(nl.ring_flip_flops) == 9
    assert nl.selector_count == 16
    assert "Buffered_Sel8" in nl.nets


def test_invalid_width_rejected():
    with pytest.raises(ConfigError):
        build_channel(ChannelConfig(word_width=12))


# --------------------------------------------------------------------------
# simulated ring behavior

def _high_sels_over_time(traces, width, t0, t1):
    """(time, set-of-high-selects) after each event time in [t0, t1)."""
    times = sorted({t for k in range(1, width + 1)
                    for t, _ in traces.events[f"Sel{k}"] if t0 <= t < t1})
    out = []
    for t in times:
        high = {k for k in range(1, width + 1)
                if traces.level_at(f"Sel{k}", t) is HIGH}
        out.append((t, high))
    return out


def test_selects_are_one_hot_while_streaming(config, stream40):
    _, stim, traces = stream40
    t0 = stim.timing.slot_start(0, 1)
    t1 = stim.timing.slot_start(39, 1)
    snapshots = _high_sels_over_time(traces, config.word_width, t0, t1)
    assert snapshots, "no select activity in the streaming window"
    assert all(len(high) == 1 for _, high in snapshots)


def test_select_dwell_is_one_serial_period(config, stream40):
    _, stim, traces = stream40
    t0, t1 = stim.timing.slot_start(0, 1), stim.timing.slot_start(39, 1)
    period = round(config.bit_period)
    for k in range(1, config.word_width + 1):
        dwells = [b - a for a, b in traces.intervals(f"Sel{k}", HIGH)
                  if t0 <= a < t1]
        assert dwells
        assert all(abs(d - period) <= 1 for d in dwells)


def test_sel1_recurs_every_word_on_the_exact_grid(config, stream40):
    _, stim, traces = stream40
    rises = traces.edges("Sel1", "rise")
    expected = [stim.timing.slot_start(r, 1) for r in range(40)]
    assert rises[:40] == expected


def test_start_pulse_overlaps_last_select(config, stream40):
    _, stim, traces = stream40
    t0 = stim.timing.slot_start(1, 1)
    last = f"Sel{config.word_width}"
    start_ints = [iv for iv in traces.intervals("Start", HIGH) if iv[0] >= t0]
    sel_ints = [iv for iv in traces.intervals(last, HIGH) if iv[0] >= t0]
    assert start_ints and sel_ints
    for (s0, s1) in start_ints[:10]:
        assert any(a < s1 and s0 < b for a, b in sel_ints), \
            f"Start pulse ({s0}, {s1}) overlaps no {last} pulse"


def test_isel1_mirrors_sel1(stream40):
    _, _, traces = stream40
    assert traces.edges("iSel1", "rise") == traces.edges("Sel1", "rise")


def test_no_enable_keeps_ring_quiet(config):
    until = round(40 * config.bit_period)
    events = merge_events([
        stimulus.clock_events(config, until),
        [NetEvent(0, "Disable", HIGH), NetEvent(0, "Enable", LOW),
         NetEvent(round(4 * config.bit_period), "Disable", LOW)],
    ])
    traces = advance(build_channel(config), events, until)
    for k in range(1, config.word_width + 1):
        assert traces.edges(f"Sel{k}", "rise") == []


def test_disable_drains_the_ring(config):
    words = stimulus.random_words(8, seed=9)
    stim = stimulus.stream_stimulus(config, words)
    t_d = stim.timing.slot_mid(3, 5)
    sched = stimulus.ProtocolSchedule(
        stim.schedule.actions + [(t_d, stimulus.Action.DISABLE_ASSERT)])
    stim = stimulus.stream_stimulus(config, words, sched)
    traces = advance(build_channel(config), stim.events, stim.until_ps)
    for k in range(1, config.word_width + 1):
        assert traces.level_at(f"Sel{k}", stim.until_ps - 1) is LOW
    for line in ("Even", "Odd", "nEven", "nOdd"):
        assert traces.level_at(line, stim.until_ps - 1) is HIGH


def test_determinism_of_advance(config, stream40):
    words, stim, traces = stream40
    again = advance(build_channel(config), stim.events, stim.until_ps)
    assert again.events == traces.events


def test_zero_delay_loop_raises():
    cfg = ChannelConfig()
    nl = ChannelNetlist(
        config=cfg, nets=["A", "B"], primary_inputs=["A"],
        components=[Buffer("A", "B", 0), Buffer("B", "A", 0, invert=True)],
    )
    with pytest.raises(OscillationError):
        Simulator(nl).run([NetEvent(5, "A", HIGH)], 10)


def test_stimulus_must_hit_primary_inputs(config):
    nl = build_channel(config)
    with pytest.raises(ValueError):
        advance(nl, [NetEvent(0, "Sel1", HIGH)], 10)


def test_horizon_must_cover_stimulus(config):
    nl = build_channel(config)
    with pytest.raises(ValueError):
        advance(nl, [NetEvent(100, "Enable", HIGH)], 50)


# --------------------------------------------------------------------------
# functional line multiplexing

def test_mux_lines_matches_simulated_lines(config, stream40):
    _, stim, traces = stream40
    word_source = {f"D{i}": traces.events[f"D{i}"] for i in range(8)}
    word_source["D8"] = traces.events["HoldD8"]
    word_source["D9"] = traces.events["HoldD9"]
    lines = mux_lines(traces, word_source, config.word_width)

    ref = SignalTraces(events=lines, horizon_ps=traces.horizon_ps)
    for r in range(1, 39):
        for slot in range(1, config.word_width + 1):
            mid = stim.timing.slot_mid(r, slot)
            for line in ("Even", "Odd", "nEven", "nOdd"):
                assert ref.level_at(line, mid) is traces.level_at(line, mid), \
                    f"{line} differs at round {r} slot {slot}"


def test_mux_lines_flags_contention():
    width = 10
    events = {f"Sel{k}": [(0, LOW)] for k in range(1, width + 1)}
    events["Sel1"] = [(0, HIGH)]
    events["Sel3"] = [(0, HIGH)]  # two odd selects driving opposite bits
    traces = SignalTraces(events=events, horizon_ps=10)
    source = {f"D{i}": [(0, LOW)] for i in range(width)}
    source["D0"] = [(0, HIGH)]
    with pytest.raises(ContentionError):
        mux_lines(traces, source, width)
