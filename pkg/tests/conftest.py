"""Shared fixtures: one cached streaming run reused across test modules."""

import pytest

from datachan import ChannelConfig, advance, build_channel
from datachan import golden, stimulus


@pytest.fixture(scope="session")
def config():
    return ChannelConfig()


@pytest.fixture(scope="session")
def stream40(config):
    """A 40-word random streaming run: (words, stim, traces)."""
    words = stimulus.random_words(40, seed=3)
    stim = stimulus.stream_stimulus(config, words)
    traces = advance(build_channel(config), stim.events, stim.until_ps)
    return words, stim, traces


@pytest.fixture(scope="session")
def stream40_bits(config, stream40):
    _, _, traces = stream40
    return golden.extract_serial(traces, config)
