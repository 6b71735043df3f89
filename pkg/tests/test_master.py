"""Master-side trajectory generation: horizons, sequencing, dense oracle."""

import numpy as np
import pytest

from modbot import gaits
from modbot.coordination import SystemConfig
from modbot.errors import ParameterError
from modbot.network import (
    MASTER_PERIOD_MS,
    SAMPLE_PERIOD_MS,
    SAMPLES_PER_SEGMENT,
    Master,
)
from modbot.oscillators import OscillatorNetworkParams, output
from modbot.simulation import RunConfig, _integrate_direct


def _snake_config():
    return gaits.system_config(gaits.get_preset("snake_crawl"))


def test_tick_emits_one_segment_per_module_with_increasing_seq():
    master = Master(_snake_config(), dt=0.002)
    first = master.master_tick(0)
    assert [m.module_id for m in first] == [0, 1]
    assert [m.seq for m in first] == [0, 0]
    assert all(m.start_time_ms == MASTER_PERIOD_MS for m in first)
    assert all(m.sample_period_ms == SAMPLE_PERIOD_MS for m in first)
    assert all(len(m.samples) == SAMPLES_PER_SEGMENT for m in first)
    second = master.master_tick(50)
    assert [m.seq for m in second] == [1, 1]
    assert all(m.start_time_ms == 100 for m in second)


def test_tick_requires_expected_clock():
    master = Master(_snake_config(), dt=0.002)
    master.master_tick(0)
    with pytest.raises(ParameterError):
        master.master_tick(70)


def test_dt_must_divide_sample_period():
    with pytest.raises(ParameterError):
        Master(_snake_config(), dt=0.003)
    with pytest.raises(ParameterError):
        Master(_snake_config(), dt=0.0)
    Master(_snake_config(), dt=0.001)
    Master(_snake_config(), dt=0.005)
    Master(_snake_config(), dt=0.01)


def test_zero_amplitude_emits_constant_offsets():
    n = 5
    params = OscillatorNetworkParams.uniform_gains(
        omega=2.0,
        R=(0.0,) * n,
        C=(0.3, -0.2, 0.1, 0.0, 0.25),
        theta_des=(0.1,) * (n - 1),
    )
    cfg = SystemConfig(modules=(params,), Theta_des=())
    master = Master(cfg, dt=0.002)
    for clock in (0, 50, 100):
        (msg,) = master.master_tick(clock)
        for sample in msg.samples:
            assert sample == params.C


def test_emitted_samples_match_offline_dense_run_bit_exact():
    cfg = _snake_config()
    config = RunConfig(preset=gaits.get_preset("snake_crawl"), duration_s=1.0, dt_s=0.002)
    reference = _integrate_direct(cfg, config.duration_s, config.dt_s)
    rows_per_sample = SAMPLE_PERIOD_MS // 2  # dt = 2 ms
    master = Master(cfg, dt=0.002)
    for tick in range(20):  # 20 horizons = 1 s
        master.master_tick(tick * MASTER_PERIOD_MS)
    for j in range(cfg.m):
        emitted = np.asarray(master.dense_samples[j])
        assert emitted.shape == (100, 5)
        for i in range(emitted.shape[0]):
            want = reference.q[i * rows_per_sample, j]
            assert np.array_equal(emitted[i], want)


def test_clamp_events_counted_for_overrange_configs():
    n = 5
    params = OscillatorNetworkParams.uniform_gains(
        omega=2.0,
        R=(3.0,) * n,
        C=(0.0,) * n,
        theta_des=(0.5,) * (n - 1),
        enforce_joint_limits=False,
    )
    cfg = SystemConfig(modules=(params,), Theta_des=())
    master = Master(cfg, dt=0.002)
    # drive amplitudes up so outputs exceed the actuator range
    for tick in range(10):
        master.master_tick(tick * MASTER_PERIOD_MS)
    assert master.clamp_events > 0
    for samples in master.dense_samples[0]:
        assert all(abs(q) <= 0.75 * np.pi + 1e-12 for q in samples)
