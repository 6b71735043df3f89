"""Virtual-clock scheduler and the lossy, jittery message channel."""

import pytest

from modbot.errors import ParameterError
from modbot.network import (
    Channel,
    ChannelConfig,
    EventKind,
    MessageLog,
    Scheduler,
)


def _channel(scheduler=None, log=None, tap=None, **cfg):
    scheduler = scheduler if scheduler is not None else Scheduler()
    log = log if log is not None else MessageLog()
    channel = Channel(ChannelConfig(**cfg), scheduler, log, tap=tap)
    return channel, scheduler, log


def test_scheduler_orders_by_time_then_kind_then_module_then_seq():
    sched = Scheduler()
    seen = []

    def mark(label):
        return lambda t: seen.append((t, label))

    sched.schedule(20, EventKind.SLAVE_TICK, mark("late-slave"))
    sched.schedule(10, EventKind.ANALYSIS, mark("analysis"))
    sched.schedule(10, EventKind.SLAVE_TICK, mark("slave-1"), module_id=1)
    sched.schedule(10, EventKind.SLAVE_TICK, mark("slave-0"), module_id=0)
    sched.schedule(10, EventKind.DELIVERY, mark("deliver-b"), module_id=0, seq=2)
    sched.schedule(10, EventKind.DELIVERY, mark("deliver-a"), module_id=0, seq=1)
    sched.schedule(10, EventKind.MASTER_TICK, mark("master"))
    sched.run_until(20)
    assert [label for _, label in seen] == [
        "master",
        "deliver-a",
        "deliver-b",
        "slave-0",
        "slave-1",
        "analysis",
        "late-slave",
    ]
    assert seen[0][0] == 10 and seen[-1][0] == 20


def test_scheduler_insertion_order_breaks_remaining_ties():
    sched = Scheduler()
    seen = []
    for i in range(5):
        sched.schedule(
            7, EventKind.ANALYSIS, (lambda i: lambda t: seen.append(i))(i)
        )
    sched.run_until(7)
    assert seen == [0, 1, 2, 3, 4]


def test_scheduler_rejects_past_events_and_advances_clock():
    sched = Scheduler()
    sched.run_until(100)
    assert sched.now_ms == 100
    with pytest.raises(ParameterError):
        sched.schedule(99, EventKind.DELIVERY, lambda t: None)
    sched.schedule(100, EventKind.DELIVERY, lambda t: None)
    assert sched.pending == 1


def test_lossless_channel_delivers_at_exact_latency():
    got = []
    channel, sched, log = _channel(latency_ms=15.0)
    channel.send("modules/0/traj", b"x", lambda p, t: got.append((p, t)))
    sched.run_until(100)
    assert got == [(b"x", 15)]
    assert channel.sent == 1 and channel.delivered == 1 and channel.dropped == 0
    assert [(r.time_ms, r.event) for r in log.records] == [
        (0, "send"), (15, "deliver"),
    ]


def test_zero_config_delivers_immediately_in_order():
    got = []
    channel, sched, _ = _channel()
    for i in range(5):
        channel.send("t", bytes([i]), lambda p, t: got.append(p[0]), seq=i)
    sched.run_until(0)
    assert got == [0, 1, 2, 3, 4]


def test_loss_pattern_replays_for_a_seed():
    def drop_pattern(**cfg):
        channel, sched, _ = _channel(**cfg)
        pattern = []
        for i in range(200):
            before = channel.dropped
            channel.send("t", b"p", lambda p, t: None)
            pattern.append(channel.dropped > before)
        return pattern

    a = drop_pattern(loss_probability=0.3, seed=42)
    b = drop_pattern(loss_probability=0.3, seed=42)
    c = drop_pattern(loss_probability=0.3, seed=43)
    assert a == b
    assert a != c
    # roughly the configured rate
    assert 0.15 < sum(a) / len(a) < 0.45


def test_drop_pattern_independent_of_jitter_setting():
    def drop_pattern(**cfg):
        channel, sched, _ = _channel(**cfg)
        pattern = []
        for _ in range(300):
            before = channel.dropped
            channel.send("t", b"p", lambda p, t: None)
            pattern.append(channel.dropped > before)
        return pattern

    flat = drop_pattern(loss_probability=0.25, seed=9)
    jittered = drop_pattern(
        loss_probability=0.25, seed=9, latency_ms=20.0, jitter_ms=12.0
    )
    assert flat == jittered


def test_jitter_delay_never_negative():
    times = []
    channel, sched, _ = _channel(latency_ms=2.0, jitter_ms=30.0, seed=5)
    for _ in range(200):
        channel.send("t", b"p", lambda p, t: times.append(t))
    sched.run_until(10_000)
    assert min(times) >= 0
    assert max(times) <= 2 + 30 + 1


def test_jittered_delays_replay_for_a_seed():
    def delays(seed):
        out = []
        channel, sched, _ = _channel(latency_ms=10.0, jitter_ms=8.0, seed=seed)
        for _ in range(100):
            channel.send("t", b"p", lambda p, t: out.append(t))
        sched.run_until(10_000)
        return out

    assert delays(7) == delays(7)


def test_loss_probability_can_change_mid_run():
    channel, sched, _ = _channel(loss_probability=0.9, seed=1)
    for _ in range(100):
        channel.send("t", b"p", lambda p, t: None)
    dropped_during_outage = channel.dropped
    assert dropped_during_outage > 50
    channel.loss_probability = 0.0
    for _ in range(100):
        channel.send("t", b"p", lambda p, t: None)
    assert channel.dropped == dropped_during_outage


def test_tap_sees_every_send_including_drops():
    taps = []
    channel, sched, _ = _channel(
        loss_probability=0.5, seed=3, tap=lambda topic, payload: taps.append(topic)
    )
    for _ in range(50):
        channel.send("modules/1/traj", b"p", lambda p, t: None)
    assert len(taps) == 50
    assert channel.dropped > 0


def test_dropped_messages_are_logged_not_delivered():
    channel, sched, log = _channel(loss_probability=0.5, seed=11)
    got = []
    for _ in range(40):
        channel.send("t", b"p", lambda p, t: got.append(t))
    sched.run_until(100)
    drops = [r for r in log.records if r.event == "drop"]
    sends = [r for r in log.records if r.event == "send"]
    delivers = [r for r in log.records if r.event == "deliver"]
    assert len(drops) == channel.dropped
    assert len(sends) == len(delivers) == len(got)
    assert len(drops) + len(sends) == 40


def test_log_renders_deterministic_lines():
    log = MessageLog()
    log.append(5, "send", "modules/0/traj", b'{"x":1}')
    log.append(6, "deliver", "modules/0/traj", b'{"x":1}')
    assert log.render() == (
        '5 send modules/0/traj {"x":1}\n'
        '6 deliver modules/0/traj {"x":1}\n'
    )


def test_channel_config_validation():
    with pytest.raises(ParameterError):
        ChannelConfig(loss_probability=1.0)
    with pytest.raises(ParameterError):
        ChannelConfig(loss_probability=-0.1)
    with pytest.raises(ParameterError):
        ChannelConfig(latency_ms=-1.0)
    with pytest.raises(ParameterError):
        ChannelConfig(jitter_ms=-2.0)
    ChannelConfig(loss_probability=0.999)  # open upper bound
