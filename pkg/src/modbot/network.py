"""Simulated pub/sub transport: virtual clock, lossy channel, master.

Everything runs on an integer millisecond virtual clock driven by a
single event queue, so a run is a pure function of (configuration,
seed): message logs are byte-reproducible. Events at one instant execute
master-tick first, then deliveries, then slave ticks, then analysis
probes; ties within a kind break by (module_id, seq, insertion order).
"""

import math
import random
from dataclasses import dataclass
from enum import IntEnum
from heapq import heappop, heappush

from .angles import clamp_joints
from .coordination import SystemConfig, SystemState, initial_system_state, step_system
from .errors import ParameterError
from .oscillators import output
from .wire import TrajectorySegmentMessage, encode

MASTER_PERIOD_MS = 50  # 20 Hz command horizon
SAMPLE_PERIOD_MS = 10  # spacing of samples inside a segment
SAMPLES_PER_SEGMENT = MASTER_PERIOD_MS // SAMPLE_PERIOD_MS


class EventKind(IntEnum):
    """Execution order of coincident events."""

    MASTER_TICK = 0
    DELIVERY = 1
    SLAVE_TICK = 2
    ANALYSIS = 3


class Scheduler:
    """Deterministic single-threaded event queue over virtual time."""

    def __init__(self):
        self._heap = []
        self._count = 0
        self.now_ms = 0

    def schedule(self, time_ms: int, kind: EventKind, callback, module_id: int = -1,
                 seq: int = -1):
        """Enqueue callback(time_ms) at the given instant."""
        if time_ms < self.now_ms:
            raise ParameterError(
                f"cannot schedule event at {time_ms} ms before now ({self.now_ms} ms)"
            )
        heappush(
            self._heap,
            (int(time_ms), int(kind), module_id, seq, self._count, callback),
        )
        self._count += 1

    def run_until(self, end_ms: int):
        """Execute all events with time <= end_ms in deterministic order."""
        while self._heap and self._heap[0][0] <= end_ms:
            time_ms, _, _, _, _, callback = heappop(self._heap)
            self.now_ms = time_ms
            callback(time_ms)
        if end_ms > self.now_ms:
            self.now_ms = end_ms

    @property
    def pending(self) -> int:
        return len(self._heap)


@dataclass(frozen=True)
class LogRecord:
    """One transport event: a publish, a drop, or a delivery."""

    time_ms: int
    event: str  # "send" | "drop" | "deliver"
    topic: str
    payload: bytes

    def render(self) -> str:
        return f"{self.time_ms} {self.event} {self.topic} {self.payload.decode('ascii')}"


class MessageLog:
    """Append-only transport log; identical runs render identical bytes."""

    def __init__(self):
        self.records: list[LogRecord] = []

    def append(self, time_ms: int, event: str, topic: str, payload: bytes):
        self.records.append(LogRecord(time_ms, event, topic, payload))

    def render(self) -> str:
        return "".join(r.render() + "\n" for r in self.records)


@dataclass(frozen=True)
class ChannelConfig:
    """Lossy-link model: Bernoulli drops plus uniform delivery jitter.

    The config is an immutable value; to change the drop rate mid-run,
    reassign ``Channel.loss_probability`` between scheduler runs.
    """

    loss_probability: float = 0.0
    latency_ms: float = 0.0
    jitter_ms: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.loss_probability < 1.0:
            raise ParameterError(
                f"loss_probability must be in [0, 1), got {self.loss_probability}"
            )
        if self.latency_ms < 0:
            raise ParameterError(f"latency_ms must be >= 0, got {self.latency_ms}")
        if self.jitter_ms < 0:
            raise ParameterError(f"jitter_ms must be >= 0, got {self.jitter_ms}")


class Channel:
    """At-most-once delivery with seeded, replayable randomness.

    Every send draws one loss variate and one jitter variate (even when
    jitter is zero), so the drop pattern for a given seed is independent
    of the latency settings. loss_probability may be changed mid-run to
    model an outage that starts or ends.
    """

    def __init__(self, config: ChannelConfig, scheduler: Scheduler, log: MessageLog,
                 tap=None):
        self.config = config
        self.loss_probability = config.loss_probability
        self.scheduler = scheduler
        self.log = log
        self.tap = tap  # optional callable(topic, payload), e.g. an MQTT bridge
        self._rng = random.Random(config.seed)
        self.sent = 0
        self.dropped = 0
        self.delivered = 0

    def send(self, topic: str, payload: bytes, on_deliver, module_id: int = -1,
             seq: int = -1):
        """Publish payload; schedule on_deliver(payload, time_ms) unless dropped."""
        now = self.scheduler.now_ms
        self.sent += 1
        if self.tap is not None:
            self.tap(topic, payload)
        u = self._rng.random()
        jitter = self._rng.uniform(-self.config.jitter_ms, self.config.jitter_ms)
        if u < self.loss_probability:
            self.dropped += 1
            self.log.append(now, "drop", topic, payload)
            return
        self.log.append(now, "send", topic, payload)
        delay = max(0.0, self.config.latency_ms + jitter)
        deliver_at = now + int(math.floor(delay + 0.5))

        def _deliver(time_ms: int, payload=payload, topic=topic):
            self.delivered += 1
            self.log.append(time_ms, "deliver", topic, payload)
            on_deliver(payload, time_ms)

        self.scheduler.schedule(
            deliver_at, EventKind.DELIVERY, _deliver, module_id=module_id, seq=seq
        )


class Master:
    """20 Hz trajectory generator.

    Each tick advances the coordinated simulation one 50 ms horizon with
    fixed sub-steps of dt, samples every module's joint output on the
    10 ms grid (half-open: 5 samples per horizon), and emits one segment
    per module stamped one horizon ahead, so slaves always interpolate
    into buffered future data.
    """

    def __init__(self, config: SystemConfig, dt: float,
                 state: SystemState | None = None):
        steps = round(SAMPLE_PERIOD_MS / 1000.0 / dt) if dt > 0 else 0
        if steps < 1 or abs(steps * dt - SAMPLE_PERIOD_MS / 1000.0) > 1e-12:
            raise ParameterError(
                f"dt={dt} must evenly divide the {SAMPLE_PERIOD_MS} ms sample period"
            )
        self.config = config
        self.dt = dt
        self.state = state if state is not None else initial_system_state(config)
        self.next_tick_ms = 0
        self.clamp_events = 0
        self._steps_per_sample = steps
        self._seq = [0] * config.m
        # Per-module history of every emitted sample, in emission order;
        # identical to an offline dense run sampled on the 10 ms grid.
        self.dense_samples: list[list[tuple[float, ...]]] = [
            [] for _ in range(config.m)
        ]

    def master_tick(self, clock_ms: int) -> list[TrajectorySegmentMessage]:
        """Advance one horizon and emit one segment per module."""
        if clock_ms != self.next_tick_ms:
            raise ParameterError(
                f"master tick at {clock_ms} ms, expected {self.next_tick_ms} ms"
            )
        self.next_tick_ms += MASTER_PERIOD_MS
        per_module = [[] for _ in range(self.config.m)]
        for _ in range(SAMPLES_PER_SEGMENT):
            for j, (mod_state, mod_params) in enumerate(
                zip(self.state.modules, self.config.modules)
            ):
                q, flags = clamp_joints(output(mod_state, mod_params))
                self.clamp_events += int(flags.sum())
                per_module[j].append(tuple(float(x) for x in q))
            for _ in range(self._steps_per_sample):
                self.state = step_system(self.state, self.config, self.dt)
        messages = []
        for j in range(self.config.m):
            self.dense_samples[j].extend(per_module[j])
            messages.append(
                TrajectorySegmentMessage(
                    module_id=j,
                    seq=self._seq[j],
                    start_time_ms=clock_ms + MASTER_PERIOD_MS,
                    sample_period_ms=SAMPLE_PERIOD_MS,
                    samples=tuple(per_module[j]),
                )
            )
            self._seq[j] += 1
        return messages

    def encode_all(self, messages) -> list[bytes]:
        return [encode(m) for m in messages]
