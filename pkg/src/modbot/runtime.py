"""Slave-side runtime: segment buffer, 100 Hz interpolation, PWM mapping.

Each module's emulated controller buffers incoming trajectory segments,
samples them with per-joint linear interpolation on a 10 ms timer, and
converts joint angles to servo pulse widths. Gaps (startup, packet loss)
fall back to holding the last applied pose, so output is always defined
and always in range.
"""

import math
from bisect import bisect_right, insort
from dataclasses import dataclass

from .angles import JOINT_COUNT, JOINT_LIMIT
from .errors import ParameterError, RoutingError
from .wire import StatusMessage, TrajectorySegmentMessage, decode

SLAVE_TICK_MS = 10  # 100 Hz interpolation timer
PWM_MIN_US = 500
PWM_MAX_US = 2500
PWM_CENTER_US = 1500
PWM_US_PER_RAD = 1000.0 / JOINT_LIMIT  # full throw 500..2500 over -limit..+limit

DEFAULT_BUFFER_CAPACITY = 64


def pwm_map(q: float) -> int:
    """Map a joint angle to a servo pulse width in microseconds.

    Linear over [-3/4 pi, +3/4 pi] -> [500, 2500] with 1500 at center;
    input is clamped, rounding is half-up, and the result is clamped
    again so the pulse is always legal.
    """
    q = min(max(q, -JOINT_LIMIT), JOINT_LIMIT)
    pulse = int(math.floor(PWM_CENTER_US + q * PWM_US_PER_RAD + 0.5))
    return min(PWM_MAX_US, max(PWM_MIN_US, pulse))


class TrajectoryBuffer:
    """Bounded store of pending segments for one module.

    Segments are kept sorted by start time and deduplicated by seq, so
    arrival order (scrambled by jitter) does not matter. Fully played
    segments are evicted; on overflow the oldest pending segment is
    dropped and flagged.
    """

    def __init__(self, module_id: int, capacity: int = DEFAULT_BUFFER_CAPACITY):
        if capacity < 1:
            raise ParameterError(f"capacity must be >= 1, got {capacity}")
        self.module_id = module_id
        self.capacity = capacity
        self._segments: list[TrajectorySegmentMessage] = []
        self._seqs: set[int] = set()
        self.stale_discards = 0
        self.overflow_drops = 0
        self.overflowed = False

    @property
    def depth(self) -> int:
        """Number of buffered segments."""
        return len(self._segments)

    @property
    def segments(self) -> tuple[TrajectorySegmentMessage, ...]:
        return tuple(self._segments)

    def _active_index(self, t_ms: int) -> int | None:
        i = bisect_right(self._segments, t_ms, key=lambda s: s.start_time_ms) - 1
        if i >= 0 and t_ms < self._segments[i].end_time_ms:
            return i
        return None

    def ingest(self, message: TrajectorySegmentMessage, clock_ms: int):
        """Insert a segment; duplicates are ignored, stale ones discarded."""
        if message.module_id != self.module_id:
            raise RoutingError(
                f"segment for module {message.module_id} reached module "
                f"{self.module_id}"
            )
        if message.seq in self._seqs:
            return
        if message.end_time_ms < clock_ms:
            self.stale_discards += 1
            return
        insort(self._segments, message, key=lambda s: s.start_time_ms)
        self._seqs.add(message.seq)
        if len(self._segments) > self.capacity:
            # Free fully played segments first; only then sacrifice the
            # oldest pending one.
            self.evict_consumed(clock_ms)
            while len(self._segments) > self.capacity:
                active = self._active_index(clock_ms)
                victim_idx = 1 if active == 0 else 0
                victim = self._segments.pop(victim_idx)
                self._seqs.discard(victim.seq)
                self.overflow_drops += 1
                self.overflowed = True

    def evict_consumed(self, clock_ms: int):
        """Drop segments that ended at or before clock_ms."""
        keep = []
        for seg in self._segments:
            if seg.end_time_ms <= clock_ms:
                self._seqs.discard(seg.seq)
            else:
                keep.append(seg)
        self._segments = keep

    def sample(
        self, t_ms: int, fallback: tuple[float, ...]
    ) -> tuple[tuple[float, ...], int | None, bool]:
        """Joint pose at time t_ms: (q, active seq, holding).

        Linear interpolation between the bracketing samples; across a
        boundary between contiguous segments it bridges the earlier
        segment's last sample and the later one's first. Whenever the
        bracketing pair does not exist the fallback pose is held and
        holding is True.
        """
        i = self._active_index(t_ms)
        if i is None:
            return tuple(fallback), None, True
        seg = self._segments[i]
        offset = t_ms - seg.start_time_ms
        k, rem = divmod(offset, seg.sample_period_ms)
        if rem == 0:
            return seg.samples[k], seg.seq, False
        w = rem / seg.sample_period_ms
        if k + 1 < len(seg.samples):
            older, newer = seg.samples[k], seg.samples[k + 1]
        else:
            if (
                i + 1 < len(self._segments)
                and self._segments[i + 1].start_time_ms == seg.end_time_ms
            ):
                older, newer = seg.samples[k], self._segments[i + 1].samples[0]
            else:
                return tuple(fallback), None, True
        q = tuple((1.0 - w) * a + w * b for a, b in zip(older, newer))
        return q, seg.seq, False


@dataclass(frozen=True)
class TraceRow:
    """One 10 ms tick of a slave: time, pose, pulses, bookkeeping."""

    t_ms: int
    q: tuple[float, ...]
    pulse_us: tuple[int, ...]
    seq_active: int  # -1 while holding
    holds: int  # cumulative hold-tick count


class Slave:
    """Emulated module controller fed by the transport layer."""

    def __init__(
        self, module_id: int, capacity: int = DEFAULT_BUFFER_CAPACITY
    ):
        self.module_id = module_id
        self.buffer = TrajectoryBuffer(module_id, capacity)
        self.last_applied: tuple[float, ...] = (0.0,) * JOINT_COUNT
        self.last_seq_applied = -1
        self.holds = 0
        self.trace: list[TraceRow] = []

    def on_message(self, payload: bytes, time_ms: int):
        """Decode and buffer a trajectory payload addressed to this module."""
        self.buffer.ingest(decode(payload), time_ms)

    def tick(self, clock_ms: int) -> StatusMessage:
        """One timer interrupt: sample, drive servos, report status."""
        q, seq_active, holding = self.buffer.sample(clock_ms, self.last_applied)
        if holding:
            self.holds += 1
        else:
            self.last_seq_applied = seq_active
        self.last_applied = q
        pulses = tuple(pwm_map(x) for x in q)
        self.buffer.evict_consumed(clock_ms)
        self.trace.append(
            TraceRow(
                t_ms=clock_ms,
                q=q,
                pulse_us=pulses,
                seq_active=seq_active if seq_active is not None else -1,
                holds=self.holds,
            )
        )
        return StatusMessage(
            module_id=self.module_id,
            last_seq_applied=self.last_seq_applied,
            buffer_depth=self.buffer.depth,
            clock_ms=clock_ms,
        )

    def applied_seq_sequence(self) -> list[int]:
        """Ordered distinct seq values the slave actually played."""
        seqs = []
        for row in self.trace:
            if row.seq_active >= 0 and (not seqs or seqs[-1] != row.seq_active):
                seqs.append(row.seq_active)
        return seqs


def format_csv_float(x: float) -> str:
    """Compact repeatable float format for CSV traces ('%.9g', no -0)."""
    if x == 0.0:
        return "0"
    return f"{x:.9g}"


def render_trace_csv(trace: list[TraceRow]) -> str:
    """Render a slave trace as CSV with a fixed header."""
    lines = ["t_ms,q1,q2,q3,q4,q5,p1,p2,p3,p4,p5,seq_active,holds"]
    for row in trace:
        lines.append(
            ",".join(
                [str(row.t_ms)]
                + [format_csv_float(q) for q in row.q]
                + [str(p) for p in row.pulse_us]
                + [str(row.seq_active), str(row.holds)]
            )
        )
    return "\n".join(lines) + "\n"
