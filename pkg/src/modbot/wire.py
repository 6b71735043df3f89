"""Wire format for master/slave messaging.

Payloads are canonical JSON: fixed field order, compact separators, and
joint angles printed with exactly six fractional digits (never exponent
notation), so a given message always encodes to the same bytes and logs
are byte-reproducible. Decoding is strict: unknown fields, wrong sample
arity, and non-finite numbers are rejected.
"""

import json
import math
from dataclasses import dataclass

from .angles import JOINT_COUNT, JOINT_LIMIT
from .errors import ParameterError, WireFormatError


def traj_topic(module_id: int) -> str:
    """Pub/sub topic carrying trajectory segments to one module."""
    return f"modules/{module_id}/traj"


def status_topic(module_id: int) -> str:
    """Pub/sub topic carrying a module's status reports back."""
    return f"modules/{module_id}/status"


def _require_int(value, name: str, minimum: int | None = None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")


@dataclass(frozen=True)
class TrajectorySegmentMessage:
    """One horizon of sampled joint trajectory for one module.

    samples[k][i] is joint i+1 at start_time_ms + k * sample_period_ms;
    the segment covers [start_time_ms, start_time_ms + len(samples) *
    sample_period_ms) half-open, so consecutive segments concatenate
    without duplicate instants.
    """

    module_id: int
    seq: int
    start_time_ms: int
    sample_period_ms: int
    samples: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        _require_int(self.module_id, "module_id", minimum=0)
        _require_int(self.seq, "seq", minimum=0)
        _require_int(self.start_time_ms, "start_time_ms", minimum=0)
        _require_int(self.sample_period_ms, "sample_period_ms", minimum=1)
        samples = tuple(tuple(float(q) for q in row) for row in self.samples)
        object.__setattr__(self, "samples", samples)
        if not samples:
            raise ParameterError("samples must be non-empty")
        for k, row in enumerate(samples):
            if len(row) != JOINT_COUNT:
                raise ParameterError(
                    f"sample {k} has {len(row)} joints, expected {JOINT_COUNT}"
                )
            for i, q in enumerate(row):
                if not math.isfinite(q):
                    raise ParameterError(f"sample {k} joint {i + 1} is non-finite")
                if abs(q) > JOINT_LIMIT:
                    raise ParameterError(
                        f"sample {k} joint {i + 1} = {q:.6f} rad exceeds the "
                        f"{JOINT_LIMIT:.6f} rad actuator limit"
                    )

    @property
    def duration_ms(self) -> int:
        """Half-open segment length in ms."""
        return len(self.samples) * self.sample_period_ms

    @property
    def end_time_ms(self) -> int:
        """First instant NOT covered by this segment."""
        return self.start_time_ms + self.duration_ms


@dataclass(frozen=True)
class StatusMessage:
    """Slave feedback: what it has applied and how much it has buffered."""

    module_id: int
    last_seq_applied: int
    buffer_depth: int
    clock_ms: int

    def __post_init__(self):
        _require_int(self.module_id, "module_id", minimum=0)
        _require_int(self.last_seq_applied, "last_seq_applied", minimum=-1)
        _require_int(self.buffer_depth, "buffer_depth", minimum=0)
        _require_int(self.clock_ms, "clock_ms", minimum=0)


def format_sample_angle(q: float) -> str:
    """Exactly six fractional digits, plain decimal, no negative zero."""
    s = f"{q:.6f}"
    return "0.000000" if s == "-0.000000" else s


def quantize_angle(q: float) -> float:
    """The value a joint angle becomes after one encode/decode trip."""
    return float(format_sample_angle(q))


def quantize_message(message: TrajectorySegmentMessage) -> TrajectorySegmentMessage:
    """Message with all samples collapsed onto the 1e-6 rad wire grid."""
    return TrajectorySegmentMessage(
        module_id=message.module_id,
        seq=message.seq,
        start_time_ms=message.start_time_ms,
        sample_period_ms=message.sample_period_ms,
        samples=tuple(
            tuple(quantize_angle(q) for q in row) for row in message.samples
        ),
    )


def encode(message: TrajectorySegmentMessage) -> bytes:
    """Render a segment to canonical JSON bytes."""
    rows = ",".join(
        "[" + ",".join(format_sample_angle(q) for q in row) + "]"
        for row in message.samples
    )
    text = (
        f'{{"module_id":{message.module_id}'
        f',"seq":{message.seq}'
        f',"start_time_ms":{message.start_time_ms}'
        f',"sample_period_ms":{message.sample_period_ms}'
        f',"samples":[{rows}]}}'
    )
    return text.encode("ascii")


def encode_status(message: StatusMessage) -> bytes:
    """Render a status report to canonical JSON bytes."""
    text = (
        f'{{"module_id":{message.module_id}'
        f',"last_seq_applied":{message.last_seq_applied}'
        f',"buffer_depth":{message.buffer_depth}'
        f',"clock_ms":{message.clock_ms}}}'
    )
    return text.encode("ascii")


def _reject_constant(token: str):
    raise WireFormatError(f"non-finite number {token!r} is not allowed")


def _load_object(data: bytes, expected_fields: tuple[str, ...]) -> dict:
    if not isinstance(data, (bytes, bytearray)):
        raise WireFormatError(f"payload must be bytes, got {type(data).__name__}")
    try:
        text = bytes(data).decode("utf-8")
    except UnicodeDecodeError as e:
        raise WireFormatError(f"invalid UTF-8: {e.reason}", offset=e.start) from None
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        # For these all-ASCII payloads the character position is the byte
        # offset into the original buffer.
        raise WireFormatError(f"invalid JSON: {e.msg}", offset=e.pos) from None
    if not isinstance(obj, dict):
        raise WireFormatError("payload must be a JSON object")
    unknown = obj.keys() - set(expected_fields)
    if unknown:
        raise WireFormatError(f"unknown field(s): {', '.join(sorted(unknown))}")
    missing = set(expected_fields) - obj.keys()
    if missing:
        raise WireFormatError(f"missing field(s): {', '.join(sorted(missing))}")
    return obj


def _wire_int(obj: dict, name: str) -> int:
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise WireFormatError(f"{name} must be an integer, got {value!r}")
    return value


def decode(data: bytes) -> TrajectorySegmentMessage:
    """Parse and validate a trajectory segment payload."""
    obj = _load_object(
        data, ("module_id", "seq", "start_time_ms", "sample_period_ms", "samples")
    )
    raw_samples = obj["samples"]
    if not isinstance(raw_samples, list) or not raw_samples:
        raise WireFormatError("samples must be a non-empty list")
    samples = []
    for k, row in enumerate(raw_samples):
        if not isinstance(row, list) or len(row) != JOINT_COUNT:
            raise WireFormatError(
                f"sample {k} must be a list of {JOINT_COUNT} angles"
            )
        joints = []
        for i, q in enumerate(row):
            if isinstance(q, bool) or not isinstance(q, (int, float)):
                raise WireFormatError(f"sample {k} joint {i + 1} must be a number")
            q = float(q)
            if not math.isfinite(q):
                raise WireFormatError(f"sample {k} joint {i + 1} is non-finite")
            joints.append(q)
        samples.append(tuple(joints))
    try:
        return TrajectorySegmentMessage(
            module_id=_wire_int(obj, "module_id"),
            seq=_wire_int(obj, "seq"),
            start_time_ms=_wire_int(obj, "start_time_ms"),
            sample_period_ms=_wire_int(obj, "sample_period_ms"),
            samples=tuple(samples),
        )
    except ParameterError as e:
        raise WireFormatError(str(e)) from None


def decode_status(data: bytes) -> StatusMessage:
    """Parse and validate a status payload."""
    obj = _load_object(
        data, ("module_id", "last_seq_applied", "buffer_depth", "clock_ms")
    )
    try:
        return StatusMessage(
            module_id=_wire_int(obj, "module_id"),
            last_seq_applied=_wire_int(obj, "last_seq_applied"),
            buffer_depth=_wire_int(obj, "buffer_depth"),
            clock_ms=_wire_int(obj, "clock_ms"),
        )
    except ParameterError as e:
        raise WireFormatError(str(e)) from None
