"""Angle utilities: branch-cut wrapping, joint limits, and exact
rational-multiple-of-pi parsing for catalog files."""

import math
import re

import numpy as np

from .errors import ParameterError

# Actuated joints travel +-3/4 pi rad; anything outside is clamped and flagged.
JOINT_LIMIT = 0.75 * math.pi

# Actuated joints per module.
JOINT_COUNT = 5

_RATIONAL_PI = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?:(?P<num>\d+)\s*(?:/\s*(?P<den>\d+))?\s*)?pi\s*$"
)


def wrap_angle(x: float) -> float:
    """Wrap a scalar angle into (-pi, pi].

    Values already in range pass through bit-exact, so wrapping is
    idempotent and never perturbs a normalized input.
    """
    if -math.pi < x <= math.pi:
        return x
    return math.pi - ((math.pi - x) % (2.0 * math.pi))


def wrap_array(x: np.ndarray) -> np.ndarray:
    """Elementwise wrap into (-pi, pi], preserving in-range entries exactly."""
    x = np.asarray(x, dtype=float)
    wrapped = math.pi - np.mod(math.pi - x, 2.0 * math.pi)
    return np.where((x > -math.pi) & (x <= math.pi), x, wrapped)


def clamp_joints(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Clip joint angles to [-JOINT_LIMIT, JOINT_LIMIT].

    Returns (clamped, flags) where flags marks entries that were out of
    range. Clamping is a safety net, not an error: amplitude transients
    may briefly overshoot.
    """
    q = np.asarray(q, dtype=float)
    flags = np.abs(q) > JOINT_LIMIT
    return np.clip(q, -JOINT_LIMIT, JOINT_LIMIT), flags


def parse_angle(value: float | int | str) -> float:
    """Parse an angle given as radians or as a rational multiple of pi.

    Accepted string forms: "p/q pi", "p pi", "pi", "-pi", "0", or a plain
    decimal. Multiples of pi are evaluated as (p * math.pi) / q so that
    formatting with format_angle round-trips bit-exact.
    """
    if isinstance(value, bool):
        raise ParameterError(f"not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ParameterError(f"not an angle: {value!r}")
    m = _RATIONAL_PI.match(value)
    if m:
        num = int(m.group("num")) if m.group("num") else 1
        den = int(m.group("den")) if m.group("den") else 1
        if den == 0:
            raise ParameterError(f"zero denominator in angle {value!r}")
        sign = -1.0 if m.group("sign") == "-" else 1.0
        return sign * (num * math.pi) / den
    try:
        out = float(value)
    except ValueError:
        raise ParameterError(f"cannot parse angle {value!r}") from None
    if not math.isfinite(out):
        raise ParameterError(f"angle must be finite, got {value!r}")
    return out


def format_angle(value: float, max_denominator: int = 128) -> str:
    """Format an angle as "p/q pi" when that form reproduces it bit-exact.

    Falls back to repr(value) (shortest round-trip decimal) otherwise, so
    serialize -> parse is always the identity.
    """
    if value == 0.0:
        return "0"
    for den in range(1, max_denominator + 1):
        num = round(abs(value) * den / math.pi)
        if num == 0:
            continue
        if (num * math.pi) / den == abs(value):
            sign = "-" if value < 0 else ""
            if den == 1:
                return f"{sign}pi" if num == 1 else f"{sign}{num} pi"
            return f"{sign}{num}/{den} pi"
    return repr(value)
