"""Length of a vector under the diagonal flow and its calculus.

For a vector v with positive entries, the flowed length
f(t) = sqrt(e^{2t} v1^2 + e^{-2t} v2^2) is strictly convex with a single
minimum, and for two such vectors the difference f_v - f_w is either of one
sign, or strictly monotone with a single zero whose time has a closed form.
These facts drive the annular-shell experiments; everything here is a pure
function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Relative tolerance under which a coordinate coincidence is treated as the
# degenerate no-zero boundary case (the zero time would be at +-infinity).
DEGENERATE_TOL = 1e-12

KIND_DECREASING = "decreasing-with-zero"
KIND_INCREASING = "increasing-with-zero"
KIND_NO_ZERO = "no-zero"

# Remainder constant of the first-order flowed-length expansion; valid for
# deformation times below log(42).
LINEARIZE_CONSTANT = 42.0


def _require_quadrant(v, name: str = "v") -> tuple[float, float]:
    v1, v2 = float(v[0]), float(v[1])
    if not (v1 > 0.0 and v2 > 0.0 and math.isfinite(v1) and math.isfinite(v2)):
        raise ValueError(f"{name} must have strictly positive finite entries, got {(v1, v2)}")
    return v1, v2


def _require_nonzero(u, name: str = "u") -> tuple[float, float]:
    u1, u2 = float(u[0]), float(u[1])
    if not (math.isfinite(u1) and math.isfinite(u2)) or (u1 == 0.0 and u2 == 0.0):
        raise ValueError(f"{name} must be a finite non-zero vector, got {(u1, u2)}")
    return u1, u2


def deformed_length(v, t: float) -> tuple[float, float]:
    """f(t) = |d^t v| together with h(t) = e^{2t} v1^2 - e^{-2t} v2^2."""
    v1, v2 = _require_quadrant(v)
    a = math.exp(t) * v1
    b = math.exp(-t) * v2
    return math.hypot(a, b), a * a - b * b


def length_derivatives(v, t: float) -> tuple[float, float]:
    """First and second derivatives of t -> |d^t v|.

    f' = h/f equals |V| cos(2 arg V) and f'' = f + 4 v1^2 v2^2 / f^3 equals
    |V| (1 + sin^2(2 arg V)) for V = d^t v; both are evaluated from the
    first closed form.
    """
    v1, v2 = _require_quadrant(v)
    f, h = deformed_length(v, t)
    fp = h / f
    fpp = f + 4.0 * (v1 * v1) * (v2 * v2) / (f * f * f)
    return fp, fpp


def min_time(v) -> float:
    """Flow time of the global length minimum: log(v2/v1)/2."""
    v1, v2 = _require_quadrant(v)
    return 0.5 * math.log(v2 / v1)


@dataclass(frozen=True)
class PairSeparation:
    """Zero structure of f_v - f_w for first-quadrant vectors v != w."""

    v: tuple[float, float]
    w: tuple[float, float]
    kind: str
    zero_time: float | None


def pair_zero(v, w) -> PairSeparation:
    """Classify f_v - f_w and return its unique zero time when one exists.

    A zero exists exactly when one vector dominates the other in the first
    coordinate and is dominated in the second; it sits at
    log((v2^2 - w2^2) / (w1^2 - v1^2)) / 4.  Coordinate coincidences within
    1e-12 relative are the boundary case with no finite zero.
    """
    v1, v2 = _require_quadrant(v, "v")
    w1, w2 = _require_quadrant(w, "w")
    if v1 == w1 and v2 == w2:
        raise ValueError("pair_zero needs v != w")
    d1 = w1 - v1
    d2 = v2 - w2
    scale1 = max(v1, w1)
    scale2 = max(v2, w2)
    if abs(d1) <= DEGENERATE_TOL * scale1 or abs(d2) <= DEGENERATE_TOL * scale2:
        return PairSeparation(v=(v1, v2), w=(w1, w2), kind=KIND_NO_ZERO, zero_time=None)
    if d1 > 0.0 and d2 > 0.0:
        kind = KIND_DECREASING
    elif d1 < 0.0 and d2 < 0.0:
        kind = KIND_INCREASING
    else:
        return PairSeparation(v=(v1, v2), w=(w1, w2), kind=KIND_NO_ZERO, zero_time=None)
    r = 0.25 * math.log((v2 * v2 - w2 * w2) / (w1 * w1 - v1 * v1))
    return PairSeparation(v=(v1, v2), w=(w1, w2), kind=kind, zero_time=r)


def pair_difference(v, w, t: float) -> float:
    """f_v(t) - f_w(t)."""
    return deformed_length(v, t)[0] - deformed_length(w, t)[0]


def length_growth_rate(u) -> float:
    """d/ds |d^s u| at s = 0, i.e. (u1^2 - u2^2)/|u|, for any non-zero u."""
    u1, u2 = _require_nonzero(u)
    return (u1 * u1 - u2 * u2) / math.hypot(u1, u2)


def shear_rate(u) -> float:
    """2 u1 u2 / |u| for any non-zero u."""
    u1, u2 = _require_nonzero(u)
    return 2.0 * u1 * u2 / math.hypot(u1, u2)


def linearize(u, s: float) -> tuple[float, float]:
    """First-order prediction of |d^s u| with a guaranteed error bound.

    Returns (|u| + rate * s, 42 s^2 |u|); the true flowed length differs
    from the prediction by at most the bound for 0 <= s < log(42).
    """
    u1, u2 = _require_nonzero(u)
    if s < 0.0:
        raise ValueError(f"need s >= 0, got {s}")
    norm = math.hypot(u1, u2)
    approx = norm + length_growth_rate(u) * s
    bound = LINEARIZE_CONSTANT * s * s * norm
    return approx, bound


def flowed_norm(u, s: float) -> float:
    """|d^s u| for any vector u."""
    u1, u2 = float(u[0]), float(u[1])
    return math.hypot(math.exp(s) * u1, math.exp(-s) * u2)


def pair_amplitude(v, w) -> float:
    """Oscillation amplitude of a holonomy pair under the rotated flow.

    A(v, w) >= 0 with A^2 = (rate(v) - |w|)^2 + shear(v)^2; it vanishes only
    when the first-order length responses of v and w cannot be separated.
    """
    _require_nonzero(v, "v")
    w1, w2 = _require_nonzero(w, "w")
    da = length_growth_rate(v) - math.hypot(w1, w2)
    db = shear_rate(v)
    return math.hypot(da, db)
