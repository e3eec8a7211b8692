"""Complex-valued multiplicative arithmetic on phase-tracked logarithms.

A nonzero complex number y is stored as ``LogValue(log_mag, arg)`` with
y = exp(log_mag + i*arg).  The phase ``arg`` is kept unwrapped (never reduced
mod 2*pi), so a trajectory that crosses the negative real axis keeps a
continuous phase instead of jumping branches.  Multiplicative products and
powers are then field-wise linear, which is what lets a solver step be a
plain linear combination with no intermediate exponentials.

The value 0+0i has no logarithm; every constructor raises DomainError for it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LogValue:
    """log|y| and unwrapped phase of a nonzero complex number y."""

    log_mag: float
    arg: float

    def __post_init__(self):
        if not (math.isfinite(self.log_mag) and math.isfinite(self.arg)):
            raise DomainError(
                f"non-finite log representation ({self.log_mag}, {self.arg})"
            )

    @property
    def magnitude(self) -> float:
        """|y| = exp(log_mag)."""
        return math.exp(self.log_mag)

    def log(self) -> complex:
        """The tracked branch of log y, as log_mag + i*arg."""
        return complex(self.log_mag, self.arg)

    def to_complex(self) -> complex:
        """Materialize the represented value.  Loses the phase winding."""
        return cmath.exp(complex(self.log_mag, self.arg))


ONE = LogValue(0.0, 0.0)


def from_log(w: complex) -> LogValue:
    """The value exp(w), kept in log coordinates (log_mag=Re w, arg=Im w).

    This is the natural constructor for right-hand sides of the form
    f = exp(expr): the exponent is used directly, so no branch is cut and
    nothing can overflow.
    """
    w = complex(w)
    return LogValue(w.real, w.imag)


def from_complex(z: complex, hint: LogValue | None = None) -> LogValue:
    """Lift a nonzero complex number to log coordinates.

    With ``hint`` (typically the previous state on a trajectory) the phase
    branch nearest ``hint.arg`` is chosen; without it, the principal branch
    (-pi, pi].  Raises DomainError for 0+0i and non-finite input.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("0+0i has no multiplicative representation")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite value {z!r}")
    arg = cmath.phase(z)
    if hint is not None:
        arg += TWO_PI * round((hint.arg - arg) / TWO_PI)
    return LogValue(math.log(abs(z)), arg)


def mpow(y: LogValue, h: float) -> LogValue:
    """y**h under the tracked branch: both log fields scale by h."""
    return LogValue(h * y.log_mag, h * y.arg)


def mmul(a: LogValue, b: LogValue) -> LogValue:
    """a*b: log fields add."""
    return LogValue(a.log_mag + b.log_mag, a.arg + b.arg)


def mdiv(a: LogValue, b: LogValue) -> LogValue:
    """a/b: log fields subtract."""
    return LogValue(a.log_mag - b.log_mag, a.arg - b.arg)


def ordinary_to_mult_rhs(
    g: Callable[[float, complex], complex], x: float, y: LogValue
) -> LogValue:
    """Multiplicative RHS value exp(g(x,y)/y) from an ordinary RHS g.

    This is the f = exp(g/y) correspondence between y' = g(x,y) and
    y* = f(x,y).  Raises DomainError when g is not evaluable or not finite.
    """
    yc = y.to_complex()
    try:
        w = complex(g(x, yc)) / yc
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise DomainError(f"ordinary rhs failed at x={x:.17g}: {exc}", x=x) from exc
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError(f"ordinary rhs non-finite at x={x:.17g}", x=x)
    return from_log(w)


def mult_to_ordinary_state(y: LogValue, ystar: LogValue) -> tuple[complex, complex]:
    """Handover data (y, y') from the state and its multiplicative derivative.

    Uses y' = y * log(y*) with the tracked branch of the logarithm.
    """
    yc = y.to_complex()
    return yc, yc * ystar.log()


def numeric_star_derivative(
    fn: Callable[[float], complex], x: float, h: float
) -> LogValue:
    """Finite-ratio estimate (fn(x+h)/fn(x))**(1/h) of the multiplicative
    derivative of a scalar function.

    First-order accurate in h; used as an independent oracle against solver
    output.  Raises DomainError when either sample vanishes.
    """
    if h == 0:
        raise ValueError("h must be nonzero")
    base = from_complex(fn(x))
    ratio = mdiv(from_complex(fn(x + h), hint=base), base)
    return mpow(ratio, 1.0 / h)
