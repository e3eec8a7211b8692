"""Fixed-step solvers for multiplicative initial value problems y* = f(x,y).

States are tuples of LogValue, one per component.  A multiplicative RK step
is computed entirely in log coordinates: with z = log y (tracked branch), it
is the classical explicit RK update on z' = log f(x, e^z), so every stage
combination is a linear combination of log pairs and nothing is
exponentiated between stages.  The classical RK4 baseline integrates the
ordinary form y' = g(x,y) on complex states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ShapeError, StepCountError
from .geomcalc import LogValue, from_complex
from .tableau import MButcherTableau, classical_mrk2, classical_mrk4

State = tuple[LogValue, ...]

MRHS = Callable[[float, State], Sequence[LogValue]]
ORHS = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class MIvp:
    """A multiplicative IVP y* = f(x,y), y(x0) = y0.

    ``g_ord`` is the optional ordinary form y' = g(x,y) on the same state
    vector (consistent via f = exp(g/y)); ``exact`` the closed-form solution
    where one is known.
    """

    name: str
    dim: int
    f_mult: MRHS
    x0: float
    y0: State
    g_ord: ORHS | None = None
    exact: Callable[[float], np.ndarray] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ShapeError(f"dim must be >= 1, got {self.dim}")
        self.y0 = tuple(self.y0)
        if len(self.y0) != self.dim:
            raise ShapeError(f"y0 has {len(self.y0)} components, expected {self.dim}")
        for v in self.y0:
            if not isinstance(v, LogValue):
                raise ShapeError("y0 components must be LogValue")

    def y0_complex(self) -> np.ndarray:
        return np.array([v.to_complex() for v in self.y0], dtype=complex)

    def exact_at(self, x: float) -> np.ndarray:
        if self.exact is None:
            raise ValueError(f"problem {self.name!r} has no exact solution")
        return np.atleast_1d(np.asarray(self.exact(x), dtype=complex))


@dataclass(frozen=True)
class StepMeta:
    """How a trajectory sample was produced."""

    method: str  # "mrk2" | "mrk4" | "rk4"
    handover: bool = False


@dataclass
class Trajectory:
    """Grid samples of one solver run, in log coordinates.

    ``states[i]`` is the state at ``xs[i]``; ``meta[i]`` tags the method that
    produced it (``meta[0]`` tags the initial condition with the run's
    starting method).
    """

    problem: str
    h: float
    xs: list[float]
    states: list[State]
    meta: list[StepMeta] = field(repr=False)

    def __len__(self) -> int:
        return len(self.xs)

    def values(self) -> np.ndarray:
        """Samples materialized to complex, shape (n_samples, dim)."""
        return np.array([[v.to_complex() for v in s] for s in self.states])

    def logs(self) -> np.ndarray:
        """Log coordinates log_mag + i*arg, shape (n_samples, dim)."""
        return np.array([[v.log() for v in s] for s in self.states])

    def final_state(self) -> State:
        return self.states[-1]

    def method_tags(self) -> list[str]:
        return [m.method for m in self.meta]


def grid_steps(x0: float, x_end: float, h: float) -> int:
    """Number of steps for the fixed grid, or StepCountError if it cannot
    land exactly on x_end."""
    if h <= 0:
        raise StepCountError(f"h must be positive, got {h}")
    ratio = (x_end - x0) / h
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, abs(ratio)):
        raise StepCountError(
            f"(x_end - x0)/h = {ratio!r} is not a positive integer; "
            "choose h dividing the interval"
        )
    return n


def eval_mult_rhs(p: MIvp, x: float, y: State) -> State:
    """Evaluate f with errors normalized to DomainError carrying x."""
    try:
        f = tuple(p.f_mult(x, y))
    except DomainError as exc:
        if exc.x is None:
            exc.x = x
        raise
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise DomainError(f"multiplicative rhs failed at x={x:.17g}: {exc}", x=x) from exc
    if len(f) != p.dim:
        raise ShapeError(f"rhs returned {len(f)} components, expected {p.dim}")
    return f


def _combine(y: State, h: float, coeffs: Sequence[float], stage_values: Sequence[State]) -> State:
    """y * prod_k f_k^(c_k*h), componentwise, in log coordinates."""
    out = []
    for j, yj in enumerate(y):
        lm, ar = yj.log_mag, yj.arg
        for c, f in zip(coeffs, stage_values):
            lm += c * h * f[j].log_mag
            ar += c * h * f[j].arg
        out.append(LogValue(lm, ar))
    return tuple(out)


def _mrk_step(p: MIvp, x: float, y: State, h: float, t: MButcherTableau) -> State:
    fs: list[State] = []
    for i in range(t.stages):
        yi = _combine(y, h, t.exponents[i], fs[: i]) if i else y
        fs.append(eval_mult_rhs(p, x + t.nodes[i] * h, yi))
    return _combine(y, h, t.weights, fs)


def mrk2_step(p: MIvp, x: float, y: State, h: float, t: MButcherTableau | None = None) -> State:
    """One two-stage multiplicative step y * f0^(a*h) * f1^(b*h)."""
    t = t if t is not None else classical_mrk2()
    if t.stages != 2:
        raise ShapeError(f"mrk2 needs a 2-stage tableau, got {t.stages}")
    return _mrk_step(p, x, y, h, t)


def mrk4_step(p: MIvp, x: float, y: State, h: float, t: MButcherTableau | None = None) -> State:
    """One four-stage multiplicative step y * f0^(a*h) ... f3^(d*h)."""
    t = t if t is not None else classical_mrk4()
    if t.stages != 4:
        raise ShapeError(f"mrk4 needs a 4-stage tableau, got {t.stages}")
    return _mrk_step(p, x, y, h, t)


def _eval_ord_rhs(g: ORHS, x: float, y: np.ndarray) -> np.ndarray:
    try:
        k = np.asarray(g(x, y), dtype=complex)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise DomainError(f"ordinary rhs failed at x={x:.17g}: {exc}", x=x) from exc
    if not np.all(np.isfinite(k)):
        raise DomainError(f"ordinary rhs non-finite at x={x:.17g}", x=x)
    return k


def rk4_core(g: ORHS, x: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step on y' = g(x,y) over complex states."""
    k1 = _eval_ord_rhs(g, x, y)
    k2 = _eval_ord_rhs(g, x + h / 2, y + (h / 2) * k1)
    k3 = _eval_ord_rhs(g, x + h / 2, y + (h / 2) * k2)
    k4 = _eval_ord_rhs(g, x + h, y + h * k3)
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_step(p: MIvp, x: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step on the problem's ordinary form."""
    if p.g_ord is None:
        raise ValueError(f"problem {p.name!r} has no ordinary form for rk4")
    return rk4_core(p.g_ord, x, y, h)


def ordinary_form(p: MIvp) -> ORHS:
    """The problem's ordinary RHS, derived as g = y*log f when not given.

    The derived form lifts the complex state on the principal branch; only
    the value of y matters to f for any RHS defined pointwise in y.
    """
    if p.g_ord is not None:
        return p.g_ord

    def g(x: float, yc: np.ndarray) -> np.ndarray:
        y = tuple(from_complex(c) for c in yc)
        f = eval_mult_rhs(p, x, y)
        return np.array([c * fv.log() for c, fv in zip(yc, f)], dtype=complex)

    return g


_STEPPERS = {"mrk2": mrk2_step, "mrk4": mrk4_step}


def solve(
    p: MIvp,
    method: str,
    h: float,
    x_end: float,
    t: MButcherTableau | None = None,
) -> Trajectory:
    """Integrate p from x0 to x_end on the fixed grid with the given method.

    method is one of "mrk2", "mrk4", "rk4".  For "rk4" the ordinary form is
    integrated and the samples are lifted back to log coordinates with
    branch continuity (a zero state cannot be lifted and raises DomainError).
    """
    n = grid_steps(p.x0, x_end, h)
    xs = [p.x0 + i * h for i in range(n + 1)]
    meta = [StepMeta(method)] * (n + 1)

    if method == "rk4":
        y = p.y0_complex()
        states = [p.y0]
        for i in range(n):
            y = rk4_step(p, xs[i], y, h)
            try:
                states.append(
                    tuple(from_complex(c, hint=prev) for c, prev in zip(y, states[-1]))
                )
            except DomainError as exc:
                exc.x = xs[i + 1]
                raise
        return Trajectory(p.name, h, xs, states, meta)

    if method not in _STEPPERS:
        raise ValueError(f"unknown method {method!r}")
    step = _STEPPERS[method]
    y = p.y0
    states = [y]
    for i in range(n):
        y = step(p, xs[i], y, h, t)
        states.append(y)
    return Trajectory(p.name, h, xs, states, meta)


def reduce_higher_order(
    f: Callable[[float, LogValue, LogValue], LogValue],
    ics: tuple[complex | LogValue, complex | LogValue],
    x0: float = 0.0,
    name: str = "second-order",
    exact: Callable[[float], np.ndarray] | None = None,
) -> MIvp:
    """First-order system for y** = f(x, y, y*): state (y, y*) with
    component-0 multiplicative derivative equal to component 1."""
    lifted = tuple(
        v if isinstance(v, LogValue) else from_complex(v) for v in ics
    )

    def rhs(x: float, y: State) -> State:
        return (y[1], f(x, y[0], y[1]))

    def g(x: float, yc: np.ndarray) -> np.ndarray:
        # y0' = y0*log y1 (principal branch), y1' = y1*log f
        y = tuple(from_complex(c) for c in yc)
        fv = f(x, y[0], y[1])
        return np.array([yc[0] * y[1].log(), yc[1] * fv.log()], dtype=complex)

    return MIvp(name=name, dim=2, f_mult=rhs, x0=x0, y0=lifted, g_ord=g, exact=exact)
