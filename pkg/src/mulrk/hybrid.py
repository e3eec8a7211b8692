"""Root bypass: ordinary stepping across zeros of the solution.

The multiplicative derivative does not exist at a root of y, so a
multiplicative run toward one diverges.  This controller watches for the
approach (amplitude band around zero, plus a blow-up guard on stage values),
hands the state to classical RK4 on the ordinary form for the crossing, and
hands back once the solution has left the band with hysteresis.  The grid
and the step size never change; only the stepping rule per interval does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnrecoverableZero
from .geomcalc import LogValue, from_complex
from .solvers import (
    MIvp,
    State,
    StepMeta,
    Trajectory,
    eval_mult_rhs,
    grid_steps,
    mrk4_step,
    ordinary_form,
    rk4_core,
)
from .tableau import MButcherTableau


@dataclass(frozen=True)
class HybridConfig:
    """Band and hysteresis settings for the method switch.

    zero_threshold: hand over when any |y_j| drops below it; None means
        0.1 * min_j |y0_j|, resolved per run.
    min_ordinary_steps: ordinary steps to take before handing back.
    rearm_factor: hand back only once every |y_j| exceeds
        rearm_factor * zero_threshold (must be > 1 so the switch cannot
        thrash at the band edge).
    """

    zero_threshold: float | None = None
    min_ordinary_steps: int = 2
    rearm_factor: float = 1.5

    def __post_init__(self):
        if self.zero_threshold is not None and not self.zero_threshold > 0:
            raise ValueError(f"zero_threshold must be > 0, got {self.zero_threshold}")
        if self.min_ordinary_steps < 1:
            raise ValueError(f"min_ordinary_steps must be >= 1, got {self.min_ordinary_steps}")
        if not self.rearm_factor > 1:
            raise ValueError(f"rearm_factor must be > 1, got {self.rearm_factor}")

    def resolve_eps(self, y0: State) -> float:
        if self.zero_threshold is not None:
            return self.zero_threshold
        return 0.1 * min(v.magnitude for v in y0)


def detect_handover(y: State, f_val: State | None, eps: float) -> bool:
    """True when a multiplicative step from y should not be attempted.

    Triggers on any component with |y| < eps, on a failed stage evaluation
    (f_val None), or on a stage value with |log f| > 1/eps^2 (the derivative
    blowing up faster than the band accounts for).
    """
    if any(v.magnitude < eps for v in y):
        return True
    if f_val is None:
        return True
    limit = 1.0 / (eps * eps)
    return any(math.hypot(v.log_mag, v.arg) > limit for v in f_val)


def solve_hybrid(
    p: MIvp,
    h: float,
    x_end: float,
    cfg: HybridConfig | None = None,
    t: MButcherTableau | None = None,
) -> Trajectory:
    """Integrate with mrk4, bypassing roots with ordinary RK4 steps.

    Away from the band the result is bitwise identical to solve(p, "mrk4").
    Ordinary samples are lifted back to log coordinates with branch
    continuity; a sample of exactly 0+0i cannot be represented and raises
    UnrecoverableZero.
    """
    cfg = cfg or HybridConfig()
    n = grid_steps(p.x0, x_end, h)
    xs = [p.x0 + i * h for i in range(n + 1)]
    eps = cfg.resolve_eps(p.y0)
    g = ordinary_form(p)
    native_g = p.g_ord is not None

    states: list[State] = [p.y0]
    meta: list[StepMeta] = [StepMeta("mrk4")]
    mode = "mrk4"
    y_log = p.y0
    y_ord: np.ndarray | None = None
    ordinary_run = 0

    for i in range(n):
        x = xs[i]
        if mode == "mrk4":
            try:
                f0 = eval_mult_rhs(p, x, y_log)
            except DomainError:
                f0 = None
            stepped = False
            if not detect_handover(y_log, f0, eps):
                try:
                    y_log = mrk4_step(p, x, y_log, h, t)
                    stepped = True
                except DomainError:
                    pass  # stage blew up mid-step: redo this interval below
            if stepped:
                states.append(y_log)
                meta.append(StepMeta("mrk4"))
                continue
            mode = "rk4"
            y_ord = np.array([v.to_complex() for v in y_log])
            ordinary_run = 0

        y_ord = rk4_core(g, x, y_ord, h)
        ordinary_run += 1
        if any(c == 0 for c in y_ord):
            raise UnrecoverableZero(
                f"solution is exactly 0+0i at x={xs[i + 1]:.17g}"
                + ("" if native_g else " and no ordinary form was given")
            )
        y_log = tuple(from_complex(c, hint=prev) for c, prev in zip(y_ord, states[-1]))
        states.append(y_log)
        meta.append(StepMeta("rk4", handover=(ordinary_run == 1)))
        if ordinary_run >= cfg.min_ordinary_steps and all(
            abs(c) > cfg.rearm_factor * eps for c in y_ord
        ):
            mode = "mrk4"

    return Trajectory(p.name, h, xs, states, meta)
