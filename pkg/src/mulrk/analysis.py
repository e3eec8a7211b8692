"""Multiplicative error metrics, convergence-order estimation, growth-bound
checks, and the wall-time-versus-error benchmark sweep.

The canonical error of a sample eta against the exact value y is the ratio
e = eta/y kept in log coordinates.  Two scalar summaries are derived from
it: log_error = |log eta - log y| (complex modulus, the multiplicative-native
metric) and rel_error = |eta/y - 1| (a plain fraction).  They agree to second
order for small errors.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateError, DomainError, MulrkError
from .geomcalc import LogValue, from_complex, mdiv, mpow
from .solvers import MIvp, State, Trajectory, mrk2_step, mrk4_step, solve
from .tableau import MButcherTableau


@dataclass(frozen=True)
class ErrorRecord:
    """Error of one trajectory sample against the exact solution."""

    x: float
    eta: LogValue
    y_exact: complex
    e: LogValue  # eta / y_exact, nearest-branch
    log_error: float  # |log eta - log y|
    rel_error: float  # |eta/y - 1|
    h: float  # step size of the producing run


@dataclass(frozen=True)
class BenchSample:
    """One (method, h) cell of a timing sweep."""

    problem: str
    method: str
    h: float
    steps: int
    wall_time: float  # median of repeats, seconds
    final_rel_error: float
    error: str | None = None  # failure message when the run did not finish


def _record(x: float, eta: LogValue, y: complex, h: float) -> ErrorRecord:
    if y == 0:
        raise DomainError(f"exact solution vanishes at x={x:.17g}", x=x)
    e = mdiv(eta, from_complex(y, hint=eta))
    log_error = math.hypot(e.log_mag, e.arg)
    rel_error = abs(eta.to_complex() / y - 1.0)
    return ErrorRecord(x, eta, y, e, log_error, rel_error, h)


def global_error(
    traj: Trajectory, exact: Callable[[float], complex], component: int = 0
) -> list[ErrorRecord]:
    """Per-sample error records e(x;h) = eta(x;h)/y(x) for one component.

    ``exact`` may return a scalar or an array; DomainError where it vanishes.
    """
    out = []
    for x, state in zip(traj.xs, traj.states):
        y = np.atleast_1d(np.asarray(exact(x), dtype=complex))[component]
        out.append(_record(x, state[component], complex(y), traj.h))
    return out


def local_error(
    p: MIvp,
    x: float,
    y: State,
    h: float,
    t: MButcherTableau,
    ref_substeps: int = 256,
) -> State:
    """Per-component one-step error ratio tau = Delta/Phi at (x, y).

    Delta is the ratio function of a reference solution (mrk4 at
    h/ref_substeps through (x,y)); Phi the ratio function of one step of the
    scheme described by ``t`` (two stages -> mrk2, four -> mrk4).  A perfect
    step gives tau = 1, i.e. log fields 0.
    """
    if ref_substeps < 64:
        raise ValueError(f"ref_substeps must be >= 64, got {ref_substeps}")
    probe = MIvp(name=f"{p.name}[local]", dim=p.dim, f_mult=p.f_mult, x0=x, y0=y)
    z_ref = solve(probe, "mrk4", h / ref_substeps, x + h).final_state()
    step = mrk2_step if t.stages == 2 else mrk4_step
    y_step = step(probe, x, y, h, t)
    inv_h = 1.0 / h
    delta = tuple(mpow(mdiv(zr, yj), inv_h) for zr, yj in zip(z_ref, y))
    phi = tuple(mpow(mdiv(ys, yj), inv_h) for ys, yj in zip(y_step, y))
    return tuple(mdiv(d, f) for d, f in zip(delta, phi))


ORDER_FLOOR = 1e-14  # below this the errors are rounding noise


def estimate_order(
    p: MIvp,
    method: str,
    h0: float,
    levels: int,
    x_end: float,
    component: int = 0,
) -> float:
    """Empirical convergence order from runs at h0, h0/2, ..., h0/2^(levels-1).

    Least-squares slope of log(log_error at x_end) against log h.  Raises
    DegenerateError when any level is at the rounding floor (the method is
    exact on the problem; no order is observable).
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    if p.exact is None:
        raise ValueError(f"problem {p.name!r} has no exact solution")
    hs, errs = [], []
    for k in range(levels):
        h = h0 / 2**k
        traj = solve(p, method, h, x_end)
        final = global_error(traj, p.exact, component)[-1]
        if final.log_error < ORDER_FLOOR:
            raise DegenerateError(
                f"log_error {final.log_error:.3g} at h={h:.17g} is below the "
                "rounding floor; convergence order is undefined"
            )
        hs.append(h)
        errs.append(final.log_error)
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    return float(slope)


def _lemma1_args(delta: float, B: float, n: int) -> float:
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if B < 0:
        raise ValueError(f"B must be >= 0, got {B}")
    return -math.inf if B == 0 else math.log(B)


def lemma1_log_bound(log_xi0: float, delta: float, B: float, n: int) -> float:
    """log of the recursion bound: e^(n*delta)*log|xi0| + (e^(n*delta)-1)/delta*log B.

    Note the exponential form over-relaxes (1+delta)^n to e^(n*delta), which
    keeps it an upper bound only while |xi0| >= 1 and B >= 1 (as in its use
    on error sequences, where xi0 = 1 and B = e^(N h^(p+1))).  For bases
    below 1 use lemma1_log_bound_exact, which is tight for every B >= 0.
    """
    log_b = _lemma1_args(delta, B, n)
    if n == 0:
        return log_xi0
    growth = math.exp(n * delta)
    return growth * log_xi0 + (growth - 1.0) / delta * log_b


def lemma1_log_bound_exact(log_xi0: float, delta: float, B: float, n: int) -> float:
    """log of the tight product bound (1+delta)^n form, valid for all B >= 0:
    any sequence with |xi_{i+1}| <= |xi_i|^(1+delta)*B stays at or below it."""
    log_b = _lemma1_args(delta, B, n)
    if n == 0:
        return log_xi0
    growth = (1.0 + delta) ** n
    return growth * log_xi0 + (growth - 1.0) / delta * log_b


def lemma1_bound(xi0: float, delta: float, B: float, n: int) -> float:
    """Bound |xi0|^(e^(n*delta)) * B^((e^(n*delta)-1)/delta) on any sequence
    with |xi_{i+1}| <= |xi_i|^(1+delta) * B.

    Overflows to inf (and underflows to 0) like the bound itself; use
    lemma1_log_bound to compare sequences that leave float range.
    """
    xi0 = abs(xi0)
    if xi0 == 0:
        return 0.0 if n > 0 or xi0 == 0 else xi0
    lb = lemma1_log_bound(math.log(xi0), delta, B, n)
    if lb == -math.inf:
        return 0.0
    try:
        return math.exp(lb)
    except OverflowError:
        return math.inf


def check_theorem_bound(
    records: Sequence[ErrorRecord], M: float, N: float, p: float, x0: float
) -> bool:
    """True when every record satisfies
    |e(x;h)| <= exp(|h|^p * N * (e^(M|x-x0|)-1)/M).

    The constants are supplied (asserted or fitted); this only checks
    consistency, it proves nothing.  N=0 is allowed and fails whenever any
    error is nonzero.
    """
    if not (M > 0 and N >= 0 and p > 0):
        raise ValueError("M and p must be positive, N nonnegative")
    for r in records:
        bound_log = abs(r.h) ** p * N * (math.exp(M * abs(r.x - x0)) - 1.0) / M
        if r.e.log_mag > bound_log:
            return False
    return True


def fit_theorem_constants(
    records: Sequence[ErrorRecord], p: float, x0: float, M: float = 1.0, margin: float = 1.25
) -> tuple[float, float]:
    """Smallest N (times a safety margin for higher-order terms) making the
    growth bound hold on the given records, for a caller-chosen M."""
    n_min = 0.0
    for r in records:
        denom = abs(r.h) ** p * (math.exp(M * abs(r.x - x0)) - 1.0) / M
        if denom > 0:
            n_min = max(n_min, r.e.log_mag / denom)
    if n_min == 0.0:
        n_min = ORDER_FLOOR
    return M, n_min * margin


def _timed_sample(
    spec_problem: str,
    p: MIvp,
    method: str,
    h: float,
    x_end: float,
    repeats: int,
    component: int,
) -> BenchSample:
    steps = max(1, round((x_end - p.x0) / h))
    try:
        solve(p, method, h, x_end)  # warm-up, discarded
        times = []
        traj = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            traj = solve(p, method, h, x_end)
            times.append(time.perf_counter() - t0)
        final = global_error(traj, p.exact, component)[-1]
        return BenchSample(
            spec_problem, method, h, steps, float(np.median(times)), final.rel_error
        )
    except MulrkError as exc:
        return BenchSample(spec_problem, method, h, steps, math.nan, math.nan, error=str(exc))


def time_error_sweep(
    p: MIvp,
    methods: Sequence[str],
    h_list: Sequence[float],
    x_end: float,
    repeats: int = 5,
    component: int = 0,
    max_workers: int = 1,
) -> list[BenchSample]:
    """Median wall time and final-point error per (method, h) cell.

    One warm-up run per cell is discarded; the repeats of a cell always run
    sequentially on one thread so their timings stay comparable.  Cells may
    run concurrently (max_workers > 1), which shortens the sweep but lets
    cells contend for the interpreter; keep the default for clean timings.
    Failed runs become samples with ``error`` set instead of aborting.
    Output is sorted by method, then h descending.
    """
    if repeats < 3:
        raise ValueError(f"repeats must be >= 3, got {repeats}")
    if p.exact is None:
        raise ValueError(f"problem {p.name!r} has no exact solution")
    cells = [(m, h) for m in methods for h in h_list]
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            samples = list(
                pool.map(
                    lambda c: _timed_sample(p.name, p, c[0], c[1], x_end, repeats, component),
                    cells,
                )
            )
    else:
        samples = [
            _timed_sample(p.name, p, m, h, x_end, repeats, component) for m, h in cells
        ]
    samples.sort(key=lambda s: (s.method, -s.h))
    return samples


def bench_csv(samples: Sequence[BenchSample]) -> str:
    """CSV export of a sweep, %.17g numbers, LF line endings."""
    lines = ["problem,method,h,steps,wall_time_s,final_rel_error"]
    for s in samples:
        lines.append(
            f"{s.problem},{s.method},{s.h:.17g},{s.steps},"
            f"{s.wall_time:.17g},{s.final_rel_error:.17g}"
        )
    return "\n".join(lines) + "\n"
