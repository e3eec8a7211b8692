import cmath
import math

import numpy as np
import pytest

import rk_oracle as oracle
from mulrk.errors import DomainError, ShapeError, StepCountError
from mulrk.geomcalc import LogValue, from_complex, from_log, numeric_star_derivative
from mulrk.problems import build
from mulrk.solvers import (
    MIvp,
    grid_steps,
    mrk2_step,
    mrk4_step,
    reduce_higher_order,
    rk4_step,
    solve,
)
from mulrk.tableau import MButcherTableau, classical_mrk4


def constant_problem(value=math.e):
    w = cmath.log(value)
    return MIvp(
        name="const",
        dim=1,
        f_mult=lambda x, y: (from_log(w),),
        x0=0.0,
        y0=(LogValue(0.0, 0.0),),
        g_ord=lambda x, yc: yc * w,
        exact=lambda x: np.array([cmath.exp(w * x)]),
    )


def test_mrk2_step_constant_rhs():
    p = constant_problem()
    y1 = mrk2_step(p, 0.0, p.y0, 0.5)
    assert y1[0].to_complex() == pytest.approx(math.exp(0.5), rel=1e-15)


def test_mrk2_step_square_root_problem():
    # two-stage hand formula with the equal-weight endpoint tableau:
    # f0 = e^(1/2), f1 = f(0.1, f0^0.1), y1 = f0^0.05 * f1^0.05
    p = build("sqrt").mivp
    y1 = mrk2_step(p, 0.0, p.y0, 0.1)[0].to_complex()
    w0 = 0.5
    w1 = 1.0 / (2.0 * math.exp(2 * 0.1 * w0))
    assert y1 == pytest.approx(math.exp(0.05 * (w0 + w1)), rel=1e-14)
    assert y1.real == pytest.approx(1.0487730, abs=5e-7)


def test_mrk2_step_zero_h_is_identity():
    p = build("sqrt").mivp
    assert mrk2_step(p, 0.0, p.y0, 0.0) == p.y0


def test_mrk4_step_constant_rhs():
    p = constant_problem()
    y1 = mrk4_step(p, 0.0, p.y0, 0.5)
    assert y1[0].to_complex() == pytest.approx(math.exp(0.5), rel=1e-15)


def test_mrk4_step_square_root_problem_against_oracle():
    p = build("sqrt").mivp
    y1 = mrk4_step(p, 0.0, p.y0, 0.6)
    z_ref = oracle.rk4_log(oracle.w_sqrt, 0.0, (0j,), 0.6, 1)[-1][0]
    assert y1[0].log_mag == pytest.approx(z_ref.real, abs=1e-14)
    assert z_ref.real == pytest.approx(0.2350795, abs=5e-8)
    assert y1[0].to_complex().real == pytest.approx(1.2650094, abs=5e-8)


def test_mrk4_step_second_order_system_one_step():
    p = build("second_order").mivp
    y1 = mrk4_step(p, 1.0, p.y0, 0.25)
    assert y1[0].to_complex().real == pytest.approx(7.62360992, rel=1e-9)


def test_mrk4_rejects_wrong_tableau():
    p = constant_problem()
    with pytest.raises(ShapeError):
        mrk4_step(p, 0.0, p.y0, 0.1, t=MButcherTableau((0.0, 1.0), ((), (1.0,)), (0.5, 0.5)))


def test_rk4_step_square_root_problem():
    p = build("sqrt").mivp
    y1 = rk4_step(p, 0.0, p.y0_complex(), 0.6)
    ref = oracle.rk4_ordinary(oracle.g_sqrt, 0.0, (1 + 0j,), 0.6, 1)[-1][0]
    assert y1[0] == pytest.approx(ref, abs=1e-15)
    assert y1[0].real == pytest.approx(1.2649317, abs=5e-8)


def test_rk4_step_zero_rhs_and_exponential():
    p = MIvp("flat", 1, lambda x, y: (LogValue(0.0, 0.0),), 0.0,
             (from_complex(3.0),), g_ord=lambda x, yc: np.zeros(1, dtype=complex))
    y0 = p.y0_complex()
    assert rk4_step(p, 0.0, y0, 0.7)[0] == y0[0]
    growth = MIvp("exp", 1, lambda x, y: (from_log(1.0),), 0.0,
                  (LogValue(0.0, 0.0),), g_ord=lambda x, yc: yc)
    y1 = rk4_step(growth, 0.0, growth.y0_complex(), 0.1)
    assert y1[0].real == pytest.approx(1.1051708, abs=1e-7)


def test_rk4_step_requires_ordinary_form():
    p = MIvp("no-g", 1, lambda x, y: (LogValue(0.0, 0.0),), 0.0, (LogValue(0.0, 0.0),))
    with pytest.raises(ValueError):
        rk4_step(p, 0.0, p.y0_complex(), 0.1)


def test_grid_steps():
    assert grid_steps(0.0, 3.0, 0.3) == 10
    assert grid_steps(1.0, 1.75, 0.25) == 3
    with pytest.raises(StepCountError):
        grid_steps(0.0, 1.0, 0.3)
    with pytest.raises(StepCountError):
        grid_steps(0.0, 1.0, -0.1)
    with pytest.raises(StepCountError):
        grid_steps(0.0, -1.0, 0.5)


def test_solve_square_root_problem():
    p = build("sqrt").mivp
    traj = solve(p, "mrk4", 0.3, 3.0)
    assert len(traj) == 11
    assert traj.xs[0] == 0.0 and traj.states[0] == p.y0
    y_end = traj.final_state()[0].to_complex()
    assert abs(y_end / 2.0 - 1.0) < 5e-6


def test_solve_second_order_matches_reference_table():
    p = build("second_order").mivp
    traj = solve(p, "mrk4", 0.25, 1.75)
    vals = traj.values()[:, 0].real
    # the 8-decimal reference values, and the closed form to full precision
    for i, expected in ((1, 7.62360992), (2, 13.80457419), (3, 26.60901319)):
        assert vals[i] == pytest.approx(expected, rel=1e-9)
        x = 1.0 + 0.25 * i
        assert vals[i] == pytest.approx(math.exp(x * x / 2.0 + x), rel=1e-12)


def test_solve_rk4_on_newtonian_second_order_twin():
    spec = build("second_order")
    traj = solve(spec.ordinary, "rk4", 0.25, 1.25)
    assert traj.values()[-1, 0].real == pytest.approx(7.61823131, rel=1e-8)


@pytest.mark.parametrize(
    "problem,h,x_end,w",
    [
        ("sqrt", 0.3, 3.0, oracle.w_sqrt),
        ("baranyi", 1.0, 25.0, oracle.make_w_baranyi()),
        ("second_order", 0.25, 1.75, oracle.w_second_order),
    ],
)
def test_log_space_equivalence_with_oracle(problem, h, x_end, w):
    # the multiplicative trajectory, read in log coordinates, is a classical
    # RK4 trajectory of z' = log f(x, e^z)
    spec = build(problem)
    p = spec.mivp
    traj = solve(p, "mrk4", h, x_end)
    z0 = tuple(v.log() for v in p.y0)
    ref = oracle.rk4_log(w, p.x0, z0, h, len(traj) - 1)
    for got, want in zip(traj.logs(), ref):
        for j in range(p.dim):
            assert abs(got[j] - want[j]) <= 1e-12


def test_exact_when_log_solution_is_low_degree_polynomial():
    # f = exp(cubic in x): z(x) is a quartic, which classical RK4 integrates
    # exactly, so the multiplicative run is exact to rounding
    poly = lambda x: 1.0 + 0.5 * x - 0.25 * x * x + 0.125 * x**3
    anti = lambda x: x + 0.25 * x * x - x**3 / 12.0 + x**4 / 32.0
    p = MIvp("poly", 1, lambda x, y: (from_log(poly(x)),), 0.0, (LogValue(0.0, 0.0),))
    traj = solve(p, "mrk4", 0.25, 2.0)
    for x, state in zip(traj.xs, traj.states):
        assert abs(state[0].log_mag - anti(x)) <= 1e-12

    traj = solve(build("second_order").mivp, "mrk4", 0.25, 1.75)
    for x, state in zip(traj.xs, traj.states):
        assert abs(state[0].log_mag - (x * x / 2.0 + x)) <= 1e-12


def test_determinism_bitwise():
    p = build("baranyi").mivp
    a = solve(p, "mrk4", 0.5, 25.0).logs()
    b = solve(p, "mrk4", 0.5, 25.0).logs()
    assert np.array_equal(a, b)


def test_y_independent_rhs_ignores_stage_exponents():
    # same nodes and weights, different q1..q5: identical runs when f has no y
    p = MIvp("xonly", 1, lambda x, y: (from_log(cmath.sin(x)),), 0.0, (LogValue(0.0, 0.0),))
    alt = MButcherTableau(
        nodes=(0.0, 0.5, 0.5, 1.0),
        exponents=((), (0.5,), (0.2, 0.3), (0.3, -0.2, 0.9)),
        weights=(1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0),
    )
    a = solve(p, "mrk4", 0.1, 2.0, t=classical_mrk4()).logs()
    b = solve(p, "mrk4", 0.1, 2.0, t=alt).logs()
    assert np.max(np.abs(a - b)) <= 1e-14


def test_solve_unknown_method():
    with pytest.raises(ValueError):
        solve(build("sqrt").mivp, "euler", 0.1, 1.0)


def test_domain_error_carries_failing_x():
    p = build("root_cross").mivp
    with pytest.raises(DomainError) as info:
        solve(p, "mrk4", 0.05, 2.0)
    assert info.value.x is not None
    assert 0.85 < info.value.x < 1.15


def test_rk4_lift_rejects_exact_zero_state():
    # y' = -1 from 1 with h=1 lands exactly on 0.0 after one step
    p = MIvp("to-zero", 1, lambda x, y: (from_log(-1.0 / y[0].to_complex()),), 0.0,
             (LogValue(0.0, 0.0),), g_ord=lambda x, yc: np.array([-1.0 + 0j]))
    with pytest.raises(DomainError):
        solve(p, "rk4", 1.0, 2.0)


def test_rk4_lift_keeps_phase_continuous_across_sign_change():
    p = build("root_cross").mivp
    traj = solve(p, "rk4", 0.05, 2.0)
    args = [s[0].arg for s in traj.states]
    diffs = np.abs(np.diff(args))
    assert np.all(diffs <= math.pi + 1e-12)
    assert args[0] == 0.0 and args[-1] == pytest.approx(math.pi)


def test_phase_continuity_on_winding_trajectory():
    # y* = exp(i): the phase advances linearly and winds past pi unreduced
    p = MIvp("spiral", 1, lambda x, y: (from_log(1j),), 0.0, (LogValue(0.0, 0.0),))
    traj = solve(p, "mrk4", 0.25, 10.0)
    args = [s[0].arg for s in traj.states]
    assert args[-1] == pytest.approx(10.0, rel=1e-12)  # beyond 3*pi, no reduction
    assert np.all(np.abs(np.diff(args)) < math.pi)


def test_reduce_higher_order_constant_star_derivative():
    p = reduce_higher_order(
        f=lambda x, y0, y1: LogValue(1.0, 0.0),
        ics=(math.exp(1.5), math.exp(2.0)),
        x0=1.0,
    )
    traj = solve(p, "mrk4", 0.25, 1.75)
    for x, state in zip(traj.xs, traj.states):
        assert state[0].to_complex().real == pytest.approx(
            math.exp(x * x / 2.0 + x), rel=1e-12
        )


def test_reduce_higher_order_trivial_problem():
    p = reduce_higher_order(
        f=lambda x, y0, y1: LogValue(0.0, 0.0), ics=(1.0, 1.0), x0=0.0
    )
    traj = solve(p, "mrk4", 0.5, 3.0)
    for state in traj.states:
        assert state[0].log_mag == 0.0 and state[0].arg == 0.0


def test_reduce_higher_order_rejot_zero_ics():
    with pytest.raises(DomainError):
        reduce_higher_order(f=lambda x, y0, y1: LogValue(0.0, 0.0), ics=(0.0, 1.0))


def test_reduce_higher_order_component1_is_star_derivative_of_component0():
    p = build("second_order").mivp
    h = 1e-4
    traj = solve(p, "mrk4", h, 1.0 + 200 * h)
    for i in (0, 50, 100, 150):
        ratio = (traj.states[i + 1][0].log() - traj.states[i][0].log()) / h
        y1 = traj.states[i][1].log()
        assert abs(ratio - y1) <= 1e-4


def test_mivp_shape_validation():
    with pytest.raises(ShapeError):
        MIvp("bad", 2, lambda x, y: y, 0.0, (LogValue(0.0, 0.0),))
    with pytest.raises(ShapeError):
        MIvp("bad", 0, lambda x, y: y, 0.0, ())
