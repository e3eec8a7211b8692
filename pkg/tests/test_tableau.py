import json

import numpy as np
import pytest

from mulrk.errors import DomainError, ShapeError
from mulrk.tableau import (
    MButcherTableau,
    classical_mrk2,
    classical_mrk4,
    make_order2,
    validate_order2,
    validate_order4,
)


def test_classical_mrk4_is_valid():
    assert validate_order4(classical_mrk4()) == []


def test_classical_mrk4_moments():
    t = classical_mrk4()
    assert sum(t.weights) == pytest.approx(1.0, abs=1e-15)
    assert sum(w * c for w, c in zip(t.weights, t.nodes)) == pytest.approx(0.5, abs=1e-15)
    assert sum(w * c * c for w, c in zip(t.weights, t.nodes)) == pytest.approx(
        1.0 / 3.0, abs=1e-15
    )


def test_order2_paper_choice_and_midpoint_are_valid():
    assert validate_order2(classical_mrk2()) == []
    midpoint = MButcherTableau(nodes=(0.0, 0.5), exponents=((), (0.5,)), weights=(0.0, 1.0))
    assert validate_order2(midpoint) == []


def test_order2_broken_exponent_flags_only_that_condition():
    t = MButcherTableau(nodes=(0.0, 1.0), exponents=((), (0.9,)), weights=(0.5, 0.5))
    violations = validate_order2(t)
    assert len(violations) == 1
    assert "b*q" in violations[0]


def test_order2_wrong_stage_count():
    with pytest.raises(ShapeError):
        validate_order2(classical_mrk4())
    with pytest.raises(ShapeError):
        validate_order4(classical_mrk2())


def test_order4_zero_weights_flag_weight_sum():
    t = MButcherTableau(
        nodes=(0.0, 0.5, 0.5, 1.0),
        exponents=((), (0.5,), (0.0, 0.5), (0.0, 0.0, 1.0)),
        weights=(0.0, 0.0, 0.0, 0.0),
    )
    violations = validate_order4(t)
    assert any("weights must sum to 1" in v for v in violations)


def test_order4_flat_weights_break_second_moment():
    t = MButcherTableau(
        nodes=(0.0, 0.5, 0.5, 1.0),
        exponents=((), (0.5,), (0.0, 0.5), (0.0, 0.0, 1.0)),
        weights=(0.25, 0.25, 0.25, 0.25),
    )
    violations = validate_order4(t)
    # second moment comes out 3/8, the (inherited) third moment 5/16
    assert any("p_i^2" in v and "0.375" in v for v in violations)
    assert any("p_i^3" in v and "0.3125" in v for v in violations)


def test_make_order2_family():
    t = make_order2(0.5)
    assert t.weights == (0.5, 0.5) and t.nodes[1] == 1.0 and t.exponents[1][0] == 1.0
    t = make_order2(1.0)
    assert t.weights == (0.0, 1.0) and t.nodes[1] == 0.5
    with pytest.raises(DomainError):
        make_order2(0.0)


@pytest.mark.parametrize("b", [0.3, 0.5, 1.0, 2.5, -0.7])
def test_make_order2_always_validates(b):
    assert validate_order2(make_order2(b)) == []


def test_constructor_shape_errors():
    with pytest.raises(ShapeError):
        MButcherTableau(nodes=(0.1, 1.0), exponents=((), (1.0,)), weights=(0.5, 0.5))
    with pytest.raises(ShapeError):
        MButcherTableau(nodes=(0.0, 1.0), exponents=((), (1.0, 2.0)), weights=(0.5, 0.5))
    with pytest.raises(ShapeError):
        MButcherTableau(nodes=(0.0,), exponents=((),), weights=(0.5, 0.5))


def test_json_round_trip():
    t = classical_mrk4()
    again = MButcherTableau.from_json(t.to_json())
    assert again == t
    doc = json.loads(t.to_json())
    assert set(doc) == {"nodes", "exponents", "weights"}
    assert doc["exponents"][0] == []


def test_from_json_handwritten():
    text = '{"nodes": [0, 1], "exponents": [[], [1]], "weights": [0.5, 0.5]}'
    t = MButcherTableau.from_json(text)
    assert validate_order2(t) == []
    with pytest.raises(ShapeError):
        MButcherTableau.from_json('{"nodes": [0, 1]}')


def _perturbations(t: MButcherTableau, delta: float):
    """Every tableau obtained by bumping one free coefficient by delta."""
    nodes = list(t.nodes)
    rows = [list(r) for r in t.exponents]
    weights = list(t.weights)
    for i in range(1, len(nodes)):
        n2 = nodes.copy()
        n2[i] += delta
        yield MButcherTableau(tuple(n2), t.exponents, t.weights)
    for i, row in enumerate(rows):
        for j in range(len(row)):
            r2 = [list(r) for r in rows]
            r2[i][j] += delta
            yield MButcherTableau(t.nodes, tuple(tuple(r) for r in r2), t.weights)
    for i in range(len(weights)):
        w2 = weights.copy()
        w2[i] += delta
        yield MButcherTableau(t.nodes, t.exponents, tuple(w2))


def test_any_single_perturbation_violates():
    rng = np.random.default_rng(123)
    base = classical_mrk4()
    for _ in range(50):
        delta = rng.choice([-1, 1]) * rng.uniform(1e-6, 1e-2)
        for t in _perturbations(base, float(delta)):
            assert validate_order4(t), f"perturbation by {delta} went undetected"
