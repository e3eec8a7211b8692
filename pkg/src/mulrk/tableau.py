"""Coefficient schemes for multiplicative Runge-Kutta steps.

A scheme is stored Butcher-style: one node per stage, a strictly
lower-triangular matrix of stage exponents, and the update weights for
y <- y * f0^(w0*h) * f1^(w1*h) * ...  Validators check the algebraic
conditions for second- and fourth-order accuracy of that update.

Because a multiplicative step is an ordinary explicit RK step on
z' = log f(x, e^z), the full classical order conditions carry over; the
fourth-order validator therefore checks the classical third/fourth-order
conditions as well, flagged "inherited", beyond the core weight/node moment
conditions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import DomainError, ShapeError

# Coefficients are exact rationals; this only absorbs binary rounding.
COEFF_TOL = 1e-12


@dataclass(frozen=True)
class MButcherTableau:
    """Nodes, stage exponents, and weights of a multiplicative RK scheme.

    ``exponents[i]`` holds the i entries used to build the i-th stage state
    (row 0 is empty: the first stage evaluates at the current state).
    """

    nodes: tuple[float, ...]
    exponents: tuple[tuple[float, ...], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(float(v) for v in self.nodes))
        object.__setattr__(
            self, "exponents", tuple(tuple(float(v) for v in row) for row in self.exponents)
        )
        object.__setattr__(self, "weights", tuple(float(v) for v in self.weights))
        s = len(self.weights)
        if s < 1 or len(self.nodes) != s or len(self.exponents) != s:
            raise ShapeError(
                f"inconsistent stage counts: {len(self.nodes)} nodes, "
                f"{len(self.exponents)} exponent rows, {s} weights"
            )
        for i, row in enumerate(self.exponents):
            if len(row) != i:
                raise ShapeError(f"exponent row {i} must have {i} entries, got {len(row)}")
        if self.nodes[0] != 0.0:
            raise ShapeError(f"first node must be 0, got {self.nodes[0]}")
        for v in self.nodes + self.weights + tuple(v for row in self.exponents for v in row):
            if not math.isfinite(v):
                raise ShapeError("tableau coefficients must be finite")

    @property
    def stages(self) -> int:
        return len(self.weights)

    def to_json(self) -> str:
        return json.dumps(
            {
                "nodes": list(self.nodes),
                "exponents": [list(row) for row in self.exponents],
                "weights": list(self.weights),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "MButcherTableau":
        doc = json.loads(text)
        try:
            return cls(
                nodes=tuple(doc["nodes"]),
                exponents=tuple(tuple(row) for row in doc["exponents"]),
                weights=tuple(doc["weights"]),
            )
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed tableau document: {exc}") from exc


def _row_sum_violations(t: MButcherTableau) -> list[str]:
    out = []
    for i in range(1, t.stages):
        rs = sum(t.exponents[i])
        if abs(t.nodes[i] - rs) > COEFF_TOL:
            out.append(
                f"node[{i}] must equal the row sum of its exponents "
                f"(node {t.nodes[i]:.17g} vs row sum {rs:.17g})"
            )
    return out


def _moment(t: MButcherTableau, power: int) -> float:
    return sum(w * c**power for w, c in zip(t.weights, t.nodes))


def validate_order2(t: MButcherTableau) -> list[str]:
    """Violations of the two-stage second-order conditions; empty when valid.

    The conditions are a+b=1, b*p=1/2, b*q=1/2; p=q is implied by the last
    two rather than checked separately.
    """
    if t.stages != 2:
        raise ShapeError(f"expected a 2-stage tableau, got {t.stages} stages")
    out = []
    if abs(sum(t.weights) - 1.0) > COEFF_TOL:
        out.append(f"weights must sum to 1 (got {sum(t.weights):.17g})")
    if abs(t.weights[1] * t.nodes[1] - 0.5) > COEFF_TOL:
        out.append(f"b*p must equal 1/2 (got {t.weights[1] * t.nodes[1]:.17g})")
    if abs(t.weights[1] * t.exponents[1][0] - 0.5) > COEFF_TOL:
        out.append(f"b*q must equal 1/2 (got {t.weights[1] * t.exponents[1][0]:.17g})")
    return out


def validate_order4(t: MButcherTableau) -> list[str]:
    """Violations of the four-stage order conditions; empty when valid.

    Checks row-sum consistency and the weight/node moment conditions up to
    the 1/3 moment, then the remaining classical conditions for genuine
    third/fourth order ("inherited:" prefix).  A tableau that passes only
    the unprefixed conditions is at best an order-3 candidate.
    """
    if t.stages != 4:
        raise ShapeError(f"expected a 4-stage tableau, got {t.stages} stages")
    out = _row_sum_violations(t)
    if abs(sum(t.weights) - 1.0) > COEFF_TOL:
        out.append(f"weights must sum to 1 (got {sum(t.weights):.17g})")
    if abs(_moment(t, 1) - 0.5) > COEFF_TOL:
        out.append(f"sum w_i*p_i must equal 1/2 (got {_moment(t, 1):.17g})")
    if abs(_moment(t, 2) - 1.0 / 3.0) > COEFF_TOL:
        out.append(f"sum w_i*p_i^2 must equal 1/3 (got {_moment(t, 2):.17g})")

    w, c, q = t.weights, t.nodes, t.exponents
    qc = [sum(q[i][j] * c[j] for j in range(i)) for i in range(4)]
    qc2 = [sum(q[i][j] * c[j] ** 2 for j in range(i)) for i in range(4)]
    qqc = [sum(q[i][j] * qc[j] for j in range(i)) for i in range(4)]
    inherited = [
        ("sum w_i*p_i^3 = 1/4", _moment(t, 3), 0.25),
        ("sum w_i*q_ij*p_j = 1/6", sum(w[i] * qc[i] for i in range(4)), 1.0 / 6.0),
        ("sum w_i*p_i*q_ij*p_j = 1/8", sum(w[i] * c[i] * qc[i] for i in range(4)), 0.125),
        ("sum w_i*q_ij*p_j^2 = 1/12", sum(w[i] * qc2[i] for i in range(4)), 1.0 / 12.0),
        ("sum w_i*q_ij*q_jk*p_k = 1/24", sum(w[i] * qqc[i] for i in range(4)), 1.0 / 24.0),
    ]
    for name, got, want in inherited:
        if abs(got - want) > COEFF_TOL:
            out.append(f"inherited: {name} (got {got:.17g})")
    return out


def classical_mrk4() -> MButcherTableau:
    """The classical four-stage scheme carried over to multiplicative form."""
    t = MButcherTableau(
        nodes=(0.0, 0.5, 0.5, 1.0),
        exponents=((), (0.5,), (0.0, 0.5), (0.0, 0.0, 1.0)),
        weights=(1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0),
    )
    return t


def make_order2(b: float) -> MButcherTableau:
    """The one-parameter family of valid two-stage schemes: a=1-b, p=q=1/(2b)."""
    if b == 0:
        raise DomainError("b=0 admits no solution of the order-2 conditions")
    p = 1.0 / (2.0 * b)
    return MButcherTableau(nodes=(0.0, p), exponents=((), (p,)), weights=(1.0 - b, b))


def classical_mrk2() -> MButcherTableau:
    """Equal weights, endpoint evaluation: a=b=1/2, p=q=1."""
    return make_order2(0.5)
