"""Sender-optimal direct schemes under per-signal obedience and quotas.

This is the general finite-n solver: a lexicographic LP over the n x m
recommendation probabilities. Obedience here is ex post (following each
recommendation is conditionally optimal), which is stricter than ex-ante
incentive compatibility and can be infeasible when quotas force the
receiver into conditionally suboptimal actions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .linprog import EQ, GE, LE, LinearProgram, solve_lex
from .model import (
    ConstraintProfile,
    Instance,
    SignalingScheme,
    Solution,
    ValidationError,
    evaluate,
    identity_policy,
)

__all__ = ["ExpostResult", "solve_expost"]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class ExpostResult:
    status: str  # optimal | infeasible
    solution: Optional[Solution] = None


def solve_expost(inst: Instance, c: ConstraintProfile) -> ExpostResult:
    """Maximize the sender's utility, then the receiver's, over direct
    schemes that are ex post obedient and quota-feasible."""
    if c.m != inst.m:
        raise ValidationError("constraint profile and instance disagree on action count")
    if sum(c.lower) > ONE or sum(c.upper) < ONE:
        return ExpostResult(status="infeasible")
    n, m = inst.n, inst.m
    nv = n * m

    def var(i, j):
        return i * m + j

    send_obj = [ZERO] * nv
    recv_obj = [ZERO] * nv
    for i in range(n):
        for j in range(m):
            send_obj[var(i, j)] = inst.prior[i] * inst.sender_utility[i][j]
            recv_obj[var(i, j)] = inst.prior[i] * inst.receiver_utility[i][j]

    rows = []
    for i in range(n):
        coeffs = [ZERO] * nv
        for j in range(m):
            coeffs[var(i, j)] = ONE
        rows.append((tuple(coeffs), EQ, ONE))
    # Obedience: conditioned on recommendation j, action j beats k.
    for j in range(m):
        for k in range(m):
            if k == j:
                continue
            coeffs = [ZERO] * nv
            for i in range(n):
                coeffs[var(i, j)] = inst.prior[i] * (
                    inst.receiver_utility[i][j] - inst.receiver_utility[i][k]
                )
            rows.append((tuple(coeffs), GE, ZERO))
    # Quotas on the induced action probabilities.
    for j in range(m):
        coeffs = [ZERO] * nv
        for i in range(n):
            coeffs[var(i, j)] = inst.prior[i]
        if c.lower[j] > 0:
            rows.append((tuple(coeffs), GE, c.lower[j]))
        if c.upper[j] < 1:
            rows.append((tuple(coeffs), LE, c.upper[j]))

    bounds = tuple((ZERO, ONE) for _ in range(nv))
    lp = LinearProgram(objective=tuple(send_obj), rows=rows, bounds=bounds)
    res = solve_lex(lp, tuple(recv_obj))
    if res.status != "optimal":
        return ExpostResult(status="infeasible")
    scheme = SignalingScheme(
        tuple(tuple(res.point[var(i, j)] for j in range(m)) for i in range(n))
    )
    resp = identity_policy(m)
    ev = evaluate(inst, scheme, resp)
    return ExpostResult(
        status="optimal",
        solution=Solution(
            scheme=scheme,
            response=resp,
            sender_eu=ev.sender_eu,
            receiver_eu=ev.receiver_eu,
            action_probs=ev.action_probs,
            method="expost-lp",
        ),
    )
