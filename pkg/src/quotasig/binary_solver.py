"""Closed-form solver for 2x2 games with a state-matching receiver and an
action-matching sender.

The sender-optimal, receiver-best direct scheme falls into four cases by
the sender's per-state preferences. In the interesting cases the sender
pools the off-state into his favored recommendation up to the smaller of
the quota headroom and the receiver's incentive cap; when pooling gains
the sender nothing, the receiver-best selection drops it entirely.
"""

from __future__ import annotations

from fractions import Fraction

from .model import (
    ConstraintProfile,
    Instance,
    SignalingScheme,
    Solution,
    classify_instance,
    evaluate,
    identity_policy,
)

__all__ = [
    "NotBinaryError",
    "NotPartiallyAlignedError",
    "InfeasibleConstraintsError",
    "effective_bounds",
    "solve_binary",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class NotBinaryError(ValueError):
    """solve_binary needs a 2-state / 2-action instance."""


class NotPartiallyAlignedError(ValueError):
    """Receiver must be state-matching and sender action-matching."""


class InfeasibleConstraintsError(ValueError):
    """The prior violates the effective bounds on the first action."""


def effective_bounds(c: ConstraintProfile) -> tuple[Fraction, Fraction]:
    """Collapse a binary profile to bounds (LB, UB) on Pr[action 1]."""
    lb = max(c.lower[0], 1 - c.upper[1])
    ub = min(c.upper[0], 1 - c.lower[1])
    return lb, ub


def solve_binary(inst: Instance, c: ConstraintProfile) -> Solution:
    if inst.n != 2 or inst.m != 2:
        raise NotBinaryError("instance is not 2x2")
    cls = classify_instance(inst)
    if not (cls.state_matching and cls.action_matching):
        raise NotPartiallyAlignedError(
            "need a state-matching receiver and an action-matching sender"
        )
    if c.m != 2:
        raise NotBinaryError("constraint profile is not binary")
    lb, ub = effective_bounds(c)
    p = inst.prior[0]
    if not (lb <= p <= ub):
        raise InfeasibleConstraintsError("prior violates the effective bounds")

    uR = inst.receiver_utility
    uS = inst.sender_utility
    # Receiver's matching margins; both nonnegative by state-matching.
    d1 = uR[0][0] - uR[0][1]
    d2 = uR[1][1] - uR[1][0]

    full = ((ONE, ZERO), (ZERO, ONE))
    if cls.sender_case in ("aligned", "indifferent") or p in (ZERO, ONE):
        probs = full
    elif cls.sender_case == "prefers-a1":
        if uS[1][0] == uS[1][1] or p == ONE:
            pool = ZERO
        else:
            pool = min(ONE, (ub - p) / (1 - p))
            if d2 > 0:
                pool = min(pool, p * d1 / ((1 - p) * d2))
        probs = ((ONE, ZERO), (pool, 1 - pool))
    else:  # prefers-a2, the mirror image
        if uS[0][1] == uS[0][0] or p == ZERO:
            pool = ZERO
        else:
            pool = min(ONE, (p - lb) / p)
            if d1 > 0:
                pool = min(pool, (1 - p) * d2 / (p * d1))
        probs = ((1 - pool, pool), (ZERO, ONE))

    scheme = SignalingScheme(probs)
    resp = identity_policy(2)
    ev = evaluate(inst, scheme, resp)
    return Solution(
        scheme=scheme,
        response=resp,
        sender_eu=ev.sender_eu,
        receiver_eu=ev.receiver_eu,
        action_probs=ev.action_probs,
        method="binary-closed-form",
    )
