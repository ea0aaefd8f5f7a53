"""The constrained receiver: quota-feasible best responses, the ex-ante
incentive-compatibility check for direct schemes, and the derandomization
that moves receiver mixing into the sender's scheme."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .linprog import EQ, GE, LE, LinearProgram, solve_lex, solve_lp
from .model import (
    ConstraintProfile,
    Instance,
    ResponsePolicy,
    SignalingScheme,
    ValidationError,
    evaluate,
    identity_policy,
    signal_marginals,
)

__all__ = ["BestResponse", "ExAnteIcReport", "Derandomized", "best_response_lex",
           "check_ex_ante_ic", "derandomize"]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class BestResponse:
    status: str  # optimal | infeasible
    policy: Optional[ResponsePolicy] = None
    receiver_eu: Optional[Fraction] = None
    sender_eu: Optional[Fraction] = None


@dataclass(frozen=True)
class ExAnteIcReport:
    ic: bool
    best_deviation_value: Optional[Fraction]
    obedient_value: Fraction
    obedience_infeasible: bool = False


@dataclass(frozen=True)
class Derandomized:
    direct_scheme: SignalingScheme
    joint_distribution: tuple[tuple[Fraction, ...], ...]


def _receiver_lp(inst, scheme, c):
    """LP data for the receiver's constrained policy choice.

    Variables are sigma[s][j] for reachable signals s only. Coefficients
    use the joint weights prior[i]*phi[i][s]*u(i,j), so the objective is
    the receiver's (or sender's) overall expected utility directly.
    """
    lam = signal_marginals(inst, scheme)
    reachable = [s for s in range(scheme.signal_count) if lam[s] > 0]
    m = inst.m
    nv = len(reachable) * m

    def var(si, j):
        return si * m + j

    recv_obj = [ZERO] * nv
    send_obj = [ZERO] * nv
    for si, s in enumerate(reachable):
        for j in range(m):
            wr = ws = ZERO
            for i in range(inst.n):
                mass = inst.prior[i] * scheme.probs[i][s]
                wr += mass * inst.receiver_utility[i][j]
                ws += mass * inst.sender_utility[i][j]
            recv_obj[var(si, j)] = wr
            send_obj[var(si, j)] = ws

    rows = []
    for si in range(len(reachable)):
        coeffs = [ZERO] * nv
        for j in range(m):
            coeffs[var(si, j)] = ONE
        rows.append((tuple(coeffs), EQ, ONE))
    for j in range(m):
        coeffs = [ZERO] * nv
        for si, s in enumerate(reachable):
            coeffs[var(si, j)] = lam[s]
        if c.lower[j] > 0:
            rows.append((tuple(coeffs), GE, c.lower[j]))
        if c.upper[j] < 1:
            rows.append((tuple(coeffs), LE, c.upper[j]))
    bounds = tuple((ZERO, ONE) for _ in range(nv))
    return lam, reachable, tuple(recv_obj), tuple(send_obj), tuple(rows), bounds


def best_response_lex(
    inst: Instance, scheme: SignalingScheme, c: ConstraintProfile
) -> BestResponse:
    """Receiver-optimal quota-feasible policy, ties toward the sender.

    Stage one maximizes the receiver's expected utility over all
    row-stochastic policies whose induced action probabilities respect the
    quotas; stage two maximizes the sender's expected utility over the
    receiver-optimal face. Unreachable signals get a uniform row and do
    not enter the optimization.
    """
    if c.m != inst.m:
        raise ValidationError("constraint profile and instance disagree on action count")
    lam, reachable, recv_obj, send_obj, rows, bounds = _receiver_lp(inst, scheme, c)
    m = inst.m
    lp = LinearProgram(objective=recv_obj, rows=rows, bounds=bounds)
    res = solve_lex(lp, send_obj)
    if res.status != "optimal":
        return BestResponse(status="infeasible")
    uniform = tuple(Fraction(1, m) for _ in range(m))
    policy_rows = []
    by_signal = {s: si for si, s in enumerate(reachable)}
    for s in range(scheme.signal_count):
        if s in by_signal:
            si = by_signal[s]
            policy_rows.append(tuple(res.point[si * m + j] for j in range(m)))
        else:
            policy_rows.append(uniform)
    return BestResponse(
        status="optimal",
        policy=ResponsePolicy(tuple(policy_rows)),
        receiver_eu=res.primary_value,
        sender_eu=res.value,
    )


def check_ex_ante_ic(
    inst: Instance, direct_scheme: SignalingScheme, c: ConstraintProfile
) -> ExAnteIcReport:
    """Is obedience optimal among quota-feasible responses?

    The scheme must be direct (one signal per action). If the obedient
    response itself violates the quotas, that is reported as a distinct
    flag rather than plain falsity.
    """
    if direct_scheme.signal_count != inst.m:
        raise ValidationError("direct scheme must have one signal per action")
    obedient = identity_policy(inst.m)
    ev = evaluate(inst, direct_scheme, obedient)
    quota_ok = all(
        c.lower[j] <= ev.action_probs[j] <= c.upper[j] for j in range(inst.m)
    )
    if not quota_ok:
        return ExAnteIcReport(
            ic=False,
            best_deviation_value=None,
            obedient_value=ev.receiver_eu,
            obedience_infeasible=True,
        )
    lam, reachable, recv_obj, _send, rows, bounds = _receiver_lp(inst, direct_scheme, c)
    res = solve_lp(LinearProgram(objective=recv_obj, rows=rows, bounds=bounds))
    if res.status != "optimal":
        # Obedience is feasible, so the policy polytope cannot be empty.
        raise AssertionError("receiver LP infeasible despite feasible obedience")
    return ExAnteIcReport(
        ic=res.value == ev.receiver_eu,
        best_deviation_value=res.value,
        obedient_value=ev.receiver_eu,
    )


def derandomize(
    inst: Instance, scheme: SignalingScheme, resp: ResponsePolicy
) -> Derandomized:
    """Push the receiver's randomization into the sender's scheme.

    Expands signals to (signal, recommended action) pairs and compresses
    by recommendation: phi'[i][j] = sum_s phi[i][s] * resp[s][j]. The
    joint state-action distribution, and hence both expected utilities and
    the quota satisfaction, are preserved exactly.
    """
    if scheme.n != inst.n or resp.signal_count != scheme.signal_count or resp.m != inst.m:
        raise ValidationError("incompatible dimensions")
    n, m, k = inst.n, inst.m, scheme.signal_count
    direct = tuple(
        tuple(
            sum(scheme.probs[i][s] * resp.probs[s][j] for s in range(k))
            for j in range(m)
        )
        for i in range(n)
    )
    joint = tuple(
        tuple(inst.prior[i] * direct[i][j] for j in range(m)) for i in range(n)
    )
    return Derandomized(SignalingScheme(direct), joint)
