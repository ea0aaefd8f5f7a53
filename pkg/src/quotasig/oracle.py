"""Grid-search oracle for the sender's ex-ante problem.

Discretizes signaling schemes on a 1/K grid (one signal per action),
computes the receiver's exact quota-constrained lexicographic best
response to every scheme, and selects the receiver-best scheme among
those whose sender value sits within `delta` of the grid maximum.

All arithmetic is exact. Probabilities are handled in integer units of
1/U, utilities are cleared to integers, and per-scheme optima come back
as integer triples (OR, OS, D); only the final report converts to
Fraction. The hot loop lives in `_kernels` (compiled when available,
with a pure-Python twin); this module chooses the backend per call after
proving the compiled kernel's 64/128-bit arithmetic cannot overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

from . import _kernels
from ._kernels import pure as _pure
from .model import (
    ConstraintProfile,
    Instance,
    SignalingScheme,
    Solution,
    ValidationError,
    evaluate,
)
from .response import best_response_lex

__all__ = [
    "GridReport",
    "solve_exante_grid",
    "sender_resolution_bound",
    "receiver_resolution_bound",
    "default_grid_resolution",
]

ZERO = Fraction(0)

# The compiled kernel exports 64-bit values and compares in 128 bits;
# stay well inside both.
_I64_LIMIT = 1 << 62
_I128_LIMIT = 1 << 120


@dataclass(frozen=True)
class GridReport:
    status: str  # optimal | infeasible
    solution: Optional[Solution]
    grid_max_sender_eu: Optional[Fraction]
    sender_upper_gap: Fraction
    K: int
    delta: Fraction
    scheme_count: int
    evaluated: int
    backend: str
    refined: bool = False


def default_grid_resolution(m: int) -> int:
    """200 grid steps for two actions, 12 for three or more."""
    return 200 if m == 2 else 12


def _utility_range(matrix) -> Fraction:
    vals = [v for row in matrix for v in row]
    return max(vals) - min(vals)


def sender_resolution_bound(inst: Instance, K: int) -> Fraction:
    """Upper bound on the sender's loss from the 1/K discretization."""
    return _utility_range(inst.sender_utility) * Fraction(inst.m * inst.n, K)


def receiver_resolution_bound(inst: Instance, K: int) -> Fraction:
    """Discretization slack for receiver-value comparisons at resolution K."""
    return 2 * _utility_range(inst.receiver_utility) * Fraction(inst.m * inst.n, K)


def _scaled(inst: Instance, c: ConstraintProfile, K: int):
    """Integer-clear the instance for the kernel.

    Returns (P, Dp, UR, DR, US, DS, Lb, Ub, U) with prior_i = P_i/Dp,
    receiver utilities UR/DR, sender utilities US/DS, quota bounds
    Lb/U, Ub/U, and U a common multiple of Dp*K and the bound
    denominators so every grid scheme's action probabilities are
    integer multiples of 1/U.
    """
    Dp = lcm(*(f.denominator for f in inst.prior))
    P = [int(f * Dp) for f in inst.prior]
    DR = lcm(*(v.denominator for row in inst.receiver_utility for v in row))
    UR = [[int(v * DR) for v in row] for row in inst.receiver_utility]
    DS = lcm(*(v.denominator for row in inst.sender_utility for v in row))
    US = [[int(v * DS) for v in row] for row in inst.sender_utility]
    dens = [f.denominator for f in c.lower] + [f.denominator for f in c.upper]
    U = lcm(Dp * K, *dens)
    Lb = [int(f * U) for f in c.lower]
    Ub = [int(f * U) for f in c.upper]
    return P, Dp, UR, DR, US, DS, Lb, Ub, U


def _compiled_safe(n, m, K, Dp, UR, US, Lb, Ub, U, dn, dd, DS) -> bool:
    """Conservative a-priori overflow check for the compiled kernel."""
    T2 = Dp * K
    lc_max = 1
    for _ in range(m):
        lc_max *= T2
    ur_max = max(abs(v) for row in UR for v in row) or 1
    us_max = max(abs(v) for row in US for v in row) or 1
    cr_max = T2 * ur_max * lc_max
    cs_max = T2 * us_max * lc_max
    d_max = U * lc_max
    or_max = U * cr_max
    os_max = U * cs_max
    if max(or_max, os_max, d_max) >= _I64_LIMIT:
        return False
    big = 2 * U * cs_max + 1
    # Path costs: at most three edges per augmenting path, m+2 paths.
    dist_max = 3 * (cr_max * big + cs_max) * (m + 2)
    if dist_max >= _I128_LIMIT:
        return False
    if os_max * d_max * max(dd, 1) >= _I128_LIMIT:
        return False
    if dn * DS * d_max * d_max >= _I128_LIMIT:
        return False
    return True


def _run_kernel(n, m, rows_per_state, K, P, Dp, UR, US, Lb, Ub, U,
                dn, dd, DS, symmetric):
    backend = _kernels.BACKEND
    if backend == "compiled" and not _compiled_safe(
        n, m, K, Dp, UR, US, Lb, Ub, U, dn, dd, DS
    ):
        backend = "pure"
    fn = _kernels.grid_search if backend == "compiled" else _pure.grid_search
    out = fn(n, m, rows_per_state, K, P, Dp, UR, US, Lb, Ub, U, dn, dd, DS,
             symmetric)
    return out, backend


def _neighborhood_rows(base_row, K, radius):
    """Rows on the 1/K^2 grid within `radius` fine steps per coordinate of
    `base_row` (given in integer 1/K steps), summing to K^2."""
    m = len(base_row)
    centers = [v * K for v in base_row]
    total = K * K

    rows = []

    def rec(idx, remaining, prefix):
        if idx == m - 1:
            lo = max(0, centers[idx] - radius)
            hi = min(total, centers[idx] + radius)
            if lo <= remaining <= hi:
                rows.append(tuple(prefix) + (remaining,))
            return
        lo = max(0, centers[idx] - radius)
        hi = min(remaining, centers[idx] + radius)
        for v in range(lo, hi + 1):
            prefix.append(v)
            rec(idx + 1, remaining - v, prefix)
            prefix.pop()

    rec(0, total, [])
    return rows


def solve_exante_grid(
    inst: Instance,
    c: ConstraintProfile,
    K: Optional[int] = None,
    delta: Optional[Fraction] = None,
    refine: bool = False,
) -> GridReport:
    """Approximate sender-optimal scheme under ex-ante obedience, by grid.

    Every scheme on the grid is paired with the receiver's exact best
    response (lexicographic: receiver value, then sender value), so the
    reported values are exact for the returned scheme; only the scheme
    grid itself is approximate. `delta` (default: the sender resolution
    bound) widens the sender-optimal band within which the receiver-best
    scheme is picked; ties go to the lexicographically smallest scheme.

    With `refine`, one extra pass re-searches a 1/K^2-resolution
    neighborhood of the coarse optimum.
    """
    if c.m != inst.m:
        raise ValidationError("constraint profile and instance disagree on action count")
    n, m = inst.n, inst.m
    if K is None:
        K = default_grid_resolution(m)
    if K < 1:
        raise ValidationError("grid resolution must be positive")
    if delta is None:
        delta = sender_resolution_bound(inst, K)
    delta = Fraction(delta)
    if delta < 0:
        raise ValidationError("delta must be nonnegative")

    P, Dp, UR, DR, US, DS, Lb, Ub, U = _scaled(inst, c, K)
    dn, dd = delta.numerator, delta.denominator

    rows = list(_pure.compositions(K, m))
    out, backend = _run_kernel(
        n, m, [rows] * n, K, P, Dp, UR, US, Lb, Ub, U, dn, dd, DS, True
    )
    gap = sender_resolution_bound(inst, K)
    if out["status"] == "empty":
        return GridReport(
            status="infeasible", solution=None, grid_max_sender_eu=None,
            sender_upper_gap=gap, K=K, delta=delta,
            scheme_count=out["scheme_count"], evaluated=0, backend=backend,
        )

    scheme_count = out["scheme_count"]
    evaluated = out["evaluated"]
    refined = False
    grid_K = K

    if refine:
        refined = True
        grid_K = K * K
        radius = K
        best_rows = out["best_rows"]
        while True:
            per_state = [
                _neighborhood_rows(row, K, radius) for row in best_rows
            ]
            count = 1
            for lst in per_state:
                count *= len(lst)
            if count <= 2_000_000 or radius == 1:
                break
            radius //= 2
        dens2 = [f.denominator for f in c.lower] + [f.denominator for f in c.upper]
        U2 = lcm(Dp * grid_K, *dens2)
        Lb2 = [int(f * U2) for f in c.lower]
        Ub2 = [int(f * U2) for f in c.upper]
        out2, backend = _run_kernel(
            n, m, per_state, grid_K, P, Dp, UR, US, Lb2, Ub2, U2,
            dn, dd, DS, False,
        )
        if out2["status"] == "ok":
            scheme_count += out2["scheme_count"]
            evaluated += out2["evaluated"]
            out = out2

    o_r, d = out["best_recv"]
    o_s, _ = out["best_send"]
    os_star, ds_star = out["max_send"]
    recv_eu = Fraction(o_r, d * DR)
    send_eu = Fraction(o_s, d * DS)
    grid_max = Fraction(os_star, ds_star * DS)

    scheme = SignalingScheme(
        tuple(
            tuple(Fraction(v, grid_K) for v in out["best_rows"][i])
            for i in range(n)
        )
    )
    br = best_response_lex(inst, scheme, c)
    if br.status != "optimal":
        raise AssertionError("kernel accepted a scheme the LP rejects")
    if br.receiver_eu != recv_eu or br.sender_eu != send_eu:
        raise AssertionError("kernel and LP disagree on best-response values")
    ev = evaluate(inst, scheme, br.policy)
    sol = Solution(
        scheme=scheme,
        response=br.policy,
        sender_eu=send_eu,
        receiver_eu=recv_eu,
        action_probs=ev.action_probs,
        method="grid-oracle",
    )
    return GridReport(
        status="optimal",
        solution=sol,
        grid_max_sender_eu=grid_max,
        sender_upper_gap=gap,
        K=K,
        delta=delta,
        scheme_count=scheme_count,
        evaluated=evaluated,
        backend=backend,
        refined=refined,
    )
