"""Domain types for quota-constrained persuasion games.

Everything is exact: probabilities and utilities are `fractions.Fraction`
end-to-end, so equality checks in tests and tie-breaking in solvers never
depend on a floating-point tolerance.

Conventions used throughout the package:

* states are indexed ``0..n-1``, actions ``0..m-1``, signals ``0..k-1``;
* a signaling scheme is state-major: ``scheme.probs[i][s]`` is the
  probability of sending signal ``s`` in state ``i``;
* a response policy is signal-major: ``policy.probs[s][j]`` is the
  probability of playing action ``j`` after signal ``s``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "ValidationError",
    "UnreachableSignalError",
    "Instance",
    "ConstraintProfile",
    "SignalingScheme",
    "ResponsePolicy",
    "Solution",
    "Classification",
    "ConstraintStatus",
    "rat",
    "rat_str",
    "classify_instance",
    "check_constraints",
    "compare_binding",
    "posterior",
    "evaluate",
    "load_instance",
    "dump_instance",
    "vacuous_profile",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class ValidationError(ValueError):
    """A domain object fails its invariants (dimensions, stochasticity...)."""


class UnreachableSignalError(ValueError):
    """Asked to condition on a signal that is sent with probability zero."""


def rat(value) -> Fraction:
    """Coerce ints, Fractions and canonical "p/q" strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValidationError(f"not an exact rational: {value!r}")


def rat_str(value: Fraction) -> str:
    """Canonical string form: "p/q", denominator omitted when 1."""
    return str(value)


def _rat_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(rat(v) for v in values)


def _rat_matrix(rows: Iterable[Iterable]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(_rat_vector(row) for row in rows)


def _check_row_stochastic(rows, what: str) -> None:
    for idx, row in enumerate(rows):
        if any(p < 0 for p in row):
            raise ValidationError(f"{what}: row {idx} has a negative entry")
        if sum(row) != ONE:
            raise ValidationError(f"{what}: row {idx} does not sum to 1")


@dataclass(frozen=True)
class Instance:
    """A finite persuasion game: prior plus the two utility matrices.

    ``prior[i]`` is the prior probability of state ``i``;
    ``sender_utility[i][j]`` / ``receiver_utility[i][j]`` the payoff in
    state ``i`` when action ``j`` is played.
    """

    prior: tuple[Fraction, ...]
    sender_utility: tuple[tuple[Fraction, ...], ...]
    receiver_utility: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "prior", _rat_vector(self.prior))
        object.__setattr__(self, "sender_utility", _rat_matrix(self.sender_utility))
        object.__setattr__(self, "receiver_utility", _rat_matrix(self.receiver_utility))
        n = len(self.prior)
        if n < 2:
            raise ValidationError("need at least two states")
        if len(self.sender_utility) != n or len(self.receiver_utility) != n:
            raise ValidationError("utility matrices must have one row per state")
        m = len(self.sender_utility[0])
        if m < 2:
            raise ValidationError("need at least two actions")
        for mat, who in ((self.sender_utility, "sender"), (self.receiver_utility, "receiver")):
            if any(len(row) != m for row in mat):
                raise ValidationError(f"{who} utility matrix is ragged")
        if any(p < 0 for p in self.prior):
            raise ValidationError("prior has a negative entry")
        if sum(self.prior) != ONE:
            raise ValidationError("prior does not sum to 1")

    @property
    def n(self) -> int:
        return len(self.prior)

    @property
    def m(self) -> int:
        return len(self.sender_utility[0])


@dataclass(frozen=True)
class ConstraintProfile:
    """Per-action quota: lower/upper bounds on the overall action probability."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "lower", _rat_vector(self.lower))
        object.__setattr__(self, "upper", _rat_vector(self.upper))
        if len(self.lower) != len(self.upper):
            raise ValidationError("lower/upper bound vectors differ in length")
        for lo, hi in zip(self.lower, self.upper):
            if not (ZERO <= lo <= hi <= ONE):
                raise ValidationError("need 0 <= lower <= upper <= 1 for every action")

    @property
    def m(self) -> int:
        return len(self.lower)


def vacuous_profile(m: int) -> ConstraintProfile:
    """The unconstrained profile: every action bounded by [0, 1]."""
    return ConstraintProfile((ZERO,) * m, (ONE,) * m)


@dataclass(frozen=True)
class SignalingScheme:
    """State-conditional signal distribution; rows indexed by state."""

    probs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", _rat_matrix(self.probs))
        if not self.probs or not self.probs[0]:
            raise ValidationError("scheme needs at least one state and one signal")
        k = len(self.probs[0])
        if any(len(row) != k for row in self.probs):
            raise ValidationError("scheme matrix is ragged")
        _check_row_stochastic(self.probs, "scheme")

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def signal_count(self) -> int:
        return len(self.probs[0])


@dataclass(frozen=True)
class ResponsePolicy:
    """Signal-conditional action distribution; rows indexed by signal."""

    probs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", _rat_matrix(self.probs))
        if not self.probs or not self.probs[0]:
            raise ValidationError("policy needs at least one signal and one action")
        m = len(self.probs[0])
        if any(len(row) != m for row in self.probs):
            raise ValidationError("policy matrix is ragged")
        _check_row_stochastic(self.probs, "policy")

    @property
    def signal_count(self) -> int:
        return len(self.probs)

    @property
    def m(self) -> int:
        return len(self.probs[0])


def identity_policy(m: int) -> ResponsePolicy:
    """The obedient response for a direct scheme: signal j -> action j."""
    return ResponsePolicy(
        tuple(tuple(ONE if i == j else ZERO for j in range(m)) for i in range(m))
    )


@dataclass(frozen=True)
class Solution:
    """A solved game: scheme, induced response, and exact value accounting."""

    scheme: SignalingScheme
    response: ResponsePolicy
    sender_eu: Fraction
    receiver_eu: Fraction
    action_probs: tuple[Fraction, ...]
    method: str

    def __post_init__(self):
        object.__setattr__(self, "action_probs", _rat_vector(self.action_probs))
        if any(p < 0 for p in self.action_probs) or sum(self.action_probs) != ONE:
            raise ValidationError("action probabilities are not a distribution")


@dataclass(frozen=True)
class Classification:
    state_matching: bool
    action_matching: bool
    sender_case: str  # aligned | prefers-a1 | prefers-a2 | indifferent | none


@dataclass(frozen=True)
class ConstraintStatus:
    implementable: bool
    feasible: bool
    dimension_mismatch: bool = False


def classify_instance(inst: Instance) -> Classification:
    """Order-based structure of the utilities.

    ``state_matching``: in every state the receiver weakly prefers actions
    closer to that state. ``action_matching``: for every action the sender
    weakly prefers states closer to that action. ``sender_case`` applies to
    2x2 games only and names which action the sender pushes for; ties are
    resolved by the first match in the order aligned, prefers-a1,
    prefers-a2, indifferent.
    """
    uR = inst.receiver_utility
    uS = inst.sender_utility
    n, m = inst.n, inst.m

    state_matching = all(
        uR[i][j] >= uR[i][k]
        for i in range(n)
        for j in range(m)
        for k in range(m)
        if i <= j <= k or i >= j >= k
    )
    action_matching = all(
        uS[j][i] >= uS[k][i]
        for i in range(m)
        for j in range(n)
        for k in range(n)
        if i <= j <= k or i >= j >= k
    )

    case = "none"
    if n == 2 and m == 2:
        likes_a1_in_s1 = uS[0][0] >= uS[0][1]
        likes_a2_in_s2 = uS[1][1] >= uS[1][0]
        if likes_a1_in_s1 and likes_a2_in_s2:
            case = "aligned"
        elif likes_a1_in_s1:
            case = "prefers-a1"
        elif likes_a2_in_s2:
            case = "prefers-a2"
        else:
            case = "indifferent"
    return Classification(state_matching, action_matching, case)


def check_constraints(c: ConstraintProfile, inst: Instance) -> ConstraintStatus:
    """Implementability (bound sums straddle 1) and feasibility (prior
    within bounds, identifying action j with state j; requires n == m)."""
    if c.m != inst.m:
        raise ValidationError("constraint profile and instance disagree on action count")
    implementable = sum(c.lower) <= ONE <= sum(c.upper)
    if inst.n != inst.m:
        return ConstraintStatus(implementable, False, dimension_mismatch=True)
    feasible = all(
        c.lower[j] <= inst.prior[j] <= c.upper[j] for j in range(inst.m)
    )
    return ConstraintStatus(implementable, feasible)


def compare_binding(c: ConstraintProfile, c2: ConstraintProfile) -> str:
    """Partial order on quota profiles; tighter bounds are "more binding"."""
    if c.m != c2.m:
        raise ValidationError("profiles differ in action count")
    if c.lower == c2.lower and c.upper == c2.upper:
        return "equal"
    c_tighter = all(
        c2.lower[j] <= c.lower[j] and c.upper[j] <= c2.upper[j] for j in range(c.m)
    )
    c2_tighter = all(
        c.lower[j] <= c2.lower[j] and c2.upper[j] <= c.upper[j] for j in range(c.m)
    )
    if c_tighter:
        return "c-more-binding"
    if c2_tighter:
        return "c2-more-binding"
    return "incomparable"


def signal_marginals(inst: Instance, scheme: SignalingScheme) -> tuple[Fraction, ...]:
    """Unconditional probability of each signal."""
    if scheme.n != inst.n:
        raise ValidationError("scheme and instance disagree on state count")
    return tuple(
        sum(inst.prior[i] * scheme.probs[i][s] for i in range(inst.n))
        for s in range(scheme.signal_count)
    )


def posterior(inst: Instance, scheme: SignalingScheme, signal: int) -> tuple[Fraction, ...]:
    """Exact Bayes posterior over states given one signal."""
    marginals = signal_marginals(inst, scheme)
    lam = marginals[signal]
    if lam == 0:
        raise UnreachableSignalError(f"signal {signal} is sent with probability zero")
    return tuple(inst.prior[i] * scheme.probs[i][signal] / lam for i in range(inst.n))


@dataclass(frozen=True)
class Evaluation:
    sender_eu: Fraction
    receiver_eu: Fraction
    action_probs: tuple[Fraction, ...]


def evaluate(inst: Instance, scheme: SignalingScheme, resp: ResponsePolicy) -> Evaluation:
    """Exact expected utilities and induced action distribution of a
    (scheme, response) pair under the prior."""
    if scheme.n != inst.n:
        raise ValidationError("scheme and instance disagree on state count")
    if resp.signal_count != scheme.signal_count:
        raise ValidationError("response and scheme disagree on signal count")
    if resp.m != inst.m:
        raise ValidationError("response and instance disagree on action count")
    sender = ZERO
    receiver = ZERO
    action_probs = [ZERO] * inst.m
    for i in range(inst.n):
        for s in range(scheme.signal_count):
            mass = inst.prior[i] * scheme.probs[i][s]
            if mass == 0:
                continue
            for j in range(inst.m):
                w = mass * resp.probs[s][j]
                if w == 0:
                    continue
                sender += w * inst.sender_utility[i][j]
                receiver += w * inst.receiver_utility[i][j]
                action_probs[j] += w
    return Evaluation(sender, receiver, tuple(action_probs))


# ---------------------------------------------------------------------------
# Instance file format
# ---------------------------------------------------------------------------
#
# JSON document with fields:
#   states, actions          -- integers
#   prior                    -- array of rational strings "p/q"
#   sender_utility           -- row-major array of arrays of rational strings
#   receiver_utility         -- likewise
#   constraints (optional)   -- {"lb": [...], "ub": [...]}


def load_instance(text: str) -> tuple[Instance, ConstraintProfile | None]:
    """Parse an instance document; returns the optional quota profile too."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}") from exc
    try:
        n = int(doc["states"])
        m = int(doc["actions"])
        inst = Instance(
            prior=_rat_vector(doc["prior"]),
            sender_utility=_rat_matrix(doc["sender_utility"]),
            receiver_utility=_rat_matrix(doc["receiver_utility"]),
        )
    except KeyError as exc:
        raise ValidationError(f"missing field: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed instance document: {exc}") from exc
    if inst.n != n or inst.m != m:
        raise ValidationError("declared states/actions do not match matrix shapes")
    profile = None
    if "constraints" in doc and doc["constraints"] is not None:
        cons = doc["constraints"]
        try:
            profile = ConstraintProfile(_rat_vector(cons["lb"]), _rat_vector(cons["ub"]))
        except KeyError as exc:
            raise ValidationError(f"constraints missing field: {exc}") from exc
        if profile.m != inst.m:
            raise ValidationError("constraint bounds do not match the action count")
    return inst, profile


def dump_instance(inst: Instance, profile: ConstraintProfile | None = None) -> str:
    doc = {
        "states": inst.n,
        "actions": inst.m,
        "prior": [rat_str(p) for p in inst.prior],
        "sender_utility": [[rat_str(v) for v in row] for row in inst.sender_utility],
        "receiver_utility": [[rat_str(v) for v in row] for row in inst.receiver_utility],
    }
    if profile is not None:
        doc["constraints"] = {
            "lb": [rat_str(v) for v in profile.lower],
            "ub": [rat_str(v) for v in profile.upper],
        }
    return json.dumps(doc, indent=2)
