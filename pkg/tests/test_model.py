import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quotasig.model import (
    ConstraintProfile,
    Instance,
    ResponsePolicy,
    SignalingScheme,
    UnreachableSignalError,
    ValidationError,
    check_constraints,
    classify_instance,
    compare_binding,
    dump_instance,
    evaluate,
    identity_policy,
    load_instance,
    posterior,
    rat,
    rat_str,
    signal_marginals,
    vacuous_profile,
)

F = Fraction
HALF = F(1, 2)


def binary_instance(p=F(1, 4), uS=((2, 1), (3, 0)), uR=((1, 0), (F(1, 100), 1))):
    return Instance(prior=(p, 1 - p), sender_utility=uS, receiver_utility=uR)


def test_rat_roundtrip():
    assert rat("3/7") == F(3, 7)
    assert rat(2) == F(2)
    assert rat(F(5, 9)) == F(5, 9)
    assert rat_str(F(3, 7)) == "3/7"
    assert rat_str(F(4)) == "4"
    with pytest.raises(ValidationError):
        rat(0.5)


def test_instance_validation():
    with pytest.raises(ValidationError):
        Instance(prior=(HALF, F(1, 3)), sender_utility=((1, 0), (0, 1)),
                 receiver_utility=((1, 0), (0, 1)))
    with pytest.raises(ValidationError):
        Instance(prior=(F(1),), sender_utility=((1, 0),), receiver_utility=((1, 0),))
    with pytest.raises(ValidationError):
        Instance(prior=(HALF, HALF), sender_utility=((1, 0), (0,)),
                 receiver_utility=((1, 0), (0, 1)))


def test_scheme_and_policy_stochasticity():
    with pytest.raises(ValidationError):
        SignalingScheme(((HALF, HALF), (F(2, 3), F(2, 3))))
    with pytest.raises(ValidationError):
        ResponsePolicy(((F(-1, 2), F(3, 2)),))
    s = SignalingScheme(((1, 0), (0, 1)))
    assert s.n == 2 and s.signal_count == 2


def test_constraint_profile_bounds():
    with pytest.raises(ValidationError):
        ConstraintProfile((HALF,), (F(1, 4),))
    c = vacuous_profile(3)
    assert c.lower == (0, 0, 0) and c.upper == (1, 1, 1)


def test_classify_partial_alignment():
    # The reference non-aligned sender: pushes action 1 in both states and
    # likes the mismatched state better there, breaking action-matching.
    inst = binary_instance()
    cls = classify_instance(inst)
    assert cls.state_matching
    assert not cls.action_matching
    assert cls.sender_case == "prefers-a1"
    aligned = binary_instance(uS=((3, 0), (2, 1)))
    cls2 = classify_instance(aligned)
    assert cls2.action_matching
    assert cls2.sender_case == "prefers-a1"


def test_classify_case_order_on_ties():
    # Sender indifferent everywhere: aligned wins by the fixed order.
    inst = binary_instance(uS=((1, 1), (1, 1)))
    assert classify_instance(inst).sender_case == "aligned"


def test_classify_prefers_a2_and_indifferent():
    assert (
        classify_instance(binary_instance(uS=((0, 1), (0, 1)))).sender_case
        == "prefers-a2"
    )
    # Anti-aligned strict preferences fall through to "indifferent".
    assert (
        classify_instance(binary_instance(uS=((0, 1), (1, 0)))).sender_case
        == "indifferent"
    )


def test_classify_none_beyond_binary():
    third = F(1, 3)
    inst = Instance(
        prior=(third, third, third),
        sender_utility=((1, 0, 0), (0, 1, 0), (0, 0, 1)),
        receiver_utility=((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    )
    cls = classify_instance(inst)
    assert cls.sender_case == "none"
    assert cls.state_matching and cls.action_matching


def test_check_constraints_feasibility():
    inst = binary_instance()  # p = 1/4
    ok = check_constraints(ConstraintProfile((0, 0), (F(1, 4), 1)), inst)
    assert ok.feasible and ok.implementable
    bad = check_constraints(ConstraintProfile((HALF, 0), (F(3, 4), 1)), inst)
    assert bad.implementable and not bad.feasible


def test_check_constraints_dimension_mismatch():
    inst = Instance(
        prior=(HALF, HALF),
        sender_utility=((1, 0, 0), (0, 1, 0)),
        receiver_utility=((1, 0, 0), (0, 1, 0)),
    )
    status = check_constraints(vacuous_profile(3), inst)
    assert status.dimension_mismatch and not status.feasible


def test_compare_binding():
    a = ConstraintProfile((F(1, 4), 0), (HALF, 1))
    b = ConstraintProfile((0, 0), (1, 1))
    assert compare_binding(a, b) == "c-more-binding"
    assert compare_binding(b, a) == "c2-more-binding"
    assert compare_binding(a, a) == "equal"
    c = ConstraintProfile((F(1, 8), 0), (F(3, 4), HALF))
    assert compare_binding(a, c) == "incomparable"


def test_posterior_and_marginals():
    inst = binary_instance(p=HALF)
    scheme = SignalingScheme(((1, 0), (HALF, HALF)))
    lam = signal_marginals(inst, scheme)
    assert lam == (F(3, 4), F(1, 4))
    assert posterior(inst, scheme, 0) == (F(2, 3), F(1, 3))
    assert posterior(inst, scheme, 1) == (F(0), F(1))
    dead = SignalingScheme(((1, 0), (1, 0)))
    with pytest.raises(UnreachableSignalError):
        posterior(inst, dead, 1)


def test_evaluate_known_value():
    inst = binary_instance()
    scheme = SignalingScheme(((1, 0), (F(1, 3), F(2, 3))))
    ev = evaluate(inst, scheme, identity_policy(2))
    assert ev.receiver_eu == F(301, 400)
    assert ev.action_probs == (HALF, HALF)
    assert sum(ev.action_probs) == 1


def test_instance_document_roundtrip(tmp_path):
    inst = binary_instance()
    profile = ConstraintProfile((0, 0), (F(1, 4), 1))
    text = dump_instance(inst, profile)
    doc = json.loads(text)
    assert doc["states"] == 2 and doc["prior"] == ["1/4", "3/4"]
    inst2, profile2 = load_instance(text)
    assert inst2 == inst
    assert profile2 == profile
    inst3, none = load_instance(dump_instance(inst))
    assert none is None and inst3 == inst


def test_load_instance_rejects_garbage():
    with pytest.raises(ValidationError):
        load_instance("not json")
    with pytest.raises(ValidationError):
        load_instance("{}")
    with pytest.raises(ValidationError):
        load_instance(json.dumps({
            "states": 3, "actions": 2, "prior": ["1/2", "1/2"],
            "sender_utility": [["1", "0"], ["0", "1"]],
            "receiver_utility": [["1", "0"], ["0", "1"]],
        }))


# ---------------------------------------------------------------------------
# Property tests
# ---------------------------------------------------------------------------

utility_matrix = st.lists(
    st.lists(st.integers(0, 10), min_size=2, max_size=2),
    min_size=2, max_size=2,
).map(lambda rows: tuple(tuple(F(v) for v in row) for row in rows))


@settings(max_examples=60, deadline=None)
@given(uS=utility_matrix, uR=utility_matrix,
       a=st.integers(1, 5), b=st.integers(0, 7))
def test_classification_invariant_under_positive_affine_maps(uS, uR, a, b):
    inst = binary_instance(uS=uS, uR=uR)
    mapped = binary_instance(
        uS=tuple(tuple(a * v + b for v in row) for row in uS),
        uR=tuple(tuple(a * v + b for v in row) for row in uR),
    )
    assert classify_instance(inst) == classify_instance(mapped)


bound_pair = st.tuples(st.integers(0, 8), st.integers(0, 8)).map(
    lambda t: (F(min(t), 8), F(max(t), 8))
)
profile = st.tuples(bound_pair, bound_pair).map(
    lambda ps: ConstraintProfile(tuple(p[0] for p in ps), tuple(p[1] for p in ps))
)


@settings(max_examples=80, deadline=None)
@given(a=profile, b=profile, c=profile)
def test_compare_binding_is_a_partial_order(a, b, c):
    assert compare_binding(a, a) == "equal"
    ab, ba = compare_binding(a, b), compare_binding(b, a)
    flip = {"c-more-binding": "c2-more-binding",
            "c2-more-binding": "c-more-binding",
            "equal": "equal", "incomparable": "incomparable"}
    assert ba == flip[ab]
    if ab == "c-more-binding" and compare_binding(b, c) == "c-more-binding":
        assert compare_binding(a, c) == "c-more-binding"
