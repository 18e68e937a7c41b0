import itertools

import pytest
from hypothesis import given, settings, strategies as st

from aptk import (
    AptError,
    CycleCapExceededError,
    Lts,
    ParikhVector,
    PreconditionError,
    bisimilar,
    cycles_same_pv,
    is_deterministic,
    is_persistent,
    is_reversible,
    is_totally_reachable,
    isomorphic,
    language_equivalent,
    reachable_states,
    small_cycle_parikh_vectors,
    spanning_tree,
    strongly_connected_components,
    weak_small_cycle_property,
    weakly_connected_components,
)

from conftest import EXAMPLE_ARCS


def test_states_and_labels_must_be_disjoint():
    lts = Lts()
    lts.add_state("x", initial=True)
    with pytest.raises(AptError):
        lts.add_label("x")


def test_arcs_deduplicate():
    lts = Lts.from_data("s0", [("s0", "a", "s1"), ("s0", "a", "s1")])
    assert len(lts.arcs) == 1


def test_reachable_states_example(example_lts):
    assert reachable_states(example_lts) == ["s0", "s1", "s2", "s3", "s4", "s5", "s6"]


def test_reachable_single_state():
    lts = Lts.from_data("s0", [])
    assert reachable_states(lts) == ["s0"]


def test_reachable_excludes_unreachable_chain():
    lts = Lts.from_data("s0", [("s1", "a", "s2")], states=["s0", "s1", "s2"])
    assert reachable_states(lts) == ["s0"]


def test_totally_reachable(example_lts):
    assert is_totally_reachable(example_lts)


def test_totally_reachable_isolated_state():
    lts = Lts.from_data("s0", [("s0", "a", "s0")], states=["lost"])
    check = is_totally_reachable(lts)
    assert not check and check.witness == "lost"


def test_totally_reachable_unused_label():
    lts = Lts.from_data("s0", [("s0", "a", "s0")], labels=["e"])
    check = is_totally_reachable(lts)
    assert not check and check.witness == "e"


def test_deterministic(example_lts):
    assert is_deterministic(example_lts)


def test_nondeterministic_witness():
    lts = Lts.from_data("s0", [("s0", "a", "s1"), ("s0", "a", "s2")])
    check = is_deterministic(lts)
    assert not check
    state, label, t1, t2 = check.witness
    assert (state, label) == ("s0", "a") and {t1, t2} == {"s1", "s2"}


def test_deterministic_no_arcs():
    assert is_deterministic(Lts.from_data("s0", []))


def test_persistent(example_lts):
    assert is_persistent(example_lts)


def test_persistent_missing_diamond():
    lts = Lts.from_data("s0", [("s0", "a", "s1"), ("s0", "b", "s2")])
    check = is_persistent(lts)
    assert not check and check.witness == ("s0", "a", "b")


def test_persistent_single_label_trivial():
    lts = Lts.from_data("s0", [("s0", "a", "s1"), ("s1", "a", "s0")])
    assert is_persistent(lts)


def test_persistent_requires_determinism():
    lts = Lts.from_data("s0", [("s0", "a", "s1"), ("s0", "a", "s2")])
    with pytest.raises(PreconditionError):
        is_persistent(lts)


def test_reversible(example_lts):
    assert is_reversible(example_lts)


def test_reversible_fails_on_word():
    lts = Lts.from_data("s0", [("s0", "a", "s1")])
    check = is_reversible(lts)
    assert not check and check.witness == "s1"


def test_reversible_single_state():
    assert is_reversible(Lts.from_data("s0", []))


def test_scc_example_single_component(example_lts):
    assert strongly_connected_components(example_lts) == [list(example_lts.states)]


def test_wcc_two_disjoint_states():
    lts = Lts.from_data("s0", [], states=["s1"])
    assert weakly_connected_components(lts) == [["s0"], ["s1"]]


def test_scc_vs_wcc_single_arc():
    lts = Lts.from_data("s0", [("s0", "a", "s1")])
    assert strongly_connected_components(lts) == [["s0"], ["s1"]]
    assert weakly_connected_components(lts) == [["s0", "s1"]]


def test_reversible_iff_one_scc_on_example(example_lts):
    rev = bool(is_reversible(example_lts))
    one_scc = len(strongly_connected_components(example_lts)) == 1
    assert rev == one_scc


def test_spanning_tree_example(example_lts):
    tree = spanning_tree(example_lts)
    assert dict(tree.path_parikh["s3"].items()) == {"a": 1, "b": 1}
    assert tree.path_parikh["s0"] == ParikhVector()
    # replay every tree path and compare against the recorded Parikh vector
    for state in example_lts.states:
        path = []
        cursor = state
        while cursor in tree.parent_arc:
            arc = tree.parent_arc[cursor]
            path.append(arc.label)
            cursor = arc.source
        counts = {}
        for label in path:
            counts[label] = counts.get(label, 0) + 1
        assert ParikhVector(counts) == tree.path_parikh[state]


def test_spanning_tree_single_state():
    tree = spanning_tree(Lts.from_data("s0", []))
    assert tree.chords == [] and tree.parent_arc == {}


def test_spanning_tree_cycle_has_chord():
    lts = Lts.from_data("s0", [("s0", "a", "s1"), ("s1", "b", "s0")])
    tree = spanning_tree(lts)
    assert len(tree.chords) == 1 and tree.chords[0].target == "s0"


def test_spanning_tree_rejects_unreachable():
    lts = Lts.from_data("s0", [], states=["lost"])
    with pytest.raises(PreconditionError):
        spanning_tree(lts)


def test_small_cycles_example(example_lts):
    assert small_cycle_parikh_vectors(example_lts) == [
        ParikhVector({"a": 1, "b": 1, "c": 1, "d": 1})
    ]
    assert cycles_same_pv(example_lts)


def test_small_cycles_acyclic():
    lts = Lts.from_data("s0", [("s0", "a", "s1")])
    assert small_cycle_parikh_vectors(lts) == []
    assert cycles_same_pv(lts)


def test_small_cycles_two_self_loops():
    # brute-force oracle: the only cycles of length <= 2 here are the loops
    lts = Lts.from_data("s0", [("s0", "a", "s0"), ("s0", "b", "s0")])
    vectors = small_cycle_parikh_vectors(lts)
    assert sorted(tuple(sorted(v.items())) for v in vectors) == [
        (("a", 1),), (("b", 1),)
    ]
    assert not cycles_same_pv(lts)
    assert weak_small_cycle_property(lts)


def test_small_cycles_minimality_filter():
    # loop (a) at s0 and loop (a b) via s1; the latter is not minimal
    lts = Lts.from_data(
        "s0", [("s0", "a", "s0"), ("s0", "a", "s1"), ("s1", "b", "s0")]
    )
    vectors = small_cycle_parikh_vectors(lts)
    assert vectors == [ParikhVector({"a": 1})]
    assert cycles_same_pv(lts)


def test_small_cycles_antichain(example_lts):
    vectors = small_cycle_parikh_vectors(example_lts)
    for v1, v2 in itertools.permutations(vectors, 2):
        assert not v1.strictly_below(v2)


def test_weak_but_not_strong_overlap():
    # cycles (a b) and (a c): incomparable vectors sharing the label a
    lts = Lts.from_data(
        "s0", [("s0", "a", "s1"), ("s1", "b", "s0"), ("s1", "c", "s0")]
    )
    vectors = small_cycle_parikh_vectors(lts)
    assert len(vectors) == 2
    assert not weak_small_cycle_property(lts)


def test_cycle_cap():
    lts = Lts.from_data("s0", [("s0", "a", "s1"), ("s1", "b", "s0"), ("s0", "c", "s0")])
    with pytest.raises(CycleCapExceededError):
        small_cycle_parikh_vectors(lts, cycle_cap=1)


def test_isomorphic_identity(example_lts):
    check = isomorphic(example_lts, example_lts)
    assert check and check.witness == {s: s for s in example_lts.states}


def test_isomorphic_relabelled_states(example_lts):
    other = Lts.from_data("t0", [(f"t{a[1:]}", lab, f"t{b[1:]}") for a, lab, b in EXAMPLE_ARCS])
    check = isomorphic(example_lts, other)
    assert check and check.witness["s0"] == "t0"


def test_isomorphic_label_mismatch():
    l1 = Lts.from_data("s0", [("s0", "a", "s0")])
    l2 = Lts.from_data("s0", [("s0", "b", "s0")])
    assert not isomorphic(l1, l2)


def test_isomorphic_cardinality_mismatch():
    l1 = Lts.from_data("s0", [("s0", "a", "s1")])
    l2 = Lts.from_data("s0", [("s0", "a", "s1"), ("s1", "a", "s2")])
    assert not isomorphic(l1, l2)


def test_isomorphic_nondeterministic_backtracking():
    l1 = Lts.from_data("s0", [("s0", "a", "s1"), ("s0", "a", "s2"), ("s1", "b", "s1")])
    l2 = Lts.from_data("t0", [("t0", "a", "t2"), ("t0", "a", "t1"), ("t2", "b", "t2")])
    check = isomorphic(l1, l2)
    assert check and check.witness["s1"] == "t2"


def test_bisimilar_self(example_lts):
    assert bisimilar(example_lts, example_lts)


def test_bisimilar_loop_unrolling():
    loop1 = Lts.from_data("x0", [("x0", "a", "x0")])
    loop2 = Lts.from_data("y0", [("y0", "a", "y1"), ("y1", "a", "y0")])
    check = bisimilar(loop1, loop2)
    assert check and set(check.witness) == {("x0", "y0"), ("x0", "y1")}
    assert not isomorphic(loop1, loop2)


def test_bisimilar_detects_difference():
    l1 = Lts.from_data("s0", [("s0", "a", "s1"), ("s1", "b", "s2")])
    l2 = Lts.from_data("t0", [("t0", "a", "t1")])
    assert not bisimilar(l1, l2)


def test_language_equivalent_self(example_lts):
    assert language_equivalent(example_lts, example_lts)


def test_language_distinguishing_word_is_shortest():
    l1 = Lts.from_data("s0", [("s0", "a", "s1"), ("s1", "b", "s2")])
    l2 = Lts.from_data("t0", [("t0", "a", "t1"), ("t1", "b", "t2"), ("t1", "c", "t3")])
    check = language_equivalent(l1, l2)
    assert not check and check.witness == ["a", "c"]


def test_language_nondeterministic_subset_construction():
    # both accept {eps, a, ab}; the left one via two a-branches
    l1 = Lts.from_data(
        "s0", [("s0", "a", "s1"), ("s0", "a", "s2"), ("s2", "b", "s3")]
    )
    l2 = Lts.from_data("t0", [("t0", "a", "t1"), ("t1", "b", "t2")])
    assert language_equivalent(l1, l2)


# -- randomized structure properties ---------------------------------------


@st.composite
def small_lts(draw):
    n_states = draw(st.integers(1, 5))
    n_labels = draw(st.integers(1, 3))
    states = [f"s{i}" for i in range(n_states)]
    labels = [chr(ord("a") + i) for i in range(n_labels)]
    arcs = []
    for src in states:
        for label in labels:
            choice = draw(st.integers(-1, n_states - 1))
            if choice >= 0:
                arcs.append((src, label, states[choice]))
    return Lts.from_data("s0", arcs, states=states, labels=labels)


@settings(max_examples=60, deadline=None)
@given(small_lts())
def test_random_spanning_tree_replay(lts):
    reach = set(reachable_states(lts))
    if reach != set(lts.states):
        return
    tree = spanning_tree(lts)
    for state in lts.states:
        cursor, counts = state, {}
        while cursor in tree.parent_arc:
            arc = tree.parent_arc[cursor]
            counts[arc.label] = counts.get(arc.label, 0) + 1
            cursor = arc.source
        assert cursor == lts.initial
        assert ParikhVector(counts) == tree.path_parikh[state]


@settings(max_examples=60, deadline=None)
@given(small_lts())
def test_random_small_cycles_antichain(lts):
    vectors = small_cycle_parikh_vectors(lts)
    for v1, v2 in itertools.permutations(vectors, 2):
        assert not v1.strictly_below(v2)


@settings(max_examples=40, deadline=None)
@given(small_lts())
def test_random_isomorphic_copy_full_chain(lts):
    renamed = Lts.from_data(
        "t0",
        [(f"t{a[1:]}", lab, f"t{b[1:]}") for a, lab, b in
         [(x.source, x.label, x.target) for x in lts.arcs]],
        states=[f"t{s[1:]}" for s in lts.states],
        labels=list(lts.labels),
    )
    assert isomorphic(lts, renamed)
    assert bisimilar(lts, renamed)
    assert language_equivalent(lts, renamed)


@settings(max_examples=60, deadline=None)
@given(small_lts())
def test_random_reversible_iff_single_scc_when_totally_reachable(lts):
    if set(reachable_states(lts)) != set(lts.states):
        return
    rev = bool(is_reversible(lts))
    assert rev == (len(strongly_connected_components(lts)) == 1)
