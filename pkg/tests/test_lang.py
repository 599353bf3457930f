import random

import pytest
from hypothesis import given, settings, strategies as st

from resolvability.automata import LassoWord, ParityAutomaton, safe_approximation
from resolvability.errors import InputError
from resolvability.gallery import fig1a, fig1b, fig3, fig4, fig5, fig7, parity_lang
from resolvability.errors import budget_for
from resolvability.lang import (
    _find_joint_accepting_lasso,
    _profile_counterexample,
    _RankComplement,
    complement_buchi,
    contains,
    detect_flower,
    equivalent,
    is_empty,
    lasso_membership,
    parity_to_buchi,
    short_lassos,
    successor_counterexample,
)

from generators import all_lassos, random_automaton, random_lasso
from oracles import has_flower_bruteforce, lasso_run_search, subset_determinize_safety


def test_fig3_accepts_ab_omega():
    assert lasso_membership(fig3(), LassoWord((), ("a", "b")))


def test_fig1a_is_universal():
    a = fig1a()
    for w in all_lassos(a.alphabet, 4):
        assert lasso_membership(a, w)


def test_membership_rejects_foreign_letters():
    with pytest.raises(InputError):
        lasso_membership(fig3(), LassoWord((), ("z",)))


@pytest.mark.parametrize("seed", range(40))
def test_membership_matches_run_search(seed):
    rng = random.Random(seed)
    a = random_automaton(rng, n=rng.randint(1, 3), bounds=rng.choice([(1, 2), (0, 1), (0, 3)]))
    for _ in range(5):
        w = random_lasso(rng)
        assert lasso_membership(a, w) == lasso_run_search(a, w)


@pytest.mark.parametrize("seed", range(25))
def test_parity_to_buchi_preserves_language(seed):
    rng = random.Random(100 + seed)
    a = random_automaton(rng, n=2, bounds=(0, 3))
    b = parity_to_buchi(a)
    assert b.bounds == (1, 2)
    for w in all_lassos(a.alphabet, 4):
        assert lasso_membership(a, w) == lasso_membership(b, w)


@pytest.mark.parametrize("seed", range(20))
def test_complement_xor(seed):
    rng = random.Random(200 + seed)
    b = random_automaton(rng, n=2, bounds=(1, 2))
    c = complement_buchi(b)
    for w in all_lassos(b.alphabet, 4):
        assert lasso_membership(b, w) != lasso_membership(c, w)


@pytest.mark.parametrize("seed", range(30))
def test_containment_routes_agree(seed):
    rng = random.Random(300 + seed)
    bounds = rng.choice([(1, 2), (0, 1)])
    a = random_automaton(rng, n=2, bounds=bounds)
    b = random_automaton(rng, n=2, bounds=bounds)
    fast = contains(a, b)
    slow = contains(a, b, use_simulation=False)
    assert fast.holds == slow.holds
    for v in (fast, slow):
        if not v.holds:
            assert lasso_membership(a, v.counterexample)
            assert not lasso_membership(b, v.counterexample)
    if fast.holds:
        for w in all_lassos(a.alphabet, 4):
            assert not lasso_membership(a, w) or lasso_membership(b, w)


@pytest.mark.parametrize("seed", range(30))
def test_parity_target_containment(seed):
    rng = random.Random(700 + seed)
    a = random_automaton(rng, n=rng.randint(1, 3), bounds=(0, 3))
    b = random_automaton(rng, n=rng.randint(1, 3), bounds=rng.choice([(0, 3), (0, 2), (1, 4)]))
    v = contains(a, b, use_simulation=False)
    if v.holds:
        for w in all_lassos(a.alphabet, 4):
            assert not lasso_membership(a, w) or lasso_membership(b, w)
    else:
        assert lasso_membership(a, v.counterexample) and not lasso_membership(b, v.counterexample)


@pytest.mark.parametrize("seed", range(20))
def test_profile_route_agrees_with_rank_route(seed):
    rng = random.Random(800 + seed)
    a = random_automaton(rng, n=rng.randint(1, 3), bounds=(0, 3))
    # one-state targets keep the sliced Büchi automaton small enough for ranks
    b = random_automaton(rng, n=1, bounds=(0, 2))
    by_profiles = _profile_counterexample(a, b, budget_for())
    by_ranks = _find_joint_accepting_lasso(a, _RankComplement(parity_to_buchi(b)), budget_for())
    assert (by_profiles is None) == (by_ranks is None)
    for w in (by_profiles, by_ranks):
        if w is not None:
            assert lasso_membership(a, w) and not lasso_membership(b, w)


def test_equivalence_is_reflexive_on_gallery():
    for a in (fig1a(), fig1b(), fig3(), fig4()):
        assert equivalent(a, a)


def test_fig3_is_universal_but_finitely_many_b_is_not():
    universal = ParityAutomaton(states=["u"], alphabet=["a", "b"], initial="u",
                                transitions=[("u", "a", 0, "u"), ("u", "b", 0, "u")], bounds=(0, 1))
    assert contains(universal, fig3()).holds
    few_b = ParityAutomaton(states=["u"], alphabet=["a", "b"], initial="u",
                            transitions=[("u", "a", 0, "u"), ("u", "b", 1, "u")], bounds=(0, 1))
    for route in (True, False):
        v = contains(universal, few_b, use_simulation=route)
        assert not v.holds
        assert not lasso_membership(few_b, v.counterexample)


def test_emptiness():
    assert not is_empty(fig3())
    dead = ParityAutomaton(states=["p"], alphabet=["a"], initial="p", transitions=[("p", "a", 1, "p")])
    assert is_empty(dead)


def test_short_lassos_are_bounded_and_distinct():
    ws = list(short_lassos(["a", "b"], max_candidates=50))
    assert len(ws) == 50
    assert len(set(ws)) == 50


def test_successor_counterexample_none_on_sd_fixture():
    a = fig3()
    assert successor_counterexample(a, "q0", "a") is None


def test_successor_counterexample_on_fig1a():
    # both guesses leave a universal residual
    assert successor_counterexample(fig1a(), "q0", "a") is None


def test_successor_counterexample_found():
    a = ParityAutomaton(
        states=["p", "good", "bad"], alphabet=["a"], initial="p",
        transitions=[("p", "a", 1, "good"), ("p", "a", 1, "bad"),
                     ("good", "a", 2, "good"), ("bad", "a", 1, "bad")],
    )
    p, r, w = successor_counterexample(a, "p", "a")
    assert {p, r} == {"good", "bad"}
    assert lasso_membership(a.with_initial(p), w) != lasso_membership(a.with_initial(r), w)


# ---------------------------------------------------------------------------
# flowers


def test_parity_language_has_flower():
    f = detect_flower(parity_lang([1, 2]), (1, 2))
    assert f is not None and f.state == "q"
    assert set(f.loops) == {1, 2}


def test_wider_parity_language():
    assert detect_flower(parity_lang([0, 3]), (0, 3)) is not None
    assert detect_flower(parity_lang([1, 2]), (1, 3)) is None


def test_flower_needs_determinism():
    with pytest.raises(InputError):
        detect_flower(fig3(), (0, 1))


@pytest.mark.parametrize("fixture", [fig1b, fig3, fig4])
def test_safety_fixtures_have_no_flower(fixture):
    d = subset_determinize_safety(safe_approximation(fixture()))
    assert d.is_deterministic()
    for span in [(0, 1), (1, 2)]:
        assert detect_flower(d, span) is None
        assert not has_flower_bruteforce(d, span)


@pytest.mark.parametrize("seed", range(20))
def test_flower_matches_bruteforce(seed):
    rng = random.Random(400 + seed)
    d = random_automaton(rng, n=rng.randint(1, 4), bounds=(0, 3), deterministic=True)
    for span in [(0, 1), (1, 2), (0, 2), (1, 3)]:
        assert (detect_flower(d, span) is not None) == has_flower_bruteforce(d, span)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_flower_loops_realise_their_values(seed):
    rng = random.Random(seed)
    d = random_automaton(rng, n=3, bounds=(0, 3), deterministic=True)
    f = detect_flower(d, (0, 1))
    if f is None:
        return
    for k, word in f.loops.items():
        q, top = f.state, -1
        for x in word:
            (t,) = d.delta(q, x)
            top = max(top, t.priority)
            q = t.dst
        assert q == f.state
        assert top == 2 * f.shift + k


def test_fig5_and_fig7_members():
    assert lasso_membership(fig5(), LassoWord((), ("x", "a", "z")))
    a = fig7(2)
    assert lasso_membership(a, LassoWord((), ("$", "1", "#", "1")))
    assert not lasso_membership(a, LassoWord((), ("$", "2", "#", "1")))
