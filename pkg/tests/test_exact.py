import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import clock_agreement_by_integration, race_agreement_first_step
from strategies import families, intro_family, pairs, random_pair
from tvcouple.bounds import complement_family, witness_complement_family
from tvcouple.couplings import sample_indices
from tvcouple.dist import DiscreteDistribution, Family, tv_distance
from tvcouple.errors import DomainError, UniverseMismatch
from tvcouple.exact import (
    agreement,
    big_f,
    coupling_i_agreement,
    coupling_i_disagreement_formula,
    coupling_i_tuple_per_atom,
    coupling_ii_agreement,
    coupling_ii_tuple_per_atom,
    dominance_check,
    ktuple_agreement_lower,
    ktuple_alpha,
    ktuple_bound,
    tightness_condition,
    tuple_agreement,
)

U3 = [1, 2, 3]
P_EX = DiscreteDistribution(U3, [2 / 3, 1 / 3, 0])
Q_EX = DiscreteDistribution(U3, [1 / 3, 0, 2 / 3])


def test_big_f():
    assert big_f(0) == 0 and big_f(1) == 1
    assert big_f(0.5) == pytest.approx(2 / 3, abs=1e-15)
    for bad in (-0.1, 1.1):
        with pytest.raises(DomainError):
            big_f(bad)


def test_clock_example():
    ag = coupling_ii_agreement(P_EX, Q_EX)
    assert ag.per_atom == pytest.approx([2 / 7, 0, 0], abs=1e-15)
    assert ag.total == pytest.approx(2 / 7, abs=1e-15)
    assert ag[1] == pytest.approx(2 / 7)


def test_race_example():
    assert coupling_i_agreement(P_EX, Q_EX).total == pytest.approx(4 / 15, abs=1e-15)
    fam = intro_family()
    assert coupling_i_agreement(fam["X"], fam["Y"]).total == pytest.approx(1 / 3, abs=1e-15)


def test_identical_and_disjoint():
    p = DiscreteDistribution(U3, [0.2, 0.3, 0.5])
    for kind in ("i", "ii"):
        ag = agreement(p, p, kind)
        assert ag.total == pytest.approx(1.0, abs=1e-15)
        assert ag.per_atom == pytest.approx(p.p, abs=1e-15)
    a = DiscreteDistribution(U3, [1, 0, 0])
    b = DiscreteDistribution(U3, [0, 0.5, 0.5])
    assert coupling_ii_agreement(a, b).total == 0
    assert coupling_i_agreement(a, b).total == 0


def test_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        coupling_ii_agreement(P_EX, DiscreteDistribution([1, 2], [0.5, 0.5]))


@settings(max_examples=40)
@given(pairs(max_size=5))
def test_clock_formula_matches_integration(pq):
    p, q = pq
    ref = clock_agreement_by_integration(p.p, q.p)
    assert coupling_ii_agreement(p, q).per_atom == pytest.approx(ref, abs=1e-10)


@given(pairs())
def test_race_formula_matches_first_step_analysis(pq):
    p, q = pq
    ref = [float(x) for x in race_agreement_first_step(p.p, q.p)]
    assert coupling_i_agreement(p, q).per_atom == pytest.approx(ref, abs=1e-12)


@given(pairs())
def test_race_recursion_matches_closed_form(pq):
    p, q = pq
    rec = coupling_i_tuple_per_atom(np.vstack([p.p, q.p]))
    assert rec == pytest.approx(coupling_i_agreement(p, q).per_atom, abs=1e-12)
    clocks = coupling_ii_tuple_per_atom(np.vstack([p.p, q.p]))
    assert clocks == pytest.approx(coupling_ii_agreement(p, q).per_atom, abs=1e-12)


@given(pairs())
def test_disagreement_bound_and_tightness(pq):
    p, q = pq
    alpha = tv_distance(p, q)
    F = big_f(min(alpha, 1.0))
    d2 = coupling_ii_agreement(p, q).disagreement
    d1 = coupling_i_agreement(p, q).disagreement
    assert d1 == pytest.approx(coupling_i_disagreement_formula(p, q), abs=1e-12)
    assert d2 <= d1 + 1e-12 <= F + 2e-12
    tight = tightness_condition(p, q)
    assert (abs(d1 - F) <= 1e-12) == tight
    if tight:
        assert abs(d2 - F) <= 1e-12


@given(pairs())
def test_symmetry(pq):
    p, q = pq
    for kind in ("i", "ii"):
        assert agreement(p, q, kind).total == pytest.approx(agreement(q, p, kind).total, abs=1e-15)


@given(pairs(max_size=8))
def test_dominance(pq):
    assert dominance_check(*pq).holds


def test_dominance_examples():
    r = dominance_check(P_EX, Q_EX)
    assert r.holds and r.witness is None
    assert dominance_check(P_EX, P_EX).holds


def test_tightness_examples():
    fam = intro_family()
    assert tightness_condition(fam["X"], fam["Y"])
    assert not tightness_condition(P_EX, Q_EX)
    assert tightness_condition(P_EX, P_EX)


def test_ktuple_bound_values():
    assert ktuple_bound(0.5, 2) == pytest.approx(2 / 3)
    assert ktuple_bound(0.0, 5) == 0
    assert ktuple_bound(0.5, 3) == pytest.approx(0.75)
    with pytest.raises(DomainError):
        ktuple_bound(0.5, 1)
    with pytest.raises(DomainError):
        ktuple_bound(1.5, 2)


@pytest.mark.parametrize("n", range(2, 9))
def test_complement_families(n):
    fam = witness_complement_family(n)
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            assert coupling_ii_agreement(fam.members[i], fam.members[j]).total == pytest.approx((n - 1) / (n + 1), abs=1e-12)
    sets = complement_family(n)
    for k in range(2, n + 1):
        assert ktuple_agreement_lower(sets.members[:k]) == pytest.approx(1 - k / n, abs=1e-12)


@given(families(max_members=5))
def test_ktuple_lower_vs_bound(fam):
    lower = ktuple_agreement_lower(fam.members)
    alpha = ktuple_alpha(fam.members)
    assert 1 - lower <= ktuple_bound(min(max(alpha, 0.0), 1.0), len(fam)) + 1e-12


@given(families(max_members=4, max_size=4))
def test_tuple_agreement_at_least_ratio(fam):
    lower = ktuple_agreement_lower(fam.members)
    assert tuple_agreement(fam.members, "ii") >= lower - 1e-12
    assert tuple_agreement(fam.members, "i") >= lower - 1e-12
    assert tuple_agreement(fam.members, "ii") >= tuple_agreement(fam.members, "i") - 1e-12


@given(pairs())
def test_two_member_ratio_identity(pq):
    p, q = pq
    alpha = tv_distance(p, q)
    assert ktuple_agreement_lower([p, q]) == pytest.approx(1 - big_f(min(alpha, 1.0)), abs=1e-12)


@pytest.mark.parametrize("kind", ["i", "ii"])
def test_per_atom_matches_monte_carlo(kind):
    rng = np.random.default_rng(31)
    N = 10**5
    for _ in range(3):
        p, q = random_pair(rng)
        fam = Family(("p", "q"), (p, q))
        idx = sample_indices(fam, kind, N, seed=int(rng.integers(2**32)))
        agree = idx[:, 0] == idx[:, 1]
        freq = np.bincount(idx[agree, 0], minlength=len(p.universe)) / N
        exact = agreement(p, q, kind).per_atom
        assert np.all(np.abs(freq - exact) <= 4 * np.sqrt(exact * (1 - exact) / N) + 1e-12)


@pytest.mark.parametrize("kind", ["i", "ii"])
def test_tuple_formulas_match_monte_carlo(kind):
    rng = np.random.default_rng(8)
    N = 10**5
    U = range(4)
    fam = Family(("a", "b", "c"), tuple(DiscreteDistribution(U, rng.dirichlet(np.ones(4))) for _ in range(3)))
    idx = sample_indices(fam, kind, N, seed=2)
    est = np.mean((idx == idx[:, :1]).all(axis=1))
    exact = tuple_agreement(fam.members, kind)
    assert abs(est - exact) <= 4 * math.sqrt(exact * (1 - exact) / N)


def test_exact_rational_cross_check():
    # intro pair in exact arithmetic: both atoms of overlap contribute 1/3
    ref = race_agreement_first_step([Fraction(1, 2), Fraction(1, 2), 0], [Fraction(1, 2), 0, Fraction(1, 2)])
    assert ref == [Fraction(1, 3), 0, 0]
