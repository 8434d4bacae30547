import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import disagreement_counts, pair_counts, q_by_loops
from tvcouple.combinatorics import (
    Assignment,
    affine_mod_assignment,
    check_combi_identity,
    check_distant_bound,
    check_perturbed_bound,
    check_step_inequality,
    count_disagreements,
    distance_profile_probs,
    distant_bound_threshold,
    exhaustive_min_distant,
    exhaustive_min_total,
    falling5,
    greedy_assignment,
    greedy_class_sizes,
    hamming_distance,
    local_search_min_distant,
    min_triple_assignment,
    pair_totals,
    q_count,
    q_search,
    subsets,
    total_disagreement_lower,
    total_disagreements,
)
from tvcouple.errors import DomainError, InvalidAssignment, ShapeError, TooLarge
from tvcouple.exact import big_f

# exact optimum of the Q-count over all 3^10 assignments at n = 5
Q_MAX_N5 = 10


def random_assignment(rng, n, k, zeros=0):
    subs = subsets(n, k)
    z = [s[rng.integers(n)] for s in subs]
    for i in rng.choice(len(subs), size=zeros, replace=False):
        z[i] = 0
    return Assignment(n, k, tuple(z))


def test_hamming():
    assert hamming_distance((1, 2, 3), (1, 2, 3)) == 0
    assert hamming_distance((1, 2, 3), (1, 4, 5)) == 2
    assert hamming_distance((1, 2, 3), (3, 4, 5)) == 2
    with pytest.raises(ShapeError):
        hamming_distance((1, 2), (1, 2, 3))


def test_pair_totals_examples():
    assert pair_totals(3, 2)[2] == 30
    assert pair_totals(2, 2) == {0: 6, 1: 24, 2: 6}
    for n in range(1, 7):
        assert pair_totals(n, 1)[1] == (n + 1) * n


@pytest.mark.parametrize("n,k", [(2, 1), (3, 2), (2, 2), (4, 3), (2, 3)])
def test_pair_totals_vs_enumeration(n, k):
    assert pair_totals(n, k) == pair_counts(n, k)


def test_pair_totals_sum():
    for n in range(1, 13):
        for k in range(1, 13):
            assert sum(pair_totals(n, k).values()) == math.comb(n + k, k) ** 2


@pytest.mark.parametrize("n,k,zeros", [(3, 2, 0), (2, 2, 1), (3, 1, 2), (4, 2, 3), (2, 3, 0)])
def test_disagreements_vs_brute_force(n, k, zeros):
    rng = np.random.default_rng(n * 10 + k)
    for _ in range(5):
        z = random_assignment(rng, n, k, zeros)
        assert count_disagreements(z).counts == {m: disagreement_counts(z.choices, n, k).get(m, 0) for m in range(1, min(n, k) + 1)}


def test_regression_32():
    g = greedy_assignment(3, 2)
    assert count_disagreements(g)[2] == 24
    assert count_disagreements(g).total == 54
    z = affine_mod_assignment(3, 2, 2, 5)
    assert count_disagreements(z)[2] == 20
    assert distant_bound_threshold(3, 2) == 24
    assert check_distant_bound(g)
    assert not check_distant_bound(z)


def test_affine_mod_other_multiplier():
    # multiplier 1 leaves some subset without a valid choice
    with pytest.raises(InvalidAssignment) as err:
        affine_mod_assignment(3, 2, 1, 5)
    s, v = err.value.subset, err.value.value
    assert v not in s and (sum(s) - 1) % 5 + 1 == v
    with pytest.raises(DomainError):
        affine_mod_assignment(3, 2, 2, 4)


def test_greedy_classes():
    assert greedy_class_sizes(3, 2) == {1: 6, 2: 3, 3: 1}
    assert greedy_class_sizes(5, 1) == {1: 5, 2: 1}
    for n, k in [(3, 2), (5, 3), (4, 4)]:
        counts = greedy_assignment(n, k).value_counts()
        assert {v: counts.get(v, 0) for v in range(1, k + 2)} == greedy_class_sizes(n, k)


def test_greedy_attains_bounds():
    for n in range(1, 9):
        for k in range(1, n + 1):
            if math.comb(n + k, k) > 10**4:
                continue
            g = greedy_assignment(n, k)
            prof = count_disagreements(g)
            assert prof[k] == distant_bound_threshold(n, k)
            assert prof.total == total_disagreement_lower(n, k) == total_disagreements(g)


def test_threshold_examples():
    assert distant_bound_threshold(3, 2) == 24
    for n in range(1, 8):
        assert distant_bound_threshold(n, 1) == 2 * n
    t = distant_bound_threshold(22, 2)
    assert t == Fraction(4, 24) * math.factorial(24) // (4 * math.factorial(20))
    assert t.denominator == 1


def test_total_lower_examples():
    assert total_disagreement_lower(3, 2) == 54
    assert total_disagreement_lower(2, 2) == 22
    for n in range(1, 8):
        assert total_disagreement_lower(n, 1) == 2 * n


@pytest.mark.parametrize(
    "n,k,distant,total",
    [(2, 1, 4, 4), (3, 1, 6, 6), (2, 2, 6, 22), (2, 3, 30, 70), (3, 2, 20, 54)],
)
def test_exhaustive(n, k, distant, total):
    d, zd = exhaustive_min_distant(n, k)
    t, zt = exhaustive_min_total(n, k)
    assert (d, t) == (distant, total)
    assert t == total_disagreement_lower(n, k)
    assert count_disagreements(zd)[min(n, k)] == d
    assert total_disagreements(zt) == t == count_disagreements(zt).total


def test_exhaustive_k1_meets_threshold():
    for n in range(1, 5):
        assert exhaustive_min_distant(n, 1)[0] == distant_bound_threshold(n, 1)


def test_exhaustive_limit():
    with pytest.raises(TooLarge):
        exhaustive_min_distant(4, 2)


def test_identity():
    assert check_combi_identity(2, 2).lhs == 11 == check_combi_identity(2, 2).rhs
    for n in range(1, 10):
        c = check_combi_identity(n, 1)
        assert c.lhs == c.rhs == n
    assert all(check_combi_identity(n, k) for n in range(1, 13) for k in range(1, n + 1))


def test_perturbed_bound():
    g = greedy_assignment(3, 2)
    r = check_perturbed_bound(g)
    assert r and r.slack == 0 and r.epsilon == 0
    z = Assignment(3, 2, (0,) + g.choices[1:])
    r = check_perturbed_bound(z)
    assert r.epsilon == Fraction(1, 10) and r.holds
    rng = np.random.default_rng(5)
    for _ in range(1000):
        assert check_perturbed_bound(random_assignment(rng, 3, 2, int(rng.integers(3))))


def test_profiles():
    assert distance_profile_probs(2, 2) == {0: Fraction(1, 6), 1: Fraction(2, 3), 2: Fraction(1, 6)}
    for n in range(1, 8):
        assert distance_profile_probs(n, 1)[1] == Fraction(n, n + 1)
        assert distance_profile_probs(n, 1) == {m: Fraction(c, (n + 1) ** 2) for m, c in pair_counts(n, 1).items()}
    for n in range(1, 11):
        for k in range(1, 11):
            assert sum(distance_profile_probs(n, k).values()) == 1


def test_step_inequality():
    c = check_step_inequality(big_f, 5, 3)
    assert c.lhs == pytest.approx(c.rhs, abs=1e-12) and c.holds
    assert all(check_step_inequality(lambda x: 2 * x, n, k).holds for n in range(1, 8) for k in range(1, n + 1))
    c = check_step_inequality(lambda x: x, 4, 2)
    assert c.lhs < c.rhs and not c.holds
    c = check_step_inequality(lambda x: 2 * x, 6, 3, eps=0.01)
    assert c.eps_holds
    assert check_step_inequality(big_f, 6, 3).eps_holds is None
    with pytest.raises(DomainError):
        check_step_inequality(big_f, 6, 3, eps=1.5)


def test_local_search_small():
    r = local_search_min_distant(3, 2, seed=0, restarts=50)
    assert r.best <= 20 and r.below_threshold
    assert count_disagreements(r.witness)[2] == r.best
    g = local_search_min_distant(6, 2, restarts=1, start="greedy")
    assert g.best == distant_bound_threshold(6, 2) and not g.below_threshold


def test_local_search_deterministic():
    a = local_search_min_distant(4, 2, seed=3, restarts=5)
    b = local_search_min_distant(4, 2, seed=3, restarts=5)
    assert a.best_per_restart == b.best_per_restart


def test_assignment_validation():
    with pytest.raises(InvalidAssignment):
        Assignment(2, 1, (3, 1, 2))
    with pytest.raises(ShapeError):
        Assignment(2, 1, (1, 1))
    g = greedy_assignment(2, 1)
    assert Assignment.from_mapping(2, 1, g.as_dict()) == g


@pytest.mark.parametrize("n", range(5, 9))
def test_q_count_min_assignment(n):
    z = min_triple_assignment(n)
    trip = [tuple(s) for s in subsets(3, n - 3)]
    ref = q_by_loops(dict(zip(trip, z)), n)
    assert q_count(z, n) == ref == falling5(n) // 20


@given(st.integers(5, 7), st.integers(0, 2**32 - 1))
def test_q_count_random(n, seed):
    rng = np.random.default_rng(seed)
    trip = subsets(3, n - 3)
    z = [s[rng.integers(3)] for s in trip]
    q = q_count(z, n)
    assert q == q_by_loops(dict(zip(trip, z)), n)
    assert 0 <= q <= falling5(n) // 4


def test_q_count_rejects():
    with pytest.raises(DomainError):
        q_count([1] * 10, 5)


def test_q_search_exhaustive_n5():
    r = q_search(5)
    assert r.exhaustive and r.best == Q_MAX_N5
    assert r.min_value == 6 and r.reaches_min_plus_4
    assert q_count(r.witness, 5) == r.best <= r.pair_total == 30


def test_q_search_local():
    r = q_search(7, seed=1, restarts=10)
    assert r.best >= r.min_value
    assert q_count(r.witness, 7) == r.best <= falling5(7) // 4
    with pytest.raises(TooLarge):
        q_search(13)
