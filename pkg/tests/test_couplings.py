import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from strategies import families, intro_family, random_family
from tvcouple.couplings import (
    KINDS,
    coupling_ii_indices,
    sample,
    sample_coupling_i,
    sample_coupling_ii,
    sample_indices,
)
from tvcouple.dist import DiscreteDistribution, Family, tv_distance
from tvcouple.errors import DomainError, ExhaustedStream, UniverseMismatch
from tvcouple.exact import big_f, ktuple_alpha, ktuple_bound
from tvcouple.mc import disagreement_frequencies
from tvcouple.randomness import ClockTable, PoissonStream, clocks_for

N = 10**5


def _fam(*rows, universe=(1, 2)):
    return Family(tuple(f"M{i}" for i in range(len(rows))), tuple(DiscreteDistribution(universe, r) for r in rows))


def test_coupling_ii_hand_example():
    fam = _fam([0.5, 0.5], [0.1, 0.9])
    clocks = ClockTable((1, 2), (0.2, 0.9), seed=0)
    v = sample_coupling_ii(fam, clocks)
    assert v["M0"] == 1 and v["M1"] == 2


def test_coupling_ii_point_mass_and_identical_members():
    fam = _fam([0, 1], [0.3, 0.7], [0.3, 0.7])
    for seed in range(50):
        v = sample(fam, "ii", seed)
        assert v["M0"] == 2
        assert v["M1"] == v["M2"]


def test_coupling_ii_tie_goes_to_smaller_label():
    idx = coupling_ii_indices(np.array([[0.5, 0.5]]), np.array([[1.0, 1.0]]))
    assert idx[0, 0] == 0


def test_coupling_ii_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        sample_coupling_ii(_fam([0.5, 0.5]), clocks_for([1, 3], 0))


def test_coupling_i_hand_example():
    fam = _fam([0.5, 0.5])
    v = sample_coupling_i(fam, [(0.1, 1, 0.7), (0.2, 2, 0.3)], max_events=10)
    assert v["M0"] == 2


def test_coupling_i_rejects_unordered_events():
    with pytest.raises(DomainError):
        sample_coupling_i(_fam([0.5, 0.5]), [(0.2, 1, 0.9), (0.1, 2, 0.3)], max_events=10)


def test_coupling_i_exhausted_stream():
    fam = _fam([0.0, 1.0])
    with pytest.raises(ExhaustedStream):
        sample_coupling_i(fam, [(0.1, 1, 0.1)], max_events=5)
    with pytest.raises(DomainError):
        sample_coupling_i(fam, [(0.1, 2, 0.1)], max_events=0)


def test_coupling_i_point_mass_takes_first_event_on_its_atom():
    fam = _fam([1.0, 0.0], [0.5, 0.5])
    stream = PoissonStream((1, 2), 3)
    first = next(e for e in PoissonStream((1, 2), 3) if e.atom == 1)
    v = sample_coupling_i(fam, stream, max_events=1000)
    assert v["M0"] == 1
    assert stream.consumed >= first.index + 1


def test_star_identical_members_agree():
    fam = _fam([0.2, 0.8], [0.2, 0.8], [0.2, 0.8])
    idx = sample_indices(fam, "star", 2000, seed=4)
    assert np.all(idx == idx[:, :1])


@pytest.mark.parametrize("kind", KINDS)
def test_single_and_batched_paths_agree(kind):
    fam = random_family(np.random.default_rng(1), 4)
    batch = sample_indices(fam, kind, 40, seed=77, start=10)
    for r in range(40):
        v = sample(fam, kind, 77, replicate=10 + r)
        assert [fam.universe.index(v[n]) for n in fam.names] == batch[r].tolist()


@pytest.mark.parametrize("kind", KINDS)
def test_batches_are_deterministic_and_splittable(kind):
    fam = intro_family()
    whole = sample_indices(fam, kind, 300, seed=5)
    parts = np.vstack([sample_indices(fam, kind, 100, seed=5, start=s) for s in (0, 100, 200)])
    assert np.array_equal(whole, parts)


def test_star_two_members_attains_tv():
    fam = _fam([0.6, 0.4, 0.0], [0.1, 0.3, 0.6], universe=(0, 1, 2))
    idx = sample_indices(fam, "star", N, seed=12)
    est = disagreement_frequencies(idx, [[0, 1]])[0]
    tv = tv_distance(*fam.members)
    assert abs(est - tv) <= 4 * math.sqrt(tv * (1 - tv) / N)


def test_star_sum_bound_on_intro_family():
    fam = intro_family()
    idx = sample_indices(fam, "star", N, seed=3)
    freqs = disagreement_frequencies(idx, [[0, 1], [0, 2], [1, 2]])
    total = sum(freqs)
    sd = math.sqrt(sum(f * (1 - f) for f in freqs) / N) * math.sqrt(3)
    assert total <= 2 * 1.5 + 4 * sd


@settings(max_examples=15)
@given(families(max_members=4, max_size=5), st.sampled_from(["i", "ii"]), st.integers(0, 2**32))
def test_pairwise_and_tuple_disagreement_within_bounds(fam, kind, seed):
    n = 4000
    idx = sample_indices(fam, kind, n, seed)
    P = fam.matrix()
    m = len(fam)
    for i in range(m):
        for j in range(i + 1, m):
            est = disagreement_frequencies(idx, [[i, j]])[0]
            bound = big_f(min(1.0, tv_distance(fam.members[i], fam.members[j])))
            assert est <= bound + 4 * math.sqrt(max(bound * (1 - bound), 1e-12) / n) + 1e-12
    alpha = ktuple_alpha(fam.members)
    kb = ktuple_bound(min(alpha, 1.0), m)
    est = disagreement_frequencies(idx, [list(range(m))])[0]
    assert est <= kb + 4 * math.sqrt(max(kb * (1 - kb), 1e-12) / n) + 1e-12
    assert np.all(P[np.arange(m)[None, :], idx] > 0)  # never an impossible value


@pytest.mark.parametrize("kind", KINDS)
def test_marginals(kind):
    # one chi-square goodness-of-fit test per member
    rng = np.random.default_rng(2024)
    for _ in range(3):
        fam = random_family(rng, 3)
        idx = sample_indices(fam, kind, N, seed=int(rng.integers(2**32)))
        P = fam.matrix()
        for i in range(len(fam)):
            counts = np.bincount(idx[:, i], minlength=P.shape[1])
            live = P[i] > 0
            assert counts[~live].sum() == 0
            if live.sum() > 1:
                assert stats.chisquare(counts[live], N * P[i][live]).pvalue > 1e-5


def test_unknown_kind():
    with pytest.raises(DomainError):
        sample_indices(intro_family(), "iii", 10, 0)
