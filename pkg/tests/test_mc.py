import math

import numpy as np
import pytest

from strategies import intro_family, random_pair
from tvcouple.dist import DiscreteDistribution, Family, tv_distance
from tvcouple.errors import DomainError, UnknownMember
from tvcouple.exact import agreement
from tvcouple.mc import atom_frequencies, disagreement_frequencies, event_label, mc_estimate

N = 10**5


def test_identical_pair_never_disagrees():
    p = DiscreteDistribution([0, 1, 2], [0.2, 0.3, 0.5])
    fam = Family(("a", "b"), (p, p))
    for kind in ("i", "ii", "star"):
        (est,) = mc_estimate(fam, kind, [("a", "b")], 2000, seed=4)
        assert est.estimate == 0 and est.stderr == 0


def test_intro_clock_pair():
    (est,) = mc_estimate(intro_family(), "ii", [("X", "Y")], N, seed=1)
    assert est.event == "X|Y" and est.n == N
    assert abs(est.estimate - 2 / 3) <= 4 * math.sqrt(2 / 9 / N)
    assert est.stderr == pytest.approx(math.sqrt(est.estimate * (1 - est.estimate) / N))


def test_worked_pair():
    U = [1, 2, 3]
    fam = Family(("p", "q"), (DiscreteDistribution(U, [2 / 3, 1 / 3, 0]), DiscreteDistribution(U, [1 / 3, 0, 2 / 3])))
    (est,) = mc_estimate(fam, "ii", [("p", "q")], N, seed=2)
    assert abs(est.estimate - 5 / 7) <= 4 * math.sqrt(5 / 7 * 2 / 7 / N)


def test_star_intro_sum():
    fam = intro_family()
    events = [("X", "Y"), ("X", "Z"), ("Y", "Z")]
    ests = mc_estimate(fam, "star", events, N, seed=3)
    total = sum(e.estimate for e in ests)
    tvs = sum(tv_distance(fam[a], fam[b]) for a, b in events)
    assert total <= 2 * tvs + 4 * math.sqrt(sum(e.stderr**2 for e in ests)) * math.sqrt(3)


def test_star_pair_is_maximal():
    rng = np.random.default_rng(7)
    p, q = random_pair(rng)
    (est,) = mc_estimate(Family(("p", "q"), (p, q)), "star", [("p", "q")], N, seed=9)
    d = tv_distance(p, q)
    assert abs(est.estimate - d) <= 4 * math.sqrt(d * (1 - d) / N) + 1e-12


@pytest.mark.parametrize("kind", ["i", "ii"])
def test_mc_matches_exact(kind):
    rng = np.random.default_rng(100 if kind == "i" else 200)
    for r in range(50):
        p, q = random_pair(rng)
        fam = Family(("p", "q"), (p, q))
        (est,) = mc_estimate(fam, kind, [("p", "q")], N, seed=r)
        exact = agreement(p, q, kind).disagreement
        assert abs(est.estimate - exact) <= 4 * math.sqrt(exact * (1 - exact) / N) + 1e-12


def test_errors():
    fam = intro_family()
    with pytest.raises(DomainError):
        mc_estimate(fam, "ii", [("X", "Y")], 999, seed=0)
    with pytest.raises(UnknownMember):
        mc_estimate(fam, "ii", [("X", "W")], 1000, seed=0)
    with pytest.raises(NameError):
        mc_estimate(fam, "ii", [("X", "W")], 1000, seed=0)
    with pytest.raises(DomainError):
        mc_estimate(fam, "ii", [("X",)], 1000, seed=0)


def test_helpers():
    idx = np.array([[0, 0, 1], [1, 1, 1], [2, 0, 2]])
    assert disagreement_frequencies(idx, [[0, 1], [0, 1, 2], [0, 2]]) == pytest.approx([1 / 3, 2 / 3, 1 / 3])
    assert event_label(["a", "b", "c"]) == "a|b|c"
    freq = atom_frequencies(intro_family(), "ii", 2000, seed=0)
    assert freq.shape == (3, 3)
    assert freq.sum(axis=1) == pytest.approx(np.ones(3))
    assert freq[0, 2] == freq[1, 1] == freq[2, 0] == 0


def test_deterministic_and_split():
    fam = intro_family()
    a = mc_estimate(fam, "i", [("X", "Y")], 2000, seed=5)
    b = mc_estimate(fam, "i", [("X", "Y")], 2000, seed=5)
    assert a == b
    # two halves of a run merge into the whole
    h1 = mc_estimate(fam, "i", [("X", "Y")], 1000, seed=5)[0].estimate
    h2 = mc_estimate(fam, "i", [("X", "Y")], 1000, seed=5, start=1000)[0].estimate
    assert (h1 + h2) / 2 == pytest.approx(a[0].estimate, abs=1e-15)
