import json
from math import exp, factorial

import pytest

from locallim.errors import BudgetError, ContractViolation, UnsupportedCombination
from locallim.limits import (
    GW,
    SK,
    LimitDist,
    LimitRecipe,
    RegimeSpec,
    borel_pmf,
    gw_ball_reference,
    gw_plane_prob,
    mixture,
    plane_trees,
    predicted_limit,
    sk_ball_reference,
)
from locallim.localstats import BallCode, RootPolicy, tv_distance
from locallim.rng import derive_seed
from locallim.trees import PlaneTree, ahu_code

E = exp(-1)


def star_code(j: int) -> BallCode:
    return BallCode(PlaneTree((j,), 1).code())


# --- analytic pieces ---------------------------------------------------------------


def test_gw_plane_prob_examples():
    assert gw_plane_prob(1.0, PlaneTree((0,), 1)) == pytest.approx(0.367879, abs=1e-6)
    assert gw_plane_prob(2.5, PlaneTree((0,), 1)) == pytest.approx(exp(-2.5))
    assert gw_plane_prob(1.0, PlaneTree((2,), 1)) == pytest.approx(0.183940, abs=1e-6)
    c = 0.7
    assert gw_plane_prob(c, PlaneTree((1, 1), 2)) == pytest.approx(c**2 * exp(-2 * c))


def test_borel_examples():
    assert borel_pmf(1) == pytest.approx(0.367879, abs=1e-6)
    assert borel_pmf(2) == pytest.approx(0.135335, abs=1e-6)
    assert borel_pmf(3) == pytest.approx(0.074681, abs=1e-6)
    assert borel_pmf(10) == pytest.approx(exp(-10) * 10**9 / factorial(10))
    with pytest.raises(ContractViolation):
        borel_pmf(0)


def test_borel_large_k_and_partial_sum():
    assert 0 < borel_pmf(5000) < 1e-5
    s = sum(borel_pmf(k) for k in range(1, 10_001))
    assert 0.99 < s < 1


@pytest.mark.parametrize("radius,counts", [(1, [1, 1, 1, 1, 1]), (2, [1, 1, 2, 4, 8, 16]), (3, [1, 1, 2, 5, 13, 34])])
def test_plane_tree_counts(radius, counts):
    assert [sum(1 for _ in plane_trees(s, radius)) for s in range(1, len(counts) + 1)] == counts


def test_plane_trees_well_formed_and_ordered():
    ts = list(plane_trees(6, 3))
    assert all(t.size == 6 and t.radius == 3 for t in ts)
    assert [t.child_counts for t in ts] == sorted(t.child_counts for t in ts)
    assert len({t.child_counts for t in ts}) == len(ts)


def test_plane_partial_sums_increase_to_one():
    acc, prev = 0.0, 0.0
    sums = []
    for s in range(1, 15):
        acc += sum(gw_plane_prob(1.0, t) for t in plane_trees(s, 2))
        sums.append(acc)
    assert all(a < b for a, b in zip(sums, sums[1:]))
    assert 0.999 < sums[-1] <= 1


# --- references ------------------------------------------------------------------------


def test_gw_reference_c0():
    d = gw_ball_reference(0.0, 3, 1e-6)
    assert d.mass == {BallCode(PlaneTree((0,), 3).code()): 1.0} and d.leftover == 0


def test_gw_reference_stars():
    d = gw_ball_reference(1.0, 1, 1e-6)
    for j in range(6):
        assert d.prob(star_code(j)) == pytest.approx(E / factorial(j))
    assert d.leftover < 1e-6


def test_gw_reference_aggregates_plane_representatives():
    d = gw_ball_reference(1.0, 2, 1e-4)
    code = BallCode(PlaneTree((2, 1, 0), 2).code())
    assert code == BallCode(PlaneTree((2, 0, 1), 2).code())
    assert d.prob(code) == pytest.approx(exp(-3))
    assert abs(sum(d.mass.values()) + d.leftover - 1) < 1e-9
    assert d.leftover < 1e-4


def test_gw_reference_refinement_keeps_masses():
    coarse = gw_ball_reference(1.0, 2, 1e-2)
    fine = gw_ball_reference(1.0, 2, 1e-4)
    for code, p in coarse.mass.items():
        assert fine.mass[code] >= p - 1e-15
    # sizes enumerated by the coarse run are complete in both
    full = {c for c in coarse.mass if c.count(b"(") < coarse.origin["max_size"]}
    for c in full:
        assert fine.mass[c] == pytest.approx(coarse.mass[c])


def test_gw_reference_budget():
    with pytest.raises(BudgetError) as exc:
        gw_ball_reference(1.0, 3, 1e-6, max_trees=100)
    assert 0 < exc.value.achieved < 1
    with pytest.raises(ContractViolation):
        gw_ball_reference(1.0, 2, 0.0)


def test_sk_reference_examples():
    d = sk_ball_reference(3, 0, 10, derive_seed(0, 0))
    assert list(d.mass.values()) == [1.0] and d.leftover == 0
    d = sk_ball_reference(2, 1, 50_000, derive_seed(0, 1), seed=0)
    assert d.prob(star_code(2)) == pytest.approx(E, abs=0.01)
    assert d.origin["N"] == 50_000 and d.origin["seed"] == 0


def test_sk_zero_matches_gw():
    sk0 = sk_ball_reference(0, 2, 30_000, derive_seed(1, 0))
    assert tv_distance(sk0, gw_ball_reference(1.0, 2, 1e-4)) < 0.03


def test_sk_ball_is_ray_plus_gw():
    # in SK(1) at radius 1 the root has 1 + Po(1) children
    d = sk_ball_reference(1, 1, 50_000, derive_seed(2, 0))
    for j in range(1, 4):
        assert d.prob(star_code(j)) == pytest.approx(E / factorial(j - 1), abs=0.01)
    assert d.prob(star_code(0)) == 0


# --- LimitDist and mixture ------------------------------------------------------------


def test_limitdist_validation_and_json():
    with pytest.raises(ContractViolation):
        LimitDist({b"T": 0.5}, 0.1)
    with pytest.raises(ContractViolation):
        LimitDist({b"T": 1.2, b"U": -0.2}, 0.0)
    d = gw_ball_reference(1.0, 1, 1e-3)
    back = LimitDist.from_json(d.to_json())
    assert back.mass == d.mass and back.leftover == d.leftover
    probs = [e["prob"] for e in json.loads(d.to_json())["entries"]]
    assert probs == sorted(probs, reverse=True)


def test_mixture_examples():
    x, y = LimitDist({b"X": 1.0}, 0.0), LimitDist({b"Y": 1.0}, 0.0)
    assert mixture(1, x, y).mass == {b"X": 1.0, b"Y": 0.0}
    assert mixture(0, x, y).prob(b"Y") == 1.0
    assert mixture(0.5, x, y).mass == {b"X": 0.5, b"Y": 0.5}
    with pytest.raises(ContractViolation):
        mixture(1.5, x, y)


def test_mixture_of_same_is_same():
    d = gw_ball_reference(1.0, 2, 1e-3)
    for a in (0.1, 0.37, 0.5):
        m = mixture(a, d, d)
        assert m.mass == d.mass and m.leftover == d.leftover


# --- regimes ------------------------------------------------------------------------------


def test_regime_validation():
    with pytest.raises(ContractViolation):
        RegimeSpec("III", 2.5)
    with pytest.raises(ContractViolation):
        RegimeSpec("I", 1.2)
    with pytest.raises(ContractViolation):
        RegimeSpec("V")
    assert RegimeSpec("I", 0.8).instantiate(1000) == (1000, 400)
    assert RegimeSpec("III", 1.5).instantiate(1000) == (1000, 750)
    assert RegimeSpec("IV").instantiate(500) == (500, 500)
    # s = m - n/2 is o(n) while s^3 / n^2 grows
    ratios = []
    for n in (10**4, 10**6, 10**8):
        _, m = RegimeSpec("II").instantiate(n)
        s = m - n // 2
        ratios.append((s / n, s**3 / n**2))
    assert ratios[0][0] > ratios[1][0] > ratios[2][0]
    assert ratios[0][1] < ratios[1][1] < ratios[2][1]


def test_predicted_limit_examples():
    assert str(predicted_limit(RegimeSpec("III", 1.5), "uniform")) == "mixture(0.5, SK(1), GW(1))"
    assert predicted_limit(RegimeSpec("I", 0.8), "uniform") == GW(0.8)
    assert predicted_limit(RegimeSpec("IV"), RootPolicy.KERNEL) == SK(3)
    with pytest.raises(UnsupportedCombination):
        predicted_limit(RegimeSpec("I", 0.5), "core")


@pytest.mark.parametrize("regime", [RegimeSpec("II"), RegimeSpec("III", 1.3), RegimeSpec("IV")])
def test_predicted_limit_policy_table(regime):
    table = {
        "largest_component": SK(1),
        "rest": GW(1),
        "core": SK(2),
        "kernel": SK(3),
        "non_complex_part": GW(1),
        "complex_part": SK(1),
    }
    for policy, law in table.items():
        assert predicted_limit(regime, policy) == law
    uni = predicted_limit(regime, "uniform")
    expected = {"II": GW(1), "IV": SK(1)}.get(regime.regime)
    assert uni == expected or uni.kind == "mixture"


def test_regime_iii_endpoints():
    lo = predicted_limit(RegimeSpec("III", 1 + 1e-12), "uniform")
    hi = predicted_limit(RegimeSpec("III", 2 - 1e-12), "uniform")
    assert lo.param == pytest.approx(0, abs=1e-9) and lo.parts[1] == GW(1)
    assert hi.param == pytest.approx(1) and hi.parts[0] == SK(1)


def test_recipe_build_mixture_is_average():
    rec = LimitRecipe("mixture", 0.5, (SK(1), GW(1)))
    d = rec.build(1, mass_tol=1e-3, N=20_000, seed=4)
    a, b = SK(1).build(1, N=20_000, seed=4), GW(1).build(1, mass_tol=1e-3)
    for code in set(a.mass) | set(b.mass):
        assert d.prob(code) == 0.5 * a.prob(code) + 0.5 * b.prob(code)
