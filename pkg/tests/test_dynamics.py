import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgadyn.automorphisms import Automorphism, conjugate, identity
from fgadyn.errors import BudgetExceeded, MarkedClassNotFixed, NotEmpiricallyAtoroidal
from fgadyn.dynamics import (
    Budget,
    ExperimentConfig,
    atoroidal_scan,
    finite_orbit,
    fitted_ratio,
    gns_experiment,
    growth_profile,
    minimal_period,
    ns_experiment,
    orbit,
    pingpong,
    reduced_products,
    run_seed,
    subgroup_scan,
)
from fgadyn.fixtures import pingpong_partner
from fgadyn.words import CyclicWord, enumerate_classes
from autgen import random_automorphism
from oracles import brute_period


def test_orbit_tribonacci_lengths(trib):
    r = orbit(trib, CyclicWord("a", 3), 10)
    assert r.verdict == "Completed"
    assert [s.length for s in r.steps][:8] == [1, 2, 4, 7, 13, 24, 44, 81]
    assert len(r.steps) == 11


def test_orbit_finds_conjugated_fixed_class(fix_a):
    psi = Automorphism(["ab", "b"], ["aB", "b"])
    theta = conjugate(fix_a, psi)
    seed = psi.apply_class(CyclicWord("a", 2))
    r = orbit(theta, seed, 5)
    assert r.verdict == "PeriodicFound" and r.period == 1 and r.periodic_class == seed


def test_orbit_cap(trib):
    r = orbit(trib, CyclicWord("a", 3), 40, length_cap=1000)
    assert r.verdict == "LengthCapExceeded"


def test_orbit_period_two():
    swap = Automorphism(["b", "a"], ["b", "a"])
    r = orbit(swap, CyclicWord("aab", 2), 6)
    assert r.verdict == "PeriodicFound" and r.period == 2


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32))
def test_minimal_period_matches_brute_force(s):
    rng = random.Random(s)
    # finite-order pieces make periodic classes common
    moves = rng.choice([1, 2, 3])
    phi = random_automorphism(rng, 2, moves)
    imgs = [w.letters for w in phi.images]
    inv = [w.letters for w in phi.inverse_images]
    for h in list(enumerate_classes(2, 3))[:12]:
        for hh in (h, h.inverse()):
            p, bound = minimal_period(phi, hh, 6, length_cap=10 ** 6)
            assert bound == 6
            assert p == brute_period(imgs, inv, hh.letters, 6)


def test_scan_tribonacci_small(trib):
    v = atoroidal_scan(trib, 4, 10)
    assert v.tag == "NonePeriodicUpTo" and v.truncated == 0 and v.checked_bound == 10
    assert v.classes_checked == len(list(enumerate_classes(3, 4)))


def test_scan_fix_a(fix_a):
    v = atoroidal_scan(fix_a, 4, 5)
    assert v.tag == "PeriodicClassFound"
    assert str(v.periodic_class) == "a" and v.period == 1
    assert v.single_primitive is False


def test_scan_identity_first_class():
    v = atoroidal_scan(identity(3), 2, 3, stop_at_first=True)
    assert v.found and str(v.periodic_class) == "a" and len(v.periodic_classes) == 1


def test_budget_env_override(monkeypatch, trib):
    monkeypatch.setenv("FGADYN_BUDGET", "50")
    assert Budget(10 ** 9).limit == 50
    with pytest.raises(BudgetExceeded) as info:
        atoroidal_scan(trib, 4, 10)
    assert info.value.partial.classes_checked >= 1


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(window=0)
    with pytest.raises(ValueError):
        ExperimentConfig(tol=0)
    assert ExperimentConfig().snapshot()["n_max"] == 25


def test_run_seed_small(trib):
    run = run_seed(trib, CyclicWord("a", 3), 12, 2, 10 ** 6)
    assert run.iterations == 12 and not run.capped
    assert run.residual < 0.01
    assert run.lengths[:4] == [1, 2, 4, 7]


def test_ns_rejects_periodic(fix_a):
    with pytest.raises(NotEmpiricallyAtoroidal):
        ns_experiment(fix_a, ExperimentConfig(n_max=5))


def test_ns_small_deterministic(trib):
    cfg = ExperimentConfig(n_max=12, num_seeds=3, length_cap=10 ** 6)
    a = ns_experiment(trib, cfg)
    b = ns_experiment(trib, cfg)
    assert [r.lengths for r in a.forward_runs] == [r.lengths for r in b.forward_runs]
    assert len(a.forward.vertices) == 1


def test_growth_ratio(trib):
    gp = growth_profile(trib, CyclicWord("a", 3), 20)
    assert gp.ratio == pytest.approx(1.8393, abs=0.01)
    assert gp.thresholds[2] == 1 and gp.thresholds[10] == 4
    assert fitted_ratio([1]) == 1.0


def test_gns_seed_da(trib4):
    cfg = ExperimentConfig(n_max=12, num_seeds=2, length_cap=10 ** 6)
    report = gns_experiment(trib4, cfg, seeds=[CyclicWord("da", 4)])
    s = report.seeds[0]
    assert s.forward_fraction[0] == pytest.approx(0.5)
    assert all(x > y for x, y in zip(s.forward_fraction, s.forward_fraction[1:]))
    assert report.fixed_current_exact and report.marked_generator == 4


def test_gns_needs_fixed_generator(trib):
    with pytest.raises(MarkedClassNotFixed):
        gns_experiment(trib, ExperimentConfig(n_max=3))


def test_pingpong_definition(trib4):
    psi = pingpong_partner()
    prod = pingpong(trib4, psi, 1, 1)
    theta = conjugate(trib4, psi)
    h = CyclicWord("abd", 4)
    assert prod.apply_class(h) == theta.apply_class(trib4.apply_class(h))
    with pytest.raises(ValueError):
        pingpong(trib4, psi, 0, 1)


def test_reduced_products_count():
    assert len(list(reduced_products(2, 2))) == 4 + 4 * 3


def test_finite_orbit_and_subgroup(fix_a):
    assert len(finite_orbit([fix_a], CyclicWord("a", 2), 5, 10 ** 4)) == 1
    assert finite_orbit([fix_a], CyclicWord("b", 2), 5, 10 ** 4) is None
    v = subgroup_scan([fix_a], 1, 3, 5)
    assert v.tag == "FiniteOrbitFound" and str(v.periodic_class) == "a" and v.orbit_size == 1


def test_subgroup_scan_finds_atoroidal_generator(trib, fix_a):
    v = subgroup_scan([trib], 1, 3, 6)
    assert v.tag == "EmpiricalAtoroidalFound" and v.product == ((0, 1),)


def test_scan_monotone_in_bounds(fix_a):
    small = atoroidal_scan(fix_a, 2, 2)
    large = atoroidal_scan(fix_a, 4, 6)
    assert small.found and large.found
    assert {str(h) for h, _ in small.periodic_classes} <= {str(h) for h, _ in large.periodic_classes}


def test_growth_ratio_tracks_pf(trib):
    from fgadyn.graphs import rose_map
    from fgadyn.strata import maximal_filtration

    lam = maximal_filtration(rose_map(trib)).strata[-1].eigenvalue
    for seed in ("a", "ab", "aBc"):
        gp = growth_profile(trib, CyclicWord(seed, 3), 20)
        assert abs(gp.ratio - lam) / lam < 0.02


def test_finite_orbit_is_closed():
    swap = Automorphism(["b", "a", "c"], ["b", "a", "c"])
    orb = finite_orbit([swap], CyclicWord("ac", 3), 10, 10 ** 4)
    assert len(orb) == 2
    assert all(swap.apply_class(h) in orb for h in orb)
