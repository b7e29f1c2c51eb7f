import math
import warnings

import numpy as np
import pytest

from henon import CouplingSpec, validate_params
from henon import bubble as bb
from henon import radial_ode as ro
from henon.coupling import solve_sync_2
from henon.errors import ConstraintViolation, GridMismatch, NotProportional, TailNotResolved
from henon.params import random_variational_spec

from conftest import pair, random_params
from oracles import pair_tables, radial_ivp


def _positive_root(P):
    return next(r.c for r in solve_sync_2(P) if r.kind == "positive")


def test_scalar_equation_recovers_bubble(rng):
    for _ in range(3):
        P = random_params(rng)
        K = bb.bubble_constant(P)
        sol = ro.picard_solve(CouplingSpec.henon(P), [K], 20.0)
        r = np.geomspace(1e-6, 20.0, 300)
        exact = bb.bubble_value(P, r)
        assert np.max(np.abs(sol(r)[0] / exact - 1)) < 1e-10


def test_synchronised_pair_is_reproduced(weighted):
    c = _positive_root(weighted)
    K = bb.bubble_constant(weighted)
    sol = ro.picard_solve(weighted, c * K, 10.0)
    r = np.linspace(0, 10, 801)
    exact = np.outer(c, bb.bubble_value(weighted, np.maximum(r, 1e-300)))
    assert np.max(np.abs(sol(r) - exact) / exact) < 1e-10
    # the ratio of the components stays c1/c2 everywhere
    u = sol(r)
    assert np.max(np.abs(u[0] / u[1] - c[0] / c[1])) < 1e-10 * c[0] / c[1]


def test_far_field_reaches_infinity(p3):
    c = _positive_root(p3)
    K = bb.bubble_constant(p3)
    # the far field takes over once u has dropped below 1e-3 u(0), near r = 1e3 here
    sol = ro.picard_solve(p3, c * K, 1e4)
    assert sol.far is not None
    r = np.array([1e2, 1e4, 1e8])
    exact = np.outer(c, bb.bubble_value(p3, r))
    assert np.max(np.abs(sol(r) / exact - 1)) < 1e-9
    assert np.allclose(sol.far.limit, c * K, rtol=1e-9)


def test_three_components_agree_with_independent_integrator(weighted, rng):
    spec = random_variational_spec(weighted, 3, rng)
    init = rng.uniform(0.5, 1.5, 3)
    with warnings.catch_warnings():
        # unsynchronised data may drive a component to zero; compare up to that radius
        warnings.simplefilter("ignore", ro.VanishedSolution)
        sol = ro.picard_solve(spec, init, 8.0)
    radii = np.geomspace(1e-2, 0.99 * sol.r_end, 60)
    ref = radial_ivp(weighted.n, weighted.a, weighted.b, spec.kappa.tolist(),
                     spec.alpha_ij.tolist(), spec.beta_ij.tolist(), init, radii)
    assert np.max(np.abs(sol(radii) - ref)) < 1e-9 * init.max()


def test_pair_agrees_with_independent_integrator(rng):
    P = pair(5, 0.3, 0.6, 0.8, 0.4)
    init = np.array([0.9, 1.4])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ro.VanishedSolution)
        sol = ro.picard_solve(P, init, 30.0)
    radii = np.geomspace(1e-3, 0.99 * sol.r_end, 80)
    kappa, al, be = pair_tables(P.p, P.nu, P.alpha, P.beta)
    ref = radial_ivp(P.n, P.a, P.b, kappa, al, be, init, radii)
    assert np.max(np.abs(sol(radii) - ref)) < 1e-9 * init.max()


def test_flux_is_negative_and_decreasing(weighted):
    sol = ro.picard_solve(weighted, [1.0, 0.6], 20.0)
    r = np.geomspace(1e-4, 20.0, 400)
    w = sol.flux(r)
    assert np.all(w < 0)
    assert np.all(np.diff(w, axis=1) < 0)


def test_residual_examples(p3):
    c = _positive_root(p3)
    prof = bb.bubble_profile(p3)
    good = [prof.scaled(x) for x in c]
    assert ro.residual(p3, good) < 1e-8
    zero = [prof.with_values(np.zeros_like(prof.values)) for _ in c]
    assert ro.residual(p3, zero) == 0.0
    assert ro.residual(p3, [pr.scaled(1.01) for pr in good]) > 1e-3
    with pytest.raises(GridMismatch):
        ro.residual(p3, good[:1])


def test_asymptotics_of_bubble():
    P = pair(4, 0.2, 0.5, 1.0)
    K = bb.bubble_constant(P)
    for mu in (1.0, 2.0):
        prof = bb.bubble_profile(bb.BubbleParams(P, mu))
        asy = ro.asymptotics([prof])
        assert asy.u0[0] == pytest.approx(mu ** (-P.lam) * K, rel=1e-8)
        assert asy.u_inf[0] == pytest.approx(mu ** P.lam * K, rel=1e-8)
        assert asy.decay_exponents[0] == pytest.approx(P.n - 2 - 2 * P.a, rel=1e-6)
        assert asy.origin_exponents[0] == pytest.approx(0.0, abs=1e-6)


def test_asymptotics_of_pair_keep_the_ratio(p3):
    c = _positive_root(p3)
    sol = ro.picard_solve(p3, c * bb.bubble_constant(p3), 1e6)
    prs = sol.profiles(t_min=-math.log(1e12))
    asy = ro.asymptotics(prs)
    assert asy.u_inf[0] / asy.u_inf[1] == pytest.approx(c[0] / c[1], rel=1e-8)
    assert np.all(asy.u_inf > 0)


def test_asymptotics_refuses_short_tails(p3):
    prof = bb.bubble_profile(p3, -2, 2, 401)
    with pytest.raises(TailNotResolved):
        ro.asymptotics([prof])


# random data away from a synchronised vector may vanish before r = 5; the comparison stops there
@pytest.mark.filterwarnings("ignore::henon.errors.VanishedSolution")
def test_uniqueness_identical_and_doubled(weighted, rng):
    c = _positive_root(weighted) * bb.bubble_constant(weighted)
    same = ro.uniqueness_experiment(weighted, c, c, 5.0)
    assert np.max(same.deviation) == 0.0
    spec = random_variational_spec(weighted, 3, rng)
    init = rng.uniform(0.3, 1.2, 3)
    doubled = ro.uniqueness_experiment(spec, init, 2 * init, 5.0)
    assert doubled.passed and np.max(doubled.deviation) < 1e-8


def test_uniqueness_needs_proportional_data(weighted):
    with pytest.raises(NotProportional):
        ro.uniqueness_experiment(weighted, [1.0, 1.0], [2.0, 3.0], 5.0)


@pytest.mark.parametrize("mu", [1.0, 3.0, 0.2])
def test_inversion_recovers_the_dilation(mu):
    P = pair(5, 0.4, 0.7, 1.0)
    prof = bb.bubble_profile(bb.BubbleParams(P, mu), -25, 25, 4001)
    res = ro.inversion_normalize(prof)
    assert res.tau == pytest.approx(mu, rel=1e-6)
    assert res.defect < 1e-8
    right = res.profile.values[res.profile.t_grid > 0]
    assert np.all(np.diff(right) < 0)


def test_vanishing_component_warns_and_stops():
    P = validate_params(3, 0, 0, 2.0, 4.8, 1.2)
    with pytest.warns(ro.VanishedSolution):
        sol = ro.picard_solve(P, [1.0, 1e-2], 50.0)
    assert sol.vanished
    r0 = sol.vanish_radius
    kappa, al, be = pair_tables(P.p, P.nu, P.alpha, P.beta)
    ref = radial_ivp(P.n, P.a, P.b, kappa, al, be, [1.0, 1e-2], np.array([0.999 * r0, 1.001 * r0]))
    assert ref[1, 0] > 0 > ref[1, 1]


def test_bad_initial_data():
    P = pair(3, 0, 0, 1.0)
    with pytest.raises(ConstraintViolation):
        ro.picard_solve(P, [0.0, 1.0], 5.0)
    with pytest.raises(ConstraintViolation):
        ro.picard_solve(P, [1.0, 1.0, 1.0], 5.0)
    with pytest.raises(ConstraintViolation):
        ro.picard_solve(P, [1.0, 1.0], -1.0)


def test_profiles_round_trip_values(weighted):
    sol = ro.picard_solve(weighted, [1.0, 0.5], 10.0)
    prs = sol.profiles()
    assert len(prs) == 2 and prs[0].same_grid(prs[1])
    t = prs[0].t_grid[::500]
    r = np.exp(-t)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        direct = sol(r) * r ** weighted.lam
    assert np.allclose(direct[0], prs[0].values[::500], rtol=1e-14, atol=0)


def test_default_profile_range_reaches_both_plateaus():
    # sigma is small here, so the bubble is wide in t and a range based on lam alone would stop short
    P = pair(6, 1.4, 2.0, 1.0)
    assert P.sigma < 0.25
    c = _positive_root(P)
    sol = ro.picard_solve(P, c * bb.bubble_constant(P), 1e12 ** (1 / P.sigma))
    asy = ro.asymptotics(sol.profiles())
    assert np.allclose(asy.u0, c * bb.bubble_constant(P), rtol=1e-9)
