import logging

import numpy as np
import pytest
from scipy.optimize import brentq
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from henon import CouplingSpec, validate_params
from henon import coupling as cp
from henon.errors import NoPositiveRoot
from henon.params import critical_exponent, random_variational_spec

from conftest import pair, random_params
from oracles import pair_tables, sign_changes, nonlinearity_k


def test_symmetric_root_of_f():
    P = validate_params(3, 0, 0, 0.7, 3, 3)
    assert float(cp.scalar_reduction_f(P, 1.0)) == pytest.approx(0.0, abs=1e-15)


def test_f_near_zero_depends_on_alpha():
    low = pair(3, 0, 0, 1.0, 1.5 / 6)      # alpha = 1.5
    high = pair(3, 0, 0, 1.0, 3.5 / 6)     # alpha = 3.5
    assert cp.scalar_reduction_f(low, 1e-12) > 1e3
    assert cp.scalar_reduction_f(high, 1e-12) == pytest.approx(-1.0, abs=1e-9)


def test_cubic_quartic_example():
    P = validate_params(3, 0, 0, 1, 3, 3)
    t = np.geomspace(0.01, 100, 50)
    assert np.allclose(cp.scalar_reduction_f(P, t), t ** 4 + 3 * t - 1 - 3 * t ** 3, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("nu", [0.1, 1.0, 10.0])
def test_root_count_matches_dense_scan(nu):
    P = validate_params(3, 0, 0, nu, 3, 3)
    roots = cp.f_roots(P)
    expected = sign_changes(lambda t: t ** 4 + 3 * nu * t - 1 - 3 * nu * t ** 3)
    assert len(roots) == expected
    for L in roots:
        assert abs(L ** 4 + 3 * nu * L - 1 - 3 * nu * L ** 3) < 1e-12 * max(1.0, L ** 4)


def test_derivative_matches_central_difference(weighted):
    for t in (0.3, 1.0, 2.7):
        h = 1e-6 * t
        fd = (cp.scalar_reduction_f(weighted, t + h) - cp.scalar_reduction_f(weighted, t - h)) / (2 * h)
        assert float(cp.scalar_reduction_df(weighted, t)) == pytest.approx(float(fd), rel=1e-7)


def test_equal_exponents_contain_symmetric_pair():
    P = pair(5, 0.2, 0.4, 1.3)
    expected = (1 + P.nu * P.alpha) ** (-1 / (P.p - 2))
    roots = cp.solve_sync_2(P)
    pos = [r for r in roots if r.kind == "positive"]
    assert any(np.allclose(r.c, [expected, expected], rtol=1e-13) for r in pos)
    assert [r.kind for r in roots[-2:]] == ["semi_trivial", "semi_trivial"]


def test_pair_roots_solve_divided_and_full_systems(rng):
    for _ in range(10):
        P = random_params(rng)
        try:
            roots = cp.solve_sync_2(P)
        except NoPositiveRoot:
            continue
        for r in roots:
            assert r.residual < 1e-12
            if r.kind == "positive":
                kappa, al, be = pair_tables(P.p, P.nu, P.alpha, P.beta)
                assert np.max(np.abs(nonlinearity_k(kappa, al, be, r.c) - r.c)) < 1e-12
                assert r.ratio == pytest.approx(r.meta["L"], rel=1e-14)


def test_no_positive_root_carries_semi_trivial_pairs(monkeypatch):
    P = validate_params(3, 0, 0, 1, 3, 3)
    monkeypatch.setattr(cp, "f_roots", lambda params: [])
    with pytest.raises(NoPositiveRoot) as info:
        cp.solve_sync_2(P)
    assert [r.c.tolist() for r in info.value.pairs] == [[1.0, 0.0], [0.0, 1.0]]


def _tangency(p, al, be):
    """``(t, nu)`` with ``f(t) = f'(t) = 0``; ``f = g + nu h`` is linear in ``nu``."""
    g = lambda t: t ** (p - 2) - 1
    dg = lambda t: (p - 2) * t ** (p - 3)
    h = lambda t: al * t ** (al - 2) - be * t ** al
    dh = lambda t: al * (al - 2) * t ** (al - 3) - be * al * t ** (al - 1)
    t = brentq(lambda s: dg(s) * h(s) - g(s) * dh(s), 0.1, 0.9, xtol=1e-16)
    return t, -g(t) / h(t)


def test_tangential_zero_is_logged_not_returned(caplog):
    # with alpha = beta the point t = 1 is a triple root (f changes sign), so break the symmetry
    t_star, nu = _tangency(6, 2.5, 3.5)
    P = validate_params(3, 0, 0, nu, 2.5, 3.5)
    with caplog.at_level(logging.WARNING, logger="henon.coupling"):
        roots = cp.f_roots(P)
    assert all(abs(L - t_star) > 1e-3 for L in roots)
    assert "double root" in caplog.text


def test_k_solver_agrees_with_pair_solver(rng):
    for _ in range(5):
        P = random_params(rng)
        try:
            pair_roots = [r.c for r in cp.solve_sync_2(P) if r.kind == "positive"]
        except NoPositiveRoot:
            continue
        kappa, al, be = pair_tables(P.p, P.nu, P.alpha, P.beta)
        spec = CouplingSpec.from_tables(P, kappa, al, be)
        found = cp.solve_sync_k(spec, starts=64)
        for c in found:
            assert min(np.max(np.abs(c.c - q)) for q in pair_roots) < 1e-9
        assert len(found) >= 1


@pytest.mark.parametrize("k", [2, 3, 5])
def test_fully_symmetric_spec(k):
    P = pair(4, 0.1, 0.3, 1)
    kap = 0.8
    half = P.p / 2
    spec = CouplingSpec.from_tables(P, np.full((k, k), kap), np.full((k, k), half), np.full((k, k), half))
    roots = cp.solve_sync_k(spec)
    sym = (k * kap) ** (-1 / (P.p - 2))
    assert any(np.allclose(r.c, sym, rtol=1e-12) for r in roots)


def test_random_three_component_roots(weighted, rng):
    for _ in range(4):
        spec = random_variational_spec(weighted, 3, rng)
        for r in cp.solve_sync_k(spec):
            assert r.residual < 1e-10 and np.all(r.c > 0)


def test_residual_examples(p3):
    root = [r for r in cp.solve_sync_2(p3) if r.kind == "positive"][0]
    assert cp.sync_residual(p3, root.c) < 1e-12
    assert cp.sync_residual(p3, [0.0, 0.0]) == 0.0
    assert cp.classify_sync([0.0, 0.0]) == "trivial"
    assert cp.classify_sync([0.0, 2.0]) == "semi_trivial"
    assert cp.sync_residual(p3, 1.01 * root.c) > 1e-4


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 6), gap=st.floats(0.05, 0.8), frac=st.floats(0.25, 0.75), nu=st.floats(0.05, 5.0))
def test_sign_of_degeneracy_gap_follows_slope_of_f(n, gap, frac, nu):
    # at a root L of f: lhs - (p - 2) has the sign of -f'(L)
    p = critical_exponent(n, 0.0, gap)
    assume(min(frac, 1 - frac) * p > 1)
    P = pair(n, 0.0, gap, nu, frac)
    for L in cp.f_roots(P):
        c1, c2 = cp.pair_from_ratio(P, L)
        lhs = nu * P.alpha * P.beta * (c1 ** (P.alpha - 2) * c2 ** P.beta + c1 ** P.alpha * c2 ** (P.beta - 2))
        slope = float(cp.scalar_reduction_df(P, L))
        if abs(lhs - (P.p - 2)) > 1e-8 and abs(slope) > 1e-8:
            assert np.sign(lhs - (P.p - 2)) == -np.sign(slope)
