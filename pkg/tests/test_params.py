import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from henon import CouplingSpec, RegimeTag, classify_regime, felli_schneider, validate_params
from henon.errors import ConstraintViolation
from henon.params import (critical_exponent, load_json, params_from_mapping,
                          random_variational_spec, spec_from_mapping, symmetric_params)

from oracles import felli_schneider_mp


def test_three_dimensional_unweighted():
    P = validate_params(3, 0, 0, 1, 3, 3)
    assert P.p == 6
    assert P.gamma == pytest.approx(0.25, abs=1e-15)
    assert P.lam == pytest.approx(0.5, abs=1e-15)


def test_weighted_four_dimensional():
    P = validate_params(4, 0, 0.5, 1, 4 / 3, 4 / 3)
    assert P.p == pytest.approx(8 / 3, rel=1e-15)
    assert P.gamma == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("args, fragment", [
    ((3, 0.1, 0, 1, 3, 3), "a <= b"),
    ((3, 1, 0, 1, 3, 3), "a < (n-2)/2"),
    ((2, 0, 0, 1, 3, 3), "n >= 3"),
    ((3, 0, 1.0, 1, 1, 1), "b < a + 1"),
    ((3, 0, 0, 0, 3, 3), "nu > 0"),
    ((3, 0, 0, 1, 1, 5), "alpha > 1"),
    ((3, 0, 0, 1, 2, 3), "differs from p"),
    ((3, 0, 0, 1, "x", 3), "non-numeric"),
    ((3, 0, 0, 1, math.nan, 3), "finite"),
])
def test_violations_name_the_condition(args, fragment):
    with pytest.raises(ConstraintViolation, match=fragment.replace("(", r"\(").replace(")", r"\)")
                       .replace("+", r"\+")):
        validate_params(*args)


def test_params_are_immutable(p3):
    with pytest.raises(Exception):
        p3.n = 4


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 9), a_frac=st.floats(-3, 0.95), gap=st.floats(0, 0.999))
def test_p_inverts_to_weight_gap(n, a_frac, gap):
    a = a_frac * (n - 2) / 2
    b = a + gap
    p = critical_exponent(n, a, b)
    assert 2 < p <= 2 * n / (n - 2) * (1 + 1e-15)
    recovered = (2 * n / p - n + 2) / 2
    assert recovered == pytest.approx(b - a, rel=1e-14, abs=1e-14)
    # the integrability exponent of the contraction argument
    assert 2 * a + 2 - b * p > 0


def test_felli_schneider_values():
    assert felli_schneider(3, 0) == pytest.approx(0.0, abs=1e-15)
    v = felli_schneider(3, -1)
    assert -1 < v < 0
    assert v == pytest.approx(float(felli_schneider_mp(3, -1)), rel=1e-14)


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_felli_schneider_between_a_and_a_plus_one(n):
    for a in np.linspace(-5, -0.01, 400):
        b = felli_schneider(n, a)
        assert a < b < a + 1


def test_felli_schneider_tends_to_a_at_zero():
    a = -np.geomspace(1e-1, 1e-8, 20)
    gaps = np.abs([felli_schneider(4, x) - x for x in a])
    assert np.all(np.diff(gaps) < 0) and gaps[-1] < 1e-7


def test_regime_examples():
    assert classify_regime(validate_params(4, 0.5, 0.7, 1, 2, critical_exponent(4, .5, .7) - 2)).tag \
        is RegimeTag.SYMMETRIC
    assert classify_regime(symmetric_params(3, -1, -0.99)).tag is RegimeTag.SYMMETRY_BREAKING
    bfs = felli_schneider(3, -1)
    assert classify_regime(symmetric_params(3, -1, bfs)).tag is RegimeTag.FS_BOUNDARY
    assert classify_regime(symmetric_params(3, -1, bfs + 1e-3)).tag is RegimeTag.SYMMETRIC
    # a < 0 with b = a lies below the curve
    assert classify_regime(symmetric_params(3, -1, -1)).tag is RegimeTag.SYMMETRY_BREAKING


def test_regime_flip_near_boundary_is_local():
    bfs = felli_schneider(5, -0.7)
    tags = {classify_regime(symmetric_params(5, -0.7, bfs + d)).tag for d in (-1e-15, 0.0, 1e-15)}
    assert RegimeTag.FS_BOUNDARY in tags
    assert len(tags) <= 2
    far = {classify_regime(symmetric_params(5, -0.7, bfs + d)).tag for d in (-1e-6, 1e-6)}
    assert far == {RegimeTag.SYMMETRIC, RegimeTag.SYMMETRY_BREAKING}


def test_config_mapping_roundtrip(p3):
    assert params_from_mapping(p3.to_dict()) == p3
    with pytest.raises(ConstraintViolation, match="missing keys: beta"):
        params_from_mapping({"n": 3, "a": 0, "b": 0, "nu": 1, "alpha": 3})


def test_malformed_json_reports_location(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3,\n  "a": ,\n}')
    with pytest.raises(ConstraintViolation, match="line 2 column 8"):
        load_json(bad)


def test_pair_spec_is_variational(weighted):
    spec = CouplingSpec.from_pair(weighted)
    assert spec.k == 2 and spec.variational
    u = np.array([[0.7], [1.3]])
    al, be, nu, p = weighted.alpha, weighted.beta, weighted.nu, weighted.p
    expected = [0.7 ** (p - 1) + nu * al * 0.7 ** (al - 1) * 1.3 ** be,
                1.3 ** (p - 1) + nu * be * 0.7 ** al * 1.3 ** (be - 1)]
    assert spec.nonlinearity(u)[:, 0] == pytest.approx(expected, rel=1e-14)


def test_spec_tables_are_checked(p3):
    good = {"kappa": [[1, 2], [2, 1]], "alpha_ij": [[3, 3], [3, 3]], "beta_ij": [[3, 3], [3, 3]]}
    assert spec_from_mapping(p3, good).variational
    with pytest.raises(ConstraintViolation, match="must equal p"):
        spec_from_mapping(p3, {**good, "beta_ij": [[3, 2], [3, 3]]})
    with pytest.raises(ConstraintViolation, match="kappa_ij > 0"):
        spec_from_mapping(p3, {**good, "kappa": [[1, 0], [2, 1]]})
    with pytest.raises(ConstraintViolation, match="k >= 2"):
        spec_from_mapping(p3, {"kappa": [[1]], "alpha_ij": [[3]], "beta_ij": [[3]]})
    with pytest.raises(ConstraintViolation, match="missing keys"):
        spec_from_mapping(p3, {"kappa": [[1]]})
    lopsided = {**good, "kappa": [[1, 2], [1, 1]], "alpha_ij": [[3, 2], [4, 3]],
                "beta_ij": [[3, 4], [2, 3]]}
    assert not spec_from_mapping(p3, lopsided).variational


def test_random_specs_are_variational(weighted, rng):
    for k in (2, 3, 4):
        spec = random_variational_spec(weighted, k, rng)
        assert spec.k == k and spec.variational
        json.dumps(spec.to_dict())
