import math

import numpy as np
import pytest

from henon import CouplingSpec, validate_params
from henon import groundstate as gs
from henon.errors import DomainError, SymmetryBreakingRegime
from henon.params import felli_schneider, random_variational_spec, symmetric_params

from conftest import pair, random_params
from oracles import TALENTI_N3, lp_mass_beta, lp_mass_quad, sharp_constant_oracle, talenti_dirichlet_check


def test_f_examples(p3):
    assert gs.f_value(p3, 1, 0) == 1.0
    assert gs.f_value(p3, 0, 5) == pytest.approx(1.0, rel=1e-15)
    # x = y = 1: 2 / (2 + 6 nu)^{1/3}
    assert gs.f_value(p3, 1, 1) == pytest.approx(2 / 8 ** (1 / 3), rel=1e-15)
    with pytest.raises(DomainError):
        gs.f_value(p3, 0, 0)
    with pytest.raises(DomainError):
        gs.f_value(p3, -1, 1)


def test_f_is_scale_invariant(weighted, rng):
    for _ in range(20):
        x, y = rng.uniform(0.01, 3, 2)
        s = rng.uniform(0.1, 10)
        assert gs.f_value(weighted, s * x, s * y) == pytest.approx(gs.f_value(weighted, x, y), rel=1e-13)


def test_k_function_matches_pair(weighted):
    spec = CouplingSpec.from_pair(weighted)
    for x in ([0.3, 0.7], [1.0, 0.0], [2.0, 5.0]):
        assert gs.f_value_k(spec, x) == pytest.approx(gs.f_value(weighted, *x), rel=1e-14)


@pytest.mark.parametrize("alpha, nu, label", [
    (3, 0.1, gs.CaseLabel.CASE_III),
    (3, 2.0, gs.CaseLabel.CASE_II),
    (3, 0.5, gs.CaseLabel.UNCLASSIFIED),
])
def test_case_labels_p6(alpha, nu, label):
    assert gs.regime_cases(validate_params(3, 0, 0, nu, alpha, 6 - alpha)) is label


def test_case_i_label():
    P = pair(4, 0, 0, 1.0, 1.5 / 4)
    assert (P.p, P.alpha, P.beta) == (4, 1.5, 2.5)
    assert gs.regime_cases(P) is gs.CaseLabel.CASE_I


def test_case_three_minimum_on_the_boundary():
    P = validate_params(3, 0, 0, 0.2, 3, 3)
    x, fmin = gs.minimize_f(P)
    assert fmin == pytest.approx(1.0, abs=1e-12)
    assert min(x) == 0.0


def test_case_two_symmetric_minimum():
    # alpha = beta and large nu: the symmetric point wins, f = 2 / (2 + p nu)^{2/p}
    P = validate_params(3, 0, 0, 5.0, 3, 3)
    x, fmin = gs.minimize_f(P)
    assert x == pytest.approx([0.5, 0.5], abs=1e-8)
    assert fmin == pytest.approx(2 / (2 + 6 * 5.0) ** (1 / 3), rel=1e-12)


def test_minimum_agrees_with_dense_grid(rng):
    for _ in range(6):
        P = random_params(rng)
        x, fmin = gs.minimize_f(P)
        dense = np.min([gs.f_value(P, a, 1 - a) for a in np.linspace(0, 1, 2001)])
        assert fmin <= dense + 1e-12
        assert gs.f_value(P, *x) == pytest.approx(fmin, rel=1e-14)


def test_pair_written_as_spec_has_the_same_minimum(weighted):
    spec = CouplingSpec.from_pair(weighted)
    x2, f2 = gs.minimize_f(spec)
    _, fp = gs.minimize_f(weighted)
    assert f2 == pytest.approx(fp, rel=1e-14)


def test_k_minimiser_is_no_worse_than_probes(weighted, rng):
    spec = random_variational_spec(weighted, 3, rng)
    x, fmin = gs.minimize_f(spec)
    assert x.sum() == pytest.approx(1.0, rel=1e-14)
    for probe in rng.dirichlet(np.ones(3), 2000):
        assert fmin <= gs.f_value_k(spec, probe) + 1e-12


def test_talenti_constant():
    grad, mass, closed = talenti_dirichlet_check()
    assert grad == pytest.approx(closed, rel=1e-12) and mass == pytest.approx(closed, rel=1e-12)
    S = gs.sharp_ckn_constant(symmetric_params(3))
    assert S == pytest.approx(TALENTI_N3, rel=1e-12)


def test_sharp_constant_matches_beta_closed_form(rng):
    for _ in range(8):
        P = random_params(rng)
        assert gs.sharp_ckn_constant(P) == pytest.approx(sharp_constant_oracle(P.n, P.a, P.b), rel=1e-11)


def test_beta_form_agrees_with_plain_quadrature():
    for n, a, b in ((3, 0, 0), (4, 0.3, 0.5), (6, -0.5, 0.2)):
        assert float(lp_mass_beta(n, a, b)) == pytest.approx(float(lp_mass_quad(n, a, b)), rel=1e-15)


def test_sharp_constant_ignores_the_scale(weighted):
    S = gs.sharp_ckn_constant(weighted)
    for mu in (0.01, 0.5, 7.0, 300.0):
        assert gs.sharp_ckn_constant(weighted, mu) == pytest.approx(S, rel=1e-10)


def test_sharp_constant_refuses_symmetry_breaking():
    P = symmetric_params(3, -1, -0.95)
    with pytest.raises(SymmetryBreakingRegime, match="b_FS"):
        gs.sharp_ckn_constant(P)
    # on the curve itself the bubble is still an extremal
    assert gs.sharp_ckn_constant(symmetric_params(3, -1, felli_schneider(3, -1))) > 0


def test_vector_constant_and_case_three_equality():
    P = pair(3, 0, 0, 0.1)
    rep = gs.ground_state_report(P)
    assert rep.case_label is gs.CaseLabel.CASE_III
    assert rep.S_bar == pytest.approx(rep.S, rel=1e-12)
    assert gs.vector_ckn_constant(P) == pytest.approx(rep.S * rep.f_min, rel=1e-14)


def test_energy_tends_to_single_bubble_level():
    P = pair(5, 0.2, 0.4, 1e-4, 0.5)
    energy, _ = gs.ground_energy(P)
    S = gs.sharp_ckn_constant(P)
    p = P.p
    single = (0.5 - 1 / p) * S ** (p / (p - 2))
    assert energy <= single * (1 + 1e-14)
    # alpha < 2 here, so the minimiser is interior but only slightly below 1
    assert energy == pytest.approx(single, rel=1e-2)


def test_normalisation_factor_solves_the_system(rng):
    for _ in range(5):
        P = random_params(rng)
        energy, s = gs.ground_energy(P)
        x, _ = gs.minimize_f(P)
        assert gs.normalisation_residual(P, x, s) < 1e-12


def test_energy_identity_and_nehari(weighted):
    rep = gs.ground_state_report(weighted)
    d, pot = gs.synchronised_energies(weighted, rep.minimizer, rep.s_factor)
    assert (0.5 - 1 / weighted.p) * d == pytest.approx(rep.energy, rel=1e-8)
    assert d == pytest.approx(pot, rel=1e-8)


def test_scalar_rayleigh_quotient_bounded_below(weighted, rng):
    S = gs.sharp_ckn_constant(weighted)
    assert gs.scalar_rayleigh_quotient(weighted, gs.bubble_combination(weighted, [1.0], [1.0]), [1.0]) \
        == pytest.approx(S, rel=1e-10)
    for _ in range(50):
        m = rng.integers(1, 4)
        mus = np.exp(rng.uniform(-2, 2, m))
        q = gs.scalar_rayleigh_quotient(weighted, gs.bubble_combination(weighted, rng.normal(size=m), mus), mus)
        assert q >= S * (1 - 1e-10)


def test_vector_quotient_attains_bound_at_ground_state(weighted):
    rep = gs.ground_state_report(weighted)
    x = rep.minimizer
    q = gs.vector_rayleigh_quotient(weighted, gs.bubble_combination(weighted, [x[0]], [1.0]),
                                    gs.bubble_combination(weighted, [x[1]], [1.0]), [1.0])
    assert q == pytest.approx(rep.S_bar, rel=1e-10)


def test_report_serialises(weighted):
    d = gs.ground_state_report(weighted).to_dict()
    assert set(d) >= {"minimizer", "f_min", "case_label", "S", "S_bar", "energy"}
    assert d["case_label"] == "case_i"
    assert math.isfinite(d["energy"])
