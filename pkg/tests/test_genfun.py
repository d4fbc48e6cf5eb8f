from fractions import Fraction

import pytest

from qharmonic.exact import TPoly
from qharmonic.genfun import (
    IdentityReport,
    PINNED_QHS_WITNESS,
    PPoly,
    ZeroPochhammerDenominator,
    eval_constant_index,
    exponents_of_profile,
    f_r1,
    formal_x,
    ftilde_polys,
    h_closed_k3,
    h_poly_k3,
    kpow_generating,
    kpow_ratio_closed,
    mat_mul,
    p_poly,
    pascal_T,
    profile_from_exponents,
    psi_bruteforce,
    psi_product,
    qhs_phi_coefficients,
    qhs_truncated,
    reflect_companion,
    roundtrip_u,
    scalar_mismatch,
    search_qhs_witness,
    series_affine_t,
    series_eval_t,
    series_mismatch,
    sum_formula,
    tpoly_mismatch,
    u_collapsed,
    u_from_x,
    u_poly,
    u_poly_ratio,
    u_special,
    validate_qhs_witness,
    x_from_u,
    xi_ones_coeff,
)
from qharmonic.indices import HeightProfile
from qharmonic.qseries import zbar_t, zeta_params
from qharmonic.series import SeriesRing

T = TPoly.t()


def test_x_from_u_r1_explicit():
    """At r=1 the composed series have a closed shape small enough to write out."""
    xset = x_from_u(1, 6)
    ring = xset.ring
    u1, u2, u3 = ring.var("u1"), ring.var("u2"), ring.var("u3")
    inv = (ring.one() + u1).invert()
    assert xset.x[0] == u1 * inv
    assert xset.x[1] == u2 - u3 * inv
    assert xset.x[2] == u3 * inv * inv


def test_u_from_x_r1_explicit():
    us = u_from_x(1, 6)
    ring = us[0].ring
    x1, x2, x3 = ring.var("x1"), ring.var("x2"), ring.var("x3")
    inv = (ring.one() - x1).invert()
    assert us[0] == x1 * inv
    assert us[1] == x2 + x3 * inv
    assert us[2] == x3 * inv * inv


@pytest.mark.parametrize("r", [1, 2, 3])
def test_substitutions_invert_each_other(r):
    rt = roundtrip_u(r, 5)
    ring = rt[0].ring
    assert rt == tuple(ring.var(f"u{i}") for i in range(1, r + 3))


def test_x_from_u_rejects_bad_arguments():
    with pytest.raises(ValueError):
        x_from_u(0, 4)
    with pytest.raises(ValueError):
        u_from_x(1, 0)


def test_profile_exponent_roundtrip():
    profiles = [
        HeightProfile(3, 2, (1,)),
        HeightProfile(5, 2, (2, 1)),
        HeightProfile(8, 3, (2, 2, 1)),
    ]
    for prof in profiles:
        r = len(prof.h)
        exps = exponents_of_profile(prof)
        assert len(exps) == r + 2
        assert profile_from_exponents(r, exps) == prof


def test_p_poly_r1_coefficients():
    """T^2 - (x1 + s*x2) T - s (x3 - x1 x2), with s = t or t-1."""
    fx = formal_x(1, 4)
    x1, x2, x3 = fx.x
    plain = p_poly(1, 0, fx)
    assert plain.coeffs[2] == fx.ring.one()
    assert plain.coeffs[1] == -(x1 + x2 * T)
    assert plain.coeffs[0] == -((x3 - x1 * x2) * T)
    shifted = p_poly(1, -1, fx)
    assert shifted.coeffs[1] == -(x1 + x2 * (T - TPoly.one()))
    assert shifted.coeffs[0] == -((x3 - x1 * x2) * (T - TPoly.one()))


def test_p_poly_validation():
    fx = formal_x(1, 4)
    with pytest.raises(ValueError):
        p_poly(1, 2, fx)
    with pytest.raises(ValueError):
        p_poly(2, 0, fx)
    ring = fx.ring
    with pytest.raises(ValueError):
        PPoly(r=1, shift=0, coeffs=(ring.one(), ring.one(), ring.zero()))


@pytest.mark.parametrize("n,r,cap", [(3, 1, 3), (2, 2, 2), (4, 1, 2)])
def test_psi_product_matches_bruteforce(n, r, cap):
    q = Fraction(1, 2)
    assert psi_product(n, r, q, cap) == psi_bruteforce(n, r, q, cap)


def test_psi_coefficient_t_degree_bound():
    # each u-monomial's coefficient has t-degree below the depth it encodes
    psi = psi_bruteforce(3, 1, Fraction(1, 2), 3)
    for exps, tp in psi.terms.items():
        prof = profile_from_exponents(1, exps)
        assert tp.degree() <= max(prof.l - 1, 0)


def test_reflection_fixes_psi():
    psi = psi_bruteforce(3, 1, Fraction(1, 2), 3)
    assert psi * reflect_companion(psi) == psi.ring.one()


def test_series_t_helpers():
    ring = SeriesRing(("u1", "u2"), 2)
    s = ring.var("u1") * TPoly({0: Fraction(1), 1: Fraction(2)}) + ring.var("u2")
    assert series_affine_t(s, 1, 0) == s
    evaluated = series_eval_t(s, Fraction(3))
    assert evaluated.coefficient({"u1": 1}) == TPoly.const(7)
    assert reflect_companion(reflect_companion(s)) == s


def test_u_poly_smallest_cases():
    first = u_poly(1)
    assert first == first.ring.one()
    second = u_poly(2)
    assert second.coefficient({}) == TPoly.const(2)
    assert second.coefficient({"u1": 1}) == TPoly.one()
    assert second.coefficient({"u2": 1}) == TPoly({1: Fraction(-1)})
    assert second.coefficient({"u3": 1}) == TPoly({1: Fraction(1, 2)})
    assert second.coefficient({"u1": 1, "u2": 1}) == TPoly({1: Fraction(-1, 2)})
    assert len(second.sorted_terms()) == 5
    with pytest.raises(ValueError):
        u_poly(0)


def test_u_poly_ratio_has_unit_constant():
    ratio = u_poly_ratio(2, 3)
    assert ratio.constant_term() == TPoly.one()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_u_special_slices_u_poly(n):
    special = u_special(n)
    assert special.constant_term() == TPoly.const(n)
    sliced = u_poly(n).set_var_zero("u1").set_var_zero("u2")
    assert len(sliced.sorted_terms()) == len(special.sorted_terms())
    for i in range(n):
        assert sliced.coefficient({"u3": i}) == special.coefficient({"u3": i})


@pytest.mark.parametrize("n", [2, 3])
def test_u_collapsed_is_u_poly_on_the_diagonal(n):
    target = SeriesRing(("u1", "u2"), 2 * n)
    diag = target.var("u1") * target.var("u2")
    assert u_poly(n).substitute({"u3": diag}, target) == u_collapsed(n)


def test_sum_formula_spot_values():
    assert sum_formula(3, 2, 1, "eq12") == TPoly.const(Fraction(-2, 3))
    assert sum_formula(3, 2, 2, "eq13") == TPoly({0: Fraction(1, 3), 1: Fraction(1, 3)})
    assert sum_formula(4, 3, 2, "eq13") == sum_formula(4, 3, 2, "eq14")
    # the rearranged truncation picks up the complementary binomial range
    assert sum_formula(7, 5, 2, "eq12") == sum_formula(7, 5, 2, "btt314")


def test_sum_formula_rejects_bad_shapes():
    with pytest.raises(ValueError):
        sum_formula(1, 2, 1, "eq13")
    with pytest.raises(ValueError):
        sum_formula(3, 1, 2, "eq13")
    with pytest.raises(ValueError):
        sum_formula(3, 2, 0, "btt314")
    with pytest.raises(ValueError):
        sum_formula(3, 2, 1, "nope")


def test_eval_constant_index_spots():
    assert eval_constant_index(1, 0, 5) == TPoly.one()
    assert eval_constant_index(2, 1, 3) == TPoly.const(Fraction(-2, 3))
    assert eval_constant_index(1, 2, 3) == TPoly({0: Fraction(1, 3), 1: Fraction(1, 3)})
    assert eval_constant_index(2, 2, 4) == zbar_t((2, 2), zeta_params(4)).rationalized()
    with pytest.raises(ValueError):
        eval_constant_index(4, 1, 3)
    with pytest.raises(ValueError):
        eval_constant_index(2, -1, 3)


def test_kpow_generating_structure():
    gen = kpow_generating(2, 4, 3)
    assert gen.coefficient({}) == TPoly.one()
    assert gen.coefficient({"v": 2}) == eval_constant_index(2, 2, 4)
    for exps, tp in gen.terms.items():
        assert tp.degree() <= exps[0]
    assert gen == kpow_ratio_closed(2, 4, 3)


def test_h_poly_k3_matches_closed_form():
    assert h_poly_k3(3, 3) == h_closed_k3(3, 3)
    assert h_poly_k3(4, 2) == h_closed_k3(4, 2)


def test_ftilde_explicit_k2():
    ring = SeriesRing(("u", "v"), 4)
    one, u, v = ring.one(), ring.var("u"), ring.var("v")
    f0, f1, f2 = ftilde_polys(2, ring)
    assert f0 == one - u
    assert f2 == one - u
    assert f1 == one - (ring.scalar(Fraction(2)) + v * T) * u + ring.var("u", 2)


def test_ftilde_explicit_k3():
    ring = SeriesRing(("u", "v"), 4)
    one, u, v = ring.one(), ring.var("u"), ring.var("v")
    e1 = ring.scalar(Fraction(3)) - v * T
    f0, f1, f2, f3 = ftilde_polys(3, ring)
    assert f0 == one - u
    assert f1 == one - e1 * u + ring.var("u", 2) * 3 - ring.var("u", 3)
    assert f2 == one - u * 3 + e1 * ring.var("u", 2) - ring.var("u", 3)
    assert f3 == one - u
    with pytest.raises(ValueError):
        ftilde_polys(4, ring)


def test_f_r1_shapes():
    f12 = f_r1("F12")
    ring = f12.ring
    inv = (ring.one() + ring.var("u1")).invert()
    expected = ring.one() - (ring.one() - ring.var("u2") * T) * inv * ring.var("u")
    assert f12 == expected
    f11 = f_r1("F11")
    # the two slices truncate at different total degrees, so compare low order
    low = SeriesRing(("u", "u1", "u2", "u3"), 2)
    assert f11.coefficient_of("u", 2).in_ring(low) == (
        f12.coefficient_of("u", 1) * Fraction(-1)
    ).in_ring(low)
    with pytest.raises(ValueError):
        f_r1("F13")


def test_pascal_pair():
    mat, inv = pascal_T(2)
    assert mat == ((1, 1), (0, 1))
    assert inv == ((1, -1), (0, 1))
    for r in range(1, 7):
        mat, inv = pascal_T(r)
        identity = tuple(tuple(int(i == j) for j in range(r)) for i in range(r))
        assert mat_mul(mat, inv) == identity
    with pytest.raises(ValueError):
        pascal_T(0)


def test_xi_ones_coeff_first_values():
    assert xi_ones_coeff(0) == TPoly.one()
    assert xi_ones_coeff(1) == TPoly.const(Fraction(1, 2))
    assert xi_ones_coeff(2) == TPoly({0: Fraction(1, 6), 1: Fraction(-1, 12)})
    assert xi_ones_coeff(3) == TPoly({0: Fraction(1, 24), 1: Fraction(-1, 24)})
    # the depth-3 factor vanishes identically at t=1
    assert xi_ones_coeff(3).eval(Fraction(1)) == 0
    with pytest.raises(ValueError):
        xi_ones_coeff(-1)


def test_qhs_truncated_basics():
    q = Fraction(1, 2)
    assert qhs_truncated((q,), (q,), q, Fraction(3), 0) == 1
    value = qhs_truncated((Fraction(1, 3),), (), q, Fraction(1, 4), 1)
    assert value == Fraction(4, 3)
    with pytest.raises(ValueError):
        qhs_truncated((), (), q, Fraction(1), -1)
    with pytest.raises(ZeroPochhammerDenominator):
        qhs_truncated((Fraction(1),), (Fraction(2),), q, Fraction(1), 2)


def test_pinned_witness_is_valid():
    w = PINNED_QHS_WITNESS
    assert w is not None
    assert validate_qhs_witness(w)
    for shift in (0, -1):
        b, c = w.quad(shift)
        s = w.s_t if shift == 0 else w.s_tm1
        assert s * s == b * b + 4 * c
        for alpha in w.alphas(shift):
            assert w.quad_eval(shift, -alpha) == 0


def test_pinned_witness_closed_matches_hypergeometric():
    closed, hyper = qhs_phi_coefficients(PINNED_QHS_WITNESS)
    assert len(closed) == PINNED_QHS_WITNESS.n - 1
    assert closed == hyper
    assert all(isinstance(c, Fraction) for c in closed)


def test_search_recovers_pinned_witness():
    found = search_qhs_witness()
    assert found is not None
    assert found.to_json() == PINNED_QHS_WITNESS.to_json()


def test_identity_report_validation():
    report = IdentityReport(identity="x", params={}, status="pass")
    assert list(report.to_json()) == [
        "identity", "params", "status", "lhs", "rhs", "mismatch",
    ]
    with pytest.raises(ValueError):
        IdentityReport(identity="x", params={}, status="bogus")
    with pytest.raises(ValueError):
        IdentityReport(identity="x", params={}, status="fail")


def test_mismatch_helpers_locate_first_difference():
    ring = SeriesRing(("u1", "u2"), 2)
    a = ring.var("u1") + ring.var("u2")
    assert series_mismatch(a, a) is None
    hit = series_mismatch(a, ring.var("u1"))
    assert hit == {"term": {"u2": 1}, "lhs": {"t^0": "1"}, "rhs": {}}
    assert tpoly_mismatch(T, T) is None
    assert tpoly_mismatch(T, TPoly.one()) == {
        "t_power": 0, "lhs": "0", "rhs": "1",
    }
    assert scalar_mismatch(Fraction(1), Fraction(1)) is None
    assert scalar_mismatch(Fraction(1), Fraction(2)) == {"lhs": "1", "rhs": "2"}
