"""Direct summation of finite multiple harmonic q-series and their truncated
polylogarithm companions.

Everything here is literal: nested sums over decreasing tuples of summation
indices, with exact scalar arithmetic.  The generating-function module is
checked against these evaluators, never the other way around.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Mapping

from .exact import (
    CycloNumber,
    QHarmonicError,
    Scalar,
    TPoly,
    is_rational,
    scalar_inverse,
    scalar_pow,
    scalar_to_json,
)
from .indices import (
    HeightProfile,
    MultiIndex,
    enumerate_indices,
    enumerate_patterns,
    weight,
)


class InvalidQ(QHarmonicError):
    """q is a root of unity of order below the truncation length."""


@dataclass(frozen=True)
class SeriesParams:
    """Truncation length n and base point q (exact scalar).

    Validation rejects q with q^m = 1 for any 1 <= m < n, which would put a
    zero into a denominator."""

    n: int
    q: Scalar

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidQ(f"truncation length must be a positive int, got {self.n!r}")
        q = self.q
        if isinstance(q, int):
            object.__setattr__(self, "q", Fraction(q))
            q = self.q
        if isinstance(q, Fraction):
            if q == 1 and self.n >= 2:
                raise InvalidQ("q = 1")
            if q == -1 and self.n >= 3:
                raise InvalidQ("q = -1 with n >= 3")
        elif isinstance(q, CycloNumber):
            p = q
            for m in range(1, self.n):
                if m > 1:
                    p = p * q
                if p == 1:
                    raise InvalidQ(f"q^{m} = 1 with n = {self.n}")
        else:
            raise InvalidQ(f"q must be an exact scalar, got {type(q).__name__}")

    @property
    def kind(self) -> str:
        return "cyclotomic" if isinstance(self.q, CycloNumber) else "rational"


def zeta_params(n: int) -> SeriesParams:
    """Parameters at the fixed primitive n-th root of unity."""
    return SeriesParams(n, CycloNumber.zeta(n))


@lru_cache(maxsize=1 << 14)
def _qpow(params: SeriesParams, e: int) -> Scalar:
    return scalar_pow(params.q, e)


@lru_cache(maxsize=1 << 12)
def _inv_one_minus_qm(params: SeriesParams, m: int) -> Scalar:
    return scalar_inverse(1 - _qpow(params, m))


@lru_cache(maxsize=1 << 12)
def _inv_qint(params: SeriesParams, m: int) -> Scalar:
    # inverse of the q-integer (1 - q^m)/(1 - q), computed from the quotient
    # itself so the modified/unmodified evaluators stay independent
    qint = (1 - _qpow(params, m)) * scalar_inverse(1 - params.q)
    return scalar_inverse(qint)


def _check_parts(parts: MultiIndex):
    if any(p < 1 for p in parts):
        raise ValueError(f"index parts must be positive: {parts!r}")


def _decreasing_tuples(n: int, l: int, strict: bool):
    pool = range(1, n)
    combos = combinations(pool, l) if strict else combinations_with_replacement(pool, l)
    for combo in combos:
        yield tuple(sorted(combo, reverse=True))


def _zbar_raw(parts: MultiIndex, params: SeriesParams, strict: bool = True) -> Scalar:
    if parts == (0,):
        # literal sum of q^(-m); at q = zeta_n this is the conventional -1
        total: Scalar = Fraction(0)
        qinv = scalar_inverse(params.q)
        for m in range(1, params.n):
            total = total + scalar_pow(qinv, m)
        return total
    _check_parts(parts)
    if not parts:
        return Fraction(1)
    total = Fraction(0)
    for ms in _decreasing_tuples(params.n, len(parts), strict):
        term: Scalar = Fraction(1)
        for k, m in zip(parts, ms):
            term = term * _qpow(params, (k - 1) * m) * scalar_pow(_inv_one_minus_qm(params, m), k)
        total = total + term
    return total


def _z_raw(parts: MultiIndex, params: SeriesParams, strict: bool = True) -> Scalar:
    _check_parts(parts)
    if not parts:
        return Fraction(1)
    total: Scalar = Fraction(0)
    for ms in _decreasing_tuples(params.n, len(parts), strict):
        term: Scalar = Fraction(1)
        for k, m in zip(parts, ms):
            term = term * _qpow(params, (k - 1) * m) * scalar_pow(_inv_qint(params, m), k)
        total = total + term
    return total


@lru_cache(maxsize=1 << 16)
def zbar(parts: MultiIndex, params: SeriesParams) -> Scalar:
    """Sum over n > m_1 > ... > m_l > 0 of q^((k_1-1)m_1 + ...) divided by
    (1-q^(m_1))^(k_1) * ... ; the depth-one index (0) is the literal sum of
    q^(-m) over the same range."""
    return _zbar_raw(parts, params, strict=True)


@lru_cache(maxsize=1 << 16)
def zbar_star(parts: MultiIndex, params: SeriesParams) -> Scalar:
    """Non-strict variant (m_1 >= m_2 >= ... >= m_l)."""
    return _zbar_raw(parts, params, strict=False)


@lru_cache(maxsize=1 << 16)
def z(parts: MultiIndex, params: SeriesParams) -> Scalar:
    """Variant with q-integer denominators ((1-q^m)/(1-q)) and the same
    numerator powers."""
    return _z_raw(parts, params, strict=True)


@lru_cache(maxsize=1 << 16)
def z_star(parts: MultiIndex, params: SeriesParams) -> Scalar:
    return _z_raw(parts, params, strict=False)


@lru_cache(maxsize=1 << 16)
def zbar_t(parts: MultiIndex, params: SeriesParams) -> TPoly:
    """t-interpolation: sum over three-letter box fillings of the contracted
    value times t^(depth drop).  t = 0 recovers zbar, t = 1 the star sum."""
    out = TPoly.zero()
    for contracted, texp in enumerate_patterns(parts, minusplus=True):
        out = out + TPoly({texp: Fraction(1)}) * zbar(contracted, params)
    return out


@lru_cache(maxsize=1 << 16)
def z_t(parts: MultiIndex, params: SeriesParams) -> TPoly:
    """t-interpolation of the q-integer variant; merged letters change the
    weight, compensated by powers of (1 - q)."""
    k = weight(parts)
    out = TPoly.zero()
    for contracted, texp in enumerate_patterns(parts, minusplus=True):
        factor = scalar_pow(1 - params.q, k - weight(contracted))
        out = out + TPoly({texp: Fraction(1)}) * (factor * z(contracted, params))
    return out


@lru_cache(maxsize=1 << 14)
def g_sum(profile: HeightProfile, params: SeriesParams) -> TPoly:
    """Sum of zbar_t over every index matching the profile; the all-zero
    profile contributes 1, an empty index set contributes 0."""
    out = TPoly.zero()
    for parts in enumerate_indices(profile):
        out = out + zbar_t(parts, params)
    return out


# ---------------------------------------------------------------------------
# truncated polylogarithms: polynomials in z of degree < n
# ---------------------------------------------------------------------------

class ZPoly:
    """Polynomial in the polylogarithm variable z with TPoly coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, TPoly] | None = None) -> None:
        clean: dict[int, TPoly] = {}
        if coeffs:
            for e, c in coeffs.items():
                if e < 0:
                    raise ValueError("negative z-exponent")
                if not isinstance(c, TPoly):
                    c = TPoly.const(c)
                if not c.is_zero():
                    clean[e] = c
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("ZPoly is immutable")

    @classmethod
    def zero(cls) -> "ZPoly":
        return cls()

    @classmethod
    def one(cls) -> "ZPoly":
        return cls({0: TPoly.one()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber, TPoly)):
            other = ZPoly({0: other})
        if not isinstance(other, ZPoly):
            return NotImplemented
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, TPoly.zero()) + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return ZPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ZPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber, TPoly)):
            other = ZPoly({0: other})
        if not isinstance(other, ZPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber, TPoly)):
            tp = other if isinstance(other, TPoly) else TPoly.const(other)
            return ZPoly({e: c * tp for e, c in self.coeffs.items()})
        if not isinstance(other, ZPoly):
            return NotImplemented
        out: dict[int, TPoly] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                s = out.get(e, TPoly.zero()) + c1 * c2
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return ZPoly(out)

    __rmul__ = __mul__

    def shift_z(self, s: int) -> "ZPoly":
        return ZPoly({e + s: c for e, c in self.coeffs.items()})

    def eval_z_one(self) -> TPoly:
        out = TPoly.zero()
        for c in self.coeffs.values():
            out = out + c
        return out

    def map_coeffs(self, fn) -> "ZPoly":
        return ZPoly({e: fn(c) for e, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZPoly):
            return NotImplemented
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(c == other.coeffs[e] for e, c in self.coeffs.items())

    def first_mismatch(self, other: "ZPoly"):
        for e in sorted(set(self.coeffs) | set(other.coeffs)):
            a = self.coeffs.get(e, TPoly.zero())
            b = other.coeffs.get(e, TPoly.zero())
            if a != b:
                return e, a, b
        return None

    def to_json(self) -> dict:
        return {f"z^{e}": c.to_json() for e, c in sorted(self.coeffs.items())}

    def __repr__(self) -> str:
        return f"ZPoly({self.to_json()})"


@lru_cache(maxsize=1 << 14)
def L_poly(parts: MultiIndex, params: SeriesParams, variant: str = "plain") -> ZPoly:
    """Truncated polylogarithm as a z-polynomial of degree < n.

    plain:  sum over n > m_1 > ... > m_l > 0 of z^(m_1) over the usual
            denominator product;
    star:   non-strict inner indices;
    interp: two-letter (comma/plus) t-interpolation of the plain variant.
    """
    _check_parts(parts)
    if variant == "interp":
        out = ZPoly.zero()
        for contracted, texp in enumerate_patterns(parts, minusplus=False):
            out = out + L_poly(contracted, params, "plain") * TPoly({texp: Fraction(1)})
        return out
    if variant not in ("plain", "star"):
        raise ValueError(f"unknown variant {variant!r}")
    if not parts:
        return ZPoly.one()
    acc: dict[int, Scalar] = {}
    for ms in _decreasing_tuples(params.n, len(parts), strict=(variant == "plain")):
        term: Scalar = Fraction(1)
        for k, m in zip(parts, ms):
            term = term * scalar_pow(_inv_one_minus_qm(params, m), k)
        acc[ms[0]] = acc.get(ms[0], Fraction(0)) + term
    out = ZPoly({e: TPoly.const(c) for e, c in acc.items() if c})
    assert out.degree() < params.n
    return out


def theta_q(f: ZPoly, params: SeriesParams) -> ZPoly:
    """The q-difference operator f(z) - f(qz): diagonal on z-powers with
    eigenvalue 1 - q^i."""
    return ZPoly({e: c * (1 - _qpow(params, e)) for e, c in f.coeffs.items()})


@lru_cache(maxsize=1 << 14)
def x_sum(profile: HeightProfile, params: SeriesParams) -> ZPoly:
    """Sum of interpolated truncated polylogarithms over the profile's index
    set; the all-zero profile with j = -1 is the constant 1."""
    out = ZPoly.zero()
    for parts in enumerate_indices(profile):
        out = out + L_poly(parts, params, "interp")
    return out


def x_sum_or_zero(k: int, l: int, h=(), j: int = -1, params: SeriesParams = None) -> ZPoly:
    """x_sum with out-of-shape profiles reading as the empty index set."""
    profile = HeightProfile.try_make(k, l, h, j)
    if profile is None:
        return ZPoly.zero()
    return x_sum(profile, params)


# ---------------------------------------------------------------------------
# floating point limit evaluation (quarantined from the exact paths)
# ---------------------------------------------------------------------------

def z_float(parts: MultiIndex, n: int) -> complex:
    """The q-integer variant at q = exp(2*pi*i/n), evaluated by a prefix-sum
    recursion over the summation levels (O(depth * n))."""
    _check_parts(parts)
    if not parts:
        return 1.0 + 0.0j
    roots = [cmath.exp(2j * cmath.pi * m / n) for m in range(n)]
    one_minus_q = 1 - roots[1 % n]

    def level_values(k: int) -> list[complex]:
        vals = [0j] * n
        for m in range(1, n):
            qint = (1 - roots[(m) % n]) / one_minus_q
            vals[m] = roots[((k - 1) * m) % n] / qint ** k
        return vals

    acc = [1.0 + 0j] * (n + 1)
    for k in reversed(parts):
        f = level_values(k)
        new = [0j] * (n + 1)
        running = 0j
        for m in range(1, n + 1):
            # new[m] = sum over m' < m of f(m') * acc[m']
            new[m] = running
            if m <= n - 1:
                running += f[m] * acc[m]
        acc = new
    return acc[n]


def z_t_float(parts: MultiIndex, n: int, t: float) -> complex:
    """Two-letter (comma/plus) t-interpolation of z_float; merges preserve
    the weight, so no (1-q) compensation appears."""
    out = 0j
    for contracted, texp in enumerate_patterns(parts, minusplus=False):
        out += z_float(contracted, n) * (t ** texp)
    return out


def render_scalar(a: Scalar):
    return scalar_to_json(a)
