"""Exact scalar arithmetic.

Three scalar kinds are used throughout the package:

* ``fractions.Fraction``  -- plain rationals,
* ``CycloNumber``         -- elements of Q(zeta_n), reduced modulo the n-th
                             cyclotomic polynomial,
* ``complex``             -- floating point, quarantined to the numeric limit
                             check in :mod:`qharmonic.qseries`; it never mixes
                             with the exact kinds.

``TPoly`` is a sparse polynomial in the interpolation variable t whose
coefficients are exact scalars.  Series coefficients everywhere in the
package are TPoly values, so t is never truncated.
"""
from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Union


class QHarmonicError(Exception):
    """Base class for package errors."""


class DivisionByZero(QHarmonicError, ZeroDivisionError):
    """Exact inverse of zero requested."""


class IrrationalCoefficient(QHarmonicError):
    """A coefficient expected to be rational has a nonzero zeta-component."""


Rational = Fraction
Scalar = Union[Fraction, "CycloNumber"]


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" into a Fraction."""
    return Fraction(text.strip())


def render_rational(value: Fraction) -> str:
    """Render a Fraction as "p/q", or "p" when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# integer / rational polynomial helpers (dense, ascending coefficients)
# ---------------------------------------------------------------------------

def _poly_trim(coeffs: list) -> list:
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def _poly_div_exact_int(num: list[int], den: tuple[int, ...]) -> list[int]:
    # den is monic; division over Z is exact for cyclotomic factors
    num = list(num)
    quot = [0] * (len(num) - len(den) + 1)
    for shift in range(len(num) - len(den), -1, -1):
        c = num[shift + len(den) - 1]
        if c:
            quot[shift] = c
            for i, d in enumerate(den):
                num[shift + i] -= c * d
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return quot


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(d for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the n-th cyclotomic polynomial.

    Computed by dividing x^n - 1 by the cyclotomic polynomials of the
    proper divisors of n.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_div_exact_int(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


def _frac_poly_divmod(num: list[Fraction], den: list[Fraction]):
    num = list(num)
    dlead = den[-1]
    quot = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    for shift in range(len(num) - len(den), -1, -1):
        c = num[shift + len(den) - 1] / dlead
        if c:
            quot[shift] = c
            for i, d in enumerate(den):
                num[shift + i] -= c * d
    return quot, _poly_trim(num)


class CycloNumber:
    """An element of Q(zeta_n), stored as rational coefficients of
    1, zeta, ..., zeta^(phi(n)-1) after reduction mod the n-th cyclotomic
    polynomial.  Immutable; arithmetic accepts ints and Fractions on either
    side (promoted to the same order) but refuses other orders and floats.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable) -> None:
        if order < 1:
            raise ValueError("order must be >= 1")
        phi = euler_phi(order)
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > phi:
            cs = self._reduce(order, cs)
        cs += [Fraction(0)] * (phi - len(cs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("CycloNumber is immutable")

    @staticmethod
    def _reduce(order: int, cs: list[Fraction]) -> list[Fraction]:
        mod = cyclotomic_polynomial(order)
        phi = len(mod) - 1
        cs = list(cs)
        for deg in range(len(cs) - 1, phi - 1, -1):
            c = cs[deg]
            if c:
                for i, m in enumerate(mod):
                    cs[deg - phi + i] -= c * m
        del cs[phi:]
        return _poly_trim(cs) or [Fraction(0)]

    @classmethod
    def zeta(cls, order: int) -> "CycloNumber":
        """The fixed primitive order-th root of unity (the class of x)."""
        return cls(order, [0, 1])

    @classmethod
    def from_rational(cls, order: int, value) -> "CycloNumber":
        return cls(order, [Fraction(value)])

    # -- conversions --------------------------------------------------------

    def as_rational(self) -> Fraction | None:
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def __bool__(self) -> bool:
        return any(self.coeffs)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycloNumber):
            if other.order != self.order:
                raise TypeError(
                    f"cannot mix cyclotomic orders {self.order} and {other.order}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNumber.from_rational(self.order, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloNumber(self.order, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloNumber(self.order, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = len(self.coeffs)
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycloNumber(self.order, prod)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        """Multiplicative inverse via the extended Euclidean algorithm
        against the (irreducible) cyclotomic modulus."""
        if not self:
            raise DivisionByZero("inverse of zero in Q(zeta)")
        mod = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        r0, r1 = mod, _poly_trim(list(self.coeffs))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, r = _frac_poly_divmod(r0, r1)
            r0, r1 = r1, r or [Fraction(0)]
            qs1 = [Fraction(0)] * (len(q) + len(s1) - 1)
            for i, a in enumerate(q):
                if a:
                    for j, b in enumerate(s1):
                        if b:
                            qs1[i + j] += a * b
            new_s = [Fraction(0)] * max(len(s0), len(qs1))
            for i, a in enumerate(s0):
                new_s[i] += a
            for i, a in enumerate(qs1):
                new_s[i] -= a
            s0, s1 = s1, _poly_trim(new_s) or [Fraction(0)]
        c = r1[0]
        if not c:
            raise DivisionByZero("modulus shares a factor; zero divisor")
        return CycloNumber(self.order, [a / c for a in s1])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exp: int):
        if not isinstance(exp, int):
            return NotImplemented
        base = self
        if exp < 0:
            base = self.inverse()
            exp = -exp
        out = CycloNumber.from_rational(self.order, 1)
        while exp:
            if exp & 1:
                out = out * base
            base = base * base
            exp >>= 1
        return out

    # -- comparison / hashing ----------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloNumber):
            if other.order == self.order:
                return self.coeffs == other.coeffs
            a, b = self.as_rational(), other.as_rational()
            return a is not None and a == b
        if isinstance(other, (int, Fraction)):
            return self.as_rational() == Fraction(other)
        return NotImplemented

    def __hash__(self) -> int:
        r = self.as_rational()
        if r is not None:
            return hash(r)
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        terms = []
        for e, c in enumerate(self.coeffs):
            if c:
                cs = render_rational(c)
                terms.append(cs if e == 0 else f"{cs}*w^{e}")
        return f"CycloNumber({self.order}; {' + '.join(terms) or '0'})"


def cyclo_invert(a: CycloNumber) -> CycloNumber:
    """Functional form of :meth:`CycloNumber.inverse`."""
    return a.inverse()


def is_rational(a: Scalar) -> tuple[bool, Fraction | None]:
    """Whether a scalar lies in Q; returns (flag, value-or-None)."""
    if isinstance(a, (int, Fraction)):
        return True, Fraction(a)
    if isinstance(a, CycloNumber):
        r = a.as_rational()
        return (r is not None), r
    raise TypeError(f"not an exact scalar: {type(a).__name__}")


def scalar_inverse(a: Scalar) -> Scalar:
    if isinstance(a, CycloNumber):
        return a.inverse()
    if not a:
        raise DivisionByZero("inverse of zero")
    return Fraction(1) / Fraction(a)


def scalar_pow(a: Scalar, exp: int) -> Scalar:
    if isinstance(a, CycloNumber):
        return a ** exp
    a = Fraction(a)
    if exp < 0:
        if not a:
            raise DivisionByZero("inverse of zero")
        return Fraction(1) / a ** (-exp)
    return a ** exp


def scalar_eq(a: Scalar, b: Scalar) -> bool:
    if isinstance(a, CycloNumber) or isinstance(b, CycloNumber):
        if not isinstance(a, CycloNumber):
            a, b = b, a
        return a == b
    return Fraction(a) == Fraction(b)


# ---------------------------------------------------------------------------
# scalar serialization
# ---------------------------------------------------------------------------

def scalar_to_json(a: Scalar):
    """Rationals render as "p/q" strings; cyclotomic values with a nonzero
    zeta-component render as {"order": n, "coeffs": [...]}.  Rational-valued
    CycloNumbers collapse to the plain string form."""
    flag, value = is_rational(a)
    if flag:
        return render_rational(value)
    return {"order": a.order, "coeffs": [render_rational(c) for c in a.coeffs]}


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, str):
        return parse_rational(obj)
    if isinstance(obj, Mapping):
        return CycloNumber(int(obj["order"]), [parse_rational(c) for c in obj["coeffs"]])
    raise ValueError(f"not a scalar encoding: {obj!r}")


# ---------------------------------------------------------------------------
# polynomials in t
# ---------------------------------------------------------------------------

class TPoly:
    """Sparse polynomial in the interpolation variable t with exact scalar
    coefficients.  Zero coefficients are never stored."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, Scalar] | None = None) -> None:
        clean: dict[int, Scalar] = {}
        if coeffs:
            for e, c in coeffs.items():
                if e < 0:
                    raise ValueError("negative t-exponent")
                if isinstance(c, int):
                    c = Fraction(c)
                if c:
                    clean[e] = c
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("TPoly is immutable")

    @classmethod
    def const(cls, c) -> "TPoly":
        return cls({0: Fraction(c) if isinstance(c, int) else c})

    @classmethod
    def t(cls) -> "TPoly":
        return cls({1: Fraction(1)})

    @classmethod
    def zero(cls) -> "TPoly":
        return cls()

    @classmethod
    def one(cls) -> "TPoly":
        return cls({0: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber)):
            other = TPoly.const(other)
        if not isinstance(other, TPoly):
            return NotImplemented
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber)):
            other = TPoly.const(other)
        if not isinstance(other, TPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber)):
            if not other:
                return TPoly.zero()
            return TPoly({e: c * other for e, c in self.coeffs.items()})
        if not isinstance(other, TPoly):
            return NotImplemented
        out: dict[int, Scalar] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return TPoly(out)

    __rmul__ = __mul__

    def __pow__(self, exp: int):
        if exp < 0:
            raise ValueError("negative TPoly power")
        out, base = TPoly.one(), self
        while exp:
            if exp & 1:
                out = out * base
            base = base * base
            exp >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, CycloNumber)):
            other = TPoly.const(other)
        if not isinstance(other, TPoly):
            return NotImplemented
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(scalar_eq(c, other.coeffs[e]) for e, c in self.coeffs.items())

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def eval(self, value: Scalar) -> Scalar:
        """Value at t = value."""
        total: Scalar = Fraction(0)
        for e, c in self.coeffs.items():
            total = total + c * scalar_pow(value, e)
        return total

    def affine_t(self, a, b) -> "TPoly":
        """Substitute t -> a*t + b (a, b rational)."""
        a, b = Fraction(a), Fraction(b)
        out = TPoly.zero()
        img = TPoly({1: a, 0: b}) if b else TPoly({1: a})
        for e, c in self.coeffs.items():
            out = out + (img ** e) * c
        return out

    def shift_t(self, delta) -> "TPoly":
        """Substitute t -> t + delta."""
        return self.affine_t(1, delta)

    def map_coeffs(self, fn) -> "TPoly":
        return TPoly({e: fn(c) for e, c in self.coeffs.items()})

    def rationalized(self) -> "TPoly":
        """Copy with every coefficient forced into Q.

        Raises IrrationalCoefficient if any coefficient has a nonzero
        zeta-component."""
        out: dict[int, Scalar] = {}
        for e, c in self.coeffs.items():
            flag, value = is_rational(c)
            if not flag:
                raise IrrationalCoefficient(f"t^{e} coefficient {c!r} is not rational")
            out[e] = value
        return TPoly(out)

    def divexact(self, divisor: "TPoly") -> "TPoly":
        """Exact polynomial division; raises if the remainder is nonzero."""
        if divisor.is_zero():
            raise DivisionByZero("TPoly division by zero")
        rem = dict(self.coeffs)
        dd = divisor.degree()
        dlead_inv = scalar_inverse(divisor.coeffs[dd])
        quot: dict[int, Scalar] = {}
        while rem:
            rd = max(rem)
            if rd < dd:
                break
            c = rem[rd] * dlead_inv
            quot[rd - dd] = c
            for e, dc in divisor.coeffs.items():
                s = rem.get(rd - dd + e, 0) - c * dc
                if s:
                    rem[rd - dd + e] = s
                else:
                    rem.pop(rd - dd + e, None)
        if rem:
            raise ArithmeticError("non-exact TPoly division")
        return TPoly(quot)

    def to_json(self) -> dict:
        return {f"t^{e}": scalar_to_json(c) for e, c in sorted(self.coeffs.items())}

    @classmethod
    def from_json(cls, obj: Mapping) -> "TPoly":
        out = {}
        for key, val in obj.items():
            if not key.startswith("t^"):
                raise ValueError(f"bad TPoly key {key!r}")
            out[int(key[2:])] = scalar_from_json(val)
        return cls(out)

    def __repr__(self) -> str:
        return f"TPoly({json.dumps(self.to_json())})"


def as_tpoly(value) -> TPoly:
    """Promote a scalar (or pass through a TPoly)."""
    if isinstance(value, TPoly):
        return value
    if isinstance(value, (int, Fraction, CycloNumber)):
        return TPoly.const(value)
    raise TypeError(f"cannot promote {type(value).__name__} to TPoly")


def binomial(n: int, k: int) -> int:
    """C(n, k), zero outside the triangle (n may be any nonnegative int)."""
    if k < 0 or k > n:
        return 0
    return comb(n, k)
