"""Truncated sparse multivariate power series with TPoly coefficients.

The truncation cap is a total-degree bound over the ring's *capped*
variables; designated variables (the polylogarithm variable z in practice)
are exempt and never truncated.  One variable may carry a Laurent floor,
allowing bounded negative exponents during change-of-variable assembly.

Products are truncation-exact as long as every operand holds only terms of
nonnegative total degree; the Laurent assembly phases in :mod:`qharmonic.genfun`
run inside enlarged working rings and re-ring to ordinary power series after
asserting that all negative exponents have cancelled.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .exact import (
    CycloNumber,
    QHarmonicError,
    Scalar,
    TPoly,
    as_tpoly,
    scalar_inverse,
)


class NonUnitConstantTerm(QHarmonicError):
    """Series inversion needs a t-free invertible constant term."""


class FloorExceeded(QHarmonicError):
    """An exponent dropped below the ring's Laurent floor."""


class NegativeExponentSurvived(QHarmonicError):
    """A negative exponent remained after a cancellation that should have
    removed all of them."""


class SeriesRing:
    """Shared shape data for Series values: variable names, truncation cap,
    the subset of capped variables, and an optional Laurent floor."""

    __slots__ = ("variables", "cap", "uncapped", "laurent_var", "laurent_floor",
                 "_index", "_capped_idx", "_laurent_idx")

    def __init__(
        self,
        variables: Sequence[str],
        cap: int,
        uncapped: Iterable[str] = (),
        laurent_var: str | None = None,
        laurent_floor: int = 0,
    ) -> None:
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        uncapped = frozenset(uncapped)
        if not uncapped <= set(variables):
            raise ValueError("uncapped names not among variables")
        if laurent_var is not None and laurent_var not in variables:
            raise ValueError("laurent variable not among variables")
        if laurent_var is None and laurent_floor != 0:
            raise ValueError("laurent floor without laurent variable")
        if laurent_floor > 0:
            raise ValueError("laurent floor must be <= 0")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "cap", int(cap))
        object.__setattr__(self, "uncapped", uncapped)
        object.__setattr__(self, "laurent_var", laurent_var)
        object.__setattr__(self, "laurent_floor", int(laurent_floor))
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(variables)})
        object.__setattr__(
            self, "_capped_idx",
            tuple(i for i, v in enumerate(variables) if v not in uncapped))
        object.__setattr__(
            self, "_laurent_idx",
            None if laurent_var is None else variables.index(laurent_var))

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("SeriesRing is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SeriesRing)
            and self.variables == other.variables
            and self.cap == other.cap
            and self.uncapped == other.uncapped
            and self.laurent_var == other.laurent_var
            and self.laurent_floor == other.laurent_floor
        )

    def __hash__(self) -> int:
        return hash((self.variables, self.cap, self.uncapped,
                     self.laurent_var, self.laurent_floor))

    def __repr__(self) -> str:
        return (f"SeriesRing({self.variables}, cap={self.cap}"
                + (f", uncapped={sorted(self.uncapped)}" if self.uncapped else "")
                + (f", laurent=({self.laurent_var},{self.laurent_floor})"
                   if self.laurent_var else "") + ")")

    # -- term helpers -------------------------------------------------------

    def capped_degree(self, exps: tuple[int, ...]) -> int:
        return sum(exps[i] for i in self._capped_idx)

    def check_exponents(self, exps: tuple[int, ...]) -> bool:
        """True when the term is admissible; raises on floor violations,
        returns False when it exceeds the cap (to be dropped)."""
        li = self._laurent_idx
        for i, e in enumerate(exps):
            if e < 0:
                if i != li:
                    raise FloorExceeded(
                        f"negative exponent of {self.variables[i]} in a non-laurent slot")
                if e < self.laurent_floor:
                    raise FloorExceeded(
                        f"{self.laurent_var}^{e} below floor {self.laurent_floor}")
        return self.capped_degree(exps) <= self.cap

    # -- constructors -------------------------------------------------------

    def zero(self) -> "Series":
        return Series(self, {})

    def one(self) -> "Series":
        return self.scalar(Fraction(1))

    def scalar(self, value) -> "Series":
        tp = as_tpoly(value)
        z = (0,) * len(self.variables)
        return Series(self, {z: tp} if not tp.is_zero() else {})

    def var(self, name: str, power: int = 1) -> "Series":
        return self.monomial({name: power})

    def monomial(self, exps: Mapping[str, int], coeff=Fraction(1)) -> "Series":
        e = [0] * len(self.variables)
        for name, p in exps.items():
            e[self._index[name]] = p
        tp = as_tpoly(coeff)
        t = tuple(e)
        if not self.check_exponents(t):
            return self.zero()
        return Series(self, {t: tp} if not tp.is_zero() else {})

    def exponents_up_to_cap(self) -> list[tuple[int, ...]]:
        """All nonnegative exponent tuples (zero on uncapped slots) of total
        degree <= cap, in graded lexicographic order."""
        nv = len(self.variables)
        out: list[tuple[int, ...]] = []

        def rec(i: int, remaining: int, prefix: tuple[int, ...]):
            if i == nv:
                out.append(prefix)
                return
            if i not in self._capped_idx:
                rec(i + 1, remaining, prefix + (0,))
                return
            for e in range(remaining + 1):
                rec(i + 1, remaining - e, prefix + (e,))

        rec(0, self.cap, ())
        out.sort(key=lambda t: (sum(t), t))
        return out


def _term_sort_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class Series:
    """A truncated series: map from exponent tuples to TPoly coefficients.
    Binary operations require both operands in the same ring."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: SeriesRing, terms: Mapping[tuple[int, ...], TPoly]) -> None:
        clean: dict[tuple[int, ...], TPoly] = {}
        for exps, tp in terms.items():
            if tp.is_zero():
                continue
            if ring.check_exponents(exps):
                clean[exps] = tp
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("Series is immutable")

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], TPoly]]:
        return sorted(self.terms.items(), key=lambda kv: _term_sort_key(kv[0]))

    def coefficient(self, exps: Mapping[str, int]) -> TPoly:
        e = [0] * len(self.ring.variables)
        for name, p in exps.items():
            e[self.ring._index[name]] = p
        return self.terms.get(tuple(e), TPoly.zero())

    def constant_term(self) -> TPoly:
        return self.terms.get((0,) * len(self.ring.variables), TPoly.zero())

    def degrees_of(self, name: str) -> set[int]:
        i = self.ring._index[name]
        return {exps[i] for exps in self.terms}

    def assert_no_negative_exponents(self) -> "Series":
        for exps in self.terms:
            if any(e < 0 for e in exps):
                raise NegativeExponentSurvived(
                    f"term {exps} kept a negative exponent")
        return self

    # -- ring changes -------------------------------------------------------

    def in_ring(self, ring: SeriesRing) -> "Series":
        """Recast into a ring with the same variable names (cap/floor may
        differ).  Terms above the new cap are dropped; negative exponents
        must be representable in the new ring."""
        if ring.variables != self.ring.variables:
            raise ValueError("variable mismatch in re-ring")
        out: dict[tuple[int, ...], TPoly] = {}
        for exps, tp in self.terms.items():
            if ring.check_exponents(exps):
                out[exps] = tp
        return Series(ring, out)

    # -- arithmetic ---------------------------------------------------------

    def _check_same_ring(self, other: "Series"):
        if self.ring != other.ring:
            raise ValueError("series from different rings")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber, TPoly)):
            other = self.ring.scalar(other)
        if not isinstance(other, Series):
            return NotImplemented
        self._check_same_ring(other)
        out = dict(self.terms)
        for exps, tp in other.terms.items():
            s = out.get(exps, TPoly.zero()) + tp
            if s.is_zero():
                out.pop(exps, None)
            else:
                out[exps] = s
        return Series(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.ring, {e: -tp for e, tp in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber, TPoly)):
            other = self.ring.scalar(other)
        if not isinstance(other, Series):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber, TPoly)):
            tp = as_tpoly(other)
            if tp.is_zero():
                return self.ring.zero()
            return Series(self.ring, {e: c * tp for e, c in self.terms.items()})
        if not isinstance(other, Series):
            return NotImplemented
        self._check_same_ring(other)
        ring = self.ring
        out: dict[tuple[int, ...], TPoly] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                if not ring.check_exponents(exps):
                    continue
                s = out.get(exps, TPoly.zero()) + c1 * c2
                if s.is_zero():
                    out.pop(exps, None)
                else:
                    out[exps] = s
        return Series(ring, out)

    __rmul__ = __mul__

    def __pow__(self, exp: int):
        if exp < 0:
            return self.invert() ** (-exp)
        out, base = self.ring.one(), self
        while exp:
            if exp & 1:
                out = out * base
            base = base * base
            exp >>= 1
        return out

    def invert(self) -> "Series":
        """Multiplicative inverse up to the cap.

        Requires an all-nonnegative-exponent series over capped variables
        whose constant term is a t-free invertible scalar."""
        ring = self.ring
        if ring.uncapped:
            raise NonUnitConstantTerm("inversion with uncapped variables is unsupported")
        self.assert_no_negative_exponents()
        c0 = self.constant_term()
        if c0.is_zero() or c0.degree() != 0:
            raise NonUnitConstantTerm(
                "constant term must be a nonzero t-free scalar")
        inv0 = scalar_inverse(c0.coeffs[0])
        zero_t = (0,) * len(ring.variables)
        inv_terms: dict[tuple[int, ...], TPoly] = {zero_t: TPoly.const(inv0)}
        nonconst = [(e, c) for e, c in self.terms.items() if e != zero_t]
        for target in ring.exponents_up_to_cap():
            if target == zero_t:
                continue
            acc = TPoly.zero()
            for e, c in nonconst:
                rest = tuple(a - b for a, b in zip(target, e))
                if any(r < 0 for r in rest):
                    continue
                known = inv_terms.get(rest)
                if known is not None:
                    acc = acc + c * known
            if not acc.is_zero():
                inv_terms[target] = acc * (-inv0)
        return Series(ring, inv_terms)

    # -- structure maps -----------------------------------------------------

    def map_terms(self, fn: Callable[[tuple[int, ...], TPoly], TPoly]) -> "Series":
        return Series(self.ring, {e: fn(e, c) for e, c in self.terms.items()})

    def map_coeffs(self, fn: Callable[[TPoly], TPoly]) -> "Series":
        return Series(self.ring, {e: fn(c) for e, c in self.terms.items()})

    def negate_vars(self, names: Iterable[str]) -> "Series":
        """Substitute v -> -v for the named variables."""
        idx = [self.ring._index[n] for n in names]
        out = {}
        for exps, tp in self.terms.items():
            sign = sum(exps[i] for i in idx) & 1
            out[exps] = -tp if sign else tp
        return Series(self.ring, out)

    def coefficient_of(self, name: str, power: int) -> "Series":
        """Sub-series multiplying name^power, with that exponent zeroed."""
        i = self.ring._index[name]
        out = {}
        for exps, tp in self.terms.items():
            if exps[i] == power:
                out[exps[:i] + (0,) + exps[i + 1:]] = tp
        return Series(self.ring, out)

    def set_var_zero(self, name: str) -> "Series":
        return self.coefficient_of(name, 0)

    def set_var_one(self, name: str) -> "Series":
        """Evaluate a polynomially-supported variable at 1 by merging
        exponents (exact; no truncation interplay for uncapped variables)."""
        i = self.ring._index[name]
        out: dict[tuple[int, ...], TPoly] = {}
        for exps, tp in self.terms.items():
            key = exps[:i] + (0,) + exps[i + 1:]
            s = out.get(key, TPoly.zero()) + tp
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return Series(self.ring, out)

    def substitute(self, bindings: Mapping[str, "Series"], target: SeriesRing) -> "Series":
        """Ring-morphism substitution: replace each bound variable by its
        image series (all images in the target ring); unbound variables must
        exist in the target ring and map to themselves.

        Exact up to the target cap when every image has zero constant term
        or the source is an exact polynomial."""
        images: dict[int, Series] = {}
        for name, img in bindings.items():
            if img.ring != target:
                raise ValueError(f"image of {name} not in target ring")
            images[self.ring._index[name]] = img
        for name in self.ring.variables:
            i = self.ring._index[name]
            if i not in images:
                if name not in target._index:
                    raise ValueError(f"unbound variable {name} missing from target")
                images[i] = target.var(name)
        pow_cache: dict[tuple[int, int], Series] = {}

        def image_power(i: int, e: int) -> Series:
            key = (i, e)
            got = pow_cache.get(key)
            if got is None:
                base = images[i]
                got = base.invert() ** (-e) if e < 0 else base ** e
                pow_cache[key] = got
            return got

        total = target.zero()
        for exps, tp in self.terms.items():
            piece = target.one()
            for i, e in enumerate(exps):
                if e:
                    piece = piece * image_power(i, e)
            total = total + piece * tp
        return total

    # -- comparison / serialization ----------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        if self.ring != other.ring:
            return False
        if set(self.terms) != set(other.terms):
            return False
        return all(tp == other.terms[e] for e, tp in self.terms.items())

    def first_mismatch(self, other: "Series"):
        """(exps, lhs TPoly, rhs TPoly) of the graded-lex-first differing
        term, or None when equal."""
        self._check_same_ring(other)
        keys = sorted(set(self.terms) | set(other.terms), key=_term_sort_key)
        for k in keys:
            a = self.terms.get(k, TPoly.zero())
            b = other.terms.get(k, TPoly.zero())
            if a != b:
                return k, a, b
        return None

    def to_json(self) -> list:
        return [
            {"exps": list(exps), "coeff": tp.to_json()}
            for exps, tp in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, ring: SeriesRing, obj: list) -> "Series":
        terms = {}
        for entry in obj:
            terms[tuple(int(e) for e in entry["exps"])] = TPoly.from_json(entry["coeff"])
        return cls(ring, terms)

    def __repr__(self) -> str:
        parts = []
        for exps, tp in self.sorted_terms()[:8]:
            mono = "*".join(
                f"{v}^{e}" for v, e in zip(self.ring.variables, exps) if e)
            parts.append(f"({tp.to_json()}){'*' + mono if mono else ''}")
        more = "" if len(self.terms) <= 8 else f" ... [{len(self.terms)} terms]"
        return f"Series({' + '.join(parts) or '0'}{more})"
