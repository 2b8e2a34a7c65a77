"""
Truncated multivariate polynomials over the rationals.

A :class:`Jet` is the Taylor polynomial, up to total degree ``order``, of a
smooth coefficient function at the center of a chart.  Every operation is
exact; terms of total degree above ``order`` are discarded.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import NotInvertible, SignatureMismatch

Exponent = tuple[int, ...]


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact rational expected, got {type(c).__name__}")


class Jet:
    __slots__ = ("p", "order", "_terms", "_hash")

    def __init__(self, p: int, order: int, terms: Mapping[Exponent, object] | None = None):
        if p < 0 or order < 0:
            raise ValueError("p and order must be non-negative")
        clean: dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != p or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for {p} base variables")
            if sum(exp) > order:
                continue
            c = as_fraction(c)
            if c:
                c = clean.get(exp, 0) + c
                if c:
                    clean[exp] = c
                else:
                    clean.pop(exp, None)
        self.p = p
        self.order = order
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, p: int, order: int, terms: dict) -> Jet:
        # terms already normalized: no zeros, degrees within order
        obj = cls.__new__(cls)
        obj.p = p
        obj.order = order
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, p: int, order: int) -> Jet:
        return cls._raw(p, order, {})

    @classmethod
    def constant(cls, c, p: int, order: int) -> Jet:
        return cls(p, order, {(0,) * p: c})

    @classmethod
    def variable(cls, i: int, p: int, order: int) -> Jet:
        """The base coordinate ``x_i`` (0-based index)."""
        if not 0 <= i < p:
            raise IndexError(f"base variable index {i} out of range for p={p}")
        exp = tuple(1 if k == i else 0 for k in range(p))
        return cls(p, order, {exp: 1})

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.p, Fraction(0))

    def valuation(self) -> int | float:
        """Lowest total degree of a stored term (``math.inf`` for zero)."""
        if not self._terms:
            return math.inf
        return min(sum(e) for e in self._terms)

    def degree(self) -> int | float:
        if not self._terms:
            return -math.inf
        return max(sum(e) for e in self._terms)

    def _check(self, other: Jet) -> None:
        if self.p != other.p or self.order != other.order:
            raise SignatureMismatch(
                f"jets over ({self.p} vars, order {self.order}) and "
                f"({other.p} vars, order {other.order}) cannot be combined"
            )

    def _coerce(self, other) -> Jet | None:
        if isinstance(other, Jet):
            self._check(other)
            return other
        if isinstance(other, (int, Rational)):
            return Jet.constant(other, self.p, self.order)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Jet._raw(self.p, self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet._raw(self.p, self.order, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c) -> Jet:
        c = as_fraction(c)
        if not c:
            return Jet.zero(self.p, self.order)
        return Jet._raw(self.p, self.order, {e: c * v for e, v in self._terms.items()})

    def mul_truncated(self, other: Jet, limit: int) -> Jet:
        """Product keeping only terms of total degree <= ``limit``."""
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        if limit < 0:
            return Jet._raw(self.p, self.order, out)
        b_items = [(e, sum(e), c) for e, c in other._terms.items() if sum(e) <= limit]
        for ea, ca in self._terms.items():
            da = sum(ea)
            if da > limit:
                continue
            for eb, db, cb in b_items:
                if da + db > limit:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, 0) + ca * cb
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Jet._raw(self.p, self.order, out)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return self.mul_truncated(other, self.order)
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> Jet:
        if k < 0:
            return self.inverse() ** (-k)
        result = Jet.constant(1, self.p, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def truncated(self, limit: int) -> Jet:
        """Drop terms of total degree above ``limit``; the order is unchanged."""
        if limit >= self.order:
            return self
        return Jet._raw(
            self.p, self.order, {e: c for e, c in self._terms.items() if sum(e) <= limit}
        )

    def with_order(self, order: int) -> Jet:
        return Jet(self.p, order, self._terms)

    def derivative(self, i: int) -> Jet:
        """Partial derivative in ``x_i`` (0-based).

        The order is kept, so the result carries no information in the top degree.
        """
        if not 0 <= i < self.p:
            raise IndexError(f"base variable index {i} out of range for p={self.p}")
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
                out[ne] = c * e[i]
        return Jet._raw(self.p, self.order, out)

    def compose(self, args: Sequence[Jet], p: int | None = None) -> Jet:
        """Substitute ``args[k]`` for ``x_k``; arguments must have zero constant term."""
        return jet_compose(self, args, p)

    def inverse(self) -> Jet:
        c = self.constant_term()
        if not c:
            raise NotInvertible("jet with zero constant term is not invertible")
        one = Jet.constant(1, self.p, self.order)
        v = one - self.scale(1 / c)
        # 1/(1-v) = 1 + v(1 + v(1 + ...)), v nilpotent past order
        acc = one
        for _ in range(self.order):
            acc = one + v * acc
        return acc.scale(1 / c)

    def evaluate_at_zero(self) -> Fraction:
        return self.constant_term()

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in graded order: total degree, then x1 before x2 before ..."""
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), tuple(-e for e in t[0])))

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.p == other.p and self.order == other.order and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self == Jet.constant(other, self.p, self.order)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.order, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Jet({self.p}, {self.order}, {dict(self.sorted_terms())!r})"

    def __str__(self):
        return format_jet(self)


def jet_compose(g: Jet, args: Sequence[Jet], p: int | None = None) -> Jet:
    """Substitute ``args`` into ``g``; ``p`` is needed only when ``args`` is empty."""
    if len(args) != g.p:
        raise SignatureMismatch(f"expected {g.p} arguments, got {len(args)}")
    for a in args:
        if a.order != g.order:
            raise SignatureMismatch("composition requires a common truncation order")
        if a.p != args[0].p:
            raise SignatureMismatch("arguments live in different base dimensions")
        if a.constant_term():
            raise ValueError("centered composition: arguments must have zero constant term")
    if args:
        p_out = args[0].p
    elif p is None:
        raise ValueError("cannot infer target dimension from an empty argument list")
    else:
        p_out = p
    order = g.order
    powers: list[list[Jet]] = [[Jet.constant(1, p_out, order)] for _ in args]

    def power(k, e):
        cache = powers[k]
        while len(cache) <= e:
            cache.append(cache[-1] * args[k])
        return cache[e]

    result = Jet.zero(p_out, order)
    for exp, c in g._terms.items():
        term = Jet.constant(c, p_out, order)
        for k, e in enumerate(exp):
            if e:
                term = term * power(k, e)
        result = result + term
    return result


def jet_add(a: Jet, b: Jet) -> Jet:
    return a + b


def jet_mul(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_derivative(a: Jet, i: int) -> Jet:
    return a.derivative(i)


def jet_invert(a: Jet) -> Jet:
    return a.inverse()


def jet_valuation(a: Jet) -> int | float:
    return a.valuation()


def taylor_compose(g: Jet, args: Sequence[Jet], p: int | None = None) -> Jet:
    """Composition via the Taylor sum over multi-indices, using derivatives at 0.

    Independent of :func:`jet_compose`; kept for cross-checking.
    """
    p_out = args[0].p if args else p
    order = g.order
    result = Jet.zero(p_out, order)
    for alpha in multi_indices(g.p, order):
        d = g
        for k, a in enumerate(alpha):
            for _ in range(a):
                d = d.derivative(k)
        c = d.constant_term()
        if not c:
            continue
        weight = Fraction(1, math.prod(math.factorial(a) for a in alpha))
        term = Jet.constant(c * weight, p_out, order)
        for k, a in enumerate(alpha):
            for _ in range(a):
                term = term * args[k]
        result = result + term
    return result


def multi_indices(p: int, max_total: int):
    """All exponent tuples of length p with total degree <= max_total."""
    if p == 0:
        yield ()
        return
    for first in range(max_total + 1):
        for rest in multi_indices(p - 1, max_total - first):
            yield (first,) + rest


def format_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_monomial(exp: Sequence[int], names: Sequence[str]) -> list[str]:
    out = []
    for e, name in zip(exp, names):
        if e == 1:
            out.append(name)
        elif e > 1:
            out.append(f"{name}^{e}")
    return out


def format_term(c: Fraction, factors: list[str]) -> str:
    if not factors:
        return format_rational(c)
    if c == 1:
        return "*".join(factors)
    if c == -1:
        return "-" + "*".join(factors)
    return "*".join([format_rational(c)] + factors)


def join_terms(terms: list[str]) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        if t.startswith("-"):
            out += " - " + t[1:]
        else:
            out += " + " + t
    return out


def format_jet(j: Jet, names: Sequence[str] | None = None) -> str:
    if names is None:
        names = [f"x{i + 1}" for i in range(j.p)]
    return join_terms([format_term(c, format_monomial(e, names)) for e, c in j.sorted_terms()])
