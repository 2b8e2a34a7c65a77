"""
Z_2^n-commutative formal power series with jet coefficients, computed in the
quotient by the (T+1)-st power of the maximal ideal at the center.

A term ``(mu, f)`` stands for ``f(x) * xi_1^mu_1 * ... * xi_q^mu_q`` with the
formal variables in index order.  Its m-adic weight is the lowest degree of
``f`` plus ``|mu|``; everything of weight above ``T`` is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

from .errors import NotHomogeneous, NotInvertible, SignatureMismatch
from .grading import DegreeVector, nonzero_degrees, parity, scalar_product
from .jets import Jet, format_monomial, format_term, join_terms

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class FormalSignature:
    """Grading length ``n``, base dimension ``p``, degrees of the formal
    variables, and the truncation order ``T``."""

    n: int
    p: int
    sigma: tuple[DegreeVector, ...]
    T: int

    def __post_init__(self):
        sigma = tuple(s if isinstance(s, DegreeVector) else DegreeVector(tuple(s)) for s in self.sigma)
        object.__setattr__(self, "sigma", sigma)
        if self.n < 0 or self.p < 0:
            raise ValueError("n and p must be non-negative")
        if self.T < 0:
            raise ValueError("truncation order must be non-negative")
        for a, s in enumerate(sigma):
            if s.n != self.n:
                raise ValueError(f"degree of formal variable {a + 1} has length {s.n}, expected {self.n}")
            if s.is_zero():
                raise ValueError(f"formal variable {a + 1} has zero degree")

    @property
    def q(self) -> int:
        return len(self.sigma)

    @cached_property
    def odd(self) -> tuple[bool, ...]:
        return tuple(parity(s) == 1 for s in self.sigma)

    @cached_property
    def _pairing(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(scalar_product(a, b) for b in self.sigma) for a in self.sigma)

    @cached_property
    def dimension(self) -> tuple[int, ...]:
        """Counts of formal variables per nonzero degree, degrees in lex order."""
        return tuple(sum(1 for s in self.sigma if s == d) for d in nonzero_degrees(self.n))

    def with_order(self, T: int) -> FormalSignature:
        return FormalSignature(self.n, self.p, self.sigma, T)

    def zero_degree(self) -> DegreeVector:
        return DegreeVector.zero(self.n)

    def monomial_degree(self, mu: Monomial) -> DegreeVector:
        bits = [0] * self.n
        for a, e in enumerate(mu):
            if e & 1:
                for t, b in enumerate(self.sigma[a].bits):
                    bits[t] ^= b
        return DegreeVector(tuple(bits))

    def is_valid_monomial(self, mu: Monomial) -> bool:
        return (
            len(mu) == self.q
            and all(e >= 0 for e in mu)
            and not any(o and e > 1 for o, e in zip(self.odd, mu))
        )

    def monomials(self, max_total: int | None = None, degree: DegreeVector | None = None) -> Iterator[Monomial]:
        """Valid exponent vectors with ``|mu| <= max_total`` (default ``T``)."""
        if max_total is None:
            max_total = self.T

        def rec(a, left):
            if a == self.q:
                yield ()
                return
            top = min(left, 1) if self.odd[a] else left
            for e in range(top + 1):
                for rest in rec(a + 1, left - e):
                    yield (e,) + rest

        for mu in rec(0, max_total):
            if degree is None or self.monomial_degree(mu) == degree:
                yield mu

    # constructors

    def zero(self) -> Series:
        return Series._raw(self, {})

    def constant(self, c) -> Series:
        return Series(self, {(0,) * self.q: c})

    def one(self) -> Series:
        return self.constant(1)

    def generator(self, a: int) -> Series:
        """The formal variable ``xi_a`` (0-based)."""
        if not 0 <= a < self.q:
            raise IndexError(f"formal variable index {a} out of range for q={self.q}")
        mu = tuple(1 if b == a else 0 for b in range(self.q))
        return Series(self, {mu: 1})

    def base(self, i: int) -> Series:
        """The base coordinate ``x_i`` (0-based) as a series."""
        return self.from_jet(Jet.variable(i, self.p, self.T))

    def from_jet(self, j: Jet) -> Series:
        return Series(self, {(0,) * self.q: j})

    def jet(self, terms=None) -> Jet:
        return Jet(self.p, self.T, terms)


class Series:
    """An element of the truncated algebra of a :class:`FormalSignature`."""

    __slots__ = ("signature", "_terms", "_hash")

    def __init__(self, signature: FormalSignature, terms: Mapping[Monomial, object] | None = None):
        sig = signature
        clean: dict[Monomial, Jet] = {}
        for mu, c in (terms or {}).items():
            mu = tuple(mu)
            if not sig.is_valid_monomial(mu):
                raise ValueError(f"invalid monomial {mu} for signature with q={sig.q}")
            k = sum(mu)
            if k > sig.T:
                continue
            if isinstance(c, Jet):
                if c.p != sig.p or c.order != sig.T:
                    raise SignatureMismatch("coefficient jet does not match the signature")
                j = c
            elif isinstance(c, (int, Rational)):
                j = Jet.constant(c, sig.p, sig.T)
            else:
                raise TypeError(f"coefficient must be a Jet or rational, got {type(c).__name__}")
            if mu in clean:
                j = clean[mu] + j
            j = j.truncated(sig.T - k)
            if j:
                clean[mu] = j
            else:
                clean.pop(mu, None)
        self.signature = sig
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, signature: FormalSignature, terms: dict) -> Series:
        obj = cls.__new__(cls)
        obj.signature = signature
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self) -> Mapping[Monomial, Jet]:
        return MappingProxyType(self._terms)

    def coefficient(self, mu: Monomial) -> Jet:
        return self._terms.get(tuple(mu), Jet.zero(self.signature.p, self.signature.T))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _check(self, other: Series) -> None:
        if self.signature != other.signature:
            raise SignatureMismatch("series belong to different algebras")

    def _coerce(self, other) -> Series | None:
        if isinstance(other, Series):
            self._check(other)
            return other
        if isinstance(other, (int, Rational)):
            return self.signature.constant(other)
        if isinstance(other, Jet):
            return self.signature.from_jet(other)
        return None

    # ring structure

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for mu, j in other._terms.items():
            s = out[mu] + j if mu in out else j
            if s:
                out[mu] = s
            else:
                out.pop(mu, None)
        return Series._raw(self.signature, out)

    __radd__ = __add__

    def __neg__(self):
        return Series._raw(self.signature, {mu: -j for mu, j in self._terms.items()})

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

    def scale(self, c) -> Series:
        c = Fraction(c)
        if not c:
            return self.signature.zero()
        return Series._raw(self.signature, {mu: j.scale(c) for mu, j in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return series_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return series_mul(other, self)

    def __pow__(self, k: int) -> Series:
        if k < 0:
            return self.inverse() ** (-k)
        result = self.signature.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # gradings and filtrations

    def components(self) -> dict[DegreeVector, Series]:
        """Homogeneous components keyed by degree, in lex order of degrees."""
        groups: dict[DegreeVector, dict] = {}
        for mu, j in self._terms.items():
            groups.setdefault(self.signature.monomial_degree(mu), {})[mu] = j
        return {d: Series._raw(self.signature, groups[d]) for d in sorted(groups)}

    def degree(self) -> DegreeVector:
        """Degree of a homogeneous series; the zero series reports degree zero."""
        comps = self.components()
        if not comps:
            return self.signature.zero_degree()
        if len(comps) > 1:
            raise NotHomogeneous(f"series has components in degrees {[str(d) for d in comps]}")
        return next(iter(comps))

    def is_homogeneous(self, degree: DegreeVector | None = None) -> bool:
        degs = {self.signature.monomial_degree(mu) for mu in self._terms}
        if degree is None:
            return len(degs) <= 1
        return degs <= {degree}

    def base_projection(self) -> Jet:
        return self.coefficient((0,) * self.signature.q)

    def j_adic_order(self) -> int | float:
        if not self._terms:
            return math.inf
        return min(sum(mu) for mu in self._terms)

    def m_adic_order(self) -> int | float:
        if not self._terms:
            return math.inf
        return min(j.valuation() + sum(mu) for mu, j in self._terms.items())

    def inverse(self) -> Series:
        """Two-sided inverse in the quotient.

        Writes ``w = c(1 - v)`` with ``c`` the value of the independent term at
        the center and sums the geometric series in ``v``, which vanishes past
        order ``T``.
        """
        c = self.base_projection().constant_term()
        if not c:
            raise NotInvertible("independent term vanishes at the center")
        one = self.signature.one()
        v = one - self.scale(1 / c)
        acc = one
        for _ in range(self.signature.T):
            acc = one + v * acc
        return acc.scale(1 / c)

    def truncate(self, T: int) -> Series:
        """Image in the coarser quotient of order ``T``."""
        if T > self.signature.T:
            raise ValueError(f"cannot truncate order {self.signature.T} series to higher order {T}")
        if T < 0:
            raise ValueError("truncation order must be non-negative")
        sig = self.signature.with_order(T)
        return Series(sig, {mu: j.with_order(T) for mu, j in self._terms.items()})

    def approximation(self, k: int) -> Series:
        """Polynomial P with ``m_adic_order(self - P) >= k``.

        P keeps exactly the part of weight below ``k``, so each coefficient of
        P has base degree below ``k``.
        """
        if not 1 <= k <= self.signature.T:
            raise ValueError(f"approximation degree must lie in 1..{self.signature.T}")
        return Series(
            self.signature,
            {mu: j.truncated(k - 1 - sum(mu)) for mu, j in self._terms.items() if sum(mu) < k},
        )

    # comparison and display

    def sorted_terms(self) -> list[tuple[Monomial, Jet]]:
        return sorted(self._terms.items(), key=lambda t: monomial_sort_key(t[0]))

    def __eq__(self, other):
        if isinstance(other, Series):
            return self.signature == other.signature and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self == self.signature.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.signature, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"Series({format_series(self)!r})"

    def __str__(self):
        return format_series(self)


def monomial_sort_key(mu: Monomial):
    return (sum(mu), tuple(-e for e in mu))


def series_mul(a: Series, b: Series) -> Series:
    """Product in normal form.

    Bringing ``xi^mu xi^nu`` to index order moves every ``xi_v`` of the right
    factor past every ``xi_u`` (u > v) of the left one; each such adjacent
    transposition contributes ``(-1)^<sigma_u, sigma_v>``.  Odd variables
    occurring in both factors annihilate the product.
    """
    a._check(b)
    sig = a.signature
    T, q = sig.T, sig.q
    odd, pairing = sig.odd, sig._pairing
    right = []
    for nu, jb in b._terms.items():
        # w[u] = parity of transpositions xi_u picks up passing nu's lower variables
        w = tuple(sum(nu[v] * pairing[u][v] for v in range(u)) & 1 for u in range(q))
        right.append((nu, sum(nu), jb.valuation(), w, jb))
    out: dict[Monomial, Jet] = {}
    for mu, ja in a._terms.items():
        da = sum(mu)
        va = ja.valuation() + da
        for nu, db, vb, w, jb in right:
            k = da + db
            if k > T or va + vb + db > T:
                continue
            if any(odd[u] and mu[u] and nu[u] for u in range(q)):
                continue
            sign = sum(mu[u] * w[u] for u in range(q)) & 1
            j = ja.mul_truncated(jb, T - k)
            if not j:
                continue
            key = tuple(x + y for x, y in zip(mu, nu))
            if sign:
                j = -j
            if key in out:
                j = out[key] + j
                if j:
                    out[key] = j
                else:
                    del out[key]
            else:
                out[key] = j
    return Series._raw(sig, out)


def naive_product_oracle(a: Series, b: Series) -> Series:
    """Slow product by rewriting words of variable indices.

    Each monomial pair is spelled out as a word and bubble-sorted with the
    rules ``xi_b xi_a -> (-1)^<sigma_a, sigma_b> xi_a xi_b`` (a < b) and
    ``xi_a xi_a -> 0`` for odd ``xi_a``.
    """
    if a.signature != b.signature:
        raise SignatureMismatch("series belong to different algebras")
    sig = a.signature
    acc: dict[Monomial, Jet] = {}
    for mu, ja in a.terms.items():
        for nu, jb in b.terms.items():
            word = [i for i, e in enumerate(mu) for _ in range(e)]
            word += [i for i, e in enumerate(nu) for _ in range(e)]
            if len(word) > sig.T:
                continue
            sign = 1
            dead = False
            changed = True
            while changed and not dead:
                changed = False
                for t in range(len(word) - 1):
                    x, y = word[t], word[t + 1]
                    if x == y and sig.odd[x]:
                        dead = True
                        break
                    if x > y:
                        word[t], word[t + 1] = y, x
                        if scalar_product(sig.sigma[x], sig.sigma[y]):
                            sign = -sign
                        changed = True
            if dead:
                continue
            key = tuple(word.count(i) for i in range(sig.q))
            coeff = (ja * jb).truncated(sig.T - len(word))
            if sign < 0:
                coeff = -coeff
            acc[key] = acc[key] + coeff if key in acc else coeff
    return Series(sig, acc)


def homogeneous_components(a: Series) -> dict[DegreeVector, Series]:
    return a.components()


def degree_of(a: Series) -> DegreeVector:
    return a.degree()


def base_projection(a: Series) -> Jet:
    return a.base_projection()


def j_adic_order(a: Series) -> int | float:
    return a.j_adic_order()


def m_adic_order(a: Series) -> int | float:
    return a.m_adic_order()


def series_invert(w: Series) -> Series:
    return w.inverse()


def polynomial_approximation(a: Series, k: int) -> Series:
    return a.approximation(k)


def truncate(a: Series, T: int) -> Series:
    return a.truncate(T)


def default_names(sig: FormalSignature) -> tuple[list[str], list[str]]:
    return [f"x{i + 1}" for i in range(sig.p)], [f"t{a + 1}" for a in range(sig.q)]


def format_series(
    s: Series,
    base_names: Sequence[str] | None = None,
    formal_names: Sequence[str] | None = None,
) -> str:
    """Render in the textual normal form read back by :mod:`z2nsuper.textio`."""
    db, df = default_names(s.signature)
    base_names = base_names or db
    formal_names = formal_names or df
    pieces = []
    for mu, j in s.sorted_terms():
        mono = format_monomial(mu, formal_names)
        jterms = j.sorted_terms()
        if not mono:
            for e, c in jterms:
                pieces.append(format_term(c, format_monomial(e, base_names)))
        elif len(jterms) == 1:
            e, c = jterms[0]
            pieces.append(format_term(c, format_monomial(e, base_names) + mono))
        else:
            inner = join_terms([format_term(c, format_monomial(e, base_names)) for e, c in jterms])
            pieces.append("*".join([f"({inner})"] + mono))
    return join_terms(pieces)
