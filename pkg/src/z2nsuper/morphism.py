"""
Centered morphisms between Z_2^n-superdomains, represented by the pullbacks
of the target coordinates.

A morphism ``M -> N`` is stored as the images ``s^j`` of the zero-degree
target coordinates ``y^j`` and the images ``zeta^b`` of the formal target
coordinates ``eta^b``, all series over ``M``.  The pullback of an arbitrary
series over ``N`` is obtained by substituting these images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import DegreeMismatch, NotCentered, NotInvertible, SignatureMismatch
from .jets import Jet, jet_compose, multi_indices
from .series import FormalSignature, Series


@dataclass(frozen=True)
class SuperdomainSignature:
    """A formal signature, optionally with a box ``V`` around the center.

    ``box`` holds one ``(low, high)`` pair per base coordinate and must
    contain the origin.
    """

    signature: FormalSignature
    box: tuple[tuple[Fraction, Fraction], ...] | None = None

    def __post_init__(self):
        if self.box is not None:
            box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.box)
            if len(box) != self.signature.p:
                raise ValueError("box must have one interval per base coordinate")
            if not all(lo < 0 < hi for lo, hi in box):
                raise ValueError("box must contain the center in its interior")
            object.__setattr__(self, "box", box)


def as_domain(x) -> SuperdomainSignature:
    if isinstance(x, SuperdomainSignature):
        return x
    if isinstance(x, FormalSignature):
        return SuperdomainSignature(x)
    raise TypeError(f"expected a signature, got {type(x).__name__}")


class Morphism:
    __slots__ = ("source", "target", "s", "zeta")

    def __init__(self, source, target, s: Sequence[Series], zeta: Sequence[Series]):
        self.source = as_domain(source)
        self.target = as_domain(target)
        self.s = tuple(s)
        self.zeta = tuple(zeta)
        _validate(self)

    @property
    def coordinate_pullbacks(self) -> tuple[Series, ...]:
        return self.s + self.zeta

    @property
    def base_map(self) -> tuple[Jet, ...]:
        return tuple(sj.base_projection() for sj in self.s)

    def pullback(self, g: Series) -> Series:
        return pullback(self, g)

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.s == other.s
            and self.zeta == other.zeta
        )

    def __hash__(self):
        return hash((self.source, self.target, self.s, self.zeta))

    def __repr__(self):
        coords = ", ".join(str(c) for c in self.coordinate_pullbacks)
        return f"Morphism([{coords}])"


def _validate(m: Morphism) -> None:
    src, tgt = m.source.signature, m.target.signature
    if src.n != tgt.n or src.T != tgt.T:
        raise SignatureMismatch("source and target must share the grading length and truncation order")
    if len(m.s) != tgt.p or len(m.zeta) != tgt.q:
        raise SignatureMismatch(
            f"target {tgt.p}|{tgt.q} needs {tgt.p} base and {tgt.q} formal pullbacks, "
            f"got {len(m.s)} and {len(m.zeta)}"
        )
    zero = src.zero_degree()
    for j, sj in enumerate(m.s):
        if sj.signature != src:
            raise SignatureMismatch(f"pullback of base coordinate {j + 1} is not a series over the source")
        if not sj.is_homogeneous(zero):
            raise DegreeMismatch(f"pullback of base coordinate {j + 1} is not of degree zero")
        if sj.base_projection().constant_term():
            raise NotCentered(f"base coordinate {j + 1} does not map the center to the center")
    for b, zb in enumerate(m.zeta):
        if zb.signature != src:
            raise SignatureMismatch(f"pullback of formal coordinate {b + 1} is not a series over the source")
        if not zb.is_homogeneous(tgt.sigma[b]):
            raise DegreeMismatch(
                f"pullback of formal coordinate {b + 1} is not homogeneous of degree {tgt.sigma[b]}"
            )


def from_coordinate_pullbacks(source, target, s: Sequence[Series], zeta: Sequence[Series]) -> Morphism:
    """The unique morphism sending ``y^j -> s[j]`` and ``eta^b -> zeta[b]``."""
    return Morphism(source, target, s, zeta)


def identity(sig) -> Morphism:
    dom = as_domain(sig)
    f = dom.signature
    return Morphism(dom, dom, [f.base(i) for i in range(f.p)], [f.generator(a) for a in range(f.q)])


class _Powers:
    """Lazily cached powers of a fixed list of series."""

    def __init__(self, items: Sequence[Series], sig: FormalSignature):
        self._cache = [[sig.one()] for _ in items]
        self._items = items

    def __call__(self, k: int, e: int) -> Series:
        cache = self._cache[k]
        while len(cache) <= e:
            cache.append(cache[-1] * self._items[k])
        return cache[e]


def _substitute(coeff: Jet, powers: _Powers, sig: FormalSignature) -> Series:
    out = sig.zero()
    for alpha, c in coeff.terms.items():
        term = sig.constant(c)
        for k, e in enumerate(alpha):
            if e:
                term = term * powers(k, e)
        out = out + term
    return out


def pullback_coefficient(m: Morphism, g: Jet) -> Series:
    """``g(s^1, ..., s^u)`` for a jet ``g`` in the target base variables."""
    src = m.source.signature
    return _substitute(g, _Powers(m.s, src), src)


def taylor_pullback_coefficient(m: Morphism, g: Jet) -> Series:
    """The same pullback as a Taylor sum around the base map.

    Computes ``sum_alpha (1/alpha!) (d^alpha g)(phi(x)) j^alpha`` with
    ``phi`` the base map and ``j = s - phi``, using jet derivatives.
    """
    src = m.source.signature
    phi = m.base_map
    j = [sj - src.from_jet(fj) for sj, fj in zip(m.s, phi)]
    result = src.zero()
    for alpha in multi_indices(g.p, g.order):
        d = g
        for k, a in enumerate(alpha):
            for _ in range(a):
                d = d.derivative(k)
        if not d:
            continue
        at_phi = jet_compose(d, phi, src.p)
        term = src.from_jet(at_phi).scale(Fraction(1, math.prod(math.factorial(a) for a in alpha)))
        for k, a in enumerate(alpha):
            for _ in range(a):
                term = term * j[k]
        result = result + term
    return result


def pullback(m: Morphism, g: Series) -> Series:
    """Pull back a series over the target along ``m``."""
    if g.signature != m.target.signature:
        raise SignatureMismatch("series is not over the target of the morphism")
    src = m.source.signature
    base_powers = _Powers(m.s, src)
    formal_powers = _Powers(m.zeta, src)
    result = src.zero()
    for nu, coeff in g.terms.items():
        term = _substitute(coeff, base_powers, src)
        for b, e in enumerate(nu):
            if e:
                term = term * formal_powers(b, e)
        result = result + term
    return result


def compose(f: Morphism, g: Morphism) -> Morphism:
    """The composite ``M -> P`` of ``f: M -> N`` followed by ``g: N -> P``."""
    if f.target != g.source:
        raise SignatureMismatch("target of the first morphism differs from the source of the second")
    return Morphism(
        f.source,
        g.target,
        [pullback(f, sj) for sj in g.s],
        [pullback(f, zb) for zb in g.zeta],
    )


def first_difference(a: Morphism, b: Morphism):
    """Locate the first coordinate pullback where two morphisms differ.

    Returns ``None`` when equal, else ``(coordinate_index, monomial, difference_jet)``;
    coordinates are numbered base ones first, then formal ones.
    """
    for idx, (ca, cb) in enumerate(zip(a.coordinate_pullbacks, b.coordinate_pullbacks)):
        if ca != cb:
            diff = ca - cb
            mu, j = diff.sorted_terms()[0]
            return idx, mu, j
    return None


def check_inverse_pair(f: Morphism, g: Morphism) -> bool:
    if f.target != g.source or g.target != f.source:
        raise SignatureMismatch("morphisms are not composable in both orders")
    return compose(f, g) == identity(f.source) and compose(g, f) == identity(f.target)


def linear_part(m: Morphism) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Matrices of the weight-one part: base ``A[j][i]`` and formal ``C[b][a]``."""
    src = m.source.signature
    base_mat = []
    for sj in m.s:
        j0 = sj.base_projection()
        base_mat.append([j0.terms.get(tuple(1 if k == i else 0 for k in range(src.p)), Fraction(0)) for i in range(src.p)])
    formal_mat = []
    for zb in m.zeta:
        row = []
        for a in range(src.q):
            mu = tuple(1 if k == a else 0 for k in range(src.q))
            row.append(zb.coefficient(mu).constant_term())
        formal_mat.append(row)
    return base_mat, formal_mat


def _rational_inverse(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    if not mat:
        return []
    M = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in mat])
    if M.rows != M.cols or M.det() == 0:
        raise NotInvertible("linear part of the morphism is singular")
    inv = M.inv()
    return [[Fraction(int(inv[i, k].p), int(inv[i, k].q)) for k in range(inv.cols)] for i in range(inv.rows)]


def invert(f: Morphism) -> Morphism:
    """Inverse of ``f`` in the quotient, solved order by order.

    Starts from the inverse of the linear part and corrects the coordinate
    pullbacks until ``compose(f, g)`` is the identity modulo ``m^(T+1)``.
    """
    src, tgt = f.source.signature, f.target.signature
    if src.p != tgt.p or src.q != tgt.q:
        raise NotInvertible("source and target dimensions differ")
    A, C = linear_part(f)
    Ainv, Cinv = _rational_inverse(A), _rational_inverse(C)
    # linear inverse h: N -> M, x^i -> sum Ainv[i][j] y^j, xi^a -> sum Cinv[a][b] eta^b
    h_s = [sum((tgt.base(j).scale(Ainv[i][j]) for j in range(tgt.p)), tgt.zero()) for i in range(src.p)]
    h_zeta = []
    for a in range(src.q):
        terms = [tgt.generator(b).scale(Cinv[a][b]) for b in range(tgt.q) if Cinv[a][b]]
        for b in range(tgt.q):
            if Cinv[a][b] and tgt.sigma[b] != src.sigma[a]:
                raise DegreeMismatch("linear part mixes formal variables of different degrees")
        h_zeta.append(sum(terms, tgt.zero()))
    h = Morphism(f.target, f.source, h_s, h_zeta)
    coords = list(h.coordinate_pullbacks)
    ident = identity(f.source).coordinate_pullbacks
    for _ in range(src.T + 1):
        errors = [pullback(f, c) - e for c, e in zip(coords, ident)]
        if not any(errors):
            break
        coords = [c - pullback(h, err) for c, err in zip(coords, errors)]
    g = Morphism(f.target, f.source, coords[: src.p], coords[src.p :])
    if not check_inverse_pair(f, g):
        raise NotInvertible("order-by-order inversion did not converge")
    return g
