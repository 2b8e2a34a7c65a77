"""
Charts, coordinate transformations and their consistency checks.

Each overlap is represented by the jets of the transition at one base point,
centered in both charts.  A transition ``(alpha, beta)`` carries the forward
morphism ``alpha -> beta`` and the backward morphism ``beta -> alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Hashable, Mapping, Sequence

from .errors import MissingTransition, SignatureMismatch
from .jets import Jet, format_jet, jet_compose
from .morphism import Morphism, SuperdomainSignature, as_domain, compose, first_difference, identity, pullback
from .series import Series, default_names, format_series


@dataclass(frozen=True)
class Chart:
    """A chart; ``names`` optionally gives ``(base_names, formal_names)`` for reports."""

    id: Hashable
    domain: SuperdomainSignature
    names: tuple[tuple[str, ...], tuple[str, ...]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "domain", as_domain(self.domain))
        if self.names is None:
            base, formal = default_names(self.signature)
            object.__setattr__(self, "names", (tuple(base), tuple(formal)))

    @property
    def signature(self):
        return self.domain.signature


@dataclass(frozen=True)
class Transition:
    alpha: Hashable
    beta: Hashable
    forward: Morphism
    backward: Morphism


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    coordinate: str | None = None
    monomial: tuple[int, ...] | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class Report:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def extend(self, other: Report) -> None:
        self.results.extend(other.results)

    def __bool__(self):
        return self.passed

    def __str__(self):
        return "\n".join(r.line() for r in self.results)


def _names(sig, names):
    if names is None:
        base, formal = default_names(sig)
        return tuple(base), tuple(formal)
    return names


def _morphism_failure(name: str, got: Morphism, expected: Morphism, src_names=None, tgt_names=None) -> CheckResult | None:
    diff = first_difference(got, expected)
    if diff is None:
        return None
    idx, mu, jet = diff
    sig = got.source.signature
    tb, tf = _names(got.target.signature, tgt_names)
    coord = (tb + tf)[idx]
    term = format_series(Series(sig, {mu: jet}), *_names(sig, src_names))
    return CheckResult(
        name,
        False,
        f"coordinate {coord} differs by {term}",
        coordinate=coord,
        monomial=mu,
    )


def _base_round_trip(first: Sequence[Jet], second: Sequence[Jet], p: int) -> list[Jet]:
    # x -> second(first(x)), both centered
    return [jet_compose(g, list(first), p) for g in second]


def check_transition(t: Transition, names: Mapping[Hashable, tuple] | None = None) -> Report:
    """Round trips of a transition; ``names`` maps chart ids to variable names."""
    f, g = t.forward, t.backward
    if f.target != g.source or g.target != f.source:
        raise SignatureMismatch(f"transition {t.alpha}->{t.beta}: forward and backward are not opposite")
    names = names or {}
    na, nb = names.get(t.alpha), names.get(t.beta)
    report = Report()
    label = f"transition {t.alpha}->{t.beta}"
    for name, got, expected, at in (
        (f"{label} round trip at {t.alpha}", compose(f, g), identity(f.source), na),
        (f"{label} round trip at {t.beta}", compose(g, f), identity(f.target), nb),
    ):
        failure = _morphism_failure(name, got, expected, at, at)
        report.results.append(failure or CheckResult(name, True))

    for name, first, second, dom, at in (
        (f"{label} base round trip at {t.alpha}", f.base_map, g.base_map, f.source.signature, na),
        (f"{label} base round trip at {t.beta}", g.base_map, f.base_map, f.target.signature, nb),
    ):
        got = _base_round_trip(first, second, dom.p)
        want = [Jet.variable(i, dom.p, dom.T) for i in range(dom.p)]
        bad = [i for i, (a, b) in enumerate(zip(got, want)) if a != b]
        if bad:
            i = bad[0]
            base = _names(dom, at)[0]
            report.results.append(
                CheckResult(name, False, f"{base[i]} maps to {format_jet(got[i], base)}", coordinate=base[i])
            )
        else:
            report.results.append(CheckResult(name, True))
    return report


class Atlas:
    """A collection of charts and transitions between them."""

    def __init__(self, charts: Sequence[Chart] = (), transitions: Sequence[Transition] = ()):
        self.charts: dict[Hashable, Chart] = {}
        self.transitions: dict[tuple, Transition] = {}
        for c in charts:
            self.add_chart(c)
        for t in transitions:
            self.add_transition(t)

    def add_chart(self, chart: Chart) -> None:
        self.charts[chart.id] = chart

    def add_transition(self, t: Transition) -> None:
        for cid in (t.alpha, t.beta):
            if cid not in self.charts:
                raise KeyError(f"unknown chart {cid!r}")
        if t.forward.source != self.charts[t.alpha].domain or t.forward.target != self.charts[t.beta].domain:
            raise SignatureMismatch(f"transition {t.alpha}->{t.beta} does not match the chart signatures")
        self.transitions[(t.alpha, t.beta)] = t

    def morphism(self, src: Hashable, dst: Hashable) -> Morphism:
        """The coordinate change from chart ``src`` to chart ``dst``."""
        if src == dst:
            return identity(self.charts[src].domain)
        if (src, dst) in self.transitions:
            return self.transitions[(src, dst)].forward
        if (dst, src) in self.transitions:
            return self.transitions[(dst, src)].backward
        raise MissingTransition(f"no transition between {src!r} and {dst!r}")

    def pairs(self):
        """Every ordered pair of distinct charts joined by a transition."""
        out = []
        for a, b in self.transitions:
            out.append((a, b))
            out.append((b, a))
        return out


def check_cocycle(atlas: Atlas, alpha, beta, gamma) -> Report:
    """Check that ``alpha -> gamma -> beta`` agrees with ``alpha -> beta``."""
    via = compose(atlas.morphism(alpha, gamma), atlas.morphism(gamma, beta))
    direct = atlas.morphism(alpha, beta)
    name = f"cocycle {alpha}->{gamma}->{beta}"
    failure = _morphism_failure(name, via, direct, atlas.charts[alpha].names, atlas.charts[beta].names)
    return Report([failure or CheckResult(name, True)])


def check_global_section(atlas: Atlas, witness: Mapping[Hashable, Series]) -> Report:
    """Check that local expressions glue: pulling back the expression in one
    chart along each transition gives the expression in the other chart."""
    for cid in atlas.charts:
        if cid not in witness:
            raise KeyError(f"witness has no local expression on chart {cid!r}")
    report = Report()
    for a, b in atlas.pairs():
        m = atlas.morphism(a, b)
        name = f"section {b}->{a}"
        got = pullback(m, witness[b])
        want = witness[a]
        names_a = atlas.charts[a].names
        if got != want:
            diff = got - want
            mu, jet = diff.sorted_terms()[0]
            term = format_series(Series(want.signature, {mu: jet}), *names_a)
            report.results.append(CheckResult(name, False, f"pullback differs by {term}", monomial=mu))
        else:
            report.results.append(CheckResult(name, True))
        # the zero-degree body glues along the base maps
        bname = f"section base {b}->{a}"
        body = jet_compose(witness[b].base_projection(), list(m.base_map), m.source.signature.p)
        if body != want.base_projection():
            report.results.append(
                CheckResult(bname, False, f"base body differs by {format_jet(body - want.base_projection(), names_a[0])}")
            )
        else:
            report.results.append(CheckResult(bname, True))
    return report


def check_atlas(atlas: Atlas, witnesses: Sequence[Mapping[Hashable, Series]] = ()) -> Report:
    report = Report()
    names = {cid: c.names for cid, c in atlas.charts.items()}
    for t in atlas.transitions.values():
        report.extend(check_transition(t, names))
    ids = list(atlas.charts)
    for a, b, c in permutations(ids, 3):
        try:
            report.extend(check_cocycle(atlas, a, b, c))
        except MissingTransition:
            continue
    for w in witnesses:
        report.extend(check_global_section(atlas, w))
    return report
