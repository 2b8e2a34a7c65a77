"""
Textual formats: series expressions, session files, morphism files and
atlas files.

Series grammar (whitespace insignificant)::

    series := term (('+' | '-') term)*
    term   := ['-'] factor ('*' factor)*
    factor := rational | var ['^' nat] | '(' series ')' ['^' nat]

Session files start with ``key = value`` header lines (``n``, ``p``, ``q``,
``T``, ``sigma.k``, optionally ``names.base`` and ``names.formal``); every
following non-blank line is one series.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .atlas import Atlas, Chart, Transition
from .errors import ParseError
from .grading import DegreeVector
from .jets import Jet
from .morphism import Morphism, SuperdomainSignature
from .series import FormalSignature, Series, format_series

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class SessionHeader:
    n: int
    p: int
    q: int
    T: int
    sigma: tuple[DegreeVector, ...]
    base_names: tuple[str, ...] = ()
    formal_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.base_names:
            object.__setattr__(self, "base_names", tuple(f"x{i + 1}" for i in range(self.p)))
        if not self.formal_names:
            object.__setattr__(self, "formal_names", tuple(f"t{a + 1}" for a in range(self.q)))
        if len(self.sigma) != self.q:
            raise ValueError(f"q = {self.q} but {len(self.sigma)} degrees declared")
        if len(self.base_names) != self.p or len(self.formal_names) != self.q:
            raise ValueError("number of variable names does not match p and q")
        names = self.base_names + self.formal_names
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        for name in names:
            if not _NAME.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        # validates degrees and T
        self.signature

    @property
    def signature(self) -> FormalSignature:
        return FormalSignature(self.n, self.p, self.sigma, self.T)

    @classmethod
    def from_signature(cls, sig: FormalSignature, base_names=(), formal_names=()) -> SessionHeader:
        return cls(sig.n, sig.p, sig.q, sig.T, sig.sigma, tuple(base_names), tuple(formal_names))

    def with_order(self, T: int) -> SessionHeader:
        return SessionHeader(self.n, self.p, self.q, T, self.sigma, self.base_names, self.formal_names)

    def lines(self) -> list[str]:
        out = [f"n = {self.n}", f"p = {self.p}", f"q = {self.q}", f"T = {self.T}"]
        for a, s in enumerate(self.sigma):
            out.append(f"sigma.{a + 1} = " + " ".join(map(str, s.bits)))
        if self.base_names != tuple(f"x{i + 1}" for i in range(self.p)):
            out.append("names.base = " + " ".join(self.base_names))
        if self.formal_names != tuple(f"t{a + 1}" for a in range(self.q)):
            out.append("names.formal = " + " ".join(self.formal_names))
        return out


# --- expression parser -----------------------------------------------------

_TOKEN = re.compile(r"(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int = 1, col: int = 1, source=None) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            line, col = line + 1, 1
            pos += 1
            continue
        if ch.isspace():
            pos += 1
            col += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {ch!r}", line, col, source)
        toks.append(_Tok(m.lastgroup, m.group(), line, col))
        col += m.end() - pos
        pos = m.end()
    toks.append(_Tok("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, header: SessionHeader, toks: list[_Tok], source=None):
        self.h = header
        self.sig = header.signature
        self.toks = toks
        self.i = 0
        self.source = source
        self.base_index = {name: i for i, name in enumerate(header.base_names)}
        self.formal_index = {name: a for a, name in enumerate(header.formal_names)}

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok.line, tok.col, self.source)

    def expect(self, text):
        tok = self.peek()
        if tok.text != text:
            found = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse(self) -> Series:
        s = self.series()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return s

    def series(self) -> Series:
        acc = self.term()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Series:
        negate = False
        if self.peek().text == "-":
            self.advance()
            negate = True
        acc = self.factor()
        while self.peek().text == "*":
            self.advance()
            acc = acc * self.factor()
        return -acc if negate else acc

    def nat(self) -> int:
        tok = self.peek()
        if tok.kind != "num":
            raise self.error("expected a non-negative integer exponent")
        self.advance()
        return int(tok.text)

    def factor(self) -> Series:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            value = Fraction(int(tok.text))
            if self.peek().text == "/":
                self.advance()
                den_tok = self.peek()
                den = self.nat()
                if den == 0:
                    raise self.error("zero denominator", den_tok)
                value /= den
            return self.sig.constant(value)
        if tok.kind == "name":
            self.advance()
            if tok.text in self.base_index:
                base = self.sig.base(self.base_index[tok.text])
                odd = False
            elif tok.text in self.formal_index:
                a = self.formal_index[tok.text]
                base = self.sig.generator(a)
                odd = self.sig.odd[a]
            else:
                raise self.error(f"unknown variable {tok.text!r}", tok)
            if self.peek().text == "^":
                caret = self.advance()
                e = self.nat()
                if odd and e > 1:
                    raise self.error(f"odd variable {tok.text!r} raised to power {e} > 1", caret)
                return base**e
            return base
        if tok.text == "(":
            self.advance()
            inner = self.series()
            self.expect(")")
            if self.peek().text == "^":
                self.advance()
                return inner ** self.nat()
            return inner
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse_series(header: SessionHeader, text: str, line: int = 1, column: int = 1, source=None) -> Series:
    """Parse an expression into a normalized :class:`Series`."""
    return _Parser(header, _tokenize(text, line, column, source), source).parse()


def print_series(header: SessionHeader, s: Series) -> str:
    return format_series(s, header.base_names, header.formal_names)


def parse_jet(text: str, p: int, order: int, names: Sequence[str] | None = None) -> Jet:
    header = SessionHeader(0, p, 0, order, (), tuple(names or ()), ())
    return parse_series(header, text).base_projection()


# --- session files ---------------------------------------------------------

_HEADER_KEYS = re.compile(r"(n|p|q|T|sigma\.\d+|names\.base|names\.formal)\Z")


@dataclass
class Session:
    header: SessionHeader
    series: list[Series] = field(default_factory=list)
    lines: list[int] = field(default_factory=list)

    @property
    def signature(self) -> FormalSignature:
        return self.header.signature

    def format(self, comments: Sequence[str] | None = None) -> str:
        return format_session(self.header, self.series, comments)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def _parse_header_block(entries: list[tuple[int, str, str]], source=None, order_override=None) -> SessionHeader:
    values: dict[str, tuple[int, str]] = {}
    for no, key, value in entries:
        if not _HEADER_KEYS.match(key):
            raise ParseError(f"unknown header key {key!r}", no, 1, source)
        if key in values:
            raise ParseError(f"duplicate header key {key!r}", no, 1, source)
        values[key] = (no, value)
    last = entries[-1][0] if entries else 1

    def integer(key):
        if key not in values:
            raise ParseError(f"missing header key {key!r}", last, 1, source)
        no, v = values[key]
        try:
            return int(v)
        except ValueError:
            raise ParseError(f"{key} must be an integer, got {v!r}", no, 1, source) from None

    n, p, q, T = integer("n"), integer("p"), integer("q"), integer("T")
    if order_override is not None:
        T = order_override
    sigma = []
    for a in range(1, q + 1):
        key = f"sigma.{a}"
        if key not in values:
            raise ParseError(f"missing degree {key}", last, 1, source)
        no, v = values[key]
        bits = v.split()
        if len(bits) != n or any(b not in ("0", "1") for b in bits):
            raise ParseError(f"{key} must list {n} bits, got {v!r}", no, 1, source)
        sigma.append(DegreeVector(tuple(int(b) for b in bits)))
    extra = [k for k in values if k.startswith("sigma.") and not 1 <= int(k[6:]) <= q]
    if extra:
        raise ParseError(f"degree {extra[0]} declared for q = {q}", values[extra[0]][0], 1, source)
    base = tuple(values["names.base"][1].split()) if "names.base" in values else ()
    formal = tuple(values["names.formal"][1].split()) if "names.formal" in values else ()
    try:
        return SessionHeader(n, p, q, T, tuple(sigma), base, formal)
    except ValueError as exc:
        raise ParseError(str(exc), last, 1, source) from None


def _split_header(lines: list[tuple[int, str]]):
    """Leading ``key = value`` lines, then the remaining lines."""
    header, k = [], 0
    while k < len(lines):
        no, raw = lines[k]
        text = _strip_comment(raw).strip()
        if not text:
            k += 1
            continue
        if "=" not in text:
            break
        key, value = text.split("=", 1)
        header.append((no, key.strip(), value.strip()))
        k += 1
    return header, lines[k:]


def parse_session(text: str, source=None, order_override: int | None = None) -> Session:
    numbered = list(enumerate(text.splitlines(), 1))
    entries, rest = _split_header(numbered)
    header = _parse_header_block(entries, source, order_override)
    session = Session(header)
    for no, raw in rest:
        body = _strip_comment(raw)
        if not body.strip():
            continue
        if "=" in body:
            raise ParseError("header line after the first series", no, body.index("=") + 1, source)
        session.series.append(parse_series(header, body, no, 1, source))
        session.lines.append(no)
    return session


def format_session(header: SessionHeader, series: Sequence[Series], comments: Sequence[str] | None = None) -> str:
    out = list(header.lines())
    out.append("")
    for k, s in enumerate(series):
        if comments and comments[k]:
            out.append(f"# {comments[k]}")
        out.append(print_series(header, s))
    return "\n".join(out) + "\n"


def read_session(path, order_override: int | None = None) -> Session:
    path = Path(path)
    return parse_session(path.read_text(), str(path), order_override)


# --- morphism files --------------------------------------------------------

_SECTION = re.compile(r"\[(\w+)\]\Z")


def _sections(text: str, source=None) -> dict[str, list[tuple[int, str]]]:
    out: dict[str, list[tuple[int, str]]] = {}
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            current = m.group(1)
            if current in out:
                raise ParseError(f"duplicate section [{current}]", no, 1, source)
            out[current] = []
            continue
        if current is None:
            raise ParseError("content before the first [section]", no, 1, source)
        out[current].append((no, raw))
    return out


@dataclass
class MorphismFile:
    source: SessionHeader
    target: SessionHeader
    morphism: Morphism


def parse_morphism(text: str, source=None, order_override: int | None = None) -> MorphismFile:
    """Read ``[source]`` and ``[target]`` headers and ``[pullbacks]`` lines
    ``name = series`` (one per target coordinate, series over the source)."""
    secs = _sections(text, source)
    for name in ("source", "target", "pullbacks"):
        if name not in secs:
            raise ParseError(f"missing section [{name}]", 1, 1, source)
    src_entries, rest = _split_header(secs["source"])
    if rest:
        raise ParseError("unexpected line in [source]", rest[0][0], 1, source)
    tgt_entries, rest = _split_header(secs["target"])
    if rest:
        raise ParseError("unexpected line in [target]", rest[0][0], 1, source)
    src = _parse_header_block(src_entries, source, order_override)
    tgt = _parse_header_block(tgt_entries, source, order_override)
    images: dict[str, Series] = {}
    for no, raw in secs["pullbacks"]:
        body = _strip_comment(raw)
        if "=" not in body:
            raise ParseError("expected 'name = series'", no, 1, source)
        name, expr = body.split("=", 1)
        name = name.strip()
        if name not in tgt.base_names + tgt.formal_names:
            raise ParseError(f"{name!r} is not a target coordinate", no, 1, source)
        if name in images:
            raise ParseError(f"duplicate pullback for {name!r}", no, 1, source)
        images[name] = parse_series(src, expr, no, body.index("=") + 2, source)
    missing = [nm for nm in tgt.base_names + tgt.formal_names if nm not in images]
    if missing:
        raise ParseError(f"no pullback given for {missing[0]!r}", 1, 1, source)
    m = Morphism(
        SuperdomainSignature(src.signature),
        SuperdomainSignature(tgt.signature),
        [images[nm] for nm in tgt.base_names],
        [images[nm] for nm in tgt.formal_names],
    )
    return MorphismFile(src, tgt, m)


def format_morphism(source: SessionHeader, target: SessionHeader, m: Morphism) -> str:
    out = ["[source]", *source.lines(), "", "[target]", *target.lines(), "", "[pullbacks]"]
    for name, image in zip(target.base_names + target.formal_names, m.coordinate_pullbacks):
        out.append(f"{name} = {print_series(source, image)}")
    return "\n".join(out) + "\n"


def read_morphism(path, order_override: int | None = None) -> MorphismFile:
    path = Path(path)
    return parse_morphism(path.read_text(), str(path), order_override)


# --- atlas files -----------------------------------------------------------


@dataclass
class AtlasFile:
    atlas: Atlas
    headers: dict[str, SessionHeader]
    witnesses: list[dict[str, Series]]


def parse_atlas(text: str, base_dir=".", source=None, order_override: int | None = None) -> AtlasFile:
    """Atlas description, one directive per line::

        chart NAME = session-file
        transition A B = forward-morphism-file backward-morphism-file
        section NAME = series      # witness; 'section' lines after an 'end' line start a new witness
        end
    """
    base_dir = Path(base_dir)
    headers: dict[str, SessionHeader] = {}
    atlas = Atlas()
    witnesses: list[dict[str, Series]] = []
    current: dict[str, Series] = {}
    pending_transitions = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line == "end":
            if current:
                witnesses.append(current)
                current = {}
            continue
        if "=" not in line:
            raise ParseError("expected 'directive = value'", no, 1, source)
        lhs, rhs = (x.strip() for x in line.split("=", 1))
        words = lhs.split()
        kind = words[0]
        if kind == "chart" and len(words) == 2:
            sess = read_session(base_dir / rhs, order_override)
            headers[words[1]] = sess.header
            names = (sess.header.base_names, sess.header.formal_names)
            atlas.add_chart(Chart(words[1], SuperdomainSignature(sess.signature), names))
        elif kind == "transition" and len(words) == 3:
            files = rhs.split()
            if len(files) != 2:
                raise ParseError("transition needs a forward and a backward morphism file", no, 1, source)
            pending_transitions.append((no, words[1], words[2], files))
        elif kind == "section" and len(words) == 2:
            cid = words[1]
            if cid not in headers:
                raise ParseError(f"section on unknown chart {cid!r}", no, 1, source)
            col = raw.index("=") + 2
            current[cid] = parse_series(headers[cid], raw.split("#", 1)[0].split("=", 1)[1], no, col, source)
        else:
            raise ParseError(f"unknown directive {lhs!r}", no, 1, source)
    if current:
        witnesses.append(current)
    for no, a, b, files in pending_transitions:
        for cid in (a, b):
            if cid not in headers:
                raise ParseError(f"transition refers to unknown chart {cid!r}", no, 1, source)
        fwd = read_morphism(base_dir / files[0], order_override).morphism
        bwd = read_morphism(base_dir / files[1], order_override).morphism
        try:
            atlas.add_transition(Transition(a, b, fwd, bwd))
        except ValueError as exc:
            raise ParseError(str(exc), no, 1, source) from None
    return AtlasFile(atlas, headers, witnesses)


def read_atlas(path, order_override: int | None = None) -> AtlasFile:
    path = Path(path)
    return parse_atlas(path.read_text(), path.parent, str(path), order_override)
