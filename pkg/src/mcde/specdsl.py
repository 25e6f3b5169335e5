"""Parser and renderer for the complex-specification language and term syntax.

Statements are `;`-terminated; `#` starts a line comment::

    slots 2;
    diff d up 1 down 1;
    atom phi n [0,0] m [0,0];
    order e d;                      # optional canonical label order
    maxorder d on phi = 2;          # d^2 phi = 0
    maxpower [d]phi = 3;            # ([d]phi)^3 = 0
    ideal { phi, psi };
    commute e d = 0;                # d_e d_d = 0 * d_d d_e
    condition [d]gamma = {phi^2};   # rhs 0 gives an orthogonality condition

Patterns accept `[*]` for any word and `*` for any atom.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, SemanticError
from .rules import Condition, FactorPattern, Ideal, RuleSet
from .scalars import Scalar, format_scalar, gauss
from .terms import (
    Atom,
    DifferentialLabel,
    Expression,
    Factor,
    Monomial,
    MultiIndex,
    make_word,
)


@dataclass(frozen=True)
class SpecSource:
    text: str
    origin: str = "<inline>"


@dataclass(frozen=True)
class Token:
    kind: str     # ident | int | sym | eof
    value: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[^\W\d]\w*'*)
  | (?P<sym>[{}\[\](),;=^*+\-/])
""", re.VERBOSE)


def tokenize(text: str, origin: str = "<inline>") -> list[Token]:
    lines = text.split("\n")
    toks: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col,
                             lines[line - 1], origin)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(Token(kind, m.group(), line, col))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, origin: str):
        self.text = text
        self.origin = origin
        self.lines = text.split("\n")
        self.toks = tokenize(text, origin)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def snippet(self, t: Token) -> str:
        return self.lines[t.line - 1] if 0 < t.line <= len(self.lines) else ""

    def error(self, msg: str, t: Token | None = None) -> ParseError:
        t = t or self.tok
        return ParseError(msg, t.line, t.col, self.snippet(t), self.origin)

    def semantic(self, msg: str, t: Token) -> SemanticError:
        return SemanticError(msg, t.line, t.col, self.snippet(t), self.origin)

    def at(self, value: str) -> bool:
        return self.tok.kind == "sym" and self.tok.value == value

    def at_word(self, value: str) -> bool:
        return self.tok.kind == "ident" and self.tok.value == value

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.error(f"expected {value!r}, found {self._describe(self.tok)}")
        return self.advance()

    def expect_word(self, value: str) -> Token:
        if not self.at_word(value):
            raise self.error(f"expected {value!r}, found {self._describe(self.tok)}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}, found {self._describe(self.tok)}")
        return self.advance()

    def integer(self, signed: bool = False) -> int:
        neg = False
        if signed and self.at("-"):
            self.advance()
            neg = True
        if self.tok.kind != "int":
            raise self.error(f"expected integer, found {self._describe(self.tok)}")
        v = int(self.advance().value)
        return -v if neg else v

    @staticmethod
    def _describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.value)

    # scalars
    def rational(self) -> Fraction:
        neg = False
        if self.at("-"):
            self.advance()
            neg = True
        num = self.integer()
        den = 1
        if self.at("/"):
            self.advance()
            t = self.tok
            den = self.integer()
            if den == 0:
                raise self.semantic("zero denominator", t)
        q = Fraction(num, den)
        return -q if neg else q

    def scalar(self) -> Scalar:
        if not self.at("("):
            return self.rational()
        self.advance()
        re_part = self.rational()
        if self.at_word("i"):
            self.advance()
            self.expect(")")
            return gauss(0, re_part)
        if not (self.at("+") or self.at("-")):
            raise self.error("expected '+' or '-' in gaussian rational")
        sign = -1 if self.advance().value == "-" else 1
        if self.at_word("i"):
            im = Fraction(1)
        else:
            im = self.rational()
        self.expect_word("i")
        self.expect(")")
        return gauss(re_part, sign * im)

    def at_scalar_start(self) -> bool:
        return self.tok.kind == "int" or self.at("(") or (self.at("-") and self.peek().kind == "int")

    # words, factors, patterns
    def word_letters(self, labels, allow_wild: bool):
        """Parse one or more `[...]` groups; returns letters or None for `[*]`."""
        letters: list[tuple[str, int]] = []
        wild = False
        while self.at("["):
            open_tok = self.advance()
            if self.at("*"):
                if not allow_wild:
                    raise self.error("word wildcard not allowed here")
                self.advance()
                wild = True
                self.expect("]")
                continue
            if self.at("]"):
                raise self.error("empty operator word")
            while not self.at("]"):
                t = self.ident("differential label")
                if labels is not None and t.value not in labels:
                    raise self.semantic(f"unknown differential label {t.value!r}", t)
                order = 1
                if self.at("^"):
                    self.advance()
                    ot = self.tok
                    order = self.integer()
                    if order < 1:
                        raise self.semantic("order must be >= 1", ot)
                letters.append((t.value, order))
            self.expect("]")
            if wild:
                raise self.error("wildcard word cannot be combined with letters", open_tok)
        if wild:
            if letters:
                raise self.error("wildcard word cannot be combined with letters")
            return None
        return letters

    def factor(self, rules: RuleSet) -> tuple[Factor, int]:
        letters = self.word_letters(set(rules.label_names), allow_wild=False)
        t = self.ident("atom name")
        if t.value not in rules.atom_names:
            raise self.semantic(f"unknown atom {t.value!r}", t)
        mult = self.power()
        return Factor(t.value, make_word(letters)), mult

    def power(self) -> int:
        if not self.at("^"):
            return 1
        self.advance()
        t = self.tok
        k = self.integer()
        if k < 1:
            raise self.semantic("power must be >= 1", t)
        return k

    def pattern(self, labels, atoms) -> tuple[FactorPattern, int]:
        letters = self.word_letters(labels, allow_wild=True)
        if self.at("*"):
            self.advance()
            atom = None
        else:
            t = self.ident("atom name or '*'")
            if t.value not in atoms:
                raise self.semantic(f"unknown atom {t.value!r}", t)
            atom = t.value
        word = None if letters is None else make_word(letters)
        return FactorPattern(atom, word), self.power()

    # expressions
    def monomial(self, rules: RuleSet, coeff: Scalar) -> Monomial:
        self.expect("{")
        counts: dict[Factor, int] = {}
        if not self.at("}"):
            while True:
                f, k = self.factor(rules)
                counts[f] = counts.get(f, 0) + k
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect("}")
        return Monomial.of(counts, coeff)

    def term(self, rules: RuleSet, sign: int) -> Monomial:
        coeff: Scalar = Fraction(1)
        if self.at_scalar_start():
            coeff = self.scalar()
            if self.at("*"):
                self.advance()
            elif not self.at("{"):
                raise self.error("expected '*' or '{' after coefficient")
        return self.monomial(rules, sign * coeff)

    def expression(self, rules: RuleSet) -> Expression:
        if self.tok.kind == "int" and self.tok.value == "0" and not self._continues_term():
            self.advance()
            return Expression()
        terms = []
        sign = 1
        if self.at("-") and self.peek().kind != "int":
            self.advance()
            sign = -1
        terms.append(self.term(rules, sign))
        while self.at("+") or self.at("-"):
            sign = 1 if self.advance().value == "+" else -1
            terms.append(self.term(rules, sign))
        return Expression(terms)

    def _continues_term(self) -> bool:
        nxt = self.peek()
        return nxt.kind == "sym" and nxt.value in ("*", "{", "/")

    # spec statements
    def spec(self) -> RuleSet:
        b = _Builder(self)
        while self.tok.kind != "eof":
            t = self.ident("statement keyword")
            handler = getattr(self, f"_stmt_{t.value}", None)
            if handler is None:
                raise self.error(f"unknown statement {t.value!r}", t)
            handler(b, t)
            self.expect(";")
        return b.build()

    def _stmt_slots(self, b: _Builder, kw: Token):
        if b.slots is not None:
            raise self.semantic("slot count declared twice", kw)
        if b.labels or b.atoms:
            raise self.semantic("slots must be declared before labels and atoms", kw)
        t = self.tok
        n = self.integer()
        if n < 1:
            raise self.semantic("slot count must be >= 1", t)
        b.slots = n

    def _stmt_diff(self, b: _Builder, kw: Token):
        name = self.ident("label name")
        self.expect_word("up")
        ut = self.tok
        up = self.integer()
        self.expect_word("down")
        dt = self.tok
        down = self.integer()
        slots = b.require_slots(kw)
        for v, t in ((up, ut), (down, dt)):
            if not 1 <= v <= slots:
                raise self.semantic(f"slot index {v} outside 1..{slots}", t)
        if name.value in b.labels:
            raise self.semantic(f"duplicate differential label {name.value!r}", name)
        b.labels[name.value] = DifferentialLabel(name.value, up, down)

    def _vector(self, slots: int) -> tuple[int, ...]:
        start = self.expect("[")
        vals = []
        if not self.at("]"):
            while True:
                vals.append(self.integer(signed=True))
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect("]")
        if len(vals) != slots:
            raise self.semantic(f"expected {slots} index entries, got {len(vals)}", start)
        return tuple(vals)

    def _stmt_atom(self, b: _Builder, kw: Token):
        name = self.ident("atom name")
        if name.value == "i":
            raise self.semantic("'i' is reserved for gaussian rationals", name)
        slots = b.require_slots(kw)
        self.expect_word("n")
        upper = self._vector(slots)
        self.expect_word("m")
        lower = self._vector(slots)
        if name.value in b.atoms:
            raise self.semantic(f"duplicate atom {name.value!r}", name)
        b.atoms[name.value] = Atom(name.value, MultiIndex(upper, lower))

    def _stmt_order(self, b: _Builder, kw: Token):
        if b.order is not None:
            raise self.semantic("label order declared twice", kw)
        names = []
        while self.tok.kind == "ident":
            t = self.advance()
            if t.value not in b.labels:
                raise self.semantic(f"unknown differential label {t.value!r}", t)
            if t.value in names:
                raise self.semantic(f"label {t.value!r} repeated in order", t)
            names.append(t.value)
        if set(names) != set(b.labels):
            raise self.semantic("order must list every declared label exactly once", kw)
        b.order = names

    def _stmt_maxorder(self, b: _Builder, kw: Token):
        lt = self.ident("differential label")
        if lt.value not in b.labels:
            raise self.semantic(f"unknown differential label {lt.value!r}", lt)
        self.expect_word("on")
        pt = self.tok
        pat, k = self.pattern(set(b.labels), set(b.atoms))
        if k != 1:
            raise self.semantic("a maxorder pattern takes no power", pt)
        self.expect("=")
        bt = self.tok
        bound = self.integer()
        if bound < 1:
            raise self.semantic("bound must be >= 1", bt)
        key = (lt.value, pat)
        if key in b.max_order:
            raise self.semantic("duplicate maxorder declaration", kw)
        b.max_order[key] = bound

    def _stmt_maxpower(self, b: _Builder, kw: Token):
        pt = self.tok
        pat, k = self.pattern(set(b.labels), set(b.atoms))
        if k != 1:
            raise self.semantic("a maxpower pattern takes no power", pt)
        self.expect("=")
        bt = self.tok
        bound = self.integer()
        if bound < 1:
            raise self.semantic("bound must be >= 1", bt)
        if pat in b.max_power:
            raise self.semantic("duplicate maxpower declaration", kw)
        b.max_power[pat] = bound

    def _stmt_ideal(self, b: _Builder, kw: Token):
        self.expect("{")
        members: list[FactorPattern] = []
        while True:
            pat, k = self.pattern(set(b.labels), set(b.atoms))
            members.extend([pat] * k)
            if self.at(","):
                self.advance()
                continue
            break
        self.expect("}")
        if len(members) < 2:
            raise self.semantic("an ideal needs total multiplicity >= 2", kw)
        ideal = Ideal(tuple(members))
        if ideal in b.ideals:
            raise self.semantic("duplicate ideal", kw)
        b.ideals.append(ideal)

    def _stmt_commute(self, b: _Builder, kw: Token):
        at = self.ident("differential label")
        bt = self.ident("differential label")
        for t in (at, bt):
            if t.value not in b.labels:
                raise self.semantic(f"unknown differential label {t.value!r}", t)
        if at.value == bt.value:
            raise self.semantic("a label commutes with itself trivially", bt)
        self.expect("=")
        value = self.scalar()
        key = (at.value, bt.value)
        if key in b.commutation:
            raise self.semantic("duplicate commute declaration", kw)
        rev = b.commutation.get((bt.value, at.value))
        if rev is not None and rev and value and rev * value != 1:
            raise self.semantic("inconsistent commutation constants for the pair", kw)
        b.commutation[key] = value

    def _stmt_condition(self, b: _Builder, kw: Token):
        rules = b.partial()
        f, k = self.factor(rules)
        if k != 1:
            raise self.semantic("condition left-hand side takes no power", kw)
        self.expect("=")
        rhs = self.expression(rules)
        b.conditions.append(Condition(f, rhs))


class _Builder:
    def __init__(self, parser: _Parser):
        self.parser = parser
        self.slots: int | None = None
        self.labels: dict[str, DifferentialLabel] = {}
        self.atoms: dict[str, Atom] = {}
        self.order: list[str] | None = None
        self.max_order: dict = {}
        self.max_power: dict = {}
        self.ideals: list[Ideal] = []
        self.commutation: dict = {}
        self.conditions: list[Condition] = []

    def require_slots(self, kw: Token) -> int:
        if self.slots is None:
            raise self.parser.semantic("slots must be declared first", kw)
        return self.slots

    def partial(self) -> RuleSet:
        names = self.order or list(self.labels)
        return RuleSet(self.slots or 1, tuple(self.labels[n] for n in names), tuple(self.atoms.values()))

    def build(self) -> RuleSet:
        if self.slots is None:
            t = self.parser.tok
            raise SemanticError("missing slots declaration", t.line, t.col, "", self.parser.origin)
        names = self.order or list(self.labels)
        return RuleSet(
            slot_count=self.slots,
            labels=tuple(self.labels[n] for n in names),
            atoms=tuple(self.atoms.values()),
            max_order=dict(self.max_order),
            max_power=dict(self.max_power),
            ideals=tuple(self.ideals),
            commutation=dict(self.commutation),
            conditions=tuple(self.conditions),
        )


def parse_spec(src: SpecSource | str) -> RuleSet:
    if isinstance(src, str):
        src = SpecSource(src)
    return _Parser(src.text, src.origin).spec()


def parse_expr(rules: RuleSet, text: str) -> Expression:
    p = _Parser(text, "<expr>")
    e = p.expression(rules)
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p._describe(p.tok)} after expression")
    return e


def parse_monomial(rules: RuleSet, text: str) -> Monomial:
    e = parse_expr(rules, text)
    if len(e) != 1:
        raise ParseError(f"expected a single monomial, got {len(e)} terms", 1, 1, text, "<expr>")
    return next(iter(e))


def parse_factor(rules: RuleSet, text: str) -> Factor:
    p = _Parser(text, "<factor>")
    f, k = p.factor(rules)
    if k != 1 or p.tok.kind != "eof":
        raise p.error("expected a single factor")
    return f


def render_expr(e: Expression) -> str:
    return str(e)


def render_spec(rules: RuleSet) -> str:
    """DSL text that parses back to an equal RuleSet."""
    out = [f"slots {rules.slot_count};"]
    for d in rules.labels:
        out.append(f"diff {d.name} up {d.up_slot} down {d.down_slot};")
    for a in rules.atoms:
        n = ", ".join(map(str, a.base_index.upper))
        m = ", ".join(map(str, a.base_index.lower))
        out.append(f"atom {a.name} n [{n}] m [{m}];")
    for (lab, pat), bound in rules.max_order.items():
        out.append(f"maxorder {lab} on {pat} = {bound};")
    for pat, bound in rules.max_power.items():
        out.append(f"maxpower {pat} = {bound};")
    for ideal in rules.ideals:
        out.append(f"ideal {ideal};")
    for (a, b), value in rules.commutation.items():
        out.append(f"commute {a} {b} = {format_scalar(value)};")
    for c in rules.conditions:
        out.append(f"condition {c.lhs} = {c.rhs};")
    return "\n".join(out) + "\n"
