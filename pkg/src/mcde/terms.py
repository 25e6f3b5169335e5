"""Term language: labels, atoms, operator words, factors, monomials, expressions.

Everything here is an immutable value.  A monomial is a multiset of factors
with an exact coefficient; position sums of the distributed product collapse
into that coefficient because vanishing depends only on multiset content.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Protocol, Sequence

from .errors import NonPositiveOrder, UnknownLabel
from .scalars import Scalar, as_scalar, format_scalar, is_negative_real

Letter = tuple[str, int]


@dataclass(frozen=True)
class DifferentialLabel:
    name: str
    up_slot: int
    down_slot: int


@dataclass(frozen=True)
class MultiIndex:
    upper: tuple[int, ...]
    lower: tuple[int, ...]

    @classmethod
    def zero(cls, slots: int) -> MultiIndex:
        return cls((0,) * slots, (0,) * slots)

    def __add__(self, other: MultiIndex) -> MultiIndex:
        return MultiIndex(tuple(a + b for a, b in zip(self.upper, other.upper)),
                          tuple(a + b for a, b in zip(self.lower, other.lower)))

    def scaled(self, k: int) -> MultiIndex:
        return MultiIndex(tuple(k * a for a in self.upper), tuple(k * a for a in self.lower))

    def __str__(self):
        return f"n={list(self.upper)} m={list(self.lower)}"


@dataclass(frozen=True)
class Atom:
    name: str
    base_index: MultiIndex


@dataclass(frozen=True, order=True)
class OperatorWord:
    """d_{a1}^{r1} ... d_{an}^{rn}; the first letter is applied last (outermost)."""

    letters: tuple[Letter, ...] = ()

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def prepend(self, label: str, order: int = 1) -> OperatorWord:
        return make_word(((label, order),) + self.letters)

    def elementary(self) -> list[str]:
        return [lab for lab, r in self.letters for _ in range(r)]

    def __str__(self):
        return " ".join(lab if r == 1 else f"{lab}^{r}" for lab, r in self.letters)


EMPTY_WORD = OperatorWord()


def make_word(letters: Iterable[Sequence], labels: Iterable[str] | None = None) -> OperatorWord:
    """Build a canonical word, merging adjacent letters with the same label."""
    known = set(labels) if labels is not None else None
    merged: list[list] = []
    for lab, r in letters:
        if known is not None and lab not in known:
            raise UnknownLabel(lab)
        if not isinstance(r, int) or r < 1:
            raise NonPositiveOrder(f"order of {lab!r} must be a positive integer, got {r!r}")
        if merged and merged[-1][0] == lab:
            merged[-1][1] += r
        else:
            merged.append([lab, r])
    return OperatorWord(tuple((lab, r) for lab, r in merged))


class CommutationTable(Protocol):
    def label_rank(self, name: str) -> int: ...
    def commutator(self, a: str, b: str) -> Scalar | None: ...


def normalize_word(word: OperatorWord, rules: CommutationTable) -> tuple[Scalar, OperatorWord]:
    """Bubble-sort a word into canonical label order using d_a d_b = A_ab d_b d_a.

    Returns (0, empty) when an adjacent pair has A = 0, and the word unchanged
    with scalar 1 when some required swap has no declared commutation.
    """
    if _has_zero_adjacency(word.letters, rules):
        return Fraction(0), EMPTY_WORD
    seq = word.letters
    for i, (a, _) in enumerate(seq):
        for b, _ in seq[i + 1:]:
            if rules.label_rank(a) > rules.label_rank(b) and rules.commutator(a, b) is None:
                return Fraction(1), word
    letters = [list(x) for x in word.letters]
    scalar: Scalar = Fraction(1)
    swapped = True
    while swapped:
        swapped = False
        for i in range(len(letters) - 1):
            (a, r), (b, s) = letters[i], letters[i + 1]
            if rules.label_rank(a) <= rules.label_rank(b):
                continue
            scalar = scalar * rules.commutator(a, b) ** (r * s)
            if not scalar:
                return Fraction(0), EMPTY_WORD
            letters[i], letters[i + 1] = letters[i + 1], letters[i]
            swapped = True
        letters = [list(x) for x in make_word(letters).letters]
    result = OperatorWord(tuple((a, r) for a, r in letters))
    if _has_zero_adjacency(result.letters, rules):
        return Fraction(0), EMPTY_WORD
    return scalar, result


def _has_zero_adjacency(letters, rules) -> bool:
    for (a, _), (b, _) in zip(letters, letters[1:]):
        coeff = rules.commutator(a, b)
        if coeff is not None and not coeff:
            return True
    return False


@dataclass(frozen=True, order=True)
class Factor:
    """An operator word applied to an atom; ordered by (atom name, word)."""

    atom: str
    word: OperatorWord = EMPTY_WORD

    def apply(self, label: str, order: int = 1) -> Factor:
        return Factor(self.atom, self.word.prepend(label, order))

    def __str__(self):
        return f"[{self.word}]{self.atom}" if self.word else self.atom


def factor(atom: str, *letters: Sequence) -> Factor:
    return Factor(atom, make_word(letters))


FactorKey = tuple[tuple[Factor, int], ...]


@dataclass(frozen=True)
class Monomial:
    coeff: Scalar
    factors: FactorKey

    @classmethod
    def of(cls, factors: Mapping[Factor, int] | Iterable[Factor], coeff=1) -> Monomial:
        counts = Counter()
        if isinstance(factors, Mapping):
            for f, m in factors.items():
                if m < 1:
                    raise ValueError(f"multiplicity of {f} must be >= 1, got {m}")
                counts[f] += m
        else:
            counts.update(factors)
        return cls(as_scalar(coeff), tuple(sorted(counts.items())))

    @property
    def key(self) -> FactorKey:
        return self.factors

    def multiplicity(self, f: Factor) -> int:
        for g, m in self.factors:
            if g == f:
                return m
        return 0

    def counts(self) -> dict[Factor, int]:
        return dict(self.factors)

    def units(self) -> list[Factor]:
        """The multiset expanded into one entry per multiplicity."""
        return [f for f, m in self.factors for _ in range(m)]

    @property
    def size(self) -> int:
        return sum(m for _, m in self.factors)

    def with_coeff(self, c) -> Monomial:
        return Monomial(as_scalar(c), self.factors)

    def replace_one(self, old: Factor, new: Factor | None) -> Monomial:
        """Drop one copy of `old` and add one copy of `new` (if given)."""
        counts = self.counts()
        counts[old] -= 1
        if not counts[old]:
            del counts[old]
        if new is not None:
            counts[new] = counts.get(new, 0) + 1
        return Monomial(self.coeff, tuple(sorted(counts.items())))

    def __mul__(self, other: Monomial) -> Monomial:
        counts = Counter(self.counts())
        counts.update(other.counts())
        return Monomial(self.coeff * other.coeff, tuple(sorted(counts.items())))

    def body(self) -> str:
        parts = [str(f) if m == 1 else f"{f}^{m}" for f, m in self.factors]
        return "{" + ", ".join(parts) + "}"

    def __str__(self):
        c = self.coeff
        if c == 1:
            return self.body()
        if c == -1:
            return "-" + self.body()
        return f"{format_scalar(c)}*{self.body()}"


class Expression:
    """A formal sum of monomials with like terms collected and zeros dropped.

    Terms are kept in descending factor-key order.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[Monomial] = ()):
        acc: dict[FactorKey, Scalar] = {}
        for t in terms:
            acc[t.factors] = acc.get(t.factors, 0) + t.coeff
        self._terms = {k: as_scalar(c) for k, c in sorted(acc.items(), reverse=True) if c}
        self._hash = None

    @classmethod
    def _from_dict(cls, d: dict) -> Expression:
        e = cls.__new__(cls)
        e._terms = {k: c for k, c in sorted(d.items(), reverse=True) if c}
        e._hash = None
        return e

    @classmethod
    def of(cls, *monomials: Monomial) -> Expression:
        return cls(monomials)

    def __iter__(self) -> Iterator[Monomial]:
        for k, c in self._terms.items():
            yield Monomial(c, k)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Expression):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def coefficient(self, key: FactorKey | Monomial) -> Scalar:
        if isinstance(key, Monomial):
            key = key.factors
        return self._terms.get(key, Fraction(0))

    def keys(self):
        return self._terms.keys()

    def __add__(self, other: Expression) -> Expression:
        d = dict(self._terms)
        for k, c in other._terms.items():
            d[k] = d.get(k, 0) + c
        return Expression._from_dict(d)

    def __neg__(self) -> Expression:
        return Expression._from_dict({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: Expression) -> Expression:
        return self + (-other)

    def scale(self, c) -> Expression:
        c = as_scalar(c)
        if not c:
            return ZERO
        return Expression._from_dict({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other: Expression) -> Expression:
        return Expression(a * b for a in self for b in other)

    def primitive(self) -> Expression:
        """Scale so the first term has coefficient 1 (identity up to scaling)."""
        if not self:
            return self
        return self.scale(1 / next(iter(self._terms.values())))

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for i, m in enumerate(self):
            if is_negative_real(m.coeff):
                s = str(m.with_coeff(-m.coeff))
                out.append(("-" if i == 0 else " - ") + s)
            else:
                out.append(("" if i == 0 else " + ") + str(m))
        return "".join(out)

    def __repr__(self):
        return f"Expression({str(self)!r})"


ZERO = Expression()


def expr_add(e1: Expression, e2: Expression) -> Expression:
    return e1 + e2


def expr_scale(e: Expression, scalar) -> Expression:
    return e.scale(scalar)


def expr_collect(terms: Iterable[Monomial]) -> Expression:
    return Expression(terms)


def multi_index(rules, x: Factor | Monomial) -> MultiIndex:
    """Multi-index of a factor or (multiplicity-weighted) monomial.

    Each letter (label, r) adds r to the label's upper slot and subtracts r
    from its lower slot.
    """
    if isinstance(x, Monomial):
        total = MultiIndex.zero(rules.slot_count)
        for f, m in x.factors:
            total = total + multi_index(rules, f).scaled(m)
        return total
    base = rules.atom(x.atom).base_index
    upper, lower = list(base.upper), list(base.lower)
    for lab, r in x.word:
        d = rules.label(lab)
        upper[d.up_slot - 1] += r
        lower[d.down_slot - 1] -= r
    return MultiIndex(tuple(upper), tuple(lower))
