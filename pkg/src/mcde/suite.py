"""Pinned worked examples plus randomized engine-vs-oracle checks.

Each closed-product case lists the statements that make it closed; the
mutation check drops each one in turn and expects the verdict to flip.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .calculus import PLAIN, TRANSFER, derive_identity, differentiate, hierarchy, is_closed, saturate_conditions, transfer_cancel
from .errors import SemanticError
from .oracle import arrange, collapse, positional_expand
from .rules import RuleSet, vanishes
from .specdsl import parse_expr, parse_monomial, parse_spec
from .terms import Factor, Monomial, OperatorWord, multi_index

HEADER = """\
slots 2;
diff d up 1 down 1;
diff e up 2 down 2;
atom phi n [0, 0] m [0, 0];
atom psi n [0, 0] m [0, 0];
atom chi n [0, 0] m [0, 0];
"""


def build(*statements: str) -> RuleSet:
    return parse_spec(HEADER + "\n".join(statements))


@dataclass(frozen=True)
class CaseResult:
    tag: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f": {self.detail}" if self.detail and not self.passed else ""
        return f"{status} {self.tag}{tail}"


@dataclass(frozen=True)
class ClosureCase:
    tag: str
    candidate: str
    statements: tuple[str, ...]
    enabling: tuple[str, ...]
    label: str = "d"
    mode: str = PLAIN

    def rules(self, drop: str | None = None) -> RuleSet:
        return build(*(s for s in self.statements if s != drop))

    def run(self) -> CaseResult:
        rules = self.rules()
        m = parse_monomial(rules, self.candidate)
        v = is_closed(rules, self.label, m, self.mode)
        if not v.closed:
            return CaseResult(self.tag, False, f"expected CLOSED, residue {v.witness}")
        if self.mode == TRANSFER and is_closed(rules, self.label, m, PLAIN).closed:
            return CaseResult(self.tag, False, "closed without transfer; case does not exercise it")
        for stmt in self.enabling:
            mutated = self.rules(drop=stmt)
            if is_closed(mutated, self.label, parse_monomial(mutated, self.candidate), self.mode).closed:
                return CaseResult(self.tag, False, f"still CLOSED without `{stmt}`")
        return CaseResult(self.tag, True)


CLOSURE_CASES: tuple[ClosureCase, ...] = (
    ClosureCase("single-element/first-order/1", "{phi^2}",
                ("maxorder d on phi = 1;", "maxpower phi = 3;"),
                ("maxorder d on phi = 1;",)),
    ClosureCase("single-element/first-order/2", "{[d]phi^2}",
                ("maxorder d on phi = 2;", "maxpower [d]phi = 3;"),
                ("maxorder d on phi = 2;",)),
    ClosureCase("single-element/first-order/3", "{[d]phi^2, phi^2}",
                ("maxorder d on phi = 2;", "maxpower [d]phi = 3;"),
                ("maxorder d on phi = 2;", "maxpower [d]phi = 3;")),
    ClosureCase("single-element/higher-order/1", "{[d^2]phi^2}",
                ("maxorder d on phi = 3;",),
                ("maxorder d on phi = 3;",)),
    ClosureCase("single-element/higher-order/2", "{[d]phi, phi^3}",
                ("maxorder d on phi = 2;", "maxpower [d]phi = 2;", "maxpower phi = 4;"),
                ("maxorder d on phi = 2;", "maxpower [d]phi = 2;")),
    ClosureCase("order-powers/top-order", "{[d^2]phi^3}",
                ("maxorder d on phi = 3;", "maxpower [d^2]phi = 4;"),
                ("maxorder d on phi = 3;",)),
    ClosureCase("order-powers/adjacent-pair", "{[d]phi^2}",
                ("ideal { [d^2]phi, [d]phi };",),
                ("ideal { [d^2]phi, [d]phi };",)),
    ClosureCase("order-powers/adjacent-power", "{[d]phi^3}",
                ("ideal { [d^2]phi, [d]phi^2 };",),
                ("ideal { [d^2]phi, [d]phi^2 };",)),
    ClosureCase("order-powers/cross-pair", "{[d]phi, [d^2]phi}",
                ("ideal { [d^2]phi^2 };", "ideal { [d^3]phi, [d]phi };"),
                ("ideal { [d^2]phi^2 };", "ideal { [d^3]phi, [d]phi };")),
    ClosureCase("order-powers/cross-power", "{[d]phi, [d^3]phi^2}",
                ("ideal { [d^2]phi, [d^3]phi^2 };", "ideal { [d^4]phi, [d]phi };"),
                ("ideal { [d^2]phi, [d^3]phi^2 };", "ideal { [d^4]phi, [d]phi };")),
    ClosureCase("order-powers/consecutive/saturated-power", "{[d^2]phi^2, [d]phi}",
                ("maxorder d on phi = 3;", "maxpower [d^2]phi = 3;"),
                ("maxorder d on phi = 3;", "maxpower [d^2]phi = 3;")),
    ClosureCase("order-powers/consecutive/paired-top", "{[d^2]phi, [d]phi}",
                ("maxorder d on phi = 3;", "ideal { [d^2]phi^2 };"),
                ("maxorder d on phi = 3;", "ideal { [d^2]phi^2 };")),
    ClosureCase("two-differentials/1", "{[e]phi, [d]phi, phi^2}",
                ("maxorder d on [e]phi = 1;", "maxorder d on phi = 2;",
                 "maxpower [d]phi = 2;", "maxpower phi = 4;"),
                ("maxorder d on [e]phi = 1;", "maxorder d on phi = 2;", "maxpower [d]phi = 2;")),
    ClosureCase("two-differentials/2", "{[e d]phi, [d]phi, phi^2}",
                ("maxorder d on [e d]phi = 1;", "maxorder d on phi = 2;",
                 "maxpower [d]phi = 2;", "maxpower phi = 4;"),
                ("maxorder d on [e d]phi = 1;", "maxorder d on phi = 2;", "maxpower [d]phi = 2;")),
    ClosureCase("two-element/1", "{[d]phi, psi}",
                ("ideal { [d]phi, [d]psi };", "maxorder d on phi = 2;"),
                ("ideal { [d]phi, [d]psi };", "maxorder d on phi = 2;")),
    ClosureCase("two-element/2", "{[e]phi, psi}",
                ("commute d e = 0;", "ideal { [e]phi, [d]psi };"),
                ("commute d e = 0;", "ideal { [e]phi, [d]psi };")),
    ClosureCase("two-element/3", "{[e]phi, psi}",
                ("order e d;", "commute d e = 1;", "ideal { [d]phi, psi };",
                 "ideal { [d]phi, [e]psi };", "maxorder d on psi = 1;"),
                ("commute d e = 1;", "ideal { [d]phi, psi };",
                 "ideal { [d]phi, [e]psi };", "maxorder d on psi = 1;"),
                mode=TRANSFER),
    ClosureCase("three-element", "{[e]phi, [d]psi, chi^2}",
                ("maxorder d on psi = 2;", "maxorder d on [e]phi = 1;",
                 "ideal { [d]psi, [d]chi };", "maxpower chi = 3;"),
                ("maxorder d on psi = 2;", "maxorder d on [e]phi = 1;", "ideal { [d]psi, [d]chi };")),
    ClosureCase("multi-element/order-powers/1", "{[d]phi^2, psi}",
                ("maxorder d on phi = 2;", "ideal { [d]phi^2, [d]psi };"),
                ("maxorder d on phi = 2;", "ideal { [d]phi^2, [d]psi };")),
    ClosureCase("multi-element/order-powers/2", "{[d^2]phi, psi^2}",
                ("maxorder d on phi = 3;", "ideal { [d]psi, psi };", "maxpower psi = 3;"),
                ("maxorder d on phi = 3;", "ideal { [d]psi, psi };")),
    ClosureCase("multi-element/order-powers/3", "{[d^2]phi, psi}",
                ("maxorder d on phi = 3;", "ideal { [d]phi, psi };", "maxorder d on psi = 2;"),
                ("maxorder d on phi = 3;", "ideal { [d]phi, psi };", "maxorder d on psi = 2;"),
                mode=TRANSFER),
    ClosureCase("multi-element/multi-order/1", "{[e d]phi^2}",
                ("maxorder d on [e d]phi = 1;",),
                ("maxorder d on [e d]phi = 1;",)),
    ClosureCase("multi-element/multi-order/2", "{[e]phi, [d e]phi}",
                ("maxpower [d e]phi = 2;", "maxorder d on [e]phi = 2;"),
                ("maxpower [d e]phi = 2;", "maxorder d on [e]phi = 2;")),
)


def _expect(tag: str, got, want) -> CaseResult:
    if got == want:
        return CaseResult(tag, True)
    return CaseResult(tag, False, f"got {got}, expected {want}")


def _transfer() -> CaseResult:
    rules = build("ideal { phi, psi };")
    ident = derive_identity(rules, "d", parse_monomial(rules, "{phi, psi}"))
    return _expect("transfer", ident.expression, parse_expr(rules, "{[d]phi, psi} + {phi, [d]psi}"))


def _transfer_mixed() -> CaseResult:
    rules = build("ideal { phi, psi };", "commute e d = 0;")
    want = parse_expr(rules, "{[d]phi, [e]psi} + {[e]phi, [d]psi}")
    found = [i for i in hierarchy(rules, parse_monomial(rules, "{phi, psi}"), ("d", "e"), 2)
             if i.applied == ("d", "e")]
    if not found or found[0].expression != want:
        return CaseResult("transfer-mixed", False, f"depth-2 identity {found[0] if found else None}")
    left = transfer_cancel(rules, want)
    if left:
        return CaseResult("transfer-mixed", False, f"transfer left {left}")
    return CaseResult("transfer-mixed", True)


def _power_seed() -> CaseResult:
    rules = build("maxpower phi = 3;")
    ident = derive_identity(rules, "d", parse_monomial(rules, "{phi^3}"))
    return _expect("power-seed", ident.expression, parse_expr(rules, "3*{[d]phi, phi^2}"))


def _power_seed_depth2() -> CaseResult:
    tag = "power-seed-depth2"
    rules = build("maxpower phi = 3;", "commute e d = 0;")
    seed = parse_monomial(rules, "{phi^3}")
    found = [i for i in hierarchy(rules, seed, ("d", "e"), 2) if i.applied == ("d", "e")]
    want = parse_expr(rules, "6*{[d]phi, [e]phi, phi}")
    if not found or found[0].expression != want:
        return CaseResult(tag, False, f"depth-2 identity {found[0] if found else None}")
    killed = build("maxpower phi = 3;", "commute e d = 0;", "ideal { [d]phi, [e]phi };")
    if any(i.applied == ("d", "e") for i in hierarchy(killed, seed, ("d", "e"), 2)):
        return CaseResult(tag, False, "pair ideal did not trivialize the depth-2 identity")
    return CaseResult(tag, True)


def _order_power_seed() -> CaseResult:
    rules = build("maxorder d on phi = 3;", "maxpower [d]phi = 2;")
    ident = derive_identity(rules, "d", parse_monomial(rules, "{[d]phi^2, phi}"))
    return _expect("order-power-seed", ident.expression, parse_expr(rules, "2*{[d^2]phi, [d]phi, phi}"))


def _multi_element_seed() -> CaseResult:
    rules = build("maxpower [d]phi = 2;", "maxpower psi = 2;")
    seeds = parse_expr(rules, "{[d]phi^2, psi} + {[d]phi, psi^2}")
    for m in seeds:
        if not vanishes(rules, m):
            return CaseResult("multi-element-seed", False, f"seed {m} does not vanish")
    got = differentiate(rules, "d", seeds)
    return _expect("multi-element-seed", got, parse_expr(rules, "2*{[d^2]phi, [d]phi, psi} + 2*{[d]phi, [d]psi, psi}"))


def _condition_saturation() -> CaseResult:
    rules = parse_spec(HEADER + """
        atom gamma n [-1, 0] m [1, 0];
        maxpower phi = 2;
        maxorder d on phi = 1;
        condition [d]gamma = {phi^2};
    """)
    rels = saturate_conditions(rules, 1, ("d",))
    want = parse_expr(rules, "{[d^2]gamma}")
    if [r.expression for r in rels] != [want] or not rels[0].coherent:
        return CaseResult("condition-saturation", False, f"relations {[str(r) for r in rels]}")
    return CaseResult("condition-saturation", True)


IDENTITY_CASES: tuple[tuple[str, Callable[[], CaseResult]], ...] = (
    ("transfer", _transfer),
    ("transfer-mixed", _transfer_mixed),
    ("power-seed", _power_seed),
    ("power-seed-depth2", _power_seed_depth2),
    ("order-power-seed", _order_power_seed),
    ("multi-element-seed", _multi_element_seed),
    ("condition-saturation", _condition_saturation),
)


# --- randomized material -------------------------------------------------

_SCALARS = ("0", "1", "-1", "2", "1/2", "-3/2", "(0+1i)", "(1-1i)")


def random_word(rng: random.Random, labels, max_len: int, max_order: int) -> list[tuple[str, int]]:
    word = []
    for _ in range(rng.randint(0, max_len)):
        choices = [l for l in labels if not word or word[-1][0] != l]
        if not choices:
            break
        word.append((rng.choice(choices), rng.randint(1, max_order)))
    return word


def _word_text(word) -> str:
    if not word:
        return ""
    return "[" + " ".join(l if r == 1 else f"{l}^{r}" for l, r in word) + "]"


def random_spec_text(rng: random.Random) -> str:
    """A random well-formed specification covering every statement kind."""
    slots = rng.randint(1, 3)
    labels = ["d", "e", "f"][: rng.randint(1, 3)]
    atoms = ["phi", "psi", "chi"][: rng.randint(1, 3)]
    lines = [f"slots {slots};"]
    for lab in labels:
        lines.append(f"diff {lab} up {rng.randint(1, slots)} down {rng.randint(1, slots)};")
    for a in atoms:
        n = ", ".join(str(rng.randint(-2, 2)) for _ in range(slots))
        m = ", ".join(str(rng.randint(-2, 2)) for _ in range(slots))
        lines.append(f"atom {a} n [{n}] m [{m}];")
    if len(labels) > 1 and rng.random() < 0.5:
        order = labels[:]
        rng.shuffle(order)
        lines.append("order " + " ".join(order) + ";")

    def pattern() -> str:
        atom = rng.choice(atoms + ["*"])
        roll = rng.random()
        if roll < 0.2:
            return f"[*]{atom}"
        return _word_text(random_word(rng, labels, 1, 2)) + atom if atom != "*" else "[*]*"

    used = set()
    for _ in range(rng.randint(0, 3)):
        lab, p = rng.choice(labels), pattern()
        if (lab, p) not in used:
            used.add((lab, p))
            lines.append(f"maxorder {lab} on {p} = {rng.randint(1, 3)};")
    used = set()
    for _ in range(rng.randint(0, 3)):
        p = pattern()
        if p not in used:
            used.add(p)
            lines.append(f"maxpower {p} = {rng.randint(1, 4)};")
    for _ in range(rng.randint(0, 2)):
        members = []
        for _ in range(rng.randint(2, 3)):
            k = rng.randint(1, 2)
            members.append(pattern() + (f"^{k}" if k > 1 else ""))
        lines.append("ideal { " + ", ".join(members) + " };")
    pairs = [(a, b) for a in labels for b in labels if a < b]
    for a, b in pairs:
        if rng.random() < 0.5:
            if rng.random() < 0.5:
                a, b = b, a
            lines.append(f"commute {a} {b} = {rng.choice(_SCALARS)};")
    # random choices can collide (e.g. two ideals with equal content); drop
    # the offending statement until the text is accepted
    while True:
        text = "\n".join(lines) + "\n"
        try:
            parse_spec(text)
            return text
        except SemanticError as exc:
            del lines[exc.line - 1]


def random_monomial(rng: random.Random, rules: RuleSet, max_distinct: int = 4,
                    max_mult: int = 3, max_len: int = 2, max_order: int = 2) -> Monomial:
    counts: dict[Factor, int] = {}
    for _ in range(rng.randint(1, max_distinct)):
        w = random_word(rng, rules.label_names, max_len, max_order)
        f = Factor(rng.choice(rules.atom_names), OperatorWord(tuple(w)))
        counts[f] = rng.randint(1, max_mult)
    coeff = Fraction(rng.randint(-5, 5) or 1, rng.randint(1, 4))
    return Monomial.of(counts, coeff)


# four distinct factors of multiplicity three need twelve slots
ORACLE_CAP = 12


def oracle_mismatches(n: int, seed: int = 0) -> list[str]:
    """Compare multiset differentiation with the positional oracle on random inputs."""
    rng = random.Random(seed)
    bad = []
    for _ in range(n):
        rules = parse_spec(random_spec_text(rng))
        m = random_monomial(rng, rules)
        order = list(range(m.size))
        rng.shuffle(order)
        placed = arrange(m, order, cap=ORACLE_CAP)
        for lab in rules.label_names:
            fast = differentiate(rules, lab, m)
            slow = collapse(rules, positional_expand(rules, lab, placed))
            if fast != slow:
                bad.append(f"d_{lab} {m}: engine {fast} vs oracle {slow}")
    return bad


def random_vanishing_seed(rng: random.Random, rules: RuleSet) -> Monomial | None:
    """A random monomial forced to vanish by padding it up to a declared bound."""
    for _ in range(20):
        m = random_monomial(rng, rules, max_distinct=3)
        if vanishes(rules, m):
            return m
        f, _ = rng.choice(m.factors)
        bump = dict(m.factors)
        bump[f] = 5
        m2 = Monomial.of(bump, m.coeff)
        if vanishes(rules, m2):
            return m2
    return None


def index_violations(n: int, seed: int = 0) -> tuple[int, list[str]]:
    """(identities checked, incoherent ones) over random vanishing seeds."""
    rng = random.Random(seed)
    checked, bad = 0, []
    while checked < n:
        text = random_spec_text(rng)
        if "maxpower [*]* =" not in text:
            text += "maxpower [*]* = 5;\n"
        rules = parse_spec(text)
        seedm = random_vanishing_seed(rng, rules)
        if seedm is None:
            continue
        lab = rng.choice(rules.label_names)
        ident = derive_identity(rules, lab, seedm)
        if ident is None:
            continue
        checked += 1
        indices = {multi_index(rules, m) for m in ident.expression}
        if len(indices) != 1 or not ident.coherent:
            bad.append(str(ident))
    return checked, bad


def _oracle_case(n: int, seed: int) -> CaseResult:
    bad = oracle_mismatches(n, seed)
    return CaseResult("oracle-equivalence", not bad, bad[0] if bad else "")


def run_suite(oracle_samples: int = 200, seed: int = 0) -> list[CaseResult]:
    out = []
    jobs = [(tag, fn) for tag, fn in IDENTITY_CASES]
    jobs += [(c.tag, c.run) for c in CLOSURE_CASES]
    jobs.append(("oracle-equivalence", lambda: _oracle_case(oracle_samples, seed)))
    for tag, fn in jobs:
        t0 = time.perf_counter()
        try:
            r = fn()
        except Exception as exc:  # a crash is a failed case, named by its tag
            r = CaseResult(tag, False, f"{type(exc).__name__}: {exc}")
        out.append(CaseResult(r.tag, r.passed, r.detail, time.perf_counter() - t0))
    return out
