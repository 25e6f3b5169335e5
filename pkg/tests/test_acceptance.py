"""Acceptance criteria, one test each.

Every test prints a single PASS/FAIL line (shown even under output capture)
with the measured time against its budget.
"""
import io
import json
import random
import time

import pytest

from mcde.calculus import derive_identity, hierarchy
from mcde.cli import read_catalog, run
from mcde.errors import DSLError
from mcde.search import SearchBounds
from mcde.specdsl import parse_expr, parse_monomial, parse_spec, render_spec
from mcde.suite import CLOSURE_CASES, build, index_violations, oracle_mismatches, random_spec_text
from mcde.terms import Factor, factor

from oracles import brute_candidates, oracle_closed

SATURATED_SPEC = """\
slots 1;
diff d up 1 down 1;
atom phi n [0] m [0];
maxorder d on phi = 2;
maxpower [d]phi = 3;
"""


@pytest.fixture
def report(capsys):
    lines = []

    def emit(number, name, ok, seconds, budget=None, detail=""):
        within = budget is None or seconds < budget
        status = "PASS" if ok and within else "FAIL"
        timing = f"{seconds:.2f}s" + (f" (< {budget}s)" if budget is not None else "")
        extra = f" {detail}" if detail else ""
        lines.append(f"[acceptance {number}] {status} {name}: {timing}{extra}")
        with capsys.disabled():
            print("\n" + lines[-1])
        return ok and within

    return emit


def test_1_transfer_identity(report):
    t0 = time.perf_counter()
    rules = build("ideal { phi, psi };")
    ident = derive_identity(rules, "d", parse_monomial(rules, "{phi, psi}"))
    ok = (ident.expression == parse_expr(rules, "{[d]phi, psi} + {phi, [d]psi}")
          and len(ident.expression) == 2
          and str(ident) == "{[d]phi, psi} + {phi, [d]psi} = 0")
    assert report(1, "transfer identity", ok, time.perf_counter() - t0, 1)


def test_2_power_identities(report):
    t0 = time.perf_counter()
    rules = build("maxpower phi = 3;", "commute e d = 0;")
    seed = parse_monomial(rules, "{phi^3}")
    first = derive_identity(rules, "d", seed)
    ok = first.expression == parse_expr(rules, "3*{[d]phi, phi^2}")

    deep = [i for i in hierarchy(rules, seed, ("d", "e"), 2) if i.applied == ("d", "e")]
    ok = ok and len(deep) == 1 and len(deep[0].expression) == 1
    (m,) = deep[0].expression
    ok = ok and m.coeff == 6 and m.counts() == {
        factor("phi", ("d", 1)): 1, factor("phi", ("e", 1)): 1, Factor("phi"): 1}

    killed = build("maxpower phi = 3;", "commute e d = 0;", "ideal { [d]phi, [e]phi };")
    ok = ok and not [i for i in hierarchy(killed, seed, ("d", "e"), 2) if i.applied == ("d", "e")]
    assert report(2, "power-seed identities", ok, time.perf_counter() - t0, 1)


def test_3_closed_product_suite(report):
    t0 = time.perf_counter()
    results = [c.run() for c in CLOSURE_CASES]
    failed = [f"{r.tag} ({r.detail})" for r in results if not r.passed]
    detail = f"{len(results) - len(failed)}/{len(results)} cases" + (f"; failed: {failed}" if failed else "")
    assert report(3, "closed-product suite with mutation check", not failed, time.perf_counter() - t0, 10, detail)


def test_4_oracle_equivalence(report):
    t0 = time.perf_counter()
    bad = oracle_mismatches(1000, seed=2024)
    assert report(4, "oracle equivalence on 1000 monomials", not bad, time.perf_counter() - t0, 60,
                  f"mismatches={len(bad)}"), bad[:3]


def test_5_index_uniformity(report):
    t0 = time.perf_counter()
    checked, bad = index_violations(1000, seed=2024)
    ok = checked == 1000 and not bad
    assert report(5, "index uniformity of derived identities", ok, time.perf_counter() - t0, None,
                  f"checked={checked} violations={len(bad)}"), bad[:3]


def test_6_bounded_search_recovery(report, tmp_path):
    t0 = time.perf_counter()
    (tmp_path / "s.mc").write_text(SATURATED_SPEC)
    out = tmp_path / "cat.json"
    code = run(["search", "--spec", str(tmp_path / "s.mc"), "--bounds", "factors=2,word=2,order=2,mult=3",
                "--out", str(out)], stdout=io.StringIO(), stderr=io.StringIO())
    rules = parse_spec(SATURATED_SPEC)
    got = {e.monomial for e in read_catalog(out).entries}

    expected = {parse_monomial(rules, t) for t in
                ("{[d]phi}", "{[d]phi^2}", "{[d]phi^2, phi}", "{[d]phi^2, phi^2}", "{[d]phi^2, phi^3}")}
    bounds = SearchBounds(2, 2, 2, 3, ("phi",), ("d",))
    exhaustive = {m for m in brute_candidates(rules, bounds) if oracle_closed(rules, "d", m)}
    ok = code == 0 and got == expected == exhaustive
    assert report(6, "bounded search recovery", ok, time.perf_counter() - t0, 60, f"entries={len(got)}")


def test_7_determinism(report, tmp_path):
    t0 = time.perf_counter()
    spec_text = render_spec(build("maxorder d on [*]* = 2;", "maxpower [*]* = 3;",
                                  "ideal { [d]phi, [d]psi };", "commute e d = 0;"))
    (tmp_path / "s.mc").write_text(spec_text)
    blobs = []
    for i, workers in enumerate((1, 4, 1, 4)):
        out = tmp_path / f"cat{i}.json"
        code = run(["search", "--spec", str(tmp_path / "s.mc"), "--bounds", "factors=2,word=2,order=1,mult=2",
                    "--atoms", "phi,psi", "--workers", str(workers), "--out", str(out)],
                   stdout=io.StringIO(), stderr=io.StringIO())
        assert code == 0
        blobs.append(out.read_bytes())
    entries = len(json.loads(blobs[0])["entries"])
    ok = len(set(blobs)) == 1 and entries > 0
    assert report(7, "byte-identical catalogs across runs and workers {1, 4}", ok, time.perf_counter() - t0,
                  None, f"entries={entries}")


def test_8_dsl_robustness(report):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    round_trip_failures = 0
    for _ in range(500):
        rules = parse_spec(random_spec_text(rng))
        if parse_spec(render_spec(rules)) != rules:
            round_trip_failures += 1
    crashes = []
    alphabet = "{}[]()^*,;=+-/#0123456789 \nabdeiphsu"
    for _ in range(2000):
        text = random_spec_text(rng)
        pos = rng.randrange(len(text) + 1)
        junk = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 4)))
        mutated = text[:pos] + junk + text[pos + rng.randint(0, 3):]
        try:
            parse_spec(mutated)
        except DSLError:
            pass
        except Exception as exc:  # anything else is a parser crash
            crashes.append((mutated, repr(exc)))
    ok = not round_trip_failures and not crashes
    assert report(8, "DSL round trip (500 specs) and fuzzing (2000 inputs)", ok, time.perf_counter() - t0, None,
                  f"round-trip failures={round_trip_failures} crashes={len(crashes)}"), crashes[:3]
