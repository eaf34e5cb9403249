"""Workload parsing/execution, benchmark determinism, space reports."""

import json
import random
from fractions import Fraction

import pytest

from majmin.bench import (
    bench,
    bench_many,
    generate_text,
    parse_distribution,
    space_report,
    strip_timings,
)
from majmin.document import Document
from majmin.oracle import brute_majorities, brute_minority
from majmin.workload import (
    EXIT_BAD_OP,
    EXIT_IO,
    EXIT_OK,
    WorkloadError,
    parse_symbol,
    parse_workload,
    render_symbol,
    run_ops,
    run_workload_files,
    text_to_symbols,
)


def chars(s):
    return [ord(c) - ord("a") + 1 for c in s]


# ----------------------------------------------------------------------
# document facade

def test_document_shares_one_sequence():
    doc = Document(chars("aabbbab"), Fraction(1, 3), sigma=2)
    assert doc.majority.seq is doc.seq and doc.minority.seq is doc.seq
    doc.insert(1, 3)
    assert doc.n == 8
    assert doc.query_majority(1, 8, Fraction(1, 2)) == set()
    assert doc.query_minority(1, 3) in (None, 1, 2)
    assert doc.delete(3) == 1
    doc.audit()


def test_document_random_ops_against_oracles():
    rng = random.Random(17)
    arr = [rng.randint(1, 6) for _ in range(800)]
    doc = Document(arr, Fraction(1, 4), sigma=6)
    for _ in range(300):
        n = len(arr)
        if n == 0 or rng.random() < 0.5:
            i = rng.randint(1, n + 1)
            c = rng.randint(1, 6)
            arr.insert(i - 1, c)
            doc.insert(c, i)
        else:
            i = rng.randint(1, n)
            assert doc.delete(i) == arr.pop(i - 1)
        if arr:
            l = rng.randint(1, len(arr))
            r = rng.randint(l, len(arr))
            assert doc.query_majority(l, r, Fraction(1, 2)) == \
                brute_majorities(arr, l, r, Fraction(1, 2))
            got = doc.query_minority(l, r)
            valid = brute_minority(arr, l, r, Fraction(1, 4))
            assert (got in valid) if valid else (got is None)
    doc.audit()


# ----------------------------------------------------------------------
# workload format

def test_parse_workload_ops_and_comments():
    ops = parse_workload([
        "# header\n", "\n", "Q 1 7 0.5\n", "M 1 4  # trailing\n",
        "I 2 b\n", "I 2 98\n", "D 1\n",
    ])
    assert [op.kind for op in ops] == ["Q", "M", "I", "I", "D"]
    assert ops[0].args == (1, 7, Fraction(1, 2))
    assert ops[2].args == (2, ord("b") + 1)
    assert ops[3].args == (2, 98)


@pytest.mark.parametrize("line", ["Q 1", "Z 1 2", "Q a b 0.5", "I 1 ab",
                                  "Q 1 2 x", "D"])
def test_parse_workload_rejects_malformed(line):
    with pytest.raises(WorkloadError) as err:
        parse_workload(["# ok\n", line + "\n"])
    assert err.value.line_no == 2


def test_symbol_round_trip():
    for token in "azAZ~!":
        assert render_symbol(parse_symbol(token)) == token
    assert parse_symbol("300") == 300
    assert render_symbol(1) == "1"  # unprintable codes stay numeric


def test_run_ops_results_and_state_errors():
    symbols, sigma = _text("aabbbab")
    doc = Document(symbols, Fraction(1, 2), sigma)
    lines, timings = run_ops(doc, parse_workload(
        ["Q 1 7 0.5\n", "I 8 a\n", "Q 1 8 0.5\n", "D 8\n", "M 1 7\n"]))
    assert lines == ["Q 1 7 0.5 -> b", "Q 1 8 0.5 -> -", "M 1 7 -> a"]
    assert set(timings) == {"Q", "I", "D", "M"}
    with pytest.raises(WorkloadError) as err:
        run_ops(doc, parse_workload(["D 99\n"]))
    assert err.value.line_no == 1


def _text(s):
    symbols, sigma = text_to_symbols(s.encode())
    return symbols, sigma


def test_run_workload_files_exit_codes(tmp_path):
    text = tmp_path / "text.txt"
    text.write_bytes(b"aabbbab")
    good = tmp_path / "good.txt"
    good.write_text("Q 1 7 0.5\nM 1 4\n")
    report = tmp_path / "report.json"
    out_lines = []

    class Sink:
        def write(self, s):
            out_lines.append(s)

    assert run_workload_files(text, "1/2", good, report, out=Sink()) == EXIT_OK
    assert "Q 1 7 0.5 -> b" in "".join(out_lines)
    data = json.loads(report.read_text())
    assert data["space"]["n"] == 7
    assert data["timings"]["Q"]["count"] == 1

    bad = tmp_path / "bad.txt"
    bad.write_text("Q 1\n")
    assert run_workload_files(text, "1/2", bad, out=Sink()) == EXIT_BAD_OP
    missing = tmp_path / "nope.txt"
    assert run_workload_files(missing, "1/2", good, out=Sink()) == EXIT_IO
    assert run_workload_files(text, "7/2", good, out=Sink()) == EXIT_IO


# ----------------------------------------------------------------------
# bench

def test_parse_distribution():
    assert parse_distribution("uniform") == ("uniform", None)
    assert parse_distribution("zipf:1.5") == ("zipf", 1.5)
    assert parse_distribution("zipf(1.5)") == ("zipf", 1.5)
    assert parse_distribution("runs:0.9") == ("runs", 0.9)
    with pytest.raises(ValueError):
        parse_distribution("pareto")
    with pytest.raises(ValueError):
        parse_distribution("runs:1.5")


def test_generate_text_shapes():
    rng = random.Random(0)
    uni = generate_text(2000, 4, ("uniform", None), rng)
    assert set(uni) == {1, 2, 3, 4}
    zipf = generate_text(2000, 8, ("zipf", 1.5), random.Random(0))
    assert zipf.count(1) > zipf.count(8)  # skew toward low symbols
    runs = generate_text(2000, 8, ("runs", 0.95), random.Random(0))
    repeats = sum(a == b for a, b in zip(runs, runs[1:]))
    assert repeats > 1500


def test_bench_deterministic_reports():
    kw = dict(n=1500, sigma=26, alpha=Fraction(1, 8), ops=400, seed=9)
    r1, r2 = bench(**kw), bench(**kw)
    assert json.dumps(strip_timings(r1), sort_keys=True) == \
        json.dumps(strip_timings(r2), sort_keys=True)
    assert r1["params"]["rng"] == "mt19937"
    # smaller thresholds require more candidate verifications
    assert r1["verifications"]["1/2"] < r1["verifications"]["1/8"]


def test_bench_degenerate_n1():
    report = bench(1, 4, Fraction(1, 2), 30, 3)
    queries = [cls for cls, s in report["latency"].items()
               if s["count"] and cls not in ("insert", "delete")]
    assert queries == []  # no query classes run on a single-symbol text


def test_bench_validation():
    with pytest.raises(ValueError):
        bench(0, 4, Fraction(1, 2), 10, 1)
    with pytest.raises(ValueError):
        bench(10, 4, Fraction(1, 2), 10, 1, "nope")


def test_bench_many_respects_thread_cap(monkeypatch):
    monkeypatch.setenv("MAJMIN_BENCH_THREADS", "1")
    reports = bench_many([
        dict(n=100, sigma=4, alpha=Fraction(1, 2), ops=30, seed=s)
        for s in (1, 2)
    ])
    assert [r["params"]["seed"] for r in reports] == [1, 2]


def test_space_report_totals_consistent():
    doc = Document([1 + i % 7 for i in range(3000)], Fraction(1, 4), sigma=7)
    report = space_report(doc)
    assert report["aux_bits_total"] == sum(report["aux_bits"].values())
    assert report["seq_bits"] > 0
    assert set(report["entropy"]) == {"h0", "h1", "h2", "h3"}
    assert report["ratios"]["seq_per_n_h0"] > 0
