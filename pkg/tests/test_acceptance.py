"""Acceptance suite: one test per acceptance criterion.

Each test prints a single summary line of the form
    [PASS] criterion N: ...
before asserting its property, so the verdicts are readable from the run
log.  Criteria 1-4 share one randomized scenario pass (the oracle runs,
periodic audits, and stop-rule instrumentation are gathered together);
criteria 6 and 7 share the large-text builds.
"""

import math
import random
import statistics
import time
from collections import Counter
from fractions import Fraction

import pytest

from majmin.bench import generate_text, space_report
from majmin.document import Document
from majmin.gamma import (
    GammaStream,
    encode_chunks,
    gamma_decode,
    gamma_encode,
    gamma_encode_str,
    quantized_frequency,
    scan_chunks,
)
from majmin.majority import MajorityIndex
from majmin.minority import MinorityIndex
from majmin.oracle import brute_majorities, brute_minority
from majmin.static import StaticMajorityIndex, StaticMinorityIndex


def report(num, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")


# ======================================================================
# shared scenario pass for criteria 1-4

N_SCENARIOS = 1008
SIGMAS = [2, 4, 26, 256]
ALPHAS = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 16)]
SIZES = [0, 64, 128, 256, 512, 1024, 2048, 4096]
SIZE_WEIGHTS = [8, 20, 22, 20, 14, 8, 5, 3]
MAX_N = 4096
UPDATES_PER_SCENARIO = 2000


def _random_beta(rng, alpha):
    lo = math.ceil(alpha * 256)
    return Fraction(rng.randint(lo, 255), 256)


def _run_scenario(seed, sigma, alpha, agg):
    rng = random.Random(seed)
    n0 = rng.choices(SIZES, SIZE_WEIGHTS)[0]
    arr = [rng.randint(1, sigma) for _ in range(n0)]
    doc = Document(arr, alpha, sigma, safety_checks=True)
    ops = 0

    def maybe_audit():
        if ops % 100 == 0:
            agg["audits"] += 1
            try:
                doc.audit()
            except AssertionError as exc:
                agg["audit_failures"].append(
                    f"seed={seed} op={ops}: {exc}")

    for _ in range(UPDATES_PER_SCENARIO):
        n = len(arr)
        if n <= 1 or (n < MAX_N and rng.random() < 0.5):
            i = rng.randint(1, n + 1)
            c = rng.randint(1, sigma)
            arr.insert(i - 1, c)
            doc.insert(c, i)
        else:
            i = rng.randint(1, n)
            assert doc.delete(i) == arr.pop(i - 1)
        agg["updates"] += 1
        ops += 1
        maybe_audit()

        l = rng.randint(1, len(arr))
        r = rng.randint(l, len(arr))
        beta = _random_beta(rng, alpha)
        got_maj = doc.query_majority(l, r, beta)
        got_min = doc.query_minority(l, r)
        window = r - l + 1
        counts = Counter(arr[l - 1 : r])
        expect_maj = {s for s, c in counts.items() if c > beta * window}
        minority_set = {s for s, c in counts.items() if c <= alpha * window}
        agg["maj_queries"] += 1
        agg["maj_agree"] += got_maj == expect_maj
        agg["min_queries"] += 1
        agg["min_agree"] += (
            (got_min in minority_set) if minority_set else (got_min is None))
        ops += 1
        maybe_audit()

    agg["stop_events"] += doc.majority.stats["stop_events"]
    agg["safety_recounts"] += doc.majority.stats["safety_recounts"]
    agg["stop_violations"].extend(doc.majority.stop_rule_violations)


@pytest.fixture(scope="module")
def scenario_pass():
    agg = {
        "maj_queries": 0, "maj_agree": 0,
        "min_queries": 0, "min_agree": 0,
        "updates": 0, "audits": 0, "audit_failures": [],
        "stop_events": 0, "safety_recounts": 0, "stop_violations": [],
    }
    t0 = time.perf_counter()
    for s in range(N_SCENARIOS):
        sigma = SIGMAS[s % len(SIGMAS)]
        alpha = ALPHAS[(s // len(SIGMAS)) % len(ALPHAS)]
        _run_scenario(900_000 + s, sigma, alpha, agg)
    agg["elapsed"] = time.perf_counter() - t0
    agg["scenarios"] = N_SCENARIOS
    return agg


def test_criterion_01_majority_oracle_equivalence(scenario_pass):
    a = scenario_pass
    ok = (a["scenarios"] >= 1000
          and a["maj_queries"] >= 2000 * 1000
          and a["maj_agree"] == a["maj_queries"])
    report(1, ok,
           f"majority oracle equivalence {a['maj_agree']}/{a['maj_queries']} "
           f"over {a['scenarios']} scenarios, {a['updates']} updates, "
           f"{a['elapsed']:.0f}s elapsed (target 300s)")
    assert ok


def test_criterion_02_minority_oracle_equivalence(scenario_pass):
    a = scenario_pass
    ok = (a["min_queries"] >= 2000 * 1000
          and a["min_agree"] == a["min_queries"])
    report(2, ok,
           f"minority oracle equivalence {a['min_agree']}/{a['min_queries']}")
    assert ok


def test_criterion_03_invariant_audits(scenario_pass):
    a = scenario_pass
    ok = a["audits"] >= 10_000 and not a["audit_failures"]
    report(3, ok,
           f"{a['audits']} full audits, "
           f"{len(a['audit_failures'])} violations")
    assert ok, a["audit_failures"][:5]


def test_criterion_04_stop_rule_safety(scenario_pass):
    a = scenario_pass
    ok = (a["safety_recounts"] > 0 and a["stop_events"] > 0
          and not a["stop_violations"])
    report(4, ok,
           f"{a['stop_events']} stop events, {a['safety_recounts']} skipped "
           f"candidates recounted, {len(a['stop_violations'])} violations")
    assert ok, a["stop_violations"][:5]


# ======================================================================
# criterion 5: verification work shrinks as beta grows

def test_criterion_05_beta_scaling():
    n = 1 << 18
    rng = random.Random(5005)
    arr = [rng.randint(1, 26) for _ in range(n)]
    idx = MajorityIndex.build(arr, Fraction(1, 16), 26)
    betas = [Fraction(1, 16), Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)]
    means = {}
    for beta in betas:
        before = idx.stats["verify_pairs"]
        for _ in range(10_000):
            l = rng.randint(1, n)
            r = rng.randint(l, n)
            idx.query(l, r, beta)
        means[beta] = (idx.stats["verify_pairs"] - before) / 10_000
    ordered = [means[b] for b in betas]
    ok = (all(a >= b for a, b in zip(ordered, ordered[1:]))
          and means[Fraction(1, 2)] <= 0.75 * means[Fraction(1, 16)])
    report(5, ok, "mean verifications per query "
           + ", ".join(f"beta={b}: {means[b]:.2f}" for b in betas))
    assert ok


# ======================================================================
# criteria 6 and 7: latency growth and space trend over n

GROWTH_EXPONENTS = (14, 17, 20)


@pytest.fixture(scope="module")
def growth_runs():
    results = {}
    for nexp in GROWTH_EXPONENTS:
        n = 1 << nexp
        rng = random.Random(6000 + nexp)
        arr = [rng.randint(1, 26) for _ in range(n)]
        idx = MajorityIndex.build(arr, Fraction(1, 8), 26)
        aux = sum(idx.aux_bits().values())
        query_times = []
        betas = [Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)]
        for k in range(1200):
            l = rng.randint(1, idx.n)
            r = rng.randint(l, idx.n)
            beta = betas[k % 3]
            t0 = time.perf_counter()
            idx.query(l, r, beta)
            query_times.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        for k in range(1200):
            if k % 2 == 0:
                idx.insert(rng.randint(1, 26), rng.randint(1, idx.n + 1))
            else:
                idx.delete(rng.randint(1, idx.n))
        update_total = time.perf_counter() - t0
        results[nexp] = {
            "query_median_us": statistics.median(query_times) * 1e6,
            "update_amortized_us": update_total / 1200 * 1e6,
            "aux_ratio": aux / (n * math.log2(26)),
        }
    return results


def test_criterion_06_latency_growth(growth_runs):
    rows = [growth_runs[e] for e in GROWTH_EXPONENTS]
    ok = True
    for prev, cur in zip(rows, rows[1:]):
        ok &= cur["query_median_us"] <= 2.5 * prev["query_median_us"]
        ok &= cur["update_amortized_us"] <= 2.5 * prev["update_amortized_us"]
    report(6, ok, "; ".join(
        f"n=2^{e}: query median {growth_runs[e]['query_median_us']:.0f}us, "
        f"update amortized {growth_runs[e]['update_amortized_us']:.0f}us"
        for e in GROWTH_EXPONENTS))
    assert ok


def test_criterion_07_space_trend(growth_runs):
    ratios = [growth_runs[e]["aux_ratio"] for e in GROWTH_EXPONENTS]
    # informational: sequence bits against n*H0 per text class
    info = []
    for dist, label in [(("uniform", None), "uniform"),
                        (("zipf", 1.2), "zipf"), (None, "constant")]:
        n = 1 << 14
        if dist is None:
            text = [7] * n
        else:
            text = generate_text(n, 26, dist, random.Random(7007))
        doc = Document(text, Fraction(1, 8), 26)
        sp = space_report(doc)
        ratio = sp["ratios"].get("seq_per_n_h0")
        info.append(f"{label}: seq/nH0="
                    + (f"{ratio:.3f}" if ratio else "n/a (H0=0)"))
    ok = all(a > b for a, b in zip(ratios, ratios[1:]))
    report(7, ok,
           "aux/(n lg sigma) " + ", ".join(
               f"2^{e}: {r:.4f}" for e, r in zip(GROWTH_EXPONENTS, ratios))
           + " | " + "; ".join(info))
    # The derived block parameters are identical at 2^17 and 2^20 (same
    # size class), so the modeled per-symbol auxiliary space is flat on
    # that step; the strict-decrease assertion documents the shortfall.
    assert ok


# ======================================================================
# criterion 8: minority repartition bookkeeping

def test_criterion_08_minority_amortization():
    rng = random.Random(8008)
    sigma, alpha, updates = 26, Fraction(1, 4), 100_000
    arr = [rng.randint(1, sigma) for _ in range(20_000)]
    idx = MinorityIndex.build(arr, alpha, sigma)
    phi0 = idx.phi()
    for _ in range(updates):
        n = idx.n
        if n == 0 or rng.random() < 0.5:
            idx.insert(rng.randint(1, sigma), rng.randint(1, n + 1))
        else:
            idx.delete(rng.randint(1, n))
    idx.audit()
    produced = idx.stats["pieces_produced"]
    bound = (phi0 + updates) / idx.A + idx.piece_count
    ok = produced <= bound
    report(8, ok, f"pieces produced {produced} <= bound {bound:.1f} "
           f"(phi0={phi0}, final pieces={idx.piece_count})")
    assert ok


# ======================================================================
# criterion 9: gamma code and chunk stream conformance

def test_criterion_09_gamma_roundtrip_and_vectors():
    batch = 2048
    value = 0
    top = 1 << 20
    while value <= top:
        hi = min(value + batch, top + 1)
        st = GammaStream()
        for x in range(value, hi):
            gamma_encode(st, x)
        for x in range(value, hi):
            assert gamma_decode(st) == x
        assert st.at_end()
        value = hi

    rng = random.Random(9009)
    for _ in range(10_000):
        window = rng.randint(1, 4096)
        min_freq = Fraction(1, 1 << rng.randint(0, 6))
        floor = math.ceil(min_freq * window)
        cands = {}
        for _ in range(rng.randint(0, 20)):
            cands[rng.randint(1, 500)] = rng.randint(floor, window)
        cc = encode_chunks(sorted(cands.items()), window, min_freq)
        seen = {}
        last_q = 0
        prev_sym = 0
        for q, sym in scan_chunks(cc):
            if q != last_q:
                last_q, prev_sym = q, 0
            assert sym > prev_sym  # ascending within a chunk
            prev_sym = sym
            seen[sym] = q
        assert seen.keys() == cands.keys()
        for sym, q in seen.items():
            assert q == quantized_frequency(window, cands[sym])

    # hand vectors against the documented stream format
    assert gamma_encode_str(0) == "1"
    assert gamma_encode_str(1) == "010"
    assert gamma_encode_str(4) == "00101"
    empty = encode_chunks([], 8, Fraction(1, 4))
    assert empty.stream.to_bitstring() == "111"  # three empty chunks
    one = encode_chunks([(3, 8)], 8, Fraction(1, 2))
    assert one.stream.to_bitstring() == "0010011"
    two = encode_chunks([(2, 8), (5, 3)], 8, Fraction(1, 4))
    # chunk q=0: sym 2 (code of 2 then terminator); q=1: empty; q=2: sym 5
    assert two.stream.to_bitstring() == "011" + "1" + "1" + "00110" + "1"
    report(9, True, "exhaustive roundtrip 0..2^20, 10^4 chunk lists, "
           "3 hand vectors bit-exact")


# ======================================================================
# criterion 10: static/dynamic/oracle agreement per text class

def test_criterion_10_static_dynamic_agreement():
    n = 1 << 14
    sigma = 26
    fixed_alpha = Fraction(1, 4)
    classes = {
        "uniform": generate_text(n, sigma, ("uniform", None),
                                 random.Random(1010)),
        "zipf": generate_text(n, sigma, ("zipf", 1.2), random.Random(1011)),
        "constant": [7] * n,
    }
    details = []
    ok = True
    for label, text in classes.items():
        dyn_maj = MajorityIndex.build(text, Fraction(1, sigma), sigma)
        dyn_min = MinorityIndex.build(text, fixed_alpha, sigma)
        frz_maj = StaticMajorityIndex.freeze(text, sigma)
        frz_min = StaticMinorityIndex.freeze(text, fixed_alpha, sigma)
        rng = random.Random(hash(label) & 0xFFFF)
        agree = 0
        triples = 10_000
        for _ in range(triples):
            l = rng.randint(1, n)
            r = rng.randint(l, n)
            alpha = Fraction(rng.randint(1, 255), 256)
            expect = brute_majorities(text, l, r, alpha)
            same = (dyn_maj.query(l, r, alpha) == expect
                    and frz_maj.query(l, r, alpha) == expect)
            mset = brute_minority(text, l, r, fixed_alpha)
            for got in (dyn_min.query(l, r), frz_min.query(l, r)):
                same &= (got in mset) if mset else (got is None)
            agree += same
        ok &= agree == triples
        details.append(f"{label}: {agree}/{triples}")
    report(10, ok, "static/dynamic/oracle agreement " + ", ".join(details))
    assert ok
