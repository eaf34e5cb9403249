"""Benchmark runs and space accounting.

Text and operation streams are generated from a seed with Python's
Mersenne Twister (random.Random), so two runs with identical parameters
produce identical reports apart from measured timings.  Reports are flat
JSON-able dictionaries (see docs/report_format.md).
"""

from __future__ import annotations

import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from random import Random

from .document import Document
from .errors import ThresholdOutOfRange
from .oracle import entropy

THREAD_ENV_VAR = "MAJMIN_BENCH_THREADS"
RNG_NAME = "mt19937"
MAX_ENTROPY_ORDER = 3


# ----------------------------------------------------------------------
# deterministic text generation

def parse_distribution(spec):
    """'uniform', 'zipf:S' / 'zipf(S)', or 'runs:P' / 'runs(P)'."""
    spec = spec.strip().lower()
    name, _, arg = spec.replace("(", ":").rstrip(")").partition(":")
    if name == "uniform":
        if arg:
            raise ValueError("uniform takes no parameter")
        return ("uniform", None)
    if name == "zipf":
        s = float(arg or 1.0)
        if s < 0:
            raise ValueError(f"zipf exponent {s} must be >= 0")
        return ("zipf", s)
    if name == "runs":
        p = float(arg or 0.9)
        if not 0 <= p < 1:
            raise ValueError(f"run probability {p} not in [0,1)")
        return ("runs", p)
    raise ValueError(f"unknown distribution {spec!r}")


def generate_text(n, sigma, dist, rng: Random):
    kind, arg = dist
    symbols = range(1, sigma + 1)
    if kind == "uniform":
        return [rng.randint(1, sigma) for _ in range(n)]
    if kind == "zipf":
        weights = [1.0 / (i ** arg) for i in range(1, sigma + 1)]
        return rng.choices(list(symbols), weights=weights, k=n)
    out = []
    for _ in range(n):
        if out and rng.random() < arg:
            out.append(out[-1])
        else:
            out.append(rng.randint(1, sigma))
    return out


# ----------------------------------------------------------------------
# space accounting

def space_report(doc: Document):
    n, sigma = doc.n, doc.sigma
    seq_bits = doc.seq.payload_bits()
    aux = dict(doc.majority.aux_bits())
    aux["pieces"] = doc.minority.P.payload_bits() + doc.minority.C.payload_bits()
    aux_total = sum(aux.values())
    report = {
        "n": n,
        "sigma": sigma,
        "seq_bits": seq_bits,
        "aux_bits": aux,
        "aux_bits_total": aux_total,
        "entropy": {},
        "ratios": {},
    }
    arr = doc.to_array().tolist()
    for k in range(MAX_ENTROPY_ORDER + 1):
        if n > k:
            report["entropy"][f"h{k}"] = entropy(arr, k)
    if n:
        lg_sigma = math.log2(sigma) if sigma > 1 else 1.0
        report["ratios"]["aux_per_n_lg_sigma"] = aux_total / (n * lg_sigma)
        h0 = report["entropy"].get("h0")
        if h0:
            report["ratios"]["seq_per_n_h0"] = seq_bits / (n * h0)
    return report


# ----------------------------------------------------------------------
# benchmark

def _beta_ladder(alpha):
    betas = []
    b = Fraction(alpha)
    while b < 1:
        betas.append(b)
        b *= 2
    return betas or [Fraction(alpha)]


def _summary(samples):
    return {
        "count": len(samples),
        "mean_us": statistics.fmean(samples) * 1e6 if samples else 0.0,
        "median_us": statistics.median(samples) * 1e6 if samples else 0.0,
    }


def bench(n, sigma, alpha, ops, seed, dist="uniform"):
    """Run a deterministic synthetic workload; returns the report dict."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if sigma < 1:
        raise ValueError(f"sigma must be >= 1, got {sigma}")
    if ops < 0:
        raise ValueError(f"ops must be >= 0, got {ops}")
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ThresholdOutOfRange(f"threshold {alpha} not in (0,1)")
    dist = parse_distribution(dist) if isinstance(dist, str) else dist
    rng = Random(seed)
    text = generate_text(n, sigma, dist, rng)
    build_start = time.perf_counter()
    doc = Document(text, alpha, sigma)
    build_seconds = time.perf_counter() - build_start
    betas = _beta_ladder(alpha)
    latencies = {"insert": [], "delete": [], "minority": []}
    verifications = {str(b): 0 for b in betas}
    for b in betas:
        latencies[f"majority@{b}"] = []
    queries_allowed = n >= 2
    for _ in range(ops):
        cur = doc.n
        roll = rng.random()
        if not queries_allowed or cur == 0 or roll < 0.2:
            i = rng.randint(1, cur + 1)
            c = rng.randint(1, sigma)
            t0 = time.perf_counter()
            doc.insert(c, i)
            latencies["insert"].append(time.perf_counter() - t0)
        elif roll < 0.4:
            i = rng.randint(1, cur)
            t0 = time.perf_counter()
            doc.delete(i)
            latencies["delete"].append(time.perf_counter() - t0)
        elif roll < 0.55:
            l = rng.randint(1, cur)
            r = rng.randint(l, cur)
            t0 = time.perf_counter()
            doc.query_minority(l, r)
            latencies["minority"].append(time.perf_counter() - t0)
        else:
            beta = betas[rng.randrange(len(betas))]
            l = rng.randint(1, cur)
            r = rng.randint(l, cur)
            before = doc.majority.stats["verify_pairs"]
            t0 = time.perf_counter()
            doc.query_majority(l, r, beta)
            latencies[f"majority@{beta}"].append(time.perf_counter() - t0)
            verifications[str(beta)] += (
                doc.majority.stats["verify_pairs"] - before)
    return {
        "params": {
            "n": n,
            "sigma": sigma,
            "alpha": str(alpha),
            "ops": ops,
            "seed": seed,
            "dist": f"{dist[0]}" if dist[1] is None else f"{dist[0]}:{dist[1]}",
            "rng": RNG_NAME,
        },
        "build_seconds": build_seconds,
        "latency": {cls: _summary(vals) for cls, vals in latencies.items()},
        "verifications": verifications,
        "space": space_report(doc),
    }


def strip_timings(report):
    """Copy of a report with measured durations removed, for replay
    comparison (everything else is deterministic in the seed)."""
    out = {k: v for k, v in report.items() if k != "build_seconds"}
    out["latency"] = {
        cls: {"count": summ["count"]}
        for cls, summ in report["latency"].items()
    }
    return out


def bench_many(configs):
    """Run several bench configurations, sharded across threads; the
    MAJMIN_BENCH_THREADS environment variable caps the worker count."""
    cap = os.environ.get(THREAD_ENV_VAR)
    workers = max(1, int(cap)) if cap else min(len(configs) or 1,
                                               os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda kw: bench(**kw), configs))
