"""Workload files: parsing, execution against a document, result rendering.

One operation per line, space-separated, 1-based positions (see
docs/workload_format.md):

    Q l r beta   range majority query at threshold beta
    M l r        range minority query (threshold fixed at build time)
    I i c        insert symbol c before position i
    D i          delete the symbol at position i

Blank lines and lines starting with '#' are ignored.  A symbol token is
either a single printable non-digit character (its byte value + 1 becomes
the internal code) or a decimal internal code.
"""

from __future__ import annotations

import json
import statistics
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from .document import Document

EXIT_OK = 0
EXIT_IO = 1
EXIT_BAD_OP = 2


class WorkloadError(Exception):
    """A malformed or invalid operation; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Op:
    kind: str  # "Q" | "M" | "I" | "D"
    args: tuple
    line_no: int
    text: str


def parse_symbol(token):
    if token.isdigit():
        code = int(token)
        if code < 1:
            raise ValueError(f"symbol code {code} below 1")
        return code
    if len(token) == 1 and token.isprintable():
        return ord(token) + 1
    raise ValueError(f"bad symbol token {token!r}")


def render_symbol(code):
    ch = chr(code - 1) if 1 <= code <= 0x110000 else None
    if ch is not None and ch.isprintable() and not ch.isdigit() and ch != " ":
        return ch
    return str(code)


def parse_workload(lines):
    ops = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].upper()
        try:
            if kind == "Q" and len(parts) == 4:
                args = (int(parts[1]), int(parts[2]), Fraction(parts[3]))
            elif kind == "M" and len(parts) == 3:
                args = (int(parts[1]), int(parts[2]))
            elif kind == "I" and len(parts) == 3:
                args = (int(parts[1]), parse_symbol(parts[2]))
            elif kind == "D" and len(parts) == 2:
                args = (int(parts[1]),)
            else:
                raise ValueError(f"unrecognized operation {line!r}")
        except (ValueError, ZeroDivisionError) as exc:
            raise WorkloadError(line_no, str(exc)) from exc
        ops.append(Op(kind, args, line_no, line))
    return ops


def text_to_symbols(data: bytes):
    """Raw text bytes to internal codes (byte value + 1); a single trailing
    newline is not part of the sequence."""
    if data.endswith(b"\n"):
        data = data[:-1]
    return [b + 1 for b in data], 256


def run_ops(doc: Document, ops, audit_every=0):
    """Execute ops in order; returns (result lines, per-class timing stats).

    Raises WorkloadError for operations invalid in the current state.
    """
    lines = []
    timings = {}
    executed = 0
    for op in ops:
        t0 = time.perf_counter()
        try:
            if op.kind == "Q":
                l, r, beta = op.args
                got = doc.query_majority(l, r, beta)
                out = ",".join(render_symbol(s) for s in sorted(got)) or "-"
            elif op.kind == "M":
                got = doc.query_minority(*op.args)
                out = "-" if got is None else render_symbol(got)
            elif op.kind == "I":
                i, c = op.args
                if c > doc.sigma:
                    raise ValueError(
                        f"symbol code {c} above alphabet size {doc.sigma}")
                doc.insert(c, i)
                out = None
            else:
                doc.delete(*op.args)
                out = None
        except Exception as exc:
            raise WorkloadError(op.line_no, f"{op.text!r}: {exc}") from exc
        elapsed = time.perf_counter() - t0
        bucket = timings.setdefault(op.kind, [])
        bucket.append(elapsed)
        if out is not None:
            lines.append(f"{op.text} -> {out}")
        executed += 1
        if audit_every and executed % audit_every == 0:
            doc.audit()
    return lines, timings


def run_workload_payload(text_bytes, alpha, workload_lines):
    """Execute a workload over raw text bytes.  Returns a JSON-able dict
    with exit_code (0 ok, 1 bad parameters, 2 invalid op), result lines,
    and a report; never raises for workload-level problems."""
    from .bench import space_report  # deferred: bench imports Document too

    try:
        symbols, sigma = text_to_symbols(text_bytes)
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise ValueError(f"threshold {alpha} not in (0,1)")
    except (ValueError, ZeroDivisionError) as exc:
        return {"exit_code": EXIT_IO, "error": f"bad parameters: {exc}"}
    try:
        ops = parse_workload(workload_lines)
        doc = Document(symbols, alpha, sigma)
        lines, timings = run_ops(doc, ops)
    except WorkloadError as exc:
        return {"exit_code": EXIT_BAD_OP, "error": str(exc)}
    report = {
        "alpha": str(alpha),
        "ops_executed": sum(len(v) for v in timings.values()),
        "timings": {
            kind: {
                "count": len(vals),
                "mean_us": statistics.fmean(vals) * 1e6,
                "median_us": statistics.median(vals) * 1e6,
            }
            for kind, vals in sorted(timings.items())
        },
        "verify_pairs": doc.majority.stats["verify_pairs"],
        "stop_events": doc.majority.stats["stop_events"],
        "space": space_report(doc),
    }
    return {"exit_code": EXIT_OK, "results": lines, "report": report}


def run_workload_files(input_path, alpha, workload_path, report_path=None,
                       out=None, err=None):
    """File-level wrapper around run_workload_payload: prints one result
    line per query, optionally writes the JSON report, returns the exit
    code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        with open(input_path, "rb") as fh:
            text_bytes = fh.read()
        with open(workload_path, "r", encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    outcome = run_workload_payload(text_bytes, alpha, raw_lines)
    if outcome["exit_code"] != EXIT_OK:
        print(f"error: {outcome['error']}", file=err)
        return outcome["exit_code"]
    for line in outcome["results"]:
        print(line, file=out)
    if report_path:
        report = dict(outcome["report"])
        report["input"] = str(input_path)
        report["workload"] = str(workload_path)
        try:
            with open(report_path, "w", encoding="utf-8") as fh:
                json.dump(report, fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_IO
    return EXIT_OK
