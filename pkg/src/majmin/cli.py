"""Command-line interface.

All subcommands except `serve` are thin clients of the HTTP service: with
--url they talk to a running server, otherwise they drive an in-process
application instance over the same request/response schemas.
"""

from __future__ import annotations

import argparse
import base64
import json
import sys

import httpx

from .workload import EXIT_BAD_OP, EXIT_IO, EXIT_OK, render_symbol


class ServiceError(Exception):
    def __init__(self, status, detail):
        super().__init__(f"service error {status}: {detail}")
        self.status = status
        self.detail = detail


class ServiceClient:
    """HTTP client for the service; in-process when no URL is given."""

    def __init__(self, url=None):
        if url:
            self._client = httpx.Client(base_url=url, timeout=600.0)
        else:
            from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())

    def post(self, path, payload):
        response = self._client.post(path, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(response.status_code, detail)
        return response.json()

    def close(self):
        self._client.close()


def _cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def _cmd_run(args):
    try:
        with open(args.input, "rb") as fh:
            text = fh.read()
        with open(args.workload, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    client = ServiceClient(args.url)
    outcome = client.post("/run", {
        "text_b64": base64.b64encode(text).decode("ascii"),
        "alpha": args.alpha,
        "workload_lines": lines,
    })
    client.close()
    if outcome["exit_code"] != EXIT_OK:
        print(f"error: {outcome['error']}", file=sys.stderr)
        return outcome["exit_code"]
    for line in outcome["results"]:
        print(line)
    if args.report:
        report = dict(outcome["report"])
        report["input"] = args.input
        report["workload"] = args.workload
        try:
            with open(args.report, "w", encoding="utf-8") as fh:
                json.dump(report, fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def _cmd_bench(args):
    client = ServiceClient(args.url)
    report = client.post("/bench", {
        "n": args.n, "sigma": args.sigma, "alpha": args.alpha,
        "ops": args.ops, "seed": args.seed, "dist": args.dist,
    })
    client.close()
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_freeze(args):
    try:
        with open(args.input, "rb") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    client = ServiceClient(args.url)
    outcome = client.post("/freeze", {
        "text_b64": base64.b64encode(text).decode("ascii"),
        "alpha": args.alpha,
    })
    client.close()
    try:
        with open(args.out, "wb") as fh:
            fh.write(base64.b64decode(outcome["snapshot_b64"]))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"froze n={outcome['n']} sigma={outcome['sigma']} -> {args.out}")
    return EXIT_OK


def _cmd_query_static(args):
    try:
        with open(args.idx, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    l, r = args.range
    client = ServiceClient(args.url)
    outcome = client.post("/static/query", {
        "snapshot_b64": base64.b64encode(blob).decode("ascii"),
        "l": l, "r": r, "alpha": args.alpha,
    })
    client.close()
    if args.alpha is not None:
        syms = outcome["majorities"]
        print(",".join(render_symbol(s) for s in syms) or "-")
    else:
        got = outcome["minority"]
        print("-" if got is None else render_symbol(got))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="majmin",
        description="range majority/minority indexes over mutable sequences")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("run", help="execute a workload file over a text file")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--workload", required=True)
    p.add_argument("--report")
    p.add_argument("--url")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("bench", help="run a deterministic synthetic benchmark")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--ops", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--out")
    p.add_argument("--url")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("freeze", help="build a static snapshot of a text file")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", default="1/2",
                   help="minority threshold frozen into the snapshot")
    p.add_argument("--out", required=True)
    p.add_argument("--url")
    p.set_defaults(func=_cmd_freeze)

    p = sub.add_parser("query-static", help="query a frozen snapshot")
    p.add_argument("--idx", required=True)
    p.add_argument("--range", nargs=2, type=int, required=True,
                   metavar=("L", "R"))
    p.add_argument("--alpha",
                   help="majority threshold; omit for a minority query")
    p.add_argument("--url")
    p.set_defaults(func=_cmd_query_static)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ServiceError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return EXIT_BAD_OP if exc.status == 400 else EXIT_IO
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
