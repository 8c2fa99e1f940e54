"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 resource limit.

Limits come from built-in defaults, then an optional key=value config
file, then DOMINOGRAPH_<KEY> environment variables, then flags.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import os
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import cstar, domino, graphalg, twograph, words
from .crossed import verify_iso
from .domino import BasicData, SizeLimitExceeded

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3

DEFAULTS = {
    "vertex_limit": str(domino.DEFAULT_VERTEX_LIMIT),
    "path_degree": "3,3",
    "path_limit": str(domino.DEFAULT_PATH_LIMIT),
    "necklace_limit": str(words.DEFAULT_WORK_LIMIT),
    "graph_cap": "",
}
ENV_PREFIX = "DOMINOGRAPH_"


class UsageError(Exception):
    pass


def read_config(path: str) -> Dict[str, str]:
    conf = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (p.strip() for p in line.split("=", 1))
            if key not in DEFAULTS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            conf[key] = value
    return conf


def resolve_settings(args, environ=None) -> Dict[str, str]:
    environ = os.environ if environ is None else environ
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(read_config(args.config))
    for key in DEFAULTS:
        env = environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            settings[key] = env
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = str(value)
    return settings


def _limit(value: str) -> Optional[int]:
    # empty or "none" switches a limit off
    if value.strip().lower() in ("", "none"):
        return None
    try:
        out = int(value)
    except ValueError:
        raise UsageError(f"bad limit {value!r}")
    if out < 1:
        raise UsageError(f"limits must be positive, got {out}")
    return out


def _degree(value: str):
    try:
        a, b = (int(x) for x in value.split(","))
    except ValueError:
        raise UsageError(f"degree must look like 'm1,m2', got {value!r}")
    if a < 0 or b < 0:
        raise UsageError("degrees are nonnegative")
    return a, b


def _data(args) -> BasicData:
    try:
        return BasicData(args.n, args.q, args.t)
    except words.ParameterError as exc:
        raise UsageError(str(exc))


def _header(args) -> str:
    if not args.timestamps:
        return ""
    now = datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0)
    return f"# generated {now.isoformat()}\n"


# ---------------------------------------------------------------------------
# subcommands

def cmd_build(args, settings, out) -> int:
    data = _data(args)
    sk = domino.build_skeleton(data, _limit(settings["vertex_limit"]))
    if args.format == "json":
        doc = twograph.to_json_dict(sk)
        doc["data"] = {"n": data.n, "q": data.q, "t": data.t}
        out.write(json.dumps(doc, indent=1) + "\n")
    else:
        out.write(twograph.to_dot(sk, f"domino_{data.n}_{data.q}_{data.t}"))
    return EXIT_OK


def table_rows(n: int, q: int, traces: Sequence[int], limit: Optional[int]):
    if limit is not None and q ** (n - 1) > limit:
        raise words.WorkLimitExceeded(
            f"{q}^{n - 1} words per trace exceed the necklace limit {limit}")
    return {t: words.enumerate_necklaces(n, q, t) for t in traces}


def format_table(n: int, q: int, rows) -> str:
    width = max(len("necklace"), max(len(str(nk)) for r in rows.values() for nk in r))
    lines = [f"length {n} over Z/{q}"]
    for t, necklaces in rows.items():
        lines.append("")
        lines.append(f"trace {t}: {len(necklaces)} necklaces")
        lines.append(f"{'necklace'.ljust(width)}  period  lyndon_subword")
        for nk in necklaces:
            lines.append(f"{str(nk).ljust(width)}  {str(nk.period).ljust(6)}  "
                         f"{nk.lyndon_subword}")
    return "\n".join(lines) + "\n"


def format_table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trace", "necklace", "period", "lyndon_subword"])
    for t, necklaces in rows.items():
        for nk in necklaces:
            w.writerow([t, str(nk.canonical), nk.period, str(nk.lyndon_subword)])
    return buf.getvalue()


def _traces(text: str, q: int) -> List[int]:
    if text == "all":
        return list(range(q))
    try:
        ts = sorted({int(x) for x in text.split(",")})
    except ValueError:
        raise UsageError(f"--traces takes 'all' or a list like '0,1', got {text!r}")
    for t in ts:
        if not 0 <= t < q:
            raise UsageError(f"trace {t} out of range for q={q}")
    return ts


def cmd_table(args, settings, out) -> int:
    try:
        words.check_parameters(args.n, args.q, 0)
    except words.ParameterError as exc:
        raise UsageError(str(exc))
    rows = table_rows(args.n, args.q, _traces(args.traces, args.q),
                      _limit(settings["necklace_limit"]))
    if args.format == "csv":
        out.write(format_table_csv(rows))
    else:
        out.write(format_table(args.n, args.q, rows))
    return EXIT_OK


def cmd_cycles(args, settings, out) -> int:
    data = _data(args)
    formula = domino.blue_cycle_counts(data)
    orbits = domino.blue_cycle_counts_by_orbits(data, _limit(settings["vertex_limit"]))
    match = formula == orbits
    if args.format == "json":
        out.write(json.dumps({
            "data": [data.n, data.q, data.t],
            "formula": {str(d): h for d, h in formula.items()},
            "orbits": {str(d): h for d, h in orbits.items()},
            "match": match}, indent=1) + "\n")
    else:
        out.write(f"blue cycles of {data}\n")
        w = max(len(str(d)) for d in formula)
        out.write(f"{'d'.ljust(w)}  formula  orbits\n")
        for d in formula:
            out.write(f"{str(d).ljust(w)}  {str(formula[d]).ljust(7)}  {orbits[d]}\n")
        out.write("MATCH\n" if match else "MISMATCH\n")
    return EXIT_OK if match else EXIT_FAILED


def tamper_square(sk: twograph.Skeleton, index: int) -> twograph.Skeleton:
    """Corrupt one square so that the axiom check must object."""
    if not 0 <= index < sk.num_squares:
        raise UsageError(f"square index {index} out of range 0..{sk.num_squares - 1}")
    f = np.array(sk.sq_f)
    e = np.array(sk.sq_e)
    if sk.num_blue > 1:
        f[index] = (f[index] + 1) % sk.num_blue
    elif sk.num_red > 1:
        e[index] = (e[index] + 1) % sk.num_red
    else:
        f[index] = -1
    return sk.with_squares(sk.sq_g, sk.sq_h, e, f)


def _suite_axioms(data, settings, tamper):
    sk = domino.build_skeleton(data, _limit(settings["vertex_limit"]), labels=False)
    if tamper is not None:
        sk = tamper_square(sk, tamper)
    rep = twograph.check_axioms(sk)
    summary = (f"vertices {sk.num_vertices}, blue {sk.num_blue}, red {sk.num_red}, "
               f"squares {sk.num_squares}")
    return {"status": "pass" if rep.ok else "fail", "summary": summary,
            "violations": rep.violations}


def _suite_iso(data, settings, full):
    rep = verify_iso(data, _limit(settings["vertex_limit"]), check_derived_axioms=full)
    if rep.status == "skipped":
        return {"status": "skipped", "summary": rep.note, "violations": []}
    problems = [name for name, ok in (("automorphism", rep.automorphism_ok),
                                      ("isomorphism", rep.isomorphism_ok),
                                      ("derived axioms", rep.crossed_axioms_ok))
                if ok is False]
    if rep.automorphism_order != domino.sigma_order(data):
        problems.append(f"automorphism order {rep.automorphism_order}")
    summary = f"automorphism order {rep.automorphism_order}, squares {rep.squares}"
    return {"status": "pass" if rep.ok else "fail", "summary": summary,
            "violations": problems}


def _suite_paths(data, settings):
    degree = _degree(settings["path_degree"])
    try:
        stats = domino.check_unique_factorisation(
            data, degree, _limit(settings["vertex_limit"]), _limit(settings["path_limit"]))
    except SizeLimitExceeded as exc:
        raise SizeLimitExceeded(f"{exc}; lower --max-degree or raise --path-limit")
    failures = {k: v for k, v in stats.items() if k not in ("paths", "factorisations")}
    summary = (f"degree <= ({degree[0]},{degree[1]}), paths {stats.get('paths', 0)}, "
               f"factorisations {stats.get('factorisations', 0)}")
    return {"status": "fail" if failures else "pass", "summary": summary,
            "violations": [f"{k} ({v})" for k, v in sorted(failures.items())]}


def cmd_verify(args, settings, out) -> int:
    data = _data(args)
    suites = ["axioms", "iso", "paths"] if args.suite == "all" else [args.suite]
    results = {}
    for suite in suites:
        if suite == "axioms":
            results[suite] = _suite_axioms(data, settings, args.tamper_square)
        elif suite == "iso":
            results[suite] = _suite_iso(data, settings, full=args.suite == "all")
        else:
            results[suite] = _suite_paths(data, settings)
    failed = any(r["status"] == "fail" for r in results.values())
    if args.format == "json":
        out.write(json.dumps({"data": [data.n, data.q, data.t], "suites": results,
                              "ok": not failed}, indent=1) + "\n")
    else:
        out.write(f"verify {data}\n")
        for suite, r in results.items():
            if r["status"] == "skipped":
                out.write(f"{suite}: NOTE: {r['summary']}; {suite} suite skipped\n")
                continue
            out.write(f"{suite}: {r['status'].upper()} ({r['summary']})\n")
            for v in r["violations"]:
                out.write(f"  {v}\n")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_ktheory(args, settings, out) -> int:
    rep = cstar.structure_report(_data(args))
    if args.format == "json":
        out.write(json.dumps(rep.to_dict(), indent=1) + "\n")
    else:
        out.write(rep.to_text())
    return EXIT_OK


def _parse_checks(checks: Sequence[str]):
    parsed = []
    for c in checks:
        if c in ("period", "diameter", "exponent"):
            parsed.append((c, None))
        elif c.startswith("n-connected="):
            try:
                k = int(c.split("=", 1)[1])
            except ValueError:
                raise UsageError(f"bad check {c!r}")
            if k < 1:
                raise UsageError("n-connected needs n >= 1")
            parsed.append(("n-connected", k))
        else:
            raise UsageError(f"unknown check {c!r}; use n-connected=N, period, "
                             "diameter or exponent")
    return parsed


def graph_report(g: graphalg.DirectedGraph, checks, cap: Optional[int]) -> Dict[str, object]:
    if not checks:
        checks = [("strongly-connected", None), ("period", None), ("diameter", None),
                  ("exponent", None)]
    res: Dict[str, object] = {"vertices": g.num_vertices,
                              "edges": int(g.vertex_matrix().sum())}
    for name, arg in checks:
        if name == "n-connected":
            res[f"n-connected={arg}"] = graphalg.is_n_connected(g, arg)
        elif name == "strongly-connected":
            res[name] = graphalg.is_strongly_connected(g)
        elif name == "period":
            res[name] = (graphalg.graph_period(g) if graphalg.is_strongly_connected(g)
                         else None)
        elif name == "diameter":
            res[name] = graphalg.diameter(g)
        elif name == "exponent":
            res["min-connectivity-exponent"] = graphalg.min_connectivity_exponent(g, cap)
    return res


def _fmt_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def cmd_graph(args, settings, out) -> int:
    try:
        with open(args.file) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}")
    try:
        g = graphalg.parse_edge_list(text)
    except ValueError as exc:
        raise UsageError(str(exc))
    res = graph_report(g, _parse_checks(args.check), _limit(settings["graph_cap"]))
    if args.format == "json":
        out.write(json.dumps(res, indent=1) + "\n")
    else:
        for k, v in res.items():
            out.write(f"{k}: {_fmt_value(v)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------

def _add_data(p, with_t=True):
    p.add_argument("-n", type=int, required=True, help="word length")
    p.add_argument("-q", type=int, required=True, help="alphabet size")
    if with_t:
        p.add_argument("-t", type=int, default=0, help="trace (default 0)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file of limits")
    common.add_argument("--vertex-limit", dest="vertex_limit",
                        help="largest vertex count to build ('none' for no limit)")
    common.add_argument("--timestamps", action="store_true",
                        help="prefix output with a generation time")

    parser = argparse.ArgumentParser(
        prog="dominograph",
        description="Build and check domino 2-graphs and related data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="export the skeleton")
    _add_data(p)
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("table", parents=[common], help="necklaces by trace")
    _add_data(p, with_t=False)
    p.add_argument("--traces", default="all", help="'all' or a list such as 0,1")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--necklace-limit", dest="necklace_limit",
                   help="largest number of words per trace to scan")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("cycles", parents=[common],
                       help="blue cycle counts: closed form against orbit walk")
    _add_data(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    _add_data(p)
    p.add_argument("--suite", choices=["axioms", "iso", "paths", "all"], default="all")
    p.add_argument("--max-degree", dest="path_degree",
                   help="largest degree m1,m2 for the paths suite")
    p.add_argument("--path-limit", dest="path_limit",
                   help="largest number of paths of one degree to enumerate")
    p.add_argument("--tamper-square", type=int, metavar="INDEX",
                   help="testing hook: corrupt one square before the axiom check")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ktheory", parents=[common], help="K-theory and structure report")
    _add_data(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_ktheory)

    p = sub.add_parser("graph", parents=[common], help="analyse an edge-list digraph")
    p.add_argument("file", help="file with one 'src dst' pair per line")
    p.add_argument("--check", action="append", default=[],
                   help="n-connected=N, period, diameter or exponent (repeatable)")
    p.add_argument("--cap", dest="graph_cap",
                   help="cap on the connectivity exponent search (default 4 V^2)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        settings = resolve_settings(args)
        code = args.func(args, settings, buf)
    except UsageError as exc:
        err.write(f"dominograph: error: {exc}\n")
        return EXIT_USAGE
    except (SizeLimitExceeded, words.WorkLimitExceeded, graphalg.CapExceeded) as exc:
        err.write(f"dominograph: limit: {exc}\n")
        return EXIT_LIMIT
    except MemoryError:
        err.write("dominograph: limit: out of memory; lower the limits\n")
        return EXIT_LIMIT
    out.write(_header(args) + buf.getvalue())
    return code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
