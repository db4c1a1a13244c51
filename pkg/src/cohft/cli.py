"""Command-line front end: ``cohft <subcommand> [flags]``.

Results go to stdout (or ``--output``) as JSON or CSV; progress and errors go
to stderr.  Exit codes: 0 success, 1 failed suite, 2 invalid request,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from .arith import rational_to_str
from .errors import CohFTError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_INTERNAL = 3


class RequestError(Exception):
    """Invalid command line or request file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise RequestError(message)


def _int_list(text: str) -> list[int]:
    if text.strip() == "":
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if not 2 <= lo <= hi:
        raise argparse.ArgumentTypeError("need 2 <= LO <= HI")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", type=Path, default=None, help="write results here instead of stdout")
    common.add_argument("--jobs", type=_positive, default=None, help="worker processes (default: all cores)")

    parser = _Parser(prog="cohft", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("graphs", parents=[common], help="enumerate stable graphs")
    p.add_argument("--genus", type=_nonneg, required=True)
    p.add_argument("--legs", type=_nonneg, required=True)
    p.add_argument("--even", action="store_true", help="keep only graphs with all valences even")

    p = sub.add_parser("psi", parents=[common], help="psi intersection numbers")
    p.add_argument("--genus", type=_nonneg, required=True)
    p.add_argument("--exponents", type=_int_list, required=True)
    p.add_argument("--kappa", type=_int_list, default=[], help="kappa class indices")

    p = sub.add_parser("reconstruct", parents=[common], help="correlator of R.omega from a JSON request")
    p.add_argument("--request", type=Path, required=True, help="JSON request file, '-' for stdin")
    p.add_argument("--graph-file", type=Path, default=None, help="graphs JSON to sum over")

    p = sub.add_parser("rspin", parents=[common], help="integrals of Witten's r-spin class")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--genus", type=_nonneg, required=True)
    p.add_argument("--a", type=_int_list, required=True)
    p.add_argument("--psi", type=_int_list, default=None)
    p.add_argument("--scan-r", type=_range, default=None, metavar="LO:HI",
                   help="exploratory: tabulate r^(g-1) times the integral for r in LO..HI")

    p = sub.add_parser("verlinde", parents=[common], help="integrals of the sl2 Verlinde class")
    p.add_argument("--level", type=_positive, required=True)
    p.add_argument("--genus", type=_nonneg, required=True)
    p.add_argument("--weights", type=_int_list, required=True)
    p.add_argument("--psi", type=_int_list, default=None)
    p.add_argument("--t-order", type=_nonneg, default=None)
    p.add_argument("--method", choices=("graded", "series"), default="graded")

    p = sub.add_parser("hilb", parents=[common], help="3-point series of Hilb^m(C^2)")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--mu1", type=_int_list, required=True)
    p.add_argument("--mu2", type=_int_list, required=True)
    p.add_argument("--series-order", type=_nonneg, default=None)

    p = sub.add_parser("suite", parents=[common], help="run the property suite")
    p.add_argument("--max-genus", type=_nonneg, default=1)
    p.add_argument("--max-legs", type=_positive, default=3)
    p.add_argument("--theory", choices=("all", "trivial", "hodge", "rspin", "verlinde"), default="all")
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--level", type=_positive, default=1)
    p.add_argument("--samples", type=_positive, default=1)
    p.add_argument("--seed", type=int, default=0)
    return parser


# ---------------------------------------------------------------------------
# serialization


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return rational_to_str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


def dumps(payload: Any) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, separators=(",", ":")) + "\n"


def _csv(payload: dict) -> str:
    """One row per element of the first list-valued field, else a single row."""
    payload = _jsonable(payload)
    rows = None
    for key in sorted(payload):
        if isinstance(payload[key], list) and all(isinstance(x, dict) for x in payload[key]):
            rows = payload[key]
            break
    if rows is None:
        rows = [payload]
    fields = sorted({k for row in rows for k in row})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({
            k: v if isinstance(v, (str, int, float, bool)) or v is None else json.dumps(v, sort_keys=True, separators=(",", ":"))
            for k, v in row.items()
        })
    return buf.getvalue()


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# subcommands


def _graphs(args) -> dict:
    from .graphs import enumerate_stable_graphs, even_subset

    graphs = enumerate_stable_graphs(args.genus, args.legs)
    if args.even:
        graphs = even_subset(graphs)
    return {"genus": args.genus, "legs": args.legs, "count": len(graphs), "graphs": [g.to_json() for g in graphs]}


def _psi(args) -> dict:
    from .intersection import kappa_psi_correlator

    return {"value": kappa_psi_correlator(args.genus, args.exponents, args.kappa)}


def _read_text(path: Path) -> str:
    if str(path) == "-":
        if _stdin_text is None:
            raise RequestError("stdin was not captured")
        return _stdin_text
    return path.read_text()


def _read_json(path: Path) -> Any:
    try:
        return json.loads(_read_text(path))
    except OSError as exc:
        raise RequestError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise RequestError(f"{path}: invalid JSON ({exc.msg})")


def load_theory(spec: Any, order: int):
    """``(FrobeniusData, RMatrix)`` from a request's ``theory`` field."""
    from .frobenius import FrobeniusData, RMatrix, hodge_rmatrix, trivial_theory
    from .rspin import rspin_rmatrix, shifted_theory
    from .verlinde import fusion_data, verlinde_rmatrix_at_one

    if isinstance(spec, str):
        spec = {"name": spec}
    if not isinstance(spec, dict):
        raise RequestError("theory must be a name or an object")
    name = spec.get("name")
    if name is None:
        try:
            return FrobeniusData.from_json(spec["frobenius"]), RMatrix.from_json(spec["rmatrix"])
        except KeyError as exc:
            raise RequestError(f"custom theory is missing {exc.args[0]!r}")
    if name == "trivial":
        return trivial_theory(), RMatrix.identity(1, order)
    if name == "hodge":
        return trivial_theory(), hodge_rmatrix(order)
    if name == "rspin":
        r = int(spec.get("r", 3))
        return shifted_theory(r), rspin_rmatrix(r, order)
    if name == "verlinde":
        level = int(spec.get("level", 1))
        return fusion_data(level), verlinde_rmatrix_at_one(level, order)
    raise RequestError(f"unknown theory {name!r}")


def _insertions(raw: Any, dim: int):
    from .reconstruction import Insertion

    if not isinstance(raw, list):
        raise RequestError("insertions must be a list")
    out = []
    for item in raw:
        if isinstance(item, int):
            vec = [Fraction(int(i == item)) for i in range(dim)]
            psi = 0
        else:
            vec = item.get("vector")
            if isinstance(vec, int):
                vec = [Fraction(int(i == vec)) for i in range(dim)]
            else:
                vec = [Fraction(x) for x in vec]
            psi = int(item.get("psi", 0))
        if len(vec) != dim:
            raise RequestError(f"insertion vector of length {len(vec)}, theory has dimension {dim}")
        out.append(Insertion(tuple(vec), psi))
    return out


def _reconstruct(args) -> dict:
    from .graphs import StableGraph
    from .reconstruction import Engine

    req = _read_json(args.request)
    if not isinstance(req, dict) or "genus" not in req or "insertions" not in req:
        raise RequestError("request needs 'genus' and 'insertions'")
    g = int(req["genus"])
    n = len(req["insertions"])
    order = max(3 * g - 3 + n, 1)
    F, R = load_theory(req.get("theory", "trivial"), order)
    ins = _insertions(req["insertions"], F.dim)
    graphs = None
    if args.graph_file is not None:
        data = _read_json(args.graph_file)
        items = data["graphs"] if isinstance(data, dict) else data
        graphs = [StableGraph.from_json(x) for x in items]
        _progress(f"summing over {len(graphs)} graphs from {args.graph_file}")
    value = Engine(F, R).correlator(g, ins, graphs=graphs, jobs=args.jobs)
    return {"genus": g, "n": n, "value": value}


def _rspin(args) -> dict:
    from .rspin import degree, witten_integral

    if args.scan_r is not None:
        return _scan_r(args)
    if args.r is None:
        raise RequestError("--r is required unless --scan-r is given")
    D = degree(args.r, args.genus, args.a)
    value = witten_integral(args.r, args.genus, args.a, args.psi, jobs=args.jobs)
    return {"value": value, "degree": D}


def _scan_r(args) -> dict:
    """Sample ``r^(g-1) int W^r`` over a range of r and take finite differences.

    A polynomial of degree ``k`` in ``r`` has vanishing ``(k+1)``-st
    differences; the smallest such ``k`` seen in the window is reported.
    """
    from .rspin import degree, witten_integral

    lo, hi = args.scan_r
    lo = max(lo, max(args.a, default=0) + 2)
    samples = []
    for r in range(lo, hi + 1):
        _progress(f"scan r={r}")
        D = degree(r, args.genus, args.a)
        val = witten_integral(r, args.genus, args.a, args.psi, jobs=args.jobs)
        samples.append({"r": r, "degree": D, "scaled": Fraction(r) ** (args.genus - 1) * val})
    diffs = [s["scaled"] for s in samples]
    fitted = None
    for k in range(len(samples) - 1):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
        if all(x == 0 for x in diffs):
            fitted = k
            break
    return {"genus": args.genus, "a": args.a, "samples": samples, "polynomial_degree": fitted}


def _verlinde(args) -> dict:
    from .verlinde import verlinde_correlator

    val = verlinde_correlator(
        args.level, args.genus, args.weights, args.psi, args.t_order, method=args.method, jobs=args.jobs
    )
    return {"t_order": val.order, "value": val.to_json()}


def _hilb(args) -> dict:
    from .hilbert import three_point_series

    if sum(args.mu1) != args.m or sum(args.mu2) != args.m:
        raise RequestError(f"--mu1 and --mu2 must be partitions of {args.m}")
    f = three_point_series(args.mu1, args.mu2)
    out = {"m": args.m, "value": f.to_json(), "text": str(f)}
    if args.series_order is not None:
        series = f.q_series(args.series_order)
        out["series"] = {str(k): str(c) for k, c in enumerate(series.coeffs) if c != 0}
    return out


def _check(name: str, ok: bool, **detail) -> dict:
    return {"name": name, "pass": bool(ok), **detail}


def _suite(args) -> dict:
    from .frobenius import RMatrix, hodge_rmatrix, trivial_theory
    from .intersection import psi_correlator
    from .reconstruction import Engine, Insertion, cohft_axiom_suite
    from .rspin import (
        euler_commutation_check,
        idempotent_check_float,
        rspin_rmatrix,
        rspin_topological_exact,
        rspin_topological_float,
        shifted_theory,
        witten_integral,
    )
    from .verlinde import fusion_data, level1_even_rank_check, verlinde_rank, verlinde_rmatrix_at_one

    order = max(3 * args.max_genus - 3 + args.max_legs, 1)
    theories = ("trivial", "hodge", "rspin", "verlinde") if args.theory == "all" else (args.theory,)
    checks = []

    def axioms(label, F, R):
        _progress(f"{label}: axiom suite")
        eng = Engine(F, R)
        rep = cohft_axiom_suite(eng, args.max_genus, args.max_legs, samples=args.samples, seed=args.seed)
        bad = [f"{x['identity']} g={x['g']} n={x['n']}" for x in rep["instances"] if not x["pass"]]
        checks.append(_check(f"{label}: string/dilaton/symmetry", rep["pass"], instances=len(rep["instances"]), failures=bad))
        checks.append(_check(f"{label}: symplectic", R.is_symplectic(F.eta)))
        return eng

    if "trivial" in theories:
        F = trivial_theory()
        eng = axioms("trivial", F, RMatrix.identity(1, order))
        ok = True
        for g in range(args.max_genus + 1):
            for n in range(1, args.max_legs + 1):
                if 2 * g - 2 + n <= 0:
                    continue
                D = 3 * g - 3 + n
                for first in range(D + 1):
                    exps = [first] + [0] * (n - 1)
                    exps[-1] += D - first
                    got = eng.correlator(g, [Insertion((Fraction(1),), a) for a in exps])
                    ok = ok and got == psi_correlator(g, exps)
        checks.append(_check("trivial: engine equals psi intersection numbers", ok))

    if "hodge" in theories:
        F = trivial_theory()
        eng = axioms("hodge", F, hodge_rmatrix(order))
        one = (Fraction(1),)
        checks.append(_check("hodge: lambda_1 on M_{1,1}", eng.correlator(1, [Insertion(one, 0)]) == Fraction(1, 24)))
        ok = True
        for g in range(args.max_genus + 1):
            for n in range(1, args.max_legs + 1):
                if 2 * g - 2 + n <= 0:
                    continue
                b = 3 * g - 3 + n - g - 1
                if b >= 0:
                    ok = ok and eng.correlator(g, [Insertion(one, b)] + [Insertion(one, 0)] * (n - 1)) == 0
        checks.append(_check("hodge: lambda degree above g vanishes", ok))

    if "rspin" in theories:
        r = args.r
        F = shifted_theory(r)
        axioms(f"rspin r={r}", F, rspin_rmatrix(r, order))
        checks.append(_check(f"rspin r={r}: Euler recursion", euler_commutation_check(r, 6)["pass"]))
        checks.append(_check(f"rspin r={r}: idempotents", idempotent_check_float(r)["pass"]))
        ok = all(
            witten_integral(r, 0, (a, b, c)) == int(a + b + c == r - 2)
            for a in range(r - 1) for b in range(r - 1) for c in range(r - 1)
        )
        checks.append(_check(f"rspin r={r}: genus-0 three-point values", ok))
        worst = 0.0
        for g in range(args.max_genus + 1):
            for n in range(1, args.max_legs + 1):
                if 2 * g - 2 + n <= 0:
                    continue
                a = [(i * 7 + g) % (r - 1) for i in range(n)]
                exact = float(rspin_topological_exact(r, g, a))
                approx = rspin_topological_float(r, g, a)
                worst = max(worst, abs(exact - approx) / max(1.0, abs(exact)))
        checks.append(_check(f"rspin r={r}: sine formula", worst <= 1e-9, error=worst))

    if "verlinde" in theories:
        level = args.level
        F = fusion_data(level)
        eng = axioms(f"verlinde level={level}", F, verlinde_rmatrix_at_one(level, order))
        ok = True
        for g in range(args.max_genus + 1):
            for n in range(1, args.max_legs + 1):
                if 2 * g - 2 + n > 0 and level == 1:
                    ok = ok and level1_even_rank_check(g, n)["pass"]
        checks.append(_check(f"verlinde level={level}: level-1 even ranks", ok))
        w = [level, level, 0]
        zero_dim = eng.correlator(0, [Insertion(F.basis_vector(a), 0) for a in w])
        checks.append(_check(f"verlinde level={level}: M_{{0,3}} value equals rank", zero_dim == verlinde_rank(level, 0, w)))

    return {"pass": all(c["pass"] for c in checks), "checks": checks}


COMMANDS: dict[str, Callable] = {
    "graphs": _graphs,
    "psi": _psi,
    "reconstruct": _reconstruct,
    "rspin": _rspin,
    "verlinde": _verlinde,
    "hilb": _hilb,
    "suite": _suite,
}

_stdin_text: str | None = None
_UNCACHED = {"suite", "graphs"}
_NONSEMANTIC = {"format", "output", "jobs", "command"}


# ---------------------------------------------------------------------------
# on-disk memo


def _cache_key(args) -> str:
    items = {k: v for k, v in vars(args).items() if k not in _NONSEMANTIC}
    for k, v in list(items.items()):
        if isinstance(v, Path):
            try:
                items[k] = _read_text(v)
            except OSError as exc:
                raise RequestError(f"cannot read {v}: {exc.strerror}")
    blob = json.dumps({"command": args.command, "args": _jsonable(items)}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _cached(args, compute: Callable[[], dict]) -> dict:
    root = os.environ.get("COHFT_CACHE_DIR")
    if not root or args.command in _UNCACHED:
        return _jsonable(compute())
    path = Path(root) / f"{_cache_key(args)}.json"
    if path.exists():
        return json.loads(path.read_text())
    payload = _jsonable(compute())
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True))
    tmp.replace(path)
    return payload


# ---------------------------------------------------------------------------
# entry points


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.jobs is None:
            args.jobs = os.cpu_count() or 1
        global _stdin_text
        _stdin_text = sys.stdin.read() if "-" in (str(getattr(args, "request", "")), str(getattr(args, "graph_file", ""))) else None
        payload = _cached(args, lambda: COMMANDS[args.command](args))
    except (RequestError, CohFTError, ValueError, KeyError, TypeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc) if not isinstance(exc, KeyError) else f"missing field {exc}"}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # pragma: no cover - invariant violations
        err = {"error": "InternalError", "message": f"{type(exc).__name__}: {exc}"}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return EXIT_INTERNAL

    text = dumps(payload) if args.format == "json" else _csv(payload)
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)
    if args.command == "suite" and not payload["pass"]:
        return EXIT_FAILED
    return EXIT_OK


def main() -> None:
    sys.exit(run())
