"""Command-line front end: ``gfcoh betti|verify|descend|compare``.

Exit codes: 0 success, 1 verification mismatch, 2 resource cap,
3 precondition failure on the mathematical input, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

from .ce_engine import (
    EngineConfig,
    ResourceLimitError,
    TrivialCochain,
    betti,
    is_cocycle,
)
from .gf_classes import (
    ClassParseError,
    class_exactness,
    parse_class,
    realize,
)
from .xn_model import model_betti

EXIT_OK, EXIT_MISMATCH, EXIT_CAP, EXIT_PRECONDITION, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class PreconditionError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 1
    q_max: int = 4
    margin: int = 1
    format: str = "text"
    max_slice_dim: int = 50000
    max_degree: int | None = None
    seed: int = 0
    enable_3d: bool = False
    class_spec: str | None = None
    inject_fault: int | None = None
    timing: bool = False

    def validate(self):
        if self.n < 1:
            raise UsageError("--n must be at least 1")
        if self.q_max < 1:
            raise UsageError("--q-max must be at least 1")
        if self.margin < 0:
            raise UsageError("--margin must be non-negative")
        if self.max_slice_dim < 1 or (self.max_degree is not None and self.max_degree < 1):
            raise UsageError("resource caps must be positive")
        if self.format == "csv" and self.command not in ("betti", "compare"):
            raise UsageError("csv output is only available for Betti tables")

    def engine(self) -> EngineConfig:
        return EngineConfig(max_slice_dim=self.max_slice_dim)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=1)
    common.add_argument("--q-max", type=int, default=4)
    common.add_argument("--margin", type=int, default=1)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--max-slice-dim", type=int, default=50000)
    common.add_argument("--max-degree", type=int, default=None,
                        help="polynomial degree cap for descent verification inputs")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--enable-3d", action="store_true")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings")
    p = _Parser(prog="gfcoh", description="Exact Gelfand-Fuks cohomology of formal vector fields.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("betti", parents=[common], help="reduced Betti numbers of vect(n)")
    v = sub.add_parser("verify", parents=[common], help="cocycle and exactness check of a class")
    v.add_argument("class_spec")
    d = sub.add_parser("descend", parents=[common], help="holomorphic and Cartan descent of a class")
    d.add_argument("class_spec")
    c = sub.add_parser("compare", parents=[common], help="CE engine against the minimal model")
    c.add_argument("--inject-fault", type=int, default=None, metavar="DEGREE",
                   help="corrupt one engine differential (testing the comparison)")
    return p


# -- serialisation ---------------------------------------------------------------

def rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def jsonable(obj):
    """Plain JSON data with string keys and rationals as ``"p/q"``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, TrivialCochain):
        return {"degree": obj.degree,
                "terms": [[_tuple_name(T), rational(c)] for T, c in sorted(obj.terms.items())]}
    return obj


def _tuple_name(T) -> str:
    return " ^ ".join(f"x{m.exponent}d{m.direction + 1}" for m in T)


def dump_json(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _betti_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0].keys()) if rows else ["degree", "dim"]
    w.writerow(keys)
    for r in rows:
        w.writerow([r[k] for k in keys])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------------

def cmd_betti(cfg: RunConfig) -> tuple[int, dict]:
    try:
        table = betti(cfg.n, cfg.q_max, cfg.engine())
        code = EXIT_OK
    except ResourceLimitError as exc:
        table = exc.partial
        code = EXIT_CAP
    results = table.to_dict() if table is not None else {"table": [], "complete": False}
    return code, {"results": results, "certificates": {}}


def _class(cfg: RunConfig):
    try:
        expr = parse_class(cfg.class_spec or "")
        alpha = realize(expr, cfg.n)
    except ClassParseError as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc
    return expr, alpha


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    expr, alpha = _class(cfg)
    p, q = expr.bidegree()
    generator = len(expr.a_indices) + sum(e for _, e in expr.tau_exponents) == 1
    jb = min(q + 1, 2) if generator else 1
    closed, cert = is_cocycle(alpha, total=True, jet_bound=jb, margin=cfg.margin)
    results = {"class": str(expr), "bidegree": [p, q], "total_degree": p + q, "cocycle": closed}
    if closed:
        if p > cfg.n:
            results.update(exact=True, witness="0", reason="form degree exceeds n")
        else:
            target, witness = class_exactness(alpha, cfg.n, p + q, cfg.engine())
            results["exact"] = witness is not None
            results["witness"] = witness
    return EXIT_OK, {"results": results, "certificates": {"cocycle": cert.to_dict()}}


def cmd_descend(cfg: RunConfig) -> tuple[int, dict]:
    from . import local_descent as ld
    from .gf_classes import phi_on_slice

    expr, alpha = _class(cfg)
    p, q = expr.bidegree()
    if cfg.n == 3 and not cfg.enable_3d:
        raise UsageError("descent for n = 3 is gated behind --enable-3d")
    if cfg.n > 3:
        raise ResourceLimitError(f"descent for n={cfg.n} exceeds the supported range", None)
    phi = phi_on_slice(alpha, p + q)
    if phi.differential():
        raise PreconditionError(f"Phi({expr}) is not closed; descent does not apply")
    sol = ld.descent_solution(phi)
    poly_cert = ld.verify_descent_polynomial(sol)
    density = ld.delta_integrand(sol)
    closed = ld.is_total_divergence(cfg.n, ld.density_coboundary(cfg.n, density))
    results = {
        "class": str(expr),
        "degree": p + q,
        "components": {f"{i},{j}": ld.render(sol.component(i, j))
                       for (i, j) in sorted(sol.components)},
        "integrand": ld.render(density),
        "integrand_trivial": ld.is_total_divergence(cfg.n, density) if density else True,
    }
    certs = {"descent_polynomial": poly_cert.to_dict(), "integrand_closed_mod_divergence": closed}
    if cfg.max_degree is not None:
        jb = max(cfg.max_degree - cfg.margin, 0)
        certs["descent_inputs"] = ld.verify_descent_inputs(sol, jet_bound=jb, margin=cfg.margin).to_dict()
    kind = ld.reference_density_kind(expr, cfg.n)
    if kind is not None and density:
        ratio = ld.equivalent_mod_divergence(cfg.n, density, ld.reference_density(cfg.n, kind))
        results["reference_density"] = kind
        results["scalar_to_reference"] = None if ratio is None else rational(ratio)
    ok = poly_cert.holds and closed
    if "descent_inputs" in certs:
        ok = ok and certs["descent_inputs"]["holds"]
    if kind is not None and density and results.get("scalar_to_reference") in (None, "0/1"):
        ok = False
    return (EXIT_OK if ok else EXIT_MISMATCH), {"results": results, "certificates": certs}


def cmd_compare(cfg: RunConfig) -> tuple[int, dict]:
    try:
        engine = betti(cfg.n, cfg.q_max, cfg.engine(), corrupt_degree=cfg.inject_fault)
    except ResourceLimitError as exc:
        return EXIT_CAP, {"results": {"engine": exc.partial.to_dict() if exc.partial else None},
                          "certificates": {}}
    model = model_betti(cfg.n, cfg.q_max)
    rows = []
    # the engine computes reduced cohomology; constants contribute H^0 = 1
    engine_dims = {0: 1, **engine.dims}
    for d in range(0, cfg.q_max + 1):
        e, m = engine_dims.get(d), model.dims.get(d, 0)
        rows.append({"degree": d, "engine": e, "model": m, "match": e == m})
    verdict = "match" if all(r["match"] for r in rows) else "mismatch"
    results = {"n": cfg.n, "rows": rows, "verdict": verdict}
    return (EXIT_OK if verdict == "match" else EXIT_MISMATCH), {"results": results, "certificates": {}}


COMMANDS = {"betti": cmd_betti, "verify": cmd_verify, "descend": cmd_descend, "compare": cmd_compare}


def _text(cfg: RunConfig, report: dict) -> str:
    res = report["results"]
    lines = [f"command: {cfg.command}"]
    if cfg.command == "betti":
        for row in res.get("table", []):
            lines.append(f"H^{row['degree']} = {row['dim']}")
        if not res.get("complete", True):
            lines.append("partial table: resource cap reached")
    elif cfg.command == "compare":
        for r in res["rows"]:
            lines.append(f"degree {r['degree']}: engine {r['engine']} model {r['model']}"
                         f" {'ok' if r['match'] else 'MISMATCH'}")
        lines.append(f"verdict: {res['verdict']}")
    else:
        for k, v in sorted(jsonable(res).items()):
            if isinstance(v, dict):
                lines.append(f"{k}:")
                lines.extend(f"  {kk}: {vv}" for kk, vv in sorted(v.items()))
            else:
                lines.append(f"{k}: {v}")
        for k, v in sorted(jsonable(report["certificates"]).items()):
            verdict = v.get("holds") if isinstance(v, dict) else v
            lines.append(f"certificate {k}: {'pass' if verdict else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render(cfg: RunConfig, report: dict) -> str:
    if cfg.format == "json":
        return dump_json(report)
    if cfg.format == "csv":
        res = report["results"]
        return _betti_csv(res["rows"] if cfg.command == "compare" else res.get("table", []))
    return _text(cfg, report)


def run(argv=None) -> tuple[int, str]:
    """Parse, execute and render; returns ``(exit_code, output)``."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help exits 0; every parse error goes through _Parser.error
        return (EXIT_OK if not exc.code else EXIT_USAGE), ""
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    try:
        cfg.validate()
        t0 = time.perf_counter()
        code, body = COMMANDS[cfg.command](cfg)
        elapsed = time.perf_counter() - t0
    except UsageError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    except PreconditionError as exc:
        return EXIT_PRECONDITION, f"error: {exc}\n"
    except ResourceLimitError as exc:
        return EXIT_CAP, f"error: {exc}\n"
    # timings vary run to run, so they are only reported on request
    timing = {"seconds": round(elapsed, 3)} if cfg.timing else {}
    report = {"command": cfg.command, "config": asdict(cfg), **body, "timing": timing}
    return code, render(cfg, report)


def main(argv=None) -> int:
    code, out = run(argv)
    stream = sys.stdout if code in (EXIT_OK, EXIT_MISMATCH) or not out.startswith("error:") else sys.stderr
    stream.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
