"""Command-line front end: ``orbitlab <command> [options]``.

Exit status: 0 on success, 1 when an analysis is inconclusive and --strict
is given, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

from . import _numeric as nm
from .catalog import catalog_get, catalog_list
from .dsl import parse_map, parse_point
from .dynamics import backward_step, classify_type, denjoy_wolff, dilation_at, divergence_rate, forward_step
from .errors import OrbitlabError
from .geometry import INFINITY, Domain, use_convention
from .holomap import backward_orbit, forward_orbit
from .premodel import PreModel, sigma_closed_form, siegel_example_premodel, verify_premodel
from .stable_set import partition, tangent_bounded

SIG = 12
GLOBAL_DEFAULTS = {
    "format": "plain",
    "n_max": 64,
    "convention": "doubled",
    "digits": nm.DEFAULT_DIGITS,
    "strict": False,
}


class UsageError(Exception):
    pass


# --- formatting ---------------------------------------------------------------


def fmt_real(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.{SIG}g}"
    return "0" if s in ("-0", "0") else s


def fmt_complex(c) -> str:
    """Complex number in map grammar syntax, e.g. "0.5 + 2i", "-i", "3"."""
    c = complex(c)
    re_s, im = fmt_real(c.real), float(c.imag)
    if fmt_real(im) == "0":
        return re_s
    mag = fmt_real(abs(im))
    im_s = "i" if mag == "1" else f"{mag}i"
    if re_s == "0":
        return ("-" if im < 0 else "") + im_s
    return f"{re_s} {'-' if im < 0 else '+'} {im_s}"


def fmt_point(p) -> str:
    if p is INFINITY:
        return "INFINITY"
    if isinstance(p, (tuple, list)):
        return "(" + ", ".join(fmt_complex(c) for c in p) + ")"
    return fmt_complex(p)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is INFINITY:
        return "INFINITY"
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, complex) or nm.is_mp(obj):
        c = complex(obj)
        return fmt_real(c.real) if c.imag == 0 else fmt_complex(c)
    if isinstance(obj, float):
        return fmt_real(obj) if not math.isfinite(obj) else float(fmt_real(obj))
    return str(obj)


class Output:
    """Collects one command's result and renders it in the requested format."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.doc: dict = {}
        self.table: tuple[list, list] | None = None
        self.lines: list[str] = []

    def render(self) -> str:
        if self.fmt == "structured":
            return json.dumps(_jsonable(self.doc), indent=2) + "\n"
        if self.fmt == "csv":
            if self.table is None:
                raise UsageError("this command has no CSV output; use --format structured or plain")
            header, rows = self.table
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(v) for v in row])
            return buf.getvalue()
        return "\n".join(self.lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return fmt_real(v)
    if isinstance(v, complex) or nm.is_mp(v):
        return fmt_complex(v)
    if isinstance(v, tuple):
        return fmt_point(v)
    return str(v)


# --- argument parsing ---------------------------------------------------------


def _global_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("map source and output")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--map", help="map in the grammar '<kind> <q> : (<expr>, ...) [inverse (...)]'")
    src.add_argument("--map-file", help="file containing a map definition")
    src.add_argument("--catalog", help="name of a built-in catalog map")
    g.add_argument("--params", help="JSON object of parameter bindings for --map or --catalog")
    g.add_argument("--config", help="JSON file whose keys mirror the long options")
    g.add_argument("--format", choices=("csv", "structured", "plain"))
    g.add_argument("--out", help="write output to this file instead of stdout")
    g.add_argument("--n-max", type=int, help="orbit length / number of backward steps (default 64)")
    g.add_argument("--m-max", type=int, help="largest step: rate (default 50), verify-premodel (default 20)")
    g.add_argument("--strict", action="store_true", default=None, help="exit 1 on inconclusive verdicts")
    g.add_argument("--convention", choices=("doubled", "arctanh"), help="distance normalisation")
    g.add_argument("--digits", type=int, help=f"working decimal digits (default {nm.DEFAULT_DIGITS})")
    return p


def build_parser() -> argparse.ArgumentParser:
    parent = _global_parent()
    parser = argparse.ArgumentParser(prog="orbitlab", description="Backward-orbit dynamics of holomorphic self-maps.")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[parent], help=help_text, description=help_text)

    p = add("orbit", "forward or backward orbit of a point")
    p.add_argument("--point", help="start point, e.g. '(i, 0)'")
    p.add_argument("--direction", choices=("forward", "backward"), default="backward")

    p = add("steps", "backward or forward m-step sequence")
    p.add_argument("--point")
    p.add_argument("--m", type=int, default=1, help="step size")
    p.add_argument("--direction", choices=("backward", "forward"), default="backward")

    p = add("rate", "divergence rate upper bound min_j k(x, f^j x)/j")
    p.add_argument("--point")

    p = add("classify", "elliptic / parabolic / hyperbolic classification")
    p.add_argument("--point")

    p = add("dw", "Denjoy-Wolff point from forward orbits")
    p.add_argument("--start", action="append", help="start point (repeatable)")

    p = add("dilation", "dilation at a boundary point along an approach sequence")
    p.add_argument("--zeta", required=True, help="boundary point in the ball chart, or INFINITY")
    p.add_argument("--approach", action="append", help="approach point in the ball chart (repeatable)")
    p.add_argument("--radial", type=int, help="use the radial approach (1 - 10^-k) zeta, k = 1..RADIAL")

    p = add("stable-partition", "partition samples into canonical submanifolds")
    p.add_argument("--sample", action="append", help="sample point (repeatable)")

    p = add("tangent", "is the tangent vector in V_x (bounded backward metric)?")
    p.add_argument("--point")
    p.add_argument("--dir", required=True, help="tangent direction, e.g. '(1, 0)'")

    p = add("verify-premodel", "check a pre-model against the map")
    p.add_argument("--premodel-r", type=float, help="use the shear's pre-model through w = i r")
    p.add_argument("--premodel-file", help="JSON file with keys Z, g, tau (map grammar strings)")
    p.add_argument("--probe", action="append", help="probe point in Z (repeatable)")

    p = add("sigma-formula", "closed-form backward m-step for a hyperbolic automorphism")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("catalog", "list or show catalog entries")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    cfg = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr) or attr in ("command", "config"):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)
    for key, value in GLOBAL_DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    if args.n_max <= 0 or (args.m_max is not None and args.m_max <= 0) or args.digits <= 0:
        raise UsageError("--n-max, --m-max and --digits must be positive")


def _params(args) -> dict:
    if args.params is None:
        return {}
    if isinstance(args.params, dict):
        return args.params
    try:
        out = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--params is not valid JSON: {exc}") from None
    if not isinstance(out, dict):
        raise UsageError("--params must be a JSON object")
    return out


def _load_map(args):
    """(MapDef, catalog entry or None) from exactly one map source."""
    sources = [s for s in (args.map, args.map_file, args.catalog) if s]
    if len(sources) != 1:
        raise UsageError("give exactly one of --map, --map-file, --catalog")
    params = _params(args)
    if args.catalog:
        try:
            entry = catalog_get(args.catalog, params)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        return entry.map, entry
    text = args.map
    if args.map_file:
        try:
            with open(args.map_file, encoding="utf-8") as fh:
                text = fh.read().strip()
        except OSError as exc:
            raise UsageError(f"cannot read map file: {exc}") from None
    return parse_map(text, params=params), None


def _point(text, entry, what="--point"):
    if text is None:
        if entry is not None and entry.sample_point:
            return entry.sample_point
        raise UsageError(f"{what} is required")
    return parse_point(text)


# --- commands -----------------------------------------------------------------


def cmd_orbit(args, out: Output) -> bool:
    m, entry = _load_map(args)
    x = _point(args.point, entry)
    fn = forward_orbit if args.direction == "forward" else backward_orbit
    rec = fn(m, x, args.n_max, digits=args.digits, cap=max(args.n_max, 200))
    pts = rec.as_complex()
    out.doc = {"command": "orbit", "map": m.text(), "direction": rec.direction, "start": x,
               "points": pts, "residuals": rec.residuals, "exit_index": rec.exit_index,
               "exit_reason": rec.exit_reason}
    header = ["n"] + [f"z{j + 1}" for j in range(m.q)]
    out.table = (header, [[n] + list(p) for n, p in enumerate(pts)])
    out.lines = [f"{rec.direction} orbit of {fmt_point(x)} under {m.text()}"]
    out.lines += [f"{n:4d}  {fmt_point(p)}" for n, p in enumerate(pts)]
    if rec.exit_index is not None:
        out.lines.append(f"stopped at step {rec.exit_index}: {rec.exit_reason}")
    return rec.exit_index is None


def cmd_steps(args, out: Output) -> bool:
    m, entry = _load_map(args)
    x = _point(args.point, entry)
    fn = backward_step if args.direction == "backward" else forward_step
    est = fn(m, x, args.m, args.n_max, digits=args.digits)
    out.doc = {"command": "steps", "map": m.text(), "point": x, "direction": args.direction, "m": est.m,
               "limit": est.limit, "verdict": est.verdict, "monotone": est.monotone,
               "exit_index": est.exit_index, "table": [list(r) for r in est.table], "values": est.values}
    out.table = (["n", "value"], [[n, v] for n, v in enumerate(est.values)])
    name = "sigma" if args.direction == "backward" else "s"
    out.lines = [f"{name}_{est.m}({fmt_point(x)}) = {fmt_real(est.limit)}  [{est.verdict}]"]
    out.lines += [f"  n={n:<6d} {fmt_real(v)}" for n, v in est.table]
    return est.verdict != "inconclusive"


def cmd_rate(args, out: Output) -> bool:
    m, entry = _load_map(args)
    x = _point(args.point, entry)
    m_max = args.m_max or 50
    r = divergence_rate(m, x, m_max, digits=args.digits)
    out.doc = {"command": "rate", "map": m.text(), "point": x, "m_max": m_max, "rate_upper_bound": r}
    out.table = (["m_max", "rate"], [[m_max, r]])
    out.lines = [f"divergence rate <= {fmt_real(r)}  (min over j <= {m_max})"]
    return True


def cmd_classify(args, out: Output) -> bool:
    m, entry = _load_map(args)
    x = _point(args.point, entry)
    rep = classify_type(m, x, digits=args.digits)
    out.doc = {"command": "classify", "map": m.text(), "point": x, "type": rep.type, "rate": rep.rate,
               "source": rep.source, "notes": rep.notes, "evidence": [list(r) for r in rep.evidence]}
    out.table = (["m", "sigma_m", "slope"], [list(r) for r in rep.evidence])
    out.lines = [f"{rep.type}  rate {fmt_real(rep.rate)}  ({rep.source})"]
    if rep.notes:
        out.lines.append(rep.notes)
    out.lines += [f"  m={mm:<4d} sigma={fmt_real(s)}  slope={fmt_real(sl)}" for mm, s, sl in rep.evidence]
    return rep.type != "inconclusive"


def cmd_dw(args, out: Output) -> bool:
    m, entry = _load_map(args)
    starts = [parse_point(s) for s in args.start] if args.start else [_point(None, entry, "--start")]
    rep = denjoy_wolff(m, starts, args.n_max, digits=args.digits)
    out.doc = {"command": "dw", "map": m.text(), "kind": rep.kind, "point": rep.point,
               "ball_point": rep.ball_point, "dilation": rep.dilation,
               "converged_starts": rep.converged_starts, "diagnostics": rep.diagnostics}
    out.lines = [f"{rep.kind}: point {fmt_point(rep.point) if rep.point is not None else '-'}"
                 f"  dilation {fmt_real(rep.dilation) if rep.dilation is not None else '-'}"
                 f"  ({rep.converged_starts}/{len(starts)} starts)"]
    return rep.kind != "inconclusive"


def cmd_dilation(args, out: Output) -> bool:
    m, _ = _load_map(args)
    zeta = INFINITY if args.zeta.strip().upper() == "INFINITY" else parse_point(args.zeta)
    z = (1,) + (0,) * (m.q - 1) if zeta is INFINITY else zeta
    if args.approach:
        approach = [parse_point(a) for a in args.approach]
    elif args.radial:
        approach = [tuple((1 - 10.0 ** -k) * complex(c) for c in z) for k in range(1, args.radial + 1)]
    else:
        raise UsageError("give --approach points or --radial K")
    lam = dilation_at(m, zeta, approach, digits=args.digits)
    out.doc = {"command": "dilation", "map": m.text(), "zeta": zeta, "dilation": lam}
    out.lines = [f"dilation at {fmt_point(zeta)} = {fmt_real(lam)}"]
    return True


def cmd_partition(args, out: Output) -> bool:
    m, _ = _load_map(args)
    if not args.sample:
        raise UsageError("give at least one --sample")
    samples = [parse_point(s) for s in args.sample]
    part = partition(m, samples, args.n_max, digits=args.digits)
    classes = [{"members": [fmt_point(samples[i]) for i in c["members"]], "mu": c["mu"]} for c in part.classes]
    matrix = {f"{i},{j}": v for (i, j), v in sorted(part.verdicts.items())}
    out.doc = {"command": "stable-partition", "map": m.text(), "samples": samples, "classes": classes,
               "class_of": {str(k): v for k, v in sorted(part.class_of.items())},
               "unresolved": part.unresolved, "non_stable": part.non_stable, "verdicts": matrix}
    rows = []
    for i, s in enumerate(samples):
        label = part.class_of.get(i, "non-stable" if i in part.non_stable else "unresolved")
        rows.append([i, fmt_point(s), label])
    out.table = (["sample", "point", "class"], rows)
    out.lines = [f"{len(part.classes)} classes"]
    for k, c in enumerate(classes):
        mu = fmt_real(c["mu"]) if c["mu"] is not None else "?"
        out.lines.append(f"  class {k}: mu={mu}  {', '.join(c['members'])}")
    if part.non_stable:
        out.lines.append("  non-stable: " + ", ".join(fmt_point(samples[i]) for i in part.non_stable))
    if part.unresolved:
        out.lines.append("  unresolved: " + ", ".join(fmt_point(samples[i]) for i in part.unresolved))
    return not part.unresolved


def cmd_tangent(args, out: Output) -> bool:
    m, entry = _load_map(args)
    x = _point(args.point, entry)
    v = parse_point(args.dir)
    res = tangent_bounded(m, x, v, args.n_max, digits=args.digits)
    out.doc = {"command": "tangent", "map": m.text(), "point": x, "dir": v, "verdict": res.verdict,
               "reason": res.reason, "series": [list(r) for r in res.series]}
    out.table = (["n", "kappa"], [list(r) for r in res.series])
    out.lines = [f"{res.verdict}: {res.reason}"] + [f"  n={n:<6d} {fmt_real(k)}" for n, k in res.series]
    return res.verdict != "inconclusive"


def _premodel_from_file(path: str) -> PreModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read pre-model file: {exc}") from None
    try:
        params = doc.get("params", {})
        g = parse_map(doc["g"], params=params, self_map=False)
        tau = parse_map(doc["tau"], params=params)
    except KeyError as exc:
        raise UsageError(f"pre-model file lacks key {exc.args[0]!r}") from None
    z = doc.get("Z")
    if z:
        kind, q = z.split()
        Z = Domain(kind, int(q))
    else:
        Z = g.domain
    return PreModel(Z, g, tau, name=path)


def cmd_premodel(args, out: Output) -> bool:
    m, _ = _load_map(args)
    if (args.premodel_r is None) == (args.premodel_file is None):
        raise UsageError("give exactly one of --premodel-r, --premodel-file")
    pm = siegel_example_premodel(args.premodel_r) if args.premodel_file is None else _premodel_from_file(args.premodel_file)
    probes = [parse_point(p) for p in args.probe] if args.probe else None
    m_max = args.m_max or 20
    rep = verify_premodel(m, pm, probes, m_max=m_max, digits=args.digits)
    out.doc = {"command": "verify-premodel", "map": m.text(), "premodel": pm.name, "g": pm.g.text(),
               "tau": pm.tau.text(), "intertwining_residual": rep.intertwining_residual,
               "step_residual": rep.step_residual, "step_residuals": rep.step_residuals,
               "collisions": rep.collisions, "outside": rep.outside, "m_max": rep.m_max,
               "passed": rep.passed()}
    out.table = (["probe", "step_residual"], [[fmt_point(p), r] for p, r in zip(rep.probes, rep.step_residuals)])
    out.lines = [
        f"pre-model {pm.name}: {'PASS' if rep.passed() else 'FAIL'}",
        f"  intertwining residual {fmt_real(rep.intertwining_residual)}",
        f"  step identity residual {fmt_real(rep.step_residual)} (m <= {rep.m_max})",
        f"  collisions {rep.collisions}, images outside domain {rep.outside}",
    ]
    return rep.passed()


def cmd_sigma(args, out: Output) -> bool:
    val = sigma_closed_form(args.theta, args.lam, args.m)
    out.doc = {"command": "sigma-formula", "theta": args.theta, "lambda": args.lam, "m": args.m, "sigma": val,
               "sigma_over_m": val / args.m if args.m else math.nan}
    out.table = (["theta", "lambda", "m", "sigma"], [[args.theta, args.lam, args.m, val]])
    out.lines = [f"sigma_{args.m} = {fmt_real(val)}"]
    return True


def cmd_catalog(args, out: Output) -> bool:
    if args.action == "list":
        rows = catalog_list()
        out.doc = {"command": "catalog", "entries": [{"name": n, "description": d, "params": p} for n, d, p in rows]}
        out.table = (["name", "description"], [[n, d] for n, d, _ in rows])
        out.lines = [f"{n:24s} {d}" for n, d, _ in rows]
        return True
    if not args.name:
        raise UsageError("catalog show needs a name")
    try:
        e = catalog_get(args.name, _params(args))
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    truth = {k: {"value": t.value, "provenance": t.provenance, "oracle": t.oracle} for k, t in e.truth.items()}
    out.doc = {"command": "catalog", "name": e.name, "params": e.params, "map": e.map.text(),
               "description": e.description, "sample_point": e.sample_point, "truth": truth}
    out.table = (["field", "value", "provenance", "oracle"],
                 [[k, _cell(_jsonable(t.value)), t.provenance, t.oracle] for k, t in e.truth.items()])
    out.lines = [f"{e.name}: {e.description}", f"  map: {e.map.text()}"]
    out.lines += [f"  {k}: {_jsonable(t.value)} [{t.provenance}{': ' + t.oracle if t.oracle else ''}]"
                  for k, t in e.truth.items()]
    return True


COMMANDS = {
    "orbit": cmd_orbit,
    "steps": cmd_steps,
    "rate": cmd_rate,
    "classify": cmd_classify,
    "dw": cmd_dw,
    "dilation": cmd_dilation,
    "stable-partition": cmd_partition,
    "tangent": cmd_tangent,
    "verify-premodel": cmd_premodel,
    "sigma-formula": cmd_sigma,
    "catalog": cmd_catalog,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(args)
        out = Output(args.format)
        with use_convention(args.convention):
            ok = COMMANDS[args.command](args, out)
        text = out.render()
    except (UsageError, OrbitlabError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"orbitlab {args.command}: error: {msg}", file=stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if args.strict and not ok:
        print(f"orbitlab {args.command}: inconclusive", file=stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
