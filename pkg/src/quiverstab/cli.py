"""Command-line front end: ``quiverstab <command> FILE [options]``.

Exit codes: 0 success, 1 domain error, 2 cap exceeded, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import families as fm
from . import knum
from . import representation as rp
from . import stability as st
from . import walls as wl
from .document import Document, load_document
from .errors import InvariantViolation, ParseError, QuiverStabError
from .quiver import DEFAULT_PATH_CAP, is_acyclic

DEFAULT_SEED = 20240601
CAP_NAMES = ("submodules", "iso", "census", "paths")
DEFAULT_CAPS = {
    "submodules": rp.DEFAULT_SUBMODULE_CAP,
    "iso": rp.DEFAULT_ISO_CAP,
    "census": wl.DEFAULT_CENSUS_CAP,
    "paths": DEFAULT_PATH_CAP,
}
SURROGATE_NOTE = "computed over a finite prime field as a desk-scale surrogate for an algebraically closed field"


def caps_from_env(env: str | None) -> dict:
    """Parse ``QUIVERSTAB_CAPS`` of the form ``submodules=1000,iso=500``."""
    caps = dict(DEFAULT_CAPS)
    if not env:
        return caps
    for item in env.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in CAP_NAMES:
            raise QuiverStabError(f"bad QUIVERSTAB_CAPS entry '{item}'")
        if not val.strip().isdigit() or int(val) <= 0:
            raise QuiverStabError(f"cap '{key}' must be a positive integer")
        caps[key] = int(val)
    return caps


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _rat_list(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got '{text}'")


def _rat(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational, got '{text}'")


def _positive(text: str) -> int:
    if not text.isdigit() or int(text) <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got '{text}'")
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quiverstab", description="Stability of quiver representations over F_p.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="quiver description document")
    common.add_argument("--cap-submodules", type=_positive)
    common.add_argument("--cap-iso", type=_positive)
    common.add_argument("--cap-census", type=_positive)
    common.add_argument("--cap-paths", type=_positive)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--jobs", type=_positive, default=1)
    common.add_argument("--format", choices=("json", "csv", "human"), default="json")
    common.add_argument("--nilpotent", action="store_true", help="cycle check: nilpotent instead of zero")
    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--params", dest="params_name", help="named params line of the document")
    params.add_argument("--theta", type=_rat_list)
    params.add_argument("--lambda", dest="lam", type=_rat_list)
    params.add_argument("--xi", type=_rat)
    params.add_argument("--v", type=_int_list)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common, params], help="validate presentation, reps and families")
    sub.add_parser("euler", parents=[common], help="Euler matrix")
    pr = sub.add_parser("pairing-report", parents=[common], help="chi([P_j],[S_i]) Gram matrix")
    pr.add_argument("--p", type=int, default=2)
    for name, helptext in (("stable", "theta and sigma verdicts"), ("hn", "HN filtration"), ("jh", "JH factors")):
        sp = sub.add_parser(name, parents=[common, params], help=helptext)
        sp.add_argument("--rep", action="append", help="representation name (default: all)")
    sq = sub.add_parser("sequiv", parents=[common, params], help="S-equivalence of two reps")
    sq.add_argument("--rep", action="append", required=True)
    w = sub.add_parser("walls", parents=[common, params], help="potential (and actual) walls")
    w.add_argument("--actual", action="store_true", help="decide actuality by census")
    w.add_argument("--p", type=int, default=2)
    sub.add_parser("chambers", parents=[common, params], help="chambers of Theta_v")
    c = sub.add_parser("census", parents=[common, params], help="classify all reps of class v")
    c.add_argument("--p", type=int, default=2)
    n = sub.add_parser("nef", parents=[common, params], help="l.C positivity report for families")
    n.add_argument("--family", action="append")
    s = sub.add_parser("sweep", parents=[common, params], help="seeded randomized invariant suites")
    s.add_argument("--draws", type=_positive, default=50)
    return parser


# ------------------------------------------------------------------ helpers


def _caps(args) -> dict:
    caps = caps_from_env(os.environ.get("QUIVERSTAB_CAPS"))
    for name in CAP_NAMES:
        val = getattr(args, f"cap_{name}", None)
        if val is not None:
            caps[name] = val
    return caps


def _params(args, doc: Document, v=None) -> st.StabilityParams | None:
    base = None
    if getattr(args, "params_name", None):
        if args.params_name not in doc.params:
            raise QuiverStabError(f"no params named '{args.params_name}'")
        base = doc.params[args.params_name]
    elif doc.params:
        base = doc.default_params()
    theta = args.theta if getattr(args, "theta", None) is not None else (base.theta if base else None)
    if theta is None:
        return None
    n = len(doc.presentation.quiver.vertices)
    lam = args.lam if getattr(args, "lam", None) is not None else (base.lam if base else (1,) * n)
    xi = args.xi if getattr(args, "xi", None) is not None else (base.xi if base else 0)
    vv = getattr(args, "v", None) or v or (base.v if base else None)
    if vv is None:
        raise QuiverStabError("class v unknown: pass --v")
    return st.StabilityParams(tuple(theta), tuple(lam), xi, tuple(vv))


def _class_v(args, doc: Document) -> tuple[int, ...]:
    if getattr(args, "v", None):
        v = args.v
    elif doc.params:
        v = doc.default_params().v
    else:
        raise QuiverStabError("class v unknown: pass --v")
    if len(v) != len(doc.presentation.quiver.vertices):
        raise QuiverStabError(f"--v has {len(v)} entries for {len(doc.presentation.quiver.vertices)} vertices")
    return tuple(v)


def _reps(args, doc: Document, names=None):
    names = names if names is not None else getattr(args, "rep", None)
    if not names:
        return list(doc.reps.items())
    out = []
    for name in names:
        if name not in doc.reps:
            raise QuiverStabError(f"no rep named '{name}'")
        out.append((name, doc.reps[name]))
    return out


def _require_params(p):
    if p is None:
        raise QuiverStabError("no stability parameters: add a params line or pass --theta/--v")
    return p


# ----------------------------------------------------------------- commands


def cmd_check(args, doc, caps):
    q = doc.presentation.quiver
    out = {
        "vertices": list(q.vertices),
        "arrows": [[a.name, a.source, a.target] for a in q.arrows],
        "relations": len(doc.presentation.relations),
        "acyclic": is_acyclic(q),
        "reps": {},
        "families": {},
        "params": {k: p.to_json() for k, p in doc.params.items()},
        "warnings": list(doc.warnings),
    }
    for name, m in doc.reps.items():
        out["reps"][name] = {
            "dim": list(m.dims),
            "cycles_act_as_zero": rp.cycles_act_as_zero(m, max(1, len(q.vertices)), args.nilpotent),
        }
    params = _params(args, doc)
    for name, fam in doc.families.items():
        use = params if params is not None and params.v == fam.v else None
        fm.check_family(fam, use, caps["submodules"])
        out["families"][name] = {"v": list(fam.v), "fibers_checked": use is not None}
    return out, 0


def cmd_euler(args, doc, caps):
    pres = doc.presentation
    out = {}
    if doc.tor is not None:
        e = knum.euler_form_from_tor(doc.tor)
        out["euler"] = e.to_json()
        out["truncated"] = doc.tor.truncated
    if is_acyclic(pres.quiver) and not pres.relations:
        e2 = knum.euler_form_acyclic(pres)
        if "euler" in out:
            out["agrees_with_acyclic"] = e2.matrix == e.matrix
        else:
            out["euler"] = e2.to_json()
            canon = knum.euler_form_from_tor(knum.canonical_tor_table(pres))
            out["agrees_with_acyclic"] = canon.matrix == e2.matrix
    if "euler" not in out:
        raise QuiverStabError("presentation has cycles or relations and no Tor data; add 'tor' lines")
    return out, 0


def cmd_pairing(args, doc, caps):
    e = knum.euler_form_from_tor(doc.tor) if doc.tor is not None else None
    rep = knum.verify_perfect_pairing(doc.presentation, args.p, e)
    return rep.to_json(), 0 if rep.passed else 3


def cmd_stable(args, doc, caps):
    params = _require_params(_params(args, doc))
    out = {"params": params.to_json(), "reps": {}}
    for name, m in _reps(args, doc):
        entry = {"dim": list(m.dims)}
        if m.total_dim:
            entry["sigma_semistable"] = st.is_sigma_semistable(m, params, caps["submodules"])
            entry["sigma_stable"] = st.is_sigma_stable(m, params, caps["submodules"])
            entry["charge"] = st.central_charge(params, m.dims).to_json()
        if m.dims == params.v:
            entry["theta_semistable"] = st.is_theta_semistable(m, params, caps["submodules"])
            entry["theta_stable"] = st.is_theta_stable(m, params, caps["submodules"])
            if m.total_dim and entry["theta_semistable"] != entry["sigma_semistable"]:
                raise InvariantViolation(f"theta and sigma semistability disagree on {name}")
        out["reps"][name] = entry
    out["support_constant"] = st.fmt(st.support_constant(params))
    gen, wit = st.is_generic(params)
    out["generic"] = {"value": gen, "witnesses": [list(w) for w in wit]}
    return out, 0


def cmd_hn(args, doc, caps):
    params = _require_params(_params(args, doc))
    return {
        "params": params.to_json(),
        "reps": {name: st.hn_filtration(m, params, caps["submodules"]).to_json() for name, m in _reps(args, doc)},
    }, 0


def cmd_jh(args, doc, caps):
    params = _require_params(_params(args, doc))
    return {
        "params": params.to_json(),
        "reps": {name: _jh_entry(m, params, caps) for name, m in _reps(args, doc)},
    }, 0


def _jh_entry(m, params, caps) -> dict:
    if not st.is_sigma_semistable(m, params, caps["submodules"]):
        return {"semistable": False, "factors": []}
    out = st.jh_factors(m, params, caps["submodules"], caps["iso"]).to_json()
    out["semistable"] = True
    return out


def cmd_sequiv(args, doc, caps):
    if len(args.rep) != 2:
        raise QuiverStabError("sequiv takes exactly two --rep options")
    params = _require_params(_params(args, doc))
    (na, a), (nb, b) = _reps(args, doc)
    return {
        "params": params.to_json(),
        "reps": [na, nb],
        "s_equivalent": st.s_equivalent(a, b, params, caps["submodules"], caps["iso"]),
    }, 0


def cmd_walls(args, doc, caps):
    v = _class_v(args, doc)
    walls = wl.potential_walls(v)
    out = {"v": list(v), "walls": [w.to_json() for w in walls]}
    degenerate = [w for w in wl.potential_walls(v, include_degenerate=True) if w.degenerate]
    out["degenerate"] = [w.to_json() for w in degenerate]
    if args.actual:
        verdicts = wl.actual_walls(doc.presentation, v, walls, args.p, caps["census"])
        out["actual"] = [x.to_json() for x in verdicts]
        out["p"] = args.p
    return out, 0


def cmd_chambers(args, doc, caps):
    v = _class_v(args, doc)
    walls = wl.potential_walls(v)
    chs = wl.chambers(v, walls)
    out = {
        "v": list(v),
        "walls": [list(w.w) for w in walls],
        "chambers": [c.to_json() for c in chs],
        "count": len(chs),
    }
    if len(wl.theta_basis(v)) == 2:
        out["plot_basis"] = [[st.fmt(x) for x in b] for b in wl.theta_basis(v)]
        out["plot_segments"] = [
            {"w": list(w), "x0": st.fmt(a), "y0": st.fmt(b), "x1": st.fmt(c), "y1": st.fmt(d)}
            for w, a, b, c, d in wl.plot_segments(v, walls)
        ]
    return out, 0


def cmd_census(args, doc, caps):
    v = _class_v(args, doc)
    params = _params(args, doc, v)
    theta = params.theta if params is not None else (0,) * len(v)
    cen = wl.census(doc.presentation, v, theta, args.p, caps["census"], caps["iso"], caps["submodules"])
    return cen.to_json(), 0


def cmd_nef(args, doc, caps):
    if not doc.families:
        raise QuiverStabError("document has no family blocks")
    names = args.family or list(doc.families)
    out = {"families": {}}
    code = 0
    for name in names:
        if name not in doc.families:
            raise QuiverStabError(f"no family named '{name}'")
        fam = doc.families[name]
        params = _require_params(_params(args, doc, fam.v))
        rep = fm.positivity_report(fam, params, caps["submodules"], caps["iso"])
        entry = rep.to_json()
        entry["params"] = params.to_json()
        entry["det_degrees"] = list(fm.det_degrees(fam))
        entry["knum_class"] = list(fm.knum_class(fam))
        out["families"][name] = entry
        if rep.verdict == "flagged" or not rep.routes_agree or not rep.nef:
            code = 3
    if len(names) == 1:
        single = out["families"][names[0]]
        out.update({k: single[k] for k in ("ell_determinant", "ell_charge", "dichotomy")})
    return out, code


def _sweep_family(task):
    fam, v, seed, draws = task
    rng = random.Random(seed)
    bad = []
    for k in range(draws):
        params = st.random_params(v, rng)
        a = fm.ell_dot_C_determinant(fam, params).value
        b = fm.ell_dot_C_charge(fam, params).value
        t = fm.ell_dot_C_determinant(fam.twisted(rng.randint(-3, 3)), params).value
        if a != b or a != t:
            bad.append({"draw": k, "params": params.to_json(), "determinant": st.fmt(a), "charge": st.fmt(b)})
    return bad


def _sweep_rep(task):
    m, seed, draws, cap = task
    rng = random.Random(seed)
    bad = []
    for k in range(draws):
        params = st.random_params(m.dims, rng)
        t = st.is_theta_semistable(m, params, cap)
        s = st.is_sigma_semistable(m, params, cap)
        scaled = params.scaled(Fraction(rng.randint(1, 7), rng.randint(1, 7)))
        s2 = st.is_sigma_semistable(m, scaled, cap)
        hn = st.hn_filtration(m, params, cap)
        hn2 = st.hn_filtration(m, scaled, cap)
        ok = t == s == s2 and hn.factor_dims == hn2.factor_dims
        ok = ok and all(st.support_holds(params, f.dims) for f in hn.factors)
        if not ok:
            bad.append({"draw": k, "params": params.to_json()})
    return bad


def _pmap(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))  # map keeps input order


def cmd_sweep(args, doc, caps):
    fam_tasks = [(f, f.v, args.seed + k, args.draws) for k, f in enumerate(doc.families.values())]
    rep_items = [(n, m) for n, m in doc.reps.items() if m.total_dim]
    rep_tasks = [(m, args.seed + 1000 + k, min(args.draws, 20), caps["submodules"]) for k, (_, m) in enumerate(rep_items)]
    fam_res = _pmap(_sweep_family, fam_tasks, args.jobs)
    rep_res = _pmap(_sweep_rep, rep_tasks, args.jobs)
    out = {
        "suites": {
            "route_equality_and_twist": {
                "cases": len(fam_tasks) * args.draws,
                "violations": {n: r for n, r in zip(doc.families, fam_res) if r},
            },
            "theta_sigma_scaling_hn_support": {
                "cases": sum(t[2] for t in rep_tasks),
                "violations": {n: r for (n, _), r in zip(rep_items, rep_res) if r},
            },
        }
    }
    total = sum(len(r) for r in fam_res + rep_res)
    out["violations"] = total
    return out, 3 if total else 0


COMMANDS = {
    "check": cmd_check,
    "euler": cmd_euler,
    "pairing-report": cmd_pairing,
    "stable": cmd_stable,
    "hn": cmd_hn,
    "jh": cmd_jh,
    "sequiv": cmd_sequiv,
    "walls": cmd_walls,
    "chambers": cmd_chambers,
    "census": cmd_census,
    "nef": cmd_nef,
    "sweep": cmd_sweep,
}


# ------------------------------------------------------------------ output


def _csv(command: str, out: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "chambers" and "plot_segments" in out:
        w.writerow(["w", "x0", "y0", "x1", "y1"])
        for s in out["plot_segments"]:
            w.writerow([" ".join(map(str, s["w"])), s["x0"], s["y0"], s["x1"], s["y1"]])
    elif command == "chambers":
        w.writerow(["signs", "witness"])
        for c in out["chambers"]:
            w.writerow([c["signs"], " ".join(c["witness"])])
    elif command == "census":
        w.writerow(["status", "count", "dim", "matrices"])
        for c in out["classes"]:
            w.writerow([c["status"], c["count"], " ".join(map(str, c["rep"]["dim"])), json.dumps(c["rep"]["matrices"])])
    else:
        w.writerow(["key", "value"])
        for k, v in sorted(out.items()):
            w.writerow([k, json.dumps(v, sort_keys=True)])
    return buf.getvalue()


def _human(out: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for k, v in out.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_human(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {json.dumps(v)}")
    return "\n".join(x for x in lines if x)


def render(command: str, out: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(out, indent=2, sort_keys=True) + "\n"
    if fmt_name == "csv":
        return _csv(command, out)
    return _human(out) + "\n"


def _error_doc(command, err, seed) -> dict:
    doc = {
        "command": command,
        "seed": seed,
        "status": "error",
        "exit_code": getattr(err, "exit_code", 1),
        "error": {"code": getattr(err, "code", "domain_error"), "message": str(err)},
    }
    if isinstance(err, ParseError):
        doc["error"]["line"] = err.line
        doc["error"]["column"] = err.column
    return doc


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        caps = _caps(args)
        doc = load_document(args.file)
        result, code = COMMANDS[args.command](args, doc, caps)
        out = {
            "command": args.command,
            "seed": args.seed,
            "status": "ok" if code == 0 else "invariant_violation",
            "exit_code": code,
            "caps": caps,
            "note": SURROGATE_NOTE,
            "result": result,
        }
        stdout.write(render(args.command, out if args.format != "csv" else result, args.format))
        return code
    except QuiverStabError as err:
        stderr.write(f"quiverstab {args.command}: {err}\n")
        if args.format == "json":
            stdout.write(render(args.command, _error_doc(args.command, err, args.seed), "json"))
        return err.exit_code
    except (ValueError, OSError) as err:
        stderr.write(f"quiverstab {args.command}: {err}\n")
        if args.format == "json":
            stdout.write(render(args.command, _error_doc(args.command, err, args.seed), "json"))
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
