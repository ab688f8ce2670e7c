"""Command-line front end: one binary, many subcommands.

Exit codes: 0 a verdict was computed (of either polarity), 1 an axiom
witness check came out witness-invalid, 2 bad input, 3 a Groebner budget
was exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from . import axioms as ax
from . import efield as ef
from . import formula as fm
from . import gvariety as gv
from . import khovanskii as kh
from . import torus as tr
from .formats import format_gv, format_ks, parse_inputs
from .linalg import IntMat, int_rank
from .poly import GroebnerBudgetError, ParseError, budget, parse_poly

EXIT_OK, EXIT_WITNESS_INVALID, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

_INPUT_ERRORS = (ParseError, OSError, ValueError, ef.EFieldError, gv.PreconditionError,
                 tr.TorusError, kh.KhovanskiiError, ax.AxiomError, fm.FormulaError)


class _Job:
    """Collects input digests and bounds while a subcommand runs."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.bounds: dict[str, object] = {}

    def load(self, path: str, kind: str):
        if not path.endswith(kind):
            raise ValueError(f"{path}: expected a {kind} file")
        with open(path, "rb") as fh:
            self.inputs[path] = hashlib.sha256(fh.read()).hexdigest()
        return parse_inputs(path, kind)

    def bound(self, name: str, value, minimum: int = 1):
        if value is not None and isinstance(value, int) and value < minimum:
            raise ValueError(f"--{name} must be at least {minimum}")
        self.bounds[name] = value
        return value


# ---------------------------------------------------------------- argument helpers

def _elements(F: ef.EFieldPresentation, text: str | None) -> ef.ElementTuple:
    if not text:
        return ef.ElementTuple(())
    return F.tuple(*[s.strip() for s in text.split(",") if s.strip()])


def _matrix(text: str) -> IntMat:
    rows = []
    for r in text.split(";"):
        try:
            rows.append([int(v) for v in r.replace(" ", "").split(",") if v])
        except ValueError:
            raise ValueError(f"bad matrix row {r!r}") from None
    if not rows or not rows[0] or len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows must be nonempty and of equal length")
    return IntMat.from_rows(rows, cols=len(rows[0]))


def _residues(text: str) -> dict[int, int]:
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m, sep, r = part.partition("=")
        if not sep:
            raise ValueError(f"residues read m=r, got {part!r}")
        out[int(m)] = int(r)
    return out


def _params(items: Sequence[str] | None) -> dict[str, str]:
    out = {}
    for it in items or []:
        k, sep, v = it.partition("=")
        if not sep:
            raise ValueError(f"--param reads name=element, got {it!r}")
        out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------- subcommands

def cmd_rotund(job, a):
    V = job.load(a.file, ".gv")
    depth = job.bound("depth", a.depth)
    return gv.rotund_up_to(V, depth).to_json()


def cmd_free(job, a):
    V = job.load(a.file, ".gv")
    return gv.freeness_report(V, job.bound("height", a.height)).to_json()


def cmd_act(job, a):
    V = job.load(a.file, ".gv")
    M = _matrix(a.matrix)
    job.bounds["matrix"] = M.to_rows()
    W = gv.act(M, V)
    return {"image": format_gv(W), "dim": W.dim, "rank": int_rank(M)}


def cmd_atypical(job, a):
    W = job.load(a.file, ".mv")
    return tr.atypical_witness(W, job.bound("depth", a.depth)).to_json()


def cmd_depth(job, a):
    M = _matrix(a.rows)
    H = tr.TorusSubgroup.from_rows(M.cols, M.to_rows())
    cap = job.bound("depth", a.depth)
    job.bounds["rows"] = M.to_rows()
    return {"subgroup": H.M.to_rows(), "describe": H.describe(), "dim": H.dim,
            "depth": tr.subgroup_depth(H, cap), "cap": cap}


def cmd_predim(job, a):
    F = job.load(a.file, ".ef")
    x = _elements(F, a.tuple)
    X = ef.SubPresentation().joined(F, _elements(F, a.over))
    out = {"tuple": a.tuple, "over": a.over or ""}
    if all(c is not None for _, c in F.resolve(x)):
        out["delta"] = ef.predim_delta(F, x, X)
    else:
        out["delta"] = None
        out["delta_note"] = "some entries lie outside D"
    out["Delta"] = ef.predim_Delta(F, x, X)
    return out


def _probes(F, items):
    return [_elements(F, p) for p in items or []]


def cmd_strong(job, a):
    F = job.load(a.file, ".ef")
    X = ef.SubPresentation().joined(F, _elements(F, a.over)) if a.over != "whole" else F.whole()
    return ef.check_strong(F, X, _probes(F, a.probe)).to_json()


def cmd_semistrong(job, a):
    F1 = job.load(a.file, ".ef")
    F = job.load(a.sub, ".ef")
    return ef.check_semistrong(F1, F.as_sub_of(F1), _probes(F1, a.probe)).to_json()


def cmd_ela_step(job, a):
    F = job.load(a.file, ".ef")
    level = job.bound("level", a.level)
    if a.algebraic:
        req = ef.Algebraic(a.algebraic, a.symbol)
    elif a.exp:
        req = ef.Exponentiate(a.exp)
    else:
        req = ef.Logarithm(a.log, a.symbol)
    G, rec = ef.ela_step(F, req, level)
    return {"step": rec.to_json(), "presentation": G.canonical()}


def cmd_kernel_extend(job, a):
    F = job.load(a.file, ".ef")
    level = job.bound("level", a.level)
    new = [F.element(s) for s in a.new]
    res = [_residues(r) for r in (a.residues or [])]
    G = ef.kernel_extend(F, new, res, level)
    return {"presentation": G.canonical()}


def cmd_khovanskii(job, a):
    S = job.load(a.file, ".ks")
    if a.action == "derive":
        if not 1 <= a.equation <= S.width:
            raise ValueError(f"--equation must lie in 1..{S.width}")
        d = kh.exp_derive(S.polys[a.equation - 1], a.index)
        return {"equation": a.equation, "index": a.index, "derivative": d.text()}
    if a.action == "jacobian":
        return {"system": format_ks(S), "jacobian": kh.jacobian_det(S).text(),
                "chi": fm.to_text(kh.chi_formula(S))}
    if not a.field:
        raise ValueError("verify needs --field")
    F = job.load(a.field, ".ef")
    return kh.verify_certificate(F, S, _elements(F, a.point)).to_json()


def cmd_axiom(job, a):
    if a.action == "strong-kernel-instance":
        V = job.load(a.variety, ".gv")
        f = ax.strong_kernel_instance(V)
        return {"formula": fm.to_text(f), "json": f.to_json()}
    if a.action == "seac-instance":
        V = job.load(a.variety, ".gv")
        rot, fr = ax.certify(V, job.bound("depth", a.depth), job.bound("height", a.height))
        f = ax.seac_instance(V, job.bound("r", a.r, 0), rotundity=rot, freeness=fr,
                             irreducible=a.irreducible)
        return {"formula": fm.to_text(f), "json": f.to_json()}
    if not a.field:
        raise ValueError(f"{a.action} needs --field")
    F = job.load(a.field, ".ef")
    V = job.load(a.variety, ".gv")
    params = _params(a.param)
    if a.action == "check-strong-kernel":
        rep = ax.check_strong_kernel_witness(F, V, _elements(F, a.point), job.bound("depth", a.depth), params)
    elif a.action == "check-seac":
        rep = ax.check_seac_witness(F, V, _elements(F, a.b), _elements(F, a.point),
                                    job.bound("height", a.height), params)
    else:
        x = _elements(F, a.point) if a.point else None
        rep = ax.check_eac_witness(F, V, x, params, job.bound("depth", a.depth) if a.certify else None)
    out = rep.to_json()
    out["reverified"] = rep.reverify()
    return out


def cmd_reduce(job, a):
    V = job.load(a.file, ".gv")
    avoid = parse_poly(a.avoid, V.ctx) if a.avoid else None
    cfg = ax.ReductionConfig(depth=job.bound("depth", a.depth), height=job.bound("height", a.height),
                             seed=job.bound("seed", a.seed, 0), avoid=avoid)
    try:
        trail = ax.eac_reduction_pipeline(V, cfg)
    except ax.PipelineError as e:
        return {"status": "aborted", "error": str(e), **e.trail.to_json()}
    return {"status": "complete", **trail.to_json()}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--budget-degree", type=int, default=None, help="abort beyond this S-polynomial degree")
    common.add_argument("--budget-terms", type=int, default=None, help="abort beyond this many basis terms")

    p = argparse.ArgumentParser(prog="expfield", description="Exact checks for exponential-algebraic geometry")
    p.add_argument("--version", action="version", version=f"expfield {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.set_defaults(fn=fn)
        return s

    s = add("rotund", cmd_rotund, "rotundity up to a matrix height")
    s.add_argument("file")
    s.add_argument("--depth", type=int, default=2)

    s = add("free", cmd_free, "additive and multiplicative freeness")
    s.add_argument("file")
    s.add_argument("--height", type=int, default=1)

    s = add("act", cmd_act, "image of a G-variety under an integer matrix")
    s.add_argument("file")
    s.add_argument("--matrix", required=True, help="rows separated by ';', entries by ','")

    s = add("atypical", cmd_atypical, "atypical intersections with subgroups")
    s.add_argument("file")
    s.add_argument("--depth", type=int, default=2)

    s = add("depth", cmd_depth, "depth of an algebraic subgroup")
    s.add_argument("--rows", required=True, help="relation rows, e.g. '2,-1'")
    s.add_argument("--depth", type=int, default=4, help="search cap")

    s = add("predim", cmd_predim, "delta and Delta of a tuple")
    s.add_argument("file")
    s.add_argument("--tuple", required=True)
    s.add_argument("--over", default="")

    s = add("strong", cmd_strong, "strongness over probe tuples")
    s.add_argument("file")
    s.add_argument("--over", default="", help="base elements, or 'whole'")
    s.add_argument("--probe", action="append")

    s = add("semistrong", cmd_semistrong, "semistrongness of a subpresentation")
    s.add_argument("file")
    s.add_argument("--sub", required=True)
    s.add_argument("--probe", action="append")

    s = add("ela-step", cmd_ela_step, "one step of the ELA closure")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--algebraic", help="polynomial in the generators and --symbol")
    g.add_argument("--exp", help="element to exponentiate")
    g.add_argument("--log", help="element to take a logarithm of")
    s.add_argument("--symbol", default="s")
    s.add_argument("--level", type=int, default=2)

    s = add("kernel-extend", cmd_kernel_extend, "extend the kernel")
    s.add_argument("file")
    s.add_argument("--new", action="append", required=True)
    s.add_argument("--residues", action="append", help="one 'm=r,...' table per --new")
    s.add_argument("--level", type=int, default=2)

    s = add("khovanskii", cmd_khovanskii, "derivatives, Jacobians and certificates")
    s.add_argument("action", choices=("derive", "jacobian", "verify"))
    s.add_argument("file")
    s.add_argument("--equation", type=int, default=1)
    s.add_argument("--index", type=int, default=1)
    s.add_argument("--field")
    s.add_argument("--point", default="")

    s = add("axiom", cmd_axiom, "scheme instances and witness checks")
    s.add_argument("action", choices=("strong-kernel-instance", "seac-instance", "check-strong-kernel",
                                      "check-seac", "check-eac"))
    s.add_argument("variety")
    s.add_argument("--field")
    s.add_argument("--point", default="")
    s.add_argument("--b", default="")
    s.add_argument("--param", action="append", help="name=element")
    s.add_argument("--r", type=int, default=0)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--height", type=int, default=1)
    s.add_argument("--irreducible", action="store_true", help="assert that V is irreducible")
    s.add_argument("--certify", action="store_true", help="certify rotundity before an EAC check")

    s = add("reduce", cmd_reduce, "EAC reduction pipeline")
    s.add_argument("file")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--height", type=int, default=1)
    s.add_argument("--avoid", help="polynomial for the final extension step")
    return p


# ---------------------------------------------------------------- output

def _plain(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    out = []
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v:
                out.append(f"{pad}{k}:")
                out.extend(_plain(v, indent + 1))
            elif isinstance(v, str) and "\n" in v:
                out.append(f"{pad}{k}: |")
                out.extend(pad + "  " + line for line in v.rstrip("\n").split("\n"))
            else:
                out.append(f"{pad}{k}: {json.dumps(v) if not isinstance(v, str) else v}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)):
                out.append(f"{pad}-")
                out.extend(_plain(v, indent + 1))
            else:
                out.append(f"{pad}- {v}")
    return out


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, IntMat):
        return o.to_rows()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def render(report: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(report, sort_keys=True, indent=2, default=_default) + "\n"
    clean = json.loads(json.dumps(report, default=_default))
    return "\n".join(_plain(clean)) + "\n"


_BOUNDS = (("depth", 1), ("height", 1), ("level", 1), ("seed", 0), ("r", 0))


def _exit_for(result: dict) -> int:
    if isinstance(result, dict) and result.get("verdict") == ax.INVALID:
        return EXIT_WITNESS_INVALID
    return EXIT_OK


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    job = _Job(args)
    report = {"tool": "expfield", "version": __version__, "command": args.command}
    code = EXIT_OK
    try:
        for name, minimum in _BOUNDS:
            if getattr(args, name, None) is not None:
                job.bound(name, getattr(args, name), minimum)
        if args.budget_degree is not None:
            job.bound("budget_degree", args.budget_degree)
        if args.budget_terms is not None:
            job.bound("budget_terms", args.budget_terms)
        with budget(args.budget_degree, args.budget_terms):
            result = args.fn(job, args)
        report["status"] = "ok"
        report["result"] = result
        code = _exit_for(result)
    except GroebnerBudgetError as e:
        report["status"] = "budget-exceeded"
        report["error"] = {"message": str(e), "stats": dict(e.stats)}
        partial = getattr(e, "partial", None)
        if partial is not None:
            report["error"]["partial"] = partial.to_json()
        code = EXIT_BUDGET
    except _INPUT_ERRORS as e:
        report["status"] = "input-error"
        info = {"message": str(e), "kind": type(e).__name__}
        if isinstance(e, ParseError):
            info.update(line=e.line, col=e.col, source=e.source)
        report["error"] = info
        code = EXIT_INPUT
    report["bounds"] = dict(job.bounds)
    report["inputs"] = dict(job.inputs)
    report["exit_code"] = code
    if code == EXIT_INPUT and not args.json:
        print(f"error: {report['error']['message']}", file=err)
    else:
        out.write(render(report, args.json))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
