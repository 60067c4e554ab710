"""Command-line front end.

    magnetic-lift lattice dump --lattice U+U+E8(-1)
    magnetic-lift lift check-magnetic --lattice U+U+E8(-1) --form f.json --lambda0 1,1,0,0,0,0,0,0,0,0 --lmax 30 --s 6

Exit status: 0 when everything ran and every check passed, 1 when a check
failed (the report is still written), 2 for bad input or configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import tomli

from .arith import format_rational, parse_rational
from .elliptic import EllipticError, classical_magnetic_report, fkdD_coefficients, j_divisibility_report
from .lattice import EvenLattice, LatticeError, builtin, cusp_data, milgram_sum
from .lift import LiftError, LiftProblem, check_magnetic, expand
from .qseries import PrecisionError, eval_monomial, monomial_weight, parse_monomial
from .vvmf import FormError, bol, check_input_divisibility, from_scalar, load_form_file
from .weil import WeilRep

OK, CHECK_FAILED, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    options: dict[str, Any] = field(default_factory=dict)
    output: str | None = None
    fmt: str = "json"


# ---------------------------------------------------------------------------
# input helpers


def _vector(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(parse_rational(str(x)) for x in text)
    return tuple(parse_rational(x.strip()) for x in str(text).split(",") if x.strip())


def _load_json(path: str):
    if not os.path.exists(path):
        raise InputError(f"file not found: {path}")
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_lattice(ref: str) -> tuple[EvenLattice, dict]:
    """A built-in name such as ``U+U+E8(-1)`` or a JSON file ``{gram, [e], [eprime], [name]}``."""
    if ref is None:
        raise InputError("--lattice is required")
    if ref.endswith(".json") or os.sep in ref or os.path.exists(ref):
        data = _load_json(ref)
        if "gram" not in data:
            raise InputError(f"{ref}: missing 'gram'")
        L = EvenLattice(data["gram"], name=data.get("name", ref))
        return L, data
    return builtin(ref), {}


def default_isotropic_pair(L: EvenLattice) -> tuple[tuple, tuple]:
    """e, e' spanning a leading hyperbolic plane U(c)."""
    G = L.gram
    if L.rank >= 2 and G[0][0] == 0 and G[1][1] == 0 and G[0][1] != 0:
        n = L.rank
        e = (1,) + (0,) * (n - 1)
        ep = (0, Fraction(1, G[0][1])) + (0,) * (n - 2)
        return e, ep
    raise InputError("no default isotropic pair: give e and eprime in the lattice file or with --e/--eprime")


def lattice_hash(L: EvenLattice) -> str:
    return hashlib.sha256(json.dumps(L.gram).encode()).hexdigest()[:16]


def _cusp(L: EvenLattice, meta: dict, opts: dict):
    e = opts.get("e") or meta.get("e")
    ep = opts.get("eprime") or meta.get("eprime")
    if e is None or ep is None:
        e, ep = default_isotropic_pair(L)
    return cusp_data(L, [int(x) for x in _vector(e)], _vector(ep))


# ---------------------------------------------------------------------------
# commands; each returns (report dict, passed)


def cmd_lattice_dump(o):
    L, meta = load_lattice(o["lattice"])
    D = L.disc
    out = {
        "lattice": L.name,
        "lattice_hash": lattice_hash(L),
        "gram": L.gram,
        "signature": list(L.signature),
        "det": L.det,
        "level": L.level(),
        "elementary_divisors": list(D.elementary_divisors),
        "discriminant": [{"coset": list(g), "q": format_rational(D.q(g))} for g in D.elements],
        "milgram_sum": milgram_sum(L).to_json(),
    }
    try:
        c = _cusp(L, meta, o)
        out["cusp"] = {
            "e": list(c.e),
            "eprime": [format_rational(x) for x in c.eprime],
            "zeta": list(c.zeta),
            "N_e": c.N_e,
            "K_gram": c.K.gram,
            "K_basis": c.K_basis,
        }
    except (InputError, LatticeError):
        pass
    return out, True


def cmd_weil_dump(o):
    L, _ = load_lattice(o["lattice"])
    W = WeilRep.from_lattice(L)
    which = o.get("matrix") or "both"
    out = {"lattice": L.name, "lattice_hash": lattice_hash(L), "cyclo_order": W.cyclo_order,
           "cosets": [list(g) for g in W.elements]}
    if which in ("S", "both"):
        out["S"] = W.matrix_to_json(W.rho_S)
    if which in ("T", "both"):
        out["T"] = W.matrix_to_json(W.rho_T)
    return out, True


def _build_form(o, L):
    expr = o.get("expr")
    if not expr:
        raise InputError("--expr is required (e.g. E4^2/Delta)")
    prec = int(o.get("prec") or 0)
    if prec < 1:
        raise InputError("--prec must be a positive integer")
    mono = parse_monomial(expr)
    f = from_scalar(eval_monomial(mono, prec), WeilRep.from_lattice(L), monomial_weight(mono))
    if o.get("bol"):
        f = bol(f, int(o["bol"]))
    return f


def cmd_form_build(o):
    L, _ = load_lattice(o["lattice"])
    f = _build_form(o, L)
    return f.to_json(lattice_ref=L.name), True


def _load_form(o, L):
    if o.get("form"):
        if not os.path.exists(o["form"]):
            raise InputError(f"file not found: {o['form']}")
        try:
            return load_form_file(o["form"], WeilRep.from_lattice(L))
        except json.JSONDecodeError as exc:
            raise InputError(f"{o['form']}: malformed JSON at line {exc.lineno} column {exc.colno}") from exc
        except (KeyError, TypeError) as exc:
            raise InputError(f"{o['form']}: malformed form file ({exc})") from exc
    return _build_form(o, L)


def cmd_form_check_div(o):
    L, _ = load_lattice(o["lattice"])
    f = _load_form(o, L)
    N = int(o.get("N") or L.level())
    s = int(o.get("s") or 2)
    rep = check_input_divisibility(f, N, s)
    out = {"lattice": L.name, "lattice_hash": lattice_hash(L), "prec": format_rational(f.prec), **rep.to_json()}
    return out, rep.passed


def _problem(o):
    L, meta = load_lattice(o["lattice"])
    f = _load_form(o, L)
    return LiftProblem(L, _cusp(L, meta, o), f)


def cmd_lift_expand(o):
    P = _problem(o)
    H = parse_rational(str(o.get("height") or 1))
    w0 = _vector(o["w0"]) if o.get("w0") else None
    ex = expand(P, w0, H)
    out = ex.to_json()
    out.update({"lattice": P.lattice.name, "lattice_hash": lattice_hash(P.lattice), "prec": format_rational(P.form.prec),
                "kappa": P.kappa})
    return out, True


def cmd_lift_check_magnetic(o):
    P = _problem(o)
    if not o.get("lambda0"):
        raise InputError("--lambda0 is required")
    lam0 = [int(x) for x in _vector(o["lambda0"])]
    report = check_magnetic(
        P,
        lam0,
        int(o.get("lmax") or 1),
        int(o.get("s") or 2),
        N=int(o["N"]) if o.get("N") else None,
        certify_input=not o.get("skip_input_check"),
        cusp_forms_trivial=True if o.get("cusp_forms_trivial") else None,
    )
    out = report.to_json()
    out.update({"lattice": P.lattice.name, "lattice_hash": lattice_hash(P.lattice), "prec": format_rational(P.form.prec)})
    return out, report.passed


def cmd_elliptic_fkdd(o):
    ex = fkdD_coefficients(
        int(o.get("k") or 2),
        int(o["d"]),
        int(o["D"]),
        int(o.get("nmax") or 10),
        int(o.get("bits") or 256),
        a_max=int(o.get("amax") or 50),
        strict=not o.get("non_strict"),
    )
    out = ex.to_json()
    y = ex.pole_height + 1
    out["reference_height"] = str(y)
    out["lipschitz_tail_at_reference"] = str(ex.lipschitz_tail(y))
    out["class_tail_at_reference"] = str(ex.class_tail(y))
    return out, True


def cmd_elliptic_check_classical(o):
    name = o.get("name") or "E4D_over_E6sq"
    prec = int(o.get("prec") or 500)
    rep = classical_magnetic_report(name, prec + 1)
    return {"name": name, "prec": prec, **rep.to_json()}, rep.passed


def cmd_elliptic_check_j(o):
    rep = j_divisibility_report(int(o.get("bound") or 100))
    return rep.to_json(), rep.passed


COMMANDS = {
    ("lattice", "dump"): cmd_lattice_dump,
    ("weil", "dump"): cmd_weil_dump,
    ("form", "build"): cmd_form_build,
    ("form", "check-div"): cmd_form_check_div,
    ("lift", "expand"): cmd_lift_expand,
    ("lift", "check-magnetic"): cmd_lift_check_magnetic,
    ("elliptic", "fkdd"): cmd_elliptic_fkdd,
    ("elliptic", "check-classical"): cmd_elliptic_check_classical,
    ("elliptic", "check-j"): cmd_elliptic_check_j,
}

_OPTIONS = {
    "lattice": str, "form": str, "expr": str, "prec": int, "bol": int, "N": int, "s": int,
    "e": str, "eprime": str, "height": str, "w0": str, "lambda0": str, "lmax": int,
    "matrix": str, "k": int, "d": int, "D": int, "nmax": int, "bits": int, "amax": int,
    "name": str, "bound": int,
}
_FLAGS = ("cusp_forms_trivial", "skip_input_check", "non_strict")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magnetic-lift", description="Magnetic modular forms via the additive theta lift.")
    p.add_argument("--config", help="TOML file whose keys provide defaults for the options below")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "table"), default="json")
    sub = p.add_subparsers(dest="group")
    groups: dict[str, argparse._SubParsersAction] = {}
    for group, action in COMMANDS:
        if group not in groups:
            groups[group] = sub.add_parser(group).add_subparsers(dest="action")
        sp = groups[group].add_parser(action)
        for name, typ in _OPTIONS.items():
            sp.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, default=None)
        for flag in _FLAGS:
            sp.add_argument(f"--{flag.replace('_', '-')}", dest=flag, action="store_true", default=None)
        sp.add_argument("--out", dest="sub_out", default=None)
        sp.add_argument("--format", dest="sub_format", choices=("json", "table"), default=None)
    return p


def parse_job(argv: Sequence[str]) -> JobConfig:
    args = build_parser().parse_args(list(argv))
    if not args.group or not getattr(args, "action", None):
        raise InputError("choose a command, e.g. 'lattice dump' or 'elliptic check-j'")
    opts: dict[str, Any] = {}
    if args.config:
        if not os.path.exists(args.config):
            raise InputError(f"file not found: {args.config}")
        try:
            with open(args.config, "rb") as fh:
                cfg = tomli.load(fh)
        except tomli.TOMLDecodeError as exc:
            raise InputError(f"{args.config}: {exc}") from exc
        for key, value in cfg.items():
            key = key.replace("-", "_")
            if key not in _OPTIONS and key not in _FLAGS and key not in ("out", "format"):
                raise InputError(f"{args.config}: unknown key {key!r}")
            opts[key] = value
    for name in list(_OPTIONS) + list(_FLAGS):
        v = getattr(args, name)
        if v is not None:
            opts[name] = v
    out = args.sub_out or args.out or opts.pop("out", None)
    fmt = args.sub_format or (args.format if args.format != "json" else None) or opts.pop("format", None) or "json"
    opts.pop("out", None)
    opts.pop("format", None)
    return JobConfig(f"{args.group} {args.action}", opts, out, fmt)


def _table(report: dict) -> str:
    lines = []
    for key in sorted(report):
        v = report[key]
        if isinstance(v, (list, dict)):
            lines.append(f"{key}: [{len(v)} items]" if isinstance(v, list) else f"{key}: {json.dumps(v, sort_keys=True)}")
        else:
            lines.append(f"{key}: {v}")
    fails = report.get("failures") or report.get("failing")
    if isinstance(fails, list) and fails:
        lines.append("failing entries:")
        lines.extend("  " + json.dumps(e, sort_keys=True) for e in fails[:50])
    entries = report.get("entries")
    if isinstance(entries, list):
        lines.append("entries:")
        lines.extend(f"  l={e.get('ell')} modulus={e.get('modulus')} {e.get('verdict')}" for e in entries)
    return "\n".join(lines) + "\n"


def run(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        job = parse_job(argv)
        group, action = job.command.split(" ")
        report, passed = COMMANDS[(group, action)](job.options)
    except SystemExit as exc:  # argparse usage errors
        return INPUT_ERROR if exc.code else OK
    except PrecisionError as exc:
        req = None if exc.required is None else format_rational(Fraction(exc.required))
        print(f"error: {exc} (required precision: more than {req})", file=sys.stderr)
        return INPUT_ERROR
    except (InputError, LatticeError, FormError, LiftError, EllipticError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    report = {"schema": 1, "command": job.command, "parameters": _jsonable(job.options), **report}
    text = _table(report) if job.fmt == "table" else json.dumps(report, sort_keys=True, indent=2) + "\n"
    if job.output:
        with open(job.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK if passed else CHECK_FAILED


def _jsonable(opts: dict) -> dict:
    return {k: (v if isinstance(v, (int, str, bool, float, list)) else str(v)) for k, v in sorted(opts.items())}


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
