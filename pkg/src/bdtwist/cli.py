"""Command line front end.

    bdtwist triples A 2
    bdtwist compat --config job.json
    bdtwist twist --config job.json --out results/
    bdtwist verify results/r_prime.json

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from bdtwist.bdstruct import (
    BDTriple,
    CompatibleForm,
    DegenerateRestriction,
    solve_compatible,
    sublattice_L,
    validate_triple,
)
from bdtwist.borel import DEFAULT_HEIGHT_CAP
from bdtwist.qfa import RMatrix, verify_R
from bdtwist.rootdata import RootDataError, RootDatum, build, parse_type

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

SCHEMA_VERSION = 1


class InputError(ValueError):
    pass


@dataclass
class JobConfig:
    rd: RootDatum
    triple: BDTriple
    form: object
    omega: str
    height_cap: int
    sign: int
    root_desc: dict


def _load_document(path: str) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        if p.suffix == ".toml":
            return tomllib.loads(text)
        return json.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise InputError(f"cannot parse {path}: {exc}") from None


def _root_from(desc) -> RootDatum:
    try:
        if isinstance(desc, str):
            return parse_type(desc)
        if "label" in desc:
            return parse_type(desc["label"])
        return build(str(desc["type"]), int(desc["rank"]))
    except (KeyError, TypeError, ValueError, RootDataError) as exc:
        raise InputError(f"bad root datum {desc!r}: {exc}") from None


def load_config(path: str | None, args: argparse.Namespace) -> JobConfig:
    doc = _load_document(path) if path else {}
    root = doc.get("root")
    if getattr(args, "type", None):
        root = {"type": args.type, "rank": args.rank}
    if root is None:
        raise InputError("config has no root datum")
    rd = _root_from(root)
    try:
        triple = BDTriple.from_json(doc.get("triple", {}))
    except (TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"bad triple: {exc}") from None
    rep = validate_triple(rd, triple)
    if not rep.ok:
        raise InputError("invalid triple: " + "; ".join(rep.violations))
    omega = args.omega or doc.get("omega", "weight")
    if omega not in ("root", "weight"):
        raise InputError(f"omega must be 'root' or 'weight', not {omega!r}")
    sign_name = args.sign or doc.get("sign", "plus")
    if sign_name not in ("plus", "minus"):
        raise InputError(f"sign must be 'plus' or 'minus', not {sign_name!r}")
    cap = args.height_cap if args.height_cap is not None else int(doc.get("height_cap", DEFAULT_HEIGHT_CAP))
    if cap < 1:
        raise InputError("height cap must be positive")
    return JobConfig(rd, triple, doc.get("form", "solve"), omega, cap, 1 if sign_name == "plus" else -1, root)


def _fr(x) -> Fraction:
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {x!r}") from None


def choose_form(cfg: JobConfig):
    """(CompatibleForm, solution space) for the configured form selection."""
    rd, t = cfg.rd, cfg.triple
    space = solve_compatible(rd, t, cfg.sign)
    form = cfg.form
    if form == "zero":
        u = None
    elif form == "solve" or (isinstance(form, dict) and "solve" in form):
        if space is None:
            raise InputError("no compatible form exists for this triple")
        params = form["solve"] if isinstance(form, dict) else []
        if len(params) > space.dim:
            raise InputError(f"{len(params)} parameters given, solution space has dimension {space.dim}")
        u = space.point([_fr(p) for p in params])
    elif isinstance(form, dict) and "u" in form:
        try:
            u = [[_fr(x) for x in row] for row in form["u"]]
        except TypeError:
            raise InputError("form u must be a matrix of rationals") from None
    else:
        raise InputError(f"unknown form selection {form!r}")
    try:
        cf = CompatibleForm(rd, u, cfg.sign)
    except (ValueError, IndexError) as exc:
        raise InputError(str(exc)) from None
    bad = cf.violations(t)
    if bad:
        raise InputError("form is not compatible with the triple: " + "; ".join(bad))
    return cf, space


def _omega(cfg: JobConfig):
    return cfg.rd.weight_lattice() if cfg.omega == "weight" else cfg.rd.root_lattice()


def _envelope(command: str, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, **body}


def cmd_triples(args) -> tuple[dict, int]:
    from bdtwist.bdstruct import enumerate_disjoint

    rd = _root_from({"type": args.type, "rank": args.rank})
    ts = enumerate_disjoint(rd)
    return _envelope("triples", {"root": rd.to_json(), "count": len(ts), "triples": [t.to_json() for t in ts]}), 0


def cmd_compat(args) -> tuple[dict, int]:
    cfg = load_config(args.config, args)
    cf, space = choose_form(cfg)
    omega = _omega(cfg)
    lattices = {}
    try:
        for i in (1, 2):
            L, Lt = sublattice_L(cf, cfg.triple, i, omega)
            lattices[f"L{i}"] = L.to_json()
            lattices[f"L{i}_plus"] = Lt.to_json()
    except DegenerateRestriction as exc:
        raise InputError(str(exc)) from None
    body = {
        "root": cfg.rd.to_json(),
        "triple": cfg.triple.to_json(),
        "sign": "plus" if cfg.sign == 1 else "minus",
        "omega": cfg.omega,
        "solution_space": space.to_json() if space is not None else None,
        "form": cf.to_json(),
        "lattices": lattices,
    }
    return _envelope("compat", body), 0


def cmd_twist(args) -> tuple[dict, int]:
    from bdtwist.twist import run_twist

    cfg = load_config(args.config, args)
    cf, _ = choose_form(cfg)
    try:
        report, R, Rp, _ = run_twist(cfg.rd, cf, cfg.triple, cfg.height_cap, _omega(cfg))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    body = {
        "root": cfg.rd.to_json(),
        "triple": cfg.triple.to_json(),
        "form": cf.to_json(),
        "report": report.to_json(),
        "r": R.to_json(),
        "pass": report.ok,
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "r.json", _envelope("r", R.to_json()))
        _write(out / "r_prime.json", _envelope("r_prime", Rp.to_json()))
        _write(out / "twist_report.json", _envelope("twist", body))
    return _envelope("twist", body), 0 if report.ok else 1


def cmd_verify(args) -> tuple[dict, int]:
    doc = _load_document(args.path)
    try:
        R = RMatrix.from_json(doc)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not an R-matrix document: {exc}") from None
    rep = verify_R(R)
    body = rep.to_json()
    body["pass"] = rep.ok
    body["support"] = "standard pattern" if rep.standard_support else "nonstandard"
    return _envelope("verify", body), 0 if rep.ok else 1


def _write(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bdtwist", description="Cocycle twists of multiparameter quantum groups.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config: bool = True):
        if config:
            sp.add_argument("--config", help="job document (JSON or TOML)")
        sp.add_argument("--out", help="directory for output files")
        sp.add_argument("--height-cap", type=int, default=None)
        sp.add_argument("--omega", choices=("root", "weight"), default=None)
        sp.add_argument("--sign", choices=("plus", "minus"), default=None)

    t = sub.add_parser("triples", help="list disjoint triples")
    t.add_argument("type")
    t.add_argument("rank", type=int)
    common(t, config=False)
    for name, hlp in (("compat", "solve for compatible forms and lattices"), ("twist", "build the cocycle and twisted R")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("--type", default=None, help="override the root type")
        sp.add_argument("--rank", type=int, default=None)
    v = sub.add_parser("verify", help="check an R-matrix document")
    v.add_argument("path")
    common(v, config=False)
    return p


COMMANDS = {"triples": cmd_triples, "compat": cmd_compat, "twist": cmd_twist, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        doc, code = COMMANDS[args.command](args)
    except InputError as exc:
        print(json.dumps(_envelope(args.command, {"error": str(exc)}), sort_keys=True), file=sys.stderr)
        return 2
    text = json.dumps(doc, sort_keys=True, indent=2)
    print(text)
    if args.out and args.command != "twist":
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.json").write_text(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
