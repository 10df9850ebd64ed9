"""Command-line front end: verdicts, identity checks, functionals and spectra.

Exit codes: 0 success, 1 identity-suite failure, 2 invalid input,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Sequence

from . import seifert_rr as rr
from .geometry import GeometryError, Weights

CATALOG_ENV = "REEB_MINIMIZER_CATALOG"

EXIT_OK = 0
EXIT_IDENTITY = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    deg: int
    genus: int
    fibers: tuple
    standard_a: Fraction = Fraction(1)
    notes: str = ""

    def seifert(self) -> rr.SeifertData:
        return rr.SeifertData(self.deg, self.genus, self.fibers)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "deg": self.deg,
            "genus": self.genus,
            "fibers": [list(f) for f in self.fibers],
            "standard_a": rr.format_rational(self.standard_a),
            "notes": self.notes,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CatalogEntry":
        try:
            return cls(
                name=str(obj["name"]),
                deg=int(obj["deg"]),
                genus=int(obj["genus"]),
                fibers=tuple((int(a), int(b)) for a, b in obj.get("fibers", [])),
                standard_a=rr.parse_rational(obj.get("standard_a", "1")),
                notes=str(obj.get("notes", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed catalog entry {obj!r}: {exc}") from exc


class Catalog:
    """Named Seifert data plus linear parametric families such as ``lens_p``."""

    def __init__(self, raw):
        if isinstance(raw, list):
            raw = {"entries": raw}
        if not isinstance(raw, dict):
            raise InputError("catalog must be a JSON array of entries or an object with 'entries'")
        self.entries: Dict[str, CatalogEntry] = {}
        for obj in raw.get("entries", []):
            e = CatalogEntry.from_json(obj)
            self.entries[e.name] = e
        self.families: List[dict] = list(raw.get("families", []))
        self.examples: List[str] = list(raw.get("examples", []))

    @classmethod
    def load(cls, path: Optional[str] = None) -> "Catalog":
        path = path or os.environ.get(CATALOG_ENV)
        try:
            if path:
                with open(path, encoding="utf-8") as fh:
                    raw = json.load(fh)
            else:
                raw = json.loads(
                    resources.files("reeb_minimizer").joinpath("data/catalog.json").read_text("utf-8")
                )
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read catalog {path or '<bundled>'}: {exc}") from exc
        return cls(raw)

    def names(self) -> List[str]:
        return sorted(self.entries) + [f"{f['prefix']}<{f['parameter']}>" for f in self.families]

    def lookup(self, name: str) -> CatalogEntry:
        if name in self.entries:
            return self.entries[name]
        for fam in self.families:
            prefix = fam["prefix"]
            if name.startswith(prefix) and name[len(prefix) :].isdigit():
                t = int(name[len(prefix) :])
                if t < int(fam.get("minimum", 0)):
                    raise InputError(f"{name}: parameter must be at least {fam['minimum']}")
                std = str(fam.get("standard_a", "1")).replace(fam["parameter"], str(t))
                return CatalogEntry(
                    name=name,
                    deg=fam["deg"][0] + fam["deg"][1] * t,
                    genus=fam["genus"][0] + fam["genus"][1] * t,
                    fibers=tuple((int(a), int(b)) for a, b in fam.get("fibers", [])),
                    standard_a=rr.parse_rational(std),
                    notes=fam.get("notes", ""),
                )
        raise InputError(f"unknown manifold {name!r}; known: {', '.join(self.names())}")


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_weights(text: str) -> Weights:
    try:
        k, l = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise InputError(f"weights must look like 'k,l', got {text!r}") from exc
    try:
        return Weights(k, l)
    except GeometryError as exc:
        raise InputError(str(exc)) from exc


def parse_seifert(text: str) -> rr.SeifertData:
    try:
        obj = json.loads(text)
        return rr.SeifertData(int(obj["deg"]), int(obj["genus"]), tuple(tuple(f) for f in obj.get("fibers", [])))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"--seifert expects JSON like {{\"deg\": -1, \"genus\": 0, \"fibers\": []}}: {exc}") from exc


def parse_positive_rational(text: str) -> Fraction:
    try:
        q = rr.parse_rational(text)
    except (rr.SeifertError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    if q <= 0:
        raise InputError(f"deformation constant must be positive, got {text}")
    return q


def _emit(obj: dict, as_json: bool, table) -> None:
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=False))
    else:
        for line in table(obj):
            print(line)


# ---------------------------------------------------------------------------
# commands


def cmd_verdict(args) -> int:
    sources = [args.named is not None, args.seifert is not None, args.weights is not None]
    if sum(sources) != 1:
        raise InputError("give exactly one of --named, --seifert, --weights")
    a = parse_positive_rational(args.deform)
    entry = None
    if args.named is not None:
        entry = Catalog.load(args.catalog).lookup(args.named)
        data, label = entry.seifert(), entry.name
    elif args.seifert is not None:
        data, label = parse_seifert(args.seifert), "custom"
    else:
        w = parse_weights(args.weights)
        data, label = rr.weighted_seifert(w.k, w.l), f"S3_w({w.k},{w.l})"
    v = rr.verdict(data, a)
    out = {"manifold": label, "seifert": str(rr.validate(data)), "c1": rr.format_rational(rr.chern_number(rr.validate(data)))}
    out.update(v.to_json())
    if entry is not None:
        std = rr.verdict(data, entry.standard_a)
        out["standard"] = {"a": rr.format_rational(entry.standard_a), "status": std.status, "notes": entry.notes}

    def table(o):
        yield f"manifold   {o['manifold']}  {o['seifert']}"
        yield f"c1(L)      {o['c1']}"
        yield f"mu1_D      {o['mu1_D']}"
        yield f"a0         {o['a0']}"
        yield f"a          {o['a']}  -> {o['status']}"
        if "standard" in o:
            yield f"standard   a = {o['standard']['a']}  -> {o['standard']['status']}"
        yield "mu  dim H^1"
        for mu, d in o["dims"].items():
            yield f"{mu:>3} {d:>6}"

    _emit(out, args.json, table)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .identities import DEFAULT_TOLERANCES, identity_suite

    w = parse_weights(args.weights)
    a = float(parse_positive_rational(args.deform))
    if args.samples < 1:
        raise InputError("--samples must be positive")
    tols = {}
    for item in args.tol or []:
        try:
            name, value = item.split("=")
            tols[name] = float(value)
        except ValueError as exc:
            raise InputError(f"--tol expects name=value, got {item!r}") from exc
        if name not in DEFAULT_TOLERANCES:
            raise InputError(f"unknown identity {name!r}")
    report = identity_suite(w, a, args.samples, args.seed, tols)

    def table(o):
        yield f"weights {tuple(o['weights'])}  a = {o['a']}  samples = {o['samples']}  seed = {o['seed']}"
        for r in o["results"]:
            flag = "ok  " if r["passed"] else "FAIL"
            yield f"{flag} {r['name']:<24} {r['value']:.3e}  (tol {r['tol']:.0e})"

    _emit(report.to_json(), args.json, table)
    if not report.passed:
        print("identity failures: " + ", ".join(report.failures), file=sys.stderr)
        return EXIT_IDENTITY
    return EXIT_OK


def _parse_grid(text: str):
    try:
        n_s, n_phi = (int(t) for t in text.split(","))
    except ValueError as exc:
        raise InputError(f"--grid expects 'ns,nphi', got {text!r}") from exc
    if n_s < 1 or n_phi < 1:
        raise InputError("grid sizes must be positive")
    return n_s, n_phi


def cmd_functionals(args) -> int:
    from .functionals import functional_report

    w = parse_weights(args.weights)
    a = float(parse_positive_rational(args.deform))
    report = functional_report(w, a, _parse_grid(args.grid))

    def table(o):
        yield f"weights {tuple(o['weights'])}  a = {o['a']}  grid = {tuple(o['grid'])}"
        for key in ("volume", "energy", "helicity", "hopf_q", "skyrme_f", "bound_rhs"):
            yield f"{key:<10} {o[key]:.12g}"
        for label, sv in o["second_variation"].items():
            yield f"second variation [{label}] mu = {sv['mu']:.6g}: {sv['value']:.10g} (expected {sv['expected']:.10g})"

    _emit(report.to_json(), args.json, table)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    from .spectrum import spectrum

    w = parse_weights(args.weights)
    a = float(parse_positive_rational(args.deform))
    if args.modes < 0 or args.radial < 4 or args.top < 1 or args.workers < 1:
        raise InputError("--modes must be >= 0, --radial >= 4, --top and --workers >= 1")
    report = spectrum(w, a, args.modes, args.radial, args.top, args.max_mu, args.workers)

    def table(o):
        yield f"weights {tuple(o['weights'])}  a = {o['a']}  M = {o['M']}  N = {o['N']}  top = {o['top']}"
        yield f"mu1 = {o['mu1']}  mu1_D = {o['mu1_D']}"
        yield "        mu  mult  D-tangent  max residual"
        for c in o["clusters"]:
            mark = "  (possibly incomplete)" if c["possibly_incomplete"] else ""
            yield f"{c['mu']:>10.6f} {c['multiplicity']:>5} {c['d_tangent']:>10}  {c['max_residual']:.1e}{mark}"

    _emit(report.to_json(), args.json, table)
    return EXIT_OK


def cmd_catalog(args) -> int:
    cat = Catalog.load(args.catalog)
    items = [cat.entries[n].to_json() for n in sorted(cat.entries)]
    items += [cat.lookup(n).to_json() for n in cat.examples]

    def table(o):
        for e in o["entries"]:
            fib = ", ".join(f"({a}, {b})" for a, b in e["fibers"]) or "-"
            yield f"{e['name']:<12} {{{e['deg']}, {e['genus']}; {fib}}}  standard a = {e['standard_a']}"

    _emit({"entries": items}, args.json, table)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="reeb-minimizer", description=__doc__.splitlines()[0])
    p.add_argument("--catalog", help=f"catalog JSON (default: ${CATALOG_ENV} or the bundled file)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    v = sub.add_parser("verdict", help="mu1_D, threshold a0 and minimizer status")
    v.add_argument("--named", help="catalog name, e.g. poincare or lens_5")
    v.add_argument("--seifert", help='JSON: {"deg": d, "genus": g, "fibers": [[a, b], ...]}')
    v.add_argument("--weights", help="weighted sphere k,l")
    v.add_argument("--deform", default="1", help="deformation constant a (p/q)")
    common(v)
    v.set_defaults(func=cmd_verdict)

    ver = sub.add_parser("verify", help="pointwise identity suite on the weighted sphere")
    ver.add_argument("--weights", required=True)
    ver.add_argument("--deform", default="1")
    ver.add_argument("--samples", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override one tolerance")
    common(ver)
    ver.set_defaults(func=cmd_verify)

    f = sub.add_parser("functionals", help="volume, energy, helicity, Hopf invariant, F and second variation")
    f.add_argument("--weights", required=True)
    f.add_argument("--deform", default="1")
    f.add_argument("--grid", default="64,32", help="ns,nphi")
    common(f)
    f.set_defaults(func=cmd_functionals)

    s = sub.add_parser("spectrum", help="curl eigenvalues by Fourier mode")
    s.add_argument("--weights", required=True)
    s.add_argument("--deform", default="1")
    s.add_argument("--modes", type=int, default=5, help="truncation M, |m|, |n| <= M")
    s.add_argument("--radial", type=int, default=200, help="radial nodes N")
    s.add_argument("--top", type=int, default=8, help="eigenvalues kept per mode")
    s.add_argument("--max-mu", type=float, default=None, help="discard |mu| above this")
    s.add_argument("--workers", type=int, default=1, help="threads for the per-mode solves")
    common(s)
    s.set_defaults(func=cmd_spectrum)

    c = sub.add_parser("catalog", help="list catalog entries")
    common(c)
    c.set_defaults(func=cmd_catalog)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    from .functionals import QuadratureError
    from .spectrum import SpectrumError

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, rr.SeifertError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (QuadratureError, SpectrumError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
