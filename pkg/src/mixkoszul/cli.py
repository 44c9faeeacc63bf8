"""Command line front end: ``km <command> <file> [options]``.

Problem files are JSON objects::

    {"ring": {"variables": ["x", "y"], "relations": ["x^2-y^3"]},
     "a": ["3*x", "2*y"],
     "A": [["2*x", "-3*y^2"]],
     "E": {"rank": 1, "generators": [["x"]]},
     "icis": {"f": ["x^2-y^3"], "V": ["3*x", "2*y"]},
     "options": {"nu": 0, "seed": 0, "mu_cap": 24, "nu_cap": 24}}

When ``icis`` is present the ring is the germ's local ring, ``a`` is the
vector field and ``A`` the Jacobian matrix.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from . import complexes, icis, localalg, multiplicities as mult
from .errors import InputError, KMError, ParseError
from .localalg import INFINITE, RingSpec, SubmodulePresentation
from .polyring import Poly, PolyVec, Q, format_poly

COMMANDS = ("sb", "colength", "chi", "mixed", "param-mult", "alt-mult", "index", "verify")
PROPERTIES = (
    "thm01", "thm02", "nu-independence", "gl-invariance",
    "additivity-129", "cm-length-1210", "reduction-423", "delta-23",
)
INPUT_CODES = {"PARSE_ERROR", "UNKNOWN_VARIABLE", "INPUT_ERROR"}


class Problem:
    """Parsed problem file."""

    def __init__(self, data: dict):
        if not isinstance(data, dict):
            raise InputError("problem file must contain a JSON object")
        self.raw = data
        self.options = dict(data.get("options") or {})
        self.germ = None
        self.vf = None
        if "icis" in data:
            section = data["icis"]
            variables = _ring_variables(data)
            self.germ = icis.ICISGerm.parse(variables, _strings(section.get("f"), "icis.f"))
            ambient = self.germ.ambient()
            self.vf = icis.VectorField([ambient.poly(s) for s in _strings(section.get("V"), "icis.V")])
            self.ring = self.germ.ring()
            self.a, self.A = icis.jacobian_and_relation(self.germ, self.vf)
        else:
            ring = data.get("ring")
            if not isinstance(ring, dict):
                raise InputError("missing ring")
            self.ring = RingSpec.parse(_strings(ring.get("variables"), "ring.variables"),
                                       _strings(ring.get("relations", []), "ring.relations"))
            self.a = [self.ring.poly(s) for s in _strings(data["a"], "a")] if "a" in data else None
            self.A = None
            if "A" in data:
                rows = data["A"]
                if not isinstance(rows, list) or not rows:
                    raise InputError("A must be a non-empty list of rows")
                self.A = [[self.ring.poly(s) for s in _strings(row, "A row")] for row in rows]
                if len({len(r) for r in self.A}) != 1:
                    raise InputError("rows of A have different lengths")
        self.E = None
        if "E" in data:
            E = data["E"]
            rank = int(E.get("rank", 1))
            gens = []
            for col in E.get("generators", []):
                col = _strings(col, "E generator")
                if len(col) != rank:
                    raise InputError("E generator has the wrong length")
                gens.append(PolyVec.from_polys([self.ring.poly(s) for s in col], self.ring.nvars))
            self.E = SubmodulePresentation(self.ring, rank, tuple(gens))

    def need_a(self):
        if self.a is None:
            raise InputError("this command needs the sequence 'a'")
        return self.a

    def need_A(self):
        if self.A is None:
            raise InputError("this command needs the matrix 'A'")
        return self.A

    def submodule(self) -> SubmodulePresentation:
        """The ideal (a) if present, otherwise the column module of A."""
        if self.a is not None and self.germ is None:
            return SubmodulePresentation.ideal(self.ring, self.a)
        A = self.need_A()
        return SubmodulePresentation.from_columns(self.ring, len(A), [[row[j] for row in A] for j in range(len(A[0]))])


def _ring_variables(data):
    ring = data.get("ring")
    if isinstance(ring, dict) and "variables" in ring:
        return _strings(ring["variables"], "ring.variables")
    section = data["icis"]
    return _strings(section.get("variables"), "icis.variables")


def _strings(value, what):
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise InputError(f"{what} must be a list of strings")
    return value


def _fmt_vec(ring, v: PolyVec):
    comps = [format_poly(p, ring.variables) for p in v.components()]
    return comps[0] if v.rank == 1 else comps


def _fmt_length(x):
    return "INFINITE" if x is INFINITE else x


# ---------- commands ----------

def cmd_sb(pb: Problem, opts):
    N = pb.submodule()
    sb = localalg.standard_basis(N)
    names = pb.ring.variables
    lts = []
    for comp, exps in sb.leading_terms():
        mono = format_poly(Poly._raw(len(names), {exps: Q(1)}), names)
        lts.append(mono if N.rank == 1 else [comp + 1, mono])
    return {"basis": [_fmt_vec(pb.ring, v) for v in sb.elements], "leading_terms": lts}


def cmd_colength(pb: Problem, opts):
    return _fmt_length(localalg.colength(pb.submodule()))


def _double_complex(pb, nu):
    return complexes.mixed_double_complex(pb.need_a(), pb.need_A(), nu, pb.ring)


def cmd_chi(pb: Problem, opts):
    C = _double_complex(pb, opts["nu"])
    lengths = complexes.homology_lengths(C)
    return {
        "nu": opts["nu"],
        "homology": {str(k): _fmt_length(v) for k, v in sorted(lengths.items())},
        "chi": complexes.euler_characteristic(C, lengths),
    }


def _pair(pb):
    return mult.IdealModulePair(pb.ring, pb.need_a(), pb.need_A())


def cmd_mixed(pb: Problem, opts):
    mv = mult.mixed_multiplicities(_pair(pb), mu_cap=opts["mu_cap"], nu_cap=opts["nu_cap"])
    return {"e": mv.e, "alternating_sum": mv.alternating_sum(), "window": mv.degree_witness}


def _param_system(pb):
    A = pb.need_A()
    return mult.ParamSystem(pb.ring, pb.need_a(), A, len(A), pb.E)


def cmd_param_mult(pb: Problem, opts):
    return {"e": mult.param_multiplicity(_param_system(pb), opts["nu"]), "nu": opts["nu"]}


def _index_seq(pb):
    idx = pb.options.get("index")
    return list(idx) if idx else list(range(1, pb.ring.dim + 2))


def cmd_alt_mult(pb: Problem, opts):
    a, A = pb.need_a(), pb.need_A()
    T = mult.find_admissible_transform(a, A, pb.ring, seed=opts["seed"])
    terms = mult.alternating_terms(T.a, T.A, _index_seq(pb), pb.ring)
    return {"value": sum(terms), "terms": terms, "transform": T.g}


def cmd_index(pb: Problem, opts):
    if pb.germ is None:
        raise InputError("index needs an 'icis' section")
    return icis.index_of_vector_field(pb.germ, pb.vf, seed=opts["seed"]).to_json()


# ---------- verification properties ----------

def _chi(pb, nu):
    return complexes.euler_characteristic(_double_complex(pb, nu))


def v_thm01(pb, opts):
    lhs = _chi(pb, opts["nu"])
    rhs = mult.mixed_multiplicities(_pair(pb), opts["mu_cap"], opts["nu_cap"]).alternating_sum()
    return lhs, rhs


def v_thm02(pb, opts):
    a, A = pb.need_a(), pb.need_A()
    T = mult.find_admissible_transform(a, A, pb.ring, seed=opts["seed"])
    return _chi(pb, 0), mult.alternating_multiplicity(T.a, T.A, list(range(1, pb.ring.dim + 2)), pb.ring)


def v_nu(pb, opts):
    values = [_chi(pb, nu) for nu in (0, 1, 2)]
    return values[0], values


def v_gl(pb, opts):
    a, A = pb.need_a(), pb.need_A()
    idx = list(range(1, pb.ring.dim + 2))
    T = mult.find_admissible_transform(a, A, pb.ring, seed=opts["seed"])
    lhs = mult.alternating_multiplicity(T.a, T.A, idx, pb.ring)
    g = mult.random_invertible(len(a), random.Random(opts["seed"]))
    ag, Ag = mult.apply_transform(g, a, A, pb.ring)
    T2 = mult.find_admissible_transform(ag, Ag, pb.ring, seed=opts["seed"] + 1)
    return lhs, mult.alternating_multiplicity(T2.a, T2.A, idx, pb.ring)


def v_additivity(pb, opts):
    a, A = pb.need_a(), pb.need_A()
    if not a or not A[0]:
        raise InputError("additivity needs at least one element of a and one column of A")
    m = len(A)
    ak = a[-1]
    first = [[ak * row[0]] + row[1:] for row in A]
    rest = [row[1:] for row in A]
    e = mult.param_multiplicity
    lhs = e(mult.ParamSystem(pb.ring, a[:-1], first, m, pb.E), opts["nu"])
    rhs = (e(mult.ParamSystem(pb.ring, a, rest, m, pb.E), opts["nu"])
           + e(mult.ParamSystem(pb.ring, a[:-1], A, m, pb.E), opts["nu"]))
    return lhs, rhs


def v_cm_length(pb, opts):
    PS = _param_system(pb)
    return mult.param_multiplicity(PS, opts["nu"]), _fmt_length(localalg.colength(PS.finite_length_module()))


def v_reduction(pb, opts):
    P = _pair(pb)
    N = mult.general_reduction(P.matrix, pb.ring, seed=opts["seed"])
    lhs = mult.mixed_multiplicities(P, opts["mu_cap"], opts["nu_cap"]).e
    rhs = mult.mixed_multiplicities(mult.IdealModulePair(pb.ring, P.ideal_gens, N), opts["mu_cap"], opts["nu_cap"]).e
    return lhs, rhs


def v_delta(pb, opts):
    n_max = int(pb.options.get("n_max", 6))
    cases = [(a, b, n) for n in range(1, n_max + 1) for a in range(n) for b in range(n - a)]
    failures = [list(c) for c in cases if not mult.delta_identity_check(*c)]
    return len(cases), len(cases) - len(failures)


VERIFIERS = {
    "thm01": v_thm01,
    "thm02": v_thm02,
    "nu-independence": v_nu,
    "gl-invariance": v_gl,
    "additivity-129": v_additivity,
    "cm-length-1210": v_cm_length,
    "reduction-423": v_reduction,
    "delta-23": v_delta,
}


def _equal(prop, lhs, rhs):
    if prop == "nu-independence":
        return all(v == lhs for v in rhs)
    return lhs == rhs


def cmd_verify(pb: Problem, opts):
    prop = opts["property"]
    lhs, rhs = VERIFIERS[prop](pb, opts)
    return {"property": prop, "lhs": lhs, "rhs": rhs, "equal": _equal(prop, lhs, rhs)}


HANDLERS = {
    "sb": cmd_sb,
    "colength": cmd_colength,
    "chi": cmd_chi,
    "mixed": cmd_mixed,
    "param-mult": cmd_param_mult,
    "alt-mult": cmd_alt_mult,
    "index": cmd_index,
    "verify": cmd_verify,
}


# ---------- driver ----------

def _options(pb: Problem | None, flags: dict) -> dict:
    base = {"nu": 0, "seed": 0, "mu_cap": mult.DEFAULT_CAP, "nu_cap": mult.DEFAULT_CAP}
    if pb is not None:
        for k in base:
            if k in pb.options:
                base[k] = int(pb.options[k])
    for k, v in flags.items():
        if v is not None:
            base[k] = v
    return base


def run(command: str, path: str, prop: str | None = None, **flags) -> tuple[dict, int]:
    """Run one command and return (report, exit code)."""
    start = time.perf_counter()
    report = {"command": command, "seed": flags.get("seed") or 0}
    code = 0
    try:
        if command not in HANDLERS:
            raise InputError(f"unknown command {command!r}")
        if command == "verify" and prop not in VERIFIERS:
            raise InputError(f"unknown property {prop!r}", known=list(PROPERTIES))
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", position=exc.pos) from None
        try:
            pb = Problem(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed problem file: {exc}") from None
        opts = _options(pb, flags)
        opts["property"] = prop
        report["seed"] = opts["seed"]
        report["result"] = HANDLERS[command](pb, opts)
        report["status"] = "ok"
    except KMError as exc:
        report["status"] = "error"
        report["error"] = exc.as_dict()
        code = 2 if exc.code in INPUT_CODES else 1
    report["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return report, code


def payload(report: dict) -> dict:
    """Report without the timing field (the deterministic part)."""
    return {k: v for k, v in report.items() if k != "timing_ms"}


def _to_json(obj, pretty):
    return json.dumps(obj, indent=2 if pretty else None, sort_keys=True, default=str)


def _write_atomic(text: str):
    """Write the full report in one call so it never interleaves."""
    out = sys.stdout
    out.write(text + "\n")
    out.flush()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="km", description="Mixed multiplicities and Koszul complexes over local rings.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("args", nargs="+", metavar="ARG", help="problem file, or PROPERTY FILE for verify")
    p.add_argument("--nu", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mu-cap", type=int, dest="mu_cap")
    p.add_argument("--nu-cap", type=int, dest="nu_cap")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="compact JSON output (default)")
    fmt.add_argument("--pretty", action="store_true", help="indented JSON output")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    prop = None
    args = list(ns.args)
    if ns.command == "verify":
        if len(args) != 2:
            parser.print_usage(sys.stderr)
            return 2
        prop, path = args
    else:
        if len(args) != 1:
            parser.print_usage(sys.stderr)
            return 2
        path = args[0]
    flags = {"nu": ns.nu, "seed": ns.seed, "mu_cap": ns.mu_cap, "nu_cap": ns.nu_cap}
    report, code = run(ns.command, path, prop, **flags)
    _write_atomic(_to_json(report, ns.pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
