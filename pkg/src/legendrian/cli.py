"""Command-line front end.  Every command prints a report of named checks.

Exit status: 0 when no check FAILs, 1 otherwise, 2 for malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import acceptance, bryant, chernobstruct as cho, chowring, contact, roots
from .exactalg import MultiPoly, parse_poly

STATUSES = ("PASS", "FAIL", "SAMPLED", "UNKNOWN")


class InputError(ValueError):
    """Malformed file or flag value; exit status 2."""


@dataclass
class Report:
    command: str
    digest: str
    checks: list[tuple[str, str, str]] = field(default_factory=list)

    def add(self, name: str, status: str, detail: str = "") -> None:
        assert status in STATUSES, status
        self.checks.append((name, status, detail))

    def verdict(self, name: str, ok: bool, detail: str = "") -> None:
        self.add(name, "PASS" if ok else "FAIL", detail)

    @property
    def exit_code(self) -> int:
        return 1 if any(s == "FAIL" for _, s, _ in self.checks) else 0

    def as_json(self) -> str:
        body = {
            "schema": 1,
            "command": self.command,
            "inputs_digest": self.digest,
            "checks": [{"name": n, "status": s, "detail": d} for n, s, d in self.checks],
            "exit_code": self.exit_code,
        }
        return json.dumps(body, indent=2)

    def as_text(self) -> str:
        lines = [f"command: {self.command}", f"inputs: sha256:{self.digest}"]
        width = max((len(n) for n, _, _ in self.checks), default=0)
        for name, status, detail in self.checks:
            lines.append(f"{status:<8}{name:<{width}}  {detail}".rstrip())
        lines.append(f"exit: {self.exit_code}")
        return "\n".join(lines)


def _fmt(x) -> str:
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return str(x)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _vector(text: str) -> tuple[Fraction, ...]:
    try:
        v = contact.parse_vector(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not v:
        raise InputError(f"empty vector {text!r}")
    return v


def _poly(text: str, names: str | None) -> MultiPoly:
    if names:
        variables = tuple(v for v in re.split(r"[,\s]+", names) if v)
    else:
        found = set(re.findall(r"[A-Za-z_]\w*", text))
        variables = tuple(sorted(found, key=bryant._natural))
    if not variables:
        raise InputError("polynomial has no variables")
    return parse_poly(text, variables)


def _variety(args) -> cho.VarietyChernData:
    if args.algebra:
        return cho.from_algebra(chowring.parse_algebra(_read(args.algebra)))
    if args.catalog:
        try:
            return cho.catalog(args.catalog)
        except (KeyError, IndexError):
            raise InputError(f"unknown catalog entry {args.catalog!r}; known: {', '.join(cho.CATALOG_NAMES)}") from None
    raise InputError("give --catalog NAME or --algebra FILE")


def _form_file(text: str) -> contact.SymplecticForm:
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    matrix = [_vector(r) for r in rows if r]
    return contact.SymplecticForm(tuple(matrix))


# legendrian


def cmd_verify(args, rep: Report) -> None:
    chart = contact.parse_chart(_read(args.chart))
    if args.form:
        form = _form_file(_read(args.form))
        label = args.form
    else:
        form = contact.SymplecticForm.standard(chart.n)
        label = "standard form"
    verdict = contact.is_legendrian(chart, form)
    rep.verdict("chart immersive", chart.is_immersive(), f"generic jet rank {chart.generic_rank()} of {chart.n + 1}")
    detail = f"isotropic for {label}" if verdict else "; ".join(f"{k} = {v}" for k, v in verdict.violations[:5])
    rep.verdict("Legendrian", verdict.ok, detail)


def cmd_discover(args, rep: Report) -> None:
    chart = contact.parse_chart(_read(args.chart))
    search = contact.find_symplectic_forms(chart, args.seed)
    rep.add("compatible forms", "PASS" if search.dimension else "FAIL", f"dimension {search.dimension}")
    if search.nondegenerate:
        rep.add("nondegenerate member", "PASS", _fmt([list(r) for r in search.witness.matrix]))
    else:
        # random combinations can miss; absence is not proven
        rep.add("nondegenerate member", "UNKNOWN" if search.dimension else "FAIL", "none found among random combinations")


# bryant


def cmd_map(args, rep: Report) -> None:
    try:
        p = bryant.FlagPoint(_vector(args.x), _vector(args.y))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    image = bryant.phi_forward(p)
    if image is None:
        rep.add("phi", "UNKNOWN", f"indeterminate ({bryant.exceptional_stratum(p)})")
        return
    rep.add("phi", "PASS", _fmt(image))
    back = bryant.phi_inverse(image)
    rep.verdict("round trip", bryant.proportional(back.x, p.x) and bryant.proportional(back.y, p.y),
                f"x={_fmt(back.x)} y={_fmt(back.y)}")


def cmd_inverse(args, rep: Report) -> None:
    wz = _vector(args.wz)
    if len(wz) % 2 or len(wz) < 4:
        raise InputError("wz needs 2n >= 4 coordinates")
    try:
        p = bryant.phi_inverse(wz)
    except bryant.IndeterminateError as exc:
        rep.add("phi inverse", "UNKNOWN", str(exc))
        return
    rep.add("phi inverse", "PASS", f"x={_fmt(p.x)} y={_fmt(p.y)}")
    rep.verdict("round trip", bryant.proportional(bryant.phi_forward(p), wz))


def cmd_pullback(args, rep: Report) -> None:
    if args.n < 2:
        raise InputError("--n must be at least 2")
    r = bryant.contact_pullback_check(args.n)
    for chart, res in r.residuals.items():
        rep.verdict(f"residual on chart {chart}", not res,
                    "identically zero" if not res else f"{len(res)} nonzero coefficients")
    rep.verdict("phi*theta = x0 y_n theta'", r.zero, f"theta' = x dy - y dx, n={args.n}")


def _surface(args) -> bryant.HypersurfaceData:
    return bryant.parse_hypersurface(_read(args.surface))


def cmd_lift(args, rep: Report) -> None:
    Z = _surface(args)
    ch = bryant.conormal_chart(Z)
    rep.add("conormal chart", "PASS", f"x={_fmt([str(p) for p in ch.x])} y={_fmt([str(p) for p in ch.y])}")
    rep.verdict("incidence sum x_i y_i", ch.incidence().is_zero(), "identically zero" if ch.incidence().is_zero() else str(ch.incidence()))


def cmd_transform(args, rep: Report) -> None:
    Z = _surface(args)
    chart = bryant.bryant_transform(Z)
    n = len(Z.p0) - 1
    rep.add("transform chart", "PASS", _fmt([str(c) for c in chart.components]))
    rep.verdict("immersive", chart.is_immersive())
    verdict = contact.is_legendrian(chart, bryant.bryant_form(n))
    rep.verdict("Legendrian", verdict.ok, "" if verdict else "; ".join(k for k, _ in verdict.violations[:5]))


def cmd_indeterminacy(args, rep: Report) -> None:
    Z = _surface(args)
    res = bryant.indeterminacy_points(Z, seed=args.seed)
    rep.verdict("degree", res.degree == res.expected_degree, f"{res.degree} (expected {res.expected_degree})")
    rep.add("squarefree", "PASS" if res.squarefree else "UNKNOWN",
            "distinct points" if res.squarefree else "repeated roots: special position")
    rep.add("polynomial", "PASS", str(res.poly))


def cmd_position(args, rep: Report) -> None:
    Z = _surface(args)
    primes = (args.prime,) if args.prime else (53, 61)
    for c in bryant.general_position_report(Z, seed=args.seed, sample_primes=primes):
        rep.add(c.name, c.status, c.detail)


def cmd_psi(args, rep: Report) -> None:
    P = _poly(args.poly, args.vars)
    if not P.is_homogeneous() or P.is_zero():
        raise InputError("P must be a nonzero homogeneous polynomial")
    d, n = P.total_degree(), len(P.variables)
    if d == 2:
        rep.add("psi chart", "UNKNOWN", "psi is not used in degree 2")
    else:
        chart = bryant.psi_chart(P)
        verdict = contact.is_legendrian(chart, bryant.psi_form(n, d))
        rep.verdict("psi chart Legendrian", verdict.ok, f"in P^{chart.N}")
    c = bryant.self_duality_check(P)
    rep.add("self-duality", "PASS" if c is not None else "UNKNOWN",
            f"P(grad P) = {c} P^{d - 1}" if c is not None else "P(grad P) is not a multiple of P^(d-1)")
    if args.fibers:
        prime = args.prime or 1000003
        try:
            size, counts = bryant.gradient_degree_sample(P, prime, args.trials, args.seed)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        except bryant.BudgetExceededError as exc:
            rep.add("gradient fiber size", "UNKNOWN", str(exc))
            return
        rep.add("gradient fiber size", "SAMPLED", f"{size} over F_{prime}, {args.trials} trials; counts {counts}")


# chern


def cmd_sigma(args, rep: Report) -> None:
    s = cho.sigma_class(args.n, args.m, args.variant)
    rep.add("sigma", "PASS", str(s.as_poly().drop_unused()))
    if args.m == 1 and args.n is not None:
        same = s.as_poly().drop_unused() == cho.sigma2_closed_form(args.n).drop_unused()
        rep.verdict("agrees with 2ch2 - 2c1 h + (n+1) h^2", same)


def cmd_check(args, rep: Report) -> None:
    V = _variety(args)
    c = cho.check_sigma(V, args.m)
    for mono, value in c.pairings.items():
        rep.verdict(f"pairing {mono}", value == 0, str(value))
    rep.verdict(f"sigma_{2 * args.m} vanishes on {V.name}", c.vanishes)
    if V.n == 2:
        h2, c1h = V.number(V.h * V.h), V.number(V.c[1] * V.h)
        rep.add("numbers", "PASS", f"h^2={h2}, c1.h={c1h}, 2ch2={V.number(V.ch_k(2).scale(2))}")


def cmd_resultant(args, rep: Report) -> None:
    try:
        R = cho.resultant_Rlm(args.l, args.m, args.n)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    degrees = cho.cohomological_degrees(R)
    expected = 4 * args.l + 4 * args.m + 4
    rep.verdict("homogeneous", degrees == {expected}, f"degrees {sorted(degrees)}, expected {expected}")
    rep.add("terms", "PASS", f"{len(R.terms)} monomials")
    if args.compare:
        if (args.l, args.m, args.n) != (1, 2, None):
            raise InputError("--compare applies to l=1, m=2 without --n")
        table = cho.compare_c8_table(args.variant)
        for power, mono, printed, computed, status in table.rows:
            rep.verdict(f"(n+1)^{power} {mono}", status == "match",
                        f"printed {printed}, computed {computed}" + ("" if status == "match" else f" [{status}]"))
        for power, mono, value in table.unlisted:
            rep.add(f"(n+1)^{power} {mono}", "FAIL", f"unlisted, computed {value}")


def cmd_codegree(args, rep: Report) -> None:
    V = _variety(args)
    if V.n != 2:
        raise InputError("codegrees are computed for surfaces")
    katz, leg = cho.codegree_pair(V)
    rep.add("Katz codegree", "PASS", str(katz))
    rep.add("Legendrian codegree", "PASS", str(leg))


def cmd_ruled(args, rep: Report) -> None:
    try:
        v = cho.ruled_obstruction(args.p, args.q)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    quad = MultiPoly(("k",), {(i,): c for i, c in enumerate(v.coefficients) if c})
    rep.add("quadratic", "PASS", f"{quad}, r = {v.r}")
    rep.add("embedding", v.status, f"discriminant -4*{v.r}*{v.q} = {v.discriminant}; {v.detail}")


def cmd_kodaira(args, rep: Report) -> None:
    v = cho.kodaira0_constraints(args.chi)
    genus = v.genus if v.genus is not None else "n/a"
    rep.verdict("admissible", v.admissible, f"degree {v.degree}, h0 {v.h0}, genus {genus}")


# roots


def cmd_roots(args, rep: Report) -> None:
    label = f"{args.type.upper()}{args.rank}"
    try:
        rs = roots.RootSystem.of(label)
        rs.simple
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.adjoint:
        gamma, n = roots.adjoint_index(rs)
        rep.add("adjoint index", "PASS", f"gamma={gamma}, n={n}")
        rep.verdict("gamma = (n+1)/2", gamma == Fraction(n + 1, 2))
        return
    if args.node is None:
        raise InputError("give --node or --adjoint")
    try:
        r = roots.t11_identity_check(roots.ParabolicChoice(rs, frozenset([args.node])), args.lam)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep.add("index", "PASS", f"gamma={r.gamma}, n={r.n}")
    rep.verdict("identity", r.equal, f"lhs={r.lhs}, rhs={r.rhs}")


def cmd_selftest(args, rep: Report) -> None:
    for r in acceptance.run_all(seed=args.seed):
        rep.verdict(f"{r.number:2d} {r.name}", r.ok, f"{r.detail} ({r.elapsed:.2f}s of {r.budget:g}s)")


# argument plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--prime", type=int, default=None)

    parser = argparse.ArgumentParser(prog="legendrian", description=__doc__.splitlines()[0], parents=[common])
    groups = parser.add_subparsers(dest="group", required=True)

    def sub(group, name, fn, help_text):
        p = group.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        return p

    leg = groups.add_parser("legendrian", help="charts and compatible forms").add_subparsers(dest="cmd", required=True)
    p = sub(leg, "verify", cmd_verify, "check a chart is Legendrian")
    p.add_argument("--chart", required=True)
    p.add_argument("--form")
    p = sub(leg, "discover-form", cmd_discover, "solve for compatible forms")
    p.add_argument("--chart", required=True)

    bry = groups.add_parser("bryant", help="the contactomorphism and its applications").add_subparsers(dest="cmd", required=True)
    p = sub(bry, "map", cmd_map, "apply phi to a flag")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p = sub(bry, "inverse", cmd_inverse, "apply phi inverse")
    p.add_argument("--wz", required=True)
    p = sub(bry, "pullback", cmd_pullback, "verify the contact pullback identity")
    p.add_argument("--n", type=int, required=True)
    for name, fn, text in (("lift", cmd_lift, "conormal lift of a hypersurface"),
                           ("transform", cmd_transform, "Legendrian transform of a hypersurface"),
                           ("indeterminacy", cmd_indeterminacy, "tangent lines through p0"),
                           ("position-report", cmd_position, "general position checklist")):
        sub(bry, name, fn, text).add_argument("--surface", required=True)
    p = sub(bry, "psi", cmd_psi, "homaloidal candidate checks")
    p.add_argument("--poly", required=True)
    p.add_argument("--vars")
    p.add_argument("--fibers", action="store_true")
    p.add_argument("--trials", type=int, default=20)

    ch = groups.add_parser("chern", help="characteristic class obstructions").add_subparsers(dest="cmd", required=True)
    p = sub(ch, "sigma", cmd_sigma, "sigma polynomial")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--variant", choices=("generating", "binomial"), default="generating")

    def variety_args(p):
        p.add_argument("--catalog")
        p.add_argument("--algebra")

    p = sub(ch, "check", cmd_check, "sigma identity on a variety")
    variety_args(p)
    p.add_argument("--m", type=int, default=1)
    p = sub(ch, "resultant", cmd_resultant, "resultant of two sigma polynomials")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--compare", action="store_true")
    p.add_argument("--variant", choices=("generating", "binomial"), default="generating")
    variety_args(sub(ch, "codegree", cmd_codegree, "codegree formulas for a surface"))
    p = sub(ch, "ruled", cmd_ruled, "ruled surface obstruction")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p = sub(ch, "kodaira0", cmd_kodaira, "Kodaira dimension zero constraints")
    p.add_argument("--chi", type=int, required=True)

    rt = groups.add_parser("roots", help="root system identities").add_subparsers(dest="cmd", required=True)
    p = sub(rt, "check", cmd_roots, "index identity for a marked node")
    p.add_argument("--type", required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--node", type=int)
    p.add_argument("--lambda", dest="lam", type=int, default=1)
    p.add_argument("--adjoint", action="store_true")

    p = groups.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.set_defaults(func=cmd_selftest, cmd=None)
    return parser


_FILE_FLAGS = ("chart", "form", "surface", "algebra")


def inputs_digest(args) -> str:
    """sha256 over the arguments and file contents with all whitespace removed."""
    h = hashlib.sha256()
    for key in sorted(vars(args)):
        if key in ("func", "format"):
            continue
        value = getattr(args, key)
        if key in _FILE_FLAGS and value:
            value = _read(value)
        compact = re.sub(r"\s+", "", str(value))
        h.update(f"{key}={compact};".encode())
    return h.hexdigest()


def run(argv=None) -> tuple[Report, str]:
    args = build_parser().parse_args(argv)
    command = " ".join(x for x in (args.group, args.cmd) if x)
    rep = Report(command, inputs_digest(args))
    args.func(args, rep)
    return rep, args.format


def main(argv=None) -> int:
    try:
        rep, fmt = run(argv)
    except (InputError, ValueError, KeyError) as exc:
        # parse errors from every module are ValueError subclasses
        msg = exc.args[0] if exc.args else type(exc).__name__
        print(f"legendrian: error: {msg}", file=sys.stderr)
        return 2
    print(rep.as_json() if fmt == "json" else rep.as_text())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
