"""Command-line front end for the toolkit.

One executable exposing construction, verification, existence status, and
size-bound commands with deterministic text, CSV, JSON, and Markdown
output.  Exit codes: 0 on success or a verified claim, 1 on a mathematical
failure (violated verification, impossible parameters, infeasibility), 2
on usage errors.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

from . import io as fileio
from .bounds import (
    best_bounds,
    divisibility_upper_linear,
    divisibility_upper_quadratic,
    exact_value_q2_r2,
    multicomponent_lower,
    quadratic_counting_upper,
    residue_one_exact,
    trivial_upper,
    upper_bound_q3_r2,
)
from .budget import BUDGET_ENV_VAR, DEFAULT_ENUMERATION_BUDGET, enumeration_budget
from .divisible import (
    DivisibleSet,
    cone,
    construct_affine,
    construct_subspace_set,
    construction1,
    construction4,
    disjoint_union,
    ovoid_concatenation,
    sunflower_union,
)
from .errors import InconsistentInput, NotApplicable, QspreadError, RangeError
from .geometry import Subspace, divisibility_verdict
from .gf import field_new, gaussian_binomial, prime_power_decomposition
from .macwilliams import (
    STATUS_EXCLUDED,
    build_problem,
    lp_feasibility,
    status_range,
)
from .spreads import (
    PartialSpread,
    extend_spread,
    lifted_mrd_layer,
    multicomponent,
    spread_field_reduction,
    spread_holes,
    verify_partial_spread,
)

FORMATS = ("text", "csv", "json", "md")


@dataclass
class Config:
    """Run-wide settings shared by every subcommand."""

    budget: int
    format: str = "text"
    jobs: int = 1
    certificate: bool = False
    sporadic_data: str = ""
    cited_data: str = ""

    def __post_init__(self):
        if self.budget <= 0:
            raise InconsistentInput("budget must be positive")
        if self.format not in FORMATS:
            raise InconsistentInput(f"unknown format {self.format!r}")
        if self.jobs <= 0:
            raise InconsistentInput("parallelism degree must be positive")


def _shipped_data_path(name: str) -> str:
    return str(resources.files("qspread").joinpath(f"data/{name}"))


def config_from_args(args) -> Config:
    return Config(
        budget=enumeration_budget(),
        format=getattr(args, "format", "text"),
        jobs=getattr(args, "jobs", 1),
        certificate=getattr(args, "certificate", False),
        sporadic_data=_shipped_data_path("sporadic_bounds.json"),
        cited_data=_shipped_data_path("cited_existence.json"),
    )


# ---------------------------------------------------------------------------
# shared output helpers


def emit_table(rows, columns, fmt: str) -> str:
    """Render dict rows in a stable column order; empty input keeps the header."""
    if fmt == "json":
        payload = [{c: row.get(c) for c in columns} for row in rows]
        return json.dumps(payload, indent=2, default=str) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
        return buf.getvalue()
    if fmt == "md":
        lines = [
            "| " + " | ".join(columns) + " |",
            "| " + " | ".join("---" for _ in columns) + " |",
        ]
        for row in rows:
            lines.append("| " + " | ".join(_cell(row.get(c)) for c in columns) + " |")
        return "\n".join(lines) + "\n"
    widths = [
        max([len(c)] + [len(_cell(row.get(c))) for row in rows]) for c in columns
    ]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for row in rows:
        lines.append(
            "  ".join(_cell(row.get(c)).ljust(w) for c, w in zip(columns, widths)).rstrip()
        )
    return "\n".join(lines) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if value is True:
        return "yes"
    if value is False:
        return "no"
    return str(value)


def _pmap(func, items, jobs: int):
    if jobs <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def parse_range(text: str) -> tuple[int, int]:
    """Inclusive integer range 'A..B' (a bare integer means A..A)."""
    parts = text.split("..")
    if len(parts) == 1:
        value = int(parts[0])
        return value, value
    if len(parts) != 2:
        raise InconsistentInput(f"cannot parse range {text!r}")
    lo, hi = int(parts[0]), int(parts[1])
    if hi < lo:
        raise InconsistentInput(f"empty range {text!r}")
    return lo, hi


def _csv_ints(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(tok) for tok in text.split(",")]


def _check_prime_power(q: int) -> None:
    prime_power_decomposition(q)


# ---------------------------------------------------------------------------
# bounds commands

FORMULAS = {
    "trivial": trivial_upper,
    "multicomponent": multicomponent_lower,
    "residue_one_exact": residue_one_exact,
    "quadratic_counting": quadratic_counting_upper,
    "linear_divisibility": divisibility_upper_linear,
    "quadratic_divisibility": divisibility_upper_quadratic,
    "q2_r2_exact": None,
    "q3_r2_upper": None,
}


def _evaluate_formula(name: str, q: int, v: int, k: int) -> int:
    if name == "q2_r2_exact":
        if q != 2:
            raise NotApplicable("formula is specific to field order 2")
        return exact_value_q2_r2(v, k)
    if name == "q3_r2_upper":
        if q != 3:
            raise NotApplicable("formula is specific to field order 3")
        return upper_bound_q3_r2(v, k)
    return FORMULAS[name](q, v, k)


def cmd_bounds_get(args, config: Config) -> int:
    _check_prime_power(args.q)
    if args.formula is not None:
        value = _evaluate_formula(args.formula, args.q, args.v, args.k)
        if config.format == "json":
            print(json.dumps(
                {"q": args.q, "v": args.v, "k": args.k,
                 "formula": args.formula, "value": value}
            ))
        elif config.format in ("csv", "md"):
            row = {"q": args.q, "v": args.v, "k": args.k,
                   "formula": args.formula, "value": value}
            sys.stdout.write(
                emit_table([row], ["q", "v", "k", "formula", "value"], config.format)
            )
        else:
            print(f"{args.formula}: {value}")
        return 0
    report = best_bounds(args.q, args.v, args.k)
    if config.format == "json":
        print(json.dumps(report.to_json()))
    elif config.format in ("csv", "md"):
        sys.stdout.write(emit_table([_report_row(report)], _BOUND_COLUMNS, config.format))
    else:
        print(f"q: {report.q}")
        print(f"v: {report.v}")
        print(f"k: {report.k}")
        print(f"lower: {report.lower} ({report.lower_src})")
        print(f"upper: {report.upper} ({report.upper_src})")
        print(f"deficiency: {report.sigma_min}..{report.sigma_max}")
        print(f"exact: {'yes' if report.exact else 'no'}")
    return 0


_BOUND_COLUMNS = [
    "q", "v", "k", "lower", "lower_src", "upper", "upper_src",
    "sigma_min", "sigma_max", "exact",
]


def _report_row(report) -> dict:
    row = report.to_json()
    row.pop("per_formula", None)
    return row


def cmd_bounds_table(args, config: Config) -> int:
    _check_prime_power(args.q)
    v_lo, v_hi = parse_range(args.v_range)
    k_lo, k_hi = parse_range(args.k_range)
    cells = [
        (v, k)
        for k in range(k_lo, k_hi + 1)
        for v in range(v_lo, v_hi + 1)
        if v >= k >= 1
    ]
    reports = _pmap(lambda cell: best_bounds(args.q, cell[0], cell[1]), cells, config.jobs)
    rows = [_report_row(report) for report in reports]
    sys.stdout.write(emit_table(rows, _BOUND_COLUMNS, config.format))
    return 0


# ---------------------------------------------------------------------------
# spread commands


def _construct_spread(args) -> PartialSpread:
    q, v, k = args.q, args.v, args.k
    _check_prime_power(q)
    if args.method == "multicomponent":
        return multicomponent(q, v, k)
    if args.method == "field-reduction":
        if k < 1 or v % k != 0:
            raise RangeError(
                f"field reduction needs v to be a multiple of k, got v={v}, k={k}"
            )
        return spread_field_reduction(q, k, v // k)
    members = lifted_mrd_layer(q, v, k)
    return PartialSpread(field_new(q), v, k, tuple(members))


def cmd_spread_construct(args, config: Config) -> int:
    spread = _construct_spread(args)
    fileio.write_text(args.out, fileio.format_spread(spread))
    print(
        f"{spread.size} members of dimension {spread.k} in dimension {spread.v}",
        file=sys.stderr,
    )
    return 0


def _holes_divisor_line(spread: PartialSpread) -> str:
    q, k = spread.field.q, spread.k
    divisor = q ** (k - 1)
    ambient = gaussian_binomial(spread.v, 1, q)
    holes = ambient - spread.covered_point_count()
    if divisor <= 1:
        verdict = "yes"
    else:
        hole_set = spread_holes(spread)
        verdict = "yes" if divisibility_verdict(hole_set, divisor).ok else "no"
    return f"{spread.size} members, {holes} holes, holes {divisor}-divisible: {verdict}"


def cmd_spread_verify(args, config: Config) -> int:
    spread = fileio.parse_spread(fileio.read_text(args.file))
    report = verify_partial_spread(spread)
    if not report.ok:
        for violation in report.violations:
            print(f"violation: {violation}", file=sys.stderr)
        print(f"INVALID: {len(report.violations)} violations in {report.size} members")
        return 1
    print(_holes_divisor_line(spread))
    return 0


def cmd_spread_holes(args, config: Config) -> int:
    spread = fileio.parse_spread(fileio.read_text(args.file))
    hole_set = spread_holes(spread)
    if args.check_divisibility:
        divisor = spread.field.q ** (spread.k - 1)
        if divisor <= 1:
            ok = True
        else:
            ok = divisibility_verdict(hole_set, divisor).ok
        print(f"{hole_set.size} holes, {divisor}-divisible: {'yes' if ok else 'no'}")
        return 0 if ok else 1
    fileio.write_text(args.out, fileio.format_point_set(hole_set))
    return 0


def cmd_spread_extend(args, config: Config) -> int:
    spread = fileio.parse_spread(fileio.read_text(args.file))
    extended = extend_spread(spread)
    fileio.write_text(args.out, fileio.format_spread(extended))
    print(
        f"extended from {spread.size} members in dimension {spread.v} "
        f"to {extended.size} in dimension {extended.v}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------
# divset commands


def _unit_subspace(field, v: int, dim: int) -> Subspace:
    rows = []
    for i in range(dim):
        row = [0] * v
        row[i] = 1
        rows.append(tuple(row))
    return Subspace.from_rows(field, v, rows)


def _build_divisible(args) -> DivisibleSet:
    recipe = args.recipe
    if recipe == "subspace":
        field = field_new(args.q)
        return construct_subspace_set(_unit_subspace(field, args.v, args.dim))
    if recipe == "affine":
        field = field_new(args.q)
        outer = _unit_subspace(field, args.v, args.outer_dim)
        inner = _unit_subspace(field, args.v, args.inner_dim)
        return construct_affine(outer, inner)
    if recipe == "union":
        if len(args.inputs) != 2:
            raise InconsistentInput("union needs exactly two point-set files")
        if args.delta is None:
            raise InconsistentInput("union needs --delta")
        parts = [
            DivisibleSet(fileio.parse_point_set(fileio.read_text(path)), args.delta, path)
            for path in args.inputs
        ]
        return disjoint_union(parts[0], parts[1])
    if recipe == "sunflower":
        return sunflower_union(
            args.q, args.center_dim, _csv_ints(args.petal_dims), args.variant
        )
    if recipe == "cone":
        if len(args.inputs) != 1:
            raise InconsistentInput("cone needs exactly one base point-set file")
        if args.delta is None:
            raise InconsistentInput("cone needs --delta (the base divisor)")
        base = DivisibleSet(
            fileio.parse_point_set(fileio.read_text(args.inputs[0])),
            args.delta,
            args.inputs[0],
        )
        return cone(base, args.s, args.variant)
    if recipe == "construction1":
        return construction1(args.q, args.r, args.i)
    if recipe == "construction4":
        return construction4(args.q, args.r, args.m, args.a, _csv_ints(args.b))
    return ovoid_concatenation(args.q)


def cmd_divset_build(args, config: Config) -> int:
    ds = _build_divisible(args)
    fileio.write_text(args.out, fileio.format_point_set(ds.points))
    print(
        f"{ds.recipe or args.recipe}: {ds.size} points in dimension {ds.v}, "
        f"divisor {ds.divisor}",
        file=sys.stderr,
    )
    return 0


def cmd_divset_check(args, config: Config) -> int:
    ps = fileio.parse_point_set(fileio.read_text(args.file))
    if args.delta <= 1:
        print("status: strong (divisor 1 is trivial)")
        return 0
    verdict = divisibility_verdict(ps, args.delta)
    if config.format == "json":
        payload = {
            "points": ps.size,
            "divisor": verdict.divisor,
            "status": verdict.status,
            "size_residue": verdict.size_residue,
            "hyperplane_residue": verdict.residue,
            "witness": None
            if verdict.witness is None
            else fileio.format_vector(ps.field, verdict.witness),
        }
        print(json.dumps(payload))
    else:
        print(f"points: {ps.size}")
        print(f"divisor: {verdict.divisor}")
        print(f"status: {verdict.status}")
        print(f"size residue: {verdict.size_residue}")
        if verdict.residue is not None:
            print(f"hyperplane residue: {verdict.residue}")
        if verdict.witness is not None:
            print(
                "witness hyperplane normal: "
                + fileio.format_vector(ps.field, verdict.witness)
            )
    return 0 if verdict.ok else 1


def cmd_divset_spectrum(args, config: Config) -> int:
    ps = fileio.parse_point_set(fileio.read_text(args.file))
    spectrum = ps.spectrum()
    residuals = spectrum.standard_residuals()
    if config.format == "json":
        payload = {
            "q": spectrum.q,
            "v": spectrum.v,
            "n": spectrum.n,
            "counts": {str(i): a for i, a in sorted(spectrum.counts.items())},
            "weights": {
                str(w): a for w, a in sorted(spectrum.weight_distribution().items())
            },
            "residuals": list(residuals),
        }
        print(json.dumps(payload))
    else:
        print(f"q: {spectrum.q}")
        print(f"v: {spectrum.v}")
        print(f"n: {spectrum.n}")
        for i, a in sorted(spectrum.counts.items()):
            print(f"a_{i}: {a}")
        print("standard residuals: " + " ".join(str(r) for r in residuals))
    return 0


def _status_rows(q: int, r: int, n_range: str, config: Config) -> list[dict]:
    lo, hi = parse_range(n_range)
    verdicts = status_range(q, r, lo, hi)
    rows = []
    for n in range(lo, hi + 1):
        verdict = verdicts[n]
        row = {"n": n, "status": verdict.status, "stage": verdict.stage}
        if config.certificate and config.format == "json":
            row["certificate"] = verdict.to_json()["certificate"]
        rows.append(row)
    return rows


def _emit_status(q: int, r: int, n_range: str, config: Config) -> int:
    _check_prime_power(q)
    rows = _status_rows(q, r, n_range, config)
    columns = ["n", "status", "stage"]
    if config.certificate and config.format == "json":
        columns.append("certificate")
    sys.stdout.write(emit_table(rows, columns, config.format))
    return 0


def cmd_divset_status(args, config: Config) -> int:
    return _emit_status(args.q, args.r, args.n_range, config)


# ---------------------------------------------------------------------------
# macwlp commands


def _divisor_exponent(q: int, delta: int) -> int:
    r = 0
    value = 1
    while value < delta:
        value *= q
        r += 1
    if value != delta or r < 1:
        raise RangeError(f"divisor {delta} is not a positive power of {q}")
    return r


def cmd_macwlp_lp(args, config: Config) -> int:
    _check_prime_power(args.q)
    r = _divisor_exponent(args.q, args.delta)
    dims = None
    if args.dims is not None:
        dims = parse_range(args.dims)
    rules = []
    if args.rules is not None:
        raw = json.loads(fileio.read_text(args.rules))
        if not isinstance(raw, list):
            raise InconsistentInput("rules file must hold a JSON list")
        rules = raw
    problem = build_problem(args.q, r, args.n, dims=dims, extra_rules=rules)
    verdict = lp_feasibility(problem)
    payload = verdict.to_json()
    if not config.certificate:
        payload["certificate"] = None
    if config.format == "json":
        print(json.dumps(payload))
    else:
        print(f"q: {payload['q']}")
        print(f"r: {payload['r']}")
        print(f"n: {payload['n']}")
        print(f"status: {payload['status']}")
        print(f"stage: {payload['stage']}")
        if config.certificate and payload["certificate"] is not None:
            print("certificate: " + json.dumps(payload["certificate"]))
    return 1 if verdict.status == STATUS_EXCLUDED else 0


def cmd_macwlp_status(args, config: Config) -> int:
    return _emit_status(args.q, args.r, args.n_range, config)


# ---------------------------------------------------------------------------
# field command


def cmd_field_info(args, config: Config) -> int:
    p, e = prime_power_decomposition(args.q)
    field = field_new(args.q)
    modulus = list(getattr(field, "modulus", ())) or None
    payload = {
        "order": field.q,
        "characteristic": p,
        "degree": e,
        "modulus": modulus,
    }
    if field.q <= 64:
        payload["elements"] = {
            str(a): list(field.coeffs(a)) for a in field.elements()
        }
    if config.format == "json":
        print(json.dumps(payload))
        return 0
    print(f"order: {payload['order']}")
    print(f"characteristic: {payload['characteristic']}")
    print(f"degree: {payload['degree']}")
    if modulus is not None:
        print(f"modulus (non-leading coefficients, constant first): {modulus}")
    if "elements" in payload:
        print("elements (index: coefficients over the prime field, constant first):")
        for a in field.elements():
            print(f"  {a}: {list(field.coeffs(a))}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _common_flags(parser: argparse.ArgumentParser, formats=FORMATS) -> None:
    parser.add_argument("--format", choices=formats, default="text")
    parser.add_argument("--budget", type=_positive_int, default=None,
                        help=f"point-enumeration budget (default {DEFAULT_ENUMERATION_BUDGET}; "
                             f"also via ${BUDGET_ENV_VAR})")
    parser.add_argument("--jobs", type=_positive_int, default=1,
                        help="worker threads for table generation")
    parser.add_argument("--certificate", action="store_true",
                        help="include certificates in the output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qspread",
        description="Partial spreads, divisible point sets, and size bounds "
                    "over finite fields.",
    )
    top = parser.add_subparsers(dest="group", required=True)

    bounds_parser = top.add_parser("bounds", help="best-known size bounds")
    bounds_sub = bounds_parser.add_subparsers(dest="command", required=True)
    get_parser = bounds_sub.add_parser("get", help="bounds for one parameter triple")
    get_parser.add_argument("--q", type=int, required=True)
    get_parser.add_argument("--v", type=int, required=True)
    get_parser.add_argument("--k", type=int, required=True)
    get_parser.add_argument("--formula", choices=sorted(FORMULAS), default=None)
    _common_flags(get_parser)
    get_parser.set_defaults(handler=cmd_bounds_get)
    table_parser = bounds_sub.add_parser("table", help="bounds over a parameter grid")
    table_parser.add_argument("--q", type=int, required=True)
    table_parser.add_argument("--v-range", required=True, metavar="A..B")
    table_parser.add_argument("--k-range", required=True, metavar="A..B")
    _common_flags(table_parser)
    table_parser.set_defaults(handler=cmd_bounds_table)

    spread_parser = top.add_parser("spread", help="partial-spread constructions")
    spread_sub = spread_parser.add_subparsers(dest="command", required=True)
    construct_parser = spread_sub.add_parser("construct")
    construct_parser.add_argument("--q", type=int, required=True)
    construct_parser.add_argument("--v", type=int, required=True)
    construct_parser.add_argument("--k", type=int, required=True)
    construct_parser.add_argument(
        "--method",
        choices=("multicomponent", "field-reduction", "lifted-mrd"),
        default="multicomponent",
    )
    construct_parser.add_argument("--out", default="-")
    _common_flags(construct_parser)
    construct_parser.set_defaults(handler=cmd_spread_construct)
    verify_parser = spread_sub.add_parser("verify")
    verify_parser.add_argument("file")
    _common_flags(verify_parser)
    verify_parser.set_defaults(handler=cmd_spread_verify)
    holes_parser = spread_sub.add_parser("holes")
    holes_parser.add_argument("file")
    holes_parser.add_argument("--check-divisibility", action="store_true")
    holes_parser.add_argument("--out", default="-")
    _common_flags(holes_parser)
    holes_parser.set_defaults(handler=cmd_spread_holes)
    extend_parser = spread_sub.add_parser("extend")
    extend_parser.add_argument("file")
    extend_parser.add_argument("--out", default="-")
    _common_flags(extend_parser)
    extend_parser.set_defaults(handler=cmd_spread_extend)

    divset_parser = top.add_parser("divset", help="divisible point sets")
    divset_sub = divset_parser.add_subparsers(dest="command", required=True)
    build_parser_ = divset_sub.add_parser("build")
    build_parser_.add_argument(
        "--recipe",
        required=True,
        choices=(
            "subspace", "affine", "union", "sunflower", "cone",
            "construction1", "construction4", "ovoid-concat",
        ),
    )
    build_parser_.add_argument("inputs", nargs="*",
                               help="point-set files for union/cone recipes")
    build_parser_.add_argument("--q", type=int, default=2)
    build_parser_.add_argument("--v", type=int, default=None)
    build_parser_.add_argument("--dim", type=int, default=None)
    build_parser_.add_argument("--outer-dim", type=int, default=None)
    build_parser_.add_argument("--inner-dim", type=int, default=None)
    build_parser_.add_argument("--delta", type=int, default=None)
    build_parser_.add_argument("--center-dim", type=int, default=None)
    build_parser_.add_argument("--petal-dims", default="")
    build_parser_.add_argument(
        "--variant",
        default=None,
        choices=("q_petals", "q_plus_1_with_center", "remove_vertex", "keep_vertex"),
    )
    build_parser_.add_argument("--s", type=int, default=None)
    build_parser_.add_argument("--r", type=int, default=None)
    build_parser_.add_argument("--i", type=int, default=None)
    build_parser_.add_argument("--m", type=int, default=None)
    build_parser_.add_argument("--a", type=int, default=None)
    build_parser_.add_argument("--b", default="")
    build_parser_.add_argument("--out", default="-")
    _common_flags(build_parser_)
    build_parser_.set_defaults(handler=cmd_divset_build)
    check_parser = divset_sub.add_parser("check")
    check_parser.add_argument("file")
    check_parser.add_argument("--delta", type=int, required=True)
    _common_flags(check_parser)
    check_parser.set_defaults(handler=cmd_divset_check)
    spectrum_parser = divset_sub.add_parser("spectrum")
    spectrum_parser.add_argument("file")
    _common_flags(spectrum_parser)
    spectrum_parser.set_defaults(handler=cmd_divset_spectrum)
    status_parser = divset_sub.add_parser("status")
    status_parser.add_argument("--q", type=int, required=True)
    status_parser.add_argument("--r", type=int, required=True)
    status_parser.add_argument("--n-range", required=True, metavar="A..B")
    _common_flags(status_parser)
    status_parser.set_defaults(handler=cmd_divset_status)

    macwlp_parser = top.add_parser("macwlp", help="moment-identity feasibility")
    macwlp_sub = macwlp_parser.add_subparsers(dest="command", required=True)
    lp_parser = macwlp_sub.add_parser("lp")
    lp_parser.add_argument("--q", type=int, required=True)
    lp_parser.add_argument("--n", type=int, required=True)
    lp_parser.add_argument("--delta", type=int, required=True)
    lp_parser.add_argument("--dims", default=None, metavar="K1..K2")
    lp_parser.add_argument("--rules", default=None, metavar="FILE",
                           help="JSON list of extra constraints "
                                '[{"coeffs": {...}, "op": ">=", "rhs": N}, ...]')
    _common_flags(lp_parser)
    lp_parser.set_defaults(handler=cmd_macwlp_lp)
    mstatus_parser = macwlp_sub.add_parser("status")
    mstatus_parser.add_argument("--q", type=int, required=True)
    mstatus_parser.add_argument("--r", type=int, required=True)
    mstatus_parser.add_argument("--n-range", required=True, metavar="A..B")
    _common_flags(mstatus_parser)
    mstatus_parser.set_defaults(handler=cmd_macwlp_status)

    field_parser = top.add_parser("field", help="finite-field information")
    field_sub = field_parser.add_subparsers(dest="command", required=True)
    info_parser = field_sub.add_parser("info")
    info_parser.add_argument("--q", type=int, required=True)
    _common_flags(info_parser)
    info_parser.set_defaults(handler=cmd_field_info)

    return parser


_RECIPE_FLAGS = {
    "subspace": ("v", "dim"),
    "affine": ("v", "outer_dim", "inner_dim"),
    "union": ("delta",),
    "sunflower": ("center_dim", "variant"),
    "cone": ("delta", "s", "variant"),
    "construction1": ("r", "i"),
    "construction4": ("r", "m", "a"),
    "ovoid-concat": (),
}

_RECIPE_INPUTS = {"union": 2, "cone": 1}


def _validate_build_args(parser: argparse.ArgumentParser, args) -> None:
    for name in _RECIPE_FLAGS[args.recipe]:
        if getattr(args, name) is None:
            flag = "--" + name.replace("_", "-")
            parser.error(f"recipe {args.recipe!r} requires {flag}")
    expected = _RECIPE_INPUTS.get(args.recipe, 0)
    if len(args.inputs) != expected:
        parser.error(
            f"recipe {args.recipe!r} takes {expected} input file(s), "
            f"got {len(args.inputs)}"
        )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is cmd_divset_build:
        _validate_build_args(parser, args)
    saved_budget = os.environ.get(BUDGET_ENV_VAR)
    if getattr(args, "budget", None) is not None:
        os.environ[BUDGET_ENV_VAR] = str(args.budget)
    try:
        config = config_from_args(args)
        return args.handler(args, config)
    except QspreadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    finally:
        if getattr(args, "budget", None) is not None:
            if saved_budget is None:
                os.environ.pop(BUDGET_ENV_VAR, None)
            else:
                os.environ[BUDGET_ENV_VAR] = saved_budget


if __name__ == "__main__":
    sys.exit(main())
