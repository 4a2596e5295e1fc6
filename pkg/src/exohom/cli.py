"""Command-line interface: ``exohom <command> FILE``.

A JSON report goes to stdout, a short human summary to stderr. Exit codes:
0 ok, 1 failed verdict or unmet precondition, 2 schema or parity error,
3 invalid model data, 4 window overflow, 5 unsupported input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .dynamics import d2_evaluation, lemma6_check
from .equivariant import build_cartan, cartan_spectral_sequence, equivariant_cohomology
from .errors import (
    DimensionMismatchError,
    ExoHomError,
    ModelValidationError,
    ParityViolationError,
    SchemaError,
    UnsupportedCoefficientError,
    UnsupportedInputError,
    WindowOverflowError,
)
from .forms import d_operator
from .graded import parity_name
from .identities import identity_suite
from .linalg import frac_str
from .models import full_homology, model_from_dict
from .problem import load_problem, problem_from_dict
from .spectral import massey_cross_check, perturbed_homology_compare, spectral_sequence
from .subcomplexes import (
    exotic_homology,
    flat_subcomplex,
    invariant_subcomplex,
    lemma1_check,
    omega_subcomplex,
    theorem1_sequence,
)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_SCHEMA = 2
EXIT_MODEL = 3
EXIT_WINDOW = 4
EXIT_UNSUPPORTED = 5


class VerdictFailure(Exception):
    def __init__(self, report: dict, summary: str):
        super().__init__(summary)
        self.report = report
        self.summary = summary


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc


def _samples(args, prob) -> list[Fraction]:
    if args.samples:
        try:
            return [Fraction(s.strip()) for s in args.samples.split(",") if s.strip()]
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad --samples value: {exc}") from exc
    return prob.samples()


def _key_label(grading: str, k: int) -> str:
    return str(k) if grading == "Z" else parity_name(k)


# -- commands ---------------------------------------------------------------------------


def cmd_validate(args) -> tuple[dict, str]:
    obj = _read_json(args.file)
    if isinstance(obj, dict) and "kind" in obj:
        model = model_from_dict(obj)
        report = {"file_kind": "model"}
    else:
        prob = problem_from_dict(obj)
        model = prob.model
        report = {
            "file_kind": "problem",
            "forms": sorted(prob.forms),
            "multivectors": sorted(prob.fields),
            "operator_terms": len(prob.terms),
        }
    hom = full_homology(model)
    report.update({"valid": True, "model": model.to_dict(), "form_space_dim": model.size, "full_homology": hom})
    return report, f"valid {model.kind} model, dim {model.dim}, {model.size} basis forms, H* dims {hom}"


def cmd_identities(args) -> tuple[dict, str]:
    prob = load_problem(args.file)
    dp = prob.perturbed_d() if prob.terms else None
    results = identity_suite(prob.model, prob.forms, prob.fields, dp)
    ok = all(r.passed for r in results)
    report = {"results": [r.to_dict() for r in results], "pass": ok}
    summary = f"{sum(r.passed for r in results)}/{len(results)} identities hold"
    if not ok:
        raise VerdictFailure(report, summary)
    return report, summary


def _subcomplex(prob, default: str | None = None):
    kind = prob.get("subcomplex")
    if kind is None:
        if default is not None:
            kind = default
        elif prob.terms:
            kind = "flat"
        elif "omega_2n" in prob.raw:
            kind = "omega"
        elif "field" in prob.raw:
            kind = "invariant"
        else:
            kind = "full"
    m = prob.model
    if kind == "flat":
        if not prob.terms:
            raise SchemaError("subcomplex 'flat' needs an operator with terms")
        return kind, flat_subcomplex(prob.perturbed_d())
    if kind == "omega":
        return kind, omega_subcomplex(m, prob.form(prob.require("omega_2n")))
    if kind == "invariant":
        return kind, invariant_subcomplex(m, prob.multivector(prob.require("field")))
    return kind, flat_subcomplex(d_operator(m))


def cmd_exotic(args) -> tuple[dict, str]:
    prob = load_problem(args.file)
    kind, t = _subcomplex(prob)
    assignment = prob.get("assignment") or None
    if assignment and kind != "flat":
        raise SchemaError("an assignment only applies to the 'flat' subcomplex")
    if assignment:
        assignment = {k: Fraction(v) for k, v in assignment.items()}
    h = exotic_homology(t, assignment)
    report = {
        "subcomplex": kind,
        "t_grading": t.grading,
        "t_dims": {_key_label(t.grading, k): d for k, d in t.dims.items()},
        "homology": h.to_dict(),
        "full_homology": full_homology(prob.model),
    }
    return report, f"{kind} subcomplex dims {t.dims_list()}; homology ({h.grading}) dims {h.dims_list()}"


def cmd_exact_seq(args) -> tuple[dict, str]:
    prob = load_problem(args.file)
    omega = prob.form(prob.require("omega_2n"))
    reeb = prob.multivector(prob.require("reeb"))
    lemma1 = lemma1_check(prob.model, omega, reeb)
    seq = theorem1_sequence(prob.model, omega, reeb)
    report = {"lemma1": lemma1.to_dict(), "sequence": seq.to_dict()}
    ok = lemma1.passed and seq.exact and seq.alternating_sum == 0 and seq.theta_independent
    report["pass"] = ok
    summary = f"node dims {seq.dims}; exact={seq.exact}; lemma1={lemma1.passed}"
    if not ok:
        raise VerdictFailure(report, summary)
    return report, summary


def cmd_ss(args) -> tuple[dict, str]:
    prob = load_problem(args.file)
    kind, t = _subcomplex(prob, default="flat" if prob.terms else None)
    p = prob.perturbation()
    max_page = args.max_page if args.max_page is not None else prob.int_param("max_page", None)
    ss = spectral_sequence(t, p, max_page)
    massey = massey_cross_check(ss)
    compare = perturbed_homology_compare(t, p, _samples(args, prob), ss)
    euler = {pg.page: pg.parity_dims()[0] - pg.parity_dims()[1] for pg in ss.pages}
    reversing = all(
        pg.shift % 2 == 1 for pg in ss.pages if not pg.is_zero_differential()
    )
    checks = dict(ss.checks)
    checks.update(
        {
            "euler_constant": len(set(euler.values())) == 1,
            "parity_reversing": reversing,
            "massey": massey["pass"],
            "e_infinity_matches_perturbed": compare.agrees,
            "stabilized": ss.stable_page is not None,
        }
    )
    ok = all(checks.values())
    report = {
        "subcomplex": kind,
        "t_dims": {_key_label(t.grading, k): d for k, d in t.dims.items()},
        "spectral": ss.to_dict(),
        "massey": massey,
        "comparison": compare.to_dict(),
        "checks": checks,
        "pass": ok,
    }
    einf = ss.e_infinity
    summary = (
        f"pages {[pg.total for pg in ss.pages]} (totals); E_inf total {einf.total} at page {ss.stable_page}; "
        f"perturbed min {compare.minimum_total}"
    )
    if not ok:
        raise VerdictFailure(report, summary)
    return report, summary


def cmd_dynamics(args) -> tuple[dict, str]:
    prob = load_problem(args.file)
    x = prob.multivector(prob.require("field"))
    verdict = lemma6_check(prob.model, x)
    values = {name: frac_str(d2_evaluation(prob.model, x, prob.form(name))) for name in prob.get("evaluate", [])}
    report = verdict.to_dict()
    report["d2_evaluations"] = values
    summary = f"rotation cycle {verdict.cycle.to_json()}; d2 rank {verdict.d2_rank}; lemma6 {verdict.verdict}"
    if verdict.verdict == "fail":
        raise VerdictFailure(report, summary)
    return report, summary


def cmd_equivariant(args) -> tuple[dict, str]:
    prob = load_problem(args.file)
    names = prob.get("fields")
    if names is None:
        names = [prob.require("field")]
    fields = [prob.multivector(n) for n in names]
    cutoff = args.cutoff if args.cutoff is not None else prob.int_param("cutoff", 4)
    c = build_cartan(prob.model, fields, cutoff)
    eq = equivariant_cohomology(c)
    max_page = args.max_page if args.max_page is not None else prob.int_param("max_page", None)
    ss = cartan_spectral_sequence(c, max_page)
    report = eq.to_dict()
    report["invariant_forms_dim"] = c.invariant.dim
    report["complex_dim"] = c.size
    report["spectral"] = {
        "page_totals": [pg.total for pg in ss.pages],
        "stable_page": ss.stable_page,
        "checks": ss.checks,
    }
    return report, f"equivariant dims {eq.dims} (cutoff {cutoff}, safe through degree {eq.truncation_safe_through})"


COMMANDS = {
    "validate": cmd_validate,
    "identities": cmd_identities,
    "exotic": cmd_exotic,
    "exact-seq": cmd_exact_seq,
    "ss": cmd_ss,
    "dynamics": cmd_dynamics,
    "equivariant": cmd_equivariant,
}


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (SchemaError, ParityViolationError, DimensionMismatchError, UnsupportedCoefficientError)):
        return EXIT_SCHEMA
    if isinstance(exc, ModelValidationError):
        return EXIT_MODEL
    if isinstance(exc, WindowOverflowError):
        return EXIT_WINDOW
    if isinstance(exc, UnsupportedInputError):
        return EXIT_UNSUPPORTED
    return EXIT_VERDICT


def _error_report(exc: Exception) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc)}
    witness = getattr(exc, "witness", None)
    if witness is not None:
        err["witness"] = _jsonable(witness)
    if isinstance(exc, WindowOverflowError):
        err["frequency"] = list(exc.frequency)
    if isinstance(exc, ParityViolationError) and exc.term is not None:
        err["term"] = exc.term
    return err


def _jsonable(v):
    if isinstance(v, Fraction):
        return frac_str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    if hasattr(v, "to_json"):
        return v.to_json()
    return repr(v)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="model or problem JSON file")
    common.add_argument("--samples", help='comma-separated nonzero rationals, e.g. "1,2,-3"')
    common.add_argument("--cutoff", type=int, help="polynomial cutoff D for the equivariant complex")
    common.add_argument("--max-page", type=int, dest="max_page", help="last spectral page to compute")
    common.add_argument("--quiet", action="store_true", help="suppress the summary on stderr")
    parser = argparse.ArgumentParser(prog="exohom", description="Exact exotic homology computations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    base = {"command": args.command, "file": args.file}
    try:
        report, summary = COMMANDS[args.command](args)
        code = EXIT_OK
        report = {**base, "status": "ok", **report}
    except VerdictFailure as exc:
        report, summary, code = {**base, "status": "fail", **exc.report}, exc.summary, EXIT_VERDICT
    except ExoHomError as exc:
        code = _exit_code(exc)
        report = {**base, "status": "error", "error": _error_report(exc)}
        summary = f"{type(exc).__name__}: {exc}"
    _emit(_jsonable(report))
    if not args.quiet:
        print(f"exohom {args.command}: {summary}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
