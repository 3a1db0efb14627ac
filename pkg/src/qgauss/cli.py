"""Command-line front end.

A job is a single JSON document read from a file or stdin::

    {"command": "bell", "q": "1/4",
     "covariance": [["1", "-1/5", "3/5"], ["-1/5", "1", "3/5"], ["3/5", "3/5", "1"]]}

Commands: ``moment`` (vacuum expectation of a word such as ``"X1 X2^2"``),
``bell`` (feasibility verdict), ``scan`` (region table as CSV) and
``verify`` (oracle sweeps). Exit codes: 0 success / NOT_EXCLUDED,
1 input error, 2 NO_CLASSICAL_VERSION, 3 verification mismatch.
"""

from __future__ import annotations

import csv
import io
import json
import re
import sys
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any

import click

from . import moments
from .bell import Verdict, bell_check, region_scan
from .hilbert import CovarianceSpec, NotPSDError, NotSymmetricError, covariance_space
from .qcore import check_q

EXIT_OK, EXIT_INPUT, EXIT_EXCLUDED, EXIT_MISMATCH = 0, 1, 2, 3

COMMANDS = ("moment", "bell", "scan", "verify")
ALLOWED_FIELDS = {
    "moment": {"command", "q", "covariance", "word"},
    "bell": {"command", "q", "covariance"},
    "scan": {"command", "q", "rho", "fg"},
    "verify": {"command", "q", "rho", "depth"},
}
SCAN_HEADER = ["rho", "fg", "q", "bell_applicable", "bell_satisfied", "variance_min", "verdict"]

DEFAULT_VERIFY_DEPTH = 7
VERIFY_Q = tuple(map(Fraction, ("-1/2", "0", "1/2", "9/10")))
VERIFY_RHO = tuple(map(Fraction, ("0", "1/4", "1/2", "3/4")))
VERIFY_QV_COVARIANCES = (
    ("1/2", "1/2", "1/2"),
    ("1/2", "1/2", "1/4"),
    ("-1/5", "3/5", "3/5"),
    ("1/3", "-1/4", "1/5"),
)
QV_MAX_DEGREE = 5


class JobError(ValueError):
    """Malformed job input; the message names the offending field."""


def parse_rational(value: Any, where: str) -> Fraction:
    """Exact rational from ``"p/q"``, a decimal literal, or an integer."""
    if isinstance(value, bool):
        raise JobError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise JobError(f"{where}: cannot parse {value!r} as a rational") from None
    raise JobError(f"{where}: expected a rational string or number, got {type(value).__name__}")


def render(x: Fraction | None) -> str:
    return "" if x is None else str(x)


def load_job(text: str) -> dict[str, Any]:
    try:
        job = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise JobError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(job, dict):
        raise JobError("job must be a JSON object")
    command = job.get("command")
    if command not in COMMANDS:
        raise JobError(f"command: expected one of {', '.join(COMMANDS)}, got {command!r}")
    unknown = sorted(set(job) - ALLOWED_FIELDS[command])
    if unknown:
        raise JobError(f"unknown field(s) for {command!r}: {', '.join(unknown)}")
    return job


def _q(job: dict[str, Any], *, allow_minus_one: bool = False) -> Fraction:
    if "q" not in job:
        raise JobError("q: required field is missing")
    q = parse_rational(job["q"], "q")
    try:
        return check_q(q, allow_minus_one=allow_minus_one)
    except ValueError as exc:
        raise JobError(f"q: {exc}") from None


def _covariance(job: dict[str, Any]) -> CovarianceSpec:
    rows = job.get("covariance")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise JobError("covariance: expected a non-empty list of rows")
    matrix = [[parse_rational(v, f"covariance[{i}][{j}]") for j, v in enumerate(row)]
              for i, row in enumerate(rows)]
    try:
        return CovarianceSpec(tuple(map(tuple, matrix)))
    except (NotPSDError, NotSymmetricError, ValueError) as exc:
        raise JobError(f"covariance: {exc}") from None


def _grid(spec: Any, where: str) -> list[Fraction]:
    if isinstance(spec, list):
        return [parse_rational(v, f"{where}[{i}]") for i, v in enumerate(spec)]
    if isinstance(spec, dict):
        extra = sorted(set(spec) - {"start", "stop", "step"})
        if extra:
            raise JobError(f"{where}: unknown field(s) {', '.join(extra)}")
        try:
            start = parse_rational(spec["start"], f"{where}.start")
            stop = parse_rational(spec["stop"], f"{where}.stop")
            step = parse_rational(spec["step"], f"{where}.step")
        except KeyError as exc:
            raise JobError(f"{where}: missing {exc.args[0]!r}") from None
        if step <= 0:
            raise JobError(f"{where}.step: must be positive")
        values = []
        x = start
        while x <= stop:
            values.append(x)
            x += step
        return values
    raise JobError(f"{where}: expected a list of values or {{start, stop, step}}")


_TOKEN = re.compile(r"^(?:X(\d+)(?:\^(\d+))?|H(\d+)\(X(\d+)\))$")


def parse_word(word: Any, cov: CovarianceSpec, q: Fraction) -> moments.OperatorExpr:
    """Parse ``"X1 X2^3 H2(X1)"`` into an operator product (1-based indices)."""
    if not isinstance(word, str):
        raise JobError("word: expected a string such as 'X1 X2'")
    _, vectors = covariance_space(cov)
    factors: list[moments.OperatorExpr] = []
    for pos, token in enumerate(word.split(), start=1):
        m = _TOKEN.match(token)
        if not m:
            raise JobError(f"word: token {pos} {token!r} is not Xi, Xi^k or Hn(Xi)")
        index = int(m.group(1) or m.group(4))
        if not 1 <= index <= len(vectors):
            raise JobError(f"word: token {pos} {token!r} refers to index {index}, "
                           f"covariance has {len(vectors)}")
        vec = vectors[index - 1]
        if m.group(3) is not None:
            try:
                factors.append(moments.hermite_of_field(int(m.group(3)), vec, q))
            except ValueError as exc:
                raise JobError(f"word: token {pos} {token!r}: {exc}") from None
        else:
            factors.append(moments.Field(vec) ** int(m.group(2) or 1))
    if not factors:
        return moments.Identity()
    return factors[0] if len(factors) == 1 else moments.Product(tuple(factors))


@dataclass
class Outcome:
    exit_code: int
    text: str
    csv_rows: list[list[str]] | None = None
    json: Any = None


def _csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def cmd_moment(job: dict[str, Any]) -> Outcome:
    q = _q(job)
    cov = _covariance(job)
    word = job.get("word", "")
    expr = parse_word(word, cov, q)
    value = moments.vacuum_expectation(expr, q)
    return Outcome(
        EXIT_OK,
        f"{value}\n{float(value)!r}\n",
        [["word", "value", "float"], [word, str(value), repr(float(value))]],
        {"word": word, "q": str(q), "value": str(value), "float": float(value)},
    )


def cmd_bell(job: dict[str, Any]) -> Outcome:
    q = _q(job, allow_minus_one=True)
    cov = _covariance(job)
    try:
        v = bell_check(cov, q)
    except ValueError as exc:
        raise JobError(f"covariance: {exc}") from None
    fields = {
        "q": str(q),
        "fg": str(cov[0, 1]),
        "gh": str(cov[1, 2]),
        "fh": str(cov[0, 2]),
        "branch": v.branch or "none",
        "bell_applicable": str(v.bell_applicable).lower(),
        "bell_satisfied": str(v.bell_satisfied).lower(),
        "variance_min": render(v.variance_min) if v.variance_min is not None else "n/a",
        "variance_nonnegative": str(v.variance_nonnegative).lower(),
        "verdict": v.verdict.value,
    }
    width = max(map(len, fields))
    text = "".join(f"{k.ljust(width)}  {val}\n" for k, val in fields.items())
    code = EXIT_EXCLUDED if v.verdict is Verdict.NO_CLASSICAL_VERSION else EXIT_OK
    return Outcome(code, text, [list(fields), list(fields.values())], fields)


def scan_rows(job: dict[str, Any]) -> list[list[str]]:
    q = _q(job, allow_minus_one=True)
    rho = _grid(job.get("rho", []), "rho")
    fg = _grid(job.get("fg", []), "fg")
    rows = [SCAN_HEADER]
    for r in region_scan(rho, fg, q):
        rows.append([
            str(r.rho), str(r.fg), str(r.q),
            "" if r.bell_applicable is None else str(r.bell_applicable).lower(),
            "" if r.bell_satisfied is None else str(r.bell_satisfied).lower(),
            render(r.variance_min),
            r.verdict.value,
        ])
    return rows


def cmd_scan(job: dict[str, Any]) -> Outcome:
    rows = scan_rows(job)
    records = [dict(zip(SCAN_HEADER, row)) for row in rows[1:]]
    return Outcome(EXIT_OK, _csv(rows), rows, records)


@dataclass
class VerifyReport:
    switch_checked: int = 0
    qv_checked: int = 0
    mismatches: list[dict[str, str]] = field(default_factory=list)

    @property
    def checked(self) -> int:
        return self.switch_checked + self.qv_checked


def run_verify(depth: int = DEFAULT_VERIFY_DEPTH, qs=VERIFY_Q, rhos=VERIFY_RHO) -> VerifyReport:
    """Closed form vs. Fock evaluation for degrees ``n, m < depth``.

    Covers every switching-lemma family over ``rhos`` x ``qs`` and the
    classical second-moment identity for a fixed set of covariances.
    """
    report = VerifyReport()
    for q in qs:
        for rho in rhos:
            cov = CovarianceSpec(((1, rho), (rho, 1)))
            for kind in moments.SwitchKind:
                for n in range(depth):
                    for m in range(depth):
                        closed = moments.switch_closed_form(kind, n, m, rho, q)
                        brute = moments.switch_bruteforce(kind, n, m, cov, q)
                        report.switch_checked += 1
                        if closed != brute:
                            report.mismatches.append({
                                "check": "switch", "kind": kind.value, "n": str(n), "m": str(m),
                                "rho": str(rho), "q": str(q),
                                "closed_form": str(closed), "bruteforce": str(brute),
                            })
        for entries in VERIFY_QV_COVARIANCES:
            cov = CovarianceSpec.triplet(*entries)
            for n in range(min(depth, QV_MAX_DEGREE + 1)):
                for m in range(min(depth, QV_MAX_DEGREE + 1)):
                    lhs, rhs = moments.qv_nc_sides(cov, n, m, q)
                    report.qv_checked += 1
                    if lhs != rhs:
                        report.mismatches.append({
                            "check": "classical-second-moment", "covariance": "/".join(entries),
                            "n": str(n), "m": str(m), "q": str(q), "lhs": str(lhs), "rhs": str(rhs),
                        })
    return report


def cmd_verify(job: dict[str, Any]) -> Outcome:
    depth = job.get("depth", DEFAULT_VERIFY_DEPTH)
    if isinstance(depth, bool) or not isinstance(depth, int) or depth < 0:
        raise JobError("depth: expected a non-negative integer")
    if 2 * (depth - 1) + 2 > moments.SWITCH_COST_LIMIT:
        raise JobError(f"depth: {depth} exceeds the cost limit (max "
                       f"{moments.SWITCH_COST_LIMIT // 2})")
    qs = (_q(job),) if "q" in job else VERIFY_Q
    rhos = tuple(_grid(job["rho"], "rho")) if "rho" in job else VERIFY_RHO
    report = run_verify(depth, qs, rhos)
    lines = [
        f"switching-lemma identities checked: {report.switch_checked}",
        f"classical second-moment identities checked: {report.qv_checked}",
    ]
    if report.mismatches:
        lines.append(f"MISMATCHES: {len(report.mismatches)}")
        for mm in report.mismatches:
            lines.append("  " + " ".join(f"{k}={v}" for k, v in mm.items()))
    else:
        lines.append("mismatches: 0")
    rows = [["check", "count"], ["switch", str(report.switch_checked)],
            ["classical-second-moment", str(report.qv_checked)],
            ["mismatches", str(len(report.mismatches))]]
    payload = {"switch_checked": report.switch_checked, "qv_checked": report.qv_checked,
               "mismatches": report.mismatches}
    code = EXIT_MISMATCH if report.mismatches else EXIT_OK
    return Outcome(code, "\n".join(lines) + "\n", rows, payload)


HANDLERS = {"moment": cmd_moment, "bell": cmd_bell, "scan": cmd_scan, "verify": cmd_verify}


def run_job(text: str) -> Outcome:
    job = load_job(text)
    return HANDLERS[job["command"]](job)


def format_outcome(outcome: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(outcome.json, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _csv(outcome.csv_rows or [])
    return outcome.text


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--input", "input_path", default="-", show_default=True,
              help="JSON job file, or '-' for stdin.")
@click.option("--output", "output_path", default="-", show_default=True,
              help="Output file, or '-' for stdout.")
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default=None,
              help="Output format (default: csv for scan, text otherwise).")
def cli(input_path: str, output_path: str, fmt: str | None) -> None:
    """Exact q-Gaussian moments and classical-version feasibility checks."""
    try:
        with click.open_file(input_path, "r", encoding="utf-8") as fh:
            text = fh.read()
        job = load_job(text)
        outcome = HANDLERS[job["command"]](job)
    except (JobError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    if fmt is None:
        fmt = "csv" if job["command"] == "scan" else "text"
    with click.open_file(output_path, "w", encoding="utf-8") as out:
        out.write(format_outcome(outcome, fmt))
    sys.exit(outcome.exit_code)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
