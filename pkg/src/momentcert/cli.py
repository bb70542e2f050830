"""Batch front door: read a JSON configuration, run the requested
computation, emit machine-readable reports (JSON or CSV).

Exit codes: 0 all checks pass, 1 violation or FAIL, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

from . import distmodel
from .bounds import (
    BoundReport,
    SequenceSpec,
    bound_even_centered,
    bound_even_symmetric,
    bound_general_p,
    bound_p_2_4,
    check_centered_tail_bounds,
    check_rademacher_moment_ratio,
    check_symmetric_tail_bounds,
    compute_m,
    latala_logconcave_bounds,
)
from .charfn import (
    check_cosine_bounds,
    check_main_charfn_inequality,
    sum_abs_moment_via_haagerup,
)
from .combinatorics import (
    count_no_singleton_compositions,
    count_support_compositions,
    enumerate_indices,
)
from .distmodel import MomentProfile, VariableSpec
from .exactmoments import WeightVector, gaussian_lp_norm, sum_even_moment
from .oracle import exact_discrete_moment, mc_moment, verify_report

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_COMMANDS = ("moments", "bound", "verify", "check-lemmas", "scan")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    variables: list[VariableSpec]
    p_values: list[float] = field(default_factory=list)
    r_values: list[int] = field(default_factory=list)
    n_values: list[int] = field(default_factory=list)
    seed: int = 0
    samples: int = 1_000_000
    tol: float = 1e-8
    confidence: float = 0.999
    output_format: str = "json"
    output_path: str | None = None


def _parse_variable(doc: dict) -> list[VariableSpec]:
    if not isinstance(doc, dict) or "family" not in doc:
        raise ConfigError(f"variable descriptor must be an object with a family: {doc!r}")
    family = doc["family"]
    count = int(doc.get("count", 1))
    if count < 1:
        raise ConfigError("variable count must be at least 1")
    try:
        if family == "gaussian":
            spec = distmodel.gaussian(doc["sigma"])
        elif family == "rademacher":
            spec = distmodel.rademacher(doc["sigma"])
        elif family == "symmetric_exponential":
            spec = distmodel.symmetric_exponential(doc["sigma"])
        elif family == "uniform":
            spec = distmodel.uniform(doc["a"])
        elif family == "symmetric_three_point":
            spec = distmodel.symmetric_three_point(doc["b"], doc["q"])
        elif family == "raw_moments":
            profile = MomentProfile(
                tuple(doc["moments"]),
                symmetric=bool(doc.get("symmetric", False)),
                centered=bool(doc.get("centered", True)),
            )
            spec = distmodel.from_profile(profile)
        elif family == "atoms":
            spec = distmodel.spec_from_atoms(
                doc["values"], doc["probs"], int(doc.get("max_order", 12))
            )
        else:
            raise ConfigError(f"unknown family {family!r}")
    except KeyError as exc:
        raise ConfigError(f"missing parameter {exc} for family {family!r}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return [spec] * count


def load_config(path: str, *, seed=None, output_format=None, output_path=None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    command = doc.get("command")
    if command not in _COMMANDS:
        raise ConfigError(f"command must be one of {_COMMANDS}, got {command!r}")
    raw_vars = doc.get("variables") or []
    if not raw_vars:
        raise ConfigError("at least one variable is required")
    variables = [s for d in raw_vars for s in _parse_variable(d)]
    cfg = RunConfig(
        command=command,
        variables=variables,
        p_values=[float(p) for p in doc.get("p_values", [])],
        r_values=[int(r) for r in doc.get("r_values", [])],
        n_values=[int(n) for n in doc.get("n_values", [])],
        seed=int(doc.get("seed", 0)),
        samples=int(doc.get("samples", 1_000_000)),
        tol=float(doc.get("tol", 1e-8)),
        confidence=float(doc.get("confidence", 0.999)),
        output_format=doc.get("output_format", "json"),
        output_path=doc.get("output_path"),
    )
    if seed is not None:
        cfg.seed = seed
    if output_format is not None:
        cfg.output_format = output_format
    if output_path is not None:
        cfg.output_path = output_path
    if cfg.output_format not in ("json", "csv"):
        raise ConfigError(f"output_format must be json or csv, got {cfg.output_format!r}")
    if cfg.tol <= 0:
        raise ConfigError("tol must be positive")
    if command in ("moments", "bound", "verify", "scan") and not (
        cfg.p_values or cfg.r_values
    ):
        raise ConfigError(f"command {command!r} needs p_values or r_values")
    if command == "scan" and not cfg.n_values:
        raise ConfigError("scan needs n_values")
    return cfg


def _tag(value: float, provenance: str, error: float | None = None) -> dict:
    out = {"value": value, "provenance": provenance}
    if error is not None:
        out["error"] = error
    return out


def _norm_estimate(specs: list[VariableSpec], p: float, cfg: RunConfig) -> dict:
    """||sum X_k||_p via the best available engine, tagged with provenance."""
    if float(p).is_integer() and int(p) % 2 == 0 and int(p) >= 2:
        raw = sum_even_moment([s.moments(int(p)) for s in specs], int(p) // 2)
        return _tag(raw ** (1.0 / p), "exact")
    samplable = all(s.family != "raw_moments" for s in specs)
    if 2.0 < p < 4.0 and all(s.symmetric for s in specs) and samplable:
        res = sum_abs_moment_via_haagerup(specs, p, cfg.tol)
        v = res.value ** (1.0 / p)
        err = (res.value + res.total_error) ** (1.0 / p) - v
        return _tag(v, "quadrature", err)
    if not samplable:
        raise ConfigError(
            f"no engine can evaluate p={p} for raw-moment inputs"
        )
    est = mc_moment(specs, p, samples=cfg.samples, seed=cfg.seed, confidence=cfg.confidence)
    return _tag(est.point, "mc", est.half_width)


def _report_row(report: BoundReport) -> dict:
    row = {
        "statement": report.statement_id,
        "p": report.p,
        "certifying": report.certifying,
        "constants": report.constants,
        "assumptions": [
            {"name": a.name, "satisfied": a.satisfied, "detail": a.detail}
            for a in report.assumptions
        ],
    }
    if not report.certifying:
        row["failed"] = [a.name for a in report.failed_assumptions()]
        return row
    prov = report.aux.get("head_provenance", "exact")
    err = report.error_budget if report.error_budget else None
    row["target_kind"] = report.target_kind
    row["start_index"] = report.start_index
    row["center"] = _tag(report.center, "exact")
    if report.lower is not None:
        row["lower"] = _tag(report.lower, prov, err)
    if report.upper is not None:
        row["upper"] = _tag(report.upper, prov, err)
    if report.radius is not None:
        row["radius"] = _tag(report.radius, "exact")
    return row


def _all_reports(seq: SequenceSpec, cfg: RunConfig) -> list[BoundReport]:
    reports: list[BoundReport] = []
    for p in sorted(set(cfg.p_values)):
        if 2.0 <= p <= 4.0:
            reports.append(bound_p_2_4(seq, p))
        reports.extend(
            latala_logconcave_bounds(
                seq, p, tol=cfg.tol, mc_samples=cfg.samples, mc_seed=cfg.seed
            )
        )
        for r in sorted(set(cfg.r_values)):
            if 2.0 <= p <= 2 * r:
                reports.append(bound_general_p(seq, p, r))
    for r in sorted(set(cfg.r_values)):
        reports.append(bound_even_symmetric(seq, r))
        reports.append(bound_even_centered(seq, r))
    reports.sort(key=lambda rep: (rep.statement_id, rep.p))
    return reports


def _ground_for_report(seq: SequenceSpec, report: BoundReport, cfg: RunConfig):
    """Ground truth on the report's target scale, with provenance."""
    ordered = [seq.variables[i] for i in report.permutation] if report.permutation else list(seq.variables)
    target = ordered[report.start_index - 1 :]
    p = report.p
    even = float(p).is_integer() and int(p) % 2 == 0
    if even:
        raw = sum_even_moment([s.moments(int(p)) for s in target], int(p) // 2)
        value = raw if report.target_kind == "abs_moment" else raw ** (1.0 / p)
        return value, "exact"
    if all(s.atoms() is not None for s in target):
        raw = exact_discrete_moment(target, p)
        value = raw if report.target_kind == "abs_moment" else raw ** (1.0 / p)
        return value, "exact"
    samplable = all(s.family != "raw_moments" for s in target)
    if 2.0 < p < 4.0 and all(s.symmetric for s in target) and samplable:
        return sum_abs_moment_via_haagerup(target, p, cfg.tol), "quadrature"
    if not samplable:
        raise ConfigError(f"no oracle available for p={p} on raw-moment inputs")
    return (
        mc_moment(target, p, samples=cfg.samples, seed=cfg.seed, confidence=cfg.confidence),
        "mc",
    )


# -- commands ---------------------------------------------------------------


def _run_moments(cfg: RunConfig) -> tuple[int, list[dict]]:
    rows = []
    for p in sorted(set(cfg.p_values) | {2.0 * r for r in cfg.r_values}):
        est = _norm_estimate(cfg.variables, p, cfg)
        rows.append({"p": p, "lp_norm": est, "gaussian_center": _tag(
            gaussian_lp_norm(p) * math.sqrt(sum(v.variance for v in cfg.variables)),
            "exact",
        )})
    return EXIT_OK, rows


def _run_bound(cfg: RunConfig) -> tuple[int, list[dict]]:
    seq = SequenceSpec(tuple(cfg.variables))
    return EXIT_OK, [_report_row(r) for r in _all_reports(seq, cfg)]


def _run_verify(cfg: RunConfig) -> tuple[int, list[dict]]:
    seq = SequenceSpec(tuple(cfg.variables))
    rows = []
    status = EXIT_OK
    for report in _all_reports(seq, cfg):
        row = _report_row(report)
        if report.certifying:
            ground, provenance = _ground_for_report(seq, report, cfg)
            verdict = verify_report(report, ground)
            gval = getattr(ground, "point", getattr(ground, "value", ground))
            row["ground"] = _tag(float(gval), provenance)
            row["verdict"] = "PASS" if verdict.passed else "FAIL"
            row["margin"] = verdict.margin
            if not verdict.passed:
                status = EXIT_FAIL
        else:
            row["verdict"] = "SKIPPED"
        rows.append(row)
    return status, rows


def _run_check_lemmas(cfg: RunConfig) -> tuple[int, list[dict]]:
    seq = SequenceSpec(tuple(cfg.variables))
    sorted_seq, _ = seq.sorted()
    rows = []
    status = EXIT_OK

    def record(name, passed, **extra):
        nonlocal status
        rows.append({"check": name, "passed": passed, **extra})
        if not passed:
            status = EXIT_FAIL

    families = []
    for s in sorted_seq.variables:
        if s.family != "raw_moments" and s not in families:
            families.append(s)
    for s in families:
        rep = check_cosine_bounds(s)
        record("cosine_bounds", rep.passed, family=s.family, margins=rep.margins)
    if sorted_seq.all_symmetric and all(
        s.family != "raw_moments" for s in sorted_seq.variables
    ):
        m = compute_m(sorted_seq)
        if m < len(sorted_seq):
            gauss = [distmodel.gaussian(math.sqrt(s.variance)) for s in sorted_seq.variables]
            rep = check_main_charfn_inequality(list(sorted_seq.variables), gauss, m)
            record(
                "charfn_inequality",
                rep.passed or not rep.applicable,
                applicable=rep.applicable,
                m=m,
                margins=rep.margins,
            )
    rs = sorted(set(cfg.r_values)) or [2]
    for r in rs:
        for i in range(1, r + 1):
            n = r + 2
            got_a = sum(1 for _ in enumerate_indices(n, r, support=set(range(1, i + 1))))
            got_b = sum(
                1
                for _ in enumerate_indices(
                    n, 2 * r, support=set(range(1, i + 1)), no_singletons=True
                )
            )
            record(
                "counting_identities",
                got_a == count_support_compositions(r, i)
                and got_b == count_no_singleton_compositions(r, i),
                r=r,
                i=i,
            )
        tail = check_symmetric_tail_bounds(seq, r) if seq.all_symmetric else None
        if tail is not None and tail.applicable:
            record("symmetric_tail_bounds", tail.passed, r=r, cutoff=tail.cutoff_index)
        ctail = check_centered_tail_bounds(seq, r) if seq.all_centered else None
        if ctail is not None and ctail.applicable:
            record("centered_tail_bounds", ctail.passed, r=r, cutoff=ctail.cutoff_index)
        w = WeightVector(
            tuple(sorted((math.sqrt(v) for v in seq.variances), reverse=True))
        )
        ratio = check_rademacher_moment_ratio(w, r)
        record("rademacher_moment_ratio", ratio.passed, r=r, ratio=ratio.ratio)
    return status, rows


def _run_scan(cfg: RunConfig) -> tuple[int, list[dict]]:
    base = cfg.variables[0]
    rows = []
    status = EXIT_OK
    for n in sorted(set(cfg.n_values)):
        scale = math.sqrt((1.0 / n) / base.variance)
        spec = base.scaled(scale)
        specs = [spec] * n
        seq = SequenceSpec(tuple(specs))
        for p in sorted(set(cfg.p_values)):
            if float(p).is_integer() and int(p) % 2 == 0 and p >= 4.0:
                report = bound_even_symmetric(seq, int(p) // 2)
            elif 2.0 <= p <= 4.0:
                report = bound_p_2_4(seq, p)
            else:
                report = latala_logconcave_bounds(
                    seq, p, tol=cfg.tol, mc_samples=cfg.samples, mc_seed=cfg.seed
                )[0]
            row = {"n": n, "p": p, "statement": report.statement_id}
            if report.certifying and report.radius is not None:
                est = _norm_estimate(specs, p, cfg)
                deviation = abs(est["value"] - gaussian_lp_norm(p))
                row["radius"] = _tag(report.radius, "exact")
                row["deviation"] = est | {"value": deviation}
                row["within_radius"] = bool(deviation <= report.radius + est.get("error", 0.0))
                if not row["within_radius"]:
                    status = EXIT_FAIL
            else:
                row["certifying"] = False
                row["failed"] = [a.name for a in report.failed_assumptions()]
            rows.append(row)
    return status, rows


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute the configured command; returns (exit_status, document)."""
    dispatch = {
        "moments": _run_moments,
        "bound": _run_bound,
        "verify": _run_verify,
        "check-lemmas": _run_check_lemmas,
        "scan": _run_scan,
    }
    status, rows = dispatch[cfg.command](cfg)
    if cfg.output_format == "csv":
        return status, _to_csv(rows)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "rows": rows,
    }
    return status, json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in row.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, f"{name}."))
        elif isinstance(value, list):
            out[name] = json.dumps(value, sort_keys=True)
        else:
            out[name] = value
    return out


def _to_csv(rows: list[dict]) -> str:
    flat = [_flatten(r) for r in rows]
    columns: list[str] = []
    for r in flat:
        for k in r:
            if k not in columns:
                columns.append(k)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, restval="")
    writer.writeheader()
    for r in flat:
        writer.writerow(r)
    return buf.getvalue()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="momentcert",
        description="Certified Gaussian-approximation bounds for moments of sums",
    )
    parser.add_argument("--config", required=True, help="path to the JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(
            args.config, seed=args.seed, output_format=args.format, output_path=args.out
        )
        status, document = run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(document)
    else:
        sys.stdout.write(document)
    return status


if __name__ == "__main__":
    sys.exit(main())
