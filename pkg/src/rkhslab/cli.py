"""Command-line front end: ``rkhslab {kernel,pick,model,dilate,report}``.

Settings come from flags and an optional JSON config file (``--config``);
flags win. Every report echoes the tolerances it used. Exit codes: 0 pass,
1 usage or I/O error, 2 mathematical verdict failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import experiments as ex
from .dilation import agler_coextension
from .errors import PreconditionError, RKHSLabError
from .kernels import (
    KernelSpec,
    classify_summability,
    is_cnp,
    regularity_profile,
    table_for,
)
from .linalg import is_psd
from .model_ops import (
    OperatorTuple,
    commutator_tail_norms,
    compress,
    defect_operator,
    hereditary_1k,
    sampled_multiplier_power_norm,
    shift_tuple,
    technical_identity_check,
    toeplitz_defect,
    truncated_shift,
)
from .pick import (
    PickProblem,
    ball_samples,
    kernel_quotient_gram,
    negative_principal_minor,
    pick_matrix,
)
from .polyspace import (
    HomogeneousIdeal,
    HomogeneousPolynomial,
    build_basis,
    complement_basis,
    compositions,
)

EXIT_OK, EXIT_USAGE, EXIT_VERDICT = 0, 1, 2
CSV_COLUMNS = ("section", "item", "value", "verdict", "expected")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return ""
    return str(x)


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def _row(section: str, item: str, value: Any, verdict: str = "", expected: str = "") -> dict:
    return {"section": section, "item": item, "value": value, "verdict": verdict, "expected": expected}


# config handling

def _load_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def _merge(args: argparse.Namespace) -> dict[str, Any]:
    cfg = _load_config(args.config)
    for key, value in vars(args).items():
        if key in ("config", "command", "handler") or value is None:
            continue
        cfg[key] = value
    return cfg


def _require(cfg: dict, key: str) -> Any:
    if cfg.get(key) is None:
        raise UsageError(f"missing required setting {key!r} (flag or config)")
    return cfg[key]


def _kernel(cfg: dict, family_key: str = "family") -> KernelSpec:
    name = _require(cfg, family_key)
    return KernelSpec.from_name(name, d=int(cfg.get("d", 1)), s=cfg.get("s"), sigma=cfg.get("sigma"))


def _json_input(value: Any, what: str) -> Any:
    """A config value that is either inline JSON data or a path to a JSON file."""
    if isinstance(value, (dict, list)):
        return value
    try:
        return json.loads(Path(value).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {value}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} file {value} is not valid JSON: {exc}") from exc


# commands

def cmd_kernel(cfg: dict) -> tuple[dict, int]:
    spec = _kernel(cfg)
    N = int(_require(cfg, "N"))
    tol = float(cfg.setdefault("tol", 1e-12))
    table = table_for(spec, N)
    verdict = is_cnp(table, tol)
    summ = classify_summability(table, tol)
    results: dict[str, Any] = {
        "kernel": spec.to_dict(N),
        "a": table.a, "b": table.b[1:],
        "cnp": str(verdict), "cnp_detail": verdict.to_dict(),
        "summability": {"sum_a": summ.sum_a, "sum_b": summ.sum_b, "flags": summ.flags,
                        "a_tail_fraction": summ.a_tail_fraction},
    }
    if N >= 4:
        reg = regularity_profile(table)
        results["regularity"] = {"deviation": reg.deviation, "window_start": reg.window_start,
                                 "threshold": reg.threshold, "flagged": reg.flagged}
    rows = [_row("kernel", "cnp", str(verdict), "pass" if verdict.passed else "fail"),
            _row("kernel", "sum_b", summ.sum_b)]
    rows += [_row("a", str(n), x) for n, x in enumerate(table.a)]
    rows += [_row("b", str(n), x) for n, x in enumerate(table.b) if n]
    # the CSV form of this command is the coefficient table itself
    report = {"results": results, "rows": rows, "csv": table.to_csv()}
    return report, EXIT_OK if verdict.passed else EXIT_VERDICT


def _pick_problem(cfg: dict) -> tuple[dict, int]:
    problem = PickProblem.from_dict(_json_input(cfg["problem"], "problem"))
    spec = _kernel(cfg) if cfg.get("family") else KernelSpec.hardy()
    cfg["family"] = spec.family
    N = int(_require(cfg, "N"))
    tol = float(cfg.setdefault("tol", 1e-10))
    if spec.d != problem.d:
        spec = KernelSpec.from_name(spec.family, d=problem.d, s=spec.s, sigma=spec.sigma)
    v = is_psd(pick_matrix(problem, spec, N), tol)
    rows = [_row("pick", "min_eigenvalue", v.min_eigenvalue, v.verdict),
            _row("pick", "size", v.size), _row("pick", "tolerance", v.tolerance)]
    return {"results": {"verdict": v.to_dict()}, "rows": rows}, EXIT_OK if v.psd else EXIT_VERDICT


def _pick_sweep(cfg: dict) -> tuple[dict, int]:
    spec = _kernel(cfg) if cfg.get("family") else KernelSpec.hardy()
    cfg["family"] = spec.family
    N = int(_require(cfg, "N"))
    tol = float(cfg.setdefault("tol", 1e-10))
    node = float(cfg.setdefault("node", 0.5))
    steps = int(cfg.setdefault("steps", 21))
    xtol = float(cfg.setdefault("xtol", 1e-9))
    rows = []
    for t in np.linspace(0.0, 0.99, steps):
        v = is_psd(pick_matrix(ex.two_node_problem(node, float(t)), spec, N), tol)
        rows.append(_row("sweep", _fmt(float(t)), v.min_eigenvalue, v.verdict))
    thr = ex.two_node_threshold(spec, node, N, xtol)
    results: dict[str, Any] = {"threshold": thr, "node": node}
    code = EXIT_OK
    if spec.family == "hardy":
        oracle = ex.hardy_two_node_oracle(node)
        ok = abs(thr - oracle) <= 1e-6
        results["oracle"] = oracle
        rows.append(_row("threshold", "bisection", thr, "pass" if ok else "fail", _fmt(oracle)))
        code = EXIT_OK if ok else EXIT_VERDICT
    else:
        rows.append(_row("threshold", "bisection", thr))
    return {"results": results, "rows": rows}, code


def _pick_quotient(cfg: dict) -> tuple[dict, int]:
    num_name, _, den_name = str(cfg["quotient"]).partition("/")
    if not den_name:
        raise UsageError("--quotient expects NUMERATOR/DENOMINATOR family names")
    d = int(cfg.get("d", 1))
    num = KernelSpec.from_name(num_name, d=d, s=cfg.get("s"), sigma=cfg.get("sigma"))
    den = KernelSpec.from_name(den_name, d=d, s=cfg.get("s"), sigma=cfg.get("sigma"))
    N = int(_require(cfg, "N"))
    tol = float(cfg.setdefault("tol", 1e-10))
    count = int(cfg.setdefault("samples", 50))
    rmax = float(cfg.setdefault("rmax", 0.9))
    seed = int(cfg.setdefault("seed", 0))
    pts = ball_samples(d, count, rmax, seed)
    q = kernel_quotient_gram(num, den, pts, N, tol)
    minor = negative_principal_minor(q.matrix)
    rows = [_row("quotient", f"{num.label}/{den.label}", q.verdict.min_eigenvalue, q.verdict.verdict),
            _row("quotient", "most_negative_2x2_minor", minor.det,
                 "certified_negative" if minor.certified_negative else "not_certified")]
    results = {"verdict": q.verdict.to_dict(),
               "minor": {"i": minor.i, "j": minor.j, "det": minor.det, "error_bound": minor.error_bound}}
    return {"results": results, "rows": rows}, EXIT_OK if q.verdict.psd else EXIT_VERDICT


def cmd_pick(cfg: dict) -> tuple[dict, int]:
    if cfg.get("problem"):
        return _pick_problem(cfg)
    if cfg.get("sweep"):
        return _pick_sweep(cfg)
    if cfg.get("quotient"):
        return _pick_quotient(cfg)
    raise UsageError("pick needs --problem FILE, --sweep or --quotient NUM/DEN")


def _check_restriction(table, d, N, tol, seed):
    spec = ex.restriction_spectrum(table, d, N)
    rows = [_row("restriction", f"eig{i}", c, "", _fmt(e))
            for i, (c, e) in enumerate(zip(spec.computed, spec.expected))]
    ok = spec.error <= tol
    rows.append(_row("restriction", "max_error", spec.error, "pass" if ok else "fail"))
    return {"computed": spec.computed, "expected": spec.expected, "max_error": spec.error}, rows, ok


def _check_projection(table, d, N, tol, seed):
    dist = ex.projection_distance(table, d, N)
    ok = dist <= tol
    verdict = "rank_one_projection" if ok else "not_projection"
    return {"distance": dist}, [_row("projection", "distance", dist, verdict)], ok


def _check_technical(table, d, N, tol, seed):
    basis = build_basis(table, d, N)
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    for m in range(1, N + 1):
        idx = list(compositions(m, d))
        coeffs = rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))
        p = HomogeneousPolynomial.from_vector(basis, m, coeffs)
        for n in range(1, m + 1):
            res, factor = technical_identity_check(basis, table, n, p)
            worst = max(worst, res)
            rows.append(_row("technical", f"n={n},m={m}", res, "", _fmt(factor)))
    ok = worst <= tol
    rows.append(_row("technical", "max_residual", worst, "pass" if ok else "fail"))
    return {"max_residual": worst}, rows, ok


def _check_defect(table, d, N, tol, seed):
    basis, S = truncated_shift(table, d, N)
    D = defect_operator(S, basis.degrees)
    rows, worst = [], 0.0
    for m, evals in D.per_degree.items():
        expected = 1.0 if (m == 0 or m == N) else 1.0 - table.a[m - 1] / table.a[m]
        err = float(np.max(np.abs(evals - expected)))
        if m < N:
            worst = max(worst, err)
        rows.append(_row("defect", f"degree={m}", float(evals.max()), "", _fmt(expected)))
    ok = worst <= tol
    rows.append(_row("defect", "max_interior_error", worst, "pass" if ok else "fail"))
    return {"eigenvalues": D.eigenvalues, "max_interior_error": worst}, rows, ok


def _check_commutator(table, d, N, tol, seed):
    basis, S = truncated_shift(table, d, N)
    tail = commutator_tail_norms(S, basis.degrees)
    rows = [_row("commutator", f"cutoff={m}", v) for m, v in zip(tail.cutoffs, tail.values)]
    rows.append(_row("commutator", "boundary", tail.boundary))
    return {"values": tail.values, "boundary": tail.boundary}, rows, True


def _check_toeplitz(table, d, N, tol, seed):
    td = toeplitz_defect(table, None, d, N)
    rows = [_row("toeplitz", f"degree={n}", mag, "", _fmt(abs(f)))
            for n, (mag, f) in enumerate(zip(td.magnitudes, td.factors))]
    ok = td.residual <= tol
    rows.append(_row("toeplitz", "residual", td.residual, "pass" if ok else "fail"))
    return {"factors": td.factors, "magnitudes": td.magnitudes, "residual": td.residual}, rows, ok


def _check_norms(table, d, N, tol, seed):
    rows, ok = [], True
    for n in range(1, N + 1):
        mn = sampled_multiplier_power_norm(table, d, N, n)
        good = mn.norm <= mn.target + tol
        ok &= good
        rows.append(_row("norms", f"n={n}", mn.norm ** 2, "pass" if good else "fail", _fmt(mn.target ** 2)))
    return {}, rows, ok


CHECKS: dict[str, Callable] = {
    "restriction": _check_restriction,
    "lemma91": _check_restriction,  # older name, kept for scripts
    "projection": _check_projection,
    "technical": _check_technical,
    "defect": _check_defect,
    "commutator": _check_commutator,
    "toeplitz": _check_toeplitz,
    "norms": _check_norms,
}


def _read_tuple(path: str) -> OperatorTuple:
    try:
        return OperatorTuple.from_text(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read tuple file {path}: {exc}") from exc


def cmd_model(cfg: dict) -> tuple[dict, int]:
    spec = _kernel(cfg)
    N = int(_require(cfg, "N"))
    tol = float(cfg.setdefault("tol", 1e-10))
    seed = int(cfg.setdefault("seed", 0))
    d = spec.d
    table = table_for(spec, N)
    if cfg.get("bergman_hereditary"):
        _, S = truncated_shift(table, d, N)
        H = hereditary_1k(S, table_for(KernelSpec.bergman(d), N), tol=tol)
        rows = [_row("bergman_hereditary", f"eig{i}", e) for i, e in enumerate(H.eigenvalues)]
        rows.append(_row("bergman_hereditary", "min_eigenvalue", H.min_eigenvalue, H.verdict))
        return {"results": H.report(inputs={"shift": spec.label, "coefficients": "bergman_disc"}),
                "rows": rows}, EXIT_OK if H.psd else EXIT_VERDICT
    if cfg.get("tuple"):
        T = _read_tuple(cfg["tuple"])
        order = cfg.get("order", "auto-nilpotent")
        H = hereditary_1k(T, table, order if order == "auto-nilpotent" else int(order), tol=tol)
        rows = [_row("hereditary", "min_eigenvalue", H.min_eigenvalue, H.verdict),
                _row("hereditary", "order", H.order, H.tail_status)]
        return {"results": H.report(inputs={"tuple": cfg["tuple"]}), "rows": rows}, \
            EXIT_OK if H.psd else EXIT_VERDICT
    check = cfg.get("check")
    if not check:
        raise UsageError("model needs --check, --bergman-hereditary or --tuple")
    if check not in CHECKS:
        raise UsageError(f"unknown check {check!r}; choose from {sorted(CHECKS)}")
    results, rows, ok = CHECKS[check](table, d, N, tol, seed)
    return {"results": results, "rows": rows}, EXIT_OK if ok else EXIT_VERDICT


def cmd_dilate(cfg: dict) -> tuple[dict, int]:
    spec = _kernel(cfg)
    N = int(_require(cfg, "N"))
    tol = float(cfg.setdefault("tol", 1e-8))
    d = spec.d
    table = table_for(spec, N)
    basis = build_basis(table, d, N)
    ideal_data = cfg.get("ideal")
    ideal = (HomogeneousIdeal.from_dict(_json_input(ideal_data, "ideal")) if ideal_data
             else HomogeneousIdeal.maximal_power(d, N + 1))
    comp = complement_basis(ideal, basis)
    if cfg.get("zero"):
        T, comp = OperatorTuple.zero(d, 1), None
    elif cfg.get("tuple"):
        T, comp = _read_tuple(cfg["tuple"]), None
    else:
        r = float(cfg.setdefault("scale", 1.0))
        shift_name = cfg.get("shift_family") or spec.family
        shift_spec = KernelSpec.from_name(shift_name, d=d, s=cfg.get("s"), sigma=cfg.get("sigma"))
        shift_basis = build_basis(table_for(shift_spec, N), d, N)
        shift_comp = complement_basis(ideal, shift_basis)
        T = compress(shift_tuple(shift_basis), shift_comp.embedding()).scaled(r)
    try:
        cert = agler_coextension(T, table, basis, comp, tol=tol)
    except PreconditionError as exc:
        rows = [_row("dilate", "precondition", str(exc), "precondition_error")]
        return {"results": {"error": str(exc)}, "rows": rows}, EXIT_VERDICT
    rows = [_row("dilate", "isometry_residual", cert.isometry_residual)]
    rows += [_row("dilate", f"intertwining_{j + 1}", v) for j, v in enumerate(cert.intertwining_residuals)]
    rows += [_row("dilate", f"compression_{j + 1}", v) for j, v in enumerate(cert.compression_residuals)]
    if cert.range_residual is not None:
        rows.append(_row("dilate", "range_residual", cert.range_residual))
    rows.append(_row("dilate", "certificate", cert.tolerance, "valid" if cert.valid else "invalid"))
    results = cert.to_dict() | {"clamped_mass": cert.clamped_mass, "shape": list(cert.V.shape)}
    return {"results": results, "rows": rows}, EXIT_OK if cert.valid else EXIT_VERDICT


def _report_kernels(cfg: dict) -> list[KernelSpec]:
    entries = cfg.get("kernels")
    if entries is None and cfg.get("family"):
        entries = [{"family": cfg["family"], "d": cfg.get("d", 1), "s": cfg.get("s"),
                    "sigma": cfg.get("sigma")}]
    if not entries:
        raise UsageError("report needs a non-empty 'kernels' list in --config (or --family)")
    out = []
    for e in entries:
        e = {k: v for k, v in e.items() if v is not None}
        out.append(KernelSpec.from_dict(e)[0])
    return out


def _kernel_rows(spec: KernelSpec, N: int, tol: float, cert_tol: float, radii) -> list[dict]:
    label, d = f"{spec.label} d={spec.d}", spec.d
    table = table_for(spec, N)
    verdict = is_cnp(table, 1e-12)
    cnp = verdict.passed
    rows = [_row(label, "cnp", str(verdict), "pass" if cnp else "fail",
                 "fail" if spec.family == "bergman_disc" else "pass"),
            _row(label, "sum_b", classify_summability(table).sum_b)]
    dist = ex.projection_distance(table, d, N)
    rows.append(_row(label, "projection_distance", dist, "pass" if dist <= tol else "fail", "pass"))
    err = ex.restriction_spectrum(table, d, N).error
    rows.append(_row(label, "restriction_spectrum_error", err, "pass" if err <= tol else "fail", "pass"))
    worst = 0.0
    basis = build_basis(table, d, N)
    for m in range(1, N + 1):
        p = HomogeneousPolynomial.monomial((m,) + (0,) * (d - 1))
        for n in range(1, m + 1):
            worst = max(worst, technical_identity_check(basis, table, n, p)[0])
    rows.append(_row(label, "technical_max_residual", worst, "pass" if worst <= tol else "fail", "pass"))
    td = toeplitz_defect(table, None, d, N)
    rows.append(_row(label, "toeplitz_residual", td.residual, "pass" if td.residual <= tol else "fail", "pass"))
    _, S = truncated_shift(table, d, N)
    for r in radii:
        T = S.scaled(r)
        try:
            cert = agler_coextension(T, table, basis, tol=cert_tol)
            worst = max(cert.isometry_residual, *cert.intertwining_residuals, *cert.compression_residuals)
            rows.append(_row(label, f"coextension_r={r:g}", worst, "valid" if cert.valid else "invalid",
                             "valid"))
        except PreconditionError:
            rows.append(_row(label, f"coextension_r={r:g}", None, "precondition_error", "valid"))
    return rows


def cmd_report(cfg: dict) -> tuple[dict, int]:
    specs = _report_kernels(cfg)
    N = int(_require(cfg, "N"))
    tol = float(cfg.setdefault("tol", 1e-10))
    cert_tol = float(cfg.setdefault("cert_tol", 1e-8))
    seed = int(cfg.setdefault("seed", 0))
    radii = [float(r) for r in cfg.setdefault("radii", [0.5, 0.9, 1.0])]
    rows: list[dict] = []
    for spec in specs:
        rows += _kernel_rows(spec, N, tol, cert_tol, radii)
    thr = ex.two_node_threshold(KernelSpec.hardy(), 0.5, N=max(N, 60))
    ok = abs(thr - 0.5) <= 1e-6
    rows.append(_row("pick", "hardy_two_node_threshold", thr, "pass" if ok else "fail", "pass"))
    pts = ball_samples(1, 50, 0.9, seed)
    for num, den, want in (("bergman", "hardy", "psd"), ("hardy", "bergman", "not_psd")):
        q = kernel_quotient_gram(KernelSpec.from_name(num), KernelSpec.from_name(den), pts, max(N, 60), tol)
        rows.append(_row("pick", f"quotient_{num}/{den}", q.verdict.min_eigenvalue, q.verdict.verdict, want))
    H = ex.bergman_on_hardy_shift(N)
    rows.append(_row("model", "bergman_on_hardy_shift_min_eigenvalue", H.min_eigenvalue, H.verdict, "not_psd"))
    hardy = table_for(KernelSpec.hardy(), N)
    _, S = truncated_shift(hardy, 1, N)
    bergman = table_for(KernelSpec.bergman(), N)
    try:
        agler_coextension(S, bergman, build_basis(bergman, 1, N), tol=cert_tol)
        outcome = "constructed"
    except PreconditionError:
        outcome = "precondition_error"
    rows.append(_row("dilate", "bergman_coextension_of_hardy_shift", None, outcome, "precondition_error"))
    bad = [r for r in rows if r["expected"] and r["verdict"] != r["expected"]]
    results = {"items": len(rows), "mismatches": len(bad)}
    return {"results": results, "rows": rows}, EXIT_OK if not bad else EXIT_VERDICT


# output

def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_markdown(rows: list[dict], title: str) -> str:
    lines = [f"# {title}", "", "| " + " | ".join(CSV_COLUMNS) + " |",
             "|" + "---|" * len(CSV_COLUMNS)]
    for r in rows:
        lines.append("| " + " | ".join(_fmt(r.get(c)) for c in CSV_COLUMNS) + " |")
    return "\n".join(lines) + "\n"


def render(command: str, cfg: dict, report: dict, code: int, elapsed: float) -> str:
    fmt = cfg.get("format", "json")
    if fmt == "csv":
        return report.get("csv") or rows_to_csv(report["rows"])
    if fmt == "markdown":
        return rows_to_markdown(report["rows"], f"rkhslab {command}")
    out = {"command": command, "config": cfg, "results": report["results"],
           "rows": report["rows"], "exit_code": code, "wall_clock_seconds": elapsed}
    return json.dumps(_jsonable(out), indent=2, sort_keys=True) + "\n"


COMMANDS = {"kernel": cmd_kernel, "pick": cmd_pick, "model": cmd_model,
            "dilate": cmd_dilate, "report": cmd_report}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its entries")
    common.add_argument("--family")
    common.add_argument("--s", type=float)
    common.add_argument("--sigma", type=float)
    common.add_argument("-d", type=int)
    common.add_argument("-N", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "markdown"))

    parser = _Parser(prog="rkhslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("kernel", parents=[common], help="coefficients, CNP verdict, profiles")

    p = sub.add_parser("pick", parents=[common], help="Pick feasibility and kernel quotients")
    p.add_argument("--problem", help="Pick problem JSON file")
    p.add_argument("--sweep", action="store_true", default=None, help="two-node sweep 0->0, node->w")
    p.add_argument("--node", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--quotient", help="NUM/DEN family names, e.g. bergman/hardy")
    p.add_argument("--samples", type=int)

    p = sub.add_parser("model", parents=[common], help="hereditary calculus and diagnostics")
    p.add_argument("--check", choices=sorted(CHECKS))
    p.add_argument("--bergman-hereditary", dest="bergman_hereditary", action="store_true", default=None)
    p.add_argument("--tuple", help="operator tuple text file")
    p.add_argument("--order", help="truncation order or auto-nilpotent")

    p = sub.add_parser("dilate", parents=[common], help="coextension certificate")
    p.add_argument("--scale", type=float, help="multiply the compressed shift by this factor")
    p.add_argument("--ideal", help="ideal JSON file")
    p.add_argument("--shift-family", dest="shift_family", help="family whose shift is dilated")
    p.add_argument("--tuple", help="operator tuple text file")
    p.add_argument("--zero", action="store_true", default=None, help="dilate the zero tuple on C")

    sub.add_parser("report", parents=[common], help="bundle of all checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help exits 0, bad flags exit 1
        return int(exc.code or 0)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        cfg = _merge(args)
        report, code = COMMANDS[args.command](cfg)
        text = render(args.command, cfg, report, code, time.perf_counter() - start)
        if cfg.get("out"):
            Path(cfg["out"]).write_text(text)
        else:
            sys.stdout.write(text)
    except UsageError as exc:
        print(f"rkhslab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RKHSLabError, ValueError, OSError) as exc:
        print(f"rkhslab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
