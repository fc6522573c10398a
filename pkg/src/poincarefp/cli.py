"""Command-line pipeline: configuration, orchestration, report files.

Subcommands: roots | reduce | check | solve | verify | all.
Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 indeterminate verdicts only.

The config format is flat ``key = value`` text; sequences use bracket
notation, expression strings may be quoted.  All numeric CSV output uses
the shortest round-trip decimal representation (Python ``repr``) so that
identical inputs reproduce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import asymptotics, oracle
from .errors import ConfigError, PoincarefpError
from .exprparse import parse_expression
from .hypotheses import evaluate_hypotheses
from .problem import (
    DEFAULT_ETA,
    DEFAULT_GRID_POINTS,
    DEFAULT_MAX_ITER,
    DEFAULT_T_MAX,
    DEFAULT_TOL,
    ProblemSpec,
)
from .reduction import build_reduced_rhs
from .solver import ode_residual, solve_problem
from .spectral import find_roots, shift_spectrum

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAIL = 2
EXIT_INDETERMINATE = 3

DIAG_T = 50.0


@dataclass
class Config:
    problem: ProblemSpec
    output_dir: Path
    beta_overrides: dict = field(default_factory=dict)  # i -> beta


def _parse_scalar(text: str):
    text = text.strip()
    if (text.startswith('"') and text.endswith('"')) or (
        text.startswith("'") and text.endswith("'")
    ):
        return text[1:-1]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_value(text: str):
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return []
        parts = []
        depth = 0
        quote = ""
        start = 0
        for pos, ch in enumerate(inner):
            if quote:
                if ch == quote:
                    quote = ""
            elif ch in "\"'":
                quote = ch
            elif ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == "," and depth == 0:
                parts.append(inner[start:pos])
                start = pos + 1
        parts.append(inner[start:])
        return [_parse_scalar(p) for p in parts]
    return _parse_scalar(text)


def load_config(path) -> Config:
    """Parse and validate a flat key-value config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    raw: dict = {}
    for lineno, line in enumerate(
        path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        comment = value.find("#")
        if comment >= 0 and '"' not in value[:comment] \
                and "'" not in value[:comment]:
            value = value[:comment]
        raw[key] = _parse_value(value)

    def take(key, default=None, required=False):
        if key in raw:
            return raw.pop(key)
        if required:
            raise ConfigError(f"missing required config key {key!r}")
        return default

    n = take("n", required=True)
    if not isinstance(n, int) or n < 2:
        raise ConfigError(f"n must be an integer >= 2, got {n!r}")
    a = take("a", required=True)
    if not isinstance(a, list) or len(a) != n or not all(
        isinstance(v, (int, float)) for v in a
    ):
        raise ConfigError(f"a must be a list of {n} numbers")
    r = take("r", required=True)
    if not isinstance(r, list) or len(r) != n:
        raise ConfigError(f"r must be a list of {n} expression strings")
    r = [str(src) for src in r]
    for src in r:
        try:
            parse_expression(src)
        except PoincarefpError as exc:
            raise ConfigError(f"bad expression in r: {src!r}: {exc}")

    beta_overrides = {}
    for key in [k for k in raw if k.startswith("beta_")]:
        idx_text = key[len("beta_"):]
        try:
            idx = int(idx_text)
        except ValueError:
            raise ConfigError(f"bad beta override key {key!r}")
        if not 1 <= idx <= n:
            raise ConfigError(f"beta override index {idx} outside 1..{n}")
        beta_overrides[idx] = float(raw.pop(key))

    problem_kwargs = dict(
        t0=float(take("t0", 0.0)),
        t_max=float(take("t_max", DEFAULT_T_MAX)),
        grid_points=int(take("grid_points", DEFAULT_GRID_POINTS)),
        tol=float(take("tol", DEFAULT_TOL)),
        eta=float(take("eta", DEFAULT_ETA)),
        max_iter=int(take("max_iter", DEFAULT_MAX_ITER)),
    )
    output_dir = Path(str(take("output_dir", "out")))
    if raw:
        raise ConfigError(f"unknown config keys: {sorted(raw)}")
    try:
        problem = ProblemSpec(
            n=n,
            a=tuple(float(v) for v in a),
            r_sources=tuple(r),
            **problem_kwargs,
        )
    except PoincarefpError as exc:
        raise ConfigError(str(exc))
    return Config(
        problem=problem, output_dir=output_dir, beta_overrides=beta_overrides
    )


def _fmt(value) -> str:
    return repr(float(value))


def _write_csv(path: Path, header, rows):
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            formatted = []
            for cell in row:
                if isinstance(cell, bool):
                    formatted.append(str(cell))
                elif isinstance(cell, (int, np.integer)):
                    formatted.append(str(int(cell)))
                elif isinstance(cell, (float, np.floating)):
                    formatted.append(_fmt(cell))
                else:
                    formatted.append(str(cell))
            writer.writerow(formatted)


def cmd_roots(config: Config) -> int:
    try:
        spectrum = find_roots(config.problem.a)
    except PoincarefpError as exc:
        print(f"(H1) fail: {exc}")
        return EXIT_FAIL
    roots_text = ", ".join(_fmt(lam) for lam in spectrum.lam)
    print(f"characteristic roots: {roots_text}")
    print(f"separation: {_fmt(spectrum.separation)}")
    for i in range(1, config.problem.n + 1):
        shifted = shift_spectrum(spectrum, i)
        gams = ", ".join(_fmt(g) for g in shifted.gamma)
        print(f"gamma(lambda_{i}): {gams}  [case {shifted.case_index}]")
    print("(H1) pass: roots real and simple")
    return EXIT_OK


def cmd_reduce(config: Config) -> int:
    table = build_reduced_rhs(config.problem.a, config.problem.n)
    out = config.output_dir / "omega_table.txt"
    lines = [
        f"Omega table for n = {config.problem.n}, "
        f"a = ({', '.join(_fmt(v) for v in config.problem.a)})",
        "alpha | Omega_alpha(mu, r)",
    ]
    for alpha, rendered in table.format_rows():
        lines.append(f"{alpha} | {rendered}")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(table.table)} coefficients)")
    return EXIT_OK


def cmd_check(config: Config) -> int:
    problem = config.problem
    rows = []
    any_fail = False
    any_indeterminate = False
    for i in range(1, problem.n + 1):
        report = evaluate_hypotheses(problem, i)
        for line in report.lines():
            print(f"lambda_{i}: {line}")
        verdicts = [report.h1_verdict, report.r2_verdict, report.r3_verdict]
        any_fail = any_fail or any(v == "fail" for v in verdicts)
        any_indeterminate = any_indeterminate or any(
            v == "indeterminate" for v in verdicts
        )
        if report.spectrum is None:
            rows.append((i, "H1", "", "", report.h1_verdict))
            continue
        rows.append((i, "H1", "", report.spectrum.separation,
                     report.h1_verdict))
        for t, value in zip(report.t_grid, report.r_samples):
            rows.append((i, "R", t, value, report.r2_verdict))
        for k, samples in sorted(report.l_samples.items()):
            for t, value in zip(report.t_grid, samples):
                rows.append((i, f"L_{k}", t, value, report.r2_verdict))
        rows.append((i, "phi1", "", report.phi1, ""))
        for est in report.sigma:
            rows.append((
                i, f"sigma({_fmt(est.gamma)})", "",
                est.value if np.isfinite(est.value) else "inf",
                report.r3_verdict if est.status == "finite" else est.status,
            ))
    _write_csv(
        config.output_dir / "hypotheses.csv",
        ("i", "quantity", "t", "value", "verdict"),
        rows,
    )
    print(f"wrote {config.output_dir / 'hypotheses.csv'}")
    if any_fail:
        return EXIT_FAIL
    if any_indeterminate:
        return EXIT_INDETERMINATE
    return EXIT_OK


def _solve_all(config: Config):
    problem = config.problem
    results = {}
    for i in range(1, problem.n + 1):
        results[i] = solve_problem(problem, i)
    return results


def cmd_solve(config: Config) -> int:
    problem = config.problem
    try:
        results = _solve_all(config)
    except PoincarefpError as exc:
        print(f"solve failed: {exc}")
        return EXIT_FAIL
    for i, (operator, grid, cert) in results.items():
        columns = ["t", "z"] + [f"z{j}" for j in range(1, problem.n - 1)]
        rows = [
            (grid.nodes[k], *[grid.values[j][k]
                              for j in range(problem.n - 1)])
            for k in range(len(grid.nodes))
        ]
        csv_path = config.output_dir / f"z_lambda_{i}.csv"
        _write_csv(csv_path, columns, rows)
        cert_path = config.output_dir / f"certificate_{i}.txt"
        cert_path.write_text(cert.format(), encoding="utf-8")
        print(
            f"lambda_{i}: converged in {cert.iterations} iterations, "
            f"residual {_fmt(cert.final_residual)}; wrote {csv_path} and "
            f"{cert_path}"
        )
    return EXIT_OK


def cmd_verify(config: Config) -> int:
    problem = config.problem
    spectrum = find_roots(problem.a)
    table = build_reduced_rhs(problem.a, problem.n)
    try:
        results = _solve_all(config)
    except PoincarefpError as exc:
        print(f"verify: solve stage failed: {exc}")
        return EXIT_FAIL
    fs = asymptotics.build_fundamental_system(
        problem, spectrum, [results[i][1] for i in range(1, problem.n + 1)]
    )
    t_diag = min(DIAG_T, problem.t_max)
    rows = []
    verdicts = []

    def record(quantity, i, j, t, value, reference, ok):
        verdict = "pass" if ok else "fail"
        verdicts.append(verdict)
        rows.append((quantity, i, j, t, value, reference, verdict))

    for i in range(1, problem.n + 1):
        operator, grid, cert = results[i]
        record("contraction_ratio", i, "", "", cert.contraction_ratio,
               1.0, cert.contraction_ratio < 1.0)
        record("picard_residual", i, "", "", cert.final_residual,
               1e-8, cert.final_residual < 1e-8)
        res = ode_residual(operator, grid)
        record("ode_residual", i, "", "", res, 1e-6, res < 1e-6)
        ratio = fs.derivative_ratio(i, 1, t_diag)
        lam = spectrum.lam[i - 1]
        record("derivative_ratio", i, 1, t_diag, ratio, lam,
               abs(ratio - lam) < 0.01)
        mode = "value" if i == 1 else "log-derivative"
        t_end = 10.0 if mode == "value" else min(10.0, problem.t_max)
        comp = oracle.compare_to_fixed_point(problem, fs, i, t_end, mode=mode)
        bound = 1e-4 if mode == "value" else 1e-3
        record(f"oracle_{mode}", i, "", t_end, comp.max_error, bound,
               comp.max_error < bound)
        lo, hi = asymptotics.admissible_beta_interval(spectrum, i)
        beta = config.beta_overrides.get(i, (lo + hi) / 2)
        window = (min(10.0, problem.t_max / 4),
                  min(100.0, problem.t_max / 2))
        base, doubled, verdict = asymptotics.envelope_stability(
            problem, spectrum, grid, i, beta, window
        )
        record("envelope_stability", i, "", window[1], doubled.sup_ratio,
               base.sup_ratio, verdict.startswith("pass"))

    ratio, vandermonde = asymptotics.wronskian_diagnostic(fs, t_diag)
    record("wronskian_ratio", "", "", t_diag, ratio, vandermonde,
           abs(ratio - vandermonde) <= 0.02 * abs(vandermonde))

    _write_csv(
        config.output_dir / "diagnostics.csv",
        ("quantity", "i", "j", "t", "value", "reference", "verdict"),
        rows,
    )
    print(f"wrote {config.output_dir / 'diagnostics.csv'}")
    failures = [r for r, v in zip(rows, verdicts) if v == "fail"]
    for row in failures:
        print(f"FAIL {row[0]} i={row[1]} value={row[4]} ref={row[5]}")
    if failures:
        return EXIT_FAIL
    print("all diagnostics pass")
    return EXIT_OK


def cmd_all(config: Config) -> int:
    """Chain every stage.  Hard failures (bad roots, a solve that does
    not converge) stop the pipeline; adverse hypothesis or diagnostic
    verdicts are results, so they are recorded and the chain continues,
    with the worst code returned at the end."""
    worst = EXIT_OK
    for name, command, gating in (
        ("roots", cmd_roots, True),
        ("reduce", cmd_reduce, True),
        ("check", cmd_check, False),
        ("solve", cmd_solve, True),
        ("verify", cmd_verify, False),
    ):
        print(f"== {name} ==")
        code = command(config)
        if code == EXIT_FAIL and gating:
            print(f"stage {name} failed; stopping")
            return EXIT_FAIL
        if code == EXIT_FAIL:
            worst = EXIT_FAIL
        elif code == EXIT_INDETERMINATE and worst == EXIT_OK:
            worst = EXIT_INDETERMINATE
    return worst


COMMANDS = {
    "roots": cmd_roots,
    "reduce": cmd_reduce,
    "check": cmd_check,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "all": cmd_all,
}


def run(subcommand: str, config: Config) -> int:
    """Execute one pipeline stage; returns the process exit code."""
    if subcommand not in COMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return COMMANDS[subcommand](config)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="poincarefp",
        description="Fixed-point construction and verification for "
        "Poincare-type equations",
    )
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("config", help="path to the config file")
    parser.add_argument(
        "--output-dir", default=None, help="override the output directory"
    )
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = load_config(args.config)
        if args.output_dir is not None:
            config.output_dir = Path(args.output_dir)
        return run(args.subcommand, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PoincarefpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
