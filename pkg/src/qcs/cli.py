"""Command line entry point ``qcs``.

Exit status: 0 on success, 2 for invalid input, 3 when a computation
overflows or runs into a pole.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .exp_class import OVERFLOW_LIMIT, NonFiniteResult
from .fourier_periodic import PeriodicDeformation
from .operator_algebra import CSParameters, SingularParameterError, algebra_report

log = logging.getLogger("qcs")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class InvalidInput(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    s: float | None = None
    delta: float | None = None
    omega: float | None = None
    beta_file: str | None = None
    seed: int = 0
    window: list | None = None
    options: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)


def jsonable(obj):
    """Plain-JSON view: complex -> {re, im}, arrays -> lists, non-finite floats -> strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(float(obj.real)), "im": jsonable(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_beta(path: str | None, s: float) -> PeriodicDeformation | None:
    if path is None:
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read beta file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"beta file {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InvalidInput("beta file must hold a JSON object")
    if "s" in data and abs(float(data["s"]) - s) > 1e-14:
        log.warning("beta file scale s=%s differs from --s=%s; using --s", data["s"], s)
    try:
        return PeriodicDeformation.from_json(data, s=s)
    except (TypeError, KeyError) as exc:
        raise InvalidInput(f"beta file schema violation: {exc}") from None


def _warn_overflow(beta: PeriodicDeformation | None, points):
    if beta is not None and not beta.is_trivial:
        if beta.window_log_magnitude(points) > math.log(OVERFLOW_LIMIT):
            log.warning("deformation exceeds the overflow guard on the evaluation window")


def _params(args) -> CSParameters:
    return CSParameters(args.s, args.delta, args.omega)


def _float_list(text: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidInput(f"bad number list {text!r}") from None
    if not vals:
        raise InvalidInput("empty number list")
    return vals


def _poly_arg(text: str):
    from .riccati import poly_from_literal

    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        raise InvalidInput(f"polynomial literal must be a JSON array, got {text!r}") from None
    if not isinstance(data, list) or not data:
        raise InvalidInput("polynomial literal must be a non-empty JSON array")
    return data, poly_from_literal(data)


# --- subcommands -----------------------------------------------------------

def cmd_algebra_check(args) -> tuple[RunConfig, dict]:
    window = _float_list(args.window) if args.window else None
    if window is not None and len(window) != 2:
        raise InvalidInput("--window takes two numbers, e.g. -3,3")
    if args.samples < 0:
        raise InvalidInput("--samples must be non-negative")
    params = CSParameters(args.s)
    beta = _load_beta(args.beta_file, params.s)
    cfg = RunConfig("algebra-check", s=args.s, beta_file=args.beta_file, seed=args.seed, window=window,
                    options={"samples": args.samples}, outputs={"out": args.out})
    report = algebra_report(params.s, beta, args.samples, args.seed, tuple(window) if window else None)
    return cfg, report


def cmd_solve_riccati(args) -> tuple[RunConfig, dict]:
    from .riccati import (NoPolynomialSolution, PoleEncountered, RiccatiProblem, RiccatiSolution,
                          find_constant_solutions, pole_free_check, solve_polynomial)

    lit = {k: _poly_arg(getattr(args, k)) for k in ("p0", "p1", "p2")}
    prob = RiccatiProblem(lit["p2"][1], lit["p1"][1], lit["p0"][1])
    cfg = RunConfig("solve-riccati", seed=args.seed,
                    options={k: v[0] for k, v in lit.items()} | {"numeric_check": args.numeric_check},
                    outputs={"out": args.out})
    try:
        sol = solve_polynomial(prob)
    except NoPolynomialSolution as exc:
        log.info("%s", exc)
        sol = RiccatiSolution(kind="no_polynomial_solution", rejected=["plus", "minus"])
    cands = {}
    for name in ("plus", "minus"):
        z = getattr(sol, f"z_{name}")
        cands[name] = None if z is None else z.to_json()
    try:
        consts = find_constant_solutions(prob)
    except ValueError as exc:
        log.info("constant solutions skipped: %s", exc)
        consts = []
    quad = []
    for c in consts:
        entry = {"c": c}
        if args.numeric_check:
            try:
                chk = pole_free_check(prob, c)
                entry.update(max_dev_vs_rk4=chk["max_dev"], z0=chk["z0"], domain=chk["domain"])
            except PoleEncountered as exc:
                entry["pole_at"] = exc.x
        quad.append(entry)
    report = {"kind": sol.kind, "candidates": cands, "residuals": sol.candidate_residuals,
              "rejected": sol.rejected, "constants": consts, "quadrature": quad}
    return cfg, report


def cmd_build_cs(args) -> tuple[RunConfig, dict]:
    from .cs_builder import build_states

    params = _params(args)
    beta = _load_beta(args.beta_file, params.s)
    cfg = RunConfig("build-cs", s=args.s, delta=args.delta, omega=args.omega, beta_file=args.beta_file,
                    seed=args.seed, options={"branch": args.branch}, outputs={"audit": args.audit})
    c = build_states(params, beta)
    _warn_overflow(beta, c.grid.points(params.s))
    report = dict(c.audit)
    report["state"] = {"branch": args.branch, "function": c.state(args.branch).to_json()}
    report["spectral"] = c.spectral.to_json()
    return cfg, report


def cmd_perturb_compare(args) -> tuple[RunConfig, dict]:
    from .perturbation import convergence_study, expand

    s_list = _float_list(args.s_list)
    if len(s_list) < 3:
        raise InvalidInput("--s-list needs at least three values")
    beta = _load_beta(args.beta_file, s_list[0])
    cfg = RunConfig("perturb-compare", delta=args.delta, omega=args.omega, beta_file=args.beta_file,
                    seed=args.seed, options={"s_list": s_list}, outputs={"out": args.out})
    st = expand(CSParameters(s_list[0], args.delta, args.omega), beta)
    study = convergence_study(s_list, args.delta, args.omega, beta)
    if study.flagged:
        log.warning("fitted order %.3f lies outside [1.8, 2.2]", study.slope)
    report = {"residual0": st.residual0, "residual1": st.residual1, "kappa": st.kappa,
              "lambda0": st.lambda0, "lambda1": st.lambda1} | study.to_json()
    return cfg, report


def cmd_unity_check(args) -> tuple[RunConfig, dict]:
    from .cs_builder import build_states
    from .unity_measure import (WeightFunction, sigma_relative_error, sigma_table, theta_identity_errors,
                                unity_scalar)

    params = _params(args)
    beta = _load_beta(args.beta_file, params.s)
    reparam = args.reparam == "on"
    cfg = RunConfig("unity-check", s=args.s, delta=args.delta, omega=args.omega, beta_file=args.beta_file,
                    seed=args.seed, options={"reparam": args.reparam},
                    outputs={"out": args.out, "csv": args.csv})
    c = build_states(params, beta)
    w = WeightFunction.from_construction(c, reparam=reparam)
    t = np.linspace(-math.pi, math.pi, 41)
    z = t / 2 + math.pi * w.gamma_re / w.s_formula ** 2 + 0.1j
    theta = theta_identity_errors(z, w.tau)
    u = unity_scalar(c, w)
    report = {"sigma_max_rel_err": sigma_relative_error(w, t),
              "theta_identity_err": max(theta.values()), "theta_identity": theta,
              "unity_scalar": u.value, "normalization": u.normalization,
              "fold_agreement": u.fold_agreement, "unity": u.to_json(),
              "weight": {"s_formula": w.s_formula, "gamma_re": w.gamma_re, "tau": w.tau}}
    if args.csv:
        table = sigma_table(w, c, np.linspace(-math.pi, math.pi, 201))
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t", "sigma_lattice", "sigma_closed", "re_lambda", "im_lambda"])
            for row in table:
                wr.writerow([repr(float(v)) for v in row])
    return cfg, report


COMMANDS = {
    "algebra-check": (cmd_algebra_check, "out"),
    "solve-riccati": (cmd_solve_riccati, "out"),
    "build-cs": (cmd_build_cs, "audit"),
    "perturb-compare": (cmd_perturb_compare, "out"),
    "unity-check": (cmd_unity_check, "out"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcs", description="weak q-deformed coherent state checks")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, out="--out"):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument(out, default=None, help="report path (stdout when omitted)")

    a = sub.add_parser("algebra-check", help="q-mutator residuals on random class members")
    a.add_argument("--s", type=float, required=True)
    a.add_argument("--beta-file")
    a.add_argument("--samples", type=int, default=100)
    a.add_argument("--window", help="evaluation window lo,hi")
    common(a)

    r = sub.add_parser("solve-riccati", help="polynomial and quadrature Riccati solutions")
    for k in ("--p0", "--p1", "--p2"):
        r.add_argument(k, required=True, help="ascending coefficients as a JSON array")
    r.add_argument("--numeric-check", action="store_true")
    common(r)

    b = sub.add_parser("build-cs", help="coherent states and their audit")
    _state_args(b)
    b.add_argument("--branch", choices=("plus", "minus"), default="minus")
    common(b, "--audit")

    q = sub.add_parser("perturb-compare", help="first-order expansion against the full state")
    q.add_argument("--s-list", default="0.2,0.1,0.05")
    q.add_argument("--delta", type=float, default=-2.0)
    q.add_argument("--omega", type=float, default=0.0)
    q.add_argument("--beta-file")
    common(q)

    u = sub.add_parser("unity-check", help="lattice weight, theta identity and unity scalar")
    _state_args(u)
    u.add_argument("--reparam", choices=("on", "off"), default="on")
    u.add_argument("--csv")
    common(u)
    return p


def _state_args(sp):
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--delta", type=float, default=-2.0)
    sp.add_argument("--omega", type=float, default=0.0)
    sp.add_argument("--beta-file")


def _setup_logging():
    level = os.environ.get("QCS_LOG", "error").upper()
    if level not in ("ERROR", "INFO", "DEBUG", "WARNING"):
        level = "ERROR"
    logging.basicConfig(level=getattr(logging, level), format="qcs: %(levelname)s: %(message)s",
                        stream=sys.stderr)


def run(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    func, out_attr = COMMANDS[args.subcommand]
    try:
        cfg, report = func(args)
        report = {"config": asdict(cfg), "version": __version__, "report": report}
        _write(dumps(report), getattr(args, out_attr))
    except (SingularParameterError, InvalidInput, ValueError) as exc:
        print(f"qcs: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ArithmeticError, NonFiniteResult, OverflowError, FloatingPointError) as exc:
        print(f"qcs: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
