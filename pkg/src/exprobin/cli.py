"""Command line entry point: ``exprobin {solve,constants,check-admissible,verify,sweep}``.

Exit codes:

==  ==========================================================
0   success
1   config file unreadable or not valid JSON
2   schema violation (including inadmissible data in guarantee mode)
3   invalid arc partition
4   Picard iteration did not converge (partial report written)
5   internal error
6   a verification check failed (``verify`` only)
==  ==========================================================
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from .config import RunConfig, build_instance, parse_config, with_override
from .constants import DEFAULT_P_TABLE, constants_report
from .geometry import PartitionError
from .linear_step import InadmissibleCoefficientError, ProblemInstance, assemble, solve_step
from .picard import NonConvergenceError, SolverReport, ball_check, contraction_report, run_picard
from .spectral import random_trigpoly, v_norm
from .verification import (
    embedding_sampler,
    harmonic_sum_check,
    nonlinearity_sampler,
    oracle_discrepancy,
    vnorm_2d_oracle,
)

log = logging.getLogger("exprobin")

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_SCHEMA = 2
EXIT_PARTITION = 3
EXIT_NONCONVERGENCE = 4
EXIT_INTERNAL = 5
EXIT_VERIFY_FAILED = 6

VNORM_ORACLE_RTOL = 1e-6


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _package_version() -> str:
    try:
        return version("exprobin")
    except PackageNotFoundError:
        return "unknown"


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_report(path: Path, kind: str, body: dict) -> None:
    """Deterministic JSON; the only run-dependent content lives under ``metadata``."""
    doc = {
        "schema_version": 1,
        "kind": kind,
        "report": _clean(body),
        "metadata": {
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "version": _package_version(),
        },
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_csv(path: Path, header: tuple, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v) for v in row])


# subcommands ---------------------------------------------------------------

def _solver_body(rep: SolverReport) -> dict:
    body = {"solver": rep.to_dict(), "ball_check": ball_check(rep)}
    if rep.iterations >= 3:
        s = contraction_report(rep)
        body["contraction"] = {
            "max_ratio": s.max_ratio, "fitted_rate": s.fitted_rate, "theoretical_K": s.theoretical_K,
            "certified": s.certified, "tail_bound": s.tail_bound, "verdict": s.verdict,
        }
    else:
        body["contraction"] = None
    return body


def solve_instance(inst: ProblemInstance, cfg: RunConfig, out: Path) -> tuple[int, SolverReport]:
    so = cfg.solver
    start = None
    if so.start == "first-step":
        start = solve_step(assemble(inst, np.ones(len(inst.quad["R"]))))
    formats = set(cfg.output.formats)
    try:
        _, rep = run_picard(inst, tol=so.tol, max_iter=so.max_iter, start=start)
        code = EXIT_OK
    except NonConvergenceError as exc:
        log.error("%s", exc)
        rep, code = exc.report, EXIT_NONCONVERGENCE
    if "json" in formats:
        write_report(out / "solver_report.json", "solver-report", _solver_body(rep))
    if "csv" in formats:
        write_csv(out / "iterations.csv", ("k", "v_norm", "increment", "ratio"), rep.iteration_rows())
    return code, rep


def cmd_solve(cfg: RunConfig, args) -> int:
    inst = _instance(cfg, args)
    out = _out_dir(cfg, args)
    code, rep = solve_instance(inst, cfg, out)
    final = rep.v_norms[-1] if rep.v_norms else 0.0
    print(f"converged={rep.converged} iterations={rep.iterations} final_v_norm={final:.12g}")
    return code


def cmd_constants(cfg: RunConfig, args) -> int:
    inst = _instance(cfg, args)
    rep = constants_report(inst.M0, inst.xi, DEFAULT_P_TABLE)
    body = rep.to_dict()
    v = inst.admissibility
    body["admissibility"] = {"admissible": v.admissible, "margin": v.margin, "bound": v.bound}
    out = _out_dir(cfg, args)
    if "json" in cfg.output.formats:
        write_report(out / "constants.json", "constants-report", body)
    if "csv" in cfg.output.formats:
        write_csv(out / "constants.csv", ("p", "tilde_R", "lambda_p"), rep.csv_rows())
    print(f"M0={rep.M0:.12g} C={rep.majorant_C:.12g} Lambda={rep.Lambda:.6g} log_Lambda={rep.log_Lambda}")
    return EXIT_OK


def cmd_check_admissible(cfg: RunConfig, args) -> int:
    inst = _instance(cfg, args, guarantee=False)
    v = inst.admissibility
    verdict = "admissible" if v.admissible else "not admissible"
    print(f"{verdict}: varphi in [{v.min_value:.6g}, {v.max_value:.6g}], "
          f"bound xi*Lambda = {v.bound:.6g}, margin = {v.margin:.6g}")
    if args.guarantee_mode == "on" and not v.admissible:
        return EXIT_SCHEMA
    return EXIT_OK


def run_verification(cfg: RunConfig, seed: int, inst: ProblemInstance | None = None) -> dict:
    vs = cfg.verify
    emb = embedding_sampler(vs.embedding_trials, vs.embedding_degree, vs.p_values, seed)
    nl = nonlinearity_sampler(vs.nonlinearity_samples, seed)
    hs = harmonic_sum_check([k / 10 for k in range(1, 10)], vs.harmonic_N_max)
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    worst = 0.0
    for _ in range(vs.vnorm_trials):
        f = random_trigpoly(rng, int(rng.integers(1, vs.vnorm_degree + 1)))
        ref = math.sqrt(vnorm_2d_oracle(f))
        worst = max(worst, abs(v_norm(f) - ref) / ref if ref > 0 else 0.0)
    body = {
        "embedding": {**emb.to_dict(), "passed": emb.total_violations == 0},
        "nonlinearity": {**nl.to_dict(), "passed": nl.total_violations == 0},
        "harmonic_sum": {**hs.to_dict(), "passed": hs.ok},
        "vnorm_oracle": {"trials": vs.vnorm_trials, "max_rel_error": worst, "rtol": VNORM_ORACLE_RTOL,
                         "passed": worst <= VNORM_ORACLE_RTOL},
    }
    if inst is not None:
        # informational: mixed-boundary data limits this to algebraic accuracy
        body["linear_oracle"] = {"first_step_rel_gap": oracle_discrepancy(inst)}
    body["passed"] = all(body[k]["passed"] for k in ("embedding", "nonlinearity", "harmonic_sum", "vnorm_oracle"))
    return body


def cmd_verify(cfg: RunConfig, args) -> int:
    inst = _instance(cfg, args)
    seed = cfg.verify.seed if args.seed is None else args.seed
    body = run_verification(cfg, seed, inst)
    write_report(_out_dir(cfg, args) / "verify.json", "verification-report", body)
    for k in ("embedding", "nonlinearity", "harmonic_sum", "vnorm_oracle"):
        print(f"{k}: {'PASS' if body[k]['passed'] else 'FAIL'}")
    return EXIT_OK if body["passed"] else EXIT_VERIFY_FAILED


def _sweep_one(job: tuple[int, str, str, str]) -> dict:
    index, cfg_json, out_dir, guarantee = job
    cfg = RunConfig.model_validate_json(cfg_json)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.to_json() + "\n", encoding="utf-8")
    try:
        inst = build_instance(cfg, guarantee_mode=guarantee == "on")
        if guarantee == "on":
            inst.require_admissible()
        code, _ = solve_instance(inst, cfg, out)
    except PartitionError as exc:
        return {"index": index, "exit_code": EXIT_PARTITION, "error": str(exc)}
    except (InadmissibleCoefficientError, ValueError) as exc:
        return {"index": index, "exit_code": EXIT_SCHEMA, "error": str(exc)}
    except Exception as exc:  # reported per run, the sweep carries on
        return {"index": index, "exit_code": EXIT_INTERNAL, "error": repr(exc)}
    return {"index": index, "exit_code": code, "error": None}


def cmd_sweep(cfg: RunConfig, args) -> int:
    if cfg.sweep is None:
        raise CliError(EXIT_SCHEMA, "config has no 'sweep' section")
    keys = list(cfg.sweep.grid)
    out = _out_dir(cfg, args)
    jobs, points = [], []
    for i, combo in enumerate(itertools.product(*(cfg.sweep.grid[k] for k in keys))):
        run_cfg = cfg
        for k, v in zip(keys, combo):
            try:
                run_cfg = with_override(run_cfg, k, v)
            except KeyError as exc:
                raise CliError(EXIT_SCHEMA, f"unknown sweep path {exc}") from exc
            except ValidationError as exc:
                raise CliError(EXIT_SCHEMA, f"sweep value {k}={v!r} rejected: {exc}") from exc
        points.append(dict(zip(keys, combo)))
        jobs.append((i, run_cfg.model_dump_json(), str(out / f"run_{i:03d}"), args.guarantee_mode))
    if cfg.sweep.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.sweep.workers) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    for r, p in zip(results, points):
        r["parameters"] = p
        r["directory"] = f"run_{r['index']:03d}"
    write_report(out / "sweep.json", "sweep-summary", {"runs": results})
    codes = [r["exit_code"] for r in results]
    for r in results:
        print(f"run_{r['index']:03d} {r['parameters']} exit={r['exit_code']}")
    return max(codes) if codes else EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "constants": cmd_constants,
    "check-admissible": cmd_check_admissible,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


# plumbing --------------------------------------------------------------------

def _out_dir(cfg: RunConfig, args) -> Path:
    return Path(args.out if args.out is not None else cfg.output.directory)


def _instance(cfg: RunConfig, args, guarantee: bool | None = None) -> ProblemInstance:
    on = args.guarantee_mode == "on" if guarantee is None else guarantee
    try:
        inst = build_instance(cfg, guarantee_mode=on)
        _ = inst.M0, inst.admissibility
    except PartitionError as exc:
        raise CliError(EXIT_PARTITION, f"invalid partition ({exc.kind}): {exc}") from exc
    except ValueError as exc:
        raise CliError(EXIT_SCHEMA, str(exc)) from exc
    if on:
        try:
            inst.require_admissible()
        except InadmissibleCoefficientError as exc:
            raise CliError(EXIT_SCHEMA, f"guarantee mode: {exc}") from exc
    return inst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exprobin", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", default=None, help="output directory (overrides output.directory)")
    parser.add_argument("--seed", type=int, default=None, help="master seed for verification samplers")
    parser.add_argument("--guarantee-mode", choices=("on", "off"), default="off",
                        help="refuse coefficients above xi*Lambda")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        try:
            cfg = parse_config(args.config)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CliError(EXIT_MALFORMED, f"cannot read config: {exc}") from exc
        except ValidationError as exc:
            raise CliError(EXIT_SCHEMA, f"config schema violation:\n{exc}") from exc
        return COMMANDS[args.command](cfg, args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
