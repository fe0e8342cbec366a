"""Batch command-line front end.

Subcommands:
    solve-linear <file> -o <dir>          linear solvability + solution family
    solve-nonlinear <file> -o <dir>       generating root, gate, iteration
    sweep <file> --eps-min --eps-max --count -o <dir>
    fib-check --m-max <k>                 exact closed-form cross-checks
    verify <report> <trajectory>          recompute residuals from files

Exit codes: 0 success, 2 quasisolution without --allow-quasi, 3 no
generating root, 4 sufficient-condition failure, 5 iteration
non-convergence, 64 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import nonlinear as nl
from .linear import (
    QUASISOLUTION,
    boundary_residual,
    recurrence_residual,
    solve_family,
)
from .lotka_volterra import (
    fib_delta,
    fib_delta_exponent_offset,
    fib_green_coeffs,
    fib_green_matrix_oracle,
)
from .problem_io import Problem, ProblemFormatError, canonical_json, load_problem

EXIT_OK = 0
EXIT_QUASI = 2
EXIT_NO_ROOT = 3
EXIT_SUFFICIENCY = 4
EXIT_NO_CONVERGENCE = 5
EXIT_USAGE = 64

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % float(x)


def _write_trajectory(path: Path, z: np.ndarray) -> None:
    z = np.asarray(z, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n"] + [f"z{i + 1}" for i in range(z.shape[1])])
        for n in range(z.shape[0]):
            writer.writerow([n] + [_fmt(v) for v in z[n]])


def _read_trajectory(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "n":
        raise ProblemFormatError(f"{path}: not a trajectory CSV (missing header)")
    return np.array([[float(v) for v in row[1:]] for row in rows[1:]])


def _write_report(path: Path, report: dict) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _json_safe(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _out_dir(args) -> Path:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args) -> Problem:
    return load_problem(args.problem)


def _trajectory_entry(problem: Problem, z: np.ndarray, kind: str) -> dict:
    """Measured residuals of an emitted trajectory; what `verify` recomputes."""
    if kind == "kernel":
        rec = recurrence_residual(problem.system, None, z)
        bc = float(np.linalg.norm(problem.boundary.apply(z)))
    elif kind == "solution":
        nlp = nl.NonlinearProblem(problem.system, problem.forcing, problem.boundary,
                                  problem.nonlinearity[0], problem.nonlinearity[1],
                                  problem.epsilon)
        rec = nl.nonlinear_recurrence_residual(nlp, z)
        bc = boundary_residual(problem.boundary, z)
    else:  # particular family member of the linear problem
        rec = recurrence_residual(problem.system, problem.forcing, z)
        bc = boundary_residual(problem.boundary, z)
    return {"kind": kind, "recurrence_residual": rec, "boundary_residual": bc}


def _maybe_dump_canonical(args, problem: Problem, out: Path) -> None:
    if getattr(args, "dump_canonical", False):
        (out / "canonical.json").write_text(canonical_json(problem))


# ---------------------------------------------------------------------------
# solve-linear
# ---------------------------------------------------------------------------

def cmd_solve_linear(args) -> int:
    started = time.perf_counter()
    problem = _load(args)
    out = _out_dir(args)
    _maybe_dump_canonical(args, problem, out)

    report, family = solve_family(
        problem.system, problem.forcing, problem.boundary,
        tol=args.tol if args.tol is not None else problem.tolerances["classification"],
        rank_tol=problem.tolerances["rank"],
    )

    trajectories = {}
    _write_trajectory(out / "particular.csv", family.particular)
    trajectories["particular.csv"] = _trajectory_entry(problem, family.particular, "particular")
    for j in range(family.kernel_dim):
        name = f"kernel_{j + 1:02d}.csv"
        _write_trajectory(out / name, family.kernel_basis[j])
        trajectories[name] = _trajectory_entry(problem, family.kernel_basis[j], "kernel")

    doc = {
        "command": "solve-linear",
        "problem": problem.canonical,
        "solvability": report.as_dict(),
        "trajectories": trajectories,
        "outputs": sorted(trajectories),
    }
    _write_report(out / "report.json", doc)

    print(f"classification: {report.classification}  "
          f"r={report.kernel_dim} d={report.cokernel_dim} index={report.fredholm_index}")
    print(f"defect norm: {report.defect_norm:.3e}")
    print(f"outputs in {out} ({time.perf_counter() - started:.3f}s)")
    if report.classification == QUASISOLUTION and not args.allow_quasi:
        print("quasisolution: boundary condition not exactly solvable "
              "(rerun with --allow-quasi to accept)", file=sys.stderr)
        return EXIT_QUASI
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve-nonlinear
# ---------------------------------------------------------------------------

def _nonlinear_problem(problem: Problem, eps: float | None = None) -> nl.NonlinearProblem:
    if problem.nonlinearity is None:
        raise ProblemFormatError("problem has no nonlinearity; use solve-linear")
    Z, Z_du = problem.nonlinearity
    return nl.NonlinearProblem(problem.system, problem.forcing, problem.boundary,
                               Z, Z_du, problem.epsilon if eps is None else eps)


def _pipeline(problem: Problem, nlp: nl.NonlinearProblem, args, c_seed=None,
              gen_eps: float = 0.0):
    """Shared generating-root -> gate -> iteration pipeline.

    Returns (stage dicts, z, trace, exit code); z/trace are None when an
    early stage fails.
    """
    tol_newton = problem.tolerances["newton"]
    tol_iter = args.tol if args.tol is not None else problem.tolerances["iteration"]
    max_iter = args.max_iter if args.max_iter is not None else problem.solver["max_iter"]

    bvp = nlp.linear_bvp(problem.tolerances["rank"])
    lreport, family = bvp.solve(problem.forcing, tol=problem.tolerances["classification"])
    stages = {"solvability": lreport.as_dict()}
    if lreport.classification == QUASISOLUTION:
        return stages, None, None, EXIT_QUASI

    nl.verify_derivative(nlp)
    seed = c_seed if c_seed is not None else problem.solver.get("c_init")
    root = nl.solve_generating(nlp, family, seed, tol=tol_newton,
                               max_iter=problem.solver["newton_max_iter"],
                               at_eps=gen_eps)
    stages["generating"] = {
        "c0": root.c0.tolist(),
        "residual_norm": root.residual_norm,
        "jacobian_rank": root.jacobian_rank,
        "converged": root.converged,
    }
    if not root.converged:
        return stages, None, None, EXIT_NO_ROOT

    B0 = nl.assemble_B0(nlp, family, root.c0, at_eps=gen_eps)
    suff = nl.check_sufficient(B0)
    stages["sufficiency"] = {
        "holds": suff.holds,
        "row_rank": suff.row_rank,
        "required_rank": suff.required_rank,
        "product_norm": suff.product_norm,
        "null_direction": None if suff.null_direction is None
        else suff.null_direction.tolist(),
    }
    if not suff.holds and not getattr(args, "force", False):
        return stages, None, None, EXIT_SUFFICIENCY

    z, trace = nl.iterate(nlp, family, root.c0, tol=tol_iter, max_iter=max_iter,
                          blowup=problem.solver["blowup"], B0=B0, force=True)
    stages["iteration"] = {
        "converged": trace.converged,
        "iterations": trace.iterations,
        "final_record": dict(zip(nl.IterationTrace.FIELDS, trace.records[-1])),
    }
    code = EXIT_OK if trace.converged else EXIT_NO_CONVERGENCE
    return stages, z, trace, code


def cmd_solve_nonlinear(args) -> int:
    started = time.perf_counter()
    problem = _load(args)
    out = _out_dir(args)
    _maybe_dump_canonical(args, problem, out)

    nlp = _nonlinear_problem(problem)
    stages, z, trace, code = _pipeline(problem, nlp, args)

    doc = {"command": "solve-nonlinear", "problem": problem.canonical, **stages}
    trajectories = {}
    if z is not None:
        _write_trajectory(out / "solution.csv", z)
        trajectories["solution.csv"] = _trajectory_entry(problem, z, "solution")
        with open(out / "trace.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(nl.IterationTrace.FIELDS)
            for row in trace.records:
                writer.writerow([row[0]] + [_fmt(v) for v in row[1:]])
    doc["trajectories"] = trajectories
    doc["outputs"] = sorted(trajectories)
    _write_report(out / "report.json", doc)

    if "generating" in stages:
        print(f"generating root |F| = {stages['generating']['residual_norm']:.3e} "
              f"(converged={stages['generating']['converged']})")
    if "sufficiency" in stages:
        s = stages["sufficiency"]
        print(f"sufficiency gate: rank {s['row_rank']}/{s['required_rank']} "
              f"({'holds' if s['holds'] else 'FAILS'})")
    if "iteration" in stages:
        it = stages["iteration"]
        print(f"iteration: converged={it['converged']} after {it['iterations']} steps")
    print(f"outputs in {out} ({time.perf_counter() - started:.3f}s)")
    if code == EXIT_QUASI:
        print("linear part is a quasisolution; no generating family", file=sys.stderr)
    elif code == EXIT_NO_ROOT:
        print("no generating root found", file=sys.stderr)
    elif code == EXIT_SUFFICIENCY:
        print("sufficient condition fails; rerun with --force to iterate anyway",
              file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    started = time.perf_counter()
    problem = _load(args)
    if args.count < 1:
        print("sweep: --count must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    out = _out_dir(args)
    _maybe_dump_canonical(args, problem, out)

    grid = np.linspace(args.eps_min, args.eps_max, args.count)
    rows = []
    seed = None
    r_dim = None
    for eps in grid:
        nlp = _nonlinear_problem(problem, eps=float(eps))
        stages, z, trace, code = _pipeline(problem, nlp, args, c_seed=seed,
                                           gen_eps=float(eps))
        gen = stages.get("generating", {})
        c0 = gen.get("c0", [])
        if r_dim is None:
            r_dim = len(c0)
        if code in (EXIT_OK,) and gen.get("converged"):
            seed = c0  # continuation: warm-start the next grid point
        rows.append({
            "eps": float(eps),
            "exit": code,
            "root_converged": bool(gen.get("converged", False)),
            "F_norm": float(gen.get("residual_norm", float("nan"))),
            "iter_converged": bool(stages.get("iteration", {}).get("converged", False)),
            "iterations": int(stages.get("iteration", {}).get("iterations", -1)),
            "c0": c0,
        })

    r_dim = r_dim or 0
    with open(out / "branch.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps", "exit", "root_converged", "F_norm",
                         "iter_converged", "iterations"]
                        + [f"c{j + 1}" for j in range(r_dim)])
        for row in rows:
            c = list(row["c0"]) + [float("nan")] * (r_dim - len(row["c0"]))
            writer.writerow([_fmt(row["eps"]), row["exit"], int(row["root_converged"]),
                             _fmt(row["F_norm"]), int(row["iter_converged"]),
                             row["iterations"]] + [_fmt(v) for v in c])
    doc = {
        "command": "sweep",
        "problem": problem.canonical,
        "grid": {"min": args.eps_min, "max": args.eps_max, "count": args.count},
        "points": rows,
        "outputs": ["branch.csv"],
    }
    _write_report(out / "report.json", doc)
    ok = sum(1 for row in rows if row["exit"] == EXIT_OK)
    print(f"sweep: {ok}/{len(rows)} grid points converged; outputs in {out} "
          f"({time.perf_counter() - started:.3f}s)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fib-check
# ---------------------------------------------------------------------------

def cmd_fib_check(args) -> int:
    m_max = args.m_max
    if m_max < 1:
        print("fib-check: --m-max must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    offset = fib_delta_exponent_offset(m_max)
    print("determinant cross-check Delta(m) == det(A^(m+s) - I):")
    for m in range(1, m_max + 1):
        print(f"  m={m:2d}  Delta={fib_delta(m)}")
    if offset is None:
        print("no single consistent exponent offset in 0..6")
        return 1
    print(f"consistent exponent convention: Phi(m, 0) ~ A^(m+{offset})")

    names = ("a11", "a12", "a21", "a22")
    agree = [0, 0, 0, 0]
    total = 0
    for m in range(1, m_max + 1):
        for n in range(0, m + 1):
            for k in range(0, m + 1):
                printed = fib_green_coeffs(n, m, k)
                oracle = fib_green_matrix_oracle(n, m, k, offset=offset)
                total += 1
                for i in range(4):
                    agree[i] += printed[i] == oracle[i]
    print("closed-form coefficient agreement vs exact matrix oracle "
          f"({total} (n, m, k) triples):")
    for i, name in enumerate(names):
        status = "agrees" if agree[i] == total else "DISAGREES"
        print(f"  {name}: {agree[i]}/{total} {status}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    report_path = Path(args.report)
    traj_path = Path(args.trajectory)
    try:
        doc = json.loads(report_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"verify: cannot read report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    entry = doc.get("trajectories", {}).get(traj_path.name)
    if entry is None:
        print(f"verify: report has no entry for '{traj_path.name}'", file=sys.stderr)
        return EXIT_USAGE

    from .problem_io import parse_problem
    problem = parse_problem(doc["problem"], source=str(report_path))
    z = _read_trajectory(traj_path)
    recomputed = _trajectory_entry(problem, z, entry["kind"])

    ok = True
    for key in ("recurrence_residual", "boundary_residual"):
        diff = abs(recomputed[key] - entry[key])
        status = "ok" if diff <= 1e-12 else "MISMATCH"
        if diff > 1e-12:
            ok = False
        print(f"{key}: reported={entry[key]:.6e} recomputed={recomputed[key]:.6e} "
              f"|diff|={diff:.3e} {status}")
    return EXIT_OK if ok else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="override the stage tolerance of the subcommand")
    common.add_argument("--max-iter", type=int, default=None,
                        help="override the iteration cap")
    common.add_argument("--allow-quasi", action="store_true",
                        help="accept quasisolution classifications (exit 0)")
    common.add_argument("--dump-canonical", action="store_true",
                        help="also write the canonicalized problem file")

    parser = argparse.ArgumentParser(
        prog="resbvp",
        description="Linear and weakly nonlinear difference-system BVP solver "
                    "for the resonance case.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-linear", parents=[common],
                       help="solve the linear problem and emit the solution family")
    p.add_argument("problem")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_solve_linear)

    p = sub.add_parser("solve-nonlinear", parents=[common],
                       help="generating root, sufficiency gate, and iteration")
    p.add_argument("problem")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--force", action="store_true",
                   help="iterate even when the sufficient condition fails")
    p.set_defaults(func=cmd_solve_nonlinear)

    p = sub.add_parser("sweep", parents=[common],
                       help="continuation sweep over an epsilon grid")
    p.add_argument("problem")
    p.add_argument("--eps-min", type=float, required=True)
    p.add_argument("--eps-max", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fib-check",
                       help="exact integer cross-checks of the closed-form tables")
    p.add_argument("--m-max", type=int, required=True)
    p.set_defaults(func=cmd_fib_check)

    p = sub.add_parser("verify",
                       help="recompute a report's residuals from the emitted files")
    p.add_argument("report")
    p.add_argument("trajectory")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except nl.DerivativeMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
