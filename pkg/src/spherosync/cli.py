"""Command-line harness: generate, certify, solve, simulate, sweep.

Subcommands
-----------
gen        model spec (JSON) -> matrix file
certify    benign-landscape certificate for a matrix file, JSON to stdout
solve      Riemannian ascent on a matrix file, JSON report to stdout
kuramoto   oscillator simulation, JSON report to stdout
circulant  closed-form circulant spectra as a CSV table plus summary
phase      Monte Carlo phase-diagram sweep, CSV table to a file

Exit codes: 0 success (benign / second-order critical / synchronized),
2 inconclusive or not reached, 1 error.  Every random choice derives from
an explicit seed; repeated runs are byte-identical except for wall-clock
columns.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import certificates, circulant, fileio, kuramoto, models, optimizer
from .core import SignVector, SymmetricCost, angles_to_config
from .rng import derive_seed, generator

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _print_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True, default=float)
    sys.stdout.write("\n")


def _load_signs(arg: str, n: int) -> SignVector:
    if arg == "ones":
        return SignVector.ones(n)
    z = fileio.read_signs(arg)
    if z.n != n:
        raise ValueError(f"sign vector length {z.n} does not match matrix size {n}")
    return z


def cmd_gen(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = models.ModelSpec.from_json(fh.read())
    C, z = models.generate(spec)
    fileio.write_matrix(args.out, C)
    if args.z_out:
        fileio.write_signs(args.z_out, z)
    return EXIT_OK


def cmd_certify(args) -> int:
    C = fileio.read_matrix(args.matrix)
    z = _load_signs(args.z, C.n)
    check = (
        certificates.benign_landscape_check_complex
        if C.is_complex
        else certificates.benign_landscape_check
    )
    report = check(C, z, args.r, preconditioner=args.preconditioner, tol=args.tol)
    payload = report.to_json_dict()
    if args.preconditioner != "identity":
        plain = check(C, z, args.r, preconditioner="identity", tol=args.tol)
        payload["unpreconditioned_condition_number"] = plain.condition_number
    _print_json(payload)
    return EXIT_OK if report.verdict == certificates.VERDICT_BENIGN else EXIT_INCONCLUSIVE


def _initial_config(init: str, n: int, r: int, seed: int):
    if init == "random":
        return optimizer.random_init(n, r, seed)
    if init.startswith("twisted:"):
        if r != 2:
            raise ValueError("twisted initialization requires r = 2")
        q = int(init.split(":", 1)[1])
        return angles_to_config(kuramoto.twisted_state(n, q))
    if init.startswith("file:"):
        Y = fileio.read_config(init.split(":", 1)[1])
        if Y.n != n or Y.r != r:
            raise ValueError(f"initial configuration is {Y.n}x{Y.r}, expected {n}x{r}")
        return Y
    raise ValueError(f"unknown initialization {init!r}")


def cmd_solve(args) -> int:
    C = fileio.read_matrix(args.matrix)
    z = _load_signs(args.z, C.n) if args.z else None
    opts = optimizer.SolveOptions(
        max_iters=args.max_iters, grad_tol=args.grad_tol, seed=args.seed
    )
    Y0 = _initial_config(args.init, C.n, args.r, args.seed)
    report = optimizer.solve(C, args.r, opts, z=z, Y0=Y0)
    if args.out_config:
        fileio.write_config(args.out_config, report.final_Y)
    _print_json(report.to_json_dict())
    return EXIT_OK if report.second_order_critical else EXIT_INCONCLUSIVE


def _initial_phases(init: str, n: int, seed: int) -> np.ndarray:
    if init == "random":
        return generator(seed).uniform(0.0, 2 * np.pi, size=n)
    if init.startswith("twisted:"):
        return kuramoto.twisted_state(n, int(init.split(":", 1)[1])).angles
    if init.startswith("file:"):
        raw = np.loadtxt(init.split(":", 1)[1], ndmin=1)
        if raw.shape != (n,):
            raise ValueError(f"initial phases have shape {raw.shape}, expected ({n},)")
        return raw
    raise ValueError(f"unknown initialization {init!r}")


def cmd_kuramoto(args) -> int:
    A = fileio.read_matrix(args.matrix)
    theta0 = kuramoto.PhaseVector(angles=_initial_phases(args.init, A.n, args.seed))
    opts = kuramoto.SimOptions(
        time_step=args.time_step,
        max_time=args.max_time,
        sync_tol=args.sync_tol,
        stop_on_sync=args.stop_on_sync,
        seed=args.seed,
    )
    report = kuramoto.simulate(A, theta0, opts, trajectory=args.trajectory, stride=args.stride)
    _print_json(report.to_json_dict())
    return EXIT_OK if report.synchronized else EXIT_INCONCLUSIVE


def cmd_circulant(args) -> int:
    spec = circulant.dft_spectrum(args.n, args.k)
    out = sys.stdout
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["m", "H_A", "H_L", "H_Ltilde"])
    for m in range(len(spec.H_A)):
        writer.writerow([m, repr(float(spec.H_A[m])), repr(float(spec.H_L[m])), repr(float(spec.H_Ltilde[m]))])
    stability = circulant.finite_size_stability(args.n, args.k)
    summary = {
        "n": args.n,
        "k": args.k,
        "density": 2 * args.k / args.n,
        "condition_number": stability.condition_number,
        "lambda2_twisted": stability.lambda2_twisted,
        "predicts_spurious": stability.predicts_spurious,
        "limit_kappa": circulant.limit_kappa(min(1.0, 2 * args.k / args.n)),
        "critical_density": circulant.critical_density(),
    }
    out.write("# summary: " + json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


@dataclass(frozen=True)
class GridCell:
    """One (n, margin) cell of a sweep with resolved model parameters."""

    index: int
    family: str
    n: int
    margin: float
    params: dict


def _resolve_cells(args) -> list[GridCell]:
    cells = []
    index = 0
    for n in args.n:
        for margin in args.margins:
            if args.family == "gaussian":
                params = {"sigma": margin * models.gaussian_sigma_star(n)}
            elif args.family == "censored":
                p = args.p if args.p is not None else 3 * math.log(n) / n
                delta = min(1.0, margin * models.censored_delta_star(n, p))
                params = {"p": p, "delta": delta}
            else:  # sbm
                b = args.b
                a = (math.sqrt(b) + math.sqrt(2.0) * margin) ** 2
                p = a * math.log(n) / n
                q = b * math.log(n) / n
                if p > 1:
                    raise ValueError(f"sbm cell n={n} margin={margin} needs p={p:.3f} > 1")
                params = {"p": p, "q": q, "centering": args.centering}
            cells.append(GridCell(index, args.family, n, margin, params))
            index += 1
    return cells


_MODEL_DBAR = {
    "gaussian": lambda n, p: float(n),
    "censored": lambda n, p: n * p["delta"] * p["p"],
    "sbm": lambda n, p: n * (p["p"] - p["q"]) / 2,
}

PHASE_COLUMNS = [
    "row_type", "family", "cell_index", "n", "margin_factor",
    "sigma", "p", "delta", "q", "centering",
    "trial_index", "seed", "verdict", "condition_number", "delta_c",
    "dual_feasible", "recovered", "second_order_critical", "iterations",
    "objective", "kuramoto_synchronized", "error", "wall_time_ms",
    "recovery_freq", "certificate_freq", "mean_delta_c",
]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _run_trial(args, cell: GridCell, trial: int) -> dict:
    t0 = time.perf_counter()
    seed = derive_seed(args.master_seed, cell.index, trial)
    row = {
        "row_type": "trial",
        "family": cell.family,
        "cell_index": cell.index,
        "n": cell.n,
        "margin_factor": cell.margin,
        "trial_index": trial,
        "seed": seed,
        "sigma": cell.params.get("sigma"),
        "p": cell.params.get("p"),
        "delta": cell.params.get("delta"),
        "q": cell.params.get("q"),
        "centering": cell.params.get("centering"),
        "error": None,
    }
    try:
        family = {"gaussian": "gaussian_z2", "censored": "censored_block", "sbm": "sbm"}[cell.family]
        spec = models.ModelSpec(
            family=family,
            n=cell.n,
            params=cell.params,
            seed=seed,
            ground_truth=args.ground_truth,
        )
        C, z = models.generate(spec)

        cert = certificates.benign_landscape_check(
            C, z, args.r, preconditioner=args.preconditioner
        )
        row["verdict"] = cert.verdict
        row["condition_number"] = cert.condition_number
        row["dual_feasible"] = cert.dual_feasible

        d_bar = _MODEL_DBAR[cell.family](cell.n, cell.params)
        if d_bar > 0:
            ref = certificates.rank_one_bound(C, z, a="uniform", d_bar=d_bar)
            row["delta_c"] = ref.delta_c
        else:
            row["delta_c"] = float("inf")

        opts = optimizer.SolveOptions(
            max_iters=args.solver_max_iters, grad_tol=args.grad_tol, seed=seed
        )
        rep = optimizer.solve(C, args.r, opts, z=z)
        row["recovered"] = rep.recovered
        row["second_order_critical"] = rep.second_order_critical
        row["iterations"] = rep.iterations
        row["objective"] = rep.objective

        if cert.verdict == certificates.VERDICT_BENIGN and not rep.recovered:
            raise RuntimeError(
                f"certificate-solver contract violated at cell {cell.index} trial {trial}: "
                "benign verdict but the solver did not recover the ground truth"
            )

        if args.kuramoto:
            if args.r != 2 or args.ground_truth != "all_ones":
                raise ValueError("--kuramoto requires r=2 and all-ones ground truth")
            theta0 = kuramoto.PhaseVector(angles=generator(seed ^ 0xA5A5).uniform(0, 2 * np.pi, cell.n))
            sim = kuramoto.simulate(
                C,
                theta0,
                kuramoto.SimOptions(max_time=args.sim_max_time, stop_on_sync=True, seed=seed),
            )
            row["kuramoto_synchronized"] = sim.synchronized
    except RuntimeError:
        raise
    except Exception as exc:  # recorded per-row; the sweep continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["wall_time_ms"] = int(round((time.perf_counter() - t0) * 1000))
    return row


def cmd_phase(args) -> int:
    cells = _resolve_cells(args)
    jobs = max(1, args.jobs)
    work = [(cell, t) for cell in cells for t in range(args.trials)]
    if jobs == 1:
        results = {(c.index, t): _run_trial(args, c, t) for c, t in work}
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futs = {(c.index, t): pool.submit(_run_trial, args, c, t) for c, t in work}
        results = {key: fut.result() for key, fut in futs.items()}

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PHASE_COLUMNS)
        for cell in cells:
            rows = [results[(cell.index, t)] for t in range(args.trials)]
            for row in rows:
                writer.writerow([_fmt(row.get(col)) for col in PHASE_COLUMNS])
            ok = [r for r in rows if r["error"] is None]
            agg = {
                "row_type": "aggregate",
                "family": cell.family,
                "cell_index": cell.index,
                "n": cell.n,
                "margin_factor": cell.margin,
                "recovery_freq": float(np.mean([bool(r.get("recovered")) for r in ok])) if ok else None,
                "certificate_freq": float(
                    np.mean([r.get("verdict") == certificates.VERDICT_BENIGN for r in ok])
                ) if ok else None,
                "mean_delta_c": float(np.mean([r.get("delta_c", float("inf")) for r in ok])) if ok else None,
            }
            writer.writerow([_fmt(agg.get(col)) for col in PHASE_COLUMNS])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spherosync",
        description="Certify, solve, and simulate synchronization problems on sphere products.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a model instance into a matrix file")
    p.add_argument("spec", help="JSON model spec file")
    p.add_argument("out", help="output matrix file")
    p.add_argument("--z-out", default=None, help="also write the ground-truth sign vector")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("certify", help="benign-landscape certificate for a matrix file")
    p.add_argument("matrix")
    p.add_argument("--z", default="ones", help="sign vector file, or 'ones'")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--preconditioner", default="identity", choices=["identity", "degree"])
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("solve", help="Riemannian gradient ascent on a matrix file")
    p.add_argument("matrix")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--z", default=None, help="ground-truth sign vector file for recovery check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--init", default="random", help="random | twisted:Q | file:PATH")
    p.add_argument("--out-config", default=None, help="write the final configuration here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("kuramoto", help="simulate the oscillator dynamics")
    p.add_argument("matrix")
    p.add_argument("--init", default="random", help="random | twisted:Q | file:PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-step", type=float, default=None)
    p.add_argument("--max-time", type=float, default=100.0)
    p.add_argument("--sync-tol", type=float, default=1e-6)
    p.add_argument("--stop-on-sync", action="store_true")
    p.add_argument("--trajectory", default=None, help="CSV trajectory dump path")
    p.add_argument("--stride", type=int, default=10)
    p.set_defaults(func=cmd_kuramoto)

    p = sub.add_parser("circulant", help="closed-form circulant spectra")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.set_defaults(func=cmd_circulant)

    p = sub.add_parser("phase", help="Monte Carlo phase-diagram sweep")
    p.add_argument("--family", required=True, choices=["gaussian", "censored", "sbm"])
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--margins", type=float, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--p", type=float, default=None, help="censored: fixed edge probability")
    p.add_argument("--b", type=float, default=1.0, help="sbm: across-block rate (q = b log n / n)")
    p.add_argument("--centering", default="known", choices=["known", "estimated"])
    p.add_argument("--ground-truth", default="all_ones", choices=["all_ones", "balanced", "random"])
    p.add_argument("--preconditioner", default="degree", choices=["identity", "degree"])
    p.add_argument("--solver-max-iters", type=int, default=3000)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--kuramoto", action="store_true", help="also simulate the oscillator dynamics")
    p.add_argument("--sim-max-time", type=float, default=50.0)
    p.set_defaults(func=cmd_phase)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
