"""Benchmark harness and command line entry point.

Sweeps block size, fill level, and worker count over one matrix, timing
preconditioner construction and the solve separately, and renders the
records as CSV or as a sectioned table.
"""

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from .factor import build_preconditioner
from .gmres import SolverConfig, gmres
from .mmio import read_matrix_market
from .poisson import gen_poisson_3d
from .sparse import bcsr_from_csr, spmv
from .trisolve import apply_preconditioner

__all__ = [
    "BenchPlan",
    "BenchRecord",
    "run_bench",
    "emit_report",
    "parse_records_csv",
    "main",
]

CSV_HEADER = ["block_size", "k", "threads", "setup_s", "solve_s",
              "iterations", "converged", "residual"]


@dataclass
class BenchPlan:
    """One benchmark campaign: a matrix source plus the parameter sweeps."""

    poisson: tuple = None
    mtx_path: str = None
    block_sizes: list = field(default_factory=lambda: [1])
    k_levels: list = field(default_factory=lambda: [0])
    threads: list = field(default_factory=lambda: [1])
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: str = "table"
    seed: int = 0

    def __post_init__(self):
        if (self.poisson is None) == (self.mtx_path is None):
            raise ValueError("exactly one of poisson/mtx_path must be given")
        if not self.block_sizes or any(bs < 1 for bs in self.block_sizes):
            raise ValueError("block sizes must be positive")
        if not self.k_levels or any(k < 0 for k in self.k_levels):
            raise ValueError("fill levels must be nonnegative")
        if not self.threads or any(t < 1 for t in self.threads):
            raise ValueError("thread counts must be positive")
        if self.output not in ("table", "csv"):
            raise ValueError("output must be 'table' or 'csv'")


@dataclass
class BenchRecord:
    """Result of one (block_size, k, threads) configuration."""

    block_size: int
    k: int
    threads: int
    setup_seconds: float
    solve_seconds: float
    iterations: int
    converged: bool
    final_residual: float


def load_matrix(plan):
    if plan.poisson is not None:
        return gen_poisson_3d(*plan.poisson)
    return read_matrix_market(plan.mtx_path)


def make_rhs(a, mode, seed):
    if mode == "ones-solution":
        return spmv(a, np.ones(a.num_cols))
    return np.random.default_rng(seed).standard_normal(a.num_rows)


def run_bench(plan, log=None):
    """Run every configuration of the plan and return one record each.

    Block sizes that do not divide the matrix dimension are skipped with a
    diagnostic on ``log`` (stderr by default) and produce no record.
    Non-convergence is recorded, not raised. The same right-hand side is
    used for every configuration, so iteration counts are comparable, and
    repeated runs of one plan give identical numeric results.
    """
    log = sys.stderr if log is None else log
    a = load_matrix(plan)
    n = a.num_rows
    b = make_rhs(a, plan.solver.rhs_mode, plan.seed)
    records = []
    for bs in plan.block_sizes:
        if n % bs:
            print(f"skipping block size {bs}: does not divide matrix dimension {n}", file=log)
            continue
        blocked = bcsr_from_csr(a, bs)
        for k in plan.k_levels:
            t0 = perf_counter()
            factors = build_preconditioner(blocked, k)
            setup = perf_counter() - t0
            for t in plan.threads:
                def precond(v, factors=factors, t=t):
                    return apply_preconditioner(factors, v, workers=t)
                _, st = gmres(a, b, M=precond, cfg=plan.solver, workers=t)
                records.append(BenchRecord(
                    block_size=bs,
                    k=k,
                    threads=t,
                    setup_seconds=setup,
                    solve_seconds=st.solve_seconds,
                    iterations=st.iterations,
                    converged=st.converged,
                    final_residual=st.final_relative_residual,
                ))
    return records


def emit_report(records, fmt="table"):
    """Render records as CSV or as an aligned table sectioned by block size."""
    if not records:
        raise ValueError("no records to report")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.block_size, r.k, r.threads, repr(r.setup_seconds),
                             repr(r.solve_seconds), r.iterations, r.converged,
                             repr(r.final_residual)])
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format '{fmt}'")
    base = {(r.block_size, r.k): r.solve_seconds for r in records if r.threads == 1}
    head = (f"{'block_size':>10}  {'k':>2}  {'threads':>7}  {'setup_s':>10}  "
            f"{'solve_s':>10}  {'iterations':>10}  {'converged':>9}  "
            f"{'residual':>10}  {'speedup':>7}")
    rule = "-" * len(head)
    lines = [head, rule]
    last_bs = records[0].block_size
    for r in records:
        if r.block_size != last_bs:
            lines.append(rule)
            last_bs = r.block_size
        t1 = base.get((r.block_size, r.k))
        if t1 is not None and r.solve_seconds > 0.0:
            speed = f"{t1 / r.solve_seconds:7.2f}"
        else:
            speed = " " * 7
        lines.append(
            f"{r.block_size:>10}  {r.k:>2}  {r.threads:>7}  {r.setup_seconds:>10.4f}  "
            f"{r.solve_seconds:>10.4f}  {r.iterations:>10}  "
            f"{'yes' if r.converged else 'no':>9}  {r.final_residual:>10.3e}  {speed}"
        )
    return "\n".join(lines) + "\n"


def parse_records_csv(text):
    """Parse emit_report(..., \"csv\") output back into records."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    records = []
    for row in rows[1:]:
        records.append(BenchRecord(
            block_size=int(row[0]),
            k=int(row[1]),
            threads=int(row[2]),
            setup_seconds=float(row[3]),
            solve_seconds=float(row[4]),
            iterations=int(row[5]),
            converged=row[6] == "True",
            final_residual=float(row[7]),
        ))
    return records


def _int_list(text):
    try:
        items = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got '{text}'")
    if not items:
        raise argparse.ArgumentTypeError("list must not be empty")
    return items


def build_parser():
    p = argparse.ArgumentParser(
        prog="blockiluk-bench",
        description="Benchmark block ILU(k) preconditioned GMRES over one matrix.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--poisson", nargs=3, type=int, metavar=("NX", "NY", "NZ"),
                     help="generate the 7-point operator on an NX x NY x NZ grid")
    src.add_argument("--mtx", metavar="PATH", help="read a Matrix Market coordinate file")
    p.add_argument("--block-sizes", type=_int_list, default=[1], metavar="LIST",
                   help="comma-separated block sizes (default 1)")
    p.add_argument("--k-levels", type=_int_list, default=[0], metavar="LIST",
                   help="comma-separated fill levels (default 0)")
    p.add_argument("--threads", type=_int_list, default=[1], metavar="LIST",
                   help="comma-separated worker counts (default 1)")
    p.add_argument("--restart", type=int, default=20, help="GMRES restart length (default 20)")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="relative residual tolerance (default 1e-6)")
    p.add_argument("--max-iters", type=int, default=10000,
                   help="iteration cap per solve (default 10000)")
    p.add_argument("--format", choices=["table", "csv"], default="table",
                   help="report format (default table)")
    p.add_argument("--seed", type=int, default=0, help="seed for the random right-hand side")
    p.add_argument("--rhs", choices=["ones", "random"], default="ones",
                   help="b = A @ ones, or a seeded random vector (default ones)")
    return p


def main(argv=None):
    """CLI entry point. Exit 0 when every attempted configuration converged, else 2."""
    args = build_parser().parse_args(argv)
    cfg = SolverConfig(
        restart=args.restart,
        max_iters=args.max_iters,
        rel_tol=args.tol,
        rhs_mode="ones-solution" if args.rhs == "ones" else "given",
    )
    plan = BenchPlan(
        poisson=tuple(args.poisson) if args.poisson else None,
        mtx_path=args.mtx,
        block_sizes=args.block_sizes,
        k_levels=args.k_levels,
        threads=args.threads,
        solver=cfg,
        output=args.format,
        seed=args.seed,
    )
    records = run_bench(plan)
    if records:
        print(emit_report(records, plan.output), end="")
    return 0 if all(r.converged for r in records) else 2


if __name__ == "__main__":
    sys.exit(main())
