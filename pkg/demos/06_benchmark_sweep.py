"""Sweeping block size, fill level, and worker count over one problem.

The same sweep is available from the command line:

    blockiluk-bench --poisson 16 16 16 --block-sizes 1,2,4 \
        --k-levels 0,1,2 --threads 1,2 --format table

This script drives the harness in process and prints both report
formats. Setup time is the symbolic phase plus factorization and split;
solve time is the GMRES loop with the preconditioner applied once per
iteration.
"""

from blockiluk.bench import BenchPlan, emit_report, run_bench

plan = BenchPlan(
    poisson=(16, 16, 16),
    block_sizes=[1, 2, 4],
    k_levels=[0, 1, 2],
    threads=[1, 2],
    output="table",
)
records = run_bench(plan)

print(emit_report(records, "table"))

print("the same records as CSV (the machine-readable interchange form):\n")
print(emit_report(records[:4], "csv"))
