"""Cross-check the embedded published weak-scaling tables.

The package ships the published execution-time and speedup tables for a
large-cluster K-means weak-scaling study as a regression fixture.
Recomputing S_p = T_1/T_p from the time table should reproduce the speedup
table; a handful of cells are internally inconsistent in the source and are
excluded (but always listed).
"""

from granscale import validate_fixture

validation = validate_fixture()
print(validation.report_text())
print()
print(f"{len(validation.anomalous)} anomalous cells excluded from the gate:")
for cell in validation.anomalous:
    print(f"  size {cell.problem_size}, {cell.workers} workers: {cell.note}")
