"""
Checking the closed forms against a Fock-space simulation
=========================================================

The ``fock`` module evolves the density operator itself (two A-modes and
the B qubit) through squeezers and loss channels, then measures the
Stokes correlators as operator traces.  Agreement with the closed forms is
the main validation of this package.
"""

from clone_invert import experiment, fock, validate_params

p = validate_params({"eta1": 0.8, "eta2": 0.98, "eta3": 0.8, "g": 1.0})
rep = fock.run_pipeline(p)
print(f"Fock cutoff per mode: {rep.n_max}, top-level tail {rep.max_tail:.1e}")
print(f"simulated W = {rep.witness:.12f}, <N_A> = {rep.n_a:.12f}, clones = {rep.n_clones_measured:.12f}")

report = experiment.oracle_compare(p, tolerance=1e-8)
for name, diff in report.diffs.items():
    print(f"  |analytic - simulated| {name:9s} = {diff:.2e}")
print("pass:", report.pass_)

# Small grid; the full 108-point grid lives in the acceptance tests.
reports = experiment.oracle_grid(etas=(0.7, 1.0), gains=(0.0, 0.7))
print("grid worst discrepancy:", max(r.worst for r in reports))

# Large gains are out of reach for the truncated simulation by design.
try:
    fock.run_pipeline(validate_params({"eta1": 1, "eta2": 1, "eta3": 1, "g": 5.0}))
except fock.TruncationExceeded as exc:
    print("g = 5:", exc.stage, "->", exc)
