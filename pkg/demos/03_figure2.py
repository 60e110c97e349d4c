"""
Clone numbers compatible with a given witness value
===================================================

For eta1 = eta3 = 0.8, how many intermediate photons can there be while the
final witness stays at 0, 0.5 or 1?  Points below the W = 0 curve still
certify entanglement.  Writes ``figure2.csv`` and ``figure2.svg``.
"""

from clone_invert import cli, experiment

spec = experiment.ScanSpec(ranges={"eta2": (0.9, 0.999, 100)}, fixed={"eta1": 0.8, "eta3": 0.8})
table = experiment.figure2_sweep(spec)

for row in table.rows[::20]:
    print("eta2 = {:.4f}: N_c(W=0) = {:9.2f}  N_c(W=0.5) = {:9.2f}  N_c(W=1) = {:9.2f}".format(*row))

with open("figure2.csv", "w") as fh:
    fh.write(cli.table_to_csv(table))
with open("figure2.svg", "w") as fh:
    fh.write(cli.figure2_svg(table))
print("wrote figure2.csv and figure2.svg")
