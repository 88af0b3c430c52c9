"""
The command-line pipeline
=========================

Every stage reads and writes plain files, so the steps below can be run
one by one from a shell as well::

    dgsnmf synth --width 10 --height 10 --channels 20 --k 3 --seed 7 --out run
    dgsnmf dgmap --cube run/cube.hscube --out run
    dgsnmf unmix --cube run/cube.hscube --k 3 --reg dg --dgmap run/dgmap_refined.csv --out run
    dgsnmf eval --m-hat run/M.csv --a-hat run/A.csv --m-true run/M_true.csv --a-true run/A_true.csv
    dgsnmf render --abundances run/A.csv --width 10 --height 10 --out run/A.ppm
"""

import csv
import tempfile
from pathlib import Path

from dgsnmf.cli import cli

d = Path(tempfile.mkdtemp(prefix="dgsnmf-"))

####################################################################
# Generate, estimate the map, unmix
# ---------------------------------

cli(["synth", "--width", "10", "--height", "10", "--channels", "20", "--k", "3",
     "--seed", "7", "--noise", "0.01", "--out", str(d)])
cli(["dgmap", "--cube", str(d / "cube.hscube"), "--out", str(d)])
cli(["unmix", "--cube", str(d / "cube.hscube"), "--k", "3", "--reg", "dg",
     "--dgmap", str(d / "dgmap_refined.csv"), "--lambda", "0.1", "--out", str(d)])

####################################################################
# Convergence trace
# -----------------
# trace.csv holds the objective after every iteration and its relative
# decrement, ready for external plotting.

with open(d / "trace.csv") as fh:
    rows = list(csv.DictReader(fh))
print(rows[0])
print(rows[-1])

####################################################################
# Score and render
# ----------------

cli(["eval", "--m-hat", str(d / "M.csv"), "--a-hat", str(d / "A.csv"),
     "--m-true", str(d / "M_true.csv"), "--a-true", str(d / "A_true.csv"),
     "--normalize-pixels"])
cli(["render", "--abundances", str(d / "A.csv"), "--width", "10", "--height", "10",
     "--out", str(d / "A.ppm")])

####################################################################
# Errors
# ------
# A data-guided run needs a map source; forgetting it is a usage error.

print("exit code:", cli(["unmix", "--cube", str(d / "cube.hscube"), "--k", "3", "--reg", "dg"]))
print("outputs in", d)
