"""
Pixel-adaptive sparsity against fixed penalties
===============================================

Plain NMF, l1 and l1/2 regularization apply the same penalty to every pixel.
The data-guided variant lowers the exponent where the map says a pixel is
pure and raises it towards l1 in transition areas. This demo runs all four on
the same seeded scenes and scores them against ground truth.
"""

import numpy as np

from dgsnmf import SolverConfig, evaluate, run
from dgsnmf.io import render_pseudo_color, write_ppm
from dgsnmf.metrics import hoyer_sparsity_map
from dgsnmf.synth import SceneSpec, generate

KINDS = ("none", "l1", "lhalf", "dg")

####################################################################
# One scene in detail
# -------------------

cube, truth = generate(SceneSpec(20, 20, 30, 3, 3, 0.01, seed=5))
for kind in KINDS:
    lam = 0.0 if kind == "none" else 0.1
    factors, trace = run(cube, 3, SolverConfig(lam=lam, regularizer=kind, seed=5))
    rep = evaluate(factors, truth, normalize_pixels=True)
    print(f"{kind:6s} iters {trace.iterations_run:4d}  "
          f"SAD {np.degrees(rep.mean_sad):6.2f} deg  RMSE {rep.mean_rmse:.4f}")

####################################################################
# The objective never goes up
# ---------------------------
# Each multiplicative update is non-increasing, so the relative decrements in
# the trace stay at or above zero until the run hits its tolerance.

print("smallest relative decrement", min(trace.relative_decrements))

####################################################################
# Ten seeds
# ---------
# Count how often the data-guided run beats plain NMF.

wins = 0
for seed in range(10):
    cube, truth = generate(SceneSpec(20, 20, 30, 3, 3, 0.01, seed))
    dg, _ = run(cube, 3, SolverConfig(lam=0.1, regularizer="dg", seed=seed))
    nmf, _ = run(cube, 3, SolverConfig(lam=0.0, regularizer="none", seed=seed))
    wins += evaluate(dg, truth).mean_sad < evaluate(nmf, truth).mean_sad
print(f"data-guided beats plain NMF on SAD in {wins}/10 scenes")

####################################################################
# Lambda controls sparsity
# ------------------------

cube, truth = generate(SceneSpec(20, 20, 30, 3, 3, 0.01, seed=1))
for lam in (0.0, 0.1, 0.3, 0.5):
    factors, _ = run(cube, 3, SolverConfig(lam=lam, regularizer="dg", seed=1))
    print(f"lambda {lam:.1f}: mean Hoyer sparsity {hoyer_sparsity_map(factors.abundances).mean():.3f}")

####################################################################
# Pseudo-colour render
# --------------------
# Red, green and blue stand for the three estimated endmembers.

write_ppm(render_pseudo_color(factors.abundances, 20, 20), "abundances.ppm")
