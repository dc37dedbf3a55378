"""Walkthrough: quantize compressed measurements, then recover in two stages.

A k-sparse signal x in R^N is measured by a Gaussian matrix Phi (m rows,
N(0,1) entries).  The measurements are quantized with a greedy r-th order
sigma-delta scheme, and x is recovered by (1) an l1 decode that locates the
support and (2) a Sobolev-dual projection onto the located columns.  The
point of the demo: at fixed step size, the fine-stage error shrinks rapidly
as the oversampling ratio lambda = m/k grows, while plain PCM stalls.
"""

import numpy as np

from sdcs.decode import two_stage_recover
from sdcs.ensembles import EnsembleSpec, SignalSpec, sample_matrix, sample_signal
from sdcs.quantize import Alphabet, pcm_quantize, sigma_delta_quantize

N, K, DELTA, SEED = 1024, 10, 0.01, 7

phi_full = sample_matrix(EnsembleSpec("gaussian_unit", m=600, n=N, seed=SEED))
x = sample_signal(SignalSpec(n=N, k=K, model="constant", seed=SEED), stream=1)
xd = x.dense()

print(f"signal: {K}-sparse in R^{N}, ||x||_2 = {np.linalg.norm(xd):.3f}, "
      f"step size delta = {DELTA}")
print()
print(f"{'m':>4} {'lambda':>7} {'pcm coarse':>11} {'pcm fine':>10} "
      f"{'sd r=1 fine':>12} {'sd r=2 fine':>12} {'support':>8}")

for m in (100, 200, 300, 400, 500, 600):
    phi = phi_full[:m]
    y = phi @ xd
    row = [f"{m:>4}", f"{m / K:>7.0f}"]

    pcm = pcm_quantize(y, Alphabet(DELTA))
    rec = two_stage_recover(phi, pcm.q, K, r=0, delta=DELTA, x_true=x)
    row += [f"{rec.coarse_err:>11.2e}", f"{rec.fine_err:>10.2e}"]

    exact = True
    for r in (1, 2):
        sd = sigma_delta_quantize(y, r, Alphabet(DELTA))
        rec = two_stage_recover(phi, sd.q, K, r=r, delta=DELTA, x_true=x)
        row.append(f"{rec.fine_err:>12.2e}")
        exact &= rec.support_exact
    row.append(f"{'exact' if exact else 'MISSED':>8}")
    print(" ".join(row))

print()
print("reading the table: PCM's coarse error is flat in lambda; the")
print("sigma-delta fine error drops roughly like lambda^-r at the same")
print("bit budget, purely by redistributing quantization noise in time.")
