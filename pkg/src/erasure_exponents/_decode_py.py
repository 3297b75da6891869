"""numpy fallback for the threshold decoder; same contract as the compiled kernel."""

from __future__ import annotations

import numpy as np

_BLOCK = 1 << 22


def decode_batch(W: np.ndarray, ys: np.ndarray, n_threshold: float) -> np.ndarray:
    n, _, M = W.shape
    B = ys.shape[0]
    out = np.empty(B, dtype=np.int64)
    step = max(1, _BLOCK // (n * M))
    for start in range(0, B, step):
        blk = ys[start:start + step]
        # accumulate letter by letter, in the compiled kernel's order, so exact ties stay ties
        acc = W[0, blk[:, 0]].copy()
        for i in range(1, n):
            acc += W[i, blk[:, i]]
        best = np.argmax(acc, axis=1)
        rows = np.arange(blk.shape[0])
        vmax = acc[rows, best]
        with np.errstate(invalid="ignore", divide="ignore"):
            e = np.exp(acc - vmax[:, None])
            e[rows, best] = 0.0
            rest = e.sum(axis=1)
            accept = (rest == 0.0) | (-np.log(rest) >= n_threshold)
        dec = np.where(accept & np.isfinite(vmax), best, -1)
        out[start:start + blk.shape[0]] = dec
    return out
