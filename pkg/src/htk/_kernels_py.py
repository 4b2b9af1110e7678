"""Pure-Python kernels.  Same signatures and results as the compiled ``_kernels``."""
import numpy as np


def levenshtein(a, b):
    if len(a) < len(b):
        a, b = b, a
    # b is the shorter string; one row of length len(b) + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cost = prev[j - 1] + (ca != cb)
            ins = cur[j - 1] + 1
            dele = prev[j] + 1
            cur.append(min(cost, ins, dele))
        prev = cur
    return prev[-1]


def levenshtein_to_many(a, candidates):
    return [levenshtein(a, c) for c in candidates]


def iou_1d(pred, truth):
    """Mean index-paired stripe IoU; unmatched stripes score 0."""
    n_pred, n_truth = len(pred), len(truth)
    n = max(n_pred, n_truth)
    if n == 0:
        return 1.0
    total = 0.0
    lo_p = lo_t = 0.0
    for t in range(min(n_pred, n_truth)):
        hi_p, hi_t = float(pred[t]), float(truth[t])
        inter = min(hi_p, hi_t) - max(lo_p, lo_t)
        union = max(hi_p, hi_t) - min(lo_p, lo_t)
        if union <= 0.0:
            # both stripes degenerate at the same point
            total += 1.0 if (lo_p == lo_t and hi_p == hi_t) else 0.0
        elif inter > 0.0:
            total += inter / union
        lo_p, lo_t = hi_p, hi_t
    return total / n


def forward_substitute(lower, rhs):
    """Solve ``lower @ x = rhs`` for lower-triangular ``lower``."""
    k = len(rhs)
    x = [0.0] * k
    for i in range(k):
        row = lower[i]
        acc = float(rhs[i])
        for j in range(i):
            acc -= float(row[j]) * x[j]
        x[i] = acc / float(row[i])
    return np.array(x, dtype=np.float64)
