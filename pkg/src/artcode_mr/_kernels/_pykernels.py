"""Pure-Python/numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` must agree with them
bit for bit.
"""

import numpy as np


def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def label_mask(mask, connectivity=4):
    """Label the nonzero pixels of a 2-D mask.

    Returns ``(labels, count)`` where ``labels`` is an int32 array with 0 for
    unset pixels and component ids ``1..count`` numbered in order of the first
    pixel of each component in raster order.
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    mask = np.ascontiguousarray(mask, dtype=bool)
    height, width = mask.shape
    labels = np.zeros((height, width), dtype=np.int32)
    if mask.size == 0:
        return labels, 0

    # runs are found per row with numpy and linked with union-find
    padded = np.zeros((height, width + 2), dtype=np.int8)
    padded[:, 1:-1] = mask
    edges = np.diff(padded, axis=1)
    rows_s, cols_s = np.nonzero(edges == 1)
    rows_e, cols_e = np.nonzero(edges == -1)
    n_runs = len(rows_s)
    if n_runs == 0:
        return labels, 0
    run_row = rows_s.tolist()
    run_start = cols_s.tolist()
    run_end = cols_e.tolist()
    slack = 1 if connectivity == 8 else 0

    row_first = np.searchsorted(rows_s, np.arange(height + 1)).tolist()
    parent = list(range(n_runs))
    for y in range(1, height):
        i, i_end = row_first[y], row_first[y + 1]
        j, j_end = row_first[y - 1], row_first[y]
        while i < i_end and j < j_end:
            s, e = run_start[i], run_end[i]
            ps, pe = run_start[j], run_end[j]
            if s < pe + slack and ps < e + slack:
                ri, rj = _find(parent, i), _find(parent, j)
                if ri != rj:
                    if ri < rj:
                        parent[rj] = ri
                    else:
                        parent[ri] = rj
            if pe < e:
                j += 1
            else:
                i += 1

    final = [0] * n_runs
    count = 0
    for r in range(n_runs):
        root = _find(parent, r)
        if final[root] == 0:
            count += 1
            final[root] = count
        labels[run_row[r], run_start[r]:run_end[r]] = final[root]
    return labels, count


def best_split(x, y, min_leaf):
    """Best Gini threshold on one feature.

    ``y`` holds 0/1 labels.  Returns ``(impurity, threshold)`` where impurity
    is the size-weighted sum of child Gini half-impurities divided by the node
    size, or ``(inf, nan)`` when no split leaves ``min_leaf`` samples per side.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = x.shape[0]
    if n < 2 * min_leaf or n < 2:
        return np.inf, np.nan
    order = np.argsort(x, kind="stable")
    xs = x[order]
    pos_left = np.cumsum(y[order])[:-1]
    total_pos = int(y.sum())
    n_left = np.arange(1, n, dtype=np.int64)
    n_right = n - n_left
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return np.inf, np.nan
    pos_right = total_pos - pos_left
    # exact integer numerator so both backends round identically
    num = pos_left * (n_left - pos_left) * n_right + pos_right * (n_right - pos_right) * n_left
    den = n_left * n_right * n
    score = np.where(valid, num.astype(np.float64) / den.astype(np.float64), np.inf)
    i = int(np.argmin(score))
    return float(score[i]), float((xs[i] + xs[i + 1]) / 2.0)
