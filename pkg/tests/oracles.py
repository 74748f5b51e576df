"""Independent reference computations used by the tests.

Nothing here imports the package's numerical code.
"""

import numpy as np


def brute_force_line(X, Y, span=50.0, points=101, keep=20, tol=1e-11):
    """Minimise sum((Y - (-b*X + c))**2) over (b, c) by grid search with zooming.

    Each round evaluates a ``points`` x ``points`` grid and recentres on the
    best node, keeping ``keep`` grid spacings either side. The wide margin
    covers elongated valleys where the best node is not the nearest one.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    b0, c0, hb, hc = 0.0, 0.0, span, span
    while max(hb, hc) > tol:
        bs = np.linspace(b0 - hb, b0 + hb, points)
        cs = np.linspace(c0 - hc, c0 + hc, points)
        B, C = np.meshgrid(bs, cs, indexing="ij")
        resid = Y[None, None, :] - (-B[..., None] * X[None, None, :] + C[..., None])
        M = np.einsum("ijk,ijk->ij", resid, resid)
        i, j = np.unravel_index(np.argmin(M), M.shape)
        b0, c0 = bs[i], cs[j]
        step_b, step_c = 2 * hb / (points - 1), 2 * hc / (points - 1)
        hb, hc = keep * step_b, keep * step_c
    return b0, c0


def longest_match_by_hand(text, dictionary):
    """Plain forward maximum matching over a single dictionary."""
    out, i = [], 0
    while i < len(text):
        for j in range(len(text), i, -1):
            if text[i:j] in dictionary:
                out.append((text[i:j], dictionary[text[i:j]]))
                i = j
                break
        else:
            out.append((text[i], "x"))
            i += 1
    return out
