"""Independent reference computations for the test suite.

Plain second-order central differences with a fixed step, written directly from
the coordinate formulas.  Nothing here imports the package's geometry code.
"""

import math

import numpy as np

H = 1e-4


def schwarzschild_metric(x, M=1.0):
    t, r, th, ph = x
    f = 1.0 - 2.0 * M / r
    return np.diag([f, -1.0 / f, -r * r, -(r * math.sin(th)) ** 2])


def eds_metric(x):
    a2 = x[0] ** (4.0 / 3.0)
    return np.diag([1.0, -a2, -a2, -a2])


def dmetric(metric, x, h=H):
    x = np.asarray(x, dtype=float)
    out = np.zeros((4, 4, 4))
    for k in range(4):
        step = np.zeros(4)
        step[k] = h
        out[k] = (metric(x + step) - metric(x - step)) / (2 * h)
    return out


def christoffel(metric, x, h=H):
    """gamma[a, m, n] = Gamma^a_{mn}."""
    g = metric(np.asarray(x, dtype=float))
    ginv = np.linalg.inv(g)
    d = dmetric(metric, x, h)  # d[k, i, j] = d_k g_ij
    gam = np.zeros((4, 4, 4))
    for a in range(4):
        for m in range(4):
            for n in range(4):
                gam[a, m, n] = 0.5 * sum(ginv[a, b] * (d[m, b, n] + d[n, b, m] - d[b, m, n]) for b in range(4))
    return gam


def ricci(metric, x, h=1e-3):
    """Ric_{bn} = d_a G^a_{nb} - d_n G^a_{ab} + G^a_{al} G^l_{nb} - G^a_{nl} G^l_{ab}."""
    x = np.asarray(x, dtype=float)
    G = christoffel(metric, x)
    dG = np.zeros((4, 4, 4, 4))
    for k in range(4):
        step = np.zeros(4)
        step[k] = h
        dG[k] = (christoffel(metric, x + step) - christoffel(metric, x - step)) / (2 * h)
    ric = np.zeros((4, 4))
    for b in range(4):
        for n in range(4):
            v = 0.0
            for a in range(4):
                v += dG[a, a, n, b] - dG[n, a, a, b]
                for l in range(4):
                    v += G[a, a, l] * G[l, n, b] - G[a, n, l] * G[l, a, b]
            ric[b, n] = v
    return ric
