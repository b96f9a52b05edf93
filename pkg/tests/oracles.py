"""Slow, direct reference computations used to cross-check the library.

Nothing here calls the transform, energy or norm code under test.
"""
from __future__ import annotations

import cmath
import itertools
import math

import numpy as np
from scipy.optimize import minimize


def elements(orders):
    return list(itertools.product(*(range(n) for n in orders)))


def char(orders, a, x):
    return cmath.exp(2j * math.pi * sum(ai * xi / n for ai, xi, n in zip(a, x, orders)))


def char_matrix(orders):
    """``M[a, x] = chi_a(x)`` over all elements, by direct exponentiation."""
    E = np.array(elements(orders), dtype=np.int64).reshape(-1, len(orders))
    frac = np.zeros((len(E), len(E)))
    for j, n in enumerate(orders):
        frac += (np.outer(E[:, j], E[:, j]) % n) / n
    return np.exp(2j * np.pi * frac)


def naive_dft(orders, values):
    M = char_matrix(orders)
    return (M.conj() @ values) / len(values)


def naive_idft(orders, coeffs):
    return char_matrix(orders).T @ coeffs


def naive_energy(orders, S):
    """Count triples (a, b, c) with ``a + b - c`` back in S."""
    S = sorted({tuple(s) for s in S})
    if not S:
        return 0
    P = np.array(S, dtype=np.int64)
    mods = np.array(orders, dtype=np.int64)
    D = (P[:, None, None, :] + P[None, :, None, :] - P[None, None, :, :]) % mods
    radix = np.cumprod([1] + list(orders[::-1]))[:-1][::-1]
    keys = D @ radix
    members = P @ radix
    return int(np.isin(keys, members).sum())


def naive_graph_energy(pairs, g_orders, h_orders):
    """Brute force over Lambda^4 with both coincidence conditions."""
    count = 0
    for (a1, b1), (a2, b2), (a3, b3), (a4, b4) in itertools.product(pairs, repeat=4):
        if all((x + y - z - w) % n == 0 for x, y, z, w, n in zip(a1, a2, a3, a4, g_orders)) and all(
            (x + y - z - w) % n == 0 for x, y, z, w, n in zip(b1, b2, b3, b4, h_orders)
        ):
            count += 1
    return count


def direct_phi(orders, points):
    """``phi(u) = sum_gamma conj(gamma(u))`` at every u, one exponential at a time."""
    return np.array([sum(char(orders, g, u).conjugate() for g in points) for u in elements(orders)])


def conv_counts(orders, X, Y):
    """Counting-measure convolution ``1_X * 1_Y`` as a dict."""
    out: dict = {}
    for x in X:
        for y in Y:
            s = tuple((a + b) % n for a, b, n in zip(x, y, orders))
            out[s] = out.get(s, 0) + 1
    return out


def dilate(orders, m, X):
    return {tuple(m * v % n for v, n in zip(x, orders)) for x in X}


def lp(values, p):
    return float(np.mean(np.abs(values) ** p) ** (1 / p))


def _sphere_point(angles, phases):
    """Unit vector in C^n from n-1 hyperspherical angles and n-1 relative phases."""
    n = len(angles) + 1
    r = np.ones(n)
    for i, t in enumerate(angles):
        r[i] *= math.cos(t)
        r[i + 1 :] *= math.sin(t)
    return r * np.exp(1j * np.concatenate([[0.0], phases]))


def grid_operator_norm(AG, AH, p, grid=9, refine=24):
    """``max ||AH c||_p / ||AG c||_p`` over the coefficient sphere.

    Dense grid over magnitudes (hyperspherical angles in [0, pi/2]) and
    relative phases, then restarted Nelder-Mead polishing from the best grid
    points.
    """
    n = AG.shape[1]

    def ratio(c):
        return lp(AH @ c, p) / lp(AG @ c, p)

    if n == 1:
        return ratio(np.ones(1))
    ang = np.linspace(0, math.pi / 2, grid)
    ph = np.linspace(0, 2 * math.pi, 2 * grid - 2, endpoint=False)
    A = np.array(list(itertools.product(ang, repeat=n - 1)))
    P = np.array(list(itertools.product(ph, repeat=n - 1)))
    phase = np.exp(1j * np.hstack([np.zeros((len(P), 1)), P]))
    vals = np.empty(len(A) * len(P))
    for r, a in enumerate(A):
        C = (_sphere_point(a, np.zeros(n - 1)).real * phase).T
        num = np.mean(np.abs(AH @ C) ** p, axis=0) ** (1 / p)
        den = np.mean(np.abs(AG @ C) ** p, axis=0) ** (1 / p)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals[r * len(P) : (r + 1) * len(P)] = np.where(den > 1e-12, num / den, 0.0)
    best = float(vals.max())
    starts = np.argsort(vals)[::-1][:refine]
    for s in starts:
        a0, q0 = A[s // len(P)], P[s % len(P)]

        def neg(v):
            c = _sphere_point(v[: n - 1], v[n - 1 :])
            d = lp(AG @ c, p)
            return 0.0 if d < 1e-12 else -lp(AH @ c, p) / d

        x, fx = np.concatenate([a0, q0]), None
        # restart from the endpoint until the simplex stops improving
        for _ in range(6):
            res = minimize(neg, x, method="Nelder-Mead", options=dict(xatol=1e-8, fatol=1e-12, maxiter=4000))
            if fx is not None and res.fun > fx - 1e-12:
                break
            x, fx = res.x, res.fun
        best = max(best, -float(res.fun))
    return best
