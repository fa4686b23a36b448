"""Hot numeric kernels with a numba-compiled fast path and a pure-numpy fallback.

The backend is chosen once at import time: numba is used when it is
importable and the environment variable ``XCSER_NUMBA`` is not set to
``0``/``false``/``off``. Both implementations are kept importable side by
side (``*_numpy`` / ``*_numba``) so tests and the benchmark script can
compare them directly.
"""

from __future__ import annotations

import os

import numpy as np


def _env_wants_numba() -> bool:
    val = os.environ.get("XCSER_NUMBA", "1").strip().lower()
    return val not in ("0", "false", "off", "no")


NUMBA_AVAILABLE = False
if _env_wants_numba():
    try:
        from numba import njit

        NUMBA_AVAILABLE = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# match kernel: which rules accept state s
# ---------------------------------------------------------------------------

def match_mask_numpy(lo: np.ndarray, hi: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Boolean mask of rules whose hyperrectangle [lo, hi] contains s."""
    return np.logical_and(lo <= s, s <= hi).all(axis=1)


def _match_mask_loops(lo, hi, s, out):
    n, d = lo.shape
    for i in range(n):
        ok = True
        for j in range(d):
            v = s[j]
            if v < lo[i, j] or v > hi[i, j]:
                ok = False
                break
        out[i] = ok


# ---------------------------------------------------------------------------
# action-set update, scalar (Widrow-Hoff) prediction
# ---------------------------------------------------------------------------
# Per-rule sequence: exp += 1; eps += beta*(|P - p| - eps); p += beta*(P - p).
# Then relative accuracy over the set (numerosity weighted, from the updated
# error estimates) drives the fitness update, and the action-set-size
# estimate moves toward the set's total numerosity.

def update_scalar_set_numpy(pred, eps, fit, asz, exp, num, rows, P, beta,
                            alpha, eps0, nu):
    exp[rows] += 1
    eps[rows] += beta * (np.abs(P - pred[rows]) - eps[rows])
    pred[rows] += beta * (P - pred[rows])
    kappa = accuracy_vector_numpy(eps[rows], alpha, eps0, nu)
    weighted = kappa * num[rows]
    rel = weighted / weighted.sum()
    fit[rows] += beta * (rel - fit[rows])
    asz[rows] += beta * (num[rows].sum() - asz[rows])


def _update_scalar_set_loops(pred, eps, fit, asz, exp, num, rows, P, beta,
                             alpha, eps0, nu):
    m = rows.shape[0]
    num_sum = 0.0
    for k in range(m):
        i = rows[k]
        exp[i] += 1
        eps[i] += beta * (abs(P - pred[i]) - eps[i])
        pred[i] += beta * (P - pred[i])
        num_sum += num[i]
    denom = 0.0
    for k in range(m):
        i = rows[k]
        if eps[i] < eps0:
            kap = 1.0
        else:
            kap = alpha * (eps[i] / eps0) ** (-nu)
        denom += kap * num[i]
    for k in range(m):
        i = rows[k]
        if eps[i] < eps0:
            kap = 1.0
        else:
            kap = alpha * (eps[i] / eps0) ** (-nu)
        fit[i] += beta * (kap * num[i] / denom - fit[i])
        asz[i] += beta * (num_sum - asz[i])


# ---------------------------------------------------------------------------
# action-set update, linear (recursive least squares) prediction
# ---------------------------------------------------------------------------
# The error update uses the prediction before the weight update; the weight
# update is the standard RLS recursion with gain matrix V:
#   g = Vx / (lambda + x'Vx);  w += g*(P - w'x);  V = (V - g x'V) / lambda
# V is re-symmetrized to damp round-off. Returns the count of rules whose
# recursion produced non-finite values (their V is reset to delta*I).

def update_linear_set_numpy(W, V, eps, fit, asz, exp, num, rows, x, P, beta,
                            alpha, eps0, nu, lam, delta_rls):
    bad = 0
    with np.errstate(all="ignore"):
        bad = _update_linear_rows_numpy(W, V, eps, exp, rows, x, P, beta, lam,
                                        delta_rls)
    kappa = accuracy_vector_numpy(eps[rows], alpha, eps0, nu)
    weighted = kappa * num[rows]
    rel = weighted / weighted.sum()
    fit[rows] += beta * (rel - fit[rows])
    asz[rows] += beta * (num[rows].sum() - asz[rows])
    return bad


def _update_linear_rows_numpy(W, V, eps, exp, rows, x, P, beta, lam, delta_rls):
    bad = 0
    for i in rows:
        pred_before = float(W[i] @ x)
        exp[i] += 1
        eps[i] += beta * (abs(P - pred_before) - eps[i])
        v = V[i] @ x
        denom = lam + float(x @ v)
        g = v / denom
        W[i] += g * (P - pred_before)
        V[i] = (V[i] - np.outer(g, x @ V[i])) / lam
        V[i] = 0.5 * (V[i] + V[i].T)
        if not (np.all(np.isfinite(W[i])) and np.all(np.isfinite(V[i]))):
            W[i] = np.where(np.isfinite(W[i]), W[i], 0.0)
            V[i] = np.eye(x.shape[0]) * delta_rls
            bad += 1
    return bad


def _update_linear_set_loops(W, V, eps, fit, asz, exp, num, rows, x, P, beta,
                             alpha, eps0, nu, lam, delta_rls):
    m = rows.shape[0]
    d = x.shape[0]
    bad = 0
    num_sum = 0.0
    g = np.empty(d)
    xv = np.empty(d)
    for k in range(m):
        i = rows[k]
        num_sum += num[i]
        pred_before = 0.0
        for a in range(d):
            pred_before += W[i, a] * x[a]
        exp[i] += 1
        eps[i] += beta * (abs(P - pred_before) - eps[i])
        denom = lam
        for a in range(d):
            acc = 0.0
            for b in range(d):
                acc += V[i, a, b] * x[b]
            g[a] = acc
            denom += acc * x[a]
        resid = P - pred_before
        for a in range(d):
            g[a] /= denom
            W[i, a] += g[a] * resid
        for b in range(d):
            acc = 0.0
            for a in range(d):
                acc += x[a] * V[i, a, b]
            xv[b] = acc
        for a in range(d):
            for b in range(d):
                V[i, a, b] = (V[i, a, b] - g[a] * xv[b]) / lam
        for a in range(d):
            for b in range(a + 1, d):
                avg = 0.5 * (V[i, a, b] + V[i, b, a])
                V[i, a, b] = avg
                V[i, b, a] = avg
        finite = True
        for a in range(d):
            if not np.isfinite(W[i, a]):
                finite = False
        for a in range(d):
            for b in range(d):
                if not np.isfinite(V[i, a, b]):
                    finite = False
        if not finite:
            for a in range(d):
                if not np.isfinite(W[i, a]):
                    W[i, a] = 0.0
                for b in range(d):
                    V[i, a, b] = delta_rls if a == b else 0.0
            bad += 1
    denom_k = 0.0
    for k in range(m):
        i = rows[k]
        if eps[i] < eps0:
            kap = 1.0
        else:
            kap = alpha * (eps[i] / eps0) ** (-nu)
        denom_k += kap * num[i]
    for k in range(m):
        i = rows[k]
        if eps[i] < eps0:
            kap = 1.0
        else:
            kap = alpha * (eps[i] / eps0) ** (-nu)
        fit[i] += beta * (kap * num[i] / denom_k - fit[i])
        asz[i] += beta * (num_sum - asz[i])
    return bad


# ---------------------------------------------------------------------------
# accuracy (the inverse-power error-to-accuracy map)
# ---------------------------------------------------------------------------

def accuracy_vector_numpy(eps, alpha, eps0, nu):
    eps = np.asarray(eps, dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = np.where(eps < eps0, 1.0, alpha * (eps / eps0) ** (-nu))
    return out


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

match_mask_numba = None
update_scalar_set_numba = None
update_linear_set_numba = None

if USE_NUMBA:
    _match_jit = njit(cache=True)(_match_mask_loops)
    update_scalar_set_numba = njit(cache=True)(_update_scalar_set_loops)
    update_linear_set_numba = njit(cache=True)(_update_linear_set_loops)

    def match_mask_numba(lo, hi, s):  # noqa: F811 - deliberate rebind
        out = np.empty(lo.shape[0], dtype=np.bool_)
        _match_jit(lo, hi, s, out)
        return out

    match_mask = match_mask_numba
    update_scalar_set = update_scalar_set_numba
    update_linear_set = update_linear_set_numba
else:
    match_mask = match_mask_numpy
    update_scalar_set = update_scalar_set_numpy

    def update_linear_set(W, V, eps, fit, asz, exp, num, rows, x, P, beta,
                          alpha, eps0, nu, lam, delta_rls):
        return update_linear_set_numpy(W, V, eps, fit, asz, exp, num, rows, x,
                                       P, beta, alpha, eps0, nu, lam, delta_rls)

accuracy_vector = accuracy_vector_numpy
