"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

The public wrappers at the bottom dispatch on ``_accel.USE_NUMBA``. Both
flavours are importable so tests and the benchmark can compare them directly.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit

# --- self-convolution -----------------------------------------------------


@njit
def _self_convolve_loops(a, h):
    n = a.shape[0]
    out = np.zeros(2 * n - 1)
    # row-by-row axpy: the inner loop is contiguous and vectorizes
    for i in range(n):
        ai = a[i]
        for j in range(n):
            out[i + j] += ai * a[j]
    return h * out


def _self_convolve_numpy(a, h):
    return h * np.convolve(a, a)


# --- literal double-integral oracle ---------------------------------------


@njit
def _literal_operator_loops(f, h):
    n = f.shape[0]
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for a in range(n):
            wa = 0.5 if (a == 0 or a == n - 1) else 1.0
            for b in range(n):
                k = a + b
                if k < i:
                    continue
                wb = 0.5 if (b == 0 or b == n - 1) else 1.0
                cut = 0.5 if k == i else 1.0
                if k == 0:
                    # removable limit of the kernel integrated along the cut line
                    acc += cut * f[0] * f[0] / h
                else:
                    acc += cut * wa * wb * f[a] * f[b] / (k * h)
        out[i] = h * h * acc
    return out


def _literal_operator_numpy(f, h):
    n = f.shape[0]
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    idx = np.arange(n)
    ksum = idx[:, None] + idx[None, :]
    wf = w * f
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.outer(wf, wf) / (ksum * h)
    kernel[0, 0] = 0.0
    out = np.empty(n)
    for i in range(n):
        cut = np.where(ksum > i, 1.0, np.where(ksum == i, 0.5, 0.0))
        acc = np.sum(cut * kernel)
        if i == 0:
            acc += 0.5 * f[0] * f[0] / h
        out[i] = h * h * acc
    return out


# --- pairwise wealth exchange ---------------------------------------------


@njit
def _exchange_pairs_loops(w, first, second, eps, quantum):
    inv_q = 1.0 / quantum
    for p in range(first.shape[0]):
        i = first[p]
        j = second[p]
        t = w[i] + w[j]
        a = np.floor(eps[p] * t * inv_q) * quantum
        w[i] = a
        w[j] = t - a


def _exchange_pairs_numpy(w, first, second, eps, quantum):
    t = w[first] + w[second]
    a = np.floor(eps * t * (1.0 / quantum)) * quantum
    w[first] = a
    w[second] = t - a


# --- dispatch ---------------------------------------------------------------


def self_convolve_direct(a: np.ndarray, h: float) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    if _accel.USE_NUMBA:
        return _self_convolve_loops(a, float(h))
    return _self_convolve_numpy(a, float(h))


def literal_operator(f: np.ndarray, h: float) -> np.ndarray:
    f = np.ascontiguousarray(f, dtype=np.float64)
    if _accel.USE_NUMBA:
        return _literal_operator_loops(f, float(h))
    return _literal_operator_numpy(f, float(h))


def exchange_pairs(w: np.ndarray, first: np.ndarray, second: np.ndarray, eps: np.ndarray, quantum: float) -> None:
    """Pool and split each pair in place; ``quantum`` must be a power of two."""
    if _accel.USE_NUMBA:
        _exchange_pairs_loops(w, first, second, eps, float(quantum))
    else:
        _exchange_pairs_numpy(w, first, second, eps, float(quantum))
