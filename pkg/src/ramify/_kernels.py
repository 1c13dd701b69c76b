"""Hot loops for series arithmetic over F_{p^n}.

Coefficient arrays have shape (length, n): row k holds the F_p-coordinates of
the coefficient of s^k.  Two interchangeable backends exist:

* ``numba``: an @njit truncated convolution that fuses the reduction modulo the
  residue-field modulus;
* ``numpy``: float64 ``np.convolve`` per coordinate pair, exact while the
  accumulated magnitudes stay below 2**52.

The backend is chosen at import time by the environment variable
``RAMIFY_BACKEND`` (``numba`` or ``numpy``); the default is numba when it
imports.  ``set_backend`` switches at runtime (used by the benchmark and the
backend-agreement tests).
"""

from __future__ import annotations

import logging
import os

import numpy as np

try:
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_EXACT_FLOAT = 2**52

_backend = os.environ.get("RAMIFY_BACKEND", "numba" if HAVE_NUMBA else "numpy").lower()
if _backend not in ("numba", "numpy") or (_backend == "numba" and not HAVE_NUMBA):
    _backend = "numpy"


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


def _reduce_full(full: np.ndarray, p: int, red: np.ndarray) -> np.ndarray:
    """Fold columns n..2n-2 of a (L, 2n-1) product back into (L, n), mod p."""
    n = red.shape[1]
    out = full[:, :n] % p
    if full.shape[1] > n:
        out = (out + (full[:, n:] % p) @ red) % p
    return out


# ---------------------------------------------------------------- numpy path

def _mul_numpy(a: np.ndarray, b: np.ndarray, length: int, p: int, red: np.ndarray) -> np.ndarray:
    n = a.shape[1]
    a = a[:length]
    b = b[:length]
    bound = (p - 1) ** 2 * min(len(a), len(b)) * n
    if bound >= _EXACT_FLOAT:
        return _mul_int(a, b, length, p, red)
    full = np.zeros((length, 2 * n - 1), dtype=np.float64)
    af = a.astype(np.float64)
    bf = b.astype(np.float64)
    for i in range(n):
        ai = af[:, i]
        if not ai.any():
            continue
        for j in range(n):
            conv = np.convolve(ai, bf[:, j])[:length]
            full[: len(conv), i + j] += conv
    return _reduce_full(np.rint(full).astype(np.int64), p, red)


def _mul_int(a, b, length, p, red):
    n = a.shape[1]
    full = np.zeros((length, 2 * n - 1), dtype=object)
    for i in range(n):
        for j in range(n):
            conv = np.convolve(a[:, i].astype(object), b[:, j].astype(object))[:length]
            full[: len(conv), i + j] += conv
    return _reduce_full(full, p, red.astype(object)).astype(np.int64)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _conv_acc(a, b, length, p, out):  # pragma: no cover - compiled
        """out[:length] += (a * b)[:length], reducing mod p often enough to avoid overflow."""
        la = min(a.shape[0], length)
        lb = min(b.shape[0], length)
        flush = max(1, (2**62) // max(1, (p - 1) * (p - 1) * max(lb, 1)))
        for i in range(la):
            ai = a[i]
            if ai != 0:
                jmax = min(lb, length - i)
                for j in range(jmax):
                    out[i + j] += ai * b[j]
            if (i + 1) % flush == 0:
                for k in range(length):
                    out[k] %= p

    @numba.njit(cache=True)
    def _mul_kernel(a, b, length, p, red):  # pragma: no cover - compiled
        n = a.shape[1]
        at = np.ascontiguousarray(a.T)
        bt = np.ascontiguousarray(b.T)
        full = np.zeros((2 * n - 1, length), dtype=np.int64)
        for x in range(n):
            for y in range(n):
                _conv_acc(at[x], bt[y], length, p, full[x + y])
        out = np.zeros((length, n), dtype=np.int64)
        for z in range(n):
            for k in range(length):
                out[k, z] = full[z, k] % p
        for d in range(n, 2 * n - 1):
            for k in range(length):
                c = full[d, k] % p
                if c:
                    for z in range(n):
                        out[k, z] = (out[k, z] + c * red[d - n, z]) % p
        return out


def mul_trunc(a: np.ndarray, b: np.ndarray, length: int, p: int, red: np.ndarray) -> np.ndarray:
    """First ``length`` coefficients of the product of two coefficient arrays."""
    if length <= 0:
        return np.zeros((0, a.shape[1]), dtype=np.int64)
    if _backend == "numba":
        return _mul_kernel(np.ascontiguousarray(a), np.ascontiguousarray(b), length, p, red)
    return _mul_numpy(a, b, length, p, red)


def lincomb(coef: np.ndarray, series: np.ndarray, p: int, red: np.ndarray) -> np.ndarray:
    """out[k] = sum_r coef[k, r] * series[r] with F_q scalars.

    coef: (K, m, n), series: (m, L, n) -> (K, L, n).  A BLAS matmul per pair of
    coordinates; shared by both backends.
    """
    K, m, n = coef.shape
    L = series.shape[1]
    chunk = max(1, min(m, _EXACT_FLOAT // max(1, (p - 1) ** 2 * n)))
    full = np.zeros((K, L, 2 * n - 1), dtype=np.int64)
    for start in range(0, m, chunk):
        cs = coef[:, start : start + chunk].astype(np.float64)
        ss = series[start : start + chunk].astype(np.float64)
        for i in range(n):
            ci = cs[:, :, i]
            if not ci.any():
                continue
            for j in range(n):
                full[:, :, i + j] += np.rint(ci @ ss[:, :, j]).astype(np.int64) % p
    full = full.reshape(K * L, 2 * n - 1)
    return _reduce_full(full, p, red).reshape(K, L, n)
