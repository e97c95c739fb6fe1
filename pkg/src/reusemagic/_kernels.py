"""Bit-level kernels shared by Pauli strings, tableaus and the mixture simulator.

Generator rows are stored as ``uint8`` arrays ``x``, ``z`` of shape
``(..., rows, n)`` with a sign bit array ``r`` of shape ``(..., rows)``. A row
denotes ``(-1)**r`` times a tensor product of the letters I, X, Y, Z, where
``(x, z) = (1, 1)`` is the Hermitian Y.

Gate updates are column operations and stay in numpy for any leading batch
shape. Measurement touches O(n^2) bits per call and has a numba kernel plus
a numpy twin; :data:`USE_NUMBA` picks the one exported as :func:`measure` /
:func:`measure_batch`.
"""

import contextlib

import numpy as np

from ._accel import HAVE_NUMBA, njit

USE_NUMBA = HAVE_NUMBA

# outcome probability codes returned by the measurement kernels
PROB_ZERO, PROB_HALF, PROB_ONE = 0, 1, 2
PROB_VALUES = (0.0, 0.5, 1.0)


def zeros_tableau(n: int, batch: tuple = ()):
    """Zero ``x``, ``z``, ``r`` arrays for tableaus of shape ``batch + (2n, n)``.

    Each tableau is stored column-major: a gate touches one or two columns,
    which are then contiguous in memory.
    """
    shape = tuple(batch) + (n, 2 * n)
    x = np.swapaxes(np.zeros(shape, dtype=np.uint8), -1, -2)
    z = np.swapaxes(np.zeros(shape, dtype=np.uint8), -1, -2)
    return x, z, np.zeros(tuple(batch) + (2 * n,), dtype=np.uint8)


def as_column_major(a):
    """Copy of ``a`` with the last two axes laid out column-major (no-op if already)."""
    t = np.swapaxes(a, -1, -2)
    if t.flags.c_contiguous:
        return a
    return np.swapaxes(np.ascontiguousarray(t), -1, -2)


def g_phase(x1, z1, x2, z2):
    """Exponent of i picked up by ``P1 * P2`` per qubit (elementwise)."""
    x1 = np.asarray(x1, dtype=np.int64)
    z1 = np.asarray(z1, dtype=np.int64)
    x2 = np.asarray(x2, dtype=np.int64)
    z2 = np.asarray(z2, dtype=np.int64)
    return np.where(
        x1 & z1,
        z2 - x2,
        np.where(x1, z2 * (2 * x2 - 1), np.where(z1, x2 * (1 - 2 * z2), 0)),
    )


def apply_gate(x, z, r, kind, targets):
    """Conjugate every row by one Clifford gate, in place.

    ``kind`` is the text mnemonic (``"H"``, ``"CNOT"``, ...).
    """
    a = targets[0]
    xa = x[..., a]
    za = z[..., a]
    if kind == "H":
        r ^= xa & za
        tmp = xa.copy()
        x[..., a] = za
        z[..., a] = tmp
    elif kind == "S":
        r ^= xa & za
        z[..., a] ^= xa
    elif kind == "SDG":
        r ^= xa & (za ^ 1)
        z[..., a] ^= xa
    elif kind == "X":
        r ^= za
    elif kind == "Z":
        r ^= xa
    elif kind == "Y":
        r ^= xa ^ za
    elif kind == "SX":
        r ^= za & (xa ^ 1)
        x[..., a] ^= za
    elif kind == "SXDG":
        r ^= xa & za
        x[..., a] ^= za
    else:
        b = targets[1]
        xb = x[..., b]
        zb = z[..., b]
        if kind == "CNOT":
            r ^= xa & zb & (xb ^ za ^ 1)
            x[..., b] ^= xa
            z[..., a] ^= zb
        elif kind == "CZ":
            r ^= xa & xb & (za ^ zb)
            z[..., a] ^= xb
            z[..., b] ^= xa
        elif kind == "SWAP":
            tx = xa.copy()
            tz = za.copy()
            x[..., a] = xb
            z[..., a] = zb
            x[..., b] = tx
            z[..., b] = tz
        else:
            raise ValueError(f"unknown gate kind {kind!r}")


# -- measurement -------------------------------------------------------------
# measure(x, z, r, q, bit, force) -> (outcome, code) on one (2n, n) tableau.
# A random outcome takes ``bit``; a deterministic one is returned as is, unless
# ``force`` is set and it disagrees with ``bit``, in which case the arrays are
# left untouched and code PROB_ZERO is returned.
# peek_batch(x, z, r, q) -> per stacked tableau: -1 if random, else the outcome.


def _measure_np(x, z, r, q, bit, force):
    n = x.shape[1]
    hits = np.flatnonzero(x[n:, q])
    if hits.size:
        p = n + int(hits[0])
        rows = np.flatnonzero(x[:, q])
        rows = rows[(rows != p) & (rows != p - n)]
        if rows.size:
            ph = g_phase(x[p], z[p], x[rows], z[rows]).sum(axis=1)
            ph += 2 * r[rows].astype(np.int64) + 2 * int(r[p])
            r[rows] = (ph % 4) // 2
            x[rows] ^= x[p]
            z[rows] ^= z[p]
        x[p - n] = x[p]
        z[p - n] = z[p]
        r[p - n] = r[p]
        x[p] = 0
        z[p] = 0
        z[p, q] = 1
        r[p] = bit
        return bit, PROB_HALF
    outcome = _determined_np(x, z, r, q)
    if force and outcome != bit:
        return bit, PROB_ZERO
    return outcome, PROB_ONE


def _determined_np(x, z, r, q):
    n = x.shape[1]
    sx = np.zeros(n, dtype=np.uint8)
    sz = np.zeros(n, dtype=np.uint8)
    ph = 0
    for i in np.flatnonzero(x[:n, q]):
        h = n + int(i)
        ph += 2 * int(r[h]) + int(g_phase(x[h], z[h], sx, sz).sum())
        sx ^= x[h]
        sz ^= z[h]
    return (ph % 4) // 2


def _peek_batch_np(x, z, r, q):
    n = x.shape[2]
    out = np.full(x.shape[0], -1, dtype=np.int64)
    for k in range(x.shape[0]):
        if not x[k, n:, q].any():
            out[k] = _determined_np(x[k], z[k], r[k], q)
    return out


def _measure_batch_np(x, z, r, q, bit, force):
    k = x.shape[0]
    outcomes = np.empty(k, dtype=np.int64)
    codes = np.empty(k, dtype=np.int64)
    for i in range(k):
        outcomes[i], codes[i] = _measure_np(x[i], z[i], r[i], q, bit, force)
    return outcomes, codes


# -- numba measurement ------------------------------------------------------


@njit(cache=True)
def _g_nb(x1, z1, x2, z2):
    if x1 == 0 and z1 == 0:
        return 0
    if x1 == 1 and z1 == 1:
        return z2 - x2
    if x1 == 1:
        return z2 * (2 * x2 - 1)
    return x2 * (1 - 2 * z2)


@njit(cache=True)
def _measure_nb(x, z, r, q, bit, force):
    n = x.shape[1]
    p = -1
    for i in range(n, 2 * n):
        if x[i, q] != 0:
            p = i
            break
    if p >= 0:
        rows = np.empty(2 * n, dtype=np.int64)
        m = 0
        for i in range(2 * n):
            if i != p and i != p - n and x[i, q] != 0:
                rows[m] = i
                m += 1
        ph = np.empty(m, dtype=np.int64)
        for t in range(m):
            ph[t] = 2 * np.int64(r[rows[t]]) + 2 * np.int64(r[p])
        # column-outer so that column-major tableaus are walked contiguously
        for j in range(n):
            xp = np.int64(x[p, j])
            zp = np.int64(z[p, j])
            if xp == 0 and zp == 0:
                continue
            for t in range(m):
                i = rows[t]
                ph[t] += _g_nb(xp, zp, np.int64(x[i, j]), np.int64(z[i, j]))
                x[i, j] ^= xp
                z[i, j] ^= zp
        for t in range(m):
            r[rows[t]] = ((ph[t] % 4 + 4) % 4) // 2
        for j in range(n):
            x[p - n, j] = x[p, j]
            z[p - n, j] = z[p, j]
            x[p, j] = 0
            z[p, j] = 0
        r[p - n] = r[p]
        z[p, q] = 1
        r[p] = bit
        return bit, 1
    outcome = _determined_nb(x, z, r, q)
    if force and outcome != bit:
        return bit, 0
    return outcome, 2


@njit(cache=True)
def _determined_nb(x, z, r, q):
    n = x.shape[1]
    ph = 0
    for i in range(n):
        if x[i, q] != 0:
            ph += 2 * np.int64(r[i + n])
    # each column's contribution depends only on that column's running product
    for j in range(n):
        sx = np.int64(0)
        sz = np.int64(0)
        for i in range(n):
            if x[i, q] != 0:
                xh = np.int64(x[i + n, j])
                zh = np.int64(z[i + n, j])
                ph += _g_nb(xh, zh, sx, sz)
                sx ^= xh
                sz ^= zh
    return ((ph % 4 + 4) % 4) // 2


@njit(cache=True)
def _peek_batch_nb(x, z, r, q):
    n = x.shape[2]
    out = np.empty(x.shape[0], dtype=np.int64)
    for k in range(x.shape[0]):
        random = False
        for i in range(n, 2 * n):
            if x[k, i, q] != 0:
                random = True
                break
        if random:
            out[k] = -1
        else:
            out[k] = _determined_nb(x[k], z[k], r[k], q)
    return out


@njit(cache=True)
def _measure_batch_nb(x, z, r, q, bit, force):
    k = x.shape[0]
    outcomes = np.empty(k, dtype=np.int64)
    codes = np.empty(k, dtype=np.int64)
    for i in range(k):
        o, c = _measure_nb(x[i], z[i], r[i], q, bit, force)
        outcomes[i] = o
        codes[i] = c
    return outcomes, codes


NUMPY_KERNELS = {"measure": _measure_np, "measure_batch": _measure_batch_np, "peek_batch": _peek_batch_np}
NUMBA_KERNELS = {"measure": _measure_nb, "measure_batch": _measure_batch_nb, "peek_batch": _peek_batch_nb}



def set_backend(name: str) -> str:
    """Switch the exported measurement kernels; returns the previous backend name."""
    global measure, measure_batch, peek_batch, BACKEND
    table = {"numba": NUMBA_KERNELS, "numpy": NUMPY_KERNELS}[name]
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is unavailable or disabled")
    prev = BACKEND
    measure, measure_batch, peek_batch = table["measure"], table["measure_batch"], table["peek_batch"]
    BACKEND = name
    return prev


@contextlib.contextmanager
def backend(name: str):
    prev = set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


BACKEND = "numba" if USE_NUMBA else "numpy"
measure = measure_batch = peek_batch = None
set_backend(BACKEND)
