"""Hot numeric kernels: numba-compiled fast path, pure-numpy fallback.

The backend is chosen once at import time from the environment variable
``SPDCALC_NUMBA``: any of ``0/off/false/no`` selects the numpy fallback,
everything else (including unset) selects numba when it is importable.
Both implementations of every kernel stay importable so the test suite and
``benchmarks/bench_kernels.py`` can compare them directly.
"""

import os

import numpy as np

_FLAG = os.environ.get("SPDCALC_NUMBA", "auto").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "off", "false", "no")

if _WANT_NUMBA:
    try:
        from numba import njit

        NUMBA_AVAILABLE = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_AVAILABLE = False
else:
    NUMBA_AVAILABLE = False


def backend_name() -> str:
    """Name of the active kernel backend, "numba" or "numpy"."""
    return "numba" if NUMBA_AVAILABLE else "numpy"


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver sweeps.
#
# Rotates (p, q) pairs in a fixed row-major order until the off-diagonal
# Frobenius norm drops below tol_off.  `a` is overwritten with the nearly
# diagonal matrix; the accumulated rotations are returned together with the
# final off-diagonal residual and the number of full sweeps used.
# ---------------------------------------------------------------------------


def _jacobi_cycle_loops(a, tol_off, max_sweeps):
    d = a.shape[0]
    v = np.eye(d)
    off = 0.0
    for i in range(d):
        for j in range(i + 1, d):
            off += 2.0 * a[i, j] * a[i, j]
    off = np.sqrt(off)
    sweeps = 0
    while off > tol_off and sweeps < max_sweeps:
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for i in range(d):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[i, q] = s * aip + c * aiq
                for i in range(d):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * aqi
                    a[q, i] = s * api + c * aqi
                for i in range(d):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = s * vip + c * viq
        sweeps += 1
        off = 0.0
        for i in range(d):
            for j in range(i + 1, d):
                off += 2.0 * a[i, j] * a[i, j]
        off = np.sqrt(off)
    return v, off, sweeps


def _jacobi_cycle_numpy(a, tol_off, max_sweeps):
    d = a.shape[0]
    v = np.eye(d)

    def offnorm():
        return np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))

    off = offnorm()
    sweeps = 0
    while off > tol_off and sweeps < max_sweeps:
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) if tau != 0.0 else 1.0
                t /= abs(tau) + np.sqrt(1.0 + tau * tau)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = c * a[:, p] - s * a[:, q]
                col_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = col_p, col_q
                row_p = c * a[p, :] - s * a[q, :]
                row_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = row_p, row_q
                v_p = c * v[:, p] - s * v[:, q]
                v_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = v_p, v_q
        sweeps += 1
        off = offnorm()
    return v, off, sweeps


# ---------------------------------------------------------------------------
# Quadrature accumulation kernels.  All of them work in the eigenbasis of the
# SPD matrix involved, so the per-node work is elementwise in log-eigenvalue
# space: for log-eigenvalues e and node coefficients u_k, v_k the weight
# matrix is W_ij = sum_k w_k exp(u_k e_i + v_k e_j).
# ---------------------------------------------------------------------------


def _pair_power_weights_loops(e, u, v, w):
    d = e.shape[0]
    n = u.shape[0]
    out = np.zeros((d, d))
    for k in range(n):
        lcol = np.exp(u[k] * e)
        rrow = np.exp(v[k] * e)
        for i in range(d):
            wli = w[k] * lcol[i]
            for j in range(d):
                out[i, j] += wli * rrow[j]
    return out


def _pair_power_weights_numpy(e, u, v, w):
    left = np.exp(e[:, None] * u[None, :])
    right = np.exp(e[:, None] * v[None, :])
    return (left * w[None, :]) @ right.T


# Double-quadrature curvature sum: for log-eigenvalues e, squared commutator
# coordinates n2 (in the eigenbasis), nodes s, weights w and shift x, returns
#   sum_{k,l} w_k w_l (s_k - s_l)^2 sum_{i,j} n2_ij exp((e_i - e_j) x_kl)
# with x_kl = s_k + s_l + (s_k - s_l) x.


def _curvature_double_sum_loops(e, n2, s, w, x):
    d = e.shape[0]
    n = s.shape[0]
    total = 0.0
    for k in range(n):
        for l in range(n):
            ds = s[k] - s[l]
            if ds == 0.0:
                continue
            coeff = w[k] * w[l] * ds * ds
            xst = s[k] + s[l] + ds * x
            acc = 0.0
            for i in range(d):
                for j in range(d):
                    acc += n2[i, j] * np.exp((e[i] - e[j]) * xst)
            total += coeff * acc
    return total


def _curvature_double_sum_numpy(e, n2, s, w, x):
    ds = s[:, None] - s[None, :]
    xst = s[:, None] + s[None, :] + ds * x
    coeff = (w[:, None] * w[None, :]) * ds * ds
    gaps = e[:, None] - e[None, :]
    t = np.exp(xst.reshape(-1, 1) * gaps.reshape(1, -1))
    return float(coeff.ravel() @ t @ n2.ravel())


# ---------------------------------------------------------------------------
# Resolvent quadrature kernels.  m(s) = (1 - s) I + s A is SPD whenever A is,
# so the solves below cannot encounter a singular system for valid input.
# ---------------------------------------------------------------------------


def _log_resolvent_sum_loops(a, s, w):
    d = a.shape[0]
    eye = np.eye(d)
    rhs = a - eye
    out = np.zeros((d, d))
    for k in range(s.shape[0]):
        m = (1.0 - s[k]) * eye + s[k] * a
        out += w[k] * np.linalg.solve(m, rhs)
    return out


def _log_resolvent_sum_numpy(a, s, w):
    d = a.shape[0]
    eye = np.eye(d)
    rhs = a - eye
    ms = (1.0 - s)[:, None, None] * eye + s[:, None, None] * a
    sols = np.linalg.solve(ms, np.broadcast_to(rhs, ms.shape).copy())
    return np.tensordot(w, sols, axes=1)


def _dlog_resolvent_sum_loops(a, h, s, w):
    d = a.shape[0]
    eye = np.eye(d)
    out = np.zeros((d, d))
    for k in range(s.shape[0]):
        m = (1.0 - s[k]) * eye + s[k] * a
        y = np.linalg.solve(m, h)
        z = np.linalg.solve(m, np.ascontiguousarray(y.T)).T
        out += w[k] * z
    return out


def _dlog_resolvent_sum_numpy(a, h, s, w):
    d = a.shape[0]
    eye = np.eye(d)
    ms = (1.0 - s)[:, None, None] * eye + s[:, None, None] * a
    y = np.linalg.solve(ms, np.broadcast_to(h, ms.shape).copy())
    z = np.linalg.solve(ms, np.ascontiguousarray(np.transpose(y, (0, 2, 1))))
    return np.tensordot(w, np.transpose(z, (0, 2, 1)), axes=1)


if NUMBA_AVAILABLE:
    _nb = njit(cache=True)
    jacobi_cycle = _nb(_jacobi_cycle_loops)
    pair_power_weights = _nb(_pair_power_weights_loops)
    curvature_double_sum = _nb(_curvature_double_sum_loops)
    log_resolvent_sum = _nb(_log_resolvent_sum_loops)
    dlog_resolvent_sum = _nb(_dlog_resolvent_sum_loops)
else:
    jacobi_cycle = _jacobi_cycle_numpy
    pair_power_weights = _pair_power_weights_numpy
    curvature_double_sum = _curvature_double_sum_numpy
    log_resolvent_sum = _log_resolvent_sum_numpy
    dlog_resolvent_sum = _dlog_resolvent_sum_numpy


def kernel_pairs():
    """(name, numba-source impl, numpy impl) triples for tests and benchmarks.

    The first element of each pair is the plain-python loop source that the
    numba path compiles; calling it uncompiled is valid (just slow).
    """
    return [
        ("jacobi_cycle", _jacobi_cycle_loops, _jacobi_cycle_numpy),
        ("pair_power_weights", _pair_power_weights_loops, _pair_power_weights_numpy),
        ("curvature_double_sum", _curvature_double_sum_loops, _curvature_double_sum_numpy),
        ("log_resolvent_sum", _log_resolvent_sum_loops, _log_resolvent_sum_numpy),
        ("dlog_resolvent_sum", _dlog_resolvent_sum_loops, _dlog_resolvent_sum_numpy),
    ]
