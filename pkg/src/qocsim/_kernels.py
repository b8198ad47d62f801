"""Numba-compiled whole-circuit runners for the emulator backends.

Circuits arrive packed as flat arrays (gate codes, qubit indices and 2x2
unitary entries); the runners mutate the state buffer in place.  The numpy
implementations in :mod:`qocsim.circuit` stay the readable reference and the
fallback when numba is unavailable.
"""
from __future__ import annotations

import numpy as np
from numba import njit

CODE_X = 0
CODE_H = 1
CODE_S = 2
CODE_SDG = 3
CODE_RZ = 4
CODE_RX = 5
CODE_RY = 6
CODE_PHASE = 7
CODE_CNOT = 8

DIAG_CODES = (CODE_S, CODE_SDG, CODE_RZ, CODE_PHASE)


@njit(cache=True)
def _gate_1q(flat, u00, u01, u10, u11, q, n):
    dim = 1 << n
    step = 1 << q
    for base in range(0, dim, step << 1):
        for off in range(base, base + step):
            i1 = off + step
            a0 = flat[off]
            a1 = flat[i1]
            flat[off] = u00 * a0 + u01 * a1
            flat[i1] = u10 * a0 + u11 * a1


@njit(cache=True)
def _gate_diag(flat, d0, d1, q, n):
    dim = 1 << n
    step = 1 << q
    for base in range(0, dim, step << 1):
        for off in range(base, base + step):
            flat[off] = d0 * flat[off]
            flat[off + step] = d1 * flat[off + step]


@njit(cache=True)
def _gate_x(flat, q, n):
    dim = 1 << n
    step = 1 << q
    for base in range(0, dim, step << 1):
        for off in range(base, base + step):
            i1 = off + step
            tmp = flat[off]
            flat[off] = flat[i1]
            flat[i1] = tmp


@njit(cache=True)
def _gate_cnot(flat, c, t, n):
    dim = 1 << n
    cb = 1 << c
    tb = 1 << t
    for i in range(dim):
        if (i & cb) != 0 and (i & tb) == 0:
            j = i | tb
            tmp = flat[i]
            flat[i] = flat[j]
            flat[j] = tmp


@njit(cache=True)
def _dispatch(flat, code, q0, q1, u00, u01, u10, u11, n):
    if code == CODE_CNOT:
        _gate_cnot(flat, q0, q1, n)
    elif code == CODE_X:
        _gate_x(flat, q0, n)
    elif code == CODE_S or code == CODE_SDG or code == CODE_RZ or code == CODE_PHASE:
        _gate_diag(flat, u00, u11, q0, n)
    else:
        _gate_1q(flat, u00, u01, u10, u11, q0, n)


@njit(cache=True)
def run_statevector(flat, n, codes, q0s, q1s, u):
    for i in range(len(codes)):
        _dispatch(flat, codes[i], q0s[i], q1s[i], u[i, 0], u[i, 1], u[i, 2], u[i, 3], n)


@njit(cache=True)
def _rho_bitflip(flat, p, q, n):
    """rho -> (1-p) rho + p X rho X on qubit q, flattened 2n-bit indexing."""
    mask = (1 << (n + q)) | (1 << q)
    dim2 = 1 << (2 * n)
    keep = 1.0 - p
    for i in range(dim2):
        j = i ^ mask
        if i < j:
            a = flat[i]
            b = flat[j]
            flat[i] = keep * a + p * b
            flat[j] = keep * b + p * a


@njit(cache=True)
def _rho_depolarize(flat, p, q, n):
    """rho -> (1-p) rho + p (I_q/2 tensor Tr_q rho), flattened indexing."""
    kb = 1 << (n + q)
    bb = 1 << q
    dim2 = 1 << (2 * n)
    keep = 1.0 - p
    for i in range(dim2):
        if (i & kb) == 0 and (i & bb) == 0:
            i11 = i | kb | bb
            half_tr = 0.5 * p * (flat[i] + flat[i11])
            flat[i] = keep * flat[i] + half_tr
            flat[i11] = keep * flat[i11] + half_tr
            flat[i | bb] = keep * flat[i | bb]
            flat[i | kb] = keep * flat[i | kb]


@njit(cache=True)
def run_density(flat, n, codes, q0s, q1s, u, p_bf_1q, p_bf_2q, p_dep_1q, p_dep_2q):
    n2 = 2 * n
    for i in range(len(codes)):
        code = codes[i]
        q0 = q0s[i]
        q1 = q1s[i]
        u00, u01, u10, u11 = u[i, 0], u[i, 1], u[i, 2], u[i, 3]
        # ket side at bits n..2n-1, bra side (conjugated) at bits 0..n-1
        if code == CODE_CNOT:
            _gate_cnot(flat, n + q0, n + q1, n2)
            _gate_cnot(flat, q0, q1, n2)
            p_bf, p_dep = p_bf_2q, p_dep_2q
        else:
            _dispatch(flat, code, n + q0, q1, u00, u01, u10, u11, n2)
            _dispatch(flat, code, q0, q1, np.conj(u00), np.conj(u01), np.conj(u10), np.conj(u11), n2)
            p_bf, p_dep = p_bf_1q, p_dep_1q
        if p_bf > 0.0:
            _rho_bitflip(flat, p_bf, q0, n)
            if code == CODE_CNOT:
                _rho_bitflip(flat, p_bf, q1, n)
        if p_dep > 0.0:
            _rho_depolarize(flat, p_dep, q0, n)
            if code == CODE_CNOT:
                _rho_depolarize(flat, p_dep, q1, n)
