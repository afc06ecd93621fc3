"""Slow, independent reference implementations used only by the tests.

Nothing here reuses the tensor-contraction kernel of the package: matrices
are assembled entry by entry and traces are explicit index sums.
"""

import itertools

import numpy as np


def bits_of(i, n):
    return [(i >> (n - 1 - k)) & 1 for k in range(n)]


def index_of(bits):
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def naive_embed(u, targets, n):
    """Entry-by-entry embedding of ``u`` on ``targets`` (big-endian wires)."""
    d = 1 << n
    k = len(targets)
    m = np.zeros((d, d), dtype=complex)
    for col in range(d):
        cb = bits_of(col, n)
        c_sub = index_of([cb[t] for t in targets])
        for r_sub in range(1 << k):
            rb = list(cb)
            for t, b in zip(targets, bits_of(r_sub, k)):
                rb[t] = b
            m[index_of(rb), col] += u[r_sub, c_sub]
    return m


def naive_partial_trace(rho, keep, n):
    """Reduced density matrix on ``keep`` by summing over the other indices."""
    drop = [w for w in range(n) if w not in keep]
    dk = 1 << len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    for a, b in itertools.product(range(dk), repeat=2):
        ab, bb = bits_of(a, len(keep)), bits_of(b, len(keep))
        s = 0j
        for j in range(1 << len(drop)):
            jb = bits_of(j, len(drop))
            row, col = [0] * n, [0] * n
            for w, x in zip(keep, ab):
                row[w] = x
            for w, x in zip(keep, bb):
                col[w] = x
            for w, x in zip(drop, jb):
                row[w] = col[w] = x
            s += rho[index_of(row), index_of(col)]
        out[a, b] = s
    return out


PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)

# analytic register: A, E, E', H1, H2, H1', H2'
N7 = 7
DEC = [3, 4, 1]
ENC = [0, 4, 1]
BOB = 3


def reference_state(phi):
    """phi_A x Phi+_{E E'} x Phi+_{H H'} with H=(3,4), H'=(5,6), built by index assignment."""
    v = np.zeros(1 << N7, dtype=complex)
    for a, e, h1, h2 in itertools.product(range(2), repeat=4):
        v[index_of([a, e, e, h1, h2, h1, h2])] = phi[a] * 0.5 / np.sqrt(2)
    return v


def brute_force_decode(psi, u):
    """``(P, rho_Bob)`` from explicit 128x128 matrices and a Bell projector."""
    full = naive_embed(u, ENC, N7) @ naive_embed(u.conj().T, DEC, N7)
    out = full @ reference_state(psi)
    proj = naive_embed(np.outer(PHI_PLUS, PHI_PLUS.conj()), [1, 2], N7)
    kept = proj @ out
    p = float(np.vdot(kept, kept).real)
    rho = naive_partial_trace(np.outer(kept, kept.conj()), [BOB], N7) / p
    return p, rho


def brute_force_otoc(u, w, v, phi=(1, 0)):
    """``<ref| W_B(t)^+ V_A^+ W_A(t) V_A |ref>`` with every operator as a full matrix."""
    phi = np.asarray(phi, dtype=complex)
    ue, ud = naive_embed(u, ENC, N7), naive_embed(u, DEC, N7)
    we, va = naive_embed(w, [1], N7), naive_embed(v, [0], N7)
    wa = ue.conj().T @ we @ ue
    wb = ud.conj().T @ we @ ud
    ref = reference_state(phi)
    return complex(ref.conj() @ wb.conj().T @ va.conj().T @ wa @ va @ ref)


def naive_twirl(mats):
    acc = np.zeros((4, 4), dtype=complex)
    for m in mats:
        for i, j, k, l in itertools.product(range(2), repeat=4):
            acc[2 * i + k, 2 * j + l] += m[i, j] * np.conj(m[k, l])
    return acc / len(mats)
