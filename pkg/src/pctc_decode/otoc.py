"""Out-of-time-order correlators of the three-qubit scramblers.

All correlators are evaluated in the reference state
``|phi0>_A |Phi+>_{EE'} |Phi+>_{HH'}`` of the analytic register, with

    O(W, V) = < W_B(t)^dagger  V_A^dagger  W_A(t)  V_A >,

where ``W_A(t) = U^dagger W_E U`` conjugates by the encoder (wires
``A, H2, E``) and ``W_B(t)`` by the decoder (wires ``H1, H2, E``). Averaged
over independent Haar ``W`` and ``V`` this equals the mean postselection
probability of the decoding protocol.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .protocol import (
    ANALYTIC_LAYOUT,
    analytic_wires,
    forward_state,
    inverse_state,
    otoc_reference_state,
    success_probability,
)
from .qcore import (
    CONSTRUCT_TOL,
    PAULI_STATES,
    PAULIS,
    StateVector,
    embed,
    is_unitary,
)
from .scramblers import haar_random_unitaries, haar_random_unitary

METHODS = ("exact-basis-average", "haar-sampled", "design-average", "overlap-form", "direct-eq9")


@dataclass(frozen=True)
class OtocReport:
    value: complex
    method: str
    sample_count: Optional[int] = None
    stderr: Optional[float] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown OTOC method {self.method!r}")


def _check_unitary(name, m):
    if np.shape(m) != (2, 2) or not is_unitary(m, CONSTRUCT_TOL):
        raise ValueError(f"{name} must be a single-qubit unitary")


@lru_cache(maxsize=32)
def _embedded(u):
    n = ANALYTIC_LAYOUT.n_wires
    dec, enc, _ = analytic_wires()
    return embed(u.matrix, enc, n), embed(u.matrix, dec, n)


def otoc_value(u, w, v, phi0=None):
    """``O(W, V)`` for one pair of single-qubit unitaries (dense 128-dim matrices)."""
    _check_unitary("w", w)
    _check_unitary("v", v)
    L = ANALYTIC_LAYOUT
    n = L.n_wires
    u_enc, u_dec = _embedded(u)
    w_e = embed(w, L["E"], n)
    v_a = embed(v, L["A"], n)
    ref = otoc_reference_state(phi0).amplitudes
    # <ref|W_B^+ V^+ W_A V|ref> = <V W_B ref | W_A V ref>
    right = u_enc.conj().T @ (w_e @ (u_enc @ (v_a @ ref)))
    left = v_a @ (u_dec.conj().T @ (w_e @ (u_dec @ ref)))
    return complex(np.vdot(left, right))


def otoc_overlap(u, w, v, phi0=None):
    """``O(W, V)`` as the overlap of the inverse and forward protocol states."""
    _check_unitary("w", w)
    _check_unitary("v", v)
    return inverse_state(phi0, u, w, v).inner(forward_state(phi0, u, w, v))


def otoc_average_exact(u):
    """Haar-averaged OTOC via the mean success probability.

    P(psi) is a quadratic form <psi|M|psi>, so its average over the sphere
    is Tr(M)/2, i.e. the mean over any orthonormal basis.
    """
    p0 = success_probability(StateVector.basis("0"), u)
    p1 = success_probability(StateVector.basis("1"), u)
    return 0.5 * (p0 + p1)


def state_design_average(u):
    """Mean success probability over the six Pauli eigenstates."""
    return float(np.mean([success_probability(s, u) for s in PAULI_STATES.values()]))


def _draw_rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def otoc_average_sampled(u, n, rng, phi0=None):
    """Monte Carlo mean of ``O(W, V)`` over independent Haar draws of ``W`` and ``V``.

    Each draw uses its own child stream spawned from ``rng``.
    """
    if n < 2:
        raise ValueError("need at least two samples for a standard error")
    children = _draw_rng(rng).spawn(n)
    vals = np.empty(n, dtype=complex)
    for i, child in enumerate(children):
        w = haar_random_unitary(2, child)
        v = haar_random_unitary(2, child)
        vals[i] = otoc_value(u, w, v, phi0)
    mean = vals.mean()
    se = float(vals.real.std(ddof=1) / np.sqrt(n))
    return OtocReport(complex(mean), "haar-sampled", n, se)


def twirl_projector(dim=2, ensemble="pauli-group", n=None, rng=None):
    """Average of ``W (x) W^*`` over an ensemble of unitaries.

    ``ensemble`` is ``"pauli-group"`` (dim 2 only), ``"haar-sampled"`` (needs
    ``n``), or an explicit sequence of matrices.
    """
    if isinstance(ensemble, str):
        if ensemble == "pauli-group":
            if dim != 2:
                raise ValueError("the Pauli twirl is defined here for dim = 2")
            mats = list(PAULIS.values())
        elif ensemble == "haar-sampled":
            if not n:
                raise ValueError("haar-sampled twirl needs a sample count n")
            mats = haar_random_unitaries(dim, n, _draw_rng(rng))
            return np.einsum("nij,nkl->ikjl", mats, mats.conj()).reshape(dim * dim, dim * dim) / n
        else:
            raise ValueError(f"unknown ensemble {ensemble!r}")
    else:
        mats = list(ensemble)
    total = np.zeros((dim * dim, dim * dim), dtype=complex)
    count = 0
    for m in mats:
        total += np.kron(m, np.conj(m))
        count += 1
    return total / count
