"""Exact evaluation of the postselected-teleportation decoding protocol.

Analytic engines work on a 7-qubit register ordered
``A, E, E', H1, H2, H1', H2'``: Alice's message wire, the returned
subsystem and its mirror (prepared in ``Phi+``), the two-qubit bath and its
purification. The decoder ``U^dagger`` acts on ``(H1, H2, E)`` and leaves
Bob's qubit on ``H1``; the encoder ``U`` then acts on ``(A, H2, E)`` and the
returned wire ``E`` is projected together with ``E'`` onto ``Phi+``.

* ``decode_analytic_pctc`` follows that order literally.
* ``decode_analytic_yk`` applies the decoder as ``U^*`` on the primed copies
  ``(H1', H2', E')`` instead, using ``(M x 1)|Phi+> = (1 x M^T)|Phi+>``.

``exact_conditional_distribution`` follows the 4-qubit laboratory circuit
with density matrices and validates the shot engine without sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import DegenerateOutcomeError
from .qcore import (
    CONSTRUCT_TOL,
    PAULI_STATES,
    DensityMatrix,
    StateVector,
    apply_to_axes,
    apply_unitary,
    bell_state,
    epr_state,
    fidelity_pure,
    is_unitary,
    project,
)
from .scramblers import MESSAGE_WIRE, decode_wires, encode_wires

D_A = 2
MIN_PROBABILITY = 1e-14
BOUND = 1.0 / D_A**2

ENGINES = ("analytic-pctc", "analytic-yk", "shots")


@dataclass(frozen=True)
class SubsystemLayout:
    """Map from protocol roles to register wires for one engine."""

    roles: dict
    n_wires: int

    def __post_init__(self):
        wires = [w for ws in self.roles.values() for w in ws]
        if sorted(wires) != list(range(self.n_wires)):
            raise ValueError(f"roles {self.roles} are not a bijection onto {self.n_wires} wires")

    def __getitem__(self, role):
        return list(self.roles[role])

    def wires(self, *roles):
        return [w for r in roles for w in self.roles[r]]


ANALYTIC_LAYOUT = SubsystemLayout(
    {"A": (0,), "E": (1,), "E'": (2,), "H": (3, 4), "H'": (5, 6)}, 7
)
# Laboratory register: the scrambler acts on wires 0-2, wire 3 is E'.
# Wire 0 starts as a bath qubit, becomes Bob's B and is then reused for A.
SHOT_LAYOUT = SubsystemLayout({"B": (0,), "H": (1,), "E": (2,), "E'": (3,)}, 4)


def analytic_wires():
    """``(decoder wires, encoder wires, Bob's wire)`` on the analytic register."""
    L = ANALYTIC_LAYOUT
    dec = decode_wires(L["E"][0], L["H"])
    enc = encode_wires(dec, L["A"][0])
    return dec, enc, dec[MESSAGE_WIRE]


def lab_wires():
    """Scrambler wires and the initial bath wires on the laboratory register."""
    L = SHOT_LAYOUT
    dec = decode_wires(L["E"][0], L.wires("B", "H"))
    return dec, L.wires("B", "H")


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    rho: DensityMatrix
    fidelity: float
    success_probability: float
    engine: str
    shot_stats: Optional[dict] = None
    rho_raw: Optional[DensityMatrix] = None
    fidelity_se: float = 0.0
    probability_se: float = 0.0

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")

    @property
    def product(self):
        return self.success_probability * self.fidelity


@dataclass(frozen=True)
class NoiseModel:
    """Stochastic Pauli noise after gates plus classical readout flips.

    ``readout_eps`` is either one probability for every wire or a
    per-wire sequence.
    """

    p1: float = 0.0
    p2: float = 0.0
    readout_eps: Union[float, Sequence[float]] = 0.0

    def __post_init__(self):
        eps = self.readout_eps
        if not np.isscalar(eps):
            eps = tuple(float(e) for e in eps)
            object.__setattr__(self, "readout_eps", eps)
        for p in (self.p1, self.p2, *np.atleast_1d(eps)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"noise probability {p} outside [0, 1]")

    def gate_error(self, arity):
        if arity == 1:
            return self.p1
        if arity == 2:
            return self.p2
        if self.p1 == 0 and self.p2 == 0:
            return 0.0
        raise ValueError(f"no gate-error rate defined for {arity}-qubit gates")

    def readout(self, wire):
        if np.isscalar(self.readout_eps):
            return float(self.readout_eps)
        return self.readout_eps[wire]

    @property
    def is_zero(self):
        return self.p1 == 0 and self.p2 == 0 and not np.any(self.readout_eps)

    @classmethod
    def uniform(cls, p):
        """Same probability for 1-qubit gates, 2-qubit gates and readout."""
        return cls(p, p, p)

    def to_dict(self):
        eps = self.readout_eps
        return {"p1": self.p1, "p2": self.p2, "readout_eps": eps if np.isscalar(eps) else list(eps)}

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {"p1", "p2", "readout_eps"}
        if unknown:
            raise ValueError(f"unknown noise keys {sorted(unknown)}")
        return cls(float(d.get("p1", 0.0)), float(d.get("p2", 0.0)), d.get("readout_eps", 0.0))


# ---------------------------------------------------------------------------
# analytic engines


def _initial_state(phi):
    """``|phi>_A |Phi+>_{EE'} |Phi+>_{HH'}`` on the analytic register."""
    return phi.tensor(bell_state()).tensor(epr_state(2))


def _check_message(psi):
    if psi.n_qubits != 1 or not psi.is_normalized():
        raise ValueError("message must be a normalized single-qubit state")


def _postselect_return(state):
    L = ANALYTIC_LAYOUT
    f, _ = project(state, L.wires("E", "E'"), bell_state())
    return f


def final_state_pctc(psi, u):
    """Unnormalized final state on ``(A, H1, H2, H1', H2')``; Bob holds ``H1``."""
    _check_message(psi)
    dec, enc, _ = analytic_wires()
    state = _initial_state(psi)
    state = apply_unitary(state, u.dagger, dec)
    state = apply_unitary(state, u.matrix, enc)
    return _postselect_return(state)


def final_state_yk(psi, u):
    """Same state as :func:`final_state_pctc` with the decoder moved to the primed side."""
    _check_message(psi)
    L = ANALYTIC_LAYOUT
    dec, enc, _ = analytic_wires()
    mirror = dict(zip(L.wires("E", "H"), L.wires("E'", "H'")))
    state = _initial_state(psi)
    state = apply_unitary(state, u.matrix.conj(), [mirror[w] for w in dec])
    state = apply_unitary(state, u.matrix, enc)
    return _postselect_return(state)


def success_probability(psi, u):
    return final_state_pctc(psi, u).norm2


def _bob_index():
    L = ANALYTIC_LAYOUT
    kept = [w for w in range(L.n_wires) if w not in L.wires("E", "E'")]
    return kept.index(analytic_wires()[2])


def _result_from_final(psi, f, engine):
    p = f.norm2
    if p < MIN_PROBABILITY:
        raise DegenerateOutcomeError(f"postselection probability {p:.3e} is numerically zero")
    t = np.moveaxis(f.amplitudes.reshape((2,) * f.n_qubits), _bob_index(), 0).reshape(2, -1)
    rho = t @ t.conj().T / p
    rho = DensityMatrix(0.5 * (rho + rho.conj().T))
    return ProtocolResult(rho, fidelity_pure(psi, rho), float(p), engine)


def decode_analytic_pctc(psi, u):
    return _result_from_final(psi, final_state_pctc(psi, u), "analytic-pctc")


def decode_analytic_yk(psi, u):
    return _result_from_final(psi, final_state_yk(psi, u), "analytic-yk")


def bound_check(psi, u):
    """Return ``(P, F, P*F)``; the product never falls below ``1/d_A^2``."""
    r = decode_analytic_pctc(psi, u)
    return r.success_probability, r.fidelity, r.product


# ---------------------------------------------------------------------------
# exact laboratory pipeline (density matrices)


def pauli_eigenbasis(axis):
    """``(|+>, |->)`` eigenvectors of the Pauli ``axis``."""
    p, m = {"X": ("x+", "x-"), "Y": ("y+", "y-"), "Z": ("z+", "z-")}[axis]
    return PAULI_STATES[p], PAULI_STATES[m]


def _conjugate(rho, op, wires, n):
    """``op rho op^dagger`` with ``op`` acting on ``wires`` of an n-qubit operator."""
    t = rho.reshape((2,) * (2 * n))
    t = apply_to_axes(t, op, wires)
    t = apply_to_axes(t, np.asarray(op).conj(), [n + w for w in wires])
    return t.reshape(rho.shape)


def _replace_wire(rho, wire, new_state, n):
    """Discard ``wire`` and re-prepare it in ``new_state`` (reset + prepare channel)."""
    t = rho.reshape((2,) * (2 * n))
    reduced = np.trace(t, axis1=wire, axis2=n + wire)
    reduced = np.expand_dims(np.expand_dims(reduced, wire), n + wire)
    local = np.outer(new_state.amplitudes, new_state.amplitudes.conj())
    shape = [1] * (2 * n)
    shape[wire], shape[n + wire] = 2, 2
    return (reduced * local.reshape(shape)).reshape(rho.shape)


def _lab_initial_density():
    """Bath wires uniformly mixed over basis states, ``Phi+`` on ``(E, E')``."""
    L = SHOT_LAYOUT
    n = L.n_wires
    _, bath = lab_wires()
    pair = L.wires("E", "E'")
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    for bits in range(4):
        t = np.zeros((2,) * n, dtype=complex)
        idx = [0] * n
        idx[bath[0]], idx[bath[1]] = bits >> 1, bits & 1
        for k in (0, 1):
            idx[pair[0]] = idx[pair[1]] = k
            t[tuple(idx)] = 1 / np.sqrt(2)
        v = t.reshape(-1)
        rho += 0.25 * np.outer(v, v.conj())
    return rho


def exact_conditional_distribution(psi, u, basis):
    """Exact outcome statistics of one tomography basis of the laboratory circuit.

    Returns ``(p_joint, p_postselect)`` where ``p_joint[o]`` is the probability
    that the mid-circuit measurement of B gives ``o`` (``"+"`` or ``"-"``) and
    the final Bell measurement gives ``Phi+``.
    """
    _check_message(psi)
    L = SHOT_LAYOUT
    n = L.n_wires
    b = L["B"][0]
    scr, _ = lab_wires()
    rho = _conjugate(_lab_initial_density(), u.dagger, scr, n)

    bell = bell_state().amplitudes
    bell_proj = np.outer(bell, bell.conj())
    p_joint = {}
    for label, vec in zip(("+", "-"), pauli_eigenbasis(basis)):
        proj = np.outer(vec.amplitudes, vec.amplitudes.conj())
        branch = _conjugate(rho, proj, [b], n)
        branch = _replace_wire(branch, b, psi, n)
        branch = _conjugate(branch, u.matrix, scr, n)
        kept = _conjugate(branch, bell_proj, L.wires("E", "E'"), n)
        p_joint[label] = float(np.trace(kept).real)
    return p_joint, p_joint["+"] + p_joint["-"]


# ---------------------------------------------------------------------------
# forward / inverse protocol states (overlap form of the OTOC)


def otoc_reference_state(phi0=None):
    """``|phi0>_A |Phi+>_{EE'} |Phi+>_{HH'}``, ``phi0`` defaulting to ``|0>``."""
    return _initial_state(StateVector.basis("0") if phi0 is None else phi0)


def _check_local(w, v):
    for name, m in (("w", w), ("v", v)):
        if np.shape(m) != (2, 2) or not is_unitary(m, CONSTRUCT_TOL):
            raise ValueError(f"{name} must be a single-qubit unitary")


def forward_state(phi0, u, w, v):
    """Standard run with a kick: ``V`` on A, encode, ``W`` on E, decode.

    Equals ``W_A(t) V_A |ref>`` with ``W_A(t) = U^dagger W_E U`` on the
    encoder wires ``(A, H2, E)``.
    """
    _check_local(w, v)
    L = ANALYTIC_LAYOUT
    _, enc, _ = analytic_wires()
    state = otoc_reference_state(phi0)
    state = apply_unitary(state, v, L["A"])
    state = apply_unitary(state, u.matrix, enc)
    state = apply_unitary(state, w, L["E"])
    return apply_unitary(state, u.dagger, enc)


def inverse_state(phi0, u, w, v):
    """Time-reversed run: encode on the decoder wires, kick E with ``W``, decode, then ``V``.

    Equals ``V_A W_B(t) |ref>`` with ``W_B(t) = U^dagger W_E U`` on the
    decoder wires ``(H1, H2, E)``.
    """
    _check_local(w, v)
    L = ANALYTIC_LAYOUT
    dec, _, _ = analytic_wires()
    state = otoc_reference_state(phi0)
    state = apply_unitary(state, u.matrix, dec)
    state = apply_unitary(state, w, L["E"])
    state = apply_unitary(state, u.dagger, dec)
    return apply_unitary(state, v, L["A"])
