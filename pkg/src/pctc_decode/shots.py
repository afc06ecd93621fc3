"""Shot-by-shot emulation of the four-qubit laboratory circuit.

Shots are simulated as a batch of state vectors. Every shot owns a fixed
block of uniform variates taken from a counter-based stream keyed by
``(seed, basis)``; shot ``k`` always reads block ``k``. Results therefore
do not depend on how shots are split across worker threads.

Per-shot randomness, in instruction order:

* 2 variates choose the classical bath preparation,
* every gate uses 2 (does an error fire, which Pauli),
* a Pauli measurement uses 2 (outcome, readout flip),
* a reset uses 1,
* a Bell postselection uses 7 (two basis-change gates, outcome, two flips).

The same variates are consumed whether or not noise is switched on, so a
zero-noise model reproduces the noiseless run bit for bit.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from .exceptions import InsufficientStatisticsError
from .protocol import SHOT_LAYOUT, NoiseModel, ProtocolResult, lab_wires, pauli_eigenbasis
from .qcore import (
    PAULIS,
    Circuit,
    Gate,
    MeasurePauli,
    PostselectBell,
    PrepareState,
    Reset,
    apply_to_axes,
)
from .tomography import BASES, TomographyDataset, estimate, make_physical, reconstruct_linear


def _kron_all(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def _pauli_strings(k):
    return [
        _kron_all([PAULIS[c] for c in s])
        for s in itertools.product("IXYZ", repeat=k)
        if s != ("I",) * k
    ]


_NONTRIVIAL_PAULIS = {1: _pauli_strings(1), 2: _pauli_strings(2)}

_DRAWS = {Gate: 2, MeasurePauli: 2, Reset: 1, PrepareState: 0, PostselectBell: 7}
_BATH_DRAWS = 2


class ShotBatch(NamedTuple):
    recorded: np.ndarray  # recorded mid-circuit bit per shot (0 = '+', 1 = '-')
    kept: np.ndarray  # Bell outcome recorded as Phi+
    final_states: np.ndarray  # state vectors after the Bell basis change, before readout


def _scrambler_circuit(u):
    if u.circuit is not None:
        return u.circuit
    return Circuit(3, [Gate("U", (0, 1, 2), matrix=u.matrix)])


def shot_circuit(psi, u, basis):
    """Instruction list of one shot after the bath preparation."""
    L = SHOT_LAYOUT
    e, ep, b = L["E"][0], L["E'"][0], L["B"][0]
    scr, _ = lab_wires()
    body = _scrambler_circuit(u)
    ins = [Gate("H", (e,)), Gate("CNOT", (e, ep))]
    ins += body.inverse().on_wires(scr, L.n_wires).instructions
    ins += [MeasurePauli(basis, b, "B"), Reset(b), PrepareState(b, psi)]
    ins += body.on_wires(scr, L.n_wires).instructions
    ins += [PostselectBell((e, ep))]
    return Circuit(L.n_wires, ins)


def draws_per_shot(circuit):
    return _BATH_DRAWS + sum(_DRAWS[type(i)] for i in circuit)


def _uniforms(seed, basis, start, stop, width):
    """Rows ``start..stop-1`` of the per-shot variate table for ``(seed, basis)``."""
    steps = -(-width // 4)  # Philox emits 4 doubles per counter step
    key = np.random.SeedSequence([int(seed), BASES.index(basis)]).generate_state(2, np.uint64)
    bitgen = np.random.Philox(key=key)
    bitgen.advance(int(start) * steps)
    return np.random.Generator(bitgen).random((int(stop - start), 4 * steps))


class _Runner:
    """Executes one circuit on a batch of state vectors."""

    def __init__(self, circuit, noise, uniforms):
        self.circuit = circuit
        self.noise = noise
        self.u = uniforms
        self.col = 0
        self.nq = circuit.n_wires
        self.records = {}
        self.kept = None

    def draw(self):
        c = self.u[:, self.col]
        self.col += 1
        return c

    def run(self, bath_wires):
        n = self.u.shape[0]
        psi = np.zeros((n,) + (2,) * self.nq, dtype=complex)
        bits = [(self.draw() >= 0.5).astype(int) for _ in bath_wires]
        idx = [np.arange(n)] + [np.zeros(n, dtype=int)] * self.nq
        for w, bw in zip(bath_wires, bits):
            idx[w + 1] = bw
        psi[tuple(idx)] = 1.0
        for ins in self.circuit:
            psi = getattr(self, "_" + type(ins).__name__)(psi, ins)
        return psi

    def _axes(self, wires):
        return [w + 1 for w in wires]

    def _apply(self, psi, op, wires):
        return apply_to_axes(psi, op, self._axes(wires))

    def _noise_after(self, psi, wires):
        fire_u, which_u = self.draw(), self.draw()
        p = self.noise.gate_error(len(wires))
        if p == 0.0:
            return psi
        paulis = _NONTRIVIAL_PAULIS[len(wires)]
        fire = fire_u < p
        which = np.minimum((which_u * len(paulis)).astype(int), len(paulis) - 1)
        for j, op in enumerate(paulis):
            sel = fire & (which == j)
            if sel.any():
                psi[sel] = self._apply(psi[sel], op, wires)
        return psi

    def _Gate(self, psi, g):
        psi = self._apply(psi, g.unitary(), g.targets)
        return self._noise_after(psi, g.targets)

    def _split(self, psi, wire, vecs):
        """Amplitudes of the rest of the register conditioned on each of ``vecs`` at ``wire``."""
        ax = wire + 1
        rest = [np.tensordot(psi, v.conj(), axes=([ax], [0])) for v in vecs]
        probs = [np.sum(np.abs(r) ** 2, axis=tuple(range(1, r.ndim))) for r in rest]
        return rest, probs

    def _collapse(self, rest, probs, vecs, outcome, wire):
        n = outcome.size
        chosen = np.where(_bcast(outcome == 0, rest[0]), rest[0], rest[1])
        norm = np.sqrt(np.where(outcome == 0, probs[0], probs[1]))
        norm = np.where(norm > 0, norm, 1.0)
        chosen = chosen / _bcast(norm, chosen)
        local = np.where((outcome == 0)[:, None], vecs[0][None, :], vecs[1][None, :])
        shape = (n,) + (1,) * wire + (2,) + (1,) * (self.nq - 1 - wire)
        return np.expand_dims(chosen, wire + 1) * local.reshape(shape)

    def _readout(self, bit, wire):
        flip = self.draw() < self.noise.readout(wire)
        return bit ^ flip.astype(int)

    def _MeasurePauli(self, psi, m):
        vecs = [v.amplitudes for v in pauli_eigenbasis(m.axis)]
        rest, probs = self._split(psi, m.wire, vecs)
        outcome = (self.draw() >= probs[0]).astype(int)
        self.records[m.tag] = self._readout(outcome, m.wire)
        return self._collapse(rest, probs, vecs, outcome, m.wire)

    def _Reset(self, psi, r):
        vecs = [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]
        rest, probs = self._split(psi, r.wire, vecs)
        outcome = (self.draw() >= probs[0]).astype(int)
        # keep the branch that was measured, but put the wire back in |0>
        return self._collapse(rest, probs, [vecs[0], vecs[0]], outcome, r.wire)

    def _PrepareState(self, psi, p):
        a, b = p.state.amplitudes
        prep = np.array([[a, -np.conj(b)], [b, np.conj(a)]])
        return self._apply(psi, prep, [p.wire])

    def _PostselectBell(self, psi, bsm):
        a, b = bsm.wires
        psi = self._Gate(psi, Gate("CNOT", (a, b)))
        psi = self._Gate(psi, Gate("H", (a,)))
        probs = np.abs(psi) ** 2
        other = tuple(w + 1 for w in range(self.nq) if w not in (a, b))
        probs = probs.sum(axis=other)
        if a > b:
            probs = probs.transpose(0, 2, 1)
        cum = np.cumsum(probs.reshape(-1, 4), axis=1)
        u = self.draw()
        outcome = np.minimum((u[:, None] >= cum[:, :3]).sum(axis=1), 3)
        rec_a = self._readout(outcome >> 1, a)
        rec_b = self._readout(outcome & 1, b)
        self.records[bsm.tag] = 2 * rec_a + rec_b
        self.kept = (rec_a == 0) & (rec_b == 0)
        return psi


def _bcast(arr, like):
    return arr.reshape(arr.shape + (1,) * (like.ndim - 1))


def simulate_basis(psi, u, basis, shots, noise=None, seed=0, workers=1):
    """Run ``shots`` shots of one tomography basis; returns a :class:`ShotBatch`."""
    noise = NoiseModel() if noise is None else noise
    if u.circuit is None and not noise.is_zero:
        raise ValueError(f"scrambler {u.name!r} has no circuit; gate noise cannot be placed")
    circuit = shot_circuit(psi, u, basis)
    width = draws_per_shot(circuit)
    _, bath = lab_wires()

    def chunk(bounds):
        start, stop = bounds
        runner = _Runner(circuit, noise, _uniforms(seed, basis, start, stop, width))
        final = runner.run(bath)
        return runner.records["B"], runner.kept, final.reshape(stop - start, -1)

    edges = np.linspace(0, shots, max(1, min(workers, shots)) + 1).astype(int)
    bounds = [(s, e) for s, e in zip(edges[:-1], edges[1:]) if e > s]
    if len(bounds) == 1:
        parts = [chunk(bounds[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
            parts = list(pool.map(chunk, bounds))
    rec, kept, final = (np.concatenate(p) for p in zip(*parts))
    return ShotBatch(rec, kept, final)


def run_shots(psi, u, shots_per_basis, noise=None, seed=0, workers=1, label=None):
    """Emulate the experiment in all three tomography bases.

    Returns ``(dataset, result)``. The success probability is pooled over
    the bases; fidelity comes from linear-inversion tomography followed by
    the physicality projection.
    """
    if shots_per_basis < 1:
        raise ValueError("shots_per_basis must be >= 1")
    noise = NoiseModel() if noise is None else noise
    counts, issued = {}, {}
    for basis in BASES:
        batch = simulate_basis(psi, u, basis, shots_per_basis, noise, seed, workers)
        kept = int(batch.kept.sum())
        if kept == 0:
            raise InsufficientStatisticsError(basis)
        minus = int((batch.recorded[batch.kept] == 1).sum())
        counts[basis] = (kept - minus, minus)
        issued[basis] = shots_per_basis
    meta = {"seed": int(seed), "scrambler": u.name, "state": label, "noise": noise.to_dict()}
    data = TomographyDataset(counts, issued, meta)
    raw = reconstruct_linear(data)
    est = estimate(data, psi)
    result = ProtocolResult(
        rho=make_physical(raw),
        fidelity=est.fidelity,
        success_probability=est.probability,
        engine="shots",
        shot_stats=data.to_dict(),
        rho_raw=raw,
        fidelity_se=est.fidelity_se,
        probability_se=est.probability_se,
    )
    return data, result
