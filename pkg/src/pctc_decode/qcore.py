"""Dense state-vector / density-matrix primitives and a static circuit model.

Qubit ordering is big-endian: wire 0 is the most significant bit of the
computational-basis index, so ``|q0 q1 q2>`` reads left to right.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .exceptions import DimensionError

MAX_QUBITS = 12

# construction checks / equality assertions
CONSTRUCT_TOL = 1e-10
EQUAL_TOL = 1e-12

SQRT2 = np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def rz(theta):
    """Z rotation ``exp(-i theta Z / 2)``."""
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


_FIXED_GATES = {
    "I": I2,
    "X": X,
    "Y": Y,
    "Z": Z,
    "H": H,
    "S": S,
    "SX": SX,
    "CZ": CZ,
    "CNOT": CNOT,
}
GATE_NAMES = frozenset(_FIXED_GATES) | {"RZ", "U"}


def is_unitary(u, tol=CONSTRUCT_TOL):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _n_qubits_for(dim):
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise DimensionError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit cap")
    return n


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure (possibly unnormalized) state on ``n_qubits`` wires."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        _n_qubits_for(amps.size)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self):
        return _n_qubits_for(self.amplitudes.size)

    @property
    def dim(self):
        return self.amplitudes.size

    @property
    def norm2(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol=CONSTRUCT_TOL):
        return abs(self.norm2 - 1.0) <= tol

    def normalized(self):
        n2 = self.norm2
        if n2 == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / np.sqrt(n2))

    def tensor(self, other):
        return StateVector(np.kron(self.amplitudes, other.amplitudes))

    def to_density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def inner(self, other):
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    @classmethod
    def basis(cls, bits):
        """Computational basis state from a bit string or sequence, e.g. ``"010"``."""
        bits = [int(b) for b in bits]
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[int("".join(map(str, bits)) or "0", 2)] = 1.0
        return cls(amps)

    @classmethod
    def zero(cls, n_qubits):
        return cls.basis([0] * n_qubits)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian operator on ``n_qubits`` wires (trace/positivity checked on demand)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got {m.shape}")
        _n_qubits_for(m.shape[0])
        if np.max(np.abs(m - m.conj().T)) > CONSTRUCT_TOL:
            raise ValueError("density matrix is not Hermitian")
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self):
        return _n_qubits_for(self.matrix.shape[0])

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.matrix).real)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def is_normalized(self, tol=CONSTRUCT_TOL):
        return abs(self.trace - 1.0) <= tol

    def is_physical(self, tol=CONSTRUCT_TOL):
        return self.is_normalized(tol) and bool(self.eigenvalues().min() >= -tol)

    def bloch_vector(self):
        """``(<X>, <Y>, <Z>)`` for a single-qubit operator."""
        if self.n_qubits != 1:
            raise DimensionError("Bloch vector is defined for one qubit only")
        return np.array([np.trace(self.matrix @ p).real for p in (X, Y, Z)])

    @classmethod
    def from_bloch(cls, r):
        rx, ry, rz_ = r
        return cls(0.5 * (I2 + rx * X + ry * Y + rz_ * Z))

    @classmethod
    def maximally_mixed(cls, n_qubits):
        d = 1 << n_qubits
        return cls(np.eye(d, dtype=complex) / d)


def bell_state():
    """``|Phi+> = (|00> + |11>)/sqrt(2)``."""
    return StateVector(np.array([1, 0, 0, 1], dtype=complex) / SQRT2)


def epr_state(n_pairs=1):
    """Maximally entangled state between wire block ``0..n-1`` and ``n..2n-1``.

    Wire ``k`` is paired with wire ``n + k``.
    """
    d = 1 << n_pairs
    return StateVector(np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d))


PAULI_STATES = {
    "x-": StateVector(np.array([1, -1]) / SQRT2),
    "x+": StateVector(np.array([1, 1]) / SQRT2),
    "y-": StateVector(np.array([1, -1j]) / SQRT2),
    "y+": StateVector(np.array([1, 1j]) / SQRT2),
    "z-": StateVector(np.array([0, 1])),
    "z+": StateVector(np.array([1, 0])),
}
STATE_LABELS = tuple(PAULI_STATES)


def bloch_state(theta, phi):
    """``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
    return StateVector(
        np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    )


# ---------------------------------------------------------------------------
# linear algebra


def kron(a, b):
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _check_targets(targets, n_qubits):
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise DimensionError(f"duplicate target wires {targets}")
    for t in targets:
        if not 0 <= t < n_qubits:
            raise DimensionError(f"wire {t} outside a {n_qubits}-qubit register")
    return targets


def apply_to_axes(tensor, op, axes):
    """Contract ``op`` (a ``2^k x 2^k`` matrix) into qubit ``axes`` of ``tensor``.

    ``tensor`` has one length-2 axis per qubit, optionally preceded by batch
    axes. Works for non-unitary ``op`` too.
    """
    k = len(axes)
    op_t = np.asarray(op).reshape((2,) * (2 * k))
    out = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    # tensordot puts the new axes first; put them back where they came from
    return np.moveaxis(out, list(range(k)), list(axes))


def apply_unitary(state, u, targets):
    """Apply ``u`` to ``targets`` of ``state`` (identity elsewhere)."""
    n = state.n_qubits
    targets = _check_targets(targets, n)
    u = np.asarray(u, dtype=complex)
    if u.shape != (1 << len(targets),) * 2:
        raise DimensionError(
            f"gate of shape {u.shape} cannot act on {len(targets)} wires"
        )
    psi = state.amplitudes.reshape((2,) * n)
    return StateVector(apply_to_axes(psi, u, targets).reshape(-1))


def embed(u, targets, n_qubits):
    """Full ``2^n x 2^n`` matrix of ``u`` acting on ``targets``."""
    d = 1 << n_qubits
    cols = np.eye(d, dtype=complex).reshape((2,) * n_qubits + (d,))
    targets = _check_targets(targets, n_qubits)
    return apply_to_axes(cols, u, targets).reshape(d, d)


def partial_trace(rho, keep):
    """Reduced state on ``keep`` (in the given order)."""
    n = rho.n_qubits
    if not keep:
        raise DimensionError("keep must list at least one wire")
    keep = _check_targets(keep, n)
    drop = [w for w in range(n) if w not in keep]
    dk, dd = 1 << len(keep), 1 << len(drop)
    t = rho.matrix.reshape((2,) * (2 * n))
    perm = keep + drop + [n + w for w in keep] + [n + w for w in drop]
    t = t.transpose(perm).reshape(dk, dd, dk, dd)
    return DensityMatrix(np.einsum("ajbj->ab", t))


def project(state, targets, onto):
    """Contract ``<onto|`` into ``targets``.

    Returns the unnormalized vector on the remaining wires (ascending order)
    and its squared norm.
    """
    n = state.n_qubits
    targets = _check_targets(targets, n)
    if onto.dim != 1 << len(targets):
        raise DimensionError(
            f"projector on {onto.n_qubits} wires given {len(targets)} targets"
        )
    if len(targets) == n:
        raise DimensionError("projection must leave at least one wire")
    rest = [w for w in range(n) if w not in targets]
    t = state.amplitudes.reshape((2,) * n).transpose(targets + rest)
    out = onto.amplitudes.conj() @ t.reshape(onto.dim, -1)
    result = StateVector(out)
    return result, result.norm2


def fidelity_pure(psi, rho):
    """``<psi|rho|psi>``, clamped into ``[0, 1]``."""
    if psi.dim != rho.dim:
        raise DimensionError(f"state dim {psi.dim} vs density dim {rho.dim}")
    val = np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes)
    if abs(val.imag) > EQUAL_TOL:
        raise ValueError(f"fidelity has imaginary residue {val.imag:.3e}")
    f = val.real
    if f < -CONSTRUCT_TOL or f > 1 + CONSTRUCT_TOL:
        raise ValueError(f"fidelity {f} outside [0, 1]")
    return float(min(max(f, 0.0), 1.0))


def _as_matrix(x):
    return x.matrix if isinstance(x, DensityMatrix) else np.asarray(x)


def trace_distance(a, b):
    ev = np.linalg.eigvalsh(_as_matrix(a) - _as_matrix(b))
    return float(0.5 * np.abs(ev).sum())


def equal_up_to_global_phase(u, v, tol=EQUAL_TOL):
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError(f"shape {u.shape} vs {v.shape}")
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(v[k]) == 0.0:
        return bool(np.max(np.abs(u)) <= tol)
    phase = u[k] / v[k]
    if abs(phase) == 0.0:
        return False
    phase /= abs(phase)
    return bool(np.max(np.abs(u - phase * v)) <= tol)


# ---------------------------------------------------------------------------
# circuit model


@dataclass(frozen=True)
class Gate:
    name: str
    targets: tuple
    params: tuple = ()
    matrix: Union[np.ndarray, None] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate {self.name!r}")
        if self.name == "U":
            if self.matrix is None:
                raise ValueError("arbitrary-unitary gate needs a matrix")
            object.__setattr__(self, "matrix", _frozen(self.matrix))
        if self.unitary().shape[0] != 1 << len(self.targets):
            raise DimensionError(f"{self.name} does not act on {len(self.targets)} wires")

    @property
    def arity(self):
        return len(self.targets)

    def unitary(self):
        if self.name == "RZ":
            return rz(self.params[0])
        if self.name == "U":
            return self.matrix
        return _FIXED_GATES[self.name]

    def inverse(self):
        if self.name in ("I", "X", "Y", "Z", "H", "CZ", "CNOT"):
            return self
        if self.name == "RZ":
            return Gate("RZ", self.targets, (-self.params[0],))
        if self.name == "S":
            # S^dagger = RZ(-pi/2) up to global phase
            return Gate("RZ", self.targets, (-np.pi / 2,))
        # SX^dagger = SX^3, kept as one explicit matrix
        return Gate("U", self.targets, matrix=self.unitary().conj().T)


@dataclass(frozen=True)
class MeasurePauli:
    axis: str
    wire: int
    tag: str = "m"

    def __post_init__(self):
        if self.axis not in ("X", "Y", "Z"):
            raise ValueError(f"measurement axis must be X, Y or Z, got {self.axis!r}")

    @property
    def targets(self):
        return (self.wire,)


@dataclass(frozen=True)
class Reset:
    wire: int

    @property
    def targets(self):
        return (self.wire,)


@dataclass(frozen=True)
class PrepareState:
    wire: int
    state: StateVector = field(compare=False)

    def __post_init__(self):
        if self.state.n_qubits != 1 or not self.state.is_normalized():
            raise ValueError("PrepareState needs a normalized single-qubit state")

    @property
    def targets(self):
        return (self.wire,)


@dataclass(frozen=True)
class PostselectBell:
    """Bell measurement on a wire pair keeping only the ``Phi+`` outcome."""

    wires: tuple
    tag: str = "bell"

    @property
    def targets(self):
        return tuple(self.wires)


Instruction = Union[Gate, MeasurePauli, Reset, PrepareState, PostselectBell]


@dataclass(frozen=True)
class Circuit:
    n_wires: int
    instructions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if not 1 <= self.n_wires <= MAX_QUBITS:
            raise DimensionError(f"register of {self.n_wires} wires not supported")
        for ins in self.instructions:
            _check_targets(ins.targets, self.n_wires)

    def __iter__(self):
        return iter(self.instructions)

    def __len__(self):
        return len(self.instructions)

    def gate_counts(self):
        return dict(Counter(i.name for i in self.instructions if isinstance(i, Gate)))

    def inverse(self):
        """Reverse order and invert every gate (gate-only circuits)."""
        _require_gates(self)
        return Circuit(self.n_wires, [g.inverse() for g in reversed(self.instructions)])

    def on_wires(self, wires: Sequence[int], n_wires: int):
        """Relabel wire ``k`` to ``wires[k]`` inside a larger register."""
        wires = list(wires)
        out = []
        for g in self.instructions:
            if not isinstance(g, Gate):
                raise TypeError("only gate circuits can be relabelled")
            out.append(Gate(g.name, [wires[t] for t in g.targets], g.params, g.matrix))
        return Circuit(n_wires, out)


def _require_gates(c):
    for ins in c.instructions:
        if not isinstance(ins, Gate):
            raise TypeError(f"non-gate instruction {ins!r} in a unitary circuit")


def circuit_unitary(c):
    """Matrix of a gate-only circuit; the first instruction acts first."""
    _require_gates(c)
    d = 1 << c.n_wires
    t = np.eye(d, dtype=complex).reshape((2,) * c.n_wires + (d,))
    for g in c.instructions:
        t = apply_to_axes(t, g.unitary(), g.targets)
    return t.reshape(d, d)


def run_circuit(state, c):
    """Apply a gate-only circuit to a state vector."""
    _require_gates(c)
    for g in c.instructions:
        state = apply_unitary(state, g.unitary(), g.targets)
    return state
