"""Three-qubit scramblers and Haar-random sampling.

Wire convention for every scrambler ``U_{AH -> HE}``: the message enters on
wire ``MESSAGE_WIRE`` and the subsystem sent back through the teleportation
loop leaves on wire ``RETURN_WIRE``; the remaining wires carry the bath.
The two must differ. If the message came back out on its own input wire,
``U`` and ``U^dagger`` would cancel under postselection and every scrambler
(including the purely classical one) would decode perfectly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qcore import (
    CONSTRUCT_TOL,
    Circuit,
    Gate,
    StateVector,
    circuit_unitary,
    equal_up_to_global_phase,
    is_unitary,
)

# Sign pattern of the quantum-information scrambler; overall factor 1/(2*sqrt(2)).
_UQ_SIGNS = (
    (1, 1, 1, -1, 1, -1, -1, -1),
    (1, -1, 1, 1, 1, 1, -1, 1),
    (1, 1, -1, 1, 1, -1, 1, 1),
    (-1, 1, 1, 1, -1, -1, -1, 1),
    (1, 1, 1, -1, -1, 1, 1, 1),
    (-1, 1, -1, -1, 1, 1, -1, 1),
    (-1, -1, 1, -1, 1, -1, 1, 1),
    (-1, 1, 1, 1, 1, 1, 1, -1),
)

_UC_DIAG = (1, 1, 1, -1, 1, -1, -1, -1)

_CZ_PAIRS = ((0, 1), (0, 2), (1, 2))

MESSAGE_WIRE = 0
RETURN_WIRE = 2


def decode_wires(returned, bath):
    """Register wires for ``U^dagger`` given the returned-subsystem wire and two bath wires.

    The decoded output appears on ``wires[MESSAGE_WIRE]``.
    """
    wires = list(bath)
    wires.insert(RETURN_WIRE, returned)
    return wires


def encode_wires(decode, message):
    """Wires for ``U`` after ``U^dagger`` acted on ``decode``: the message replaces the decoded output."""
    wires = list(decode)
    wires[MESSAGE_WIRE] = message
    return wires


@dataclass(frozen=True, eq=False)
class ScramblerSpec:
    """A named three-qubit unitary, optionally with a gate-level circuit."""

    name: str
    matrix: np.ndarray
    circuit: Optional[Circuit] = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        if m.shape != (8, 8):
            raise ValueError(f"scrambler must be 8x8, got {m.shape}")
        if not is_unitary(m, CONSTRUCT_TOL):
            raise ValueError(f"scrambler {self.name!r} is not unitary")
        if self.circuit is not None and not equal_up_to_global_phase(
            circuit_unitary(self.circuit), m, CONSTRUCT_TOL
        ):
            raise ValueError(f"circuit of {self.name!r} does not match its matrix")
        object.__setattr__(self, "matrix", m)

    @property
    def dagger(self):
        return self.matrix.conj().T

    def without_circuit(self):
        return ScramblerSpec(self.name, self.matrix)


def u_q_circuit():
    """Six CZ and three H gates realizing the quantum scrambler (up to phase).

    Layout: a CZ on every pair, H on every wire, then a CZ on every pair again.
    The ordering is one of several equivalent ones and was fixed by matching
    the matrix, not taken from a published drawing.
    """
    cz = [Gate("CZ", p) for p in _CZ_PAIRS]
    return Circuit(3, cz + [Gate("H", (w,)) for w in range(3)] + cz)


def u_c_circuit():
    return Circuit(3, [Gate("CZ", p) for p in _CZ_PAIRS])


def u_q():
    m = np.array(_UQ_SIGNS, dtype=complex) / (2 * np.sqrt(2))
    return ScramblerSpec("uq", m, u_q_circuit())


def u_c():
    return ScramblerSpec("uc", np.diag(np.array(_UC_DIAG, dtype=complex)), u_c_circuit())


def identity_scrambler():
    return ScramblerSpec("identity", np.eye(8, dtype=complex), Circuit(3))


def haar_random_unitary(dim, rng):
    """Haar-distributed ``dim x dim`` unitary (QR of a Ginibre matrix).

    The R-diagonal phases are divided out; without that step the Q factor is
    not Haar distributed.
    """
    return haar_random_unitaries(dim, None, rng)


def haar_random_unitaries(dim, n, rng):
    """Stack of ``n`` independent Haar unitaries (a single matrix when ``n`` is None)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    shape = (dim, dim) if n is None else (n, dim, dim)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def random_state(dim, rng):
    """Uniformly random pure state (first column of a Haar unitary)."""
    u = haar_random_unitary(dim, rng)
    return StateVector(u[:, 0]).normalized()


def haar_scrambler(seed):
    rng = np.random.default_rng(seed)
    return ScramblerSpec(f"haar:{seed}", haar_random_unitary(8, rng))


def by_name(name):
    """Resolve ``uq``, ``uc``, ``identity`` or ``haar:<seed>``."""
    key = name.strip().lower()
    if key == "uq":
        return u_q()
    if key == "uc":
        return u_c()
    if key in ("identity", "id"):
        return identity_scrambler()
    if key.startswith("haar:"):
        try:
            seed = int(key.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad haar seed in {name!r}") from None
        return haar_scrambler(seed)
    raise ValueError(f"unknown scrambler {name!r} (expected uq, uc or haar:<seed>)")
