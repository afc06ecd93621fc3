"""Single-qubit Pauli tomography on postselected shot counts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import InsufficientStatisticsError
from .qcore import EQUAL_TOL, DensityMatrix, StateVector, fidelity_pure

BASES = ("X", "Y", "Z")


@dataclass(frozen=True)
class TomographyDataset:
    """Postselected ``+``/``-`` counts per Pauli basis.

    ``counts[b] = (n_plus, n_minus)`` among kept shots; ``issued[b]`` is the
    number of shots run in basis ``b`` before postselection. Counts may be
    non-integer when the dataset is built from exact probabilities.
    """

    counts: dict
    issued: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        counts = {b: (self.counts[b][0], self.counts[b][1]) for b in BASES}
        issued = {b: self.issued[b] for b in BASES}
        for b in BASES:
            plus, minus = counts[b]
            if plus < 0 or minus < 0:
                raise ValueError(f"negative count in basis {b}")
            if plus + minus > issued[b] + EQUAL_TOL * max(1.0, issued[b]):
                raise ValueError(f"basis {b}: kept {plus + minus} exceeds issued {issued[b]}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "issued", issued)

    def kept(self, basis):
        return sum(self.counts[basis])

    @property
    def total_kept(self):
        return sum(self.kept(b) for b in BASES)

    @property
    def total_issued(self):
        return sum(self.issued[b] for b in BASES)

    def to_dict(self):
        return {
            "counts": {b: {"+": self.counts[b][0], "-": self.counts[b][1]} for b in BASES},
            "issued": dict(self.issued),
            "kept": {b: self.kept(b) for b in BASES},
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, d):
        counts = {b: (d["counts"][b]["+"], d["counts"][b]["-"]) for b in BASES}
        return cls(counts, dict(d["issued"]), dict(d.get("metadata", {})))

    @classmethod
    def from_probabilities(cls, joint, issued, metadata=None):
        """Expected-count dataset: ``joint[b] = {"+": p, "-": p}`` times ``issued`` shots."""
        counts = {b: (joint[b]["+"] * issued, joint[b]["-"] * issued) for b in BASES}
        return cls(counts, {b: issued for b in BASES}, metadata or {})


class Estimate(NamedTuple):
    fidelity: float
    probability: float
    fidelity_se: float
    probability_se: float


def bloch_components(d):
    """``r_b = (N+ - N-)/(N+ + N-)`` for each basis."""
    r = []
    for b in BASES:
        plus, minus = d.counts[b]
        if plus + minus <= 0:
            raise InsufficientStatisticsError(b)
        r.append((plus - minus) / (plus + minus))
    return np.array(r, dtype=float)


def reconstruct_linear(d):
    """Linear inversion ``(I + r.sigma)/2``; may leave the Bloch ball."""
    return DensityMatrix.from_bloch(bloch_components(d))


def make_physical(rho):
    """Closest physical state by eigenvalue clipping with even redistribution.

    Eigenvalues are processed from the most negative upwards: each negative
    one is zeroed and its deficit spread over the eigenvalues not yet
    visited. For a qubit this shrinks the Bloch vector radially onto the
    unit sphere.
    """
    m = np.asarray(rho.matrix if isinstance(rho, DensityMatrix) else rho)
    if np.max(np.abs(m - m.conj().T)) > EQUAL_TOL:
        raise ValueError("make_physical needs a Hermitian input")
    m = 0.5 * (m + m.conj().T)
    evals, evecs = np.linalg.eigh(m)
    evals = evals / evals.sum()
    if evals[0] >= 0:
        return DensityMatrix(m / np.trace(m).real)

    dim = len(evals)
    lam = evals.copy()
    deficit = 0.0
    i = 0
    while i < dim and lam[i] + deficit / (dim - i) < 0:
        deficit += lam[i]
        lam[i] = 0.0
        i += 1
    lam[i:] += deficit / (dim - i)
    out = (evecs * lam) @ evecs.conj().T
    return DensityMatrix(0.5 * (out + out.conj().T))


def estimate(d, target):
    """Fidelity and pooled success probability with binomial standard errors.

    The fidelity error uses the delta method on the linear estimate
    ``F = (1 + r.n)/2``, where ``var(r_b) = (1 - r_b^2)/N_b``.
    """
    if not isinstance(target, StateVector):
        target = StateVector(target)
    r = bloch_components(d)
    rho = make_physical(DensityMatrix.from_bloch(r))
    fid = fidelity_pure(target, rho)

    n = DensityMatrix(np.outer(target.amplitudes, target.amplitudes.conj())).bloch_vector()
    kept = np.array([d.kept(b) for b in BASES], dtype=float)
    var_r = np.clip(1.0 - r**2, 0.0, None) / kept
    fid_se = 0.5 * float(np.sqrt(np.sum(n**2 * var_r)))

    issued = d.total_issued
    p = d.total_kept / issued
    p_se = float(np.sqrt(p * (1 - p) / issued))
    return Estimate(fid, float(p), fid_se, p_se)


def per_basis_probability(d):
    """Kept fraction per basis (for the basis-independence check)."""
    return {b: d.kept(b) / d.issued[b] for b in BASES}
