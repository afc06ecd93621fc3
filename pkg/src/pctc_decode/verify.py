"""Self-check battery behind ``pctc-decode verify``.

Every check is a zero-argument callable returning ``(ok, detail)``. An
exception inside a check counts as a failure and is reported, so a broken
build cannot crash the battery before it names what went wrong.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import otoc, protocol, scramblers, shots
from .qcore import (
    EQUAL_TOL,
    H,
    PAULI_STATES,
    SX,
    bell_state,
    circuit_unitary,
    equal_up_to_global_phase,
    is_unitary,
    kron,
    rz,
    trace_distance,
)
from .scramblers import haar_random_unitary, random_state

SEED = 20240


class CheckResult(NamedTuple):
    name: str
    ok: bool
    detail: str


def _epr_transpose():
    rng = np.random.default_rng(SEED)
    phi = bell_state().amplitudes
    worst = 0.0
    for _ in range(200):
        m = haar_random_unitary(2, rng)
        worst = max(worst, np.abs(kron(m, np.eye(2)) @ phi - kron(np.eye(2), m.T) @ phi).max())
    return worst <= EQUAL_TOL, f"max deviation {worst:.2e} over 200 unitaries"


def _uq_matrix():
    u = scramblers.u_q()
    return is_unitary(u.matrix, EQUAL_TOL), "U_q unitary and matches its CZ/H circuit"


def _uq_circuit():
    u = scramblers.u_q()
    ok = equal_up_to_global_phase(circuit_unitary(scramblers.u_q_circuit()), u.matrix, EQUAL_TOL)
    return ok, "6 CZ + 3 H circuit equals U_q up to phase"


def _uc_circuit():
    u = scramblers.u_c()
    dev = np.abs(circuit_unitary(scramblers.u_c_circuit()) - u.matrix).max()
    return dev == 0.0, f"CZ circuit vs diagonal, max deviation {dev:.1e}"


def _h_decomposition():
    ok = equal_up_to_global_phase(rz(np.pi / 2) @ SX @ rz(np.pi / 2), H, EQUAL_TOL)
    return ok, "H = RZ(pi/2) SX RZ(pi/2) up to phase"


def _uq_ideal():
    u = scramblers.u_q()
    dev = 0.0
    for psi in PAULI_STATES.values():
        r = protocol.decode_analytic_pctc(psi, u)
        dev = max(dev, abs(r.success_probability - 0.25), abs(r.fidelity - 1.0))
    return dev <= 1e-10, f"P=0.25, F=1 on six states (max deviation {dev:.1e})"


def _uc_ideal():
    u = scramblers.u_c()
    want = {"x-": 0.5, "x+": 0.5, "y-": 0.5, "y+": 0.5, "z-": 1.0, "z+": 1.0}
    fdev = max(abs(protocol.decode_analytic_pctc(PAULI_STATES[k], u).fidelity - f) for k, f in want.items())
    pavg = otoc.state_design_average(u)
    ok = fdev <= 1e-10 and abs(pavg - 0.5) <= 1e-10
    return ok, f"F pattern deviation {fdev:.1e}, mean P {pavg:.12f}"


def _engines_agree():
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for k in range(40):
        u = scramblers.haar_scrambler(SEED + k)
        psi = random_state(2, rng)
        a = protocol.decode_analytic_pctc(psi, u)
        b = protocol.decode_analytic_yk(psi, u)
        worst = max(worst, trace_distance(a.rho, b.rho), abs(a.success_probability - b.success_probability))
    return worst <= EQUAL_TOL, f"PCTC vs YK, max difference {worst:.1e} over 40 pairs"


def _bound_sweep():
    rng = np.random.default_rng(SEED + 2)
    low = np.inf
    for _ in range(300):
        u = scramblers.ScramblerSpec("haar", haar_random_unitary(8, rng))
        psi = random_state(2, rng)
        low = min(low, protocol.bound_check(psi, u)[2])
    return low >= protocol.BOUND - 1e-9, f"min P*F = {low:.6f} over 300 pairs"


def _otoc_averages():
    vals = {}
    for name, want in (("uq", 0.25), ("uc", 0.5)):
        u = scramblers.by_name(name)
        ex, de = otoc.otoc_average_exact(u), otoc.state_design_average(u)
        vals[name] = (ex, de)
        if abs(ex - want) > EQUAL_TOL or abs(ex - de) > EQUAL_TOL:
            return False, f"{name}: exact {ex:.12f}, design {de:.12f}"
    return True, "O_avg(U_q)=0.25, O_avg(U_c)=0.5, both equal the six-state mean"


def _twirl():
    phi = bell_state().amplitudes
    dev = np.abs(otoc.twirl_projector(2, "pauli-group") - np.outer(phi, phi.conj())).max()
    return dev <= 1e-14, f"Pauli twirl vs EPR projector, deviation {dev:.1e}"


def _overlap_form():
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for k in range(30):
        u = scramblers.haar_scrambler(SEED + 100 + k)
        w, v = haar_random_unitary(2, rng), haar_random_unitary(2, rng)
        worst = max(worst, abs(otoc.otoc_overlap(u, w, v) - otoc.otoc_value(u, w, v)))
    return worst <= EQUAL_TOL, f"overlap vs direct OTOC, max difference {worst:.1e}"


def _lab_pipeline():
    worst = 0.0
    for name in ("uq", "uc"):
        u = scramblers.by_name(name)
        for psi in PAULI_STATES.values():
            p = protocol.success_probability(psi, u)
            for basis in "XYZ":
                _, pp = protocol.exact_conditional_distribution(psi, u, basis)
                worst = max(worst, abs(pp - p))
    return worst <= EQUAL_TOL, f"lab-circuit postselection vs analytic P, max difference {worst:.1e}"


def _shots_vs_exact():
    u = scramblers.u_q()
    psi = PAULI_STATES["x+"]
    n = 3000
    worst = 0.0
    for basis in "XYZ":
        batch = shots.simulate_basis(psi, u, basis, n, seed=SEED)
        joint, _ = protocol.exact_conditional_distribution(psi, u, basis)
        for bit, label in ((0, "+"), (1, "-")):
            p = min(max(joint[label], 0.0), 1.0)
            freq = np.mean(batch.kept & (batch.recorded == bit))
            sigma = np.sqrt(p * (1 - p) / n)
            if sigma < 1e-9:
                if abs(freq - p) > 1e-9:
                    return False, f"basis {basis} outcome {label}: deterministic outcome violated"
                continue
            worst = max(worst, abs(freq - p) / sigma)
    return worst <= 4.0, f"shot frequencies within {worst:.2f} binomial sigma of exact"


CHECKS: dict[str, Callable[[], tuple]] = {
    "epr-transpose-identity": _epr_transpose,
    "uq-unitary": _uq_matrix,
    "uq-circuit-equivalence": _uq_circuit,
    "uc-circuit-equivalence": _uc_circuit,
    "hadamard-native-decomposition": _h_decomposition,
    "uq-ideal-decoding": _uq_ideal,
    "uc-ideal-decoding": _uc_ideal,
    "engine-equivalence": _engines_agree,
    "product-bound-sweep": _bound_sweep,
    "otoc-averages": _otoc_averages,
    "pauli-twirl-identity": _twirl,
    "otoc-overlap-form": _overlap_form,
    "lab-pipeline-probability": _lab_pipeline,
    "shots-vs-exact": _shots_vs_exact,
}


def run_checks(names=None):
    out = []
    for name in names or CHECKS:
        try:
            ok, detail = CHECKS[name]()
        except Exception as exc:  # a crash is a failed check, not a crashed battery
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
