"""Acceptance criteria. Each test prints one PASS/FAIL line (collected in the run summary)."""

import time

import numpy as np

from pctc_decode import otoc
from pctc_decode import protocol as pr
from pctc_decode import scramblers as sc
from pctc_decode.protocol import NoiseModel
from pctc_decode.qcore import PAULI_STATES, SX, H, bell_state, circuit_unitary, equal_up_to_global_phase, rz, trace_distance
from pctc_decode.shots import run_shots

UC_F = {"x-": 0.5, "x+": 0.5, "y-": 0.5, "y+": 0.5, "z-": 1.0, "z+": 1.0}


def test_01_uq_ideal(criterion):
    t0 = time.perf_counter()
    u = sc.u_q()
    dev = 0.0
    for psi in PAULI_STATES.values():
        r = pr.decode_analytic_pctc(psi, u)
        dev = max(dev, abs(r.success_probability - 0.25), abs(r.fidelity - 1.0))
    elapsed = time.perf_counter() - t0
    ok = dev <= 1e-10 and elapsed < 1.0
    criterion(1, ok, f"U_q P=0.25, F=1 on six states: max dev {dev:.1e} (tol 1e-10), {elapsed:.3f}s (< 1s)")
    assert ok


def test_02_uc_ideal(criterion):
    u = sc.u_c()
    res = {k: pr.decode_analytic_pctc(PAULI_STATES[k], u) for k in UC_F}
    fdev = max(abs(res[k].fidelity - f) for k, f in UC_F.items())
    pavg = np.mean([r.success_probability for r in res.values()])
    ok = fdev <= 1e-10 and abs(pavg - 0.5) <= 1e-10
    criterion(2, ok, f"U_c F pattern max dev {fdev:.1e}, mean P {pavg:.12f} (tol 1e-10)")
    assert ok


def test_03_otoc_averages(criterion):
    rows = []
    ok = True
    for name, want in (("uq", 0.25), ("uc", 0.5)):
        u = sc.by_name(name)
        ex, de = otoc.otoc_average_exact(u), otoc.state_design_average(u)
        ok &= abs(ex - want) <= 1e-12 and abs(ex - de) <= 1e-12
        rows.append(f"{name}: exact {ex:.12f}, design {de:.12f}")
    criterion(3, ok, "; ".join(rows) + " (tol 1e-12)")
    assert ok


def test_04_product_bound(criterion):
    rng = np.random.default_rng(2024)
    low = np.inf
    for _ in range(1000):
        u = sc.ScramblerSpec("haar", sc.haar_random_unitary(8, rng))
        low = min(low, pr.bound_check(sc.random_state(2, rng), u)[2])
    uq_dev = max(abs(pr.bound_check(p, sc.u_q())[2] - 0.25) for p in PAULI_STATES.values())
    ok = low >= 0.25 - 1e-9 and uq_dev <= 1e-10
    criterion(4, ok, f"min P*F over 1000 Haar pairs {low:.6f} (>= 0.25 - 1e-9); U_q |P*F - 0.25| <= {uq_dev:.1e}")
    assert ok


def test_05_engine_equivalence(criterion):
    rng = np.random.default_rng(55)
    td = dp = 0.0
    for _ in range(100):
        u = sc.ScramblerSpec("haar", sc.haar_random_unitary(8, rng))
        psi = sc.random_state(2, rng)
        a, b = pr.decode_analytic_pctc(psi, u), pr.decode_analytic_yk(psi, u)
        td = max(td, trace_distance(a.rho, b.rho))
        dp = max(dp, abs(a.success_probability - b.success_probability))
    ok = td <= 1e-12 and dp <= 1e-12
    criterion(5, ok, f"PCTC vs YK over 100 pairs: trace distance {td:.1e}, |dP| {dp:.1e} (tol 1e-12)")
    assert ok


def test_06_shot_engine(criterion):
    t0 = time.perf_counter()
    u, n = sc.u_q(), 4000
    p_tol = 4 * np.sqrt(0.25 * 0.75 / (3 * n))
    worst_p, worst_f, worst_sigma = 0.0, 1.0, 0.0
    for label, psi in PAULI_STATES.items():
        data, r = run_shots(psi, u, n, None, seed=4000, label=label)
        worst_p = max(worst_p, abs(r.success_probability - 0.25))
        worst_f = min(worst_f, r.fidelity)
        for basis in "XYZ":
            joint, _ = pr.exact_conditional_distribution(psi, u, basis)
            for key, count in zip(("+", "-"), data.counts[basis]):
                p = min(max(joint[key], 0.0), 1.0)
                sigma = np.sqrt(p * (1 - p) / n)
                dev = abs(count / n - p)
                worst_sigma = max(worst_sigma, dev / sigma if sigma > 0 else (np.inf if dev > 0 else 0.0))
    elapsed = time.perf_counter() - t0
    ok = worst_p <= p_tol and worst_f >= 0.97 and worst_sigma <= 4 and elapsed < 60
    criterion(6, ok, f"max |P-0.25| {worst_p:.4f} (<= {p_tol:.4f}), min F {worst_f:.4f} (>= 0.97), "
              f"worst outcome {worst_sigma:.2f} sigma (<= 4), {elapsed:.1f}s (< 60s)")
    assert ok


def test_07_exact_pipeline(criterion):
    dp = dd = 0.0
    for name in ("uq", "uc"):
        u = sc.by_name(name)
        for psi in PAULI_STATES.values():
            r = pr.decode_analytic_pctc(psi, u)
            for basis in "XYZ":
                joint, p_post = pr.exact_conditional_distribution(psi, u, basis)
                dp = max(dp, abs(p_post - r.success_probability))
                plus, _ = pr.pauli_eigenbasis(basis)
                p_plus = np.real(np.vdot(plus.amplitudes, r.rho.matrix @ plus.amplitudes))
                dd = max(dd, abs(joint["+"] / p_post - p_plus))
    ok = dp <= 1e-12 and dd <= 1e-12
    criterion(7, ok, f"lab circuit vs analytic: |dP| {dp:.1e}, conditioned outcome dev {dd:.1e} (tol 1e-12)")
    assert ok


def test_08_otoc_consistency(criterion):
    rng = np.random.default_rng(88)
    worst = 0.0
    for _ in range(100):
        u = sc.ScramblerSpec("haar", sc.haar_random_unitary(8, rng))
        w, v = sc.haar_random_unitary(2, rng), sc.haar_random_unitary(2, rng)
        worst = max(worst, abs(otoc.otoc_overlap(u, w, v) - otoc.otoc_value(u, w, v)))
    z = {}
    for name, seed in (("uq", 1), ("uc", 2)):
        u = sc.by_name(name)
        rep = otoc.otoc_average_sampled(u, 10_000, np.random.default_rng(seed))
        z[name] = abs(rep.value.real - otoc.otoc_average_exact(u)) / rep.stderr
    phi = bell_state().amplitudes
    tw = np.abs(otoc.twirl_projector(2, "pauli-group") - np.outer(phi, phi.conj())).max()
    ok = worst <= 1e-12 and max(z.values()) <= 4 and tw <= 1e-14
    criterion(8, ok, f"overlap vs direct {worst:.1e} (tol 1e-12); sampled n=1e4 within "
              f"{z['uq']:.2f}/{z['uc']:.2f} SE (<= 4); Pauli twirl dev {tw:.1e} (tol 1e-14)")
    assert ok


def test_09_circuit_equivalences(criterion):
    uc_exact = np.array_equal(circuit_unitary(sc.u_c_circuit()), sc.u_c().matrix)
    uq_ok = equal_up_to_global_phase(circuit_unitary(sc.u_q_circuit()), sc.u_q().matrix, 1e-12)
    counts = sc.u_q_circuit().gate_counts()
    h_ok = equal_up_to_global_phase(rz(np.pi / 2) @ SX @ rz(np.pi / 2), H, 1e-12)
    ok = uc_exact and uq_ok and counts == {"CZ": 6, "H": 3} and h_ok
    criterion(9, ok, f"U_c circuit exact: {uc_exact}; U_q circuit {counts} up to phase: {uq_ok}; "
              f"H = RZ SX RZ: {h_ok}")
    assert ok


def test_10_noise_monotone(criterion):
    u, n, seed = sc.u_q(), 20_000, 10
    levels = (0.0, 1e-4, 1e-3, 1e-2)

    def mean_f(noise):
        return np.mean([run_shots(p, u, n, noise, seed=seed)[1].fidelity for p in PAULI_STATES.values()])

    fs = [mean_f(NoiseModel.uniform(s)) for s in levels]
    noiseless = mean_f(None)
    monotone = all(a >= b for a, b in zip(fs, fs[1:]))
    exact = fs[0] == noiseless
    ok = monotone and exact
    criterion(10, ok, "mean F at noise " + ", ".join(f"{s:g}: {f:.5f}" for s, f in zip(levels, fs))
              + f"; non-increasing: {monotone}; zero noise == noiseless bit-exact: {exact}")
    assert ok
