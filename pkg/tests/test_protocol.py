import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_decode
from pctc_decode import protocol as pr
from pctc_decode import scramblers as sc
from pctc_decode.exceptions import DegenerateOutcomeError
from pctc_decode.qcore import PAULI_STATES, DensityMatrix, StateVector, trace_distance

UC_FIDELITY = {"x-": 0.5, "x+": 0.5, "y-": 0.5, "y+": 0.5, "z-": 1.0, "z+": 1.0}


@pytest.mark.parametrize("name", ["uq", "uc", "identity"])
@pytest.mark.parametrize("label", list(PAULI_STATES))
def test_engine_matches_brute_force(name, label):
    u = sc.by_name(name)
    psi = PAULI_STATES[label]
    p, rho = brute_force_decode(psi.amplitudes, u.matrix)
    r = pr.decode_analytic_pctc(psi, u)
    assert r.success_probability == pytest.approx(p, abs=1e-12)
    assert np.allclose(r.rho.matrix, rho, atol=1e-12)


@pytest.mark.parametrize("label", list(PAULI_STATES))
def test_uq_decodes_perfectly(label):
    r = pr.decode_analytic_pctc(PAULI_STATES[label], sc.u_q())
    assert r.success_probability == pytest.approx(0.25, abs=1e-10)
    assert r.fidelity == pytest.approx(1.0, abs=1e-10)
    assert r.product == pytest.approx(0.25, abs=1e-10)


@pytest.mark.parametrize("label", list(PAULI_STATES))
def test_uc_decodes_only_classical_states(label):
    r = pr.decode_analytic_pctc(PAULI_STATES[label], sc.u_c())
    assert r.fidelity == pytest.approx(UC_FIDELITY[label], abs=1e-10)
    assert r.success_probability == pytest.approx(0.5, abs=1e-10)


def test_identity_scrambler_sends_message_into_bath():
    for psi in PAULI_STATES.values():
        r = pr.decode_analytic_pctc(psi, sc.identity_scrambler())
        assert r.success_probability == pytest.approx(1.0)
        assert r.fidelity == pytest.approx(0.5)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_pctc_and_yk_agree(seed):
    rng = np.random.default_rng(seed)
    u = sc.ScramblerSpec("haar", sc.haar_random_unitary(8, rng))
    psi = sc.random_state(2, rng)
    a, b = pr.decode_analytic_pctc(psi, u), pr.decode_analytic_yk(psi, u)
    assert trace_distance(a.rho, b.rho) <= 1e-12
    assert abs(a.success_probability - b.success_probability) <= 1e-12
    assert b.engine == "analytic-yk"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_product_bound(seed):
    rng = np.random.default_rng(seed)
    u = sc.ScramblerSpec("haar", sc.haar_random_unitary(8, rng))
    p, f, pf = pr.bound_check(sc.random_state(2, rng), u)
    assert 0 <= p <= 1 and 0 <= f <= 1
    assert pf >= pr.BOUND - 1e-9


@settings(max_examples=30, deadline=None)
@given(st.floats(0, np.pi), st.floats(0, 2 * np.pi), st.integers(0, 1000))
def test_success_probability_is_quadratic_form(theta, phi, seed):
    # P(psi) = <psi|M|psi>, so it is fixed by its values on |0>, |1>, |+>, |+i>
    u = sc.haar_scrambler(seed)
    a, b = np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)
    p = {k: pr.success_probability(PAULI_STATES[k], u) for k in ("z+", "z-", "x+", "y+")}
    m01 = (p["x+"] - 0.5 * (p["z+"] + p["z-"])) - 1j * (p["y+"] - 0.5 * (p["z+"] + p["z-"]))
    want = abs(a) ** 2 * p["z+"] + abs(b) ** 2 * p["z-"] + 2 * np.real(np.conj(a) * b * m01)
    got = pr.success_probability(StateVector(np.array([a, b])), u)
    assert got == pytest.approx(want, abs=1e-12)


def test_message_validation():
    with pytest.raises(ValueError):
        pr.decode_analytic_pctc(StateVector(np.array([1.0, 1.0])), sc.u_q())
    with pytest.raises(ValueError):
        pr.decode_analytic_pctc(StateVector(np.array([1, 0, 0, 0])), sc.u_q())


def test_degenerate_postselection_raises():
    assert pr.final_state_pctc(PAULI_STATES["z+"], sc.u_q()).norm2 == pytest.approx(0.25)
    with pytest.raises(DegenerateOutcomeError):
        pr._result_from_final(PAULI_STATES["z+"], StateVector(np.zeros(32)), "analytic-pctc")


def test_layouts_are_bijections():
    assert pr.ANALYTIC_LAYOUT.n_wires == 7
    with pytest.raises(ValueError):
        pr.SubsystemLayout({"A": (0,), "B": (0,)}, 2)
    dec, enc, bob = pr.analytic_wires()
    assert (dec, enc, bob) == ([3, 4, 1], [0, 4, 1], 3)
    assert pr.lab_wires() == ([0, 1, 2], [0, 1])


def test_protocol_result_engine_validated():
    rho = DensityMatrix.maximally_mixed(1)
    with pytest.raises(ValueError):
        pr.ProtocolResult(rho, 0.5, 0.5, "magic")


def test_noise_model():
    n = pr.NoiseModel(1e-3, 2e-3, [0.1, 0.2, 0.0, 0.0])
    assert n.gate_error(1) == 1e-3 and n.gate_error(2) == 2e-3
    assert n.readout(1) == 0.2
    assert not n.is_zero and pr.NoiseModel().is_zero
    assert pr.NoiseModel.from_dict(n.to_dict()) == n
    assert pr.NoiseModel.uniform(0.01) == pr.NoiseModel(0.01, 0.01, 0.01)
    with pytest.raises(ValueError):
        n.gate_error(3)
    assert pr.NoiseModel().gate_error(3) == 0.0
    with pytest.raises(ValueError):
        pr.NoiseModel(p1=1.5)
    with pytest.raises(ValueError):
        pr.NoiseModel.from_dict({"p3": 0.1})


@pytest.mark.parametrize("name", ["uq", "uc"])
@pytest.mark.parametrize("label", list(PAULI_STATES))
def test_lab_pipeline_matches_analytic(name, label):
    u, psi = sc.by_name(name), PAULI_STATES[label]
    r = pr.decode_analytic_pctc(psi, u)
    for basis in "XYZ":
        joint, p_post = pr.exact_conditional_distribution(psi, u, basis)
        assert p_post == pytest.approx(r.success_probability, abs=1e-12)
        plus, _ = pr.pauli_eigenbasis(basis)
        p_plus = float(np.real(np.vdot(plus.amplitudes, r.rho.matrix @ plus.amplitudes)))
        assert joint["+"] / p_post == pytest.approx(p_plus, abs=1e-12)


def test_lab_pipeline_for_haar_scrambler():
    u = sc.haar_scrambler(99)
    psi = sc.random_state(2, np.random.default_rng(5))
    r = pr.decode_analytic_pctc(psi, u)
    _, p_post = pr.exact_conditional_distribution(psi, u, "Y")
    assert p_post == pytest.approx(r.success_probability, abs=1e-12)


def test_forward_and_inverse_states_trivial_kicks():
    eye = np.eye(2)
    u = sc.haar_scrambler(3)
    ref = pr.otoc_reference_state()
    assert ref.inner(pr.forward_state(None, u, eye, eye)) == pytest.approx(1.0)
    assert ref.inner(pr.inverse_state(None, u, eye, eye)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        pr.forward_state(None, u, np.ones((2, 2)), eye)
