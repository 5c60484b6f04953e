import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewphoton.errors import PostSelectionError
from fewphoton.evolution import evolve_rk4
from fewphoton.fock import density_from_state, fock_state
from fewphoton.presets import NEGATIVITY_DEMO
from fewphoton.qed import (
    E,
    G,
    AtomCavityState,
    PrepParams,
    displaced_parity,
    jc_evolve_exact,
    jc_evolve_paper,
    measured_wigner,
    measurement_sigma,
    microwave_rotation,
    negativity_criterion,
    outcome_probabilities,
    postselection_norm_closed,
    prepared_amplitudes_closed,
    ramsey_probe_probability,
    rotation_matrix,
    target_state,
    two_atom_prepare,
)
from fewphoton.wigner import PhasePoint, wigner_from_rho

R2 = math.sqrt(2) / 2
angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def single(n, level, dim=8):
    return AtomCavityState.product(n, (level,), dim)


def test_jc_paper_examples():
    out = jc_evolve_paper(single(0, E), math.pi / 4).amplitudes
    assert out[0, E] == pytest.approx(R2, abs=1e-15)
    assert out[1, G] == pytest.approx(-1j * R2, abs=1e-15)
    assert np.isclose(np.abs(out) ** 2, 0).sum() == out.size - 2

    out = jc_evolve_paper(single(1, E), math.pi / 4).amplitudes
    assert out[1, E] == pytest.approx(R2, abs=1e-15)
    assert out[2, G] == pytest.approx(-1j * R2, abs=1e-15)

    state = single(0, E)
    np.testing.assert_array_equal(jc_evolve_paper(state, 0.0).amplitudes, state.amplitudes)


def test_jc_exact_examples():
    for gt in (0.1, 0.9, 2.3):
        np.testing.assert_allclose(
            jc_evolve_exact(single(0, E), gt).amplitudes,
            jc_evolve_paper(single(0, E), gt).amplitudes,
            atol=1e-15,
        )
    out = jc_evolve_exact(single(1, E), math.pi / 4).amplitudes
    w = math.sqrt(2) * math.pi / 4
    assert out[1, E] == pytest.approx(math.cos(w), abs=1e-15)
    assert out[2, G] == pytest.approx(-1j * math.sin(w), abs=1e-15)

    out = jc_evolve_exact(single(1, E), math.pi / (4 * math.sqrt(2))).amplitudes
    assert out[1, E] == pytest.approx(R2, abs=1e-15)
    assert out[2, G] == pytest.approx(-1j * R2, abs=1e-15)


def test_jc_ground_vacuum_is_dark():
    state = single(0, G)
    for jc in (jc_evolve_paper, jc_evolve_exact):
        np.testing.assert_array_equal(jc(state, 1.234).amplitudes, state.amplitudes)


@settings(max_examples=30, deadline=None)
@given(angles, st.integers(0, 5), st.sampled_from([E, G]))
def test_jc_preserves_norm_and_excitation_number(gt, n, level):
    state = single(n, level)
    excitations = n + (level == E)
    for jc in (jc_evolve_paper, jc_evolve_exact):
        out = jc(state, gt)
        assert out.norm() == pytest.approx(1.0, abs=1e-13)
        populated = np.argwhere(np.abs(out.amplitudes) > 1e-14)
        for k, lev in populated:
            assert k + (lev == E) == excitations


def test_rotation_examples():
    state = single(0, E)
    np.testing.assert_array_equal(microwave_rotation(state, 0, 0.0, 1.1).amplitudes, state.amplitudes)
    out = microwave_rotation(state, 0, math.pi / 2, 0.0).amplitudes
    assert out[0, E] == pytest.approx(R2, abs=1e-15)
    assert out[0, G] == pytest.approx(1j * R2, abs=1e-15)


def test_rotation_of_excited_carries_negative_phase():
    out = microwave_rotation(single(0, E), 0, math.pi / 2, 0.7).amplitudes
    assert out[0, G] == pytest.approx(1j * np.exp(-0.7j) * R2, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(angles, angles)
def test_rotation_unitary_and_inverse(theta, phi):
    u = rotation_matrix(theta, phi)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-14)
    rng = np.random.default_rng(abs(hash((theta, phi))) % 2**32)
    amps = rng.normal(size=(8, 2, 2)) + 1j * rng.normal(size=(8, 2, 2))
    state = AtomCavityState(amps / np.linalg.norm(amps))
    for atom in (0, 1):
        back = microwave_rotation(microwave_rotation(state, atom, theta, phi), atom, -theta, phi)
        np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-12)


def test_rotation_rejects_bad_atom_index():
    with pytest.raises(IndexError):
        microwave_rotation(single(0, E), 1, 0.3, 0.0)


def test_reference_preparation():
    prep = two_atom_prepare(PrepParams(), "paper")
    assert prep.success_probability == pytest.approx(3 / 8, abs=1e-14)
    assert prep.cavity.fidelity(target_state()) > 1 - 1e-12
    assert postselection_norm_closed(PrepParams()) == pytest.approx(3 / 8, abs=1e-14)


def test_reference_preparation_exact_model_is_distorted():
    exact = two_atom_prepare(PrepParams(), "exact")
    fidelity = exact.cavity.fidelity(target_state())
    assert 0.9 < fidelity < 1 - 1e-3
    amps = exact.cavity.amplitudes
    paper = two_atom_prepare(PrepParams(), "paper").cavity.amplitudes
    # only the |2> branch sees the sqrt(2) Rabi enhancement
    ratio = abs(amps[2] / amps[0]) / abs(paper[2] / paper[0])
    assert ratio == pytest.approx(math.sin(math.sqrt(2) * math.pi / 4) / math.sin(math.pi / 4), abs=1e-12)


prep_params = st.builds(PrepParams, angles, angles, angles, angles, angles, angles)


def brute_force_norm(params):
    amps = prepared_amplitudes_closed(params)
    return float(np.vdot(amps, amps).real)


@settings(max_examples=50, deadline=None)
@given(prep_params)
def test_protocol_matches_closed_amplitudes(params):
    n = brute_force_norm(params)
    assert postselection_norm_closed(params) == pytest.approx(n, abs=1e-12)
    if n < 1e-6:
        return
    prep = two_atom_prepare(params, "paper")
    assert prep.success_probability == pytest.approx(n, abs=1e-12)
    expected = prepared_amplitudes_closed(params) / math.sqrt(n)
    np.testing.assert_allclose(prep.cavity.amplitudes[:3], expected, atol=1e-12)
    np.testing.assert_allclose(prep.cavity.amplitudes[3:], 0, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(prep_params, st.sampled_from(["paper", "exact"]))
def test_outcomes_sum_to_one(params, model):
    probs = outcome_probabilities(params, model)
    assert set(probs) == {"ee", "eg", "ge", "gg"}
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(p >= 0 for p in probs.values())


@settings(max_examples=30, deadline=None)
@given(angles, angles, angles, angles)
def test_no_interaction_leaves_vacuum(th1, th2, ph1, ph2):
    params = PrepParams(0.0, 0.0, th1, th2, ph1, ph2)
    success = math.cos(th1 / 2) ** 2 * math.cos(th2 / 2) ** 2
    if success < 1e-10:
        return
    prep = two_atom_prepare(params)
    assert abs(prep.cavity.amplitudes[0]) == pytest.approx(1.0, abs=1e-12)
    assert prep.success_probability == pytest.approx(success, abs=1e-12)


def test_postselection_failure():
    with pytest.raises(PostSelectionError):
        two_atom_prepare(PrepParams(0.0, 0.0, math.pi, 0.0, 0.0, 0.0))


def test_unknown_model():
    with pytest.raises(ValueError):
        two_atom_prepare(PrepParams(), "semiclassical")


def test_ramsey_examples(vacuum_rho, demo_rho):
    one = density_from_state(fock_state(1))
    assert ramsey_probe_probability(vacuum_rho, 0, 0.0) == pytest.approx(1.0, abs=1e-13)
    assert ramsey_probe_probability(one, 0, 0.0) == pytest.approx(0.0, abs=1e-13)
    for alpha in (0, 0.4 - 1.1j, 2.0):
        assert ramsey_probe_probability(demo_rho, alpha, math.pi / 2) == pytest.approx(0.5, abs=1e-13)


def test_displaced_parity_coherent_overlap(vacuum_rho):
    for alpha in (0.3, 1 + 1j, -2.5j, 4.0):
        assert displaced_parity(vacuum_rho, alpha) == pytest.approx(math.exp(-2 * abs(alpha) ** 2), abs=1e-12)


def test_measured_wigner_examples(vacuum_rho, demo_rho):
    assert measured_wigner(vacuum_rho, 0).w_estimate == pytest.approx(2 / math.pi, abs=1e-13)
    record = measured_wigner(demo_rho, PhasePoint(0))
    assert record.w_estimate == pytest.approx(2 / math.pi * 7 / 9, abs=1e-12)
    assert abs(record.w_estimate - wigner_from_rho(demo_rho, 0)) < 1e-9


def test_measured_wigner_matches_engine_off_origin(demo_rho):
    rho = evolve_rk4(demo_rho, 0.2)
    for alpha in np.linspace(-2.5, 2.5, 6)[:, None] + 1j * np.linspace(-2, 2, 5)[None, :]:
        for a in alpha:
            assert abs(measured_wigner(rho, a).w_estimate - wigner_from_rho(rho, a)) < 1e-9


def test_shot_noise_vacuum_within_three_sigma(vacuum_rho):
    shots = 100_000
    for alpha in (0, 0.5, 0.3 + 0.6j):
        exact = measured_wigner(vacuum_rho, alpha)
        noisy = measured_wigner(vacuum_rho, alpha, shots=shots, seed=7)
        sigma = measurement_sigma(exact.p_e_phase0, exact.p_e_phase_pi, shots)
        assert abs(noisy.w_estimate - exact.w_estimate) <= 3 * sigma
        assert noisy.shots == shots


def test_shot_noise_reproducible(demo_rho):
    a = measured_wigner(demo_rho, 0.5, shots=1000, seed=3)
    b = measured_wigner(demo_rho, 0.5, shots=1000, seed=3)
    c = measured_wigner(demo_rho, 0.5, shots=1000, seed=4)
    assert a == b
    assert (a.p_e_phase0, a.p_e_phase_pi) != (c.p_e_phase0, c.p_e_phase_pi)


def test_negative_shots_rejected(vacuum_rho):
    with pytest.raises(ValueError):
        measured_wigner(vacuum_rho, 0, shots=-1)


def test_negativity_criterion_examples(vacuum_rho, demo_rho):
    one = density_from_state(fock_state(1))
    assert negativity_criterion(one, 0)
    assert not any(negativity_criterion(vacuum_rho, a) for a in (0, 1.0, -0.5 + 2j))
    late = evolve_rk4(demo_rho, 3.0)
    axis = np.linspace(-3, 3, 13)
    assert not any(negativity_criterion(late, x + 1j * p) for x in axis for p in axis)


def test_negativity_criterion_tracks_wigner_sign(demo_rho):
    axis = np.linspace(-2, 2, 9)
    for x in axis:
        for p in axis:
            w = wigner_from_rho(demo_rho, x + 1j * p)
            if abs(w) > 1e-9:
                assert negativity_criterion(demo_rho, x + 1j * p) == (w < 0)
