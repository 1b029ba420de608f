import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmetro.bounds import rld_bound, rotation_objective
from qmetro.channels import (
    KINDS,
    ParamChannel,
    catalog,
    channel_from_dict,
    channel_to_dict,
    choi,
    compress,
    dumps_channel,
    eta_of_t,
    from_sampled,
    load_channel,
    loads_channel,
    mix_kraus,
    phase_unitary,
    random_channel,
    rotate_local,
    save_channel,
    tensor,
    validate,
)
from qmetro.errors import BadParameter, DimensionMismatch, ParameterMismatch, ParseError
from qmetro.matkit import IDENTITY_2, PAULI_X, PAULI_Z, random_hermitian, random_unitary

seeds = st.integers(0, 2**32 - 1)


def test_catalog_dephasing_is_valid():
    assert validate(catalog("dephasing", "phase", 0.3, 0.9)) == []


def test_validate_flags_inconsistent_derivative():
    ch = ParamChannel(2, 2, [IDENTITY_2], [PAULI_Z])
    problems = validate(ch)
    assert len(problems) == 1 and problems[0].startswith("derivative")


def test_validate_flags_non_cptp():
    ch = ParamChannel(2, 2, [0.5 * IDENTITY_2], [np.zeros((2, 2))])
    assert any(p.startswith("CPTP") for p in validate(ch))


def test_dependent_kraus_detected_and_compressed():
    k = [IDENTITY_2 / math.sqrt(2), IDENTITY_2 / math.sqrt(2)]
    ch = ParamChannel(2, 2, k, [np.zeros((2, 2))] * 2)
    assert any("dependent" in p for p in validate(ch))
    small = compress(ch)
    assert small.r == 1 and validate(small) == []


@pytest.mark.parametrize("param", ["phase", "strength"])
@pytest.mark.parametrize("eta", [0.0, 0.3, 0.9, 0.99])
def test_catalog_channels_valid(kind, param, eta):
    if param == "strength" and eta == 0.0 and kind in ("loss", "spontaneous_emission"):
        with pytest.raises(BadParameter):
            catalog(kind, param, 0.2, eta)
        return
    ch = catalog(kind, param, 0.2, eta)
    assert validate(ch) == []
    assert ch.d_in == 2 and ch.d_out == (3 if kind == "loss" else 2)


def test_catalog_dephasing_kraus_structure():
    phi, eta = 0.4, 0.7
    ch = catalog("dephasing", "phase", phi, eta)
    u = phase_unitary(phi)
    assert np.allclose(ch.kraus[0], math.sqrt((1 + eta) / 2) * u)
    assert np.allclose(ch.kraus[1], math.sqrt((1 - eta) / 2) * PAULI_Z @ u)


def test_catalog_loss_entries():
    ch = catalog("loss", "phase", 0.0, 0.9)
    assert ch.r == 3 and ch.d_out == 3
    entries = sorted({round(abs(z), 12) for k in ch.kraus for z in k.ravel()} - {0.0})
    assert entries == [round(math.sqrt(0.1), 12), round(math.sqrt(0.9), 12)]


def test_catalog_dephasing_strength_derivative():
    ch = catalog("dephasing", "strength", 0.0, 0.6)
    assert np.allclose(ch.dkraus[0], IDENTITY_2 / (2 * math.sqrt(2 * 1.6)))
    assert np.allclose(ch.dkraus[1], -PAULI_Z / (2 * math.sqrt(2 * 0.4)))


def test_catalog_rejects_bad_input():
    with pytest.raises(BadParameter):
        catalog("dephasing", eta=1.0)
    with pytest.raises(BadParameter):
        catalog("dephasing", eta=-0.1)
    with pytest.raises(BadParameter):
        catalog("amplitude", eta=0.5)
    assert validate(catalog("spontaneous-emission", eta=0.5)) == []


def test_choi_identity_channel():
    c = choi(ParamChannel(2, 2, [IDENTITY_2], [np.zeros((2, 2))]))
    vec_i = np.eye(2).ravel()
    assert np.allclose(c.omega, np.outer(vec_i, vec_i))
    assert np.allclose(c.domega, 0)


def test_choi_dephasing_spectrum():
    eta = 0.7
    w = np.linalg.eigvalsh(choi(catalog("dephasing", "phase", 0.0, eta)).omega)
    assert np.allclose(w, [0, 0, 1 - eta, 1 + eta])


@pytest.mark.parametrize("param", ["phase", "strength"])
def test_choi_traces(kind, param):
    c = choi(catalog(kind, param, 0.3, 0.6))
    assert abs(np.trace(c.omega) - 2) <= 1e-10
    assert abs(np.trace(c.domega)) <= 1e-10
    assert np.linalg.eigvalsh(c.omega)[0] >= -1e-12


def test_rotate_local_zero_is_identity(dephasing):
    rot = rotate_local(dephasing, np.zeros((2, 2)))
    assert all(np.array_equal(a, b) for a, b in zip(rot.dkraus, dephasing.dkraus))


def test_rotate_local_rejects_non_hermitian(dephasing):
    with pytest.raises(ValueError):
        rotate_local(dephasing, np.array([[0, 1], [0, 0]]))
    with pytest.raises(DimensionMismatch):
        rotate_local(dephasing, np.zeros((3, 3)))


def test_rotate_local_keeps_kraus_action(dephasing, rng):
    rot = rotate_local(dephasing, random_hermitian(2, rng))
    rho = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]])
    assert np.allclose(rot.apply(rho), dephasing.apply(rho))


def test_rotate_local_dephasing_witness():
    eta = 0.8
    h = math.sqrt(1 - eta**2) / 2 * PAULI_X
    ch = catalog("dephasing", "phase", 0.0, eta)
    assert rotation_objective(ch, h) == pytest.approx(eta**2, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from(KINDS), st.floats(0.05, 0.95))
def test_rotation_preserves_invariants(seed, kind, eta):
    ch = catalog(kind, "phase", 0.3, eta)
    assert validate(rotate_local(ch, random_hermitian(ch.r, np.random.default_rng(seed)))) == []


def test_tensor_rank_and_validity():
    a = catalog("dephasing", "phase", 0.1, 0.8)
    t = tensor(a, a)
    assert t.r == 4 and t.d_in == 4
    assert validate(t) == []


def test_tensor_rejects_mismatched_parameters():
    with pytest.raises(ParameterMismatch):
        tensor(catalog("dephasing", "phase", 0.0, 0.8), catalog("dephasing", "strength", 0.0, 0.8))


def test_tensor_rld_additive():
    a = catalog("dephasing", "phase", 0.0, 0.8)
    assert rld_bound(tensor(a, a)).value == pytest.approx(2 * rld_bound(a).value, rel=1e-9)


@pytest.mark.parametrize("k", KINDS)
def test_tensor_choi_is_permuted_square(k):
    ch = catalog(k, "phase", 0.2, 0.7)
    w2 = np.sort(np.linalg.eigvalsh(choi(tensor(ch, ch)).omega))
    w = np.linalg.eigvalsh(choi(ch).omega)
    assert np.allclose(w2, np.sort(np.outer(w, w).ravel()), atol=1e-9)


@pytest.mark.parametrize("k", KINDS)
def test_noise_commutes_with_phase(k):
    phi, eta = 0.7, 0.6
    rotated = catalog(k, "phase", phi, eta)
    plain = catalog(k, "phase", 0.0, eta)
    u_out = np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)] + ([1] if k == "loss" else []))
    for idx in range(4):
        rho = np.zeros((2, 2), dtype=complex)
        rho[idx // 2, idx % 2] = 1
        assert np.allclose(rotated.apply(rho), u_out @ plain.apply(rho) @ u_out.conj().T, atol=1e-10)


def test_eta_of_t():
    assert eta_of_t("dephasing", 1, 0) == 1
    assert eta_of_t("depolarization", 1, 3) == pytest.approx(math.exp(-2))
    assert eta_of_t("loss", 2, 0.5) == pytest.approx(math.exp(-1))
    with pytest.raises(BadParameter):
        eta_of_t("loss", 0, 1)


def test_from_sampled_matches_analytic():
    def kraus(phi):
        return catalog("depolarization", "phase", phi, 0.7).kraus

    num = from_sampled(kraus, 0.4)
    ref = catalog("depolarization", "phase", 0.4, 0.7)
    assert all(np.allclose(a, b, atol=1e-9) for a, b in zip(num.dkraus, ref.dkraus))


def test_mix_kraus_preserves_action(rng):
    ch = catalog("depolarization", "phase", 0.2, 0.6)
    mixed = mix_kraus(ch, random_unitary(ch.r, rng))
    rho = np.array([[0.3, 0.1j], [-0.1j, 0.7]])
    assert np.allclose(mixed.apply(rho), ch.apply(rho))
    assert np.allclose(mixed.apply_derivative(rho), ch.apply_derivative(rho))


@pytest.mark.parametrize("family,r", [("isometry", 2), ("isometry", 4), ("mixture", 3)])
def test_random_channels_valid(rng, family, r):
    assert validate(random_channel(2, 2, r, rng, family=family)) == []


@pytest.mark.parametrize("param", ["phase", "strength"])
def test_channel_file_round_trip_bit_exact(kind, param, tmp_path):
    ch = catalog(kind, param, 0.37, 0.81)
    path = tmp_path / "c.json"
    save_channel(ch, path)
    back = load_channel(path)
    assert all(np.array_equal(a, b) for a, b in zip(back.kraus, ch.kraus))
    assert all(np.array_equal(a, b) for a, b in zip(back.dkraus, ch.dkraus))
    assert back.param == ch.param and back.param_value == ch.param_value and back.d_out == ch.d_out


def test_channel_document_round_trip_random(rng):
    ch = random_channel(2, 3, 2, rng)
    back = loads_channel(dumps_channel(ch))
    assert all(np.array_equal(a, b) for a, b in zip(back.dkraus, ch.dkraus))


def test_channel_document_errors():
    with pytest.raises(ParseError):
        loads_channel("{not json")
    d = channel_to_dict(catalog("dephasing"))
    del d["dkraus"]
    with pytest.raises(ParseError):
        channel_from_dict(d)
    d = channel_to_dict(catalog("dephasing"))
    d["kraus"][0] = [[1, 0]]
    with pytest.raises(ParseError):
        channel_from_dict(d)


def test_from_sampled_compresses_dependent_sets():
    def kraus(phi):
        u = phase_unitary(phi)
        # four operators spanning only two directions
        return [0.5 * u, 0.5 * u, 0.5 * PAULI_Z @ u, 0.5 * PAULI_Z @ u]

    ch = from_sampled(kraus, 0.1)
    assert ch.r == 2 and validate(ch) == []
