import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmetro.channels import KINDS, catalog
from qmetro.matkit import PAULI_Y, op_norm, random_hermitian
from qmetro.sdp import (
    INFEASIBLE,
    OPTIMAL,
    Block,
    SdpProblem,
    alpha_of,
    beta_of,
    build_ce_sdp,
    embed_real,
    h_from_vector,
    h_to_vector,
    solve,
)

seeds = st.integers(0, 2**32 - 1)


def test_variable_count_and_objective():
    p = build_ce_sdp(catalog("dephasing", "phase", 0.0, 0.8), N=1)
    assert p.n_vars == 6
    assert p.c[-2] == 4 and p.c[-1] == 0
    assert build_ce_sdp(catalog("dephasing", "phase", 0.0, 0.8), N=5).c[-1] == 16


def test_beta_zero_equality_count():
    p = build_ce_sdp(catalog("depolarization", "phase", 0.0, 0.8), enforce_beta_zero=True)
    assert p.eq_a.shape == (4, p.n_vars)


def test_weighted_build_rejects_bad_combinations():
    ch = catalog("dephasing")
    with pytest.raises(ValueError):
        build_ce_sdp(ch, N=2, weight=[1, 0])
    with pytest.raises(ValueError):
        build_ce_sdp(ch, N=0)


def test_embed_real_imaginary_block():
    p = SdpProblem(c=np.zeros(1), blocks=[Block(PAULI_Y, np.zeros((1, 2, 2)))], eq_a=np.zeros((0, 1)), eq_b=np.zeros(0))
    w = np.linalg.eigvalsh(embed_real(p).blocks[0].f0)
    assert np.allclose(w, [-1, -1, 1, 1])


def test_embed_real_real_block():
    m = np.diag([2.0, -3.0])
    p = SdpProblem(c=np.zeros(1), blocks=[Block(m, np.zeros((1, 2, 2)))], eq_a=np.zeros((0, 1)), eq_b=np.zeros(0))
    w = np.linalg.eigvalsh(embed_real(p).blocks[0].f0)
    assert np.allclose(w, [-3, -3, 2, 2])


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 5))
def test_embedding_preserves_psd_verdict(seed, d):
    m = random_hermitian(d, np.random.default_rng(seed))
    p = SdpProblem(c=np.zeros(1), blocks=[Block(m, np.zeros((1, d, d)))], eq_a=np.zeros((0, 1)), eq_b=np.zeros(0))
    w_real = np.linalg.eigvalsh(embed_real(p).blocks[0].f0)
    w = np.linalg.eigvalsh(m)
    assert w_real[0] == pytest.approx(w[0], abs=1e-12)
    assert w_real[-1] == pytest.approx(w[-1], abs=1e-12)


def test_solve_examples():
    sol = solve(build_ce_sdp(catalog("dephasing", "phase", 0.0, 0.8)))
    assert sol.status == OPTIMAL and sol.objective == pytest.approx(0.64, rel=1e-7)
    sol = solve(build_ce_sdp(catalog("loss", "phase", 0.0, 0.9), enforce_beta_zero=True))
    assert sol.status == OPTIMAL and sol.objective == pytest.approx(9.0, rel=1e-7)
    assert sol.gap <= 1e-8


def test_solve_inconsistent_equality():
    p = SdpProblem(
        c=np.array([1.0]),
        blocks=[Block(np.eye(1), np.ones((1, 1, 1)))],
        eq_a=np.zeros((1, 1)),
        eq_b=np.ones(1),
    )
    assert solve(p).status == INFEASIBLE


def test_hermitian_vector_round_trip(rng):
    h = random_hermitian(4, rng)
    assert np.allclose(h_from_vector(h_to_vector(h), 4), h)


@pytest.mark.parametrize("k", KINDS)
def test_solver_is_deterministic(k):
    p = build_ce_sdp(catalog(k, "phase", 0.0, 0.8), N=3)
    a, b = solve(p), solve(p)
    assert abs(a.objective - b.objective) <= 1e-10


@pytest.mark.parametrize("k", KINDS)
@pytest.mark.parametrize("n", [1, 2, 10, 100])
def test_schur_form_matches_direct_evaluation(k, n):
    ch = catalog(k, "phase", 0.0, 0.8)
    sol = solve(build_ce_sdp(ch, N=n))
    assert sol.status == OPTIMAL
    h = h_from_vector(sol.x, ch.r)
    direct = 4 * (op_norm(alpha_of(ch, h)) + (n - 1) * op_norm(beta_of(ch, h)) ** 2)
    assert direct == pytest.approx(sol.objective, rel=1e-6)
    for blk in build_ce_sdp(ch, N=n).blocks:
        assert np.linalg.eigvalsh(blk.value(sol.x))[0] >= -1e-8


@pytest.mark.parametrize("k", ["dephasing", "depolarization", "loss"])
def test_beta_zero_witness(k):
    ch = catalog(k, "phase", 0.0, 0.8)
    sol = solve(build_ce_sdp(ch, enforce_beta_zero=True))
    assert op_norm(beta_of(ch, h_from_vector(sol.x, ch.r))) <= 1e-7


def test_problem_dump_is_json():
    doc = json.loads(build_ce_sdp(catalog("dephasing")).to_json())
    assert doc["variables"][-2:] == ["lam_a", "lam_b"]
    assert len(doc["blocks"]) == 2
