from __future__ import annotations

import math

import numpy as np
import pytest

from oracles import haar_unitary
from qwalk.config import figure_config
from qwalk.errors import AssumptionViolated, AZero, NumericallyMarginal
from qwalk.evolution import step
from qwalk.grover import GroverParams, grover_coin, grover_transfer, one_defect_lambdas
from qwalk.lattice import CoinProfile, State, make_coin
from qwalk.transfer import (
    TOL_KER,
    assumption_check,
    best_window_residual,
    build_reduced_vector,
    decisive_sigma,
    decisive_sigma_grid,
    eigenvector,
    inverse_iota,
    iota,
    kernel_vector,
    reduce_coefficients,
    residual,
    sgn,
    theorem_test,
    transfer_matrix,
    _inverse_from,
    _transfer_from,
    zeta_pair,
)

PI = math.pi


def _fig2_lam_plus() -> float:
    m = figure_config("fig2").model
    z = one_defect_lambdas(m.p.c, m.o.c, m.p.delta)[0]
    return float(np.mod(np.angle(z), 2 * PI))


def test_sgn():
    assert (sgn(2.0), sgn(-0.1), sgn(0.0)) == (1, -1, 0)


def test_general_reduction_matches_grover_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = GroverParams(rng.uniform(-3, 3), rng.uniform(0, 2 * PI))
        lam = rng.uniform(0, 2 * PI)
        assert np.allclose(transfer_matrix(grover_coin(p), lam), grover_transfer(p, lam), atol=1e-11)


def test_transfer_matrix_propagates_reduced_pair():
    # [psi_1(x), psi_n(x+1)] = T [psi_1(x-1), psi_n(x)] for the reduced family
    rng = np.random.default_rng(1)
    for n in (3, 4, 5):
        coin = make_coin(rng.uniform(0, 2 * PI), haar_unitary(n, rng))
        lam = rng.uniform(0, 2 * PI)
        rc = reduce_coefficients(coin, lam)
        p1, pn = rng.normal(size=2) + 1j * rng.normal(size=2)
        left = np.array([(rc.A * p1 + rc.B * pn) / rc.z, pn])
        right = np.array([p1, (rc.C * p1 + rc.D * pn) / rc.z])
        assert np.allclose(transfer_matrix(coin, lam) @ left, right, atol=1e-12)


@pytest.mark.parametrize("n", [3, 4])
def test_generalized_eigenvectors_satisfy_relations(n):
    # any seed gives a solution of the eigen-relations away from the window edge
    rng = np.random.default_rng(2 + n)
    coins = [make_coin(rng.uniform(0, 2 * PI), haar_unitary(n, rng)) for _ in range(4)]
    prof = CoinProfile(coins[0], coins[1], (coins[2], coins[3], coins[0]), -2, 2)
    lam = rng.uniform(0, 2 * PI)
    # random Haar coins violate det T = 1, so build without the gate
    local = {x: reduce_coefficients(prof.coin_at(x), lam) for x in range(-12, 13)}
    phi = rng.normal(size=2) + 1j * rng.normal(size=2)
    pairs = {0: phi}
    for x in range(0, 12):
        pairs[x + 1] = _transfer_from(local[x], 1e-12) @ pairs[x]
    for x in range(-1, -13, -1):
        pairs[x] = _inverse_from(local[x], 1e-12) @ pairs[x + 1]
    # generalized eigenvector on [-12, 11] from the pairs
    amps = np.zeros((24, n), dtype=complex)
    for i, x in enumerate(range(-12, 12)):
        rc = local[x]
        p1, pn = pairs[x + 1][0], pairs[x][1]
        amps[i, 0], amps[i, n - 1] = p1, pn
        amps[i, 1 : n - 1] = rc.E * p1 + rc.F * pn
    psi = State(-12, amps)
    r = residual(prof, lam, psi)
    assert r <= 1e-10 * max(1.0, float(np.max(np.abs(amps))))


def test_zeta_pair_invariants():
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = GroverParams(rng.uniform(-3, 3), rng.uniform(0, 2 * PI))
        T = transfer_matrix(grover_coin(p), rng.uniform(0, 2 * PI))
        z = zeta_pair(T)
        assert abs(z.zeta_gt + z.zeta_lt - np.trace(T)) <= 1e-10 * max(1, abs(np.trace(T)))
        assert abs(z.zeta_gt * z.zeta_lt - 1) <= 1e-10
        assert abs(z.zeta_gt) >= 1 - 1e-12 >= abs(z.zeta_lt) - 2e-12


def test_zeta_pair_elliptic_zero_trace_is_plus_minus_i():
    z = zeta_pair(np.array([[0, -1], [1, 0]], dtype=complex))
    assert z.zeta_gt == 1j and z.zeta_lt == -1j


def test_zeta_pair_gate_errors():
    with pytest.raises(AssumptionViolated) as e:
        zeta_pair(np.diag([2.0, 1.0]).astype(complex))
    assert e.value.item == 2
    with pytest.raises(AssumptionViolated) as e:
        zeta_pair(np.diag([2j, -0.5j]))  # det 1, complex trace
    assert e.value.item == 3


def test_assumption_check_items():
    prof = figure_config("fig2").profile
    assert assumption_check(prof, 1.0)
    rep = assumption_check(prof, 0.0)  # A vanishes at the coin phase
    assert not rep and rep.failed_item == 1
    rng = np.random.default_rng(4)
    c = make_coin(0.3, haar_unitary(3, rng))
    rep = assumption_check(CoinProfile.homogeneous(c), 1.0)
    assert not rep and rep.failed_item in (2, 3)
    with pytest.raises(AZero):
        transfer_matrix(grover_coin(GroverParams(1.0, 0.7)), 0.7)


def test_kernel_vector():
    M = np.array([[1, 2], [2, 4]], dtype=complex)
    k = kernel_vector(M)
    assert k is not None and not k.full
    assert np.linalg.norm(M @ k.vector) <= 1e-14
    assert kernel_vector(np.eye(2)) is None
    assert kernel_vector(np.zeros((2, 2))).full


def test_theorem_test_fig2():
    prof = figure_config("fig2").profile
    lam = _fig2_lam_plus()
    res = theorem_test(prof, lam)
    assert res.is_eigenvalue and res.hyperbolic
    # one-dimensional intersection: second singular value well above tol
    assert res.sigmas[-2] > 10 * TOL_KER
    doc = res.to_json(residual=0.0)
    assert set(doc) >= {"lambda", "pass", "phi", "zeta_lt_inf", "zeta_gt_minf"}
    assert not theorem_test(prof, 1.0).is_eigenvalue


def test_strict_mode_flags_marginal_decisions():
    prof = figure_config("fig2").profile
    lam = _fig2_lam_plus()
    hit = False
    for d in np.logspace(-11, -6, 60):
        s = decisive_sigma(prof, lam + d)
        if 0.1 * TOL_KER <= s <= 10 * TOL_KER:
            with pytest.raises(NumericallyMarginal):
                theorem_test(prof, lam + d, strict=True)
            hit = True
            break
    assert hit


def test_sigma_grid_matches_scalar():
    for name in ("fig2", "fig3"):
        prof = figure_config(name).profile
        lams = np.linspace(0.01, 2 * PI - 0.01, 97)
        g = decisive_sigma_grid(prof, lams)
        s = np.array([decisive_sigma(prof, l) for l in lams])
        assert np.array_equal(np.isnan(g), np.isnan(s))
        ok = ~np.isnan(s)
        assert np.max(np.abs(g[ok] - s[ok])) <= 1e-12


def test_eigenvector_residual_and_iota_roundtrip():
    prof = figure_config("fig2").profile
    lam = _fig2_lam_plus()
    res = theorem_test(prof, lam)
    psi = eigenvector(prof, lam, res.phi, 60, tp=res.products)
    assert residual(prof, lam, psi) <= 1e-8
    tv = build_reduced_vector(prof, lam, res.phi, -30, 31, tp=res.products)
    assert tv.geometric == (True, True)
    back = iota(inverse_iota(prof, lam, tv))
    assert back.lo == tv.lo + 1
    assert np.array_equal(back.values, tv.values[1:-1])


def test_residual_is_direct_application():
    prof = figure_config("fig3").profile
    lam = PI / 6
    res = theorem_test(prof, lam)
    psi = eigenvector(prof, lam, res.phi, 40, tp=res.products)
    up = step(prof, psi)
    diff = up.amps - np.exp(1j * lam) * psi.extended(up.lo, up.hi).amps
    inner = float(np.linalg.norm(diff[2:-2]))
    assert math.isclose(residual(prof, lam, psi), inner, rel_tol=1e-12, abs_tol=1e-300)


def test_best_window_residual_contrast():
    prof = figure_config("fig2").profile
    assert best_window_residual(prof, _fig2_lam_plus(), 100) <= 1e-8
    assert best_window_residual(prof, 1.0, 100) >= 1e-3
