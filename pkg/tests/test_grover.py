from __future__ import annotations

import json
import math

import numpy as np
import pytest

from oracles import phase_set_close, ring_point_spectrum
from qwalk.config import figure_config
from qwalk.errors import DegenerateTheta, OutOfDomain, ValidationError
from qwalk.grover import (
    GroverParams,
    SpectrumEntry,
    SpectrumReport,
    TwoPhaseOneDefect,
    closed_form_spectrum,
    defect_phase_check,
    grover_coin,
    grover_kernel_vectors,
    grover_trace,
    lemma_eigenpairs,
    one_defect_spectrum,
    spectrum_scan,
    two_phase_extra_phases,
    two_phase_spectrum,
)
from qwalk.transfer import residual, transfer_matrix, zeta_pair

PI = math.pi


def test_degenerate_theta_rejected():
    for th in (0.0, PI, -PI):
        with pytest.raises(DegenerateTheta):
            GroverParams(th)


def test_grover_coin_rows():
    c = grover_coin(GroverParams(2 * PI / 3)).core
    assert np.allclose(c[0], [-0.25, math.sqrt(3) / (2 * math.sqrt(2)), 0.75])
    assert np.allclose(c, c.T)


def test_grover_trace_matches_matrix():
    rng = np.random.default_rng(0)
    for _ in range(100):
        p = GroverParams(rng.uniform(0.1, 3.0) * rng.choice([-1, 1]), rng.uniform(0, 2 * PI))
        lam = rng.uniform(0, 2 * PI)
        assert abs(np.trace(transfer_matrix(grover_coin(p), lam)) - grover_trace(p, lam)) <= 1e-10


def test_grover_kernel_vectors():
    rng = np.random.default_rng(1)
    checked = 0
    while checked < 40:
        p = GroverParams(rng.uniform(0.1, 3.0), rng.uniform(0, 2 * PI))
        lam = rng.uniform(0, 2 * PI)
        if math.cos(lam - p.delta) - p.c <= 1e-3:
            with pytest.raises(OutOfDomain):
                grover_kernel_vectors(p, lam)
            continue
        T = transfer_matrix(grover_coin(p), lam)
        zp = zeta_pair(T)
        kg, kl = grover_kernel_vectors(p, lam)
        for zeta, k in ((zp.zeta_gt, kg), (zp.zeta_lt, kl)):
            assert np.linalg.norm((T - zeta * np.eye(2)) @ k) <= 1e-10 * np.linalg.norm(T) * np.linalg.norm(k)
        checked += 1


def test_fig2_extra_eigenvalues():
    rep = closed_form_spectrum(figure_config("fig2").model)
    lams = rep.lambdas()
    assert len(lams) == 3 and lams[0] == 0.0
    assert abs(lams[1] - 2.2737141413) <= 1e-9
    assert abs(lams[2] - 4.0094711658) <= 1e-9
    for e in rep.entries:
        assert e.accepted and e.residual <= 1e-8


def test_fig1_has_only_the_compact_eigenvalue():
    rep = closed_form_spectrum(figure_config("fig1").model)
    assert [e.source for e in rep.entries] == ["lemma"]


@pytest.mark.parametrize("name,truth", [("fig3", [PI / 12, PI / 6, PI / 4]), ("fig4", [PI / 12, PI / 4])])
def test_two_phase_rule_against_ring(name, truth):
    # the midpoint eigenvalue appears for fig3 and not for fig4
    m = figure_config(name).model
    rep = closed_form_spectrum(m)
    assert phase_set_close(rep.lambdas(), truth, 1e-12)
    flat, loc = ring_point_spectrum(m.profile(), L=100)
    assert phase_set_close(sorted(flat + loc), truth, 1e-6)


def test_two_phase_branch_signs():
    # r > c keeps the midpoint phase, -r > c keeps its antipode
    dm, dp = 3 * PI / 12, PI / 12
    r = math.sin(dm - dp) / math.sqrt(2 * (1 - math.cos(dm - dp)))
    for theta, expect in ((11 * PI / 12, 1), (PI / 12, 0), (PI / 2, 1)):
        m = TwoPhaseOneDefect.two_phase(theta, dm, theta, dp)
        got = two_phase_extra_phases(m)
        assert len(got) == expect == int(r > math.cos(theta)) + int(-r > math.cos(theta))
    # swapping the phases flips r, so only the antipode branch survives
    m = TwoPhaseOneDefect.two_phase(PI / 2, dp, PI / 2, dm)
    (z,) = two_phase_extra_phases(m)
    assert math.isclose(math.cos(np.angle(z) - m.m.delta), r, abs_tol=1e-12)


def test_two_phase_equal_phases_has_no_extra():
    m = TwoPhaseOneDefect.two_phase(1.0, 0.4, 2.0, 0.4)
    assert two_phase_extra_phases(m) == []


def test_two_phase_rejects_distinct_origin_coin():
    with pytest.raises(ValidationError):
        two_phase_spectrum(TwoPhaseOneDefect(GroverParams(1.0), GroverParams(2.0), GroverParams(1.5, 0.3)))


def test_unrecognized_family_has_no_closed_form():
    m = TwoPhaseOneDefect(GroverParams(1.0, 0.1), GroverParams(2.0, 0.5), GroverParams(1.5, 0.3))
    assert closed_form_spectrum(m) is None


def test_lemma_vectors_are_exact_and_compact():
    prof = figure_config("fig3").profile
    es = lemma_eigenpairs(prof)
    assert len(es) == 2
    for e in es:
        psi = e.eigenvector
        assert psi.amps.shape[0] == 2
        assert residual(prof, e.lam, psi.padded(3), exclude_boundary=False) <= 1e-14


def test_conjugate_model_has_conjugate_spectrum():
    m = figure_config("fig3").model
    a = closed_form_spectrum(m).phases()
    b = closed_form_spectrum(m.conjugate()).phases()
    assert phase_set_close(np.angle(np.conj(a)), np.angle(b), 1e-10)


@pytest.mark.parametrize("name", ["fig2", "fig3"])
def test_scan_matches_closed_form(name):
    m = figure_config(name).model
    scan = spectrum_scan(m, grid_size=1024, half_width=100)
    assert phase_set_close(scan.lambdas(), closed_form_spectrum(m).lambdas(), 1e-8)


def test_one_defect_random_against_scan():
    rng = np.random.default_rng(5)
    for _ in range(3):
        th, tho = rng.uniform(0.2, 2.9, size=2)
        d = rng.uniform(0, 2 * PI)
        m = TwoPhaseOneDefect.one_defect(th, tho, d)
        cf = one_defect_spectrum(m.p.c, m.o.c, d, model=m)
        scan = spectrum_scan(m, grid_size=1024, half_width=100)
        assert phase_set_close(cf.lambdas(), scan.lambdas(), 1e-8)
        assert len(cf.lambdas()) == 1 + 2 * (m.p.c < m.o.c)


def test_defect_phase_check_against_ring():
    rng = np.random.default_rng(8)
    for _ in range(6):
        th, tho = rng.uniform(0.2, 2.9, size=2)
        d, do = rng.uniform(0, 2 * PI, size=2)
        m = TwoPhaseOneDefect.one_defect(th, tho, d, do)
        got = defect_phase_check(m)
        flat, loc = ring_point_spectrum(m.profile(), L=60)
        ring_has = any(abs(np.angle(np.exp(1j * (l - do)))) <= 1e-6 for l in flat + loc)
        assert got == ring_has  # never an eigenvalue on these draws
    with pytest.raises(ValidationError):
        defect_phase_check(TwoPhaseOneDefect.one_defect(1.0, 2.0, 0.5), lam=0.5)


def test_report_dedup_and_json():
    rep = SpectrumReport({"kind": "test"})
    assert rep.add(SpectrumEntry(1j, "scan", residual=1e-12))
    assert not rep.add(SpectrumEntry(complex(np.exp(1j * (PI / 2 + 1e-12))), "closed-form"))
    rep.add(SpectrumEntry(-1, "scan", flags=["theorem-test-failed"]))
    assert rep.lambdas() == [PI / 2]
    assert len(rep.lambdas(accepted_only=False)) == 2
    doc = json.loads(rep.dumps())
    assert doc["model"] == {"kind": "test"}
    assert doc["entries"][0]["lambda_radians"] == PI / 2
    assert doc["entries"][1]["flags"] == ["theorem-test-failed"]
