"""Cross-checked spectra, eigenvector exports and the consistency suite.

Everything the command line reports is computed here, so library callers
get the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AssumptionViolated, AZero, InteriorSingular, QWalkError
from .evolution import iterate
from .grover import (
    TWO_PI,
    SpectrumEntry,
    TwoPhaseOneDefect,
    closed_form_spectrum,
    lemma_eigenpairs,
    phase_distance,
    spectrum_scan,
)
from .lattice import CoinProfile, State, complex_to_pair
from .oracle import Peak, default_initial_states, return_series, spectral_peaks
from .transfer import (
    TOL_A,
    transfer_invariants,
    eigenvector,
    reduce_coefficients,
    residual,
    theorem_test,
)

SCAN_MATCH = 1e-8
ORACLE_MATCH = 5e-3
ORACLE_T = 2048
ORACLE_THRESHOLD = 0.05
GATE_SWEEP_TOL = 1e-10
LEMMA_MATCH = 1e-10

__all__ = [
    "MergedEntry",
    "SpectrumAnalysis",
    "analyze_spectrum",
    "EigvecResult",
    "NotAnEigenvalue",
    "eigvec_analysis",
    "decay_fit",
    "Check",
    "VerifyReport",
    "verify_suite",
]


def _close(a: complex, b: complex, tol: float) -> bool:
    return phase_distance(a, b) <= tol


def _angle(z: complex) -> float:
    return float(np.mod(np.angle(z), TWO_PI))


@dataclass
class MergedEntry:
    phase: complex
    sources: list[str]
    residual: float | None
    eigenvector: State | None = None
    closed_form: bool | None = None  # None when no closed form applies
    scan: bool = False
    oracle: bool | None = None  # None when the oracle was not run
    oracle_weight: float | None = None
    certified_weight: float | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def lam(self) -> float:
        return _angle(self.phase)

    @property
    def agree(self) -> bool:
        return not self.flags

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "phase": complex_to_pair(self.phase),
            "sources": list(self.sources),
            "residual": self.residual,
            "closed_form": self.closed_form,
            "scan": self.scan,
            "oracle": self.oracle,
            "oracle_weight": self.oracle_weight,
            "certified_weight": self.certified_weight,
            "flags": list(self.flags),
        }


@dataclass
class SpectrumAnalysis:
    entries: list[MergedEntry]
    peaks: list[list[Peak]]  # one list per oracle initial state
    unmatched_peaks: list[Peak]
    has_closed_form: bool
    settings: dict

    @property
    def lambdas(self) -> list[float]:
        return sorted(e.lam for e in self.entries)

    @property
    def agree(self) -> bool:
        return all(e.agree for e in self.entries) and not self.unmatched_peaks

    def to_json(self) -> dict:
        return {
            "settings": self.settings,
            "agree": self.agree,
            "entries": [e.to_json() for e in self.entries],
            "oracle_peaks": [[p.to_json() for p in ps] for ps in self.peaks],
            "unmatched_peaks": [p.to_json() for p in self.unmatched_peaks],
        }


def _merge_into(merged: list[MergedEntry], e: SpectrumEntry, source: str, tol: float) -> MergedEntry:
    for m in merged:
        if _close(m.phase, e.phase, tol):
            if source not in m.sources:
                m.sources.append(source)
            if m.eigenvector is None and e.eigenvector is not None:
                m.eigenvector, m.residual = e.eigenvector, e.residual
            return m
    m = MergedEntry(e.phase, [source], e.residual, e.eigenvector)
    merged.append(m)
    return m


def analyze_spectrum(
    profile: CoinProfile,
    model: TwoPhaseOneDefect | None = None,
    grid: int = 4096,
    window: int = 200,
    oracle: bool = True,
    T: int = ORACLE_T,
    threshold: float = ORACLE_THRESHOLD,
    seed: int = 0,
) -> SpectrumAnalysis:
    """Merge compact-vector, closed-form, scan and oracle spectra.

    Flags per entry:
      scan-missing / closed-form-missing   the two exact methods disagree
      oracle-missed                        certified weight >= threshold for
                                           some initial state, yet no peak
      residual-too-large / <verify flags>  from eigenvector reconstruction
    Oracle peaks farther than 5e-3 rad from every entry are reported as
    unmatched.  The certified weight ``|<v, psi0>|^2`` is a lower bound on
    the spectral weight the oracle should see at that phase.
    """
    cf = closed_form_spectrum(model) if model is not None else None
    scan = spectrum_scan(model if model is not None else profile, grid, window)
    merged: list[MergedEntry] = []
    lemma = lemma_eigenpairs(profile)
    for e in lemma:
        _merge_into(merged, e, "lemma", SCAN_MATCH)
    if cf is not None:
        for e in cf.entries:
            m = _merge_into(merged, e, e.source, SCAN_MATCH)
            m.flags.extend(f for f in e.flags if f not in m.flags)
    for e in scan.entries:
        _merge_into(merged, e, "scan" if e.source != "lemma" else "lemma", SCAN_MATCH)
    for m in merged:
        m.scan = any(_close(m.phase, e.phase, SCAN_MATCH) for e in scan.entries)
        if cf is not None:
            m.closed_form = any(_close(m.phase, e.phase, SCAN_MATCH) for e in cf.entries if e.accepted)
            if not m.closed_form:
                m.flags.append("closed-form-missing")
        if not m.scan:
            m.flags.append("scan-missing")
        if m.residual is not None and m.residual > 1e-8 and "residual-too-large" not in m.flags:
            m.flags.append("residual-too-large")

    peaks: list[list[Peak]] = []
    unmatched: list[Peak] = []
    if oracle:
        states = default_initial_states(profile, seed)
        for psi0 in states:
            peaks.append(spectral_peaks(return_series(profile, psi0, T), threshold))
        allp = [p for ps in peaks for p in ps]
        for p in allp:
            if not any(_close(np.exp(1j * p.lam), m.phase, ORACLE_MATCH) for m in merged):
                unmatched.append(p)
        for m in merged:
            hits = [p for p in allp if _close(np.exp(1j * p.lam), m.phase, ORACLE_MATCH)]
            m.oracle = bool(hits)
            m.oracle_weight = max((p.weight for p in hits), default=None)
            if m.eigenvector is not None:
                # the stored vector is normalized on the window; its tail
                # beyond the window is negligible for decaying vectors
                m.certified_weight = max(abs(m.eigenvector.vdot(s)) ** 2 for s in states)
                if not m.oracle and m.certified_weight >= threshold:
                    m.flags.append("oracle-missed")

    merged.sort(key=lambda m: m.lam)
    settings = {"grid": grid, "window": window, "oracle": oracle, "T": T, "threshold": threshold, "seed": seed}
    return SpectrumAnalysis(merged, peaks, sorted(unmatched, key=lambda p: p.lam), cf is not None, settings)


class NotAnEigenvalue(QWalkError):
    def __init__(self, message: str, sigma: float | None):
        super().__init__(message)
        self.sigma = sigma


@dataclass
class DecayFit:
    side: str
    measured: float
    expected: float
    sites: tuple[int, int]

    @property
    def rel_error(self) -> float:
        return abs(self.measured - self.expected) / self.expected

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "measured_ratio": self.measured,
            "expected_ratio": self.expected,
            "rel_error": self.rel_error,
            "sites": list(self.sites),
        }


def _scaled_norm(v: np.ndarray) -> float:
    # squaring amplitudes below ~1e-154 underflows; scale by the largest first
    m = float(np.max(np.abs(v)))
    return 0.0 if m == 0 else m * float(np.sqrt(np.sum(np.abs(v / m) ** 2)))


def decay_fit(psi: State, xs: np.ndarray) -> float:
    """Per-site ratio of ``||psi(x)||`` from a least-squares fit of the log
    norms over the sites ``xs`` (outward order)."""
    norms = np.array([_scaled_norm(psi.at(int(x))) for x in xs])
    keep = norms > 0
    if keep.sum() < 2:
        return float("nan")
    k = np.arange(len(xs))[keep]
    slope = np.polyfit(k, np.log(norms[keep]), 1)[0]
    return float(np.exp(slope))


@dataclass
class EigvecResult:
    lam: float
    vector: State
    residual: float
    kind: str  # "transfer" | "lemma"
    sigma: float | None = None
    fits: list[DecayFit] = field(default_factory=list)
    phi: np.ndarray | None = None

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "kind": self.kind,
            "residual": self.residual,
            "sigma": self.sigma,
            "phi": None if self.phi is None else [complex_to_pair(v) for v in self.phi],
            "window": [self.vector.lo, self.vector.hi],
            "decay": [f.to_json() for f in self.fits],
        }

    def to_csv_rows(self) -> list[list]:
        rows = []
        for x, amp in zip(self.vector.sites, self.vector.amps):
            for k, v in enumerate(amp, start=1):
                rows.append([int(x), k, repr(float(v.real)), repr(float(v.imag))])
        return rows


def eigvec_analysis(
    profile: CoinProfile,
    lam: float,
    window: int = 200,
    fit_sites: tuple[int, int] = (20, 100),
) -> EigvecResult:
    """Eigenvector at ``lam`` with residual and tail decay fits.

    Tail phases carrying a compact two-site vector return that vector.
    Otherwise ``lam`` must pass the kernel criterion; NotAnEigenvalue carries
    the decisive singular value when it does not.
    """
    lam = float(np.mod(lam, TWO_PI))
    z = np.exp(1j * lam)
    for e in lemma_eigenpairs(profile):
        if _close(e.phase, z, LEMMA_MATCH):
            return EigvecResult(lam, e.eigenvector, e.residual, "lemma")
    try:
        res = theorem_test(profile, lam)
    except (AssumptionViolated, AZero, InteriorSingular) as exc:
        raise NotAnEigenvalue(f"lambda={lam!r} is outside the criterion's domain: {exc}", None) from exc
    if not res.is_eigenvalue:
        raise NotAnEigenvalue(f"lambda={lam!r} is not an eigenvalue (decisive sigma = {res.sigma:.3e})", res.sigma)
    psi = eigenvector(profile, lam, res.phi, window, tp=res.products)
    r = residual(profile, lam, psi)
    out = EigvecResult(lam, psi, r, "transfer", res.sigma, phi=res.phi)
    a, b = fit_sites
    if profile.x_plus + b <= window:
        xs = np.arange(profile.x_plus + a, profile.x_plus + b + 1)
        out.fits.append(DecayFit("right", decay_fit(psi, xs), abs(res.products.z_inf.zeta_lt), (int(xs[0]), int(xs[-1]))))
    if profile.x_minus - b >= -window:
        xs = np.arange(profile.x_minus - a, profile.x_minus - b - 1, -1)
        out.fits.append(
            DecayFit("left", decay_fit(psi, xs), 1 / abs(res.products.z_minf.zeta_gt), (int(xs[0]), int(xs[-1])))
        )
    return out


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


@dataclass
class VerifyReport:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> str | None:
        return next((c.name for c in self.checks if not c.passed), None)

    def to_json(self) -> dict:
        return {"pass": self.passed, "first_failure": self.first_failure, "checks": [c.to_json() for c in self.checks]}


def _check_unitarity(profile: CoinProfile, psi0: State, t: int) -> list[Check]:
    n0 = psi0.norm2()
    worst, cone_ok = 0.0, True
    for s, psi in enumerate(iterate(profile, psi0, t)):
        worst = max(worst, abs(psi.norm2() - n0))
        nz = np.flatnonzero(np.any(psi.amps != 0, axis=1))
        if len(nz) and (psi.lo + nz[0] < psi0.lo - s or psi.lo + nz[-1] > psi0.hi + s):
            cone_ok = False
    return [
        Check("unitarity", worst <= 1e-10, {"t": t, "max_norm_drift": worst}),
        Check("light-cone", cone_ok, {"t": t}),
    ]


def _check_gates(profile: CoinProfile, grid: int = 1000) -> Check:
    """det T = 1 and real trace over a phase grid, for every coin slot.

    The trace is a difference of terms of size ~|T| that nearly cancel close
    to a zero of A, so its imaginary part is judged relative to the
    diagonal magnitude ``max(1, |T11| + |T22|)``.
    """
    lams = (np.arange(grid) + 0.5) * TWO_PI / grid
    worst_det = worst_tr = 0.0
    skipped = 0
    for coin in profile.coins():
        for lam in lams:
            try:
                rc = reduce_coefficients(coin, lam)
            except InteriorSingular:
                skipped += 1
                continue
            if abs(rc.A) <= TOL_A:
                skipped += 1
                continue
            det, tr = transfer_invariants(rc)
            scale = max(1.0, (abs(rc.z) + abs(rc.B * rc.C - rc.A * rc.D)) / abs(rc.A))
            worst_det = max(worst_det, abs(det - 1))
            worst_tr = max(worst_tr, abs(tr.imag) / scale)
    ok = worst_det <= GATE_SWEEP_TOL and worst_tr <= GATE_SWEEP_TOL
    return Check(
        "det-trace-gates",
        ok,
        {"grid": grid, "max_det_error": worst_det, "max_scaled_trace_imag": worst_tr, "skipped": skipped},
    )


def verify_suite(
    profile: CoinProfile,
    model: TwoPhaseOneDefect | None,
    psi0: State,
    t: int = 100,
    grid: int = 4096,
    window: int = 200,
) -> VerifyReport:
    """Unitarity, light cone, det/trace gates, compact vectors, and the
    closed-form / scan / oracle agreement, in that order."""
    checks = _check_unitarity(profile, psi0, max(t, 1))
    checks.append(_check_gates(profile))
    lemma = lemma_eigenpairs(profile)
    worst = max((e.residual for e in lemma), default=0.0)
    checks.append(Check("compact-vectors", worst <= 1e-12, {"count": len(lemma), "max_residual": worst}))
    an = analyze_spectrum(profile, model, grid, window)
    exact_ok = all(("scan-missing" not in e.flags and "closed-form-missing" not in e.flags) for e in an.entries)
    checks.append(
        Check(
            "closed-form-vs-scan",
            exact_ok,
            {"closed_form": an.has_closed_form, "lambdas": an.lambdas},
        )
    )
    res = [e.residual for e in an.entries if e.residual is not None]
    bad = [e.lam for e in an.entries if e.residual is None or e.residual > 1e-8]
    checks.append(Check("eigenvector-residuals", not bad, {"max_residual": max(res, default=0.0), "failing": bad}))
    missed = [e.lam for e in an.entries if "oracle-missed" in e.flags]
    checks.append(
        Check(
            "oracle-agreement",
            not missed and not an.unmatched_peaks,
            {"missed": missed, "unmatched": [p.to_json() for p in an.unmatched_peaks]},
        )
    )
    return VerifyReport(checks)
