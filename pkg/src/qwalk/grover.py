"""Three-state generalized Grover walks: closed forms and spectra.

Covers the Grover coin family, its closed-form transfer data, the compact
eigenvectors at the tail phases, the closed-form spectra of the one-defect
and two-phase models, and a numeric scan of the kernel criterion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import AssumptionViolated, AZero, DegenerateTheta, OutOfDomain, QWalkError, ValidationError
from .lattice import Coin, CoinProfile, State, make_coin
from .transfer import (
    TOL_A,
    TOL_KER,
    decisive_sigma,
    decisive_sigma_grid,
    eigenvector,
    reduce_coefficients,
    residual,
    sgn,
    theorem_test,
    transfer_matrix,
    zeta_pair,
)

TWO_PI = 2 * math.pi
DEDUP_TOL = 1e-9
SKIP_BAND = 1e-6
RESIDUAL_TOL = 1e-8
LEMMA_TOL = 1e-12
# strict inequalities are decided with this margin so that exact boundary
# cases (r = +-c) are not flipped by rounding
BOUNDARY_MARGIN = 1e-12

__all__ = [
    "GroverParams",
    "TwoPhaseOneDefect",
    "SpectrumEntry",
    "SpectrumReport",
    "grover_coin",
    "grover_transfer",
    "grover_trace",
    "grover_kernel_vectors",
    "lemma_eigenpairs",
    "one_defect_spectrum",
    "two_phase_spectrum",
    "two_phase_extra_phases",
    "one_defect_lambdas",
    "closed_form_spectrum",
    "spectrum_scan",
    "defect_phase_check",
    "phase_distance",
]


def phase_distance(a: complex, b: complex) -> float:
    """Angular distance between two unit complex numbers."""
    return abs(np.angle(a * np.conj(b)))


def _angle(z: complex) -> float:
    return float(np.mod(np.angle(z), TWO_PI))


@dataclass(frozen=True)
class GroverParams:
    theta: float
    delta: float = 0.0

    def __post_init__(self):
        if abs(math.sin(self.theta)) <= 1e-12:
            raise DegenerateTheta(f"theta must avoid 0 and pi, got {self.theta!r}")

    @property
    def c(self) -> float:
        return math.cos(self.theta)

    @property
    def s(self) -> float:
        return math.sin(self.theta)

    @classmethod
    def from_c(cls, c: float, delta: float = 0.0) -> "GroverParams":
        return cls(math.acos(c), delta)

    def to_json(self) -> dict:
        return {"theta": self.theta, "delta": self.delta}


def grover_coin(params: GroverParams) -> Coin:
    c, s = params.c, params.s
    r = s / math.sqrt(2)
    core = np.array(
        [
            [-(1 + c) / 2, r, (1 - c) / 2],
            [r, c, r],
            [(1 - c) / 2, r, -(1 + c) / 2],
        ],
        dtype=complex,
    )
    return make_coin(params.delta, core)


def grover_transfer(params: GroverParams, lam: float, tol_A: float = TOL_A) -> np.ndarray:
    c = params.c
    z = complex(np.exp(1j * (lam - params.delta)))
    A = (1 + c) * (1 - z) / (2 * (z - c))
    if abs(A) <= tol_A:
        raise AZero(f"A(lam) vanishes at lam = delta = {params.delta!r}")
    m = np.array(
        [
            [2 * z * (z - c), -(1 - c) * (1 + z)],
            [(1 - c) * (1 + z), -2 / z * (1 - c * z)],
        ],
        dtype=complex,
    )
    return m / ((1 + c) * (1 - z))


def grover_trace(params: GroverParams, lam: float) -> float:
    c = params.c
    return -2 * (2 * math.cos(lam - params.delta) + 1 - c) / (1 + c)


def grover_kernel_vectors(params: GroverParams, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form spans of ker(T - zeta_gt) and ker(T - zeta_lt)."""
    mu = lam - params.delta
    z = np.exp(1j * mu)
    if abs(z - 1) <= 1e-12 or abs(z + 1) <= 1e-12:
        raise OutOfDomain("closed-form kernels need e^{i lam} != +-e^{i delta}")
    t1 = 1 - math.cos(mu)
    t2 = math.cos(mu) - params.c
    if t2 <= 0:
        raise OutOfDomain(f"cos(lam - delta) - c = {t2:.3g} must be positive")
    root = 1j * sgn(math.sin(mu)) * math.sqrt(4 * t1 * t2)
    gt = np.array([t1 + t2, t2 - t1 - root], dtype=complex)
    lt = np.array([t1 + t2, t2 - t1 + root], dtype=complex)
    return gt, lt


@dataclass(frozen=True)
class TwoPhaseOneDefect:
    """Coin C_m for x < 0, C_o at the origin, C_p for x > 0."""

    m: GroverParams
    o: GroverParams
    p: GroverParams

    def profile(self) -> CoinProfile:
        return CoinProfile(grover_coin(self.m), grover_coin(self.p), (grover_coin(self.o),), -1, 1)

    @classmethod
    def one_defect(cls, theta: float, theta_o: float, delta: float = 0.0, delta_o: float | None = None) -> "TwoPhaseOneDefect":
        g = GroverParams(theta, delta)
        return cls(g, GroverParams(theta_o, delta if delta_o is None else delta_o), g)

    @classmethod
    def two_phase(cls, theta_m: float, delta_m: float, theta_p: float, delta_p: float) -> "TwoPhaseOneDefect":
        p = GroverParams(theta_p, delta_p)
        return cls(GroverParams(theta_m, delta_m), p, p)

    def deltas(self) -> list[float]:
        return [self.m.delta, self.o.delta, self.p.delta]

    def conjugate(self) -> "TwoPhaseOneDefect":
        f = lambda g: GroverParams(-g.theta, -g.delta)
        return TwoPhaseOneDefect(f(self.m), f(self.o), f(self.p))

    def to_json(self) -> dict:
        return {"m": self.m.to_json(), "o": self.o.to_json(), "p": self.p.to_json()}


@dataclass
class SpectrumEntry:
    phase: complex
    source: str  # "lemma" | "closed-form" | "scan" | "oracle"
    eigenvector: State | None = None
    residual: float | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def lam(self) -> float:
        return _angle(self.phase)

    @property
    def accepted(self) -> bool:
        return not self.flags

    def to_json(self) -> dict:
        d = {
            "phase_re": float(self.phase.real),
            "phase_im": float(self.phase.imag),
            "lambda_radians": self.lam,
            "source": self.source,
            "residual": self.residual,
        }
        if self.flags:
            d["flags"] = list(self.flags)
        return d


@dataclass
class SpectrumReport:
    model: dict = field(default_factory=dict)
    entries: list[SpectrumEntry] = field(default_factory=list)

    def add(self, entry: SpectrumEntry, tol: float = DEDUP_TOL) -> bool:
        """Append unless an entry already sits within ``tol`` on the circle."""
        for e in self.entries:
            if phase_distance(e.phase, entry.phase) <= tol:
                return False
        self.entries.append(entry)
        return True

    def extend(self, entries: Iterable[SpectrumEntry]) -> None:
        for e in entries:
            self.add(e)

    def phases(self, accepted_only: bool = True) -> list[complex]:
        es = [e for e in self.entries if e.accepted or not accepted_only]
        return [e.phase for e in sorted(es, key=lambda e: e.lam)]

    def lambdas(self, accepted_only: bool = True) -> list[float]:
        return sorted(_angle(p) for p in self.phases(accepted_only))

    def to_json(self) -> dict:
        return {"model": self.model, "entries": [e.to_json() for e in sorted(self.entries, key=lambda e: e.lam)]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _compact_vector(coin: Coin, lam: float, x0: int) -> State:
    rc = reduce_coefficients(coin, lam)
    n = coin.n
    a = np.zeros((2, n), dtype=complex)
    a[0, 0] = 1.0
    a[0, 1 : n - 1] = rc.E
    a[1, 1 : n - 1] = rc.F
    a[1, n - 1] = 1.0
    return State(x0, a).normalized()


def lemma_eigenpairs(profile: CoinProfile | TwoPhaseOneDefect, tol: float = LEMMA_TOL) -> list[SpectrumEntry]:
    """Compact two-site eigenvectors at the tail phases ``e^{i delta_{+-inf}}``.

    The right vector sits on x_plus+1, x_plus+2 and the left one on
    x_minus-2, x_minus-1; both lie in a constant-coin region.  A candidate is
    kept only if its exact residual is at most ``tol``.
    """
    if isinstance(profile, TwoPhaseOneDefect):
        profile = profile.profile()
    out = []
    for coin, x0 in ((profile.right, profile.x_plus + 1), (profile.left, profile.x_minus - 2)):
        lam = coin.delta
        psi = _compact_vector(coin, lam, x0)
        r = residual(profile, lam, psi.padded(2))
        if r <= tol:
            entry = SpectrumEntry(complex(np.exp(1j * lam)), "lemma", psi, r)
            if all(phase_distance(e.phase, entry.phase) > DEDUP_TOL for e in out):
                out.append(entry)
    return out


def _verify_entry(profile: CoinProfile, phase: complex, source: str, half_width: int = 200) -> SpectrumEntry:
    entry = SpectrumEntry(phase, source)
    if abs(abs(phase) - 1) > 1e-10:
        entry.flags.append("not-unit-modulus")
        return entry
    lam = _angle(phase)
    try:
        res = theorem_test(profile, lam)
    except (AssumptionViolated, AZero, QWalkError) as exc:
        entry.flags.append(f"assumption-failed: {exc}")
        return entry
    if not res.is_eigenvalue:
        entry.flags.append("theorem-test-failed")
        return entry
    psi = eigenvector(profile, lam, res.phi, half_width, tp=res.products)
    entry.eigenvector = psi
    entry.residual = residual(profile, lam, psi)
    if entry.residual > RESIDUAL_TOL:
        entry.flags.append("residual-too-large")
    return entry


def one_defect_lambdas(c: float, c_o: float, delta: float = 0.0) -> list[complex]:
    """Closed-form extra eigenvalues of the one-defect model (empty if c >= c_o)."""
    if not c < c_o:
        return []
    den = 1 - c + 2 * c_o
    rad = 1 - c + 2 * c_o - (c + c_o**2)
    root = (1 + c_o) * math.sqrt(rad)
    rot = np.exp(1j * delta)
    return [complex((c + c_o**2 + 1j * root) / den * rot), complex((c + c_o**2 - 1j * root) / den * rot)]


def one_defect_spectrum(
    c: float,
    c_o: float,
    delta: float = 0.0,
    verify: bool = True,
    model: TwoPhaseOneDefect | None = None,
) -> SpectrumReport:
    """Point spectrum of the one-defect Grover walk with a common phase.

    Eigenvectors depend on the sign of sin(theta), so pass ``model`` when
    the coins were not built from ``theta = acos(c)``.
    """
    if model is None:
        model = TwoPhaseOneDefect.one_defect(math.acos(c), math.acos(c_o), delta)
    prof = model.profile()
    report = SpectrumReport({"kind": "one-defect", "c": c, "c_o": c_o, "delta": delta})
    report.extend(lemma_eigenpairs(prof))
    for z in one_defect_lambdas(c, c_o, delta):
        report.add(_verify_entry(prof, z, "closed-form") if verify else SpectrumEntry(z, "closed-form"))
    return report


def _same_phase(a: float, b: float, tol: float = 1e-12) -> bool:
    return phase_distance(np.exp(1j * a), np.exp(1j * b)) <= tol


def two_phase_extra_phases(model: TwoPhaseOneDefect) -> list[complex]:
    """Closed-form eigenvalues of the two-phase model beyond the tail phases."""
    dm, dp = model.m.delta, model.p.delta
    cm, cp = model.m.c, model.p.c
    if _same_phase(dm, dp):
        return []
    q = math.sqrt(2 * (1 - math.cos(dm - dp)))
    if abs(cm - cp) <= 1e-14:
        c = cp
        r = math.sin(dm - dp) / q
        base = complex(1j * (np.exp(1j * dp) - np.exp(1j * dm)) / q)
        out = []
        # e^{i lam} sits at the midpoint phase with cos(lam - delta_m) = r and
        # -e^{i lam} has cos = -r; each is an eigenvalue when it lies in the
        # hyperbolic band cos(. - delta) > c
        if r - c > BOUNDARY_MARGIN:
            out.append(base)
        if -r - c > BOUNDARY_MARGIN:
            out.append(-base)
        return out
    # unequal c: candidate quotient, then the sign and cosine gates
    den = (1 - cm) * np.exp(-1j * dp) - (1 - cp) * np.exp(-1j * dm)
    root = math.sqrt(2 * (1 - cm) * (1 - cp) * (1 - math.cos(dm - dp)))
    out = []
    for sg in (1, -1):
        z = complex(((cp - cm) + sg * 1j * root) / den)
        lam = np.angle(z)
        if abs(abs(z) - 1) > 1e-10:
            continue
        if math.sin(lam - dp) * math.sin(lam - dm) < 0 and math.cos(lam - dm) - cm > BOUNDARY_MARGIN:
            out.append(z)
    return out


def two_phase_spectrum(model: TwoPhaseOneDefect, verify: bool = True) -> SpectrumReport:
    """Point spectrum of the two-phase model (origin coin equal to C_p)."""
    if model.o != model.p:
        raise ValidationError("two-phase spectrum needs C_o = C_p")
    prof = model.profile()
    report = SpectrumReport({"kind": "two-phase", **model.to_json()})
    report.extend(lemma_eigenpairs(prof))
    for z in two_phase_extra_phases(model):
        report.add(_verify_entry(prof, z, "closed-form") if verify else SpectrumEntry(z, "closed-form"))
    return report


def closed_form_spectrum(model: TwoPhaseOneDefect, verify: bool = True) -> SpectrumReport | None:
    """Closed-form spectrum when the model falls in a solved family, else None."""
    same_tail = model.m == model.p
    if same_tail and _same_phase(model.o.delta, model.p.delta):
        rep = one_defect_spectrum(model.p.c, model.o.c, model.p.delta, verify, model=model)
        rep.model = {"kind": "one-defect", **model.to_json()}
        return rep
    if model.o == model.p:
        return two_phase_spectrum(model, verify)
    return None


def _refine(profile: CoinProfile, a: float, b: float, xtol: float = 1e-14) -> float:
    """Golden-section minimum of the decisive singular value on [a, b].

    The minimum is V-shaped at a root, where pure comparison steps keep
    converging to near machine precision.
    """

    def f(lam):
        s = decisive_sigma(profile, lam)
        return s if np.isfinite(s) else np.inf

    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return c if fc <= fd else d


def spectrum_scan(
    model: CoinProfile | TwoPhaseOneDefect,
    grid_size: int = 4096,
    half_width: int = 200,
    tol_ker: float = TOL_KER,
) -> SpectrumReport:
    """Numeric sweep of the kernel criterion over lam in [0, 2 pi).

    Local minima of the decisive singular value are refined by golden-section
    search and accepted when the refined value is below ``tol_ker`` and
    the reconstructed eigenvector has residual <= 1e-8 on the window.  Phases
    within SKIP_BAND of a coin phase are left to the compact-vector path.
    """
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    prof = model.profile() if isinstance(model, TwoPhaseOneDefect) else model
    report = SpectrumReport({"kind": "scan", "grid_size": grid_size})
    report.extend(lemma_eigenpairs(prof))
    deltas = [c.delta for c in prof.coins()]
    h = TWO_PI / grid_size
    lams = np.arange(grid_size) * h

    def skipped(lam: float) -> bool:
        return any(_same_phase(lam, d, SKIP_BAND) for d in deltas)

    sig = decisive_sigma_grid(prof, lams)
    sig[[skipped(l) for l in lams]] = np.nan
    filled = np.where(np.isfinite(sig), sig, np.inf)
    prev, nxt = np.roll(filled, 1), np.roll(filled, -1)
    cand = np.flatnonzero(np.isfinite(sig) & (filled <= prev) & (filled <= nxt))
    for i in cand:
        lam = _refine(prof, lams[i] - h, lams[i] + h)
        lam = float(np.mod(lam, TWO_PI))
        if skipped(lam):
            continue
        s = decisive_sigma(prof, lam)
        if not (np.isfinite(s) and s <= tol_ker):
            continue
        entry = _verify_entry(prof, complex(np.exp(1j * lam)), "scan", half_width)
        if entry.accepted:
            report.add(entry)
    return report


def defect_phase_check(model: TwoPhaseOneDefect, lam: float | None = None, tol: float = 1e-8) -> bool:
    """Whether ``e^{i delta_o}`` is an eigenvalue of a one-defect model with
    delta_o != delta.

    At that phase the origin coin has A = 0 and the generalized eigenvectors
    are ``T^{x-1} [k2, k2]`` (x > 0) and ``T^x [k1, k1]`` (x <= 0), so an
    eigenvector needs the tail to be hyperbolic and [1, 1] to be a tail
    eigenvector.
    """
    if model.m != model.p:
        raise ValidationError("defect phase check applies to one-defect models (C_m = C_p)")
    lam = model.o.delta if lam is None else lam
    if _same_phase(lam, model.p.delta):
        raise ValidationError("defect phase coincides with the tail phase")
    T = transfer_matrix(grover_coin(model.p), lam)
    zp = zeta_pair(T)
    if not zp.hyperbolic():
        return False
    ones = np.array([1.0, 1.0], dtype=complex)
    for zeta in (zp.zeta_lt, zp.zeta_gt):
        M = T - zeta * np.eye(2)
        if np.linalg.norm(M @ ones) <= tol * np.linalg.norm(M, 2) * math.sqrt(2):
            return True
    return False
