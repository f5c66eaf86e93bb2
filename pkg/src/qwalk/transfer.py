"""Transfer-matrix reduction of the eigenvalue problem ``U psi = e^{i lam} psi``.

The self-loop components 2..n-1 are eliminated site by site, leaving the
boundary pair ``(psi_1(x-1), psi_n(x))`` which is propagated by a 2x2
transfer matrix.  An eigenvalue exists iff both tail transfer matrices are
hyperbolic and one seed vector decays on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AssumptionViolated, AZero, InteriorSingular, NumericallyMarginal, ZeroVector
from .evolution import step
from .lattice import Coin, CoinProfile, State, complex_to_pair

TOL_A = 1e-10
TOL_KER = 1e-8
TOL_GATE = 1e-8
TOL_HYPERBOLIC = 1e-10
TOL_INTERIOR = 1e-12

__all__ = [
    "ReducedCoefficients",
    "ZetaPair",
    "GateReport",
    "Kernel",
    "TheoremResult",
    "ReducedVector",
    "reduce_coefficients",
    "transfer_matrix",
    "zeta_pair",
    "coin_zeta_pair",
    "transfer_invariants",
    "sgn",
    "assumption_check",
    "kernel_vector",
    "transfer_products",
    "decisive_sigma",
    "decisive_sigma_grid",
    "theorem_test",
    "build_reduced_vector",
    "inverse_iota",
    "iota",
    "residual",
    "eigenvector",
    "best_window_residual",
]


def sgn(r: float) -> int:
    return 1 if r > 0 else (-1 if r < 0 else 0)


@dataclass(frozen=True)
class ReducedCoefficients:
    A: complex
    B: complex
    C: complex
    D: complex
    E: np.ndarray  # E_k for k = 2 .. n-1
    F: np.ndarray
    z: complex  # e^{i(lam - delta)}


def reduce_coefficients(coin: Coin, lam: float, tol: float = TOL_INTERIOR) -> ReducedCoefficients:
    """Eliminate the interior components of one site's eigen-relations.

    Solves ``(z I - a_int) psi_int = a_int,1 psi_1 + a_int,n psi_n`` with
    ``z = e^{i(lam - delta)}``, which is the closed substitution chain for
    any n >= 3.
    """
    a = coin.core
    n = coin.n
    z = complex(np.exp(1j * (lam - coin.delta)))
    inner = slice(1, n - 1)
    M = z * np.eye(n - 2) - a[inner, inner]
    smin = np.linalg.svd(M, compute_uv=False)[-1]
    if smin <= tol:
        raise InteriorSingular(f"interior elimination singular at lam={lam!r} (sigma_min={smin:.2e})")
    EF = np.linalg.solve(M, np.column_stack([a[inner, 0], a[inner, n - 1]]))
    E, F = EF[:, 0], EF[:, 1]
    A = a[0, 0] + a[0, inner] @ E
    B = a[0, n - 1] + a[0, inner] @ F
    C = a[n - 1, 0] + a[n - 1, inner] @ E
    D = a[n - 1, n - 1] + a[n - 1, inner] @ F
    return ReducedCoefficients(complex(A), complex(B), complex(C), complex(D), E, F, z)


def _transfer_from(rc: ReducedCoefficients, tol_A: float, x: int | None = None) -> np.ndarray:
    if abs(rc.A) <= tol_A:
        raise AZero(f"A(lam) = {rc.A:.3e} vanishes" + (f" at x={x}" if x is not None else ""), x)
    z = rc.z
    return np.array(
        [[z, -rc.B], [rc.C, -(rc.B * rc.C - rc.A * rc.D) / z]],
        dtype=complex,
    ) / rc.A


def _inverse_from(rc: ReducedCoefficients, tol_A: float, x: int | None = None) -> np.ndarray:
    # closed-form inverse; det T = D/A, so only D has to be nonzero
    if abs(rc.D) <= tol_A:
        raise AssumptionViolated(
            f"D(lam) = {rc.D:.3e} vanishes" + (f" at x={x}" if x is not None else "") + "; T is not invertible",
            item=1,
        )
    z = rc.z
    return np.array(
        [[-(rc.B * rc.C - rc.A * rc.D) / z, rc.B], [-rc.C, z]],
        dtype=complex,
    ) / rc.D


def transfer_matrix(coin: Coin, lam: float, tol_A: float = TOL_A) -> np.ndarray:
    """T with ``[psi_1(x), psi_n(x+1)] = T [psi_1(x-1), psi_n(x)]``."""
    return _transfer_from(reduce_coefficients(coin, lam), tol_A)


@dataclass(frozen=True)
class ZetaPair:
    zeta_gt: complex
    zeta_lt: complex
    trace: float

    @property
    def discriminant(self) -> float:
        return self.trace**2 - 4.0

    def hyperbolic(self, tol: float = TOL_HYPERBOLIC) -> bool:
        return self.discriminant > tol


def _check_gates(det: complex, tr: complex, tol: float) -> None:
    if abs(det - 1) > tol:
        raise AssumptionViolated(f"det T = {det.real:.12g}{det.imag:+.3g}j differs from 1", item=2)
    if abs(tr.imag) > tol:
        raise AssumptionViolated(f"tr T = {tr:.6g} is not real", item=3)


def transfer_invariants(rc: ReducedCoefficients) -> tuple[complex, complex]:
    # det T = D/A in closed form; the entries of T scale like 1/A, so the
    # generic 2x2 determinant loses ~|T|^2 eps near zeros of A
    return rc.D / rc.A, (rc.z - (rc.B * rc.C - rc.A * rc.D) / rc.z) / rc.A


def _pair(det: complex, tr: float) -> ZetaPair:
    disc = tr * tr - 4.0
    s = sgn(tr)
    if disc >= 0:
        gt = (tr + s * np.sqrt(disc)) / 2
        # small root from the product avoids cancellation for large |tr|
        lt = det / gt
        return ZetaPair(complex(gt), complex(lt), tr)
    root = 1j * np.sqrt(-disc)
    s = s or 1
    return ZetaPair(complex((tr + s * root) / 2), complex((tr - s * root) / 2), tr)


def zeta_pair(T: np.ndarray, tol: float = TOL_GATE) -> ZetaPair:
    """Large/small eigenvalues of a det-1, real-trace transfer matrix.

    In the elliptic regime (tr^2 < 4) both roots lie on the unit circle and
    ``zeta_gt`` is the one with positive imaginary part times sgn(tr)
    (positive when tr = 0).
    """
    det, tr = complex(np.linalg.det(T)), complex(np.trace(T))
    _check_gates(det, tr, tol)
    return _pair(det, tr.real)


def coin_zeta_pair(coin: Coin, lam: float, tol_A: float = TOL_A, tol: float = TOL_GATE) -> ZetaPair:
    """:func:`zeta_pair` of a coin's transfer matrix, with det and trace taken
    from the reduced coefficients."""
    rc = reduce_coefficients(coin, lam)
    if abs(rc.A) <= tol_A:
        raise AZero(f"A(lam) = {rc.A:.3e} vanishes", None)
    det, tr = transfer_invariants(rc)
    _check_gates(det, tr, tol)
    return _pair(det, tr.real)


@dataclass(frozen=True)
class GateReport:
    ok: bool
    failed_item: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def assumption_check(profile: CoinProfile, lam: float, tol_A: float = TOL_A, tol: float = TOL_GATE) -> GateReport:
    """Gates 1-3 of the transfer-matrix criterion at phase ``lam``.

    Coins are eventually constant, so checking every coin slot covers all x.
    """
    for coin in profile.coins():
        try:
            rc = reduce_coefficients(coin, lam)
        except InteriorSingular as exc:
            return GateReport(False, 1, str(exc))
        if abs(rc.A) <= tol_A:
            return GateReport(False, 1, f"A(lam) = {abs(rc.A):.3e} vanishes for coin with delta={coin.delta:.6g}")
    for coin in (profile.right, profile.left):
        try:
            _check_gates(*transfer_invariants(reduce_coefficients(coin, lam)), tol)
        except AssumptionViolated as exc:
            return GateReport(False, exc.item, str(exc))
    return GateReport(True)


class Kernel(NamedTuple):
    vector: np.ndarray
    full: bool = False


def kernel_vector(M: np.ndarray, tol: float = TOL_KER) -> Kernel | None:
    """Unit vector spanning the (numerical) kernel of a 2x2 matrix, if any."""
    M = np.asarray(M, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    if s[0] == 0.0:
        return Kernel(np.array([1.0, 0.0], dtype=complex), True)
    if s[-1] <= tol * (s[0] + 1.0):
        return Kernel(vh[-1].conj(), False)
    return None


@dataclass(frozen=True)
class TransferProducts:
    T_inf: np.ndarray
    T_minf: np.ndarray
    T_plus: np.ndarray
    T_minus: np.ndarray
    z_inf: ZetaPair
    z_minf: ZetaPair
    # per-site transfer matrices for x_minus .. x_plus, and their inverses
    local: dict
    local_inv: dict


def transfer_products(profile: CoinProfile, lam: float, tol_A: float = TOL_A) -> TransferProducts:
    gate = assumption_check(profile, lam, tol_A)
    if not gate:
        raise AssumptionViolated(gate.message, gate.failed_item)
    local, local_inv = {}, {}
    for x in range(profile.x_minus, profile.x_plus + 1):
        rc = reduce_coefficients(profile.coin_at(x), lam)
        local[x] = _transfer_from(rc, tol_A, x)
        local_inv[x] = _inverse_from(rc, tol_A, x)
    T_plus = np.eye(2, dtype=complex)
    for x in range(0, profile.x_plus):
        T_plus = local[x] @ T_plus
    T_minus = np.eye(2, dtype=complex)
    for x in range(-1, profile.x_minus - 1, -1):
        T_minus = local_inv[x] @ T_minus
    T_inf, T_minf = local[profile.x_plus], local[profile.x_minus]
    z_inf = coin_zeta_pair(profile.right, lam, tol_A)
    z_minf = coin_zeta_pair(profile.left, lam, tol_A)
    return TransferProducts(T_inf, T_minf, T_plus, T_minus, z_inf, z_minf, local, local_inv)


def _unit_rows(M: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(M, 2)
    return M / nrm if nrm > 0 else M


def _stack(tp: TransferProducts) -> tuple[np.ndarray, np.ndarray]:
    M_plus = (tp.T_inf - tp.z_inf.zeta_lt * np.eye(2)) @ tp.T_plus
    M_minus = (tp.T_minf - tp.z_minf.zeta_gt * np.eye(2)) @ tp.T_minus
    return M_plus, M_minus


@dataclass(frozen=True)
class TheoremResult:
    lam: float
    is_eigenvalue: bool
    phi: np.ndarray | None
    hyperbolic: bool
    sigmas: np.ndarray | None  # singular values of the normalized 4x2 stack
    products: TransferProducts

    @property
    def sigma(self) -> float | None:
        return None if self.sigmas is None else float(self.sigmas[-1])

    def to_json(self, residual: float | None = None) -> dict:
        return {
            "lambda": float(self.lam),
            "pass": bool(self.is_eigenvalue),
            "phi": None if self.phi is None else [complex_to_pair(v) for v in self.phi],
            "zeta_lt_inf": complex_to_pair(self.products.z_inf.zeta_lt),
            "zeta_gt_minf": complex_to_pair(self.products.z_minf.zeta_gt),
            "sigma": self.sigma,
            "residual": residual,
        }


def decisive_sigma(profile: CoinProfile, lam: float) -> float:
    """Smallest singular value of the normalized kernel stack; nan outside the
    hyperbolic, Assumption-passing region."""
    try:
        tp = transfer_products(profile, lam)
    except (AssumptionViolated, AZero, InteriorSingular):
        return float("nan")
    if not (tp.z_inf.hyperbolic() and tp.z_minf.hyperbolic()):
        return float("nan")
    Mp, Mm = _stack(tp)
    return float(np.linalg.svd(np.vstack([_unit_rows(Mp), _unit_rows(Mm)]), compute_uv=False)[-1])


def _grid_transfer(coin: Coin, lams: np.ndarray, tol_A: float) -> tuple[np.ndarray, ...]:
    """Transfer matrices over a phase grid, shape (N, 2, 2), their inverses,
    determinants D/A and a validity mask."""
    a = coin.core
    n = coin.n
    z = np.exp(1j * (lams - coin.delta))
    inner = slice(1, n - 1)
    M = z[:, None, None] * np.eye(n - 2) - a[inner, inner][None]
    ok = np.linalg.svd(M, compute_uv=False)[:, -1] > TOL_INTERIOR
    M[~ok] = np.eye(n - 2)
    rhs = np.broadcast_to(np.column_stack([a[inner, 0], a[inner, n - 1]]), (len(lams), n - 2, 2))
    EF = np.linalg.solve(M, rhs)
    E, F = EF[:, :, 0], EF[:, :, 1]
    A = a[0, 0] + E @ a[0, inner]
    B = a[0, n - 1] + F @ a[0, inner]
    C = a[n - 1, 0] + E @ a[n - 1, inner]
    D = a[n - 1, n - 1] + F @ a[n - 1, inner]
    ok &= np.abs(A) > tol_A
    A = np.where(ok, A, 1.0)
    T = np.empty((len(lams), 2, 2), dtype=complex)
    T[:, 0, 0] = z / A
    T[:, 0, 1] = -B / A
    T[:, 1, 0] = C / A
    T[:, 1, 1] = -(B * C - A * D) / (z * A)
    ok &= np.abs(D) > tol_A
    Dn = np.where(ok, D, 1.0)
    Ti = np.empty_like(T)
    Ti[:, 0, 0] = -(B * C - A * D) / (z * Dn)
    Ti[:, 0, 1] = B / Dn
    Ti[:, 1, 0] = -C / Dn
    Ti[:, 1, 1] = z / Dn
    return T, Ti, D / A, ok


def decisive_sigma_grid(profile: CoinProfile, lams, tol_A: float = TOL_A, tol: float = TOL_GATE) -> np.ndarray:
    """Vectorized :func:`decisive_sigma` over an array of phases."""
    lams = np.asarray(lams, dtype=float)
    N = len(lams)
    ok = np.ones(N, dtype=bool)
    local, inv, dets = {}, {}, {}
    for x in range(profile.x_minus, profile.x_plus + 1):
        local[x], inv[x], dets[x], okx = _grid_transfer(profile.coin_at(x), lams, tol_A)
        ok &= okx
    zetas = []
    for x in (profile.x_plus, profile.x_minus):
        T, det = local[x], dets[x]
        tr = np.trace(T, axis1=1, axis2=2)
        ok &= (np.abs(det - 1) <= tol) & (np.abs(tr.imag) <= tol)
        trr = tr.real
        disc = trr * trr - 4.0
        ok &= disc > TOL_HYPERBOLIC
        gt = (trr + np.sign(trr) * np.sqrt(np.where(disc > 0, disc, 0.0))) / 2
        gt = np.where(gt == 0, 1.0, gt)
        zetas.append((gt, det / gt))
    eye = np.eye(2)
    T_plus = np.broadcast_to(eye, (N, 2, 2)).astype(complex)
    for x in range(0, profile.x_plus):
        T_plus = local[x] @ T_plus
    T_minus = np.broadcast_to(eye, (N, 2, 2)).astype(complex)
    for x in range(-1, profile.x_minus - 1, -1):
        T_minus = inv[x] @ T_minus
    Mp = (local[profile.x_plus] - zetas[0][1][:, None, None] * eye) @ T_plus
    Mm = (local[profile.x_minus] - zetas[1][0][:, None, None] * eye) @ T_minus
    for Mx in (Mp, Mm):
        nrm = np.linalg.svd(Mx, compute_uv=False)[:, 0]
        Mx /= np.where(nrm > 0, nrm, 1.0)[:, None, None]
    sig = np.linalg.svd(np.concatenate([Mp, Mm], axis=1), compute_uv=False)[:, -1]
    return np.where(ok, sig, np.nan)


def theorem_test(
    profile: CoinProfile,
    lam: float,
    tol_ker: float = TOL_KER,
    strict: bool = False,
) -> TheoremResult:
    """Decide whether ``e^{i lam}`` is an eigenvalue via the kernel criterion.

    With ``strict=True`` a decisive singular value inside
    ``[0.1 tol, 10 tol]`` raises NumericallyMarginal instead of deciding.
    """
    tp = transfer_products(profile, lam)
    hyper = tp.z_inf.hyperbolic() and tp.z_minf.hyperbolic()
    if not hyper:
        return TheoremResult(lam, False, None, False, None, tp)
    Mp, Mm = _stack(tp)
    _, s, vh = np.linalg.svd(np.vstack([_unit_rows(Mp), _unit_rows(Mm)]))
    sigma = s[-1]
    if strict and 0.1 * tol_ker <= sigma <= 10 * tol_ker:
        raise NumericallyMarginal(f"decisive singular value {sigma:.3e} inside the tolerance band", sigma)
    if sigma <= tol_ker:
        phi = vh[-1].conj()
        return TheoremResult(lam, True, phi / np.linalg.norm(phi), True, s, tp)
    return TheoremResult(lam, False, None, True, s, tp)


@dataclass(frozen=True, eq=False)
class ReducedVector:
    """Values of the reduced vector on [lo, hi].

    ``values`` are stored divided by ``exp(log_scale)`` so that growing tails
    never overflow; eigen-relations are scale free.
    """

    lo: int
    values: np.ndarray
    phi: np.ndarray
    zeta_lt_inf: complex | None = None
    zeta_gt_minf: complex | None = None
    log_scale: float = 0.0
    geometric: tuple[bool, bool] = (False, False)  # (right, left)

    @property
    def hi(self) -> int:
        return self.lo + self.values.shape[0] - 1

    def at(self, x: int) -> np.ndarray:
        return self.values[x - self.lo]


def _in_kernel(T: np.ndarray, zeta: complex, v: np.ndarray, tol: float = 1e-6) -> bool:
    M = T - zeta * np.eye(2)
    scale = np.linalg.norm(M, 2) * np.linalg.norm(v)
    return scale == 0 or np.linalg.norm(M @ v) <= tol * scale


def _tail(v0: np.ndarray, M: np.ndarray, steps: int, zeta: complex | None):
    """Unit directions and log norms of M^k v0 for k = 1..steps.

    With ``zeta`` given the tail is taken as the pure geometric sequence
    zeta^k v0.
    """
    dirs = np.empty((steps, 2), dtype=complex)
    logs = np.empty(steps)
    nv = np.linalg.norm(v0)
    if nv == 0:
        dirs[:] = 0
        logs[:] = -np.inf
        return dirs, logs
    u, ell = v0 / nv, np.log(nv)
    if zeta is not None:
        ph, lz = zeta / abs(zeta), np.log(abs(zeta))
        k = np.arange(1, steps + 1)
        dirs[:] = (ph**k)[:, None] * u[None, :]
        logs[:] = ell + k * lz
        return dirs, logs
    for k in range(steps):
        w = M @ u
        nw = np.linalg.norm(w)
        u, ell = w / nw, ell + np.log(nw)
        dirs[k], logs[k] = u, ell
    return dirs, logs


def build_reduced_vector(
    profile: CoinProfile,
    lam: float,
    phi,
    lo: int,
    hi: int,
    geometric: bool | None = None,
    tp: TransferProducts | None = None,
) -> ReducedVector:
    """Reduced vector seeded by ``phi`` at the origin, on the window [lo, hi].

    Between the cuts the transfer products are applied directly.  Beyond a
    cut the tail is the geometric sequence of the decaying tail eigenvalue
    whenever the seed lands in that eigenvector's line (``geometric=None``
    decides per side); otherwise the tail transfer matrix is iterated.
    """
    if lo > profile.x_minus or hi < profile.x_plus:
        raise ValueError(f"window [{lo}, {hi}] must contain [{profile.x_minus}, {profile.x_plus}]")
    phi = np.asarray(phi, dtype=complex)
    if tp is None:
        tp = transfer_products(profile, lam)
    core: dict[int, np.ndarray] = {0: phi}
    v = phi
    for x in range(0, profile.x_plus):
        v = tp.local[x] @ v
        core[x + 1] = v
    v = phi
    for x in range(-1, profile.x_minus - 1, -1):
        v = tp.local_inv[x] @ v
        core[x] = v
    v_plus, v_minus = core[profile.x_plus], core[profile.x_minus]

    hyper_r = tp.z_inf.hyperbolic()
    hyper_l = tp.z_minf.hyperbolic()
    if geometric is None:
        geo_r = hyper_r and _in_kernel(tp.T_inf, tp.z_inf.zeta_lt, v_plus)
        geo_l = hyper_l and _in_kernel(tp.T_minf, tp.z_minf.zeta_gt, v_minus)
    else:
        geo_r = geo_l = bool(geometric)

    n_r = hi - profile.x_plus
    n_l = profile.x_minus - lo
    dr, lr = _tail(v_plus, tp.T_inf, n_r, tp.z_inf.zeta_lt if geo_r else None)
    dl, ll = _tail(v_minus, tp.local_inv[profile.x_minus], n_l, 1 / tp.z_minf.zeta_gt if geo_l else None)

    m = hi - lo + 1
    dirs = np.zeros((m, 2), dtype=complex)
    logs = np.full(m, -np.inf)
    for x, w in core.items():
        nw = np.linalg.norm(w)
        if nw > 0:
            dirs[x - lo], logs[x - lo] = w / nw, np.log(nw)
    if n_r:
        dirs[profile.x_plus + 1 - lo :] = dr
        logs[profile.x_plus + 1 - lo :] = lr
    if n_l:
        # dl[k] is site x_minus - 1 - k
        dirs[: profile.x_minus - lo] = dl[::-1]
        logs[: profile.x_minus - lo] = ll[::-1]
    shift = float(np.max(logs)) if np.isfinite(np.max(logs)) else 0.0
    with np.errstate(under="ignore"):
        values = dirs * np.exp(logs - shift)[:, None]
    return ReducedVector(
        lo,
        values,
        phi,
        tp.z_inf.zeta_lt,
        tp.z_minf.zeta_gt,
        shift,
        (bool(geo_r), bool(geo_l)),
    )


def inverse_iota(profile: CoinProfile, lam: float, tv: ReducedVector) -> State:
    """Generalized eigenvector on [tv.lo, tv.hi - 1] from its reduced vector."""
    n = profile.n
    cache: dict[int, ReducedCoefficients] = {}
    out = np.zeros((tv.values.shape[0] - 1, n), dtype=complex)
    for i, x in enumerate(range(tv.lo, tv.hi)):
        coin = profile.coin_at(x)
        rc = cache.get(id(coin))
        if rc is None:
            rc = cache[id(coin)] = reduce_coefficients(coin, lam)
        p1 = tv.values[i + 1, 0]
        pn = tv.values[i, 1]
        out[i, 0] = p1
        out[i, 1 : n - 1] = rc.E * p1 + rc.F * pn
        out[i, n - 1] = pn
    return State(tv.lo, out)


def iota(psi: State) -> ReducedVector:
    """``x -> (psi_1(x-1), psi_n(x))`` on [psi.lo + 1, psi.hi]."""
    vals = np.column_stack([psi.amps[:-1, 0], psi.amps[1:, psi.n - 1]])
    lo = psi.lo + 1
    phi = vals[-lo] if lo <= 0 <= psi.hi else np.zeros(2, dtype=complex)
    return ReducedVector(lo, vals, phi)


def residual(profile: CoinProfile, lam: float, psi: State, exclude_boundary: bool = True) -> float:
    """``||U psi - e^{i lam} psi|| / ||psi||``.

    With ``exclude_boundary`` the two window edge sites are dropped from the
    numerator, since a truncated infinite vector cannot satisfy the relations
    there.
    """
    nrm2 = psi.norm2()
    if nrm2 == 0:
        raise ZeroVector("residual of the zero vector is undefined")
    upsi = step(profile, psi)
    diff = upsi.amps - np.exp(1j * lam) * psi.extended(upsi.lo, upsi.hi).amps
    if exclude_boundary:
        diff = diff[2:-2]
    return float(np.sqrt(np.sum(diff.real**2 + diff.imag**2) / nrm2))


def eigenvector(profile: CoinProfile, lam: float, phi, half_width: int = 200, tp: TransferProducts | None = None) -> State:
    """Normalized eigenvector on [-half_width, half_width]."""
    tv = build_reduced_vector(profile, lam, phi, -half_width, half_width + 1, tp=tp)
    return inverse_iota(profile, lam, tv).normalized()


def best_window_residual(profile: CoinProfile, lam: float, half_width: int = 200) -> float:
    """Smallest full residual over all reconstructions truncated to the window.

    The two-dimensional family of generalized eigenvectors is spanned by the
    seeds that decay to the right and to the left respectively; each is built
    with its decaying side geometric and its growing side iterated, then the
    family is orthonormalized and the minimum over it is a singular value.
    """
    tp = transfer_products(profile, lam)
    seeds = []
    if tp.z_inf.hyperbolic() and tp.z_minf.hyperbolic():
        Mp, Mm = _stack(tp)
        for M in (Mp, Mm):
            k = kernel_vector(M, tol=1e-6)
            if k is not None:
                seeds.append(k.vector)
    if len(seeds) < 2:
        seeds = [np.array([1, 0], complex), np.array([0, 1], complex)]
    cols = []
    for s in seeds:
        tv = build_reduced_vector(profile, lam, s, -half_width, half_width + 1, tp=tp)
        psi = inverse_iota(profile, lam, tv)
        cols.append(psi.amps.ravel() / np.linalg.norm(psi.amps))
    B = np.column_stack(cols)
    u, s, _ = np.linalg.svd(B, full_matrices=False)
    basis = u[:, s > 1e-10 * s[0]]
    lo = -half_width
    res = []
    for j in range(basis.shape[1]):
        psi = State(lo, basis[:, j].reshape(-1, profile.n))
        upsi = step(profile, psi)
        res.append((upsi.amps - np.exp(1j * lam) * psi.extended(upsi.lo, upsi.hi).amps).ravel())
    R = np.column_stack(res)
    return float(np.linalg.svd(R, compute_uv=False)[-1])
