"""Coins, coin profiles and finitely supported states on the integer lattice."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import BadDimension, DimensionMismatch, ForbiddenDiagonal, NonUnitary, ValidationError

UNITARITY_TOL = 1e-12

__all__ = [
    "Coin",
    "CoinProfile",
    "State",
    "make_coin",
    "state_norm2",
    "coin_at",
    "point_mass",
    "origin_vector",
    "complex_to_pair",
    "pair_to_complex",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def complex_to_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def pair_to_complex(p: Any) -> complex:
    if isinstance(p, (int, float)):
        return complex(p)
    if len(p) != 2:
        raise ValueError(f"complex numbers are encoded as [re, im], got {p!r}")
    return complex(float(p[0]), float(p[1]))


@dataclass(frozen=True, eq=False)
class Coin:
    """One site's coin ``e^{i delta} * core``.

    Build through :func:`make_coin`; the raw constructor does not validate.
    """

    delta: float
    core: np.ndarray

    @property
    def n(self) -> int:
        return self.core.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.delta) * self.core

    def to_json(self) -> dict:
        return {
            "delta": float(self.delta),
            "core": [[complex_to_pair(z) for z in row] for row in self.core],
        }

    @classmethod
    def from_json(cls, doc: dict, tol: float = UNITARITY_TOL) -> "Coin":
        core = np.array([[pair_to_complex(p) for p in row] for row in doc["core"]], dtype=complex)
        return make_coin(float(doc["delta"]), core, tol=tol)


def make_coin(delta: float, core: Sequence[Sequence[complex]] | np.ndarray, tol: float = UNITARITY_TOL) -> Coin:
    """Validate ``core`` and return the coin ``e^{i delta} core``.

    Raises BadDimension for non-square or n < 3 cores, NonUnitary when
    ``max|core core^H - I| > tol`` and ForbiddenDiagonal when an interior
    diagonal entry has modulus 1 (within ``tol``).
    """
    core = np.asarray(core, dtype=complex)
    if core.ndim != 2 or core.shape[0] != core.shape[1]:
        raise BadDimension(f"coin core must be square, got shape {core.shape}")
    n = core.shape[0]
    if n < 3:
        raise BadDimension(f"coin needs at least 3 states, got n={n}")
    if not np.all(np.isfinite(core)):
        raise NonUnitary("coin core has non-finite entries")
    defect = float(np.max(np.abs(core @ core.conj().T - np.eye(n))))
    if defect > tol:
        raise NonUnitary(f"coin core is not unitary (defect {defect:.3e} > {tol:.0e})")
    for k in range(1, n - 1):
        if abs(1.0 - abs(core[k, k])) <= tol:
            raise ForbiddenDiagonal(f"|a^({k + 1},{k + 1})| = 1 on an interior diagonal entry")
    return Coin(float(delta), _frozen(core))


@dataclass(frozen=True, eq=False)
class CoinProfile:
    """Eventually constant coin assignment.

    ``left`` covers x <= x_minus, ``right`` covers x >= x_plus and ``middle``
    holds the coins for x_minus+1 ... x_plus-1 in order.
    """

    left: Coin
    right: Coin
    middle: tuple[Coin, ...]
    x_minus: int
    x_plus: int

    def __post_init__(self):
        object.__setattr__(self, "middle", tuple(self.middle))
        if self.x_minus >= 0 or self.x_plus <= 0:
            raise ValidationError(f"need x_minus < 0 < x_plus, got {self.x_minus}, {self.x_plus}")
        if len(self.middle) != self.x_plus - self.x_minus - 1:
            raise ValidationError(
                f"middle has {len(self.middle)} coins, expected {self.x_plus - self.x_minus - 1}"
            )
        ns = {self.left.n, self.right.n, *(c.n for c in self.middle)}
        if len(ns) != 1:
            raise DimensionMismatch(f"coins disagree on the state count: {sorted(ns)}")

    @property
    def n(self) -> int:
        return self.left.n

    def coin_at(self, x: int) -> Coin:
        if x <= self.x_minus:
            return self.left
        if x >= self.x_plus:
            return self.right
        return self.middle[x - self.x_minus - 1]

    def coins(self) -> list[Coin]:
        """Every distinct coin slot: left tail, middle coins, right tail."""
        return [self.left, *self.middle, self.right]

    def coin_stack(self, lo: int, hi: int) -> np.ndarray:
        """Full coin matrices for sites lo..hi, shape (hi-lo+1, n, n)."""
        xs = np.arange(lo, hi + 1)
        out = np.empty((len(xs), self.n, self.n), dtype=complex)
        out[xs <= self.x_minus] = self.left.matrix
        out[xs >= self.x_plus] = self.right.matrix
        for x in range(max(lo, self.x_minus + 1), min(hi, self.x_plus - 1) + 1):
            out[x - lo] = self.coin_at(x).matrix
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "x_minus": self.x_minus,
            "x_plus": self.x_plus,
            "left": self.left.to_json(),
            "middle": [c.to_json() for c in self.middle],
            "right": self.right.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc: dict, tol: float = UNITARITY_TOL) -> "CoinProfile":
        prof = cls(
            left=Coin.from_json(doc["left"], tol),
            right=Coin.from_json(doc["right"], tol),
            middle=tuple(Coin.from_json(c, tol) for c in doc.get("middle", [])),
            x_minus=int(doc["x_minus"]),
            x_plus=int(doc["x_plus"]),
        )
        if "n" in doc and int(doc["n"]) != prof.n:
            raise DimensionMismatch(f"declared n={doc['n']} but coins have n={prof.n}")
        return prof

    @classmethod
    def homogeneous(cls, coin: Coin) -> "CoinProfile":
        return cls(coin, coin, (coin,), -1, 1)


def coin_at(profile: CoinProfile, x: int) -> Coin:
    return profile.coin_at(x)


@dataclass(frozen=True, eq=False)
class State:
    """Amplitudes on the contiguous window [lo, hi]; zero elsewhere.

    ``amps`` has shape (hi - lo + 1, n).
    """

    lo: int
    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex)
        if a.ndim != 2 or a.shape[0] < 1:
            raise ValidationError(f"state amplitudes must be (sites, n), got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)
        object.__setattr__(self, "lo", int(self.lo))

    @property
    def n(self) -> int:
        return self.amps.shape[1]

    @property
    def hi(self) -> int:
        return self.lo + self.amps.shape[0] - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def at(self, x: int) -> np.ndarray:
        if self.lo <= x <= self.hi:
            return self.amps[x - self.lo].copy()
        return np.zeros(self.n, dtype=complex)

    def norm2(self) -> float:
        return state_norm2(self)

    def extended(self, lo: int, hi: int) -> "State":
        """Same vector on a window covering [lo, hi] (never shrinks)."""
        lo, hi = min(lo, self.lo), max(hi, self.hi)
        a = np.zeros((hi - lo + 1, self.n), dtype=complex)
        a[self.lo - lo : self.hi - lo + 1] = self.amps
        return State(lo, a)

    def padded(self, k: int) -> "State":
        return self.extended(self.lo - k, self.hi + k)

    def window(self, lo: int, hi: int) -> "State":
        """Restriction to exactly [lo, hi], zero-filling outside the support."""
        a = np.zeros((hi - lo + 1, self.n), dtype=complex)
        s, e = max(lo, self.lo), min(hi, self.hi)
        if s <= e:
            a[s - lo : e - lo + 1] = self.amps[s - self.lo : e - self.lo + 1]
        return State(lo, a)

    def __add__(self, other: "State") -> "State":
        if other.n != self.n:
            raise DimensionMismatch(f"cannot add states with n={self.n} and n={other.n}")
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        a = self.window(lo, hi).amps + other.window(lo, hi).amps
        return State(lo, a)

    def scale(self, z: complex) -> "State":
        return State(self.lo, self.amps * z)

    def vdot(self, other: "State") -> complex:
        """<self, other>, conjugate-linear in self."""
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return 0j
        a = self.amps[lo - self.lo : hi - self.lo + 1]
        b = other.amps[lo - other.lo : hi - other.lo + 1]
        return complex(np.vdot(a.ravel(), b.ravel()))

    def normalized(self) -> "State":
        return self.scale(1.0 / np.sqrt(self.norm2()))

    @classmethod
    def zeros(cls, n: int, lo: int = 0, hi: int = 0) -> "State":
        return cls(lo, np.zeros((hi - lo + 1, n), dtype=complex))


def origin_vector(n: int) -> np.ndarray:
    """``[1, i, 1] / sqrt(3)`` for n = 3; the interior weight is spread evenly
    for larger n."""
    v = np.zeros(n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(3)
    v[1:-1] = 1j / np.sqrt(3 * (n - 2))
    return v


def point_mass(vector: Sequence[complex], x: int = 0) -> State:
    return State(x, np.asarray(vector, dtype=complex)[None, :])


def state_norm2(psi: State) -> float:
    # fixed summation order: row-major over (site, component)
    return float(np.sum(psi.amps.real**2 + psi.amps.imag**2))
