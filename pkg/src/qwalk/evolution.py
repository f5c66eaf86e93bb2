"""Exact time evolution ``U = S C`` on a growing light-cone window."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .lattice import CoinProfile, State

__all__ = [
    "Distribution",
    "apply_coin",
    "apply_shift",
    "step",
    "evolve",
    "iterate",
    "distribution",
    "time_averaged_return",
]


@dataclass(frozen=True, eq=False)
class Distribution:
    lo: int
    probs: np.ndarray
    t: int

    @property
    def hi(self) -> int:
        return self.lo + len(self.probs) - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def at(self, x: int) -> float:
        if self.lo <= x <= self.hi:
            return float(self.probs[x - self.lo])
        return 0.0

    def total(self) -> float:
        return float(np.sum(self.probs))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "prob"])
        for x, p in zip(self.sites, self.probs):
            w.writerow([int(x), repr(float(p))])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps([[int(x), float(p)] for x, p in zip(self.sites, self.probs)])


def _check_n(profile: CoinProfile, psi: State) -> None:
    if psi.n != profile.n:
        raise DimensionMismatch(f"state has n={psi.n}, profile has n={profile.n}")


def _coin_dense(stack: np.ndarray, amps: np.ndarray) -> np.ndarray:
    return np.einsum("xij,xj->xi", stack, amps)


def _shift_dense(amps: np.ndarray) -> np.ndarray:
    m, n = amps.shape
    out = np.zeros((m + 2, n), dtype=complex)
    out[0:m, 0] = amps[:, 0]
    out[1 : m + 1, 1 : n - 1] = amps[:, 1 : n - 1]
    out[2 : m + 2, n - 1] = amps[:, n - 1]
    return out


def apply_coin(profile: CoinProfile, psi: State) -> State:
    _check_n(profile, psi)
    return State(psi.lo, _coin_dense(profile.coin_stack(psi.lo, psi.hi), psi.amps))


def apply_shift(psi: State) -> State:
    """Component 1 moves one site left, component n one site right."""
    return State(psi.lo - 1, _shift_dense(psi.amps))


def step(profile: CoinProfile, psi: State) -> State:
    return apply_shift(apply_coin(profile, psi))


def iterate(profile: CoinProfile, psi0: State, t: int):
    """Yield U^s psi0 for s = 0 ... t."""
    _check_n(profile, psi0)
    if t < 0:
        raise ValueError("t must be non-negative")
    stack = profile.coin_stack(psi0.lo - t, psi0.hi + t)
    amps = psi0.amps
    lo = psi0.lo
    yield psi0
    for _ in range(t):
        off = lo - (psi0.lo - t)
        amps = _shift_dense(_coin_dense(stack[off : off + amps.shape[0]], amps))
        lo -= 1
        yield State(lo, amps)


def evolve(profile: CoinProfile, psi0: State, t: int) -> State:
    psi = psi0
    for psi in iterate(profile, psi0, t):
        pass
    return psi


def distribution(psi: State, t: int = 0) -> Distribution:
    p = np.sum(psi.amps.real**2 + psi.amps.imag**2, axis=1)
    return Distribution(psi.lo, p, int(t))


def time_averaged_return(profile: CoinProfile, psi0: State, T: int, x0: int = 0) -> float:
    """(1/T) * sum_{t<T} mu_t(x0), a finite-horizon localization witness."""
    if T < 1:
        raise ValueError("T must be >= 1")
    acc = 0.0
    for psi in iterate(profile, psi0, T - 1):
        v = psi.at(x0)
        acc += float(np.sum(v.real**2 + v.imag**2))
    return acc / T
