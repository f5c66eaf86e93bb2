"""Spectral analysis and simulation of n-state quantum walks with
eventually constant coins, with closed forms for three-state Grover models."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    AssumptionViolated,
    AZero,
    BadDimension,
    DegenerateTheta,
    DimensionMismatch,
    ForbiddenDiagonal,
    InteriorSingular,
    NonUnitary,
    NumericallyMarginal,
    OutOfDomain,
    QWalkError,
    ValidationError,
    ZeroVector,
)
from .lattice import Coin, CoinProfile, State, make_coin, origin_vector, point_mass
from .evolution import Distribution, distribution, evolve, iterate, step, time_averaged_return
from .transfer import assumption_check, eigenvector, residual, theorem_test, transfer_matrix, zeta_pair
from .grover import (
    GroverParams,
    SpectrumReport,
    TwoPhaseOneDefect,
    closed_form_spectrum,
    grover_coin,
    lemma_eigenpairs,
    spectrum_scan,
)
from .oracle import return_series, spectral_peaks
