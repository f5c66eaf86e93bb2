"""Run configuration: angle shorthand, model specs and initial states.

Angles are accepted as rational multiples of pi ("8/12pi", "pi/12",
"-3pi/4", "pi") or as raw radians (numbers or numeric strings).  Rational
multiples are kept exactly as fractions so the echoed config never drifts.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DimensionMismatch, QWalkError, ValidationError
from .grover import GroverParams, TwoPhaseOneDefect
from .lattice import CoinProfile, State, complex_to_pair, origin_vector, pair_to_complex

__all__ = ["Angle", "ConfigError", "RunConfig", "parse_angle", "load_config", "FIGURES", "figure_config"]

SHORTHAND_KEYS = ("theta_m", "delta_m", "theta_o", "delta_o", "theta_p", "delta_p")
PROFILE_KEYS = ("left", "right", "x_minus", "x_plus")
NORM_TOL = 1e-10

_PI_FORM = re.compile(
    r"""^\s*(?P<sign>[+-])?\s*
        (?:(?P<num>\d+)\s*(?:/\s*(?P<den>\d+))?\s*\*?\s*)?
        pi
        (?:\s*/\s*(?P<den2>\d+))?\s*$""",
    re.VERBOSE | re.IGNORECASE,
)
_FLOAT_FORM = re.compile(r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*$")


class ConfigError(QWalkError):
    """Malformed configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Angle:
    """An angle, exact when given as a rational multiple of pi."""

    radians: float
    pi_multiple: Fraction | None = None

    @classmethod
    def of(cls, frac: Fraction) -> "Angle":
        return cls(float(frac) * math.pi, frac)

    def text(self) -> str | float:
        if self.pi_multiple is None:
            return self.radians
        f = self.pi_multiple
        if f == 0:
            return "0pi"
        if f.denominator == 1:
            return f"{f.numerator}pi"
        return f"{f.numerator}/{f.denominator}pi"

    def __float__(self) -> float:
        return self.radians


def parse_angle(value: Any, field: str = "angle") -> Angle:
    if isinstance(value, bool):
        raise ConfigError(field, f"expected an angle, got {value!r}")
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ConfigError(field, f"angle must be finite, got {value!r}")
        return Angle(float(value))
    if not isinstance(value, str):
        raise ConfigError(field, f"expected an angle, got {type(value).__name__}")
    m = _PI_FORM.match(value)
    if m:
        if m["den"] and m["den2"]:
            raise ConfigError(field, f"malformed angle {value!r}")
        num = int(m["num"]) if m["num"] else 1
        den = int(m["den"] or m["den2"] or 1)
        if den == 0:
            raise ConfigError(field, f"zero denominator in {value!r}")
        frac = Fraction(num, den)
        return Angle.of(-frac if m["sign"] == "-" else frac)
    if _FLOAT_FORM.match(value):
        return Angle(float(value))
    raise ConfigError(field, f"malformed angle {value!r} (use e.g. '8/12pi', 'pi/12' or radians)")


def _int_field(doc: dict, key: str, default: int | None = None, minimum: int | None = None) -> int | None:
    if key not in doc:
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {v}")
    return v


@dataclass
class RunConfig:
    profile: CoinProfile
    model: TwoPhaseOneDefect | None
    angles: dict[str, Angle] | None
    initial: State
    t: int
    doc: dict

    def echo(self) -> dict:
        """Normalized, deterministic copy of the config for provenance."""
        out: dict[str, Any] = {}
        if self.angles is not None:
            out.update({k: self.angles[k].text() for k in SHORTHAND_KEYS})
        else:
            out.update(self.profile.to_json())
        out["initial"] = {
            "x": self.initial.lo,
            "vector": [complex_to_pair(z) for z in self.initial.amps[0]],
        }
        out["t"] = self.t
        return out

    @classmethod
    def from_dict(cls, doc: Any) -> "RunConfig":
        """Parse a config document.

        Raises ConfigError for malformed input and the validation errors of
        the model types for well-formed but invalid models.
        """
        if not isinstance(doc, dict):
            raise ConfigError("config", "top level must be a JSON object")
        has_short = [k for k in SHORTHAND_KEYS if k in doc]
        has_prof = [k for k in PROFILE_KEYS if k in doc]
        if has_short and has_prof:
            raise ConfigError("model", "give either the Grover shorthand or an explicit profile, not both")
        if not has_short and not has_prof:
            raise ConfigError("model", f"missing model: need {', '.join(SHORTHAND_KEYS)} or a coin profile")
        model, angles = None, None
        if has_short:
            missing = [k for k in SHORTHAND_KEYS if k not in doc]
            if missing:
                raise ConfigError(missing[0], "missing from Grover shorthand")
            angles = {k: parse_angle(doc[k], k) for k in SHORTHAND_KEYS}
            a = {k: v.radians for k, v in angles.items()}
            model = TwoPhaseOneDefect(
                GroverParams(a["theta_m"], a["delta_m"]),
                GroverParams(a["theta_o"], a["delta_o"]),
                GroverParams(a["theta_p"], a["delta_p"]),
            )
            profile = model.profile()
        else:
            missing = [k for k in PROFILE_KEYS if k not in doc]
            if missing:
                raise ConfigError(missing[0], "missing from coin profile")
            try:
                profile = CoinProfile.from_json(doc)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError("profile", f"malformed coin profile ({exc})") from exc

        t = _int_field(doc, "t", 100, minimum=0)
        init = doc.get("initial")
        if init is None:
            initial = State(0, origin_vector(profile.n)[None, :])
        else:
            if not isinstance(init, dict):
                raise ConfigError("initial", "expected an object {x, vector}")
            x = _int_field(init, "x", 0)
            vec = init.get("vector")
            if not isinstance(vec, list) or not vec:
                raise ConfigError("initial.vector", "expected a list of [re, im] pairs")
            try:
                amps = np.array([pair_to_complex(p) for p in vec], dtype=complex)
            except (TypeError, ValueError) as exc:
                raise ConfigError("initial.vector", str(exc)) from exc
            if len(amps) != profile.n:
                raise DimensionMismatch(f"initial.vector has {len(amps)} components, the coins have n={profile.n}")
            initial = State(x, amps[None, :])
            if abs(initial.norm2() - 1) > NORM_TOL:
                raise ValidationError(f"initial.vector must be normalized, |psi0|^2 = {initial.norm2():.15g}")
        return cls(profile, model, angles, initial, t, doc)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return RunConfig.from_dict(doc)


# Grover shorthand for the four reference configurations.
FIGURES: dict[str, dict[str, str]] = {
    "fig1": dict(theta_m="-8/12pi", delta_m="0pi", theta_o="8/12pi", delta_o="0pi", theta_p="-8/12pi", delta_p="0pi"),
    "fig2": dict(theta_m="-9/12pi", delta_m="0pi", theta_o="8/12pi", delta_o="0pi", theta_p="-9/12pi", delta_p="0pi"),
    "fig3": dict(
        theta_m="11/12pi", delta_m="3/12pi", theta_o="11/12pi", delta_o="1/12pi", theta_p="11/12pi", delta_p="1/12pi"
    ),
    "fig4": dict(theta_m="1/12pi", delta_m="3/12pi", theta_o="1/12pi", delta_o="1/12pi", theta_p="1/12pi", delta_p="1/12pi"),
}


def figure_config(name: str, t: int = 100) -> RunConfig:
    return RunConfig.from_dict({**FIGURES[name], "t": t})
