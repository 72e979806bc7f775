"""Switchable reflective terminations: SPDT open/ground, SP8T stub banks.

An SPDT throw presents an open (+1) or grounded (-1) termination, giving the
two-state 0/180 degree load. The eight-state load connects open- or
short-circuited microstrip stubs of different lengths to an SP8T switch; the
stub lengths are synthesized here so the per-state reflection phases land on
the 45-degree ladder.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C0

from .errors import ConvergenceError, FrequencyRangeError
from .network import cascade_reflection, two_port_at
from .touchstone import PortNetwork, ReflectionProfile, parse_touchstone, serialize_touchstone

TERMINATIONS = ("open", "short")

# Eight-state target reflection phases, degrees.
SP8T_TARGETS_DEG = tuple(45.0 * i for i in range(8))

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_COARSE_POINTS = 64
_MAX_ITER = 200


@dataclass(frozen=True)
class MicrostripLine:
    """Microstrip cross-section plus a scalar loss model.

    ``loss_db_per_m`` is the attenuation at ``reference_frequency`` (Hz) and
    scales with sqrt(f/reference_frequency). Dispersion is ignored; the
    quasi-static effective permittivity is used at all frequencies.
    """

    width: float
    substrate_height: float
    epsilon_r: float
    loss_db_per_m: float = 0.0
    reference_frequency: float = 3.6e9

    def __post_init__(self):
        if self.width <= 0 or self.substrate_height <= 0:
            raise ValueError("width and substrate height must be > 0")
        if self.epsilon_r < 1:
            raise ValueError("epsilon_r must be >= 1")
        if self.loss_db_per_m < 0:
            raise ValueError("loss must be >= 0")
        if self.reference_frequency <= 0:
            raise ValueError("reference frequency must be > 0")


@dataclass(frozen=True)
class StubState:
    """One switch throw: a stub of ``length_m`` ending open or short.

    ``residual_deg`` is the phase error against the state's target at the
    design center frequency, filled in by synthesis (None for hand-built
    designs).
    """

    state: int
    termination: str
    length_m: float
    residual_deg: float | None = None

    def __post_init__(self):
        if self.termination not in TERMINATIONS:
            raise ValueError(f"termination must be one of {TERMINATIONS}")
        if self.length_m < 0:
            raise ValueError("stub length must be >= 0")


@dataclass(frozen=True)
class StubNetworkDesign:
    """A bank of stub terminations behind one (shared) switch model.

    ``switch`` is a measured 2-port per throw, or None for an ideal switch.
    Eight-state designs must split terminations 4 open / 4 short.
    """

    states: tuple
    line: MicrostripLine
    switch: PortNetwork | None = None

    def __post_init__(self):
        n = len(self.states)
        if n < 1 or (n & (n - 1)) != 0:
            raise ValueError("state count must be a power of two")
        if [st.state for st in self.states] != list(range(n)):
            raise ValueError("states must be labelled 0..n-1 in order")
        if n == 8:
            n_open = sum(1 for st in self.states if st.termination == "open")
            if n_open != 4:
                raise ValueError(
                    f"8-state design needs 4 open and 4 short terminations, got {n_open} open"
                )

    def to_json(self, f_center_hz: float | None = None) -> str:
        doc = {
            "line": {
                "width_m": self.line.width,
                "substrate_height_m": self.line.substrate_height,
                "epsilon_r": self.line.epsilon_r,
                "loss_db_per_m": self.line.loss_db_per_m,
                "reference_frequency_hz": self.line.reference_frequency,
            },
            "switch": "ideal" if self.switch is None else {
                "touchstone": serialize_touchstone(self.switch, "RI", "Hz")
            },
            "states": [
                {
                    "state": st.state,
                    "termination": st.termination,
                    "length_m": st.length_m,
                    "residual_deg": st.residual_deg,
                }
                for st in self.states
            ],
        }
        if f_center_hz is not None:
            doc["f_center_hz"] = f_center_hz
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "StubNetworkDesign":
        doc = json.loads(text)
        line = MicrostripLine(
            width=doc["line"]["width_m"],
            substrate_height=doc["line"]["substrate_height_m"],
            epsilon_r=doc["line"]["epsilon_r"],
            loss_db_per_m=doc["line"].get("loss_db_per_m", 0.0),
            reference_frequency=doc["line"].get("reference_frequency_hz", 3.6e9),
        )
        switch = None
        if doc["switch"] != "ideal":
            switch = parse_touchstone(doc["switch"]["touchstone"])
        states = tuple(
            StubState(
                state=st["state"],
                termination=st["termination"],
                length_m=st["length_m"],
                residual_deg=st.get("residual_deg"),
            )
            for st in doc["states"]
        )
        return cls(states=states, line=line, switch=switch)


def microstrip_eeff(line: MicrostripLine) -> float:
    """Quasi-static effective permittivity (Hammerstad-Jensen closed form)."""
    u = line.width / line.substrate_height
    er = line.epsilon_r
    a = 1.0 + math.log((u**4 + (u / 52.0) ** 2) / (u**4 + 0.432)) / 49.0
    a += math.log(1.0 + (u / 18.1) ** 3) / 18.7
    b = 0.564 * ((er - 0.9) / (er + 3.0)) ** 0.053
    return (er + 1.0) / 2.0 + (er - 1.0) / 2.0 * (1.0 + 10.0 / u) ** (-a * b)


def guided_wavelength(line: MicrostripLine, f: float) -> float:
    """Wavelength on the line at ``f`` (Hz)."""
    return C0 / (f * math.sqrt(microstrip_eeff(line)))


def stub_reflection(length: float, termination: str, f, line: MicrostripLine):
    """Reflection looking into an open/short stub of ``length`` metres at ``f``.

    Lossless phase is exp(-j*2*beta*l), negated for a short; magnitude decays
    with the round-trip line loss. ``f`` may be a scalar or an array.
    """
    if termination not in TERMINATIONS:
        raise ValueError(f"termination must be one of {TERMINATIONS}")
    if length < 0:
        raise ValueError("stub length must be >= 0")
    f = np.asarray(f, dtype=float)
    beta = 2.0 * np.pi * f * math.sqrt(microstrip_eeff(line)) / C0
    alpha_db = line.loss_db_per_m * np.sqrt(f / line.reference_frequency)
    mag = 10.0 ** (-2.0 * alpha_db * length / 20.0)
    sign = 1.0 if termination == "open" else -1.0
    out = sign * mag * np.exp(-2j * beta * length)
    return out if out.ndim else complex(out)


def _terminated_gamma(switch: PortNetwork | None, gamma_term, frequencies: np.ndarray):
    """Per-frequency load seen through the switch path (identity if ideal)."""
    gamma_term = np.broadcast_to(np.asarray(gamma_term, dtype=complex), frequencies.shape)
    if switch is None:
        return np.array(gamma_term)
    return np.array(
        [
            cascade_reflection(two_port_at(switch, f), g)
            for f, g in zip(frequencies, gamma_term)
        ]
    )


def spdt_load_profile(switch: PortNetwork | None, frequencies) -> ReflectionProfile:
    """Two-state load: open throw (state 0) and grounded throw (state 1).

    An ideal switch yields exactly +1 and -1 at every frequency; a measured
    switch network cascades the open/ground terminations through its 2-port.
    """
    f = np.asarray(frequencies, dtype=float)
    gamma = np.vstack(
        [
            _terminated_gamma(switch, 1.0, f),
            _terminated_gamma(switch, -1.0, f),
        ]
    )
    return ReflectionProfile(states=(0, 1), frequencies=f, gamma=gamma)


def sp8t_load_profile(design: StubNetworkDesign, frequencies) -> ReflectionProfile:
    """Eight-state load profile of a stub-bank design."""
    if len(design.states) != 8:
        raise ValueError(f"need an 8-state design, got {len(design.states)} states")
    f = np.asarray(frequencies, dtype=float)
    rows = []
    for st in design.states:
        term = stub_reflection(st.length_m, st.termination, f, design.line)
        rows.append(_terminated_gamma(design.switch, term, f))
    return ReflectionProfile(states=tuple(range(8)), frequencies=f, gamma=np.vstack(rows))


def _lossless_solution_deg(target_deg: float) -> tuple:
    """(termination, electrical length in degrees) with the shorter stub.

    Open stub phase is -2*beta*l, short stub phase is 180 - 2*beta*l; the
    termination whose zero-loss solution needs the smaller electrical length
    wins. Over the eight 45-degree targets this forces 4 open / 4 short and
    keeps every electrical length at or below 67.5 degrees.
    """
    bl_open = ((360.0 - target_deg) % 360.0) / 2.0
    bl_short = ((180.0 - target_deg) % 360.0) / 2.0
    if bl_open <= bl_short:
        return "open", bl_open
    return "short", bl_short


def ideal_sp8t_design(line: MicrostripLine, f_center: float) -> StubNetworkDesign:
    """Closed-form stub bank hitting the 45-degree ladder exactly at ``f_center``."""
    lam_g = guided_wavelength(line, f_center)
    states = []
    for i, target in enumerate(SP8T_TARGETS_DEG):
        term, bl_deg = _lossless_solution_deg(target)
        states.append(StubState(state=i, termination=term, length_m=bl_deg / 360.0 * lam_g))
    return StubNetworkDesign(states=tuple(states), line=line, switch=None)


def _wrap180(deg):
    return (np.asarray(deg) + 180.0) % 360.0 - 180.0


def _golden_section(fn, a: float, b: float, tol: float) -> float:
    """Minimize ``fn`` on [a, b]; assumes the bracket holds a single minimum."""
    h = b - a
    c = b - _INV_PHI * h
    d = a + _INV_PHI * h
    fc, fd = fn(c), fn(d)
    for _ in range(_MAX_ITER):
        if b - a <= tol:
            return (a + b) / 2.0
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    raise ConvergenceError(
        f"stub length search did not converge within {_MAX_ITER} iterations"
    )


def synthesize_stub_lengths(
    switch: PortNetwork | None,
    line: MicrostripLine,
    f_center: float,
    band,
    weights=None,
    n_band_points: int = 21,
) -> StubNetworkDesign:
    """Fit the eight stub lengths to the 45-degree phase ladder over a band.

    Terminations come from the minimal-length zero-loss rule; each length is
    then found independently by golden-section search over [0, lambda_g/2)
    minimizing the weighted mean-square circular error between the realized
    and target phases on the band grid (``n_band_points`` uniform points, or
    the single point for a degenerate band). A coarse scan brackets the
    minimum first since the objective is periodic in length.

    Per-state residuals are reported at ``f_center``; for an ideal switch
    and moderate fractional bandwidths (the 14% default band included) they
    stay below a degree.
    """
    f_lo, f_hi = float(band[0]), float(band[1])
    if not (f_lo <= f_center <= f_hi):
        raise ValueError(f"band [{f_lo}, {f_hi}] Hz must contain f_center {f_center} Hz")
    if f_lo <= 0:
        raise ValueError("band frequencies must be > 0")
    if switch is not None and (f_lo < switch.f_min or f_hi > switch.f_max):
        raise FrequencyRangeError(
            f"band [{f_lo}, {f_hi}] Hz not contained in switch sweep "
            f"[{switch.f_min}, {switch.f_max}] Hz"
        )
    grid = np.array([f_lo]) if f_hi == f_lo else np.linspace(f_lo, f_hi, n_band_points)
    if weights is None:
        # Uniform when the band is symmetric about f_center. Otherwise tilt
        # linearly so the weighted band centroid lands on f_center, keeping
        # the fitted phase anchored there (a plain uniform fit on an
        # off-center band drags the zero-error frequency to the band mean).
        offsets = grid - f_center
        s2 = float(np.sum(offsets**2))
        lam = 0.0 if s2 == 0 else -float(np.sum(offsets)) / s2
        w = np.maximum(1.0 + lam * offsets, 0.0)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != grid.shape:
            raise ValueError(
                f"weights length {w.size} does not match the {grid.size}-point band grid"
            )
        if np.any(w < 0) or not np.any(w > 0):
            raise ValueError("weights must be non-negative with a positive sum")
    w = w / np.sum(w)

    grid_points = None if switch is None else [two_port_at(switch, f) for f in grid]
    center_points = None if switch is None else [two_port_at(switch, f_center)]

    def realized_phase_deg(length: float, term: str, freqs, points) -> np.ndarray:
        g = np.atleast_1d(stub_reflection(length, term, freqs, line))
        if points is not None:
            g = np.array([cascade_reflection(p, gi) for p, gi in zip(points, g)])
        return np.angle(g, deg=True)

    period = guided_wavelength(line, f_center) / 2.0
    tol = period * 1e-9
    states = []
    for i, target in enumerate(SP8T_TARGETS_DEG):
        term, _ = _lossless_solution_deg(target)

        def objective(length, _term=term, _target=target):
            err = _wrap180(realized_phase_deg(length, _term, grid, grid_points) - _target)
            return float(np.sum(w * err**2))

        coarse = np.linspace(0.0, period, _COARSE_POINTS, endpoint=False)
        values = [objective(x) for x in coarse]
        if not all(np.isfinite(values)):
            raise ConvergenceError(
                f"non-finite synthesis objective for state {i} (pathological switch data)"
            )
        k = int(np.argmin(values))
        a = coarse[k - 1] if k > 0 else 0.0
        b = coarse[k + 1] if k + 1 < _COARSE_POINTS else period
        length = _golden_section(objective, a, b, tol)
        phase_at_center = realized_phase_deg(length, term, np.array([f_center]), center_points)
        residual = abs(float(_wrap180(phase_at_center - target)[0]))
        states.append(StubState(state=i, termination=term, length_m=length, residual_deg=residual))
    return StubNetworkDesign(states=tuple(states), line=line, switch=switch)
