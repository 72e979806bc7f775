"""Measurement post-processing: frequency-domain time gating, plate normalization.

Gating runs the classic VNA recipe: taper the band with a Kaiser pre-window,
transform to time (zero-padded 4x for gate-edge placement), multiply by a
Tukey gate over the requested interval, transform back, and divide the
pre-window out again. Band edges (outer 10% each side) are low-confidence
because the window compensation is ill-conditioned there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal.windows import tukey

from .errors import GateSpanError, InputDataError, ReferenceLevelError, SweepGridError
from .touchstone import PortNetwork

# Zero-padding factor applied before the time-domain transform.
_PAD_FACTOR = 4

# Pre-window compensation floor; avoids blow-up at heavily tapered edges.
_WINDOW_FLOOR = 1e-3

SWEEP_CSV_HEADER = "freq_hz,re,im"


@dataclass(frozen=True)
class Sweep:
    """Complex values on a uniform frequency grid (at least 8 points)."""

    frequencies: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if f.ndim != 1 or f.size < 8:
            raise SweepGridError(f"need at least 8 sweep points, got {f.size}")
        if v.shape != f.shape:
            raise SweepGridError("values and frequencies must have the same length")
        steps = np.diff(f)
        if np.any(steps <= 0):
            raise SweepGridError("frequencies must be strictly increasing")
        mean_step = float(np.mean(steps))
        if np.any(np.abs(steps - mean_step) > 1e-6 * mean_step):
            raise SweepGridError("frequency grid must be uniform (within 1e-6 relative)")
        if not np.all(np.isfinite(v.view(float))):
            raise SweepGridError("sweep values must be finite")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)

    @property
    def delta_f(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    @property
    def alias_free_span(self) -> float:
        """Unambiguous time span of the sweep, 1/delta_f seconds."""
        return 1.0 / self.delta_f


@dataclass(frozen=True)
class GateSpec:
    """Time-gate interval plus window shaping.

    ``window_shape`` is the Tukey taper fraction of the gate (0 makes the
    gate rectangular); ``pre_window`` is the Kaiser beta applied across the
    band before transforming to time.
    """

    t_start: float
    t_stop: float
    window_shape: float = 0.25
    pre_window: float = 6.0

    def __post_init__(self):
        if not (0.0 <= self.t_start < self.t_stop):
            raise ValueError("need 0 <= t_start < t_stop")
        if not (0.0 <= self.window_shape <= 1.0):
            raise ValueError("window_shape must be in [0, 1]")
        if self.pre_window < 0:
            raise ValueError("pre_window beta must be >= 0")


def synth_multipath(paths, frequencies) -> Sweep:
    """Sum of delayed complex echoes: value(f) = sum_k a_k * exp(-j*2*pi*f*tau_k)."""
    f = np.asarray(frequencies, dtype=float)
    values = np.zeros(f.shape, dtype=complex)
    for delay, amplitude in paths:
        if delay < 0:
            raise ValueError("path delays must be >= 0")
        values = values + amplitude * np.exp(-2j * np.pi * f * delay)
    return Sweep(frequencies=f, values=values)


def time_gate(sweep: Sweep, gate: GateSpec) -> Sweep:
    """Keep only the response inside the gate interval, on the same grid."""
    n = sweep.frequencies.size
    span = sweep.alias_free_span
    if gate.t_start >= span:
        raise GateSpanError(
            f"gate start {gate.t_start} s is outside the alias-free span {span} s"
        )
    w = np.kaiser(n, gate.pre_window)
    m = _PAD_FACTOR * n
    h = np.fft.ifft(sweep.values * w, n=m)
    t = np.arange(m) / (m * sweep.delta_f)
    mask = (t >= gate.t_start) & (t <= gate.t_stop)
    count = int(np.count_nonzero(mask))
    if count == 0:
        raise GateSpanError("gate interval narrower than the time-sample spacing")
    g = np.zeros(m)
    g[mask] = tukey(count, alpha=gate.window_shape)
    gated = np.fft.fft(h * g)[:n]
    return Sweep(frequencies=sweep.frequencies, values=gated / np.maximum(w, _WINDOW_FLOOR))


def normalize_to_plate(dut: Sweep, reference: Sweep) -> Sweep:
    """Absolute reflection from a measurement and a metal-plate reference.

    Models the plate as a perfect reflector (gamma = -1 at normal
    incidence), so the result is -dut/reference.
    """
    if not np.array_equal(dut.frequencies, reference.frequencies):
        raise SweepGridError("measurement and reference must share one frequency grid")
    mags = np.abs(reference.values)
    if np.any(mags <= 1e-9):
        k = int(np.argmin(mags))
        raise ReferenceLevelError(
            f"reference magnitude {mags[k]:.3e} at {reference.frequencies[k]} Hz "
            "too small to normalize against"
        )
    return Sweep(frequencies=dut.frequencies, values=-dut.values / reference.values)


def low_confidence_edges(sweep: Sweep) -> tuple:
    """Frequencies bounding the trustworthy interior 80% of a gated band."""
    f0 = float(sweep.frequencies[0])
    f1 = float(sweep.frequencies[-1])
    span = f1 - f0
    return f0 + 0.1 * span, f1 - 0.1 * span


def sweep_from_network(net: PortNetwork) -> Sweep:
    """View a 1-port network's S11 as a sweep."""
    if net.n_ports != 1:
        raise InputDataError(f"need a 1-port network, got {net.n_ports} ports")
    return Sweep(frequencies=net.frequencies, values=net.s[:, 0, 0])


def sweep_to_network(sweep: Sweep, reference_impedance: float = 50.0) -> PortNetwork:
    return PortNetwork(
        n_ports=1,
        reference_impedance=reference_impedance,
        frequencies=sweep.frequencies,
        s=sweep.values.reshape(-1, 1, 1),
    )


def load_sweep_csv(text: str) -> Sweep:
    """Read a sweep from CSV with header ``freq_hz,re,im`` (# comments ignored)."""
    header_seen = False
    freqs = []
    values = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if [f.strip() for f in line.split(",")] != SWEEP_CSV_HEADER.split(","):
                raise SweepGridError(
                    f"line {line_no}: expected header '{SWEEP_CSV_HEADER}', got '{line}'"
                )
            header_seen = True
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 3:
            raise SweepGridError(f"line {line_no}: expected 3 fields, got {len(fields)}")
        try:
            freqs.append(float(fields[0]))
            values.append(float(fields[1]) + 1j * float(fields[2]))
        except ValueError:
            raise SweepGridError(f"line {line_no}: non-numeric field in '{line}'") from None
    if not header_seen:
        raise SweepGridError("missing header line")
    return Sweep(frequencies=np.array(freqs), values=np.array(values))


def dump_sweep_csv(sweep: Sweep, comments: tuple = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(SWEEP_CSV_HEADER)
    for f, v in zip(sweep.frequencies, sweep.values):
        lines.append(f"{f:.12g},{v.real:.12g},{v.imag:.12g}")
    return "\n".join(lines) + "\n"
