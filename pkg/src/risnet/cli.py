"""Command-line frontend: parse, profile, synth, bandwidth, pattern, gate.

All subcommands are deterministic: the same inputs and flags produce
byte-identical outputs. Timestamps only appear when --stamp is given.
Exit codes: 0 success, 2 usage error, 3 input/parse error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import array as arr
from . import gating, loads, metrics, network, touchstone
from .errors import InputDataError, NumericalError

N78_BAND = (3.3e9, 3.8e9)
DEFAULT_F_CENTER = 3.6e9


class UsageError(Exception):
    """Invocation that cannot be carried out as requested."""


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_output(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _stamp_comments(args) -> tuple:
    if getattr(args, "stamp", False):
        return (f"generated {datetime.now(timezone.utc).isoformat()}",)
    return ()


def _render_kv(pairs) -> str:
    return "\n".join(f"{k}: {v}" for k, v in pairs) + "\n"


def _line_from_args(args, f_center: float) -> loads.MicrostripLine:
    return loads.MicrostripLine(
        width=args.line_width_m,
        substrate_height=args.substrate_height_m,
        epsilon_r=args.epsilon_r,
        loss_db_per_m=args.loss_db_per_m,
        reference_frequency=args.loss_ref_hz if args.loss_ref_hz is not None else f_center,
    )


def _infer_bits(n_states: int) -> int:
    mapping = {2: 1, 4: 2, 8: 3}
    if n_states not in mapping:
        raise UsageError(
            f"cannot infer resolution from {n_states} states; profiles with 2, 4 "
            "or 8 states are supported"
        )
    return mapping[n_states]


def cmd_parse(args) -> int:
    path = Path(args.file)
    text = _read_text(args.file)
    if path.suffix.lower() == ".csv":
        profile = touchstone.load_state_csv(text)
        summary = {
            "type": "state_csv",
            "states": profile.n_states,
            "frequencies": int(profile.frequencies.size),
            "f_min_hz": float(profile.frequencies[0]),
            "f_max_hz": float(profile.frequencies[-1]),
        }
        text_lines = [
            ("file", args.file),
            ("type", "state_csv"),
            ("summary", f"{profile.n_states} states, {profile.frequencies.size} frequencies"),
            ("f_min_hz", _fmt(summary["f_min_hz"])),
            ("f_max_hz", _fmt(summary["f_max_hz"])),
        ]
    else:
        net = touchstone.parse_touchstone(text)
        summary = {
            "type": "touchstone",
            "n_ports": net.n_ports,
            "points": int(net.frequencies.size),
            "f_min_hz": net.f_min,
            "f_max_hz": net.f_max,
            "reference_impedance_ohm": net.reference_impedance,
        }
        text_lines = [
            ("file", args.file),
            ("type", "touchstone"),
            ("n_ports", net.n_ports),
            ("points", net.frequencies.size),
            ("f_min_hz", _fmt(net.f_min)),
            ("f_max_hz", _fmt(net.f_max)),
            ("reference_impedance_ohm", _fmt(net.reference_impedance)),
        ]
    if args.format == "json":
        _write_output(json.dumps(summary, indent=2) + "\n", args.out)
    else:
        _write_output(_render_kv(text_lines), args.out)
    return 0


def _load_profile_source(args, frequencies: np.ndarray, f_center: float):
    src = args.loads
    if src == "ideal-1bit":
        return loads.spdt_load_profile(None, frequencies)
    if src == "ideal-3bit":
        design = loads.ideal_sp8t_design(_line_from_args(args, f_center), f_center)
        return loads.sp8t_load_profile(design, frequencies)
    suffix = Path(src).suffix.lower()
    if suffix == ".json":
        design = loads.StubNetworkDesign.from_json(_read_text(src))
        return loads.sp8t_load_profile(design, frequencies)
    if suffix in (".s2p", ".s1p", ".snp"):
        switch = touchstone.parse_touchstone(_read_text(src))
        return loads.spdt_load_profile(switch, frequencies)
    raise UsageError(
        f"unknown loads source '{src}' (expected ideal-1bit, ideal-3bit, "
        "a design .json or a switch .s2p)"
    )


def cmd_profile(args) -> int:
    unit_cell = touchstone.parse_touchstone(_read_text(args.unit_cell))
    if unit_cell.n_ports != 2:
        raise InputDataError(
            f"unit cell must be a 2-port, got {unit_cell.n_ports} ports"
        )
    freqs = unit_cell.frequencies
    if args.band_low_hz is not None:
        freqs = freqs[freqs >= args.band_low_hz]
    if args.band_high_hz is not None:
        freqs = freqs[freqs <= args.band_high_hz]
    if freqs.size == 0:
        raise InputDataError("no unit-cell sweep points inside the requested band")
    f_center = args.f_center_hz
    load_profile = _load_profile_source(args, freqs, f_center)
    profile = network.profile_from_network(unit_cell, load_profile)
    comments = _stamp_comments(args) + (
        f"surface reflection profile, loads={args.loads}",
    )
    _write_output(touchstone.dump_state_csv(profile, comments=comments), args.out)
    return 0


def cmd_synth(args) -> int:
    if args.line_width_m is None:
        raise UsageError("synth requires --line-width-m (no published default)")
    f_center = args.f_center_hz
    band = (
        args.band_low_hz if args.band_low_hz is not None else N78_BAND[0],
        args.band_high_hz if args.band_high_hz is not None else N78_BAND[1],
    )
    switch = None
    if args.switch != "ideal":
        switch = touchstone.parse_touchstone(_read_text(args.switch))
    line = _line_from_args(args, f_center)
    design = loads.synthesize_stub_lengths(
        switch, line, f_center, band, n_band_points=args.n_band_points
    )
    _write_output(design.to_json(f_center_hz=f_center), args.out)
    return 0


def cmd_bandwidth(args) -> int:
    profile = touchstone.load_state_csv(_read_text(args.profile))
    if args.virtual_2bit:
        if profile.n_states != 8:
            raise InputDataError(
                f"--virtual-2bit needs an 8-state profile, got {profile.n_states} states"
            )
        if args.bits is not None and args.bits != 2:
            raise UsageError("--virtual-2bit implies --bits 2")
        profile = metrics.select_states(profile, (0, 2, 4, 6))
        bits = 2
    else:
        bits = args.bits if args.bits is not None else _infer_bits(profile.n_states)
        if profile.n_states != 2**bits:
            raise UsageError(
                f"--bits {bits} does not match a profile with {profile.n_states} states"
            )
    report = metrics.bandwidth(profile, bits, args.f_center_hz)
    if args.format == "csv":
        _write_output(report.to_csv(), args.out)
    elif args.format == "text":
        pairs = [
            ("resolution_bits", bits),
            ("threshold_deg", _fmt(report.threshold_deg)),
            ("f_center_hz", _fmt(args.f_center_hz)),
        ]
        if report.band is None:
            pairs.append(("band", "none"))
        else:
            pairs.append(("band_low_hz", _fmt(report.band[0])))
            pairs.append(("band_high_hz", _fmt(report.band[1])))
        pairs.append(("bandwidth_hz", _fmt(report.bandwidth_hz)))
        _write_output(_render_kv(pairs), args.out)
    else:
        doc = report.to_json_dict()
        doc["resolution_bits"] = bits
        doc["f_center_hz"] = args.f_center_hz
        doc["virtual_2bit"] = bool(args.virtual_2bit)
        if getattr(args, "stamp", False):
            doc["generated"] = datetime.now(timezone.utc).isoformat()
        _write_output(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_pattern(args) -> int:
    profile = touchstone.load_state_csv(_read_text(args.profile))
    bits = args.bits if args.bits is not None else _infer_bits(profile.n_states)
    if profile.n_states != 2**bits:
        raise UsageError(
            f"--bits {bits} does not match a profile with {profile.n_states} states"
        )
    if bits not in (1, 3):
        raise UsageError("pattern layouts support 1-bit and 3-bit resolutions")
    layout = arr.build_array(args.tiles_x, args.tiles_y, bits)
    f = args.f_center_hz
    gamma_states = profile.at_frequency(f)
    state_map, residual = arr.steering_codebook(
        layout, gamma_states, (args.theta_deg, args.phi_az_deg), f
    )
    theta_grid = np.arange(
        args.theta_start_deg, args.theta_stop_deg + args.theta_step_deg / 2, args.theta_step_deg
    )
    af = arr.array_factor(
        layout, state_map, gamma_states, f, theta_grid, args.phi_az_deg,
        element_exponent=args.element_exponent,
    )
    mag = np.abs(af)
    af_db = 20.0 * np.log10(np.maximum(mag / np.max(mag), 1e-300))

    csv_lines = [f"# {c}" for c in _stamp_comments(args)]
    csv_lines.append("theta_deg,phi_deg,af_db")
    for th, v in zip(theta_grid, af_db):
        csv_lines.append(f"{_fmt(th)},{_fmt(args.phi_az_deg)},{_fmt(v)}")
    pattern_csv = "\n".join(csv_lines) + "\n"

    if args.state_map_out is not None:
        if args.state_map_out.endswith(".json"):
            Path(args.state_map_out).write_text(arr.state_map_to_json(state_map), encoding="utf-8")
        else:
            Path(args.state_map_out).write_text(arr.state_map_to_text(state_map), encoding="utf-8")

    peak_theta = float(theta_grid[int(np.argmax(mag))])
    power_mw = arr.power_consumption(layout) * 1e3
    summary_pairs = [
        ("tiles", f"{layout.tiles_x}x{layout.tiles_y}"),
        ("cells", layout.n_cells),
        ("resolution_bits", bits),
        ("area_m2", _fmt(layout.area_m2)),
        ("power_mw", _fmt(power_mw)),
        ("f_hz", _fmt(f)),
        ("steer_theta_deg", _fmt(args.theta_deg)),
        ("steer_phi_az_deg", _fmt(args.phi_az_deg)),
        ("peak_theta_deg", _fmt(peak_theta)),
        ("max_residual_deg", _fmt(float(np.max(residual)))),
    ]
    if args.out is None:
        sys.stdout.write(pattern_csv)
    else:
        Path(args.out).write_text(pattern_csv, encoding="utf-8")
        if args.format == "json":
            sys.stdout.write(json.dumps(dict(summary_pairs), indent=2) + "\n")
        else:
            sys.stdout.write(_render_kv(summary_pairs))
    return 0


def _load_sweep(path: str) -> gating.Sweep:
    text = _read_text(path)
    if Path(path).suffix.lower() == ".csv":
        return gating.load_sweep_csv(text)
    net = touchstone.parse_touchstone(text)
    return gating.sweep_from_network(net)


def cmd_gate(args) -> int:
    sweep = _load_sweep(args.sweep)
    gate = gating.GateSpec(
        t_start=args.t_start_s,
        t_stop=args.t_stop_s,
        window_shape=args.edge_fraction,
        pre_window=args.kaiser_beta,
    )
    result = gating.time_gate(sweep, gate)
    if args.normalize:
        if args.reference is None:
            raise UsageError("--normalize requires --reference <plate sweep file>")
        reference = gating.time_gate(_load_sweep(args.reference), gate)
        result = gating.normalize_to_plate(result, reference)
    lo, hi = gating.low_confidence_edges(result)
    comments = _stamp_comments(args) + (
        f"gate_start_s={_fmt(gate.t_start)} gate_stop_s={_fmt(gate.t_stop)} "
        f"edge_fraction={_fmt(gate.window_shape)} kaiser_beta={_fmt(gate.pre_window)}",
        f"low_confidence_below_hz={_fmt(lo)} low_confidence_above_hz={_fmt(hi)}",
    )
    if args.out is not None and args.out.lower().endswith(".s1p"):
        net = gating.sweep_to_network(result)
        _write_output(
            touchstone.serialize_touchstone(net, "RI", "GHz", comments=comments), args.out
        )
    else:
        _write_output(gating.dump_sweep_csv(result, comments=comments), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--band-low-hz", type=float, default=None,
                        help="lower band edge in Hz (default: n78 3.3e9 where a band is needed)")
    common.add_argument("--band-high-hz", type=float, default=None,
                        help="upper band edge in Hz (default: n78 3.8e9 where a band is needed)")
    common.add_argument("--f-center-hz", type=float, default=DEFAULT_F_CENTER,
                        help="center frequency in Hz (default 3.6e9)")
    common.add_argument("--bits", type=int, choices=(1, 2, 3), default=None,
                        help="phase resolution in bits (default: inferred)")
    common.add_argument("--out", type=str, default=None,
                        help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None,
                        help="structured output format")
    common.add_argument("--stamp", action="store_true",
                        help="include a generation timestamp in outputs")

    line = argparse.ArgumentParser(add_help=False)
    line.add_argument("--line-width-m", type=float, default=None,
                      help="microstrip width in metres")
    line.add_argument("--substrate-height-m", type=float, default=0.8e-3,
                      help="substrate height in metres (default 0.8e-3)")
    line.add_argument("--epsilon-r", type=float, default=4.9,
                      help="substrate relative permittivity (default 4.9)")
    line.add_argument("--loss-db-per-m", type=float, default=0.0,
                      help="line loss in dB/m at the loss reference frequency")
    line.add_argument("--loss-ref-hz", type=float, default=None,
                      help="loss reference frequency (default: f_center)")

    parser = argparse.ArgumentParser(
        prog="risnet",
        description="Network-level modeling of switched-load reflective surfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="summarize a Touchstone or state CSV file")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse, format_default="text")

    p = sub.add_parser("profile", parents=[common, line],
                       help="cascade loads through a unit cell into a state CSV")
    p.add_argument("unit_cell", help="unit-cell 2-port Touchstone file (.s2p)")
    p.add_argument("--loads", required=True,
                   help="ideal-1bit | ideal-3bit | design .json | switch .s2p")
    p.set_defaults(func=cmd_profile, format_default="csv")

    p = sub.add_parser("synth", parents=[common, line],
                       help="synthesize 8-state stub lengths for the 45-degree ladder")
    p.add_argument("--switch", default="ideal", help="'ideal' or a switch .s2p path")
    p.add_argument("--n-band-points", type=int, default=21,
                   help="points on the synthesis band grid (default 21)")
    p.set_defaults(func=cmd_synth, format_default="json")

    p = sub.add_parser("bandwidth", parents=[common],
                       help="sigma, effective bits and usable band of a profile")
    p.add_argument("profile", help="state CSV path")
    p.add_argument("--virtual-2bit", action="store_true",
                   help="reduce an 8-state profile to states 0,2,4,6 first")
    p.set_defaults(func=cmd_bandwidth, format_default="json")

    p = sub.add_parser("pattern", parents=[common],
                       help="steering codebook and far-field cut for a tiled wall")
    p.add_argument("profile", help="state CSV path")
    p.add_argument("--tiles-x", type=int, default=6)
    p.add_argument("--tiles-y", type=int, default=6)
    p.add_argument("--theta-deg", type=float, default=0.0, help="steer elevation from broadside")
    p.add_argument("--phi-az-deg", type=float, default=0.0, help="steer azimuth")
    p.add_argument("--theta-start-deg", type=float, default=-90.0)
    p.add_argument("--theta-stop-deg", type=float, default=90.0)
    p.add_argument("--theta-step-deg", type=float, default=0.5)
    p.add_argument("--element-exponent", type=float, default=1.0,
                   help="cos^q element factor exponent (0 disables)")
    p.add_argument("--state-map-out", type=str, default=None,
                   help="write the per-cell state map (.json for JSON, else text grid)")
    p.set_defaults(func=cmd_pattern, format_default="text")

    p = sub.add_parser("gate", parents=[common],
                       help="time-gate a sweep, optionally normalizing to a plate reference")
    p.add_argument("sweep", help="sweep file (.s1p or CSV freq_hz,re,im)")
    p.add_argument("--t-start-s", type=float, required=True)
    p.add_argument("--t-stop-s", type=float, required=True)
    p.add_argument("--edge-fraction", type=float, default=0.25,
                   help="Tukey taper fraction of the gate (default 0.25)")
    p.add_argument("--kaiser-beta", type=float, default=6.0,
                   help="pre-window Kaiser beta (default 6.0)")
    p.add_argument("--normalize", action="store_true",
                   help="divide by a gated metal-plate reference")
    p.add_argument("--reference", type=str, default=None, help="plate reference sweep file")
    p.set_defaults(func=cmd_gate, format_default="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.format_default
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InputDataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except NumericalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
