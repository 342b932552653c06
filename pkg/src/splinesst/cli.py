"""Command-line front end for the analysis pipelines.

Subcommands: interp, wavelet, sst, edr, nrr, pk, effectsite, simulate,
shape.  Data goes to CSV files, progress to stderr.  A key=value config
file (--config, or the SPLINESST_CONFIG environment variable) supplies
defaults; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import blending, edr, features, seriesio, simgen, stats, vmwav
from .bsplines import eval_spline_curve
from .config import ConfigError, PipelineConfig, parse_config
from .sst import SSTConfig, sst_batch


def _log(msg):
    print(msg, file=sys.stderr)


def _load_config(args):
    path = getattr(args, "config", None) or os.environ.get("SPLINESST_CONFIG")
    cfg = PipelineConfig()
    if path:
        with open(path) as fh:
            cfg = parse_config(fh.read(), cfg)
    return cfg


def _load_series(args, cfg, time_col="time", value_col="value"):
    if args.raw:
        vals = seriesio.read_columns(args.input, [value_col])[value_col]
        dt = args.dt if args.dt else cfg.dt
        return (1 + np.arange(len(vals))) * dt, vals
    cols = seriesio.read_columns(args.input, [time_col, value_col])
    return cols[time_col], cols[value_col]


def _sst_config(cfg, args=None):
    def pick(name, default):
        v = getattr(args, name, None) if args is not None else None
        return v if v is not None else default

    return SSTConfig(
        dt=pick("dt", cfg.dt),
        lag=pick("lag", cfg.lag),
        n_xi=pick("n_xi", cfg.n_xi),
        m=pick("m", cfg.m),
        n=pick("n", cfg.n),
        gamma=cfg.gamma,
    )


def _cmd_interp(args):
    cfg = _load_config(args)
    order = args.order or cfg.blend_order
    t, x = _load_series(args, cfg)
    curve = blending.blend_interpolate(t, x, order)
    if args.curve_out:
        seriesio.write_curve(args.curve_out, curve)
        _log(f"wrote spline curve to {args.curve_out}")
    if args.resample_out:
        rate = args.rate or cfg.eta
        grid = np.arange(np.ceil(t[0] * rate), np.floor(t[-1] * rate) + 1) / rate
        seriesio.write_columns(
            args.resample_out, {"time": grid, "value": eval_spline_curve(curve, grid)}
        )
        _log(f"wrote resampled series to {args.resample_out}")
    return 0


def _cmd_wavelet(args):
    w1 = vmwav.interior_vm(args.m, args.n)
    if args.samples_out:
        big = args.m + args.n
        step = 1.0 / max(args.density, 1)
        grid = np.arange(step / 2, big, step)
        analytic = vmwav.analytic_values(args.m, args.n, grid)
        seriesio.write_columns(
            args.samples_out,
            {"t": grid, "psi": analytic.real, "hilbert": analytic.imag},
        )
        _log(f"wrote analytic wavelet samples to {args.samples_out}")
    if args.spectrum_out:
        unit = vmwav.vm_general_knots(np.arange(0.0, 2 * (args.m + args.n) + 1), args.m, args.n, 0)
        report = vmwav.spectrum_and_slr(unit)
        seriesio.write_columns(
            args.spectrum_out, {"omega": report.omega, "magnitude": report.magnitude}
        )
        _log(f"wrote spectrum to {args.spectrum_out}")
        print(f"slr_db={report.slr_db:.6f}")
    else:
        print(f"support=[0,{(args.m + args.n) / 2}] coeffs={w1.coeffs.tolist()}")
    return 0


def _cmd_sst(args):
    cfg = _load_config(args)
    scfg = _sst_config(cfg, args)
    t, x = _load_series(args, cfg)
    _log(f"running SST: window {scfg.window} samples, {scfg.rows} scales, {scfg.n_xi} bins")
    tfmap = sst_batch(x, scfg, t0=float(t[0]) - scfg.dt)
    seriesio.write_tfmap(args.output, tfmap)
    _log(f"wrote tvPS to {args.output}")
    if args.summary_out:
        top = np.argmax(tfmap.v, axis=1)
        seriesio.write_columns(
            args.summary_out,
            {
                "frame_time": tfmap.times,
                "freq": tfmap.freqs[top],
                "power": tfmap.v[np.arange(len(top)), top],
            },
        )
        _log(f"wrote per-frame summary to {args.summary_out}")
    return 0


def _cmd_edr(args):
    cfg = _load_config(args)
    if args.raw:
        vals = seriesio.read_columns(args.input, ["mV"])["mV"]
        fs = args.fs
        if not fs:
            raise SystemExit("edr: --fs is required with --raw")
    else:
        cols = seriesio.read_columns(args.input, ["time", "mV"])
        vals = cols["mV"]
        dt = np.diff(cols["time"])
        fs = 1.0 / float(np.median(dt))
    record = edr.ECGRecord(fs=fs, samples=vals)
    polarity = args.polarity or cfg.polarity
    pvc_on = cfg.pvc if args.pvc is None else args.pvc == "on"
    baseline_free = edr.remove_baseline(record)
    peaks = edr.detect_peaks(baseline_free, polarity=polarity)
    _log(f"detected {len(peaks)} {polarity} peaks at {fs:g} Hz")
    if pvc_on:
        peaks = edr.exclude_pvc(peaks, cfg.pvc_ratio)
        _log(f"{len(peaks)} peaks after premature-beat exclusion")
    if args.peaks_out:
        seriesio.write_columns(
            args.peaks_out, {"time": peaks.times, "amplitude": peaks.amplitudes}
        )
    rate = args.eta or cfg.eta
    order = args.order or cfg.blend_order
    wave = edr.build_edr(peaks, order=order, rate=rate)
    seriesio.write_columns(args.output, {"time": wave.times, "value": wave.values})
    _log(f"wrote EDR waveform to {args.output}")
    return 0


def _cmd_nrr(args):
    cfg = _load_config(args)
    tfmap = seriesio.read_tfmap(args.input)
    lam = cfg.lam if args.penalty is None else args.penalty
    series = features.nrr_series(
        tfmap,
        penalty=lam,
        half_width=cfg.band_halfwidth,
        floor_hz=cfg.freq_floor,
        harmonics=cfg.harmonics,
        window=args.window,
    )
    if args.ridge_out:
        seriesio.write_columns(
            args.ridge_out, {"frame_time": series.times, "freq": series.ridge_freqs}
        )
        _log(f"wrote ridge to {args.ridge_out}")
    seriesio.write_columns(
        args.output,
        {
            "frame_time": series.times,
            "p_r": series.p_r,
            "p_nr": series.p_nr,
            "nrr": series.values,
        },
    )
    _log(f"wrote NRR series to {args.output}")
    return 0


def _cmd_pk(args):
    cols = seriesio.read_columns(args.input, ["x", "y"])
    pk = stats.prediction_probability(cols["x"], cols["y"])
    rho = stats.spearman(cols["x"], cols["y"])
    print(f"pk={pk!r}")
    print(f"spearman={rho!r}")
    return 0


def _cmd_effectsite(args):
    cols = seriesio.read_columns(args.input, ["time", "c_et"])
    c_eff = stats.effect_site(cols["time"], cols["c_et"], ke0=args.ke0)
    seriesio.write_columns(args.output, {"time": cols["time"], "c_eff": c_eff})
    _log(f"wrote effect-site concentrations to {args.output}")
    return 0


def _cmd_simulate(args):
    cfg = _load_config(args)
    seed = args.seed if args.seed is not None else cfg.seed
    sig = simgen.two_component_signal(
        seed, dt=args.dt, duration=args.duration, target_snr_db=args.snr
    )
    seriesio.write_columns(args.output, {"time": sig.times, "value": sig.values})
    _log(f"wrote composite signal to {args.output}")
    if args.truth_out:
        c1, c2 = sig.components
        seriesio.write_columns(
            args.truth_out,
            {
                "time": sig.times,
                "if1": c1.instantaneous_frequency,
                "if2": c2.instantaneous_frequency,
                "a1": c1.amplitude,
                "a2": c2.amplitude,
                "mask1": c1.mask,
                "mask2": c2.mask,
                "trend": sig.trend,
            },
        )
        _log(f"wrote ground truth to {args.truth_out}")
    return 0


def _cmd_shape(args):
    cols = seriesio.read_columns(args.input, ["value", "amplitude", "phase"])
    model = features.estimate_shape(
        cols["value"], cols["amplitude"], cols["phase"], args.harmonics
    )
    seriesio.write_columns(
        args.gamma_out,
        {
            "harmonic": np.arange(1, args.harmonics + 1),
            "alpha": model.alphas,
            "beta": model.betas,
        },
    )
    _log(f"wrote Fourier coefficients to {args.gamma_out}")
    if args.shape_out:
        u = np.linspace(0.0, 1.0, args.samples, endpoint=False)
        seriesio.write_columns(args.shape_out, {"u": u, "s": model.evaluate(u)})
        _log(f"wrote sampled shape to {args.shape_out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="splinesst",
        description="Spline interpolation of irregular samples, streaming "
        "synchrosqueezed CWT, and respiratory dynamics indices.",
    )
    parser.add_argument("--config", help="key=value config file (or set SPLINESST_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interp", help="blending interpolation of (time,value) samples")
    p.add_argument("--input", required=True)
    p.add_argument("--raw", action="store_true", help="input has a single value column")
    p.add_argument("--dt", type=float, help="sample period for --raw input")
    p.add_argument("--order", type=int)
    p.add_argument("--curve-out")
    p.add_argument("--resample-out")
    p.add_argument("--rate", type=float, help="resampling rate (Hz)")
    p.set_defaults(func=_cmd_interp)

    p = sub.add_parser("wavelet", help="export wavelet samples and spectrum")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples-out")
    p.add_argument("--spectrum-out")
    p.add_argument("--density", type=int, default=64, help="samples per unit time")
    p.set_defaults(func=_cmd_wavelet)

    p = sub.add_parser("sst", help="streaming synchrosqueezed CWT -> tvPS")
    p.add_argument("--input", required=True)
    p.add_argument("--raw", action="store_true")
    p.add_argument("--dt", type=float)
    p.add_argument("--lag", type=float)
    p.add_argument("--n-xi", dest="n_xi", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--output", required=True)
    p.add_argument("--summary-out")
    p.set_defaults(func=_cmd_sst)

    p = sub.add_parser("edr", help="ECG -> respiratory waveform")
    p.add_argument("--input", required=True)
    p.add_argument("--raw", action="store_true", help="input has a single mV column")
    p.add_argument("--fs", type=float, help="sampling rate for --raw input")
    p.add_argument("--polarity", choices=["R", "S"])
    p.add_argument("--pvc", choices=["on", "off"])
    p.add_argument("--eta", type=float, help="EDR resampling rate (Hz)")
    p.add_argument("--order", type=int, help="blending spline order")
    p.add_argument("--peaks-out")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_edr)

    p = sub.add_parser("nrr", help="ridge + nonrhythmic/rhythmic ratio from tvPS")
    p.add_argument("--input", required=True)
    p.add_argument("--penalty", type=float, help="ridge jump penalty (lambda)")
    p.add_argument("--window", type=int, help="streaming ridge window (frames)")
    p.add_argument("--ridge-out")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_nrr)

    p = sub.add_parser("pk", help="prediction probability and Spearman correlation")
    p.add_argument("--input", required=True, help="CSV with columns x,y")
    p.set_defaults(func=_cmd_pk)

    p = sub.add_parser("effectsite", help="effect-site concentration from end-tidal")
    p.add_argument("--input", required=True, help="CSV with columns time,c_et")
    p.add_argument("--ke0", type=float, default=0.20, help="rate constant (1/min)")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_effectsite)

    p = sub.add_parser("simulate", help="two-component synthetic signal")
    p.add_argument("--seed", type=int)
    p.add_argument("--snr", type=float, help="target SNR (dB); omit for clean")
    p.add_argument("--dt", type=float, default=1.0 / 32.0)
    p.add_argument("--duration", type=float, default=25.0)
    p.add_argument("--output", required=True)
    p.add_argument("--truth-out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("shape", help="wave-shape Fourier coefficients by regression")
    p.add_argument("--input", required=True, help="CSV with columns value,amplitude,phase")
    p.add_argument("--harmonics", type=int, required=True)
    p.add_argument("--gamma-out", required=True)
    p.add_argument("--shape-out")
    p.add_argument("--samples", type=int, default=256)
    p.set_defaults(func=_cmd_shape)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, seriesio.CSVFormatError) as exc:
        _log(f"{args.command}: {exc}")
        return 2
    except (ValueError, OSError) as exc:
        _log(f"{args.command}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
