"""Command-line interface.

Exit codes: 0 success, 2 transport error, 3 format error, 4 validation or
usage error, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .denoise import ThreshPolicy
from .errors import FormatError, ParameterError, SGWTError, TransportError, ValidationError
from .experiment import TABLE_COLUMNS, ExperimentConfig, format_table, run_experiment
from .frames import FilterBank, filter_curves
from .ssmc import download_graph, load_bundle
from .viz import PlotSpec, plot_filter, plot_graph, plot_risks, plot_signal

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_TRANSPORT = 2
EXIT_FORMAT = 3
EXIT_VALIDATION = 4

REPORT_SCHEMA_VERSION = 1

log = logging.getLogger("sgwt_denoise")


class _Parser(argparse.ArgumentParser):
    # usage errors count as validation errors; argparse's default (2) is the transport code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, TransportError):
        return EXIT_TRANSPORT
    if isinstance(exc, FormatError):
        return EXIT_FORMAT
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    return EXIT_UNEXPECTED


def _key(text: str) -> tuple[str, str]:
    group, sep, name = text.partition("/")
    if not sep or not group or not name or "/" in name:
        raise argparse.ArgumentTypeError(f"expected GROUP/NAME, got {text!r}")
    return group, name


def _beta(text: str) -> float:
    if text.lower() in ("inf", "hard", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"beta must be a number or 'inf', got {text!r}") from None


def _print_dims(dims) -> None:
    print("NumRows NumCols NonZeros")
    print(f"{dims[0]} {dims[1]} {dims[2]}")


def cmd_download(args) -> int:
    bundle = download_graph(args.key[0], args.key[1], cache_dir=args.cache_dir, base=args.base_url)
    _print_dims(bundle.graph.dims)
    print(f"bundle: {bundle.cached_at}")
    return EXIT_OK


def cmd_info(args) -> int:
    path = Path(args.bundle)
    if not path.is_dir():
        raise ValidationError(f"no bundle at {path}")
    bundle = load_bundle(path)
    _print_dims(bundle.graph.dims)
    if args.lines > 0:
        lines = bundle.graph.info.splitlines()[: args.lines]
        if lines:
            print("\n".join(lines))
    return EXIT_OK


def _write_curves(path: Path, table: np.ndarray) -> None:
    J = table.shape[1] - 2
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x"] + [f"psi{j}" for j in range(J + 1)])
        for row in table:
            w.writerow([repr(float(v)) for v in row])


def cmd_filters(args) -> int:
    if args.samples < 2:
        raise ParameterError(f"--samples must be >= 2, got {args.samples}")
    bank = FilterBank(args.b, args.lmax)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_curves(out / "filters.csv", filter_curves(bank, args.samples))
    (out / "filters.svg").write_text(plot_filter(bank, num_samples=args.samples), encoding="utf-8")
    print(f"J = {bank.J}; wrote {out / 'filters.svg'} and {out / 'filters.csv'}")
    return EXIT_OK


def _load_graph(args):
    if args.bundle is not None:
        path = Path(args.bundle)
        if not path.is_dir():
            raise ValidationError(f"no bundle at {path}")
        return load_bundle(path)
    return download_graph(args.graph[0], args.graph[1], cache_dir=args.cache_dir, base=args.base_url)


def _json_float(v: float):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def _write_report(out: Path, bundle, result) -> None:
    cfg = result.config
    es = result.spectral.es
    src = bundle.source
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "graph": {
            "group": src.group,
            "name": src.name,
            "n": int(result.n),
            "dims": list(bundle.graph.dims),
            "lmax": es.lmax,
            "J": int(result.spectral.frame.J),
        },
        "config": cfg.as_dict(),
        "thresholds": {
            policy.value: {
                "mse_oracle": sweep.mse_threshold,
                "sure": sweep.sure_threshold,
                "min_mse_idx": sweep.min_mse_idx,
                "min_sure_idx": sweep.min_sure_idx,
            }
            for policy, sweep in result.sweeps.items()
        },
        "table": {c: _json_float(result.table[c]) for c in TABLE_COLUMNS},
        "table_rounded": {c: _json_float(round(result.table[c], 2)) for c in TABLE_COLUMNS},
    }
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    (out / "report.txt").write_text(format_table(result.table), encoding="utf-8")

    uni, dep = result.sweeps[ThreshPolicy.UNIFORM], result.sweeps[ThreshPolicy.DEPENDENT]
    with open(out / "risks.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["threshold", "mse_uniform", "sure_uniform", "mse_dependent", "sure_dependent"])
        for row in zip(uni.thresholds, uni.mse, uni.sure, dep.mse, dep.sure):
            w.writerow([repr(float(v)) for v in row])


def _write_coeffs(path: Path, wc) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scale", "vertex", "value"])
        for j, block in enumerate(wc.blocks()):
            for i, v in enumerate(block):
                w.writerow([j, i, repr(float(v))])


def _write_plots(out: Path, bundle, result, point_size: float) -> None:
    g = bundle.graph
    cfg = result.config
    n = result.n
    sigma2 = cfg.sigma**2
    bank = FilterBank(cfg.b, result.spectral.es.lmax)
    (out / "filters.svg").write_text(plot_filter(bank), encoding="utf-8")
    uni, dep = result.sweeps[ThreshPolicy.UNIFORM], result.sweeps[ThreshPolicy.DEPENDENT]
    curves = {
        "MSE_u": (uni.mse, "#000000", False),
        "SURE_u": (uni.sure - n * sigma2, "#d62728", False),
        "MSE_d": (dep.mse, "#000000", True),
        "SURE_d": (dep.sure - n * sigma2, "#d62728", True),
    }
    (out / "risks.svg").write_text(plot_risks(uni.thresholds, curves), encoding="utf-8")
    if g.coords is None:
        log.warning("graph has no coordinates; skipping graph and signal figures")
        return
    spec = PlotSpec(point_size=point_size)
    tag = "d" if cfg.policy is ThreshPolicy.DEPENDENT else "u"
    (out / "graph.svg").write_text(plot_graph(g, spec), encoding="utf-8")
    (out / "signal_clean.svg").write_text(plot_signal(g, result.f, spec), encoding="utf-8")
    (out / "signal_noisy.svg").write_text(plot_signal(g, result.noisy, spec), encoding="utf-8")
    (out / "signal_denoised.svg").write_text(plot_signal(g, result.estimates[f"SURE_{tag}"], spec),
                                             encoding="utf-8")


def cmd_denoise(args) -> int:
    config = ExperimentConfig(
        eta=args.eta, k=args.k, sigma=args.sigma, beta=args.beta, b=args.b,
        seed=args.seed, policy=args.policy, keepwc=args.keepwc,
    )
    bundle = _load_graph(args)
    result = run_experiment(bundle.graph, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_report(out, bundle, result)
    if args.save_coeffs:
        _write_coeffs(out / "coeffs_noisy.csv", result.wc_noisy)
        _write_coeffs(out / "coeffs_clean.csv", result.wc_clean)
    if args.plots:
        _write_plots(out, bundle, result, args.point_size)
    print(format_table(result.table), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sgwt-denoise", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def remote(sp):
        sp.add_argument("--cache-dir", default=None, help="bundle cache root ($SSMC_CACHE_DIR)")
        sp.add_argument("--base-url", default=None, help="collection base URL ($SSMC_BASE_URL)")

    d = sub.add_parser("download", help="fetch a graph from the SuiteSparse Matrix Collection")
    d.add_argument("key", type=_key, metavar="GROUP/NAME")
    remote(d)
    d.set_defaults(func=cmd_download)

    i = sub.add_parser("info", help="print dimensions and provenance of a cached bundle")
    i.add_argument("bundle", help="bundle directory")
    i.add_argument("--lines", type=int, default=14, help="info lines to show (default 14)")
    i.set_defaults(func=cmd_info)

    f = sub.add_parser("filters", help="write filter-bank curves as SVG and CSV")
    f.add_argument("--lmax", type=float, required=True)
    f.add_argument("--b", type=float, default=2.0)
    f.add_argument("--samples", type=int, default=512)
    f.add_argument("--out", default=".")
    f.set_defaults(func=cmd_filters)

    e = sub.add_parser("denoise", help="run the SURE denoising experiment")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", type=_key, metavar="GROUP/NAME")
    src.add_argument("--bundle", help="bundle directory")
    remote(e)
    e.add_argument("--eta", type=float, default=0.01)
    e.add_argument("--k", type=int, default=3)
    e.add_argument("--sigma", type=float, default=0.01)
    e.add_argument("--beta", type=_beta, default=2.0, help="shrinkage exponent, or 'inf' for hard")
    e.add_argument("--b", type=float, default=2.0)
    e.add_argument("--policy", choices=[p.value for p in ThreshPolicy], default="dependent",
                   help="policy of the estimator drawn in signal_denoised.svg")
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--keepwc", action="store_true", help="keep thresholded coefficients per candidate")
    e.add_argument("--plots", action="store_true", help="also write SVG figures")
    e.add_argument("--save-coeffs", action="store_true", help="write coefficient CSVs")
    e.add_argument("--point-size", type=float, default=2.0)
    e.set_defaults(func=cmd_denoise)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SGWTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
