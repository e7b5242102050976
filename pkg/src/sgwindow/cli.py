"""Command line interface.

    sgwindow coeffs --order 2 --window 5
    sgwindow smooth --input x.csv --order 2 --window 31
    sgwindow smooth --input x.csv --order 2 --auto --sigma 1
    sgwindow select --input x.csv --order 2 --sigma 1
    sgwindow bench table1 --trials 20 --seed 7 --out table1.csv

Exit codes: 0 success, 2 usage error, 3 input/parse error,
4 numeric/domain error.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from typing import List, Optional, Sequence

from . import bench
from .csvio import read_signal, write_rows, write_signal
from .errors import ParseError, SGError
from .kernel import EDGE_POLICIES, FilterSpec, convolve_same, kernel_cheb, kernel_ls
from .window import WindowBounds, estimate_sigma, select_window_iterative

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sgwindow",
                                description="Savitzky-Golay smoothing with optimal window selection.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="print filter coefficients as 'i,w_i' rows")
    c.add_argument("--order", type=int, required=True)
    c.add_argument("--window", type=int, required=True)
    c.add_argument("--method", choices=("cheb", "ls"), default="cheb")

    s = sub.add_parser("smooth", help="smooth a CSV signal")
    s.add_argument("--input", required=True)
    s.add_argument("--order", type=int, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--window", type=int)
    g.add_argument("--auto", action="store_true", help="choose the window iteratively")
    s.add_argument("--sigma", type=float, help="noise standard deviation (for --auto)")
    s.add_argument("--estimate-sigma", action="store_true",
                   help="estimate sigma from first differences (heuristic helper, "
                        "not part of the window theory)")
    s.add_argument("--max-window", type=int)
    s.add_argument("--edge", choices=EDGE_POLICIES, default="reflect")
    s.add_argument("--out")

    sel = sub.add_parser("select", help="report the iterative window selection trace")
    sel.add_argument("--input", required=True)
    sel.add_argument("--order", type=int, required=True)
    sel.add_argument("--sigma", type=float, required=True)
    sel.add_argument("--max-window", type=int)
    sel.add_argument("--out")

    b = sub.add_parser("bench", help="reproduce benchmark tables and sweeps")
    bsub = b.add_subparsers(dest="bench_command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--L", type=int, default=1000)
    common.add_argument("--T", type=float, default=15.0)

    t1 = bsub.add_parser("table1", parents=[common], help="3 waveforms x 2 noise levels x 4 orders")
    t1.add_argument("--trials", type=int, default=bench.DEFAULT_TRIALS)

    sw = bsub.add_parser("sweep", parents=[common], help="window choice versus noise level")
    sw.add_argument("--waveform", choices=bench.WAVEFORMS, default="X1")
    sw.add_argument("--order", type=int, default=2)
    sw.add_argument("--sigmas", type=_float_list, default=[0.25, 0.5, 1.0, 2.0])
    sw.add_argument("--trials", type=int, default=bench.DEFAULT_TRIALS)

    d = bsub.add_parser("demo", parents=[common], help="bias-variance traces for a few windows")
    d.add_argument("--waveform", choices=bench.WAVEFORMS, default="X1")
    d.add_argument("--order", type=int, default=2)
    d.add_argument("--sigma", type=float, default=1.0)
    d.add_argument("--windows", type=_int_list, default=[19, 163, 501])
    return p


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _load(path: str):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return read_signal(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def _cmd_coeffs(args) -> None:
    spec = FilterSpec(args.order, args.window)
    k = kernel_cheb(spec) if args.method == "cheb" else kernel_ls(spec)
    write_rows(sys.stdout, zip(k.offsets.tolist(), k.weights))


def _bounds(order: int, length: int, max_window: Optional[int]) -> WindowBounds:
    return WindowBounds.for_order(order, length=length, n_max=max_window)


def _cmd_smooth(args, parser) -> None:
    signal, header = _load(args.input)
    if args.auto:
        if args.sigma is None and not args.estimate_sigma:
            parser.error("--auto needs --sigma or --estimate-sigma")
        if args.sigma is not None and args.estimate_sigma:
            parser.error("--sigma and --estimate-sigma are mutually exclusive")
        sigma = args.sigma if args.sigma is not None else estimate_sigma(signal)
        trace = select_window_iterative(signal, args.order, sigma**2,
                                        _bounds(args.order, len(signal), args.max_window))
        window = trace.final_window
        print(f"sigma={sigma:.6g} {trace.summary()}", file=sys.stderr)
    else:
        if args.sigma is not None or args.estimate_sigma:
            parser.error("--sigma/--estimate-sigma only apply with --auto")
        window = args.window
    kernel = kernel_cheb(FilterSpec(args.order, window))
    out = convolve_same(signal, kernel, edge=args.edge)
    with _output(args.out) as fh:
        write_signal(fh, out, header)


def _cmd_select(args) -> None:
    signal, _ = _load(args.input)
    trace = select_window_iterative(signal, args.order, args.sigma**2,
                                    _bounds(args.order, len(signal), args.max_window))
    rows = [(i, it.window, it.v_hat, it.n_star) for i, it in enumerate(trace.iterations, 1)]
    rows.append(("final", trace.final_window, trace.status, len(trace.iterations)))
    with _output(args.out) as fh:
        write_rows(fh, rows, header=("iteration", "N1", "v_hat", "N_next"))
    print(trace.summary(), file=sys.stderr)


def _cmd_bench(args) -> None:
    if args.bench_command == "table1":
        rows = bench.run_table1(L=args.L, T=args.T, trials=args.trials, seed=args.seed)
        header, data = bench.BenchRow.COLUMNS, [r.values() for r in rows]
        flagged = sum(r.flagged for r in rows)
        if flagged:
            print(f"note: {flagged} X3 rows flagged (roughness depends on the t=0 singularity)",
                  file=sys.stderr)
    elif args.bench_command == "sweep":
        rows = bench.run_noise_sweep(args.waveform, args.order, args.sigmas, trials=args.trials,
                                     seed=args.seed, L=args.L, T=args.T)
        header, data = bench.SweepRow.COLUMNS, [r.values() for r in rows]
    else:
        header, table = bench.run_bias_variance_demo(args.waveform, args.sigma, args.order,
                                                     args.windows, seed=args.seed,
                                                     L=args.L, T=args.T)
        data = table.tolist()
    with _output(args.out) as fh:
        write_rows(fh, data, header)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "coeffs":
            _cmd_coeffs(args)
        elif args.command == "smooth":
            _cmd_smooth(args, parser)
        elif args.command == "select":
            _cmd_select(args)
        else:
            _cmd_bench(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
