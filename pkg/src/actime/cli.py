"""Command-line interface: ``actime {estimate,generate,sweep,plot,oracle,acf}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .ar import ar_tau_ci
from .errors import ActimeError, ConfigError
from .estimate import estimate
from .generators import SeriesKind, SeriesSpec, generate, oracle_tau
from .initial_seq import gamma_table
from .series import Method, read_series, write_series, write_series_csv
from .spectrum import periodogram

EXIT_ESTIMATE_FAILED = 3


def _parse_params(pairs):
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        out[key.strip()] = float(value)
    return out


def cmd_estimate(args) -> int:
    series = read_series(args.file)
    method = Method(args.method)
    try:
        if method is Method.AR and args.ci is not None:
            ci = ar_tau_ci(series, args.ci, args.draws, args.seed, max_order=args.max_order)
            out = {"method": str(method), "n": series.n, "order": ci.order,
                   "tau": ci.estimate.tau, "lower": ci.lower, "upper": ci.upper,
                   "level": ci.level, "n_draws": ci.n_draws, "n_rejected": ci.n_rejected}
        else:
            est = estimate(series, method, batch_size=args.batch_size, order=args.order,
                           max_order=args.max_order)
            out = {"method": str(method), "n": est.n_used, "tau": est.tau, **est.detail}
        if args.dump:
            _dump(series, method, args.dump)
    except ActimeError as exc:
        print(f"{method}: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATE_FAILED
    if args.json:
        print(json.dumps(out))
    else:
        print(" ".join(f"{k}={v}" for k, v in out.items()))
    return 0


def _dump(series, method: Method, path) -> None:
    with open(path, "w") as fh:
        if method is Method.SPECTRUM_FIT:
            pg = periodogram(series)
            fh.write("freq,power\n")
            for f, p in zip(pg.freqs, pg.power):
                fh.write(f"{float(f)!r},{float(p)!r}\n")
        elif method in (Method.IPS, Method.IMS, Method.ICS):
            fh.write("m,gamma_raw,gamma_smoothed\n")
            for m, raw, sm in gamma_table(series, method):
                fh.write(f"{m},{raw!r},{sm!r}\n")
        else:
            raise ConfigError(f"--dump is not available for {method}")


def cmd_generate(args) -> int:
    spec = SeriesSpec(SeriesKind(args.kind), args.n, args.seed, _parse_params(args.param),
                      args.burn_in)
    series = generate(spec)
    out = Path(args.out)
    if args.csv:
        write_series_csv(series, out)
    else:
        write_series(series, out)
    meta = {"label": series.label, **series.meta, "n": series.n}
    Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {series.n} values to {out}")
    return 0


def cmd_sweep(args) -> int:
    config = harness.load_config(args.config)
    if args.workers is not None:
        config.workers = args.workers
        config.validate()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = harness.run_sweep(config)
    harness.emit_csv(result, out / "results.csv", timing=args.timing)
    harness.write_truth(result, out / "truth.csv")
    if not args.no_plot:
        harness.emit_plot(result, out / "comparison.svg")
    failed = sum(r.status != "ok" for r in result.rows)
    print(f"{len(result.rows)} cells, {failed} without an estimate; results in {out}")
    return 0


def cmd_plot(args) -> int:
    result = harness.read_csv(args.infile)
    out = Path(args.out)
    if out.suffix:
        target = out
        target.parent.mkdir(parents=True, exist_ok=True)
    else:
        out.mkdir(parents=True, exist_ok=True)
        target = out / "comparison.svg"
    harness.emit_plot(result, target)
    print(f"wrote {target}")
    return 0


def cmd_oracle(args) -> int:
    spec = SeriesSpec(SeriesKind(args.kind), args.n, args.seed, _parse_params(args.param))
    rec = oracle_tau(spec, args.n, args.replicates)
    print(f"kind={rec.kind} tau_true={rec.tau_true!r} provenance={rec.provenance} "
          f"published_value={rec.published_value}")
    if rec.oracle_detail:
        print(rec.oracle_detail)
    return 0


def cmd_acf(args) -> int:
    series = read_series(args.file)
    report = harness.acf_report(series, args.max_lag)
    report.to_csv(args.out)
    print(f"first_zero_crossing={report.first_zero_crossing} min_rho={report.min_rho!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="actime", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the autocorrelation time of a series file")
    p.add_argument("file")
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    p.add_argument("--batch-size", type=int)
    p.add_argument("--order", type=int, default=1, choices=[1, 2])
    p.add_argument("--ci", type=float, metavar="LEVEL")
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-order", type=int)
    p.add_argument("--dump", metavar="CSV",
                   help="write the periodogram or the pair-sum sequence")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("generate", help="generate a benchmark series")
    p.add_argument("--kind", required=True, choices=[k.value for k in SeriesKind])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", metavar="K=V")
    p.add_argument("--burn-in", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", action="store_true", help="write index,value CSV")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="run a subsequence-length comparison")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", help="fill the ms column")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="plot a results.csv")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("oracle", help="reference autocorrelation time for a series kind")
    p.add_argument("--kind", required=True, choices=[k.value for k in SeriesKind])
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", metavar="K=V")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("acf", help="write the sample ACF of a series file")
    p.add_argument("file")
    p.add_argument("--max-lag", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_acf)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ActimeError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATE_FAILED


if __name__ == "__main__":
    sys.exit(main())
