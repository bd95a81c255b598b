"""Long-run reference values for the MCMC benchmark series.

Prints the median batch-means, ICS and AR tau over independent chains at the
default parameters.  The ICS medians are stored in
``actime.generators.CALIBRATED_TAU``.

    python scripts/calibrate.py --n 10000000 --replicates 10
"""

import argparse

import numpy as np

from actime.ar import ar_tau
from actime.batch_means import batch_means_tau
from actime.generators import SeriesKind, SeriesSpec, generate
from actime.initial_seq import ics_tau

MCMC_KINDS = [
    SeriesKind.MET_GAUSS,
    SeriesKind.BIMODAL_MET,
    SeriesKind.STEPOUT_LOGVAR,
    SeriesKind.STEPOUT_VAR,
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10_000_000)
    ap.add_argument("--replicates", type=int, default=10)
    ap.add_argument("--seed", type=int, default=90210)
    ap.add_argument("--kinds", nargs="*", default=[k.value for k in MCMC_KINDS])
    args = ap.parse_args()
    for kind in args.kinds:
        rows = []
        for r in range(args.replicates):
            s = generate(SeriesSpec(SeriesKind(kind), args.n, args.seed + r))
            rows.append((batch_means_tau(s).tau, ics_tau(s).tau, ar_tau(s).tau))
            accept = s.meta.get("acceptance_rate")
        rows = np.array(rows)
        med = np.median(rows, axis=0)
        se = rows.std(axis=0, ddof=1) / np.sqrt(len(rows))
        print(f"{kind:16s} batch-means {med[0]:9.3f} (se {se[0]:.3f})  "
              f"ics {med[1]:9.3f} (se {se[1]:.3f})  ar {med[2]:9.3f} (se {se[2]:.3f})"
              + (f"  accept {accept:.3f}" if accept is not None else ""), flush=True)


if __name__ == "__main__":
    main()
