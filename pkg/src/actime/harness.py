"""Length sweeps comparing the estimators on the benchmark series."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .ar import ar_tau_ci
from .errors import ActimeError, ConfigError
from .estimate import DEFAULT_METHODS, estimate
from .generators import ALL_KINDS, SeriesKind, SeriesSpec, TruthRecord, generate, reference_truth
from .series import Method, TimeSeries, as_series, prefix, sample_acf

CSV_HEADER = "series,method,length,seed,tau,lower,upper,status,ms"


def default_lengths(lo: int = 10, hi: int = 500_000, count: int = 20) -> list[int]:
    return [int(v) for v in np.round(np.geomspace(lo, hi, count))]


@dataclass
class SweepConfig:
    kinds: list[SeriesKind] = field(default_factory=lambda: list(ALL_KINDS))
    lengths: list[int] = field(default_factory=default_lengths)
    methods: list[Method] = field(default_factory=lambda: list(DEFAULT_METHODS))
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2])
    n: int | None = None  # generated length; defaults to max(lengths)
    base_seed: int = 2010
    params: dict[str, dict[str, float]] = field(default_factory=dict)
    workers: int = 1
    ci: bool = False
    ci_level: float = 0.95
    ci_draws: int = 1000
    max_order: int | None = None
    output_dir: str | None = None

    def __post_init__(self):
        try:
            self.kinds = [SeriesKind(k) for k in self.kinds]
            self.methods = [Method(m) for m in self.methods]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.lengths = [int(v) for v in self.lengths]
        self.seeds = [int(s) for s in self.seeds]
        self.validate()

    @property
    def series_n(self) -> int:
        return self.n if self.n is not None else max(self.lengths)

    def validate(self) -> None:
        if not self.kinds or not self.methods or not self.seeds or not self.lengths:
            raise ConfigError("kinds, methods, seeds and lengths must be nonempty")
        if any(v < 1 for v in self.lengths):
            raise ConfigError("lengths must be positive")
        if any(b <= a for a, b in zip(self.lengths, self.lengths[1:])):
            raise ConfigError("lengths must be strictly increasing")
        if max(self.lengths) > self.series_n:
            raise ConfigError(f"largest length {max(self.lengths)} exceeds n={self.series_n}")
        if len(set(self.seeds)) != len(self.seeds) or min(self.seeds) < 0:
            raise ConfigError("seeds must be distinct nonnegative integers")
        if len(set(self.kinds)) != len(self.kinds) or len(set(self.methods)) != len(self.methods):
            raise ConfigError("kinds and methods must not repeat")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not 0 < self.ci_level < 1 or self.ci_draws < 100:
            raise ConfigError("ci_level must lie in (0, 1) and ci_draws be >= 100")
        for kind in self.params:
            if kind not in {str(k) for k in self.kinds}:
                raise ConfigError(f"parameters given for unused kind {kind}")
        for kind in self.kinds:
            self.spec(kind, 0)

    def spec(self, kind: SeriesKind, seed: int) -> SeriesSpec:
        try:
            return SeriesSpec(kind, self.series_n, cell_seed(self.base_seed, kind, seed),
                              params=dict(self.params.get(str(kind), {})))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class SweepRow:
    series: str
    method: str
    length: int
    seed: int
    tau: float | None
    status: str = "ok"
    lower: float | None = None
    upper: float | None = None
    ms: float | None = None
    n_rejected: int | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow]
    truth: dict[str, TruthRecord] = field(default_factory=dict)

    def cell(self, series, method, length, seed) -> SweepRow:
        for r in self.rows:
            if (r.series, r.method, r.length, r.seed) == (str(series), str(method), length, seed):
                return r
        raise KeyError((series, method, length, seed))


def cell_seed(base_seed: int, kind: SeriesKind, seed: int) -> int:
    """Generator seed for one (series kind, seed index) pair."""
    kind_index = ALL_KINDS.index(SeriesKind(kind))
    ss = np.random.SeedSequence([base_seed, kind_index, seed])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def _estimate_rows(series: TimeSeries, kind, seed, config: SweepConfig) -> list[SweepRow]:
    rows = []
    for method in config.methods:
        for length in config.lengths:
            sub = prefix(series, length)
            t0 = time.perf_counter()
            try:
                est = estimate(sub, method, max_order=config.max_order)
                row = SweepRow(str(kind), str(method), length, seed, est.tau)
            except ActimeError as exc:
                row = SweepRow(str(kind), str(method), length, seed, None, status=exc.code)
            row.ms = (time.perf_counter() - t0) * 1e3
            rows.append(row)
    return rows


def _ci_rows(series: TimeSeries, kind, seed, config: SweepConfig) -> list[SweepRow]:
    rows = []
    for length in config.lengths:
        sub = prefix(series, length)
        draw_seed = int(np.random.SeedSequence([series.seed, length]).generate_state(1)[0])
        t0 = time.perf_counter()
        try:
            ci = ar_tau_ci(sub, config.ci_level, config.ci_draws, draw_seed,
                           max_order=config.max_order)
            row = SweepRow(str(kind), str(Method.AR), length, seed, ci.estimate.tau,
                           lower=ci.lower, upper=ci.upper, n_rejected=ci.n_rejected)
        except ActimeError as exc:
            row = SweepRow(str(kind), str(Method.AR), length, seed, None, status=exc.code)
        row.ms = (time.perf_counter() - t0) * 1e3
        rows.append(row)
    return rows


def _run_block(args) -> list[SweepRow]:
    config, kind, seed = args
    series = generate(config.spec(kind, seed))
    if config.ci:
        return _ci_rows(series, kind, seed, config)
    return _estimate_rows(series, kind, seed, config)


def _sort_key(config: SweepConfig):
    kind_pos = {str(k): i for i, k in enumerate(config.kinds)}
    method_pos = {str(m): i for i, m in enumerate(config.methods)}
    seed_pos = {s: i for i, s in enumerate(config.seeds)}
    return lambda r: (kind_pos[r.series], method_pos[r.method], r.length, seed_pos[r.seed])


def _truths(config: SweepConfig) -> dict[str, TruthRecord]:
    out = {}
    for kind in config.kinds:
        try:
            out[str(kind)] = reference_truth(kind, config.params.get(str(kind)))
        except ValueError:
            pass  # non-default parameters without a closed form
    return out


def run_sweep(config: SweepConfig) -> SweepResult:
    """Estimate tau for every (series, method, length, seed) cell.

    Each (series, seed) pair is generated once at full length and all
    estimates use prefixes of it.  Estimator failures become rows with a
    status code.  Output order is canonical, so the result does not depend
    on ``config.workers``.
    """
    config.validate()
    jobs = [(config, kind, seed) for kind in config.kinds for seed in config.seeds]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            blocks = list(pool.map(_run_block, jobs))
    else:
        blocks = [_run_block(job) for job in jobs]
    rows = [r for block in blocks for r in block]
    rows.sort(key=_sort_key(config))
    return SweepResult(rows, _truths(config))


def run_ci_sweep(config: SweepConfig) -> SweepResult:
    """AR-method sweep with Monte Carlo confidence intervals."""
    return run_sweep(replace(config, ci=True, methods=[Method.AR]))


# -- output -----------------------------------------------------------------

def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def emit_csv(result: SweepResult, path, timing: bool = False) -> Path:
    """Write one line per cell.

    Wall time is left blank unless ``timing`` is set, which keeps reruns of
    the same configuration byte-identical.
    """
    path = Path(path)
    lines = [CSV_HEADER]
    for r in result.rows:
        ms = f"{r.ms:.3f}" if timing and r.ms is not None else ""
        lines.append(",".join([
            r.series, r.method, str(r.length), str(r.seed),
            _fmt(r.tau), _fmt(r.lower), _fmt(r.upper), r.status, ms,
        ]))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> SweepResult:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ConfigError(f"{path}: not a sweep result file")

    def num(s):
        return float(s) if s else None

    rows = []
    for ln in lines[1:]:
        if not ln.strip():
            continue
        f = ln.split(",")
        rows.append(SweepRow(f[0], f[1], int(f[2]), int(f[3]), num(f[4]), f[7],
                             num(f[5]), num(f[6]), num(f[8])))
    truth = _read_truth(Path(path).with_name("truth.csv"))
    for name in dict.fromkeys(r.series for r in rows):
        if name in truth:
            continue
        try:
            truth[name] = reference_truth(name)
        except ValueError:
            pass
    return SweepResult(rows, truth)


def write_truth(result: SweepResult, path) -> Path:
    path = Path(path)
    lines = ["series,tau_true,provenance,published_value"]
    for name, t in result.truth.items():
        lines.append(f"{name},{t.tau_true!r},{t.provenance},{_fmt(t.published_value)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _read_truth(path: Path) -> dict[str, TruthRecord]:
    """Reference values written next to a results file, if any."""
    if not path.exists():
        return {}
    out = {}
    for ln in path.read_text().splitlines()[1:]:
        if ln.strip():
            name, tau, provenance, pub = ln.split(",")
            out[name] = TruthRecord(SeriesKind(name), float(tau), provenance,
                                    published_value=float(pub) if pub else None)
    return out


def build_figure(result: SweepResult):
    """Figure with one log-log panel per series; failures leave gaps."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not result.rows:
        raise ValueError("nothing to plot")
    series_names = list(dict.fromkeys(r.series for r in result.rows))
    methods = list(dict.fromkeys(r.method for r in result.rows))
    seeds = list(dict.fromkeys(r.seed for r in result.rows))
    ncols = min(2, len(series_names))
    nrows = -(-len(series_names) // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(5.5 * ncols, 3.6 * nrows), squeeze=False)
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for ax, name in zip(axes.flat, series_names):
        for mi, method in enumerate(methods):
            color = colors[mi % len(colors)]
            for si, seed in enumerate(seeds):
                cells = sorted((r for r in result.rows
                                if r.series == name and r.method == method and r.seed == seed),
                               key=lambda r: r.length)
                if not cells:
                    continue
                x = np.array([r.length for r in cells], dtype=float)
                # NaN breaks the polyline where an estimate failed
                y = np.array([r.tau if r.tau is not None else np.nan for r in cells])
                ax.plot(x, y, marker="o", ms=2.5, lw=1, color=color,
                        label=method if si == 0 else None)
                lo = np.array([r.lower if r.lower is not None else np.nan for r in cells])
                hi = np.array([r.upper if r.upper is not None else np.nan for r in cells])
                if np.any(np.isfinite(lo)):
                    ax.fill_between(x, lo, hi, color=color, alpha=0.15, lw=0)
        if name in result.truth:
            ax.axhline(result.truth[name].tau_true, ls="--", color="k", lw=1)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_title(name)
        ax.set_xlabel("subsequence length")
        ax.set_ylabel("autocorrelation time")
    for ax in list(axes.flat)[len(series_names):]:
        ax.remove()
    axes.flat[0].legend(fontsize="small")
    fig.tight_layout()
    return fig


def emit_plot(result: SweepResult, path) -> Path:
    import matplotlib.pyplot as plt

    path = Path(path)
    fig = build_figure(result)
    fig.savefig(path, format=path.suffix.lstrip(".") or "svg")
    plt.close(fig)
    return path


@dataclass
class AcfReport:
    lags: np.ndarray
    rho: np.ndarray
    first_zero_crossing: int | None
    min_rho: float

    def to_csv(self, path) -> Path:
        path = Path(path)
        body = "\n".join(f"{k},{float(r)!r}" for k, r in zip(self.lags, self.rho))
        path.write_text("lag,rho\n" + body + "\n")
        meta = {"first_zero_crossing": self.first_zero_crossing, "min_rho": self.min_rho,
                "max_lag": int(self.lags[-1])}
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, indent=2) + "\n")
        return path


def acf_report(series, max_lag: int) -> AcfReport:
    series = as_series(series)
    acf = sample_acf(series, max_lag)
    below = np.flatnonzero(acf.rho <= 0)
    first = int(below[0]) if below.size else None
    return AcfReport(np.arange(acf.rho.size), acf.rho, first, float(acf.rho.min()))


# -- config files -------------------------------------------------------------

_LIST_KEYS = {"kinds", "lengths", "methods", "seeds"}
_SCALAR_KEYS = {"n": int, "base_seed": int, "workers": int, "ci": None,
                "ci_level": float, "ci_draws": int, "max_order": int}


def parse_config(text: str) -> SweepConfig:
    """Parse ``key = value`` lines; lists are comma separated.

    ``param.<kind>.<name> = value`` overrides a generator parameter.
    """
    kwargs: dict = {}
    params: dict[str, dict[str, float]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key in _LIST_KEYS:
                items = [v.strip() for v in value.split(",") if v.strip()]
                kwargs[key] = [int(v) for v in items] if key in ("lengths", "seeds") else items
            elif key == "lengths_geom":
                lo, hi, count = (int(v) for v in value.split(","))
                kwargs["lengths"] = default_lengths(lo, hi, count)
            elif key == "ci":
                kwargs["ci"] = value.lower() in ("1", "true", "yes", "on")
            elif key in _SCALAR_KEYS:
                kwargs[key] = _SCALAR_KEYS[key](value)
            elif key.startswith("param."):
                _, kind, name = key.split(".", 2)
                params.setdefault(kind, {})[name] = float(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    if params:
        kwargs["params"] = params
    return SweepConfig(**kwargs)


def load_config(path) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)
