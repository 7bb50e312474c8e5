"""Monte Carlo experiments: configuration, seeded streams, metrics and result files.

An experiment is described by an :class:`ExperimentConfig` (usually read from
an INI file) and reproduces one of three studies:

``selection``
    frequencies of the selected number of components for VR, GVR,
    ``m_{n,E}`` and the combined rule.
``mean-sd``
    bootstrap estimates of the sd of ``sqrt(n)`` times the sample mean for the
    sieve bootstrap and the three block bootstraps, scored by ABias, RBias and
    AStd against a Monte Carlo oracle.
``two-sample``
    rejection rates of the sieve two-sample mean test over a grid of shifts.

Every random draw comes from a PCG64 stream seeded by
``SeedSequence(seed, spawn_key=(domain, n_index, replicate, stream))`` so
replicates are independent of execution order and worker count.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from fsieve import __version__
from fsieve.blockboot import METHODS as BLOCK_METHODS, BlockConfig
from fsieve.fpca import fpca, scores
from fsieve.select import DEFAULT_Q, gvr_select, m_hat, m_n_E, vr_select
from fsieve.sieve import fit
from fsieve.simgen import OPERATORS, Fma1FourierSpec, Fma1KernelSpec, fma1_fourier, fma1_fourier_batch, fma1_kernel
from fsieve.stats import mean_sd_bootstrap, two_sample_test

log = logging.getLogger(__name__)

KINDS = ("selection", "mean-sd", "two-sample")
MODELS = ("fma1-fourier", "fma1-kernel")
SELECTION_CRITERIA = ("vr", "gvr", "m_e", "m_hat")
METRICS = ("abias", "rbias", "astd")
RNG_ALGORITHM = "PCG64 via SeedSequence(seed, spawn_key=(domain, n_index, replicate, stream))"
FAILURE_BUDGET = 0.01
MANIFEST = "manifest.json"

# spawn-key domains
REPLICATE_DOMAIN = 0
ORACLE_DOMAIN = 1

DESK_SCALE = {"replications": 200, "bootstrap": 500, "exact_replications": 5000}
FULL_SCALE = {"replications": 1000, "bootstrap": 1000, "exact_replications": 20000}


class ConfigError(ValueError):
    pass


class ExperimentError(RuntimeError):
    pass


# -- configuration -----------------------------------------------------------


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in _split(text))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in _split(text))


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(v.lower() for v in _split(text))


def _pair_list(text: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for item in _split(text):
        m, sep, p = item.partition(":")
        if not sep:
            raise ConfigError(f"expected m:p pairs, got {item!r}")
        pairs.append((int(m), int(p)))
    return tuple(pairs)


def _split(text: str) -> list[str]:
    return [v.strip() for v in text.replace(";", ",").split(",") if v.strip()]


def _log_base(text: str) -> float:
    return math.e if text.strip().lower() == "e" else float(text)


# section -> key -> (parser, attribute)
SCHEMA = {
    "experiment": {
        "kind": (str.strip, "kind"),
        "seed": (int, "seed"),
        "replications": (int, "R"),
        "bootstrap": (int, "B"),
        "exact_replications": (int, "R_exact"),
        "n": (_int_list, "ns"),
        "q": (float, "Q"),
        "threads": (int, "threads"),
        "output": (str.strip, "output"),
        "metrics": (_str_list, "metrics"),
    },
    "model": {
        "name": (str.strip, "model"),
        "operator": (str.strip, "operator"),
        "grid_size": (int, "grid_size"),
        "basis_size": (int, "D"),
        "theta0": (float, "theta0"),
    },
    "selection": {
        "criteria": (_str_list, "criteria"),
        "log_base": (_log_base, "log_base"),
    },
    "fsb": {
        "pairs": (_pair_list, "fsb_pairs"),
    },
    "mbb": {"b": (_int_list, "mbb_b")},
    "tbb": {"b": (_int_list, "tbb_b"), "c": (float, "tbb_c")},
    "sb": {"b": (_float_list, "sb_b")},
    "two_sample": {
        "gammas": (_float_list, "gammas"),
        "n2": (int, "n2"),
        "m": (int, "m"),
        "p": (int, "p"),
        "alphas": (_float_list, "alphas"),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = 0
    R: int = DESK_SCALE["replications"]
    B: int = DESK_SCALE["bootstrap"]
    R_exact: int = DESK_SCALE["exact_replications"]
    ns: tuple[int, ...] = (100,)
    Q: float = DEFAULT_Q
    threads: int = 1
    output: str = "results"
    metrics: tuple[str, ...] = METRICS
    model: str | None = None  # defaults to the model of the chosen study
    operator: str = "identity"
    grid_size: int = 21
    D: int = 21
    theta0: float = 0.8
    criteria: tuple[str, ...] = SELECTION_CRITERIA
    log_base: float = math.e
    fsb_pairs: tuple[tuple[int, int], ...] = ((2, 3), (3, 3))
    mbb_b: tuple[int, ...] = (4, 5, 6, 7, 8, 9, 10)
    tbb_b: tuple[int, ...] = (4, 5, 6, 7, 8, 9, 10)
    tbb_c: float = 0.43
    sb_b: tuple[float, ...] = (4, 5, 6, 7, 8, 9, 10)
    gammas: tuple[float, ...] = (0.0, 0.2, 0.5, 0.8, 1.0)
    n2: int | None = None
    m: int = 3
    p: int = 1
    alphas: tuple[float, ...] = (0.01, 0.05, 0.10)

    def __post_init__(self) -> None:
        if self.model is None:
            object.__setattr__(self, "model", "fma1-kernel" if self.kind == "two-sample" else "fma1-fourier")
        self.validate()

    @classmethod
    def from_ini(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        parser = configparser.ConfigParser(interpolation=None)
        with open(path) as fh:
            parser.read_file(fh)
        return cls.from_parser(parser, **overrides)

    @classmethod
    def from_string(cls, text: str, **overrides) -> "ExperimentConfig":
        parser = configparser.ConfigParser(interpolation=None)
        parser.read_string(text)
        return cls.from_parser(parser, **overrides)

    @classmethod
    def from_parser(cls, parser: configparser.ConfigParser, **overrides) -> "ExperimentConfig":
        values: dict = {}
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]")
            keys = SCHEMA[section]
            for key, raw in parser.items(section):
                if key not in keys:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                conv, attr = keys[key]
                try:
                    values[attr] = conv(raw)
                except ValueError as exc:
                    raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
        if "kind" not in values:
            raise ConfigError("[experiment] kind is required")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.R < 1 or self.B < 1:
            raise ConfigError("replications and bootstrap counts must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if not self.ns or min(self.ns) < 4:
            raise ConfigError("every sample size must be at least 4")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if self.operator not in OPERATORS:
            raise ConfigError(f"operator must be one of {OPERATORS}")
        if not 0 < self.Q <= 1:
            raise ConfigError("q must lie in (0, 1]")
        if self.kind == "selection":
            bad = set(self.criteria) - set(SELECTION_CRITERIA)
            if bad:
                raise ConfigError(f"unknown selection criteria {sorted(bad)}")
        if self.kind == "mean-sd":
            self._validate_mean_sd()
        if self.kind == "two-sample":
            self._validate_two_sample()

    def _validate_mean_sd(self) -> None:
        if self.model != "fma1-fourier":
            raise ConfigError("the mean-sd study uses the fma1-fourier model")
        if self.R_exact < 100:
            raise ConfigError("exact_replications must be at least 100")
        if self.B < 2:
            raise ConfigError("bootstrap count must be at least 2 for an sd estimate")
        bad = set(self.metrics) - set(METRICS)
        if bad:
            raise ConfigError(f"unknown metrics {sorted(bad)}")
        for n in self.ns:
            for m, p in self.fsb_pairs:
                if m < 1 or p < 1 or n <= m * (p + 1) + 1:
                    raise ConfigError(f"FSB({m},{p}) infeasible for n={n}")
                if m > self.grid_size:
                    raise ConfigError(f"FSB m={m} exceeds the grid size")
            for name, grid in (("mbb", self.mbb_b), ("tbb", self.tbb_b), ("sb", self.sb_b)):
                for b in grid:
                    if b < 1 or b > n:
                        raise ConfigError(f"{name} block length {b} infeasible for n={n}")
        if not 0 <= self.tbb_c <= 0.5:
            raise ConfigError("tbb c must lie in [0, 0.5]")

    def _validate_two_sample(self) -> None:
        if self.model != "fma1-kernel":
            raise ConfigError("the two-sample study uses the fma1-kernel model")
        for n in self.ns + (self.second_size(self.ns[0]),):
            if self.m < 1 or self.p < 1 or n <= self.m * (self.p + 1) + 1:
                raise ConfigError(f"(m, p) = ({self.m}, {self.p}) infeasible for n={n}")
        if not self.gammas:
            raise ConfigError("two_sample gammas must not be empty")
        if any(not 0 < a < 1 for a in self.alphas):
            raise ConfigError("alphas must lie in (0, 1)")

    def second_size(self, n1: int) -> int:
        return n1 if self.n2 is None else self.n2

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("threads")  # execution detail, not part of the experiment identity
        d.pop("output")
        return d

    def digest(self) -> str:
        blob = json.dumps({"config": self.to_dict(), "version": __version__}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def fourier_spec(self) -> Fma1FourierSpec:
        return Fma1FourierSpec(D=self.D, theta0=self.theta0, grid_size=self.grid_size, operator=self.operator)

    def methods(self) -> list[tuple[str, dict]]:
        """Bootstrap methods of the mean-sd study, in stream order."""
        out = [(f"FSB({m},{p})", {"method": "fsb", "m": m, "p": p}) for m, p in self.fsb_pairs]
        out += [(f"MBB{b}", {"method": "mbb", "b": b}) for b in self.mbb_b]
        out += [(f"TBB{b}", {"method": "tbb", "b": b, "c": self.tbb_c}) for b in self.tbb_b]
        out += [(f"SB{_fmt_b(b)}", {"method": "sb", "b": b}) for b in self.sb_b]
        return out


def _fmt_b(b: float) -> str:
    return str(int(b)) if float(b).is_integer() else f"{b:g}"


# -- random streams ----------------------------------------------------------


def stream_key(replicate: int, stream: int, n_index: int = 0, domain: int = REPLICATE_DOMAIN) -> tuple[int, ...]:
    if min(replicate, stream, n_index, domain) < 0:
        raise ValueError("stream indices must be nonnegative")
    return (domain, n_index, replicate, stream)


def make_rng(seed: int, key: tuple[int, ...]) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


# -- oracle and metrics ------------------------------------------------------


def exact_sd_oracle(
    spec: Fma1FourierSpec, n: int, R_exact: int, rng: np.random.Generator, *, chunk: int = 500
) -> np.ndarray:
    """Per-tau sd of ``sqrt(n)`` times the sample mean over ``R_exact`` fresh series."""
    if R_exact < 100:
        raise ValueError("R_exact must be at least 100")
    means = []
    done = 0
    while done < R_exact:
        k = min(chunk, R_exact - done)
        means.append(fma1_fourier_batch(spec, n, k, rng).mean(axis=1))
        done += k
    return np.sqrt(n) * np.concatenate(means).std(axis=0, ddof=1)


@dataclass
class MetricRow:
    method: str
    params: dict
    abias: float
    rbias: float
    astd: float
    mean_curve: np.ndarray | None = field(default=None, repr=False)

    def as_row(self, metrics=METRICS) -> list:
        return [self.method, _params_text(self.params)] + [f"{getattr(self, k):.10g}" for k in metrics]


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                    for k, v in params.items() if k != "method")


def metrics(estimates: np.ndarray, exact: np.ndarray, *, method: str = "", params: dict | None = None,
            relative: bool = True) -> MetricRow:
    """ABias, RBias and AStd of per-replicate sd curves (R, T) against the exact curve (T,).

    AStd is the tau-average of the across-replicate sd (ddof = 1); a single
    replicate has no spread and gets AStd = 0.
    """
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    exact = np.asarray(exact, dtype=float)
    if est.shape[1] != exact.shape[0]:
        raise ValueError(f"estimate grid {est.shape[1]} != exact grid {exact.shape[0]}")
    centre = est.mean(axis=0)
    abias = float(np.mean(np.abs(centre - exact)))
    if relative:
        if np.any(exact == 0):
            raise ValueError("exact sd is zero at some tau; RBias is undefined")
        rbias = float(np.mean(np.abs(centre / exact - 1)))
    else:
        rbias = float("nan")
    astd = float(np.mean(est.std(axis=0, ddof=1))) if est.shape[0] > 1 else 0.0
    return MetricRow(method, dict(params or {}), abias, rbias, astd, centre)


def best_two(rows: list[MetricRow]) -> dict[str, list[MetricRow]]:
    """Per block method, the two block lengths with the lowest ABias."""
    out: dict[str, list[MetricRow]] = {}
    for name in BLOCK_METHODS:
        own = [r for r in rows if r.params.get("method") == name]
        out[name] = sorted(own, key=lambda r: r.abias)[:2]
    return out


# -- replicate workers ------------------------------------------------------


def _selection_replicate(config: ExperimentConfig, n_index: int, r: int) -> dict:
    n = config.ns[n_index]
    rng = make_rng(config.seed, stream_key(r, 0, n_index))
    series = fma1_fourier(config.fourier_spec(), n, rng)
    _, eig = fpca(series)
    out = {}
    for crit in config.criteria:
        if crit == "vr":
            out[crit] = vr_select(eig.eigenvalues, config.Q).chosen
        elif crit == "gvr":
            out[crit] = gvr_select(series, eig, config.Q).chosen
        elif crit == "m_e":
            out[crit] = m_n_E(eig.eigenvalues, n, config.log_base)
        else:
            out[crit] = m_hat(series, eig, config.Q, log_base=config.log_base).chosen
    return out


def _mean_sd_replicate(config: ExperimentConfig, n_index: int, r: int) -> dict:
    n = config.ns[n_index]
    series = fma1_fourier(config.fourier_spec(), n, make_rng(config.seed, stream_key(r, 0, n_index)))
    out = {}
    for s, (label, params) in enumerate(config.methods(), start=1):
        rng = make_rng(config.seed, stream_key(r, s, n_index))
        if params["method"] == "fsb":
            source = fit(series, params["m"], params["p"], config.Q)
        else:
            source = BlockConfig(params["method"], params["b"], params.get("c", config.tbb_c))
        out[label] = mean_sd_bootstrap(series, source, config.B, rng)
    return out


def _two_sample_replicate(config: ExperimentConfig, n_index: int, r: int) -> dict:
    n1 = config.ns[n_index]
    n2 = config.second_size(n1)
    spec = Fma1KernelSpec(config.grid_size)
    out = {}
    for gamma in config.gammas:
        # same innovations for every gamma, so power curves are compared on common draws
        data_rng = make_rng(config.seed, stream_key(r, 0, n_index))
        x = fma1_kernel(spec, n1, 0.0, "first", data_rng)
        y = fma1_kernel(spec, n2, gamma, "second", data_rng)
        res = two_sample_test(
            x, y, config.m, config.p, config.m, config.p, config.B,
            make_rng(config.seed, stream_key(r, 1, n_index)), Q=config.Q,
        )
        out[gamma] = res.p_value
    return out


WORKERS = {
    "selection": _selection_replicate,
    "mean-sd": _mean_sd_replicate,
    "two-sample": _two_sample_replicate,
}


def _guarded(args) -> tuple[int, int, dict | None, str | None]:
    config, n_index, r = args
    try:
        return n_index, r, WORKERS[config.kind](config, n_index, r), None
    except Exception as exc:  # counted against the failure budget
        return n_index, r, None, f"{type(exc).__name__}: {exc}"


def run_replicates(config: ExperimentConfig, n_index: int, threads: int | None = None):
    """Results of every replicate for one sample size, ordered by replicate index."""
    threads = config.threads if threads is None else threads
    jobs = [(config, n_index, r) for r in range(config.R)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_guarded, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        results = [_guarded(job) for job in jobs]
    results.sort(key=lambda item: item[1])
    ok = [(r, res) for _, r, res, err in results if err is None]
    failed = [(r, err) for _, r, _, err in results if err is not None]
    for r, err in failed:
        log.warning("n=%d replicate %d failed: %s", config.ns[n_index], r, err)
    if len(failed) > FAILURE_BUDGET * config.R:
        raise ExperimentError(
            f"{len(failed)} of {config.R} replicates failed at n={config.ns[n_index]} "
            f"(budget {FAILURE_BUDGET:.0%}); first error: {failed[0][1]}"
        )
    return ok, failed


# -- aggregation -------------------------------------------------------------


def selection_table(config: ExperimentConfig, n: int, results: list[dict]) -> list[list]:
    rows = []
    total = len(results)
    for crit in config.criteria:
        chosen = [res[crit] for res in results]
        for m in sorted(set(chosen)):
            count = chosen.count(m)
            rows.append([n, crit, m, count, f"{count / total:.10g}"])
    return rows


def rejection_table(config: ExperimentConfig, n: int, results: list[dict]) -> list[list]:
    rows = []
    for gamma in config.gammas:
        pv = np.array([res[gamma] for res in results])
        for alpha in config.alphas:
            rows.append([n, config.second_size(n), f"{gamma:g}", f"{alpha:g}", f"{np.mean(pv <= alpha):.10g}"])
    return rows


def mean_sd_rows(config: ExperimentConfig, results: list[dict], exact: np.ndarray) -> list[MetricRow]:
    rows = []
    for label, params in config.methods():
        est = np.array([res[label] for res in results])
        rows.append(metrics(est, exact, method=label, params=params))
    return rows


# -- persistence -------------------------------------------------------------


def write_result_csv(path: Path, digest: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest {digest}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_fpca_csv(series, out: str | Path, m: int | None = None) -> list[Path]:
    """Eigenvalues, eigenfunctions and the first ``m`` score columns as CSV files."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    _, eig = fpca(series)
    m = eig.size if m is None else m
    xi = scores(series, eig, m)
    paths = [out / "eigenvalues.csv", out / "eigenfunctions.csv", out / "scores.csv"]
    with open(paths[0], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "eigenvalue"])
        w.writerows([[j + 1, f"{v:.17g}"] for j, v in enumerate(eig.eigenvalues)])
    with open(paths[1], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", *(f"{t:.17g}" for t in series.grid.points)])
        w.writerows([[j + 1, *(f"{v:.17g}" for v in row)] for j, row in enumerate(eig.eigenfunctions)])
    with open(paths[2], "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *(f"xi{j + 1}" for j in range(m))])
        w.writerows([[t + 1, *(f"{v:.17g}" for v in row)] for t, row in enumerate(xi)])
    return paths


def read_result_csv(path: str | Path) -> tuple[str | None, list[dict]]:
    """Manifest hash and rows (as dicts) of a result CSV."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    digest = None
    if lines and lines[0].startswith("# manifest "):
        digest = lines[0].split()[-1]
        lines = lines[1:]
    return digest, list(csv.DictReader(lines))


def _is_complete(out: Path, digest: str) -> bool:
    path = out / MANIFEST
    if not path.exists():
        return False
    manifest = json.loads(path.read_text())
    if manifest.get("hash") != digest:
        raise ExperimentError(
            f"{out} holds results of a different experiment (hash {manifest.get('hash')}); "
            "use another output directory"
        )
    return manifest.get("status") == "complete" and all((out / f).exists() for f in manifest.get("files", []))


@dataclass
class ExperimentResult:
    output: Path
    digest: str
    files: list[str]
    failures: int
    skipped: bool = False
    tables: dict = field(default_factory=dict)


def run_experiment(config: ExperimentConfig, output: str | Path | None = None) -> ExperimentResult:
    """Run the configured study, write CSVs plus ``manifest.json`` and return a summary.

    A finished experiment in the same directory (same manifest hash) is not
    rerun.
    """
    out = Path(output or config.output)
    out.mkdir(parents=True, exist_ok=True)
    digest = config.digest()
    if _is_complete(out, digest):
        manifest = json.loads((out / MANIFEST).read_text())
        log.info("%s already complete (hash %s); nothing to do", out, digest)
        return ExperimentResult(out, digest, manifest["files"], manifest["failures"], skipped=True)

    start = time.perf_counter()
    failures = 0
    files: list[str] = []
    tables: dict = {}
    if config.kind == "selection":
        rows = []
        for i, n in enumerate(config.ns):
            ok, failed = run_replicates(config, i)
            failures += len(failed)
            rows += selection_table(config, n, [res for _, res in ok])
        write_result_csv(out / "selection.csv", digest, ["n", "criterion", "m", "count", "frequency"], rows)
        files.append("selection.csv")
        tables["selection"] = rows
    elif config.kind == "two-sample":
        rows = []
        for i, n in enumerate(config.ns):
            ok, failed = run_replicates(config, i)
            failures += len(failed)
            rows += rejection_table(config, n, [res for _, res in ok])
        write_result_csv(out / "rejection.csv", digest, ["n1", "n2", "gamma", "alpha", "rejection"], rows)
        files.append("rejection.csv")
        tables["rejection"] = rows
    else:
        header = ["method", "params"] + list(config.metrics)
        for i, n in enumerate(config.ns):
            exact = exact_sd_oracle(
                config.fourier_spec(), n, config.R_exact,
                make_rng(config.seed, stream_key(0, 0, i, ORACLE_DOMAIN)),
            )
            ok, failed = run_replicates(config, i)
            failures += len(failed)
            rows = mean_sd_rows(config, [res for _, res in ok], exact)
            name = f"mean_sd_n{n}.csv"
            write_result_csv(out / name, digest, header, [r.as_row(config.metrics) for r in rows])
            best = [r for group in best_two(rows).values() for r in group]
            fsb = [r for r in rows if r.params["method"] == "fsb"]
            best_name = f"mean_sd_best_n{n}.csv"
            write_result_csv(out / best_name, digest, header, [r.as_row(config.metrics) for r in fsb + best])
            # per-tau curves: the exact sd and every method's mean bootstrap estimate
            curve_name = f"sd_curves_n{n}.csv"
            grid = config.fourier_spec().grid.points
            curve_rows = [[f"{t:.10g}", f"{exact[k]:.10g}"] + [f"{r.mean_curve[k]:.10g}" for r in rows]
                          for k, t in enumerate(grid)]
            write_result_csv(out / curve_name, digest, ["tau", "exact"] + [r.method for r in rows], curve_rows)
            files += [name, best_name, curve_name]
            tables[n] = {"rows": rows, "exact": exact}

    manifest = {
        "hash": digest,
        "status": "complete",
        "version": __version__,
        "config": config.to_dict(),
        "seed": config.seed,
        "rng": RNG_ALGORITHM,
        "numpy": np.__version__,
        "threads": config.threads,
        "files": files,
        "failures": failures,
        "wall_clock_seconds": round(time.perf_counter() - start, 3),
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return ExperimentResult(out, digest, files, failures, tables=tables)
