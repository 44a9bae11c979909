"""Monte Carlo experiment harness: many instances, several runs each.

Seeds are derived with :class:`numpy.random.SeedSequence` spawn keys so that
every instance and every run owns an independent stream that depends only on
the master seed and its indices:

* instance ``i`` draws its data from ``SeedSequence(seed, spawn_key=(i, 0))``;
* run ``j`` of instance ``i`` draws its coefficients (and the random rotation,
  if enabled) from ``SeedSequence(seed, spawn_key=(i, 1, j))``.

Results are therefore identical whatever the number of worker threads.
Runs of one instance share its (possibly noisy) tensor and differ only in
their random choices.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .decompose import OstdOptions, WhitenOptions, ostd, whitened_ostd
from .errors import WhiteningFailure
from .linalg import DEFAULT_TOL
from .metrics import ScoreOptions, normalize_columns, relative_error, solution_score
from .synth import InstanceSpec, gen_instance

CSV_COLUMNS = (
    "instance_id",
    "run_id",
    "predicted_rank",
    "rel_error",
    "score",
    "psd_attempts",
    "failed",
    "wall_time_ms",
)
SCORE_THRESHOLD = 0.99


@dataclass(frozen=True)
class RunRecord:
    instance_id: int
    run_id: int
    predicted_rank: int | None
    relative_error: float | None
    solution_score: float | None
    psd_attempts: int | None
    failed: bool
    wall_time_ms: float | None = None

    def csv_row(self):
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return format(v, ".17g")
            return str(v)

        return [
            str(self.instance_id),
            str(self.run_id),
            fmt(self.predicted_rank),
            fmt(self.relative_error),
            fmt(self.solution_score),
            fmt(self.psd_attempts),
            "1" if self.failed else "0",
            fmt(self.wall_time_ms),
        ]


@dataclass(frozen=True)
class Criterion:
    runs_meeting: int
    instances_with_any: int
    mean_value: float | None


@dataclass(frozen=True)
class ExperimentSummary:
    rank: Criterion
    rel_error: Criterion
    score: Criterion
    psd: Criterion | None
    error_threshold: float
    runs: int
    instances: int


@dataclass(frozen=True)
class ExperimentConfig:
    family: str = "orthogonal"
    m: int | None = 3
    n: int | None = 4
    p: int | None = 2
    eta: float = 0.0
    instances: int = 100
    runs: int = 10
    seed: int = 0
    method: str = "ortho"
    randomize: bool = False
    max_attempts: int = 100
    tol: float = DEFAULT_TOL
    jobs: int = 1
    timing: bool = False

    def error_threshold(self):
        # 1e-10 for exact data, otherwise ten times the noise level (0.1 at eta = 0.01)
        return 1e-10 if self.eta == 0 else 10 * self.eta


def instance_seed(seed, i):
    return np.random.SeedSequence(seed, spawn_key=(i, 0))


def run_seed(seed, i, j):
    return np.random.SeedSequence(seed, spawn_key=(i, 1, j))


def instance_spec(cfg, i):
    return InstanceSpec(
        m=cfg.m, n=cfg.n, p=cfg.p, eta=cfg.eta, family=cfg.family, seed=instance_seed(cfg.seed, i)
    )


def run_once(gt, m, cfg, rng):
    """Decompose ``gt.observed`` once; returns ``(decomposition, psd_attempts)``.

    Raises :class:`WhiteningFailure` like :func:`whitened_ostd`.
    """
    base = OstdOptions(randomize=cfg.randomize, nonzero_tol=cfg.tol, rng=rng)
    if cfg.method == "ortho":
        return ostd(gt.observed, base), None
    if cfg.method == "whiten":
        opts = WhitenOptions(base=base, max_psd_attempts=cfg.max_attempts, psd_tol=cfg.tol)
        report = whitened_ostd(gt.observed, opts)
        return report.decomposition, report.psd_attempts
    raise ValueError(f"unknown method {cfg.method!r}")


def _instance_records(cfg, i):
    spec = instance_spec(cfg, i)
    gt = gen_instance(spec)
    score_opts = ScoreOptions(m=spec.m)
    records = []
    for j in range(cfg.runs):
        rng = np.random.default_rng(run_seed(cfg.seed, i, j))
        start = time.perf_counter()
        try:
            d, attempts = run_once(gt, spec.m, cfg, rng)
        except WhiteningFailure as exc:
            elapsed = (time.perf_counter() - start) * 1e3
            records.append(
                RunRecord(i, j, None, None, None, exc.attempts, True, elapsed if cfg.timing else None)
            )
            continue
        err = relative_error(gt.observed, d)
        score = solution_score(normalize_columns(d, spec.m), gt.truth, score_opts) if d.rank else 0.0
        elapsed = (time.perf_counter() - start) * 1e3
        records.append(
            RunRecord(i, j, d.rank, err, score, attempts, False, elapsed if cfg.timing else None)
        )
    return records


def run_experiment(cfg):
    """Run every instance and return the records sorted by ``(instance_id, run_id)``."""
    if cfg.jobs <= 1:
        chunks = [_instance_records(cfg, i) for i in range(cfg.instances)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(lambda i: _instance_records(cfg, i), range(cfg.instances)))
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.instance_id, r.run_id))
    return records


def _criterion(records, meets, value):
    ok = [r for r in records if not r.failed]
    hits = [r for r in ok if meets(r)]
    mean = float(np.mean([value(r) for r in ok])) if ok else None
    return Criterion(len(hits), len({r.instance_id for r in hits}), mean)


def summarize(records, p, error_threshold, whiten):
    """Per criterion: runs meeting it, instances with at least one such run, mean metric.

    Means are over runs that did not fail. For the p.s.d. criterion the mean
    is the number of attempts among successful runs.
    """
    rank = _criterion(records, lambda r: r.predicted_rank == p, lambda r: r.predicted_rank)
    err = _criterion(records, lambda r: r.relative_error <= error_threshold, lambda r: r.relative_error)
    score = _criterion(records, lambda r: r.solution_score >= SCORE_THRESHOLD, lambda r: r.solution_score)
    psd = None
    if whiten:
        psd = _criterion(records, lambda r: True, lambda r: r.psd_attempts)
    return ExperimentSummary(
        rank=rank,
        rel_error=err,
        score=score,
        psd=psd,
        error_threshold=error_threshold,
        runs=len(records),
        instances=len({r.instance_id for r in records}),
    )


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def records_from_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))

    def opt(v, cast):
        return cast(v) if v != "" else None

    return [
        RunRecord(
            instance_id=int(row["instance_id"]),
            run_id=int(row["run_id"]),
            predicted_rank=opt(row["predicted_rank"], int),
            relative_error=opt(row["rel_error"], float),
            solution_score=opt(row["score"], float),
            psd_attempts=opt(row["psd_attempts"], int),
            failed=row["failed"] == "1",
            wall_time_ms=opt(row["wall_time_ms"], float),
        )
        for row in rows
    ]


def format_summary(summary, m, n, p):
    def cell(c, digits):
        mean = "---" if c.mean_value is None else f"{c.mean_value:.{digits}f}"
        return f"{c.runs_meeting:>5} {c.instances_with_any:>4} {mean:>8}"

    cols = []
    if summary.psd is not None:
        cols.append(("p.s.d. C?", cell(summary.psd, 1)))
    cols.append(("rank = p", cell(summary.rank, 3)))
    cols.append((f"rel.err <= {summary.error_threshold:g}", cell(summary.rel_error, 4)))
    cols.append((f"score >= {SCORE_THRESHOLD}", cell(summary.score, 4)))
    head = "  m   n   p | " + " | ".join(f"{name:^19}" for name, _ in cols)
    row = f"{m:>3} {n:>3} {p:>3} | " + " | ".join(text for _, text in cols)
    return f"{head}\n{row}\n({summary.runs} runs over {summary.instances} instances)"
