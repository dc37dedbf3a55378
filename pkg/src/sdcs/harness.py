"""Config-driven experiment runner: sweeps, CSV persistence, slope fits.

Each Monte Carlo trial becomes one ``TrialRecord`` row in a fixed-schema CSV.
Per-trial seeds are derived from the base seed and the trial index only, so a
sweep is reproducible regardless of execution order, and rerunning over an
existing output file skips completed (cell, trial) pairs.
"""

import csv
import math
import os
import time
from dataclasses import dataclass, asdict, replace

import numpy as np

from . import decode, ensembles, linalg
from .quantize import NoiseShaper, Alphabet, pcm_quantize, shape_quantize, difference_matrix

__all__ = [
    "CSV_COLUMNS",
    "TrialRecord",
    "ExperimentConfig",
    "QuantizerSpec",
    "run_experiment",
    "summarize",
    "fit_loglog_slope",
    "write_csv",
    "read_csv",
    "load_config",
]

CSV_COLUMNS = [
    "experiment_id", "k", "m", "lambda", "N", "r", "shaper", "mu", "delta",
    "kprime", "signal_model", "trial", "seed", "coarse_err", "fine_err",
    "support_exact", "sigma_min", "u_inf", "u_l2", "overloaded", "wall_ms",
]

# stream offsets carving independent sub-generators out of one base seed
_PHI_STREAM = 0
_SIGNAL_STREAM_BASE = 1 << 40


@dataclass(frozen=True)
class QuantizerSpec:
    """One quantizer arm of a sweep: shaper kind, order, leak parameter."""

    shaper: str  # identity | difference | highpass | leaky
    r: int
    mu: float = 0.0

    def make(self, m):
        if self.shaper == "identity":
            return NoiseShaper.identity(m)
        if self.shaper == "difference":
            return NoiseShaper.difference_power(m, self.r)
        if self.shaper == "highpass":
            return NoiseShaper.high_pass_power(m, self.r)
        if self.shaper == "leaky":
            return NoiseShaper.leaky(m, self.r, self.mu)
        raise ValueError(f"unknown shaper {self.shaper!r}")

    @property
    def label(self):
        return self.shaper


@dataclass(frozen=True)
class TrialRecord:
    """One Monte Carlo trial, the unit of CSV persistence."""

    experiment_id: str
    k: int
    m: int
    lam: float
    n: int
    r: int
    shaper: str
    mu: float
    delta: float
    kprime: int
    signal_model: str
    trial: int
    seed: int
    coarse_err: float
    fine_err: float
    support_exact: bool
    sigma_min: float
    u_inf: float
    u_l2: float
    overloaded: bool
    wall_ms: float

    def key(self):
        return (self.experiment_id, self.k, self.m, self.r, self.shaper,
                self.mu, self.delta, self.kprime, self.signal_model, self.trial)

    def row(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["N"] = d.pop("n")
        return [_fmt(d[c]) for c in CSV_COLUMNS]


def _fmt(v):
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, float):
        return repr(v)  # shortest round-trip decimal
    return str(v)


def _parse(col, s):
    if col in ("k", "m", "N", "r", "kprime", "trial", "seed"):
        return int(s)
    if col in ("support_exact", "overloaded"):
        return s == "True"
    if col in ("experiment_id", "shaper", "signal_model"):
        return s
    return float(s)


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid of sweep cells plus trial count, base seed and output path."""

    kind: str  # endtoend | sigmamin
    experiment_id: str = "exp"
    n: int = 1024
    k: int = 10
    m_list: tuple = (100, 200, 300, 400, 500, 600)
    quantizers: tuple = (
        QuantizerSpec("identity", 0),
        QuantizerSpec("difference", 1),
        QuantizerSpec("difference", 2),
    )
    delta: float = 0.01
    alpha: float = 0.75
    kprime: int | None = None
    signal_model: str = "constant"
    trials: int = 50
    seed: int = 0
    out: str | None = None
    full: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        for m in self.m_list:
            if (m % self.k) and self.kind != "endtoend":
                raise ValueError(f"m={m} is not an integral multiple of k={self.k}")

    def at_full_scale(self):
        """Full-scale variant: 1000 x 2000 measurement matrix, 100 trials."""
        return replace(
            self, n=2000, m_list=tuple(range(100, 1001, 100)), trials=100,
            full=True,
        )


def _endtoend_trials(config, skip=frozenset(), on_error=None):
    n, k = config.n, config.k
    kprime = config.kprime if config.kprime is not None else k
    m_max = max(config.m_list)
    phi_full = ensembles.sample_matrix(
        ensembles.EnsembleSpec("gaussian_unit", m_max, n, config.seed),
        stream=_PHI_STREAM,
    )
    records = []
    for trial in range(config.trials):
        sig_stream = _SIGNAL_STREAM_BASE + trial
        x = ensembles.sample_signal(
            ensembles.SignalSpec(n, k, config.signal_model, config.seed),
            stream=sig_stream,
        )
        xd = x.dense()
        for m in config.m_list:
            y = phi_full[:m] @ xd
            for qs in config.quantizers:
                rec_key = (config.experiment_id, k, m, qs.r, qs.label,
                           qs.mu, config.delta, kprime, config.signal_model, trial)
                if rec_key in skip:
                    continue
                t0 = time.perf_counter()
                try:
                    shaper = qs.make(m)
                    alphabet = Alphabet(config.delta)
                    if shaper.order == 0:
                        qres = pcm_quantize(y, alphabet)
                    else:
                        qres = shape_quantize(y, shaper, alphabet)
                    # coarse errors in a sweep are >= O(delta); 1e-5 relative
                    # solver accuracy is far below measurement resolution
                    result = decode.two_stage_recover(
                        phi_full[:m], qres.q, k, qs.r, config.delta,
                        shaper=shaper, x_true=x, kprime=kprime, reltol=1e-5,
                    )
                    rec = TrialRecord(
                        experiment_id=config.experiment_id, k=k, m=m,
                        lam=m / k, n=n, r=qs.r, shaper=qs.label, mu=qs.mu,
                        delta=config.delta, kprime=kprime,
                        signal_model=config.signal_model, trial=trial,
                        seed=sig_stream,
                        coarse_err=result.coarse_err,
                        fine_err=result.fine_err,
                        support_exact=result.support_exact,
                        sigma_min=result.sigma_min,
                        u_inf=qres.max_state,
                        u_l2=float(np.linalg.norm(qres.u)),
                        overloaded=qres.overloaded,
                        wall_ms=(time.perf_counter() - t0) * 1e3,
                    )
                except Exception as exc:  # failed trial: record, keep sweeping
                    if on_error is not None:
                        on_error(rec_key, exc)
                    rec = TrialRecord(
                        experiment_id=config.experiment_id, k=k, m=m,
                        lam=m / k, n=n, r=qs.r, shaper=qs.label, mu=qs.mu,
                        delta=config.delta, kprime=kprime,
                        signal_model=config.signal_model, trial=trial,
                        seed=sig_stream, coarse_err=float("nan"),
                        fine_err=float("nan"), support_exact=False,
                        sigma_min=float("nan"), u_inf=float("nan"),
                        u_l2=float("nan"), overloaded=False,
                        wall_ms=(time.perf_counter() - t0) * 1e3,
                    )
                records.append(rec)
    return records


def _sigmamin_trials(config, skip=frozenset(), on_error=None):
    k = config.k
    records = []
    for m in config.m_list:
        lam = m / k
        d = difference_matrix(m)
        for qs in config.quantizers:
            for trial in range(config.trials):
                rec_key = (config.experiment_id, k, m, qs.r, qs.label,
                           qs.mu, config.delta, k, "none", trial)
                if rec_key in skip:
                    continue
                t0 = time.perf_counter()
                li = config.m_list.index(m)
                stream = li * 1_000_003 + trial
                e = ensembles.sample_matrix(
                    ensembles.EnsembleSpec("gaussian_scaled", m, k, config.seed),
                    stream=stream,
                )
                de = linalg.apply_inverse_power(d, qs.r, e)
                smin = float(linalg.singular_values(de)[-1])
                records.append(TrialRecord(
                    experiment_id=config.experiment_id, k=k, m=m, lam=lam,
                    n=k, r=qs.r, shaper=qs.label, mu=qs.mu, delta=config.delta,
                    kprime=k, signal_model="none", trial=trial, seed=stream,
                    coarse_err=float("nan"), fine_err=float("nan"),
                    support_exact=False, sigma_min=smin, u_inf=float("nan"),
                    u_l2=float("nan"), overloaded=False,
                    wall_ms=(time.perf_counter() - t0) * 1e3,
                ))
    return records


def run_experiment(config, resume=True, on_error=None):
    """Execute every (cell, trial) of ``config``; returns (records, failures).

    If ``config.out`` names an existing CSV and ``resume`` is true, completed
    (cell, trial) pairs are skipped and the merged file is rewritten sorted
    by key.  Failed trials are recorded as rows with NaN errors; ``on_error``
    (if given) receives the key and the exception.
    """
    skip = frozenset()
    existing = []
    if resume and config.out and os.path.exists(config.out):
        existing = read_csv(config.out)
        skip = frozenset(r.key() for r in existing)

    failures = []

    def _capture(key, exc):
        failures.append((key, exc))
        if on_error is not None:
            on_error(key, exc)

    if config.kind == "endtoend":
        new = _endtoend_trials(config, skip=skip, on_error=_capture)
    elif config.kind == "sigmamin":
        new = _sigmamin_trials(config, skip=skip, on_error=_capture)
    else:
        raise ValueError(f"unknown experiment kind {config.kind!r}")

    records = sorted(existing + new, key=TrialRecord.key)
    if config.out:
        write_csv(config.out, records)
    return records, failures


def write_csv(path, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for rec in sorted(records, key=TrialRecord.key):
            w.writerow(rec.row())


def read_csv(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header in {path}")
        for row in reader:
            d = {c: _parse(c, v) for c, v in zip(CSV_COLUMNS, row)}
            d["lam"] = d.pop("lambda")
            d["n"] = d.pop("N")
            records.append(TrialRecord(**d))
    return records


def summarize(records):
    """Per-cell mean/max/min of the error and state statistics.

    A cell is everything but the trial index; NaN rows (failed trials) are
    excluded from the statistics but counted.
    """
    cells = {}
    for rec in records:
        cells.setdefault(rec.key()[:-1], []).append(rec)
    out = []
    for key, group in sorted(cells.items()):
        def stats(vals):
            vals = np.asarray([v for v in vals if v == v])  # drop NaN
            if vals.size == 0:
                return float("nan"), float("nan"), float("nan")
            return float(vals.mean()), float(vals.max()), float(vals.min())

        coarse = stats([g.coarse_err for g in group])
        fine = stats([g.fine_err for g in group])
        smin = stats([g.sigma_min for g in group])
        out.append({
            "experiment_id": key[0], "k": key[1], "m": key[2], "r": key[3],
            "shaper": key[4], "mu": key[5], "delta": key[6], "kprime": key[7],
            "signal_model": key[8], "lambda": key[2] / key[1],
            "trials": len(group),
            "failed": sum(1 for g in group if g.coarse_err != g.coarse_err),
            "coarse_mean": coarse[0], "coarse_max": coarse[1], "coarse_min": coarse[2],
            "fine_mean": fine[0], "fine_max": fine[1], "fine_min": fine[2],
            "sigma_min_mean": smin[0], "sigma_min_max": smin[1],
            "sigma_min_min": smin[2],
            "support_rate": float(np.mean([g.support_exact for g in group])),
        })
    return out


def fit_loglog_slope(xs, ys):
    """Least squares fit of log(y) against log(x): (slope, intercept, residual)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("need at least 3 points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log fit needs positive values")
    lx, ly = np.log(xs), np.log(ys)
    a = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, *_ = np.linalg.lstsq(a, ly, rcond=None)
    residual = float(np.sqrt(res[0])) if res.size else 0.0
    return float(coef[0]), float(coef[1]), residual


def load_config(path):
    """Flat key-value config file (``key = value``, '#' comments)."""
    raw = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            raw[key] = val
    return raw
