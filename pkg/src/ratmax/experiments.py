"""Seeded batch drivers behind the ``ratmax`` command line.

Every driver takes an :class:`ExperimentConfig` and returns a
:class:`RunReport`. Rows depend only on the config (randomness is drawn
from ``(seed, trial)`` streams), so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ratmax import __version__
from ratmax._parallel import parallel_map
from ratmax.dyadic import exhaustive_rm_2d, rm_check_1d, rm_check_2d
from ratmax.kernels import decay_check, fejer_identity_check, random_parity_spectrum
from ratmax.oscillation import LacunarySeq, counterexample, lemma3_check, osc_2d
from ratmax.spectral import FrequencySet, build_masks, gen_rationals, grid_for, norm_estimate
from ratmax.torus import TorusGrid2


class ConfigError(ValueError):
    """Invalid or infeasible experiment configuration (exit code 2)."""


COMMANDS = ("rm-check", "growth-study", "fejer-check", "osc-check", "gen-set", "decay-check")

GROWTH_COLUMNS = ["s", "Q1", "Q2", "lambda_count", "loglog1", "loglog2", "ratio_max", "ratio_osc"]


@dataclass
class ExperimentConfig:
    command: str
    seed: int | None = None
    trials: int | None = None
    s_min: int | None = None
    s_max: int | None = None
    grid: tuple[int, int] | None = None
    q: int | None = None
    tau: float | None = None
    windows: int | None = None
    out: str | None = None
    format: str = "csv"
    dim: int | None = None
    input: str | None = None
    exhaustive: str | None = None
    delta: float | None = None
    n_max: int | None = None
    xi_points: int | None = None
    truncation: int | None = None
    scaled: bool = False
    max_bins: int | None = None
    ascent_steps: int | None = None

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        for name in ("trials", "s_min", "s_max", "windows", "n_max", "xi_points", "truncation",
                     "ascent_steps", "max_bins", "q", "dim"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"{name} must be non-negative")
        for name in ("xi_points", "truncation", "max_bins", "q"):
            v = getattr(self, name)
            if v is not None and v == 0:
                raise ConfigError(f"{name} must be positive")
        if self.tau is not None and self.tau <= 1:
            raise ConfigError("tau must exceed 1")
        if self.delta is not None and not 0 < self.delta <= 1:
            raise ConfigError("delta must lie in (0, 1]")
        if self.grid is not None and (min(self.grid) < 2 or any(x % 2 for x in self.grid)):
            raise ConfigError("grid sizes must be positive even integers")
        if self.dim not in (None, 1, 2):
            raise ConfigError("dim must be 1 or 2")
        if self.exhaustive not in (None, "none", "01", "pm1"):
            raise ConfigError("exhaustive must be none, 01 or pm1")
        if self.s_min is not None and self.s_max is not None and self.s_min > self.s_max:
            raise ConfigError("s_min exceeds s_max")
        if self.command in ("rm-check", "growth-study", "fejer-check") and self.seed is None:
            raise ConfigError(f"{self.command} is randomized and needs a seed")
        return self

    def with_defaults(self, **defaults) -> "ExperimentConfig":
        updates = {k: v for k, v in defaults.items() if getattr(self, k) is None}
        return dataclasses.replace(self, **updates)

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")
        if d["grid"] is not None:
            d["grid"] = f"{d['grid'][0]}x{d['grid'][1]}"
        return d


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ConfigError(f"grid must look like L1xL2, got {text!r}") from None


def coerce(key: str, value: str):
    """Convert a config-file string to the field's type."""
    key = key.replace("-", "_")
    if key not in _FIELD_TYPES or key == "command":
        raise ConfigError(f"unknown config key {key!r}")
    kind = _FIELD_TYPES[key]
    try:
        if key == "grid":
            return parse_grid(value)
        if key == "scaled":
            return value.strip().lower() in ("1", "true", "yes", "on")
        if "int" in kind:
            return int(value)
        if "float" in kind:
            return float(value)
        return value
    except ValueError:
        raise ConfigError(f"bad value {value!r} for {key}") from None


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        k, v = (t.strip() for t in line.split("=", 1))
        key = k.replace("-", "_")
        out[key] = coerce(key, v)
    return out


@dataclass
class RunReport:
    command: str
    config: dict
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    violations: int = 0
    wall_clock: float = 0.0
    version: str = __version__
    input_hash: str = ""

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: _fmt(row[k]) for k in self.columns})
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "rows": [{k: _jsonable(row[k]) for k in self.columns} for row in self.rows],
            "summary": {k: _jsonable(v) for k, v in self.summary.items()},
            "meta": {"version": self.version, "input_hash": self.input_hash},
        }
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


def content_hash(config: ExperimentConfig) -> str:
    """Git blob hash of the canonical config echo plus any input file."""
    data = json.dumps(config.echo(), sort_keys=True).encode()
    if config.input:
        data += Path(config.input).read_bytes()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


# -- drivers -------------------------------------------------------------


def _rm_trial(args):
    seed, trial, s_max = args
    rng = np.random.default_rng([seed, trial])
    s = int(rng.integers(0, s_max + 1))
    b = rng.standard_normal((1 << s) + 1) + 1j * rng.standard_normal((1 << s) + 1)
    r1 = rm_check_1d(b, int(rng.integers(1 << s)))
    s1, s2 = (int(x) for x in rng.integers(0, s_max + 1, size=2))
    shape = ((1 << s1) + 1, (1 << s2) + 1)
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    r2 = rm_check_2d(a, int(rng.integers(1 << s1)), int(rng.integers(1 << s2)))
    return (s, r1.holds, r1.ratio), (s1, s2, r2.holds, r2.ratio)


def cmd_rm_check(config: ExperimentConfig) -> RunReport:
    cfg = config.with_defaults(trials=10_000, s_max=5)
    columns = ["kind", "s1", "s2", "cases", "violations", "max_ratio"]
    stats: dict[tuple, list] = {}

    def record(key, holds, ratio):
        st = stats.setdefault(key, [0, 0, 0.0])
        st[0] += 1
        st[1] += 0 if holds else 1
        st[2] = max(st[2], ratio)

    results = parallel_map(_rm_trial, [(cfg.seed, t, cfg.s_max) for t in range(cfg.trials)])
    for (s, h1, q1), (s1, s2, h2, q2) in results:
        record(("1d", s, -1), h1, q1)
        record(("2d", s1, s2), h2, q2)
    if cfg.exhaustive in ("01", "pm1"):
        alphabet = (0, 1) if cfg.exhaustive == "01" else (-1, 1)
        ex = exhaustive_rm_2d(alphabet, 2, 2)
        stats[(f"exhaustive-{cfg.exhaustive}", 2, 2)] = [ex.cases, ex.violations, ex.max_ratio]
    rows = [{"kind": k, "s1": a, "s2": b, "cases": v[0], "violations": v[1], "max_ratio": v[2]}
            for (k, a, b), v in sorted(stats.items())]
    total = sum(r["violations"] for r in rows)
    summary = {"cases": sum(r["cases"] for r in rows), "violations": total,
               "max_ratio": max((r["max_ratio"] for r in rows), default=0.0)}
    return RunReport("rm-check", cfg.echo(), columns, rows, summary, total)


def growth_row(s: int, dim: int, *, seed: int, trials: int, ascent_steps: int, N: LacunarySeq,
               q: int | None = None, grid: tuple[int, int] | None = None,
               max_bins: int = 1 << 20) -> dict:
    freqs = FrequencySet.scaled_rationals(s, dim).centered()
    refine = 1
    if q is not None:
        if q % freqs.Q1:
            raise ConfigError(f"Q override {q} is not a multiple of {freqs.Q1}")
        refine = q // freqs.Q1
    if dim == 2 or refine == 1:
        g = grid_for(freqs, refine)
    else:
        # only the first axis carries frequencies in the one-parameter embedding
        base = grid_for(freqs, 1)
        g = TorusGrid2(freqs.Q1 * refine, 1, base.L1 * refine, base.L2)
    if grid is not None:
        if grid[0] < g.L1 or grid[1] < g.L2:
            raise ConfigError(f"grid {grid[0]}x{grid[1]} too small for s={s}; need {g.L1}x{g.L2}")
        g = TorusGrid2(g.Q1, g.Q2, grid[0], grid[1])
    if g.L1 * g.L2 > max_bins:
        raise ConfigError(f"s={s} needs a {g.L1}x{g.L2} grid, over the budget of {max_bins} bins")
    masks = build_masks(g, freqs)
    rmax = norm_estimate(masks, "max", trials=trials, seed=seed, ascent_steps=ascent_steps)
    rosc = norm_estimate(masks, "osc", N=N, trials=trials, seed=seed, ascent_steps=ascent_steps)
    ll1, ll2 = freqs.loglogs()
    return {"s": s, "Q1": freqs.Q1, "Q2": freqs.Q2, "lambda_count": len(freqs),
            "loglog1": ll1, "loglog2": ll2,
            "ratio_max": rmax.best_ratio, "ratio_osc": rosc.best_ratio}


def cmd_growth_study(config: ExperimentConfig) -> RunReport:
    cfg = config.with_defaults(s_min=0, s_max=2, dim=1, trials=8, ascent_steps=8,
                               tau=2.0, windows=3, max_bins=1 << 20)
    N = LacunarySeq.geometric(cfg.windows, cfg.tau)
    rows = []
    for s in range(cfg.s_min, cfg.s_max + 1):
        rows.append(growth_row(s, cfg.dim, seed=cfg.seed, trials=max(cfg.trials, 1),
                               ascent_steps=cfg.ascent_steps, N=N, q=cfg.q, grid=cfg.grid,
                               max_bins=cfg.max_bins))
    summary = {"lacunary": list(N.terms),
               "max_ratio_max": max((r["ratio_max"] for r in rows), default=0.0),
               "max_ratio_osc": max((r["ratio_osc"] for r in rows), default=0.0)}
    return RunReport("growth-study", cfg.echo(), GROWTH_COLUMNS, rows, summary)


FEJER_TOL = 1e-8


def cmd_fejer_check(config: ExperimentConfig) -> RunReport:
    cfg = config.with_defaults(trials=4, grid=(256, 256))
    L1, L2 = cfg.grid
    g = TorusGrid2(L1, L2, L1, L2)
    columns = ["trial", "n1", "n2", "D1", "D2", "max_rel_err"]
    rows = []
    top1, top2 = L1.bit_length() - 1, L2.bit_length() - 1
    for t in range(cfg.trials):
        rng = np.random.default_rng([cfg.seed, t])
        f = random_parity_spectrum(g, (0, 1), rng)
        for n1 in range(0, top1 + 1, max(1, top1 // 4)):
            for n2 in range(0, top2 + 1, max(1, top2 // 4)):
                rep = fejer_identity_check(f, n1, n2, (0, 1))
                rows.append({"trial": t, "n1": n1, "n2": n2, "D1": str(rep.D[0]),
                             "D2": str(rep.D[1]), "max_rel_err": rep.max_rel_err})
    worst = max((r["max_rel_err"] for r in rows), default=0.0)
    bad = sum(r["max_rel_err"] > FEJER_TOL for r in rows)
    return RunReport("fejer-check", cfg.echo(), columns, rows,
                     {"max_rel_err": worst, "tolerance": FEJER_TOL}, bad)


def load_array(path) -> np.ndarray:
    p = Path(path)
    if p.suffix == ".npy":
        return np.load(p)
    return np.loadtxt(p, delimiter=",", dtype=complex if "j" in p.read_text() else float, ndmin=2)


def cmd_osc_check(config: ExperimentConfig) -> RunReport:
    cfg = config.with_defaults(truncation=64, tau=2.0, windows=3)
    a = load_array(cfg.input) if cfg.input else counterexample(cfg.truncation)
    bound = min(a.shape) - 1
    columns = ["start", "terms", "osc", "sup", "lemma3_lhs", "lemma3_rhs", "lemma3_holds"]
    rows = []
    sup = float(np.max(np.abs(a)))
    w = (max(1, bound // 4), max(1, bound // 4))
    start = 1
    while True:
        N = LacunarySeq.geometric(cfg.windows, cfg.tau, start).truncated(bound)
        if N is None or len(N) < 2:
            break
        rep = lemma3_check(a, N, w)
        rows.append({"start": start, "terms": " ".join(map(str, N.terms)), "osc": osc_2d(a, N),
                     "sup": sup, "lemma3_lhs": rep.lhs, "lemma3_rhs": rep.rhs,
                     "lemma3_holds": rep.holds})
        start *= 2
    bad = sum(not r["lemma3_holds"] for r in rows)
    summary = {"shape": f"{a.shape[0]}x{a.shape[1]}", "sup": sup,
               "max_osc": max((r["osc"] for r in rows), default=0.0)}
    return RunReport("osc-check", cfg.echo(), columns, rows, summary, bad)


def cmd_gen_set(config: ExperimentConfig) -> RunReport:
    cfg = config.with_defaults(s_min=1, s_max=1)
    columns = ["s", "numerator", "denominator", "value"]
    rows, counts = [], {}
    for s in range(cfg.s_min, cfg.s_max + 1):
        fr = gen_rationals(s)
        if cfg.scaled:
            fr = [4 ** (s + 1) * f for f in fr]
        counts[str(s)] = len(fr)
        rows += [{"s": s, "numerator": f.numerator, "denominator": f.denominator,
                  "value": str(f)} for f in fr]
    return RunReport("gen-set", cfg.echo(), columns, rows, {"counts": counts})


def cmd_decay_check(config: ExperimentConfig) -> RunReport:
    cfg = config.with_defaults(n_max=10, delta=1.0, xi_points=1_000_000)
    n_values = range(0, cfg.n_max + 1)
    columns = ["xi_points", "sup_ratio", "argmax_n", "argmax_xi"]
    rows = []
    for pts in (cfg.xi_points, 2 * cfg.xi_points):
        rep = decay_check(n_values, cfg.delta, decay_xi_grid(pts))
        rows.append({"xi_points": pts, "sup_ratio": rep.sup_ratio,
                     "argmax_n": rep.argmax[0], "argmax_xi": rep.argmax[1]})
    change = abs(rows[1]["sup_ratio"] - rows[0]["sup_ratio"]) / rows[0]["sup_ratio"]
    return RunReport("decay-check", cfg.echo(), columns, rows,
                     {"relative_change": change, "stable": change < 0.01})


def decay_xi_grid(points: int, xi_max: float = 4.0) -> np.ndarray:
    """Symmetric uniform sweep of ``[-xi_max, xi_max]`` with ``points`` samples."""
    return np.linspace(-xi_max, xi_max, points)


DRIVERS = {
    "rm-check": cmd_rm_check,
    "growth-study": cmd_growth_study,
    "fejer-check": cmd_fejer_check,
    "osc-check": cmd_osc_check,
    "gen-set": cmd_gen_set,
    "decay-check": cmd_decay_check,
}


def run(config: ExperimentConfig) -> RunReport:
    config.validate()
    t0 = time.perf_counter()
    report = DRIVERS[config.command](config)
    report.wall_clock = time.perf_counter() - t0
    report.input_hash = content_hash(config)
    return report
