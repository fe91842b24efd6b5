"""Random automaton generation and the benchmark harness.

The generator draws each transition triple (q, a, q') independently with
the edge-density probability and puts each mark on a transition with the
mark probability.  Transition systems are redrawn until nondeterministic.
Two acceptance families: `random-el` samples uniform formula trees of depth
at most 4 and keeps formulas whose DNF has at least two disjuncts and
length between 2 and 21; `dnf` draws 2-3 disjuncts with 2-3 Inf atoms and
0-1 Fin atoms each, over distinct marks.

The harness runs a method set over seeded instances under per-instance
time and state budgets, cross-validates the outputs' languages, and
reports lower medians where timeouts count as larger than every finite
value.  Ratio tables against a baseline use the conventions: baseline
failed -> 0, method failed -> infinity, both failed -> instance skipped.
Two pipelines: `gba` compares the TELA-to-GBA translations (validated by
sampled lasso words against the input), `det` compares full
determinizations (validated by containment both ways between outputs).

Reports have a line-oriented machine format with the schema header
`telabench 1`, plus a human-readable table.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction

from .acceptance import Acceptance, dnf_length, fin_, inf_, and_, or_, to_dnf
from .analysis import accepts, sample_lassos
from .core import MAX_AP, Tela, TelaError
from .determinize import (
    BudgetExceeded,
    contains,
    degeneralize,
    determinize_product,
    safra_determinize,
)
from .transforms import GBA_METHODS, to_gba

_AP_NAMES = ("a", "b", "c", "d", "e", "f", "g", "h")

DET_METHODS = (
    "via-gba:cnf",
    "via-gba:remfin_split",
    "via-gba:split_remfin",
    "via-gba:remfin_rewrite",
    "product",
    "product-nolangcover",
)


class BenchError(TelaError):
    pass


def random_tela(
    n_states: int,
    n_marks: int,
    edge_density: float,
    mark_prob: float,
    acc: str = "random-el",
    seed: int = 0,
    n_ap: int = 2,
) -> Tela:
    """Seeded random TELA; identical arguments give identical automata."""
    if not 4 <= n_states <= 50:
        raise TelaError("n_states must be in [4, 50]")
    if not 1 <= n_marks <= 16:
        raise TelaError("n_marks must be in [1, 16]")
    if not 0 < edge_density <= 1:
        raise TelaError("edge_density must be in (0, 1]")
    if not 0 <= mark_prob <= 1:
        raise TelaError("mark_prob must be in [0, 1]")
    if acc not in ("random-el", "dnf"):
        raise TelaError("acc must be 'random-el' or 'dnf'")
    if not 1 <= n_ap <= MAX_AP:
        raise TelaError(f"n_ap must be in [1, {MAX_AP}]")
    if acc == "dnf" and n_marks < 4:
        raise TelaError("the dnf family needs at least 4 marks")
    rng = random.Random(seed)
    n_letters = 1 << n_ap
    for _ in range(10000):
        transitions = []
        nondet = False
        for q in range(n_states):
            for letter in range(n_letters):
                degree = 0
                for q2 in range(n_states):
                    if rng.random() < edge_density:
                        marks = 0
                        for j in range(n_marks):
                            if rng.random() < mark_prob:
                                marks |= 1 << j
                        transitions.append((q, letter, q2, marks))
                        degree += 1
                if degree >= 2:
                    nondet = True
        if nondet:
            break
    else:
        raise TelaError("could not draw a nondeterministic transition system")
    return Tela(
        ap=_AP_NAMES[:n_ap],
        n_states=n_states,
        initial=frozenset({0}),
        transitions=tuple(transitions),
        acceptance=_random_acceptance(rng, n_marks, acc),
        n_marks=n_marks,
    )


def _random_acceptance(rng: random.Random, n_marks: int, acc: str) -> Acceptance:
    if acc == "dnf":
        disjuncts = []
        for _ in range(rng.randint(2, 3)):
            n_inf = rng.randint(2, 3)
            n_fin = rng.randint(0, 1)
            marks = rng.sample(range(n_marks), n_inf + n_fin)
            parts = []
            if n_fin:
                parts.append(fin_(1 << marks[n_inf]))
            parts.extend(inf_(1 << j) for j in marks[:n_inf])
            disjuncts.append(and_(parts))
        return or_(disjuncts)

    def tree(depth: int) -> Acceptance:
        kinds = ("and", "or", "inf", "fin") if depth < 4 else ("inf", "fin")
        kind = kinds[rng.randrange(len(kinds))]
        if kind == "inf":
            return inf_(1 << rng.randrange(n_marks))
        if kind == "fin":
            return fin_(1 << rng.randrange(n_marks))
        children = [tree(depth + 1) for _ in range(2)]
        return and_(children) if kind == "and" else or_(children)

    for _ in range(10000):
        phi = tree(0)
        dnf = to_dnf(phi)
        if len(dnf.disjuncts) >= 2 and 2 <= dnf_length(dnf) <= 21:
            return phi
    raise TelaError("could not sample an acceptance formula in the target range")


def nondeterminism_amount(a: Tela) -> Fraction:
    """Number of same-source same-letter target pairs divided by the state
    count."""
    targets: dict[tuple[int, int], set[int]] = {}
    for q, letter, q2, _ in a.transitions:
        targets.setdefault((q, letter), set()).add(q2)
    pairs = sum(len(ts) * (len(ts) - 1) // 2 for ts in targets.values())
    return Fraction(pairs, a.n_states)


def cnf_blowup_automaton(n: int) -> Tela:
    """One-state family whose CNF translation needs 2^n acceptance sets.

    The letter-a loop carries all 2n marks, the other loop none, and the
    condition is the disjunction over i of Inf(2i) and Inf(2i+1); every
    disjunct alone already accepts exactly the words with infinitely many a.
    """
    if not 1 <= n <= 12:
        raise TelaError("n must be in [1, 12]")
    allbits = (1 << (2 * n)) - 1
    return Tela(
        ap=("a",),
        n_states=1,
        initial=frozenset({0}),
        transitions=((0, 0, 0, 0), (0, 1, 0, allbits)),
        acceptance=or_(
            and_([inf_(1 << (2 * i)), inf_(1 << (2 * i + 1))]) for i in range(n)
        ),
        n_marks=2 * n,
    )


@dataclass
class BenchConfig:
    pipeline: str = "gba"
    family: str = "random"
    instances: int = 20
    seed: int = 0
    states_min: int = 4
    states_max: int = 6
    n_marks: int = 8
    n_ap: int = 2
    edge_density: float | None = None  # None: 3/|Q| per instance
    mark_prob: float = 0.2
    fig2_min: int = 1
    fig2_max: int = 6
    methods: tuple[str, ...] = ()
    baseline: str = ""
    time_budget: float = 60.0
    state_budget: int = 50000
    validate_words: int = 10
    workers: int = 1
    report_path: str = "telabench-report.txt"

    def resolved_methods(self) -> tuple[str, ...]:
        methods = self.methods or (
            GBA_METHODS if self.pipeline == "gba" else DET_METHODS
        )
        return tuple(methods)

    def resolved_baseline(self) -> str:
        return self.baseline or self.resolved_methods()[0]


def _parse_range(value: str, key: str) -> tuple[int, int]:
    if ".." in value:
        lo_s, hi_s = value.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
    else:
        lo = hi = int(value)
    if lo > hi:
        raise BenchError(f"{key}: empty range {value!r}")
    return lo, hi


def parse_bench_config(text: str) -> BenchConfig:
    """key=value per line; `#` comments; unknown keys rejected."""
    config = BenchConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BenchError(f"line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key == "pipeline":
                if value not in ("gba", "det"):
                    raise ValueError("pipeline must be gba or det")
                config.pipeline = value
            elif key == "family":
                if value not in ("random", "dnf", "fig2"):
                    raise ValueError("family must be random, dnf or fig2")
                config.family = value
            elif key == "instances":
                config.instances = int(value)
            elif key == "seed":
                config.seed = int(value)
            elif key == "states":
                config.states_min, config.states_max = _parse_range(value, key)
            elif key == "marks":
                config.n_marks = int(value)
            elif key == "ap":
                config.n_ap = int(value)
            elif key == "density":
                config.edge_density = None if value == "auto" else float(value)
            elif key == "mark_prob":
                config.mark_prob = float(value)
            elif key == "fig2":
                config.fig2_min, config.fig2_max = _parse_range(value, key)
            elif key == "methods":
                config.methods = tuple(
                    m.strip() for m in value.split(",") if m.strip()
                )
            elif key == "baseline":
                config.baseline = value
            elif key == "time_budget":
                config.time_budget = float(value)
            elif key == "state_budget":
                config.state_budget = int(value)
            elif key == "validate_words":
                config.validate_words = int(value)
            elif key == "workers":
                config.workers = int(value)
            elif key == "report":
                config.report_path = value
            else:
                raise ValueError(f"unknown key {key!r}")
        except BenchError:
            raise
        except ValueError as exc:
            raise BenchError(f"line {lineno}: {exc}") from exc
    known = (
        GBA_METHODS if config.pipeline == "gba" else DET_METHODS
    )
    for m in config.resolved_methods():
        if m not in known:
            raise BenchError(f"method {m!r} not available in {config.pipeline} pipeline")
    if config.resolved_baseline() not in config.resolved_methods():
        raise BenchError("baseline must be one of the methods")
    return config


@dataclass
class BenchReport:
    config: BenchConfig
    instances: list[dict]
    results: list[dict[str, dict]]
    method_stats: dict[str, dict[str, float]]
    ratios: dict[str, dict[str, dict[str, float]]]
    language_checks: int
    mismatches: list[str]


def _bench_instances(config: BenchConfig) -> list[Tela]:
    if config.family == "fig2":
        return [
            cnf_blowup_automaton(n)
            for n in range(config.fig2_min, config.fig2_max + 1)
        ]
    rng = random.Random(config.seed)
    out = []
    for _ in range(config.instances):
        n = rng.randint(config.states_min, config.states_max)
        density = config.edge_density if config.edge_density is not None else 3 / n
        out.append(
            random_tela(
                n_states=n,
                n_marks=config.n_marks,
                edge_density=min(density, 1.0),
                mark_prob=config.mark_prob,
                acc="dnf" if config.family == "dnf" else "random-el",
                seed=rng.randrange(2**32),
                n_ap=config.n_ap,
            )
        )
    return out


def _det_method(a: Tela, method: str, cap: int, deadline: float):
    if method == "product":
        return determinize_product(a, True, cap, deadline), {}
    if method == "product-nolangcover":
        return determinize_product(a, False, cap, deadline), {}
    sub = method.removeprefix("via-gba:")
    g = to_gba(a, sub)
    d = safra_determinize(degeneralize(g), cap, deadline)
    return d, {"gba_states": g.n_states, "gba_marks": g.n_marks}


def _bench_worker(payload):
    idx, a, pipeline, methods, time_budget, state_budget = payload
    out = {}
    for method in methods:
        start = time.perf_counter()
        try:
            if pipeline == "gba":
                result, extra = to_gba(a, method), {}
            else:
                result, extra = _det_method(
                    a, method, state_budget, start + time_budget
                )
            elapsed = time.perf_counter() - start
            if elapsed > time_budget:
                out[method] = {"status": "timeout", "time": elapsed}
                continue
            record = {
                "status": "ok",
                "time": elapsed,
                "states": result.n_states,
                "marks": result.n_marks,
                "automaton": result,
            }
            record.update(extra)
            out[method] = record
        except BudgetExceeded as exc:
            status = "timeout" if exc.kind == "time" else "memout"
            out[method] = {"status": status, "time": time.perf_counter() - start}
    return idx, out


def _lower_median(values: list[float]) -> float:
    if not values:
        return math.nan
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _group_key(config: BenchConfig, a: Tela) -> str | None:
    if config.family == "fig2":
        return None
    nd = nondeterminism_amount(a)
    if nd <= Fraction(66, 100):
        band = "nd_low"
    elif nd <= Fraction(133, 100):
        band = "nd_mid"
    else:
        band = "nd_high"
    if config.family == "random":
        size = "len_2_11" if dnf_length(to_dnf(a.acceptance)) <= 11 else "len_12_21"
    else:
        size = "len_2_21"
    return f"{band}.{size}"


def run_benchmark(config: BenchConfig) -> BenchReport:
    methods = config.resolved_methods()
    baseline = config.resolved_baseline()
    instances = _bench_instances(config)
    payloads = [
        (i, a, config.pipeline, methods, config.time_budget, config.state_budget)
        for i, a in enumerate(instances)
    ]
    if config.workers > 1 and payloads:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            merged = dict(pool.map(_bench_worker, payloads))
    else:
        merged = dict(map(_bench_worker, payloads))
    results = [merged[i] for i in range(len(instances))]

    info = []
    for a in instances:
        info.append(
            {
                "states": a.n_states,
                "marks": a.n_marks,
                "dnf_len": dnf_length(to_dnf(a.acceptance)),
                "nondet": str(nondeterminism_amount(a)),
                "group": _group_key(config, a),
            }
        )

    checks = 0
    mismatches = []
    for idx, a in enumerate(instances):
        oks = [
            (m, results[idx][m]["automaton"])
            for m in methods
            if results[idx][m]["status"] == "ok"
        ]
        if config.pipeline == "det":
            if len(oks) < 2:
                continue
            ref_name, ref = oks[0]
            for name, out in oks[1:]:
                checks += 1
                if not (contains(ref, out) and contains(out, ref)):
                    mismatches.append(
                        f"instance {idx}: {name} differs from {ref_name}"
                    )
        else:
            words = sample_lassos(a, config.validate_words, config.seed + idx)
            for name, out in oks:
                for u, v in words:
                    checks += 1
                    if accepts(a, u, v) != accepts(out, u, v):
                        mismatches.append(
                            f"instance {idx}: {name} differs from the input "
                            f"on {u} | {v}"
                        )
                        break

    method_stats = {}
    for method in methods:
        rows = [results[idx][method] for idx in range(len(instances))]
        times = [r["time"] if r["status"] == "ok" else math.inf for r in rows]
        states = [r.get("states", math.inf) if r["status"] == "ok" else math.inf for r in rows]
        marks = [r.get("marks", math.inf) if r["status"] == "ok" else math.inf for r in rows]
        method_stats[method] = {
            "ok": sum(r["status"] == "ok" for r in rows),
            "timeouts": sum(r["status"] == "timeout" for r in rows),
            "memouts": sum(r["status"] == "memout" for r in rows),
            "median_time": _lower_median(times),
            "median_states": _lower_median(states),
            "median_marks": _lower_median(marks),
        }

    groups: dict[str, list[int]] = {"all": list(range(len(instances)))}
    for idx, row in enumerate(info):
        if row["group"]:
            groups.setdefault(row["group"], []).append(idx)
    ratios: dict[str, dict[str, dict[str, float]]] = {}
    for group, idxs in groups.items():
        per_method: dict[str, dict[str, float]] = {}
        for method in methods:
            metrics: dict[str, float] = {}
            for metric in ("states", "time", "marks"):
                field = "time" if metric == "time" else metric
                vals = []
                for idx in idxs:
                    rm = results[idx][method]
                    rb = results[idx][baseline]
                    ok_m = rm["status"] == "ok"
                    ok_b = rb["status"] == "ok"
                    if not ok_m and not ok_b:
                        continue
                    if not ok_m:
                        vals.append(math.inf)
                    elif not ok_b:
                        vals.append(0.0)
                    else:
                        denom = rb[field]
                        if denom:
                            vals.append(rm[field] / denom)
                        else:
                            vals.append(0.0 if not rm[field] else math.inf)
                metrics[metric] = _lower_median(vals)
            per_method[method] = metrics
        ratios[group] = per_method

    return BenchReport(
        config=config,
        instances=info,
        results=results,
        method_stats=method_stats,
        ratios=ratios,
        language_checks=checks,
        mismatches=mismatches,
    )


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return "nan"
        return f"{value:.6g}"
    return str(value)


def format_report(report: BenchReport) -> str:
    """Machine-readable line format, schema `telabench 1`."""
    lines = ["telabench 1"]
    config = report.config
    for f in fields(BenchConfig):
        value = getattr(config, f.name)
        if f.name == "methods":
            value = ",".join(config.resolved_methods())
        elif f.name == "baseline":
            value = config.resolved_baseline()
        elif value is None:
            value = "auto"
        lines.append(f"config {f.name}={value}")
    for idx, row in enumerate(report.instances):
        parts = [f"instance {idx}"]
        for key in ("states", "marks", "dnf_len", "nondet", "group"):
            parts.append(f"{key}={row[key]}")
        lines.append(" ".join(parts))
    for idx, per_method in enumerate(report.results):
        for method in report.config.resolved_methods():
            r = per_method[method]
            parts = [f"result {idx} {method} status={r['status']}",
                     f"time={_fmt(r['time'])}"]
            for key in ("states", "marks", "gba_states", "gba_marks"):
                if key in r:
                    parts.append(f"{key}={r[key]}")
            lines.append(" ".join(parts))
    for method, stats in report.method_stats.items():
        parts = [f"summary {method}"]
        for key, value in stats.items():
            parts.append(f"{key}={_fmt(value)}")
        lines.append(" ".join(parts))
    for group, per_method in report.ratios.items():
        for method, metrics in per_method.items():
            parts = [f"ratio {group} {method}"]
            for metric, value in metrics.items():
                parts.append(f"{metric}={_fmt(value)}")
            lines.append(" ".join(parts))
    lines.append(
        f"validation checks={report.language_checks} "
        f"mismatches={len(report.mismatches)}"
    )
    for text in report.mismatches:
        lines.append(f"mismatch {text}")
    return "\n".join(lines) + "\n"


def format_table(report: BenchReport) -> str:
    """Human-readable summary table."""
    methods = report.config.resolved_methods()
    headers = ["method", "ok", "t/o", "m/o", "med.time", "med.states", "med.marks"]
    rows = []
    for method in methods:
        s = report.method_stats[method]
        rows.append(
            [
                method,
                str(s["ok"]),
                str(s["timeouts"]),
                str(s["memouts"]),
                _fmt(s["median_time"]),
                _fmt(s["median_states"]),
                _fmt(s["median_marks"]),
            ]
        )
    widths = [
        max(len(headers[c]), *(len(r[c]) for r in rows)) if rows else len(headers[c])
        for c in range(len(headers))
    ]
    out = []
    out.append("  ".join(h.ljust(widths[c]) for c, h in enumerate(headers)))
    for r in rows:
        out.append("  ".join(r[c].ljust(widths[c]) for c in range(len(headers))))
    out.append("")
    out.append(
        f"validated {report.language_checks} language checks, "
        f"{len(report.mismatches)} mismatches"
    )
    for text in report.mismatches:
        out.append(f"  mismatch: {text}")
    return "\n".join(out) + "\n"
