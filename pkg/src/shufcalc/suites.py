"""Acceptance suites shared by ``shufcalc verify`` and the test-suite.

Each suite returns a ``SuiteResult``.  Failing suites list witnesses sorted
by term size, so the first witness is a smallest offending term.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .corpus import FIXTURES, enumerate_terms, gen_corpus
from .rewrite import (
    DEFAULT_FUEL,
    SIGMA_RULES,
    Rule,
    all_maximal_traces,
    apply_step,
    balanced_size,
    join,
    normalize,
    reachable,
    redexes,
)
from .search import Bounds, BudgetExceeded, DerivationSearch, MinSizeOracle
from .semantics import counterexample_check, has_empty_point, interpret_bounded, interpret_direct
from .syntax import TermClass, classify, free_vars, is_closed, is_value, node_count, parse, print_term
from .transport import (
    count_beta_steps,
    derive,
    empty_type_derivation,
    check_empty_uniqueness,
    minimal_derivation_normal,
    subject_expand,
    subject_reduce,
)
from .typesys import ZERO, app_node, ax, check_derivation, derivation_to_json, env_of, lam, size, zero_derivation

CORPUS_SEED = 2024
CORPUS_SIZE = 500
CORPUS_MAX_NODES = 12


@dataclass
class SuiteResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "details": self.details,
            "witnesses": self.witnesses,
            "seconds": round(self.seconds, 3),
        }


class _Failures:
    def __init__(self):
        self.items = []

    def add(self, t, reason: str, derivation=None):
        w = {"term": print_term(t), "nodes": node_count(t), "reason": reason}
        if derivation is not None:
            w["derivation"] = derivation_to_json(derivation)
        self.items.append(w)

    def sorted(self, limit: int = 5) -> list:
        return sorted(self.items, key=lambda w: w["nodes"])[:limit]

    def __bool__(self):
        return bool(self.items)


def _corpus(seed: int = CORPUS_SEED, count: int = CORPUS_SIZE) -> list:
    return gen_corpus(seed, count, CORPUS_MAX_NODES)


# ---------------------------------------------------------------- examples


def suite_size() -> SuiteResult:
    ii = parse("(\\x. x) (\\x. x)")
    identity = ii.fun
    pi_ii = app_node(lam(identity, "x", [ax("x", ZERO)]), zero_derivation(ii.arg))
    pi_i = zero_derivation(identity)
    (pos, rule), = redexes(ii)
    step = apply_step(ii, pos, rule)
    reduced, report = subject_reduce(pi_ii, step)
    expanded, _ = subject_expand(pi_i, step)
    checks = {
        "pi_II valid": not check_derivation(pi_ii),
        "pi_I valid": not check_derivation(pi_i),
        "sizes": (size(pi_ii), size(pi_i)) == (1, 0),
        "reduces to pi_I": derivation_to_json(reduced) == derivation_to_json(pi_i),
        "delta": report.delta == -1,
        "expands to a size-1 derivation": size(expanded) == 1 and not check_derivation(expanded),
    }
    return SuiteResult("size", all(checks.values()), {"checks": checks, "sizes": [size(pi_ii), size(pi_i)]})


def suite_balanced_size() -> SuiteResult:
    got = {
        text: balanced_size(parse(text))
        for text in (FIXTURES["balanced_size_3"], FIXTURES["balanced_size_2"])
    }
    return SuiteResult("balanced-size", list(got.values()) == [3, 2], {"sizes": got})


def suite_stuck_divergence(fuel: int = 200) -> SuiteResult:
    t = parse(FIXTURES["stuck_loop_x_t"])
    u = parse(FIXTURES["stuck_loop_x_u"])
    target = parse("(\\y. (\\x. x x) (\\x. x x)) (x (\\x. x))")
    details, ok = {}, True
    for name, s in (("t", t), ("u", u)):
        trace = normalize(s, fuel=fuel)
        first = trace.steps[0] if trace.steps else None
        one_sigma = first is not None and first.rule.is_sigma and first.after == target
        rest_beta = all(st.rule is Rule.BETA_V for st in trace.steps[1:])
        points = {}
        for depth, width in ((1, 1), (2, 1), (3, 1), (2, 2)):
            direct = interpret_direct(s, ("x",), depth, width, budget=None)
            points[f"{depth},{width}"] = len(direct.points)
            ok &= direct.complete and not direct.points
        bounded = interpret_bounded(s, ("x",), 3, 1, fuel=fuel)
        ok &= one_sigma and rest_beta and trace.outcome == "fuel" and not bounded.points
        details[name] = {
            "first_step": None if first is None else first.rule.value,
            "outcome": trace.outcome,
            "sigma_steps": trace.len_sigma,
            "points_direct": points,
            "points_bounded": len(bounded.points),
        }
    return SuiteResult("stuck-divergence", ok, details)


def suite_critical_pair() -> SuiteResult:
    t = parse(FIXTURES["critical_pair"])
    found = {rule: apply_step(t, pos, rule).after for pos, rule in redexes(t)}
    ok = set(found) == {Rule.SIGMA1, Rule.SIGMA3}
    details: dict = {"peak": sorted(r.value for r in found)}
    if ok:
        left, right = found[Rule.SIGMA1], found[Rule.SIGMA3]
        meet = join(t, left, right, fuel=4, rules=SIGMA_RULES)
        via3 = reachable(left, 1, rules={Rule.SIGMA3})
        via1 = reachable(right, 2, rules={Rule.SIGMA1})
        ok = meet is not None and via3.get(meet) == 1 and via1.get(meet) == 2
        traces = all_maximal_traces(t)
        counts = {tr.len_bv for tr in traces}
        nfs = {tr.normal_form for tr in traces}
        ok &= len(counts) == 1 and len(nfs) == 1 and None not in nfs
        details.update(
            join=None if meet is None else print_term(meet),
            traces=len(traces),
            beta_counts=sorted(counts),
        )
    return SuiteResult("critical-pair", ok, details)


def suite_counterexample() -> SuiteResult:
    report = counterexample_check()
    # the bound "derivation size <= point size" must fail here
    fails = report.derivation_size > report.point_size
    return SuiteResult(
        "counterexample",
        fails and report.pair == (2, 1),
        {"derivation_size": report.derivation_size, "point_size": report.point_size},
        [] if fails else [{"term": print_term(report.term), "derivation": derivation_to_json(report.derivation)}],
    )


# ---------------------------------------------------------------- properties


def _transport_along(pi, trace, bad: _Failures, t) -> bool:
    for step in trace.steps:
        before = size(pi)
        nxt, report = subject_reduce(pi, step)
        want = -1 if step.rule is Rule.BETA_V else 0
        if report.delta != want or size(nxt) != before + want:
            bad.add(t, f"forward {step.rule.value} changed size by {report.delta}", pi)
            return False
        back, rep = subject_expand(nxt, step)
        if rep.delta != -want:
            bad.add(t, f"backward {step.rule.value} changed size by {rep.delta}", nxt)
            return False
        pi = nxt
    if check_derivation(pi):
        bad.add(t, "transported derivation does not check", pi)
        return False
    return True


def suite_quantitative(count: int = CORPUS_SIZE, seed: int = CORPUS_SEED, fuel: int = DEFAULT_FUEL) -> SuiteResult:
    bad = _Failures()
    stats = {"terms": 0, "normalizing": 0, "unknown": 0, "max_traces_checked": 0}
    rng = random.Random(seed)
    for t in _corpus(seed, count):
        stats["terms"] += 1
        found = derive(t, fuel)
        if found is None:
            stats["unknown"] += 1
            continue
        stats["normalizing"] += 1
        pi, trace = found
        if check_derivation(pi):
            bad.add(t, "derived derivation does not check", pi)
            continue
        if size(pi) != trace.len_bv + balanced_size(trace.normal_form):
            bad.add(t, "size differs from beta count plus balanced size", pi)
            continue
        if not _transport_along(pi, trace, bad, t):
            continue
        alt = normalize(t, "random", True, fuel, seed=rng.randrange(1 << 30))
        if alt.normal_form is None or not _transport_along(pi, alt, bad, t):
            if alt.normal_form is None:
                bad.add(t, "random strategy did not normalize", pi)
            continue
        verdict = count_beta_steps(t, fuel)
        traces = all_maximal_traces(t, fuel=max(4 * len(trace.steps), 8), cap=32)
        stats["max_traces_checked"] += len(traces)
        if any(tr.normal_form is None or tr.len_bv != verdict.len_bv for tr in traces):
            bad.add(t, "a maximal trace disagrees with count_beta_steps")
    return SuiteResult("quantitative", not bad, stats, bad.sorted())


def _empty_point_search(nf, budget: int):
    search = DerivationSearch(Bounds(2, 2), zero=free_vars(nf), budget=budget)
    try:
        for d in search.iter_derivations(nf, ZERO):
            if not env_of(d).bindings:
                return True
    except BudgetExceeded:
        return None
    return False


def suite_characterization(
    count: int = 150, seed: int = CORPUS_SEED, fuel: int = DEFAULT_FUEL, budget: int = 3000
) -> SuiteResult:
    bad = _Failures()
    stats = {"terms": 0, "normalizing": 0, "fuel_unknown": 0, "search_unknown": 0, "closed_valuable": 0}
    for t in _corpus(seed, count):
        stats["terms"] += 1
        trace = normalize(t, fuel=fuel)
        if trace.normal_form is None:
            stats["fuel_unknown"] += 1
            continue
        stats["normalizing"] += 1
        nf = trace.normal_form
        if derive(t, fuel) is None:
            bad.add(t, "normalizes but derive fails")
        sem = interpret_bounded(t, depth=2, width=2, fuel=fuel, budget=budget)
        if not sem.points:
            if sem.complete:
                bad.add(t, "normalizes but bounded interpretation is empty")
            else:
                stats["search_unknown"] += 1
        if is_closed(t) and (classify(nf) is not TermClass.REDUCIBLE) != is_value(nf):
            bad.add(t, "closed normal form is not a value")
        if has_empty_point(t, fuel=fuel) != is_value(nf):
            bad.add(t, "empty point disagrees with valuability")
        searched = _empty_point_search(nf, budget)
        if searched is None:
            stats["search_unknown"] += 1
        elif searched != is_value(nf):
            bad.add(t, "bounded search for the empty point disagrees with valuability")
        if is_closed(t) and is_value(nf):
            stats["closed_valuable"] += 1
            d = empty_type_derivation(t, fuel)
            if d is None or size(d) != count_beta_steps(t, fuel).len_bv:
                bad.add(t, "empty-type derivation size differs from beta count", d)
    return SuiteResult("characterization", not bad, stats, bad.sorted())


def suite_oracle(max_nodes: int = 7, depth: int = 2, width: int = 2) -> SuiteResult:
    bad = _Failures()
    free = ("x", "y")
    oracle = MinSizeOracle(Bounds(depth, width), free)
    normal = [t for t in enumerate_terms(max_nodes, free) if classify(t) is not TermClass.REDUCIBLE]
    for t in normal:
        d = minimal_derivation_normal(t)
        brute = oracle.minimum(t)
        if brute is None or size(d) != brute or brute != balanced_size(t):
            bad.add(t, f"sizes: constructed {size(d)}, oracle {brute}, balanced {balanced_size(t)}", d)
    return SuiteResult("oracle", not bad, {"normal_terms": len(normal), "max_nodes": max_nodes}, bad.sorted())


def suite_uniqueness(count: int = CORPUS_SIZE, seed: int = CORPUS_SEED, fuel: int = 2000) -> SuiteResult:
    bad = _Failures()
    seen = set()
    for t in _corpus(seed, count):
        candidates = [t]
        trace = normalize(t, fuel=fuel)
        if trace.normal_form is not None:
            candidates.append(trace.normal_form)
        for s in candidates:
            if s in seen or classify(s) is TermClass.REDUCIBLE:
                continue
            seen.add(s)
            if not check_empty_uniqueness(s):
                bad.add(s, "empty-type derivation is not unique or not of size 0")
    return SuiteResult("uniqueness", not bad, {"normal_terms": len(seen)}, bad.sorted())


def suite_sigma_termination(count: int = CORPUS_SIZE, seed: int = CORPUS_SEED) -> SuiteResult:
    bad = _Failures()
    longest = 0
    for t in _corpus(seed, count):
        n = node_count(t)
        trace = normalize(t, rules=SIGMA_RULES, fuel=4 * n * n)
        longest = max(longest, len(trace.steps))
        if trace.normal_form is None:
            bad.add(t, f"sigma normalization exceeded {4 * n * n} steps")
    return SuiteResult("sigma-termination", not bad, {"longest": longest}, bad.sorted())


SUITES = {
    "size": suite_size,
    "balanced-size": suite_balanced_size,
    "stuck-divergence": suite_stuck_divergence,
    "critical-pair": suite_critical_pair,
    "counterexample": suite_counterexample,
    "quantitative": suite_quantitative,
    "characterization": suite_characterization,
    "oracle": suite_oracle,
    "uniqueness": suite_uniqueness,
    "sigma-termination": suite_sigma_termination,
}


def run_suite(name: str) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    start = time.perf_counter()
    try:
        result = SUITES[name]()
    except Exception as exc:  # a crash is a failed suite, not a CLI error
        result = SuiteResult(name, False, {"error": f"{type(exc).__name__}: {exc}"})
    result.seconds = time.perf_counter() - start
    return result


def run_all(names=None) -> list:
    return [run_suite(n) for n in (names or SUITES)]
