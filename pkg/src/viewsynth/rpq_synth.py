"""View existence and synthesis for regular path queries.

The search space follows the congruence-class characterization: if any
views capture a mapping set, then views that are single congruence classes
of the target automaton (sound mode) or unions of classes (exact mode)
also capture it, so enumerating those is complete.  Multi-mapping inputs
are first combined into one mapping with a fresh separator symbol; the
separator is a target symbol but never a monoid generator, so synthesized
view languages stay inside the declared target alphabet.
"""

from __future__ import annotations

import itertools
import time
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import BudgetExceeded, InputError
from .model import EMPTY as EMPTY_REGEX
from .model import Mapping, ProblemInstance, Regex, RSym, UCQ, Word, rcat
from .automata import (
    DEFAULT_DET_CAP,
    NWA,
    compile_regex,
    complement,
    determinize,
    difference_witness,
    eliminate_epsilon,
    is_empty,
    nwa_to_regex,
    product,
    substitute,
    trim,
    union_nwa,
)
from .congruence import (
    DEFAULT_MONOID_CAP,
    TransitionMonoid,
    class_automaton,
    transition_monoid,
)

DEFAULT_SEARCH_BUDGET = 1_000_000


@dataclass(frozen=True)
class RpqView:
    """One view: EMPTY, a (union of) congruence class(es), or an explicit NWA.

    ``classes`` holds monoid element indices; a singleton is a plain class
    view.  Explicit automata only arrive through check mode (user-supplied
    views); the search never produces them.
    """

    classes: "frozenset[int] | None" = None
    automaton: "NWA | None" = None

    @staticmethod
    def empty() -> "RpqView":
        return RpqView()

    @staticmethod
    def of_class(index: int) -> "RpqView":
        return RpqView(classes=frozenset((index,)))

    @staticmethod
    def of_classes(indices) -> "RpqView":
        ix = frozenset(indices)
        if not ix:
            raise InputError("a class-union view needs at least one class")
        return RpqView(classes=ix)

    @staticmethod
    def explicit(nwa: NWA) -> "RpqView":
        return RpqView(automaton=nwa)

    @property
    def is_empty(self) -> bool:
        return self.classes is None and self.automaton is None

    @property
    def kind(self) -> str:
        if self.is_empty:
            return "empty"
        if self.automaton is not None:
            return "explicit" if self.classes is None else "mixed"
        return "class" if len(self.classes) == 1 else "class-union"

    def with_class(self, index: int) -> "RpqView":
        classes = frozenset((index,)) if self.classes is None else self.classes | {index}
        return RpqView(classes=classes, automaton=self.automaton)

    def signature(self):
        return (self.classes, id(self.automaton) if self.automaton is not None else None)


RpqViews = dict[str, RpqView]


def realize_view(view: RpqView, monoid: "TransitionMonoid | None") -> "NWA | None":
    """The view's language as an NWA (``None`` for the empty language)."""
    parts = []
    if view.classes is not None:
        if monoid is None:
            raise InputError("class views need the instance's transition monoid")
        parts.append(class_automaton(monoid, set(view.classes)).as_nwa())
    if view.automaton is not None:
        parts.append(view.automaton)
    if not parts:
        return None
    return parts[0] if len(parts) == 1 else union_nwa(parts)


def views_signature(views: RpqViews):
    return tuple(sorted((sym, v.signature()) for sym, v in views.items()))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class MappingCheck:
    """Verification record for one mapping under candidate views."""

    contained: bool
    separating: "Word | None"
    nonempty: bool
    witness: "Word | None"
    reverse_contained: "bool | None" = None
    reverse_separating: "Word | None" = None

    def ok(self, mode: str) -> bool:
        good = self.contained and self.nonempty
        if mode == "exact":
            good = good and bool(self.reverse_contained)
        return good

    def to_json(self, mode: str):
        out = {
            "contained": self.contained,
            "nonempty": self.nonempty,
            "witness": list(self.witness) if self.witness is not None else None,
        }
        if self.separating is not None:
            out["separating"] = list(self.separating)
        if mode == "exact":
            out["reverse_contained"] = self.reverse_contained
            if self.reverse_separating is not None:
                out["reverse_separating"] = list(self.reverse_separating)
        return out


@dataclass
class CaptureResult:
    mode: str
    per_mapping: list[MappingCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok(self.mode) for c in self.per_mapping)

    def to_json(self):
        return {
            "ok": self.ok,
            "mode": self.mode,
            "mappings": [c.to_json(self.mode) for c in self.per_mapping],
        }


@dataclass
class SynthStats:
    mode: str
    monoid_size: int = 0
    assignments_tried: int = 0
    prefixes_pruned: int = 0
    workers: int = 1
    seed: int = 0
    elapsed: float = 0.0

    def to_json(self):
        # only worker-count- and timing-independent fields: JSON reports must
        # be byte-identical across worker counts
        return {
            "mode": self.mode,
            "monoid_size": self.monoid_size,
            "seed": self.seed,
        }


@dataclass
class SynthesisReport:
    outcome: str  # "found" | "not-found"
    views: "RpqViews | None"
    views_regex: "dict[str, Regex] | None"
    checks: "CaptureResult | None"
    stats: SynthStats
    all_views: "list[RpqViews] | None" = None
    all_views_regex: "list[dict[str, Regex]] | None" = None
    monoid: "TransitionMonoid | None" = field(default=None, repr=False)

    @property
    def found(self) -> bool:
        return self.outcome == "found"

    def to_json(self):
        def render(vr):
            return {sym: r.render() for sym, r in sorted(vr.items())}

        out = {
            "outcome": self.outcome,
            "views": render(self.views_regex) if self.views_regex is not None else None,
            "checks": self.checks.to_json() if self.checks is not None else None,
            "statistics": self.stats.to_json(),
        }
        if self.all_views_regex is not None:
            out["all_views"] = [render(vr) for vr in self.all_views_regex]
        return out


# ---------------------------------------------------------------------------
# Multi-mapping reduction
# ---------------------------------------------------------------------------

def reduce_to_single_mapping(
    mappings, taken_names
) -> tuple[Mapping, "str | None"]:
    """Concatenate all mappings around a fresh separator target symbol.

    Views over the original target alphabet capture the mapping set iff
    they capture the combined mapping; the separator keeps the pieces
    aligned and is never assigned a view.
    """
    mappings = list(mappings)
    if len(mappings) == 1:
        return mappings[0], None
    sep = "#"
    while sep in taken_names:  # '#' starts comments, so parsed names never collide
        sep += "#"
    source = rcat(_interleave([m.source for m in mappings], RSym(sep)))
    target = rcat(_interleave([m.target for m in mappings], RSym(sep)))
    return Mapping(source=source, target=target), sep


def _interleave(parts, sep):
    out = []
    for i, p in enumerate(parts):
        if i:
            out.append(sep)
        out.append(p)
    return out


# ---------------------------------------------------------------------------
# Capture checking
# ---------------------------------------------------------------------------

class _MappingChecker:
    """Pre-compiled automata for one mapping, reused across candidates."""

    def __init__(self, mapping: Mapping, source_syms, target_alpha, det_cap, two_way=False):
        if isinstance(mapping.source, UCQ):
            raise InputError("path-query capture check got a relational mapping")
        self.source_syms = frozenset(source_syms)
        self.a_s = eliminate_epsilon(compile_regex(mapping.source))
        self.a_t = eliminate_epsilon(compile_regex(mapping.target))
        self.det_cap = det_cap
        self.two_way = two_way
        self.alphabet = frozenset(
            (self.a_s.alphabet - self.source_syms) | self.a_t.alphabet | set(target_alpha)
        )
        self._comp_t: "NWA | None" = None
        self._fold_t: "NWA | None" = None

    def _complement_target(self) -> NWA:
        if self._comp_t is None:
            det = determinize(self.a_t, cap=self.det_cap, alphabet=self.alphabet)
            self._comp_t = complement(det).as_nwa()
        return self._comp_t

    def _folded_target(self) -> NWA:
        if self._fold_t is None:
            from .twoway import fold_automaton, two_to_one

            self._fold_t = two_to_one(fold_automaton(self.a_t), cap=self.det_cap)
        return self._fold_t

    def substituted(self, realized: dict[str, "NWA | None"]) -> NWA:
        return substitute(self.a_s, realized, self.source_syms, self.alphabet)

    def check(self, realized: dict[str, "NWA | None"], mode: str) -> MappingCheck:
        sub = self.substituted(realized)
        empty, witness = is_empty(sub)
        target = self._folded_target() if self.two_way else self.a_t
        if self.two_way:
            separating = difference_witness(sub, target, cap=self.det_cap)
        else:
            gap = product(sub, self._complement_target(), alphabet=self.alphabet)
            _, separating = is_empty(gap)
        record = MappingCheck(
            contained=separating is None,
            separating=separating,
            nonempty=not empty,
            witness=witness,
        )
        if mode == "exact":
            if self.two_way:
                from .twoway import fold_automaton, two_to_one

                folded_sub = two_to_one(fold_automaton(sub), cap=self.det_cap)
                rev = difference_witness(self.a_t, folded_sub, cap=self.det_cap)
            else:
                rev = difference_witness(self.a_t, sub, cap=self.det_cap)
            record.reverse_contained = rev is None
            record.reverse_separating = rev
        return record

    def contained_prefix(self, realized: dict[str, "NWA | None"]) -> bool:
        """Containment with unassigned symbols treated as empty.

        Sound for pruning: words witnessing a violation survive every
        extension of the assignment (view languages only grow).
        """
        sub = self.substituted(realized)
        if self.two_way:
            return difference_witness(sub, self._folded_target(), cap=self.det_cap) is None
        gap = product(sub, self._complement_target(), alphabet=self.alphabet)
        empty, _ = is_empty(gap)
        return empty


def capture_check(
    instance: ProblemInstance,
    views: RpqViews,
    monoid: "TransitionMonoid | None" = None,
    mode: "str | None" = None,
    det_cap: int = DEFAULT_DET_CAP,
) -> CaptureResult:
    """Check whether views capture every mapping of a path-query instance."""
    if instance.kind not in ("rpq", "2rpq"):
        raise InputError("capture_check handles path-query instances only")
    mode = mode or instance.mode
    occurring = instance.occurring_source_symbols()
    missing = [s for s in occurring if s not in views]
    if missing:
        raise InputError(f"views missing for occurring source symbol(s) {missing}")
    realized = {sym: realize_view(v, monoid) for sym, v in views.items()}
    checkers = [
        _MappingChecker(
            m,
            instance.source_names,
            instance.target_names,
            det_cap,
            two_way=instance.kind == "2rpq",
        )
        for m in instance.mappings
    ]
    return CaptureResult(mode=mode, per_mapping=[c.check(realized, mode) for c in checkers])


# ---------------------------------------------------------------------------
# Synthesis search
# ---------------------------------------------------------------------------

class _Engine:
    """Search context shared by synthesis and maximization."""

    def __init__(
        self,
        instance: ProblemInstance,
        mode: str,
        use_reduction: bool = True,
        det_cap: int = DEFAULT_DET_CAP,
        monoid_cap: int = DEFAULT_MONOID_CAP,
    ):
        if instance.kind != "rpq":
            raise InputError(f"synthesis supports kind rpq only, not {instance.kind}")
        if mode not in ("sound", "exact"):
            raise InputError(f"unknown mode {mode!r}")
        self.instance = instance
        self.mode = mode
        self.det_cap = det_cap
        self.occurring = instance.occurring_source_symbols()
        target_alpha = instance.target_names

        if use_reduction:
            combined, _sep = reduce_to_single_mapping(
                instance.mappings, set(instance.symbols)
            )
            self.check_mappings = [combined]
            monoid_auto = trim(eliminate_epsilon(compile_regex(combined.target)))
        else:
            self.check_mappings = list(instance.mappings)
            monoid_auto = trim(
                union_nwa(
                    [eliminate_epsilon(compile_regex(m.target)) for m in instance.mappings],
                    alphabet=target_alpha,
                )
            )
        if not set(target_alpha) <= monoid_auto.alphabet:
            monoid_auto = NWA(
                monoid_auto.n_states,
                monoid_auto.alphabet | set(target_alpha),
                monoid_auto.initials,
                monoid_auto.finals,
                monoid_auto.transitions,
            )
        self.monoid = transition_monoid(monoid_auto, generators=target_alpha, cap=monoid_cap)
        self.checkers = [
            _MappingChecker(m, instance.source_names, target_alpha, det_cap)
            for m in self.check_mappings
        ]
        self._realized_cache: dict = {}

    def realize(self, view: RpqView) -> "NWA | None":
        key = view.signature()
        if key not in self._realized_cache:
            self._realized_cache[key] = realize_view(view, self.monoid)
        return self._realized_cache[key]

    def assignment_ok(self, views: RpqViews) -> bool:
        realized = {sym: self.realize(v) for sym, v in views.items()}
        for checker in self.checkers:
            sub = checker.substituted(realized)
            empty, _ = is_empty(sub)
            if empty:
                return False
            gap = product(sub, checker._complement_target(), alphabet=checker.alphabet)
            gap_empty, _ = is_empty(gap)
            if not gap_empty:
                return False
            if self.mode == "exact":
                rev = difference_witness(checker.a_t, sub, cap=self.det_cap)
                if rev is not None:
                    return False
        return True

    def prefix_ok(self, partial: RpqViews) -> bool:
        realized = {sym: self.realize(v) for sym, v in partial.items()}
        for sym in self.occurring:
            realized.setdefault(sym, None)
        return all(c.contained_prefix(realized) for c in self.checkers)

    def options_factory(self):
        """Per-symbol candidate views in canonical order (EMPTY first)."""
        m = len(self.monoid.elements)
        if self.mode == "sound":
            def options():
                yield RpqView.empty()
                for i in range(m):
                    yield RpqView.of_class(i)
        else:
            def options():
                yield RpqView.empty()
                for size in range(1, m + 1):
                    for combo in itertools.combinations(range(m), size):
                        yield RpqView.of_classes(combo)
        return options


def synthesize(
    instance: ProblemInstance,
    mode: "str | None" = None,
    *,
    find_all: bool = False,
    maximal: bool = False,
    use_reduction: bool = True,
    workers: int = 1,
    det_cap: int = DEFAULT_DET_CAP,
    monoid_cap: int = DEFAULT_MONOID_CAP,
    budget: int = DEFAULT_SEARCH_BUDGET,
    seed: int = 0,
) -> SynthesisReport:
    """Search for capturing views; see :func:`synthesize_sound` and
    :func:`synthesize_exact` for the two modes.

    With ``find_all`` every passing assignment is collected (subject to the
    budget); with ``maximal`` each result is greedily extended to a maximal
    capturing view set before reporting.  Results are deterministic and
    independent of ``workers``.
    """
    mode = mode or instance.mode
    started = time.monotonic()
    engine = _Engine(
        instance, mode, use_reduction=use_reduction, det_cap=det_cap, monoid_cap=monoid_cap
    )
    stats = SynthStats(
        mode=mode, monoid_size=len(engine.monoid.elements), workers=max(1, workers), seed=seed
    )

    if mode == "exact":
        # the problem trivializes on an empty target query
        for checker in engine.checkers:
            empty, _ = is_empty(checker.a_t)
            if empty:
                stats.elapsed = time.monotonic() - started
                return SynthesisReport("not-found", None, None, None, stats, monoid=engine.monoid)

    solutions = _run_search(engine, stats, find_all=find_all, budget=budget, workers=workers)

    if maximal and solutions:
        maximized: "OrderedDict" = OrderedDict()
        for views in solutions:
            bigger = _maximize_with_engine(engine, views)
            maximized.setdefault(views_signature(bigger), bigger)
        solutions = list(maximized.values())
    elif find_all:
        deduped: "OrderedDict" = OrderedDict()
        for views in solutions:
            deduped.setdefault(views_signature(views), views)
        solutions = list(deduped.values())

    stats.elapsed = time.monotonic() - started
    if not solutions:
        return SynthesisReport("not-found", None, None, None, stats, monoid=engine.monoid)

    best = solutions[0]
    report = SynthesisReport(
        outcome="found",
        views=best,
        views_regex=views_to_regex(best, engine.monoid),
        checks=capture_check(instance, best, engine.monoid, mode, det_cap),
        stats=stats,
        monoid=engine.monoid,
    )
    if find_all:
        report.all_views = solutions
        report.all_views_regex = [views_to_regex(v, engine.monoid) for v in solutions]
    return report


def _run_search(engine: _Engine, stats: SynthStats, *, find_all, budget, workers):
    syms = list(engine.occurring)
    options = engine.options_factory()

    if not syms:
        stats.assignments_tried = 1
        return [{}] if engine.assignment_ok({}) else []

    def dfs(depth: int, partial: RpqViews, opts_at_0):
        """Yield passing assignments in canonical order below this prefix."""
        if depth == len(syms):
            stats.assignments_tried += 1
            if stats.assignments_tried > budget:
                raise BudgetExceeded("synthesis search", budget)
            if engine.assignment_ok(partial):
                yield dict(partial)
            return
        sym = syms[depth]
        source = opts_at_0 if depth == 0 else options()
        for view in source:
            partial[sym] = view
            if depth + 1 < len(syms) and not engine.prefix_ok(partial):
                stats.prefixes_pruned += 1
            else:
                yield from dfs(depth + 1, partial, opts_at_0)
            del partial[sym]

    def run_chunk(worker_id: int, worker_count: int):
        chunk = itertools.islice(options(), worker_id, None, worker_count)
        found = []
        for views in dfs(0, {}, chunk):
            found.append(views)
            if not find_all:
                break
        return found

    n_workers = max(1, workers)
    if n_workers == 1:
        chunks = [run_chunk(0, 1)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(run_chunk, w, n_workers) for w in range(n_workers)]
            chunks = [f.result() for f in futures]

    merged = [views for chunk in chunks for views in chunk]
    merged.sort(key=lambda views: _canonical_key(engine, views))
    if not find_all:
        merged = merged[:1]
    return merged


def _canonical_key(engine: _Engine, views: RpqViews):
    def view_key(v: RpqView):
        if v.is_empty:
            return (0,)
        if engine.mode == "sound":
            return (1, min(v.classes))
        return (1, len(v.classes), tuple(sorted(v.classes)))

    return tuple(view_key(views[sym]) for sym in engine.occurring)


def synthesize_sound(instance: ProblemInstance, **kwargs) -> SynthesisReport:
    """First (canonically least) sound-capturing view assignment, else not-found.

    Complete: when no assignment of empty/congruence-class views exists, no
    views in any language exist.
    """
    return synthesize(instance, "sound", **kwargs)


def synthesize_exact(instance: ProblemInstance, **kwargs) -> SynthesisReport:
    """Exact synthesis: views are empty or unions of congruence classes."""
    return synthesize(instance, "exact", **kwargs)


# ---------------------------------------------------------------------------
# Maximal views
# ---------------------------------------------------------------------------

def maximize(
    instance: ProblemInstance,
    views: RpqViews,
    mode: str = "sound",
    *,
    use_reduction: bool = True,
    det_cap: int = DEFAULT_DET_CAP,
    monoid_cap: int = DEFAULT_MONOID_CAP,
) -> RpqViews:
    """Greedily add congruence classes while capture still holds.

    The result is maximal: once a class addition breaks capture it stays
    broken under any larger views, so a single canonical pass suffices.
    Raises when the seed views do not capture.
    """
    engine = _Engine(
        instance, mode, use_reduction=use_reduction, det_cap=det_cap, monoid_cap=monoid_cap
    )
    if not engine.assignment_ok(views):
        raise InputError("maximize needs views that already capture the mappings")
    return _maximize_with_engine(engine, views)


def _maximize_with_engine(engine: _Engine, views: RpqViews) -> RpqViews:
    current = dict(views)
    for sym in engine.occurring:
        for index in range(len(engine.monoid.elements)):
            view = current[sym]
            if view.classes is not None and index in view.classes:
                continue
            candidate = dict(current)
            candidate[sym] = view.with_class(index)
            if engine.assignment_ok(candidate):
                current = candidate
    return current


# ---------------------------------------------------------------------------
# Presentation
# ---------------------------------------------------------------------------

def views_to_regex(views: RpqViews, monoid: "TransitionMonoid | None") -> dict[str, Regex]:
    """Render each view language as a regex (state elimination on its NWA)."""
    out: dict[str, Regex] = {}
    for sym, view in views.items():
        realized = realize_view(view, monoid)
        out[sym] = EMPTY_REGEX if realized is None else nwa_to_regex(realized)
    return out
