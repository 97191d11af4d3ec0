"""View existence and synthesis for conjunctive queries and their unions.

Candidate view bodies are enumerated up to the atom/disjunct/variable
bounds that make the guess-and-check argument complete: a capturing view
never needs more atoms than the total target atom count, more disjuncts
than the total target disjunct count, or more variables than its atoms can
mention.  Bodies are generated in canonical form (lexicographically least
under renaming of existential variables) so isomorphic candidates are
enumerated once.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .errors import BudgetExceeded, InputError
from .model import Atom, CQ, ProblemInstance, UCQ

DEFAULT_CQ_BUDGET = 1_000_000

Hom = dict[str, str]

CqView = "CQ | UCQ | None"  # None marks an undefined (unassigned) view
CqViews = dict[str, "CQ | UCQ | None"]


# ---------------------------------------------------------------------------
# Containment mappings
# ---------------------------------------------------------------------------

def find_hom(q_from: CQ, q_to: CQ) -> "Hom | None":
    """A containment mapping from ``q_from`` onto ``q_to``.

    Head variables map positionally; every atom of ``q_from`` must land on
    an atom of ``q_to`` with the same predicate.  A mapping exists iff
    ``q_to`` is contained in ``q_from``.
    """
    if len(q_from.head) != len(q_to.head):
        raise InputError("containment mapping needs equal head arities")
    binding: Hom = {}
    for u, v in zip(q_from.head, q_to.head):
        if binding.get(u, v) != v:
            return None
        binding[u] = v
    by_pred: dict[str, list[Atom]] = {}
    for a in q_to.atoms:
        by_pred.setdefault(a.pred, []).append(a)

    atoms = list(q_from.atoms)

    def backtrack(i: int, bound: Hom) -> "Hom | None":
        if i == len(atoms):
            return bound
        atom = atoms[i]
        for image in by_pred.get(atom.pred, ()):
            local = dict(bound)
            ok = True
            for var, const in zip(atom.args, image.args):
                if local.get(var, const) != const:
                    ok = False
                    break
                local[var] = const
            if ok:
                result = backtrack(i + 1, local)
                if result is not None:
                    return result
        return None

    return backtrack(0, binding)


def cq_contained(q1: CQ, q2: CQ) -> bool:
    """q1 contained in q2 (a containment mapping from q2 onto q1 exists)."""
    return find_hom(q2, q1) is not None


def ucq_contains(q1, q2: UCQ) -> bool:
    """Every disjunct of ``q1`` contained in some disjunct of ``q2``.

    ``q1`` may be a UCQ or a plain list of CQs (a possibly-empty union).
    """
    disjuncts = q1.disjuncts if isinstance(q1, UCQ) else q1
    return all(
        any(cq_contained(d1, d2) for d2 in q2.disjuncts) for d1 in disjuncts
    )


# ---------------------------------------------------------------------------
# Substitution of views into source queries
# ---------------------------------------------------------------------------

def cq_substitute(q_s: UCQ, views: CqViews, source_preds) -> list[CQ]:
    """Replace source atoms by view bodies, distributing UCQ views.

    Disjuncts mentioning an undefined source predicate are dropped; the
    result may therefore be an empty union, returned as a plain list.
    Existential view variables are renamed freshly per atom occurrence.
    Repeated head variables in a view equate the corresponding atom
    arguments across the produced disjunct.
    """
    source_preds = set(source_preds)
    out: list[CQ] = []
    for d in q_s.disjuncts:
        if any(a.pred in source_preds and views.get(a.pred) is None for a in d.atoms):
            continue
        per_atom: list[list["CQ | None"]] = []
        for atom in d.atoms:
            if atom.pred in source_preds:
                v = views[atom.pred]
                v_ucq = v if isinstance(v, UCQ) else UCQ((v,))
                if v_ucq.arity != len(atom.args):
                    raise InputError(
                        f"view for {atom.pred} has head arity {v_ucq.arity}, "
                        f"atom uses {len(atom.args)}"
                    )
                per_atom.append(list(v_ucq.disjuncts))
            else:
                per_atom.append([None])
        for combo in itertools.product(*per_atom):
            out.append(_splice_disjunct(d, combo))
    return out


def _splice_disjunct(d: CQ, combo) -> CQ:
    atoms: list[Atom] = []
    equalities: list[tuple[str, str]] = []
    for occurrence, (atom, view_cq) in enumerate(zip(d.atoms, combo)):
        if view_cq is None:
            atoms.append(atom)
            continue
        rename: dict[str, str] = {}
        for head_var, term in zip(view_cq.head, atom.args):
            if head_var in rename:
                equalities.append((rename[head_var], term))
            else:
                rename[head_var] = term
        for body_atom in view_cq.atoms:
            args = []
            for var in body_atom.args:
                if var not in rename:
                    # fresh per occurrence; '~' cannot appear in parsed names
                    rename[var] = f"{var}~{occurrence}"
                args.append(rename[var])
            atoms.append(Atom(body_atom.pred, tuple(args)))

    if not equalities:
        return CQ(d.head, tuple(atoms))

    parent: dict[str, str] = {}

    def find(v: str) -> str:
        parent.setdefault(v, v)
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in equalities:
        ra, rb = find(a), find(b)
        if ra != rb:
            keep, drop = sorted((ra, rb))
            parent[drop] = keep

    def rep(v: str) -> str:
        return find(v)

    head = tuple(rep(v) for v in d.head)
    atoms = [Atom(a.pred, tuple(rep(v) for v in a.args)) for a in atoms]
    return CQ(head, tuple(atoms))


# ---------------------------------------------------------------------------
# Bounds and candidate enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthesisBounds:
    """Search bounds making the candidate enumeration complete."""

    atom_bound: int      # total target atoms across mappings
    disjunct_bound: int  # total target disjuncts across mappings
    variable_bound: int

    def to_json(self):
        return {
            "atom_bound": self.atom_bound,
            "disjunct_bound": self.disjunct_bound,
            "variable_bound": self.variable_bound,
        }


def bounds_for(instance: ProblemInstance) -> SynthesisBounds:
    atom_bound = 0
    disjunct_bound = 0
    for m in instance.mappings:
        target = m.target
        if not isinstance(target, UCQ):
            raise InputError("relational bounds need relational mappings")
        atom_bound += max(len(d.atoms) for d in target.disjuncts)
        disjunct_bound += len(target.disjuncts)
    arities = [instance.symbols[n].arity for n in instance.source_names] or [2]
    target_arities = [instance.symbols[n].arity for n in instance.target_names] or [2]
    variable_bound = max(arities) + atom_bound * max(target_arities)
    return SynthesisBounds(atom_bound, disjunct_bound, variable_bound)


def _head_patterns(arity: int) -> list[tuple[str, ...]]:
    """Canonical head tuples, repeats included (restricted-growth strings)."""
    patterns: list[tuple[str, ...]] = []

    def grow(prefix: list[int], used: int):
        if len(prefix) == arity:
            patterns.append(tuple(f"h{i}" for i in prefix))
            return
        for nxt in range(used + 1):
            grow(prefix + [nxt], max(used, nxt + 1))

    grow([], 0)
    return patterns


def _canonical_existentials(atoms: tuple[Atom, ...], head_vars: set[str]):
    """Canonical form: least sorted atom tuple over existential renamings."""
    existentials = sorted(
        {v for a in atoms for v in a.args if v not in head_vars}
    )
    if not existentials:
        return atoms
    best = None
    names = [f"e{i}" for i in range(len(existentials))]
    for perm in itertools.permutations(names):
        rename = dict(zip(existentials, perm))
        candidate = tuple(
            sorted(
                Atom(a.pred, tuple(rename.get(v, v) for v in a.args))
                for a in atoms
            )
        )
        if best is None or candidate < best:
            best = candidate
    return best


def enumerate_view_candidates(
    arity: int,
    target_schema: dict[str, int],
    bounds: SynthesisBounds,
) -> list[CQ]:
    """All canonical candidate CQ views for one source predicate."""
    max_arity = max(target_schema.values(), default=2)
    candidates: set[CQ] = set()
    for head in _head_patterns(arity):
        head_vars = sorted(set(head))
        n_exist = max(
            0,
            min(bounds.variable_bound, bounds.atom_bound * max_arity) - len(head_vars),
        )
        pool = head_vars + [f"e{i}" for i in range(n_exist)]
        universe = sorted(
            Atom(pred, args)
            for pred in sorted(target_schema)
            for args in itertools.product(pool, repeat=target_schema[pred])
        )
        for n_atoms in range(1, bounds.atom_bound + 1):
            for body in itertools.combinations(universe, n_atoms):
                body_vars = {v for a in body for v in a.args}
                if not set(head_vars) <= body_vars:
                    continue
                canon = _canonical_existentials(tuple(body), set(head_vars))
                candidates.add(CQ(head, canon))
    return sorted(candidates, key=lambda c: (len(c.atoms), c.render()))


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------

@dataclass
class CqMappingCheck:
    contained: bool
    nonempty: bool
    n_disjuncts: int
    reverse_contained: "bool | None" = None

    def ok(self, mode: str) -> bool:
        good = self.contained and self.nonempty
        if mode == "exact":
            good = good and bool(self.reverse_contained)
        return good

    def to_json(self, mode: str):
        out = {
            "contained": self.contained,
            "nonempty": self.nonempty,
            "disjuncts": self.n_disjuncts,
        }
        if mode == "exact":
            out["reverse_contained"] = self.reverse_contained
        return out


@dataclass
class CqStats:
    mode: str
    view_kind: str
    candidates_per_symbol: dict[str, int] = field(default_factory=dict)
    checks: int = 0
    elapsed: float = 0.0

    def to_json(self):
        return {
            "mode": self.mode,
            "view_kind": self.view_kind,
            "candidates_per_symbol": dict(sorted(self.candidates_per_symbol.items())),
        }


@dataclass
class CqSynthesisReport:
    outcome: str
    views: "CqViews | None"
    checks: "list[CqMappingCheck] | None"
    bounds: SynthesisBounds
    stats: CqStats
    all_views: "list[CqViews] | None" = None

    @property
    def found(self) -> bool:
        return self.outcome == "found"

    def to_json(self):
        def render(views):
            return {
                sym: (v.render() if v is not None else "undefined")
                for sym, v in sorted(views.items())
            }

        out = {
            "outcome": self.outcome,
            "views": render(self.views) if self.views is not None else None,
            "checks": [c.to_json(self.stats.mode) for c in self.checks]
            if self.checks
            else None,
            "bounds": self.bounds.to_json(),
            "statistics": self.stats.to_json(),
        }
        if self.all_views is not None:
            out["all_views"] = [render(v) for v in self.all_views]
        return out


def capture_check_cq(
    instance: ProblemInstance, views: CqViews, mode: "str | None" = None
) -> list[CqMappingCheck]:
    """Per-mapping capture records for relational instances."""
    if instance.kind not in ("cq", "ucq"):
        raise InputError("capture_check_cq handles relational instances only")
    mode = mode or instance.mode
    source_preds = set(instance.source_names)
    records = []
    for m in instance.mappings:
        distributed = cq_substitute(m.source, views, source_preds)
        contained = ucq_contains(distributed, m.target)
        record = CqMappingCheck(
            contained=contained,
            nonempty=bool(distributed),
            n_disjuncts=len(distributed),
        )
        if mode == "exact":
            record.reverse_contained = bool(distributed) and ucq_contains(
                m.target, UCQ(tuple(distributed))
            )
        records.append(record)
    return records


def synthesize_cq(
    instance: ProblemInstance,
    mode: "str | None" = None,
    view_kind: str = "cq",
    budget: int = DEFAULT_CQ_BUDGET,
    find_all: bool = False,
) -> CqSynthesisReport:
    """Search candidate views in canonical order; first passing wins.

    ``view_kind`` selects single-CQ or UCQ views.  For sound existence the
    two agree (a capturing UCQ view thins to one of its disjuncts); exact
    existence genuinely differs.  The search per symbol starts from the
    undefined view, then candidates that are locally sound (containment
    holds with all other symbols undefined; a violation there survives any
    extension, so the filter is lossless).  With ``find_all`` every passing
    assignment is collected, subject to the budget.
    """
    if instance.kind not in ("cq", "ucq"):
        raise InputError(f"synthesize_cq supports cq/ucq instances, not {instance.kind}")
    if view_kind not in ("cq", "ucq"):
        raise InputError(f"unknown view kind {view_kind!r}")
    mode = mode or instance.mode
    started = time.monotonic()
    bounds = bounds_for(instance)
    stats = CqStats(mode=mode, view_kind=view_kind)
    source_preds = set(instance.source_names)
    occurring = instance.occurring_source_symbols()
    target_schema = {n: instance.symbols[n].arity for n in instance.target_names}

    def spend(n: int = 1):
        stats.checks += n
        if stats.checks > budget:
            raise BudgetExceeded("candidate view search", budget)

    def sound_prefix_ok(partial: CqViews) -> bool:
        views = {sym: partial.get(sym) for sym in occurring}
        for m in instance.mappings:
            spend()
            if not ucq_contains(cq_substitute(m.source, views, source_preds), m.target):
                return False
        return True

    def full_check(assignment: CqViews) -> "list[CqMappingCheck] | None":
        spend()
        records = capture_check_cq(instance, assignment, mode)
        return records if all(r.ok(mode) for r in records) else None

    # per-symbol candidates, locally filtered
    options: dict[str, list[CqView]] = {}
    for sym in occurring:
        singles = enumerate_view_candidates(
            instance.symbols[sym].arity, target_schema, bounds
        )
        plausible = [v for v in singles if sound_prefix_ok({sym: v})]
        opts: list[CqView] = [None]
        if view_kind == "cq":
            opts.extend(plausible)
        else:
            for size in range(1, bounds.disjunct_bound + 1):
                for combo in itertools.combinations(plausible, size):
                    view = combo[0] if size == 1 else UCQ(combo)
                    if size == 1 or sound_prefix_ok({sym: view}):
                        opts.append(view)
        options[sym] = opts
        stats.candidates_per_symbol[sym] = len(opts)

    def dfs(depth: int, partial: CqViews):
        if depth == len(occurring):
            assignment = {sym: partial.get(sym) for sym in occurring}
            records = full_check(assignment)
            if records is not None:
                yield assignment, records
            return
        sym = occurring[depth]
        for view in options[sym]:
            partial[sym] = view
            if depth + 1 == len(occurring) or sound_prefix_ok(partial):
                yield from dfs(depth + 1, partial)
            del partial[sym]

    solutions = []
    for solution in dfs(0, {}):
        solutions.append(solution)
        if not find_all:
            break
    stats.elapsed = time.monotonic() - started
    if not solutions:
        return CqSynthesisReport("not-found", None, None, bounds, stats)
    assignment, records = solutions[0]
    report = CqSynthesisReport("found", assignment, records, bounds, stats)
    if find_all:
        report.all_views = [views for views, _ in solutions]
    return report
