"""One-way finite word automata and the algebra used by synthesis.

NWAs are immutable after construction; every operation below is a pure
function, so automata can be shared freely across threads.  Epsilon
transitions (label ``None``) are permitted during construction and removed
by :func:`eliminate_epsilon`; the product/determinization/monoid code
requires epsilon-free input and calls it as needed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import CapExceeded, InputError
from .model import (
    EPS,
    EMPTY,
    RAlt,
    RCat,
    REmpty,
    REps,
    RStar,
    RSym,
    Regex,
    Word,
    ralt,
    rcat,
    rstar,
)

DEFAULT_DET_CAP = 100_000

Transition = tuple[int, "str | None", int]


class NWA:
    """A nondeterministic word automaton with dense integer states.

    Multiple initial states are allowed internally; exports that need a
    single initial state go through :meth:`with_single_initial`.
    """

    __slots__ = ("n_states", "alphabet", "initials", "finals", "transitions", "_step")

    def __init__(self, n_states, alphabet, initials, finals, transitions):
        self.n_states = int(n_states)
        self.alphabet = frozenset(alphabet)
        self.initials = frozenset(initials)
        self.finals = frozenset(finals)
        self.transitions = frozenset(transitions)
        for p, a, q in self.transitions:
            if not (0 <= p < self.n_states and 0 <= q < self.n_states):
                raise InputError(f"transition ({p},{a},{q}) leaves the state range")
            if a is not None and a not in self.alphabet:
                raise InputError(f"transition label {a!r} outside the alphabet")
        for s in self.initials | self.finals:
            if not 0 <= s < self.n_states:
                raise InputError(f"state {s} out of range")
        step: dict[tuple[int, str | None], set[int]] = {}
        for p, a, q in self.transitions:
            step.setdefault((p, a), set()).add(q)
        self._step = {k: frozenset(v) for k, v in step.items()}

    def step(self, state: int, label: "str | None") -> frozenset[int]:
        return self._step.get((state, label), frozenset())

    def step_set(self, states, label) -> frozenset[int]:
        out: set[int] = set()
        for s in states:
            out |= self.step(s, label)
        return frozenset(out)

    @property
    def has_epsilon(self) -> bool:
        return any(a is None for _, a, _ in self.transitions)

    def labels_present(self) -> frozenset[str]:
        return frozenset(a for _, a, _ in self.transitions if a is not None)

    def with_single_initial(self) -> "NWA":
        """The same language with exactly one initial state (for export)."""
        if len(self.initials) == 1:
            return self
        fresh = self.n_states
        extra = {(fresh, None, i) for i in self.initials}
        return NWA(
            self.n_states + 1,
            self.alphabet,
            {fresh},
            self.finals,
            set(self.transitions) | extra,
        )

    def to_json(self):
        one = self.with_single_initial()
        return {
            "states": one.n_states,
            "alphabet": sorted(one.alphabet),
            "initial": min(one.initials),
            "finals": sorted(one.finals),
            "transitions": sorted(
                [p, a if a is not None else "", q] for p, a, q in one.transitions
            ),
        }

    def __repr__(self):
        return (
            f"NWA(states={self.n_states}, |transitions|={len(self.transitions)}, "
            f"initials={sorted(self.initials)}, finals={sorted(self.finals)})"
        )


@dataclass(frozen=True)
class DWA:
    """A complete deterministic word automaton."""

    n_states: int
    alphabet: frozenset[str]
    initial: int
    delta: dict[tuple[int, str], int]
    finals: frozenset[int]

    def is_complete(self) -> bool:
        return all(
            (s, a) in self.delta for s in range(self.n_states) for a in self.alphabet
        )

    def as_nwa(self) -> NWA:
        return NWA(
            self.n_states,
            self.alphabet,
            {self.initial},
            self.finals,
            {(p, a, q) for (p, a), q in self.delta.items()},
        )

    def accepts(self, word: Word) -> bool:
        state = self.initial
        for a in word:
            state = self.delta[(state, a)]
        return state in self.finals


# ---------------------------------------------------------------------------
# Regex -> NWA (position/Glushkov construction: epsilon-free, lean)
# ---------------------------------------------------------------------------

def compile_regex(regex: Regex, alphabet=None) -> NWA:
    """Compile a regex into an epsilon-free NWA with |occurrences|+1 states."""
    positions: list[str] = []

    def walk(node: Regex):
        # returns (nullable, first, last, follow-pairs)
        if isinstance(node, REmpty):
            return False, set(), set(), set()
        if isinstance(node, REps):
            return True, set(), set(), set()
        if isinstance(node, RSym):
            positions.append(node.label)
            p = len(positions)  # states are 1-based; 0 is the start state
            return False, {p}, {p}, set()
        if isinstance(node, RCat):
            nullable, first, last, follow = True, set(), set(), set()
            for part in node.parts:
                n2, f2, l2, fo2 = walk(part)
                follow |= fo2 | {(x, y) for x in last for y in f2}
                if nullable:
                    first |= f2
                last = l2 | (last if n2 else set())
                nullable = nullable and n2
            return nullable, first, last, follow
        if isinstance(node, RAlt):
            nullable, first, last, follow = False, set(), set(), set()
            for part in node.parts:
                n2, f2, l2, fo2 = walk(part)
                nullable = nullable or n2
                first |= f2
                last |= l2
                follow |= fo2
            return nullable, first, last, follow
        if isinstance(node, RStar):
            _, first, last, follow = walk(node.inner)
            follow = follow | {(x, y) for x in last for y in first}
            return True, first, last, follow
        raise TypeError(f"not a regex node: {node!r}")

    nullable, first, last, follow = walk(regex)
    labels = set(positions) if alphabet is None else set(alphabet)
    labels |= set(positions)
    transitions = {(0, positions[p - 1], p) for p in first}
    transitions |= {(x, positions[y - 1], y) for x, y in follow}
    finals = set(last) | ({0} if nullable else set())
    return NWA(len(positions) + 1, labels, {0}, finals, transitions)


# ---------------------------------------------------------------------------
# Basic algebra
# ---------------------------------------------------------------------------

def eliminate_epsilon(a: NWA) -> NWA:
    """An equivalent NWA without epsilon transitions."""
    if not a.has_epsilon:
        return a
    closure: list[frozenset[int]] = []
    for s in range(a.n_states):
        seen = {s}
        stack = [s]
        while stack:
            for t in a.step(stack.pop(), None):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        closure.append(frozenset(seen))
    transitions = set()
    for p in range(a.n_states):
        for q in closure[p]:
            for (src, label), dsts in a._step.items():
                if src == q and label is not None:
                    for d in dsts:
                        transitions.add((p, label, d))
    finals = {s for s in range(a.n_states) if closure[s] & a.finals}
    return NWA(a.n_states, a.alphabet, a.initials, finals, transitions)


def trim(a: NWA) -> NWA:
    """Restrict to states both reachable and co-reachable, renumbered densely."""
    fwd = _reachable(a, a.initials, forward=True)
    bwd = _reachable(a, a.finals, forward=False)
    keep = sorted(fwd & bwd)
    if not keep:
        return NWA(1, a.alphabet, {0}, set(), set())
    renum = {s: i for i, s in enumerate(keep)}
    return NWA(
        len(keep),
        a.alphabet,
        {renum[s] for s in a.initials if s in renum},
        {renum[s] for s in a.finals if s in renum},
        {
            (renum[p], x, renum[q])
            for p, x, q in a.transitions
            if p in renum and q in renum
        },
    )


def _reachable(a: NWA, seeds, forward: bool) -> set[int]:
    adj: dict[int, set[int]] = {}
    for p, _, q in a.transitions:
        src, dst = (p, q) if forward else (q, p)
        adj.setdefault(src, set()).add(dst)
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        for t in adj.get(stack.pop(), ()):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def product(a: NWA, b: NWA, alphabet=None) -> NWA:
    """Intersection of two languages over the shared alphabet."""
    a = eliminate_epsilon(a)
    b = eliminate_epsilon(b)
    labels = frozenset(alphabet) if alphabet is not None else a.alphabet | b.alphabet
    index: dict[tuple[int, int], int] = {}
    transitions = set()
    queue: deque[tuple[int, int]] = deque()

    def intern(pair):
        if pair not in index:
            index[pair] = len(index)
            queue.append(pair)
        return index[pair]

    for p in sorted(a.initials):
        for q in sorted(b.initials):
            intern((p, q))
    initials = set(index.values())
    while queue:
        p, q = queue.popleft()
        src = index[(p, q)]
        for label in sorted(labels):
            for p2 in sorted(a.step(p, label)):
                for q2 in sorted(b.step(q, label)):
                    transitions.add((src, label, intern((p2, q2))))
    finals = {i for (p, q), i in index.items() if p in a.finals and q in b.finals}
    return NWA(max(len(index), 1), labels, initials, finals, transitions)


def determinize(a: NWA, cap: int = DEFAULT_DET_CAP, alphabet=None) -> DWA:
    """Subset construction; the result is complete (a sink is added as needed).

    Raises :class:`CapExceeded` when more than ``cap`` subset states appear.
    """
    if cap <= 0:
        raise InputError("determinization cap must be positive")
    a = eliminate_epsilon(a)
    labels = sorted(frozenset(alphabet) if alphabet is not None else a.alphabet)
    start = frozenset(a.initials)
    index: dict[frozenset[int], int] = {start: 0}
    delta: dict[tuple[int, str], int] = {}
    finals: set[int] = set()
    queue: deque[frozenset[int]] = deque([start])
    while queue:
        subset = queue.popleft()
        src = index[subset]
        if subset & a.finals:
            finals.add(src)
        for label in labels:
            nxt = a.step_set(subset, label)
            if nxt not in index:
                if len(index) >= cap:
                    raise CapExceeded("determinization", cap)
                index[nxt] = len(index)
                queue.append(nxt)
            delta[(src, label)] = index[nxt]
    return DWA(len(index), frozenset(labels), 0, delta, frozenset(finals))


def complement(d: DWA) -> DWA:
    """Complement of a complete DWA over its own alphabet."""
    if not d.is_complete():
        raise InputError("complement requires a complete DWA")
    return DWA(
        d.n_states,
        d.alphabet,
        d.initial,
        d.delta,
        frozenset(range(d.n_states)) - d.finals,
    )


def accepts(a: NWA, word: Word) -> bool:
    a = eliminate_epsilon(a)
    current = frozenset(a.initials)
    for label in word:
        current = a.step_set(current, label)
        if not current:
            return False
    return bool(current & a.finals)


def is_empty(a: NWA) -> tuple[bool, Word | None]:
    """Emptiness with a shortest witness (lexicographically least among them)."""
    a = eliminate_epsilon(a)
    parent: dict[int, tuple[int, str] | None] = {}
    queue: deque[int] = deque()
    for s in sorted(a.initials):
        parent[s] = None
        queue.append(s)
    hit = next((s for s in sorted(a.initials) if s in a.finals), None)
    while queue and hit is None:
        p = queue.popleft()
        for label in sorted(a.labels_present()):
            for q in sorted(a.step(p, label)):
                if q not in parent:
                    parent[q] = (p, label)
                    if q in a.finals:
                        hit = q
                        queue.clear()
                        break
                    queue.append(q)
            if hit is not None:
                break
    if hit is None:
        return True, None
    word: list[str] = []
    state = hit
    while parent[state] is not None:
        state, label = parent[state]
        word.append(label)
    return False, tuple(reversed(word))


def difference_witness(
    a: NWA, b: NWA, cap: int = DEFAULT_DET_CAP
) -> Word | None:
    """A shortest word in L(a) \\ L(b), or ``None`` when L(a) is contained in L(b)."""
    labels = a.alphabet | b.alphabet
    comp = complement(determinize(b, cap=cap, alphabet=labels)).as_nwa()
    empty, witness = is_empty(product(a, comp, alphabet=labels))
    return None if empty else witness


def contains(a: NWA, b: NWA, cap: int = DEFAULT_DET_CAP) -> bool:
    """L(a) included in L(b), via emptiness of a x complement(det(b))."""
    return difference_witness(a, b, cap=cap) is None


def equivalent(a: NWA, b: NWA, cap: int = DEFAULT_DET_CAP) -> bool:
    return contains(a, b, cap=cap) and contains(b, a, cap=cap)


# ---------------------------------------------------------------------------
# Substitution of source symbols by view automata
# ---------------------------------------------------------------------------

def substitute(
    a: NWA,
    views: dict[str, "NWA | None"],
    source_symbols,
    target_alphabet=None,
) -> NWA:
    """Replace every transition labeled by a source symbol with its view.

    A view of ``None`` (the empty query) deletes the transition; otherwise a
    fresh copy of the view automaton is spliced between the endpoints with
    epsilon transitions, which are eliminated afterwards.  Transitions over
    target symbols pass through unchanged.
    """
    source_symbols = set(source_symbols)
    occurring = a.labels_present() & source_symbols
    missing = occurring - set(views)
    if missing:
        raise InputError(f"no view assigned for occurring source symbol(s) {sorted(missing)}")

    labels: set[str] = set(a.alphabet - source_symbols)
    if target_alphabet is not None:
        labels |= set(target_alphabet)
    transitions: set[Transition] = set()
    n = a.n_states
    for p, x, q in a.transitions:
        if x not in source_symbols:
            transitions.add((p, x, q))
            continue
        view = views[x]
        if view is None:
            continue
        view = eliminate_epsilon(view)
        labels |= view.alphabet
        offset = n
        n += view.n_states
        for vp, vx, vq in view.transitions:
            transitions.add((vp + offset, vx, vq + offset))
        for i in view.initials:
            transitions.add((p, None, i + offset))
        for f in view.finals:
            transitions.add((f + offset, None, q))
    spliced = NWA(n, labels, a.initials, a.finals, transitions)
    return trim(eliminate_epsilon(spliced))


# ---------------------------------------------------------------------------
# NWA -> regex (state elimination) and DOT export
# ---------------------------------------------------------------------------

def nwa_to_regex(a: NWA) -> Regex:
    """A regex denoting exactly L(a), by state elimination."""
    a = trim(eliminate_epsilon(a))
    empty, _ = is_empty(a)
    if empty:
        return EMPTY
    start, end = a.n_states, a.n_states + 1
    edges: dict[tuple[int, int], Regex] = {}

    def add(p, q, r):
        if isinstance(r, REmpty):
            return
        edges[(p, q)] = ralt([edges[(p, q)], r]) if (p, q) in edges else r

    for p, x, q in a.transitions:
        add(p, q, RSym(x))
    for i in a.initials:
        add(start, i, EPS)
    for f in a.finals:
        add(f, end, EPS)

    for s in range(a.n_states):
        loop = edges.pop((s, s), None)
        loop_part = rstar(loop) if loop is not None else EPS
        ins = [(p, r) for (p, q), r in edges.items() if q == s]
        outs = [(q, r) for (p, q), r in edges.items() if p == s]
        for p, rin in ins:
            for q, rout in outs:
                add(p, q, rcat([rin, loop_part, rout]))
        for key in [k for k in edges if s in k]:
            edges.pop(key, None)

    return edges.get((start, end), EMPTY)


def to_dot(a: NWA, name: str = "nwa") -> str:
    """GraphViz rendering for debugging."""
    a = a.with_single_initial()
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  hidden [shape=point, label=""];']
    for s in range(a.n_states):
        shape = "doublecircle" if s in a.finals else "circle"
        lines.append(f'  q{s} [shape={shape}, label="{s}"];')
    for i in sorted(a.initials):
        lines.append(f"  hidden -> q{i};")
    grouped: dict[tuple[int, int], list[str]] = {}
    for p, x, q in sorted(a.transitions, key=lambda t: (t[0], t[2], str(t[1]))):
        grouped.setdefault((p, q), []).append("ε" if x is None else x)
    for (p, q), labels in sorted(grouped.items()):
        label = ",".join(labels)
        lines.append(f'  q{p} -> q{q} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)


def union_nwa(automata: list[NWA], alphabet=None) -> NWA:
    """Disjoint union: accepts the union of the languages."""
    if not automata:
        return NWA(1, alphabet or (), {0}, set(), set())
    labels = set(alphabet) if alphabet is not None else set()
    for m in automata:
        labels |= m.alphabet
    n = 0
    initials, finals, transitions = set(), set(), set()
    for m in automata:
        initials |= {s + n for s in m.initials}
        finals |= {s + n for s in m.finals}
        transitions |= {(p + n, x, q + n) for p, x, q in m.transitions}
        n += m.n_states
    return NWA(n, labels, initials, finals, transitions)


def word_nwa(word: Word, alphabet) -> NWA:
    """The singleton language {word} as a chain automaton."""
    transitions = {(i, a, i + 1) for i, a in enumerate(word)}
    return NWA(len(word) + 1, set(alphabet) | set(word), {0}, {len(word)}, transitions)
