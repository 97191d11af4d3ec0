"""Parsers for instance files, queries, and views files.

The instance grammar is line-oriented; ``#`` starts a comment.  Keywords:

    kind   rpq | 2rpq | cq | ucq
    mode   sound | exact            (optional, default sound)
    source NAME ...                 (path kinds)   /  NAME/ARITY ... (cq, ucq)
    target NAME ...
    map    QUERY ~> QUERY

Regex operators: ``.`` or juxtaposition for concatenation, ``|`` or ``+``
for union, ``*`` for iteration, ``eps`` / ``empty`` for the unit and zero
languages.  In 2rpq instances a symbol may carry the inverse suffix ``^-``.
CQs are written ``q(x,y) :- r(x,z), s(z,y)``; ``;`` separates UCQ disjuncts.

Views files hold lines ``view NAME = REGEX|CQ|empty``.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .model import (
    EMPTY,
    EPS,
    KINDS,
    PATH_KINDS,
    Atom,
    CQ,
    Mapping,
    ProblemInstance,
    Query,
    RSym,
    Regex,
    SymbolId,
    UCQ,
    base_label,
    is_inverse,
    ralt,
    rcat,
    rstar,
)

_IDENT = re.compile(r"[A-Za-z0-9_]+")
_REGEX_TOKEN = re.compile(r"\s*(?:([A-Za-z0-9_]+(?:\^-)?)|([.|+*()]))")
_CQ_TOKEN = re.compile(r"\s*(?:([A-Za-z0-9_]+)|(:-)|([(),]))")


class _Tokens:
    """A token stream with position tracking for error messages."""

    def __init__(self, text: str, pattern: re.Pattern, line: int | None):
        self.text = text
        self.line = line
        self.items: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = pattern.match(text, pos)
            if m is None:
                if text[pos:].strip() == "":
                    break
                raise ParseError(f"unexpected character {text[pos:].strip()[0]!r}", line, pos + 1)
            tok = next(g for g in m.groups() if g is not None)
            self.items.append((tok, m.start(1) if m.lastindex else m.start()))
            pos = m.end()
        self.i = 0

    def peek(self) -> str | None:
        return self.items[self.i][0] if self.i < len(self.items) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.line)
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}", self.line, self.column())

    def column(self) -> int:
        idx = min(self.i, len(self.items) - 1)
        return self.items[idx][1] + 1 if self.items else 1

    def done(self) -> bool:
        return self.i >= len(self.items)


# ---------------------------------------------------------------------------
# Regexes
# ---------------------------------------------------------------------------

def parse_regex(
    text: str,
    alphabet: set[str] | None = None,
    *,
    two_way: bool = False,
    line: int | None = None,
) -> Regex:
    """Parse a path query.

    ``alphabet`` is the set of declared base symbol names; ``None`` accepts
    any identifier (used by the CLI ``contain`` command, which infers the
    alphabet from the queries themselves).
    """
    toks = _Tokens(text, _REGEX_TOKEN, line)
    node = _parse_union(toks, alphabet, two_way)
    if not toks.done():
        raise ParseError(f"trailing input {toks.peek()!r}", line, toks.column())
    return node


def _parse_union(toks, alphabet, two_way) -> Regex:
    parts = [_parse_concat(toks, alphabet, two_way)]
    while toks.peek() in ("|", "+"):
        toks.next()
        parts.append(_parse_concat(toks, alphabet, two_way))
    return ralt(parts)


def _parse_concat(toks, alphabet, two_way) -> Regex:
    parts = [_parse_star(toks, alphabet, two_way)]
    while True:
        nxt = toks.peek()
        if nxt == ".":
            toks.next()
            parts.append(_parse_star(toks, alphabet, two_way))
        elif nxt is not None and nxt not in ("|", "+", ")", "*", "."):
            # juxtaposition: "a b^- b c"
            parts.append(_parse_star(toks, alphabet, two_way))
        else:
            break
    return rcat(parts)


def _parse_star(toks, alphabet, two_way) -> Regex:
    node = _parse_atom(toks, alphabet, two_way)
    while toks.peek() == "*":
        toks.next()
        node = rstar(node)
    return node


def _parse_atom(toks, alphabet, two_way) -> Regex:
    tok = toks.next()
    if tok == "(":
        node = _parse_union(toks, alphabet, two_way)
        toks.expect(")")
        return node
    if tok in (".", "|", "+", "*", ")"):
        raise ParseError(f"unexpected {tok!r}", toks.line, toks.column())
    if tok == "eps":
        return EPS
    if tok == "empty":
        return EMPTY
    if is_inverse(tok) and not two_way:
        raise ParseError(f"inverse symbol {tok!r} outside a 2rpq instance", toks.line)
    if alphabet is not None and base_label(tok) not in alphabet:
        raise ParseError(f"undeclared symbol {base_label(tok)!r}", toks.line)
    return RSym(tok)


# ---------------------------------------------------------------------------
# Conjunctive queries
# ---------------------------------------------------------------------------

def parse_cq(
    text: str,
    schema: dict[str, int] | None = None,
    *,
    line: int | None = None,
) -> CQ:
    """Parse one rule ``q(x,y) :- r(x,z), s(z,y)``.

    ``schema`` maps declared predicate names to arities; ``None`` accepts any.
    """
    toks = _Tokens(text, _CQ_TOKEN, line)
    cq = _parse_rule(toks, schema)
    if not toks.done():
        raise ParseError(f"trailing input {toks.peek()!r}", line, toks.column())
    return cq


def parse_ucq(
    text: str,
    schema: dict[str, int] | None = None,
    *,
    line: int | None = None,
) -> UCQ:
    """Parse ``;``-separated rules into a UCQ."""
    disjuncts = []
    for part in text.split(";"):
        if part.strip() == "":
            raise ParseError("empty disjunct", line)
        disjuncts.append(parse_cq(part, schema, line=line))
    ucq = UCQ(tuple(disjuncts))
    return ucq


def _parse_rule(toks: _Tokens, schema) -> CQ:
    toks.next()  # head predicate name, irrelevant
    head = _parse_term_list(toks)
    toks.expect(":-")
    atoms = [_parse_atom_cq(toks, schema)]
    while toks.peek() == ",":
        toks.next()
        atoms.append(_parse_atom_cq(toks, schema))
    cq = CQ(tuple(head), tuple(atoms))
    cq.validate()
    return cq


def _parse_term_list(toks: _Tokens) -> list[str]:
    toks.expect("(")
    terms = [toks.next()]
    while toks.peek() == ",":
        toks.next()
        terms.append(toks.next())
    toks.expect(")")
    for t in terms:
        if not _IDENT.fullmatch(t):
            raise ParseError(f"bad term {t!r}", toks.line)
    return terms


def _parse_atom_cq(toks: _Tokens, schema) -> Atom:
    pred = toks.next()
    if not _IDENT.fullmatch(pred):
        raise ParseError(f"bad predicate {pred!r}", toks.line)
    args = _parse_term_list(toks)
    if schema is not None:
        if pred not in schema:
            raise ParseError(f"undeclared symbol {pred!r}", toks.line)
        if schema[pred] != len(args):
            raise ParseError(
                f"arity mismatch: {pred} declared /{schema[pred]}, used /{len(args)}",
                toks.line,
            )
    return Atom(pred, tuple(args))


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------

def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_instance(text: str) -> ProblemInstance:
    """Parse an instance file into a :class:`ProblemInstance`."""
    kind: str | None = None
    mode = "sound"
    symbols: dict[str, SymbolId] = {}
    map_lines: list[tuple[int, str]] = []

    for lineno, line in _content_lines(text):
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "kind":
            if rest not in KINDS:
                raise ParseError(f"unknown kind {rest!r}", lineno)
            if kind is not None and rest != kind:
                raise ParseError("kind declared twice", lineno)
            kind = rest
        elif keyword == "mode":
            if rest not in ("sound", "exact"):
                raise ParseError(f"unknown mode {rest!r}", lineno)
            mode = rest
        elif keyword in ("source", "target"):
            if kind is None:
                raise ParseError("kind must be declared before symbols", lineno)
            for decl in rest.split():
                sym = _parse_symbol_decl(decl, keyword, kind, lineno)
                if sym.name in symbols:
                    raise ParseError(f"symbol {sym.name!r} declared twice", lineno)
                symbols[sym.name] = sym
        elif keyword == "map":
            map_lines.append((lineno, rest))
        else:
            raise ParseError(f"unknown keyword {keyword!r}", lineno)

    if kind is None:
        raise ParseError("missing kind declaration")
    if not map_lines:
        raise ParseError("instance declares no mappings")

    mappings = tuple(
        _parse_mapping(rest, kind, symbols, lineno) for lineno, rest in map_lines
    )
    return ProblemInstance(kind=kind, symbols=symbols, mappings=mappings, mode=mode)


def _parse_symbol_decl(decl: str, side: str, kind: str, lineno: int) -> SymbolId:
    name, slash, arity_text = decl.partition("/")
    if kind in PATH_KINDS:
        if slash:
            raise ParseError(f"path symbols take no arity: {decl!r}", lineno)
        arity = 2
    else:
        if not slash:
            raise ParseError(f"relational symbols need an arity: {decl!r}", lineno)
        if not arity_text.isdigit() or int(arity_text) < 1:
            raise ParseError(f"bad arity in {decl!r}", lineno)
        arity = int(arity_text)
    if not _IDENT.fullmatch(name):
        raise ParseError(f"bad symbol name {name!r}", lineno)
    return SymbolId(name=name, kind=side, arity=arity)


def _parse_mapping(text: str, kind: str, symbols: dict[str, SymbolId], lineno: int) -> Mapping:
    if "~>" not in text:
        raise ParseError("a mapping needs '~>'", lineno)
    src_text, _, tgt_text = text.partition("~>")
    source_names = {n for n, s in symbols.items() if s.kind == "source"}
    target_names = {n for n, s in symbols.items() if s.kind == "target"}

    if kind in PATH_KINDS:
        two_way = kind == "2rpq"
        both = source_names | target_names
        src = parse_regex(src_text, both, two_way=two_way, line=lineno)
        tgt = parse_regex(tgt_text, both, two_way=two_way, line=lineno)
        _check_target_only(tgt, source_names, lineno)
        return Mapping(source=src, target=tgt)

    schema_both = {n: s.arity for n, s in symbols.items()}
    schema_tgt = {n: s.arity for n, s in symbols.items() if s.kind == "target"}
    src = parse_ucq(src_text, schema_both, line=lineno)
    try:
        tgt = parse_ucq(tgt_text, schema_tgt, line=lineno)
    except ParseError as exc:
        if "undeclared" in str(exc) and any(n in tgt_text for n in source_names):
            raise ParseError("source symbol used in a target query", lineno) from exc
        raise
    if kind == "cq":
        for q in (src, tgt):
            if len(q.disjuncts) != 1:
                raise ParseError("kind cq admits single-disjunct queries only", lineno)
    if len(src.disjuncts[0].head) != len(tgt.disjuncts[0].head):
        raise ParseError("source and target queries disagree on head arity", lineno)
    return Mapping(source=src, target=tgt)


def _check_target_only(node: Regex, source_names: set[str], lineno: int) -> None:
    for label in node.symbols():
        if base_label(label) in source_names:
            raise ParseError(
                f"source symbol {base_label(label)!r} used in a target query", lineno
            )


# ---------------------------------------------------------------------------
# Views files
# ---------------------------------------------------------------------------

def parse_views(text: str, instance: ProblemInstance) -> dict[str, Query | None]:
    """Parse ``view NAME = ...`` lines.

    Returns a map from source symbol to a query over the target alphabet,
    or ``None`` for the reserved token ``empty``.
    """
    out: dict[str, Query | None] = {}
    target_names = set(instance.target_names)
    schema_tgt = {n: instance.symbols[n].arity for n in target_names}
    for lineno, line in _content_lines(text):
        keyword, _, rest = line.partition(" ")
        if keyword != "view":
            raise ParseError(f"unknown keyword {keyword!r} in views file", lineno)
        name, eq, body = rest.partition("=")
        name = name.strip()
        body = body.strip()
        if not eq or not body:
            raise ParseError("a view line reads 'view NAME = QUERY'", lineno)
        if name not in instance.symbols or instance.symbols[name].kind != "source":
            raise ParseError(f"view for undeclared source symbol {name!r}", lineno)
        if name in out:
            raise ParseError(f"view for {name!r} defined twice", lineno)
        if body == "empty":
            out[name] = None
        elif instance.kind in PATH_KINDS:
            out[name] = parse_regex(
                body, target_names, two_way=instance.kind == "2rpq", line=lineno
            )
        else:
            view = parse_ucq(body, schema_tgt, line=lineno)
            if view.arity != instance.symbols[name].arity:
                raise ParseError(
                    f"view head arity {view.arity} does not match {name}/"
                    f"{instance.symbols[name].arity}",
                    lineno,
                )
            out[name] = view
    return out
