"""Regex-like pattern AST, symbol tokenization, and full-string matching.

Patterns are built from literals, a fixed set of character classes, atomic
mask tokens, disjunctions of literal strings, and one-or-more groups. Values
are matched as sequences of symbols, where a symbol is either a single
character or an atomic mask token.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from functools import lru_cache

MASK_OPEN = "⟦"   # ⟦
MASK_CLOSE = "⟧"  # ⟧

# Fixed class alphabet. Order encodes narrowness for generalization.
CLASS_SETS: dict[str, frozenset[str]] = {
    "binary01": frozenset("01"),
    "digit": frozenset(string.digits),
    "lower": frozenset(string.ascii_lowercase),
    "upper": frozenset(string.ascii_uppercase),
    "letter": frozenset(string.ascii_letters),
    "space": frozenset(" "),
    "alnum": frozenset(string.ascii_letters + string.digits),
    "alnum_space": frozenset(string.ascii_letters + string.digits + " "),
}

CLASS_SYNTAX = {
    "binary01": "[0-1]",
    "digit": "[0-9]",
    "lower": "[a-z]",
    "upper": "[A-Z]",
    "letter": "[a-zA-Z]",
    "space": "␣",
    "alnum": "[0-9a-zA-Z]",
    "alnum_space": "[0-9a-zA-Z ]",
}

_NARROWNESS = ["binary01", "digit", "lower", "upper", "letter", "space", "alnum", "alnum_space"]

_ESCAPED = set("(){}[]|+\\")


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class Literal:
    char: str


@dataclass(frozen=True)
class CharClass:
    name: str


@dataclass(frozen=True)
class MaskToken:
    type_name: str

    @property
    def symbol(self) -> str:
        return MASK_OPEN + self.type_name + MASK_CLOSE


@dataclass(frozen=True)
class Disjunction:
    options: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.options)) != len(self.options) or any(not o for o in self.options):
            raise PatternError("disjunction options must be non-empty and distinct")


@dataclass(frozen=True)
class Group:
    unit: tuple["PatternNode", ...]
    quantifier: str = "one_or_more"  # {"once", "one_or_more"}


@dataclass(frozen=True)
class Sequence:
    parts: tuple["PatternNode", ...]


PatternNode = Literal | CharClass | MaskToken | Disjunction | Group | Sequence


def mask_symbol(type_name: str) -> str:
    return MASK_OPEN + type_name + MASK_CLOSE


def tokenize_symbols(value: str) -> tuple[str, ...]:
    """Split a string into symbols; mask tokens are single symbols."""
    out: list[str] = []
    i = 0
    while i < len(value):
        if value[i] == MASK_OPEN:
            end = value.find(MASK_CLOSE, i + 1)
            if end < 0:
                out.append(value[i])
                i += 1
                continue
            out.append(value[i : end + 1])
            i = end + 1
        else:
            out.append(value[i])
            i += 1
    return tuple(out)


def join_symbols(symbols) -> str:
    return "".join(symbols)


def try_narrowest_class(chars) -> str | None:
    """Narrowest covering class, or None when none covers (punctuation)."""
    cs = set(chars)
    for name in _NARROWNESS:
        if cs <= CLASS_SETS[name]:
            return name
    return None


def narrowest_class(chars) -> str:
    """Narrowest class in the fixed alphabet covering all given characters."""
    name = try_narrowest_class(chars)
    if name is None:
        raise PatternError(f"no character class covers {sorted(set(chars))!r}")
    return name


def widen_class(a: str, b: str) -> str:
    if a == b:
        return a
    return narrowest_class(CLASS_SETS[a] | CLASS_SETS[b])


def symbol_matches(symbol: str, node: PatternNode) -> bool:
    if isinstance(node, Literal):
        return symbol == node.char
    if isinstance(node, CharClass):
        return len(symbol) == 1 and symbol in CLASS_SETS[node.name]
    if isinstance(node, MaskToken):
        return symbol == node.symbol
    return False


def _escape(ch: str) -> str:
    return "\\" + ch if ch in _ESCAPED else ch


def node_to_text(node: PatternNode) -> str:
    if isinstance(node, Literal):
        return "␣" if node.char == " " else _escape(node.char)
    if isinstance(node, CharClass):
        return CLASS_SYNTAX[node.name]
    if isinstance(node, MaskToken):
        return "{" + node.type_name + "}"
    if isinstance(node, Disjunction):
        return "(" + "|".join(node.options) + ")"
    if isinstance(node, Group):
        inner = "".join(node_to_text(n) for n in node.unit)
        return "(" + inner + ")" + ("+" if node.quantifier == "one_or_more" else "")
    if isinstance(node, Sequence):
        return "".join(node_to_text(n) for n in node.parts)
    raise PatternError(f"unknown node {node!r}")


@dataclass
class Pattern:
    """A full-string pattern with its column coverage."""

    root: PatternNode
    coverage: float = 0.0
    id: str = ""
    _nfa: "Nfa | None" = field(default=None, repr=False, compare=False)

    def to_text(self) -> str:
        return node_to_text(self.root)

    @property
    def nfa(self) -> "Nfa":
        if self._nfa is None:
            self._nfa = compile_nfa(self)
        return self._nfa

    def matches(self, value: str) -> bool:
        return self.nfa.accepts(tokenize_symbols(value))

    def matches_symbols(self, symbols) -> bool:
        return self.nfa.accepts(tuple(symbols))


@dataclass
class PatternSet:
    """All learned patterns plus the subset meeting the coverage threshold."""

    all: list[Pattern]
    significant: list[Pattern]
    delta: float


# ---------------------------------------------------------------------------
# NFA compilation (epsilon-free) for matching and cycle inspection.
# ---------------------------------------------------------------------------

# Edge labels: ("lit", symbol) | ("class", name) | ("mask", type_name)
Label = tuple[str, str]


@dataclass(frozen=True)
class NfaEdge:
    src: int
    dst: int
    label: Label
    # Identity of the pattern node this edge derives from, for slot tracking:
    # (node_id, option_index or -1, char_index or -1)
    origin: tuple[int, int, int]


@dataclass
class Nfa:
    n_states: int
    start: int
    accepting: frozenset[int]
    edges: tuple[NfaEdge, ...]
    cycle_lengths: dict[int, int]  # group node_id -> symbols per iteration

    def __post_init__(self):
        out: dict[int, list[NfaEdge]] = {s: [] for s in range(self.n_states)}
        for e in self.edges:
            out[e.src].append(e)
        self._out = out
        self._min_len = None

    def accepts(self, symbols: tuple[str, ...]) -> bool:
        states = {self.start}
        for sym in symbols:
            nxt = set()
            for s in states:
                for e in self._out[s]:
                    if _label_matches(sym, e.label):
                        nxt.add(e.dst)
            if not nxt:
                return False
            states = nxt
        return bool(states & self.accepting)

    def min_accepted_length(self) -> int:
        """Length of the shortest accepted symbol sequence (BFS over states)."""
        if self._min_len is not None:
            return self._min_len
        dist = {self.start: 0}
        frontier = [self.start]
        while frontier:
            nxt = []
            for s in frontier:
                for e in self._out[s]:
                    if e.dst not in dist:
                        dist[e.dst] = dist[s] + 1
                        nxt.append(e.dst)
            frontier = nxt
        best = min((dist[s] for s in self.accepting if s in dist), default=0)
        self._min_len = best
        return best


def _label_matches(symbol: str, label: Label) -> bool:
    kind, arg = label
    if kind == "lit":
        return symbol == arg
    if kind == "class":
        return len(symbol) == 1 and symbol in CLASS_SETS[arg]
    return symbol == MASK_OPEN + arg + MASK_CLOSE


def assign_node_ids(root: PatternNode) -> dict[int, PatternNode]:
    """Preorder ids keyed by position; stable for a given tree shape."""
    table: dict[int, PatternNode] = {}

    def walk(node: PatternNode):
        table[len(table)] = node
        if isinstance(node, Group):
            for child in node.unit:
                walk(child)
        elif isinstance(node, Sequence):
            for child in node.parts:
                walk(child)

    walk(root)
    return table


class _Builder:
    """Thompson construction with epsilon edges, eliminated at the end."""

    def __init__(self):
        self.n = 0
        self.eps: list[tuple[int, int]] = []
        self.sym: list[tuple[int, int, Label, tuple[int, int, int]]] = []

    def state(self) -> int:
        self.n += 1
        return self.n - 1

    def build(self, node: PatternNode, node_id: int, counter: list[int]) -> tuple[int, int]:
        nid = counter[0]
        counter[0] += 1
        if isinstance(node, Literal):
            a, b = self.state(), self.state()
            self.sym.append((a, b, ("lit", node.char), (nid, -1, -1)))
            return a, b
        if isinstance(node, CharClass):
            a, b = self.state(), self.state()
            self.sym.append((a, b, ("class", node.name), (nid, -1, -1)))
            return a, b
        if isinstance(node, MaskToken):
            a, b = self.state(), self.state()
            self.sym.append((a, b, ("mask", node.type_name), (nid, -1, -1)))
            return a, b
        if isinstance(node, Disjunction):
            a, b = self.state(), self.state()
            for oi, opt in enumerate(node.options):
                prev = a
                for ci, ch in enumerate(opt):
                    nxt = b if ci == len(opt) - 1 else self.state()
                    self.sym.append((prev, nxt, ("lit", ch), (nid, oi, ci)))
                    prev = nxt
            return a, b
        if isinstance(node, Group):
            ia, ib = self._chain(node.unit, counter)
            if node.quantifier == "one_or_more":
                self.eps.append((ib, ia))
            return ia, ib
        if isinstance(node, Sequence):
            return self._chain(node.parts, counter)
        raise PatternError(f"unknown node {node!r}")

    def _chain(self, parts, counter) -> tuple[int, int]:
        if not parts:
            a = self.state()
            return a, a
        start = prev = None
        for child in parts:
            ca, cb = self.build(child, 0, counter)
            if start is None:
                start = ca
            else:
                self.eps.append((prev, ca))
            prev = cb
        return start, prev


def _eliminate_epsilon(builder: _Builder, start: int, final: int):
    closure: list[set[int]] = [set([s]) for s in range(builder.n)]
    adj: dict[int, list[int]] = {}
    for a, b in builder.eps:
        adj.setdefault(a, []).append(b)
    for s in range(builder.n):
        stack = [s]
        seen = closure[s]
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    edges = []
    seen_edges = set()
    for s in range(builder.n):
        for u in closure[s]:
            for (a, b, label, origin) in builder.sym:
                if a == u:
                    key = (s, b, label, origin)
                    if key not in seen_edges:
                        seen_edges.add(key)
                        edges.append(key)
    accepting = frozenset(s for s in range(builder.n) if final in closure[s])
    return edges, accepting


def _min_symbols(node: PatternNode) -> int:
    if isinstance(node, (Literal, CharClass, MaskToken)):
        return 1
    if isinstance(node, Disjunction):
        return min(len(o) for o in node.options)
    if isinstance(node, Group):
        return sum(_min_symbols(c) for c in node.unit)
    if isinstance(node, Sequence):
        return sum(_min_symbols(c) for c in node.parts)
    raise PatternError(f"unknown node {node!r}")


def compile_nfa(pattern: Pattern) -> Nfa:
    """Compile to an epsilon-free NFA whose edges consume one symbol each."""
    builder = _Builder()
    counter = [0]
    start, final = builder.build(pattern.root, 0, counter)
    edges, accepting = _eliminate_epsilon(builder, start, final)

    # Renumber reachable states for compactness and determinism.
    order: dict[int, int] = {start: 0}
    frontier = [start]
    adj: dict[int, list[int]] = {}
    for (a, b, _, _) in edges:
        adj.setdefault(a, []).append(b)
    while frontier:
        nxt = []
        for s in frontier:
            for d in sorted(set(adj.get(s, ()))):
                if d not in order:
                    order[d] = len(order)
                    nxt.append(d)
        frontier = nxt
    kept = []
    for (a, b, label, origin) in edges:
        if a in order and b in order:
            kept.append(NfaEdge(order[a], order[b], label, origin))
    kept.sort(key=lambda e: (e.src, e.dst, e.label, e.origin))

    cycles: dict[int, int] = {}
    for node_id, node in assign_node_ids(pattern.root).items():
        if isinstance(node, Group) and node.quantifier == "one_or_more":
            cycles[node_id] = sum(_min_symbols(c) for c in node.unit)

    return Nfa(
        n_states=len(order),
        start=0,
        accepting=frozenset(order[s] for s in accepting if s in order),
        edges=tuple(kept),
        cycle_lengths=cycles,
    )


@lru_cache(maxsize=4096)
def _class_members_sorted(name: str) -> tuple[str, ...]:
    return tuple(sorted(CLASS_SETS[name]))
