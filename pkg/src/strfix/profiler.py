"""Learn up to k full-string patterns covering a column and pick significant ones.

The learner tokenizes each value into runs (punctuation verbatim, alphanumeric
runs generalized to the narrowest covering class, mask tokens atomic), groups
values by token signature, and then greedily merges groups whenever a single
generalization step (class widening, disjunction of few literals, or folding a
repeated unit into a one-or-more group) lowers the total description cost
size(pattern) + generality(pattern) * values_covered.
"""

from __future__ import annotations

from dataclasses import dataclass

from .patterns import (
    CLASS_SETS,
    MASK_CLOSE,
    MASK_OPEN,
    CharClass,
    Disjunction,
    Group,
    Literal,
    MaskToken,
    Pattern,
    PatternSet,
    Sequence,
    narrowest_class,
    node_to_text,
    tokenize_symbols,
    widen_class,
)

DEFAULT_MAX_PATTERNS = 6
DEFAULT_DELTA = 0.2

# Per-symbol generality weights; literals and masks are free, wider classes
# cost more. Tuned on the fixture suite; merges must prefer folding repeated
# units over bundling structurally unrelated groups.
_CLASS_GENERALITY = {
    "binary01": 1.0,
    "digit": 2.0,
    "lower": 4.0,
    "upper": 4.0,
    "letter": 5.0,
    "space": 0.0,
    "alnum": 6.0,
    "alnum_space": 7.0,
}
_GROUP_GENERALITY = 1.0
_MAX_DISJUNCTION = 5


# --- shape items -----------------------------------------------------------


@dataclass(frozen=True)
class _Lit:
    char: str


@dataclass(frozen=True)
class _Run:
    cls: str
    length: int


@dataclass(frozen=True)
class _RunPlus:
    cls: str


@dataclass(frozen=True)
class _Mask:
    type_name: str


@dataclass(frozen=True)
class _Rep:
    # Fixed-length unit, one atom per symbol: ("lit", c) | ("class", name) | ("mask", t)
    unit: tuple[tuple[str, str], ...]


_Item = _Lit | _Run | _RunPlus | _Mask | _Rep


def _shape_of(symbols: tuple[str, ...]) -> tuple[_Item, ...]:
    items: list[_Item] = []
    i = 0
    n = len(symbols)
    while i < n:
        sym = symbols[i]
        if sym.startswith(MASK_OPEN) and sym.endswith(MASK_CLOSE):
            items.append(_Mask(sym[1:-1]))
            i += 1
        elif sym in CLASS_SETS["alnum"]:
            j = i
            while j < n and len(symbols[j]) == 1 and symbols[j] in CLASS_SETS["alnum"]:
                j += 1
            items.append(_Run(narrowest_class(symbols[i:j]), j - i))
            i = j
        elif sym == " ":
            j = i
            while j < n and symbols[j] == " ":
                j += 1
            items.append(_Run("space", j - i))
            i = j
        else:
            items.append(_Lit(sym))
            i += 1
    return tuple(items)


class _Group:
    """A set of values sharing one (possibly generalized) shape."""

    def __init__(self, shape: tuple[_Item, ...], members: list[tuple[str, ...]]):
        self.shape = shape
        self.members = members
        self.pattern_nodes, self.cost = _refine(shape, members)

    @property
    def text(self) -> str:
        return node_to_text(Sequence(tuple(self.pattern_nodes)))


# --- refinement: shape + members -> concrete pattern nodes + cost ----------


def _align(shape: tuple[_Item, ...], symbols: tuple[str, ...]) -> list[tuple[int, int]] | None:
    """Spans of symbols consumed by each item; smallest-consumption-first for
    variable items, guided by a feasibility table."""
    n_items, n_syms = len(shape), len(symbols)

    feasible = [[False] * (n_syms + 1) for _ in range(n_items + 1)]
    feasible[n_items][n_syms] = True
    for ii in range(n_items - 1, -1, -1):
        item = shape[ii]
        for si in range(n_syms, -1, -1):
            if isinstance(item, _Lit):
                ok = si < n_syms and symbols[si] == item.char and feasible[ii + 1][si + 1]
            elif isinstance(item, _Mask):
                tok = MASK_OPEN + item.type_name + MASK_CLOSE
                ok = si < n_syms and symbols[si] == tok and feasible[ii + 1][si + 1]
            elif isinstance(item, _Run):
                end = si + item.length
                ok = end <= n_syms and all(
                    s in CLASS_SETS[item.cls] for s in symbols[si:end]
                ) and feasible[ii + 1][end]
            elif isinstance(item, _RunPlus):
                ok = False
                end = si + 1
                while end <= n_syms and symbols[end - 1] in CLASS_SETS[item.cls]:
                    if feasible[ii + 1][end]:
                        ok = True
                        break
                    end += 1
            else:  # _Rep
                ul = len(item.unit)
                ok = False
                end = si + ul
                while end <= n_syms:
                    if not _unit_accepts(item.unit, symbols[end - ul:end]):
                        break
                    if feasible[ii + 1][end]:
                        ok = True
                        break
                    end += ul
                if ul == 0:
                    ok = feasible[ii + 1][si]
            feasible[ii][si] = ok

    if not feasible[0][0]:
        return None
    spans: list[tuple[int, int]] = []
    si = 0
    for ii, item in enumerate(shape):
        if isinstance(item, (_Lit, _Mask)):
            end = si + 1
        elif isinstance(item, _Run):
            end = si + item.length
        elif isinstance(item, _RunPlus):
            end = si + 1
            while not feasible[ii + 1][end]:
                end += 1
        else:
            ul = len(item.unit)
            end = si + ul
            while not feasible[ii + 1][end]:
                end += ul
        spans.append((si, end))
        si = end
    return spans


def _unit_accepts(unit: tuple[tuple[str, str], ...], window: tuple[str, ...]) -> bool:
    if len(window) != len(unit):
        return False
    for (kind, arg), sym in zip(unit, window):
        if kind == "lit":
            if sym != arg:
                return False
        elif kind == "class":
            if sym not in CLASS_SETS[arg]:
                return False
        else:
            if sym != MASK_OPEN + arg + MASK_CLOSE:
                return False
    return True


def _atom_node(kind: str, arg: str):
    if kind == "lit":
        return Literal(arg)
    if kind == "class":
        return CharClass(arg)
    return MaskToken(arg)


def _join_atom(atom: tuple[str, str], sym: str) -> tuple[str, str]:
    kind, arg = atom
    if kind == "lit":
        if sym == arg:
            return atom
        return ("class", narrowest_class([arg, sym]))
    if kind == "class":
        if sym in CLASS_SETS[arg]:
            return atom
        return ("class", narrowest_class(set(CLASS_SETS[arg]) | {sym}))
    return atom  # mask atoms only ever see their own token


def _best_run_nodes(strings: list[str], cls: str) -> tuple[list, float, float]:
    """Choose literal / per-symbol / disjunction form for a fixed-length run.

    Returns (nodes, size, per_value_generality).
    """
    length = len(strings[0])
    distinct = sorted(set(strings))

    if len(distinct) == 1:
        return [Literal(c) for c in distinct[0]], float(length), 0.0

    per_nodes: list = []
    per_gen = 0.0
    for pos in range(length):
        chars = {s[pos] for s in strings}
        if len(chars) == 1:
            per_nodes.append(Literal(next(iter(chars))))
        else:
            name = narrowest_class(chars)
            per_nodes.append(CharClass(name))
            per_gen += _CLASS_GENERALITY[name]
    per_size = float(length)
    per_cost = per_size + per_gen * len(strings)

    if 2 <= len(distinct) <= _MAX_DISJUNCTION and length >= 2:
        d_size = float(sum(len(o) for o in distinct) + len(distinct))
        d_gen = float(len(distinct) - 1)
        d_cost = d_size + d_gen * len(strings)
        if d_cost < per_cost:
            return [Disjunction(tuple(distinct))], d_size, d_gen

    return per_nodes, per_size, per_gen


def _refine(shape: tuple[_Item, ...], members: list[tuple[str, ...]]) -> tuple[list, float]:
    """Build pattern nodes for a shape from its member values, with cost."""
    spans_per_member = []
    for syms in members:
        spans = _align(shape, syms)
        if spans is None:
            raise AssertionError(f"member {syms!r} does not fit shape {shape!r}")
        spans_per_member.append(spans)

    nodes: list = []
    size = 0.0
    gen = 0.0
    for ii, item in enumerate(shape):
        if isinstance(item, _Lit):
            nodes.append(Literal(item.char))
            size += 1.0
        elif isinstance(item, _Mask):
            nodes.append(MaskToken(item.type_name))
            size += 1.0
        elif isinstance(item, _Run):
            strings = [
                "".join(syms[a:b])
                for syms, (a, b) in ((m, s[ii]) for m, s in zip(members, spans_per_member))
            ]
            run_nodes, run_size, run_gen = _best_run_nodes(strings, item.cls)
            nodes.extend(run_nodes)
            size += run_size
            gen += run_gen
        elif isinstance(item, _RunPlus):
            nodes.append(Group((CharClass(item.cls),), "one_or_more"))
            size += 2.0
            gen += _CLASS_GENERALITY[item.cls] + _GROUP_GENERALITY
        else:  # _Rep: overlay every unit window from every member
            ul = len(item.unit)
            atoms = list(item.unit)
            for syms, spans in zip(members, spans_per_member):
                a, b = spans[ii]
                for w in range(a, b, ul):
                    for pos in range(ul):
                        atoms[pos] = _join_atom(atoms[pos], syms[w + pos])
            unit_nodes = tuple(_atom_node(k, v) for k, v in atoms)
            nodes.append(Group(unit_nodes, "one_or_more"))
            size += ul + 1.0
            gen += _GROUP_GENERALITY + sum(
                _CLASS_GENERALITY[a] for k, a in atoms if k == "class"
            )
    cost = size + gen * len(members)
    return nodes, cost


# --- merging ----------------------------------------------------------------


def _item_join(a: _Item, b: _Item) -> _Item | None:
    if isinstance(a, _Lit) and isinstance(b, _Lit):
        return a if a.char == b.char else None
    if isinstance(a, _Mask) and isinstance(b, _Mask):
        return a if a.type_name == b.type_name else None
    if isinstance(a, (_Run, _RunPlus)) and isinstance(b, (_Run, _RunPlus)):
        cls = widen_class(a.cls, b.cls)
        if isinstance(a, _Run) and isinstance(b, _Run) and a.length == b.length:
            return _Run(cls, a.length)
        return _RunPlus(cls)
    return None


def _itemwise_shape(sa: tuple[_Item, ...], sb: tuple[_Item, ...]) -> tuple[_Item, ...] | None:
    if len(sa) != len(sb):
        return None
    out = []
    for a, b in zip(sa, sb):
        j = _item_join(a, b)
        if j is None:
            return None
        out.append(j)
    return tuple(out)


def _flatten_atoms(nodes) -> list[tuple[str, str]] | None:
    """Pattern nodes as a flat fixed-length atom list, or None if variable."""
    atoms: list[tuple[str, str]] = []
    for node in nodes:
        if isinstance(node, Literal):
            atoms.append(("lit", node.char))
        elif isinstance(node, CharClass):
            atoms.append(("class", node.name))
        elif isinstance(node, MaskToken):
            atoms.append(("mask", node.type_name))
        else:
            return None
    return atoms


def _join_atoms(a: tuple[str, str], b: tuple[str, str]) -> tuple[str, str] | None:
    ka, va = a
    kb, vb = b
    if ka == "mask" or kb == "mask":
        return a if a == b else None
    if ka == "lit" and kb == "lit":
        if va == vb:
            return a
        return ("class", narrowest_class([va, vb]))
    if ka == "lit":
        a, b = b, a
        ka, va = a
        kb, vb = b
    # ka == "class"
    if kb == "lit":
        if vb in CLASS_SETS[va]:
            return a
        return ("class", narrowest_class(set(CLASS_SETS[va]) | {vb}))
    return ("class", widen_class(va, vb))


def _windows_join(unit: list[tuple[str, str]], atoms: list[tuple[str, str]]) -> bool:
    """Overlay consecutive unit-sized windows of atoms onto unit, in place."""
    ul = len(unit)
    if ul == 0 or len(atoms) % ul:
        return False
    for w in range(0, len(atoms), ul):
        for pos in range(ul):
            j = _join_atoms(unit[pos], atoms[w + pos])
            if j is None:
                return False
            unit[pos] = j
    return True


def _lone_rep_unit(g: "_Group") -> list[tuple[str, str]] | None:
    if len(g.shape) == 1 and isinstance(g.shape[0], _Rep):
        return list(g.shape[0].unit)
    return None


def _fold_shape(ga: "_Group", gb: "_Group") -> tuple[_Item, ...] | None:
    """Fold the two patterns into a single repeated-unit group, if possible."""
    fa = _flatten_atoms(ga.pattern_nodes)
    fb = _flatten_atoms(gb.pattern_nodes)
    ra = _lone_rep_unit(ga)
    rb = _lone_rep_unit(gb)

    if ra is not None and rb is not None:
        if len(ra) != len(rb):
            return None
        unit = list(ra)
        if _windows_join(unit, rb):
            return (_Rep(tuple(unit)),)
        return None

    if ra is not None or rb is not None:
        unit = list(ra if ra is not None else rb)
        fixed = fb if ra is not None else fa
        if fixed is None:
            return None
        if _windows_join(unit, fixed):
            return (_Rep(tuple(unit)),)
        return None

    if fa is None or fb is None:
        return None
    la, lb = len(fa), len(fb)
    for ul in range(1, min(la, lb) + 1):
        if la % ul or lb % ul or (la == ul and lb == ul):
            continue
        unit = list(fa[:ul])
        if _windows_join(unit, fa[ul:]) and _windows_join(unit, fb):
            return (_Rep(tuple(unit)),)
    return None


def _try_merge(ga: "_Group", gb: "_Group") -> "_Group | None":
    best: _Group | None = None
    shape = _itemwise_shape(ga.shape, gb.shape)
    if shape is not None:
        best = _Group(shape, ga.members + gb.members)
    folded = _fold_shape(ga, gb)
    if folded is not None:
        cand = _Group(folded, ga.members + gb.members)
        if best is None or (cand.cost, cand.text) < (best.cost, best.text):
            best = cand
    return best


def learn_patterns(values: list[str], k: int = DEFAULT_MAX_PATTERNS) -> list[Pattern]:
    """Learn at most k patterns such that every value matches at least one."""
    if not values:
        raise ValueError("values must be non-empty")
    if k < 1:
        raise ValueError("k must be positive")

    symbol_lists = [tokenize_symbols(v) for v in values]
    by_shape: dict[tuple[_Item, ...], list[tuple[str, ...]]] = {}
    order: list[tuple[_Item, ...]] = []
    for syms in symbol_lists:
        shape = _shape_of(syms)
        if shape not in by_shape:
            by_shape[shape] = []
            order.append(shape)
        by_shape[shape].append(syms)
    groups = [_Group(shape, by_shape[shape]) for shape in order]

    while len(groups) > 1:
        best = None  # (delta, text, i, j, merged)
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                merged = _try_merge(groups[i], groups[j])
                if merged is None:
                    continue
                delta = merged.cost - groups[i].cost - groups[j].cost
                key = (delta, merged.text)
                if best is None or key < (best[0], best[1]):
                    best = (delta, merged.text, i, j, merged)
        if best is None:
            break
        delta, _, i, j, merged = best
        if delta > 0 and len(groups) <= k:
            break
        groups = [g for idx, g in enumerate(groups) if idx not in (i, j)] + [merged]

    # Structurally unmergeable leftovers beyond k collapse into a literal
    # disjunction so the totality contract (<= k patterns, union covers all
    # values) holds; such a bundle rarely reaches the significance threshold.
    if len(groups) > k:
        groups.sort(key=lambda g: (-len(g.members), g.text))
        keep, rest = groups[: k - 1], groups[k - 1 :]
        rest_values = sorted({"".join(m) for g in rest for m in g.members})
        bundle_nodes = [Disjunction(tuple(rest_values))]
        bundle = _Group.__new__(_Group)
        bundle.shape = ()
        bundle.members = [m for g in rest for m in g.members]
        bundle.pattern_nodes = bundle_nodes
        bundle.cost = float(sum(len(v) for v in rest_values))
        groups = keep + [bundle]

    patterns = []
    for g in groups:
        root = Sequence(tuple(g.pattern_nodes))
        patterns.append(Pattern(root=root))

    # Coverage by exhaustive match, so stored coverage is reproducible.
    n = len(symbol_lists)
    for p in patterns:
        hits = sum(1 for syms in symbol_lists if p.matches_symbols(syms))
        p.coverage = hits / n

    patterns.sort(key=lambda p: (-p.coverage, p.to_text()))
    for idx, p in enumerate(patterns):
        p.id = f"p{idx}"
    return patterns


def select_significant(patterns: list[Pattern], delta: float = DEFAULT_DELTA) -> PatternSet:
    """Partition learned patterns by the coverage threshold delta."""
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must be in (0, 1]")
    significant = [p for p in patterns if p.coverage >= delta]
    return PatternSet(all=list(patterns), significant=significant, delta=delta)


def match(pattern: Pattern, value: str) -> bool:
    """Full-string membership test."""
    return pattern.matches(value)
