"""Construction trees and homeomorphism-level rewriting.

A tree records how a model was assembled.  Evaluating a tree only uses
rank/signature/parity arithmetic, so it is cheap and independent of the
model objects built alongside it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import NoRewrite, SchemaError
from .lattice import HomeoType, dumps

LEAF_KINDS = ("elliptic", "standard", "park")
STANDARD_PIECES = {
    "S2xS2": HomeoType(2, 0, "even"),
    "CP2": HomeoType(1, 1, "odd"),
    "CP2bar": HomeoType(1, -1, "odd"),
    "S4": HomeoType(0, 0, "even"),
}


@dataclass(frozen=True)
class Tree:
    """One node of a construction tree.

    ``kind`` is one of ``elliptic``, ``standard``, ``park``, ``logt``,
    ``csum``, ``fsum`` or ``rewrite``; ``params`` holds the node's scalar
    data as a sorted tuple of (key, value) pairs.
    """

    kind: str
    children: tuple["Tree", ...] = ()
    params: tuple[tuple[str, object], ...] = ()

    def param(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    def to_json(self) -> dict:
        out = {"kind": self.kind, "params": {k: v for k, v in self.params}}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    @classmethod
    def from_json(cls, obj) -> "Tree":
        try:
            kids = tuple(cls.from_json(c) for c in obj.get("children", []))
            return cls(obj["kind"], kids, tuple(sorted(obj.get("params", {}).items())))
        except (KeyError, TypeError, AttributeError) as exc:
            raise SchemaError(f"bad construction tree: {exc}") from exc

    def digest(self) -> str:
        return hashlib.sha1(dumps(self.to_json()).encode()).hexdigest()[:8]

    def __str__(self) -> str:
        if self.kind == "elliptic":
            return f"E({self.param('n')})"
        if self.kind == "standard":
            return str(self.param("piece"))
        if self.kind == "park":
            return f"P({self.param('n')})"
        if self.kind == "logt":
            return f"logt({self.children[0]}, {self.param('nucleus')}, p={self.param('p')})"
        if self.kind == "csum":
            return "csum(" + ", ".join(map(str, self.children)) + ")"
        if self.kind == "fsum":
            return f"fsum({self.children[0]}, {self.children[1]})"
        if self.kind == "rewrite":
            return f"rewrite[{self.param('rule')}]({self.children[0]})"
        return f"{self.kind}({', '.join(map(str, self.children))})"


def elliptic(n: int) -> Tree:
    return Tree("elliptic", (), (("n", n),))


def standard(piece: str) -> Tree:
    if piece not in STANDARD_PIECES:
        raise ValueError(f"unknown standard piece {piece!r}")
    return Tree("standard", (), (("piece", piece),))


def park(n: int) -> Tree:
    return Tree("park", (), (("n", n),))


def logt(child: Tree, nucleus: str, p: int) -> Tree:
    return Tree("logt", (child,), (("nucleus", str(nucleus)), ("p", p)))


def csum(*children: Tree) -> Tree:
    flat: list[Tree] = []
    for c in children:
        if c.kind == "csum":
            flat.extend(c.children)
        else:
            flat.append(c)
    return Tree("csum", tuple(flat))


def fsum(left: Tree, right: Tree, nuclei: tuple[str, str] = ("", "")) -> Tree:
    return Tree("fsum", (left, right), (("nuclei", f"{nuclei[0]}|{nuclei[1]}"),))


def rewrite(child: Tree, rule: str) -> Tree:
    return Tree("rewrite", (child,), (("rule", rule),))


def leaf_homeo(t: Tree) -> HomeoType:
    if t.kind == "elliptic":
        n = int(t.param("n"))
        return HomeoType(12 * n - 2, -8 * n, "even" if n % 2 == 0 else "odd")
    if t.kind == "standard":
        return STANDARD_PIECES[t.param("piece")]
    if t.kind == "park":
        n = int(t.param("n"))
        return HomeoType(2 * (2 * n + 1), 0, "even")
    raise ValueError(f"{t.kind} is not a leaf")


def evaluate_homeo(t: Tree) -> HomeoType:
    if t.kind in LEAF_KINDS:
        return leaf_homeo(t)
    if t.kind in ("logt", "rewrite"):
        return evaluate_homeo(t.children[0])
    if t.kind == "csum":
        h = HomeoType(0, 0, "even")
        for c in t.children:
            h = h.connected_sum(evaluate_homeo(c))
        return h
    if t.kind == "fsum":
        return evaluate_homeo(t.children[0]).fiber_sum(evaluate_homeo(t.children[1]))
    raise ValueError(f"unknown node kind {t.kind!r}")


def _strip(t: Tree) -> Tree:
    while t.kind == "rewrite":
        t = t.children[0]
    return t


def _is_stab(t: Tree) -> bool:
    t = _strip(t)
    return t.kind == "standard" and t.param("piece") == "S2xS2"


def _rewrite_csum(t: Tree) -> tuple[Tree, str] | None:
    kids = [_strip(c) for c in t.children]
    if not any(_is_stab(c) for c in kids):
        return None
    for i, c in enumerate(kids):
        if c.kind == "fsum":
            # (X #_T Y) # S2xS2  ->  X # Y # 2(S2xS2)
            x, y = c.children
            new = kids[:i] + [x, y] + kids[i + 1:] + [standard("S2xS2")]
            return csum(*new), "mandelbaum-moishezon"
    for i, c in enumerate(kids):
        if c.kind == "logt":
            # N(2;2q+1) # S2xS2  ->  N(2) # S2xS2
            return csum(*(kids[:i] + [c.children[0]] + kids[i + 1:])), "log-stabilization"
    return None


def _find(t: Tree) -> tuple[Tree, str] | None:
    t = _strip(t)
    if t.kind == "csum":
        hit = _rewrite_csum(t)
        if hit:
            return hit
    for i, c in enumerate(t.children):
        hit = _find(c)
        if hit:
            new_child, rule = hit
            kids = list(t.children)
            kids[i] = new_child
            node = csum(*kids) if t.kind == "csum" else Tree(t.kind, tuple(kids), t.params)
            return node, rule
    return None


def mm_rewrite(t: Tree) -> Tree:
    """Apply the first (outermost, leftmost) stabilised-sum rewrite.

    Rules: (X #_T Y) # S2xS2 -> X # Y # 2(S2xS2), and
    logt(X) # S2xS2 -> X # S2xS2.  The result is wrapped in a ``rewrite``
    node naming the rule.
    """
    hit = _find(t)
    if hit is None:
        raise NoRewrite(f"no stabilised fiber sum or log transform in {t}")
    new, rule = hit
    return rewrite(new, rule)


def _float(t: Tree) -> Tree | None:
    """fsum(csum(X, S2xS2, ...), Y) -> csum(fsum(X, Y), S2xS2, ...).

    The torus lives in the first summand, so stabilisations elsewhere commute
    with the fiber sum.
    """
    t = _strip(t)
    if t.kind == "fsum":
        left, right = (_strip(c) for c in t.children)
        for side, other, swap in ((left, right, False), (right, left, True)):
            if side.kind == "csum" and len(side.children) > 1:
                core, *rest = side.children
                pair = (other, core) if swap else (core, other)
                return csum(Tree("fsum", pair, t.params), *rest)
    for i, c in enumerate(t.children):
        new = _float(c)
        if new is not None:
            kids = list(t.children)
            kids[i] = new
            return csum(*kids) if t.kind == "csum" else Tree(t.kind, tuple(kids), t.params)
    return None


def normalize(t: Tree, max_steps: int = 10_000) -> Tree:
    """Float stabilisations outwards and apply rewrites until none applies."""
    t = _unwrap_all(t)
    for _ in range(max_steps):
        new = _float(t)
        if new is None:
            hit = _find(t)
            if hit is None:
                return t
            new = hit[0]
        t = _unwrap_all(new)
    raise RuntimeError("normalisation did not terminate")


def _unwrap_all(t: Tree) -> Tree:
    t = _strip(t)
    kids = tuple(_unwrap_all(c) for c in t.children)
    return csum(*kids) if t.kind == "csum" else Tree(t.kind, kids, t.params)


def leaves(t: Tree) -> list[Tree]:
    t = _strip(t)
    if t.kind in LEAF_KINDS:
        return [t]
    out = []
    for c in t.children:
        out.extend(leaves(c))
    return out
