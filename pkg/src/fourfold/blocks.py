"""Stabilised fiber-sum hosts Z^p_{r,s} assembled from spin symplectic blocks.

Every host is one chain V #_T B1 #_T ... #_T Bn followed by stabilisations.
Blocks play one of three roles:

* plain       -- summed in untouched,
* logged      -- multiplicity-3 log transform on the block's nucleus 1,
* suspension  -- summed in by a suspension step; its torus is marked but
  reserved, so its section does not enter adjunction checks.

Block Bi always carries the same generator ids, so hosts that differ only
in roles have identical pairing tables and the identity relabelling is an
isometry between them.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from functools import lru_cache

from . import tree as T
from .errors import InvalidIndex, UnsupportedManifold
from .lattice import CohClass
from .manifold import (
    ManifoldModel,
    Probe,
    ZLayout,
    fiber_sum,
    log_transform,
    make_elliptic,
    make_park_block,
    stabilize,
)

RESERVED = "reserved"
LOG_MULTIPLICITY = 3


@dataclass(frozen=True)
class ZConfig:
    """Choice of the repeated block V (also used for U0 and U1)."""

    v: str = "park"
    park_n: int = 2

    def __post_init__(self):
        if self.v not in ("park", "E2"):
            raise UnsupportedManifold(f"block kind must be 'park' or 'E2', got {self.v!r}")

    def key(self) -> tuple:
        return tuple(sorted(asdict(self).items()))


def _piece(config: ZConfig) -> tuple[ManifoldModel, tuple[str, str]]:
    """Unprefixed block and its two link nuclei (nucleus 1 is kept for logs)."""
    e2 = make_elliptic(2)
    if config.v == "E2":
        return e2, ("2", "3")
    return fiber_sum(e2, make_park_block(config.park_n), "3", "P1"), ("2", "P2")


@lru_cache(maxsize=None)
def _block(config: ZConfig, label: str) -> ManifoldModel:
    return _piece(config)[0].prefixed(label)


def _index(label: str) -> int:
    return int(label[1:])


@lru_cache(maxsize=None)
def _chain(config: ZConfig, n: int) -> ManifoldModel:
    links = _piece(config)[1]
    if n == 0:
        return _block(config, "V")
    prev = _chain(config, n - 1)
    out = f"V.{links[0]}" if n == 1 else f"B{n - 1}.{links[1]}"
    return fiber_sum(prev, _block(config, f"B{n}"), out, f"B{n}.{links[0]}")


@lru_cache(maxsize=None)
def _logged_chain(config: ZConfig, n: int, logged: tuple) -> ManifoldModel:
    if not logged:
        return _chain(config, n)
    prev = _logged_chain(config, n, logged[:-1])
    return log_transform(prev, f"{logged[-1]}.1", LOG_MULTIPLICITY)


def _literal_tree(config: ZConfig, plain, logged, susp) -> T.Tree:
    v = _piece(config)[0].construction
    links = _piece(config)[1]
    t = v
    for b in sorted(plain + logged, key=_index):
        piece = T.logt(v, "1", LOG_MULTIPLICITY) if b in logged else v
        t = T.fsum(t, piece, (links[0], links[0]))
    z = T.csum(t, T.standard("S2xS2"))
    for _ in susp:
        z = T.fsum(z, T.csum(v, T.standard("S2xS2")), (links[1], links[0]))
    return z


@lru_cache(maxsize=None)
def build_layout(config: ZConfig, plain: tuple, logged: tuple, susp: tuple) -> ManifoldModel:
    """Host with the given block roles; block labels must be B1..Bn exactly."""
    labels = sorted(plain + logged + susp, key=_index)
    if [_index(b) for b in labels] != list(range(1, len(labels) + 1)):
        raise InvalidIndex(f"block labels must be B1..Bn without gaps, got {labels}")
    m = _logged_chain(config, len(labels), logged)
    reserved = {f"{b}.1" for b in susp}
    m = replace(m, nuclei=tuple(replace(x, state=RESERVED) if x.label in reserved else x for x in m.nuclei))
    for _ in range(len(susp) + 1):
        m = stabilize(m)
    base = m.stable.canonical
    for b in susp:
        base = base + CohClass.gen(f"{b}.T1", 2)
    p, r, s = len(susp), len(plain), len(logged)
    return replace(
        m,
        name=f"Z^{p}_{r},{s}",
        construction=_literal_tree(config, plain, logged, susp),
        probe=Probe(base, "V.T1"),
        layout=ZLayout(config.key(), plain, logged, susp, "V.T1"),
    )


def roles(p: int, r: int, s: int) -> tuple[tuple, tuple, tuple]:
    """Default labelling: plain B1..Br, logged next s, suspension last p."""
    for name, val in (("p", p), ("r", r), ("s", s)):
        if not isinstance(val, int) or val < 0:
            raise InvalidIndex(f"{name} must be a non-negative integer, got {val!r}")
    blocks = [f"B{i}" for i in range(1, p + r + s + 1)]
    return tuple(blocks[:r]), tuple(blocks[r:r + s]), tuple(blocks[r + s:])


def build_Z(p: int, r: int = 0, s: int = 0, config: ZConfig | None = None) -> ManifoldModel:
    """The host Z^p_{r,s}: V, r plain and s logged blocks, p suspension blocks."""
    return build_layout(config or ZConfig(), *roles(p, r, s))


def config_of(m: ManifoldModel) -> ZConfig:
    if m.layout is None:
        raise UnsupportedManifold(f"{m.name} has no block layout")
    return ZConfig(**dict(m.layout.config))
