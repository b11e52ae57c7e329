"""Strategy spaces: singletons, explicit families, and matroids.

Matroid spaces (uniform, partition, graphic, explicit-bases) expose an
independence oracle, deterministic base exchange, an exact greedy minimum
weight base, and decomposition of improving moves into single-element swaps.
Explicit set families are supported as general (non-matroid) strategy
spaces; they fall back to enumeration everywhere.

All spaces are immutable after construction and validated eagerly:
``ExplicitBasesSpace`` checks the exchange axiom exhaustively, graphic
spaces require a connected graph, partition blocks must be disjoint.
Desk scale throughout (grounds of at most a dozen elements).
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

from .costs import ExtCost, sum_costs
from .errors import (
    NoExchangeError,
    NotImprovingError,
    ValidationFailed,
    Violation,
)

ResourceSet = frozenset


def _canon(s: Iterable[str]) -> frozenset[str]:
    return frozenset(s)


def _set_key(s: frozenset[str]) -> tuple[str, ...]:
    return tuple(sorted(s))


class StrategySpace:
    """Common interface; concrete spaces subclass this."""

    kind = "abstract"
    matroid = False  # True when the greedy/exchange machinery applies

    def ground(self) -> frozenset[str]:
        raise NotImplementedError

    def rank(self) -> int:
        raise NotImplementedError

    def is_base(self, s: frozenset[str]) -> bool:
        raise NotImplementedError

    def is_independent(self, s: frozenset[str]) -> bool:
        raise NotImplementedError

    def all_bases(self) -> tuple[frozenset[str], ...]:
        """Every strategy, sorted by element ids.  Desk scale only."""
        raise NotImplementedError

    def is_singleton_space(self) -> bool:
        """True when every strategy has exactly one resource."""
        return self.rank() == 1 if self.matroid else all(
            len(s) == 1 for s in self.all_bases()
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StrategySpace)
            and self.kind == other.kind
            and self.all_bases() == other.all_bases()
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.all_bases()))


class SingletonSpace(StrategySpace):
    """One resource per strategy; equivalent to a rank-1 uniform matroid."""

    kind = "singleton"
    matroid = True

    def __init__(self, allowed: Iterable[str]):
        self._allowed = _canon(allowed)
        if not self._allowed:
            raise ValidationFailed(
                "empty strategy space",
                [Violation("EMPTY_SPACE", "singleton", "no allowed resources")],
            )
        self._bases = tuple(
            sorted((frozenset([r]) for r in self._allowed), key=_set_key)
        )

    def ground(self) -> frozenset[str]:
        return self._allowed

    def rank(self) -> int:
        return 1

    def is_base(self, s: frozenset[str]) -> bool:
        return len(s) == 1 and next(iter(s)) in self._allowed

    def is_independent(self, s: frozenset[str]) -> bool:
        return len(s) <= 1 and s <= self._allowed

    def all_bases(self) -> tuple[frozenset[str], ...]:
        return self._bases


class ExplicitSpace(StrategySpace):
    """An arbitrary nonempty family of resource sets (not assumed a matroid)."""

    kind = "explicit"
    matroid = False

    def __init__(self, sets: Iterable[Iterable[str]]):
        family = sorted({_canon(s) for s in sets}, key=_set_key)
        if not family:
            raise ValidationFailed(
                "empty strategy space",
                [Violation("EMPTY_SPACE", "explicit", "no strategy sets")],
            )
        if any(not s for s in family):
            raise ValidationFailed(
                "empty strategy",
                [Violation("EMPTY_STRATEGY", "explicit", "a strategy set is empty")],
            )
        self._sets = tuple(family)
        self._ground = frozenset().union(*family)

    def ground(self) -> frozenset[str]:
        return self._ground

    def rank(self) -> int:
        # informational only: families need not be equicardinal
        return max(len(s) for s in self._sets)

    def is_base(self, s: frozenset[str]) -> bool:
        return s in self._sets

    def is_independent(self, s: frozenset[str]) -> bool:
        raise TypeError("explicit families have no independence oracle")

    def all_bases(self) -> tuple[frozenset[str], ...]:
        return self._sets


class UniformMatroid(StrategySpace):
    kind = "uniform"
    matroid = True

    def __init__(self, ground: Iterable[str], rank: int):
        self._ground = _canon(ground)
        if rank < 1 or rank > len(self._ground):
            raise ValidationFailed(
                "bad uniform rank",
                [Violation("BAD_RANK", "uniform", f"rank {rank} vs ground {len(self._ground)}")],
            )
        self._rank = rank
        self._bases: tuple[frozenset[str], ...] | None = None

    def ground(self) -> frozenset[str]:
        return self._ground

    def rank(self) -> int:
        return self._rank

    def is_base(self, s: frozenset[str]) -> bool:
        return len(s) == self._rank and s <= self._ground

    def is_independent(self, s: frozenset[str]) -> bool:
        return len(s) <= self._rank and s <= self._ground

    def all_bases(self) -> tuple[frozenset[str], ...]:
        if self._bases is None:
            combos = itertools.combinations(sorted(self._ground), self._rank)
            self._bases = tuple(frozenset(c) for c in combos)
        return self._bases


class PartitionMatroid(StrategySpace):
    """Pick exactly ``cap_i`` elements from each block."""

    kind = "partition"
    matroid = True

    def __init__(self, blocks: Sequence[Iterable[str]], caps: Sequence[int]):
        blocks = [
            _canon(b) for b in blocks
        ]
        if len(blocks) != len(caps):
            raise ValidationFailed(
                "blocks/caps length mismatch",
                [Violation("BAD_PARTITION", "partition", "len(blocks) != len(caps)")],
            )
        seen: set[str] = set()
        for b in blocks:
            if b & seen:
                raise ValidationFailed(
                    "overlapping partition blocks",
                    [Violation("BAD_PARTITION", "partition", f"elements repeated: {sorted(b & seen)}")],
                )
            seen |= b
        for b, c in zip(blocks, caps):
            if c < 0 or c > len(b):
                raise ValidationFailed(
                    "bad partition cap",
                    [Violation("BAD_PARTITION", "partition", f"cap {c} vs block size {len(b)}")],
                )
        if sum(caps) < 1:
            raise ValidationFailed(
                "empty strategy space",
                [Violation("EMPTY_SPACE", "partition", "all caps are zero")],
            )
        self._blocks = tuple(blocks)
        self._caps = tuple(int(c) for c in caps)
        self._ground = frozenset(seen)
        self._bases: tuple[frozenset[str], ...] | None = None

    def ground(self) -> frozenset[str]:
        return self._ground

    def rank(self) -> int:
        return sum(self._caps)

    def is_base(self, s: frozenset[str]) -> bool:
        if not s <= self._ground:
            return False
        return all(len(s & b) == c for b, c in zip(self._blocks, self._caps))

    def is_independent(self, s: frozenset[str]) -> bool:
        if not s <= self._ground:
            return False
        return all(len(s & b) <= c for b, c in zip(self._blocks, self._caps))

    def all_bases(self) -> tuple[frozenset[str], ...]:
        if self._bases is None:
            per_block = [
                [frozenset(c) for c in itertools.combinations(sorted(b), cap)]
                for b, cap in zip(self._blocks, self._caps)
            ]
            bases = [
                frozenset().union(*parts) for parts in itertools.product(*per_block)
            ]
            self._bases = tuple(sorted(bases, key=_set_key))
        return self._bases


class GraphicMatroid(StrategySpace):
    """Bases are the spanning trees of a connected (multi)graph.

    Edges are (u, v, resource_id) triples; resource ids must be unique.
    """

    kind = "graphic"
    matroid = True

    MAX_EDGES = 12  # desk scale: spanning trees are handled by enumeration

    def __init__(self, edges: Sequence[tuple[str, str, str]]):
        edges = [(str(u), str(v), str(rid)) for u, v, rid in edges]
        rids = [rid for _, _, rid in edges]
        if len(set(rids)) != len(rids):
            raise ValidationFailed(
                "duplicate edge ids",
                [Violation("BAD_GRAPH", "graphic", "edge resource ids must be unique")],
            )
        if not edges:
            raise ValidationFailed(
                "empty graph",
                [Violation("BAD_GRAPH", "graphic", "no edges")],
            )
        if len(edges) > self.MAX_EDGES:
            raise ValidationFailed(
                "graph too large",
                [Violation("BAD_GRAPH", "graphic", f"at most {self.MAX_EDGES} edges supported")],
            )
        self._edges = tuple(edges)
        self._by_rid = {rid: (u, v) for u, v, rid in edges}
        self._vertices = sorted({u for u, _, _ in edges} | {v for _, v, _ in edges})
        if not self._connected(self._by_rid.keys()):
            raise ValidationFailed(
                "disconnected graph",
                [Violation("BAD_GRAPH", "graphic", "graph must be connected")],
            )
        self._rank = len(self._vertices) - 1
        if self._rank < 1:
            raise ValidationFailed(
                "degenerate graph",
                [Violation("BAD_GRAPH", "graphic", "need at least two vertices")],
            )
        self._bases: tuple[frozenset[str], ...] | None = None

    def _union_find(self, rids: Iterable[str]) -> tuple[int, bool]:
        """Return (#components over all vertices, acyclic?)."""
        parent = {v: v for v in self._vertices}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        comps = len(self._vertices)
        for rid in rids:
            u, v = self._by_rid[rid]
            ru, rv = find(u), find(v)
            if ru == rv:
                acyclic = False
            else:
                parent[ru] = rv
                comps -= 1
        return comps, acyclic

    def _connected(self, rids: Iterable[str]) -> bool:
        comps, _ = self._union_find(rids)
        return comps == 1

    def ground(self) -> frozenset[str]:
        return frozenset(self._by_rid)

    def rank(self) -> int:
        return self._rank

    def edges(self) -> tuple[tuple[str, str, str], ...]:
        return self._edges

    def is_base(self, s: frozenset[str]) -> bool:
        if len(s) != self._rank or not s <= self.ground():
            return False
        comps, acyclic = self._union_find(s)
        return acyclic and comps == 1

    def is_independent(self, s: frozenset[str]) -> bool:
        if not s <= self.ground():
            return False
        _, acyclic = self._union_find(s)
        return acyclic

    def all_bases(self) -> tuple[frozenset[str], ...]:
        if self._bases is None:
            combos = itertools.combinations(sorted(self.ground()), self._rank)
            self._bases = tuple(
                frozenset(c) for c in combos if self.is_base(frozenset(c))
            )
        return self._bases


class ExplicitBasesSpace(StrategySpace):
    """A matroid given by listing its bases; the exchange axiom is verified."""

    kind = "explicit_bases"
    matroid = True

    def __init__(self, bases: Iterable[Iterable[str]]):
        family = sorted({_canon(b) for b in bases}, key=_set_key)
        if not family:
            raise ValidationFailed(
                "empty strategy space",
                [Violation("EMPTY_SPACE", "explicit_bases", "no bases")],
            )
        sizes = {len(b) for b in family}
        violations = []
        if len(sizes) != 1:
            violations.append(
                Violation("UNEQUAL_BASES", "explicit_bases", f"base sizes {sorted(sizes)} differ")
            )
        else:
            violations.extend(self._check_exchange(family))
        if violations:
            raise ValidationFailed("not a matroid", violations)
        self._bases = tuple(family)
        self._rank = len(family[0])
        self._ground = frozenset().union(*family)

    @staticmethod
    def _check_exchange(family: list[frozenset[str]]) -> list[Violation]:
        out = []
        for s in family:
            for t in family:
                for e in s - t:
                    if not any((s - {e}) | {f} in family for f in t - s):
                        out.append(
                            Violation(
                                "EXCHANGE_FAILED",
                                "explicit_bases",
                                f"no exchange for {sorted(s)} -> {sorted(t)} dropping {e}",
                            )
                        )
        return out

    def ground(self) -> frozenset[str]:
        return self._ground

    def rank(self) -> int:
        return self._rank

    def is_base(self, s: frozenset[str]) -> bool:
        return s in self._bases

    def is_independent(self, s: frozenset[str]) -> bool:
        return any(s <= b for b in self._bases)

    def all_bases(self) -> tuple[frozenset[str], ...]:
        return self._bases


def is_base(space: StrategySpace, s: Iterable[str]) -> bool:
    return space.is_base(_canon(s))


def singleton_resources(space: StrategySpace) -> frozenset[str]:
    """Resources r with {r} a legal strategy.

    For singleton-equivalent spaces this can be a strict subset of the
    ground set (a rank-1 partition matroid with a zero cap carries dead
    ground elements).
    """
    return frozenset(next(iter(b)) for b in space.all_bases() if len(b) == 1)


def exchange_step(
    space: StrategySpace,
    s: Iterable[str],
    target: Iterable[str],
    e: str,
) -> str:
    """The smallest-id element e' of target - s with s - e + e' a base."""
    s, target = _canon(s), _canon(target)
    if not space.is_base(s) or not space.is_base(target):
        raise ValueError("exchange_step requires two bases")
    if e not in s or e in target:
        raise ValueError(f"element {e!r} must lie in s minus target")
    for e2 in sorted(target - s):
        if space.is_base((s - {e}) | {e2}):
            return e2
    raise NoExchangeError(f"no exchange element for {e!r}; input is not a matroid")


def base_weight(s: Iterable[str], weights: Mapping[str, ExtCost]) -> ExtCost:
    return sum_costs(weights[r] for r in s)


def greedy_min_base(
    space: StrategySpace, weights: Mapping[str, ExtCost]
) -> frozenset[str]:
    """A minimum-total-weight strategy; ties break toward smaller ids.

    Runs the matroid greedy algorithm when an independence oracle exists,
    otherwise enumerates the explicit family.  Exact for matroids because
    per-element weights are independent.
    """
    missing = space.ground() - set(weights)
    if missing:
        raise ValueError(f"weights missing for {sorted(missing)}")
    if not space.matroid:
        return min(
            space.all_bases(),
            key=lambda b: (base_weight(b, weights), _set_key(b)),
        )
    chosen: set[str] = set()
    for r in sorted(space.ground(), key=lambda r: (weights[r], r)):
        if len(chosen) == space.rank():
            break
        if space.is_independent(frozenset(chosen | {r})):
            chosen.add(r)
    result = frozenset(chosen)
    assert space.is_base(result), "greedy failed to reach a base"
    return result


def lazy_path(
    space: StrategySpace,
    start: Iterable[str],
    goal: Iterable[str],
    weights: Mapping[str, ExtCost],
) -> list[frozenset[str]]:
    """Single-swap descent from ``start`` to some base at most as heavy as ``goal``.

    Each swap replaces one element by a strictly lighter one, so the sorted
    weight multiset strictly decreases and the walk terminates; whenever the
    running total is finite the total weight strictly decreases too.  The
    first valid swap in (element id, replacement id) order is taken, making
    paths reproducible.
    """
    start, goal = _canon(start), _canon(goal)
    if not space.matroid:
        raise TypeError("lazy paths require a matroid space")
    if not (space.is_base(start) and space.is_base(goal)):
        raise ValueError("lazy_path requires two bases")
    target_weight = base_weight(goal, weights)
    if not target_weight < base_weight(start, weights):
        raise NotImprovingError("goal base is not strictly lighter than start")
    path = [start]
    current = start
    while target_weight < base_weight(current, weights):
        swapped = False
        for e in sorted(current):
            for e2 in sorted(space.ground() - current):
                if weights[e2] < weights[e] and space.is_base((current - {e}) | {e2}):
                    current = (current - {e}) | {e2}
                    path.append(current)
                    swapped = True
                    break
            if swapped:
                break
        if not swapped:  # impossible for a true matroid with heavier current
            raise NoExchangeError("no improving swap found; space is not a matroid")
    return path


def space_from_kind(kind: str, **kwargs) -> StrategySpace:
    """Factory used by the JSON layer and the generator."""
    if kind == "singleton":
        return SingletonSpace(kwargs["allowed"])
    if kind == "explicit":
        return ExplicitSpace(kwargs["sets"])
    if kind == "uniform":
        return UniformMatroid(kwargs["ground"], kwargs["rank"])
    if kind == "partition":
        return PartitionMatroid(kwargs["blocks"], kwargs["caps"])
    if kind == "graphic":
        return GraphicMatroid(kwargs["edges"])
    if kind == "explicit_bases":
        return ExplicitBasesSpace(kwargs["bases"])
    raise ValueError(f"unknown strategy space kind {kind!r}")
