"""Potential functions with exact comparison.

Four constructions certify convergence and equilibrium existence:

* a lexicographic vector of (delay, level) pairs for singleton games with
  per-resource priorities, strictly decreasing under every better response;
* its trivariate analogue for generalized two-sided markets, where the pair's
  second slot is the per-resource dense rank of the player's cost;
* an exact scalar potential for the fixed-level subgame of a
  consistent-priority game (arbitrary strategy spaces);
* the two-part insertion potential (sorted per-resource level-count rows,
  then a summed tolerance) that proves the insertion algorithm terminates.

Everything compares exactly; no tolerances anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .congestion import State, congestion_view, entry_weights, validate_state
from .core import Game
from .costs import INFINITY, ExtCost, sum_costs
from .errors import (
    InconsistentPrioritiesError,
    LengthMismatchError,
    LevelMismatchError,
    NotSingletonError,
    PlayerSpecificInputError,
    ShapeMismatchError,
)
from .markets import MarketGame
from .matroids import singleton_resources

LESS = -1
EQUAL = 0
GREATER = 1


@dataclass(frozen=True)
class LexVector:
    """A sorted tuple of (cost, level) pairs; the pair order is cost-first."""

    pairs: tuple[tuple[ExtCost, int], ...]

    def canonical(self) -> str:
        return ";".join(f"{c.to_string()}@{q}" for c, q in self.pairs)


@dataclass(frozen=True)
class ScalarPotential:
    value: ExtCost

    def canonical(self) -> str:
        return self.value.to_string()


@dataclass(frozen=True)
class InsertionPotentialValue:
    """Sorted per-resource level-count rows plus the summed tolerance."""

    rows: tuple[tuple[int, ...], ...]
    tol_sum: int

    def canonical(self) -> str:
        rows = "|".join(",".join(str(c) for c in row) for row in self.rows)
        return f"phi={rows};tol={self.tol_sum}"


def _pair_key(pair: tuple[ExtCost, int]):
    return pair  # ExtCost is totally ordered; tuples compare cost-first


def _require_singleton(game) -> None:
    if not all(sp.is_singleton_space() for sp in game.spaces.values()):
        raise NotSingletonError("every strategy space must be singleton")


def lex_potential_singleton(game: Game, prof: State) -> LexVector:
    """The (delay, priority) pair vector of a singleton-game profile.

    Each resource with present levels q_1 < ... < q_k contributes, per level
    q and per y = 1..count(q), the pair (d(below(q), y), q); the n pairs are
    then sorted nondecreasing.  Per-resource blocks are already nondecreasing
    by the delay axioms, which is asserted during construction.
    """
    _require_singleton(game)
    if game.player_specific:
        raise PlayerSpecificInputError(
            "the lexicographic potential needs one shared delay per resource"
        )
    validate_state(game, prof, full=True)
    pairs: list[tuple[ExtCost, int]] = []
    for rid in game.resources:
        view = congestion_view(game, prof, rid)
        spec = game.delays[rid]
        block: list[tuple[ExtCost, int]] = []
        prefix = 0
        for q, cnt in view.level_counts:
            for y in range(1, cnt + 1):
                block.append((spec.value(prefix, y), q))
            prefix += cnt
        for a, b in zip(block, block[1:]):
            assert _pair_key(a) <= _pair_key(b), "resource block violates the delay axioms"
        pairs.extend(block)
    pairs.sort(key=_pair_key)
    return LexVector(pairs=tuple(pairs))


def lex_compare(a: LexVector, b: LexVector) -> int:
    """LESS/EQUAL/GREATER by the first differing pair (cost, then level)."""
    if len(a.pairs) != len(b.pairs):
        raise LengthMismatchError(
            f"cannot compare potentials of lengths {len(a.pairs)} and {len(b.pairs)}"
        )
    for pa, pb in zip(a.pairs, b.pairs):
        if pa < pb:
            return LESS
        if pb < pa:
            return GREATER
    return EQUAL


def level_potential(game: Game, outer: State, q: int, inner: State) -> ScalarPotential:
    """Exact potential of the level-q subgame with lower levels frozen.

    ``outer`` holds the strategies of the strictly more prioritized players
    (priority < q), ``inner`` those of level-q players.  The value is
    sum over resources e of sum_{k=1..n_e(inner)} d_e(n_e(outer), k);
    changes under a unilateral level-q deviation equal the deviator's cost
    change exactly.
    """
    if not game.priorities.consistent:
        raise InconsistentPrioritiesError("the level potential needs consistent priorities")
    if game.player_specific:
        raise PlayerSpecificInputError("the level potential needs one shared delay per resource")
    for p, _ in outer.items():
        level = _consistent_level(game, p)
        if level >= q:
            raise LevelMismatchError(f"outer player {p} has priority {level} >= {q}")
    for p, _ in inner.items():
        level = _consistent_level(game, p)
        if level != q:
            raise LevelMismatchError(f"inner player {p} has priority {level} != {q}")
    parts: list[ExtCost] = []
    for rid in game.resources:
        frozen = sum(1 for _, s in outer.items() if rid in s)
        active = sum(1 for _, s in inner.items() if rid in s)
        spec = game.delays[rid]
        for k in range(1, active + 1):
            parts.append(spec.value(frozen, k))
    return ScalarPotential(value=sum_costs(parts))


def _consistent_level(game: Game, player: int) -> int:
    levels = {
        game.priorities.of(rid, player)
        for rid in game.resources
        if game.priorities.defined(rid, player)
    }
    if len(levels) != 1:
        raise InconsistentPrioritiesError(
            f"player {player} has priorities {sorted(levels)} across resources"
        )
    return levels.pop()


def market_lex_potential(market: MarketGame, prof: State) -> LexVector:
    """The market analogue of the singleton-game potential.

    Pairs are (d(c, below(c), y), rank(c)) over each resource's present cost
    values, globally sorted.  The second slot is the per-resource dense rank
    of the raw cost, which preserves every same-resource comparison the
    decrease argument relies on while keeping the slot an integer.
    """
    _require_singleton(market)
    missing = set(market.players()) - set(prof.players())
    if missing:
        raise LengthMismatchError(f"profile must cover all players, missing {sorted(missing)}")
    pairs: list[tuple[ExtCost, int]] = []
    for rid in market.resources:
        users = [p for p, s in prof.items() if rid in s]
        present = sorted({market.costs[(p, rid)] for p in users})
        tri = market.delays[rid]
        block: list[tuple[ExtCost, int]] = []
        prefix = 0
        for c in present:
            cnt = sum(1 for p in users if market.costs[(p, rid)] == c)
            rank = market.cost_rank(rid, c)
            for y in range(1, cnt + 1):
                block.append((tri.value(rank, prefix, y), rank))
            prefix += cnt
        for a, b in zip(block, block[1:]):
            assert _pair_key(a) <= _pair_key(b), "resource block violates the market axioms"
        pairs.extend(block)
    pairs.sort(key=_pair_key)
    return LexVector(pairs=tuple(pairs))


# ---------------------------------------------------------------------------
# Insertion potential


def tol_value(game: Game, state: State, player: int, *, cap: int | None = None) -> int:
    """How crowded the player's resource may get before she wants to leave.

    The largest y (capped at the player count: congestion never exceeds it)
    such that staying with y equal-priority co-users, herself included, costs
    at most every alternative resource's post-move delay.  Zero when even
    y = 1 is beaten, which only happens in states where she already has a
    better response.
    """
    cap = game.n_players if cap is None else cap
    strategy = state.strategy(player)
    if len(strategy) != 1:
        raise NotSingletonError("tolerance is defined for singleton strategies")
    (rid,) = strategy
    rivals = entry_weights(game, state, player)
    allowed = singleton_resources(game.spaces[player])
    ceiling = INFINITY
    for alt in allowed:
        if alt != rid and rivals[alt] < ceiling:
            ceiling = rivals[alt]
    q = game.priority(rid, player)
    below = congestion_view(game, state.without_player(player), rid).below(q)
    best = 0
    for y in range(1, cap + 1):
        if game.delay(player, rid, below, y) <= ceiling:
            best = y
        else:
            break
    return best


def insertion_potential(game: Game, state: State) -> InsertionPotentialValue:
    """The two-part termination potential of the insertion algorithm.

    First part: per resource e, the vector (count at level 1, ..., count at
    level q*_e) of present players by priority level, rows sorted
    lexicographically nondecreasing.  Second part: the summed tolerance of
    all covered players.  The algorithm strictly increases this value, rows
    compared first.
    """
    _require_singleton(game)
    validate_state(game, state)
    rows: list[tuple[int, ...]] = []
    for rid in game.resources:
        top = game.priorities.max_level(rid)
        view = congestion_view(game, state, rid)
        rows.append(tuple(view.count_at(q) for q in range(1, top + 1)))
    rows.sort()
    tol_sum = sum(tol_value(game, state, p) for p in state.players())
    return InsertionPotentialValue(rows=tuple(rows), tol_sum=tol_sum)


def insertion_potential_compare(a: InsertionPotentialValue, b: InsertionPotentialValue) -> int:
    """Row-sequence lexicographic on the sorted rows, then the tolerance sum."""
    if len(a.rows) != len(b.rows) or sorted(map(len, a.rows)) != sorted(map(len, b.rows)):
        raise ShapeMismatchError("potentials come from differently shaped games")
    if a.rows < b.rows:
        return LESS
    if b.rows < a.rows:
        return GREATER
    if a.tol_sum < b.tol_sum:
        return LESS
    if b.tol_sum < a.tol_sum:
        return GREATER
    return EQUAL


def exact_potential_delta(before: ScalarPotential, after: ScalarPotential) -> Fraction:
    """Finite potential difference, for exactness checks in tests."""
    return after.value.finite() - before.value.finite()
