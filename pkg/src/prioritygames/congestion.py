"""Congestion counting and cost evaluation over full or partial assignments.

A :class:`State` maps a subset of players to strategies; a profile is a
state covering everyone.  All functions here are pure; costs of players
outside a state are an error, never zero (the insertion machinery relies
on that distinction).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .costs import ExtCost, sum_costs
from .core import Game
from .errors import PlayerNotPlacedError, ValidationFailed, Violation
from .matroids import greedy_min_base


class State:
    """An immutable partial assignment of strategies to players.

    Strategies may be given as resource sets or, for singleton strategies,
    bare resource ids.
    """

    __slots__ = ("_strats", "_key")

    def __init__(self, strategies: Mapping[int, Iterable[str] | str]):
        strats: dict[int, frozenset[str]] = {}
        for p, s in strategies.items():
            strats[int(p)] = frozenset([s]) if isinstance(s, str) else frozenset(s)
        object.__setattr__(self, "_strats", strats)
        object.__setattr__(
            self, "_key", tuple(sorted((p, tuple(sorted(s))) for p, s in strats.items()))
        )

    def players(self) -> list[int]:
        return sorted(self._strats)

    def covers(self, player: int) -> bool:
        return player in self._strats

    def strategy(self, player: int) -> frozenset[str]:
        try:
            return self._strats[player]
        except KeyError:
            raise PlayerNotPlacedError(f"player {player} is not covered by this state") from None

    def items(self) -> list[tuple[int, frozenset[str]]]:
        return sorted(self._strats.items())

    def with_player(self, player: int, strategy: Iterable[str] | str) -> "State":
        d = dict(self._strats)
        d[player] = frozenset([strategy]) if isinstance(strategy, str) else frozenset(strategy)
        return State(d)

    def without_player(self, player: int) -> "State":
        d = dict(self._strats)
        d.pop(player, None)
        return State(d)

    def is_full(self, game: Game) -> bool:
        return set(self._strats) == set(game.players())

    def key(self):
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, State) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        inner = ", ".join(f"{p}->{'+'.join(sorted(s))}" for p, s in self.items())
        return f"State({inner})"


Profile = State  # a profile is simply a state covering all players


def profile(strategies: Mapping[int, Iterable[str] | str]) -> State:
    return State(strategies)


def validate_state(game: Game, state: State, *, full: bool = False) -> None:
    """Raise ValidationFailed unless every covered strategy is legal."""
    violations = []
    for p, s in state.items():
        if p not in set(game.players()):
            violations.append(Violation("UNKNOWN_PLAYER", f"player {p}", "not in the game"))
            continue
        if not game.spaces[p].is_base(s):
            violations.append(
                Violation(
                    "BAD_STRATEGY", f"player {p}", f"{sorted(s)} not in the strategy space"
                )
            )
    if full:
        missing = set(game.players()) - set(state.players())
        if missing:
            violations.append(
                Violation("PARTIAL_PROFILE", "profile", f"players {sorted(missing)} unplaced")
            )
    if violations:
        raise ValidationFailed("invalid state", violations)


@dataclass(frozen=True)
class CongestionView:
    """Per-(state, resource) congestion counts split by priority level."""

    resource: str
    total: int
    level_counts: tuple[tuple[int, int], ...]  # (level, count), ascending levels

    @property
    def levels(self) -> tuple[int, ...]:
        """Present priority levels, ascending (the nonempty ones only)."""
        return tuple(q for q, _ in self.level_counts)

    @property
    def p_star(self) -> int | None:
        """Minimum present priority; None encodes +infinity (empty resource)."""
        return self.level_counts[0][0] if self.level_counts else None

    def count_at(self, level: int) -> int:
        for q, c in self.level_counts:
            if q == level:
                return c
        return 0

    def below(self, level: int) -> int:
        """Players with strictly smaller (more prioritized) level."""
        return sum(c for q, c in self.level_counts if q < level)


def congestion_view(game: Game, state: State, resource: str) -> CongestionView:
    counts: dict[int, int] = {}
    for p, s in state.items():
        if resource in s:
            q = game.priority(resource, p)
            counts[q] = counts.get(q, 0) + 1
    level_counts = tuple(sorted(counts.items()))
    return CongestionView(
        resource=resource,
        total=sum(counts.values()),
        level_counts=level_counts,
    )


def _resource_delay(game: Game, state: State, resource: str, player: int) -> ExtCost:
    q = game.priority(resource, player)
    below = 0
    same = 0
    for p, s in state.items():
        if resource in s:
            qq = game.priority(resource, p)
            if qq < q:
                below += 1
            elif qq == q:
                same += 1
    return game.delay(player, resource, below, same)


def player_cost(game: Game, state: State, player: int) -> ExtCost:
    """Total delay over the player's strategy; saturates at infinity."""
    strategy = state.strategy(player)  # raises PLAYER_NOT_PLACED if absent
    return sum_costs(_resource_delay(game, state, r, player) for r in strategy)


def entry_weights(game: Game, state: State, player: int) -> dict[str, ExtCost]:
    """What each resource would cost the player, opponents held fixed.

    The player's own current membership is removed before counting, so the
    weight at r is exactly the delay she would face with r in her strategy.
    Summing weights over any candidate strategy reproduces its exact cost,
    which is what makes greedy best responses exact for matroid spaces.
    """
    others = state.without_player(player) if state.covers(player) else state
    weights: dict[str, ExtCost] = {}
    for r in sorted(game.ground_of(player)):
        q = game.priority(r, player)
        view = congestion_view(game, others, r)
        weights[r] = game.delay(player, r, view.below(q), view.count_at(q) + 1)
    return weights


def deviation_cost(game: Game, state: State, player: int, strategy: Iterable[str] | str) -> ExtCost:
    """Cost the player would pay after unilaterally switching to ``strategy``."""
    new = frozenset([strategy]) if isinstance(strategy, str) else frozenset(strategy)
    return player_cost(game, state.with_player(player, new), player)


def is_better_response(
    game: Game, state: State, player: int, new_strategy: Iterable[str] | str
) -> bool:
    """Strictly cheaper?  Equal-cost moves are not better responses."""
    new = frozenset([new_strategy]) if isinstance(new_strategy, str) else frozenset(new_strategy)
    if not game.spaces[player].is_base(new):
        raise ValidationFailed(
            "strategy outside the player's space",
            [Violation("BAD_STRATEGY", f"player {player}", f"{sorted(new)}")],
        )
    current = player_cost(game, state, player)
    return deviation_cost(game, state, player, new) < current


def has_better_response(game: Game, state: State, player: int) -> bool:
    """True when some strategy strictly beats the player's current one.

    Matroid spaces are answered exactly through the greedy minimum-weight
    base; other spaces by enumeration.
    """
    current = player_cost(game, state, player)
    space = game.spaces[player]
    weights = entry_weights(game, state, player)
    if space.matroid:
        best = greedy_min_base(space, weights)
        return sum_costs(weights[r] for r in best) < current
    return any(
        sum_costs(weights[r] for r in cand) < current for cand in space.all_bases()
    )


def is_pure_nash(game: Game, state: State) -> bool:
    """No player has a better response.  Requires a full profile.

    Equilibria with infinite costs are legal: a player at infinite cost with
    no strictly cheaper alternative has no better response.
    """
    validate_state(game, state, full=True)
    return not any(has_better_response(game, state, p) for p in game.players())
