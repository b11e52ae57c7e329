"""Better/best-response dynamics and equilibrium construction procedures.

Three solvers, all emitting full replayable traces:

* ``run_dynamics``: plain better-response descent under a round-robin,
  first-improver, or steepest-improver policy, with a step cap;
* ``solve_consistent_layered``: ascending-priority layer construction for
  consistent-priority games over arbitrary strategy spaces; each shared-delay
  layer descends a scalar exact potential, player-specific layers run capped
  displaced-player-first dynamics with deterministic restarts;
* ``solve_insertion``: one-at-a-time placement for singleton games with
  arbitrary (player-specific, inconsistent) priorities, evicting residents
  by the equal-priority/lower-priority case split and certifying
  termination with the two-part insertion potential; rare rounds where a
  multi-eviction hands a third player a strictly better option end by
  re-queueing her too, so every round provably ends with nobody wanting
  to move.

Moves of matroid players are realized as chains of single-element swaps
whenever every link strictly decreases the mover's cost; otherwise the move
is recorded whole (that only occurs across plateaus at infinite cost).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .congestion import (
    State,
    congestion_view,
    entry_weights,
    has_better_response,
    player_cost,
    validate_state,
)
from .core import Game
from .costs import ExtCost, improvement, sum_costs
from .errors import (
    InconsistentPrioritiesError,
    LayerCapExhaustedError,
    NotSingletonError,
)
from .matroids import greedy_min_base, lazy_path, singleton_resources
from .potentials import (
    LESS,
    _consistent_level,
    insertion_potential,
    insertion_potential_compare,
    level_potential,
    lex_potential_singleton,
    tol_value,
)

POLICIES = ("roundrobin", "first", "best")

CONVERGED = "Converged"
CAP_REACHED = "CapReached"


@dataclass
class TraceStep:
    """One recorded strategy change (or placement, or discard)."""

    index: int
    round: int
    phase: str
    player: int
    frm: frozenset[str] | None  # None: the player was unplaced
    to: frozenset[str] | None  # None: the player discarded her strategy
    cost_before: ExtCost | None
    cost_after: ExtCost | None
    potential: str  # canonical potential string after this step, or ""


@dataclass
class MoveTrace:
    kind: str  # "br" | "layered" | "insertion"
    start: State
    steps: list[TraceStep] = field(default_factory=list)
    final: State | None = None
    status: str = CONVERGED


@dataclass(frozen=True)
class StepStats:
    total: int
    placements: int
    moves: int
    discards: int
    rounds: int
    by_phase: dict[str, int]


def count_steps(trace: MoveTrace) -> StepStats:
    by_phase: dict[str, int] = {}
    placements = moves = discards = 0
    for s in trace.steps:
        by_phase[s.phase] = by_phase.get(s.phase, 0) + 1
        if s.to is None:
            discards += 1
        elif s.frm is None:
            placements += 1
        else:
            moves += 1
    rounds = len({s.round for s in trace.steps})
    return StepStats(
        total=len(trace.steps),
        placements=placements,
        moves=moves,
        discards=discards,
        rounds=rounds,
        by_phase=by_phase,
    )


# ---------------------------------------------------------------------------
# Best responses and move decomposition


def best_response(game: Game, state: State, player: int) -> frozenset[str]:
    """The player's cheapest strategy against the others' fixed strategies.

    Matroid spaces are solved exactly by the greedy minimum-weight base over
    per-resource entry weights; explicit spaces by enumeration.  A player
    already at an optimum keeps her strategy; otherwise ties break toward
    the id-lexicographically smallest optimum.
    """
    space = game.spaces[player]
    weights = entry_weights(game, state, player)
    current = state.strategy(player)
    current_cost = sum_costs(weights[r] for r in current)
    if space.matroid:
        best = greedy_min_base(space, weights)
    else:
        best = min(
            space.all_bases(),
            key=lambda b: (sum_costs(weights[r] for r in b), tuple(sorted(b))),
        )
    if not sum_costs(weights[r] for r in best) < current_cost:
        return current
    return best


def _decompose_move(
    game: Game, state: State, player: int, target: frozenset[str]
) -> list[frozenset[str]]:
    """Intermediate strategies realizing the move as improving single swaps.

    Returns the successor strategies in order (the last entry is the final
    strategy, which may be a base at most as cheap as ``target``).  Falls
    back to the whole move at once when strict per-swap cost decrease is
    unattainable, which only happens across infinite-cost plateaus.
    """
    space = game.spaces[player]
    current = state.strategy(player)
    if not space.matroid or len(current - target) <= 1:
        return [target]
    weights = entry_weights(game, state, player)
    path = lazy_path(space, current, target, weights)
    costs = [sum_costs(weights[r] for r in b) for b in path]
    if all(b < a for a, b in zip(costs, costs[1:])):
        return path[1:]
    return [target]


def _lex_snapshot(game: Game):
    singleton = all(sp.is_singleton_space() for sp in game.spaces.values())
    if singleton and not game.player_specific:
        return lambda state: lex_potential_singleton(game, state).canonical()
    return lambda state: ""


# ---------------------------------------------------------------------------
# Plain better-response dynamics


def run_dynamics(
    game: Game,
    start: State,
    policy: str = "roundrobin",
    cap: int = 100_000,
) -> tuple[State, MoveTrace]:
    """Descend better responses until a pure Nash equilibrium or the cap.

    Every recorded step strictly decreases the mover's cost.  The returned
    status is ``Converged`` exactly when no player has a better response at
    the final profile; hitting the cap is a status, not an error.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    validate_state(game, start, full=True)
    snapshot = _lex_snapshot(game)
    players = list(game.players())
    state = start
    trace = MoveTrace(kind="br", start=start)
    rr_idx = 0
    round_no = 0
    while True:
        mover: int | None = None
        target: frozenset[str] | None = None
        if policy == "roundrobin":
            for off in range(len(players)):
                p = players[(rr_idx + off) % len(players)]
                br = best_response(game, state, p)
                if br != state.strategy(p):
                    mover, target = p, br
                    rr_idx = (rr_idx + off + 1) % len(players)
                    break
        elif policy == "first":
            for p in players:
                br = best_response(game, state, p)
                if br != state.strategy(p):
                    mover, target = p, br
                    break
        else:  # steepest improvement, ties to the smallest id
            best_gain: ExtCost | None = None
            for p in players:
                br = best_response(game, state, p)
                if br == state.strategy(p):
                    continue
                before = player_cost(game, state, p)
                after = player_cost(game, state.with_player(p, br), p)
                gain = improvement(before, after)
                if best_gain is None or best_gain < gain:
                    best_gain, mover, target = gain, p, br
        if mover is None:
            trace.status = CONVERGED
            break
        if len(trace.steps) >= cap:
            trace.status = CAP_REACHED
            break
        capped = False
        for nxt in _decompose_move(game, state, mover, target):
            if len(trace.steps) >= cap:
                capped = True
                break
            frm = state.strategy(mover)
            cost_b = player_cost(game, state, mover)
            state = state.with_player(mover, nxt)
            cost_a = player_cost(game, state, mover)
            trace.steps.append(
                TraceStep(
                    index=len(trace.steps),
                    round=round_no,
                    phase="br",
                    player=mover,
                    frm=frm,
                    to=nxt,
                    cost_before=cost_b,
                    cost_after=cost_a,
                    potential=snapshot(state),
                )
            )
        round_no += 1
        if capped:
            trace.status = CAP_REACHED
            break
    trace.final = state
    return state, trace


# ---------------------------------------------------------------------------
# Layered construction for consistent priorities


def solve_consistent_layered(
    game: Game,
    *,
    restarts: int = 10,
) -> tuple[State, MoveTrace]:
    """Build an equilibrium level by level, lower priorities first.

    Once a level's players sit at a mutual best response given the frozen
    more-prioritized layers, later layers cannot disturb them (their counts
    never enter a lower level's delay arguments), so the stacked profile is
    an equilibrium of the whole game.

    Shared-delay layers descend an exact scalar potential and need no cap.
    Player-specific layers run displaced-player-first dynamics under a cap
    of n^2 * m * (#levels) steps with deterministic restarts; exhausting all
    restarts raises LAYER_CAP_EXHAUSTED rather than returning silently.
    """
    if not game.priorities.consistent:
        raise InconsistentPrioritiesError("layered construction needs consistent priorities")
    level_of = {i: _consistent_level(game, i) for i in game.players()}
    levels = sorted(set(level_of.values()))
    cap = max(16, game.n_players**2 * len(game.resources) * len(levels))
    trace = MoveTrace(kind="layered", start=State({}))
    outer = State({})
    round_box = [0]
    for q in levels:
        layer = sorted(i for i in game.players() if level_of[i] == q)
        if game.player_specific:
            outer = _solve_layer_capped(
                game, outer, q, layer, trace, round_box, cap=cap, restarts=restarts
            )
        else:
            outer = _solve_layer_potential(game, outer, q, layer, trace, round_box, cap=cap)
    trace.final = outer
    trace.status = CONVERGED
    return outer, trace


def _layer_inner(state: State, outer: State) -> State:
    inner = {p: s for p, s in state.items() if not outer.covers(p)}
    return State(inner)


def _initial_strategy(game: Game, state: State, player: int) -> frozenset[str]:
    """Cheapest strategy for a not-yet-placed player; deterministic ties."""
    space = game.spaces[player]
    weights = entry_weights(game, state, player)
    if space.matroid:
        return greedy_min_base(space, weights)
    return min(
        space.all_bases(),
        key=lambda b: (sum_costs(weights[r] for r in b), tuple(sorted(b))),
    )


def _record(
    trace: MoveTrace,
    round_box: list[int],
    phase: str,
    player: int,
    frm: frozenset[str] | None,
    to: frozenset[str] | None,
    cost_before: ExtCost | None,
    cost_after: ExtCost | None,
    potential: str,
) -> None:
    trace.steps.append(
        TraceStep(
            index=len(trace.steps),
            round=round_box[0],
            phase=phase,
            player=player,
            frm=frm,
            to=to,
            cost_before=cost_before,
            cost_after=cost_after,
            potential=potential,
        )
    )


def _solve_layer_potential(
    game: Game,
    outer: State,
    q: int,
    layer: list[int],
    trace: MoveTrace,
    round_box: list[int],
    *,
    cap: int,
) -> State:
    phase = f"layer:{q}"

    def snap(working: State) -> str:
        return level_potential(game, outer, q, _layer_inner(working, outer)).canonical()

    working = outer
    for i in layer:
        s = _initial_strategy(game, working, i)
        working = working.with_player(i, s)
        _record(
            trace,
            round_box,
            phase,
            i,
            None,
            s,
            None,
            player_cost(game, working, i),
            snap(working),
        )
        round_box[0] += 1

    moves = 0
    stable_passes = 0
    while stable_passes < 1:
        improved = False
        for i in layer:
            br = best_response(game, working, i)
            if br == working.strategy(i):
                continue
            improved = True
            pot_before = level_potential(game, outer, q, _layer_inner(working, outer))
            for nxt in _decompose_move(game, working, i, br):
                frm = working.strategy(i)
                cost_b = player_cost(game, working, i)
                working = working.with_player(i, nxt)
                cost_a = player_cost(game, working, i)
                _record(trace, round_box, phase, i, frm, nxt, cost_b, cost_a, snap(working))
                pot_after = level_potential(game, outer, q, _layer_inner(working, outer))
                if pot_before.value.is_finite or pot_after.value.is_finite:
                    assert pot_after.value < pot_before.value, "layer potential failed to drop"
                pot_before = pot_after
            round_box[0] += 1
            moves += 1
            if moves > max(cap, 1) * 8:
                # unreachable for finite delays: the potential strictly drops
                raise LayerCapExhaustedError(f"level {q} descent exceeded the safety cap")
        if not improved:
            stable_passes += 1
    return working


def _solve_layer_capped(
    game: Game,
    outer: State,
    q: int,
    layer: list[int],
    trace: MoveTrace,
    round_box: list[int],
    *,
    cap: int,
    restarts: int,
) -> State:
    """Displaced-player-first capped dynamics with deterministic restarts."""
    phase = f"layer:{q}"
    checkpoint = len(trace.steps)
    for attempt in range(restarts + 1):
        del trace.steps[checkpoint:]
        working = outer
        for j, i in enumerate(layer):
            if attempt == 0:
                s = _initial_strategy(game, working, i)
            else:
                bases = game.spaces[i].all_bases()
                s = bases[(attempt + j) % len(bases)]
            working = working.with_player(i, s)
            _record(
                trace, round_box, phase, i, None, s, None, player_cost(game, working, i), ""
            )
            round_box[0] += 1

        steps_used = 0
        pending = deque(layer)
        queued = set(layer)
        failed = False
        while True:
            while pending:
                i = pending.popleft()
                queued.discard(i)
                br = best_response(game, working, i)
                if br == working.strategy(i):
                    continue
                if steps_used >= cap:
                    failed = True
                    break
                others_before = {
                    j: player_cost(game, working, j) for j in layer if j != i
                }
                for nxt in _decompose_move(game, working, i, br):
                    frm = working.strategy(i)
                    cost_b = player_cost(game, working, i)
                    working = working.with_player(i, nxt)
                    cost_a = player_cost(game, working, i)
                    _record(trace, round_box, phase, i, frm, nxt, cost_b, cost_a, "")
                    steps_used += 1
                round_box[0] += 1
                displaced = [
                    j
                    for j in layer
                    if j != i and others_before[j] < player_cost(game, working, j)
                ]
                for j in sorted(displaced, reverse=True):
                    if j not in queued:
                        pending.appendleft(j)
                        queued.add(j)
                if i not in queued:
                    pending.append(i)
                    queued.add(i)
            if failed:
                break
            stragglers = [
                i for i in layer if best_response(game, working, i) != working.strategy(i)
            ]
            if not stragglers:
                return working
            for i in stragglers:
                if i not in queued:
                    pending.append(i)
                    queued.add(i)
    raise LayerCapExhaustedError(
        f"level {q} dynamics failed to converge within {restarts + 1} capped attempts"
    )


# ---------------------------------------------------------------------------
# Insertion algorithm for singleton games


def solve_insertion(
    game: Game,
    *,
    verify_rounds: bool = True,
) -> tuple[State, MoveTrace]:
    """Place players one at a time on their cheapest resource, evicting
    residents that start wanting to leave.

    Each round pops an unplaced player from a FIFO queue and adds her to the
    resource imposing minimum cost (ties: smallest resource id).  Residents
    of that resource that now have a better response must be weakly less
    prioritized there; if one shares the newcomer's priority, exactly that
    one (smallest id) discards, otherwise all strictly less prioritized
    improvers discard.  Discarded players re-enter the queue.  The two-part
    insertion potential strictly increases across these rounds.

    One wrinkle: a multi-eviction can thin a resource's crowd faster than
    the newcomer fills it, handing some player *elsewhere* a strictly
    better option mid-run (her view of the resource moves from d(x, y+1) to
    d(x+1, y-1), which monotonicity does not order).  Each round therefore
    ends by discarding any such stray improvers too (phase ``rebalance``),
    so the round invariant "no covered player wants to move" always holds
    and an emptied queue is a pure Nash equilibrium by construction.
    Rebalance rounds are rare, sit outside the potential's strict-increase
    guarantee, and are covered by the safety cap.
    """
    if not all(sp.is_singleton_space() for sp in game.spaces.values()):
        raise NotSingletonError("the insertion algorithm needs singleton strategy spaces")
    trace = MoveTrace(kind="insertion", start=State({}))
    state = State({})
    queue: deque[int] = deque(sorted(game.players()))
    round_box = [0]
    prev_potential = insertion_potential(game, state)
    safety = 1000 + game.n_players**4 * len(game.resources) * (
        max((game.priorities.max_level(r) for r in game.resources), default=1) + 1
    )
    rounds = 0
    while queue:
        rounds += 1
        if rounds > safety:  # the potential argument makes this unreachable
            raise RuntimeError("insertion algorithm exceeded its safety cap")
        i = queue.popleft()
        weights = entry_weights(game, state, i)
        allowed = singleton_resources(game.spaces[i])
        rid = min(sorted(allowed), key=lambda r: (weights[r], r))
        old_state = state
        state = state.with_player(i, frozenset([rid]))
        _record(
            trace,
            round_box,
            "insert",
            i,
            None,
            frozenset([rid]),
            None,
            weights[rid],
            insertion_potential(game, state).canonical(),
        )

        residents = [p for p, s in old_state.items() if rid in s]
        improvers = [p for p in residents if has_better_response(game, state, p)]
        mine = game.priority(rid, i)
        assert all(
            game.priority(rid, p) >= mine for p in improvers
        ), "an improver outranks the newcomer"
        equal = [p for p in improvers if game.priority(rid, p) == mine]
        if improvers and equal:
            # exactly one equal-priority improver leaves (case B1)
            j_star = min(equal)
            same_before = congestion_view(game, old_state, rid).count_at(mine)
            tol_out = tol_value(game, old_state, j_star)
            assert tol_out == same_before, "leaving player's tolerance is off"
            cost_b = player_cost(game, state, j_star)
            state = state.without_player(j_star)
            queue.append(j_star)
            _record(
                trace,
                round_box,
                "discard",
                j_star,
                frozenset([rid]),
                None,
                cost_b,
                None,
                insertion_potential(game, state).canonical(),
            )
            tol_in = tol_value(game, state, i)
            assert tol_in >= same_before + 1, "newcomer's tolerance is off"
        elif improvers:
            # every improver is strictly less prioritized here (case B2)
            for j in sorted(improvers):
                cost_b = player_cost(game, state, j)
                state = state.without_player(j)
                queue.append(j)
                _record(
                    trace,
                    round_box,
                    "discard",
                    j,
                    frozenset([rid]),
                    None,
                    cost_b,
                    None,
                    insertion_potential(game, state).canonical(),
                )

        # restore the round invariant: multi-evictions can leave a player on
        # another resource strictly better off moving; discard those too,
        # one at a time (evicting one stray can already pacify the next)
        rebalanced = False
        while True:
            stray = next(
                (p for p in state.players() if has_better_response(game, state, p)),
                None,
            )
            if stray is None:
                break
            rebalanced = True
            (held,) = state.strategy(stray)
            cost_b = player_cost(game, state, stray)
            state = state.without_player(stray)
            queue.append(stray)
            _record(
                trace,
                round_box,
                "rebalance",
                stray,
                frozenset([held]),
                None,
                cost_b,
                None,
                insertion_potential(game, state).canonical(),
            )
        round_box[0] += 1

        potential = insertion_potential(game, state)
        if not rebalanced:
            assert (
                insertion_potential_compare(prev_potential, potential) == LESS
            ), "insertion potential failed to increase"
        prev_potential = potential
        if verify_rounds:
            assert not any(
                has_better_response(game, state, p) for p in state.players()
            ), "a covered player has a better response after the round"
    trace.final = state
    trace.status = CONVERGED
    return state, trace
