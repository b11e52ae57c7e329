"""
Building a priority-based game and reading its congestion structure
===================================================================

Two players share two resources.  Each resource ranks the players the
opposite way (smaller priority value = more preferred), and both charge
d(x, y) = 2x + y, where x counts strictly better-ranked co-users and y
counts equally-ranked co-users including yourself.
"""

import prioritygames as pg

game = pg.build_game(
    n_players=2,
    resources=["a", "b"],
    spaces={1: pg.SingletonSpace(["a", "b"]), 2: pg.SingletonSpace(["a", "b"])},
    priorities=pg.PriorityFunction({"a": {1: 1, 2: 2}, "b": {1: 2, 2: 1}}),
    delays={r: pg.table_from_function(lambda x, y: 2 * x + y, 4) for r in ("a", "b")},
)

# Put both players on resource a.  Player 1 is preferred there, so she pays
# d(0, 1) = 1; player 2 sits behind one better-ranked player and pays
# d(1, 1) = 3.
both_on_a = pg.profile({1: "a", 2: "a"})
for i in (1, 2):
    print(f"player {i} pays {pg.player_cost(game, both_on_a, i)} on (a, a)")

# The congestion view splits the head count by priority level.
view = pg.congestion_view(game, both_on_a, "a")
print(f"resource a: {view.total} users, per level {view.level_counts}, best level {view.p_star}")

# Entry weights answer "what would each resource cost me if I moved there?"
# Player 2 sees a:3 against b:1, so (a, a) is not stable.
print("player 2 weighs her options:", {r: str(c) for r, c in pg.entry_weights(game, both_on_a, 2).items()})
print("is (a, a) an equilibrium?", pg.is_pure_nash(game, both_on_a))

# The two stable outcomes are the two splits.
print("all equilibria:", [{p: "".join(sorted(s)) for p, s in prof.items()} for prof in pg.brute_force_pne(game)])

# Every accepted delay table satisfies three axioms exactly: nondecreasing
# in x, nondecreasing in y, and d(x, y) <= d(x+y-1, 1).  A table that
# ignores better-ranked users breaks the third one:
careless = pg.table_from_function(lambda x, y: y, 3)
for violation in pg.validate_delay_properties(careless, 3):
    print("rejected:", violation)
