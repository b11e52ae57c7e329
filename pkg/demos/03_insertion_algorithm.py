"""
Constructing an equilibrium by inserting one player at a time
=============================================================

With player-specific delays and inconsistent priorities there is no
guarantee that free dynamics converge quickly, but an equilibrium can be
built directly: place each player on her cheapest resource; if residents
of that resource start wanting to leave, evict exactly one of equal
priority (or all of strictly lower priority) and queue them for
re-insertion.  A two-part potential (sorted per-resource level counts,
then a tolerance sum) strictly increases each round, so this terminates.

The instance below forces an eviction: player 1 settles on e, then
player 2 (same priority, e is also her best) crowds it, and e stops being
worth it for player 1.
"""

import prioritygames as pg


def table(points, bound=3):
    return pg.TableDelay(entries={k: pg.cost(v) for k, v in points.items()}, bound=bound)


flat = lambda v: pg.table_from_function(lambda x, y: v, 3)  # noqa: E731

game = pg.build_game(
    n_players=2,
    resources=["e", "f"],
    spaces={1: pg.SingletonSpace(["e", "f"]), 2: pg.SingletonSpace(["e", "f"])},
    priorities=pg.PriorityFunction.uniform(["e", "f"], {1: 1, 2: 1}),
    delays={
        "e": pg.PerPlayerDelay(
            specs={
                1: table({(0, 1): 1, (0, 2): 5, (0, 3): 5, (1, 1): 9, (1, 2): 9, (2, 1): 9}),
                2: flat(1),
            }
        ),
        "f": pg.PerPlayerDelay(specs={1: flat(2), 2: flat(9)}),
    },
)

final, trace = pg.solve_insertion(game)
for step in trace.steps:
    if step.to is None:
        print(f"round {step.round}: player {step.player} evicted from {''.join(step.frm)} (paid {step.cost_before})")
    else:
        print(
            f"round {step.round}: player {step.player} placed on {''.join(step.to)} "
            f"for {step.cost_after}; potential now {step.potential}"
        )

print("\nfinal:", {p: "".join(sorted(s)) for p, s in final.items()})
print("equilibrium:", pg.is_pure_nash(game, final))

# The recorded trace is replayable: every cost, every eviction, and the
# round-by-round potential increase are re-verified from scratch.
print(pg.certify_trace(game, trace).summary())
