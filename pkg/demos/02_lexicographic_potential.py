"""
Why better-response dynamics cannot cycle in singleton games
============================================================

Even when resources rank players inconsistently, every singleton game
carries a lexicographic potential: each resource contributes one
(delay, priority-level) pair per user, and the sorted pair vector strictly
decreases whenever anyone improves.  This script walks one random game and
shows the potential falling move by move.
"""

import prioritygames as pg
from prioritygames.generator import GenParams, generate_random_instance
from prioritygames.jsonio import document_to_source

game = document_to_source(
    generate_random_instance(
        GenParams(players=4, resources=3, space_kind="singleton", levels=3), seed=2020
    )
)

# Start everyone on their alphabetically first resource and let the
# round-robin better-response dynamics run.
start = pg.State({p: game.spaces[p].all_bases()[0] for p in game.players()})
final, trace = pg.run_dynamics(game, start)

print(f"converged after {len(trace.steps)} moves; each move drops the potential:\n")
print(f"  start    {pg.lex_potential_singleton(game, start).canonical()}")
for step in trace.steps:
    frm = "".join(sorted(step.frm))
    to = "".join(sorted(step.to))
    print(
        f"  player {step.player} moves {frm} -> {to} "
        f"(cost {step.cost_before} -> {step.cost_after})  potential {step.potential}"
    )

print("\nfinal profile is an equilibrium:", pg.is_pure_nash(game, final))

# The decrease is not an accident of this run: check every better response
# from every profile of the whole game.
checked = 0
for prof in pg.enumerate_profiles(game):
    before = pg.lex_potential_singleton(game, prof)
    for p in game.players():
        current = pg.player_cost(game, prof, p)
        for alt in game.spaces[p].all_bases():
            if alt != prof.strategy(p) and pg.player_cost(game, prof.with_player(p, alt), p) < current:
                after = pg.lex_potential_singleton(game, prof.with_player(p, alt))
                assert pg.lex_compare(after, before) == pg.LESS
                checked += 1
print(f"verified strict decrease across {checked} better responses")
