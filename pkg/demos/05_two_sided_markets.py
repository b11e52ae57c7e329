"""
Two-sided markets with ties, and the bridges between the models
===============================================================

A generalized correlated market scores each (player, resource) pair with a
rational cost c; the resource's delay d(c, x, y) grows with your own score,
with the number of better-scored co-users, and with the number of
equally-scored ones.  This sits strictly between priority-based games and
their player-specific variant:

  priority game  -->  market        (costs := priority values)
  market         -->  player-specific priority game  (priorities := cost ranks)

Both bridges preserve every player's cost on every profile, which this
script checks end to end, along with the market's own lexicographic
potential.
"""

from fractions import Fraction

import prioritygames as pg

# A market where resource e scores the players 1 and 2 with a tie on f.
tri = pg.tritable_from_function(lambda l, x, y: Fraction(l) + 2 * x + y - 1, levels=2, bound=3)
tri_tied = pg.tritable_from_function(lambda l, x, y: 3 * Fraction(l) + x + y, levels=1, bound=3)
market = pg.build_market(
    n_players=2,
    resources=["e", "f"],
    spaces={1: pg.SingletonSpace(["e", "f"]), 2: pg.SingletonSpace(["e", "f"])},
    costs={
        (1, "e"): Fraction(1),
        (2, "e"): Fraction(2),
        (1, "f"): Fraction(5, 2),
        (2, "f"): Fraction(5, 2),
    },
    delays={"e": tri, "f": tri_tied},
)

both_on_e = pg.profile({1: "e", 2: "e"})
print("both on e:", *(f"player {i} pays {pg.market_player_cost(market, both_on_e, i)}" for i in (1, 2)))

# Tied scores mean equal standing: neither player outranks the other on f.
game = pg.reduce_market_to_playerspecific(market)
print("ranks on e:", game.priority("e", 1), game.priority("e", 2), "| on f:", game.priority("f", 1), game.priority("f", 2))

# The reduction changes nothing a player can measure.
for prof in pg.enumerate_profiles(market):
    for i in market.players():
        assert pg.market_player_cost(market, prof, i) == pg.player_cost(game, prof, i)
print("cost preservation verified on every profile")

# Markets also certify their own dynamics: the trivariate potential falls
# under every better response.
checked = 0
for prof in pg.enumerate_profiles(market):
    before = pg.market_lex_potential(market, prof)
    for p in market.players():
        current = pg.market_player_cost(market, prof, p)
        for alt in market.spaces[p].all_bases():
            if alt == prof.strategy(p):
                continue
            moved = prof.with_player(p, alt)
            if pg.market_player_cost(market, moved, p) < current:
                assert pg.lex_compare(pg.market_lex_potential(market, moved), before) == pg.LESS
                checked += 1
print(f"market potential decreased across {checked} better responses")
print("market equilibria:", [{p: "".join(sorted(s)) for p, s in prof.items()} for prof in pg.brute_force_pne(market)])

# And the opposite bridge: any priority game is a market whose scores are
# the priority values themselves.
from prioritygames.generator import GenParams, generate_random_instance  # noqa: E402
from prioritygames.jsonio import document_to_source  # noqa: E402

source = document_to_source(
    generate_random_instance(GenParams(players=3, resources=3, space_kind="singleton", levels=2), 7)
)
embedded = pg.reduce_priority_to_market(source)
for prof in pg.enumerate_profiles(source):
    for i in source.players():
        assert pg.player_cost(source, prof, i) == pg.market_player_cost(embedded, prof, i)
print("priority -> market embedding verified on a random game")
