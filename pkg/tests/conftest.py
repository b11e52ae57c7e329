import itertools

import pytest

import prioritygames as pg
from prioritygames.generator import GenParams, generate_random_instance
from prioritygames.jsonio import document_to_source


def make_t1() -> pg.Game:
    """Two players, resources a/b, opposed priorities, d(x, y) = 2x + y."""
    return pg.build_game(
        n_players=2,
        resources=["a", "b"],
        spaces={1: pg.SingletonSpace(["a", "b"]), 2: pg.SingletonSpace(["a", "b"])},
        priorities=pg.PriorityFunction({"a": {1: 1, 2: 2}, "b": {1: 2, 2: 1}}),
        delays={r: pg.table_from_function(lambda x, y: 2 * x + y, 4) for r in ("a", "b")},
    )


def make_t1_consistent() -> pg.Game:
    return pg.build_game(
        n_players=2,
        resources=["a", "b"],
        spaces={1: pg.SingletonSpace(["a", "b"]), 2: pg.SingletonSpace(["a", "b"])},
        priorities=pg.PriorityFunction.uniform(["a", "b"], {1: 1, 2: 2}),
        delays={r: pg.table_from_function(lambda x, y: 2 * x + y, 4) for r in ("a", "b")},
    )


@pytest.fixture
def t1() -> pg.Game:
    return make_t1()


@pytest.fixture
def t1_consistent() -> pg.Game:
    return make_t1_consistent()


def gen_source(seed: int, **kw):
    """Generate and parse an instance; returns the model's source object."""
    params = GenParams(**kw)
    return document_to_source(generate_random_instance(params, seed))


def gen_game(seed: int, **kw) -> pg.Game:
    """Generate a priority Game (classic/affine sources get reduced)."""
    src = gen_source(seed, **kw)
    if isinstance(src, pg.ClassicGame):
        return pg.reduce_classic_to_priority(src)
    if isinstance(src, pg.AffineGame):
        return pg.reduce_affine_to_priority(src)
    return src


def alternatives(game, prof, player):
    """Every strategy of the player other than her current one."""
    current = prof.strategy(player)
    for cand in game.spaces[player].all_bases():
        if cand != current:
            yield cand


def all_profiles(game):
    players = sorted(game.spaces)
    pools = [game.spaces[p].all_bases() for p in players]
    for combo in itertools.product(*pools):
        yield pg.State(dict(zip(players, combo)))
