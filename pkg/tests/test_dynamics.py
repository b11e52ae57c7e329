import pytest

import prioritygames as pg
from conftest import gen_game, make_t1_consistent
from prioritygames.oracle import _profile_is_pne_naive


def constant_table(value, bound=3):
    return pg.table_from_function(lambda x, y: value, bound)


def b1_forcing_game() -> pg.Game:
    """Inserting player 2 onto e makes equal-priority player 1 want to leave."""
    d1e = pg.TableDelay(
        entries={
            (0, 1): pg.cost(1),
            (0, 2): pg.cost(5),
            (0, 3): pg.cost(5),
            (1, 1): pg.cost(9),
            (1, 2): pg.cost(9),
            (2, 1): pg.cost(9),
        },
        bound=3,
    )
    return pg.build_game(
        n_players=2,
        resources=["e", "f"],
        spaces={1: pg.SingletonSpace(["e", "f"]), 2: pg.SingletonSpace(["e", "f"])},
        priorities=pg.PriorityFunction.uniform(["e", "f"], {1: 1, 2: 1}),
        delays={
            "e": pg.PerPlayerDelay(specs={1: d1e, 2: constant_table(1)}),
            "f": pg.PerPlayerDelay(specs={1: constant_table(2), 2: constant_table(9)}),
        },
    )


class TestBestResponse:
    def test_t1_example(self, t1):
        assert pg.best_response(t1, pg.profile({1: "a", 2: "a"}), 2) == {"b"}

    def test_keeps_current_when_tied_optimal(self, t1):
        prof = pg.profile({1: "a", 2: "b"})
        assert pg.best_response(t1, prof, 1) == {"a"}

    def test_uniform_rank_two(self):
        game = pg.build_game(
            n_players=1,
            resources=["a", "b", "c"],
            spaces={1: pg.UniformMatroid(["a", "b", "c"], 2)},
            priorities=pg.PriorityFunction({r: {1: 1} for r in "abc"}),
            delays={"a": constant_table(3), "b": constant_table(1), "c": constant_table(2)},
        )
        assert pg.best_response(game, pg.profile({1: {"a", "b"}}), 1) == {"b", "c"}


class TestRunDynamics:
    def test_t1_round_robin(self, t1):
        final, trace = pg.run_dynamics(t1, pg.profile({1: "a", 2: "a"}))
        assert trace.status == "Converged"
        assert len(trace.steps) == 1
        assert final == pg.profile({1: "a", 2: "b"})
        assert trace.steps[0].player == 2

    def test_pne_start_zero_steps(self, t1):
        final, trace = pg.run_dynamics(t1, pg.profile({1: "a", 2: "b"}))
        assert trace.status == "Converged" and trace.steps == []

    def test_cap_zero(self, t1):
        final, trace = pg.run_dynamics(t1, pg.profile({1: "a", 2: "a"}), cap=0)
        assert trace.status == "CapReached" and trace.steps == []

    @pytest.mark.parametrize("policy", ["roundrobin", "first", "best"])
    def test_policies_converge_to_pne(self, policy):
        for seed in range(8):
            game = gen_game(500 + seed, players=3, resources=3, space_kind="mixed")
            start = pg.State({p: game.spaces[p].all_bases()[0] for p in game.players()})
            final, trace = pg.run_dynamics(game, start, policy=policy, cap=5000)
            assert trace.status == "Converged"
            assert pg.is_pure_nash(game, final)
            for step in trace.steps:
                assert step.cost_after < step.cost_before

    def test_matroid_moves_are_single_swaps(self):
        game = pg.build_game(
            n_players=1,
            resources=["a", "b", "c", "d"],
            spaces={1: pg.UniformMatroid(["a", "b", "c", "d"], 2)},
            priorities=pg.PriorityFunction({r: {1: 1} for r in "abcd"}),
            delays={
                "a": constant_table(5),
                "b": constant_table(5),
                "c": constant_table(1),
                "d": constant_table(1),
            },
        )
        final, trace = pg.run_dynamics(game, pg.profile({1: {"a", "b"}}))
        assert final == pg.profile({1: {"c", "d"}})
        assert len(trace.steps) == 2
        previous = frozenset({"a", "b"})
        for step in trace.steps:
            assert len(previous - step.to) == 1 and len(step.to - previous) == 1
            assert step.cost_after < step.cost_before
            previous = step.to

    def test_bad_policy_rejected(self, t1):
        with pytest.raises(ValueError):
            pg.run_dynamics(t1, pg.profile({1: "a", 2: "b"}), policy="zigzag")

    def test_infinite_plateau_move_recorded_whole(self):
        # both of player 1's resources cost infinity (a better-ranked player
        # holds them), so no single swap strictly improves; the move must be
        # recorded as one step that still strictly decreases her cost
        game = pg.build_game(
            n_players=2,
            resources=["e", "f", "g", "h"],
            spaces={
                1: pg.UniformMatroid(["e", "f", "g", "h"], 2),
                2: pg.ExplicitSpace([["e", "f"]]),
            },
            priorities=pg.PriorityFunction(
                {"e": {1: 2, 2: 1}, "f": {1: 2, 2: 1}, "g": {1: 1, 2: 9}, "h": {1: 1, 2: 9}}
            ),
            delays={r: pg.ClassicDelay(values=(pg.cost(1), pg.cost(2))) for r in "efgh"},
        )
        start = pg.profile({1: {"e", "f"}, 2: {"e", "f"}})
        assert pg.player_cost(game, start, 1) == pg.INFINITY
        final, trace = pg.run_dynamics(game, start)
        assert trace.status == "Converged"
        assert final.strategy(1) == {"g", "h"}
        assert len(trace.steps) == 1
        assert trace.steps[0].cost_before == pg.INFINITY
        assert trace.steps[0].cost_after < pg.INFINITY
        assert pg.certify_trace(game, trace).ok


class TestLayeredSolver:
    def test_consistent_t1(self):
        game = make_t1_consistent()
        final, trace = pg.solve_consistent_layered(game)
        assert final == pg.profile({1: "a", 2: "b"})
        assert pg.is_pure_nash(game, final)
        assert final in pg.brute_force_pne(game)

    def test_single_layer_plain_descent(self):
        game = gen_game(42, players=3, resources=3, space_kind="singleton", levels=1)
        final, trace = pg.solve_consistent_layered(game)
        assert pg.is_pure_nash(game, final)

    def test_affine_two_layers(self):
        src = gen_game(43, players=3, resources=2, space_kind="singleton", model="affine")
        final, trace = pg.solve_consistent_layered(src)
        assert pg.is_pure_nash(src, final)
        assert final in pg.brute_force_pne(src)

    def test_inconsistent_rejected(self, t1):
        with pytest.raises(pg.InconsistentPrioritiesError):
            pg.solve_consistent_layered(t1)

    def test_player_specific_layers(self):
        for seed in range(6):
            game = gen_game(
                600 + seed,
                players=3,
                resources=3,
                space_kind="singleton",
                consistent=True,
                player_specific=True,
                levels=2,
            )
            final, trace = pg.solve_consistent_layered(game)
            assert _profile_is_pne_naive(game, final)

    def test_mixed_spaces_oracle_check(self):
        for seed in range(6):
            game = gen_game(
                700 + seed, players=3, resources=3, space_kind="mixed", consistent=True, levels=2
            )
            final, trace = pg.solve_consistent_layered(game)
            assert pg.is_pure_nash(game, final)
            report = pg.certify_trace(game, trace)
            assert report.ok, report.summary()

    def test_classic_delays_with_infinite_entries(self):
        # acceptance-style sweep over consistent games whose wrapped delays
        # hit the infinite branch as soon as a better-ranked player shares
        for seed in range(8):
            game = gen_game(
                750 + seed,
                players=3,
                resources=3,
                space_kind="singleton",
                model="classic",
                consistent=True,
                levels=2,
            )
            final, trace = pg.solve_consistent_layered(game)
            assert pg.is_pure_nash(game, final)
            assert final in pg.brute_force_pne(game)


class TestInsertionSolver:
    def test_t1_run(self, t1):
        final, trace = pg.solve_insertion(t1)
        assert final == pg.profile({1: "a", 2: "b"})
        stats = pg.count_steps(trace)
        assert stats.placements == 2 and stats.discards == 0
        assert [s.phase for s in trace.steps] == ["insert", "insert"]

    def test_single_player(self):
        game = gen_game(44, players=1, resources=3, space_kind="singleton")
        final, trace = pg.solve_insertion(game)
        assert pg.count_steps(trace).placements == 1
        assert pg.is_pure_nash(game, final)

    def test_case_b1_discard_and_reinsert(self):
        game = b1_forcing_game()
        final, trace = pg.solve_insertion(game)
        stats = pg.count_steps(trace)
        assert stats.discards == 1
        assert final == pg.profile({1: "f", 2: "e"})
        assert _profile_is_pne_naive(game, final)
        discard = [s for s in trace.steps if s.to is None]
        assert discard[0].player == 1

    def test_dead_ground_elements_never_chosen(self):
        # a rank-1 partition matroid with a zero cap: resource d is in the
        # ground set but {d} is not a strategy, so insertion (and the
        # tolerance scan) must ignore it even though d looks free
        space = pg.PartitionMatroid([["a", "b"], ["d"]], [1, 0])
        cheap_d = {
            r: pg.table_from_function(lambda x, y: 5 * x + 5 * y if r != "d" else 0, 3)
            for r in ("a", "b", "d")
        }
        game = pg.build_game(
            n_players=2,
            resources=["a", "b", "d"],
            spaces={1: space, 2: space},
            priorities=pg.PriorityFunction.uniform(["a", "b", "d"], {1: 1, 2: 2}),
            delays=cheap_d,
        )
        assert game.is_singleton_game()
        final, trace = pg.solve_insertion(game)
        for p in (1, 2):
            assert final.strategy(p) != {"d"}
        assert pg.is_pure_nash(game, final)
        # the unreachable free resource must not cap the tolerance at 0;
        # the real ceiling is b's entry delay 5, beaten first at y = 2
        assert pg.tol_value(game, pg.State({1: "a"}), 1) == 1

    def test_non_singleton_rejected(self):
        game = pg.build_game(
            n_players=1,
            resources=["a", "b"],
            spaces={1: pg.UniformMatroid(["a", "b"], 2)},
            priorities=pg.PriorityFunction({"a": {1: 1}, "b": {1: 1}}),
            delays={r: constant_table(1) for r in ("a", "b")},
        )
        with pytest.raises(pg.NotSingletonError):
            pg.solve_insertion(game)

    def test_random_player_specific_instances(self):
        for seed in range(8):
            game = gen_game(
                800 + seed,
                players=4,
                resources=3,
                space_kind="singleton",
                player_specific=True,
                levels=3,
            )
            final, trace = pg.solve_insertion(game)
            assert _profile_is_pne_naive(game, final)
            report = pg.certify_trace(game, trace)
            assert report.ok, report.summary()

    def test_multi_eviction_rebalance_round(self):
        # a double same-level eviction thins a resource faster than the
        # newcomer fills it; a player elsewhere then prefers it and must be
        # re-queued (rebalance), after which the run still ends at a
        # certified equilibrium
        game = gen_game(
            40017, players=8, resources=6, space_kind="singleton", levels=2
        )
        final, trace = pg.solve_insertion(game)
        stats = pg.count_steps(trace)
        assert stats.by_phase.get("rebalance", 0) >= 1
        assert _profile_is_pne_naive(game, final)
        report = pg.certify_trace(game, trace)
        assert report.ok, report.summary()


class TestCountSteps:
    def test_layered_t1(self):
        game = make_t1_consistent()
        _, trace = pg.solve_consistent_layered(game)
        stats = pg.count_steps(trace)
        assert stats.placements == 2 and stats.discards == 0
        assert stats.by_phase == {"layer:1": 1, "layer:2": 1}

    def test_empty_trace(self, t1):
        _, trace = pg.run_dynamics(t1, pg.profile({1: "a", 2: "b"}))
        stats = pg.count_steps(trace)
        assert stats.total == 0 and stats.rounds == 0

    def test_b1_trace(self):
        _, trace = pg.solve_insertion(b1_forcing_game())
        assert pg.count_steps(trace).discards == 1
