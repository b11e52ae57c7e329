from fractions import Fraction

import pytest

import prioritygames as pg
from prioritygames.core import domain_points
from conftest import make_t1


def linear_table(bound):
    return pg.table_from_function(lambda x, y: 2 * x + y, bound)


class TestBuildGame:
    def test_t1_is_valid(self):
        game = make_t1()
        assert game.n_players == 2
        assert game.resources == ("a", "b")
        assert not game.player_specific
        assert game.is_singleton_game()

    def test_empty_strategy_space_rejected(self):
        with pytest.raises(pg.ValidationFailed):
            pg.ExplicitSpace([])

    def test_incomplete_table_rejected(self):
        entries = {
            (x, y): pg.cost(2 * x + y)
            for x, y in domain_points(4)
            if (x, y) != (0, 2)
        }
        bad = pg.TableDelay(entries=entries, bound=4)
        with pytest.raises(pg.ValidationFailed) as err:
            pg.build_game(
                n_players=2,
                resources=["a", "b"],
                spaces={1: pg.SingletonSpace(["a", "b"]), 2: pg.SingletonSpace(["a", "b"])},
                priorities=pg.PriorityFunction({"a": {1: 1, 2: 2}, "b": {1: 2, 2: 1}}),
                delays={"a": bad, "b": linear_table(4)},
            )
        assert any(
            v.code == "MISSING_ENTRY" and "x=0, y=2" in v.where for v in err.value.violations
        )

    def test_missing_priority_rejected(self):
        with pytest.raises(pg.ValidationFailed) as err:
            pg.build_game(
                n_players=2,
                resources=["a", "b"],
                spaces={1: pg.SingletonSpace(["a", "b"]), 2: pg.SingletonSpace(["a", "b"])},
                priorities=pg.PriorityFunction({"a": {1: 1, 2: 2}, "b": {1: 2}}),
                delays={r: linear_table(4) for r in ("a", "b")},
            )
        assert any(v.code == "MISSING_PRIORITY" for v in err.value.violations)

    def test_small_bound_rejected_for_singleton_game(self):
        # two singleton players need tables up to 2n - 1 = 3
        with pytest.raises(pg.ValidationFailed) as err:
            pg.build_game(
                n_players=2,
                resources=["a"],
                spaces={1: pg.SingletonSpace(["a"]), 2: pg.SingletonSpace(["a"])},
                priorities=pg.PriorityFunction({"a": {1: 1, 2: 1}}),
                delays={"a": linear_table(2)},
            )
        assert any(v.code == "BOUND_TOO_SMALL" for v in err.value.violations)

    def test_axiom_breach_rejected(self):
        decreasing = pg.table_from_function(lambda x, y: 10 - y, 3)
        with pytest.raises(pg.ValidationFailed) as err:
            pg.build_game(
                n_players=1,
                resources=["a"],
                spaces={1: pg.SingletonSpace(["a"])},
                priorities=pg.PriorityFunction({"a": {1: 1}}),
                delays={"a": decreasing},
            )
        assert any("MONOTONE" in v.code for v in err.value.violations)


class TestEvaluateDelay:
    def test_affine(self):
        spec = pg.AffineDelay(alpha=Fraction(2), beta=Fraction(1))
        assert pg.evaluate_delay(spec, 1, 3) == pg.cost(7)

    def test_classic_wrap_cases(self):
        spec = pg.ClassicDelay(values=tuple(pg.cost(y * y) for y in (1, 2, 3)))
        assert pg.evaluate_delay(spec, 0, 3) == pg.cost(9)
        assert pg.evaluate_delay(spec, 2, 1) == pg.INFINITY

    def test_table(self):
        assert pg.evaluate_delay(linear_table(4), 0, 1) == pg.cost(1)

    def test_out_of_bound(self):
        with pytest.raises(pg.OutOfBoundError):
            pg.evaluate_delay(linear_table(4), 3, 2)
        with pytest.raises(pg.OutOfBoundError):
            pg.evaluate_delay(linear_table(4), 0, 0)

    def test_per_player_dispatch(self):
        spec = pg.PerPlayerDelay(
            specs={1: linear_table(4), 2: pg.AffineDelay(alpha=Fraction(0), beta=Fraction(5))}
        )
        assert pg.evaluate_delay(spec, 0, 2, player=1) == pg.cost(2)
        assert pg.evaluate_delay(spec, 0, 2, player=2) == pg.cost(5)
        with pytest.raises(TypeError):
            pg.evaluate_delay(spec, 0, 2)

    def test_pure_and_deterministic(self):
        spec = linear_table(6)
        assert all(
            pg.evaluate_delay(spec, 1, 2) == pg.evaluate_delay(spec, 1, 2) for _ in range(3)
        )


class TestValidateDelayProperties:
    def test_linear_table_clean(self):
        assert pg.validate_delay_properties(linear_table(4), 4) == []

    def test_ignoring_x_breaks_replacement(self):
        spec = pg.table_from_function(lambda x, y: y, 3)
        report = pg.validate_delay_properties(spec, 3)
        assert any(
            v.code == "REPLACEMENT_FAILED" and v.where == "(x=0, y=2)" for v in report
        )

    @pytest.mark.parametrize(
        "alpha,beta",
        [(Fraction(0), Fraction(0)), (Fraction(2), Fraction(1)), (Fraction(7, 2), Fraction(1, 3))],
    )
    def test_affine_always_clean(self, alpha, beta):
        spec = pg.AffineDelay(alpha=alpha, beta=beta)
        assert pg.validate_delay_properties(spec, 6) == []

    def test_affine_clean_up_to_bound_12(self):
        spec = pg.AffineDelay(alpha=Fraction(3, 2), beta=Fraction(5))
        assert pg.validate_delay_properties(spec, 12) == []

    def test_classic_wrap_iff_nondecreasing(self):
        good = pg.ClassicDelay(values=(pg.cost(1), pg.cost(1), pg.cost(4)))
        bad = pg.ClassicDelay(values=(pg.cost(3), pg.cost(1), pg.cost(4)))
        assert good.univariate_nondecreasing()
        assert not bad.univariate_nondecreasing()
        assert pg.validate_delay_properties(good, 4) == []
        assert pg.validate_delay_properties(bad, 4) != []

    def test_bound_precondition(self):
        with pytest.raises(ValueError):
            pg.validate_delay_properties(linear_table(4), 1)


def test_required_bound_rule():
    assert pg.required_table_bound(4, singleton=True) == 7
    assert pg.required_table_bound(4, singleton=False) == 4
    assert pg.required_table_bound(1, singleton=True) == 2


def test_priority_function_consistency_detection():
    same = pg.PriorityFunction({"a": {1: 1, 2: 2}, "b": {1: 1, 2: 2}})
    assert same.consistent
    mixed = pg.PriorityFunction({"a": {1: 1, 2: 2}, "b": {1: 2, 2: 1}})
    assert not mixed.consistent
    with pytest.raises(pg.ValidationFailed):
        pg.PriorityFunction({"a": {1: 0}})


def test_noncontiguous_priorities_supported():
    game = pg.build_game(
        n_players=2,
        resources=["a"],
        spaces={1: pg.SingletonSpace(["a"]), 2: pg.SingletonSpace(["a"])},
        priorities=pg.PriorityFunction({"a": {1: 3, 2: 9}}),
        delays={"a": linear_table(4)},
    )
    prof = pg.profile({1: "a", 2: "a"})
    assert pg.player_cost(game, prof, 1) == pg.cost(1)
    assert pg.player_cost(game, prof, 2) == pg.cost(3)
