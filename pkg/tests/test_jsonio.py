import json

import pytest

import prioritygames as pg
from conftest import gen_source
from prioritygames.generator import GenParams, generate_random_instance
from prioritygames.jsonio import (
    document_to_source,
    emit_instance,
    instance_to_document,
    parse_document,
    parse_instance,
)


class TestRoundTrips:
    def test_priority_game_byte_identity(self, t1):
        blob = emit_instance(t1)
        again = emit_instance(parse_instance(blob))
        assert again == blob

    def test_all_models_round_trip(self):
        cases = [
            gen_source(1, players=3, resources=3, space_kind="mixed", levels=2),
            gen_source(2, players=3, resources=3, model="classic", levels=2),
            gen_source(3, players=3, resources=2, model="affine"),
            gen_source(4, players=3, resources=3, model="market"),
            gen_source(
                5, players=2, resources=2, space_kind="singleton", player_specific=True
            ),
        ]
        for src in cases:
            blob = emit_instance(src)
            parsed = document_to_source(parse_document(blob))
            assert emit_instance(parsed) == blob

    def test_parse_normalizes_rationals(self, t1):
        doc = instance_to_document(t1)
        doc["delays"]["a"]["entries"][0][2] = "2/4"  # same value, unreduced
        blob = (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()
        game = parse_instance(blob)
        assert emit_instance(game).find(b"2/4") == -1
        assert game.delays["a"].entries[(0, 1)] == pg.cost("1/2")


class TestParseErrors:
    def doc(self, t1):
        return instance_to_document(t1)

    def test_zero_denominator(self, t1):
        doc = self.doc(t1)
        doc["delays"]["a"]["entries"][0][2] = "3/0"
        with pytest.raises(pg.ParseError):
            document_to_source(doc)

    def test_unknown_top_level_field(self, t1):
        doc = self.doc(t1)
        doc["comment"] = "hello"
        with pytest.raises(pg.ParseError):
            document_to_source(doc)

    def test_unknown_nested_field(self, t1):
        doc = self.doc(t1)
        doc["delays"]["a"]["note"] = "x"
        with pytest.raises(pg.ParseError):
            document_to_source(doc)

    def test_malformed_json_position(self):
        with pytest.raises(pg.ParseError) as err:
            parse_instance(b'{"version": 1,,}')
        assert "line" in str(err.value)

    def test_bad_model(self, t1):
        doc = self.doc(t1)
        doc["model"] = "quantum"
        with pytest.raises(pg.ParseError):
            document_to_source(doc)

    def test_semantic_error_is_validation_failure(self, t1):
        doc = self.doc(t1)
        doc["strategies"]["1"] = {"kind": "singleton", "allowed": ["zz"]}
        with pytest.raises(pg.ValidationFailed):
            document_to_source(doc)

    def test_both_delay_sources_for_one_resource(self, t1):
        doc = self.doc(t1)
        doc["player_specific"] = {"1": {"a": doc["delays"]["a"]}}
        with pytest.raises(pg.ParseError):
            document_to_source(doc)


class TestGenerator:
    def test_deterministic_per_seed(self):
        params = GenParams(players=4, resources=4, space_kind="mixed", levels=3)
        a = generate_random_instance(params, 99)
        b = generate_random_instance(params, 99)
        assert a == b
        blob_a = emit_instance(document_to_source(a))
        blob_b = emit_instance(document_to_source(b))
        assert blob_a == blob_b

    def test_different_seeds_differ(self):
        params = GenParams(players=4, resources=4)
        assert generate_random_instance(params, 1) != generate_random_instance(params, 2)

    def test_validator_sweep_1000_seeds(self):
        # every generated table passes the axiom validator by construction
        checked = 0
        for seed in range(1000):
            model = ("priority", "classic", "affine", "market")[seed % 4]
            kind = ("singleton", "mixed", "uniform", "partition", "graphic")[seed % 5]
            params = GenParams(
                players=2 + seed % 3,
                resources=2 + seed % 3,
                model=model,
                space_kind=kind,
                levels=1 + seed % 3,
                player_specific=(model == "priority" and seed % 6 == 0),
            )
            doc = generate_random_instance(params, 10_000 + seed)
            source = document_to_source(doc)  # build_* validate everything
            assert source.n_players == params.players
            checked += 1
        assert checked == 1000

    def test_levels_one_is_plain_congestion(self):
        game = document_to_source(
            generate_random_instance(GenParams(players=3, resources=3, levels=1), 7)
        )
        assert game.priorities.consistent
        assert {game.priority(r, i) for r in game.resources for i in game.players()} == {1}

    def test_desk_scale_limits(self):
        with pytest.raises(ValueError):
            generate_random_instance(GenParams(players=9, resources=3), 1)
        with pytest.raises(ValueError):
            generate_random_instance(GenParams(players=3, resources=7), 1)
