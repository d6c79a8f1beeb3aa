import json
from fractions import Fraction as F

import pytest

from src.core import Instance
from src.errors import InvalidArgumentError
from src.indexable import ExplicitTable, SetFunctionGame, TravelSearch
from src.instance_file import (
    build,
    dump_document,
    load_hider,
    load_instance,
    parse_document,
)
from src.tree import RootedTree


def write(tmp_path, data, name="instance.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestLoadInstance:
    def test_rescue(self, instances_dir):
        instance = load_instance(instances_dir / "rescue_two.json")
        assert isinstance(instance, Instance)
        assert instance.k == 1
        assert instance.probabilities == {"1": F(1, 2), "2": F(3, 4)}

    def test_tree(self, instances_dir, worked_tree):
        tree = load_instance(instances_dir / "worked_tree.json")
        assert isinstance(tree, RootedTree)
        assert tree == worked_tree

    def test_travel_search(self, instances_dir):
        game = load_instance(instances_dir / "travel_search.json")
        assert isinstance(game, SetFunctionGame)
        assert isinstance(game.spec, TravelSearch)
        assert game.k == 2
        assert game.spec.costs == (F(1), F(2), F(1, 2), F(3))

    def test_table(self, instances_dir):
        game = load_instance(instances_dir / "table_not_indexable.json")
        assert isinstance(game.spec, ExplicitTable)
        assert game.spec.evaluate(frozenset({"1"})) == 3

    @pytest.mark.parametrize("name", ["discounted.json", "additive.json", "rescue_pairs.json"])
    def test_other_kinds_load(self, instances_dir, name):
        assert load_instance(instances_dir / name) is not None

    def test_decimal_literal_rejected(self, instances_dir):
        with pytest.raises(InvalidArgumentError) as exc:
            load_instance(instances_dir / "malformed_decimal.json")
        assert "locations.0.p" in exc.value.message

    def test_json_number_rejected(self):
        data = {"kind": "rescue", "k": 1, "locations": [{"id": "1", "p": 0.5}, {"id": "2", "p": "1/3"}]}
        with pytest.raises(InvalidArgumentError):
            parse_document(data)

    def test_unknown_kind(self):
        with pytest.raises(InvalidArgumentError):
            parse_document({"kind": "graph", "k": 1})

    def test_unexpected_field(self):
        data = {"kind": "rescue", "k": 1, "extra": True, "locations": [{"id": "1", "p": "1/2"}]}
        with pytest.raises(InvalidArgumentError):
            parse_document(data)

    def test_invalid_probability_is_reported(self, tmp_path):
        path = write(tmp_path, {"kind": "rescue", "k": 1, "locations": [{"id": "1", "p": "1/2"}, {"id": "2", "p": "1"}]})
        with pytest.raises(InvalidArgumentError) as exc:
            load_instance(path)
        assert exc.value.details["issues"][0]["code"] == "probability_out_of_range"

    def test_duplicate_location_ids(self):
        data = {"kind": "rescue", "k": 1, "locations": [{"id": "1", "p": "1/2"}, {"id": "1", "p": "1/3"}]}
        with pytest.raises(InvalidArgumentError):
            build(parse_document(data))

    def test_repeated_table_subset(self):
        data = {
            "kind": "table",
            "k": 1,
            "locations": [{"id": "1"}, {"id": "2"}],
            "table": [
                {"set": [], "value": "4"},
                {"set": ["1"], "value": "3"},
                {"set": ["2"], "value": "2"},
                {"set": ["1", "2"], "value": "1"},
                {"set": ["2", "1"], "value": "1/2"},
            ],
        }
        with pytest.raises(InvalidArgumentError, match="more than once") as exc:
            build(parse_document(data))
        assert exc.value.details["subset"] == ["1", "2"]

    def test_disconnected_tree(self):
        data = {
            "kind": "tree",
            "root": "O",
            "vertices": [{"id": "O", "p": "1/2"}, {"id": "a", "p": "1/2"}],
            "edges": [],
        }
        with pytest.raises(InvalidArgumentError):
            build(parse_document(data))

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            load_instance(tmp_path / "absent.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{kind: rescue", encoding="utf-8")
        with pytest.raises(InvalidArgumentError):
            load_instance(path)


class TestDumpDocument:
    @pytest.mark.parametrize(
        "name",
        [
            "rescue_three.json",
            "discounted.json",
            "additive.json",
            "travel_search.json",
            "table_not_indexable.json",
            "worked_tree.json",
        ],
    )
    def test_reloads_to_the_same_object(self, instances_dir, name):
        loaded = load_instance(instances_dir / name)
        assert build(parse_document(dump_document(loaded))) == loaded

    def test_tree_document_shape(self, worked_tree):
        document = dump_document(worked_tree)
        assert document["root"] == "O"
        assert document["edges"][0] == ["O", "A"]
        assert {"id": "D", "p": "3/5"} in document["vertices"]


class TestLoadHider:
    def test_weights_are_fractions(self, instances_dir):
        assert load_hider(instances_dir / "hider_three.json") == {
            "1": F(1, 2),
            "2": F(3, 10),
            "3": F(1, 5),
        }

    def test_decimal_weight_rejected(self, tmp_path):
        path = write(tmp_path, {"hider": {"1": "0.5", "2": "1/2"}}, "hider.json")
        with pytest.raises(InvalidArgumentError):
            load_hider(path)

    def test_missing_hider_key(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            load_hider(write(tmp_path, {"weights": {}}, "hider.json"))
