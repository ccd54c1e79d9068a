import copy
import random
from fractions import Fraction

import pytest

from ansible_collections.unity.contexture.plugins.plugin_utils.errors import ModelError
from ansible_collections.unity.contexture.plugins.plugin_utils.models import (
    MeasurementEmpiricalModel,
    PossibilisticModel,
    PreparationEmpiricalModel,
    from_data,
    load_model,
    marginal,
    parse,
    possibilistic_reduce,
    serialize,
    stack,
    to_data,
    validate,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import BoolMatrix, RatMatrix

from randomized import random_measurement_model


def test_bell_fixture_is_byte_exact(bell, fixtures):
    assert serialize(bell) == (fixtures / "bell.json").read_bytes()


def test_pbr_fixture_is_byte_exact(pbr, fixtures):
    assert serialize(pbr) == (fixtures / "pbr.json").read_bytes()


def test_load_model(fixtures, bell, pbr):
    assert load_model(str(fixtures / "bell.json")) == bell
    assert load_model(str(fixtures / "pbr.json")) == pbr


def test_missing_file():
    with pytest.raises(ModelError, match="unable to read"):
        load_model("/nonexistent/model.json")


def test_validate_reports(bell, pbr):
    assert validate(bell).to_json() == {"valid": True, "kind": "measurement", "contexts": 4, "columns_checked": 4}
    assert validate(pbr).to_json() == {"valid": True, "kind": "preparation", "contexts": 4, "columns_checked": 16}


def _broken(model, mutate) -> dict:
    data = copy.deepcopy(to_data(model))
    mutate(data)
    return data


def test_column_sum_error_has_a_path(bell):
    data = _broken(bell, lambda d: d["tables"].__setitem__(0, [["1/2", "1/2", "1/6", "0"]]))
    with pytest.raises(ModelError) as e:
        from_data(data)
    assert e.value.path == "tables[0][0]"
    assert "7/6" in e.value.reason


def test_preparation_column_error_has_a_path(pbr):
    def mutate(d):
        d["tables"][2][0][1] = "1/2"

    with pytest.raises(ModelError) as e:
        from_data(_broken(pbr, mutate))
    assert e.value.path == "tables[2][*][1]"
    assert "5/4" in e.value.reason


def test_negative_entry(bell):
    def mutate(d):
        d["tables"][1] = [["1/2", "-1/8", "1/8", "1/2"]]

    with pytest.raises(ModelError) as e:
        from_data(_broken(bell, mutate))
    assert e.value.path == "tables[1][0][1]"


def test_binary_floats_are_rejected(bell):
    text = serialize(bell).decode().replace('"1/2"', "0.5", 1)
    with pytest.raises(ModelError) as e:
        parse(text)
    assert e.value.path == "tables[0][0][0]"
    assert "binary float" in e.value.reason


def test_decimal_strings_are_exact(bell):
    text = serialize(bell).decode().replace('"3/8"', '"0.375"')
    assert parse(text) == bell


@pytest.mark.parametrize(
    "mutate,path",
    [
        (lambda d: d.pop("outcomes"), "outcomes"),
        (lambda d: d.__setitem__("kind", "bogus"), "kind"),
        (lambda d: d.__setitem__("extra", 1), "extra"),
        (lambda d: d.__setitem__("cover", [["a", "b"]]), "cover"),
        (lambda d: d["tables"].pop(), "tables"),
        (lambda d: d["tables"][0][0].pop(), "tables[0][0]"),
        (lambda d: d["tables"][0][0].__setitem__(2, True), "tables[0][0][2]"),
        (lambda d: d["cover"][0].__setitem__(0, None), "cover[0][0]"),
    ],
)
def test_schema_errors(bell, mutate, path):
    with pytest.raises(ModelError) as e:
        from_data(_broken(bell, mutate))
    assert e.value.path == path


def test_invalid_json():
    with pytest.raises(ModelError, match="invalid JSON"):
        parse("{")


def test_possibilistic_reduce(pbr):
    pmodel = possibilistic_reduce(pbr)
    assert pmodel.kind == "preparation"
    assert possibilistic_reduce(pmodel) is pmodel
    # every PBR column has exactly one zero
    Ebar = stack(pmodel)
    assert Ebar.rows == 4 and Ebar.cols == 16
    assert all(sum(Ebar.column(j)) == 3 for j in range(Ebar.cols))


def test_possibilistic_preparation_needs_a_possible_outcome(pbr):
    tables = possibilistic_reduce(pbr).tables
    bad = BoolMatrix.from_rows([[0] * 4] * 4)
    with pytest.raises(ModelError) as e:
        PossibilisticModel(pbr.scenario, (tables[0], bad, tables[2], tables[3]))
    assert e.value.path == "tables[1][*][0]"


def test_stack_shapes(bell, pbr):
    E_p = stack(bell)
    assert (E_p.rows, E_p.cols) == (16, 1)
    assert E_p.column(0)[:4] == (Fraction(1, 2), 0, 0, Fraction(1, 2))
    Ebar_p = stack(possibilistic_reduce(bell))
    assert (Ebar_p.rows, Ebar_p.cols) == (16, 1)
    E_m = stack(pbr)
    assert (E_m.rows, E_m.cols) == (4, 16)


def test_marginal(bell):
    # (a, b) and (a', b) share b
    assert marginal(bell, 0, ("b",)) == (Fraction(1, 2), Fraction(1, 2))
    assert marginal(bell, 1, ("b",)) == (Fraction(1, 2), Fraction(1, 2))
    assert marginal(bell, 0, ()) == (Fraction(1),)


def test_model_shape_checks(bell, pbr):
    with pytest.raises(ModelError):
        MeasurementEmpiricalModel(bell.scenario, bell.distributions[:3])
    with pytest.raises(ModelError):
        PreparationEmpiricalModel(pbr.scenario, pbr.tables[:3] + (RatMatrix.zeros(4, 2),))


def test_random_models_survive_serialization(corpus):
    rng = random.Random(14)
    models = [model for model, _ in corpus] + [random_measurement_model(rng) for _ in range(30)]
    for model in models:
        assert parse(serialize(model)) == model
        assert serialize(parse(serialize(model))) == serialize(model)
