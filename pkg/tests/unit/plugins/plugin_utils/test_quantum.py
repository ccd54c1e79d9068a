import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from ansible_collections.unity.contexture.plugins.plugin_utils.compat import no_signalling
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import QuantumSpecError, RationalizeError
from ansible_collections.unity.contexture.plugins.plugin_utils.models import validate
from ansible_collections.unity.contexture.plugins.plugin_utils.quantum import (
    BUILTINS,
    KET_0,
    KET_1,
    KET_MINUS,
    KET_PLUS,
    QuantumMeasurementSpec,
    bell_spec,
    born,
    check_povm,
    load_spec,
    pbr_spec,
    rationalize,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import RatMatrix

H = 1 / math.sqrt(2)


@pytest.mark.parametrize(
    "x,expected",
    [
        (0.375, Fraction(3, 8)),
        (0.2499999999, Fraction(1, 4)),
        (1 / 3, Fraction(1, 3)),
        (0.0, Fraction(0)),
        (1.0000000000000002, Fraction(1)),
        (math.cos(math.pi / 6) ** 2 / 2, Fraction(3, 8)),
        (0, Fraction(0)),
        (1, Fraction(1)),
        (Fraction(2, 3), Fraction(2, 3)),
        (np.float64(0.625), Fraction(5, 8)),
    ],
)
def test_rationalize(x, expected):
    assert rationalize(x) == expected


@pytest.mark.parametrize("x", [math.pi, float("nan"), float("inf"), 1 / 129])
def test_rationalize_failures(x):
    with pytest.raises(RationalizeError):
        rationalize(x)


def test_rationalize_options():
    assert rationalize(1 / 129, max_denominator=256) == Fraction(1, 129)
    assert rationalize(0.251, tolerance=0.01) == Fraction(1, 4)
    assert rationalize(0.5, tolerance=1) == Fraction(1, 2)
    with pytest.raises(RationalizeError, match="tolerance must be positive"):
        rationalize(0.5, tolerance=0)


def test_builtins(bell, pbr):
    assert BUILTINS["bell"]() == bell
    assert BUILTINS["pbr"]() == pbr
    eighth = Fraction(1, 8)
    assert bell.distributions == (
        (Fraction(1, 2), 0, 0, Fraction(1, 2)),
        (3 * eighth, eighth, eighth, 3 * eighth),
        (3 * eighth, eighth, eighth, 3 * eighth),
        (eighth, 3 * eighth, 3 * eighth, eighth),
    )


def test_pbr_tables(pbr):
    quarter, half = Fraction(1, 4), Fraction(1, 2)
    assert pbr.tables[0] == RatMatrix.from_rows(
        [
            [0, half, half, 0],
            [quarter] * 4,
            [quarter] * 4,
            [half, 0, 0, half],
        ]
    )
    for table in pbr.tables:
        assert all(sum(1 for x in table.column(j) if x) == 3 for j in range(table.cols))


def test_pbr_measurement_is_a_povm():
    report = check_povm(pbr_spec().effects)
    assert report.ok
    assert report.smallest_eigenvalue > -1e-12


def test_povm_report_flags_incomplete_effects():
    report = check_povm([np.diag([1, 0]), np.diag([0, 0.5])])
    assert not report.ok
    assert report.deviation == pytest.approx(0.5)


def test_coarse_denominators_fail(bell):
    with pytest.raises(RationalizeError):
        born(bell_spec(), max_denominator=2)
    assert born(bell_spec(), max_denominator=8) == bell


def _measurement_data(state, bases=None) -> dict:
    bases = bases or {"a": [[1, 0], [0, 1]], "b": [[1, 0], [0, 1]]}
    return {
        "kind": "measurement",
        "dims": [2, 2],
        "state": state,
        "outcomes": ["0", "1"],
        "measurements": {label: {"site": site, "basis": basis} for site, (label, basis) in enumerate(bases.items())},
        "cover": [list(bases)],
    }


def test_measurement_spec_from_json():
    model = born(load_spec(json.dumps(_measurement_data([H, 0, 0, H]))))
    assert model.distributions == ((Fraction(1, 2), 0, 0, Fraction(1, 2)),)


def test_complex_entries():
    # |00> + i|11>
    spec = load_spec(json.dumps(_measurement_data([H, 0, 0, [0, H]])))
    assert spec.state[3] == pytest.approx(1j * H)
    assert born(spec).distributions == ((Fraction(1, 2), 0, 0, Fraction(1, 2)),)


def test_preparation_spec_from_json():
    data = {
        "kind": "preparation",
        "sources": {"p": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]},
        "instances": ["0", "1"],
        "outcomes": ["x", "y"],
        "effects": [[[0.5, 0.5], [0.5, 0.5]], [[0.5, -0.5], [-0.5, 0.5]]],
        "cover": [["p"]],
    }
    model = born(load_spec(json.dumps(data)))
    half = Fraction(1, 2)
    assert model.tables == (RatMatrix.from_rows([[half, half], [half, half]]),)
    assert validate(model).columns_checked == 2


@pytest.mark.parametrize(
    "mutate,match",
    [
        (lambda d: d["measurements"]["a"].__setitem__("basis", [[1, 0], [1, 0]]), "not orthonormal"),
        (lambda d: d.__setitem__("state", [1, 1, 0, 0]), "not normalized"),
        (lambda d: d.__setitem__("dims", [2] * 7), "larger than 64"),
        (lambda d: d["measurements"]["b"].__setitem__("site", 0), "measures one site twice"),
        (lambda d: d["measurements"]["b"].__setitem__("site", 5), "acts on site 5"),
        (lambda d: d.__setitem__("state", [H, 0, 0, "x"]), r"state\[3\]"),
        (lambda d: d.__setitem__("kind", "teleport"), "kind"),
        (lambda d: d.__setitem__("dims", [2, 0]), "dims"),
    ],
)
def test_bad_measurement_specs(mutate, match):
    data = _measurement_data([H, 0, 0, H])
    mutate(data)
    with pytest.raises(QuantumSpecError, match=match):
        load_spec(json.dumps(data))


@pytest.mark.parametrize(
    "rho,match",
    [
        ([[1.5, 0], [0, -0.5]], "not positive semidefinite"),
        ([[1, 1], [0, 0]], "not hermitian"),
        ([[0.5, 0], [0, 0.25]], "trace 1"),
    ],
)
def test_bad_densities(rho, match):
    data = {
        "kind": "preparation",
        "sources": {"p": [[[1, 0], [0, 0]], rho]},
        "instances": ["0", "1"],
        "outcomes": ["x", "y"],
        "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
        "cover": [["p"]],
    }
    with pytest.raises(QuantumSpecError, match=match):
        load_spec(json.dumps(data))


def test_effects_must_sum_to_identity():
    data = {
        "kind": "preparation",
        "sources": {"p": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]},
        "instances": ["0", "1"],
        "outcomes": ["x", "y"],
        "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 0.5]]],
        "cover": [["p"]],
    }
    with pytest.raises(QuantumSpecError, match="sum to the identity"):
        load_spec(json.dumps(data))


def test_invalid_json():
    with pytest.raises(QuantumSpecError, match="invalid JSON"):
        load_spec("{")


def test_random_stabilizer_models_are_valid_and_no_signalling():
    rng = random.Random(5)
    kets = [KET_0, KET_1, KET_PLUS, KET_MINUS]
    computational = np.array([KET_0, KET_1])
    hadamard = np.array([KET_PLUS, KET_MINUS])
    for _ in range(20):
        if rng.random() < 0.5:
            state = np.kron(rng.choice(kets), rng.choice(kets))
        else:
            state = (np.kron(KET_0, KET_0) + np.kron(KET_1, KET_1)) / np.sqrt(2)
        spec = QuantumMeasurementSpec(
            state=state,
            dims=(2, 2),
            measurements=("a", "a'", "b", "b'"),
            sites=(0, 0, 1, 1),
            bases=tuple(rng.choice((computational, hadamard)) for _ in range(4)),
            outcomes=("0", "1"),
            cover=(("a", "b"), ("a'", "b"), ("a", "b'"), ("a'", "b'")),
        )
        model = born(spec)
        assert validate(model).contexts == 4
        assert no_signalling(model).ok
        assert all(4 * x == int(4 * x) for dist in model.distributions for x in dist)
