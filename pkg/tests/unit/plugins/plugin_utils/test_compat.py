from fractions import Fraction

from ansible_collections.unity.contexture.plugins.plugin_utils.compat import no_signalling, prep_compatible
from ansible_collections.unity.contexture.plugins.plugin_utils.incext import ExtensionFamily, uniform_family
from ansible_collections.unity.contexture.plugins.plugin_utils.models import MeasurementEmpiricalModel
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import RatMatrix

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)


def test_bell_is_no_signalling(bell):
    report = no_signalling(bell)
    assert report.ok
    assert len(report.pairs) == 6
    assert report.to_json()["compatible"] is True


def test_signalling_is_reported(bell):
    # (a, b) now says b is always 0, (a', b) still says it is fair
    broken = MeasurementEmpiricalModel(bell.scenario, ((HALF, 0, HALF, 0),) + bell.distributions[1:])
    report = no_signalling(broken)
    assert not report.ok
    violation = next(p for p in report.violations if p.intersection == ("b",))
    assert violation.pair == (("a", "b"), ("a'", "b"))
    assert violation.lhs == (1, 0)
    assert violation.rhs == (HALF, HALF)
    assert violation.describe() == "(a,b) vs (a',b) on (b)"


def test_empty_intersections_compare_total_probability(bell):
    report = no_signalling(bell)
    empty = [p for p in report.pairs if not p.intersection]
    assert [p.pair for p in empty] == [(("a", "b"), ("a'", "b'")), (("a'", "b"), ("a", "b'"))]
    assert all(p.lhs == p.rhs == (1,) for p in empty)


def test_pbr_is_compatible_under_uniform(pbr):
    report = prep_compatible(pbr, uniform_family(pbr.scenario.sources, pbr.scenario.instances))
    assert report.ok
    assert len(report.pairs) == 6


def test_pbr_with_a_skewed_source(pbr):
    fam = ExtensionFamily(
        ("0", "1"),
        (("a", (HALF, HALF)), ("b", (HALF, HALF)), ("a'", (HALF, HALF)), ("b'", (1, 0))),
    )
    report = prep_compatible(pbr, fam)
    assert [p.pair for p in report.violations] == [
        (("a", "b"), ("a", "b'")),
        (("a'", "b"), ("a'", "b'")),
    ]
    first = report.violations[0]
    assert first.intersection == ("a",)
    assert first.lhs == RatMatrix.from_rows([[QUARTER, QUARTER]] * 4)
    assert first.rhs.column(0) == (QUARTER, 0, HALF, QUARTER)
    assert first.rhs.column(1) == (QUARTER, HALF, 0, QUARTER)
    assert first.to_json()["rhs"][1] == ["0", "1/2"]


def test_generated_models_are_compatible(corpus):
    generated = [(model, fam) for model, fam in corpus if fam is not None]
    assert len(generated) >= 50
    assert any(len(model.scenario.instances) == 3 and len(model.scenario.source_cover) == 3 for model, _ in generated)
    for model, fam in generated:
        assert prep_compatible(model, fam).ok
