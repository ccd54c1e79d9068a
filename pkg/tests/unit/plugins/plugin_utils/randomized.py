"""seeded generators shared by the property tests"""

import random
import itertools
from fractions import Fraction

from ansible_collections.unity.contexture.plugins.plugin_utils.incext import (
    ExtensionFamily,
    stacked_extension,
    stacked_incidence,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.models import (
    MeasurementEmpiricalModel,
    PreparationEmpiricalModel,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import RatMatrix
from ansible_collections.unity.contexture.plugins.plugin_utils.scenario import (
    MeasurementScenario,
    PreparationScenario,
)


def random_distribution(rng: random.Random, size: int, denominator: int = 4, zeros: bool = True) -> tuple:
    """a random point of the simplex with the given denominator, optionally with zeros"""
    while True:
        cuts = sorted(rng.randint(0, denominator) for _ in range(size - 1))
        parts = [b - a for a, b in zip([0, *cuts], [*cuts, denominator])]
        if zeros or all(parts):
            return tuple(Fraction(x, denominator) for x in parts)


def random_family(rng: random.Random, sources, instances, zeros: bool = True) -> ExtensionFamily:
    return ExtensionFamily(
        tuple(instances),
        tuple((p, random_distribution(rng, len(instances), 2 * len(instances), zeros)) for p in sources),
    )


def random_scenario(
    rng: random.Random, instances=("0", "1"), sources=None, cover=None, outcomes=None
) -> PreparationScenario:
    """2 or 3 sources, 2 or 3 outcomes, a cover of pairs and singletons unless one is given"""
    if sources is None:
        sources = ("p", "q", "r")[: rng.choice((2, 3))]
    if cover is None:
        pairs = [c for c in itertools.combinations(sources, 2) if rng.random() < 0.7]
        covered = set(itertools.chain.from_iterable(pairs))
        cover = pairs + [(p,) for p in sources if p not in covered]
    if outcomes is None:
        outcomes = ("x", "y", "z")[: rng.choice((2, 3))]
    return PreparationScenario(tuple(sources), tuple(instances), tuple(cover), tuple(outcomes))


TRIANGLE = (("p", "q"), ("q", "r"), ("p", "r"))


def generated_models(rng: random.Random, count: int) -> list:
    """
    (E_m = D S_Y, mu) pairs. every fifth model has three instances, half of those over the triangle cover;
    the rest have two instances, with the triangle cover whenever there are three sources and a coin says so
    """
    models = []
    for n in range(count):
        if n % 5 == 0:
            if n % 10 == 0:
                scenario = random_scenario(rng, ("0", "1", "2"), ("p", "q", "r"), TRIANGLE, ("x", "y"))
            else:
                scenario = random_scenario(rng, ("0", "1", "2"), ("p", "q"))
        else:
            scenario = random_scenario(rng)
            if len(scenario.sources) == 3 and rng.random() < 0.5:
                scenario = random_scenario(rng, scenario.instances, scenario.sources, TRIANGLE)
        fam = random_family(rng, scenario.sources, scenario.instances)
        D = random_response(rng, len(scenario.outcomes), scenario.global_sections().size)
        models.append((model_from_response(scenario, D, fam), fam))
    return models


def split_tables(scenario: PreparationScenario, E_m: RatMatrix) -> tuple[RatMatrix, ...]:
    tables, offset = [], 0
    for c in range(len(scenario.source_cover)):
        width = scenario.context_sections(c).size
        tables.append(
            RatMatrix.from_rows([list(E_m.row(o)[offset : offset + width]) for o in range(E_m.rows)], cols=width)
        )
        offset += width
    return tuple(tables)


def model_from_response(scenario: PreparationScenario, D: RatMatrix, fam: ExtensionFamily):
    """E_m = D S_Y, cut into per-context tables"""
    return PreparationEmpiricalModel(scenario, split_tables(scenario, D @ stacked_extension(scenario, fam)))


def random_response(rng: random.Random, outcomes: int, global_sections: int) -> RatMatrix:
    columns = [random_distribution(rng, outcomes) for _ in range(global_sections)]
    return RatMatrix.from_rows([[c[o] for c in columns] for o in range(outcomes)], cols=global_sections)


def random_tables(rng: random.Random, scenario: PreparationScenario) -> tuple[RatMatrix, ...]:
    """column-stochastic tables with no relation between contexts"""
    outcomes = len(scenario.outcomes)
    return tuple(
        random_response(rng, outcomes, scenario.context_sections(c).size) for c in range(len(scenario.source_cover))
    )




def random_measurement_model(rng: random.Random) -> MeasurementEmpiricalModel:
    """E = M_X d for a random distribution d over global sections, so always classical"""
    measurements = ("a", "b", "c", "d")[: rng.choice((2, 3, 4))]
    pairs = [c for c in itertools.combinations(measurements, 2) if rng.random() < 0.6]
    covered = set(itertools.chain.from_iterable(pairs))
    cover = pairs + [(x,) for x in measurements if x not in covered]
    outcomes = ("0", "1", "2")[: 2 if len(measurements) == 4 else rng.choice((2, 3))]
    scenario = MeasurementScenario(measurements, outcomes, tuple(cover))
    d = random_distribution(rng, scenario.global_sections().size, 8)
    E = stacked_incidence(scenario).apply(d)
    distributions, offset = [], 0
    for c in range(len(cover)):
        width = scenario.context_sections(c).size
        distributions.append(tuple(E[offset : offset + width]))
        offset += width
    return MeasurementEmpiricalModel(scenario, tuple(distributions))
