import random
from pathlib import Path

import pytest

from ansible_collections.unity.contexture.plugins.plugin_utils.models import PreparationEmpiricalModel
from ansible_collections.unity.contexture.plugins.plugin_utils.quantum import builtin_bell, builtin_pbr

from randomized import generated_models, random_scenario, random_tables

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def bell():
    return builtin_bell()


@pytest.fixture(scope="session")
def pbr():
    return builtin_pbr()


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus():
    """
    (model, generating family or None) pairs: 50 that factor through some D and mu,
    then 15 unrelated column-stochastic tables
    """
    rng = random.Random(2024)
    models = generated_models(rng, 50)
    for _ in range(15):
        scenario = random_scenario(rng)
        models.append((PreparationEmpiricalModel(scenario, random_tables(rng, scenario)), None))
    return models
