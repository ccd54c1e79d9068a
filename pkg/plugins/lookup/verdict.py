DOCUMENTATION = """
  name: verdict
  author: contexture maintainers
  short_description: run a contextuality check on empirical model files
  version_added: 0.1.0
  description:
    - reads each model file (as written by C(contexture gen)) and runs one check on it
    - returns one JSON document per file, a verdict for C(measurement) and C(preparation),
      a compatibility report for C(ns) and C(prep-compat)
  options:
    _terms:
      description: model file paths, searched for like the C(file) lookup
      required: true
      type: list
      elements: str
    check:
      description: which check to run
      type: str
      default: preparation
      choices: [validate, ns, measurement, prep-compat, preparation]
    mode:
      description: |
        prob or poss for measurement models, also auto for preparation models.
        defaults to prob for measurement and auto for preparation.
      type: str
    mu:
      description: |
        extension families for preparation checks, each either "uniform" or {"mu": {source: [weights]}}.
        prep-compat uses the first one. probabilistic mode without mu uses the uniform family.
      type: list
      elements: raw
      default: []
  extends_documentation_fragment:
    - unity.contexture.sweep
"""

from ansible.errors import AnsibleLookupError
from ansible.utils.display import Display
from ansible.plugins.lookup import LookupBase

from ansible_collections.unity.contexture.plugins.plugin_utils.compat import (
    no_signalling,
    prep_compatible,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import (
    ContextureError,
    describe,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.incext import (
    family_from_data,
    uniform_family,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.models import (
    MeasurementEmpiricalModel,
    load_model,
    validate,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.verdict import (
    check_measurement,
    check_preparation,
)

display = Display()


def run_check(model, check: str, mode: str | None, mu: list, max_sweep: int | None) -> dict:
    measurement = isinstance(model, MeasurementEmpiricalModel)
    if check == "validate":
        return validate(model).to_json()
    if check in ("ns", "measurement") and not measurement:
        raise AnsibleLookupError(f"check {check} takes a measurement model, got a preparation model")
    if check in ("prep-compat", "preparation") and measurement:
        raise AnsibleLookupError(f"check {check} takes a preparation model, got a measurement model")
    if check == "ns":
        return no_signalling(model).to_json()
    if check == "measurement":
        return check_measurement(model, mode or "prob").to_json()
    if check == "prep-compat":
        first = mu[0] if mu else "uniform"
        if first == "uniform":
            fam = uniform_family(model.scenario.sources, model.scenario.instances)
        else:
            fam = family_from_data(first, model.scenario)
        return prep_compatible(model, fam).to_json()
    mode = mode or "auto"
    if not mu and mode in ("prob", "probabilistic"):
        mu = ["uniform"]
    return check_preparation(model, mode, mu, max_sweep).to_json()


class LookupModule(LookupBase):

    def run(self, terms, variables=None, **kwargs):
        self.set_options(var_options=variables, direct=kwargs)
        check = self.get_option("check")
        results = []
        for term in terms:
            path = self.find_file_in_search_path(variables, "files", term)
            if path is None:
                raise AnsibleLookupError(f'model file "{term}" not found')
            display.v(f"contexture {check} on {path}")
            try:
                model = load_model(path)
                results.append(
                    run_check(
                        model,
                        check,
                        self.get_option("mode"),
                        list(self.get_option("mu")),
                        self.get_option("max_sweep"),
                    )
                )
            except ContextureError as e:
                raise AnsibleLookupError(f'"{term}": {describe(e)}') from e
        return results
