"""
contextuality checks on JSON-shaped empirical models

every filter takes the decoded model file (see `contexture gen`), so a playbook can do
  model: "{{ lookup('file', 'pbr.json') | from_json }}"
  verdict: "{{ model | unity.contexture.contexture_check_preparation(mode='auto') }}"
probabilities must be strings ("1/4") or integers. YAML floats are rejected.
"""

from ansible.errors import AnsibleFilterError

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
    PreparationEmpiricalModel,
    from_data,
    to_data,
    validate,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.quantum import BUILTINS
from ansible_collections.unity.contexture.plugins.plugin_utils.verdict import (
    check_measurement,
    check_preparation,
)


def _model(data, kind: type, name: str):
    model = from_data(data)
    if not isinstance(model, kind):
        raise AnsibleFilterError(f'{name} takes a {kind.kind} model, got a {model.kind} model')
    return model


def _filter(name: str, kind: type | None = None):
    def decorator(function):
        def wrapper(data, *args, **kwargs):
            try:
                if kind is None:
                    return function(data, *args, **kwargs)
                return function(_model(data, kind, name), *args, **kwargs)
            except ContextureError as e:
                raise AnsibleFilterError(f"{name}: {describe(e)}") from e

        wrapper.__name__ = function.__name__
        wrapper.__doc__ = function.__doc__
        return wrapper

    return decorator


@_filter("contexture_validate")
def contexture_validate(data) -> dict:
    return validate(from_data(data)).to_json()


@_filter("contexture_no_signalling", MeasurementEmpiricalModel)
def contexture_no_signalling(model) -> dict:
    return no_signalling(model).to_json()


@_filter("contexture_prep_compatible", PreparationEmpiricalModel)
def contexture_prep_compatible(model, mu=None) -> dict:
    """mu: {"mu": {source: [weights]}}, uniform when omitted"""
    if mu is None:
        fam = uniform_family(model.scenario.sources, model.scenario.instances)
    else:
        fam = family_from_data(mu, model.scenario)
    return prep_compatible(model, fam).to_json()


@_filter("contexture_check_measurement", MeasurementEmpiricalModel)
def contexture_check_measurement(model, mode="prob") -> dict:
    return check_measurement(model, mode).to_json()


@_filter("contexture_check_preparation", PreparationEmpiricalModel)
def contexture_check_preparation(model, mode="auto", mu=None, max_sweep=None) -> dict:
    """
    mu: "uniform", one {"mu": ...} object, or a list of them.
    probabilistic mode without mu uses the uniform family.
    """
    if mu is None:
        mu = ["uniform"] if mode in ("prob", "probabilistic") else []
    elif not isinstance(mu, list):
        mu = [mu]
    return check_preparation(model, mode, mu, None if max_sweep is None else int(max_sweep)).to_json()


@_filter("contexture_builtin")
def contexture_builtin(name) -> dict:
    if name not in BUILTINS:
        raise AnsibleFilterError(f'contexture_builtin: unknown model "{name}", expected one of {list(BUILTINS)}')
    return to_data(BUILTINS[name]())


class FilterModule:
    def filters(self):
        return dict(
            contexture_validate=contexture_validate,
            contexture_no_signalling=contexture_no_signalling,
            contexture_prep_compatible=contexture_prep_compatible,
            contexture_check_measurement=contexture_check_measurement,
            contexture_check_preparation=contexture_check_preparation,
            contexture_builtin=contexture_builtin,
        )
