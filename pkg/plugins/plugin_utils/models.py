"""
empirical models and their JSON file format

measurement model: one distribution per context C over the sections of C
preparation model: one |O| x |I|^|Γ| table E_{m|Γ} per source context Γ, columns are distributions
possibilistic model: the same shapes over {0, 1}, 1 wherever the probability is nonzero

file format:
{
  "kind": "measurement" | "preparation",
  "measurements" | "sources": [labels...],
  "outcomes": [labels...],
  "instances": [labels...],      # preparation only
  "cover": [[labels...], ...],
  "tables": [...]                # one row-major matrix per context, entries "p/q" strings
}
a measurement table is a single row. probabilities may be "p/q", integer or finite decimal strings.
bare JSON floats are rejected.
"""

import sys
import json
from typing import ClassVar
from numbers import Rational
from pathlib import Path
from fractions import Fraction
from dataclasses import dataclass

from ansible.utils.display import Display

from ansible_collections.unity.contexture.plugins.plugin_utils.beartype import beartype
from ansible_collections.unity.contexture.plugins.plugin_utils.incext import incidence
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import (
    ModelError,
    ScenarioError,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import (
    BoolMatrix,
    RatMatrix,
    ZERO,
    bool_hstack,
    format_rational,
    hstack,
    to_rational,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.scenario import (
    MeasurementScenario,
    PreparationScenario,
)

display = Display()


@beartype
@dataclass(frozen=True)
class MeasurementEmpiricalModel:
    kind: ClassVar[str] = "measurement"
    scenario: MeasurementScenario
    distributions: tuple[tuple[Rational, ...], ...]

    def __post_init__(self):
        if len(self.distributions) != len(self.scenario.cover):
            raise ModelError(
                f"{len(self.distributions)} tables for {len(self.scenario.cover)} contexts", path="tables"
            )
        for c, dist in enumerate(self.distributions):
            expected = self.scenario.context_sections(c).size
            if len(dist) != expected:
                raise ModelError(f"expected {expected} entries, got {len(dist)}", path=f"tables[{c}][0]")
        object.__setattr__(
            self, "distributions", tuple(tuple(to_rational(x) for x in dist) for dist in self.distributions)
        )

    @property
    def tables(self) -> tuple[RatMatrix, ...]:
        return tuple(RatMatrix(1, len(dist), dist) for dist in self.distributions)


@beartype
@dataclass(frozen=True)
class PreparationEmpiricalModel:
    kind: ClassVar[str] = "preparation"
    scenario: PreparationScenario
    tables: tuple[RatMatrix, ...]

    def __post_init__(self):
        if len(self.tables) != len(self.scenario.source_cover):
            raise ModelError(
                f"{len(self.tables)} tables for {len(self.scenario.source_cover)} contexts", path="tables"
            )
        for c, table in enumerate(self.tables):
            shape = (len(self.scenario.outcomes), self.scenario.context_sections(c).size)
            if (table.rows, table.cols) != shape:
                raise ModelError(
                    f"expected a {shape[0]}x{shape[1]} table, got {table.rows}x{table.cols}", path=f"tables[{c}]"
                )


@beartype
@dataclass(frozen=True)
class PossibilisticModel:
    """
    measurement tables are 1 x |O|^|C| rows and need a 1 somewhere.
    preparation tables are |O| x |I|^|Γ| and need a 1 in every column.
    """

    scenario: MeasurementScenario | PreparationScenario
    tables: tuple[BoolMatrix, ...]

    def __post_init__(self):
        if len(self.tables) != len(self.scenario.contexts):
            raise ModelError(f"{len(self.tables)} tables for {len(self.scenario.contexts)} contexts", path="tables")
        for c, table in enumerate(self.tables):
            if self.kind == "measurement":
                if not any(table.entries):
                    raise ModelError("no possible outcome in this context", path=f"tables[{c}][0]")
                continue
            for j in range(table.cols):
                if not any(table.column(j)):
                    section = self.scenario.context_sections(c).section(j)
                    raise ModelError(f"column {section} has no possible outcome", path=f"tables[{c}][*][{j}]")

    @property
    def kind(self) -> str:
        return "measurement" if isinstance(self.scenario, MeasurementScenario) else "preparation"


type EmpiricalModel = MeasurementEmpiricalModel | PreparationEmpiricalModel
type AnyModel = MeasurementEmpiricalModel | PreparationEmpiricalModel | PossibilisticModel


@beartype
@dataclass(frozen=True)
class ValidationReport:
    kind: str
    contexts: int
    columns_checked: int

    def to_json(self) -> dict:
        return {"valid": True, "kind": self.kind, "contexts": self.contexts, "columns_checked": self.columns_checked}


def validate(model: AnyModel) -> ValidationReport:
    """every distribution is nonnegative and sums to exactly 1, else ModelError with a path"""
    if isinstance(model, PossibilisticModel):
        # shape and nonempty columns are checked on construction
        return ValidationReport(model.kind, len(model.tables), sum(t.cols for t in model.tables))
    contexts = model.scenario.contexts
    if isinstance(model, MeasurementEmpiricalModel):
        for c, dist in enumerate(model.distributions):
            for k, x in enumerate(dist):
                if x < 0:
                    raise ModelError(f"negative entry {x}", path=f"tables[{c}][0][{k}]")
            total = sum(dist, ZERO)
            if total != 1:
                raise ModelError(
                    f"distribution of context {list(contexts[c])} sums to {total}, expected 1", path=f"tables[{c}][0]"
                )
        display.vv(f"validated measurement model: {len(contexts)} contexts")
        return ValidationReport(model.kind, len(contexts), len(contexts))
    columns = 0
    for c, table in enumerate(model.tables):
        for j in range(table.cols):
            column = table.column(j)
            for o, x in enumerate(column):
                if x < 0:
                    raise ModelError(f"negative entry {x}", path=f"tables[{c}][{o}][{j}]")
            total = sum(column, ZERO)
            if total != 1:
                section = model.scenario.context_sections(c).section(j)
                raise ModelError(
                    f"column {section} of context {list(contexts[c])} sums to {total}, expected 1",
                    path=f"tables[{c}][*][{j}]",
                )
            columns += 1
    display.vv(f"validated preparation model: {len(contexts)} contexts, {columns} columns")
    return ValidationReport(model.kind, len(contexts), columns)


def possibilistic_reduce(model: AnyModel) -> PossibilisticModel:
    if isinstance(model, PossibilisticModel):
        return model
    return PossibilisticModel(model.scenario, tuple(t.support() for t in model.tables))


def stack(model: AnyModel) -> RatMatrix | BoolMatrix:
    """
    measurement: the stacked column E_p, context blocks in cover order
    preparation: E_m = [E_{m|Γ1} | E_{m|Γ2} | ...]
    """
    if isinstance(model, PossibilisticModel):
        if model.kind == "measurement":
            return bool_hstack(list(model.tables)).transpose()
        return bool_hstack(list(model.tables))
    if isinstance(model, MeasurementEmpiricalModel):
        return RatMatrix.column_vector([x for dist in model.distributions for x in dist])
    return hstack(list(model.tables))


@beartype
def marginal(model: MeasurementEmpiricalModel, context_index: int, subset) -> tuple[Fraction, ...]:
    """E_{subset|p} induced by context context_index"""
    scenario = model.scenario
    context = scenario.cover[context_index]
    return incidence(tuple(subset), context, scenario.outcomes).apply(model.distributions[context_index])


class _BinaryFloat(str):
    """marks a JSON number with a fraction or exponent so that it can be rejected with a path"""


def _entry(value, path: str) -> Fraction:
    if isinstance(value, _BinaryFloat):
        raise ModelError(f'binary float {value} is not exact, quote it as "{value}" or write p/q', path=path)
    if isinstance(value, bool):
        raise ModelError(f"expected a rational, got {json.dumps(value)}", path=path)
    try:
        return to_rational(value)
    except ModelError as e:
        raise ModelError(e.reason, path=path) from e


def _labels(data: dict, key: str) -> tuple[str, ...]:
    if key not in data:
        raise ModelError(f'key "{key}" not found', path=key)
    value = data[key]
    if not isinstance(value, list):
        raise ModelError(f"expected a list of labels, got {json.dumps(value)}", path=key)
    labels = []
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (str, int)):
            raise ModelError(f"expected a label, got {json.dumps(x)}", path=f"{key}[{i}]")
        labels.append(str(x))
    return tuple(labels)


def _cover(data: dict) -> tuple[tuple[str, ...], ...]:
    value = data.get("cover")
    if not isinstance(value, list):
        raise ModelError(f"expected a list of contexts, got {json.dumps(value)}", path="cover")
    cover = []
    for i, context in enumerate(value):
        if not isinstance(context, list):
            raise ModelError(f"expected a list of labels, got {json.dumps(context)}", path=f"cover[{i}]")
        for k, x in enumerate(context):
            if isinstance(x, bool) or not isinstance(x, (str, int)):
                raise ModelError(f"expected a label, got {json.dumps(x)}", path=f"cover[{i}][{k}]")
        cover.append(tuple(str(x) for x in context))
    return tuple(cover)


def _table(value, c: int, rows: int, cols: int) -> list[list[Fraction]]:
    if not isinstance(value, list) or len(value) != rows:
        got = len(value) if isinstance(value, list) else json.dumps(value)
        raise ModelError(f"expected {rows} rows, got {got}", path=f"tables[{c}]")
    table = []
    for r, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else json.dumps(row)
            raise ModelError(f"expected {cols} entries, got {got}", path=f"tables[{c}][{r}]")
        table.append([_entry(x, f"tables[{c}][{r}][{k}]") for k, x in enumerate(row)])
    return table


_KEYS = {
    "measurement": ("kind", "measurements", "outcomes", "cover", "tables"),
    "preparation": ("kind", "sources", "outcomes", "instances", "cover", "tables"),
}


def from_data(data) -> EmpiricalModel:
    """build and validate a model from already decoded JSON"""
    if not isinstance(data, dict):
        raise ModelError(f"expected a JSON object, got {type(data).__name__}", path="$")
    kind = data.get("kind")
    if kind not in _KEYS:
        raise ModelError(f'kind must be "measurement" or "preparation", got {json.dumps(kind)}', path="kind")
    for key in data:
        if key not in _KEYS[kind]:
            raise ModelError(f'unknown key "{key}" for a {kind} model', path=key)
    cover = _cover(data)
    try:
        if kind == "measurement":
            scenario = MeasurementScenario(_labels(data, "measurements"), _labels(data, "outcomes"), cover)
        else:
            scenario = PreparationScenario(
                _labels(data, "sources"), _labels(data, "instances"), cover, _labels(data, "outcomes")
            )
    except ScenarioError as e:
        raise ModelError(e.reason, path="cover") from e
    tables = data.get("tables")
    if not isinstance(tables, list) or len(tables) != len(cover):
        got = len(tables) if isinstance(tables, list) else json.dumps(tables)
        raise ModelError(f"expected {len(cover)} tables, one per context, got {got}", path="tables")
    if kind == "measurement":
        model = MeasurementEmpiricalModel(
            scenario,
            tuple(
                tuple(_table(t, c, 1, scenario.context_sections(c).size)[0]) for c, t in enumerate(tables)
            ),
        )
    else:
        rows = len(scenario.outcomes)
        model = PreparationEmpiricalModel(
            scenario,
            tuple(
                RatMatrix.from_rows(_table(t, c, rows, scenario.context_sections(c).size))
                for c, t in enumerate(tables)
            ),
        )
    validate(model)
    return model


def to_data(model: EmpiricalModel) -> dict:
    scenario = model.scenario
    if isinstance(model, MeasurementEmpiricalModel):
        return {
            "kind": "measurement",
            "measurements": list(scenario.measurements),
            "outcomes": list(scenario.outcomes),
            "cover": [list(c) for c in scenario.cover],
            "tables": [[[format_rational(x) for x in dist]] for dist in model.distributions],
        }
    return {
        "kind": "preparation",
        "sources": list(scenario.sources),
        "outcomes": list(scenario.outcomes),
        "instances": list(scenario.instances),
        "cover": [list(c) for c in scenario.source_cover],
        "tables": [table.to_json() for table in model.tables],
    }


def parse(data: bytes | str) -> EmpiricalModel:
    try:
        decoded = json.loads(data, parse_float=_BinaryFloat)
    except ValueError as e:
        raise ModelError(f"invalid JSON: {e}", path="$") from e
    return from_data(decoded)


def serialize(model: EmpiricalModel) -> bytes:
    return (json.dumps(to_data(model), indent=2) + "\n").encode()


def read_source(path: str) -> bytes:
    """path "-" means stdin"""
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise ModelError(f'unable to read "{path}": {e.strerror}', path="$") from e


def load_model(path: str) -> EmpiricalModel:
    return parse(read_source(path))


def dump_model(model: EmpiricalModel, path: str = "-"):
    if path == "-":
        sys.stdout.buffer.write(serialize(model))
        sys.stdout.flush()
        return
    Path(path).write_bytes(serialize(model))
