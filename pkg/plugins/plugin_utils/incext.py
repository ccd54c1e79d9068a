"""
incidence matrices (measurement side) and product-form extension matrices (preparation side)

incidence(C, X, O)[s_C, s_X] = 1 when s_X restricted to C is s_C
extension(U, V, fam)[σ_U, σ_V] = 1[σ_U restricted to V is σ_V] * prod_{p in U - V} mu_p(σ_p)

factor_family goes the other way: given a family of raw extension matrices, decide whether they
all come from one set of single-site distributions, and recover them.
"""

import json
import itertools
from numbers import Rational
from fractions import Fraction
from dataclasses import dataclass
from collections.abc import Collection, Mapping, Sequence

from ansible.utils.display import Display

from ansible_collections.unity.contexture.plugins.plugin_utils.beartype import beartype
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import (
    ExtensionError,
    ModelError,
    ScenarioError,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import (
    BoolMatrix,
    RatMatrix,
    ONE,
    ZERO,
    bool_hstack,
    format_rational,
    hstack,
    to_rational,
    vstack,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.scenario import (
    Labels,
    MeasurementScenario,
    PreparationScenario,
    restrict,
    sections_of,
)

display = Display()


def format_labels(labels: Sequence[str]) -> str:
    return ",".join(labels) if labels else "∅"


def _check_subset(small: Sequence[str], big: Sequence[str]):
    missing = [x for x in small if x not in big]
    if missing:
        raise ScenarioError(f"{list(small)} is not a subset of {list(big)}: {missing} missing")


@beartype
@dataclass(frozen=True)
class ExtensionFamily:
    """one distribution over the instances per source"""

    instances: tuple[str, ...]
    mu: tuple[tuple[str, tuple[Rational, ...]], ...]

    def __post_init__(self):
        seen = set()
        converted = []
        for label, weights in self.mu:
            if label in seen:
                raise ExtensionError(f'source "{label}" has two distributions')
            seen.add(label)
            if len(weights) != len(self.instances):
                raise ExtensionError(
                    f'mu["{label}"] has {len(weights)} entries but there are {len(self.instances)} instances'
                )
            weights = tuple(to_rational(x) for x in weights)
            if any(x < 0 for x in weights):
                raise ExtensionError(f'mu["{label}"] has a negative entry: {[str(x) for x in weights]}')
            if sum(weights, ZERO) != 1:
                raise ExtensionError(f'mu["{label}"] sums to {sum(weights, ZERO)}, expected 1')
            converted.append((label, weights))
        object.__setattr__(self, "mu", tuple(converted))
        object.__setattr__(self, "_lookup", dict(converted))

    @classmethod
    def from_mapping(cls, instances: Sequence[str], mu: Mapping) -> "ExtensionFamily":
        return cls(tuple(instances), tuple((str(k), tuple(v)) for k, v in mu.items()))

    @property
    def sources(self) -> Labels:
        return tuple(label for label, _ in self.mu)

    def __getitem__(self, label: str) -> tuple[Fraction, ...]:
        try:
            return self._lookup[label]
        except KeyError as e:
            raise ExtensionError(f'source "{label}" not found in extension family {list(self.sources)}') from e

    def weight(self, label: str, instance: str) -> Fraction:
        return self[label][self.instances.index(instance)]

    def support(self, label: str) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self[label]) if x)

    def to_json(self) -> dict:
        return {"mu": {label: [format_rational(x) for x in weights] for label, weights in self.mu}}


@beartype
def uniform_family(sources: Sequence[str], instances: Sequence[str]) -> ExtensionFamily:
    weight = Fraction(1, len(instances))
    return ExtensionFamily(tuple(instances), tuple((p, (weight,) * len(instances)) for p in sources))


@beartype
def family_from_supports(
    sources: Sequence[str], instances: Sequence[str], supports: Sequence[Collection[int]]
) -> ExtensionFamily:
    """uniform over each support"""
    mu = []
    for label, support in zip(sources, supports, strict=True):
        if not support:
            raise ExtensionError(f'empty support for source "{label}"')
        weight = Fraction(1, len(support))
        mu.append((label, tuple(weight if i in support else ZERO for i in range(len(instances)))))
    return ExtensionFamily(tuple(instances), tuple(mu))


def family_from_data(data, scenario: PreparationScenario) -> ExtensionFamily:
    """{"mu": {source: ["1/2", "1/2"]}}, one entry for every source of the scenario"""
    if not isinstance(data, dict) or not isinstance(data.get("mu"), dict):
        raise ModelError('expected an object with a "mu" mapping', path="mu")
    mu = data["mu"]
    for label in mu:
        if label not in scenario.sources:
            raise ModelError(f'unknown source "{label}", expected one of {list(scenario.sources)}', path=f"mu.{label}")
    weights = []
    for label in scenario.sources:
        if label not in mu:
            raise ModelError(f'source "{label}" not found', path=f"mu.{label}")
        row = mu[label]
        if not isinstance(row, list):
            raise ModelError(f"expected a list, got {json.dumps(row)}", path=f"mu.{label}")
        entries = []
        for i, x in enumerate(row):
            if isinstance(x, bool):
                raise ModelError(f"expected a rational string, got {json.dumps(x)}", path=f"mu.{label}[{i}]")
            try:
                entries.append(to_rational(x))
            except ModelError as e:
                raise ModelError(e.reason, path=f"mu.{label}[{i}]") from e
        weights.append((label, tuple(entries)))
    try:
        return ExtensionFamily(scenario.instances, tuple(weights))
    except ExtensionError as e:
        raise ModelError(e.reason, path="mu") from e


@beartype
def incidence(C: Sequence[str], X: Sequence[str], alphabet: Sequence[str]) -> RatMatrix:
    """
    incidence((a,), (a, b), (0, 1)) ->
      [[1, 1, 0, 0],
       [0, 0, 1, 1]]
    """
    _check_subset(C, X)
    rows = sections_of(C, alphabet)
    cols = sections_of(X, alphabet)
    entries = [ZERO] * (rows.size * cols.size)
    for c, s_x in enumerate(cols):
        entries[rows.index(restrict(s_x, X, C)) * cols.size + c] = ONE
    return RatMatrix(rows.size, cols.size, tuple(entries))


@beartype
def restriction_matrix(V: Sequence[str], U: Sequence[str], instances: Sequence[str]) -> RatMatrix:
    """incidence over the instance alphabet: restricts preparation sections on U to V"""
    return incidence(V, U, instances)


@beartype
def extension(U: Sequence[str], V: Sequence[str], fam: ExtensionFamily) -> RatMatrix:
    """
    U = (a, b), V = (a,), mu_b = (1/2, 1/2) ->
      [[1/2,   0],
       [1/2,   0],
       [  0, 1/2],
       [  0, 1/2]]
    """
    _check_subset(V, U)
    free = [(i, fam[p]) for i, p in enumerate(U) if p not in V]
    rows = sections_of(U, fam.instances)
    cols = sections_of(V, fam.instances)
    positions = {x: i for i, x in enumerate(fam.instances)}
    entries = [ZERO] * (rows.size * cols.size)
    for r, sigma_u in enumerate(rows):
        weight = ONE
        for i, mu_p in free:
            weight *= mu_p[positions[sigma_u[i]]]
            if not weight:
                break
        if weight:
            entries[r * cols.size + cols.index(restrict(sigma_u, U, V))] = weight
    return RatMatrix(rows.size, cols.size, tuple(entries))


@beartype
def boolean_extension(
    U: Sequence[str], V: Sequence[str], instances: Sequence[str], supports: Mapping[str, Collection[int]]
) -> BoolMatrix:
    """support of extension(U, V, fam) for any fam whose supports are the given ones"""
    _check_subset(V, U)
    free = [(i, supports[p]) for i, p in enumerate(U) if p not in V]
    rows = sections_of(U, instances)
    cols = sections_of(V, instances)
    positions = {x: i for i, x in enumerate(instances)}
    entries = [False] * (rows.size * cols.size)
    for r, sigma_u in enumerate(rows):
        if all(positions[sigma_u[i]] in support for i, support in free):
            entries[r * cols.size + cols.index(restrict(sigma_u, U, V))] = True
    return BoolMatrix(rows.size, cols.size, tuple(entries))


@beartype
def stacked_incidence(scenario: MeasurementScenario) -> RatMatrix:
    """M_X: one incidence block per context, stacked in cover order"""
    return vstack([incidence(C, scenario.measurements, scenario.outcomes) for C in scenario.cover])


@beartype
def stacked_extension(scenario: PreparationScenario, fam: ExtensionFamily) -> RatMatrix:
    """S_Y = [S_{Y|Γ1} | S_{Y|Γ2} | ...] in cover order"""
    return hstack([extension(scenario.sources, gamma, fam) for gamma in scenario.source_cover])


@beartype
def stacked_boolean_extension(scenario: PreparationScenario, supports: Mapping[str, Collection[int]]) -> BoolMatrix:
    return bool_hstack(
        [boolean_extension(scenario.sources, gamma, scenario.instances, supports) for gamma in scenario.source_cover]
    )


@beartype
@dataclass(frozen=True)
class RawExtension:
    """a general column-stochastic S_{U|V}, before anyone has shown it to be a product extension"""

    U: tuple[str, ...]
    V: tuple[str, ...]
    instances: tuple[str, ...]
    matrix: RatMatrix

    def __post_init__(self):
        try:
            _check_subset(self.V, self.U)
        except ScenarioError as e:
            raise ExtensionError(f"S_{{{format_labels(self.U)}|{format_labels(self.V)}}}: {e.reason}") from e
        shape = (len(self.instances) ** len(self.U), len(self.instances) ** len(self.V))
        if (self.matrix.rows, self.matrix.cols) != shape:
            raise ExtensionError(
                f"S_{{{format_labels(self.U)}|{format_labels(self.V)}}} must be {shape[0]}x{shape[1]}, "
                f"got {self.matrix.rows}x{self.matrix.cols}"
            )
        if not self.matrix.is_column_stochastic():
            raise ExtensionError(f"S_{{{format_labels(self.U)}|{format_labels(self.V)}}} is not column-stochastic")

    @property
    def name(self) -> str:
        return f"S_{{{format_labels(self.U)}|{format_labels(self.V)}}}"

    def reordered(self, U: Sequence[str], V: Sequence[str]) -> "RawExtension":
        """the same map with rows and columns indexed by sections over another ordering of U and V"""
        old_rows, old_cols = sections_of(self.U, self.instances), sections_of(self.V, self.instances)
        new_rows, new_cols = sections_of(U, self.instances), sections_of(V, self.instances)
        row_map = [old_rows.index(restrict(s, U, self.U)) for s in new_rows]
        col_map = [old_cols.index(restrict(s, V, self.V)) for s in new_cols]
        return RawExtension(
            tuple(U),
            tuple(V),
            self.instances,
            RatMatrix.from_rows([[self.matrix[r, c] for c in col_map] for r in row_map], cols=len(col_map)),
        )


@beartype
@dataclass(frozen=True)
class JointDistribution:
    """mu_{U - V} as a table over the sections of labels"""

    labels: tuple[str, ...]
    instances: tuple[str, ...]
    weights: tuple[Rational, ...]

    def marginal(self, label: str) -> tuple[Fraction, ...]:
        i = self.labels.index(label)
        totals = [ZERO] * len(self.instances)
        for section, w in zip(sections_of(self.labels, self.instances), self.weights):
            totals[self.instances.index(section[i])] += w
        return tuple(totals)


@beartype
def check_input_independence(raw: RawExtension) -> JointDistribution | None:
    """
    S_{U|V}(σ_U|σ_V) = 1[σ_U restricted to V is σ_V] * mu(σ_U restricted to U - V) for one mu?
    mu is read off the first column and checked against every other entry.
    """
    U, V, instances = raw.U, raw.V, raw.instances
    W = tuple(p for p in U if p not in V)
    rows, cols, w_sections = sections_of(U, instances), sections_of(V, instances), sections_of(W, instances)
    first = cols.section(0)
    weights = [ZERO] * w_sections.size
    for r, sigma_u in enumerate(rows):
        if restrict(sigma_u, U, V) == first:
            weights[w_sections.index(restrict(sigma_u, U, W))] = raw.matrix[r, 0]
    for r, sigma_u in enumerate(rows):
        column = cols.index(restrict(sigma_u, U, V))
        expected = weights[w_sections.index(restrict(sigma_u, U, W))]
        for c in range(cols.size):
            if raw.matrix[r, c] != (expected if c == column else ZERO):
                display.vv(f"{raw.name} is not input independent at row {sigma_u}, column {cols.section(c)}")
                return None
    return JointDistribution(W, instances, tuple(weights))


@beartype
@dataclass(frozen=True)
class FactorResult:
    family: ExtensionFamily | None
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.family is not None


def singleton_steps(sources: Sequence[str]) -> list[tuple[Labels, Labels]]:
    """every (U, U - {p}) with U a nonempty subset of sources, in sources order"""
    steps = []
    for size in range(1, len(sources) + 1):
        for U in itertools.combinations(sources, size):
            for p in U:
                steps.append((U, tuple(x for x in U if x != p)))
    return steps


def all_pairs(sources: Sequence[str]) -> list[tuple[Labels, Labels]]:
    """every (U, V) with V a subset of U a subset of sources"""
    pairs = []
    for size in range(len(sources) + 1):
        for U in itertools.combinations(sources, size):
            for vsize in range(size + 1):
                for V in itertools.combinations(U, vsize):
                    pairs.append((U, V))
    return pairs


@beartype
def generate_family(
    sources: Sequence[str], fam: ExtensionFamily, pairs: Sequence[tuple[Sequence[str], Sequence[str]]] | None = None
) -> dict[tuple[Labels, Labels], RawExtension]:
    if pairs is None:
        pairs = singleton_steps(sources)
    return {
        (tuple(U), tuple(V)): RawExtension(tuple(U), tuple(V), fam.instances, extension(U, V, fam)) for U, V in pairs
    }


def factor_family(
    family: Mapping[tuple[Labels, Labels], RawExtension], sources: Sequence[str], instances: Sequence[str]
) -> FactorResult:
    """
    1. every member must be input independent
    2. S_{U|W} = S_{U|V} S_{V|W} wherever all three members are present
    3. mu_p is read off a member (U, U - {p}); sources never extended to default to uniform
    4. every member must equal the product extension of the recovered mu
    """
    sources, instances = tuple(sources), tuple(instances)
    members = {}
    for raw in family.values():
        if raw.instances != instances:
            raise ExtensionError(f"{raw.name} is over instances {list(raw.instances)}, expected {list(instances)}")
        for label in raw.U:
            if label not in sources:
                raise ExtensionError(f'{raw.name} mentions unknown source "{label}"')
        canonical = raw.reordered(
            tuple(x for x in sources if x in raw.U), tuple(x for x in sources if x in raw.V)
        )
        members[(frozenset(raw.U), frozenset(raw.V))] = canonical

    joints = {}
    for key, raw in members.items():
        joint = check_input_independence(raw)
        if joint is None:
            return FactorResult(None, f"input independence fails for {raw.name}")
        joints[key] = joint

    for (U, W), outer in members.items():
        for (U2, V), left in members.items():
            if U2 != U or not (W < V < U) or (V, W) not in members:
                continue
            right = members[(V, W)]
            if left.matrix @ right.matrix != outer.matrix:
                return FactorResult(None, f"compositionality fails: {outer.name} != {left.name} {right.name}")

    extended = {p for U, V in members for p in U - V}
    mu = []
    for p in sources:
        step = next((k for k in members if k[0] - k[1] == {p}), None)
        if step is not None:
            mu.append((p, joints[step].weights))
        elif p in extended:
            raise ExtensionError(f'no singleton step extends source "{p}": add S_{{U|U-{{{p}}}}} for some U')
        else:
            mu.append((p, (Fraction(1, len(instances)),) * len(instances)))
    try:
        fam = ExtensionFamily(instances, tuple(mu))
    except ExtensionError as e:
        return FactorResult(None, f"recovered single-site distribution is invalid: {e.reason}")

    for raw in members.values():
        if extension(raw.U, raw.V, fam) != raw.matrix:
            return FactorResult(None, f"product form fails for {raw.name}")
    display.v(f"factored {len(members)} extensions into single-site distributions over {list(sources)}")
    return FactorResult(fam)
