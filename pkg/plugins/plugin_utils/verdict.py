"""
contextuality verdicts with certificates

measurement models:
  probabilistic   no-signalling, then is there a distribution d over global sections with M_X d = E_p?
                  contextual answers carry a Farkas vector y with y^T M_X <= 0 < y^T E_p
  possibilistic   is there a nonzero boolean d with M_X d = Ebar_p over the boolean semiring?

preparation models:
  possibilistic   sweep every support pattern of the single-site distributions. for each one, is there a
                  boolean Dbar with nonempty columns and Ebar_m = Dbar Sbar_Y? contextual only when no pattern works
  probabilistic   for each given extension family: compatibility, then is there a column-stochastic D with
                  E_m = D S_Y? noncontextual on the first family that works, inconclusive otherwise
  auto            possibilistic first. possibilistic contextuality implies probabilistic contextuality, so a
                  contextual sweep is final. otherwise try the uniform family and any given families.
"""

import os
import itertools
from enum import Enum
from fractions import Fraction
from dataclasses import dataclass, field, replace
from collections.abc import Iterator, Mapping, Sequence

from ansible.utils.display import Display

from ansible_collections.unity.contexture.plugins.plugin_utils.beartype import beartype
from ansible_collections.unity.contexture.plugins.plugin_utils.compat import (
    PairCheck,
    no_signalling,
    prep_compatible,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import (
    ContextureError,
    SweepTooLargeError,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.incext import (
    ExtensionFamily,
    family_from_data,
    stacked_boolean_extension,
    stacked_extension,
    stacked_incidence,
    uniform_family,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.models import (
    MeasurementEmpiricalModel,
    PossibilisticModel,
    PreparationEmpiricalModel,
    possibilistic_reduce,
    stack,
    validate,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import (
    BoolMatrix,
    FeasibilityResult,
    RatMatrix,
    ONE,
    ZERO,
    format_rational,
    solve_boolean_factor,
    solve_linear_feasibility,
    verify_farkas,
    vstack,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.scenario import (
    PreparationScenario,
    Section,
    restrict,
    sections_of,
)

display = Display()

MAX_SWEEP_DEFAULT = 6561
MAX_SWEEP_ENV = "CONTEXTURE_MAX_SWEEP"
UNRESOLVED = "bilinear μ–D search unresolved"


class VerdictStatus(str, Enum):
    NONCONTEXTUAL = "NONCONTEXTUAL"
    CONTEXTUAL = "CONTEXTUAL"
    INCOMPATIBLE = "INCOMPATIBLE"
    INCONCLUSIVE = "INCONCLUSIVE"


class Mode(str, Enum):
    PROBABILISTIC = "probabilistic"
    POSSIBILISTIC = "possibilistic"
    AUTO = "auto"


_MODE_ALIASES = {"prob": Mode.PROBABILISTIC, "poss": Mode.POSSIBILISTIC}


def parse_mode(mode: "str | Mode") -> Mode:
    if isinstance(mode, Mode):
        return mode
    try:
        return _MODE_ALIASES.get(mode) or Mode(mode)
    except ValueError as e:
        raise ContextureError(f'mode must be one of prob, poss, auto, got "{mode}"') from e


def sweep_limit(explicit: int | None = None) -> int:
    """explicit argument > CONTEXTURE_MAX_SWEEP > 6561"""
    if explicit is not None:
        value = explicit
    elif MAX_SWEEP_ENV in os.environ:
        raw = os.environ[MAX_SWEEP_ENV]
        try:
            value = int(raw)
        except ValueError as e:
            raise ContextureError(f'{MAX_SWEEP_ENV} must be an integer, got "{raw}"') from e
        display.warning(f"support-pattern sweep limit set to {value} by {MAX_SWEEP_ENV}")
    else:
        value = MAX_SWEEP_DEFAULT
    if value <= 0:
        raise ContextureError(f"support-pattern sweep limit must be positive, got {value}")
    return value


@beartype
@dataclass(frozen=True)
class SupportPattern:
    """the support of mu_p for every source p, as instance indices"""

    sources: tuple[str, ...]
    instances: tuple[str, ...]
    supports: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.supports) != len(self.sources):
            raise ContextureError(f"{len(self.supports)} supports for {len(self.sources)} sources")
        for label, support in zip(self.sources, self.supports):
            if not support:
                raise ContextureError(f'support of source "{label}" is empty')
            if sorted(set(support)) != list(support) or not all(0 <= i < len(self.instances) for i in support):
                raise ContextureError(f'support of source "{label}" is not a sorted set of instance indices: {support}')

    @classmethod
    def full(cls, sources: Sequence[str], instances: Sequence[str]) -> "SupportPattern":
        everything = tuple(range(len(instances)))
        return cls(tuple(sources), tuple(instances), (everything,) * len(sources))

    def as_mapping(self) -> dict[str, frozenset[int]]:
        return {label: frozenset(s) for label, s in zip(self.sources, self.supports)}

    def assignments(self) -> Iterator[Section]:
        """global sections lying in the support, lexicographic"""
        return itertools.product(*[[self.instances[i] for i in s] for s in self.supports])

    def to_json(self) -> dict:
        return {label: [self.instances[i] for i in s] for label, s in zip(self.sources, self.supports)}


def count_patterns(sources: int, instances: int) -> int:
    return (2**instances - 1) ** sources


def support_patterns(sources: Sequence[str], instances: Sequence[str]) -> Iterator[SupportPattern]:
    subsets = [
        tuple(i for i in range(len(instances)) if mask >> i & 1) for mask in range(1, 2 ** len(instances))
    ]
    for supports in itertools.product(subsets, repeat=len(sources)):
        yield SupportPattern(tuple(sources), tuple(instances), supports)


@beartype
@dataclass(frozen=True)
class StackedColumn:
    block: int
    context: tuple[str, ...]
    section: tuple[str, ...]

    def to_json(self) -> dict:
        return {"block": self.block, "context": list(self.context), "section": list(self.section)}


def stacked_columns(scenario: PreparationScenario) -> list[StackedColumn]:
    return [
        StackedColumn(block, gamma, section)
        for block, gamma in enumerate(scenario.source_cover)
        for section in sections_of(gamma, scenario.instances)
    ]


@beartype
@dataclass(frozen=True)
class ForbiddenMap:
    """per stacked empirical column, the outcomes (indices) that never occur"""

    scenario: PreparationScenario
    forbidden: tuple[frozenset[int], ...]

    @property
    def unique_zero(self) -> bool:
        return all(len(f) == 1 for f in self.forbidden)

    def phi(self, j: int) -> int:
        """the forbidden outcome of column j, when it is unique"""
        if len(self.forbidden[j]) != 1:
            raise ContextureError(f"column {j} has {len(self.forbidden[j])} forbidden outcomes, not exactly one")
        return next(iter(self.forbidden[j]))

    def of(self, columns: Sequence[int]) -> frozenset[int]:
        return frozenset().union(*(self.forbidden[j] for j in columns))

    def outcome_labels(self, outcomes) -> list[str]:
        return [self.scenario.outcomes[o] for o in sorted(outcomes)]

    def to_json(self) -> dict:
        return {
            "unique_zero": self.unique_zero,
            "columns": [
                column.to_json() | {"forbidden": self.outcome_labels(f)}
                for column, f in zip(stacked_columns(self.scenario), self.forbidden)
            ],
        }


@beartype
def forbidden_map(pmodel: PossibilisticModel) -> ForbiddenMap:
    if pmodel.kind != "preparation":
        raise ContextureError("forbidden outcomes are defined for preparation models only")
    Ebar = stack(pmodel)
    return ForbiddenMap(
        pmodel.scenario,
        tuple(frozenset(o for o in range(Ebar.rows) if not Ebar[o, j]) for j in range(Ebar.cols)),
    )


def _block_offsets(scenario: PreparationScenario) -> list[int]:
    offsets, total = [], 0
    for gamma in scenario.source_cover:
        offsets.append(total)
        total += len(scenario.instances) ** len(gamma)
    return offsets


def referenced_columns(scenario: PreparationScenario, assignment: Sequence[str]) -> tuple[int, ...]:
    """J(k): the stacked column of each block that the global assignment restricts to"""
    offsets = _block_offsets(scenario)
    return tuple(
        offset + sections_of(gamma, scenario.instances).index(restrict(assignment, scenario.sources, gamma))
        for offset, gamma in zip(offsets, scenario.source_cover)
    )


@beartype
@dataclass(frozen=True)
class ParityEntry:
    assignment: tuple[str, ...]
    index: int
    # xor of the instance indices, binary instances only
    parity: int | None
    columns: tuple[int, ...]
    forbidden: frozenset[int]
    allowed: tuple[int, ...]

    def to_json(self, scenario: PreparationScenario) -> dict:
        return {
            "assignment": list(self.assignment),
            "parity": self.parity,
            "columns": list(self.columns),
            "forbidden": [scenario.outcomes[o] for o in sorted(self.forbidden)],
            "allowed": [scenario.outcomes[o] for o in self.allowed],
        }


@beartype
def parity_profile(pmodel: PossibilisticModel, pattern: SupportPattern) -> tuple[ParityEntry, ...]:
    scenario = pmodel.scenario
    fmap = forbidden_map(pmodel)
    global_sections = scenario.global_sections()
    entries = []
    for assignment in pattern.assignments():
        columns = referenced_columns(scenario, assignment)
        forbidden = fmap.of(columns)
        parity = None
        if len(scenario.instances) == 2:
            parity = sum(scenario.instances.index(x) for x in assignment) % 2
        entries.append(
            ParityEntry(
                tuple(assignment),
                global_sections.index(assignment),
                parity,
                columns,
                forbidden,
                tuple(o for o in range(len(scenario.outcomes)) if o not in forbidden),
            )
        )
    return tuple(entries)


@beartype
@dataclass(frozen=True)
class PatternObstruction:
    """
    why one support pattern admits no boolean global response matrix

    emptied_column: every outcome is forced to zero for a global assignment the family can produce
    uncovered_cell: an empirical column needs more possible outcomes than its referencing
                    assignment is allowed
    """

    pattern: SupportPattern
    kind: str
    assignment: tuple[str, ...]
    forbidden: tuple[str, ...]
    allowed_bound: int
    cell: tuple[str, StackedColumn] | None = None
    required_support: int | None = None
    referencing: tuple[tuple[str, ...], ...] = ()

    def to_json(self) -> dict:
        output = {
            "pattern": self.pattern.to_json(),
            "kind": self.kind,
            "assignment": list(self.assignment),
            "forbidden": list(self.forbidden),
            "allowed_bound": self.allowed_bound,
        }
        if self.cell is not None:
            output["cell"] = {"outcome": self.cell[0]} | self.cell[1].to_json()
            output["required_support"] = self.required_support
            output["referencing"] = [list(x) for x in self.referencing]
        return output


@beartype
@dataclass(frozen=True)
class FarkasCertificate:
    y: tuple[Fraction, ...]
    y_dot_b: Fraction

    def to_json(self) -> dict:
        return {"kind": "farkas", "y": [format_rational(x) for x in self.y], "y_dot_b": format_rational(self.y_dot_b)}


@beartype
@dataclass(frozen=True)
class CoverageCertificate:
    """local events that no global section can produce"""

    uncovered: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]

    def to_json(self) -> dict:
        return {
            "kind": "uncovered_sections",
            "sections": [{"context": list(c), "section": list(s)} for c, s in self.uncovered],
        }


@beartype
@dataclass(frozen=True)
class SweepCertificate:
    obstructions: tuple[PatternObstruction, ...]

    def to_json(self) -> dict:
        return {"kind": "support_patterns", "patterns": [o.to_json() for o in self.obstructions]}


type Certificate = FarkasCertificate | CoverageCertificate | SweepCertificate


@beartype
@dataclass(frozen=True)
class Witness:
    D: RatMatrix | BoolMatrix
    mu: ExtensionFamily | None = None
    pattern: SupportPattern | None = None

    def to_json(self) -> dict:
        return {
            "mu": None if self.mu is None else self.mu.to_json()["mu"],
            "pattern": None if self.pattern is None else self.pattern.to_json(),
            "D": self.D.to_json(),
        }


@dataclass(frozen=True)
class Stats:
    patterns_checked: int = 0
    lp_pivots: int = 0
    elapsed: float | None = None

    def to_json(self) -> dict:
        output = {"patterns_checked": self.patterns_checked, "lp_pivots": self.lp_pivots}
        if self.elapsed is not None:
            output["elapsed"] = round(self.elapsed, 6)
        return output


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    mode: Mode
    witness: Witness | None = None
    certificate: Certificate | None = None
    incompatibility: tuple[PairCheck, ...] = ()
    reason: str | None = None
    stats: Stats = field(default_factory=Stats)

    def __post_init__(self):
        if (self.status == VerdictStatus.NONCONTEXTUAL) != (self.witness is not None):
            raise ContextureError(f"{self.status.value} verdict with witness={self.witness!r}")
        if (self.status == VerdictStatus.CONTEXTUAL) != (self.certificate is not None):
            raise ContextureError(f"{self.status.value} verdict with certificate={self.certificate!r}")
        if self.status == VerdictStatus.INCOMPATIBLE and not self.incompatibility:
            raise ContextureError("INCOMPATIBLE verdict without a violating pair")
        if self.status == VerdictStatus.INCONCLUSIVE and not self.reason:
            raise ContextureError("INCONCLUSIVE verdict without a reason")

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "mode": self.mode.value,
            "witness": None if self.witness is None else self.witness.to_json(),
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "incompatibility": [p.to_json() for p in self.incompatibility],
            "reason": self.reason,
            "stats": self.stats.to_json(),
        }


@beartype
def check_measurement(model: MeasurementEmpiricalModel, mode: str | Mode = Mode.PROBABILISTIC) -> Verdict:
    validate(model)
    mode = parse_mode(mode)
    if mode == Mode.AUTO:
        raise ContextureError("measurement checks take mode prob or poss")
    scenario = model.scenario
    M_X = stacked_incidence(scenario)
    if mode == Mode.POSSIBILISTIC:
        Ebar = stack(possibilistic_reduce(model)).transpose()
        result = solve_boolean_factor(Ebar, M_X.support().transpose(), require_nonempty_columns=False)
        if result.feasible:
            display.v(f"possible global sections: {result.witness.count()} of {result.witness.cols}")
            return Verdict(VerdictStatus.NONCONTEXTUAL, mode, witness=Witness(result.witness.transpose()))
        local = [(c, s) for c in range(len(scenario.cover)) for s in scenario.context_sections(c)]
        uncovered = tuple((scenario.cover[local[j][0]], local[j][1]) for _, j in result.uncovered_cells)
        return Verdict(VerdictStatus.CONTEXTUAL, mode, certificate=CoverageCertificate(uncovered))

    report = no_signalling(model)
    if not report.ok:
        return Verdict(VerdictStatus.INCOMPATIBLE, mode, incompatibility=report.violations)
    E_p = stack(model).column(0)
    global_count = M_X.cols
    # the simplex row sum(d) = 1 is implied by the first context block, kept for a well-posed LP
    A = vstack([M_X, RatMatrix(1, global_count, (ONE,) * global_count)])
    display.v(f"measurement LP: {A.rows} equations over {global_count} global sections")
    result = solve_linear_feasibility(A, E_p + (ONE,))
    stats = Stats(lp_pivots=result.pivots)
    if result.feasible:
        d = result.witness
        if M_X.apply(d) != E_p:
            raise ContextureError("global section distribution does not reproduce the empirical model")
        return Verdict(VerdictStatus.NONCONTEXTUAL, mode, witness=Witness(RatMatrix.column_vector(d)), stats=stats)
    # fold the simplex multiplier into the first context block, whose rows sum to the all ones row
    y = list(result.certificate[:-1])
    first_block = scenario.context_sections(0).size
    for i in range(first_block):
        y[i] += result.certificate[-1]
    y = tuple(y)
    if not verify_farkas(M_X, E_p, y):
        raise ContextureError("folded Farkas vector does not certify the measurement system")
    y_dot_b = sum((a * b for a, b in zip(y, E_p)), ZERO)
    return Verdict(VerdictStatus.CONTEXTUAL, mode, certificate=FarkasCertificate(y, y_dot_b), stats=stats)


@beartype
def verify_preparation_witness(model: PreparationEmpiricalModel, fam: ExtensionFamily, D: RatMatrix) -> bool:
    """D column-stochastic and D S_Y = E_m, exactly"""
    return D.is_column_stochastic() and D @ stacked_extension(model.scenario, fam) == stack(model)


def _obstruction(
    scenario: PreparationScenario,
    pattern: SupportPattern,
    result: FeasibilityResult,
    Ebar: BoolMatrix,
    Sbar: BoolMatrix,
    fmap: ForbiddenMap,
) -> PatternObstruction:
    global_sections = scenario.global_sections()
    supported = {global_sections.index(x) for x in pattern.assignments()}
    columns = stacked_columns(scenario)
    outcomes = len(scenario.outcomes)

    def referencing(j: int) -> list[int]:
        return [k for k in range(Sbar.rows) if Sbar[k, j]]

    def emptied(k: int) -> PatternObstruction:
        forbidden = fmap.of([j for j in range(Sbar.cols) if Sbar[k, j]])
        return PatternObstruction(
            pattern,
            "emptied_column",
            global_sections.section(k),
            tuple(fmap.outcome_labels(forbidden)),
            outcomes - len(forbidden),
        )

    def uncovered(i: int, j: int) -> PatternObstruction:
        refs = referencing(j)
        k = next((k for k in refs if k in supported), refs[0])
        forbidden = fmap.of([c for c in range(Sbar.cols) if Sbar[k, c]])
        return PatternObstruction(
            pattern,
            "uncovered_cell",
            global_sections.section(k),
            tuple(fmap.outcome_labels(forbidden)),
            outcomes - len(forbidden),
            cell=(scenario.outcomes[i], columns[j]),
            required_support=sum(Ebar.column(j)),
            referencing=tuple(global_sections.section(x) for x in refs),
        )

    for k in result.emptied_columns:
        if k in supported:
            return emptied(k)
    for i, j in result.uncovered_cells:
        if any(k in supported for k in referencing(j)):
            return uncovered(i, j)
    if result.emptied_columns:
        return emptied(result.emptied_columns[0])
    return uncovered(*result.uncovered_cells[0])


def _possibilistic_sweep(model: PreparationEmpiricalModel, limit: int) -> Verdict:
    scenario = model.scenario
    total = count_patterns(len(scenario.sources), len(scenario.instances))
    if total > limit:
        raise SweepTooLargeError(
            f"support-pattern sweep needs {total} patterns, more than the limit {limit}. "
            f"raise it with --max-sweep or {MAX_SWEEP_ENV}"
        )
    pmodel = possibilistic_reduce(model)
    Ebar = stack(pmodel)
    fmap = forbidden_map(pmodel)
    display.v(f"sweeping {total} support patterns over sources {list(scenario.sources)}")
    obstructions = []
    for checked, pattern in enumerate(support_patterns(scenario.sources, scenario.instances), 1):
        Sbar = stacked_boolean_extension(scenario, pattern.as_mapping())
        result = solve_boolean_factor(Ebar, Sbar)
        if result.feasible:
            display.v(f"support pattern {pattern.to_json()} admits a boolean global response")
            return Verdict(
                VerdictStatus.NONCONTEXTUAL,
                Mode.POSSIBILISTIC,
                witness=Witness(result.witness, pattern=pattern),
                stats=Stats(patterns_checked=checked),
            )
        display.vv(f"support pattern {checked}/{total} infeasible: {result.obstruction}")
        obstructions.append(_obstruction(scenario, pattern, result, Ebar, Sbar, fmap))
    display.v(f"all {total} support patterns infeasible")
    return Verdict(
        VerdictStatus.CONTEXTUAL,
        Mode.POSSIBILISTIC,
        certificate=SweepCertificate(tuple(obstructions)),
        stats=Stats(patterns_checked=total),
    )


def _factor_lp(model: PreparationEmpiricalModel, fam: ExtensionFamily) -> tuple[RatMatrix, list[Fraction]]:
    """
    unknowns D(o, k) at o * K + k
    rows: sum_k D(o, k) S_Y(k, j) = E_m(o, j) for every (o, j), then sum_o D(o, k) = 1 for every k
    """
    S_Y = stacked_extension(model.scenario, fam)
    E_m = stack(model)
    outcomes, K, N = E_m.rows, S_Y.rows, S_Y.cols
    rows, b = [], []
    for o in range(outcomes):
        for j in range(N):
            row = [ZERO] * (outcomes * K)
            for k in range(K):
                row[o * K + k] = S_Y[k, j]
            rows.append(row)
            b.append(E_m[o, j])
    for k in range(K):
        row = [ZERO] * (outcomes * K)
        for o in range(outcomes):
            row[o * K + k] = ONE
        rows.append(row)
        b.append(ONE)
    return RatMatrix.from_rows(rows, cols=outcomes * K), b


def _resolve_families(model: PreparationEmpiricalModel, mu_strategy: Sequence) -> list[ExtensionFamily]:
    scenario = model.scenario
    families = []
    for item in mu_strategy:
        if isinstance(item, ExtensionFamily):
            fam = item
        elif item == "uniform":
            fam = uniform_family(scenario.sources, scenario.instances)
        elif isinstance(item, Mapping):
            fam = family_from_data(item, scenario)
        else:
            raise ContextureError(f'mu strategy entries are "uniform", families or {{"mu": ...}} data, got {item!r}')
        if fam.instances != scenario.instances:
            raise ContextureError(f"extension family over instances {list(fam.instances)}, expected {list(scenario.instances)}")
        if fam not in families:
            families.append(fam)
    return families


def _probabilistic_pass(
    model: PreparationEmpiricalModel, families: list[ExtensionFamily], patterns_checked: int = 0
) -> Verdict:
    incompatible = []
    compatible = 0
    pivots = 0
    for n, fam in enumerate(families, 1):
        report = prep_compatible(model, fam)
        if not report.ok:
            display.vv(f"extension family {n}/{len(families)} is not preparation compatible")
            incompatible.extend(report.violations)
            continue
        compatible += 1
        A, b = _factor_lp(model, fam)
        display.v(f"preparation LP for family {n}/{len(families)}: {A.rows} equations over {A.cols} unknowns")
        result = solve_linear_feasibility(A, b)
        pivots += result.pivots
        if result.feasible:
            E_m = stack(model)
            D = RatMatrix(E_m.rows, A.cols // E_m.rows, result.witness)
            if not verify_preparation_witness(model, fam, D):
                raise ContextureError("global response matrix does not reproduce the empirical model")
            return Verdict(
                VerdictStatus.NONCONTEXTUAL,
                Mode.PROBABILISTIC,
                witness=Witness(D, mu=fam),
                stats=Stats(patterns_checked, pivots),
            )
        display.vv(f"extension family {n}/{len(families)}: {result.obstruction}")
    reason = "no supplied extension family admits a column-stochastic D with E_m = D S_Y"
    if not compatible:
        reason = "no supplied extension family is preparation compatible"
    return Verdict(
        VerdictStatus.INCONCLUSIVE,
        Mode.PROBABILISTIC,
        incompatibility=tuple(incompatible),
        reason=reason,
        stats=Stats(patterns_checked, pivots),
    )


@beartype
def check_preparation(
    model: PreparationEmpiricalModel,
    mode: str | Mode = Mode.AUTO,
    mu_strategy: Sequence = (),
    max_sweep: int | None = None,
) -> Verdict:
    """
    mu_strategy entries are "uniform", ExtensionFamily objects or {"mu": {...}} data.
    probabilistic mode needs at least one. auto mode always tries the uniform family first.
    """
    validate(model)
    mode = parse_mode(mode)
    if mode == Mode.POSSIBILISTIC:
        return _possibilistic_sweep(model, sweep_limit(max_sweep))
    if mode == Mode.PROBABILISTIC:
        families = _resolve_families(model, mu_strategy)
        if not families:
            raise ContextureError("probabilistic preparation checks need at least one extension family")
        return _probabilistic_pass(model, families)

    swept = _possibilistic_sweep(model, sweep_limit(max_sweep))
    if swept.status == VerdictStatus.CONTEXTUAL:
        return replace(swept, reason="possibilistic contextuality implies probabilistic contextuality")
    families = _resolve_families(model, ["uniform", *mu_strategy])
    verdict = _probabilistic_pass(model, families, swept.stats.patterns_checked)
    if verdict.status == VerdictStatus.NONCONTEXTUAL:
        return verdict
    return replace(verdict, reason=UNRESOLVED)
