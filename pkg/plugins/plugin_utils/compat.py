"""
compatibility of the contexts of an empirical model

measurement: no-signalling. every pair of contexts induces the same distribution on its intersection
preparation: for a given extension family, E_{m|Γ} S_{Γ|Γ∩Γ'} = E_{m|Γ'} S_{Γ'|Γ∩Γ'} for every pair

an empty intersection is not skipped. the marginal onto it is the total probability (measurement)
or the mu-weighted average of the columns (preparation).
"""

from fractions import Fraction
from dataclasses import dataclass

from ansible.utils.display import Display

from ansible_collections.unity.contexture.plugins.plugin_utils.beartype import beartype
from ansible_collections.unity.contexture.plugins.plugin_utils.incext import (
    ExtensionFamily,
    extension,
    format_labels,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.models import (
    MeasurementEmpiricalModel,
    PreparationEmpiricalModel,
    marginal,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import (
    RatMatrix,
    format_rational,
)

display = Display()


@beartype
@dataclass(frozen=True)
class PairCheck:
    contexts: tuple[int, int]
    pair: tuple[tuple[str, ...], tuple[str, ...]]
    intersection: tuple[str, ...]
    # measurement: marginal distributions. preparation: |O| x |I|^|Γ∩Γ'| matrices
    lhs: tuple[Fraction, ...] | RatMatrix
    rhs: tuple[Fraction, ...] | RatMatrix

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def describe(self) -> str:
        left, right = self.pair
        return f"({format_labels(left)}) vs ({format_labels(right)}) on ({format_labels(self.intersection)})"

    def to_json(self) -> dict:
        def _side(x):
            return x.to_json() if isinstance(x, RatMatrix) else [format_rational(v) for v in x]

        return {
            "pair": [list(self.pair[0]), list(self.pair[1])],
            "intersection": list(self.intersection),
            "lhs": _side(self.lhs),
            "rhs": _side(self.rhs),
            "equal": self.equal,
        }


@beartype
@dataclass(frozen=True)
class CompatibilityReport:
    check: str
    pairs: tuple[PairCheck, ...]

    @property
    def ok(self) -> bool:
        return all(p.equal for p in self.pairs)

    @property
    def violations(self) -> tuple[PairCheck, ...]:
        return tuple(p for p in self.pairs if not p.equal)

    def to_json(self) -> dict:
        return {"check": self.check, "compatible": self.ok, "pairs": [p.to_json() for p in self.pairs]}


def _log(report: CompatibilityReport):
    for violation in report.violations:
        display.vv(f"{report.check}: {violation.describe()} differ")
    display.v(f"{report.check}: {len(report.violations)} of {len(report.pairs)} context pairs differ")


@beartype
def no_signalling(model: MeasurementEmpiricalModel) -> CompatibilityReport:
    scenario = model.scenario
    checks = []
    for i, j in scenario.pairs():
        intersection = scenario.intersect(i, j)
        checks.append(
            PairCheck(
                (i, j),
                (scenario.cover[i], scenario.cover[j]),
                intersection,
                marginal(model, i, intersection),
                marginal(model, j, intersection),
            )
        )
    report = CompatibilityReport("no_signalling", tuple(checks))
    _log(report)
    return report


@beartype
def prep_compatible(model: PreparationEmpiricalModel, fam: ExtensionFamily) -> CompatibilityReport:
    scenario = model.scenario
    checks = []
    for i, j in scenario.pairs():
        intersection = scenario.intersect(i, j)
        left, right = scenario.source_cover[i], scenario.source_cover[j]
        checks.append(
            PairCheck(
                (i, j),
                (left, right),
                intersection,
                model.tables[i] @ extension(left, intersection, fam),
                model.tables[j] @ extension(right, intersection, fam),
            )
        )
    report = CompatibilityReport("preparation_compatibility", tuple(checks))
    _log(report)
    return report
