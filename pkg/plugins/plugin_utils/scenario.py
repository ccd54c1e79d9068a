"""
measurement and preparation scenarios, and lexicographic indexing of their sections.

a section over labels (a, b) with alphabet (0, 1) is a tuple of alphabet labels aligned with
(a, b). sections are ranked lexicographically with the leftmost label most significant:
(0,0), (0,1), (1,0), (1,1)
"""

import itertools
from dataclasses import dataclass
from collections.abc import Iterator, Sequence

from ansible.utils.display import Display

from ansible_collections.unity.contexture.plugins.plugin_utils.beartype import beartype
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import ScenarioError

type Labels = tuple[str, ...]
type Section = tuple[str, ...]

display = Display()


def _check_unique(labels: Sequence[str], name: str):
    seen = set()
    for label in labels:
        if label in seen:
            raise ScenarioError(f'duplicate label "{label}" in {name} {list(labels)}')
        seen.add(label)


@beartype
@dataclass(frozen=True)
class SectionIndex:
    base_set: tuple[str, ...]
    alphabet: tuple[str, ...]

    def __post_init__(self):
        _check_unique(self.base_set, "subset")
        _check_unique(self.alphabet, "alphabet")
        if not self.alphabet:
            raise ScenarioError("alphabet must not be empty")
        object.__setattr__(self, "_positions", {x: i for i, x in enumerate(self.alphabet)})

    @property
    def size(self) -> int:
        return len(self.alphabet) ** len(self.base_set)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Section]:
        return itertools.product(self.alphabet, repeat=len(self.base_set))

    def index(self, section: Sequence[str]) -> int:
        if len(section) != len(self.base_set):
            raise ScenarioError(f"section {tuple(section)} does not match labels {self.base_set}")
        rank = 0
        for value in section:
            try:
                rank = rank * len(self.alphabet) + self._positions[value]
            except KeyError as e:
                raise ScenarioError(f'value "{value}" not found in alphabet {self.alphabet}') from e
        return rank

    def section(self, index: int) -> Section:
        if not 0 <= index < self.size:
            raise ScenarioError(f"section index {index} out of range [0, {self.size})")
        base = len(self.alphabet)
        digits = []
        for _ in self.base_set:
            index, digit = divmod(index, base)
            digits.append(self.alphabet[digit])
        return tuple(reversed(digits))


@beartype
def sections_of(subset: Sequence[str], alphabet: Sequence[str]) -> SectionIndex:
    return SectionIndex(tuple(subset), tuple(alphabet))


@beartype
def restrict(section: Sequence[str], from_: Sequence[str], to: Sequence[str]) -> Section:
    """
    restrict((0, 1, 1, 0), (a, b, a', b'), (a, b)) -> (0, 1)
    """
    if len(section) != len(from_):
        raise ScenarioError(f"section {tuple(section)} is not defined on {tuple(from_)}")
    positions = {label: i for i, label in enumerate(from_)}
    try:
        return tuple(section[positions[label]] for label in to)
    except KeyError as e:
        raise ScenarioError(f"{tuple(to)} is not a subset of {tuple(from_)}: {e.args[0]} missing") from e


@beartype
@dataclass(frozen=True)
class CoverReport:
    labels: tuple[str, ...]
    contexts: int
    # (i, j): context i is contained in context j
    nested: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {"valid": True, "contexts": self.contexts, "nested": [list(x) for x in self.nested]}


class _Scenario:
    """shared behaviour of both scenario flavours, which only differ in naming"""

    @property
    def labels(self) -> Labels:
        raise NotImplementedError

    @property
    def alphabet(self) -> Labels:
        raise NotImplementedError

    @property
    def contexts(self) -> tuple[Labels, ...]:
        raise NotImplementedError

    def _check(self, labels_name: str, alphabet_name: str):
        _check_unique(self.labels, labels_name)
        _check_unique(self.alphabet, alphabet_name)
        if not self.alphabet:
            raise ScenarioError(f"{alphabet_name} must not be empty")
        if not self.contexts:
            raise ScenarioError("cover must contain at least one context")
        for i, context in enumerate(self.contexts):
            if not context:
                raise ScenarioError(f"context {i} is empty")
            _check_unique(context, f"context {i}")
            for label in context:
                if label not in self.labels:
                    raise ScenarioError(f'label "{label}" of context {i} not found in {labels_name} {self.labels}')
        validate_cover(self)

    def ordered(self, subset) -> Labels:
        """subset in scenario definition order"""
        subset = set(subset)
        return tuple(x for x in self.labels if x in subset)

    def intersect(self, i: int, j: int) -> Labels:
        return self.ordered(set(self.contexts[i]) & set(self.contexts[j]))

    def pairs(self) -> Iterator[tuple[int, int]]:
        return itertools.combinations(range(len(self.contexts)), 2)

    def global_sections(self) -> SectionIndex:
        return sections_of(self.labels, self.alphabet)

    def context_sections(self, i: int) -> SectionIndex:
        return sections_of(self.contexts[i], self.alphabet)

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as e:
            raise ScenarioError(f'label "{label}" not found in {self.labels}') from e


@beartype
@dataclass(frozen=True)
class MeasurementScenario(_Scenario):
    measurements: tuple[str, ...]
    outcomes: tuple[str, ...]
    cover: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        self._check("measurements", "outcomes")

    @property
    def labels(self) -> Labels:
        return self.measurements

    @property
    def alphabet(self) -> Labels:
        return self.outcomes

    @property
    def contexts(self) -> tuple[Labels, ...]:
        return self.cover


@beartype
@dataclass(frozen=True)
class PreparationScenario(_Scenario):
    sources: tuple[str, ...]
    instances: tuple[str, ...]
    source_cover: tuple[tuple[str, ...], ...]
    outcomes: tuple[str, ...]

    def __post_init__(self):
        self._check("sources", "instances")
        _check_unique(self.outcomes, "outcomes")
        if not self.outcomes:
            raise ScenarioError("outcomes must not be empty")

    @property
    def labels(self) -> Labels:
        return self.sources

    @property
    def alphabet(self) -> Labels:
        return self.instances

    @property
    def contexts(self) -> tuple[Labels, ...]:
        return self.source_cover


type Scenario = MeasurementScenario | PreparationScenario


def validate_cover(scenario: _Scenario) -> CoverReport:
    covered = set(itertools.chain.from_iterable(scenario.contexts))
    missing = [x for x in scenario.labels if x not in covered]
    if missing:
        raise ScenarioError(f"cover does not cover {missing}: {[list(c) for c in scenario.contexts]}")
    nested = tuple(
        (i, j)
        for i, ci in enumerate(scenario.contexts)
        for j, cj in enumerate(scenario.contexts)
        if i != j and set(ci) <= set(cj)
    )
    for i, j in nested:
        display.vv(f"context {i} {list(scenario.contexts[i])} is contained in context {j}")
    return CoverReport(scenario.labels, len(scenario.contexts), nested)
