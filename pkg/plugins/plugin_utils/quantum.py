"""
empirical models from quantum specifications via the Born rule

measurement: a pure state on a product of sites, one orthonormal basis per measurement,
             each measurement acting on one site. E_C(s) = <psi| (x) projectors |psi>
preparation: one density matrix per (source, instance) and one POVM on the joint system of a context.
             E_{m|Γ}(k|σ) = Tr[M_k (x)_{p in Γ} rho^p_{σ_p}]

probabilities are computed in double precision and then rationalized, so every model that comes out
of here is exact. the two built-ins are the bell and PBR arrangements.
"""

import json
import math
import functools
from numbers import Real
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from ansible.utils.display import Display

from ansible_collections.unity.contexture.plugins.plugin_utils.beartype import beartype
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import (
    ModelError,
    QuantumSpecError,
    RationalizeError,
    ScenarioError,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.models import (
    MeasurementEmpiricalModel,
    PreparationEmpiricalModel,
    validate,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.ratbool import RatMatrix
from ansible_collections.unity.contexture.plugins.plugin_utils.scenario import (
    MeasurementScenario,
    PreparationScenario,
    sections_of,
)

display = Display()

MAX_DENOMINATOR = 64
TOLERANCE = 1e-9
MAX_DIMENSION = 64


@beartype
def rationalize(x: Real, max_denominator: int = MAX_DENOMINATOR, tolerance: Real = TOLERANCE) -> Fraction:
    """
    0.375 -> 3/8
    0.2499999999 -> 1/4
    """
    if tolerance <= 0:
        raise RationalizeError(f"tolerance must be positive, got {tolerance}")
    if not math.isfinite(x):
        raise RationalizeError(f"cannot rationalize {x}")
    q = Fraction(x).limit_denominator(max_denominator)
    error = abs(float(q) - x)
    if error > tolerance:
        raise RationalizeError(
            f"no rational with denominator <= {max_denominator} within {tolerance} of {x!r}, closest is {q}"
        )
    if error > tolerance / 2:
        display.warning(f"{x!r} rationalized to {q} with error {error:.3g}, close to the tolerance {tolerance}")
    return q


def _max_deviation(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def _check_state(state: np.ndarray, name: str):
    norm = float(np.linalg.norm(state))
    if abs(norm - 1) > TOLERANCE:
        raise QuantumSpecError(f"{name} is not normalized: norm {norm!r}")


def _check_density(rho: np.ndarray, name: str):
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise QuantumSpecError(f"{name} is not a square matrix: shape {rho.shape}")
    deviation = _max_deviation(rho, rho.conj().T)
    if deviation > TOLERANCE:
        raise QuantumSpecError(f"{name} is not hermitian: deviation {deviation:.3g}")
    trace = complex(np.trace(rho))
    if abs(trace - 1) > TOLERANCE:
        raise QuantumSpecError(f"{name} does not have trace 1: trace {trace.real:.12g}")
    smallest = float(np.min(np.linalg.eigvalsh(rho)))
    if smallest < -TOLERANCE:
        raise QuantumSpecError(f"{name} is not positive semidefinite: eigenvalue {smallest:.3g}")


@beartype
@dataclass(frozen=True)
class PovmReport:
    deviation: float
    smallest_eigenvalue: float

    @property
    def ok(self) -> bool:
        return self.deviation <= TOLERANCE and self.smallest_eigenvalue >= -TOLERANCE


def check_povm(effects) -> PovmReport:
    """how far sum(effects) is from the identity, and the most negative eigenvalue of any effect"""
    effects = [np.asarray(m, dtype=complex) for m in effects]
    if not effects:
        raise QuantumSpecError("a POVM needs at least one effect")
    dim = effects[0].shape[0]
    for k, m in enumerate(effects):
        if m.shape != (dim, dim):
            raise QuantumSpecError(f"effect {k} has shape {m.shape}, expected {(dim, dim)}")
        deviation = _max_deviation(m, m.conj().T)
        if deviation > TOLERANCE:
            raise QuantumSpecError(f"effect {k} is not hermitian: deviation {deviation:.3g}")
    total = functools.reduce(np.add, effects)
    return PovmReport(
        _max_deviation(total, np.eye(dim)),
        min(float(np.min(np.linalg.eigvalsh(m))) for m in effects),
    )


@beartype
@dataclass(frozen=True, eq=False)
class QuantumMeasurementSpec:
    """
    bases[x] holds the basis vectors of measurement x as rows, one per outcome.
    measurement x acts on site sites[x].
    """

    state: np.ndarray
    dims: tuple[int, ...]
    measurements: tuple[str, ...]
    sites: tuple[int, ...]
    bases: tuple[np.ndarray, ...]
    outcomes: tuple[str, ...]
    cover: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        total = math.prod(self.dims)
        if total > MAX_DIMENSION:
            raise QuantumSpecError(f"joint dimension {total} is larger than {MAX_DIMENSION}")
        if self.state.shape != (total,):
            raise QuantumSpecError(f"state has shape {self.state.shape}, expected ({total},) for dims {self.dims}")
        _check_state(self.state, "state")
        if not (len(self.measurements) == len(self.sites) == len(self.bases)):
            raise QuantumSpecError("every measurement needs exactly one site and one basis")
        for label, site, basis in zip(self.measurements, self.sites, self.bases):
            if not 0 <= site < len(self.dims):
                raise QuantumSpecError(f'measurement "{label}" acts on site {site}, but there are {len(self.dims)} sites')
            dim = self.dims[site]
            if basis.shape != (dim, dim) or dim != len(self.outcomes):
                raise QuantumSpecError(
                    f'basis of "{label}" has shape {basis.shape}, expected {len(self.outcomes)} vectors of length {dim}'
                )
            deviation = _max_deviation(basis @ basis.conj().T, np.eye(dim))
            if deviation > TOLERANCE:
                raise QuantumSpecError(f'basis of "{label}" is not orthonormal: deviation {deviation:.3g}')
        for i, context in enumerate(self.cover):
            sites = [self.sites[self.measurements.index(x)] for x in context if x in self.measurements]
            if len(set(sites)) != len(sites):
                raise QuantumSpecError(f"context {i} {list(context)} measures one site twice")


@beartype
@dataclass(frozen=True, eq=False)
class QuantumPrepSpec:
    """
    densities[p][i] is the state prepared by source p on instance i.
    effects act on the joint system of any source context, which must all have the same dimension.
    """

    sources: tuple[str, ...]
    instances: tuple[str, ...]
    densities: tuple[tuple[np.ndarray, ...], ...]
    effects: tuple[np.ndarray, ...]
    outcomes: tuple[str, ...]
    cover: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.densities) != len(self.sources):
            raise QuantumSpecError(f"{len(self.densities)} density lists for {len(self.sources)} sources")
        if len(self.effects) != len(self.outcomes):
            raise QuantumSpecError(f"{len(self.effects)} effects for {len(self.outcomes)} outcomes")
        dims = set()
        for label, states in zip(self.sources, self.densities):
            if len(states) != len(self.instances):
                raise QuantumSpecError(f'source "{label}" has {len(states)} states for {len(self.instances)} instances')
            for instance, rho in zip(self.instances, states):
                _check_density(rho, f'density of source "{label}" instance "{instance}"')
                dims.add(rho.shape[0])
        if len(dims) != 1:
            raise QuantumSpecError(f"sources prepare systems of different dimensions {sorted(dims)}")
        dim = dims.pop()
        for i, context in enumerate(self.cover):
            joint = dim ** len(context)
            if joint > MAX_DIMENSION:
                raise QuantumSpecError(f"context {i} has joint dimension {joint}, larger than {MAX_DIMENSION}")
            if any(m.shape != (joint, joint) for m in self.effects):
                raise QuantumSpecError(
                    f"context {i} {list(context)} has joint dimension {joint}, effects have shape {self.effects[0].shape}"
                )
        report = check_povm(self.effects)
        if report.smallest_eigenvalue < -TOLERANCE:
            raise QuantumSpecError(f"an effect is not positive semidefinite: eigenvalue {report.smallest_eigenvalue:.3g}")
        if report.deviation > TOLERANCE:
            raise QuantumSpecError(f"effects do not sum to the identity: deviation {report.deviation:.3g}")


def _projector(vector: np.ndarray) -> np.ndarray:
    return np.outer(vector, vector.conj())


def _rational_model(build, what: str):
    try:
        model = build()
        validate(model)
    except ModelError as e:
        raise RationalizeError(f"rationalized {what} is not stochastic: {e}") from e
    return model


@beartype
def born_measurement(
    spec: QuantumMeasurementSpec, max_denominator: int = MAX_DENOMINATOR, tolerance: Real = TOLERANCE
) -> MeasurementEmpiricalModel:
    try:
        scenario = MeasurementScenario(spec.measurements, spec.outcomes, spec.cover)
    except ScenarioError as e:
        raise QuantumSpecError(e.reason) from e
    distributions = []
    for context in spec.cover:
        site_of = {spec.sites[spec.measurements.index(x)]: spec.measurements.index(x) for x in context}
        row = []
        for section in sections_of(context, spec.outcomes):
            chosen = dict(zip(context, section))
            factors = []
            for site, dim in enumerate(spec.dims):
                if site in site_of:
                    x = site_of[site]
                    outcome = spec.outcomes.index(chosen[spec.measurements[x]])
                    factors.append(_projector(spec.bases[x][outcome]))
                else:
                    factors.append(np.eye(dim))
            operator = functools.reduce(np.kron, factors)
            probability = float(np.real(np.vdot(spec.state, operator @ spec.state)))
            row.append(rationalize(probability, max_denominator, tolerance))
        distributions.append(tuple(row))
    display.v(f"born rule over {len(spec.cover)} contexts, joint dimension {math.prod(spec.dims)}")
    return _rational_model(lambda: MeasurementEmpiricalModel(scenario, tuple(distributions)), "measurement model")


@beartype
def born_preparation(
    spec: QuantumPrepSpec, max_denominator: int = MAX_DENOMINATOR, tolerance: Real = TOLERANCE
) -> PreparationEmpiricalModel:
    try:
        scenario = PreparationScenario(spec.sources, spec.instances, spec.cover, spec.outcomes)
    except ScenarioError as e:
        raise QuantumSpecError(e.reason) from e
    tables = []
    for context in spec.cover:
        columns = []
        for section in sections_of(context, spec.instances):
            rho = functools.reduce(
                np.kron,
                [spec.densities[spec.sources.index(p)][spec.instances.index(i)] for p, i in zip(context, section)],
            )
            columns.append(
                [rationalize(float(np.real(np.trace(m @ rho))), max_denominator, tolerance) for m in spec.effects]
            )
        tables.append(RatMatrix.from_rows([list(x) for x in zip(*columns)], cols=len(columns)))
    display.v(f"born rule over {len(spec.cover)} source contexts, {len(spec.effects)} effects")
    return _rational_model(lambda: PreparationEmpiricalModel(scenario, tuple(tables)), "preparation model")


KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = (KET_0 + KET_1) / np.sqrt(2)
KET_MINUS = (KET_0 - KET_1) / np.sqrt(2)


def bell_spec() -> QuantumMeasurementSpec:
    """|Φ+>, a and a' on the first qubit, b and b' on the second"""
    c, s = np.cos(np.pi / 6), np.sin(np.pi / 6)
    computational = np.array([KET_0, KET_1])
    return QuantumMeasurementSpec(
        state=(np.kron(KET_0, KET_0) + np.kron(KET_1, KET_1)) / np.sqrt(2),
        dims=(2, 2),
        measurements=("a", "a'", "b", "b'"),
        sites=(0, 0, 1, 1),
        bases=(
            computational,
            np.array([c * KET_0 + s * KET_1, -s * KET_0 + c * KET_1]),
            computational,
            np.array([c * KET_0 - s * KET_1, s * KET_0 + c * KET_1]),
        ),
        outcomes=("0", "1"),
        cover=(("a", "b"), ("a'", "b"), ("a", "b'"), ("a'", "b'")),
    )


def pbr_spec() -> QuantumPrepSpec:
    """
    sources a, b prepare |0> or |1>, sources a', b' prepare |+> or |->.
    the joint measurement projects onto the normalized
      |01> + |10>,  |0-> + |1+>,  |+1> + |-0>,  |+-> + |-+>
    """
    xi = [
        np.kron(KET_0, KET_1) + np.kron(KET_1, KET_0),
        np.kron(KET_0, KET_MINUS) + np.kron(KET_1, KET_PLUS),
        np.kron(KET_PLUS, KET_1) + np.kron(KET_MINUS, KET_0),
        np.kron(KET_PLUS, KET_MINUS) + np.kron(KET_MINUS, KET_PLUS),
    ]
    z_states = (_projector(KET_0), _projector(KET_1))
    x_states = (_projector(KET_PLUS), _projector(KET_MINUS))
    return QuantumPrepSpec(
        sources=("a", "b", "a'", "b'"),
        instances=("0", "1"),
        densities=(z_states, z_states, x_states, x_states),
        effects=tuple(_projector(v / np.linalg.norm(v)) for v in xi),
        outcomes=("1", "2", "3", "4"),
        cover=(("a", "b"), ("a", "b'"), ("a'", "b"), ("a'", "b'")),
    )


def builtin_bell() -> MeasurementEmpiricalModel:
    return born_measurement(bell_spec())


def builtin_pbr() -> PreparationEmpiricalModel:
    return born_preparation(pbr_spec())


BUILTINS = {"bell": builtin_bell, "pbr": builtin_pbr}


def _complex(value, path: str) -> complex:
    if isinstance(value, bool):
        raise QuantumSpecError(f"{path}: expected a number or [re, im], got {json.dumps(value)}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(x, (int, float)) for x in value):
        return complex(value[0], value[1])
    raise QuantumSpecError(f"{path}: expected a number or [re, im], got {json.dumps(value)}")


def _vector(value, path: str) -> np.ndarray:
    if not isinstance(value, list):
        raise QuantumSpecError(f"{path}: expected a list of entries")
    return np.array([_complex(x, f"{path}[{i}]") for i, x in enumerate(value)], dtype=complex)


def _matrix(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise QuantumSpecError(f"{path}: expected a list of rows")
    rows = [_vector(row, f"{path}[{i}]") for i, row in enumerate(value)]
    if len({len(r) for r in rows}) != 1:
        raise QuantumSpecError(f"{path}: ragged matrix")
    return np.array(rows)


def _labels(data: dict, key: str) -> tuple[str, ...]:
    value = data.get(key)
    if not isinstance(value, list):
        raise QuantumSpecError(f'{key}: expected a list of labels, got {json.dumps(value)}')
    return tuple(str(x) for x in value)


def _cover(data: dict) -> tuple[tuple[str, ...], ...]:
    value = data.get("cover")
    if not isinstance(value, list) or not all(isinstance(c, list) for c in value):
        raise QuantumSpecError(f"cover: expected a list of contexts, got {json.dumps(value)}")
    return tuple(tuple(str(x) for x in c) for c in value)


def spec_from_data(data) -> QuantumMeasurementSpec | QuantumPrepSpec:
    """
    measurement:
      {"kind": "measurement", "dims": [2, 2], "state": [...], "outcomes": [...],
       "measurements": {"a": {"site": 0, "basis": [[...], [...]]}, ...}, "cover": [[...], ...]}
    preparation:
      {"kind": "preparation", "sources": {"a": [rho_0, rho_1], ...}, "instances": [...],
       "outcomes": [...], "effects": [M_1, ...], "cover": [[...], ...]}
    complex entries are numbers or [re, im] pairs
    """
    if not isinstance(data, dict):
        raise QuantumSpecError("expected a JSON object")
    kind = data.get("kind")
    if kind == "measurement":
        measurements = data.get("measurements")
        if not isinstance(measurements, dict):
            raise QuantumSpecError('measurements: expected an object keyed by measurement label')
        dims = data.get("dims")
        if not isinstance(dims, list) or not all(isinstance(d, int) and d > 0 for d in dims):
            raise QuantumSpecError(f"dims: expected a list of positive integers, got {json.dumps(dims)}")
        sites, bases = [], []
        for label, entry in measurements.items():
            if not isinstance(entry, dict) or not isinstance(entry.get("site"), int):
                raise QuantumSpecError(f'measurements.{label}: expected {{"site": int, "basis": [...]}}')
            sites.append(entry["site"])
            bases.append(_matrix(entry.get("basis"), f"measurements.{label}.basis"))
        return QuantumMeasurementSpec(
            state=_vector(data.get("state"), "state"),
            dims=tuple(dims),
            measurements=tuple(str(x) for x in measurements),
            sites=tuple(sites),
            bases=tuple(bases),
            outcomes=_labels(data, "outcomes"),
            cover=_cover(data),
        )
    if kind == "preparation":
        sources = data.get("sources")
        if not isinstance(sources, dict):
            raise QuantumSpecError("sources: expected an object keyed by source label")
        densities = []
        for label, states in sources.items():
            if not isinstance(states, list):
                raise QuantumSpecError(f"sources.{label}: expected one density matrix per instance")
            densities.append(tuple(_matrix(rho, f"sources.{label}[{i}]") for i, rho in enumerate(states)))
        effects = data.get("effects")
        if not isinstance(effects, list):
            raise QuantumSpecError("effects: expected a list of matrices")
        return QuantumPrepSpec(
            sources=tuple(str(x) for x in sources),
            instances=_labels(data, "instances"),
            densities=tuple(densities),
            effects=tuple(_matrix(m, f"effects[{k}]") for k, m in enumerate(effects)),
            outcomes=_labels(data, "outcomes"),
            cover=_cover(data),
        )
    raise QuantumSpecError(f'kind: expected "measurement" or "preparation", got {json.dumps(kind)}')


def load_spec(data: bytes | str) -> QuantumMeasurementSpec | QuantumPrepSpec:
    try:
        return spec_from_data(json.loads(data))
    except ValueError as e:
        raise QuantumSpecError(f"invalid JSON: {e}") from e


def born(
    spec: QuantumMeasurementSpec | QuantumPrepSpec,
    max_denominator: int = MAX_DENOMINATOR,
    tolerance: Real = TOLERANCE,
) -> MeasurementEmpiricalModel | PreparationEmpiricalModel:
    if isinstance(spec, QuantumMeasurementSpec):
        return born_measurement(spec, max_denominator, tolerance)
    return born_preparation(spec, max_denominator, tolerance)
