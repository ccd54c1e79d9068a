"""
exact numeric kernel for contexture

RatMatrix       dense row-major matrix of fractions.Fraction
BoolMatrix      dense row-major matrix over the boolean semiring ({0,1}, or, and)

solve_linear_feasibility    A x = b, x >= 0, decided by a phase one simplex with Bland's rule.
                            infeasible systems come back with a Farkas vector y such that
                            y^T A <= 0 and y^T b > 0, read off the final tableau.
solve_boolean_factor        Ebar = Dbar Sbar, decided by the canonical monotone candidate Dmax
"""

import re
from enum import Enum
from numbers import Rational
from fractions import Fraction
from dataclasses import dataclass, replace
from collections.abc import Sequence

from ansible.utils.display import Display

from ansible_collections.unity.contexture.plugins.plugin_utils.beartype import beartype
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import (
    ContextureError,
    DimensionError,
    ModelError,
)

display = Display()

ZERO = Fraction(0)
ONE = Fraction(1)

_FRACTION_REGEX = re.compile(r"^[+-]?\d+(/\d+)?$")
_DECIMAL_REGEX = re.compile(r"^[+-]?(\d+\.\d*|\.\d+)$")


def to_rational(value) -> Fraction:
    """
    3 -> 3
    "3/8" -> 3/8
    "0.25" -> 1/4
    0.25 -> ModelError (binary floats are never rounded silently)
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ModelError(f'binary float "{value!r}" is not an exact rational, quote it as a string')
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if _FRACTION_REGEX.match(text) or _DECIMAL_REGEX.match(text):
            try:
                return Fraction(text)
            except ZeroDivisionError as e:
                raise ModelError(f'rational "{value}" has a zero denominator') from e
        raise ModelError(f'"{value}" is not a rational ("p/q", integer or finite decimal)')
    raise ModelError(f'expected a rational, got {type(value).__name__} "{value!r}"')


def format_rational(value: Fraction) -> str:
    return str(value)


def dot(left: Sequence[Fraction], right: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(left, right, strict=True) if x and y), ZERO)


@beartype
@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Rational, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError(f"negative matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"a {self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        object.__setattr__(self, "entries", tuple(to_rational(x) for x in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise DimensionError(f"ragged matrix: row {i} has {len(row)} entries, expected {cols}")
        return cls(len(rows), cols, tuple(to_rational(x) for row in rows for x in row))

    @classmethod
    def column_vector(cls, values: Sequence) -> "RatMatrix":
        return cls(len(values), 1, tuple(to_rational(x) for x in values))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> "RatMatrix":
        return cls(size, size, tuple(ONE if i == j else ZERO for i in range(size) for j in range(size)))

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j :: self.cols] if self.cols else ()

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix.from_rows([self.column(j) for j in range(self.cols)], cols=self.rows)

    def scaled(self, factor) -> "RatMatrix":
        factor = to_rational(factor)
        return RatMatrix(self.rows, self.cols, tuple(x * factor for x in self.entries))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        other_columns = [other.column(j) for j in range(other.cols)]
        return RatMatrix(
            self.rows,
            other.cols,
            tuple(dot(self.row(i), col) for i in range(self.rows) for col in other_columns),
        )

    def apply(self, vector: Sequence) -> tuple[Fraction, ...]:
        if len(vector) != self.cols:
            raise DimensionError(f"cannot apply {self.rows}x{self.cols} matrix to a vector of length {len(vector)}")
        vector = [to_rational(x) for x in vector]
        return tuple(dot(self.row(i), vector) for i in range(self.rows))

    def column_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(self.column(j), ZERO) for j in range(self.cols))

    def is_column_stochastic(self) -> bool:
        return all(x >= 0 for x in self.entries) and all(s == 1 for s in self.column_sums())

    def support(self) -> "BoolMatrix":
        return BoolMatrix(self.rows, self.cols, tuple(x != 0 for x in self.entries))

    def to_json(self) -> list[list[str]]:
        return [[format_rational(x) for x in self.row(i)] for i in range(self.rows)]


@beartype
@dataclass(frozen=True)
class BoolMatrix:
    rows: int
    cols: int
    entries: tuple[bool, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"a {self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "BoolMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise DimensionError(f"ragged matrix: row {i} has {len(row)} entries, expected {cols}")
        return cls(len(rows), cols, tuple(bool(x) for row in rows for x in row))

    @classmethod
    def identity(cls, size: int) -> "BoolMatrix":
        return cls(size, size, tuple(i == j for i in range(size) for j in range(size)))

    def __getitem__(self, index: tuple[int, int]) -> bool:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[bool, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[bool, ...]:
        return self.entries[j :: self.cols] if self.cols else ()

    def transpose(self) -> "BoolMatrix":
        return BoolMatrix.from_rows([self.column(j) for j in range(self.cols)], cols=self.rows)

    def __matmul__(self, other: "BoolMatrix") -> "BoolMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        other_columns = [other.column(j) for j in range(other.cols)]
        return BoolMatrix(
            self.rows,
            other.cols,
            tuple(
                any(x and y for x, y in zip(self.row(i), col)) for i in range(self.rows) for col in other_columns
            ),
        )

    def __le__(self, other: "BoolMatrix") -> bool:
        return (self.rows, self.cols) == (other.rows, other.cols) and all(
            y or not x for x, y in zip(self.entries, other.entries)
        )

    def count(self) -> int:
        return sum(self.entries)

    def to_rationals(self) -> RatMatrix:
        return RatMatrix(self.rows, self.cols, tuple(ONE if x else ZERO for x in self.entries))

    def to_json(self) -> list[list[int]]:
        return [[int(x) for x in self.row(i)] for i in range(self.rows)]


def hstack(matrices: Sequence[RatMatrix]) -> RatMatrix:
    if not matrices:
        raise DimensionError("cannot stack zero matrices")
    rows = matrices[0].rows
    for m in matrices:
        if m.rows != rows:
            raise DimensionError(f"cannot stack side by side: {m.rows} rows != {rows} rows")
    return RatMatrix.from_rows(
        [[x for m in matrices for x in m.row(i)] for i in range(rows)], cols=sum(m.cols for m in matrices)
    )


def vstack(matrices: Sequence[RatMatrix]) -> RatMatrix:
    if not matrices:
        raise DimensionError("cannot stack zero matrices")
    cols = matrices[0].cols
    for m in matrices:
        if m.cols != cols:
            raise DimensionError(f"cannot stack on top: {m.cols} columns != {cols} columns")
    return RatMatrix(sum(m.rows for m in matrices), cols, tuple(x for m in matrices for x in m.entries))


def bool_hstack(matrices: Sequence[BoolMatrix]) -> BoolMatrix:
    if not matrices:
        raise DimensionError("cannot stack zero matrices")
    rows = matrices[0].rows
    for m in matrices:
        if m.rows != rows:
            raise DimensionError(f"cannot stack side by side: {m.rows} rows != {rows} rows")
    return BoolMatrix.from_rows(
        [[x for m in matrices for x in m.row(i)] for i in range(rows)], cols=sum(m.cols for m in matrices)
    )


def bool_vstack(matrices: Sequence[BoolMatrix]) -> BoolMatrix:
    if not matrices:
        raise DimensionError("cannot stack zero matrices")
    cols = matrices[0].cols
    for m in matrices:
        if m.cols != cols:
            raise DimensionError(f"cannot stack on top: {m.cols} columns != {cols} columns")
    return BoolMatrix(sum(m.rows for m in matrices), cols, tuple(x for m in matrices for x in m.entries))


class Status(str, Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"


@dataclass(frozen=True)
class FeasibilityResult:
    status: Status
    witness: tuple[Fraction, ...] | BoolMatrix | None = None
    obstruction: str | None = None
    # Farkas vector, linear case only
    certificate: tuple[Fraction, ...] | None = None
    # boolean case only
    emptied_columns: tuple[int, ...] = ()
    uncovered_cells: tuple[tuple[int, int], ...] = ()
    pivots: int = 0

    def __post_init__(self):
        if (self.status == Status.FEASIBLE) != (self.witness is not None):
            raise ContextureError(f"{self.status.value} result with witness={self.witness!r}")
        if (self.status == Status.INFEASIBLE) != (self.obstruction is not None):
            raise ContextureError(f"{self.status.value} result with obstruction={self.obstruction!r}")

    @property
    def feasible(self) -> bool:
        return self.status == Status.FEASIBLE


class _PhaseOneTableau:
    """
    minimize the sum of one artificial variable per row of A x = b.
    rows are sign flipped first so that b >= 0 and the artificial basis is feasible.
    the artificial columns are kept so the simplex multipliers can be read off at the end.
    """

    def __init__(self, A: RatMatrix, b: Sequence[Fraction]):
        m, n = A.rows, A.cols
        self.n = n
        self.signs = [-1 if bi < 0 else 1 for bi in b]
        self.rows = []
        for i in range(m):
            row = [self.signs[i] * x for x in A.row(i)] + [ZERO] * m
            row[n + i] = ONE
            self.rows.append(row)
        self.rhs = [abs(bi) for bi in b]
        self.basis = [n + i for i in range(m)]
        self.reduced = [-sum((row[j] for row in self.rows), ZERO) for j in range(n)] + [ZERO] * m
        self.value = sum(self.rhs, ZERO)
        self.pivots = 0

    def _entering(self) -> int | None:
        # Bland: lowest index with negative reduced cost
        for j, d in enumerate(self.reduced):
            if d < 0:
                return j
        return None

    def _leaving(self, entering: int) -> int:
        best = None
        for i, row in enumerate(self.rows):
            a = row[entering]
            if a > 0:
                key = (self.rhs[i] / a, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise ContextureError(f"phase one objective unbounded along column {entering}")
        return best[1]

    def _pivot(self, r: int, e: int):
        display.vvv(f"simplex pivot {self.pivots}: column {e} enters, column {self.basis[r]} leaves")
        pivot_row = self.rows[r]
        piv = pivot_row[e]
        if piv != 1:
            pivot_row = [x / piv for x in pivot_row]
            self.rows[r] = pivot_row
            self.rhs[r] /= piv
        nonzero = [j for j, x in enumerate(pivot_row) if x]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            factor = row[e]
            if factor:
                for j in nonzero:
                    row[j] -= factor * pivot_row[j]
                self.rhs[i] -= factor * self.rhs[r]
        d = self.reduced[e]
        for j in nonzero:
            self.reduced[j] -= d * pivot_row[j]
        self.value += d * self.rhs[r]
        self.basis[r] = e
        self.pivots += 1

    def solve(self):
        while self.value != 0:
            entering = self._entering()
            if entering is None:
                return
            self._pivot(self._leaving(entering), entering)

    def solution(self) -> tuple[Fraction, ...]:
        x = [ZERO] * self.n
        for i, j in enumerate(self.basis):
            if j < self.n:
                x[j] = self.rhs[i]
        return tuple(x)

    def farkas(self) -> tuple[Fraction, ...]:
        # simplex multiplier of row i is c_art - reduced_art = 1 - reduced[n + i]
        return tuple(s * (ONE - self.reduced[self.n + i]) for i, s in enumerate(self.signs))


@beartype
def verify_farkas(A: RatMatrix, b: Sequence, y: Sequence, nonneg: bool = True) -> bool:
    """
    nonneg: y^T A <= 0 and y^T b > 0 proves that no x >= 0 solves A x = b
    free: y^T A = 0 and y^T b > 0 proves that no x at all solves A x = b
    """
    if len(y) != A.rows or len(b) != A.rows:
        raise DimensionError(f"certificate of length {len(y)} for a system with {A.rows} rows")
    y = [to_rational(x) for x in y]
    yA = A.transpose().apply(y)
    if nonneg:
        if any(x > 0 for x in yA):
            return False
    elif any(x != 0 for x in yA):
        return False
    return dot(y, [to_rational(x) for x in b]) > 0


@beartype
def solve_linear_feasibility(A: RatMatrix, b: Sequence, nonneg: bool = True) -> FeasibilityResult:
    b = tuple(to_rational(x) for x in b)
    if A.rows != len(b):
        raise DimensionError(f"A has {A.rows} rows but b has {len(b)} entries")
    if not nonneg:
        # x = x+ - x-, both nonnegative
        result = solve_linear_feasibility(hstack([A, A.scaled(-1)]), b, nonneg=True)
        if result.feasible:
            x = result.witness
            return replace(result, witness=tuple(p - q for p, q in zip(x[: A.cols], x[A.cols :])))
        return result
    tableau = _PhaseOneTableau(A, b)
    tableau.solve()
    display.vvv(f"phase one on {A.rows}x{A.cols}: {tableau.pivots} pivots, residual {tableau.value}")
    if tableau.value == 0:
        return FeasibilityResult(Status.FEASIBLE, witness=tableau.solution(), pivots=tableau.pivots)
    y = tableau.farkas()
    yb = dot(y, b)
    if not verify_farkas(A, b, y):
        raise ContextureError(f"simplex produced an invalid Farkas vector (y^T b = {yb})")
    return FeasibilityResult(
        Status.INFEASIBLE,
        obstruction=f"no nonnegative solution: Farkas vector y has y^T A <= 0 and y^T b = {yb} > 0",
        certificate=y,
        pivots=tableau.pivots,
    )


@beartype
def forced_zero_candidate(Ebar: BoolMatrix, Sbar: BoolMatrix) -> BoolMatrix:
    """
    the largest Dbar with Dbar Sbar <= Ebar.
    Dmax(i, k) = 0 exactly when some column j with Sbar(k, j) = 1 has Ebar(i, j) = 0.
    columns k that Sbar never references stay all ones.
    """
    if Ebar.cols != Sbar.cols:
        raise DimensionError(f"Ebar has {Ebar.cols} columns but Sbar has {Sbar.cols}")
    referenced = [[j for j in range(Sbar.cols) if Sbar[k, j]] for k in range(Sbar.rows)]
    return BoolMatrix.from_rows(
        [[all(Ebar[i, j] for j in referenced[k]) for k in range(Sbar.rows)] for i in range(Ebar.rows)],
        cols=Sbar.rows,
    )


@beartype
def solve_boolean_factor(
    Ebar: BoolMatrix, Sbar: BoolMatrix, require_nonempty_columns: bool = True
) -> FeasibilityResult:
    """
    does some Dbar solve Ebar = Dbar Sbar?
    every solution lies below Dmax, and Dbar Sbar is monotone in Dbar, so it is enough to test Dmax:
    it must cover every 1 of Ebar, and (when required) keep every referenced column nonempty.
    without the column requirement the solution must still be nonzero.
    """
    dmax = forced_zero_candidate(Ebar, Sbar)
    emptied = ()
    if require_nonempty_columns:
        emptied = tuple(
            k
            for k in range(Sbar.rows)
            if any(Sbar.row(k)) and not any(dmax.column(k))
        )
    product = dmax @ Sbar
    uncovered = tuple(
        (i, j) for i in range(Ebar.rows) for j in range(Ebar.cols) if Ebar[i, j] and not product[i, j]
    )
    display.vvv(
        f"boolean factor {Ebar.rows}x{Ebar.cols} over {Sbar.rows} columns: "
        f"{len(emptied)} emptied, {len(uncovered)} uncovered"
    )
    if not emptied and not uncovered:
        if require_nonempty_columns or dmax.count():
            return FeasibilityResult(Status.FEASIBLE, witness=dmax)
        return FeasibilityResult(Status.INFEASIBLE, obstruction="only the zero matrix satisfies the forced zeros")
    if emptied:
        obstruction = f"column {emptied[0]} of Dbar is emptied by forced zeros"
    else:
        i, j = uncovered[0]
        obstruction = f"cell ({i}, {j}) of Ebar is 1 but no column of Dmax covers it"
    return FeasibilityResult(
        Status.INFEASIBLE,
        obstruction=obstruction,
        emptied_columns=emptied,
        uncovered_cells=uncovered,
    )
