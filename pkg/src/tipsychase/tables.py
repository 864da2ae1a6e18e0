"""Bundled reference tables and the machinery to reproduce them.

Each table ships as a CSV of printed values under ``tipsychase/data``
and has a compute function that rebuilds every cell from the library.
``reproduce`` diffs the two and reports per-cell pass/fail at the
table's documented tolerance.

Cells flagged ``erratum`` carry a derived replacement value: the printed
number is provably inconsistent with the model that produced the rest
of its table (a transposed digit, a dropped zero).  Those cells are
checked against the derived value and annotated, so a regression in our
code still trips them while a known misprint does not.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources

from . import chain as chain_mod
from . import closedform, families, schedules
from .errors import UnknownTable

TOL_SLACK = 1e-9  # absorbs float noise when a diff sits exactly on the tolerance


@dataclass(frozen=True)
class Cell:
    measure: str
    rounds: int | None
    start: str
    params: str
    printed: str
    n_terms: int | None
    flag: str
    derived: str

    @property
    def key(self):
        return (self.measure, self.rounds, self.start, self.params)

    def param(self, name: str) -> float:
        for part in self.params.split(";"):
            k, _, v = part.partition("=")
            if k == name:
                return float(v)
        raise KeyError(f"cell has no parameter {name!r} in {self.params!r}")

    @property
    def target(self) -> float:
        text = self.derived if self.flag == "erratum" else self.printed
        return math.inf if text == "inf" else float(text)


@dataclass(frozen=True)
class CellCheck:
    cell: Cell
    computed: float
    tolerance: float
    ok: bool
    note: str

    @property
    def diff(self) -> float:
        if math.isinf(self.cell.target) or math.isinf(self.computed):
            return 0.0 if self.cell.target == self.computed else math.inf
        return abs(self.computed - self.cell.target)


@dataclass(frozen=True)
class TableReport:
    table_id: str
    title: str
    notes: tuple[str, ...]
    checks: tuple[CellCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[CellCheck]:
        return [c for c in self.checks if not c.ok]


def last_digit_unit(printed: str) -> float:
    """One unit in the last printed digit: '6E-5' -> 1e-5, '914.8' -> 0.1."""
    text = printed.strip().lower()
    exponent = 0
    if "e" in text:
        text, _, exp = text.partition("e")
        exponent = int(exp)
    decimals = len(text.partition(".")[2])
    return 10.0 ** (exponent - decimals)


def _load_cells(table_id: str) -> list[Cell]:
    name = f"{table_id}.csv"
    try:
        raw = resources.files("tipsychase.data").joinpath(name).read_text("utf-8")
    except FileNotFoundError:
        raise UnknownTable(f"no reference table {table_id!r}") from None
    rows = csv.DictReader(
        line for line in io.StringIO(raw) if not line.startswith("#")
    )
    cells = []
    for row in rows:
        cells.append(
            Cell(
                measure=row["measure"],
                rounds=int(row["rounds"]) if row["rounds"] else None,
                start=row["start"],
                params=row["params"],
                printed=row["value"],
                n_terms=int(row["n_terms"]) if row["n_terms"] else None,
                flag=row["flag"],
                derived=row["derived"],
            )
        )
    return cells


# ---------------------------------------------------------------- builders
# Each returns {cell.key: computed value}; math.inf encodes divergence.


def _static_measures(chain, cells):
    ts = chain_mod.extract_transient(chain)
    out = {}
    for cell in cells:
        if cell.measure == "G":
            out[cell.key] = chain_mod.survival_probability(ts, cell.start, cell.rounds)
        elif cell.measure == "E":
            out[cell.key] = chain_mod.expected_rounds(ts, cell.start).value
        else:
            raise ValueError(f"unsupported measure {cell.measure!r}")
    return out


def _compute_tree31(cells):
    spinner = families.SpinnerThree(c=0.3, r=0.4, t=0.3)
    ts = chain_mod.extract_transient(families.tree_chain(4, 10, spinner))
    out = {}
    for cell in cells:
        if cell.measure == "E":
            out[cell.key] = chain_mod.expected_rounds(ts, cell.start).value
        else:
            split = chain_mod.absorption_split(ts, cell.start)
            out[cell.key] = split["10"] if cell.measure == "R" else split["0"]
    return out


def _by_params(cells):
    groups: dict[str, list[Cell]] = {}
    for cell in cells:
        groups.setdefault(cell.params, []).append(cell)
    return groups


def _compute_cycle52(cells):
    out = {}
    for params, group in _by_params(cells).items():
        r = group[0].param("r")
        chain = families.cycle_chain(6, families.SpinnerThree(c=0.5 - r, r=r, t=0.5))
        out.update(_static_measures(chain, group))
    return out


def _compute_petersen61(cells):
    out = {}
    for params, group in _by_params(cells).items():
        r = group[0].param("r")
        chain = families.petersen_chain(families.SpinnerThree(c=0.5 - r, r=r, t=0.5))
        out.update(_static_measures(chain, group))
    return out


def _compute_friendship71(cells):
    out = {}
    for params, group in _by_params(cells).items():
        tr, tc = group[0].param("tr"), group[0].param("tc")
        spinner = families.SpinnerFour(c=0.5 - tc, r=0.5 - tr, t_c=tc, t_r=tr)
        out.update(_static_measures(families.friendship_chain(5, spinner), group))
    return out


def _compute_torus81(cells):
    chain = families.toroidal7_chain(families.SpinnerThree(c=0.3, r=0.4, t=0.3))
    return _static_measures(chain, cells)


def _compute_time(cells, schedule):
    builder = lambda s: families.cycle_chain(6, s)
    out = {}
    for cell in cells:
        split = schedules.SoberSplit(cell.param("share"))
        if cell.measure == "G":
            out[cell.key] = schedules.time_varying_survival(
                builder, split, schedule, cell.start, cell.rounds
            )
        else:
            result = schedules.time_varying_expectation(
                builder, split, schedule, cell.start,
                tol=1e-10, n_max=cell.n_terms or 3000,
            )
            out[cell.key] = result.value
    return out


def _compute_dist_cycle(cells, schedule):
    out = {}
    for params, group in _by_params(cells).items():
        split = schedules.SoberSplit(group[0].param("share"))
        chain = schedules.distance_cycle_chain(10, split, schedule, boundary="tables")
        out.update(_static_measures(chain, group))
    return out


def _compute_dist_tree(cells, schedule):
    out = {}
    for params, group in _by_params(cells).items():
        split = schedules.SoberSplit(group[0].param("share"))
        chain = schedules.distance_tree_chain(4, 10, split, schedule)
        out.update(_static_measures(chain, group))
    return out


# ------------------------------------------------------------- tolerances


def _tol_abs(value: float):
    return lambda cell: value


def _tol_split(g_abs: float, e_rel: float):
    def policy(cell: Cell):
        if cell.measure == "G":
            return g_abs
        return e_rel * abs(cell.target)

    return policy


def _tol_last_digit(cell: Cell):
    if cell.flag == "exact":
        return 1e-9
    base = cell.derived if cell.flag == "erratum" else cell.printed
    return last_digit_unit(base)


def _tol_tree31(cell: Cell):
    return 0.01 if cell.measure == "E" else 0.0005


def _tol_friendship(cell: Cell):
    return 0.001 if cell.measure == "G" else 0.005


@dataclass(frozen=True)
class TableSpec:
    title: str
    compute: callable
    tolerance: callable
    notes: tuple[str, ...] = ()


TABLES: dict[str, TableSpec] = {
    "tree3.1": TableSpec(
        "Regular tree, degree 4, call-off 10: E/R/C at c=0.3 r=0.4 t=0.3",
        _compute_tree31,
        _tol_tree31,
    ),
    "cycle5.2": TableSpec(
        "6-cycle, t=0.5: survival after 7 rounds and expected length",
        _compute_cycle52,
        _tol_split(0.005, 0.005),
    ),
    "petersen6.1": TableSpec(
        "Petersen graph, t=0.5: survival after 7 rounds and expected length",
        _compute_petersen61,
        _tol_split(0.005, 0.005),
        notes=(
            "E,1 at r=0.5: printed 40, but the chain solves exactly to 36 "
            "(the same column's E,2 = 42 is exact); compared against the "
            "derived value.",
        ),
    ),
    "friendship7.1": TableSpec(
        "Friendship graph, 5 triangles: survival after 10 rounds and expected length",
        _compute_friendship71,
        _tol_friendship,
    ),
    "torus8.1": TableSpec(
        "7x7 torus, c=0.3 r=0.4 t=0.3: survival after 50 rounds and expected length",
        _compute_torus81,
        _tol_abs(0.01),
        notes=(
            "E,(3,2): printed 95.95 contradicts the one-step balance at (3,3), "
            "which forces E(3,2) = E(3,3) - 1/(c + t/2) = 75.95; compared "
            "against the derived value.",
        ),
    ),
    "time9.1": TableSpec(
        "6-cycle, sobering over time, t = 4/(m+3)",
        lambda cells: _compute_time(cells, schedules.TimeSchedule.hyperbolic()),
        _tol_split(0.005, 0.005),
        notes=("E cells are partial sums at the stated term count.",),
    ),
    "time9.2": TableSpec(
        "6-cycle, sobering over time, t = 4/(2^m+2)",
        lambda cells: _compute_time(cells, schedules.TimeSchedule.exponential2()),
        _tol_split(0.005, 0.005),
        notes=("E cells are partial sums at the stated term count.",),
    ),
    "dist10.3a": TableSpec(
        "10-cycle, tipsiness linear in distance",
        lambda cells: _compute_dist_cycle(cells, schedules.DistanceSchedule.linear(5)),
        _tol_last_digit,
        notes=(
            "Reference run evaluated the boundary row's tipsiness at distance "
            "max-1; reproduced here with boundary='tables'.  The displayed "
            "transition matrix (boundary='matrix') gives e.g. E(1) = 9.11 at a "
            "50% robber share instead of the printed 9.25.",
        ),
    ),
    "dist10.3b": TableSpec(
        "10-cycle, tipsiness exponential in distance (base 1.2)",
        lambda cells: _compute_dist_cycle(cells, schedules.DistanceSchedule.exponential()),
        _tol_last_digit,
        notes=(
            "Same boundary-row convention as dist10.3a (boundary='tables').",
        ),
    ),
    "tree10.4a": TableSpec(
        "Regular tree, degree 4, call-off 10, tipsiness linear in distance",
        lambda cells: _compute_dist_tree(cells, schedules.DistanceSchedule.linear(10)),
        _tol_last_digit,
    ),
    "tree10.4b": TableSpec(
        "Regular tree, degree 4, call-off 10, tipsiness exponential in distance",
        lambda cells: _compute_dist_tree(
            cells, schedules.DistanceSchedule.exponential(base=2.0)
        ),
        _tol_last_digit,
        notes=(
            "The stated ramp base (1.2) reproduces no column of this table; "
            "the values match base 2.0 throughout, so that is what this "
            "reproduction uses.  G,9 at share=0 is a printed digit slip "
            "(0.004 for 0.0004), compared against the derived value.",
        ),
    ),
}


def table_ids() -> list[str]:
    return sorted(TABLES)


def reproduce(table_id: str) -> TableReport:
    """Recompute a reference table and diff it against the stored values."""
    if table_id not in TABLES:
        raise UnknownTable(
            f"unknown table {table_id!r}; available: {', '.join(table_ids())}"
        )
    spec = TABLES[table_id]
    cells = _load_cells(table_id)
    computed = spec.compute(cells)
    checks = []
    for cell in cells:
        value = computed[cell.key]
        target = cell.target
        if math.isinf(target) or math.isinf(value):
            ok = target == value
            tol = 0.0
        else:
            tol = spec.tolerance(cell)
            ok = abs(value - target) <= tol + TOL_SLACK
        note = ""
        if cell.flag == "erratum":
            note = f"erratum: printed {cell.printed}, derived {cell.derived}"
        checks.append(CellCheck(cell, value, tol, ok, note))
    return TableReport(table_id, spec.title, spec.notes, tuple(checks))
