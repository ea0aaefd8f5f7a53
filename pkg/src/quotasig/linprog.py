"""Exact-rational linear programming.

A dense two-phase simplex over `fractions.Fraction` with Bland's
anti-cycling rule. Problems in this package are tiny (at most a few dozen
variables), so there is no sparsity, scaling, or presolve; the payoff is
that optima are exact vertices and every comparison is decidable.

The sense is maximization throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import ValidationError, rat

__all__ = ["LinearProgram", "LpResult", "solve_lp", "solve_lex"]

LE, EQ, GE = "<=", "=", ">="


@dataclass(frozen=True)
class LinearProgram:
    """max objective . x subject to rows and per-variable bounds.

    rows: (coefficients, relation, rhs) with relation in {"<=", "=", ">="}.
    bounds: per-variable (lo, hi); None means unbounded on that side.
    Bounds default to [0, None) for every variable.
    """

    objective: tuple[Fraction, ...]
    rows: tuple[tuple[tuple[Fraction, ...], str, Fraction], ...]
    bounds: tuple[tuple[Optional[Fraction], Optional[Fraction]], ...] = ()

    def __post_init__(self):
        obj = tuple(rat(c) for c in self.objective)
        object.__setattr__(self, "objective", obj)
        nv = len(obj)
        rows = []
        for coeffs, rel, rhs in self.rows:
            coeffs = tuple(rat(c) for c in coeffs)
            if len(coeffs) != nv:
                raise ValidationError("row width does not match the objective")
            if rel not in (LE, EQ, GE):
                raise ValidationError(f"unknown relation {rel!r}")
            rows.append((coeffs, rel, rat(rhs)))
        object.__setattr__(self, "rows", tuple(rows))
        if not self.bounds:
            bounds = tuple((Fraction(0), None) for _ in range(nv))
        else:
            if len(self.bounds) != nv:
                raise ValidationError("bounds length does not match the objective")
            bounds = tuple(
                (None if lo is None else rat(lo), None if hi is None else rat(hi))
                for lo, hi in self.bounds
            )
        for lo, hi in bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValidationError("variable bound has lo > hi")
        object.__setattr__(self, "bounds", bounds)

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpResult:
    status: str  # optimal | infeasible | unbounded
    point: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    # Set by solve_lex: the first-stage optimum.
    primary_value: Optional[Fraction] = None


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    prow = tableau[row]
    for r, trow in enumerate(tableau):
        if r == row:
            continue
        factor = trow[col]
        if factor != 0:
            tableau[r] = [v - factor * p for v, p in zip(trow, prow)]
    basis[row] = col


def _simplex_min(tableau: list[list[Fraction]], basis: list[int], ncols: int) -> str:
    """Minimize with the objective held in tableau[-1]; Bland's rule.

    tableau rows are constraints (rhs last), final row is the reduced-cost
    row in canonical form. Returns "optimal" or "unbounded".
    """
    obj = len(tableau) - 1
    while True:
        enter = -1
        for j in range(ncols):
            if tableau[obj][j] < 0:
                enter = j
                break
        if enter == -1:
            return "optimal"
        leave = -1
        best = None
        for r in range(obj):
            a = tableau[r][enter]
            if a > 0:
                ratio = tableau[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave == -1:
            return "unbounded"
        _pivot(tableau, basis, leave, enter)


def solve_lp(lp: LinearProgram) -> LpResult:
    """Exact optimum of a small LP; statuses are results, not exceptions."""
    nv = lp.num_vars

    # Substitutions to nonnegative variables:
    #   finite lo:        x = lo + y
    #   lo=-inf, fin hi:  x = hi - y
    #   free:             x = y+ - y-
    # A finite hi alongside a finite lo becomes an extra <= row.
    sub = []  # per original var: (kind, data, y-index)
    ny = 0
    extra_rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for i, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            sub.append(("shift", lo, ny))
            if hi is not None:
                extra_rows.append(({ny: Fraction(1)}, LE, hi - lo))
            ny += 1
        elif hi is not None:
            sub.append(("mirror", hi, ny))
            ny += 1
        else:
            sub.append(("free", None, ny))
            ny += 2

    def transform(coeffs: Sequence[Fraction]):
        """Rewrite a row over x as (sparse row over y, constant shift)."""
        out: dict[int, Fraction] = {}
        const = Fraction(0)
        for i, c in enumerate(coeffs):
            if c == 0:
                continue
            kind, data, yi = sub[i]
            if kind == "shift":
                const += c * data
                out[yi] = out.get(yi, Fraction(0)) + c
            elif kind == "mirror":
                const += c * data
                out[yi] = out.get(yi, Fraction(0)) - c
            else:
                out[yi] = out.get(yi, Fraction(0)) + c
                out[yi + 1] = out.get(yi + 1, Fraction(0)) - c
        return out, const

    rows = []
    for coeffs, rel, rhs in lp.rows:
        sparse, const = transform(coeffs)
        rows.append((sparse, rel, rhs - const))
    rows.extend(extra_rows)

    # Standard form: append a slack (LE) or surplus (GE) variable per row.
    nslack = sum(1 for _, rel, _ in rows if rel != EQ)
    ncols = ny + nslack
    dense = []
    slack_at = ny
    for sparse, rel, rhs in rows:
        row = [Fraction(0)] * ncols
        for j, c in sparse.items():
            row[j] = c
        if rel == LE:
            row[slack_at] = Fraction(1)
            slack_at += 1
        elif rel == GE:
            row[slack_at] = Fraction(-1)
            slack_at += 1
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        dense.append((row, rhs))

    nrows = len(dense)
    # Phase 1: artificial basis.
    total = ncols + nrows
    tableau = []
    basis = []
    for r, (row, rhs) in enumerate(dense):
        art = [Fraction(0)] * nrows
        art[r] = Fraction(1)
        tableau.append(row + art + [rhs])
        basis.append(ncols + r)
    objrow = [Fraction(0)] * (total + 1)
    for j in range(ncols, total):
        objrow[j] = Fraction(1)
    # Canonicalize: zero out the artificial basis columns.
    for r in range(nrows):
        objrow = [o - v for o, v in zip(objrow, tableau[r])]
    tableau.append(objrow)
    status = _simplex_min(tableau, basis, total)
    assert status == "optimal"  # phase 1 is bounded below by 0
    if tableau[-1][-1] != 0:  # canonical obj row holds -(current value)
        return LpResult(status="infeasible")

    # Drive artificials out of the basis; drop redundant rows.
    keep = []
    for r in range(nrows):
        if basis[r] >= ncols:
            piv_col = next((j for j in range(ncols) if tableau[r][j] != 0), None)
            if piv_col is None:
                continue  # redundant row
            _pivot(tableau, basis, r, piv_col)
        keep.append(r)
    tableau = [tableau[r] for r in keep] + [tableau[-1]]
    basis = [basis[r] for r in keep]
    # Strip artificial columns.
    tableau = [row[:ncols] + [row[-1]] for row in tableau]

    # Phase 2: minimize -objective over y.
    sparse_obj, const = transform(lp.objective)
    objrow = [Fraction(0)] * (ncols + 1)
    for j, c in sparse_obj.items():
        objrow[j] = -c
    tableau[-1] = objrow
    for r, b in enumerate(basis):
        factor = tableau[-1][b]
        if factor != 0:
            tableau[-1] = [v - factor * p for v, p in zip(tableau[-1], tableau[r])]
    status = _simplex_min(tableau, basis, ncols)
    if status == "unbounded":
        return LpResult(status="unbounded")

    y = [Fraction(0)] * ncols
    for r, b in enumerate(basis):
        y[b] = tableau[r][-1]
    point = []
    for i in range(nv):
        kind, data, yi = sub[i]
        if kind == "shift":
            point.append(data + y[yi])
        elif kind == "mirror":
            point.append(data - y[yi])
        else:
            point.append(y[yi] - y[yi + 1])
    value = sum(c * x for c, x in zip(lp.objective, point))
    return LpResult(status="optimal", point=tuple(point), value=value)


def solve_lex(lp: LinearProgram, secondary: Sequence[Fraction]) -> LpResult:
    """Two-stage lexicographic solve: optimize lp's objective, pin it with
    an equality, then optimize the secondary objective. ``value`` is the
    second-stage optimum; ``primary_value`` the first-stage one."""
    secondary = tuple(rat(c) for c in secondary)
    if len(secondary) != lp.num_vars:
        raise ValidationError("secondary objective width mismatch")
    first = solve_lp(lp)
    if first.status != "optimal":
        return first
    pinned = LinearProgram(
        objective=secondary,
        rows=lp.rows + ((lp.objective, EQ, first.value),),
        bounds=lp.bounds,
    )
    second = solve_lp(pinned)
    if second.status != "optimal":
        return second
    return LpResult(
        status="optimal",
        point=second.point,
        value=second.value,
        primary_value=first.value,
    )
