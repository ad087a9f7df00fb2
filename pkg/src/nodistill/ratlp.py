"""Exact rational linear programming: two-phase primal simplex with certificates.

Problems are maximizations over x >= 0 with rows of sense "<=" or "=".
Arithmetic is exact throughout (gmpy2.mpq when available, Fraction otherwise),
so an OPTIMAL result comes with an exactly feasible primal point and an
exactly feasible dual vector whose bound equals the primal objective;
`check_solution` re-verifies all of that independently of the solver.

The tableau is stored sparsely (dict per row plus a column index) because the
certification LPs are large but very sparse.  Pivot selection is
deterministic: the default rule takes the most-negative reduced cost and
falls back to Bland's least-index rule during long degenerate stalls, which
keeps the method finite; `rule="bland"` forces pure Bland pivoting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .rat import ensure_fraction, format_rational, parse_rational

try:  # pragma: no cover - exercised implicitly everywhere
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

SENSE_LE = "<="
SENSE_EQ = "="

# Pivots of the default rule allowed without objective progress before
# switching to Bland's rule (switching back once the objective moves).
_STALL_LIMIT = 60


class PivotBudgetExceeded(RuntimeError):
    """Raised when the pivot budget runs out; never a silent wrong answer."""


@dataclass(frozen=True)
class LpRow:
    coeffs: Mapping[int, Fraction]
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in (SENSE_LE, SENSE_EQ):
            raise ValueError(f"row sense must be '<=' or '=', got {self.sense!r}")
        object.__setattr__(
            self,
            "coeffs",
            {int(j): ensure_fraction(c) for j, c in dict(self.coeffs).items() if c != 0},
        )
        object.__setattr__(self, "rhs", ensure_fraction(self.rhs))


@dataclass(frozen=True)
class LpProblem:
    """max objective . x  subject to rows, x >= 0."""

    num_vars: int
    objective: Mapping[int, Fraction]
    rows: tuple[LpRow, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "objective",
            {int(j): ensure_fraction(c) for j, c in dict(self.objective).items() if c != 0},
        )
        object.__setattr__(self, "rows", tuple(self.rows))
        for j in self.objective:
            if not (0 <= j < self.num_vars):
                raise ValueError(f"objective references variable {j} out of range")
        for r, row in enumerate(self.rows):
            for j in row.coeffs:
                if not (0 <= j < self.num_vars):
                    raise ValueError(f"row {r} references variable {j} out of range")


@dataclass
class LpSolution:
    status: str
    primal: list[Fraction] = field(default_factory=list)
    objective_value: Fraction = Fraction(0)
    dual: list[Fraction] = field(default_factory=list)


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class _Tableau:
    """Sparse simplex tableau over exact rationals."""

    def __init__(self, problem: LpProblem):
        self.n = problem.num_vars
        m = len(problem.rows)
        self.m = m
        self.rows: list[dict[int, object]] = []
        self.rhs: list[object] = []
        self.sigma: list[int] = []  # -1 where the original row was negated
        senses = []
        for row in problem.rows:
            coeffs = {j: _Q(c.numerator, c.denominator) for j, c in row.coeffs.items()}
            rhs = _Q(row.rhs.numerator, row.rhs.denominator)
            sense = row.sense
            sig = 1
            if rhs < 0:
                coeffs = {j: -c for j, c in coeffs.items()}
                rhs = -rhs
                sense = ">=" if sense == SENSE_LE else SENSE_EQ
                sig = -1
            self.rows.append(coeffs)
            self.rhs.append(rhs)
            self.sigma.append(sig)
            senses.append(sense)

        self.basis: list[int] = [0] * m
        self.init_col: list[int] = [0] * m
        self.artificial: set[int] = set()
        next_col = self.n
        for r, sense in enumerate(senses):
            if sense == SENSE_LE:
                j = next_col
                next_col += 1
                self.rows[r][j] = _Q(1)
                self.basis[r] = j
                self.init_col[r] = j
            elif sense == ">=":
                js = next_col
                ja = next_col + 1
                next_col += 2
                self.rows[r][js] = _Q(-1)
                self.rows[r][ja] = _Q(1)
                self.basis[r] = ja
                self.init_col[r] = ja
                self.artificial.add(ja)
            else:
                ja = next_col
                next_col += 1
                self.rows[r][ja] = _Q(1)
                self.basis[r] = ja
                self.init_col[r] = ja
                self.artificial.add(ja)
        self.total_cols = next_col

        self.col_rows: dict[int, set[int]] = {}
        for r, row in enumerate(self.rows):
            for j in row:
                self.col_rows.setdefault(j, set()).add(r)

        self.red: dict[int, object] = {}
        self.obj_val = _Q(0)
        self.pivots = 0

    # -- reduced costs ----------------------------------------------------

    def set_costs(self, costs: dict[int, object]):
        """Recompute reduced costs z_j - c_j and the objective value."""
        red: dict[int, object] = {j: -c for j, c in costs.items() if c != 0}
        val = _Q(0)
        for r in range(self.m):
            cb = costs.get(self.basis[r])
            if cb:
                val += cb * self.rhs[r]
                for j, a in self.rows[r].items():
                    s = red.get(j, _ZERO) + cb * a
                    if s:
                        red[j] = s
                    elif j in red:
                        del red[j]
        self.red = red
        self.obj_val = val

    # -- pivoting ---------------------------------------------------------

    def pivot(self, r: int, j: int):
        prow = self.rows[r]
        pval = prow[j]
        if pval != 1:
            inv = _Q(1) / pval
            for k in list(prow):
                prow[k] *= inv
            self.rhs[r] *= inv
        touched = self.col_rows.get(j, set()) - {r}
        for rr in touched:
            row = self.rows[rr]
            f = row[j]
            for k, pv in prow.items():
                cur = row.get(k)
                if cur is None:
                    row[k] = -f * pv
                    self.col_rows[k].add(rr)
                else:
                    nv = cur - f * pv
                    if nv:
                        row[k] = nv
                    else:
                        del row[k]
                        self.col_rows[k].discard(rr)
            self.rhs[rr] -= f * self.rhs[r]
        f = self.red.get(j)
        if f:
            red = self.red
            for k, pv in prow.items():
                cur = red.get(k, _ZERO)
                nv = cur - f * pv
                if nv:
                    red[k] = nv
                elif k in red:
                    del red[k]
            self.obj_val -= f * self.rhs[r]
        self.basis[r] = j
        self.pivots += 1

    def run(self, eligible, budget: int, rule: str) -> str:
        """Pivot until optimal or unbounded; returns OPTIMAL or UNBOUNDED."""
        stall = 0
        bland = rule == "bland"
        while True:
            entering = None
            if bland or stall > _STALL_LIMIT:
                for j, v in self.red.items():
                    if v < 0 and eligible(j) and (entering is None or j < entering):
                        entering = j
            else:
                best = None
                for j, v in self.red.items():
                    if v < 0 and eligible(j):
                        key = (v, j)
                        if best is None or key < best:
                            best = key
                            entering = j
            if entering is None:
                return OPTIMAL
            leaving = None
            best_key = None
            for r in self.col_rows.get(entering, ()):
                a = self.rows[r][entering]
                if a > 0:
                    key = (self.rhs[r] / a, self.basis[r])
                    if best_key is None or key < best_key:
                        best_key = key
                        leaving = r
            if leaving is None:
                return UNBOUNDED
            if self.pivots >= budget:
                raise PivotBudgetExceeded(
                    f"pivot budget {budget} exhausted after {self.pivots} pivots"
                )
            degenerate = best_key[0] == 0
            self.pivot(leaving, entering)
            if not bland:
                stall = stall + 1 if degenerate else 0


_ZERO = _Q(0)


def solve(problem: LpProblem, pivot_budget: int = 200_000, rule: str = "hybrid") -> LpSolution:
    """Solve exactly; statuses INFEASIBLE/UNBOUNDED are results, not errors.

    OPTIMAL solutions carry the primal point, exact objective value and one
    dual multiplier per input row (valid for the rows exactly as given).
    """
    if rule not in ("hybrid", "bland"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    t = _Tableau(problem)

    if t.artificial:
        costs1 = {j: _Q(-1) for j in t.artificial}
        t.set_costs(costs1)
        # artificials start basic; once out they never re-enter
        status = t.run(lambda j: j not in t.artificial, pivot_budget, rule)
        if status != OPTIMAL:
            raise RuntimeError("phase 1 cannot be unbounded; solver invariant broken")
        if t.obj_val != 0:
            return LpSolution(status=INFEASIBLE)
        for r in range(t.m):
            if t.basis[r] in t.artificial:
                target = None
                for j in t.rows[r]:
                    if j not in t.artificial and (target is None or j < target):
                        target = j
                if target is not None:
                    t.pivot(r, target)
                # else: row is redundant; its artificial stays basic at zero

    costs2 = {j: _Q(c.numerator, c.denominator) for j, c in problem.objective.items()}
    t.set_costs(costs2)
    status = t.run(lambda j: j not in t.artificial, pivot_budget, rule)
    if status == UNBOUNDED:
        return LpSolution(status=UNBOUNDED)

    primal = [Fraction(0)] * t.n
    for r in range(t.m):
        if t.basis[r] < t.n:
            primal[t.basis[r]] = _to_fraction(t.rhs[r])
    dual = []
    for r in range(t.m):
        w = t.red.get(t.init_col[r], _ZERO)
        dual.append(_to_fraction(w if t.sigma[r] == 1 else -w))
    return LpSolution(
        status=OPTIMAL,
        primal=primal,
        objective_value=_to_fraction(t.obj_val),
        dual=dual,
    )


def check_solution(problem: LpProblem, sol: LpSolution) -> bool:
    """Certify an OPTIMAL solution independently of the solver.

    Checks exact primal feasibility, dual sign conditions and feasibility,
    and that the primal objective equals the dual bound.  Returns False on
    the first violation; non-OPTIMAL statuses are not certified.
    """
    if sol.status != OPTIMAL:
        return False
    if len(sol.primal) != problem.num_vars or len(sol.dual) != len(problem.rows):
        return False
    for x in sol.primal:
        if x < 0:
            return False
    for row, y in zip(problem.rows, sol.dual):
        lhs = sum((c * sol.primal[j] for j, c in row.coeffs.items()), Fraction(0))
        if row.sense == SENSE_LE:
            if lhs > row.rhs:
                return False
            if y < 0:
                return False
        else:
            if lhs != row.rhs:
                return False
    # dual feasibility: for every variable, sum_r y_r a_rj >= c_j
    col_sums: dict[int, Fraction] = {}
    for row, y in zip(problem.rows, sol.dual):
        if y == 0:
            continue
        for j, c in row.coeffs.items():
            col_sums[j] = col_sums.get(j, Fraction(0)) + y * c
    for j in range(problem.num_vars):
        if col_sums.get(j, Fraction(0)) < problem.objective.get(j, Fraction(0)):
            return False
    primal_obj = sum(
        (c * sol.primal[j] for j, c in problem.objective.items()), Fraction(0)
    )
    dual_bound = sum(
        (y * row.rhs for row, y in zip(problem.rows, sol.dual)), Fraction(0)
    )
    if primal_obj != sol.objective_value or dual_bound != sol.objective_value:
        return False
    return True


# -- text dump for external cross-checking ----------------------------------


def dump_lp(problem: LpProblem) -> str:
    """Line-oriented text form: vars, objective, then one row per line."""
    lines = [f"vars {problem.num_vars}"]
    obj = " ".join(
        f"{j}:{format_rational(c)}" for j, c in sorted(problem.objective.items())
    )
    lines.append(f"max {obj}".rstrip())
    for row in problem.rows:
        terms = " ".join(f"{j}:{format_rational(c)}" for j, c in sorted(row.coeffs.items()))
        lines.append(f"row {terms} {row.sense} {format_rational(row.rhs)}".replace("  ", " "))
    return "\n".join(lines) + "\n"


def parse_lp(text: str) -> LpProblem:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines or not lines[0].startswith("vars "):
        raise ValueError("LP dump must start with a 'vars <n>' line")
    num_vars = int(lines[0].split()[1])
    if len(lines) < 2 or not lines[1].startswith("max"):
        raise ValueError("LP dump needs a 'max ...' objective line")

    def parse_terms(tokens: Iterable[str]) -> dict[int, Fraction]:
        out = {}
        for tok in tokens:
            j, _, val = tok.partition(":")
            out[int(j)] = parse_rational(val)
        return out

    objective = parse_terms(lines[1].split()[1:])
    rows = []
    for ln in lines[2:]:
        tokens = ln.split()
        if tokens[0] != "row" or len(tokens) < 3:
            raise ValueError(f"malformed row line: {ln!r}")
        sense = tokens[-2]
        rhs = parse_rational(tokens[-1])
        rows.append(LpRow(parse_terms(tokens[1:-2]), sense, rhs))
    return LpProblem(num_vars=num_vars, objective=objective, rows=tuple(rows))
