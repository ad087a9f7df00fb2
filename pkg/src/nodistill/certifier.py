"""Assembly, exact solution and verification of non-distillability certificates.

Given a tripartite distribution g (honest parties A, B; adversary alphabet of
size d) and a finite family of M bit-valued filter map pairs, the certifier
maximizes the linearized secrecy advantage of a bounded activation
distribution over the grouped adversary alphabet of 2^(d+M) selector vectors.
A selector vector records, per adversary symbol of g and per family member,
which diagonal output the per-symbol minimum sits on; grouping adversary
symbols with equal selectors preserves every value the program touches, which
is what makes the unbounded helper alphabet finite.

If the exact maximum is zero, no distribution that the family certifies as
secrecy-free can be activated above the trivial fraction by g, and g is
undistillable; the emitted certificate carries exact dual multipliers (or, for
a positive maximum, the maximizing primal point) and can be re-verified
without trusting the solver.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm

from . import ratlp
from .families import MapFamily
from .lifting import lift
from .measures import lambda_advantage
from .probvec import Axis, JointDist, apply_local
from .rat import ensure_fraction, format_rational

UNDISTILLABLE = "undistillable"
INCONCLUSIVE = "inconclusive"


class SizeGuardError(ValueError):
    """The selector alphabet would be too large; refuse instead of thrashing."""


class CertifierError(RuntimeError):
    """Internal failure (solver anomaly); never reported as a verdict."""


# -- selector vectors --------------------------------------------------------


def selector_index(bits) -> int:
    """Pack selector components into an integer, component j at bit j."""
    k = 0
    for j, b in enumerate(bits):
        if b:
            k |= 1 << j
    return k


def selector_bits(k: int, width: int) -> tuple[int, ...]:
    return tuple((k >> j) & 1 for j in range(width))


def _sign_selector(diff: Fraction) -> int:
    """0 when the first diagonal entry attains the minimum; ties pick 0."""
    return 1 if diff > 0 else 0


# -- problem shape ------------------------------------------------------------


@dataclass(frozen=True)
class CertificationProblem:
    g: JointDist
    family: MapFamily
    lambda0: Fraction = Fraction(1, 2)
    max_dm: int = 16

    def __post_init__(self):
        object.__setattr__(self, "lambda0", ensure_fraction(self.lambda0))
        if not (Fraction(1, 2) <= self.lambda0 < 1):
            raise ValueError(f"lambda0 must lie in [1/2, 1), got {self.lambda0}")
        if len(self.g.axes) != 3 or self.g.labels[:2] != ("A", "B"):
            raise ValueError(
                f"g must have exactly three axes ordered (A, B, adversary), got {self.g.labels}"
            )
        sa, sb = self.size_a, self.size_b
        for i, pair in enumerate(self.family.pairs):
            if pair.map_a.input_axis.size != 2 * sa:
                raise ValueError(
                    f"family pair {i}: map_a input size {pair.map_a.input_axis.size} "
                    f"!= 2*|A| = {2 * sa}"
                )
            if pair.map_b.input_axis.size != 2 * sb:
                raise ValueError(
                    f"family pair {i}: map_b input size {pair.map_b.input_axis.size} "
                    f"!= 2*|B| = {2 * sb}"
                )

    @property
    def size_a(self) -> int:
        return self.g.axis("A").size

    @property
    def size_b(self) -> int:
        return self.g.axis("B").size

    @property
    def d(self) -> int:
        return next(ax.size for ax in self.g.axes if ax.party not in ("A", "B"))

    @property
    def m(self) -> int:
        return len(self.family)

    @property
    def num_selectors(self) -> int:
        return 1 << (self.d + self.m)

    @property
    def num_vars(self) -> int:
        return 4 * self.size_a * self.size_b * self.num_selectors

    def check_size_guard(self):
        dm = self.d + self.m
        if dm > self.max_dm:
            raise SizeGuardError(
                f"d + M = {self.d} + {self.m} = {dm} exceeds the bound {self.max_dm}: "
                f"the program would have {self.num_vars} variables and about "
                f"{dm * self.num_selectors} selector rows; raise max_dm to override"
            )

    def q_axes(self) -> tuple[Axis, ...]:
        return (
            Axis("A-bit", 2),
            Axis("A-copy", self.size_a),
            Axis("B-bit", 2),
            Axis("B-copy", self.size_b),
            Axis("K", self.num_selectors),
        )


# -- grouping -----------------------------------------------------------------


def _family_tables(family: MapFamily):
    """Per pair: output-row coefficient tables and column sums per side."""
    tables = []
    for pair in family.pairs:
        ma, mb = pair.map_a.coeffs, pair.map_b.coeffs
        col_a = [ma[0][s] + ma[1][s] for s in range(len(ma[0]))]
        col_b = [mb[0][s] + mb[1][s] for s in range(len(mb[0]))]
        tables.append((ma, mb, col_a, col_b))
    return tables


def group_by_selector(q: JointDist, g: JointDist, family: MapFamily) -> JointDist:
    """Collapse the helper axis onto the selector alphabet.

    For each helper symbol e' the selector vector stacks, per adversary symbol
    of g, the sign of the lifted diagonal difference, then per family member
    the sign of the filtered diagonal difference (zero differences select 0).
    Slices with equal selector vectors are summed; every lifted or filtered
    value of interest is unchanged because mins on a common side add.
    """
    if len(q.axes) != 5:
        raise ValueError("q must have 5 axes (A-bit, A-copy, B-bit, B-copy, E')")
    abit, acopy, bbit, bcopy, _ep = q.axes
    if len(g.axes) != 3 or g.labels[:2] != ("A", "B"):
        raise ValueError(
            f"g must have exactly three axes ordered (A, B, adversary), got {g.labels}"
        )
    ga, gb, ge = g.axes
    if abit.size != 2 or bbit.size != 2:
        raise ValueError("q's bit axes must have size 2")
    if acopy.size != ga.size or bcopy.size != gb.size:
        raise ValueError("q's copy alphabets must match g's alphabets")
    d = ge.size
    m = len(family)
    tables = _family_tables(family)
    for i, (ma, mb, _, _) in enumerate(tables):
        if len(ma[0]) != 2 * ga.size or len(mb[0]) != 2 * gb.size:
            raise ValueError(f"family pair {i} does not act on q's composite alphabets")

    g_slices: list[dict[tuple[int, int], Fraction]] = [dict() for _ in range(d)]
    for (x, y, e), v in g.items():
        g_slices[e][(x, y)] = v

    by_ep: dict[int, list] = {}
    for idx, v in q.items():
        by_ep.setdefault(idx[4], []).append((idx, v))

    out_axes = (
        Axis("A-bit", 2),
        Axis("A-copy", acopy.size),
        Axis("B-bit", 2),
        Axis("B-copy", bcopy.size),
        Axis("K", 1 << (d + m)),
    )
    entries: dict[tuple[int, ...], Fraction] = {}
    for ep, items in sorted(by_ep.items()):
        bits = []
        for e in range(d):
            diff = Fraction(0)
            sl = g_slices[e]
            for (a, x, b, y, _), v in items:
                if a == b:
                    gv = sl.get((x, y))
                    if gv:
                        diff += (gv * v) if a == 0 else -(gv * v)
            bits.append(_sign_selector(diff))
        for ma, mb, _, _ in tables:
            diff = Fraction(0)
            for (a, x, b, y, _), v in items:
                sym_a = a * acopy.size + x
                sym_b = b * bcopy.size + y
                term0 = ma[0][sym_a] * mb[0][sym_b]
                term1 = ma[1][sym_a] * mb[1][sym_b]
                if term0 or term1:
                    diff += (term0 - term1) * v
            bits.append(_sign_selector(diff))
        k = selector_index(bits)
        for (a, x, b, y, _), v in items:
            key = (a, x, b, y, k)
            entries[key] = entries.get(key, Fraction(0)) + v
    return JointDist(out_axes, entries)


# -- program assembly ---------------------------------------------------------


@dataclass(frozen=True)
class CertificationLp:
    """The assembled program plus the variable/row bookkeeping around it."""

    problem: ratlp.LpProblem
    setup: CertificationProblem
    row_info: tuple[tuple, ...]  # ("family", i) | ("sel-e", e, k) | ("sel-i", i, k) | ("norm",)

    def var_index(self, a: int, x: int, b: int, y: int, k: int) -> int:
        sp = self.setup
        return (((a * sp.size_a + x) * 2 + b) * sp.size_b + y) * sp.num_selectors + k

    def vector_from_dist(self, qk: JointDist) -> list[Fraction]:
        if qk.axes != self.setup.q_axes():
            raise ValueError("distribution axes do not match the program's variable axes")
        x = [Fraction(0)] * self.problem.num_vars
        for (a, xa, b, yb, k), v in qk.items():
            x[self.var_index(a, xa, b, yb, k)] = v
        return x

    def dist_from_vector(self, vec) -> JointDist:
        sp = self.setup
        entries = {}
        pos = 0
        for a in range(2):
            for xa in range(sp.size_a):
                for b in range(2):
                    for yb in range(sp.size_b):
                        for k in range(sp.num_selectors):
                            v = vec[pos]
                            pos += 1
                            if v:
                                entries[(a, xa, b, yb, k)] = Fraction(v)
        return JointDist(sp.q_axes(), entries)

    def objective_of(self, qk: JointDist) -> Fraction:
        x = self.vector_from_dist(qk)
        return sum(
            (c * x[j] for j, c in self.problem.objective.items()), Fraction(0)
        )

    def is_feasible(self, qk: JointDist) -> bool:
        x = self.vector_from_dist(qk)
        for row in self.problem.rows:
            lhs = sum((c * x[j] for j, c in row.coeffs.items()), Fraction(0))
            if row.sense == ratlp.SENSE_LE and lhs > row.rhs:
                return False
            if row.sense == ratlp.SENSE_EQ and lhs != row.rhs:
                return False
        return True


def _scaled_to_integers(coeffs: dict[int, Fraction]) -> dict[int, Fraction]:
    """Multiply a homogeneous row by the lcm of denominators (sign-preserving)."""
    if not coeffs:
        return coeffs
    scale = reduce(lcm, (c.denominator for c in coeffs.values()), 1)
    if scale == 1:
        return coeffs
    return {j: c * scale for j, c in coeffs.items()}


def build_lp(problem: CertificationProblem) -> CertificationLp:
    """Emit the certification program for (g, family, lambda0).

    Variables are the entries of the grouped activation distribution
    (non-negative, total mass 1).  The objective doubles the lifted advantage
    with the per-(adversary symbol, selector block) minimum replaced by the
    selected diagonal entry; one row per family member bounds the filtered
    advantage by zero the same way, and per-block selector rows pin each
    selected entry to be the actual minimum (ties allowed, which only closes
    the feasible set and cannot raise a zero maximum).  Constraint rows are
    scaled to integer coefficients; empty and exactly duplicated rows are
    dropped.
    """
    problem.check_size_guard()
    sp = problem
    g = sp.g
    lam2 = 2 * sp.lambda0
    d, m, nk = sp.d, sp.m, sp.num_selectors
    sa, sb = sp.size_a, sp.size_b

    def var(a, x, b, y, k):
        return (((a * sa + x) * 2 + b) * sb + y) * nk + k

    g_slices: list[dict[tuple[int, int], Fraction]] = [dict() for _ in range(d)]
    g_total: dict[tuple[int, int], Fraction] = {}
    for (x, y, e), v in g.items():
        g_slices[e][(x, y)] = v
        g_total[(x, y)] = g_total.get((x, y), Fraction(0)) + v

    tables = _family_tables(sp.family)

    # objective: 4 * [selected diagonal of the lift] - 2*lambda0 * [lift sum]
    objective: dict[int, Fraction] = {}
    for k in range(nk):
        bits = selector_bits(k, d + m)
        diag_sum: list[dict[tuple[int, int], Fraction]] = [dict(), dict()]
        for e in range(d):
            target = diag_sum[bits[e]]
            for xy, v in g_slices[e].items():
                target[xy] = target.get(xy, Fraction(0)) + v
        for (x, y), tot in g_total.items():
            base = -lam2 * tot
            for a in range(2):
                for b in range(2):
                    c = base
                    if a == b:
                        c = c + 4 * diag_sum[a].get((x, y), Fraction(0))
                    if c:
                        objective[var(a, x, b, y, k)] = c

    rows: list[ratlp.LpRow] = []
    row_info: list[tuple] = []
    seen_rows: dict[tuple, int] = {}

    def emit(coeffs: dict[int, Fraction], sense: str, rhs: Fraction, info: tuple):
        if not coeffs:
            return
        coeffs = _scaled_to_integers(coeffs)
        key = (tuple(sorted(coeffs.items())), sense, rhs)
        if key in seen_rows:
            return
        seen_rows[key] = len(rows)
        rows.append(ratlp.LpRow(coeffs, sense, rhs))
        row_info.append(info)

    # family advantage rows: filtered advantage <= 0
    for i, (ma, mb, col_a, col_b) in enumerate(tables):
        coeffs: dict[int, Fraction] = {}
        for k in range(nk):
            sel = selector_bits(k, d + m)[d + i]
            for a in range(2):
                for x in range(sa):
                    wa_sel = ma[sel][a * sa + x]
                    wa_tot = col_a[a * sa + x]
                    for b in range(2):
                        for y in range(sb):
                            c = 4 * wa_sel * mb[sel][b * sb + y] - lam2 * wa_tot * col_b[b * sb + y]
                            if c:
                                coeffs[var(a, x, b, y, k)] = c
        emit(coeffs, ratlp.SENSE_LE, Fraction(0), ("family", i))

    # selector rows for the lifted product: selected diagonal <= other diagonal
    for e in range(d):
        sl = g_slices[e]
        for k in range(nk):
            sel = selector_bits(k, d + m)[e]
            coeffs = {}
            for (x, y), v in sl.items():
                coeffs[var(sel, x, sel, y, k)] = coeffs.get(var(sel, x, sel, y, k), Fraction(0)) + v
                j = var(1 - sel, x, 1 - sel, y, k)
                coeffs[j] = coeffs.get(j, Fraction(0)) - v
            coeffs = {j: c for j, c in coeffs.items() if c}
            emit(coeffs, ratlp.SENSE_LE, Fraction(0), ("sel-e", e, k))

    # selector rows for each family filter
    for i, (ma, mb, _, _) in enumerate(tables):
        for k in range(nk):
            sel = selector_bits(k, d + m)[d + i]
            coeffs = {}
            for a in range(2):
                for x in range(sa):
                    w_sel = ma[sel][a * sa + x]
                    w_oth = ma[1 - sel][a * sa + x]
                    for b in range(2):
                        for y in range(sb):
                            c = w_sel * mb[sel][b * sb + y] - w_oth * mb[1 - sel][b * sb + y]
                            if c:
                                coeffs[var(a, x, b, y, k)] = c
            emit(coeffs, ratlp.SENSE_LE, Fraction(0), ("sel-i", i, k))

    norm = {j: Fraction(1) for j in range(sp.num_vars)}
    rows.append(ratlp.LpRow(norm, ratlp.SENSE_EQ, Fraction(1)))
    row_info.append(("norm",))

    lp = ratlp.LpProblem(num_vars=sp.num_vars, objective=objective, rows=tuple(rows))
    return CertificationLp(problem=lp, setup=sp, row_info=tuple(row_info))


# -- reference values (used by tests and the spot check) ----------------------


def lifted_objective_value(q: JointDist, g: JointDist, lambda0: Fraction) -> Fraction:
    """Objective evaluated with true minima on an explicit helper alphabet."""
    return 2 * lambda_advantage(lift(q, g), ensure_fraction(lambda0))


def filtered_by_pair(q: JointDist, pair) -> JointDist:
    """Apply a family pair to the merged composite alphabets of q."""
    merged = q.merge_axes(["A-bit", "A-copy"], "A").merge_axes(["B-bit", "B-copy"], "B")
    return apply_local(pair.map_a, apply_local(pair.map_b, merged, "B"), "A")


def family_constraint_value(q: JointDist, pair, lambda0: Fraction) -> Fraction:
    """Filtered advantage (doubled), the quantity each family row bounds by 0."""
    return 2 * lambda_advantage(filtered_by_pair(q, pair), ensure_fraction(lambda0))


def canonical_witness_q(g: JointDist) -> JointDist:
    """The bit-to-alphabet embedding with perfectly correlated copy factors.

    Mass 1/4 on each (a', a', b', b') with a', b' in {0, 1}, trivial helper
    axis.  Its two sides are independent of each other, so every filter pair
    stays at or below the trivial fraction, while lifting it reproduces g on
    the bit axes at weight 1/4.
    """
    sa, sb = g.axis("A").size, g.axis("B").size
    if sa < 2 or sb < 2:
        raise ValueError("canonical witness needs alphabets of size >= 2 on A and B")
    axes = (Axis("A-bit", 2), Axis("A-copy", sa), Axis("B-bit", 2), Axis("B-copy", sb), Axis("E'", 1))
    quarter = Fraction(1, 4)
    entries = {}
    for a in range(2):
        for b in range(2):
            entries[(a, a, b, b, 0)] = quarter
    return JointDist(axes, entries)


# -- certificates -------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    verdict: str
    optimum: Fraction
    lambda0: Fraction
    fingerprint: str
    primal: JointDist | None = None
    dual: tuple[Fraction, ...] | None = None
    digest: str = ""

    def body_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "optimum": format_rational(self.optimum),
            "lambda0": format_rational(self.lambda0),
            "fingerprint": self.fingerprint,
            "primal": self.primal.to_json_dict() if self.primal is not None else None,
            "dual": (
                {"row_multipliers": [format_rational(y) for y in self.dual]}
                if self.dual is not None
                else None
            ),
        }

    def to_json_dict(self) -> dict:
        body = self.body_json_dict()
        body["digest"] = self.digest
        return body

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1, sort_keys=True) + "\n"

    @staticmethod
    def from_json_dict(data: dict) -> "Certificate":
        dual = data.get("dual")
        return Certificate(
            verdict=str(data["verdict"]),
            optimum=ensure_fraction(data["optimum"]),
            lambda0=ensure_fraction(data["lambda0"]),
            fingerprint=str(data["fingerprint"]),
            primal=(
                JointDist.from_json_dict(data["primal"]) if data.get("primal") is not None else None
            ),
            dual=(
                tuple(ensure_fraction(y) for y in dual["row_multipliers"])
                if dual is not None
                else None
            ),
            digest=str(data.get("digest", "")),
        )

    @staticmethod
    def loads(text: str) -> "Certificate":
        return Certificate.from_json_dict(json.loads(text))


def _canonical_hash(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def problem_fingerprint(g: JointDist, family: MapFamily, lambda0: Fraction) -> str:
    return _canonical_hash(
        {
            "g": g.to_json_dict(),
            "family": family.to_json_dict(),
            "lambda0": format_rational(ensure_fraction(lambda0)),
        }
    )


def _certificate_digest(cert: Certificate) -> str:
    return _canonical_hash(cert.body_json_dict())


def _with_digest(cert: Certificate) -> Certificate:
    return Certificate(
        verdict=cert.verdict,
        optimum=cert.optimum,
        lambda0=cert.lambda0,
        fingerprint=cert.fingerprint,
        primal=cert.primal,
        dual=cert.dual,
        digest=_certificate_digest(cert),
    )


def certify(
    g: JointDist,
    family: MapFamily,
    lambda0: Fraction = Fraction(1, 2),
    max_dm: int = 16,
    pivot_budget: int = 200_000,
    rule: str = "hybrid",
) -> Certificate:
    """Solve the certification program exactly and package the result.

    The maximum is never negative at lambda0 = 1/2 (the independent-sides
    point with tie selectors is feasible at objective zero); a zero maximum
    yields verdict "undistillable" with dual multipliers attached, a positive
    one yields "inconclusive" with the maximizing distribution attached.
    Output is deterministic for fixed input.
    """
    setup = CertificationProblem(g=g, family=family, lambda0=ensure_fraction(lambda0), max_dm=max_dm)
    build = build_lp(setup)
    sol = ratlp.solve(build.problem, pivot_budget=pivot_budget, rule=rule)
    if sol.status != ratlp.OPTIMAL:
        raise CertifierError(
            f"certification program unexpectedly {sol.status}; it should always be "
            "feasible and bounded"
        )
    if not ratlp.check_solution(build.problem, sol):
        raise CertifierError("solver output failed its independent optimality check")
    optimum = sol.objective_value
    fp = problem_fingerprint(g, family, setup.lambda0)
    if optimum > 0:
        cert = Certificate(
            verdict=INCONCLUSIVE,
            optimum=optimum,
            lambda0=setup.lambda0,
            fingerprint=fp,
            primal=build.dist_from_vector(sol.primal),
        )
    else:
        cert = Certificate(
            verdict=UNDISTILLABLE,
            optimum=optimum,
            lambda0=setup.lambda0,
            fingerprint=fp,
            dual=tuple(sol.dual),
        )
    return _with_digest(cert)


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    failure: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(
    g: JointDist,
    family: MapFamily,
    lambda0: Fraction,
    cert: Certificate,
    max_dm: int = 16,
) -> VerificationResult:
    """Recheck a certificate exactly, independently of the solver.

    The problem fingerprint and the certificate's own content digest must
    match; an inconclusive certificate must carry a feasible witness whose
    objective equals the claimed optimum; an undistillable one must carry
    sign-correct, feasible dual multipliers whose bound equals the claimed
    (non-positive) optimum.  The first violated condition is reported.
    """

    def fail(reason: str) -> VerificationResult:
        return VerificationResult(False, reason)

    lambda0 = ensure_fraction(lambda0)
    if cert.fingerprint != problem_fingerprint(g, family, lambda0):
        return fail("fingerprint mismatch: certificate was issued for different inputs")
    if cert.digest != _certificate_digest(cert):
        return fail("digest mismatch: certificate content was altered")
    if cert.verdict == UNDISTILLABLE:
        if cert.optimum > 0:
            return fail("verdict/optimum mismatch: undistillable requires optimum <= 0")
        if cert.dual is None:
            return fail("undistillable certificate is missing dual multipliers")
    elif cert.verdict == INCONCLUSIVE:
        if cert.optimum <= 0:
            return fail("verdict/optimum mismatch: inconclusive requires optimum > 0")
        if cert.primal is None:
            return fail("inconclusive certificate is missing a primal witness")
    else:
        return fail(f"unknown verdict {cert.verdict!r}")

    try:
        setup = CertificationProblem(g=g, family=family, lambda0=lambda0, max_dm=max_dm)
        build = build_lp(setup)
    except (ValueError, SizeGuardError) as exc:
        return fail(f"cannot rebuild program: {exc}")
    lp = build.problem

    if cert.verdict == INCONCLUSIVE:
        if cert.primal.axes != setup.q_axes():
            return fail("witness axes do not match the program's variable layout")
        x = build.vector_from_dist(cert.primal)
        for r, row in enumerate(lp.rows):
            lhs = sum((c * x[j] for j, c in row.coeffs.items()), Fraction(0))
            bad = lhs > row.rhs if row.sense == ratlp.SENSE_LE else lhs != row.rhs
            if bad:
                return fail(f"witness violates row {r} {build.row_info[r]}: {lhs} vs {row.rhs}")
        obj = sum((c * x[j] for j, c in lp.objective.items()), Fraction(0))
        if obj != cert.optimum:
            return fail(f"witness objective {obj} != claimed optimum {cert.optimum}")
        return VerificationResult(True)

    y = cert.dual
    if len(y) != len(lp.rows):
        return fail(f"dual has {len(y)} multipliers for {len(lp.rows)} rows")
    for r, (row, yr) in enumerate(zip(lp.rows, y)):
        if row.sense == ratlp.SENSE_LE and yr < 0:
            return fail(f"dual multiplier for row {r} {build.row_info[r]} is negative")
    col_sums: dict[int, Fraction] = {}
    for row, yr in zip(lp.rows, y):
        if yr == 0:
            continue
        for j, c in row.coeffs.items():
            col_sums[j] = col_sums.get(j, Fraction(0)) + yr * c
    for j, c in lp.objective.items():
        if col_sums.get(j, Fraction(0)) < c:
            return fail(f"dual infeasible at variable {j}: {col_sums.get(j, Fraction(0))} < {c}")
    for j in col_sums:
        if j not in lp.objective and col_sums[j] < 0:
            return fail(f"dual infeasible at variable {j}: {col_sums[j]} < 0")
    bound = sum((yr * row.rhs for row, yr in zip(lp.rows, y)), Fraction(0))
    if bound != cert.optimum:
        return fail(f"dual bound {bound} != claimed optimum {cert.optimum}")
    return VerificationResult(True)


# -- feasible-point sampling around an undistillable verdict ------------------


@dataclass(frozen=True)
class SpotcheckReport:
    samples: int
    max_advantage: Fraction
    violations: tuple[str, ...]

    def ok(self) -> bool:
        return not self.violations


def activation_spotcheck(
    g: JointDist,
    family: MapFamily,
    lambda0: Fraction,
    cert: Certificate,
    seed: int = 0,
    vertices: int = 8,
    mixtures: int = 8,
) -> SpotcheckReport:
    """Sample feasible points of a zero-maximum program; none may activate.

    Solves the same feasible region under seeded alternative objectives to
    collect vertices, mixes them with rational convex weights, and recomputes
    each point's lifted advantage from scratch (true minima, no selectors).
    Every advantage must be <= 0 exactly; a violation would mean the verdict
    machinery is unsound.  A zero maximum therefore also rules out g raising
    the extractable fraction of any distribution the family already pins to
    the trivial value, which is what makes products with g inert.
    """
    if cert.verdict != UNDISTILLABLE:
        raise ValueError("spot check applies to undistillable verdicts only")
    lambda0 = ensure_fraction(lambda0)
    setup = CertificationProblem(g=g, family=family, lambda0=lambda0)
    build = build_lp(setup)
    rng = random.Random(seed)
    points: list[JointDist] = []
    base = ratlp.solve(build.problem)
    if base.status == ratlp.OPTIMAL:
        points.append(build.dist_from_vector(base.primal))
    for _ in range(max(0, vertices - 1)):
        alt_obj = {
            j: Fraction(rng.randint(-9, 9))
            for j in rng.sample(range(build.problem.num_vars), min(12, build.problem.num_vars))
        }
        alt = ratlp.LpProblem(
            num_vars=build.problem.num_vars, objective=alt_obj, rows=build.problem.rows
        )
        sol = ratlp.solve(alt)
        if sol.status == ratlp.OPTIMAL:
            points.append(build.dist_from_vector(sol.primal))
    for _ in range(mixtures):
        if len(points) < 2:
            break
        a, b = rng.sample(range(len(points)), 2)
        w = Fraction(rng.randint(1, 9), 10)
        points.append(points[a].scale(w).add(points[b].scale(1 - w)))

    max_adv: Fraction | None = None
    violations = []
    for n, qk in enumerate(points):
        adv = lambda_advantage(lift(qk, g), lambda0)
        if max_adv is None or adv > max_adv:
            max_adv = adv
        if adv > 0:
            violations.append(f"sample {n}: lifted advantage {adv} > 0")
    return SpotcheckReport(
        samples=len(points),
        max_advantage=max_adv if max_adv is not None else Fraction(0),
        violations=tuple(violations),
    )
