"""Universal copy-matching map, currying of global maps, and lifted products.

Any non-negative map M: H1 (x) H2 -> H3 factors as U . (M' (x) id), where M'
is a pure re-indexing of M into a map H1 -> H3 (x) H2 and U is a fixed map
that matches the carried H2 factor against a fresh H2 system:

    U[y3 | (x3, x2, y2)] = [y3 == x3] * [x2 == y2].

`lift` applies the A-side and B-side instances of U to q (x) g without ever
materializing U: the double delta reduces the contraction to

    out(a', b', e', e) = sum_{x,y} q(a', x, b', y, e') * g(x, y, e).
"""

from __future__ import annotations

from fractions import Fraction

from .probvec import Axis, JointDist, LocalMap


def universal_map(out_size: int, copy_size: int) -> LocalMap:
    """The fixed matching map on input triples (x3, x2, y2), output x3.

    Exactly out_size * copy_size coefficients are 1, all others 0.
    """
    if out_size < 1 or copy_size < 1:
        raise ValueError("universal_map sizes must be >= 1")
    n_in = out_size * copy_size * copy_size
    in_ax = Axis("U-in", n_in, (out_size, copy_size, copy_size))
    out_ax = Axis("U-out", out_size)
    rows = [[Fraction(0)] * n_in for _ in range(out_size)]
    for x3 in range(out_size):
        for x2 in range(copy_size):
            idx = (x3 * copy_size + x2) * copy_size + x2
            rows[x3][idx] = Fraction(1)
    return LocalMap(in_ax, out_ax, rows)


def curry(m: LocalMap, split: tuple[int, int]) -> LocalMap:
    """Re-index a map on a product alphabet into a map on the first factor.

    Input symbols of `m` are read as pairs (x1, x2) with x1 outermost
    (index = x1 * size2 + x2).  The result sends x1 to the composite output
    (x3, x2), x3 outermost; coefficients are moved, never changed, so
    universal_map(out, size2) composed with curry(m) (x) id reproduces m.
    """
    size1, size2 = split
    if size1 < 1 or size2 < 1 or m.input_axis.size != size1 * size2:
        raise ValueError(
            f"input size {m.input_axis.size} does not factor as {size1}*{size2}"
        )
    out_size = m.output_axis.size
    in_ax = Axis(m.input_axis.party, size1)
    out_ax = Axis(
        f"{m.output_axis.party}*{m.input_axis.party}", out_size * size2, (out_size, size2)
    )
    rows = [[Fraction(0)] * size1 for _ in range(out_size * size2)]
    for x3 in range(out_size):
        for x1 in range(size1):
            for x2 in range(size2):
                rows[x3 * size2 + x2][x1] = m.coeffs[x3][x1 * size2 + x2]
    return LocalMap(in_ax, out_ax, rows)


def lift(q: JointDist, g: JointDist) -> JointDist:
    """Apply the A- and B-side universal maps to q (x) g.

    `q` must have five axes (A-bit, A-copy, B-bit, B-copy, E'), positional,
    with bit axes of size 2 and copy axes matching g's A and B alphabets;
    `g` has three axes (A, B, E).  The result lives on (A, B, E', E) with

        out(a', b', e', e) = sum_{x,y} q(a', x, b', y, e') g(x, y, e).
    """
    if len(q.axes) != 5:
        raise ValueError(f"q must have 5 axes (A-bit, A-copy, B-bit, B-copy, E'), got {len(q.axes)}")
    if len(g.axes) != 3:
        raise ValueError(f"g must have 3 axes (A, B, E), got {len(g.axes)}")
    abit, acopy, bbit, bcopy, eprime = q.axes
    ga, gb, ge = g.axes
    if abit.size != 2 or bbit.size != 2:
        raise ValueError("q's bit axes must have size 2")
    if acopy.size != ga.size:
        raise ValueError(f"A-copy size {acopy.size} does not match g's A alphabet {ga.size}")
    if bcopy.size != gb.size:
        raise ValueError(f"B-copy size {bcopy.size} does not match g's B alphabet {gb.size}")

    by_copy: dict[tuple[int, int], list[tuple[int, Fraction]]] = {}
    for (x, y, e), v in g.items():
        by_copy.setdefault((x, y), []).append((e, v))

    ep_label = eprime.party
    while ep_label in {ga.party, gb.party, ge.party}:
        ep_label += "'"
    out_axes = (
        Axis(ga.party, 2),
        Axis(gb.party, 2),
        Axis(ep_label, eprime.size, eprime.factors),
        ge,
    )
    entries: dict[tuple[int, ...], Fraction] = {}
    for (a, x, b, y, ep), qv in q.items():
        hits = by_copy.get((x, y))
        if not hits:
            continue
        for e, gv in hits:
            key = (a, b, ep, e)
            entries[key] = entries.get(key, Fraction(0)) + qv * gv
    return JointDist(out_axes, entries)
