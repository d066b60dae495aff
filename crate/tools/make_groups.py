#!/usr/bin/env python3
"""Generate the permutation-group fixture files under data/groups/.

Every emitted group is re-verified before writing: orders by closure (or by
Jordan's 3-cycle criterion where enumeration is infeasible), presentation
relators on the shipped generator tuples, orbit structures, and parity where
the group must sit inside an alternating group.  Deterministic; stdlib only.
"""

import json
import os
import random
import sys

from permlib import (
    closure,
    commutator,
    compose,
    eval_word,
    gf2k,
    identity,
    inverse,
    is_even,
    is_primitive,
    orbit_lengths,
    perm_order,
    pgl2_prime,
    psl2_even,
    psl2_prime,
    word_pow,
)

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "groups")

A12_RELATORS = [
    ("x3^3", [1, 1, 1]),
    ("x10^10", word_pow([2], 10)),
    ("(x3*x10)^11", word_pow([1, 2], 11)),
    ("[x3,x10]^2", word_pow(commutator(1, 2), 2)),
    ("(x3*x10^-2*x3*x10^2)^2", word_pow([1, -2, -2, 1, 2, 2], 2)),
    ("[x3,x10^3]^2", word_pow([-1, -2, -2, -2, 1, 2, 2, 2], 2)),
    ("(x3*x10^-4*x3*x10^4)^2", word_pow([1, -2, -2, -2, -2, 1, 2, 2, 2, 2], 2)),
    ("[x3,x10^5]^2", word_pow([-1] + [-2] * 5 + [1] + [2] * 5, 2)),
]

PSU34_RELATORS = [
    ("j2^2", [1, 1]),
    ("g3^3", [2, 2, 2]),
    ("(j2*g3^-1*j2*g3)^5", word_pow([1, -2, 1, 2], 5)),
    ("(j2*g3)^15", word_pow([1, 2], 15)),
    ("((j2*g3)^3*(j2*g3^-1)^3)^3", word_pow([1, 2] * 3 + [1, -2] * 3, 3)),
    ("(j2*g3^-1*(j2*g3)^5)^4", word_pow([1, -2] + [1, 2] * 5, 4)),
]

PGL_RELATORS = [
    ("u^2", [1, 1]),
    ("v^13", word_pow([2], 13)),
    ("(u*v^2)^4", word_pow([1, 2, 2], 4)),
    ("(u*v*u*v^4)^2", word_pow([1, 2, 1, 2, 2, 2, 2], 2)),
]

A5_RELATORS = [
    ("a^2", [1, 1]),
    ("b^3", [2, 2, 2]),
    ("(a*b)^5", word_pow([1, 2], 5)),
]

PSL13_RELATORS = [
    ("x^2", [1, 1]),
    ("y^3", [2, 2, 2]),
    ("(x*y)^7", word_pow([1, 2], 7)),
    ("[x,y]^6", word_pow(commutator(1, 2), 6)),
]


def cycles_to_perm(n, cycles):
    p = list(range(n))
    for cyc in cycles:
        for i, a in enumerate(cyc):
            p[a] = cyc[(i + 1) % len(cyc)]
    return tuple(p)


def check_relators(name, relators, gens):
    idn = identity(len(gens[0]))
    for label, w in relators:
        if eval_word(w, gens) != idn:
            raise SystemExit(f"{name}: relator {label} fails on shipped generators")


def emit(name, gens, order=None, relators=None, orbits=None, inside_alternating=False):
    if relators:
        check_relators(name, relators, gens)
    if order is not None:
        got = len(closure(gens))
        if got != order:
            raise SystemExit(f"{name}: closure order {got}, wanted {order}")
    if orbits is not None:
        got = orbit_lengths(gens)
        if got != sorted(orbits, reverse=True):
            raise SystemExit(f"{name}: orbit lengths {got}, wanted {orbits}")
    if inside_alternating and not all(is_even(g) for g in gens):
        raise SystemExit(f"{name}: generators are not all even")
    path = os.path.join(OUT, f"{name}.json")
    data = {
        "backend": "perm",
        "degree": len(gens[0]),
        "name": name,
        "generators": [list(g) for g in gens],
    }
    with open(path, "w") as f:
        json.dump(data, f)
        f.write("\n")
    print(f"wrote {name}.json degree {len(gens[0])} generators {len(gens)}")


def spectrum(elements):
    return sorted({perm_order(p) for p in elements})


def find_pair(elements, o1, o2, test, rng, group_order, tries=200000):
    orders = {}
    for p in sorted(elements):
        orders.setdefault(perm_order(p), []).append(p)
    pool1, pool2 = orders.get(o1, []), orders.get(o2, [])
    for _ in range(tries):
        x = rng.choice(pool1)
        y = rng.choice(pool2)
        if test(x, y) and len(closure([x, y])) == group_order:
            return x, y
    raise SystemExit("pair search exhausted")


# ---------------------------------------------------------------------------
# PSU3(4) on the 65 isotropic points of the Hermitian form over GF(16).


def psu3_4():
    k, poly = 4, 0b10011
    mul, inv_tab = gf2k(poly, k)

    def sigma(a):
        # The order-two field automorphism a -> a^4.
        return mul(mul(a, a), mul(a, a))

    def herm(u, v):
        # sigma(u1)v3 + sigma(u2)v2 + sigma(u3)v1 for the antidiagonal form.
        return (
            mul(sigma(u[0]), v[2]) ^ mul(sigma(u[1]), v[1]) ^ mul(sigma(u[2]), v[0])
        )

    points = []
    for a in range(16):
        for b in range(16):
            for c in range(16):
                v = (a, b, c)
                if v == (0, 0, 0):
                    continue
                # Normalise: first nonzero coordinate equal to 1.
                first = a if a else (b if b else c)
                if first != 1:
                    continue
                if herm(v, v) == 0:
                    points.append(v)
    assert len(points) == 65, len(points)
    index = {v: i for i, v in enumerate(points)}

    def normalise(v):
        first = v[0] if v[0] else (v[1] if v[1] else v[2])
        s = inv_tab[first]
        return tuple(mul(s, x) for x in v)

    def act(mat):
        # Column action; mat is a 3x3 tuple of rows.
        images = []
        for v in points:
            w = tuple(
                mul(mat[r][0], v[0]) ^ mul(mat[r][1], v[1]) ^ mul(mat[r][2], v[2])
                for r in range(3)
            )
            images.append(index[normalise(w)])
        return tuple(images)

    def unipotent(a, b):
        # Form preservation needs b + b^4 = a * a^4.
        assert b ^ sigma(b) == mul(a, sigma(a))
        return ((1, a, b), (0, 1, sigma(a)), (0, 0, 1))

    # Solve b + b^4 = a^5 for two independent choices of a.
    def solve_b(a):
        target = mul(a, sigma(a))
        for b in range(16):
            if b ^ sigma(b) == target:
                return b
        raise SystemExit("no unipotent completion")

    w_mat = ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    gens = [act(unipotent(1, solve_b(1))), act(unipotent(2, solve_b(2))), act(w_mat)]
    return gens


# ---------------------------------------------------------------------------
# A5 embeddings into A12 via coset actions of a fixed presentation pair.


def coset_action(elements, subgroup, gens):
    """Permutation images of gens on the right cosets of subgroup."""
    elements = sorted(elements)
    sub = sorted(subgroup)
    coset_of = {}
    reps = []
    for g in elements:
        if g in coset_of:
            continue
        idx = len(reps)
        reps.append(g)
        for h in sub:
            coset_of[compose(h, g)] = idx
    images = []
    for gen in gens:
        images.append(tuple(coset_of[compose(reps[i], gen)] for i in range(len(reps))))
    return images


def pad(p, n):
    return tuple(list(p) + list(range(len(p), n)))


def main():
    rng = random.Random(97)
    os.makedirs(OUT, exist_ok=True)

    # A5 and friends on few points.
    a = (1, 0, 3, 2, 4)
    b = (2, 1, 4, 3, 0)
    emit("a5", [a, b], order=60, relators=A5_RELATORS, orbits=[5])

    s5 = [cycles_to_perm(5, [[0, 1]]), cycles_to_perm(5, [[0, 1, 2, 3, 4]])]
    emit("s5", s5, order=120)

    a6 = [cycles_to_perm(6, [[0, 1, 2, 3, 4]]), cycles_to_perm(6, [[1, 2, 3, 4, 5]])]
    emit("a6", a6, order=360, orbits=[6], inside_alternating=True)

    s6 = [cycles_to_perm(6, [[0, 1]]), cycles_to_perm(6, [[0, 1, 2, 3, 4, 5]])]
    emit("s6", s6, order=720)

    # PSL2(5) acting on the projective line: an A5 inside A6.
    a5_in6 = psl2_prime(5)
    emit("a5_in6", a5_in6, order=60, orbits=[6], inside_alternating=True)

    d12 = [cycles_to_perm(6, [[0, 1, 2, 3, 4, 5]]), cycles_to_perm(6, [[1, 5], [2, 4]])]
    emit("d12", d12, order=12)

    # Projective groups over GF(13).
    psl13_projective = psl2_prime(13)
    psl13_els = closure(psl13_projective)
    assert len(psl13_els) == 1092
    assert spectrum(psl13_els) == [1, 2, 3, 6, 7, 13]
    x, y = find_pair(
        psl13_els,
        2,
        3,
        lambda x, y: perm_order(compose(x, y)) == 7
        and perm_order(eval_word(commutator(1, 2), [x, y])) == 6,
        rng,
        1092,
    )
    emit("psl2_13", [x, y], order=1092, relators=PSL13_RELATORS)

    pgl = pgl2_prime(13, 2)
    pgl_els = closure(pgl)
    assert len(pgl_els) == 2184
    print(f"pgl2_13 spectrum: {spectrum(pgl_els)}")
    emit("pgl2_13", pgl, order=2184)

    u, v = find_pair(
        pgl_els,
        2,
        13,
        lambda u, v: perm_order(eval_word([1, 2, 2], [u, v])) == 4
        and perm_order(eval_word([1, 2, 1, 2, 2, 2, 2], [u, v])) == 2,
        rng,
        2184,
    )
    emit("pres_pgl2_13", [u, v], order=2184, relators=PGL_RELATORS)

    # 13:6 as the normaliser of a Sylow 13-subgroup inside PSL2(13):
    # x -> x+1 together with x -> 4x.
    t13 = psl13_projective[0]
    s4 = tuple((4 * i) % 13 if i != 13 else 13 for i in range(14))
    assert perm_order(s4) == 6
    emit("c13_6", [t13, s4], order=78)

    # Characteristic-two projective lines.
    psl8 = psl2_even(3, 0b1011)
    assert spectrum(closure(psl8)) == [1, 2, 3, 7, 9]
    emit("psl2_8", psl8, order=504)
    psl16 = psl2_even(4, 0b10011)
    psl16_els = closure(psl16)
    assert spectrum(psl16_els) == [1, 2, 3, 5, 15, 17]
    emit("psl2_16", psl16, order=4080)

    # PSL3(3) on the 13 points of the projective plane over GF(3).
    def pg23_points():
        pts = []
        for a in range(3):
            for b in range(3):
                for c in range(3):
                    v = (a, b, c)
                    if v == (0, 0, 0):
                        continue
                    first = a if a else (b if b else c)
                    if first != 1:
                        continue
                    pts.append(v)
        return pts

    pts = pg23_points()
    assert len(pts) == 13
    pt_index = {v: i for i, v in enumerate(pts)}

    def act3(mat):
        images = []
        for v in pts:
            w = tuple(sum(mat[r][c] * v[c] for c in range(3)) % 3 for r in range(3))
            first = w[0] if w[0] else (w[1] if w[1] else w[2])
            # Nonzero residues mod 3 are self-inverse.
            w = tuple((first * x) % 3 for x in w)
            images.append(pt_index[w])
        return tuple(images)

    transvection = ((1, 0, 0), (1, 1, 0), (0, 0, 1))
    cyc = ((0, 0, 1), (1, 0, 0), (0, 1, 0))
    psl33 = [act3(transvection), act3(cyc)]
    emit("psl3_3", psl33, order=5616, orbits=[13])

    # PSU3(4) on 65 points, generators satisfying the shipped presentation.
    psu = psu3_4()
    psu_els = closure(psu)
    assert len(psu_els) == 62400
    print(f"psu3_4 spectrum: {spectrum(psu_els)}")
    j2, g3 = find_pair(
        psu_els,
        2,
        3,
        lambda j, g: perm_order(compose(j, g)) == 15
        and perm_order(eval_word([1, -2, 1, 2], [j, g])) == 5
        and all(
            eval_word(w, [j, g]) == identity(65)
            for _, w in PSU34_RELATORS
        ),
        rng,
        62400,
        tries=400000,
    )
    emit("psu3_4", [j2, g3], order=62400, relators=PSU34_RELATORS, orbits=[65])

    # A12 on its presentation pair; order via Jordan's criterion rather than
    # closure: even generators, primitive action, and a 3-cycle present.
    x3 = cycles_to_perm(12, [[0, 1, 2]])
    x10 = cycles_to_perm(12, [[0, 2], [1, 3, 4, 5, 6, 7, 8, 9, 10, 11]])
    check_relators("a12", A12_RELATORS, [x3, x10])
    assert is_even(x3) and is_even(x10)
    assert is_primitive([x3, x10])
    emit("a12", [x3, x10], relators=A12_RELATORS, orbits=[12], inside_alternating=True)

    # A5 embeddings in A12 with prescribed orbit profiles.
    a5_els = closure([a, b])
    emit(
        "a5_in_a12_natural",
        [pad(a, 12), pad(b, 12)],
        order=60,
        relators=A5_RELATORS,
        orbits=[5, 1, 1, 1, 1, 1, 1, 1],
        inside_alternating=True,
    )

    c5 = cycles_to_perm(5, [[0, 1, 2, 3, 4]])
    h_c5 = closure([c5])
    g12 = coset_action(a5_els, h_c5, [a, b])
    emit(
        "a5_in_a12_o12",
        g12,
        order=60,
        relators=A5_RELATORS,
        orbits=[12],
        inside_alternating=True,
    )

    d10 = closure([c5, cycles_to_perm(5, [[1, 4], [2, 3]])])
    assert len(d10) == 10
    g6 = coset_action(a5_els, d10, [a, b])
    tau = cycles_to_perm(5, [[0, 1]])
    a_out, b_out = compose(compose(tau, a), tau), compose(compose(tau, b), tau)
    g6_out = coset_action(a5_els, d10, [a_out, b_out])
    paired = [
        tuple(list(g6[i]) + [6 + v for v in g6_out[i]]) for i in range(2)
    ]
    emit(
        "a5_in_a12_o66",
        paired,
        order=60,
        relators=A5_RELATORS,
        orbits=[6, 6],
        inside_alternating=True,
    )

    g651 = [
        tuple(list(g6[i]) + [6 + v for v in (a, b)[i]] + [11]) for i in range(2)
    ]
    emit(
        "a5_in_a12_o651",
        g651,
        order=60,
        relators=A5_RELATORS,
        orbits=[6, 5, 1],
        inside_alternating=True,
    )

    # A GF(2) fixture: the order-7 Singer cycle on GF(2)^3, companion matrix
    # of x^3 + x + 1, rows as hex strings (bit j of row i = entry (i, j)).
    singer_rows = [0b010, 0b100, 0b011]

    def gf2_mul(p, q):
        return [
            # Row i of p*q: xor of rows of q selected by bits of row i of p.
            (r & 1 and q[0]) ^ (r >> 1 & 1 and q[1]) ^ (r >> 2 & 1 and q[2])
            for r in p
        ]

    m = singer_rows
    for _ in range(6):
        assert m != [0b001, 0b010, 0b100]
        m = gf2_mul(m, singer_rows)
    assert m == [0b001, 0b010, 0b100], "singer matrix must have order 7"
    singer = {
        "backend": "gf2",
        "degree": 3,
        "name": "singer7_gf2",
        "generators": [[f"{r:x}" for r in singer_rows]],
    }
    with open(os.path.join(OUT, "singer7_gf2.json"), "w") as f:
        json.dump(singer, f)
        f.write("\n")
    print("wrote singer7_gf2.json degree 3 generators 1")

    print("all group fixtures verified and written")


if __name__ == "__main__":
    main()
