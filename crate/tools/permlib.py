"""Shared permutation and finite-field helpers for the data-generation tools.

Permutations are tuples of images; compose(p, q) applies p first, then q,
matching the element convention used by the Rust crates.
"""

from math import lcm

# ---------------------------------------------------------------------------
# Permutations.


def compose(p, q):
    return tuple(q[p[i]] for i in range(len(p)))


def inverse(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def identity(n):
    return tuple(range(n))


def perm_order(p):
    n = len(p)
    seen = [False] * n
    o = 1
    for i in range(n):
        if not seen[i]:
            l, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                l += 1
            o = lcm(o, l)
    return o


def is_even(p):
    n = len(p)
    seen = [False] * n
    transpositions = 0
    for i in range(n):
        if not seen[i]:
            l, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                l += 1
            transpositions += l - 1
    return transpositions % 2 == 0


def closure(gens, cap=None):
    """Breadth-first closure of the generated permutation group."""
    idn = identity(len(gens[0]))
    seen = {idn}
    frontier = [idn]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                f = compose(e, g)
                if f not in seen:
                    seen.add(f)
                    if cap is not None and len(seen) > cap:
                        raise RuntimeError("closure cap exceeded")
                    nxt.append(f)
        frontier = nxt
    return seen


def eval_word(word, gens):
    """word: nonzero ints, +k = gens[k-1], -k = its inverse."""
    p = identity(len(gens[0]))
    for letter in word:
        g = gens[abs(letter) - 1]
        p = compose(p, g if letter > 0 else inverse(g))
    return p


def word_pow(base, e):
    return list(base) * e


def commutator(a, b):
    return [-a, -b, a, b]


def orbit_lengths(gens):
    n = len(gens[0])
    seen = [False] * n
    lengths = []
    for i in range(n):
        if not seen[i]:
            orbit = [i]
            seen[i] = True
            k = 0
            while k < len(orbit):
                for g in gens:
                    j = g[orbit[k]]
                    if not seen[j]:
                        seen[j] = True
                        orbit.append(j)
                k += 1
            lengths.append(len(orbit))
    return sorted(lengths, reverse=True)


def is_transitive(gens):
    return orbit_lengths(gens) == [len(gens[0])]


def is_primitive(gens):
    """Minimal-block test: transitive action with no nontrivial block system."""
    n = len(gens[0])
    if not is_transitive(gens):
        return False
    for k in range(1, n):
        # Smallest block system whose block contains {0, k}.
        rep = list(range(n))

        def find(a):
            while rep[a] != a:
                rep[a] = rep[rep[a]]
                a = rep[a]
            return a

        def union(a, b):
            a, b = find(a), find(b)
            if a != b:
                rep[max(a, b)] = min(a, b)
                return True
            return False

        union(0, k)
        changed = True
        while changed:
            changed = False
            # propagate: if i ~ j then g(i) ~ g(j)
            for g in gens:
                for i in range(n):
                    j = find(i)
                    if j != i and union(g[i], g[j]):
                        changed = True
        size = sum(1 for i in range(n) if find(i) == find(0))
        if size != n and size != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Finite fields and projective constructions.


def gf2k(poly, k):
    """Multiplication and inverse tables for GF(2^k) defined by poly."""
    size = 1 << k

    def mul(a, b):
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & size:
                a = (a ^ poly) & (2 * size - 1)
        return r

    inv = [0] * size
    for a in range(1, size):
        for b in range(1, size):
            if mul(a, b) == 1:
                inv[a] = b
                break
    return mul, inv


def psl2_prime(p):
    """<x -> x+1, x -> -1/x> on GF(p) + {infinity}; equals PSL2(p)."""
    n = p + 1
    inf = p
    t = tuple((i + 1) % p if i != inf else inf for i in range(n))
    pts = []
    for i in range(n):
        if i == inf:
            pts.append(0)
        elif i == 0:
            pts.append(inf)
        else:
            pts.append((-pow(i, p - 2, p)) % p)
    return [t, tuple(pts)]


def pgl2_prime(p, nonresidue):
    """PSL2(p) generators plus x -> nonresidue * x, giving PGL2(p)."""
    gens = psl2_prime(p)
    m = tuple((nonresidue * i) % p if i != p else p for i in range(p + 1))
    return gens + [m]


def psl2_even(k, poly):
    """<t: x -> x+1, m: x -> gx, w: x -> 1/x> on GF(2^k) + {infinity}."""
    size = 1 << k
    inf = size
    mul, inv = gf2k(poly, k)
    t = tuple(i ^ 1 if i != inf else inf for i in range(size + 1))
    m = tuple(mul(2, i) if i != inf else inf for i in range(size + 1))
    j = [0] * (size + 1)
    j[0], j[inf] = inf, 0
    for i in range(1, size):
        j[i] = inv[i]
    return [t, m, tuple(j)]


def zech_logs(poly, k):
    """z with 1 + g^i = g^z[i] for i = 1..2^k-2, where g = 2 generates."""
    size = 1 << k
    mul, _ = gf2k(poly, k)
    log = {}
    acc = 1
    for i in range(size - 1):
        log[acc] = i
        acc = mul(acc, 2)
    return {i: log[1 ^ pow_g(poly, k, i)] for i in range(1, size - 1)}


def pow_g(poly, k, i):
    mul, _ = gf2k(poly, k)
    acc = 1
    for _ in range(i):
        acc = mul(acc, 2)
    return acc


def borel_relators(k, poly):
    """Relators for PSL2(2^k) on generators t, m, w (1, 2, 3).

    t is a translation, m scales by a generator of the multiplicative group,
    w inverts. The additive relators add(i) encode 1 + g^i = g^z(i); together
    with the commutators they force the translation subgroup onto GF(2^k).
    """
    q = 1 << k
    rels = [("t^2", [1, 1]), (f"m^{q - 1}", word_pow([2], q - 1)), ("w^2", [3, 3])]
    rels.append(("(mw)^2", word_pow([2, 3], 2)))
    rels.append(("(tw)^3", word_pow([1, 3], 3)))
    for i in range(1, k + 1):
        conj = [-2] * i + [1] + [2] * i
        conj_inv = [-2] * i + [-1] + [2] * i
        rels.append((f"[t,t^(m^{i})]", [-1] + conj_inv + [1] + conj))
    z = zech_logs(poly, k)
    for i in sorted(z):
        word = [1] + [-2] * i + [1] + [2] * i + [-2] * z[i] + [1] + [2] * z[i]
        rels.append((f"add({i})", word))
    return rels
