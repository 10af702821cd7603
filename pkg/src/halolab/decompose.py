"""Constructive natural-generation decompositions.

Every block element of a gluing family (wreath, shuffler, juggler,
designer, cloner) decomposes into conjugated natural generators by the
gluing recursion; upcloner block elements over Z^d-lex decompose by the
three-case transvection recursion built on the commutator identity.

Words are lists of (generator index, exponent +-1) over the halo's
natural generating set, produced unreduced; ``simplify_word`` optionally
cancels adjacent inverse pairs.

The commutator identity is never assumed: ``certify_commutator_form``
computes the four-transvection product by matrix multiplication and
returns whichever closed form actually holds; the upcloner recursion uses
the certified form.

Decomposability limit (upcloner): the conjugated natural generators are
the translated elementary transvections tau_{t, t+e_i}(lambda).  Any
product of such matrices only has off-diagonal entries (p, q) with
q - p componentwise non-negative, because that entry set is closed under
matrix products and inverses.  A transvection tau_{a,b}(lambda) whose
displacement b - a has a negative coordinate is therefore provably
outside the generated subgroup (for d >= 2), and decompose_upcloner
raises UndecomposableError for it.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (BudgetError, ContractViolation, UndecomposableError,
                     UnsupportedFamilyError)
from .gf import GF
from .groups import ZdGroup
from .halo import (HaloGroup, Lamp, UpclonerHalo, _mat_canonical, _mat_compose,
                   enumerate_block)

Word = List[Tuple[int, int]]
DEFAULT_WORD_CAP = 10 ** 5


def evaluate_word(halo: HaloGroup, word: Word):
    gens = halo.generators()
    out = halo.identity()
    for idx, exp in word:
        g = gens[idx]
        if exp == -1:
            g = halo.invert(g)
        elif exp != 1:
            raise ContractViolation("word exponents must be +-1")
        out = halo.multiply(out, g)
    return out


def invert_word(word: Word) -> Word:
    return [(idx, -exp) for idx, exp in reversed(word)]


def simplify_word(word: Word) -> Word:
    """Free reduction: cancel adjacent (i, e)(i, -e) pairs."""
    out: Word = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return out


# ---------------------------------------------------------------------------
# commutator identity oracle

def commutator_transvection(gf: GF, r, f, s, lam: int, mu: int) -> Lamp:
    """tau_{r,f}(-lam) tau_{f,s}(-mu) tau_{r,f}(lam) tau_{f,s}(mu), by
    matrix multiplication; returned verbatim as a matrix payload."""
    if len({r, f, s}) != 3:
        raise ContractViolation("r, f, s must be pairwise distinct")

    def key(x):
        return x

    t_rf = lambda c: _mat_canonical({(r, f): c}, gf, key)
    t_fs = lambda c: _mat_canonical({(f, s): c}, gf, key)
    out = t_rf(gf.neg(lam))
    for factor in (t_fs(gf.neg(mu)), t_rf(lam), t_fs(mu)):
        out = _mat_compose(out, factor, gf, key)
    return out


def certify_commutator_form(qs: Sequence[int] = (2, 3, 4, 5)) -> str:
    """Decide which closed form the four-factor product satisfies.

    Returns 'lambda_mu' if the product always equals tau_{r,s}(lam*mu),
    'lambda' if it always equals tau_{r,s}(lam); raises if neither form
    holds uniformly.
    """
    def key(x):
        return x

    holds = {"lambda_mu": True, "lambda": True}
    for q in qs:
        gf = GF(q)
        for lam in gf.elements:
            for mu in gf.elements:
                got = commutator_transvection(gf, 0, 1, 2, lam, mu)
                if got != _mat_canonical({(0, 2): gf.mul(lam, mu)}, gf, key):
                    holds["lambda_mu"] = False
                if got != _mat_canonical({(0, 2): lam}, gf, key):
                    holds["lambda"] = False
    for form in ("lambda_mu", "lambda"):
        if holds[form]:
            return form
    raise AssertionError("no closed form certified for the commutator identity")


_CERTIFIED_FORM: Optional[str] = None


def certified_form() -> str:
    global _CERTIFIED_FORM
    if _CERTIFIED_FORM is None:
        _CERTIFIED_FORM = certify_commutator_form()
    return _CERTIFIED_FORM


# ---------------------------------------------------------------------------
# shared helpers

class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self, n: int):
        self.used += n
        if self.used > self.cap:
            raise BudgetError(f"word length cap exceeded ({self.used} > {self.cap})")


def _subset_measure(halo: HaloGroup, sites) -> Tuple[int, int]:
    """(translation-normalized subset length, cardinality).

    Subsets are normalized by translating their first site to the
    identity before summing word lengths, matching the proof's bookkeeping
    (each recursion step re-translates its block to the origin).
    """
    sites = sorted(sites, key=halo.base.sort_key)
    if not sites:
        return (0, 0)
    anchor_inv = halo.base.invert(sites[0])
    total = 0
    for s in sites:
        rel = halo.base.multiply(anchor_inv, s)
        total += len(halo.base_word(rel))
    return (total, len(sites))


def _record_step(trace: Optional[list], parent, child):
    if parent is not None:
        assert child < parent, f"recursion measure did not decrease: {parent} -> {child}"
    if trace is not None and parent is not None:
        trace.append((parent, child))


def _bfs_factor(halo: HaloGroup, target: Lamp, generator_lamps: List[Lamp]) -> List[Lamp]:
    """Write target as an ordered product of the given lamps (BFS, shortest)."""
    ident = halo.lamp_identity()
    if target == ident:
        return []
    prev: Dict[Lamp, Tuple[Lamp, Lamp]] = {ident: None}
    frontier = [ident]
    while frontier:
        new_frontier = []
        for state in frontier:
            for g in generator_lamps:
                nxt = halo.lamp_compose(state, g)
                if nxt in prev:
                    continue
                prev[nxt] = (state, g)
                if nxt == target:
                    factors = []
                    cur = nxt
                    while prev[cur] is not None:
                        cur, g = prev[cur]
                        factors.append(g)
                    factors.reverse()
                    return factors
                new_frontier.append(nxt)
        frontier = new_frontier
    raise UndecomposableError(
        "target lamp is not in the subgroup generated by the provided blocks")


def _edge_table(halo: HaloGroup, p, q) -> Dict[Lamp, Word]:
    """Word table for the block L({p, q}), q adjacent to p.

    Candidate generators are the conjugates act(t, g) of natural lamp
    generators g whose translated support lands inside {p, q}; each comes
    with the word  path(t) g path(t)^-1.
    """
    cache = getattr(halo, "_edge_tables", None)
    if cache is None:
        cache = halo._edge_tables = {}
    ckey = (p, q)
    if ckey in cache:
        return cache[ckey]

    base = halo.base
    sites = {p, q}
    gens = halo.generators()
    lamp_gens = gens[: halo.base_gen_offset]
    candidates: List[Tuple[Lamp, Word]] = []
    seen = set()
    for gi, (lg, _cursor) in enumerate(lamp_gens):
        supp = halo.lamp_sites(lg)
        ts = set()
        for u in supp:
            for site in (p, q):
                ts.add(base.multiply(site, base.invert(u)))
        for t in sorted(ts, key=base.sort_key):
            moved = halo.lamp_act(t, lg)
            if not halo.lamp_sites(moved) <= sites:
                continue
            if (moved, gi) in seen:
                continue
            seen.add((moved, gi))
            path = halo.base_word(t)
            candidates.append((moved, path + [(gi, 1)] + invert_word(path)))
    candidates.sort(key=lambda cw: len(cw[1]))

    table: Dict[Lamp, Word] = {halo.lamp_identity(): []}
    frontier = [halo.lamp_identity()]
    while frontier:
        new_frontier = []
        for state in frontier:
            for moved, w in candidates:
                nxt = halo.lamp_compose(state, moved)
                if nxt not in table:
                    table[nxt] = table[state] + w
                    new_frontier.append(nxt)
        frontier = new_frontier
    cache[ckey] = table
    return table


def _edge_word(halo: HaloGroup, p, q, lamp: Lamp, budget: _Budget) -> Word:
    table = _edge_table(halo, p, q)
    if lamp not in table:
        raise UndecomposableError(
            f"block element on {{{p!r}, {q!r}}} is outside the subgroup generated "
            "by conjugated natural generators")
    word = table[lamp]
    budget.spend(len(word))
    return word


# ---------------------------------------------------------------------------
# gluing recursion

def decompose_gluing(halo: HaloGroup, lamp: Lamp, word_cap: int = DEFAULT_WORD_CAP,
                     trace: Optional[list] = None) -> Word:
    """Word over natural generators whose evaluation is (lamp, 1_H).

    Recursion per the gluing property: |R| >= 3 splits off the two
    lex-smallest sites; non-adjacent pairs insert a geodesic midpoint;
    adjacent pairs and singletons are solved in closed edge-block tables.
    """
    if isinstance(halo, UpclonerHalo):
        raise UnsupportedFamilyError(
            "upcloner lacks the gluing property; use decompose_upcloner")
    budget = _Budget(word_cap)
    word = _gluing_rec(halo, lamp, None, budget, trace)
    return word


def _gluing_rec(halo: HaloGroup, lamp: Lamp, parent_measure, budget: _Budget,
                trace: Optional[list]) -> Word:
    base = halo.base
    sites = sorted(halo.lamp_sites(lamp), key=base.sort_key)
    if not sites:
        return []
    measure = _subset_measure(halo, sites)
    _record_step(trace, parent_measure, measure)

    if len(sites) == 1:
        r = sites[0]
        s0 = base.generators()[0]
        return _edge_word(halo, r, base.multiply(r, s0), lamp, budget)

    if len(sites) == 2:
        a, b = sites
        step = base.multiply(base.invert(a), b)
        path = halo.base_word(step)
        if len(path) == 1:
            return _edge_word(halo, a, b, lamp, budget)
        # insert the geodesic midpoint c: L({a,b}) <= <L({a,c}), L({c,b})>
        gens = halo.generators()
        mid = len(path) // 2
        c = a
        for idx, _ in path[:mid]:
            c = base.multiply(c, gens[idx][1])
        blocks = [l for l in enumerate_block(halo, [a, c]) if l != halo.lamp_identity()]
        blocks += [l for l in enumerate_block(halo, [c, b]) if l != halo.lamp_identity()]
        factors = _bfs_factor(halo, lamp, blocks)
        out: Word = []
        for f in factors:
            out += _gluing_rec(halo, f, measure, budget, trace)
        return out

    # |R| >= 3: split off the two lex-smallest sites
    h, hp = sites[0], sites[1]
    r1 = [h, hp]
    r2 = sites[1:]
    blocks = [l for l in enumerate_block(halo, r1) if l != halo.lamp_identity()]
    blocks += [l for l in enumerate_block(halo, r2) if l != halo.lamp_identity()]
    factors = _bfs_factor(halo, lamp, blocks)
    out = []
    for f in factors:
        out += _gluing_rec(halo, f, measure, budget, trace)
    return out


# ---------------------------------------------------------------------------
# upcloner recursion

def decompose_upcloner(halo: UpclonerHalo, lamp: Lamp, word_cap: int = DEFAULT_WORD_CAP,
                       trace: Optional[list] = None) -> Word:
    """Three-case transvection recursion over Z^d with the lex order."""
    if not isinstance(halo, UpclonerHalo):
        raise UnsupportedFamilyError("decompose_upcloner requires an upcloner halo")
    if not isinstance(halo.base, ZdGroup) or not halo.base.lex:
        raise UnsupportedFamilyError(
            "decompose_upcloner is implemented for Z^d with the lexicographic order")
    halo._check_unitriangular(lamp)
    budget = _Budget(word_cap)
    return _upcloner_rec(halo, lamp, None, budget, trace)


def _gen_index(halo: UpclonerHalo, i: int, lam: int) -> int:
    """Index of the natural generator tau_{0, e_i}(lam)."""
    e = halo.base.identity()
    ei = tuple(1 if j == i else 0 for j in range(halo.base.d))
    target = _mat_canonical({(e, ei): lam}, halo.gf, halo.site_key)
    for gi, (lg, _c) in enumerate(halo.generators()[: halo.base_gen_offset]):
        if lg == target:
            return gi
    raise AssertionError("elementary transvection missing from the generator list")


def _transvection_word(halo: UpclonerHalo, a, b, lam: int, parent_len: Optional[int],
                       budget: _Budget, trace: Optional[list]) -> Word:
    """Word for tau_{a,b}(lam); a < b lex, lam nonzero."""
    if lam == 0:
        return []
    base = halo.base
    gf = halo.gf
    v = tuple(y - x for x, y in zip(a, b))
    mlen = sum(abs(x) for x in v)
    if parent_len is not None:
        assert mlen < parent_len, "transvection displacement did not shrink"
        if trace is not None:
            trace.append(((parent_len,), (mlen,)))

    i = next(j for j, x in enumerate(v) if x != 0)
    if v[i] < 0:
        raise AssertionError("a < b lex implies leading displacement > 0")

    ei = tuple(1 if j == i else 0 for j in range(base.d))
    if v == ei:
        path = halo.base_word(a)
        word = path + [(_gen_index(halo, i, lam), 1)] + invert_word(path)
        budget.spend(len(word))
        return word

    if any(x < 0 for x in v):
        raise UndecomposableError(
            f"transvection displacement {v} has a negative coordinate: products of "
            "translated elementary transvections only realize displacements in N^d, "
            "so this element is outside the naturally generated subgroup")

    if v[i] >= 2:
        h = ei
    else:  # v[i] == 1 and v != ei
        i0 = next(j for j in range(i + 1, base.d) if v[j] != 0)
        h = tuple((1 if j == i else 0) + ((v[i0] - 1) if j == i0 else 0)
                  for j in range(base.d))
    f = tuple(x + y for x, y in zip(a, h))

    # certified identity: the four-factor product is tau_{a,b}(lam1 * mu1)
    if certified_form() == "lambda_mu":
        lam1, mu1 = lam, 1
    else:  # 'lambda': product is tau_{a,b}(lam1) regardless of mu1
        lam1, mu1 = lam, 1
    word: Word = []
    word += _transvection_word(halo, a, f, gf.neg(lam1), mlen, budget, trace)
    word += _transvection_word(halo, f, b, gf.neg(mu1), mlen, budget, trace)
    word += _transvection_word(halo, a, f, lam1, mlen, budget, trace)
    word += _transvection_word(halo, f, b, mu1, mlen, budget, trace)
    return word


def _upcloner_rec(halo: UpclonerHalo, lamp: Lamp, parent_measure, budget: _Budget,
                  trace: Optional[list]) -> Word:
    import functools

    base = halo.base
    sites = sorted(halo.lamp_sites(lamp), key=functools.cmp_to_key(base.compare))
    if not sites:
        return []
    measure = _subset_measure(halo, sites)
    _record_step(trace, parent_measure, measure)

    if len(sites) == 2:
        ((p, q), lam), = lamp
        return _transvection_word(halo, p, q, lam, None, budget, trace)

    r1 = sites[:2]
    r2 = sites[1:]
    blocks = [l for l in enumerate_block(halo, r1) if l != halo.lamp_identity()]
    blocks += [l for l in enumerate_block(halo, r2) if l != halo.lamp_identity()]
    factors = _bfs_factor(halo, lamp, blocks)
    out: Word = []
    for f in factors:
        out += _upcloner_rec(halo, f, measure, budget, trace)
    return out
