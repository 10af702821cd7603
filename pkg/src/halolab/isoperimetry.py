"""Boundaries, l^p gradients, isoperimetric profiles, Folner functions,
the almost-invariant lift, the power transform, and product boundaries.

Conventions fixed once here: gradient sums run over ordered pairs (g, s)
with s ranging over the full symmetric generator list, so each geometric
edge is counted twice.  p = 1 is exact rational arithmetic end-to-end;
p > 1 uses compensated float summation with p-th roots at the last step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import BudgetError, ContractViolation
from .groups import GroupHandle, ProductGroup, ball
from .halo import HaloGroup, enumerate_block, DEFAULT_ENUM_BUDGET

Rational = Union[Fraction, int]
Value = Union[Fraction, float]


@dataclass(frozen=True)
class FiniteFunction:
    """Finitely supported map group element -> value, with norm exponent p.

    Values are exact Fractions when p = 1 workflows demand exactness;
    floats are accepted for p > 1 pipelines.  Zero entries are not stored.
    """

    entries: Dict[Any, Value]
    p: Rational = 1

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           {g: v for g, v in self.entries.items() if v != 0})

    @property
    def support(self):
        return self.entries.keys()

    def __call__(self, g):
        return self.entries.get(g, 0)

    def norm(self) -> Value:
        p = self.p
        if p == 1:
            return sum(abs(v) for v in self.entries.values())
        total = math.fsum(abs(v) ** float(p) for v in self.entries.values())
        return total ** (1.0 / float(p))


@dataclass(frozen=True)
class SubsetWitness:
    """A finite set with its exact boundary AS \\ A and ratio |A|/|dA|.

    ratio is None when the boundary is empty (finite group, whole set):
    the ratio is then +infinity.
    """

    A: FrozenSet
    boundary: FrozenSet
    ratio: Optional[Fraction]

    @property
    def ratio_value(self) -> float:
        return math.inf if self.ratio is None else float(self.ratio)


@dataclass(frozen=True)
class ProfilePoint:
    n: int
    value: Optional[Fraction]  # None encodes +infinity
    witness: Any
    method: str
    exact: bool

    @property
    def value_float(self) -> float:
        return math.inf if self.value is None else float(self.value)


def boundary(group: GroupHandle, A: Iterable) -> SubsetWitness:
    """Exact boundary AS \\ A over the full generator list."""
    A = frozenset(A)
    if not A:
        raise ContractViolation("boundary of the empty set is undefined")
    gens = group.generators()
    out = set()
    for a in A:
        for s in gens:
            b = group.multiply(a, s)
            if b not in A:
                out.add(b)
    ratio = Fraction(len(A), len(out)) if out else None
    return SubsetWitness(A, frozenset(out), ratio)


def gradient_ratio(group: GroupHandle, f: FiniteFunction) -> Value:
    """||grad f||_p / ||f||_p, summed over ordered (g, s) pairs.

    Only pairs with g or gs in supp f contribute; the sum iterates
    supp f x generators once, adding the mirrored term |f(g)|^p whenever
    gs leaves the support (that term is the (gs, s^-1) contribution).
    """
    if not f.entries:
        raise ContractViolation("gradient_ratio of the empty function")
    p = f.p
    gens = group.generators()
    entries = f.entries
    if p == 1:
        grad = Fraction(0)
        for g, v in entries.items():
            for s in gens:
                w = entries.get(group.multiply(g, s), 0)
                grad += abs(v - w)
                if w == 0:
                    grad += abs(v)
        return grad / f.norm()
    pf = float(p)
    terms = []
    for g, v in entries.items():
        v = float(v)
        for s in gens:
            w = float(entries.get(group.multiply(g, s), 0))
            terms.append(abs(v - w) ** pf)
            if w == 0.0:
                terms.append(abs(v) ** pf)
    return math.fsum(terms) ** (1.0 / pf) / f.norm()


# ---------------------------------------------------------------------------
# exact profile: connected, basepoint-containing subsets of a ball

def _connected_subsets(adj: Dict, v0, n_max: int, budget: int):
    """Yield all connected subsets containing v0 of size <= n_max, each once.

    Standard exclusion-based enumeration: children extend by one candidate
    and the used candidate is banned for later siblings.
    """
    count = 0

    def rec(S: frozenset, cand: List, banned: frozenset):
        nonlocal count
        count += 1
        if count > budget:
            raise BudgetError(f"connected-subset budget exceeded ({budget})")
        yield S
        if len(S) == n_max:
            return
        local_banned = set(banned)
        for i, u in enumerate(cand):
            newS = S | {u}
            seen = set(newS) | local_banned | set(cand[i + 1:])
            ext = cand[i + 1:] + [w for w in adj[u] if w not in seen]
            yield from rec(newS, ext, frozenset(local_banned))
            local_banned.add(u)

    yield from rec(frozenset([v0]), list(adj[v0]), frozenset())


def _best_by_size(group: GroupHandle, subsets, n_max: int):
    """best[k] = (ratio, witness) maximizing |A|/|dA| over size-k sets."""
    best: Dict[int, Tuple[Optional[Fraction], SubsetWitness]] = {}

    def better(candidate, incumbent):
        cr, cw = candidate
        ir, iw = incumbent
        ckey = math.inf if cr is None else cr
        ikey = math.inf if ir is None else ir
        if ckey != ikey:
            return ckey > ikey
        # deterministic tie-break: lexicographically smallest witness set
        return sorted(map(group.sort_key, cw.A)) < sorted(map(group.sort_key, iw.A))

    for S in subsets:
        w = boundary(group, S)
        cand = (w.ratio, w)
        k = len(S)
        if k not in best or better(cand, best[k]):
            best[k] = cand
    return best


def profile_exact(group: GroupHandle, n_max: int, radius: int,
                  workers: int = 1, budget: int = 2 * 10 ** 6) -> List[ProfilePoint]:
    """Exact l^1 profile over connected subsets of Ball(radius) containing
    the identity, sizes <= n_max.

    Restricting to connected sets containing the basepoint is harmless:
    a disconnected optimum has a component with at least the same ratio
    (component boundaries are disjoint or shared, either way |dA| >= sum),
    and translating that component to contain the identity changes
    nothing.  The ball restriction is provably harmless when
    radius >= n_max - 1, since a connected set of size n containing the
    identity lies in Ball(n-1); points are flagged exact accordingly.
    """
    if n_max < 1:
        raise ContractViolation("n_max must be >= 1")
    b = ball(group, radius)
    window = sorted(b.elements, key=group.sort_key)
    wset = set(window)
    gens = group.generators()
    adj = {v: [w for w in
               sorted((group.multiply(v, s) for s in gens), key=group.sort_key)
               if w in wset]
           for v in window}
    e = group.identity()

    truncated = False
    merged: Dict[int, Tuple[Optional[Fraction], SubsetWitness]] = {}

    def merge(best):
        for k, cand in best.items():
            if k not in merged:
                merged[k] = cand
                continue
            cr, cw = cand
            ir, iw = merged[k]
            ckey = math.inf if cr is None else cr
            ikey = math.inf if ir is None else ir
            if ckey > ikey or (ckey == ikey and
                               sorted(map(group.sort_key, cw.A)) <
                               sorted(map(group.sort_key, iw.A))):
                merged[k] = cand

    if workers <= 1:
        try:
            merge(_best_by_size(group, _connected_subsets(adj, e, n_max, budget), n_max))
        except BudgetError:
            truncated = True
    else:
        # partition the search at the first level: subtree t fixes the t-th
        # first choice; merge is order-independent, so results match workers=1
        from concurrent.futures import ThreadPoolExecutor

        first = list(adj[e])

        def subtree(i):
            u = first[i]
            S = frozenset([e, u])
            banned = frozenset(first[:i])
            seen = set(S) | set(banned) | set(first[i + 1:])
            cand = first[i + 1:] + [w for w in adj[u] if w not in seen]
            return _subtree_subsets(adj, S, cand, banned, n_max, budget)

        try:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                results = [_best_by_size(group, [frozenset([e])], n_max)]
                results += list(ex.map(lambda i: _best_by_size(
                    group, subtree(i), n_max), range(len(first))))
            for r in results:
                merge(r)
        except BudgetError:
            truncated = True

    points = []
    best_so_far: Tuple[Optional[Fraction], Optional[SubsetWitness]] = (Fraction(0), None)
    for n in range(1, n_max + 1):
        if n in merged:
            cr, cw = merged[n]
            ckey = math.inf if cr is None else cr
            ikey = math.inf if best_so_far[0] is None else best_so_far[0]
            if best_so_far[1] is None or ckey > ikey:
                best_so_far = (cr, cw)
        value, witness = best_so_far
        exact = (radius >= n_max - 1) and not truncated
        points.append(ProfilePoint(n, value, witness, "exact", exact))
    return points


def _subtree_subsets(adj, S, cand, banned, n_max, budget):
    count = 0

    def rec(S, cand, banned):
        nonlocal count
        count += 1
        if count > budget:
            raise BudgetError(f"connected-subset budget exceeded ({budget})")
        yield S
        if len(S) == n_max:
            return
        local_banned = set(banned)
        for i, u in enumerate(cand):
            newS = S | {u}
            seen = set(newS) | local_banned | set(cand[i + 1:])
            ext = cand[i + 1:] + [w for w in adj[u] if w not in seen]
            yield from rec(newS, ext, frozenset(local_banned))
            local_banned.add(u)

    yield from rec(S, cand, banned)


def profile_heuristic(group: GroupHandle, n_max: int, method: str = "greedy",
                      seed: int = 0, steps: int = 2000) -> List[ProfilePoint]:
    """Witness-certified lower bounds on the profile.

    greedy: grow A from the identity, always adding the boundary vertex
    minimizing the resulting |dA| (ties broken by sort key).
    anneal: Metropolis over add/remove moves with geometric cooling
    T_k = 1.0 * 0.995^k for the given number of steps, seeded.
    """
    import random as _random

    gens_ = group.generators()
    e = group.identity()
    best: Dict[int, SubsetWitness] = {1: boundary(group, [e])}

    def consider(A: frozenset):
        w = boundary(group, A)
        k = len(A)
        if k not in best or (w.ratio or math.inf) > (best[k].ratio or math.inf) or (
                w.ratio == best[k].ratio and
                sorted(map(group.sort_key, A)) < sorted(map(group.sort_key, best[k].A))):
            best[k] = w
        return w

    if method == "greedy":
        A = frozenset([e])
        while len(A) < n_max:
            w = boundary(group, A)
            if not w.boundary:
                break
            cand = sorted(w.boundary, key=group.sort_key)

            def score(u):
                in_A = sum(1 for s in gens_ if group.multiply(u, s) in A)
                return (len(boundary(group, A | {u}).boundary), -in_A,
                        group.sort_key(u))

            pick = min(cand, key=score)
            A = A | {pick}
            consider(A)
    elif method == "anneal":
        rng = _random.Random(seed)
        A = frozenset([e])
        cur = boundary(group, A)
        for k in range(steps):
            T = 1.0 * (0.995 ** k)
            add = len(A) == 1 or rng.random() < 0.6
            if add and len(A) < n_max and cur.boundary:
                u = rng.choice(sorted(cur.boundary, key=group.sort_key))
                nxt = A | {u}
            elif len(A) > 1:
                u = rng.choice(sorted(A - {e}, key=group.sort_key))
                nxt = A - {u}
            else:
                continue
            wn = boundary(group, nxt)
            cur_cost = len(cur.boundary) / len(A)
            nxt_cost = len(wn.boundary) / len(nxt)
            if nxt_cost <= cur_cost or rng.random() < math.exp((cur_cost - nxt_cost) / max(T, 1e-9)):
                A, cur = nxt, wn
                consider(A)
    else:
        raise ContractViolation(f"unknown heuristic method {method!r}")

    points = []
    best_pt: Optional[SubsetWitness] = None
    for n in range(1, n_max + 1):
        if n in best:
            w = best[n]
            if best_pt is None or (w.ratio or math.inf) > (best_pt.ratio or math.inf):
                best_pt = w
        if best_pt is not None:
            points.append(ProfilePoint(n, best_pt.ratio, best_pt, method, False))
    return points


def folner_function(points: Sequence[ProfilePoint], target: Fraction):
    """Least witnessed |A| with |dA|/|A| <= target; None if no witness
    qualifies (search exhausted marker).

    With heuristic points the result is an upper bound on the Folner value.
    """
    best: Optional[int] = None
    for pt in points:
        w = pt.witness
        if not isinstance(w, SubsetWitness):
            continue
        qualifies = (not w.boundary) or Fraction(len(w.boundary), len(w.A)) <= target
        if qualifies and (best is None or len(w.A) < best):
            best = len(w.A)
    return best


def spectral_refine(group: GroupHandle, A: Iterable,
                    tol: float = 1e-10, max_iter: int = 10 ** 4) -> ProfilePoint:
    """Optimal l^2 function supported on A: principal eigenvector of the
    support-restricted gradient quadratic form, by inverse power iteration.

    For f supported in A the form is Q(f) = 2(|S| ||f||^2 - <f, W f>) with
    W the within-A adjacency (counted with multiplicity over generators),
    so the minimizer is the top eigenvector of W, found by power iteration
    on (W + |S| I) to guarantee positivity of the shift.
    """
    A = sorted(frozenset(A), key=group.sort_key)
    if not A:
        raise ContractViolation("spectral_refine of the empty set")
    idx = {a: i for i, a in enumerate(A)}
    gens = group.generators()
    m = len(A)
    W = [[0.0] * m for _ in range(m)]
    for a in A:
        i = idx[a]
        for s in gens:
            j = idx.get(group.multiply(a, s))
            if j is not None:
                W[i][j] += 1.0
    shift = float(len(gens))
    v = [1.0 / math.sqrt(m)] * m
    mu = 0.0
    for _ in range(max_iter):
        w = [math.fsum(W[i][j] * v[j] for j in range(m)) + shift * v[i]
             for i in range(m)]
        norm = math.sqrt(math.fsum(x * x for x in w))
        w = [x / norm for x in w]
        mu_new = norm - shift
        if abs(mu_new - mu) < tol:
            mu = mu_new
            v = w
            break
        mu, v = mu_new, w
    f = FiniteFunction({a: v[idx[a]] for a in A}, 2)
    ratio = gradient_ratio(group, f)
    # profile convention: value = ||f|| / ||grad f||, larger is better
    value = None if ratio == 0 else Fraction(1.0 / ratio).limit_denominator(10 ** 12)
    return ProfilePoint(m, value, f, "spectral", False)


# ---------------------------------------------------------------------------
# the almost-invariant lift and the power transform

def almost_invariant_lift(halo: HaloGroup, f: FiniteFunction,
                          budget: int = DEFAULT_ENUM_BUDGET) -> FiniteFunction:
    """g(sigma, h) = f(h) * [sigma in L(V)] with V = U union U.S_H.

    U = supp f in the base; V adds all generator translates of U, so every
    conjugated lamp generator met from U stays inside L(V) and the gradient
    ratio of g equals that of f (exactly at p = 1).
    |supp g| = |U| * Lambda(|V|).
    """
    base = halo.base
    U = list(f.support)
    V = set(U)
    for s in base.generators():
        V.update(base.multiply(u, s) for u in U)
    block = enumerate_block(halo, V, budget)
    entries = {}
    for h in U:
        v = f(h)
        for lamp in block:
            entries[(lamp, h)] = v
    return FiniteFunction(entries, f.p)


def power_transform(f: FiniteFunction, p: Rational, q: Rational) -> FiniteFunction:
    """h = |f|^(p/q); exact when the exponent is an integer."""
    p, q = Fraction(p), Fraction(q)
    if not p > q or q < 1:
        raise ContractViolation("power_transform requires p > q >= 1")
    v = p / q
    entries = {}
    for g, val in f.entries.items():
        a = abs(val)
        if v.denominator == 1 and isinstance(a, (int, Fraction)):
            entries[g] = a ** v.numerator
        else:
            entries[g] = float(a) ** float(v)
    return FiniteFunction(entries, q)


def power_transform_bound(group: GroupHandle, f: FiniteFunction,
                          p: Rational, q: Rational) -> Tuple[float, float]:
    """(lhs, rhs) of the transform inequality:
    ||grad h||_q/||h||_q <= 2^(1/q) |S|^((p-q)/(pq)) (p/q) ||grad f||_p/||f||_p."""
    p, q = Fraction(p), Fraction(q)
    fp = FiniteFunction(f.entries, p)
    h = power_transform(fp, p, q)
    lhs = float(gradient_ratio(group, h))
    S = len(group.generators())
    const = 2 ** (1 / float(q)) * S ** (float(p - q) / float(p * q)) * float(p / q)
    rhs = const * float(gradient_ratio(group, fp))
    return lhs, rhs


def product_boundary(gA: GroupHandle, gB: GroupHandle, A: Iterable, B: Iterable) -> SubsetWitness:
    """Boundary of A x B in the direct product with the union generating
    set; verifies d(AxB) = (dA x B) union (A x dB) before returning."""
    A, B = frozenset(A), frozenset(B)
    prod = ProductGroup(gA, gB)
    AxB = frozenset((a, b) for a in A for b in B)
    w = boundary(prod, AxB)
    wA = boundary(gA, A)
    wB = boundary(gB, B)
    formula = frozenset((x, b) for x in wA.boundary for b in B) | \
        frozenset((a, y) for a in A for y in wB.boundary)
    if w.boundary != formula:
        raise AssertionError("product boundary identity failed; this falsifies the lemma")
    return w
