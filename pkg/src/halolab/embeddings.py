"""Subgroup embeddings between halo products: the finitary-wreath subgroup
of a shuffler over a finite-index subgroup, the injective non-surjective
shuffler endomorphism, and lamplighter subgroups of juggler, designer and
cloner products.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import ContractViolation, NotInDomainError, UnsupportedFamilyError
from .gf import GF
from .groups import CyclicGroup, GroupHandle, SymmetricGroup, ZdGroup, ball
from .halo import (ClonerHalo, DesignerHalo, HaloGroup, JugglerHalo,
                   ShufflerHalo, WreathHalo, make_halo)


@dataclass(frozen=True)
class CosetSystem:
    """A subgroup K of H with a transversal S: every h factors uniquely as
    k*s with k in K, s in S."""

    ambient: GroupHandle
    member: Callable[[Any], bool]           # k in K?
    transversal: Tuple                      # coset representatives S
    decompose: Callable[[Any], Tuple]       # h -> (k, s)
    k_to_base: Callable[[Any], Any]         # K -> codomain base group element
    base_to_k: Callable[[Any], Any]
    index: int                              # m = [H:K]
    K_group: GroupHandle = None             # abstract copy of K

    def check_factorization(self, radius: int = 4) -> bool:
        H = self.ambient
        sset = set(self.transversal)
        for h in ball(H, radius).elements:
            k, s = self.decompose(h)
            if not (self.member(k) and s in sset and H.multiply(k, s) == h):
                return False
        return True


def coset_system_mZ(m: int) -> CosetSystem:
    """mZ inside Z with transversal {0, ..., m-1}."""
    if m < 2:
        raise ContractViolation("index m must be >= 2")
    Z = ZdGroup(1, False)
    return CosetSystem(
        ambient=Z,
        member=lambda k: k[0] % m == 0,
        transversal=tuple((i,) for i in range(m)),
        decompose=lambda h: ((h[0] - h[0] % m,), (h[0] % m,)),
        k_to_base=lambda k: (k[0] // m,),
        base_to_k=lambda b: (b[0] * m,),
        index=m,
        K_group=ZdGroup(1, False),
    )


@dataclass
class GroupMorphism:
    """A homomorphism given by a closed-form mapping rule, with built-in
    verification on Cayley balls."""

    domain: GroupHandle
    codomain: GroupHandle
    map: Callable[[Any], Any]
    name: str = "morphism"
    member: Optional[Callable[[Any], bool]] = None  # restricts the domain
    not_surjective_witness: Any = None

    def _domain_ball(self, radius: int) -> List:
        elems = ball(self.domain, radius).elements
        if self.member is not None:
            elems = [g for g in elems if self.member(g)]
        return sorted(elems, key=self.domain.sort_key)

    def preserves_identity(self) -> bool:
        return self.map(self.domain.identity()) == self.codomain.identity()

    def homomorphism_counterexample(self, pairs: int = 1000, radius: int = 4,
                                    seed: int = 0):
        """None, or a pair (a, b) with phi(ab) != phi(a)phi(b)."""
        elems = self._domain_ball(radius)
        rng = random.Random(seed)
        for _ in range(pairs):
            a, b = rng.choice(elems), rng.choice(elems)
            ab = self.domain.multiply(a, b)
            if self.member is not None and not self.member(ab):
                continue
            if self.map(ab) != self.codomain.multiply(self.map(a), self.map(b)):
                return (a, b)
        return None

    def injective_on_ball(self, radius: int = 4) -> bool:
        seen = {}
        for g in self._domain_ball(radius):
            img = self.map(g)
            if img in seen and seen[img] != g:
                return False
            seen[img] = g
        return True

    def check(self, pairs: int = 1000, radius: int = 4, seed: int = 0) -> Dict[str, Tuple[bool, Any]]:
        cex = self.homomorphism_counterexample(pairs, radius, seed)
        out = {
            "identity": (self.preserves_identity(), None),
            "homomorphism": (cex is None, cex),
            "injective_on_ball": (self.injective_on_ball(radius), None),
        }
        if self.not_surjective_witness is not None:
            out["not_surjective"] = (True, self.not_surjective_witness)
        return out


# ---------------------------------------------------------------------------

def wreath_in_shuffler(H: GroupHandle, cosets: CosetSystem) -> GroupMorphism:
    """The coset-preserving subgroup G of Shuffler(H) maps isomorphically
    into Sym(m) wreath K: (sigma, h) with h in K and sigma stabilizing
    every coset k*S goes to (f_sigma, h) with f_sigma(k) = the permutation
    of S induced by s -> k^{-1} sigma(k s).
    """
    shuffler = make_halo("shuffler", None, H)
    m = cosets.index
    codomain = make_halo("wreath", SymmetricGroup(m), cosets.K_group)
    S = list(cosets.transversal)
    s_index = {s: i for i, s in enumerate(S)}

    def in_G(g) -> bool:
        sigma, h = g
        if not cosets.member(h):
            return False
        for x, y in sigma:
            kx, _ = cosets.decompose(x)
            ky, _ = cosets.decompose(y)
            if kx != ky:
                return False
        return True

    def phi(g):
        if not in_G(g):
            raise NotInDomainError(
                "element is not coset-preserving with cursor in K")
        sigma, h = g
        sd = dict(sigma)
        by_coset: Dict[Any, Dict[int, int]] = {}
        for x, y in sigma:
            k, s = cosets.decompose(x)
            _, s2 = cosets.decompose(y)
            by_coset.setdefault(k, {})[s_index[s]] = s_index[s2]
        del sd
        lamp_entries = {}
        sym_id = tuple(range(m))
        for k, moved in by_coset.items():
            img = tuple(moved.get(i, i) for i in range(m))
            if img != sym_id:
                lamp_entries[cosets.k_to_base(k)] = img
        lamp = tuple(sorted(lamp_entries.items(),
                            key=lambda kv: codomain.site_key(kv[0])))
        return (lamp, cosets.k_to_base(h))

    return GroupMorphism(shuffler, codomain, phi,
                         name=f"FSym({m}) wreath K inside {shuffler.spec}",
                         member=in_G)


@dataclass(frozen=True)
class BaseEndomorphism:
    """An injective endomorphism of a base group with decidable image."""

    group: GroupHandle
    map: Callable[[Any], Any]
    in_image: Callable[[Any], bool]
    preimage: Callable[[Any], Any]
    name: str = "psi"


def doubling(d: int, lex: bool = False) -> BaseEndomorphism:
    """Coordinate-wise doubling on Z^d: injective, image = even vectors."""
    return BaseEndomorphism(
        group=ZdGroup(d, lex),
        map=lambda v: tuple(2 * c for c in v),
        in_image=lambda v: all(c % 2 == 0 for c in v),
        preimage=lambda v: tuple(c // 2 for c in v),
        name="doubling",
    )


def shuffler_endomorphism(H: GroupHandle, psi: Optional[BaseEndomorphism] = None,
                          witness_radius: int = 4) -> GroupMorphism:
    """phi(sigma, g) = (sigma-bar, psi(g)) with sigma-bar = psi sigma psi^{-1}
    on the image of psi and the identity off it.  Injective, never surjective;
    a concrete element without preimage is searched for and attached.
    """
    if psi is None:
        if not isinstance(H, ZdGroup):
            raise ContractViolation("a psi endomorphism is required for this base")
        psi = doubling(H.d, H.lex)
    shuffler = make_halo("shuffler", None, H)

    # injectivity of psi on the working ball
    seen = {}
    for h in ball(H, witness_radius).elements:
        img = psi.map(h)
        if img in seen:
            raise ContractViolation("psi is not injective on the working ball")
        seen[img] = h

    def phi(g):
        sigma, h = g
        moved = {psi.map(x): psi.map(y) for x, y in sigma}
        bar = tuple(sorted(moved.items(), key=lambda xy: shuffler.site_key(xy[0])))
        return (bar, psi.map(h))

    # non-surjectivity witness: a transposition whose support leaves im(psi)
    witness = None
    for g in sorted(ball(shuffler, 2).elements, key=shuffler.sort_key):
        sigma, _h = g
        sites = [x for x, _ in sigma]
        if sites and any(not psi.in_image(x) for x in sites):
            witness = g
            break
    if witness is not None:
        # certify by exhaustive preimage search
        for g in ball(shuffler, witness_radius).elements:
            if phi(g) == witness:
                raise ContractViolation("claimed witness has a preimage")

    return GroupMorphism(shuffler, shuffler, phi,
                         name=f"conjugation-by-{psi.name} endomorphism",
                         not_surjective_witness=witness)


def lamplighter_in_halo(family: str, params, H: GroupHandle) -> GroupMorphism:
    """An injective homomorphism from a wreath product into the halo:
    juggler hosts Sym(tracks) wreath H via track permutations, designer
    hosts F wreath H via its wreath part, cloner over GF(q), q >= 3, hosts
    the unit-group wreath product via diagonal matrices."""
    if family == "juggler":
        r = int(params)
        if r < 2:
            raise ContractViolation("juggler embedding needs >= 2 tracks")
        codomain = make_halo("juggler", r, H)
        domain = make_halo("wreath", SymmetricGroup(r), H)

        def phi(g):
            lamp, h = g
            moved = {}
            for x, perm in lamp:
                for i, pi in enumerate(perm):
                    if pi != i:
                        moved[(x, i)] = (x, pi)
            from .halo import _perm_canonical
            return (_perm_canonical(moved, codomain.site_key), h)

        return GroupMorphism(domain, codomain, phi,
                             name=f"Sym({r}) wreath base inside {codomain.spec}")

    if family == "designer":
        fiber = params
        codomain = make_halo("designer", fiber, H)
        domain = make_halo("wreath", fiber, H)

        def phi(g):
            lamp, h = g
            return ((lamp, ()), h)

        return GroupMorphism(domain, codomain, phi,
                             name=f"{fiber.spec} wreath base inside {codomain.spec}")

    if family == "cloner":
        gf = params if isinstance(params, GF) else GF(params)
        if gf.q == 2:
            raise UnsupportedFamilyError(
                "cloner over GF(2) has a trivial unit group; the diagonal "
                "subgroup degenerates — use q >= 3")
        codomain = make_halo("cloner", gf, H)
        gen = _primitive_element(gf)
        order = gf.q - 1
        domain = make_halo("wreath", CyclicGroup(order), H)
        powers = [1]
        for _ in range(order - 1):
            powers.append(gf.mul(powers[-1], gen))

        def phi(g):
            lamp, h = g
            entries = {(x, x): powers[c] for x, c in lamp}
            return (codomain.make_lamp(entries), h)

        return GroupMorphism(domain, codomain, phi,
                             name=f"C{order} wreath base inside {codomain.spec}")

    raise UnsupportedFamilyError(
        f"no lamplighter embedding implemented for family {family!r}")


def _primitive_element(gf: GF):
    for u in gf.units:
        x, order = u, 1
        while x != 1:
            x = gf.mul(x, u)
            order += 1
        if order == gf.q - 1:
            return u
    raise ContractViolation("no primitive element found")  # unreachable
