import random

import pytest

from halolab.errors import BudgetError, ContractViolation
from halolab.gf import GF
from halolab.groups import CyclicGroup, ZdGroup, ball
from halolab.halo import (act, commutativity_constant, enumerate_block,
                          lamp_growth, make_halo)

Z = ZdGroup(1, False)
ZLEX = ZdGroup(1, True)
Z2LEX = ZdGroup(2, True)


def _families():
    return [
        make_halo("wreath", CyclicGroup(2), Z),
        make_halo("shuffler", None, Z),
        make_halo("juggler", 2, Z),
        make_halo("designer", CyclicGroup(2), Z),
        make_halo("cloner", GF(2), Z),
        make_halo("upcloner", GF(2), ZLEX),
    ]


GROWTH_TABLE = {
    "shuffler": [1, 1, 2, 6, 24],
    "wreath": [1, 2, 4, 8, 16],
    "designer": [1, 2, 8, 48],
    "juggler": [1, 2, 24, 720],
    "cloner": [1, 1, 6, 168],
    "upcloner": [1, 1, 2, 8, 64],
}


def test_lamp_growth_closed_forms():
    params = {"wreath": 2, "shuffler": None, "juggler": 2, "designer": 2,
              "cloner": GF(2), "upcloner": GF(2)}
    for family, values in GROWTH_TABLE.items():
        for n, expected in enumerate(values):
            assert lamp_growth(family, params[family], n) == expected


def test_enumerate_block_matches_growth():
    for halo in _families():
        values = GROWTH_TABLE[halo.family]
        for n in range(1, len(values)):
            sites = [(i,) for i in range(n)]
            block = enumerate_block(halo, sites)
            assert len(block) == values[n], (halo.family, n)
            assert len(set(block)) == len(block)


def test_block_is_closed_under_composition_and_inverse():
    for halo in _families():
        sites = [(0,), (1,)]
        block = set(enumerate_block(halo, sites))
        sample = sorted(block, key=repr)[:8]
        for a in sample:
            assert halo.lamp_invert(a) in block
            for b in sample:
                assert halo.lamp_compose(a, b) in block


def test_block_monotone_and_intersection_compatible():
    for halo in _families():
        small = set(enumerate_block(halo, [(0,), (1,)]))
        big = set(enumerate_block(halo, [(0,), (1,), (2,)]))
        assert small <= big
        other = set(enumerate_block(halo, [(1,), (2,)]))
        meet = set(enumerate_block(halo, [(1,)]))
        assert small & other == meet


def test_group_laws_on_random_elements():
    rng = random.Random(5)
    for halo in _families():
        elems = sorted(ball(halo, 2).elements, key=repr)
        sample = rng.sample(elems, min(8, len(elems)))
        e = halo.identity()
        for a in sample:
            assert halo.multiply(a, e) == a
            assert halo.multiply(e, a) == a
            assert halo.multiply(a, halo.invert(a)) == e
            for b in sample:
                for c in sample[:3]:
                    assert halo.multiply(halo.multiply(a, b), c) == \
                        halo.multiply(a, halo.multiply(b, c))


def test_act_is_an_automorphism():
    for halo in _families():
        block = sorted(enumerate_block(halo, [(0,), (1,)]), key=repr)[:6]
        for h in [(1,), (-2,)]:
            for a in block:
                assert act(halo, h, halo.lamp_invert(a)) == \
                    halo.lamp_invert(act(halo, h, a))
                for b in block:
                    assert act(halo, h, halo.lamp_compose(a, b)) == \
                        halo.lamp_compose(act(halo, h, a), act(halo, h, b))


def test_act_translates_sites():
    for halo in _families():
        block = sorted(enumerate_block(halo, [(0,), (1,)]), key=repr)
        for a in block[:6]:
            moved = act(halo, (3,), a)
            assert halo.lamp_sites(moved) == \
                frozenset(halo.base.multiply((3,), x) for x in halo.lamp_sites(a))


def test_enumeration_budget():
    sh = make_halo("shuffler", None, Z)
    with pytest.raises(BudgetError):
        enumerate_block(sh, [(i,) for i in range(8)], budget=1000)


def test_commutativity_constants():
    wr = make_halo("wreath", CyclicGroup(2), Z)
    D, witness = commutativity_constant(wr, 3, 10 ** 5)
    assert D == 0 and witness is None
    for halo in (make_halo("shuffler", None, Z), make_halo("cloner", GF(2), Z)):
        D, witness = commutativity_constant(halo, 3, 10 ** 5)
        assert D == 1
        a, b = witness
        assert halo.multiply(a, b) != halo.multiply(b, a)


def test_upcloner_requires_ordered_base():
    with pytest.raises(ContractViolation):
        make_halo("upcloner", GF(2), ZdGroup(2, False))


def test_cloner_rejects_singular_lamp():
    cl = make_halo("cloner", GF(2), Z)
    # [[1,1],[1,1]] has zero determinant over GF(2)
    with pytest.raises(ContractViolation):
        cl.make_lamp({((0,), (1,)): 1, ((1,), (0,)): 1})
    # the transposition-like matrix [[0,1],[1,0]] IS invertible
    lamp = cl.make_lamp({((0,), (0,)): 0, ((0,), (1,)): 1,
                         ((1,), (0,)): 1, ((1,), (1,)): 0})
    assert cl.lamp_compose(lamp, lamp) == cl.lamp_identity()


def test_gluing_holds_for_five_families():
    """L({a, b}) is contained in the group generated by L({a, c}) and
    L({c, b}) when c is a midpoint — for every family except the upcloner."""
    for halo in _families():
        if halo.family == "upcloner":
            continue
        a, c, b = (0,), (1,), (2,)
        target = set(enumerate_block(halo, [a, b]))
        gens = set(enumerate_block(halo, [a, c])) | set(enumerate_block(halo, [c, b]))
        closure = set(gens)
        frontier = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = halo.lamp_compose(x, g)
                    if y not in closure:
                        closure.add(y)
                        nxt.append(y)
            frontier = nxt
        assert target <= closure, halo.family


def test_gluing_fails_for_upcloner_over_z2():
    """Over Z^2-lex the two generable transvections on a 3-site triangle
    span only 4 of the 8 block elements: the pair with displacement
    outside N^2 is unreachable."""
    up = make_halo("upcloner", GF(2), Z2LEX)
    a, b, c = (0, 0), (0, 1), (1, 0)
    block = enumerate_block(up, [a, b, c])
    assert len(block) == 8
    gens = {up.make_lamp({(a, b): 1}), up.make_lamp({(a, c): 1})}
    closure = set(gens) | {up.lamp_identity()}
    frontier = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = up.lamp_compose(x, g)
                if y not in closure:
                    closure.add(y)
                    nxt.append(y)
        frontier = nxt
    assert len(closure) == 4
    assert up.make_lamp({(b, c): 1}) not in closure
    assert len(closure) < len(block)


def test_generator_counts_over_gf2_and_z():
    cl = make_halo("cloner", GF(2), Z)
    # GF(2): no diagonal generators, transvections for s = +-1, 2 base moves
    assert len(cl.generators()) == 4
    up = make_halo("upcloner", GF(2), ZLEX)
    # positive direction only for the transvection, 2 base moves
    assert len(up.generators()) == 3


def test_halo_ball_word_metric_symmetric():
    sh = make_halo("shuffler", None, Z)
    b = ball(sh, 3)
    for g in sorted(b.elements, key=repr)[:40]:
        inv = sh.invert(g)
        assert inv in b and b.lengths[inv] == b.lengths[g]
