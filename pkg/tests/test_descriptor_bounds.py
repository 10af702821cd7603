import math

import pytest

from halolab.bounds import (bound_report, identity_bound, iterated_log,
                            log_over_loglog, phi, phi_inverse, power)
from halolab.descriptor import parse_descriptor
from halolab.errors import NotInDomainError, ParseError
from halolab.groups import ZdGroup
from halolab.isoperimetry import profile_exact

CORPUS = [
    "Z", "Z:lex", "Z^2", "Z^2:lex", "Z^3", "C2", "C12", "H3",
    "Z x C3", "Z x Z", "C2 x C3 x C5", "H3 x Z",
    "shuffler(Z)", "shuffler(Z^2)", "shuffler(H3)", "shuffler(Z x C3)",
    "shuffler(shuffler(Z))", "shuffler(shuffler(shuffler(Z)))",
    "wreath(C2, Z)", "wreath(C3, Z^2)", "wreath(C2, wreath(C2, Z))",
    "wreath(C2 x C3, Z)", "wreath(C2, H3)", "wreath(C5, C7)",
    "juggler(2, Z)", "juggler(3, Z^2)", "juggler(2, shuffler(Z))",
    "juggler(4, H3)", "juggler(2, Z x C3)",
    "designer(C2, Z)", "designer(C3, Z^2)", "designer(C2, H3)",
    "designer(C2 x C2, Z)", "designer(C4, wreath(C2, Z))",
    "cloner(GF2, Z)", "cloner(GF3, Z)", "cloner(GF4, Z^2)",
    "cloner(GF5, H3)", "cloner(GF2, shuffler(Z))", "cloner(GF3, Z x Z)",
    "upcloner(GF2, Z:lex)", "upcloner(GF3, Z:lex)",
    "upcloner(GF2, Z^2:lex)", "upcloner(GF4, Z^2:lex)",
    "upcloner(GF5, Z^3:lex)", "upcloner(GF2, Z^4:lex)",
    "wreath(C2, cloner(GF3, Z))", "shuffler(wreath(C2, Z))",
    "designer(C2, juggler(2, Z))", "juggler(2, wreath(C2, Z))",
]


def test_parser_round_trip_corpus():
    assert len(CORPUS) == 50
    for text in CORPUS:
        d = parse_descriptor(text)
        assert d.canonical() == text
        assert parse_descriptor(d.canonical()) == d


def test_parser_builds_groups():
    for text in CORPUS[:20]:
        parse_descriptor(text).build()


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError) as exc:
        parse_descriptor("upcloner(GF2, Z^2)")
    assert "order required: use Z^2:lex" in str(exc.value)
    assert exc.value.position == 14

    with pytest.raises(ParseError) as exc:
        parse_descriptor("wreath(C2)")
    assert exc.value.position == 9

    with pytest.raises(ParseError):
        parse_descriptor("cloner(GF7, Z)")
    with pytest.raises(ParseError):
        parse_descriptor("Z^")
    with pytest.raises(ParseError):
        parse_descriptor("wreath(C2, Z) trailing")


def test_phi_inverse_examples():
    assert abs(phi_inverse("shuffler", None, 18.0) - 3.0) < 1e-6
    assert abs(phi_inverse("wreath", 2, 2.0) - 1.0) < 1e-6
    with pytest.raises(NotInDomainError):
        phi_inverse("wreath", 2, 1.0)


def test_phi_round_trip_grid():
    cases = [("wreath", 2), ("shuffler", None), ("juggler", 2),
             ("designer", 2), ("cloner", 2), ("cloner", 3), ("upcloner", 2)]
    for family, params in cases:
        for x in (3.0, 10.0, 1e3, 1e6, 1e9):
            if x < phi(family, params, 1.0):
                continue
            t = phi_inverse(family, params, x)
            assert abs(phi(family, params, t) - x) / x < 1e-6


def test_phi_monotone():
    for family, params in (("shuffler", None), ("cloner", 2)):
        vals = [phi(family, params, t) for t in [1, 1.5, 2, 2.5, 3, 4, 5.5]]
        assert vals == sorted(vals)
        assert len(set(vals)) == len(vals)


def test_iterated_log_domain_guard():
    lnln = iterated_log(2)
    with pytest.raises(NotInDomainError):
        lnln(math.e)  # ln(ln(e)) = 0; below the guarded floor e * margin
    assert abs(lnln(100.0) - math.log(math.log(100.0))) < 1e-12
    lnlnln = iterated_log(3)
    with pytest.raises(NotInDomainError):
        lnlnln(15.0)  # e^e ~ 15.15


def test_log_over_loglog():
    b = log_over_loglog()
    x = 1e6
    assert abs(b(x) - math.log(x) / math.log(math.log(x))) < 1e-12


def test_bound_report_fits_z_profile():
    pts = profile_exact(ZdGroup(1, False), 8, 9)
    rows = bound_report(pts, [identity_bound()])
    assert len(rows) == 1
    assert abs(rows[0].c - 0.5) < 1e-12
    assert rows[0].rms_residual < 1e-12
    assert rows[0].note == "finite-range indication, not a proof"
    assert bound_report(pts, []) == []


def test_bound_report_with_dilations():
    pts = profile_exact(ZdGroup(1, False), 6, 7)
    rows = bound_report(pts, [identity_bound(), power(0.5)], dilations=(1, 2, 4))
    assert len(rows) == 6
    # c * (K n) fit for the linear bound: c = 0.5 / K
    fits = {(r.bound, r.dilation): r.c for r in rows}
    assert abs(fits[("x", 2)] - 0.25) < 1e-12
