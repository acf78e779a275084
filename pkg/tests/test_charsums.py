import math

import numpy as np
import pytest

from fourier_cs.charsums import (certify_bound, certify_quadratic, character_sums, katz_sum,
                                 tolerance, twiddles)
from fourier_cs.field import FieldError, find_primitive_root, make_field
from fourier_cs.indexsets import IndexSet, build_full, build_quotient
from oracles import char_sum


@pytest.fixture(scope="module")
def q29():
    F = make_field(29, 1, 2, "2,0,1")
    g = F.element("1,28")
    return F, g, build_full(F, g)


def test_twiddles_exact_quarters():
    tw = twiddles(8)
    assert abs(tw[2] - 1j) < 1e-15 and abs(tw[4] + 1) < 1e-15


def test_quadratic_cases(q29):
    F, g, ix = q29
    r = katz_sum(28, ix)
    assert r.quadratic_case == "exact_minus_one" and abs(r.value + 1) < tolerance(29)
    r = katz_sum(5, ix)
    assert r.quadratic_case == "exact_sqrt_q"
    assert abs(r.modulus_of_value - math.sqrt(29)) < tolerance(29)
    assert r.passed


def test_matches_direct_exponentials(q29):
    F, g, ix = q29
    for a in (1, 2, 28, 100, 419, 420, 839):
        assert abs(katz_sum(a, ix).value - char_sum(ix.indices, a, 840)) < 1e-10


def test_cubic_has_no_quadratic_flag():
    F = make_field(7, 1, 3)
    ix = build_full(F, find_primitive_root(F))
    assert katz_sum(3, ix).quadratic_case is None


@pytest.mark.parametrize("a", [0, 840, -1])
def test_trivial_character_rejected(q29, a):
    with pytest.raises(ValueError):
        katz_sum(a, q29[2])


def test_vectorised_agrees_with_scalar(q29):
    F, g, ix = q29
    a = np.arange(1, 840)
    vals = character_sums(ix.indices, 840, a)
    assert np.allclose(vals, [katz_sum(int(k), ix).value for k in a], atol=1e-10)


def test_conjugate_symmetry(q29):
    F, g, ix = q29
    a = np.arange(1, 840)
    vals = character_sums(ix.indices, 840, a)
    assert np.allclose(vals, np.conj(vals[::-1]), atol=tolerance(29))


def test_sum_over_all_characters_vanishes(q29):
    F, g, ix = q29
    vals = character_sums(ix.indices, 840, np.arange(840))
    assert abs(vals.sum()) < 1e-8


def test_serialised_index_set_gives_same_sums(q29):
    F, g, ix = q29
    back = IndexSet.loads(ix.dumps())
    for a in (1, 28, 333):
        assert katz_sum(a, back).value == katz_sum(a, ix).value


@pytest.mark.parametrize("p, a", [(29, 1), (5, 1), (3, 2)])
def test_certify_quadratic(p, a):
    F = make_field(p, a, 2, "2,0,1" if p == 29 else None)
    g = F.element("1,28") if p == 29 else find_primitive_root(F)
    cert = certify_quadratic(F, g)
    assert cert.passed and cert.a_values.size == F.group_order - 1
    assert cert.max_deviation < tolerance(F.q)


def test_certify_quadratic_detects_corruption(q29):
    F, g, ix = q29
    broken = IndexSet(840, tuple(sorted(set(ix.indices[:-1]) | {ix.indices[-1] + 1})),
                      "full", F, g, ix.alpha)
    assert not certify_quadratic(F, g, ix=broken).passed


def test_certify_quadratic_needs_n2():
    F = make_field(7, 1, 3)
    with pytest.raises(FieldError):
        certify_quadratic(F, find_primitive_root(F))


@pytest.mark.parametrize("p, a, n, count", [(7, 1, 3, 341), (19, 1, 3, 6857), (5, 1, 4, 623)])
def test_certify_bound(p, a, n, count):
    F = make_field(p, a, n, "1,1,0,1" if p == 19 else None)
    g = F.element("0,2,1") if p == 19 else find_primitive_root(F)
    cert = certify_bound(F, g)
    assert cert.passed and cert.exhaustive and cert.a_values.size == count
    assert cert.bound == pytest.approx((n - 1) * math.sqrt(p))
    counts, _ = cert.histogram()
    assert counts.sum() == count


def test_certify_bound_samples_when_large():
    F = make_field(2, 1, 21)
    cert = certify_bound(F, find_primitive_root(F))
    assert not cert.exhaustive and cert.a_values.size == 10**4 and cert.passed


def test_csv(q29):
    F, g, _ = q29
    text = certify_quadratic(F, g).to_csv()
    lines = text.splitlines()
    assert lines[0] == "a,re,im,modulus,bound,pass"
    assert len(lines) == 840 and text.endswith("\n")
    a, re, im, mod, bound, ok = lines[28].split(",")
    assert a == "28" and float(bound) == 1.0 and ok == "1"
    assert abs(complex(float(re), float(im)) + 1) < 1e-9


def test_quotient_provenance_sums():
    F = make_field(19, 1, 3, "1,1,0,1")
    g = F.element("0,2,1")
    qx = build_quotient(F, g, b=1)
    assert katz_sum(7, qx).value == katz_sum(7, build_full(F, g)).value
