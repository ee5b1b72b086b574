import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eisensup.arith import divisors, gcd
from eisensup.errors import DomainError
from eisensup.geometry import (GroupElement, IwasawaCoordinates, act, classify_zone, coset_matrix, cusps_of_level,
                               delta_rectangle_contains, height, iwasawa_compose, iwasawa_decompose,
                               level_coset_representatives, reduce_to_fundamental_domain, scaling_matrix,
                               small_translate_check, stabilizer_generator, zone_coordinates)

E2PI = math.exp(2 * math.pi)

coords = st.builds(IwasawaCoordinates, st.floats(-5, 5), st.floats(0.05, 20), st.floats(0, 2 * math.pi - 1e-9))


def pt(x, y, th=0.0):
    return iwasawa_compose(IwasawaCoordinates(x, y, th))


def gamma0_element(q, rng):
    """Random element of Gamma_0(q) as a product of generators."""
    gens = [GroupElement(1, 1, 0, 1), GroupElement(1, -1, 0, 1), GroupElement(1, 0, q, 1), GroupElement(1, 0, -q, 1)]
    g = GroupElement.identity()
    for _ in range(int(rng.integers(1, 6))):
        g = g @ gens[int(rng.integers(4))]
    return g


class TestGroupElement:
    def test_determinant_checked(self):
        with pytest.raises(DomainError):
            GroupElement(1, 1, 1, 1)

    def test_inverse(self):
        g = GroupElement(2, 3, 1, 2)
        assert (g @ g.inverse()).max_abs_diff(GroupElement.identity()) < 1e-15


class TestIwasawa:
    def test_examples(self):
        c = iwasawa_decompose(GroupElement.identity())
        assert (c.x, c.y, c.theta) == (0, 1, 0)
        c = iwasawa_decompose(GroupElement(1, 5, 0, 1))
        assert abs(c.x - 5) < 1e-15 and abs(c.y - 1) < 1e-15
        c = iwasawa_decompose(GroupElement(2, 0, 0, 0.5))
        assert abs(c.y - 4) < 1e-15 and abs(c.x) < 1e-15

    def test_compose_examples(self):
        assert iwasawa_compose(IwasawaCoordinates(0, 1, 0)).max_abs_diff(GroupElement.identity()) < 1e-15
        r = iwasawa_compose(IwasawaCoordinates(0, 1, math.pi / 2))
        assert r.max_abs_diff(GroupElement(0, -1, 1, 0)) < 1e-15

    def test_bad_y(self):
        with pytest.raises(DomainError):
            IwasawaCoordinates(0, -1, 0)

    @given(coords)
    def test_round_trip(self, c):
        g = iwasawa_compose(c)
        assert iwasawa_compose(iwasawa_decompose(g)).max_abs_diff(g) <= 1e-10 * max(1, c.y, 1 / c.y)

    @given(coords, st.integers(-3, 3), st.integers(-3, 3))
    def test_act_matches_matrix_product(self, c, b, cc):
        gam = GroupElement(1, b, cc, 1 + b * cc)
        x, y, th = act(gam, c.x, c.y, c.theta)
        ref = iwasawa_decompose(gam @ iwasawa_compose(c))
        assert abs(x - ref.x) < 1e-8 * (1 + abs(ref.x)) and abs(y / ref.y - 1) < 1e-9
        assert abs(math.remainder(th - ref.theta, 2 * math.pi)) < 1e-9


class TestCusps:
    def test_counts(self):
        assert [(c.divisor, c.width) for c in cusps_of_level(1)] == [(1, 1)]
        assert [c.divisor for c in cusps_of_level(6)] == [1, 2, 3, 6]
        assert len(cusps_of_level(30)) == 8

    def test_non_squarefree(self):
        with pytest.raises(DomainError):
            cusps_of_level(12)

    @pytest.mark.parametrize("q", [1, 2, 3, 6, 30])
    def test_width_product(self, q):
        cs = cusps_of_level(q)
        assert math.prod(c.width for c in cs) == q ** (len(cs) // 2) if len(cs) > 1 else True

    def test_scaling_identity_at_infinity(self):
        assert scaling_matrix(cusps_of_level(1)[0]).max_abs_diff(GroupElement.identity()) == 0

    @pytest.mark.parametrize("q", [2, 3, 6])
    def test_stabilizer_conjugation(self, q):
        for c in cusps_of_level(q):
            sig = scaling_matrix(c)
            m = sig.inverse() @ stabilizer_generator(c) @ sig
            t1 = GroupElement(1, 1, 0, 1)
            assert min(m.max_abs_diff(t1), m.max_abs_diff(GroupElement(-1, -1, 0, -1))) < 1e-12

    def test_width_factorization_q6(self):
        for c in cusps_of_level(6):
            w = c.width
            for C in range(c.divisor, 40, c.divisor):
                if gcd(C, w) != 1:
                    continue
                for D in range(-5, 6):
                    if gcd(C, D) != 1:
                        continue
                    gam = coset_matrix(c, C, D)
                    assert gam.c % 6 == 0 and gam.is_integral()
                    tau = GroupElement(math.sqrt(w), 0, 0, 1 / math.sqrt(w)) @ scaling_matrix(c).inverse() @ gam
                    assert tau.is_integral(1e-9)
                    assert abs(tau.c - C) < 1e-9 and abs(tau.d - D) < 1e-9


class TestReduction:
    def test_translation(self):
        gam, red = reduce_to_fundamental_domain(pt(5, 1))
        c = iwasawa_decompose(red)
        assert abs(c.x) < 1e-12 and abs(c.y - 1) < 1e-12

    def test_inversion(self):
        _, red = reduce_to_fundamental_domain(pt(0, 0.1))
        assert abs(iwasawa_decompose(red).y - 10) < 1e-10

    @given(coords)
    def test_lands_in_domain_and_idempotent(self, c):
        gam, red = reduce_to_fundamental_domain(iwasawa_compose(c))
        r = iwasawa_decompose(red)
        assert -0.5 - 1e-12 <= r.x <= 0.5 + 1e-12 and r.x ** 2 + r.y ** 2 >= 1 - 1e-9
        assert gam.is_integral()
        gam2, _ = reduce_to_fundamental_domain(red)
        assert min(gam2.max_abs_diff(GroupElement.identity()), gam2.max_abs_diff(GroupElement(-1, 0, 0, -1))) < 1e-9


class TestHeight:
    def test_examples(self):
        assert abs(height(pt(0, 2), 1).height - 2) < 1e-12
        assert abs(height(pt(0, 0.1), 1).height - 10) < 1e-9
        assert abs(height(pt(0, 1), 1).height - 1) < 1e-12

    @staticmethod
    def brute(g, q, cmax=12):
        c = iwasawa_decompose(g)
        z, y = c.z, c.y
        best = 0.0
        for cu in cusps_of_level(q):
            for C in range(0, cmax + 1):
                for D in range(-40, 41):
                    if gcd(C, D) != 1 or (C == 0 and not (cu.is_infinity and D == 1)):
                        continue
                    if C and (C % cu.divisor or gcd(C, cu.width) != 1):
                        continue
                    best = max(best, y / (cu.width * abs(C * z + D) ** 2))
        return best

    @pytest.mark.parametrize("q", [1, 2, 3, 6])
    def test_matches_brute_force(self, q):
        rng = np.random.default_rng(q)
        for _ in range(15):
            g = pt(rng.uniform(-1, 1), math.exp(rng.uniform(-1.5, 1.5)), rng.uniform(0, 6))
            assert abs(height(g, q).height / self.brute(g, q) - 1) < 1e-9

    @pytest.mark.parametrize("q", [1, 2, 3, 6])
    def test_witness_consistent_and_invariant(self, q):
        rng = np.random.default_rng(10 + q)
        for _ in range(15):
            g = pt(rng.uniform(-2, 2), math.exp(rng.uniform(-2, 2)), rng.uniform(0, 6))
            hr = height(g, q)
            assert abs(zone_coordinates(g, hr).y / hr.height - 1) < 1e-9
            gam = gamma0_element(q, rng)
            assert abs(height(gam @ g, q).height / hr.height - 1) < 1e-9

    def test_level_one_floor_and_reduced_y(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            g = pt(rng.uniform(-3, 3), math.exp(rng.uniform(-3, 3)))
            h = height(g, 1).height
            assert h >= math.sqrt(3) / 2 - 1e-12
            y_red = iwasawa_decompose(reduce_to_fundamental_domain(g)[1]).y
            if y_red >= 1:
                assert abs(h - y_red) < 1e-9 * h

    def test_height_vs_y(self):
        rng = np.random.default_rng(8)
        for q in (1, 2, 3, 6):
            for _ in range(20):
                x = rng.uniform(-0.5, 0.5)
                y = math.sqrt(1 - x * x) * math.exp(rng.uniform(0, 3))
                assert height(pt(x, y), q).height <= 2 * (y + 1 / y)


class TestZones:
    def test_examples(self):
        assert classify_zone(pt(0, 2 * E2PI), 1, E2PI).kind == "cuspidal"
        assert classify_zone(pt(0, 1), 1, E2PI).kind == "interior"
        g = pt(0.2, 3 * E2PI)
        r = pt(0.005, 1.004, 0.008)
        a, b = classify_zone(g, 1, E2PI), classify_zone(g @ r, 1, E2PI)
        assert a.kind == b.kind == "cuspidal" and a.cusp == b.cusp

    def test_delta_rectangle(self):
        assert delta_rectangle_contains(GroupElement.identity(), 1e-6)
        assert not delta_rectangle_contains(pt(0.2, 1), 0.1)
        assert delta_rectangle_contains(pt(0.05, 1.05, -0.05), 0.05 + 1e-12)

    def test_small_translates(self):
        rng = np.random.default_rng(9)
        assert small_translate_check(GroupElement.identity(), 1, [pt(0, 3), pt(0.3, 0.5)]).all_pass
        assert not small_translate_check(pt(0, 4), 1, [pt(0, 10)]).all_pass
        for q in (1, 2, 3):
            sample = [pt(rng.uniform(-1, 1), math.exp(rng.uniform(-2, 3)), rng.uniform(0, 6)) for _ in range(200)]
            gp = pt(rng.uniform(-0.01, 0.01), 1 + rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01))
            assert small_translate_check(gp, q, sample).all_pass


@pytest.mark.parametrize("q,index", [(1, 1), (2, 3), (3, 4), (6, 12), (5, 6)])
def test_coset_representatives(q, index):
    reps = level_coset_representatives(q)
    assert len(reps) == index
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            m = a @ b.inverse()
            assert round(m.c) % q != 0


def test_divisors_helper():
    assert divisors(30) == [1, 2, 3, 5, 6, 10, 15, 30]
