import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwasawa2 import tower
from iwasawa2.arith import SquareClass, is_prime, squarefree_part
from iwasawa2.quadfield import classify_triple, fundamental_unit, make_field
from iwasawa2.tower import HypothesisError


def triple(*primes):
    return classify_triple(*primes)


def test_c_invariant_165():
    c = tower.c_invariant(make_field(165))
    assert c.square_class == SquareClass(15)
    assert not tower.sqrt_unit_in_K1(c, 165)


def test_c_invariant_rejects_norm_minus_one():
    with pytest.raises(ValueError, match="no real square-root datum"):
        tower.c_invariant(make_field(2))


def test_c_invariant_1045_not_in_layer_one():
    c = tower.c_invariant(make_field(1045)).square_class.rep
    assert c not in (1, 2, 1045, 2090)


def _field_radicands(limit):
    return [d for d in range(2, limit) if squarefree_part(d).rep == d]


@given(st.sampled_from([d for d in _field_radicands(5000) if fundamental_unit(make_field(d)).norm == 1]))
@settings(max_examples=500, deadline=None)
def test_c_invariant_consistency(d):
    e = fundamental_unit(make_field(d))
    c = tower.c_invariant(make_field(d)).square_class
    assert c == squarefree_part(e.t + 2)
    assert c * squarefree_part(e.t - 2) == SquareClass(d)


@pytest.mark.parametrize(
    "c, d, expected",
    [(2, 1045, True), (2, 7, True), (15, 165, False), (1045, 1045, True), (2090, 1045, True), (5, 1045, False)],
)
def test_sqrt_unit_in_K1(c, d, expected):
    assert tower.sqrt_unit_in_K1(c, d) == expected


def test_sqrt_of_product_with_class_2d():
    c1, c2 = SquareClass(11), SquareClass(190)
    assert (c1 * c2).rep == 2090
    assert tower.sqrt_unit_in_K1(c1 * c2, 1045)


@pytest.mark.parametrize(
    "primes, Q, units",
    [((5, 11, 19), 1, "{e1, e2, e3}"), ((5, 11, 131), 2, "{sqrt(e1*e2), e2, e3}"), ((5, 7, 3), 1, "{e1, e2, e3}")],
)
def test_hasse_unit_index_examples(primes, Q, units):
    ui = tower.hasse_unit_index(triple(*primes))
    assert ui.Q == Q and ui.units == units


@given(st.sampled_from([1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 22, 30, 33, 65, 105, 110, 165, 209, 330, 1045]))
@settings(max_examples=100, deadline=None)
def test_unit_index_memberships_form_a_subgroup(c_rep):
    for d in (1045, 7205, 105, 385):
        for c2 in (1, 2, 5, 11, 19, 22, 38, 190, 2090):
            c1 = squarefree_part(c_rep)
            m1 = tower.sqrt_unit_in_K1(c1, d)
            m2 = tower.sqrt_unit_in_K1(c2, d)
            m12 = tower.sqrt_unit_in_K1(c1 * c2, d)
            # membership in {1, 2, d, 2d} is closed under products
            assert not (m1 and m2) or m12
            assert not (m1 and m12) or m2
            ui = tower.unit_index_from_c(c1, c2, d)
            assert ui.Q == 1 + sum((m1, m2, m12))


@pytest.mark.parametrize("primes, A1", [((5, 11, 19), 4), ((5, 11, 131), 8), ((13, 43, 179), 16), ((5, 7, 3), 2)])
def test_kuroda_A1_examples(primes, A1):
    assert tower.kuroda_A1(triple(*primes)) == A1


@pytest.mark.parametrize(
    "orders, expected",
    [((4, 4), (0, 0, 2)), ((2, 2), (0, 0, 1)), ((4, 8), "undetermined"), ((16, 16), (0, 0, 4))],
)
def test_fukuda_stabilize(orders, expected):
    assert tower.fukuda_stabilize(*orders, "cond1") == expected


def test_fukuda_rejects_unknown_pattern():
    with pytest.raises(ValueError):
        tower.fukuda_stabilize(2, 2, "cond3")


@pytest.mark.parametrize("primes", [(5, 3, 11), (5, 3, 19)])
def test_product_nonresidue_check(primes):
    v = tower.check_product_nonresidue(triple(*primes))
    assert v.holds and v.Xinf == "Z/2"
    assert v.details["A0"] == v.details["A1"] == 2


def test_product_nonresidue_check_rejects_hypothesis():
    with pytest.raises(HypothesisError):
        tower.check_product_nonresidue(triple(5, 11, 19))


@pytest.mark.parametrize(
    "primes, p1_principal, A0, A1",
    [((5, 11, 19), False, 4, 4), ((5, 11, 131), True, 4, 8), ((53, 11, 43), True, 16, 32)],
)
def test_p1_principality_check(primes, p1_principal, A0, A1):
    v = tower.check_p1_principality(triple(*primes))
    assert v.holds, v.failures
    assert v.details == {"p1_principal": p1_principal, "A0": A0, "A1": A1}


def test_p1_principality_check_rejects_hypothesis():
    with pytest.raises(HypothesisError):
        tower.check_p1_principality(triple(5, 3, 11))
    with pytest.raises(HypothesisError):
        tower.check_p1_principality(triple(5, 7, 3))


@pytest.mark.parametrize(
    "primes, applicable, m",
    [((5, 11, 19), True, 2), ((5, 11, 131), False, None), ((29, 59, 107), True, 3)],
)
def test_norm_obstruction_check(primes, applicable, m):
    v = tower.check_norm_obstruction(triple(*primes))
    assert v.holds and v.applicable == applicable
    assert not v.details["-4p1_solvable"]
    if applicable:
        assert v.Xinf == "Z/2^m, m≥2" and v.details["m"] == m
    else:
        assert v.details["4p1_solvable"]


@pytest.mark.parametrize("primes, d", [((5, 7, 3), 105), ((5, 7, 11), 385)])
def test_q1_nonresidue_check(primes, d):
    T = triple(*primes)
    assert T.d == d
    v = tower.check_q1_nonresidue(T)
    assert v.holds and v.Xinf == "Z/2"
    assert (v.details["A0"], v.details["A1"], v.details["Q"], v.details["AF"]) == (2, 2, 1, 4)


def test_q1_nonresidue_check_13_7_3():
    T = triple(13, 7, 3)
    if T.symbols["q1/p1"] == -1:
        assert tower.check_q1_nonresidue(T).holds
    else:
        with pytest.raises(HypothesisError):
            tower.check_q1_nonresidue(T)
    # 7 is not a square mod 13
    assert T.symbols["q1/p1"] == -1


def _cond2_triples(bound):
    primes = [p for p in range(3, bound) if is_prime(p)]
    for p1 in (p for p in primes if p % 8 == 5):
        for q1 in (p for p in primes if p % 8 == 7):
            for q2 in (p for p in primes if p % 8 == 3):
                yield triple(p1, q1, q2)


def test_concluding_cases():
    seen = {"Sec8-Case1": 0, "Case2-principal": 0, "Case2-nonprincipal": 0}
    for T in _cond2_triples(120):
        if T.symbols["q1/p1"] != 1:
            continue
        v = tower.check_q1_residue(T)
        assert v.holds, (T.primes, v.failures)
        if v.statement == "Sec8-Case1":
            seen["Sec8-Case1"] += 1
            assert v.details["Q"] == 2
        elif v.details["q1_principal"]:
            seen["Case2-principal"] += 1
            assert v.details["A1"] == 2 * v.details["A0"] >= 8
            assert v.Xinf == "Z/2^m, m≥3"
        else:
            seen["Case2-nonprincipal"] += 1
            assert v.details["A1"] == v.details["A0"]
    assert all(seen.values()), seen


def test_concluding_cases_rejects_hypothesis():
    with pytest.raises(HypothesisError):
        tower.check_q1_residue(triple(5, 7, 3))


@pytest.mark.parametrize(
    "primes, expected",
    [
        (
            (5, 11, 19),
            dict(A0=4, AF=4, Q=1, A1=4, stable=True, **{"lambda": 0}, mu=0, nu=2, Xinf="Z/2^m, m≥2", theorem="Thm1.3+Cor1.4"),
        ),
        ((5, 3, 11), dict(A0=2, AF=4, Q=1, A1=2, stable=True, Xinf="Z/2", theorem="Thm1.1")),
        ((5, 11, 131), dict(A0=4, AF=4, Q=2, A1=8, stable=False, Xinf="unknown beyond layer 1", theorem="Thm1.3")),
    ],
)
def test_build_tower_report_examples(primes, expected):
    rec = tower.build_tower_report(triple(*primes)).to_json()
    for k, v in expected.items():
        assert rec[k] == v, k
    assert rec["violations"] == []


def test_report_json_keys():
    rec = tower.build_tower_report(triple(5, 11, 131)).to_json()
    assert set(rec) == {
        "p1", "q1", "q2", "pattern", "symbols", "A0", "A0_factors", "AF", "AF_factors",
        "Q", "A1", "principal", "stable", "lambda", "mu", "nu", "Xinf", "theorem", "violations",
    }  # fmt: skip
    assert rec["principal"] == ["5"]


def test_report_accepts_plain_tuple_and_rejects_mismatch():
    assert tower.build_tower_report((5, 11, 19)).A1_order == 4
    with pytest.raises(HypothesisError):
        tower.build_tower_report((5, 13, 19))


def test_report_flags_inconsistent_data():
    real = tower.field_data

    def doctored(d):
        data = real(d)
        if d == 1045:
            # pretend 5 is principal: the order-two and principality checks must object
            return tower.FieldData.from_dict({**data.to_dict(), "principal": [5, 11]})
        return data

    r = tower.build_tower_report(triple(5, 11, 19), doctored)
    assert r.violations


def test_field_data_round_trip():
    data = tower.field_data(2090)
    assert tower.FieldData.from_dict(data.to_dict()) == data
    assert data.A_factors == (2, 2) and data.c is not None


def test_layer_field():
    assert tower.layer_field(1045, 0) == "Q(sqrt(1045))"
    assert tower.layer_field(1045, 2) == "Q(sqrt(1045), sqrt(2 + sqrt(2)))"


def _all_triples(bound):
    primes = [p for p in range(3, bound) if is_prime(p)]
    for p1 in primes:
        for q1 in primes:
            for q2 in primes:
                if len({p1, q1, q2}) == 3:
                    T = classify_triple(p1, q1, q2)
                    if T is not None:
                        yield T


def test_reports_are_internally_consistent_below_80():
    count = 0
    for T in _all_triples(80):
        r = tower.build_tower_report(T)
        count += 1
        assert r.violations == [], (T.primes, r.violations)
        assert 4 * r.A1_order == r.Q_K1 * r.A0_order * r.AF_order
        if r.stable:
            assert (r.lambda_, r.mu, r.nu) == (0, 0, r.A0_order.bit_length() - 1)
        if T.pattern == "cond1" and T.symbols["q1/p1"] == T.symbols["q2/p1"] == 1 and r.triple.p1 not in r.principal_primes:
            # p1 non-principal: no unit square root lies in K1
            assert r.Q_K1 == 1
    assert count > 100


def test_contract_aliases():
    names = {
        "theorem_1_1_check": tower.check_product_nonresidue,
        "theorem_1_3_check": tower.check_p1_principality,
        "corollary_1_4_check": tower.check_norm_obstruction,
        "theorem_1_5_check": tower.check_q1_nonresidue,
        "concluding_cases_check": tower.check_q1_residue,
    }
    for name, fn in names.items():
        assert getattr(tower, name) is fn
