"""Rule tables, the expression front end, periodic application, and the
additive-structure classifier.

Window indexing convention checked throughout: x1 is the most
significant mixed-radix digit of the table index, and the output cell
anchors at radius d // 2 cells of lookback.
"""

import pytest
from hypothesis import given, strategies as st

from ca_verify.caps import CapExceeded, Caps, DEFAULT_CAPS
from ca_verify.rule import (
    CyclicWord,
    RuleParseError,
    RuleTable,
    classify,
    essential_positions,
    extract_monomial_at,
    interior_table,
    is_permutive_at,
    lr_separated_rule,
    monomial_rule,
    parse_rule,
    parse_table_text,
    permutivity_witness,
    rule_from_code,
    sum_rule,
    table_file_text,
)

@st.composite
def small_rules(draw):
    m = draw(st.sampled_from((2, 3)))
    d = draw(st.integers(min_value=0, max_value=2))
    size = m ** (d + 1)
    code = draw(st.integers(min_value=0, max_value=m**size - 1))
    return rule_from_code(m, d, code)


def su(src):
    rule, _ = parse_rule(src)
    return rule


# --- table basics -------------------------------------------------------------


def test_table_make_validates():
    with pytest.raises(ValueError):
        RuleTable.make(3, 1, (0, 1, 2))  # 9 entries needed
    with pytest.raises(ValueError):
        RuleTable.make(3, 0, (0, 3, 1))  # out of range
    with pytest.raises(CapExceeded):
        tight = Caps(
            table_entries=8,
            subset_states=DEFAULT_CAPS.subset_states,
            pair_vertices=DEFAULT_CAPS.pair_vertices,
            poly_search=DEFAULT_CAPS.poly_search,
            family_rules=DEFAULT_CAPS.family_rules,
        )
        RuleTable.make(3, 1, [0] * 9, tight)


def test_evaluate_index_convention():
    # f(x1, x2) = x1 stored with x1 most significant
    rule = monomial_rule(3, 1, 1, 1, 1)
    assert rule.table == (0, 0, 0, 1, 1, 1, 2, 2, 2)
    assert rule.evaluate((2, 0)) == 2
    assert rule.evaluate((0, 2)) == 0


def test_radius_anchor():
    assert monomial_rule(3, 0, 1, 1, 1).radius == 0
    assert monomial_rule(3, 1, 1, 1, 1).radius == 0
    assert monomial_rule(3, 2, 1, 1, 1).radius == 1
    assert monomial_rule(3, 3, 1, 1, 1).radius == 1


def test_f_star_shrinks_by_diameter():
    rule = su("m=4; d=2; f=x1^2+x2+x3^2")
    assert rule.f_star((1, 0, 1, 0)) == (2, 1)
    assert rule.f_star((1, 0)) == ()


def test_rule_from_code_least_significant_first():
    rule = rule_from_code(3, 0, 5)  # 5 = 2 + 1*3 -> entries (2, 1, 0)
    assert rule.table == (2, 1, 0)
    with pytest.raises(ValueError):
        rule_from_code(3, 0, 27)


# --- cyclic words -------------------------------------------------------------


def test_cyclic_word_equalities():
    a = CyclicWord.make(7, (6, 2))
    b = CyclicWord.make(7, (2, 6))
    assert a.rotation_equal(b)
    assert not a.config_equal(b)
    assert a.config_equal(CyclicWord.make(7, (6, 2, 6, 2)))


def test_apply_periodic_known_images():
    rule_b = su("m=7; d=2; f=x1^4+3*x2")
    assert rule_b.apply_periodic(CyclicWord.make(7, (5, 6))).cells == (2, 6)
    assert rule_b.apply_periodic(CyclicWord.make(7, (4, 3))).cells == (2, 6)

    rule_c = su("m=5; d=2; f=x1^3+2*x2+x3^2")
    assert rule_c.apply_periodic(CyclicWord.make(5, (1, 0))).cells == (2, 2)
    assert rule_c.apply_periodic(CyclicWord.make(5, (3,))).cells == (2,)
    assert rule_c.apply_periodic(CyclicWord.make(5, (3, 0))).cells == (1, 1)
    assert rule_c.apply_periodic(CyclicWord.make(5, (4, 1))).cells == (0, 2)


@given(small_rules(), st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=6))
def test_apply_periodic_consistent_with_f_star(rule, cells):
    """Unrolling a periodic word far enough and sliding f over it must
    reproduce the periodic image, window for window.
    """
    word = CyclicWord.make(rule.m, [c % rule.m for c in cells])
    image = rule.apply_periodic(word)
    n = len(word.cells)
    reps = 4 + (rule.d // n + 2)
    unrolled = word.cells * reps
    flat = rule.f_star(unrolled)
    rho = rule.radius
    start = 2 * n  # deep inside, away from the cut
    for i in range(n):
        assert image.cells[(start + i + rho) % n] == flat[start + i]


# --- expression front end -----------------------------------------------------


def test_parse_rule_grammar():
    rule, expr = parse_rule("m=5; d=2; f=x1^3+2*x2+x3^2")
    assert (rule.m, rule.d) == (5, 2)
    assert expr.source == "m=5; d=2; f=x1^3+2*x2+x3^2"
    assert expr.raw_exponents() == {1: (1, 3), 2: (2, 1), 3: (1, 2)}


def test_parse_rule_constant_and_spacing():
    rule, _ = parse_rule("m=3; d=1;  f = 2*x1 + x2 + 1")
    assert rule.evaluate((0, 0)) == 1
    assert rule.evaluate((1, 1)) == 1  # 2 + 1 + 1 = 4 = 1 mod 3


def test_parse_rule_errors_carry_positions():
    for src in (
        "m=3; d=1; f=x1^",
        "m=3; f=x1",
        "m=3; d=1; f=x9",
        "m=1; d=1; f=x1",
        "m=3; d=1; f=x1**2",
    ):
        with pytest.raises(RuleParseError) as info:
            parse_rule(src)
        assert info.value.position >= 0


def test_raw_exponents_skips_repeated_variables():
    """A variable occurring twice is not a clean monomial occurrence, so
    it contributes no raw reading; the classifier's canonical view still
    sees the combined function.
    """
    _, expr = parse_rule("m=5; d=1; f=x1^2+x1+x2")
    assert 1 not in expr.raw_exponents()
    assert expr.raw_exponents()[2] == (1, 1)


def test_table_file_round_trip():
    rule = su("m=4; d=1; f=x1^3+x2^3")
    text = table_file_text(rule)
    parsed = parse_table_text(text)
    assert parsed == rule
    bad = "3 1\n0 1 2\n"
    with pytest.raises(RuleParseError):
        parse_table_text(bad)


# --- permutivity and essential positions ----------------------------------------


def test_permutive_positions_quadratic_example():
    rule = su("m=4; d=2; f=x1^2+x2+x3^2")
    assert not is_permutive_at(rule, 1)
    assert is_permutive_at(rule, 2)
    assert not is_permutive_at(rule, 3)
    w = permutivity_witness(rule, 1)
    assert w is not None
    assert w["colliding_values"][0] != w["colliding_values"][1]


def test_essential_positions_detects_dummies():
    rule = su("m=7; d=2; f=x1^4+3*x2")
    assert essential_positions(rule) == (1, 2)
    rule0 = su("m=3; d=2; f=1")
    assert essential_positions(rule0) == ()


@given(small_rules())
def test_permutive_positions_are_essential(rule):
    for j in range(1, rule.nvars + 1):
        if is_permutive_at(rule, j):
            assert j in essential_positions(rule)


# --- classification -------------------------------------------------------------


def test_classify_quadratic_example():
    cls = classify(su("m=4; d=2; f=x1^2+x2+x3^2"))
    assert cls.essential == (1, 2, 3)
    assert (cls.ell, cls.r) == (1, 3)
    assert cls.lr_separated and cls.totally_separated and not cls.shift_like
    comp = cls.component_at(2)
    assert (comp.a, comp.q) == (1, 1)


def test_classify_shift_like():
    cls = classify(monomial_rule(5, 2, 2, 3, 2))
    assert cls.shift_like
    assert cls.essential == (2,)
    assert (cls.ell, cls.r) == (2, 2)


def test_classify_constant_rules():
    zero = classify(su("m=3; d=1; f=0"))
    assert zero.essential == ()
    assert zero.totally_separated and not zero.lr_separated
    constant = classify(su("m=3; d=1; f=2"))
    assert not constant.totally_separated


def test_classify_nonseparated_middle():
    # g = (0, 1, 0) is no monomial table over Z_3 (those are (0,1,2),
    # (0,1,1), (0,2,1), (0,2,2) up to the absorbed constant), so the
    # middle position stays unseparated.
    rule = lr_separated_rule(3, 2, 1, 3, 1, 1, 1, 1, [0, 1, 0])
    cls = classify(rule)
    assert cls.lr_separated
    assert not cls.totally_separated
    assert cls.component_at(2) is None
    assert 2 in cls.essential


def test_extract_monomial_with_constant_absorption():
    """Monomial summands are detected up to the additive constant, which
    stays in the residual rather than in the component.
    """
    rule = sum_rule(5, 1, {1: (2, 3), 2: (1, 1)}, constant=4)
    comp = extract_monomial_at(rule, 1)
    assert comp is not None and (comp.a, comp.q) == (2, 3)


def test_interior_table_pins_ends():
    rule = lr_separated_rule(3, 2, 1, 3, 1, 1, 1, 2, [0, 1, 2])
    assert interior_table(rule, 1, 3) == (0, 1, 2)
    rule_c = lr_separated_rule(3, 2, 1, 3, 1, 1, 1, 2, [2, 0, 1])
    assert interior_table(rule_c, 1, 3) == (2, 0, 1)


@given(
    st.sampled_from((3, 4, 5)),
    st.integers(min_value=1, max_value=2),
    st.data(),
)
def test_classify_reconstructs_separated_rules(m, d, data):
    """Building a rule from monomial components and classifying it gets
    the same components back, exponents taken canonically.
    """
    from ca_verify.zmod import canonical_exponent, units

    positions = data.draw(
        st.lists(
            st.integers(min_value=1, max_value=d + 1),
            min_size=1,
            max_size=d + 1,
            unique=True,
        )
    )
    components = {}
    for j in positions:
        a = data.draw(st.sampled_from(units(m)))
        q = data.draw(st.integers(min_value=1, max_value=6))
        components[j] = (a, q)
    rule = sum_rule(m, d, components)
    cls = classify(rule)
    assert cls.totally_separated
    assert cls.essential == tuple(sorted(components))
    for j in cls.essential:
        a, q = components[j]
        comp = cls.component_at(j)
        assert comp.a == a % m
        assert comp.q == canonical_exponent(a, q, m)
