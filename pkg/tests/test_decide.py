"""Exact deciders for surjectivity and injectivity, their finite
witnesses, and the constructive collision for rules permutive at two
separated end positions.

Soundness is tested in both directions: every negative verdict must
carry a witness that revalidates against the rule from scratch, and
positive verdicts must survive independent bounded brute force. The
exhaustive decider-vs-oracle equivalences over complete rule spaces live
in test_acceptance.
"""

import dataclasses
import itertools

import pytest
from hypothesis import assume, given, strategies as st

from ca_verify.caps import CapExceeded, Caps, DEFAULT_CAPS
from ca_verify.decide import (
    BipermutiveCollision,
    Diamond,
    PeriodicPair,
    UnbalancedWord,
    bipermutive_collision,
    count_preimages,
    decide_injective,
    decide_surjective,
)
from ca_verify.rule import (
    CyclicWord,
    classify,
    is_permutive_at,
    lr_separated_rule,
    monomial_rule,
    parse_rule,
    rule_from_code,
    sum_rule,
)
from ca_verify.zmod import units


def su(src):
    rule, _ = parse_rule(src)
    return rule


@st.composite
def small_rules(draw):
    m = draw(st.sampled_from((2, 3)))
    d = draw(st.integers(min_value=0, max_value=2))
    size = m ** (d + 1)
    code = draw(st.integers(min_value=0, max_value=m**size - 1))
    return rule_from_code(m, d, code)


@st.composite
def end_permutive_rules(draw):
    """Rules with a bijective monomial at an outermost window position,
    arbitrary monomial junk elsewhere.
    """
    m = draw(st.sampled_from((3, 4, 5)))
    d = draw(st.integers(min_value=1, max_value=2))
    end = draw(st.sampled_from((1, d + 1)))
    a = draw(st.sampled_from(units(m)))
    q = draw(st.sampled_from(tuple(
        e for e in range(1, 7)
        if sorted(pow(x, e, m) for x in range(m)) == list(range(m))
    )))
    components = {end: (a, q)}
    for j in range(1, d + 2):
        if j == end or not draw(st.booleans()):
            continue
        components[j] = (
            draw(st.integers(min_value=1, max_value=m - 1)),
            draw(st.integers(min_value=1, max_value=4)),
        )
    constant = draw(st.integers(min_value=0, max_value=m - 1))
    return sum_rule(m, d, components, constant=constant)


# --- preimage counting -----------------------------------------------------------


def test_count_preimages_brute_force_agreement():
    rule = su("m=3; d=1; f=x1^2+x2^2")
    for length in (1, 2, 3):
        for w in itertools.product(range(3), repeat=length):
            brute = sum(
                1
                for u in itertools.product(range(3), repeat=length + 1)
                if rule.f_star(u) == w
            )
            assert count_preimages(rule, w) == brute


def test_count_preimages_known_values():
    balanced = su("m=3; d=1; f=x1+x2")
    assert [count_preimages(balanced, (w,)) for w in range(3)] == [3, 3, 3]
    skew = su("m=3; d=1; f=x1^2+x2^2")
    assert [count_preimages(skew, (w,)) for w in range(3)] == [1, 4, 4]


# --- surjectivity ----------------------------------------------------------------


def test_surjective_known_verdicts():
    assert decide_surjective(su("m=3; d=1; f=x1+x2")).surjective
    assert decide_surjective(su("m=4; d=2; f=x1^2+x2+x3^2")).surjective
    assert decide_surjective(su("m=5; d=2; f=x1^3+2*x2+x3^2")).surjective
    assert decide_surjective(su("m=7; d=2; f=x1^4+3*x2")).surjective


def test_surjective_witness_even_exponents():
    res = decide_surjective(su("m=3; d=1; f=x1^2+x2^2"))
    assert not res.surjective
    assert res.witness == UnbalancedWord(word=(0,), count=1, expected=3)
    assert res.witness.validate(su("m=3; d=1; f=x1^2+x2^2"))


def test_surjective_d0_doubling():
    res = decide_surjective(su("m=4; d=0; f=2*x1"))
    assert not res.surjective
    assert res.witness == UnbalancedWord(word=(0,), count=2, expected=1)


def test_middle_permutivity_does_not_give_surjectivity():
    """Permutivity strictly inside the window carries no surjectivity
    guarantee: this rule is a bijection in its middle coordinate yet
    fails the balance condition at length two. The same expression over
    Z_4 is balanced, so the obstruction is arithmetic, not structural.
    """
    rule = su("m=3; d=2; f=x1^2+x2+x3^2")
    assert is_permutive_at(rule, 2)
    res = decide_surjective(rule)
    assert not res.surjective
    assert res.witness == UnbalancedWord(word=(0, 0), count=10, expected=9)
    assert res.witness.validate(rule)

    assert decide_surjective(su("m=4; d=2; f=x1^2+x2+x3^2")).surjective


@given(end_permutive_rules())
def test_end_permutivity_gives_surjectivity(rule):
    """A bijective dependence at either outermost window position forces
    every word to be reachable. Drawn rules whose subset walk would blow
    the tight budget are discarded, not failed.
    """
    assert is_permutive_at(rule, 1) or is_permutive_at(rule, rule.nvars)
    try:
        surjective = decide_surjective(rule, Caps(subset_states=1 << 14)).surjective
    except CapExceeded:
        assume(False)
    assert surjective


@given(small_rules())
def test_surjectivity_verdicts_are_sound(rule):
    res = decide_surjective(rule)
    if res.surjective:
        for length in (1, 2):
            for w in itertools.product(range(rule.m), repeat=length):
                assert count_preimages(rule, w) == rule.m**rule.d
    else:
        assert res.witness is not None
        assert res.witness.validate(rule)
        assert count_preimages(rule, res.witness.word) == res.witness.count
        assert res.witness.count != rule.m**rule.d


def test_unbalanced_word_validate_rejects_wrong_count():
    rule = su("m=3; d=1; f=x1^2+x2^2")
    assert not UnbalancedWord(word=(0,), count=2, expected=3).validate(rule)
    assert not UnbalancedWord(word=(0,), count=3, expected=3).validate(rule)


# --- injectivity -----------------------------------------------------------------


def test_injective_known_verdicts():
    assert decide_injective(su("m=3; d=0; f=2*x1")).injective
    assert decide_injective(su("m=5; d=1; f=x1^3")).injective
    assert not decide_injective(su("m=3; d=1; f=x1+x2")).injective


def test_injectivity_diamond_witness():
    rule = su("m=3; d=1; f=x1^2+x2^2")
    res = decide_injective(rule)
    assert not res.injective
    assert res.witness == Diamond(u=(0, 1, 0), v=(0, 2, 0))
    assert res.witness.validate(rule)


def test_injectivity_diamond_d0():
    res = decide_injective(su("m=4; d=0; f=2*x1"))
    assert not res.injective
    assert res.witness == Diamond(u=(0,), v=(2,))


def test_injectivity_periodic_pair_witness():
    rule = su("m=7; d=2; f=x1^4+3*x2")
    res = decide_injective(rule)
    assert not res.injective
    assert res.witness == PeriodicPair(
        x=CyclicWord(m=7, cells=(0, 0, 0)), y=CyclicWord(m=7, cells=(4, 1, 2))
    )
    assert res.witness.validate(rule)


def test_injectivity_periodic_pair_skew_shift():
    rule = su("m=3; d=2; f=x1+x3")
    res = decide_injective(rule)
    assert not res.injective
    assert res.witness.validate(rule)


def test_diamond_validate_rejects_mismatched_frames():
    rule = su("m=3; d=1; f=x1^2+x2^2")
    assert not Diamond(u=(0, 1, 0), v=(0, 1, 0)).validate(rule)  # equal words
    assert not Diamond(u=(0, 1, 0), v=(1, 2, 1)).validate(rule)  # frames differ
    assert not Diamond(u=(0, 1, 0), v=(0, 2, 2)).validate(rule)  # last letters differ


def test_periodic_pair_validate_rejects_equal_configs():
    rule = su("m=3; d=1; f=x1+x2")
    same = PeriodicPair(
        x=CyclicWord(m=3, cells=(0, 1)), y=CyclicWord(m=3, cells=(0, 1, 0, 1))
    )
    assert not same.validate(rule)


@given(small_rules())
def test_injectivity_verdicts_are_sound(rule):
    res = decide_injective(rule)
    if res.injective:
        # no short diamond: scan all pairs with shared length-d frames
        d, m = rule.d, rule.m
        for length in range(d + 1, d + 5):
            images = {}
            for u in itertools.product(range(m), repeat=length):
                key = (u[:d], u[-d:] if d else (), rule.f_star(u))
                if key in images and images[key] != u:
                    pytest.fail(f"diamond missed: {images[key]} / {u}")
                images[key] = u
        # no short periodic pair
        for period in (1, 2, 3):
            seen = {}
            for cells in itertools.product(range(m), repeat=period):
                img = rule.apply_periodic(CyclicWord.make(m, cells)).cells
                if img in seen:
                    pytest.fail(f"periodic pair missed: {seen[img]} / {cells}")
                seen[img] = cells
    else:
        assert res.witness is not None
        assert res.witness.validate(rule)


@given(small_rules())
def test_injective_implies_surjective(rule):
    if decide_injective(rule).injective:
        assert decide_surjective(rule).surjective


# --- constructive collisions -------------------------------------------------------


def test_bipermutive_collision_linear():
    rule = su("m=3; d=1; f=x1+x2+1")
    cls = classify(rule)
    col = bipermutive_collision(rule, cls, cls.r - cls.ell + rule.d + 2)
    assert col == BipermutiveCollision(
        u=(2, 1, 2, 1, 2, 1, 2, 1, 2), v=(0, 0, 0, 0, 0, 0, 0, 0, 0), image_letter=1
    )
    assert col.validate(rule)


def test_bipermutive_collision_with_interior():
    interior = [0, 1, 0]  # not a monomial, middle position unseparated
    rule = lr_separated_rule(3, 2, 1, 3, 1, 1, 2, 1, interior)
    cls = classify(rule)
    assert is_permutive_at(rule, 1) and is_permutive_at(rule, 3)
    col = bipermutive_collision(rule, cls, cls.r - cls.ell + rule.d + 2)
    assert col.validate(rule)
    assert not decide_injective(rule).injective


def test_bipermutive_collision_rejects_one_sided_rules():
    rule = su("m=3; d=1; f=x1^2+x2")
    cls = classify(rule)
    with pytest.raises(ValueError):
        bipermutive_collision(rule, cls, 5)


def test_bipermutive_collision_rejects_small_window():
    rule = su("m=3; d=1; f=x1+x2")
    cls = classify(rule)
    with pytest.raises(ValueError):
        bipermutive_collision(rule, cls, 1)


@given(
    st.sampled_from((3, 4, 5)),
    st.integers(min_value=1, max_value=2),
    st.data(),
)
def test_bipermutive_rules_are_never_injective(m, d, data):
    """Separated bijective monomials at two distinct end positions always
    admit a collision, whatever sits between them.
    """
    bijective_exponents = tuple(
        e for e in range(1, 6)
        if sorted(pow(x, e, m) for x in range(m)) == list(range(m))
    )
    ell = 1
    r = data.draw(st.integers(min_value=2, max_value=d + 1))
    a_l = data.draw(st.sampled_from(units(m)))
    a_r = data.draw(st.sampled_from(units(m)))
    q_l = data.draw(st.sampled_from(bijective_exponents))
    q_r = data.draw(st.sampled_from(bijective_exponents))
    interior = [
        data.draw(st.integers(min_value=0, max_value=m - 1))
        for _ in range(m ** (r - ell - 1))
    ]
    rule = lr_separated_rule(m, d, ell, r, a_l, q_l, a_r, q_r, interior)
    cls = classify(rule)
    col = bipermutive_collision(rule, cls, cls.r - cls.ell + rule.d + 2)
    assert col.validate(rule)
    assert not decide_injective(rule).injective


@given(small_rules())
def test_injective_rules_are_not_end_bipermutive(rule):
    """The collision construction contrapositive: an injective rule can
    never be permutive at two distinct separated end positions.
    """
    if not decide_injective(rule).injective:
        return
    cls = classify(rule)
    if cls.lr_separated and cls.ell is not None and cls.ell < cls.r:
        assert not (is_permutive_at(rule, cls.ell) and is_permutive_at(rule, cls.r))


# --- caps -----------------------------------------------------------------------


def test_deciders_respect_caps():
    # the subset cap counts states actually visited, so use a rule whose
    # walk leaves the initial full vertex set
    rule = su("m=3; d=1; f=x1^2+x2^2")
    tight = dataclasses.replace(DEFAULT_CAPS, subset_states=2)
    with pytest.raises(CapExceeded):
        decide_surjective(rule, tight)
    tighter = dataclasses.replace(DEFAULT_CAPS, pair_vertices=2)
    with pytest.raises(CapExceeded):
        decide_injective(rule, tighter)
