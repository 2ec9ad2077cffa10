import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rulerank import (
    PairedSample,
    SensitivityParams,
    build_comparison_frame,
    gamma_to_kappa,
    kappa_to_gamma,
)
from rulerank.errors import IdenticalRules, InvalidGamma, InvalidKappa, InvalidRule, ValidationError

from conftest import make_sample


def test_signed_differences_with_flips():
    # d=[1,2,-3], r_i=[0,0,1], r_j=[1,1,0]: the third pair flips sign
    s = make_sample([1.0, 2.0, -3.0], [[0, 1], [0, 1], [1, 0]])
    f = build_comparison_frame(s, 0, 1)
    assert f.signed_d.tolist() == [1.0, 2.0, 3.0]
    assert f.m == 3 and f.n == 3
    assert f.rule_pair == (0, 1)


def test_identical_rules_rejected():
    s = make_sample([5.0, -5.0], [[1, 1], [1, 1]])
    with pytest.raises(IdenticalRules):
        build_comparison_frame(s, 0, 1)


def test_nested_rules_subset_without_flips():
    s = make_sample([4.0, 7.0, -1.0], [[0, 1], [0, 0], [0, 1]])
    f = build_comparison_frame(s, 0, 1)
    assert f.signed_d.tolist() == [4.0, -1.0]
    assert f.m == 2 and f.n == 3


def test_bad_rule_indices():
    s = make_sample([1.0, 2.0], [[0, 1], [0, 1]])
    with pytest.raises(InvalidRule):
        build_comparison_frame(s, 0, 5)
    with pytest.raises(InvalidRule):
        build_comparison_frame(s, 1, 1)


def test_rule_table_must_be_binary():
    with pytest.raises(ValidationError):
        make_sample([1.0, 2.0], [[0, 2], [0, 1]])
    with pytest.raises(ValidationError):
        make_sample([1.0, 2.0], [[0, 0.5], [0, 1]])


def test_shapes_must_agree():
    with pytest.raises(ValidationError):
        PairedSample(pair_ids=[0, 1], d=[1.0], rules=[[0, 1]])
    with pytest.raises(ValidationError):
        PairedSample(pair_ids=[], d=[], rules=np.empty((0, 2)))


def test_sample_is_frozen():
    s = make_sample([1.0, 2.0], [[0, 1], [0, 1]])
    with pytest.raises(ValueError):
        s.d[0] = 9.0
    with pytest.raises(ValueError):
        s.rules[0, 0] = 1


def test_construction_does_not_freeze_caller_arrays():
    d = np.array([1.0, 2.0])
    make_sample(d, [[0, 1], [0, 1]])
    d[0] = 5.0  # still writable


@st.composite
def rule_samples(draw):
    n = draw(st.integers(min_value=1, max_value=30))
    d = draw(
        st.lists(
            st.floats(min_value=-50, max_value=50, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    cols = draw(
        st.lists(
            st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=2, max_size=4
        )
    )
    return make_sample(d, np.array(cols).T)


@settings(max_examples=100, deadline=None)
@given(rule_samples(), st.data())
def test_swapping_rule_pair_negates_signed_differences(sample, data):
    i = data.draw(st.integers(0, sample.rule_count - 1))
    j = data.draw(st.integers(0, sample.rule_count - 1).filter(lambda x: x != i))
    try:
        forward = build_comparison_frame(sample, i, j)
    except IdenticalRules:
        with pytest.raises(IdenticalRules):
            build_comparison_frame(sample, j, i)
        return
    backward = build_comparison_frame(sample, j, i)
    np.testing.assert_array_equal(forward.signed_d, -backward.signed_d)
    assert forward.m == backward.m


@settings(max_examples=60, deadline=None)
@given(rule_samples())
def test_nested_rules_give_plain_subset(sample):
    lo = np.minimum(sample.rules[:, 0], sample.rules[:, 1])
    hi = np.maximum(sample.rules[:, 0], sample.rules[:, 1])
    nested = make_sample(sample.d, np.column_stack([lo, hi]))
    mask = lo != hi
    if not mask.any():
        return
    f = build_comparison_frame(nested, 0, 1)
    np.testing.assert_array_equal(f.signed_d, nested.d[mask])


def test_gamma_kappa_transforms():
    assert gamma_to_kappa(1.0) == 0.0
    assert kappa_to_gamma(1 / 3) == pytest.approx(2.0, rel=1e-12)
    assert gamma_to_kappa(4.0) == pytest.approx(0.6, rel=1e-12)
    assert gamma_to_kappa(float("inf")) == 1.0
    with pytest.raises(InvalidGamma):
        gamma_to_kappa(0.5)
    with pytest.raises(InvalidKappa):
        kappa_to_gamma(1.0)
    with pytest.raises(InvalidKappa):
        kappa_to_gamma(-0.1)


def test_gamma_kappa_round_trip():
    # conditioning of (1+k)/(1-k) grows like gamma, so machine precision does too
    for gamma in np.geomspace(1.0, 1e6, 60):
        tol = 1e-13 + gamma * np.finfo(float).eps
        assert kappa_to_gamma(gamma_to_kappa(gamma)) == pytest.approx(gamma, rel=tol)


def test_params_validate():
    p = SensitivityParams(gamma=2.0, alpha=0.05, delta=0.0)
    assert p.kappa == pytest.approx(1 / 3)
    with pytest.raises(InvalidGamma):
        SensitivityParams(gamma=0.9)
    with pytest.raises(ValidationError):
        SensitivityParams(alpha=1.5)
    with pytest.raises(ValidationError):
        SensitivityParams(delta=-1.0)
