import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randombeta.linalg import SingularSolve, nullspace_vector
from randombeta.measures import (BadP, InadmissibleWord, ZeroStationaryMass, build_lebesgue_chain,
                                 build_measure, cylinder_measure, cylinder_table, digit_marginal, entropy_pressure,
                                 g_from_markov, novelty_check)

F = Fraction
LOG2 = math.log(2)
thetas = st.lists(st.floats(-3, 3), min_size=2, max_size=2)


def test_golden_uniform(gold):
    rep = build_measure(gold.sft, weights=[F(1, 2), F(1, 2)])
    assert rep.exact["m"] == (F(1, 3), F(1, 3), F(1, 3))
    rep_f = build_measure(gold.sft, [0.0, 0.0])
    assert np.allclose(rep_f.m, 1 / 3, atol=1e-15)


def test_golden_log2_exact(gold):
    rep = build_measure(gold.sft, weights=[F(1, 3), F(2, 3)])
    assert rep.exact["m"] == (F(1, 7), F(2, 7), F(4, 7))
    assert rep.exact["P"] == ((F(1, 3), F(2, 3), 0), (F(1, 3), 0, F(2, 3)), (0, F(1, 3), F(2, 3)))
    rep_f = build_measure(gold.sft, [0.0, LOG2])
    assert np.allclose(rep_f.weights, [1 / 3, 2 / 3], atol=1e-15)
    assert np.allclose(rep_f.P, np.array(rep.exact["P"], dtype=float), atol=1e-15)


def test_hand_solved_masses(gold):
    """m proportional to (w0^2, w0 w1, w1^2) solves W m = m on the golden SFT."""
    for w0 in (F(1, 5), F(1, 2), F(7, 9)):
        w1 = 1 - w0
        rep = build_measure(gold.sft, weights=[w0, w1])
        z = w0 * w0 + w0 * w1 + w1 * w1
        assert rep.exact["m"] == (w0 * w0 / z, w0 * w1 / z, w1 * w1 / z)


@settings(max_examples=40, deadline=None)
@given(thetas, st.floats(-5, 5))
def test_constant_shift_invariance(theta, c):
    from randombeta.pipeline import golden
    sft = golden().sft
    a = build_measure(sft, theta)
    b = build_measure(sft, [t + c for t in theta])
    assert np.allclose(a.weights, b.weights, rtol=1e-12)
    assert np.allclose(a.m, b.m, rtol=1e-10)
    assert np.allclose(a.P, b.P, rtol=1e-10, atol=1e-15)


def test_markov_invariants(quart):
    rep = build_measure(quart.sft, [0.3, -1.2, 0.5, 0.9])
    assert np.allclose(rep.P.sum(axis=1), 1.0, atol=1e-14)
    assert np.allclose(rep.m @ rep.P, rep.m, atol=1e-14)
    assert np.allclose(rep.W @ rep.m, rep.m, atol=1e-14)
    assert rep.m.min() > 0
    assert rep.m.sum() == pytest.approx(1.0, abs=1e-14)


def test_cylinder_examples(gold):
    rep = build_measure(gold.sft, weights=[F(1, 3), F(2, 3)])
    assert cylinder_measure(rep, (0, 1, 2)) == F(4, 63)
    for j in range(3):
        assert cylinder_measure(rep, (j,)) == rep.exact["m"][j]
    for n in range(1, 7):
        assert sum(v for _, v in cylinder_table(rep, n)) == 1


def test_cylinder_product_of_weights(quart):
    rep = build_measure(quart.sft, weights=[F(1, 10), F(2, 10), F(3, 10), F(4, 10)])
    w, m = rep.exact["w"], rep.exact["m"]
    for word in quart.sft.words(4)[::37]:
        word = word.tolist()
        expect = m[word[-1]]
        for d in quart.sft.word_digits(word):
            expect *= w[d]
        assert cylinder_measure(rep, word) == expect


def test_inadmissible_cylinder(gold):
    rep = build_measure(gold.sft, weights=[F(1, 3), F(2, 3)])
    with pytest.warns(UserWarning):
        assert cylinder_measure(rep, (0, 2)) == 0
    with pytest.raises(InadmissibleWord):
        cylinder_measure(rep, (0, 2), strict=True)


def test_g_relation_exact_depth_8(gold):
    rep = build_measure(gold.sft, weights=[F(1, 3), F(2, 3)])
    w = rep.exact["w"]
    for n in range(2, 9):
        for word in gold.sft.words(n):
            word = word.tolist()
            d = gold.sft.digit_label[(word[0], word[1])]
            assert cylinder_measure(rep, word) == w[d] * cylinder_measure(rep, word[1:])


def test_shift_invariance_on_cylinders(quart):
    rep = build_measure(quart.sft, weights=[F(1, 10), F(2, 10), F(3, 10), F(4, 10)])
    for word in quart.sft.words(3):
        word = word.tolist()
        total = sum(cylinder_measure(rep, [a] + word) for a in quart.sft.predecessors(word[0]))
        assert total == cylinder_measure(rep, word)


def test_integral_identity_on_indicators(gold):
    """int f dmu = int sum_{y in sigma^-1 x} g(y) f(y) dmu(x) for cylinder indicators f."""
    rep = build_measure(gold.sft, weights=[F(2, 5), F(3, 5)])
    g = g_from_markov(rep, exact=True)
    for target in gold.sft.words(3):
        target = tuple(target.tolist())
        lhs = cylinder_measure(rep, target)
        rhs = 0
        for x in gold.sft.words(2):
            x = tuple(x.tolist())
            for a in gold.sft.predecessors(x[0]):
                y = (a,) + x
                if y[:3] == target:
                    rhs += g[(a, x[0])] * cylinder_measure(rep, x)
        assert lhs == rhs


def test_digit_marginals(gold, quart):
    rep = build_measure(gold.sft, weights=[F(1, 3), F(2, 3)])
    assert digit_marginal(rep, 1) == F(2, 3)
    assert digit_marginal(rep, 0) + digit_marginal(rep, 1) == 1
    rep = build_measure(quart.sft, [0.7] * 4)
    for i in range(4):
        assert digit_marginal(rep, i) == pytest.approx(0.25, abs=1e-14)


def test_entropy_examples(gold):
    rep = build_measure(gold.sft, [0.0, 0.0])
    out = entropy_pressure(rep)
    assert out["entropy"] == pytest.approx(LOG2, abs=1e-14)
    assert abs(out["pressure_check"]) < 1e-14
    rep = build_measure(gold.sft, [0.0, LOG2])
    out = entropy_pressure(rep)
    assert out["entropy"] == pytest.approx(math.log(3) - 2 / 3 * LOG2, abs=1e-14)
    assert round(out["entropy"], 6) == 0.636514


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=4, max_size=4))
def test_entropy_is_digit_entropy(theta):
    from randombeta.pipeline import quartic
    rep = build_measure(quartic().sft, theta)
    h = entropy_pressure(rep)["entropy"]
    w = rep.weights
    assert h == pytest.approx(float(-(w * np.log(w)).sum()), abs=1e-12)


def test_g_recovers_weights(quart):
    rep = build_measure(quart.sft, weights=[F(1, 10), F(2, 10), F(3, 10), F(4, 10)])
    g = g_from_markov(rep, exact=True)
    for (i, j), v in g.items():
        assert v == rep.exact["w"][quart.sft.digit_label[(i, j)]]


def test_g_trivial_chain():
    assert g_from_markov((np.ones((1, 1)), np.ones(1))) == {(0, 0): 1.0}
    with pytest.raises(ZeroStationaryMass):
        g_from_markov((np.eye(2), np.array([1.0, 0.0])))


def test_lebesgue_golden_rows(gold):
    b = gold.ctx.beta
    for p in (F(1, 4), F(1, 2), F(3, 4)):
        chain = build_lebesgue_chain(gold.partition, gold.sft, p)
        P = chain.P_exact
        assert P[0][0] == 1 / b
        assert P[0][1] == 1 / (b * b) and P[0][2] == 0
        assert P[2][0] == 0 and P[2][1] == 1 / (b * b) and P[2][2] == 1 / b
        assert P[1][0] == p and P[1][2] == 1 - p
        for row in P:
            assert sum(row, gold.ctx.zero) == gold.ctx.one
        assert chain.switch_identities_exact == (True, True)


def test_lebesgue_quartic(quart):
    chain = build_lebesgue_chain(quart.partition, quart.sft, F(1, 3))
    for row in chain.P_exact:
        assert sum(row, quart.ctx.zero) == quart.ctx.one
    assert chain.switch_identities_exact == (True, True)
    assert np.allclose(chain.pi @ chain.P, chain.pi, atol=1e-14)
    g = g_from_markov(chain, exact=True)
    for j in range(quart.sft.n_states):
        assert sum((g[(i, j)] for i in quart.sft.predecessors(j)), quart.ctx.zero) == quart.ctx.one


def test_bad_p(gold):
    for p in (0, 1, F(3, 2), -1):
        with pytest.raises(BadP):
            build_lebesgue_chain(gold.partition, gold.sft, p)
    with pytest.raises(BadP):
        build_lebesgue_chain(gold.partition, gold.sft, "half")


def test_novelty_uniform_vs_lebesgue(gold):
    rep = build_measure(gold.sft, [0.0, 0.0])
    for p in (F(1, 4), F(1, 2), F(3, 4)):
        res = novelty_check(rep, build_lebesgue_chain(gold.partition, gold.sft, p))
        assert res.distinct
        assert not res.scalar_condition
        assert res.witness is not None


def test_novelty_self(gold):
    rep = build_measure(gold.sft, [0.2, -0.1])
    res = novelty_check(rep, rep)
    assert not res.distinct and res.witness is None


def test_novelty_scalar_condition_does_not_decide(gold):
    """w_1 = 1/beta (theta_1 = log beta) passes the scalar test; the tables still decide."""
    rep = build_measure(gold.sft, [0.0, math.log(gold.ctx.beta_float)])
    for p in (F(1, 4), F(1, 2), F(3, 4)):
        chain = build_lebesgue_chain(gold.partition, gold.sft, p)
        res = novelty_check(rep, chain)
        assert res.scalar_condition
        g_rep, g_chain = g_from_markov(rep), g_from_markov(chain)
        differs = any(abs(g_rep[e] - float(g_chain[e])) > 1e-12 for e in g_rep)
        assert res.distinct == differs


def test_nullspace_singular():
    with pytest.raises(SingularSolve):
        nullspace_vector([[F(0), F(0)], [F(0), F(0)]], F(1))
    assert nullspace_vector([[F(-1), F(1)], [F(1), F(-1)]], F(1)) == [F(1, 2), F(1, 2)]


def test_measure_json(gold):
    data = build_measure(gold.sft, weights=[F(1, 3), F(2, 3)]).to_json()
    assert data["exact"]["m"] == ["1/7", "2/7", "4/7"]
