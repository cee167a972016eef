import math

import mpmath as mp
import pytest

from inls_lab.exponents import (Constants, HypothesisError, ProblemParams, admissible, b_tilde,
                                beta_of_p, beta_range, check_hypotheses, critical_index,
                                derive_all, window_length)

import oracles

FIELDS = ("s_b", "b_tilde", "gamma2", "rho2", "inv_q1", "gamma1_conj", "eta", "p_max", "beta",
          "T_N", "A", "a", "T_local", "c2_exponent", "c3_exponent")


def close(x, ref, rtol=1e-12):
    if ref == mp.inf:
        return math.isinf(x)
    return abs(x - float(ref)) <= rtol * max(abs(float(ref)), 1e-300)


def compare(n, a, b, p, N=4.0, C=1.0, u0=1.7, psi=0.3):
    rep = derive_all(ProblemParams(n, a, b, p=p, N=N), norms={"u0": u0, "psi": psi},
                     constants=Constants(local=C, ball=C, window=C))
    ref = oracles.exponents_mp(n, a, b, p, N, C, u0, psi)
    bad = [k for k in FIELDS if not close(getattr(rep, k), ref[k])]
    return bad


class TestOracleSweep:
    def test_200_point_sweep(self):
        pts = oracles.valid_sweep(200)
        failures = {pt: bad for pt in pts if (bad := compare(*pt))}
        assert not failures

    @pytest.mark.parametrize("n,a,b", [(1, 1.5, 0.05), (1, 1.0, 0.1), (2, 0.8, 0.3), (3, 0.5, 0.4)])
    def test_named_points(self, n, a, b):
        assert compare(n, a, b, 2.01) == []

    def test_p_max_closed_forms_agree(self):
        for n, a, b, _ in oracles.valid_sweep(50, seed=7):
            rep = derive_all(ProblemParams(n, a, b))
            if rep.branch == "eta":
                assert close(rep.p_max, oracles.p_max_remark_form(n, a, b))


class TestExamples:
    def test_critical_index(self):
        assert critical_index(ProblemParams(1, 2.0, 0.1)) == pytest.approx(0.5 - 1.9 / 2)
        assert critical_index(ProblemParams(2, 1.0, 0.5)) == pytest.approx(-0.5)
        assert critical_index(ProblemParams(1, 3.8, 0.1)) == pytest.approx(0.0, abs=1e-15)

    def test_b_tilde_values(self):
        assert b_tilde(1) == ((3 - math.sqrt(7)) / 2, False)
        assert b_tilde(2) == (2 - math.sqrt(2), True)
        assert b_tilde(3)[0] == 0.5
        assert b_tilde(1)[0] == pytest.approx(0.177124, abs=1e-6)

    def test_remark_pair_example(self):
        rep = derive_all(ProblemParams(1, 1.0, 0.1))
        assert rep.gamma2 == pytest.approx(11.6 / 2.48, rel=1e-14)
        assert rep.rho2 == pytest.approx(5.8 / 0.42, rel=1e-14)
        assert rep.admissibility["pair2"]
        assert rep.inv_q1 == pytest.approx(2.8 / 4 - 2.8 / (4 * 3 * 2.9), rel=1e-14) and rep.inv_q1 > 0

    def test_beta_zero_at_two(self):
        assert beta_of_p(2.0, 3.0) == 0.0

    def test_rho2_infinite_at_endpoint(self):
        bt, _ = b_tilde(1)
        rep = derive_all(ProblemParams(1, 1.0, bt))
        assert math.isinf(rep.rho2) and rep.admissibility["pair2"]
        assert rep.to_dict()["rho2"] == "inf"


class TestAdmissible:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_infinity_two(self, n):
        assert admissible(math.inf, 2, n)

    def test_endpoint_three_d(self):
        v = admissible(2, 6, 3)
        assert v and v.endpoint

    def test_r_infinity_excluded_in_2d(self):
        assert not admissible(1, math.inf, 2)
        assert admissible(4, math.inf, 1)

    def test_scaling_mismatch(self):
        assert not admissible(3, 3, 1)


class TestHypotheses:
    @pytest.mark.parametrize("kw,needle", [
        (dict(n=1, alpha=1, b=0.0), "0 < b"),
        (dict(n=1, alpha=4, b=0.1), "alpha <"),
        (dict(n=1, alpha=1, b=0.3), "b_tilde"),
        (dict(n=2, alpha=0.5, b=2 - math.sqrt(2)), "b < b_tilde"),
        (dict(n=1, alpha=1, b=0.1, p=3.0), "p_max"),
        (dict(n=1, alpha=1, b=0.1, p=2.05, N=0.5), "N > 1"),
    ])
    def test_violations_named(self, kw, needle):
        with pytest.raises(HypothesisError) as e:
            derive_all(ProblemParams(**kw))
        assert any(needle in d for d in e.value.diagnostics)

    def test_b_equal_tilde_allowed_1d(self):
        assert check_hypotheses(ProblemParams(1, 1.0, b_tilde(1)[0])) == []

    def test_mu_validated(self):
        with pytest.raises(ValueError):
            ProblemParams(1, 1.0, 0.1, mu=0)


class TestProperties:
    def test_signs_and_ranges(self):
        for n, a, b, p in oracles.valid_sweep(200, seed=11):
            rep = derive_all(ProblemParams(n, a, b, p=p))
            assert rep.p_max > 2
            assert rep.inv_q1 > 0
            assert rep.c2_exponent < 0 and rep.c3_exponent < 0
            assert rep.rho2 >= 2
            if n >= 3:
                assert rep.rho2 <= 2 * n / (n - 2) * (1 + 1e-12)
            assert all(rep.admissibility.values())
            assert rep.beta > 0 and (rep.branch == "unbounded" or rep.beta < rep.eta)

    def test_window_shrinks_with_N(self):
        P = ProblemParams(1, 1.0, 0.1, p=2.3)
        beta = beta_of_p(2.3, 3.0)
        Ts = [window_length(P, N, beta) for N in (2, 4, 8, 16, 1e6)]
        assert all(x > y for x, y in zip(Ts, Ts[1:]))

    def test_unbounded_branch(self):
        # large b, small alpha in 3-D puts the branch denominator below zero
        for n, a, b, _ in oracles.valid_sweep(200, seed=5):
            eta, pmax, branch = beta_range(ProblemParams(n, a, b))
            if branch == "unbounded":
                assert math.isinf(eta) and pmax == a + 2

    def test_table_renders(self):
        text = derive_all(ProblemParams(1, 1.0, 0.1, p=2.05, N=8)).table()
        assert "p_max" in text and "2.58160237388724" in text
