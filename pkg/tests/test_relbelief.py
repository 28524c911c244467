import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from evidencekit.freq import LocationNormalData
from evidencekit.kernel import NormalParams, normal_pdf, rng
from evidencekit.likelihood import integrated_likelihood_abs
from evidencekit.relbelief import (
    BayesInferenceBase,
    JeffreysLabel,
    Target,
    bayes_factor,
    bayes_factor_limit,
    bf_rb_log_ratio,
    build_grid,
    cell_bounds,
    credible_region,
    evidence_report,
    implausible_region,
    jeffreys_label,
    pereira_stern_ev,
    plausible_region,
    posterior_params,
    rb_of_cell,
    strength,
    urn_evidence,
)

PRIOR = NormalParams(0.0, 2.0)


def make_base(n, xbar, delta=0.01, prior=PRIOR):
    return BayesInferenceBase(LocationNormalData(n, xbar, 1.0), prior, delta)


# posterior parameters


def test_posterior_example(ex6_base):
    post = posterior_params(ex6_base)
    assert post.mean == pytest.approx(1.47 * 2 / 2.25, abs=1e-12)
    assert post.var == pytest.approx(1 / 2.25, abs=1e-12)
    assert post.mean == pytest.approx(1.3067, abs=1e-4)


def test_posterior_without_data_is_prior():
    assert posterior_params(make_base(0, 0.0)) == PRIOR


def test_posterior_flat_prior_limit():
    post = posterior_params(make_base(4, 0.9, prior=NormalParams(0.0, 1e6)))
    assert post.mean == pytest.approx(0.9, rel=1e-9)
    assert post.var == pytest.approx(0.25, rel=1e-9)


def test_delta_must_be_positive_and_below_prior_sd():
    with pytest.raises(ValueError):
        make_base(2, 1.0, delta=0.0)
    with pytest.raises(ValueError):
        make_base(2, 1.0, delta=3.0)


# the grid


@pytest.mark.parametrize("target", list(Target))
def test_grid_normalised(ex6_base, target):
    g = build_grid(ex6_base, target)
    assert abs(g.prior_mass.sum() - 1) <= 1e-6
    assert abs(g.posterior_mass.sum() - 1) <= 1e-6
    assert np.all(g.hi - g.lo <= 0.01 + 1e-12)


def test_grid_without_data_has_unit_ratios():
    g = build_grid(make_base(0, 0.0))
    assert np.allclose(g.rb[g.valid], 1.0, atol=1e-9)
    assert plausible_region(g).empty
    r = evidence_report(g, 1.0)
    assert r.plausible_content == 0.0


def test_abs_grid_starts_at_zero(ex6_base):
    g = build_grid(ex6_base)
    assert g.lo[0] == 0.0
    assert g.hi[0] == pytest.approx(0.005)


def test_cell_bounds_half_open():
    assert cell_bounds(2.0, 0.01) == pytest.approx((1.995, 2.005))
    lo, hi = cell_bounds(2.005, 0.01)
    assert lo == pytest.approx(2.005)
    assert cell_bounds(0.001, 0.01) == pytest.approx((0.0, 0.005))


def test_rb_maximised_at_observed_mean(ex6_base):
    g = build_grid(ex6_base)
    assert g.mid[np.nanargmax(g.rb)] == pytest.approx(1.47)


def test_psi0_outside_grid_rejected(ex6_base):
    with pytest.raises(ValueError):
        evidence_report(build_grid(ex6_base), 1e3)


def test_rb_of_cell_matches_grid(ex6_base):
    g = build_grid(ex6_base)
    i = g.cell_index(2.0)
    assert rb_of_cell(ex6_base, g.lo[i], g.hi[i], 1.47) == pytest.approx(g.rb[i], rel=1e-12)


def _savage_dickey(base, lo, hi):
    """Cell prior-predictive density over the marginal, both by quadrature on mu."""
    d, pr = base.data, base.prior
    se = d.sigma0 / math.sqrt(d.n)

    def joint(mu):
        return normal_pdf(d.xbar, mu, se) * normal_pdf(mu, pr.mean, pr.sd)

    def prior(mu):
        return normal_pdf(mu, pr.mean, pr.sd)

    kw = dict(epsabs=0, epsrel=1e-12)
    num = integrate.quad(joint, lo, hi, **kw)[0] + integrate.quad(joint, -hi, -lo, **kw)[0]
    mass = integrate.quad(prior, lo, hi, **kw)[0] + integrate.quad(prior, -hi, -lo, **kw)[0]
    marginal = normal_pdf(d.xbar, pr.mean, math.sqrt(se**2 + pr.var))
    return (num / mass) / marginal


def test_savage_dickey_identity(ex6_base):
    g = build_grid(ex6_base)
    for i in range(0, len(g), 37):
        if g.prior_mass[i] > 1e-8:
            assert g.rb[i] == pytest.approx(_savage_dickey(ex6_base, g.lo[i], g.hi[i]), rel=1e-6)


@given(st.floats(-4, 4), st.integers(1, 60))
def test_evidence_trichotomy(xbar, n):
    g = build_grid(make_base(n, xbar, delta=0.05))
    pl, im = plausible_region(g), implausible_region(g)
    for i in range(0, len(g), 7):
        if not g.valid[i]:
            continue
        psi = float(g.mid[i]) if g.lo[i] <= g.mid[i] else float(g.lo[i])
        assert pl.contains(psi) == (g.rb[i] > 1)
        assert im.contains(psi) == (g.rb[i] < 1)


@given(st.floats(-4, 4), st.integers(1, 60))
def test_bf_rb_ordering(xbar, n):
    g = build_grid(make_base(n, xbar, delta=0.05))
    m = g.valid & (g.prior_mass < 1) & (g.posterior_mass < 1) & (g.posterior_mass != g.prior_mass)
    gap = bf_rb_log_ratio(g.prior_mass[m], g.posterior_mass[m])
    assert np.all(np.sign(gap) == np.sign(g.rb[m] - 1))
    big = m & (g.prior_mass > 1e-3) & (np.abs(g.rb - 1) > 1e-6)
    bf = bayes_factor(g.prior_mass[big], g.posterior_mass[big])
    rb = g.rb[big]
    assert np.all((bf > rb) == (rb > 1))


def test_prior_weighted_ratio_averages_to_one(ex6_base):
    g = build_grid(ex6_base)
    assert np.sum(g.prior_mass[g.valid] * g.rb[g.valid]) == pytest.approx(1.0, abs=1e-6)
    # and for a fixed cell, averaging its ratio over the prior predictive of xbar
    lo, hi = cell_bounds(2.0, 0.01)
    marginal_sd = math.sqrt(0.5 + 4.0)

    def f(x):
        return float(rb_of_cell(ex6_base, lo, hi, x)) * normal_pdf(x, 0.0, marginal_sd)

    assert integrate.quad(f, -40, 40, limit=200)[0] == pytest.approx(1.0, abs=1e-7)


def test_rb_argmax_equals_integrated_likelihood_argmax(ex6_base):
    g = build_grid(ex6_base)
    # symmetric prior about 0 puts equal weight on both signs
    lik = integrated_likelihood_abs(ex6_base.data, g.mid, 0.5)
    assert g.mid[np.nanargmax(g.rb)] == g.mid[np.argmax(lik)]


# reports


def test_strength_at_estimate_is_one(ex6_base):
    g = build_grid(ex6_base)
    r = evidence_report(g, 2.0)
    assert strength(g, r.estimate) == pytest.approx(1.0, abs=1e-9)


def test_credible_region_inside_plausible(ex6_base):
    g = build_grid(ex6_base)
    r = evidence_report(g, 2.0, gamma=0.5)
    assert r.credible_in_plausible
    assert r.credible.issubset(r.plausible)
    assert r.credible.contains(1.47)
    content = sum(g.posterior_mass[i] for i in range(len(g)) if r.credible.contains(float(g.mid[i])))
    assert content >= 0.5


def test_credible_region_flagged_when_it_leaves_plausible(ex6_base):
    g = build_grid(ex6_base)
    r = evidence_report(g, 2.0, gamma=0.95)
    assert not r.credible_in_plausible
    assert not r.credible.empty


@pytest.mark.parametrize("gamma", [0.0, 1.0])
def test_gamma_domain(ex6_base, gamma):
    with pytest.raises(ValueError):
        evidence_report(build_grid(ex6_base), 2.0, gamma)


def test_credible_regions_nest(ex6_base):
    g = build_grid(ex6_base)
    assert credible_region(g, 0.3).issubset(credible_region(g, 0.6))


def test_report_dict_fields(ex6_base):
    d = evidence_report(build_grid(ex6_base), 2.0).to_dict()
    for key in (
        "estimate",
        "plausible",
        "plausible_content",
        "rb_at_hypothesis",
        "strength",
        "credible",
        "gamma",
        "bf_at_hypothesis",
        "jeffreys_label",
    ):
        assert key in d


def _mp_folded(lo, hi, m, s):
    return (mpmath.ncdf(hi, m, s) - mpmath.ncdf(lo, m, s)) + (mpmath.ncdf(-lo, m, s) - mpmath.ncdf(-hi, m, s))


def test_example6_against_extended_precision_oracle(ex6_base):
    mpmath.mp.dps = 30
    m, s = mpmath.mpf(1.47) * 2 / mpmath.mpf(2.25), mpmath.sqrt(mpmath.mpf(1) / mpmath.mpf(2.25))
    d = mpmath.mpf("0.01")
    mids = [d * k for k in range(0, 1101)]
    cells = [(max(mpmath.mpf(0), c - d / 2), c + d / 2) for c in mids]
    prior = [_mp_folded(a, b, 0, 2) for a, b in cells]
    post = [_mp_folded(a, b, m, s) for a, b in cells]
    rb = [q / p for p, q in zip(prior, post)]
    k_hat = max(range(len(rb)), key=lambda k: rb[k])
    in_pl = [k for k in range(len(rb)) if rb[k] > 1]
    k0 = 200
    oracle_strength = sum(post[k] for k in range(len(rb)) if rb[k] <= rb[k0])

    r = evidence_report(build_grid(ex6_base), 2.0)
    assert r.estimate == pytest.approx(float(mids[k_hat]), abs=1e-12)
    assert r.plausible.lo == pytest.approx(float(cells[in_pl[0]][0]), abs=1e-12)
    assert r.plausible.hi == pytest.approx(float(cells[in_pl[-1]][1]), abs=1e-12)
    assert r.plausible_content == pytest.approx(float(sum(post[k] for k in in_pl)), abs=1e-9)
    assert r.rb_at_hypothesis == pytest.approx(float(rb[k0]), rel=1e-9)
    assert r.strength == pytest.approx(float(oracle_strength), abs=1e-9)
    # frozen values of the exact computation
    assert r.estimate == pytest.approx(1.47)
    assert (r.plausible.lo, r.plausible.hi) == pytest.approx((0.655, 2.275))
    assert r.plausible_content == pytest.approx(0.76429, abs=1e-5)
    assert r.rb_at_hypothesis == pytest.approx(1.44004, abs=1e-5)
    assert r.strength == pytest.approx(0.43913, abs=1e-5)


def test_evidence_accumulates_with_n_when_hypothesis_true():
    # data one half standard error from psi0 at each n; delta coarse enough for the trend to show by n = 250
    rbs, strengths = [], []
    for n in (2, 10, 50, 250):
        r = evidence_report(build_grid(make_base(n, 2.0 + 0.5 / math.sqrt(n), delta=0.1)), 2.0)
        rbs.append(r.rb_at_hypothesis)
        strengths.append(r.strength)
    assert rbs == sorted(rbs)
    assert strengths == sorted(strengths)
    assert strengths[-1] > 0.99


def test_larger_sample_sharpens_the_evidence():
    small = evidence_report(build_grid(make_base(2, 1.47)), 2.0)
    large = evidence_report(build_grid(make_base(10, 1.83)), 2.0)
    assert large.plausible.length() < small.plausible.length()
    assert large.plausible_content > small.plausible_content
    assert large.rb_at_hypothesis > small.rb_at_hypothesis
    assert large.estimate == pytest.approx(1.83)


# Bayes factors and the Jeffreys scale


def test_bayes_factor_examples():
    assert bayes_factor(0.5, 0.8) == pytest.approx(4.0)
    assert bayes_factor(0.5, 0.2) == pytest.approx(0.25)
    assert bayes_factor(0.3, 0.3) == pytest.approx(1.0)
    assert bayes_factor(0.5, 0.8) > 0.8 / 0.5
    assert bayes_factor(0.5, 0.2) < 0.2 / 0.5


def test_bayes_factor_edge_cases():
    with pytest.warns(RuntimeWarning):
        assert math.isinf(bayes_factor(0.5, 1.0))
    for bad in (0.0, 1.0):
        with pytest.raises(ValueError):
            bayes_factor(bad, 0.5)


@pytest.mark.parametrize(
    "bf, label",
    [
        (1e3, JeffreysLabel.DECISIVE),
        (2.0, JeffreysLabel.BARELY),
        (20.0, JeffreysLabel.STRONG),
        (5.0, JeffreysLabel.SUBSTANTIAL),
        (50.0, JeffreysLabel.VERY_STRONG),
        (10.0, JeffreysLabel.SUBSTANTIAL),
        (1e-3, JeffreysLabel.DECISIVE_AGAINST),
        (0.5, JeffreysLabel.BARELY_AGAINST),
        (0.05, JeffreysLabel.STRONG_AGAINST),
    ],
)
def test_jeffreys_labels(bf, label):
    assert jeffreys_label(bf) is label


def test_jeffreys_rejects_nonpositive():
    with pytest.raises(ValueError):
        jeffreys_label(0.0)


def test_bayes_factor_limit_approaches_rb(ex6_base):
    res = bayes_factor_limit(ex6_base, 2.0)
    g = build_grid(ex6_base)
    rb2 = g.rb[g.cell_index(2.0)]
    gaps = [abs(b - rb2) for b in res.bf]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert res.limit == pytest.approx(rb2, rel=0.01)


def test_bayes_factor_limit_without_data_is_one():
    res = bayes_factor_limit(make_base(0, 0.0), 1.0)
    assert res.limit == pytest.approx(1.0, abs=1e-9)


def test_bayes_factor_limit_needs_positive_prior_density(ex6_base):
    with pytest.raises(ValueError):
        bayes_factor_limit(ex6_base, -1.0)


# urn and Pereira-Stern


def test_urn_examples():
    u = urn_evidence(10**6, 10**3)
    assert u.rb == pytest.approx(1e3)
    assert u.posterior == pytest.approx(1e-3)
    assert jeffreys_label(u.rb) is JeffreysLabel.DECISIVE
    one = urn_evidence(50, 1)
    assert (one.posterior, one.rb) == (1.0, 50.0)
    assert 1 < urn_evidence(101, 100).rb < 1.02
    with pytest.raises(ValueError):
        urn_evidence(10, 10)


def test_pereira_stern_examples(ex6_base):
    post = posterior_params(ex6_base)
    assert pereira_stern_ev(ex6_base, post.mean) == pytest.approx(1.0)
    assert pereira_stern_ev(ex6_base, post.mean + 1.959964 * post.sd) == pytest.approx(0.05, abs=1e-6)


def test_pereira_stern_monte_carlo(ex6_base):
    post = posterior_params(ex6_base)
    draws = rng(21).normal(post.mean, post.sd, size=10**6)
    mu0 = 0.4
    hits = np.abs(draws - post.mean) >= abs(mu0 - post.mean)
    est, se = hits.mean(), math.sqrt(hits.mean() * (1 - hits.mean()) / hits.size)
    assert abs(pereira_stern_ev(ex6_base, mu0) - est) <= 3 * se
