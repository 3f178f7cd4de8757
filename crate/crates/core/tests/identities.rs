use rug::Rational;

use resurgence::borel::{BorelClosedForm, Side};
use resurgence::exact::series_coefficients;
use resurgence::habiro::{verify_strange, StrangeFamily};
use resurgence::periodic::{chi_function, gcd, make_periodic, pair_set, verify_decomposition, ChiParams};
use resurgence::qseries::{theta_radial_limit, verify_lift, verify_period_identity, ThetaSpec};
use resurgence::resum::{lateral_sum, median_sum, optimal_truncation};
use resurgence::{Cx, Error, PrecisionContext};

fn coprime_pairs(limit: i64) -> Vec<(i64, i64)> {
    (2..=limit)
        .flat_map(|s| (s + 1..=limit / s).map(move |t| (s, t)))
        .filter(|&(s, t)| gcd(s, t) == 1)
        .collect()
}

#[test]
fn decomposition_holds_for_all_small_pairs() {
    let ctx = PrecisionContext::new(64, 1e-12);
    for (s, t) in coprime_pairs(40) {
        for pair in pair_set(s, t).unwrap().pairs {
            let r = verify_decomposition(s, t, pair, &ctx).unwrap();
            assert!(r.pass(), "(s,t) = ({s},{t}), pair {pair:?}: {}", r.max_residual);
        }
    }
}

#[test]
fn lift_identity_both_weights() {
    let ctx = PrecisionContext::default();
    for (s, t) in [(2, 3), (2, 5), (3, 4)] {
        for (n, m) in pair_set(s, t).unwrap().pairs {
            let p = ChiParams::new(s, t, n, m).unwrap();
            for nu in [0, 1] {
                let r = verify_lift(p, &Cx::from_f64(128, 0.1, 0.7), nu, &ctx).unwrap();
                assert!(r.residual() < 1e-25, "({s},{t},{n},{m}) nu = {nu}: {}", r.residual());
            }
        }
    }
}

#[test]
fn strange_identities_at_general_roots() {
    let ctx = PrecisionContext::default();
    for (j, n) in [(2, 5), (3, 7), (5, 12), (-1, 3)] {
        let alpha = Rational::from((j, n));
        let r = verify_strange(StrangeFamily::Trefoil, &alpha, &ctx).unwrap();
        assert!(r.residual < 1e-25, "trefoil at {alpha}: {}", r.residual);
        let r = verify_strange(StrangeFamily::Hikami { u: 2, l: 1 }, &alpha, &ctx).unwrap();
        assert!(r.residual < 1e-25, "hikami at {alpha}: {}", r.residual);
    }
}

#[test]
fn radial_limit_is_periodic_in_alpha() {
    let ctx = PrecisionContext::default();
    let f = chi_function(ChiParams::new(2, 3, 1, 1).unwrap()).unwrap();
    let spec = ThetaSpec::periodic(1, 24, 1, f.with_scale(Rational::from((-1, 2))).unwrap()).unwrap();
    // q^{(n^2-1)/24} is invariant under alpha -> alpha + 1 since 24 | n^2 - 1 on the support
    let a = theta_radial_limit(&spec, &Rational::from((1, 5)), &ctx).unwrap();
    let b = theta_radial_limit(&spec, &Rational::from((6, 5)), &ctx).unwrap();
    assert!(a.dist(&b) < 1e-30);
}

#[test]
fn lateral_sums_approach_optimal_truncation_for_large_x() {
    let f = make_periodic(Rational::from((-1, 2)), 12, 1, 5).unwrap();
    let series = series_coefficients(&ThetaSpec::periodic(1, 24, 1, f).unwrap(), 200).unwrap();
    let ctx = PrecisionContext::default();
    let x = Cx::from_f64(128, 30.0, 0.0);
    let med = median_sum(&series, &x, &ctx).unwrap();
    let trunc = optimal_truncation(&series, &x).unwrap();
    assert!(med.value.dist(&trunc.value) <= 2.0 * trunc.err.max(1e-30));
}

#[test]
fn domain_and_branch_errors() {
    let f = make_periodic(Rational::from((-1, 2)), 12, 1, 5).unwrap();
    let series = series_coefficients(&ThetaSpec::periodic(1, 24, 1, f).unwrap(), 4).unwrap();
    let ctx = PrecisionContext::default();
    assert!(matches!(median_sum(&series, &Cx::from_f64(128, -1.0, 0.0), &ctx), Err(Error::Domain(_))));
    assert!(matches!(
        lateral_sum(&series, &Cx::from_f64(128, 0.0, 1.0), Side::Plus, &ctx),
        Err(Error::Domain(_))
    ));
    let g = BorelClosedForm::new(&series);
    // beyond the first singularity on the positive axis the side is required
    let p = Cx::from_f64(128, 5.0, 0.0);
    assert!(matches!(g.eval(&p, None, &ctx), Err(Error::BranchAmbiguity(_))));
    let up = g.eval(&p, Some(Side::Plus), &ctx).unwrap().value;
    let down = g.eval(&p, Some(Side::Minus), &ctx).unwrap().value;
    assert!(up.dist(&down.conj()) < 1e-30);
    assert!(ChiParams::new(2, 4, 1, 1).is_err());
    assert!(make_periodic(Rational::from(1), 12, 5, 7).is_err());
}

#[test]
fn period_identity_with_full_s_matrix() {
    let ctx = PrecisionContext::default();
    for (s, t) in [(2, 5), (3, 4)] {
        for (n, m) in pair_set(s, t).unwrap().pairs {
            let p = ChiParams::new(s, t, n, m).unwrap();
            let r = verify_period_identity(p, &Cx::from_f64(128, 0.3, -0.8), &ctx).unwrap();
            assert!(r.residual() < 1e-15, "({s},{t},{n},{m}): {}", r.residual());
        }
    }
}
