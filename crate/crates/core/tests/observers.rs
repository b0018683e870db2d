use lieobs::dynamics::{linearization_spectrum, plant_rhs};
use lieobs::eigen::Eigenvalue;
use lieobs::group::{algebra_defect, skew3, tangency_defect, AlgebraElement, GroupElement, GroupFamily};
use lieobs::observer::{
    lfso_direct_rhs, lfso_passive_rhs, lfso_rhs_projection_form, lpso_direct_rhs, lpso_passive_rhs,
    validate_gains, ChainState, LogMethod, Observer, ObserverGains, ObserverKind,
};
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-r..r)
}

fn rot(v: [f64; 3]) -> GroupElement {
    skew3(v).exp().unwrap()
}

/// Rotation by exactly `theta` about the normalised `axis`.
fn rot_by(axis: [f64; 3], theta: f64) -> GroupElement {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    rot([theta * axis[0] / n, theta * axis[1] / n, theta * axis[2] / n])
}

fn nonzero_axis() -> impl Strategy<Value = [f64; 3]> {
    vec3(1.0).prop_filter("nonzero", |v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2] > 1e-4)
}

fn gains(a: &[f64]) -> ObserverGains {
    ObserverGains::new(a.to_vec()).unwrap()
}

proptest! {
    #[test]
    fn observers_reproduce_the_plant_at_zero_error(
        x in vec3(2.0),
        w in vec3(2.0),
        j in vec3(2.0),
        u in vec3(2.0),
    ) {
        let x = rot(x);
        let u = skew3(u);
        let full = ChainState::full_state(x.clone());
        let plant = plant_rhs(&full, &u).unwrap();
        for f in [lfso_passive_rhs, lfso_direct_rhs] {
            let rhs = f(&x, &x, &u, &gains(&[1.3])).unwrap();
            prop_assert!((&rhs - &plant[0]).max_abs() <= 1e-14);
        }
        let chain = ChainState::new(x.clone(), vec![skew3(w), skew3(j)]).unwrap();
        let plant = plant_rhs(&chain, &u).unwrap();
        for f in [lpso_passive_rhs, lpso_direct_rhs] {
            let rhs = f(&chain, &x, &u, &gains(&[1.0, 3.0, 3.0])).unwrap();
            for (a, b) in rhs.iter().zip(&plant) {
                prop_assert!((a - b).max_abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn observer_fields_are_tangent(
        xhat in vec3(1.5),
        y in vec3(1.5),
        w in vec3(2.0),
        u in vec3(2.0),
        k in 0usize..4,
    ) {
        let kind = ObserverKind::ALL[k];
        let xhat = rot(xhat);
        let y = rot(y);
        let g = if kind.is_full_state() { gains(&[0.7]) } else { gains(&[1.0, 2.0]) };
        let state = if kind.is_full_state() {
            ChainState::full_state(xhat.clone())
        } else {
            ChainState::new(xhat.clone(), vec![skew3(w)]).unwrap()
        };
        let obs = Observer::new(kind, g).unwrap();
        // both rotations lie within angle 1.5·√3 of I, so Y⁻¹X̂ may hit the cut
        let Ok(rhs) = obs.rhs(&state, &y, &skew3(u)) else { return Ok(()); };
        let norm = rhs[0].operator_norm();
        prop_assert!(tangency_defect(&xhat, &rhs[0]).unwrap() <= 1e-8 * norm);
        for slot in &rhs[1..] {
            prop_assert!(algebra_defect(slot, GroupFamily::so3()).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn closed_form_and_general_logs_agree(
        xhat in vec3(1.5),
        axis in nonzero_axis(),
        theta in 0.01f64..(core::f64::consts::PI - 0.1),
        u in vec3(1.0),
        k in 0usize..4,
    ) {
        let kind = ObserverKind::ALL[k];
        let xhat = rot(xhat);
        // Y chosen so that Y⁻¹X̂ is a rotation by theta
        let y = xhat.compose(&rot_by(axis, theta).inverse().unwrap()).unwrap();
        let (g, state) = if kind.is_full_state() {
            (gains(&[1.0]), ChainState::full_state(xhat.clone()))
        } else {
            (gains(&[1.0, 2.0]), ChainState::new(xhat.clone(), vec![skew3(u)]).unwrap())
        };
        let general = Observer::new(kind, g).unwrap();
        let closed = general.clone().with_log_method(LogMethod::So3ClosedForm);
        let a = general.rhs(&state, &y, &skew3(u)).unwrap();
        let b = closed.rhs(&state, &y, &skew3(u)).unwrap();
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).operator_norm() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn log_form_matches_projection_form(
        xhat in vec3(2.0),
        axis in nonzero_axis(),
        theta in 0.01f64..(core::f64::consts::PI - 0.1),
        u in vec3(2.0),
        a0 in 0.1f64..3.0,
        passive in any::<bool>(),
    ) {
        let xhat = rot(xhat);
        let y = xhat.compose(&rot_by(axis, theta).inverse().unwrap()).unwrap();
        let u = skew3(u);
        let (kind, f): (_, fn(&GroupElement, &GroupElement, &AlgebraElement, &ObserverGains) -> _) = if passive {
            (ObserverKind::LfsoPassive, lfso_passive_rhs)
        } else {
            (ObserverKind::LfsoDirect, lfso_direct_rhs)
        };
        let log_form = f(&xhat, &y, &u, &gains(&[a0])).unwrap();
        let proj_form = lfso_rhs_projection_form(kind, &xhat, &y, &u, a0).unwrap();
        prop_assert!((&log_form - &proj_form).operator_norm() <= 1e-9);
    }
}

/// Monic real polynomial with the given roots, lowest coefficient first.
fn poly_from_roots(roots: &[Eigenvalue]) -> Vec<f64> {
    // complex multiplication of (s − z) factors, kept as (re, im) pairs
    let mut c: Vec<(f64, f64)> = vec![(1.0, 0.0)];
    for z in roots {
        let mut next = vec![(0.0, 0.0); c.len() + 1];
        for (k, &(re, im)) in c.iter().enumerate() {
            next[k + 1].0 += re;
            next[k + 1].1 += im;
            next[k].0 -= z.re * re - z.im * im;
            next[k].1 -= z.re * im + z.im * re;
        }
        c = next;
    }
    assert!(c.iter().all(|&(_, im)| im.abs() < 1e-9));
    c.iter().map(|&(re, _)| re).collect()
}

fn hurwitz_roots() -> impl Strategy<Value = Vec<Eigenvalue>> {
    (2usize..=4)
        .prop_flat_map(|d| {
            prop::collection::vec((-3.0f64..-0.2, 0.0f64..2.0, any::<bool>()), d)
                .prop_map(move |parts| (d, parts))
        })
        .prop_map(|(d, parts)| {
            let mut roots = Vec::with_capacity(d);
            for (re, im, complex) in parts {
                if roots.len() == d {
                    break;
                }
                if complex && im > 0.3 && roots.len() + 2 <= d {
                    roots.push(Eigenvalue { re, im });
                    roots.push(Eigenvalue { re, im: -im });
                } else {
                    roots.push(Eigenvalue::real(re));
                }
            }
            while roots.len() < d {
                roots.push(Eigenvalue::real(-1.0 - roots.len() as f64));
            }
            roots
        })
        .prop_filter("well separated roots", |r| {
            r.iter()
                .enumerate()
                .all(|(i, a)| r[i + 1..].iter().all(|b| a.distance(b) > 0.3))
        })
}

fn assert_matches_with_multiplicity(found: &[Eigenvalue], roots: &[Eigenvalue], n: usize, tol: f64) {
    assert_eq!(found.len(), roots.len() * n);
    let mut used = vec![false; found.len()];
    for r in roots {
        for _ in 0..n {
            let (idx, dist) = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, z)| (i, z.distance(r)))
                .fold((usize::MAX, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
            assert!(dist <= tol, "root {r:?} unmatched, nearest at {dist}");
            used[idx] = true;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn linearization_spectrum_repeats_polynomial_roots(roots in hurwitz_roots(), n in 1usize..=3) {
        let coeffs = poly_from_roots(&roots);
        let g = ObserverGains::new(coeffs[..roots.len()].to_vec()).unwrap();
        let report = validate_gains(&g);
        prop_assert!(report.hurwitz);
        assert_matches_with_multiplicity(&report.roots, &roots, 1, 1e-8);
        let spec = linearization_spectrum(&g, n).unwrap();
        assert_matches_with_multiplicity(&spec, &roots, n, 1e-8);
        prop_assert!(spec.iter().all(|z| z.re < 0.0));
    }
}

#[test]
fn unstable_or_marginal_gains_are_rejected() {
    for a in [[-1.0, 2.0], [1.0, -0.5], [0.0, 1.0], [1.0, 0.0]] {
        assert!(!validate_gains(&gains(&a)).hurwitz, "{a:?}");
        assert!(Observer::new(ObserverKind::LpsoDirect, gains(&a)).is_err());
    }
    assert!(Observer::new(ObserverKind::LfsoPassive, gains(&[0.0])).is_err());
}

#[test]
fn identity_measurement_drives_estimate_toward_identity() {
    let xhat = rot([0.0, 0.0, 0.3]);
    let id = GroupElement::identity(GroupFamily::so3());
    let zero = AlgebraElement::zero(GroupFamily::so3());
    let rhs = lfso_passive_rhs(&xhat, &id, &zero, &gains(&[1.0])).unwrap();
    let want = (xhat.mat() * skew3([0.0, 0.0, 0.3]).mat()).scale(-1.0);
    assert!((&rhs - &want).max_abs() < 1e-12);
}
