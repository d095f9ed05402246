use proptest::prelude::*;

use ctxprob::complex::build_amplitude;
use ctxprob::hyperbolic::{build_hyperbolic_amplitude, hyperbolic_interference_transform};
use ctxprob::hypernum::{exp_j, polar, HyperbolicNumber as H};
use ctxprob::interference::{Branch, InterferenceCoefficients};
use ctxprob::model::{generate_kq, generate_random_model, Model, ModelDocument, RandomConstraints};
use ctxprob::prob::{
    classical_total_probability, transition_matrix, Event, FiniteKolmogorovSpace, Orientation, TransitionMatrix,
};

fn hnum() -> impl Strategy<Value = H> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| H::new(x, y))
}

fn space_and_events() -> impl Strategy<Value = (FiniteKolmogorovSpace, Event, Event, Event)> {
    (2usize..=9).prop_flat_map(|n| {
        (
            prop::collection::vec(0.01..1.0f64, n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(w, b, c, d)| {
                let total: f64 = w.iter().sum();
                let s = FiniteKolmogorovSpace::new(w.iter().enumerate().map(|(i, p)| (format!("w{i}"), p / total)))
                    .unwrap();
                let ev = |mask: &[bool]| s.event_of((0..n).filter(|&i| mask[i]));
                let (b, c, d) = (ev(&b), ev(&c), ev(&d));
                (s, b, c, d)
            })
    })
}

fn random_model() -> impl Strategy<Value = Model> {
    (any::<u64>(), 4usize..=8, any::<bool>()).prop_filter_map("generator gave up", |(seed, n, incompatible)| {
        let c = RandomConstraints {
            double_stochastic: None,
            incompatible,
        };
        generate_random_model(seed, n, [2, 2], c).ok()?.compile().ok()
    })
}

fn close(a: H, b: H, scale: f64) -> bool {
    (a - b).max_abs_component() <= 1e-12 * scale.max(1.0)
}

proptest! {
    #[test]
    fn hyperbolic_ring_laws(a in hnum(), b in hnum(), c in hnum()) {
        let scale = (a.max_abs_component() + 1.0) * (b.max_abs_component() + 1.0) * (c.max_abs_component() + 1.0);
        prop_assert!(close(a * b, b * a, scale));
        prop_assert!(close((a * b) * c, a * (b * c), scale));
        prop_assert!(close(a * (b + c), a * b + a * c, scale));
        prop_assert_eq!(a.conj().conj(), a);
        prop_assert!(close((a * b).conj(), a.conj() * b.conj(), scale));
    }

    #[test]
    fn hyperbolic_norm_is_multiplicative(a in hnum(), b in hnum()) {
        let lhs = (a * b).norm_sq();
        let rhs = a.norm_sq() * b.norm_sq();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        if a.is_positive() && b.is_positive() {
            prop_assert!((a * b).is_positive());
        }
    }

    #[test]
    fn polar_round_trip(a in hnum()) {
        prop_assume!(a.norm_sq() > 1e-6 * (a.x * a.x));
        let p = polar(a).unwrap();
        let back = p.to_number().unwrap();
        prop_assert!(close(back, a, a.max_abs_component()));
        let one = a * p.inverse().to_number().unwrap();
        prop_assert!(close(one, H::ONE, 1e3));
    }

    #[test]
    fn exp_j_is_a_homomorphism(s in -20.0..20.0f64, t in -20.0..20.0f64) {
        let lhs = exp_j(s + t).unwrap();
        let rhs = exp_j(s).unwrap() * exp_j(t).unwrap();
        // The product cancels terms of size cosh s · cosh t.
        prop_assert!(close(lhs, rhs, 2.0 * s.cosh() * t.cosh()));
        prop_assert!((exp_j(s).unwrap().norm_sq() - 1.0).abs() <= 1e-9 * s.cosh().powi(2));
    }

    #[test]
    fn event_algebra((s, b, c, _d) in space_and_events()) {
        prop_assert_eq!(b.union(&c).complement(), b.complement().intersection(&c.complement()));
        let whole = s.probability(&b.union(&c)) + s.probability(&b.intersection(&c));
        prop_assert!((whole - s.probability(&b) - s.probability(&c)).abs() < 1e-12);
        prop_assert!((s.probability(&b) + s.probability(&b.complement()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bayes_and_total_probability((s, b, c, d) in space_and_events()) {
        prop_assume!(s.probability(&c) > 0.0);
        let p = s.conditional(&b, &c).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let joint = s.probability(&b.intersection(&c));
        prop_assert!((p * s.probability(&c) - joint).abs() < 1e-12);
        // Splitting C by D and its complement.
        let parts = [c.intersection(&d), c.difference(&d)];
        let total: f64 = parts
            .iter()
            .filter(|e| s.probability(e) > 0.0)
            .map(|e| s.conditional(&b, e).unwrap() * s.conditional(e, &c).unwrap())
            .sum();
        prop_assert!((total - p).abs() < 1e-12);
    }

    #[test]
    fn delta_sums_to_zero_and_matches_classical_gap(m in random_model()) {
        let (s, pair) = (&m.space, &m.pair);
        let members: Vec<Event> = m.contexts.iter().map(|c| c.event.clone()).collect();
        for ctx in members {
            let Ok(co) = InterferenceCoefficients::compute(s, pair, &ctx) else { continue };
            prop_assert!(co.delta.iter().sum::<f64>().abs() < 1e-10);
            // Conditioning on A_y ∩ C recovers P(B_x|C) exactly.
            let classical = classical_total_probability(s, pair, &ctx).unwrap();
            for (x, b) in pair.b_partition().iter().enumerate() {
                prop_assert!((classical[x] - s.conditional(b, &ctx).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_amplitudes_obey_born_rule(m in random_model(), conj in any::<bool>()) {
        let (s, pair) = (&m.space, &m.pair);
        let branch = if conj { Branch::Conjugate } else { Branch::Principal };
        for c in &m.contexts {
            let Ok(co) = InterferenceCoefficients::compute(s, pair, &c.event) else { continue };
            if co.class().is_trigonometric() {
                let psi = build_amplitude(s, pair, &c.event, branch).unwrap();
                for (x, b) in pair.b_partition().iter().enumerate() {
                    prop_assert!((psi.components[x].norm_sqr() - s.conditional(b, &c.event).unwrap()).abs() < 1e-10);
                }
                prop_assert!((psi.norm_sq() - 1.0).abs() < 1e-10);
            }
            if co.class().is_hyperbolic() {
                let psi = build_hyperbolic_amplitude(s, pair, &c.event).unwrap();
                let total: f64 = psi.probabilities().iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn model_documents_round_trip(m in random_model(), q in 0.001..0.499f64) {
        for doc in [m.document.clone(), generate_kq(q).unwrap()] {
            let text = doc.to_canonical_json();
            let back = ModelDocument::from_json_str(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.to_canonical_json(), text);
        }
    }

    #[test]
    fn transform_sums_to_one(p in 0.0..1.0f64, t in 0.0..1.0f64, theta in 0.0..3.0f64, pos in any::<bool>()) {
        let m = TransitionMatrix::from_rows(vec![vec![t, 1.0 - t], vec![1.0 - t, t]], Orientation::BGivenA).unwrap();
        let eps = if pos { 1 } else { -1 };
        if let Ok(r) = hyperbolic_interference_transform([p, 1.0 - p], &m, theta, eps) {
            prop_assert!((r[0] + r[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kq_transition_matrix(q in 0.001..0.499f64) {
        let m = generate_kq(q).unwrap().compile().unwrap();
        let p = transition_matrix(&m.space, &m.pair, Orientation::BGivenA).unwrap();
        prop_assert!((p.get(0, 0) - 2.0 * q).abs() < 1e-12);
        prop_assert!((p.get(0, 1) - (1.0 - 2.0 * q)).abs() < 1e-12);
        prop_assert!((p.get(1, 1) - 2.0 * q).abs() < 1e-12);
    }
}
