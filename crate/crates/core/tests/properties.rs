//! Property tests for the invariants of each module.

use approxagg::agenda::{affine_to_truth_functional, preference_agenda, AffineAgenda, Conclusion, ConclusionKind, TruthFunctionalAgenda};
use approxagg::bitfn::all_functions;
use approxagg::fourier::{generalized_holder, FourierSpectrum};
use approxagg::indices::{di_exact, di_mc, ic_exact, redirect_to_consistent};
use approxagg::mechanism::{closed_families, mech_distance_exact, perturb, table_from_index, ProfileSpace, TableMechanism};
use approxagg::oracle::enumerate_ci;
use approxagg::theorems::{check_relax, Verdict};
use approxagg::{Agenda, BoolFn, Coalition, IndependentMechanism, Mechanism, Rational};
use proptest::prelude::*;

fn bool_fn(n: u32, seed_words: &[u64]) -> BoolFn {
    let words = (1usize << n).div_ceil(64);
    let mut w: Vec<u64> = seed_words.iter().copied().cycle().take(words).collect();
    if n < 6 {
        w[0] &= (1u64 << (1u32 << n)) - 1;
    }
    BoolFn::from_words(n, w).unwrap()
}

fn arb_fn(max_n: u32) -> impl Strategy<Value = BoolFn> {
    (1..=max_n, prop::collection::vec(any::<u64>(), 1..=64)).prop_map(|(n, w)| bool_fn(n, &w))
}

fn arb_fns(n: u32, count: usize) -> impl Strategy<Value = Vec<BoolFn>> {
    prop::collection::vec(prop::collection::vec(any::<u64>(), 1..=2), count)
        .prop_map(move |ws| ws.iter().map(|w| bool_fn(n, w)).collect())
}

fn arb_table(agenda: Agenda, n: u32) -> impl Strategy<Value = TableMechanism> {
    let size = ProfileSpace::new(&agenda, n).unwrap().size().unwrap() as usize;
    let len = agenda.len();
    prop::collection::vec(0..len, size).prop_map(move |picks| {
        let outputs = picks.iter().map(|&k| agenda.consistent()[k]).collect();
        TableMechanism::from_outputs(&agenda, n, outputs).unwrap()
    })
}

fn any_opinion_table(agenda: Agenda, n: u32) -> impl Strategy<Value = TableMechanism> {
    let size = ProfileSpace::new(&agenda, n).unwrap().size().unwrap() as usize;
    let full = 1u32 << agenda.issues();
    prop::collection::vec(0..full, size)
        .prop_map(move |outputs| TableMechanism::from_outputs(&agenda, n, outputs).unwrap())
}

/// `Pr[F(X)_j ≠ G(X)_j]` summed over issues, under impartial culture.
fn issue_disagreement_sum(f: &Mechanism, g: &Mechanism, agenda: &Agenda) -> Rational {
    let n = f.voters();
    let space = ProfileSpace::new(agenda, n).unwrap();
    let total = space.size().unwrap();
    let diff = space.sum(|p, cols| (f.output(p, cols) ^ g.output(p, cols)).count_ones() as u64).unwrap();
    Rational::ratio(diff, total)
}

#[test]
fn parseval_and_inverse_exhaustive() {
    for n in 1..=4 {
        for f in all_functions(n).unwrap() {
            let s = FourierSpectrum::transform(&f);
            assert_eq!(s.parseval_sum(), Rational::one());
            assert_eq!(s.inverse().unwrap(), f);
        }
    }
}

#[test]
fn closed_families_are_consistent() {
    let agendas = [Agenda::conjunction(2).unwrap(), Agenda::xor(2).unwrap(), Agenda::id()];
    for a in &agendas {
        for n in 1..=3 {
            for m in closed_families(a, n).unwrap() {
                assert!(ic_exact(&m.clone().into(), a).unwrap().is_zero(), "{} {}", a.id_string(), m.id_string());
            }
        }
    }
}

#[test]
fn conjunction_members_without_zero_premise_are_oligarchies() {
    let a = Agenda::conjunction(2).unwrap();
    for n in 2..=3 {
        let fam = enumerate_ci(&a, n).unwrap();
        for m in &fam.mechanisms {
            if m.fns()[..2].iter().any(|f| f.is_constant() == Some(false)) {
                continue;
            }
            let f = &m.fns()[0];
            assert!(m.fns().iter().all(|g| g == f), "{}", m.id_string());
            assert!(f.classify().oligarchy.is_some(), "{}", m.id_string());
        }
    }
}

#[test]
fn agenda_sizes() {
    for k in 1..=8 {
        assert_eq!(Agenda::conjunction(k).unwrap().len(), 1 << k);
        assert_eq!(Agenda::xor(k).unwrap().len(), 1 << k);
    }
    for (s, fact) in [(3, 6), (4, 24), (5, 120)] {
        let p = preference_agenda(s).unwrap();
        assert_eq!(p.len(), fact);
        let full = (1u32 << p.issues()) - 1;
        assert!(p.consistent().iter().all(|&o| p.is_consistent(o ^ full)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn parseval_random(f in arb_fn(12)) {
        let s = FourierSpectrum::transform(&f);
        prop_assert_eq!(s.parseval_sum(), Rational::one());
        prop_assert_eq!(s.inverse().unwrap(), f);
    }

    #[test]
    fn holder_inequality(fs in (1..=5u32, 2..=4usize).prop_flat_map(|(n, k)| arb_fns(n, k))) {
        let spectra: Vec<FourierSpectrum> = fs.iter().map(FourierSpectrum::transform).collect();
        let (lhs, rhs) = generalized_holder(&spectra).unwrap();
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn junta_close_random(f in arb_fn(10), mask in any::<u32>()) {
        let n = f.arity();
        let j = Coalition::new(mask & ((1 << n) - 1), n).unwrap();
        prop_assert!(approxagg::theorems::check_junta_close(&f, j).unwrap().holds());
    }

    #[test]
    fn junta_projection_reads_only_junta(f in arb_fn(8), mask in any::<u32>(), x in any::<u32>(), noise in any::<u32>()) {
        let n = f.arity();
        let all = (1u32 << n) - 1;
        let j = Coalition::new(mask & all, n).unwrap();
        let p = f.junta_projection(j).unwrap();
        let x = x & all;
        let y = x ^ (noise & all & !j.mask());
        prop_assert_eq!(p.get(x), p.get(y));
    }

    #[test]
    fn zero_influence_outside_junta_is_fixed(base in arb_fn(6), mask in any::<u32>()) {
        let n = base.arity();
        let j = Coalition::new(mask & ((1 << n) - 1), n).unwrap();
        let g = base.junta_projection(j).unwrap();
        prop_assert!(j.complement(n).voters().all(|i| g.influence(i).unwrap().is_zero()));
        prop_assert_eq!(g.junta_projection(j).unwrap(), g);
    }

    #[test]
    fn oligarchy_classified(n in 1..=8u32, mask in any::<u32>()) {
        let s = Coalition::new(mask & ((1 << n) - 1), n).unwrap();
        let f = BoolFn::oligarchy(s, n).unwrap();
        prop_assert_eq!(f.classify().oligarchy, Some(s));
    }

    #[test]
    fn affine_round_trip(m in 1..=10u32, rows in prop::collection::vec(any::<u32>(), 0..=10), shift in any::<u32>()) {
        let full = (1u32 << m) - 1;
        let rows: Vec<u32> = rows.into_iter().map(|r| r & full).take(m as usize).collect();
        let sys = AffineAgenda::new(m, rows, shift & full);
        prop_assume!(sys.is_ok());
        let sys = sys.unwrap();
        let (tf, rel) = affine_to_truth_functional(&sys).unwrap();
        prop_assert_eq!(rel.apply_agenda(&tf.expand()).unwrap(), sys.expand());
    }

    #[test]
    fn premise_marginals_are_half(
        k in 1..=5u32,
        conclusions in prop::collection::vec((any::<bool>(), any::<u32>(), any::<u32>(), any::<bool>()), 0..=4),
    ) {
        let full = (1u32 << k) - 1;
        let cs: Vec<Conclusion> = conclusions
            .into_iter()
            .filter(|&(_, inputs, _, _)| inputs & full != 0)
            .map(|(and, inputs, neg, out)| {
                let kind = if and { ConclusionKind::And } else { ConclusionKind::Xor };
                Conclusion::new(kind, inputs & full, neg & inputs & full, out)
            })
            .collect();
        let tf = TruthFunctionalAgenda::new(k, cs).unwrap();
        let a = tf.expand();
        for j in 1..=k {
            prop_assert_eq!(a.issue_marginal(j).unwrap(), Rational::ratio(1, 2));
        }
    }

    #[test]
    fn ic_lipschitz_in_issue_disagreement(
        xor in any::<bool>(),
        n in 1..=3u32,
        codes in prop::collection::vec(any::<u64>(), 6),
    ) {
        let a = if xor { Agenda::xor(2).unwrap() } else { Agenda::conjunction(2).unwrap() };
        let per = 1u64 << (1u32 << n);
        let mk = |c: &[u64]| -> Mechanism {
            IndependentMechanism::new(c.iter().map(|&x| table_from_index(n, x % per)).collect()).unwrap().into()
        };
        let f = mk(&codes[..3]);
        let g = mk(&codes[3..]);
        let gap = ic_exact(&f, &a).unwrap() - ic_exact(&g, &a).unwrap();
        prop_assert!(gap.abs() <= issue_disagreement_sum(&f, &g, &a));
    }

    #[test]
    fn distance_is_a_metric(n in 1..=3u32, codes in prop::collection::vec(any::<u64>(), 9)) {
        let a = Agenda::conjunction(2).unwrap();
        let per = 1u64 << (1u32 << n);
        let ms: Vec<Mechanism> = codes
            .chunks(3)
            .map(|c| IndependentMechanism::new(c.iter().map(|&x| table_from_index(n, x % per)).collect()).unwrap().into())
            .collect();
        let d = |x: &Mechanism, y: &Mechanism| mech_distance_exact(x, y, &a).unwrap();
        prop_assert_eq!(d(&ms[0], &ms[1]), d(&ms[1], &ms[0]));
        prop_assert!(d(&ms[0], &ms[2]) <= d(&ms[0], &ms[1]) + d(&ms[1], &ms[2]));
        prop_assert!(d(&ms[0], &ms[0]).is_zero());
    }

    #[test]
    fn zero_rate_perturbation_is_identity(n in 1..=3u32, codes in prop::collection::vec(any::<u64>(), 3), seed in any::<u64>()) {
        let a = Agenda::conjunction(2).unwrap();
        let per = 1u64 << (1u32 << n);
        let f: Mechanism = IndependentMechanism::new(codes.iter().map(|&x| table_from_index(n, x % per)).collect()).unwrap().into();
        let t: Mechanism = perturb(&f, &a, 0.0, seed).unwrap().into();
        prop_assert!(mech_distance_exact(&f, &t, &a).unwrap().is_zero());
    }

    #[test]
    fn redirect_distance_equals_ic(t in any_opinion_table(Agenda::conjunction(2).unwrap(), 2)) {
        let a = Agenda::conjunction(2).unwrap();
        let f: Mechanism = t.into();
        let h: Mechanism = redirect_to_consistent(&f, &a).unwrap().into();
        prop_assert!(ic_exact(&h, &a).unwrap().is_zero());
        prop_assert_eq!(mech_distance_exact(&f, &h, &a).unwrap(), ic_exact(&f, &a).unwrap());
    }

    #[test]
    fn relax_with_zero_beta_on_independent_inputs(codes in prop::collection::vec(any::<u64>(), 3), eps in 1..=64u64) {
        let a = Agenda::conjunction(2).unwrap();
        let f: Mechanism = IndependentMechanism::new(codes.iter().map(|&x| table_from_index(2, x % 16)).collect()).unwrap().into();
        let r = check_relax(&f, &a, &Rational::ratio(eps, 64), Some(0.0)).unwrap();
        prop_assert!(r.di.clone().unwrap().is_zero());
        prop_assert_ne!(r.verdict(), Verdict::Violated);
        if r.verdict() == Verdict::Satisfied {
            prop_assert!(r.checks[0].lhs.is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn di_estimates_cover_exact(t in arb_table(Agenda::conjunction(2).unwrap(), 2), issue in 1..=3u32) {
        let a = Agenda::conjunction(2).unwrap();
        let f: Mechanism = t.into();
        let exact = di_exact(&f, &a, issue).unwrap().to_f64();
        let covered = (0..100).filter(|&s| di_mc(&f, &a, issue, 20_000, s).unwrap().contains(exact)).count();
        prop_assert!(covered >= 99, "{covered}/100");
    }
}
