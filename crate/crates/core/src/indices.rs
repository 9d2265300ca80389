//! Inconsistency and dependency indices, exactly and by Monte Carlo.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::agenda::{Agenda, AgendaKind, MAX_ISSUES};
use crate::bitfn::{BoolFn, MAX_ARITY};
use crate::error::{Error, Result};
use crate::mechanism::{check_dims, IndependentMechanism, Mechanism, ProfileSpace, TableMechanism};
use crate::montecarlo::{estimate_mean, substream, Estimate};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    Ic,
    Di,
    DiMax,
    IcTilde,
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexKind::Ic => "ic",
            IndexKind::Di => "di",
            IndexKind::DiMax => "di_max",
            IndexKind::IcTilde => "ic_tilde",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IndexValue {
    Exact(Rational),
    Estimated(Estimate),
}

impl IndexValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            IndexValue::Exact(r) => r.to_f64(),
            IndexValue::Estimated(e) => e.mean,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            IndexValue::Exact(r) => Some(r),
            IndexValue::Estimated(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexReport {
    pub mechanism: String,
    pub agenda: String,
    pub kind: IndexKind,
    pub issue: Option<u32>,
    pub value: IndexValue,
}

impl IndexReport {
    pub const CSV_HEADER: &'static str = "mechanism,agenda,index,issue,mode,numerator,log2_denominator,denominator,value,samples,ci_low,ci_high,seed";

    pub fn csv_row(&self) -> String {
        let issue = self.issue.map(|j| j.to_string()).unwrap_or_default();
        let tail = match &self.value {
            IndexValue::Exact(r) => format!(
                "exact,{},{},{},{},,,,",
                r.numer(),
                r.log2_denominator().map(|d| d.to_string()).unwrap_or_default(),
                r.denom(),
                r.to_f64()
            ),
            IndexValue::Estimated(e) => {
                format!("mc,,,,{},{},{},{},{}", e.mean, e.samples, e.ci_low, e.ci_high, e.seed)
            }
        };
        format!("{},{},{},{issue},{tail}", csv_field(&self.mechanism), csv_field(&self.agenda), self.kind)
    }
}

/// Quotes a CSV field when it contains a separator.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn space_for<'a>(f: &Mechanism, agenda: &'a Agenda) -> Result<ProfileSpace<'a>> {
    check_dims(f, agenda, f.voters())?;
    ProfileSpace::new(agenda, f.voters())
}

fn report(f: &Mechanism, agenda: &Agenda, kind: IndexKind, issue: Option<u32>, value: IndexValue) -> IndexReport {
    IndexReport { mechanism: f.id_string(), agenda: agenda.id_string(), kind, issue, value }
}

/// `Pr_X[F(X) ∉ X]`.
pub fn ic_exact(f: &Mechanism, agenda: &Agenda) -> Result<Rational> {
    let space = space_for(f, agenda)?;
    let bad = space.sum(|p, c| !agenda.is_consistent(f.output(p, c)) as u64)?;
    Ok(Rational::ratio(bad, space.size().expect("within budget")))
}

pub fn ic_mc(f: &Mechanism, agenda: &Agenda, samples: u64, seed: u64) -> Result<Estimate> {
    let space = space_for(f, agenda)?;
    let m = agenda.issues() as usize;
    Ok(estimate_mean(seed, samples, 0, 1, |rng| {
        let mut cols = [0u32; MAX_ISSUES as usize];
        let p = space.sample(rng, &mut cols[..m]).unwrap_or(0);
        !agenda.is_consistent(f.output(p, &cols[..m])) as i64
    }))
}

pub fn inconsistency_index(f: &Mechanism, agenda: &Agenda, mode: Mode) -> Result<IndexReport> {
    let value = match mode {
        Mode::Exact => IndexValue::Exact(ic_exact(f, agenda)?),
        Mode::MonteCarlo { samples, seed } => IndexValue::Estimated(ic_mc(f, agenda, samples, seed)?),
    };
    Ok(report(f, agenda, IndexKind::Ic, None, value))
}

fn check_issue(agenda: &Agenda, issue: u32) -> Result<()> {
    if issue == 0 || issue > agenda.issues() {
        return Err(Error::IssueOutOfRange { issue, issues: agenda.issues() });
    }
    Ok(())
}

/// Per column value `c` of `issue`: (profiles with that column, how many
/// of them output 1 on `issue`).
fn column_groups(f: &Mechanism, agenda: &Agenda, issue: u32) -> Result<Vec<(u64, u64)>> {
    check_issue(agenda, issue)?;
    let space = space_for(f, agenda)?;
    let size = space.require(crate::mechanism::EXACT_CAP_LOG2, "exact dependency index", ", use --mode mc")?;
    if f.voters() > 20 {
        return Err(Error::Budget { what: "column grouping", log2_size: f.voters(), cap: 20, hint: "" });
    }
    let j = issue as usize - 1;
    let mut groups = vec![(0u64, 0u64); 1 << f.voters()];
    space.for_each(0, size, |p, c| {
        let g = &mut groups[c[j] as usize];
        g.0 += 1;
        g.1 += (f.output(p, c) >> j & 1) as u64;
    });
    Ok(groups)
}

/// `E_X Pr_Y[F(X)^j ≠ F(Y)^j | Y^j = X^j]`, grouped by the value of column `j`.
pub fn di_exact(f: &Mechanism, agenda: &Agenda, issue: u32) -> Result<Rational> {
    let groups = column_groups(f, agenda, issue)?;
    let total: u64 = groups.iter().map(|g| g.0).sum();
    Ok(groups
        .iter()
        .filter(|g| g.0 > 0)
        .map(|&(s, k)| Rational::new(2 * k * (s - k), s))
        .sum::<Rational>()
        / Rational::from_integer(total as i64))
}

struct Resampler {
    ops: Vec<u32>,
    by_bit: [Vec<usize>; 2],
    voters: u32,
}

impl Resampler {
    fn new(agenda: &Agenda, voters: u32, issue: u32) -> Self {
        let ops = agenda.consistent().to_vec();
        let j = issue - 1;
        let by_bit = [0, 1].map(|b| (0..ops.len()).filter(|&d| ops[d] >> j & 1 == b).collect());
        Resampler { ops, by_bit, voters }
    }

    /// Draws `X` and `Y` with `Y^j = X^j`; returns their profile indices.
    fn draw(&self, rng: &mut ChaCha8Rng, issue: u32, cx: &mut [u32], cy: &mut [u32]) -> (u64, u64) {
        let l = self.ops.len() as u64;
        let (mut ix, mut iy, mut scale) = (0u64, 0u64, 1u64);
        for i in 0..self.voters {
            let d = rng.gen_range(0..self.ops.len());
            let group = &self.by_bit[(self.ops[d] >> (issue - 1) & 1) as usize];
            let e = group[rng.gen_range(0..group.len())];
            for (j, (x, y)) in cx.iter_mut().zip(cy.iter_mut()).enumerate() {
                *x |= (self.ops[d] >> j & 1) << i;
                *y |= (self.ops[e] >> j & 1) << i;
            }
            ix = ix.wrapping_add(scale.wrapping_mul(d as u64));
            iy = iy.wrapping_add(scale.wrapping_mul(e as u64));
            scale = scale.wrapping_mul(l);
        }
        (ix, iy)
    }
}

pub fn di_mc(f: &Mechanism, agenda: &Agenda, issue: u32, samples: u64, seed: u64) -> Result<Estimate> {
    check_issue(agenda, issue)?;
    check_dims(f, agenda, f.voters())?;
    let m = agenda.issues() as usize;
    let rs = Resampler::new(agenda, f.voters(), issue);
    let j = issue - 1;
    Ok(estimate_mean(seed, samples, 0, 1, |rng| {
        let mut cx = [0u32; MAX_ISSUES as usize];
        let mut cy = [0u32; MAX_ISSUES as usize];
        let (ix, iy) = rs.draw(rng, issue, &mut cx[..m], &mut cy[..m]);
        ((f.output(ix, &cx[..m]) ^ f.output(iy, &cy[..m])) >> j & 1) as i64
    }))
}

pub fn dependency_index(f: &Mechanism, agenda: &Agenda, issue: u32, mode: Mode) -> Result<IndexReport> {
    let value = match mode {
        Mode::Exact => IndexValue::Exact(di_exact(f, agenda, issue)?),
        Mode::MonteCarlo { samples, seed } => IndexValue::Estimated(di_mc(f, agenda, issue, samples, seed)?),
    };
    Ok(report(f, agenda, IndexKind::Di, Some(issue), value))
}

/// `max_j DI^j`; the report names the maximising issue (smallest on ties).
pub fn dependency_index_max(f: &Mechanism, agenda: &Agenda, mode: Mode) -> Result<IndexReport> {
    let mut best: Option<IndexReport> = None;
    for j in 1..=agenda.issues() {
        let r = dependency_index(f, agenda, j, mode)?;
        let better = match (&best, &r.value) {
            (None, _) => true,
            (Some(b), IndexValue::Exact(v)) => b.value.exact().is_some_and(|bv| v > bv),
            (Some(b), IndexValue::Estimated(e)) => e.mean > b.value.to_f64(),
        };
        if better {
            best = Some(r);
        }
    }
    let mut r = best.expect("agenda has at least one issue");
    r.kind = IndexKind::DiMax;
    Ok(r)
}

pub fn di_max_exact(f: &Mechanism, agenda: &Agenda) -> Result<Rational> {
    (1..=agenda.issues())
        .map(|j| di_exact(f, agenda, j))
        .try_fold(Rational::zero(), |acc, d| Ok(acc.max(d?)))
}

/// Counts over the conclusion column `z = x¹ ∧ … ∧ x^m` of a conjunction
/// agenda: `(N1(z), N0(z))`, the premise matrices with that conclusion
/// column on which every `f^j(x^j) = 1`, respectively not.
fn conjunction_counts(premises: &[BoolFn]) -> Result<Vec<(u128, u128)>> {
    let m = premises.len() as u32;
    let n = premises.first().ok_or(Error::EmptyAgenda)?.arity();
    if let Some(f) = premises.iter().find(|f| f.arity() != n) {
        return Err(Error::ArityMismatch { left: n, right: f.arity() });
    }
    if n > 20 || m * n > 120 {
        return Err(Error::Budget { what: "optimal conclusion", log2_size: m * n, cap: 120, hint: "" });
    }
    let size = 1usize << n;
    let mut prod = vec![1i128; size];
    for f in premises {
        let mut a: Vec<i128> = (0..size as u32).map(|x| f.get(x) as i128).collect();
        for b in 0..n {
            for z in 0..size {
                if z >> b & 1 == 0 {
                    a[z] += a[z | 1 << b];
                }
            }
        }
        prod.iter_mut().zip(&a).for_each(|(p, v)| *p *= v);
    }
    for b in 0..n {
        for z in 0..size {
            if z >> b & 1 == 0 {
                prod[z] -= prod[z | 1 << b];
            }
        }
    }
    let base = (1i128 << m) - 1;
    Ok((0..size)
        .map(|z| {
            let total = base.pow(n - (z as u32).count_ones());
            (prod[z] as u128, (total - prod[z]) as u128)
        })
        .collect())
}

/// IC of `⟨f¹, …, f^m, h⟩` on the `m`-premise conjunction agenda.
pub fn ic_with_conclusion(premises: &[BoolFn], h: &BoolFn) -> Result<Rational> {
    let counts = conjunction_counts(premises)?;
    if h.arity() != premises[0].arity() {
        return Err(Error::ArityMismatch { left: premises[0].arity(), right: h.arity() });
    }
    let bad: u128 = counts
        .iter()
        .enumerate()
        .map(|(z, &(n1, n0))| if h.get(z as u32) { n0 } else { n1 })
        .sum();
    let bits = premises.len() as u32 * h.arity();
    Ok(Rational::new(bad, num_bigint::BigInt::from(1u8) << bits))
}

/// `min_h IC(⟨f¹, …, f^m, h⟩)` with the minimising `h`: `h(z) = 1` iff all
/// premises accept with conditional probability at least one half.
pub fn min_ic_over_conclusion(premises: &[BoolFn]) -> Result<(Rational, BoolFn)> {
    let counts = conjunction_counts(premises)?;
    let n = premises[0].arity();
    let h = BoolFn::from_fn(n, |z| {
        let (n1, n0) = counts[z as usize];
        n1 >= n0
    })?;
    let bad: u128 = counts.iter().map(|&(n1, n0)| n1.min(n0)).sum();
    let bits = premises.len() as u32 * n;
    Ok((Rational::new(bad, num_bigint::BigInt::from(1u8) << bits), h))
}

/// One-shot test: draw a profile, accept iff the output is consistent.
pub fn consistency_test(f: &Mechanism, agenda: &Agenda, seed: u64) -> Result<bool> {
    let space = space_for(f, agenda)?;
    let m = agenda.issues() as usize;
    let mut rng = substream(seed, 0);
    let mut cols = [0u32; MAX_ISSUES as usize];
    let p = space.sample(&mut rng, &mut cols[..m]).unwrap_or(0);
    Ok(agenda.is_consistent(f.output(p, &cols[..m])))
}

/// One-shot test: redraw every voter's opinion keeping its answer on
/// `issue`; accept iff the aggregate answer on `issue` is unchanged.
pub fn independence_test(f: &Mechanism, agenda: &Agenda, issue: u32, seed: u64) -> Result<bool> {
    check_issue(agenda, issue)?;
    check_dims(f, agenda, f.voters())?;
    let m = agenda.issues() as usize;
    let rs = Resampler::new(agenda, f.voters(), issue);
    let mut rng = substream(seed, 0);
    let mut cx = [0u32; MAX_ISSUES as usize];
    let mut cy = [0u32; MAX_ISSUES as usize];
    let (ix, iy) = rs.draw(&mut rng, issue, &mut cx[..m], &mut cy[..m]);
    Ok((f.output(ix, &cx[..m]) ^ f.output(iy, &cy[..m])) >> (issue - 1) & 1 == 0)
}

/// Replaces every inconsistent output by a nearest consistent opinion.
pub fn redirect_to_consistent(f: &Mechanism, agenda: &Agenda) -> Result<TableMechanism> {
    check_dims(f, agenda, f.voters())?;
    TableMechanism::from_fn(agenda, f.voters(), |p, c| {
        let o = f.output(p, c);
        if agenda.is_consistent(o) {
            o
        } else {
            agenda.nearest_consistent(o)
        }
    })
}

/// Makes `issue` depend on its own column only: its output becomes the
/// majority answer of `F` among profiles sharing that column (ties to 1).
/// The other issues are left as they are.
pub fn decouple_issue(f: &Mechanism, agenda: &Agenda, issue: u32) -> Result<TableMechanism> {
    let groups = column_groups(f, agenda, issue)?;
    let j = issue - 1;
    TableMechanism::from_fn(agenda, f.voters(), |p, c| {
        let (s, k) = groups[c[j as usize] as usize];
        let bit = 2 * k >= s;
        (f.output(p, c) & !(1 << j)) | (bit as u32) << j
    })
}

/// The independent mechanism whose `f^j(t)` is the majority answer of `F` on
/// issue `j` among profiles with column `t` (ties to 1, unseen columns to 0).
pub fn independent_projection(f: &Mechanism, agenda: &Agenda) -> Result<IndependentMechanism> {
    let n = f.voters();
    if n > MAX_ARITY {
        return Err(Error::ArityOutOfRange(n));
    }
    let fns = (1..=agenda.issues())
        .map(|j| {
            let groups = column_groups(f, agenda, j)?;
            BoolFn::from_fn(n, |t| {
                let (s, k) = groups[t as usize];
                s > 0 && 2 * k >= s
            })
        })
        .collect::<Result<Vec<_>>>()?;
    IndependentMechanism::new(fns)
}

/// Whether the agenda admits the conjunction-specific routines.
pub fn conjunction_premises(agenda: &Agenda) -> Option<u32> {
    match agenda.kind() {
        AgendaKind::Conjunction(k) => Some(k),
        AgendaKind::Id => Some(1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitfn::{all_functions, Coalition};
    use crate::mechanism::{closed_families, mech_distance_exact, perturb};

    fn maj3() -> BoolFn {
        BoolFn::majority(Coalition::full(3), 3).unwrap()
    }

    fn sys_maj() -> Mechanism {
        IndependentMechanism::systematic(maj3(), 3).unwrap().into()
    }

    #[test]
    fn majority_on_conjunction() {
        let a = Agenda::conjunction(2).unwrap();
        assert_eq!(ic_exact(&sys_maj(), &a).unwrap(), Rational::ratio(3, 32));
        let e = ic_mc(&sys_maj(), &a, 100_000, 1).unwrap();
        assert!(e.contains(3.0 / 32.0));
        let r = inconsistency_index(&sys_maj(), &a, Mode::Exact).unwrap();
        assert_eq!(
            r.csv_row(),
            "n=3:e8/e8/e8,conjunction:2,ic,,exact,3,5,32,0.09375,,,,"
        );
    }

    #[test]
    fn closed_families_are_consistent() {
        for (a, n) in [(Agenda::conjunction(2).unwrap(), 2), (Agenda::xor(2).unwrap(), 3), (Agenda::id(), 3)] {
            for g in closed_families(&a, n).unwrap() {
                assert!(ic_exact(&g.into(), &a).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn id_agenda_ic_is_distance() {
        let a = Agenda::id();
        let fs: Vec<BoolFn> = all_functions(2).unwrap().collect();
        for f in &fs {
            for g in &fs {
                let m: Mechanism = IndependentMechanism::new(vec![f.clone(), g.clone()]).unwrap().into();
                assert_eq!(ic_exact(&m, &a).unwrap(), f.distance(g).unwrap());
            }
        }
    }

    #[test]
    fn independent_mechanisms_have_zero_di() {
        let a = Agenda::conjunction(2).unwrap();
        for j in 1..=3 {
            assert!(di_exact(&sys_maj(), &a, j).unwrap().is_zero());
            assert!(independence_test(&sys_maj(), &a, j, j as u64).unwrap());
        }
        assert!(di_max_exact(&sys_maj(), &a).unwrap().is_zero());
    }

    #[test]
    fn di_matches_double_sum() {
        let a = Agenda::conjunction(2).unwrap();
        let base: Mechanism = IndependentMechanism::systematic(BoolFn::dictator(1, 1).unwrap(), 3).unwrap().into();
        for seed in 0..20 {
            let t: Mechanism = perturb(&base, &a, 1.0, seed).unwrap().into();
            let space = ProfileSpace::new(&a, 1).unwrap();
            for j in 1..=3u32 {
                let (mut num, mut den) = (Rational::zero(), 0u64);
                for x in 0..4 {
                    let px = space.profile(x);
                    let fx = t.output(x, &px.columns(3));
                    let same: Vec<u64> = (0..4).filter(|&y| space.profile(y).column(j) == px.column(j)).collect();
                    let diff = same
                        .iter()
                        .filter(|&&y| (t.output(y, &space.profile(y).columns(3)) ^ fx) >> (j - 1) & 1 == 1)
                        .count();
                    num = num + Rational::ratio(diff as u64, same.len() as u64);
                    den += 1;
                }
                assert_eq!(di_exact(&t, &a, j).unwrap(), num / Rational::from_integer(den as i64));
            }
        }
    }

    #[test]
    fn copying_another_issue_is_dependent() {
        let a = Agenda::conjunction(2).unwrap();
        let t: Mechanism = TableMechanism::from_fn(&a, 3, |_, c| {
            let m2 = maj3().get(c[1]);
            m2 as u32 | (m2 as u32) << 1 | (maj3().get(c[2]) as u32) << 2
        })
        .unwrap()
        .into();
        let d = di_exact(&t, &a, 1).unwrap();
        assert!(d > Rational::zero());
        let e = di_mc(&t, &a, 1, 200_000, 3).unwrap();
        assert!(e.contains(d.to_f64()), "{e:?} {d}");
    }

    #[test]
    fn optimal_conclusion() {
        let (ic, h) = min_ic_over_conclusion(&[maj3(), maj3()]).unwrap();
        assert_eq!(ic, Rational::ratio(3, 32));
        assert_eq!(h, maj3());
        let mut best = Rational::one();
        for h in all_functions(3).unwrap() {
            let direct = ic_exact(
                &IndependentMechanism::new(vec![maj3(), maj3(), h.clone()]).unwrap().into(),
                &Agenda::conjunction(2).unwrap(),
            )
            .unwrap();
            assert_eq!(ic_with_conclusion(&[maj3(), maj3()], &h).unwrap(), direct);
            best = best.min(direct);
        }
        assert_eq!(best, ic);
        let olig = BoolFn::oligarchy(Coalition::new(0b011, 3).unwrap(), 3).unwrap();
        assert_eq!(min_ic_over_conclusion(&[olig.clone(), olig.clone()]).unwrap(), (Rational::zero(), olig));
        let zero = BoolFn::constant(3, false).unwrap();
        assert_eq!(min_ic_over_conclusion(&[zero.clone(), maj3()]).unwrap(), (Rational::zero(), zero));
    }

    #[test]
    fn local_consistency_test_rate() {
        let a = Agenda::conjunction(2).unwrap();
        let rejections = (0..20_000).filter(|&s| !consistency_test(&sys_maj(), &a, s).unwrap()).count();
        let rate = rejections as f64 / 20_000.0;
        assert!((rate - 3.0 / 32.0).abs() < crate::montecarlo::hoeffding_half_width(20_000, 1.0, 0.99));
        let olig: Mechanism = IndependentMechanism::oligarchy(Coalition::full(3), 3, 3).unwrap().into();
        assert!((0..200).all(|s| consistency_test(&olig, &a, s).unwrap()));
    }

    #[test]
    fn constructions() {
        let a = Agenda::conjunction(2).unwrap();
        for seed in 0..30 {
            let f: Mechanism = perturb(&sys_maj(), &a, 0.2, seed).unwrap().into();
            let h: Mechanism = redirect_to_consistent(&f, &a).unwrap().into();
            assert!(ic_exact(&h, &a).unwrap().is_zero());
            assert_eq!(mech_distance_exact(&f, &h, &a).unwrap(), ic_exact(&f, &a).unwrap());
            for j in 1..=3 {
                let g: Mechanism = decouple_issue(&f, &a, j).unwrap().into();
                assert!(di_exact(&g, &a, j).unwrap().is_zero());
                let two = Rational::from_integer(2);
                assert!(mech_distance_exact(&f, &g, &a).unwrap() <= two * di_exact(&f, &a, j).unwrap());
            }
            let p: Mechanism = independent_projection(&f, &a).unwrap().into();
            let bound = Rational::from_integer(6) * di_max_exact(&f, &a).unwrap();
            assert!(mech_distance_exact(&f, &p, &a).unwrap() <= bound);
        }
    }
}
