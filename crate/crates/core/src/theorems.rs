//! Executable checks of the approximation bounds and their lemmas.
//!
//! Every check returns a [`BoundReport`] holding exact comparisons; the
//! verdict is derived from them on demand.

use std::fmt;

use rayon::prelude::*;

use crate::agenda::{Agenda, AgendaKind};
use crate::bitfn::{BoolFn, Coalition};
use crate::error::{Error, Result};
use crate::fourier::{
    product_expectation_exact, product_expectation_mc, spectral_product_sum, FourierSpectrum, EXACT_PRODUCT_BITS,
};
use crate::indices::{csv_field, di_max_exact, ic_exact, independent_projection, min_ic_over_conclusion, Mode};
use crate::mechanism::{mech_distance_exact, table_from_index, IndependentMechanism, Mechanism};
use crate::montecarlo::Estimate;
use crate::oracle::{closed_family, enumerate_ci, nearest_ci, CIFamily};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "==",
        })
    }
}

/// One exact comparison `lhs ⋈ rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        Check { name: name.into(), lhs, relation, rhs }
    }

    /// A boolean fact stored as `[fact] == 1`.
    pub fn flag(name: impl Into<String>, fact: bool) -> Self {
        Self::new(name, Rational::from_integer(fact as i64), Relation::Eq, Rational::one())
    }

    pub fn holds(&self) -> bool {
        match self.relation {
            Relation::Lt => self.lhs < self.rhs,
            Relation::Le => self.lhs <= self.rhs,
            Relation::Eq => self.lhs == self.rhs,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {} {}", self.name, self.lhs, self.relation, self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Violated,
    Vacuous,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Vacuous => "vacuous",
            Verdict::NotApplicable => "not-applicable",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub claim: String,
    pub agenda: String,
    pub voters: u32,
    pub issues: u32,
    pub ic: Option<Rational>,
    pub di: Option<Rational>,
    pub distance: Option<Rational>,
    pub bound: Option<f64>,
    /// All must hold for the claim to apply.
    pub hypotheses: Vec<Check>,
    /// When this holds the claim is vacuous.
    pub vacuous_when: Option<Check>,
    /// The claim's conclusions.
    pub checks: Vec<Check>,
    pub witness: String,
}

impl BoundReport {
    fn new(claim: &str, agenda: &str, voters: u32, issues: u32) -> Self {
        BoundReport {
            claim: claim.to_string(),
            agenda: agenda.to_string(),
            voters,
            issues,
            ic: None,
            di: None,
            distance: None,
            bound: None,
            hypotheses: Vec::new(),
            vacuous_when: None,
            checks: Vec::new(),
            witness: String::new(),
        }
    }

    pub fn verdict(&self) -> Verdict {
        if !self.hypotheses.iter().all(Check::holds) {
            Verdict::NotApplicable
        } else if self.vacuous_when.as_ref().is_some_and(Check::holds) {
            Verdict::Vacuous
        } else if self.checks.iter().all(Check::holds) {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        }
    }

    /// Satisfied, vacuous or not applicable.
    pub fn is_ok(&self) -> bool {
        self.verdict() != Verdict::Violated
    }

    pub const CSV_HEADER: &'static str = "claim,agenda,n,m,ic_num,ic_logden,di_num,di_logden,distance_num,distance_logden,bound_float,verdict,witness,ic_den,di_den,distance_den,detail";

    pub fn csv_row(&self) -> String {
        let parts = |r: &Option<Rational>| match r {
            Some(r) => (
                r.numer().to_string(),
                r.log2_denominator().map(|d| d.to_string()).unwrap_or_default(),
                r.denom().to_string(),
            ),
            None => Default::default(),
        };
        let (icn, icl, icd) = parts(&self.ic);
        let (din, dil, did) = parts(&self.di);
        let (dn, dl, dd) = parts(&self.distance);
        let detail: Vec<String> = self
            .hypotheses
            .iter()
            .map(|c| format!("hyp {c}"))
            .chain(self.vacuous_when.iter().map(|c| format!("vacuous {c}")))
            .chain(self.checks.iter().map(|c| c.to_string()))
            .collect();
        format!(
            "{},{},{},{},{icn},{icl},{din},{dil},{dn},{dl},{},{},{},{icd},{did},{dd},{}",
            self.claim,
            csv_field(&self.agenda),
            self.voters,
            self.issues,
            self.bound.map(|b| b.to_string()).unwrap_or_default(),
            self.verdict(),
            csv_field(&self.witness),
            csv_field(&detail.join("; "))
        )
    }
}

fn family_for(agenda: &Agenda, n: u32) -> Result<CIFamily> {
    closed_family(agenda, n).or_else(|_| enumerate_ci(agenda, n))
}

fn conjunction_premises(agenda: &Agenda) -> Result<u32> {
    match agenda.kind() {
        AgendaKind::Conjunction(k) => Ok(k),
        other => Err(Error::Unsupported(format!("expected a conjunction agenda, got '{other}'"))),
    }
}

/// `d(F, G) < 5m (n² ε)^{1/(m²+m-1)}` for the nearest consistent independent
/// `G`, with `m` the premise count and `ε = IC(F)`.
pub fn check_mand(f: &IndependentMechanism, agenda: &Agenda) -> Result<BoundReport> {
    let fam = family_for(agenda, f.voters())?;
    check_mand_with(f, agenda, &fam)
}

pub fn check_mand_with(f: &IndependentMechanism, agenda: &Agenda, family: &CIFamily) -> Result<BoundReport> {
    let k = conjunction_premises(agenda)?;
    let n = f.voters();
    let mech: Mechanism = f.clone().into();
    let eps = ic_exact(&mech, agenda)?;
    let (g, d) = nearest_ci(&mech, agenda, family)?;
    let p = (k * k + k - 1) as i32;
    let five_m = Rational::from_integer(5 * k as i64);
    let n2eps = Rational::from_integer((n * n) as i64) * eps.clone();
    let mut r = BoundReport::new("mand", &agenda.id_string(), n, k);
    r.hypotheses.push(Check::new("premises >= 2", Rational::from_integer(2), Relation::Le, Rational::from_integer(k as i64)));
    r.bound = Some(5.0 * k as f64 * n2eps.to_f64().powf(1.0 / p as f64));
    r.vacuous_when = Some(Check::new("bound >= 1 as (5m)^-p <= n^2 ic", five_m.recip().pow(p), Relation::Le, n2eps.clone()));
    if eps.is_zero() {
        r.checks.push(Check::new("ic = 0 forces distance = 0", d.clone(), Relation::Le, Rational::zero()));
    } else {
        r.checks.push(Check::new("(d/5m)^p < n^2 ic", (d.clone() / five_m).pow(p), Relation::Lt, n2eps));
    }
    r.ic = Some(eps);
    r.distance = Some(d);
    r.witness = g.id_string();
    Ok(r)
}

/// `1 - 2 IC = Σ_S ∏_j f̂^j(S)` on xor agendas, solved for IC.
pub fn xor_ic_fourier(fns: &[BoolFn]) -> Result<Rational> {
    let spectra: Vec<FourierSpectrum> = fns.iter().map(FourierSpectrum::transform).collect();
    let sum = spectral_product_sum(&spectra)?;
    Ok((Rational::one() - sum) / Rational::from_integer(2))
}

/// `d(F, G) <= m ε` when `ε = IC(F) < 1/6`, with `m` the issue count and
/// `G` the nearest sign-consistent linear tuple.
pub fn check_mxor(f: &IndependentMechanism, agenda: &Agenda) -> Result<BoundReport> {
    let fam = family_for(agenda, f.voters())?;
    check_mxor_with(f, agenda, &fam)
}

pub fn check_mxor_with(f: &IndependentMechanism, agenda: &Agenda, family: &CIFamily) -> Result<BoundReport> {
    if !matches!(agenda.kind(), AgendaKind::Xor(_)) {
        return Err(Error::Unsupported(format!("expected a xor agenda, got '{}'", agenda.kind())));
    }
    let m = agenda.issues();
    let mech: Mechanism = f.clone().into();
    let eps = ic_exact(&mech, agenda)?;
    let (g, d) = nearest_ci(&mech, agenda, family)?;
    let mut r = BoundReport::new("mxor", &agenda.id_string(), f.voters(), m);
    r.hypotheses.push(Check::new("issues >= 3", Rational::from_integer(3), Relation::Le, Rational::from_integer(m as i64)));
    r.hypotheses.push(Check::new("ic < 1/6", eps.clone(), Relation::Lt, Rational::ratio(1, 6)));
    let bound = Rational::from_integer(m as i64) * eps.clone();
    r.bound = Some(bound.to_f64());
    r.checks.push(Check::new("d <= m ic", d.clone(), Relation::Le, bound));
    r.checks.push(Check::new("ic == (1 - sum prod f-hat)/2", eps.clone(), Relation::Eq, xor_ic_fourier(f.fns())?));
    r.ic = Some(eps);
    r.distance = Some(d);
    r.witness = g.id_string();
    Ok(r)
}

/// All `(2^{2^n})^m` independent mechanisms over `agenda`, in table order.
pub fn all_independent(agenda: &Agenda, n: u32) -> Result<Vec<IndependentMechanism>> {
    let m = agenda.issues();
    let per = 1u64 << (1u32 << n);
    let log2 = m * (1 << n);
    if n > 3 || log2 > 24 {
        return Err(Error::Budget { what: "independent mechanism sweep", log2_size: log2, cap: 24, hint: "" });
    }
    (0..per.pow(m))
        .map(|code| {
            let fns = (0..m).map(|j| table_from_index(n, code / per.pow(j) % per)).collect();
            IndependentMechanism::new(fns)
        })
        .collect()
}

/// [`check_mand`] or [`check_mxor`] over every independent mechanism.
pub fn sweep(agenda: &Agenda, n: u32) -> Result<Vec<BoundReport>> {
    let fam = family_for(agenda, n)?;
    let all = all_independent(agenda, n)?;
    let xor = matches!(agenda.kind(), AgendaKind::Xor(_));
    all.par_iter()
        .map(|f| if xor { check_mxor_with(f, agenda, &fam) } else { check_mand_with(f, agenda, &fam) })
        .collect()
}

/// A single-constraint threshold `δ(e)`: independent mechanisms with
/// `IC <= δ(e)` lie within `e` of a consistent independent one.
fn single_constraint_delta(agenda: &Agenda, n: u32) -> Option<Box<dyn Fn(f64) -> f64>> {
    let m = agenda.issues() as f64;
    let n = n as f64;
    match agenda.kind() {
        AgendaKind::Conjunction(_) | AgendaKind::TruthFunctional => {
            let p = m * m + m - 1.0;
            Some(Box::new(move |e: f64| (e / (5.0 * m)).powf(p) / (n * n)))
        }
        AgendaKind::Xor(_) => Some(Box::new(move |e: f64| (e / (2.0 * m)).min(1.0 / 7.0))),
        AgendaKind::Id => Some(Box::new(|e: f64| e / 2.0)),
        _ => None,
    }
}

/// Largest `β ∈ [0, 1]` with `δ((1-β)ε) >= βε`, by bisection.
fn beta_max(delta: &dyn Fn(f64) -> f64, eps: f64) -> f64 {
    let ok = |b: f64| delta((1.0 - b) * eps) >= b * eps;
    if ok(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Relaxing both constraints: if `IC(F) <= δ_IC` and `DI(F) <= δ_DI` then
/// the independent projection `H` of `F` is close to `F` and consistent
/// enough for the single-constraint bound, giving `d(F, G) < ε`.
pub fn check_relax(f: &Mechanism, agenda: &Agenda, eps: &Rational, beta: Option<f64>) -> Result<BoundReport> {
    let n = f.voters();
    let m = agenda.issues();
    let mut r = BoundReport::new("relax", &agenda.id_string(), n, m);
    let Some(delta) = single_constraint_delta(agenda, n) else {
        r.hypotheses.push(Check::flag("agenda has a single-constraint bound", false));
        return Ok(r);
    };
    let e = eps.to_f64();
    r.hypotheses.push(Check::new("eps > 0", Rational::zero(), Relation::Lt, eps.clone()));
    let b_max = if e > 0.0 { beta_max(delta.as_ref(), e) } else { 0.0 };
    let b = beta.unwrap_or(b_max / 2.0);
    let exact = |v: f64| Rational::from_f64(v).unwrap_or_else(Rational::zero);
    let admissible = (0.0..=1.0).contains(&b) && delta((1.0 - b) * e) >= b * e;
    r.hypotheses.push(Check::flag("beta admissible", admissible));
    let d_ic = exact(delta((1.0 - b) * e) - b * e);
    let d_di = exact(b * e / (2.0 * m as f64));
    let ic = ic_exact(f, agenda)?;
    let di = di_max_exact(f, agenda)?;
    r.hypotheses.push(Check::new("ic <= delta_ic", ic.clone(), Relation::Le, d_ic.clone()));
    r.hypotheses.push(Check::new("di <= delta_di", di.clone(), Relation::Le, d_di.clone()));
    r.bound = Some(e);
    r.ic = Some(ic.clone());
    r.di = Some(di.clone());
    if r.hypotheses.iter().all(Check::holds) {
        let h = independent_projection(f, agenda)?;
        let hm: Mechanism = h.clone().into();
        let fam = family_for(agenda, n)?;
        let (g, d_hg) = nearest_ci(&hm, agenda, &fam)?;
        let d_fh = mech_distance_exact(f, &hm, agenda)?;
        let d_fg = mech_distance_exact(f, &g.clone().into(), agenda)?;
        let ic_h = ic_exact(&hm, agenda)?;
        let two_m = Rational::from_integer(2 * m as i64);
        let rest = Rational::one() - exact(b);
        r.checks.push(Check::new("d(F,H) <= 2m di", d_fh.clone(), Relation::Le, two_m * di));
        r.checks.push(Check::new("ic(H) <= ic + d(F,H)", ic_h, Relation::Le, ic + d_fh.clone()));
        r.checks.push(Check::new("d(H,G) < (1-beta) eps", d_hg.clone(), Relation::Lt, rest * eps.clone()));
        r.checks.push(Check::new("d(F,G) <= d(F,H) + d(H,G)", d_fg.clone(), Relation::Le, d_fh + d_hg));
        r.checks.push(Check::new("d(F,G) < eps", d_fg.clone(), Relation::Lt, eps.clone()));
        r.distance = Some(d_fg);
        r.witness = g.id_string();
    }
    Ok(r)
}

/// `OSI_i(f^k) Inf_i(f^l) <= 4 (∏_{j≠k,l} d(f^j, 0))^{-1} ĨC(f¹, …, f^m)`,
/// checked multiplied through by the product.
pub fn check_boundpi(fs: &[BoolFn], voter: u32, k: usize, l: usize) -> Result<BoundReport> {
    if k == l || k == 0 || l == 0 || k > fs.len() || l > fs.len() {
        return Err(Error::InvalidParameter(format!("need two distinct issues in 1..={}, got {k},{l}", fs.len())));
    }
    let n = fs[0].arity();
    let (ict, _) = min_ic_over_conclusion(fs)?;
    let osi = fs[k - 1].ignorability(voter)?;
    let inf = fs[l - 1].influence(voter)?;
    let zero = BoolFn::constant(n, false)?;
    let prod: Rational = fs
        .iter()
        .enumerate()
        .filter(|&(j, _)| j + 1 != k && j + 1 != l)
        .map(|(_, f)| f.distance(&zero))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .product();
    let mut r = BoundReport::new("boundpi", &format!("conjunction:{}", fs.len()), n, fs.len() as u32);
    let four_ict = Rational::from_integer(4) * ict.clone();
    r.bound = (!prod.is_zero()).then(|| (four_ict.clone() / prod.clone()).to_f64());
    r.vacuous_when = Some(Check::new("prod d(f^j,0) == 0", prod.clone(), Relation::Eq, Rational::zero()));
    r.checks.push(Check::new("osi*inf*prod_d <= 4 ic_tilde", osi * inf * prod, Relation::Le, four_ict));
    r.ic = Some(ict);
    r.witness = format!("voter={voter} k={k} l={l}");
    Ok(r)
}

/// For functions reading only `junta`, `ĨC` is a multiple of `2^{-m|J|}`.
pub fn check_granularity(fs: &[BoolFn], junta: Coalition) -> Result<BoundReport> {
    for f in fs {
        let outside = f.relevant_voters().mask() & !junta.mask();
        if outside != 0 {
            return Err(Error::OutsideJunta(outside.trailing_zeros() + 1));
        }
    }
    let m = fs.len() as u32;
    let (ict, _) = min_ic_over_conclusion(fs)?;
    let scaled = ict.clone() * Rational::from_integer(2).pow((m * junta.len()) as i32);
    let mut r = BoundReport::new("granularity", &format!("conjunction:{m}"), fs[0].arity(), m);
    r.checks.push(Check::flag(format!("ic_tilde * 2^{} is an integer", m * junta.len()), scaled.is_integer()));
    r.ic = Some(ict);
    r.witness = format!("J={junta}");
    Ok(r)
}

/// Voters whose ignorability in some `f^j` is at most `Δ/n`.
pub fn low_ignorability_junta(fs: &[BoolFn], delta: &Rational) -> Result<Coalition> {
    let n = fs[0].arity();
    let cut = delta.clone() / Rational::from_integer(n as i64);
    let mut mask = 0u32;
    for f in fs {
        for i in 1..=n {
            if f.ignorability(i)? <= cut {
                mask |= 1 << (i - 1);
            }
        }
    }
    Coalition::new(mask, n)
}

/// The junta construction: under its hypotheses the projections onto the
/// low-ignorability voters coincide with one oligarchy, each is close to
/// its function, and the junta is small.
pub fn check_junta_lemma(fs: &[BoolFn], delta: &Rational, eps: &Rational) -> Result<BoundReport> {
    let m = fs.len() as u32;
    let n = fs.first().ok_or(Error::EmptyAgenda)?.arity();
    let (ict, _) = min_ic_over_conclusion(fs)?;
    let zero = BoolFn::constant(n, false)?;
    let mut r = BoundReport::new("junta", &format!("conjunction:{m}"), n, m);
    r.hypotheses.push(Check::new("delta > 0", Rational::zero(), Relation::Lt, delta.clone()));
    r.hypotheses.push(Check::new("ic_tilde <= eps", ict.clone(), Relation::Le, eps.clone()));
    for (j, f) in fs.iter().enumerate() {
        r.hypotheses.push(Check::new(format!("d(f^{},0) >= delta", j + 1), delta.clone(), Relation::Le, f.distance(&zero)?));
    }
    let p = (m * m + m - 1) as i32;
    let cap = Rational::dyadic(1, m * m + 3)
        / Rational::from_integer((m * n * n) as i64)
        * delta.pow(p);
    r.hypotheses.push(Check::new("eps < 2^-(m^2+3) m^-1 n^-2 delta^(m^2+m-1)", eps.clone(), Relation::Lt, cap));
    r.ic = Some(ict);
    if !r.hypotheses.iter().all(Check::holds) {
        return Ok(r);
    }
    let junta = low_ignorability_junta(fs, delta)?;
    let proj: Vec<BoolFn> = fs.iter().map(|f| f.junta_projection(junta)).collect::<Result<_>>()?;
    let common = proj.iter().all(|g| g == &proj[0]) && proj[0].classify().oligarchy.is_some();
    r.checks.push(Check::flag("projections equal one oligarchy", common));
    let close = Rational::from_integer(4 * (n * n) as i64) * eps.clone() * delta.pow(1 - m as i32);
    let mut worst = Rational::zero();
    for (j, (f, g)) in fs.iter().zip(&proj).enumerate() {
        let d = f.distance(g)?;
        worst = worst.max(d.clone());
        r.checks.push(Check::new(format!("d(f^{0},f^{0}_J) <= 4 n^2 eps delta^(1-m)", j + 1), d, Relation::Le, close.clone()));
    }
    let size = Rational::from_integer(2).pow(junta.len() as i32 - m as i32) * delta.pow(m as i32);
    r.checks.push(Check::new("|J| <= m(1+log2(1/delta)) as 2^(|J|-m) delta^m <= 1", size, Relation::Le, Rational::one()));
    r.distance = Some(worst);
    r.bound = Some(close.to_f64());
    r.witness = format!("J={junta} g={}", proj[0]);
    Ok(r)
}

/// `Σ_i Inf_i(f) >= min(E f, 1 - E f)`.
pub fn check_isoperimetric(f: &BoolFn) -> Check {
    let e = f.expectation();
    let floor = e.clone().min(Rational::one() - e);
    Check::new("min(E,1-E) <= total influence", floor, Relation::Le, f.total_influence())
}

/// `d(f, f_J) <= Σ_{i∉J} Inf_i(f)`.
pub fn check_junta_close(f: &BoolFn, junta: Coalition) -> Result<Check> {
    let proj = f.junta_projection(junta)?;
    let outside: Rational = junta
        .complement(f.arity())
        .voters()
        .map(|i| f.influence(i))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(Check::new(format!("d(f,f_{junta}) <= sum outside influence"), f.distance(&proj)?, Relation::Le, outside))
}

/// With `d(f, 0) >= Δ`, at most `1 + log2(1/Δ)` voters have ignorability at
/// most `Δ/n`; checked as `2^{c-1} Δ <= 1`. `None` when `d(f, 0) < Δ`.
pub fn check_junta_small(f: &BoolFn, delta: &Rational) -> Result<Option<Check>> {
    let zero = BoolFn::constant(f.arity(), false)?;
    if delta.is_zero() || f.distance(&zero)? < *delta {
        return Ok(None);
    }
    let c = low_ignorability_junta(std::slice::from_ref(f), delta)?.len() as i32;
    let lhs = Rational::from_integer(2).pow(c - 1) * delta.clone();
    Ok(Some(Check::new(format!("2^({c}-1) delta <= 1"), lhs, Relation::Le, Rational::one())))
}

/// Outcome of the three-function linearity test.
#[derive(Clone, Debug, PartialEq)]
pub struct BlrOutcome {
    pub report: BoundReport,
    /// Exact rejection probability `Pr[f(x) ⊕ g(y) ≠ h(x ⊕ y)]`.
    pub rejection: Rational,
    pub estimate: Option<Estimate>,
    pub character: Coalition,
    /// `true` where the recovered function is the negated character.
    pub negated: [bool; 3],
    pub distances: [Rational; 3],
    /// `max d / ε`, or `None` when `ε = 0`.
    pub constant: Option<f64>,
}

/// `Pr[f(x) ⊕ g(y) = h(x ⊕ y)]`, and for rejection `ε < 1/6` the nearest
/// exactly linear triple `(a¹χ_S, a²χ_S, a³χ_S)` with `a¹a²a³ = 1`.
pub fn blr_three_function(f: &BoolFn, g: &BoolFn, h: &BoolFn, mode: Mode) -> Result<BlrOutcome> {
    let n = f.arity();
    let fs = [f.clone(), g.clone(), h.clone()];
    let spectra: Vec<FourierSpectrum> = fs.iter().map(FourierSpectrum::transform).collect();
    let fourier = spectral_product_sum(&spectra)?;
    let half = Rational::ratio(1, 2);
    let rejection = (Rational::one() - fourier.clone()) * half.clone();
    let mut r = BoundReport::new("blr", "xor:2", n, 3);
    let mut estimate = None;
    match mode {
        Mode::Exact => {
            if 2 * n > EXACT_PRODUCT_BITS {
                return Err(Error::Budget {
                    what: "linearity test enumeration",
                    log2_size: 2 * n,
                    cap: EXACT_PRODUCT_BITS,
                    hint: ", use --mode mc",
                });
            }
            let direct = (Rational::one() - product_expectation_exact(&fs)?) * half;
            r.checks.push(Check::new("enumerated rejection == (1 - sum f g h)/2", direct, Relation::Eq, rejection.clone()));
        }
        Mode::MonteCarlo { samples, seed } => {
            let e = product_expectation_mc(&fs, samples, seed)?;
            let rej = Estimate {
                mean: (1.0 - e.mean) / 2.0,
                samples: e.samples,
                ci_low: (1.0 - e.ci_high) / 2.0,
                ci_high: (1.0 - e.ci_low) / 2.0,
                seed: e.seed,
            };
            r.checks.push(Check::flag("estimate interval covers the exact rejection", rej.contains(rejection.to_f64())));
            estimate = Some(rej);
        }
    }
    let s = spectra[0].dominant();
    let coefs: Vec<Rational> = spectra.iter().map(|sp| sp.coefficient(s)).collect();
    let mut negated = [false; 3];
    for (neg, c) in negated.iter_mut().zip(&coefs) {
        *neg = *c < Rational::zero();
    }
    if negated.iter().filter(|&&b| b).count() % 2 == 1 {
        let weakest = (0..3).min_by(|&a, &b| coefs[a].abs().cmp(&coefs[b].abs())).expect("three coefficients");
        negated[weakest] = !negated[weakest];
    }
    let chi = BoolFn::linear(s, n)?;
    let rec: Vec<BoolFn> = negated.iter().map(|&b| if b { chi.negate() } else { chi.clone() }).collect();
    let distances = [f.distance(&rec[0])?, g.distance(&rec[1])?, h.distance(&rec[2])?];
    let worst = distances.iter().max().expect("three distances").clone();
    let linear = negated.iter().filter(|&&b| b).count() % 2 == 0;
    r.hypotheses.push(Check::new("rejection < 1/6", rejection.clone(), Relation::Lt, Rational::ratio(1, 6)));
    r.checks.push(Check::flag("recovered triple is exactly linear", linear));
    r.checks.push(Check::new("max distance <= 2 rejection", worst.clone(), Relation::Le, Rational::from_integer(2) * rejection.clone()));
    let constant = (!rejection.is_zero()).then(|| (worst.clone() / rejection.clone()).to_f64());
    r.ic = Some(rejection.clone());
    r.distance = Some(worst);
    r.bound = Some(2.0 * rejection.to_f64());
    r.witness = format!(
        "S={s} signs={}",
        negated.iter().map(|&b| if b { '-' } else { '+' }).collect::<String>()
    );
    Ok(BlrOutcome { report: r, rejection, estimate, character: s, negated, distances, constant })
}
