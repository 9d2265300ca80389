//! Brute-force enumeration of the consistent independent mechanisms.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::agenda::Agenda;
use crate::bitfn::BoolFn;
use crate::error::{Error, Result};
use crate::mechanism::{closed_families, mech_distance_exact, IndependentMechanism, Mechanism, ProfileSpace};
use crate::rational::Rational;

/// Hard cap on examined candidates, as a power of two.
pub const ORACLE_CAP_LOG2: u32 = 28;
/// Largest voter count whose truth tables the oracle enumerates.
pub const ORACLE_MAX_VOTERS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// Every tuple of issue functions.
    Generic,
    /// Issue by issue, keeping only values allowed pointwise.
    Pruned,
    /// The closed-form families.
    Closed,
}

impl fmt::Display for Enumeration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Enumeration::Generic => "generic",
            Enumeration::Pruned => "pruned",
            Enumeration::Closed => "closed",
        })
    }
}

impl std::str::FromStr for Enumeration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(Enumeration::Generic),
            "pruned" => Ok(Enumeration::Pruned),
            "closed" => Ok(Enumeration::Closed),
            _ => Err(Error::Parse(format!("unknown enumeration mode '{s}'"))),
        }
    }
}

/// A complete list of consistent independent mechanisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CIFamily {
    pub agenda: String,
    pub voters: u32,
    pub mode: Enumeration,
    pub candidates: u64,
    pub mechanisms: Vec<IndependentMechanism>,
}

impl CIFamily {
    pub fn len(&self) -> usize {
        self.mechanisms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mechanisms.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "ci-family agenda={} n={} mode={} candidates={} members={}\n",
            self.agenda,
            self.voters,
            self.mode,
            self.candidates,
            self.mechanisms.len()
        );
        for m in &self.mechanisms {
            s.push_str(&m.to_text());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty family file".into()))?;
        let mut fields = head.split_whitespace();
        if fields.next() != Some("ci-family") {
            return Err(Error::Parse(format!("expected 'ci-family' header, got '{head}'")));
        }
        let (mut agenda, mut voters, mut mode, mut candidates, mut members) = (None, None, None, None, None);
        for f in fields {
            match f.split_once('=') {
                Some(("agenda", v)) => agenda = Some(v.to_string()),
                Some(("n", v)) => voters = v.parse().ok(),
                Some(("mode", v)) => mode = Some(v.parse::<Enumeration>()?),
                Some(("candidates", v)) => candidates = v.parse().ok(),
                Some(("members", v)) => members = v.parse::<usize>().ok(),
                _ => return Err(Error::Parse(format!("unknown header field '{f}'"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("family header lacks {k}"));
        let mut mechanisms = Vec::new();
        let mut block: Vec<&str> = Vec::new();
        for l in lines.chain(std::iter::once("independent")) {
            if l.starts_with("independent") && !block.is_empty() {
                mechanisms.push(IndependentMechanism::from_text(&block.join("\n"))?);
                block.clear();
            }
            block.push(l);
        }
        if members != Some(mechanisms.len()) {
            return Err(Error::Parse("family member count does not match".into()));
        }
        Ok(CIFamily {
            agenda: agenda.ok_or_else(|| missing("agenda"))?,
            voters: voters.ok_or_else(|| missing("n"))?,
            mode: mode.ok_or_else(|| missing("mode"))?,
            candidates: candidates.ok_or_else(|| missing("candidates"))?,
            mechanisms,
        })
    }
}

fn check_voters(n: u32) -> Result<()> {
    if n == 0 || n > ORACLE_MAX_VOTERS {
        return Err(Error::InvalidParameter(format!("oracle needs 1..={ORACLE_MAX_VOTERS} voters, got {n}")));
    }
    Ok(())
}

/// Every profile's columns, in profile order.
fn all_columns(agenda: &Agenda, n: u32) -> Result<Vec<Vec<u32>>> {
    let space = ProfileSpace::new(agenda, n)?;
    let size = space.require(20, "oracle profile list", "")?;
    let mut out = Vec::with_capacity(size as usize);
    space.for_each(0, size, |_, c| out.push(c.to_vec()));
    Ok(out)
}

fn function(n: u32, bits: u64) -> BoolFn {
    if n <= 6 {
        BoolFn::from_bits(n, bits).expect("table fits")
    } else {
        unreachable!("oracle arity is bounded")
    }
}

/// Sweeps all `(2^{2^n})^m` tuples.
pub fn enumerate_generic(agenda: &Agenda, n: u32) -> Result<CIFamily> {
    check_voters(n)?;
    let m = agenda.issues();
    let log2 = m * (1 << n);
    if log2 > ORACLE_CAP_LOG2 {
        return Err(Error::Budget {
            what: "generic oracle sweep",
            log2_size: log2,
            cap: ORACLE_CAP_LOG2,
            hint: ", use the pruned enumeration",
        });
    }
    let cols = all_columns(agenda, n)?;
    let per = 1u64 << (1u32 << n);
    let rest = per.pow(m - 1);
    let mut mechanisms: Vec<IndependentMechanism> = (0..per)
        .into_par_iter()
        .flat_map_iter(|first| {
            let cols = &cols;
            (0..rest).filter_map(move |code| {
                let mut c = code;
                let mut fns = vec![function(n, first)];
                for _ in 1..m {
                    fns.push(function(n, c % per));
                    c /= per;
                }
                let mech = IndependentMechanism::new(fns).expect("equal arities");
                cols.iter().all(|cl| agenda.is_consistent(mech.apply_columns(cl))).then_some(mech)
            })
        })
        .collect();
    mechanisms.sort();
    Ok(CIFamily {
        agenda: agenda.id_string(),
        voters: n,
        mode: Enumeration::Generic,
        candidates: per.pow(m),
        mechanisms,
    })
}

struct Search<'a> {
    agenda: &'a Agenda,
    cols: &'a [Vec<u32>],
    n: u32,
    m: u32,
}

impl Search<'_> {
    /// Allowed values of `f^j(c)` for every column value `c`, given the
    /// partial outputs `partial` of issues `1..j`. `None` if some column
    /// value admits neither bit.
    fn allowed(&self, j: u32, partial: &[u32]) -> Option<Vec<u8>> {
        let mask = (1u32 << (j + 1)) - 1;
        let prefixes: BTreeSet<u32> = self.agenda.consistent().iter().map(|o| o & mask).collect();
        let mut allowed = vec![0b11u8; 1 << self.n];
        for (cl, &p) in self.cols.iter().zip(partial) {
            let c = cl[j as usize] as usize;
            for v in 0..2u32 {
                if !prefixes.contains(&(p | v << j)) {
                    allowed[c] &= !(1 << v);
                }
            }
        }
        allowed.iter().all(|&a| a != 0).then_some(allowed)
    }

    fn choices(allowed: &[u8]) -> Vec<u64> {
        let mut out = vec![0u64];
        for (c, &a) in allowed.iter().enumerate() {
            match a {
                0b01 => {}
                0b10 => out.iter_mut().for_each(|t| *t |= 1 << c),
                _ => {
                    let with: Vec<u64> = out.iter().map(|t| t | 1 << c).collect();
                    out.extend(with);
                }
            }
        }
        out
    }

    fn extend(&self, j: u32, fns: &mut Vec<BoolFn>, partial: &[u32], out: &mut Vec<IndependentMechanism>, count: &mut u64) {
        if j == self.m {
            out.push(IndependentMechanism::new(fns.clone()).expect("equal arities"));
            return;
        }
        let Some(allowed) = self.allowed(j, partial) else { return };
        let options = Self::choices(&allowed);
        *count += options.len() as u64;
        for bits in options {
            let f = function(self.n, bits);
            let next: Vec<u32> = self
                .cols
                .iter()
                .zip(partial)
                .map(|(cl, &p)| p | (f.get(cl[j as usize]) as u32) << j)
                .collect();
            fns.push(f);
            self.extend(j + 1, fns, &next, out, count);
            fns.pop();
        }
    }
}

/// Issue-by-issue search: the consistency constraint is pointwise over
/// profiles, so the admissible values of `f^j` factor over column values.
pub fn enumerate_pruned(agenda: &Agenda, n: u32) -> Result<CIFamily> {
    check_voters(n)?;
    let cols = all_columns(agenda, n)?;
    let s = Search { agenda, cols: &cols, n, m: agenda.issues() };
    let first = s.allowed(0, &vec![0; cols.len()]).map(|a| Search::choices(&a)).unwrap_or_default();
    let log2_first = first.len().max(1).ilog2();
    if log2_first > ORACLE_CAP_LOG2 {
        return Err(Error::Budget { what: "pruned oracle", log2_size: log2_first, cap: ORACLE_CAP_LOG2, hint: "" });
    }
    let parts: Vec<(Vec<IndependentMechanism>, u64)> = first
        .par_iter()
        .map(|&bits| {
            let f = function(n, bits);
            let partial: Vec<u32> = cols.iter().map(|cl| f.get(cl[0]) as u32).collect();
            let (mut out, mut count) = (Vec::new(), 0u64);
            s.extend(1, &mut vec![f], &partial, &mut out, &mut count);
            (out, count)
        })
        .collect();
    let candidates = first.len() as u64 + parts.iter().map(|p| p.1).sum::<u64>();
    let mut mechanisms: Vec<IndependentMechanism> = parts.into_iter().flat_map(|p| p.0).collect();
    mechanisms.sort();
    Ok(CIFamily { agenda: agenda.id_string(), voters: n, mode: Enumeration::Pruned, candidates, mechanisms })
}

pub fn closed_family(agenda: &Agenda, n: u32) -> Result<CIFamily> {
    let mechanisms = closed_families(agenda, n)?;
    Ok(CIFamily {
        agenda: agenda.id_string(),
        voters: n,
        mode: Enumeration::Closed,
        candidates: mechanisms.len() as u64,
        mechanisms,
    })
}

/// Largest generic sweep chosen automatically, as a power of two.
const AUTO_GENERIC_LOG2: u32 = 20;

/// Generic sweep for small spaces, pruned search otherwise.
pub fn enumerate_ci(agenda: &Agenda, n: u32) -> Result<CIFamily> {
    if n <= ORACLE_MAX_VOTERS && agenda.issues() * (1 << n) <= AUTO_GENERIC_LOG2 {
        enumerate_generic(agenda, n)
    } else {
        enumerate_pruned(agenda, n)
    }
}

/// The family member closest to `f`; ties go to the smallest serialization.
pub fn nearest_ci(f: &Mechanism, agenda: &Agenda, family: &CIFamily) -> Result<(IndependentMechanism, Rational)> {
    if family.voters != f.voters() {
        return Err(Error::ArityMismatch { left: f.voters(), right: family.voters });
    }
    assert!(!family.mechanisms.is_empty(), "consistent families always contain a constant mechanism");
    let scored = family
        .mechanisms
        .par_iter()
        .map(|g| Ok((mech_distance_exact(f, &g.clone().into(), agenda)?, g.to_text(), g)))
        .collect::<Result<Vec<_>>>()?;
    let (d, _, g) = scored
        .into_iter()
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .expect("non-empty family");
    Ok((g.clone(), d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characterization {
    pub matches: bool,
    pub enumerated: usize,
    pub closed: usize,
    /// Enumerated but absent from the closed family.
    pub only_enumerated: Vec<IndependentMechanism>,
    /// In the closed family but not found by enumeration.
    pub only_closed: Vec<IndependentMechanism>,
}

pub fn verify_characterization(agenda: &Agenda, n: u32) -> Result<Characterization> {
    let found = enumerate_ci(agenda, n)?;
    let closed = closed_families(agenda, n)?;
    let a: BTreeSet<_> = found.mechanisms.iter().cloned().collect();
    let b: BTreeSet<_> = closed.iter().cloned().collect();
    let only_enumerated: Vec<_> = a.difference(&b).cloned().collect();
    let only_closed: Vec<_> = b.difference(&a).cloned().collect();
    Ok(Characterization {
        matches: only_enumerated.is_empty() && only_closed.is_empty(),
        enumerated: a.len(),
        closed: b.len(),
        only_enumerated,
        only_closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitfn::Coalition;
    use crate::indices::ic_exact;
    use crate::mechanism::{flip_profiles, Profile};

    #[test]
    fn small_families() {
        let conj = Agenda::conjunction(2).unwrap();
        let fam = enumerate_ci(&conj, 2).unwrap();
        assert_eq!((fam.len(), fam.mode, fam.candidates), (35, Enumeration::Generic, 4096));
        assert_eq!(enumerate_ci(&Agenda::xor(2).unwrap(), 2).unwrap().len(), 16);
        assert_eq!(enumerate_ci(&Agenda::id(), 2).unwrap().len(), 16);
        for a in [conj, Agenda::xor(2).unwrap(), Agenda::id()] {
            assert!(verify_characterization(&a, 2).unwrap().matches);
        }
    }

    #[test]
    fn pruned_agrees_with_generic() {
        let pref = crate::agenda::preference_agenda(3).unwrap();
        for a in [Agenda::conjunction(2).unwrap(), Agenda::xor(2).unwrap(), Agenda::id(), Agenda::conjunction(3).unwrap(), pref] {
            for n in 1..=2 {
                let g = enumerate_generic(&a, n).unwrap();
                let p = enumerate_pruned(&a, n).unwrap();
                assert_eq!(g.mechanisms, p.mechanisms, "{} n={n}", a.id_string());
                assert!(p.candidates <= g.candidates);
            }
        }
    }

    #[test]
    fn three_voter_conjunction() {
        let a = Agenda::conjunction(2).unwrap();
        let fam = enumerate_pruned(&a, 3).unwrap();
        assert_eq!(fam.len(), 519);
        assert_eq!(fam.mechanisms, closed_families(&a, 3).unwrap());
        let zero = BoolFn::constant(3, false).unwrap();
        for g in &fam.mechanisms {
            assert!(ic_exact(&g.clone().into(), &a).unwrap().is_zero());
            if !g.fns().contains(&zero) {
                assert!(g.fns().iter().all(|f| f == &g.fns()[0] && f.classify().oligarchy.is_some()));
            }
        }
        assert!(matches!(enumerate_generic(&a, 4), Err(Error::Budget { .. })));
    }

    #[test]
    fn nearest_members() {
        let a = Agenda::conjunction(2).unwrap();
        let fam = closed_family(&a, 3).unwrap();
        let member = fam.mechanisms[7].clone();
        let (g, d) = nearest_ci(&member.clone().into(), &a, &fam).unwrap();
        assert_eq!((g, d), (member.clone(), Rational::zero()));
        let maj = BoolFn::majority(Coalition::full(3), 3).unwrap();
        let sys: Mechanism = IndependentMechanism::systematic(maj, 3).unwrap().into();
        let (g, d) = nearest_ci(&sys, &a, &fam).unwrap();
        assert!(g.fns().iter().all(|f| f == &g.fns()[0]));
        assert!(d > Rational::zero());
        let olig = IndependentMechanism::oligarchy(Coalition::new(0b101, 3).unwrap(), 3, 3).unwrap();
        let x = Profile::parse(&a, &["111", "000", "111"]).unwrap();
        let t: Mechanism = flip_profiles(&olig.clone().into(), &a, &[(x, 0b001)]).unwrap().into();
        assert_eq!(nearest_ci(&t, &a, &fam).unwrap(), (olig, Rational::ratio(1, 64)));
    }

    #[test]
    fn family_text_round_trips() {
        let fam = enumerate_ci(&Agenda::xor(2).unwrap(), 2).unwrap();
        assert_eq!(CIFamily::from_text(&fam.to_text()).unwrap(), fam);
    }
}
