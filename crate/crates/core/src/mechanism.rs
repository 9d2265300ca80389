//! Aggregation mechanisms, profile spaces and distances between mechanisms.
//!
//! Profiles are drawn under impartial culture: each of the `n` rows is an
//! independent uniform choice from the agenda. Profile index `p` encodes the
//! rows in mixed radix `|X|`, voter 1 being the least significant digit.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::agenda::{format_opinion, parse_opinion, Agenda, AgendaKind, MAX_ISSUES};
use crate::bitfn::{BoolFn, Coalition, MAX_ARITY};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_mean, substream, Estimate, CHUNK};
use crate::rational::Rational;

/// Largest profile space enumerated exactly, as a power of two.
pub const EXACT_CAP_LOG2: u32 = 26;
/// Largest profile space a table mechanism may cover.
pub const TABLE_CAP_LOG2: u32 = 24;

const BLOCK: u64 = 1 << 14;

/// An `n × m` matrix of consistent opinions, one row per voter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile {
    rows: Vec<u32>,
}

impl Profile {
    pub fn new(agenda: &Agenda, rows: Vec<u32>) -> Result<Self> {
        if rows.is_empty() || rows.len() > MAX_ARITY as usize {
            return Err(Error::ArityOutOfRange(rows.len() as u32));
        }
        if let Some(&bad) = rows.iter().find(|&&r| !agenda.is_consistent(r)) {
            return Err(Error::InconsistentProfile(bad));
        }
        Ok(Profile { rows })
    }

    /// Rows written as opinion strings, e.g. `["111", "100", "010"]`.
    pub fn parse(agenda: &Agenda, rows: &[&str]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                let (v, len) = parse_opinion(r)?;
                if len != agenda.issues() {
                    return Err(Error::Dimension(format!("row '{r}' needs {} bits", agenda.issues())));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(agenda, rows)
    }

    pub fn voters(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Column `issue` (1-based) as an `n`-bit voter mask.
    pub fn column(&self, issue: u32) -> u32 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | (r >> (issue - 1) & 1) << i)
    }

    pub fn columns(&self, issues: u32) -> Vec<u32> {
        (1..=issues).map(|j| self.column(j)).collect()
    }

    pub fn index(&self, agenda: &Agenda) -> u64 {
        let l = agenda.len() as u64;
        self.rows
            .iter()
            .rev()
            .fold(0, |acc, &r| acc * l + agenda.index_of(r).expect("rows are consistent") as u64)
    }
}

/// All profiles of `n` voters over an agenda.
#[derive(Clone, Copy, Debug)]
pub struct ProfileSpace<'a> {
    agenda: &'a Agenda,
    voters: u32,
    size: Option<u64>,
}

impl<'a> ProfileSpace<'a> {
    pub fn new(agenda: &'a Agenda, voters: u32) -> Result<Self> {
        if voters == 0 || voters > MAX_ARITY {
            return Err(Error::ArityOutOfRange(voters));
        }
        let size = (agenda.len() as u64).checked_pow(voters);
        Ok(ProfileSpace { agenda, voters, size })
    }

    pub fn agenda(&self) -> &'a Agenda {
        self.agenda
    }

    pub fn voters(&self) -> u32 {
        self.voters
    }

    /// `⌈log2 |X|^n⌉`.
    pub fn log2_size(&self) -> u32 {
        (self.voters as f64 * (self.agenda.len() as f64).log2()).ceil() as u32
    }

    pub fn size(&self) -> Option<u64> {
        self.size
    }

    /// The size, or a budget error if it exceeds `2^cap`.
    pub fn require(&self, cap: u32, what: &'static str, hint: &'static str) -> Result<u64> {
        match self.size {
            Some(s) if s <= 1u64 << cap => Ok(s),
            _ => Err(Error::Budget { what, log2_size: self.log2_size(), cap, hint }),
        }
    }

    pub fn profile(&self, index: u64) -> Profile {
        let l = self.agenda.len() as u64;
        let mut p = index;
        let rows = (0..self.voters)
            .map(|_| {
                let r = self.agenda.consistent()[(p % l) as usize];
                p /= l;
                r
            })
            .collect();
        Profile { rows }
    }

    /// Visits profiles `start..end` in order with their columns.
    pub fn for_each(&self, start: u64, end: u64, mut visit: impl FnMut(u64, &[u32])) {
        if start >= end {
            return;
        }
        let ops = self.agenda.consistent();
        let l = ops.len();
        let m = self.agenda.issues() as usize;
        let n = self.voters as usize;
        let mut digits = vec![0usize; n];
        let mut p = start;
        for d in digits.iter_mut() {
            *d = (p % l as u64) as usize;
            p /= l as u64;
        }
        let mut cols = [0u32; MAX_ISSUES as usize];
        for (i, &d) in digits.iter().enumerate() {
            for (j, c) in cols.iter_mut().enumerate().take(m) {
                *c |= (ops[d] >> j & 1) << i;
            }
        }
        let mut idx = start;
        loop {
            visit(idx, &cols[..m]);
            idx += 1;
            if idx == end {
                return;
            }
            let mut i = 0;
            loop {
                let old = ops[digits[i]];
                digits[i] += 1;
                if digits[i] == l {
                    digits[i] = 0;
                }
                let diff = old ^ ops[digits[i]];
                for (j, c) in cols.iter_mut().enumerate().take(m) {
                    *c ^= (diff >> j & 1) << i;
                }
                if digits[i] != 0 {
                    break;
                }
                i += 1;
            }
        }
    }

    /// `Σ_p weight(p, columns(p))` over every profile, split across workers.
    pub fn sum(&self, weight: impl Fn(u64, &[u32]) -> u64 + Sync) -> Result<u64> {
        let size = self.require(EXACT_CAP_LOG2, "exact profile enumeration", ", use --mode mc")?;
        let block = |b: u64| {
            let mut acc = 0u64;
            self.for_each(b * BLOCK, ((b + 1) * BLOCK).min(size), |p, c| acc += weight(p, c));
            acc
        };
        let blocks = size.div_ceil(BLOCK);
        Ok(if blocks == 1 { block(0) } else { (0..blocks).into_par_iter().map(block).sum() })
    }

    /// Draws one uniform profile; returns its index and fills `cols`.
    pub fn sample(&self, rng: &mut impl Rng, cols: &mut [u32]) -> Option<u64> {
        let ops = self.agenda.consistent();
        let l = ops.len() as u64;
        cols.iter_mut().for_each(|c| *c = 0);
        let mut idx = Some(0u64);
        let mut scale = Some(1u64);
        for i in 0..self.voters {
            let d = rng.gen_range(0..ops.len());
            for (j, c) in cols.iter_mut().enumerate() {
                *c |= (ops[d] >> j & 1) << i;
            }
            idx = match (idx, scale) {
                (Some(a), Some(s)) => s.checked_mul(d as u64).and_then(|v| v.checked_add(a)),
                _ => None,
            };
            scale = scale.and_then(|s| s.checked_mul(l));
        }
        idx
    }
}

/// `⟨f¹, …, f^m⟩`: issue `j` aggregated by `fns[j-1]` on column `j` alone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndependentMechanism {
    fns: Vec<BoolFn>,
}

impl IndependentMechanism {
    pub fn new(fns: Vec<BoolFn>) -> Result<Self> {
        let first = fns.first().ok_or(Error::EmptyAgenda)?.arity();
        if fns.len() > MAX_ISSUES as usize {
            return Err(Error::IssueBudget(fns.len() as u32));
        }
        if let Some(f) = fns.iter().find(|f| f.arity() != first) {
            return Err(Error::ArityMismatch { left: first, right: f.arity() });
        }
        Ok(IndependentMechanism { fns })
    }

    /// The same function on every issue.
    pub fn systematic(f: BoolFn, issues: u32) -> Result<Self> {
        Self::new(vec![f; issues as usize])
    }

    pub fn oligarchy(s: Coalition, voters: u32, issues: u32) -> Result<Self> {
        Self::systematic(BoolFn::oligarchy(s, voters)?, issues)
    }

    pub fn voters(&self) -> u32 {
        self.fns[0].arity()
    }

    pub fn issues(&self) -> u32 {
        self.fns.len() as u32
    }

    pub fn fns(&self) -> &[BoolFn] {
        &self.fns
    }

    /// `f^issue` (1-based).
    pub fn function(&self, issue: u32) -> &BoolFn {
        &self.fns[issue as usize - 1]
    }

    #[inline]
    pub fn apply_columns(&self, cols: &[u32]) -> u32 {
        self.fns
            .iter()
            .zip(cols)
            .enumerate()
            .fold(0, |acc, (j, (f, &c))| acc | (f.get(c) as u32) << j)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("independent n={} m={}\n", self.voters(), self.issues());
        for f in &self.fns {
            s.push_str(&f.table_hex());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| Error::Parse("empty mechanism file".into()))?;
        let (n, m) = parse_header(head, "independent")?;
        let m = m.ok_or_else(|| Error::Parse("independent header needs m=".into()))?;
        let fns = lines.map(|l| BoolFn::from_table_hex(n, l)).collect::<Result<Vec<_>>>()?;
        if fns.len() != m as usize {
            return Err(Error::Parse(format!("expected {m} truth tables, found {}", fns.len())));
        }
        Self::new(fns)
    }

    /// Compact identifier: the truth tables joined by `/`.
    pub fn id_string(&self) -> String {
        let tables: Vec<String> = self.fns.iter().map(BoolFn::table_hex).collect();
        format!("n={}:{}", self.voters(), tables.join("/"))
    }
}

impl fmt::Debug for IndependentMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", self.id_string())
    }
}

fn parse_header(head: &str, tag: &str) -> Result<(u32, Option<u32>)> {
    let mut parts = head.split_whitespace();
    if parts.next() != Some(tag) {
        return Err(Error::Parse(format!("expected '{tag}' header, got '{head}'")));
    }
    let (mut n, mut m) = (None, None);
    for p in parts {
        match p.split_once('=') {
            Some(("n", v)) => n = v.parse().ok(),
            Some(("m", v)) => m = v.parse().ok(),
            _ => return Err(Error::Parse(format!("unknown header field '{p}'"))),
        }
    }
    Ok((n.ok_or_else(|| Error::Parse("header needs n=".into()))?, m))
}

/// An explicit output for every consistent profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableMechanism {
    agenda: Agenda,
    voters: u32,
    outputs: Vec<u32>,
}

impl TableMechanism {
    pub fn from_fn(agenda: &Agenda, voters: u32, f: impl Fn(u64, &[u32]) -> u32) -> Result<Self> {
        let space = ProfileSpace::new(agenda, voters)?;
        let size = space.require(TABLE_CAP_LOG2, "table mechanism", "")?;
        let mut outputs = Vec::with_capacity(size as usize);
        space.for_each(0, size, |p, c| outputs.push(f(p, c)));
        Self::from_outputs(agenda, voters, outputs)
    }

    pub fn from_outputs(agenda: &Agenda, voters: u32, outputs: Vec<u32>) -> Result<Self> {
        let space = ProfileSpace::new(agenda, voters)?;
        let size = space.require(TABLE_CAP_LOG2, "table mechanism", "")?;
        if outputs.len() as u64 != size {
            return Err(Error::Dimension(format!("{} outputs for {size} profiles", outputs.len())));
        }
        if let Some(&bad) = outputs.iter().find(|&&o| o >> agenda.issues() != 0) {
            return Err(Error::Dimension(format!("output {bad:#b} wider than the agenda")));
        }
        Ok(TableMechanism { agenda: agenda.clone(), voters, outputs })
    }

    /// Tabulates any mechanism over the agenda.
    pub fn tabulate(mech: &Mechanism, agenda: &Agenda, voters: u32) -> Result<Self> {
        check_dims(mech, agenda, voters)?;
        Self::from_fn(agenda, voters, |p, c| mech.output(p, c))
    }

    pub fn agenda(&self) -> &Agenda {
        &self.agenda
    }

    pub fn voters(&self) -> u32 {
        self.voters
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub fn output(&self, profile: u64) -> u32 {
        self.outputs[profile as usize]
    }

    pub fn to_text(&self) -> String {
        let m = self.agenda.issues();
        let mut s = format!("table n={}\nprofile,output\n", self.voters);
        for (p, &o) in self.outputs.iter().enumerate() {
            s.push_str(&format!("{p},{}\n", format_opinion(o, m)));
        }
        s
    }

    pub fn from_text(text: &str, agenda: &Agenda) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| Error::Parse("empty mechanism file".into()))?;
        let (n, _) = parse_header(head, "table")?;
        let size = ProfileSpace::new(agenda, n)?.require(TABLE_CAP_LOG2, "table mechanism", "")?;
        let mut outputs = vec![None; size as usize];
        for l in lines {
            if l == "profile,output" {
                continue;
            }
            let (p, o) = l.split_once(',').ok_or_else(|| Error::Parse(format!("bad row '{l}'")))?;
            let p: usize = p.trim().parse().map_err(|_| Error::Parse(format!("bad profile '{p}'")))?;
            let (o, len) = parse_opinion(o)?;
            if len != agenda.issues() || p >= outputs.len() {
                return Err(Error::Dimension(format!("row '{l}' does not fit the agenda")));
            }
            outputs[p] = Some(o);
        }
        let outputs = outputs
            .into_iter()
            .enumerate()
            .map(|(p, o)| o.ok_or_else(|| Error::Parse(format!("profile {p} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_outputs(agenda, n, outputs)
    }

    /// Identifier built from an FNV-1a hash of the outputs.
    pub fn id_string(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &o in &self.outputs {
            for b in o.to_le_bytes() {
                h = (h ^ b as u64).wrapping_mul(0x100_0000_01b3);
            }
        }
        format!("table:{h:016x}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mechanism {
    Independent(IndependentMechanism),
    Table(TableMechanism),
}

impl From<IndependentMechanism> for Mechanism {
    fn from(m: IndependentMechanism) -> Self {
        Mechanism::Independent(m)
    }
}

impl From<TableMechanism> for Mechanism {
    fn from(m: TableMechanism) -> Self {
        Mechanism::Table(m)
    }
}

impl Mechanism {
    pub fn voters(&self) -> u32 {
        match self {
            Mechanism::Independent(m) => m.voters(),
            Mechanism::Table(t) => t.voters,
        }
    }

    pub fn issues(&self) -> u32 {
        match self {
            Mechanism::Independent(m) => m.issues(),
            Mechanism::Table(t) => t.agenda.issues(),
        }
    }

    /// Output on the profile with index `profile` and columns `cols`.
    #[inline]
    pub fn output(&self, profile: u64, cols: &[u32]) -> u32 {
        match self {
            Mechanism::Independent(m) => m.apply_columns(cols),
            Mechanism::Table(t) => t.outputs[profile as usize],
        }
    }

    pub fn id_string(&self) -> String {
        match self {
            Mechanism::Independent(m) => m.id_string(),
            Mechanism::Table(t) => t.id_string(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Mechanism::Independent(m) => m.to_text(),
            Mechanism::Table(t) => t.to_text(),
        }
    }

    pub fn from_text(text: &str, agenda: &Agenda) -> Result<Self> {
        let head = text.trim_start();
        if head.starts_with("independent") {
            Ok(IndependentMechanism::from_text(text)?.into())
        } else if head.starts_with("table") {
            Ok(TableMechanism::from_text(text, agenda)?.into())
        } else {
            Err(Error::Parse("mechanism file must start with 'independent' or 'table'".into()))
        }
    }
}

/// Checks that `mech` fits `agenda` with `voters` voters.
pub fn check_dims(mech: &Mechanism, agenda: &Agenda, voters: u32) -> Result<()> {
    if mech.voters() != voters {
        return Err(Error::ArityMismatch { left: mech.voters(), right: voters });
    }
    if mech.issues() != agenda.issues() {
        return Err(Error::Dimension(format!(
            "mechanism has {} issues, agenda has {}",
            mech.issues(),
            agenda.issues()
        )));
    }
    if let Mechanism::Table(t) = mech {
        if &t.agenda != agenda {
            return Err(Error::Dimension("table mechanism built over a different agenda".into()));
        }
    }
    Ok(())
}

pub fn apply(mech: &Mechanism, agenda: &Agenda, x: &Profile) -> Result<u32> {
    check_dims(mech, agenda, x.voters())?;
    let idx = match mech {
        Mechanism::Table(_) => x.index(agenda),
        Mechanism::Independent(_) => 0,
    };
    Ok(mech.output(idx, &x.columns(agenda.issues())))
}

fn pair_dims(f: &Mechanism, g: &Mechanism, agenda: &Agenda) -> Result<u32> {
    let n = f.voters();
    check_dims(f, agenda, n)?;
    check_dims(g, agenda, n)?;
    Ok(n)
}

/// `Pr_X[F(X) ≠ G(X)]` over all consistent profiles.
pub fn mech_distance_exact(f: &Mechanism, g: &Mechanism, agenda: &Agenda) -> Result<Rational> {
    let n = pair_dims(f, g, agenda)?;
    let space = ProfileSpace::new(agenda, n)?;
    let diff = space.sum(|p, c| (f.output(p, c) != g.output(p, c)) as u64)?;
    Ok(Rational::ratio(diff, space.size().expect("within budget")))
}

pub fn mech_distance_mc(
    f: &Mechanism,
    g: &Mechanism,
    agenda: &Agenda,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    let n = pair_dims(f, g, agenda)?;
    let space = ProfileSpace::new(agenda, n)?;
    let m = agenda.issues() as usize;
    Ok(estimate_mean(seed, samples, 0, 1, |rng| {
        let mut cols = [0u32; MAX_ISSUES as usize];
        let p = space.sample(rng, &mut cols[..m]).unwrap_or(0);
        (f.output(p, &cols[..m]) != g.output(p, &cols[..m])) as i64
    }))
}

/// Replacement drawn for a perturbed profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rewrite {
    /// Uniform over all `2^m` opinion vectors.
    Uniform,
    /// The bitwise complement of the original output.
    Complement,
}

/// Rewrites each profile's output with probability `rate`.
pub fn perturb(mech: &Mechanism, agenda: &Agenda, rate: f64, seed: u64) -> Result<TableMechanism> {
    perturb_with(mech, agenda, rate, seed, Rewrite::Uniform)
}

pub fn perturb_with(
    mech: &Mechanism,
    agenda: &Agenda,
    rate: f64,
    seed: u64,
    rewrite: Rewrite,
) -> Result<TableMechanism> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!("flip rate {rate} outside [0, 1]")));
    }
    let base = TableMechanism::tabulate(mech, agenda, mech.voters())?;
    let m = agenda.issues();
    let full = (1u32 << m) - 1;
    let outputs = base
        .outputs
        .par_chunks(CHUNK as usize)
        .enumerate()
        .flat_map_iter(|(c, chunk)| {
            let mut rng = substream(seed, c as u64);
            chunk
                .iter()
                .map(|&o| {
                    let flip = rng.gen_bool(rate);
                    let fresh = rng.gen_range(0..=full);
                    match (flip, rewrite) {
                        (false, _) => o,
                        (true, Rewrite::Uniform) => fresh,
                        (true, Rewrite::Complement) => !o & full,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    TableMechanism::from_outputs(agenda, base.voters, outputs)
}

/// Overrides the outputs of the listed profiles.
pub fn flip_profiles(
    mech: &Mechanism,
    agenda: &Agenda,
    changes: &[(Profile, u32)],
) -> Result<TableMechanism> {
    let mut t = TableMechanism::tabulate(mech, agenda, mech.voters())?;
    for (x, o) in changes {
        if x.voters() != t.voters || o >> agenda.issues() != 0 {
            return Err(Error::Dimension("profile or output does not fit".into()));
        }
        let idx = x.index(agenda) as usize;
        t.outputs[idx] = *o;
    }
    Ok(t)
}

/// Consistent independent mechanisms known in closed form, sorted.
pub fn closed_families(agenda: &Agenda, voters: u32) -> Result<Vec<IndependentMechanism>> {
    if voters == 0 || voters > 5 {
        return Err(Error::InvalidParameter(format!("closed families need 1..=5 voters, got {voters}")));
    }
    let n = voters;
    let mut out = Vec::new();
    match agenda.kind() {
        AgendaKind::Conjunction(k) => {
            for s in 0..1u32 << n {
                out.push(IndependentMechanism::oligarchy(Coalition::new(s, n)?, n, k + 1)?);
            }
            let table = 1u32 << n;
            if (k * table) as u64 > 24 {
                return Err(Error::Budget {
                    what: "zero-collapsed conjunction family",
                    log2_size: k * table,
                    cap: 24,
                    hint: "",
                });
            }
            let zero = BoolFn::constant(n, false)?;
            let per = 1u64 << table;
            for code in 0..per.pow(k) {
                let mut c = code;
                let fns: Vec<BoolFn> = (0..k)
                    .map(|_| {
                        let bits = c % per;
                        c /= per;
                        table_from_index(n, bits)
                    })
                    .collect();
                if fns.contains(&zero) {
                    let mut fns = fns;
                    fns.push(zero.clone());
                    out.push(IndependentMechanism::new(fns)?);
                }
            }
        }
        AgendaKind::Xor(k) => {
            for s in 0..1u32 << n {
                let chi = BoolFn::linear(Coalition::new(s, n)?, n)?;
                for signs in 0..1u32 << (k + 1) {
                    if signs.count_ones() % 2 == 0 {
                        let fns = (0..=k)
                            .map(|j| if signs >> j & 1 == 1 { chi.negate() } else { chi.clone() })
                            .collect();
                        out.push(IndependentMechanism::new(fns)?);
                    }
                }
            }
        }
        AgendaKind::Id => {
            if n > 4 {
                return Err(Error::Budget { what: "id family", log2_size: 1 << n, cap: 16, hint: "" });
            }
            for bits in 0..1u64 << (1u32 << n) {
                let f = table_from_index(n, bits);
                out.push(IndependentMechanism::new(vec![f.clone(), f])?);
            }
        }
        other => return Err(Error::Unsupported(format!("no closed family for agenda '{other}'"))),
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The function with truth table `bits` (arity at most 6).
pub fn table_from_index(arity: u32, bits: u64) -> BoolFn {
    BoolFn::from_bits(arity, bits).expect("table fits arity")
}
