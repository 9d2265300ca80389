//! Agendas: sets of consistent opinions over `m` binary issues.
//!
//! An opinion is an `m`-bit mask, issue `j` (1-based) is bit `j - 1`. As text
//! an opinion is written issue 1 first, so the mask `0b001` reads `100`.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub const MAX_ISSUES: u32 = 16;

/// Writes `opinion` as `m` characters, issue 1 leftmost.
pub fn format_opinion(opinion: u32, issues: u32) -> String {
    (0..issues)
        .map(|j| if opinion >> j & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses an opinion string written issue 1 leftmost.
pub fn parse_opinion(s: &str) -> Result<(u32, u32)> {
    let s = s.trim();
    if s.is_empty() || s.len() > MAX_ISSUES as usize {
        return Err(Error::Parse(format!("opinion '{s}' must have 1..=16 bits")));
    }
    let mut v = 0u32;
    for (j, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => v |= 1 << j,
            _ => return Err(Error::Parse(format!("bad opinion character '{c}' in '{s}'"))),
        }
    }
    Ok((v, s.len() as u32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConclusionKind {
    And,
    Xor,
}

/// One conclusion issue `Φ(premises)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Conclusion {
    pub kind: ConclusionKind,
    /// Premise mask (premise `p` is bit `p - 1`).
    pub inputs: u32,
    /// Inputs read negated; a subset of `inputs`.
    pub negmask: u32,
    pub negout: bool,
}

impl Conclusion {
    pub fn new(kind: ConclusionKind, inputs: u32, negmask: u32, negout: bool) -> Self {
        Conclusion { kind, inputs, negmask, negout }
    }

    pub fn evaluate(&self, premises: u32) -> bool {
        let v = (premises ^ self.negmask) & self.inputs;
        let out = match self.kind {
            ConclusionKind::And => v == self.inputs,
            ConclusionKind::Xor => v.count_ones() % 2 == 1,
        };
        out ^ self.negout
    }
}

/// Premises range freely; each conclusion is a fixed function of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthFunctionalAgenda {
    premises: u32,
    conclusions: Vec<Conclusion>,
}

impl TruthFunctionalAgenda {
    pub fn new(premises: u32, conclusions: Vec<Conclusion>) -> Result<Self> {
        let issues = premises as usize + conclusions.len();
        if issues == 0 {
            return Err(Error::EmptyAgenda);
        }
        if issues > MAX_ISSUES as usize {
            return Err(Error::IssueBudget(issues as u32));
        }
        let all = (1u32 << premises) - 1;
        for c in &conclusions {
            if c.inputs & !all != 0 {
                return Err(Error::InvalidAgenda(format!(
                    "conclusion reads premise outside 1..={premises}"
                )));
            }
            if c.negmask & !c.inputs != 0 {
                return Err(Error::InvalidAgenda("negation mask outside the inputs".into()));
            }
        }
        Ok(TruthFunctionalAgenda { premises, conclusions })
    }

    pub fn premises(&self) -> u32 {
        self.premises
    }

    pub fn conclusions(&self) -> &[Conclusion] {
        &self.conclusions
    }

    pub fn issues(&self) -> u32 {
        self.premises + self.conclusions.len() as u32
    }

    /// The opinion whose premises are `assignment`.
    pub fn opinion(&self, assignment: u32) -> u32 {
        let mut v = assignment;
        for (c, concl) in self.conclusions.iter().enumerate() {
            if concl.evaluate(assignment) {
                v |= 1 << (self.premises as usize + c);
            }
        }
        v
    }

    pub fn expand(&self) -> Agenda {
        let consistent: Vec<u32> = (0..1u32 << self.premises).map(|a| self.opinion(a)).collect();
        let kind = self.recognize();
        Agenda::build(self.issues(), consistent, kind, Some(self.clone()))
            .expect("truth-functional expansion is a valid agenda")
    }

    fn recognize(&self) -> AgendaKind {
        let all = (1u32 << self.premises) - 1;
        match self.conclusions.as_slice() {
            [c] if c.inputs == all && c.negmask == 0 && !c.negout => {
                if self.premises == 1 {
                    AgendaKind::Id
                } else if c.kind == ConclusionKind::And {
                    AgendaKind::Conjunction(self.premises)
                } else {
                    AgendaKind::Xor(self.premises)
                }
            }
            _ => AgendaKind::TruthFunctional,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("k={}\n", self.premises);
        for c in &self.conclusions {
            let kind = match c.kind {
                ConclusionKind::And => "AND",
                ConclusionKind::Xor => "XOR",
            };
            let inputs: Vec<String> =
                (0..self.premises).filter(|p| c.inputs >> p & 1 == 1).map(|p| (p + 1).to_string()).collect();
            s.push_str(&format!(
                "{kind} inputs={} negmask={} negout={}\n",
                inputs.join(","),
                format_opinion(c.negmask, self.premises),
                c.negout as u8
            ));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| Error::Parse("empty agenda file".into()))?;
        let premises: u32 = head
            .strip_prefix("k=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected 'k=<premises>', got '{head}'")))?;
        if premises > MAX_ISSUES {
            return Err(Error::IssueBudget(premises));
        }
        let mut conclusions = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let kind = match parts.next() {
                Some("AND") => ConclusionKind::And,
                Some("XOR") => ConclusionKind::Xor,
                other => return Err(Error::Parse(format!("unknown conclusion kind {other:?}"))),
            };
            let (mut inputs, mut negmask, mut negout) = (None, 0u32, false);
            for p in parts {
                let (key, value) =
                    p.split_once('=').ok_or_else(|| Error::Parse(format!("bad field '{p}'")))?;
                match key {
                    "inputs" => {
                        let mut m = 0u32;
                        for v in value.split(',').filter(|v| !v.is_empty()) {
                            let i: u32 = v.parse().map_err(|_| Error::Parse(format!("bad input '{v}'")))?;
                            if i == 0 || i > premises {
                                return Err(Error::IssueOutOfRange { issue: i, issues: premises });
                            }
                            m |= 1 << (i - 1);
                        }
                        inputs = Some(m);
                    }
                    "negmask" => {
                        if value.len() != premises as usize {
                            return Err(Error::Parse(format!("negmask '{value}' needs {premises} bits")));
                        }
                        negmask = parse_opinion(value)?.0;
                    }
                    "negout" => {
                        negout = match value {
                            "0" => false,
                            "1" => true,
                            _ => return Err(Error::Parse(format!("bad negout '{value}'"))),
                        }
                    }
                    _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
                }
            }
            let inputs = inputs.ok_or_else(|| Error::Parse(format!("missing inputs in '{line}'")))?;
            conclusions.push(Conclusion::new(kind, inputs, negmask, negout));
        }
        Self::new(premises, conclusions)
    }
}

/// `⟨A1, …, Ak, A1 ∧ … ∧ Ak⟩`.
pub fn conjunction_agenda(premises: u32) -> Result<TruthFunctionalAgenda> {
    single_conclusion(premises, ConclusionKind::And)
}

/// `⟨A1, …, Ak, A1 ⊕ … ⊕ Ak⟩`: the opinions of even weight.
pub fn xor_agenda(premises: u32) -> Result<TruthFunctionalAgenda> {
    single_conclusion(premises, ConclusionKind::Xor)
}

fn single_conclusion(premises: u32, kind: ConclusionKind) -> Result<TruthFunctionalAgenda> {
    if premises == 0 || premises >= MAX_ISSUES {
        return Err(Error::InvalidParameter(format!("premise count {premises} outside 1..=15")));
    }
    TruthFunctionalAgenda::new(premises, vec![Conclusion::new(kind, (1 << premises) - 1, 0, false)])
}

/// Issues `⟨i,j⟩`, `i < j`, in lexicographic order; bit set iff `c_i` is
/// preferred to `c_j`.
pub fn preference_agenda(candidates: u32) -> Result<Agenda> {
    if !(3..=5).contains(&candidates) {
        return Err(Error::InvalidParameter(format!("candidate count {candidates} outside 3..=5")));
    }
    let s = candidates as usize;
    let pairs: Vec<(usize, usize)> = (0..s).flat_map(|i| (i + 1..s).map(move |j| (i, j))).collect();
    let mut rank: Vec<usize> = (0..s).collect();
    let mut out = Vec::new();
    permutations(&mut rank, 0, &mut |r| {
        let mut v = 0u32;
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if r[i] < r[j] {
                v |= 1 << b;
            }
        }
        out.push(v);
    });
    Agenda::build(pairs.len() as u32, out, AgendaKind::Preference(candidates), None)
}

fn permutations(v: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, visit);
        v.swap(k, i);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AgendaKind {
    Conjunction(u32),
    Xor(u32),
    Id,
    Preference(u32),
    TruthFunctional,
    Affine,
    Explicit,
}

impl fmt::Display for AgendaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgendaKind::Conjunction(k) => write!(f, "conjunction:{k}"),
            AgendaKind::Xor(k) => write!(f, "xor:{k}"),
            AgendaKind::Id => write!(f, "id"),
            AgendaKind::Preference(s) => write!(f, "pref:{s}"),
            AgendaKind::TruthFunctional => write!(f, "tf"),
            AgendaKind::Affine => write!(f, "affine"),
            AgendaKind::Explicit => write!(f, "explicit"),
        }
    }
}

/// A non-empty sorted set of consistent opinions.
#[derive(Clone, Debug)]
pub struct Agenda {
    issues: u32,
    consistent: Vec<u32>,
    member: Vec<u64>,
    kind: AgendaKind,
    tf: Option<TruthFunctionalAgenda>,
}

impl PartialEq for Agenda {
    fn eq(&self, other: &Self) -> bool {
        self.issues == other.issues && self.consistent == other.consistent
    }
}

impl Eq for Agenda {}

impl Agenda {
    pub fn new(issues: u32, opinions: Vec<u32>) -> Result<Self> {
        Self::build(issues, opinions, AgendaKind::Explicit, None)
    }

    fn build(
        issues: u32,
        mut opinions: Vec<u32>,
        kind: AgendaKind,
        tf: Option<TruthFunctionalAgenda>,
    ) -> Result<Self> {
        if issues == 0 || issues > MAX_ISSUES {
            return Err(Error::IssueBudget(issues));
        }
        if opinions.is_empty() {
            return Err(Error::EmptyAgenda);
        }
        if let Some(&bad) = opinions.iter().find(|&&o| o >> issues != 0) {
            return Err(Error::InvalidAgenda(format!("opinion {bad:#b} wider than {issues} issues")));
        }
        opinions.sort_unstable();
        opinions.dedup();
        let mut member = vec![0u64; (1usize << issues).div_ceil(64)];
        for &o in &opinions {
            member[(o >> 6) as usize] |= 1 << (o & 63);
        }
        Ok(Agenda { issues, consistent: opinions, member, kind, tf })
    }

    pub fn conjunction(premises: u32) -> Result<Self> {
        Ok(conjunction_agenda(premises)?.expand())
    }

    pub fn xor(premises: u32) -> Result<Self> {
        Ok(xor_agenda(premises)?.expand())
    }

    /// `⟨A, A⟩`: two issues that must agree.
    pub fn id() -> Self {
        conjunction_agenda(1).expect("one premise").expand()
    }

    pub fn issues(&self) -> u32 {
        self.issues
    }

    pub fn consistent(&self) -> &[u32] {
        &self.consistent
    }

    pub fn len(&self) -> usize {
        self.consistent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.consistent.is_empty()
    }

    pub fn kind(&self) -> AgendaKind {
        self.kind
    }

    pub fn truth_functional(&self) -> Option<&TruthFunctionalAgenda> {
        self.tf.as_ref()
    }

    /// Identifier used in reports.
    pub fn id_string(&self) -> String {
        self.kind.to_string()
    }

    pub fn is_consistent(&self, opinion: u32) -> bool {
        opinion >> self.issues == 0 && self.member[(opinion >> 6) as usize] >> (opinion & 63) & 1 == 1
    }

    pub fn index_of(&self, opinion: u32) -> Option<usize> {
        self.consistent.binary_search(&opinion).ok()
    }

    fn check_issue(&self, issue: u32) -> Result<()> {
        if issue == 0 || issue > self.issues {
            return Err(Error::IssueOutOfRange { issue, issues: self.issues });
        }
        Ok(())
    }

    /// Fraction of consistent opinions answering 1 on `issue`.
    pub fn issue_marginal(&self, issue: u32) -> Result<Rational> {
        self.check_issue(issue)?;
        let ones = self.consistent.iter().filter(|&&o| o >> (issue - 1) & 1 == 1).count();
        Ok(Rational::ratio(ones as u64, self.consistent.len() as u64))
    }

    /// Consistent opinions whose answer on `issue` is `bit`.
    pub fn with_bit(&self, issue: u32, bit: bool) -> Result<Vec<u32>> {
        self.check_issue(issue)?;
        Ok(self.consistent.iter().copied().filter(|&o| (o >> (issue - 1) & 1 == 1) == bit).collect())
    }

    /// A consistent opinion at minimum Hamming distance (smallest on ties).
    pub fn nearest_consistent(&self, opinion: u32) -> u32 {
        *self
            .consistent
            .iter()
            .min_by_key(|&&o| ((o ^ opinion).count_ones(), o))
            .expect("agenda is non-empty")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("m={}\n", self.issues);
        for &o in &self.consistent {
            s.push_str(&format_opinion(o, self.issues));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| Error::Parse("empty agenda file".into()))?;
        let issues: u32 = head
            .strip_prefix("m=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected 'm=<issues>', got '{head}'")))?;
        let mut opinions = Vec::new();
        for l in lines {
            let (v, len) = parse_opinion(l)?;
            if len != issues {
                return Err(Error::Parse(format!("opinion '{l}' does not have {issues} bits")));
            }
            opinions.push(v);
        }
        Self::new(issues, opinions)
    }
}

/// `{x ⊕ shift : A x = 0}` over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineAgenda {
    issues: u32,
    rows: Vec<u32>,
    shift: u32,
}

/// Issue `t` of the truth-functional form is issue `original[t]` (1-based)
/// of the affine agenda.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    pub original: Vec<u32>,
}

impl Relabeling {
    pub fn apply(&self, opinion: u32) -> u32 {
        self.original
            .iter()
            .enumerate()
            .filter(|&(t, _)| opinion >> t & 1 == 1)
            .fold(0, |acc, (_, &o)| acc | 1 << (o - 1))
    }

    pub fn apply_agenda(&self, agenda: &Agenda) -> Result<Agenda> {
        Agenda::build(
            agenda.issues(),
            agenda.consistent().iter().map(|&o| self.apply(o)).collect(),
            AgendaKind::Affine,
            None,
        )
    }
}

impl AffineAgenda {
    pub fn new(issues: u32, rows: Vec<u32>, shift: u32) -> Result<Self> {
        if issues == 0 || issues > MAX_ISSUES {
            return Err(Error::IssueBudget(issues));
        }
        if rows.iter().chain(std::iter::once(&shift)).any(|&r| r >> issues != 0) {
            return Err(Error::Dimension(format!("row or shift wider than {issues} issues")));
        }
        let rank = gf2_rank(&rows);
        if rank != rows.len() {
            return Err(Error::RankDeficient { rank, rows: rows.len() });
        }
        Ok(AffineAgenda { issues, rows, shift })
    }

    pub fn issues(&self) -> u32 {
        self.issues
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// Direct enumeration of all `2^m` opinions.
    pub fn expand(&self) -> Agenda {
        let ops: Vec<u32> = (0..1u32 << self.issues)
            .filter(|&y| self.rows.iter().all(|&r| ((y ^ self.shift) & r).count_ones().is_multiple_of(2)))
            .collect();
        Agenda::build(self.issues, ops, AgendaKind::Affine, None).expect("shift is a member")
    }

    /// Text form: `m=<issues>`, `shift=<bits>`, then one row per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("m={}\nshift={}\n", self.issues, format_opinion(self.shift, self.issues));
        for &r in &self.rows {
            s.push_str(&format_opinion(r, self.issues));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| Error::Parse("empty affine file".into()))?;
        let issues: u32 = head
            .strip_prefix("m=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected 'm=<issues>', got '{head}'")))?;
        let mut shift = 0;
        let mut rows = Vec::new();
        for l in lines {
            let (body, is_shift) = match l.strip_prefix("shift=") {
                Some(b) => (b, true),
                None => (l, false),
            };
            let (v, len) = parse_opinion(body)?;
            if len != issues {
                return Err(Error::Parse(format!("row '{body}' does not have {issues} bits")));
            }
            if is_shift {
                shift = v;
            } else {
                rows.push(v);
            }
        }
        Self::new(issues, rows, shift)
    }
}

fn gf2_rank(rows: &[u32]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Reduces `A y = A·shift` to row echelon form with leftmost pivots. Pivot
/// issues become XOR conclusions of the free issues, the right-hand side
/// becomes the output negation.
pub fn affine_to_truth_functional(a: &AffineAgenda) -> Result<(TruthFunctionalAgenda, Relabeling)> {
    let m = a.issues;
    let mut eq: Vec<(u32, bool)> =
        a.rows.iter().map(|&r| (r, (r & a.shift).count_ones() % 2 == 1)).collect();
    let mut pivots: Vec<(u32, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..m {
        let Some(p) = (next..eq.len()).find(|&i| eq[i].0 >> col & 1 == 1) else { continue };
        eq.swap(next, p);
        let (pr, pb) = eq[next];
        for (i, e) in eq.iter_mut().enumerate() {
            if i != next && e.0 >> col & 1 == 1 {
                e.0 ^= pr;
                e.1 ^= pb;
            }
        }
        pivots.push((col, next));
        next += 1;
    }
    if next != eq.len() {
        return Err(Error::RankDeficient { rank: next, rows: eq.len() });
    }
    let pivot_mask: u32 = pivots.iter().fold(0, |acc, &(c, _)| acc | 1 << c);
    let free: Vec<u32> = (0..m).filter(|c| pivot_mask >> c & 1 == 0).collect();
    let mut original: Vec<u32> = free.iter().map(|c| c + 1).collect();
    let mut conclusions = Vec::new();
    for &(col, row) in &pivots {
        let (r, b) = eq[row];
        let inputs = free
            .iter()
            .enumerate()
            .filter(|&(_, &c)| r >> c & 1 == 1)
            .fold(0u32, |acc, (t, _)| acc | 1 << t);
        conclusions.push(Conclusion::new(ConclusionKind::Xor, inputs, 0, b));
        original.push(col + 1);
    }
    Ok((TruthFunctionalAgenda::new(free.len() as u32, conclusions)?, Relabeling { original }))
}
