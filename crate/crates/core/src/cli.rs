//! Command-line front end. [`run`] parses arguments, executes one command
//! inside a fixed-size worker pool and writes CSV to stdout or `--out`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::agenda::{preference_agenda, AffineAgenda, Agenda, TruthFunctionalAgenda};
use crate::bitfn::{BoolFn, Coalition};
use crate::error::{Error, Result};
use crate::fourier::FourierSpectrum;
use crate::indices::{dependency_index, dependency_index_max, inconsistency_index, IndexReport, Mode};
use crate::mechanism::{IndependentMechanism, Mechanism};
use crate::oracle::{closed_family, enumerate_ci, enumerate_generic, enumerate_pruned, nearest_ci, verify_characterization, CIFamily};
use crate::rational::Rational;
use crate::theorems::{self, BoundReport, Verdict};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "APPROXAGG_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "approxagg", version, about = "Inconsistency and dependency indices for judgement aggregation")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Agenda construction.
    #[command(subcommand)]
    Agenda(AgendaCmd),
    /// Inconsistency and dependency indices.
    #[command(subcommand)]
    Indices(IndicesCmd),
    /// Enumeration of consistent independent mechanisms.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Executable bound checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Three-function linearity test.
    Blr(BlrArgs),
    /// Fourier spectrum of one function.
    Spectrum(SpectrumArgs),
}

#[derive(Subcommand, Debug)]
enum AgendaCmd {
    /// List the consistent opinions.
    Show(ShowArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Conjunction,
    Xor,
    Pref,
    Id,
}

#[derive(Args, Debug)]
struct ShowArgs {
    #[arg(long, conflicts_with_all = ["kind", "premises"])]
    agenda: Option<String>,
    #[arg(long, value_enum, requires = "premises")]
    kind: Option<KindArg>,
    /// Premise count, or alternative count for `pref`.
    #[arg(long)]
    premises: Option<u32>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(Args, Debug)]
struct ModeArgs {
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Required with `--mode mc`.
    #[arg(long)]
    seed: Option<u64>,
}

impl ModeArgs {
    fn mode(&self) -> Result<Mode> {
        match (self.mode, self.seed) {
            (ModeArg::Exact, _) => Ok(Mode::Exact),
            (ModeArg::Mc, Some(seed)) => Ok(Mode::MonteCarlo { samples: self.samples, seed }),
            (ModeArg::Mc, None) => Err(Error::InvalidParameter("--seed is required with --mode mc".into())),
        }
    }
}

#[derive(Args, Debug)]
struct MechArgs {
    #[arg(long)]
    agenda: String,
    #[arg(long)]
    mech: String,
    #[arg(long)]
    voters: u32,
}

#[derive(Subcommand, Debug)]
enum IndicesCmd {
    Ic {
        #[command(flatten)]
        target: MechArgs,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Per-issue dependency indices followed by their maximum.
    Di {
        #[command(flatten)]
        target: MechArgs,
        #[command(flatten)]
        mode: ModeArgs,
        /// Report only this issue.
        #[arg(long)]
        issue: Option<u32>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Generic,
    Pruned,
    Closed,
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    Enumerate {
        #[arg(long)]
        agenda: String,
        #[arg(long)]
        voters: u32,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    Nearest {
        #[command(flatten)]
        target: MechArgs,
        /// A family CSV written by `oracle enumerate`.
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Compare enumeration with the closed-form families.
    Verify {
        #[arg(long)]
        agenda: String,
        #[arg(long)]
        voters: u32,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    agenda: String,
    #[arg(long)]
    voters: u32,
    /// Check one mechanism instead of sweeping all independent ones.
    #[arg(long)]
    mech: Option<String>,
    /// Exit 1 when any bound is violated.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct FnsArgs {
    /// Comma-separated function specs.
    #[arg(long)]
    fns: String,
    #[arg(long)]
    voters: u32,
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Mand(SweepArgs),
    Mxor(SweepArgs),
    Relax {
        #[command(flatten)]
        target: MechArgs,
        /// Target distance, as `a/b` or a decimal.
        #[arg(long)]
        eps: String,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        strict: bool,
    },
    /// All voters and issue pairs unless narrowed.
    Boundpi {
        #[command(flatten)]
        fns: FnsArgs,
        #[arg(long)]
        voter: Option<u32>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
    },
    Granularity {
        #[command(flatten)]
        fns: FnsArgs,
        /// Comma-separated voters.
        #[arg(long)]
        junta: String,
    },
    Junta {
        #[command(flatten)]
        fns: FnsArgs,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        eps: String,
    },
}

#[derive(Args, Debug)]
struct BlrArgs {
    #[arg(long)]
    f: String,
    /// Defaults to `--f`.
    #[arg(long)]
    g: Option<String>,
    /// Defaults to `--f`.
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    voters: u32,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    voters: u32,
}

/// What a failed command reports: the offending key and an example.
#[derive(Debug)]
struct Usage {
    key: &'static str,
    error: Error,
}

fn usage(key: &'static str) -> impl FnOnce(Error) -> Usage {
    move |error| Usage { key, error }
}

const EXAMPLES: &[(&str, &str)] = &[
    ("agenda", "approxagg agenda show --kind conjunction --premises 2"),
    ("indices", "approxagg indices ic --agenda conjunction:2 --mech systematic:maj --voters 3 --mode exact"),
    ("oracle", "approxagg oracle verify --agenda xor:2 --voters 2"),
    ("verify", "approxagg verify mand --agenda conjunction:2 --voters 2"),
    ("blr", "approxagg blr --f lin0b101 --voters 3"),
    ("spectrum", "approxagg spectrum --fn maj --voters 3"),
];

fn example_for(args: &[OsString]) -> &'static str {
    args.iter()
        .skip(1)
        .find_map(|a| EXAMPLES.iter().find(|(k, _)| a.to_str() == Some(k)))
        .unwrap_or(&EXAMPLES[1])
        .1
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}\nexample: {}\n", example_for(&args));
            }
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: --workers: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok((csv, violated)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &csv).map_err(|e| format!("--out {}: {e}", path.display())),
                None => stdout.write_all(csv.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            if violated {
                EXIT_VIOLATED
            } else {
                EXIT_OK
            }
        }
        Err(u) => {
            let _ = writeln!(stderr, "error: --{}: {}\nexample: {}", u.key, u.error, example_for(&args));
            EXIT_USAGE
        }
    }
}

type Outcome = std::result::Result<(String, bool), Usage>;

fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Agenda(AgendaCmd::Show(a)) => show_agenda(a),
        Command::Indices(c) => indices(c),
        Command::Oracle(c) => oracle(c),
        Command::Verify(c) => verify(c),
        Command::Blr(a) => blr(a),
        Command::Spectrum(a) => {
            let f = parse_fn(&a.function, a.voters).map_err(usage("fn"))?;
            Ok((FourierSpectrum::transform(&f).to_csv(), false))
        }
    }
}

fn show_agenda(a: &ShowArgs) -> Outcome {
    let agenda = match (&a.agenda, a.kind, a.premises) {
        (Some(spec), _, _) => parse_agenda(spec).map_err(usage("agenda"))?,
        (None, Some(kind), Some(k)) => {
            let built = match kind {
                KindArg::Conjunction => Agenda::conjunction(k),
                KindArg::Xor => Agenda::xor(k),
                KindArg::Pref => preference_agenda(k),
                KindArg::Id => Ok(Agenda::id()),
            };
            built.map_err(usage("premises"))?
        }
        _ => {
            return Err(Usage { key: "agenda", error: Error::InvalidParameter("give --agenda or --kind with --premises".into()) })
        }
    };
    let mut out = String::from("agenda,index,opinion\n");
    for (i, op) in agenda.consistent().iter().enumerate() {
        let text = crate::agenda::format_opinion(*op, agenda.issues());
        out.push_str(&format!("{},{i},{text}\n", agenda.id_string()));
    }
    Ok((out, false))
}

fn load_target(t: &MechArgs) -> std::result::Result<(Agenda, Mechanism), Usage> {
    let agenda = parse_agenda(&t.agenda).map_err(usage("agenda"))?;
    let mech = parse_mechanism(&t.mech, &agenda, t.voters).map_err(usage("mech"))?;
    if mech.voters() != t.voters {
        return Err(Usage { key: "voters", error: Error::ArityMismatch { left: mech.voters(), right: t.voters } });
    }
    Ok((agenda, mech))
}

fn index_csv(rows: &[IndexReport]) -> String {
    let mut out = format!("{}\n", IndexReport::CSV_HEADER);
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn indices(c: &IndicesCmd) -> Outcome {
    match c {
        IndicesCmd::Ic { target, mode } => {
            let (agenda, mech) = load_target(target)?;
            let mode = mode.mode().map_err(usage("seed"))?;
            let r = inconsistency_index(&mech, &agenda, mode).map_err(usage("mode"))?;
            Ok((index_csv(&[r]), false))
        }
        IndicesCmd::Di { target, mode, issue } => {
            let (agenda, mech) = load_target(target)?;
            let mode = mode.mode().map_err(usage("seed"))?;
            let rows = match issue {
                Some(j) => vec![dependency_index(&mech, &agenda, *j, mode).map_err(usage("issue"))?],
                None => {
                    let mut rows = (1..=agenda.issues())
                        .map(|j| dependency_index(&mech, &agenda, j, mode))
                        .collect::<Result<Vec<_>>>()
                        .map_err(usage("mode"))?;
                    rows.push(dependency_index_max(&mech, &agenda, mode).map_err(usage("mode"))?);
                    rows
                }
            };
            Ok((index_csv(&rows), false))
        }
    }
}

fn family_csv(f: &CIFamily) -> String {
    let mut out = String::from("agenda,n,method,candidates,member,mechanism\n");
    for (i, m) in f.mechanisms.iter().enumerate() {
        out.push_str(&format!("{},{},{},{},{i},{}\n", f.agenda, f.voters, f.mode, f.candidates, m.id_string()));
    }
    out
}

fn oracle(c: &OracleCmd) -> Outcome {
    match c {
        OracleCmd::Enumerate { agenda, voters, method } => {
            let agenda = parse_agenda(agenda).map_err(usage("agenda"))?;
            let fam = match method {
                MethodArg::Auto => enumerate_ci(&agenda, *voters),
                MethodArg::Generic => enumerate_generic(&agenda, *voters),
                MethodArg::Pruned => enumerate_pruned(&agenda, *voters),
                MethodArg::Closed => closed_family(&agenda, *voters),
            }
            .map_err(usage("voters"))?;
            Ok((family_csv(&fam), false))
        }
        OracleCmd::Nearest { target, family } => {
            let (agenda, mech) = load_target(target)?;
            let fam = match family {
                Some(path) => {
                    let text = read_file(path).map_err(usage("family"))?;
                    parse_family_csv(&text, &agenda).map_err(usage("family"))?
                }
                None => closed_family(&agenda, target.voters)
                    .or_else(|_| enumerate_ci(&agenda, target.voters))
                    .map_err(usage("voters"))?,
            };
            let (g, d) = nearest_ci(&mech, &agenda, &fam).map_err(usage("mech"))?;
            let out = format!(
                "mechanism,agenda,nearest,distance_num,distance_den,distance\n{},{},{},{},{},{}\n",
                mech.id_string(),
                agenda.id_string(),
                g.id_string(),
                d.numer(),
                d.denom(),
                d.to_f64()
            );
            Ok((out, false))
        }
        OracleCmd::Verify { agenda, voters } => {
            let agenda = parse_agenda(agenda).map_err(usage("agenda"))?;
            let c = verify_characterization(&agenda, *voters).map_err(usage("voters"))?;
            let out = format!(
                "agenda,n,matches,enumerated,closed,only_enumerated,only_closed\n{},{voters},{},{},{},{},{}\n",
                agenda.id_string(),
                c.matches,
                c.enumerated,
                c.closed,
                c.only_enumerated.len(),
                c.only_closed.len()
            );
            Ok((out, false))
        }
    }
}

/// Reads a family back from the CSV written by `oracle enumerate`.
fn parse_family_csv(text: &str, agenda: &Agenda) -> Result<CIFamily> {
    let mut lines = text.lines();
    if lines.next() != Some("agenda,n,method,candidates,member,mechanism") {
        return CIFamily::from_text(text);
    }
    let mut fam: Option<CIFamily> = None;
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        let [name, n, method, candidates, _, mech] = cols[..] else {
            return Err(Error::Parse(format!("family row '{line}' needs 6 fields")));
        };
        let n: u32 = n.parse().map_err(|_| Error::Parse(format!("bad voter count '{n}'")))?;
        let m = parse_id_mechanism(mech)?;
        if m.issues() != agenda.issues() {
            return Err(Error::Dimension(format!("family member has {} issues, agenda {}", m.issues(), agenda.issues())));
        }
        let f = fam.get_or_insert(CIFamily {
            agenda: name.to_string(),
            voters: n,
            mode: method.parse()?,
            candidates: candidates.parse().map_err(|_| Error::Parse(format!("bad candidate count '{candidates}'")))?,
            mechanisms: Vec::new(),
        });
        f.mechanisms.push(m);
    }
    fam.ok_or_else(|| Error::Parse("family file has no members".into()))
}

fn report_csv(rows: &[BoundReport], strict: bool) -> (String, bool) {
    let mut out = format!("{}\n", BoundReport::CSV_HEADER);
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    (out, strict && rows.iter().any(|r| r.verdict() == Verdict::Violated))
}

fn sweep(a: &SweepArgs, xor: bool) -> Outcome {
    let agenda = parse_agenda(&a.agenda).map_err(usage("agenda"))?;
    let rows = match &a.mech {
        Some(spec) => {
            let mech = parse_mechanism(spec, &agenda, a.voters).map_err(usage("mech"))?;
            let Mechanism::Independent(f) = mech else {
                return Err(Usage { key: "mech", error: Error::Unsupported("bound checks need an independent mechanism".into()) });
            };
            let r = if xor { theorems::check_mxor(&f, &agenda) } else { theorems::check_mand(&f, &agenda) };
            vec![r.map_err(usage("agenda"))?]
        }
        None => theorems::sweep(&agenda, a.voters).map_err(usage("voters"))?,
    };
    Ok(report_csv(&rows, a.strict))
}

fn load_fns(a: &FnsArgs) -> std::result::Result<Vec<BoolFn>, Usage> {
    let fns = a.fns.split(',').map(|s| parse_fn(s, a.voters)).collect::<Result<Vec<_>>>().map_err(usage("fns"))?;
    if fns.len() < 2 {
        return Err(Usage { key: "fns", error: Error::InvalidParameter("need at least two functions".into()) });
    }
    Ok(fns)
}

fn verify(c: &VerifyCmd) -> Outcome {
    match c {
        VerifyCmd::Mand(a) => sweep(a, false),
        VerifyCmd::Mxor(a) => sweep(a, true),
        VerifyCmd::Relax { target, eps, beta, strict } => {
            let (agenda, mech) = load_target(target)?;
            let eps = parse_rational(eps).map_err(usage("eps"))?;
            let r = theorems::check_relax(&mech, &agenda, &eps, *beta).map_err(usage("mech"))?;
            Ok(report_csv(&[r], *strict))
        }
        VerifyCmd::Boundpi { fns, voter, k, l } => {
            let list = load_fns(fns)?;
            let m = list.len();
            let voters: Vec<u32> = voter.map_or_else(|| (1..=fns.voters).collect(), |v| vec![v]);
            let ks: Vec<usize> = k.map_or_else(|| (1..=m).collect(), |k| vec![k]);
            let ls: Vec<usize> = l.map_or_else(|| (1..=m).collect(), |l| vec![l]);
            let mut rows = Vec::new();
            for &i in &voters {
                for &k in &ks {
                    for &l in ls.iter().filter(|&&l| l != k) {
                        rows.push(theorems::check_boundpi(&list, i, k, l).map_err(usage("voter"))?);
                    }
                }
            }
            Ok(report_csv(&rows, fns.strict))
        }
        VerifyCmd::Granularity { fns, junta } => {
            let list = load_fns(fns)?;
            let members = junta
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad voter '{s}'"))))
                .collect::<Result<Vec<_>>>()
                .map_err(usage("junta"))?;
            let mask = members.iter().fold(0u64, |m, &v| if (1..=32).contains(&v) { m | 1 << (v - 1) } else { u64::MAX });
            let j = u32::try_from(mask)
                .map_err(|_| Error::InvalidParameter(format!("voters must lie in 1..={}", fns.voters)))
                .and_then(|m| Coalition::new(m, fns.voters))
                .map_err(usage("junta"))?;
            let r = theorems::check_granularity(&list, j).map_err(usage("junta"))?;
            Ok(report_csv(&[r], fns.strict))
        }
        VerifyCmd::Junta { fns, delta, eps } => {
            let list = load_fns(fns)?;
            let delta = parse_rational(delta).map_err(usage("delta"))?;
            let eps = parse_rational(eps).map_err(usage("eps"))?;
            let r = theorems::check_junta_lemma(&list, &delta, &eps).map_err(usage("fns"))?;
            Ok(report_csv(&[r], fns.strict))
        }
    }
}

fn blr(a: &BlrArgs) -> Outcome {
    let f = parse_fn(&a.f, a.voters).map_err(usage("f"))?;
    let g = a.g.as_deref().map_or(Ok(f.clone()), |s| parse_fn(s, a.voters)).map_err(usage("g"))?;
    let h = a.h.as_deref().map_or(Ok(f.clone()), |s| parse_fn(s, a.voters)).map_err(usage("h"))?;
    let mode = a.mode.mode().map_err(usage("seed"))?;
    let o = theorems::blr_three_function(&f, &g, &h, mode).map_err(usage("f"))?;
    let (csv, violated) = report_csv(std::slice::from_ref(&o.report), a.strict);
    let mut out = String::from("rejection_num,rejection_den,rejection,character,signs,d_f,d_g,d_h,constant,estimate,ci_low,ci_high,samples,seed\n");
    let signs: String = o.negated.iter().map(|&b| if b { '-' } else { '+' }).collect();
    let (est, lo, hi, samples, seed) = match o.estimate {
        Some(e) => (e.mean.to_string(), e.ci_low.to_string(), e.ci_high.to_string(), e.samples.to_string(), e.seed.to_string()),
        None => Default::default(),
    };
    out.push_str(&format!(
        "{},{},{},{:#b},{signs},{},{},{},{},{est},{lo},{hi},{samples},{seed}\n\n",
        o.rejection.numer(),
        o.rejection.denom(),
        o.rejection.to_f64(),
        o.character.mask(),
        o.distances[0],
        o.distances[1],
        o.distances[2],
        o.constant.map(|c| c.to_string()).unwrap_or_default(),
    ));
    out.push_str(&csv);
    Ok((out, violated))
}

fn read_file(path: &std::path::Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn file_arg(spec: &str) -> Result<String> {
    read_file(std::path::Path::new(spec))
}

/// `conjunction:k`, `xor:k`, `pref:s`, `id`, `affine:@file`, `tf:@file`, or `@file`
/// with an explicit opinion list.
pub fn parse_agenda(spec: &str) -> Result<Agenda> {
    let spec = spec.trim();
    let count = |s: &str| s.parse::<u32>().map_err(|_| Error::Parse(format!("bad count '{s}' in agenda spec '{spec}'")));
    if spec == "id" {
        return Ok(Agenda::id());
    }
    if let Some(path) = spec.strip_prefix('@') {
        return Agenda::from_text(&file_arg(path)?);
    }
    match spec.split_once(':') {
        Some(("conjunction", k)) => Agenda::conjunction(count(k)?),
        Some(("xor", k)) => Agenda::xor(count(k)?),
        Some(("pref", s)) => preference_agenda(count(s)?),
        Some(("affine", f)) => {
            let path = f.strip_prefix('@').ok_or_else(|| Error::Parse("affine agendas are read from affine:@file".into()))?;
            Ok(AffineAgenda::from_text(&file_arg(path)?)?.expand())
        }
        Some(("tf", f)) => {
            let path = f.strip_prefix('@').ok_or_else(|| Error::Parse("truth-functional agendas are read from tf:@file".into()))?;
            Ok(TruthFunctionalAgenda::from_text(&file_arg(path)?)?.expand())
        }
        _ => Err(Error::Parse(format!(
            "unknown agenda spec '{spec}' (expected conjunction:k, xor:k, pref:s, id, affine:@file, tf:@file or @file)"
        ))),
    }
}

/// A coalition mask: decimal, `0x` hex or `0b` binary, bit `i-1` for voter `i`.
pub fn parse_mask(s: &str) -> Result<u32> {
    let bad = || Error::Parse(format!("bad mask '{s}'"));
    if let Some(b) = s.strip_prefix("0b") {
        u32::from_str_radix(b, 2).map_err(|_| bad())
    } else if let Some(h) = s.strip_prefix("0x") {
        u32::from_str_radix(h, 16).map_err(|_| bad())
    } else {
        s.parse().map_err(|_| bad())
    }
}

/// `maj`, `dict<i>`, `const0`, `const1`, `olig<mask>`, `lin<mask>`, a negation
/// prefix `!`, or a truth table `n=<arity>:<hex>`.
pub fn parse_fn(spec: &str, voters: u32) -> Result<BoolFn> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix('!') {
        return Ok(parse_fn(rest, voters)?.negate());
    }
    if spec.starts_with("n=") {
        let f: BoolFn = spec.parse()?;
        if f.arity() != voters {
            return Err(Error::ArityMismatch { left: f.arity(), right: voters });
        }
        return Ok(f);
    }
    match spec {
        "maj" => return BoolFn::majority(Coalition::full(voters), voters),
        "const0" => return BoolFn::constant(voters, false),
        "const1" => return BoolFn::constant(voters, true),
        _ => {}
    }
    if let Some(i) = spec.strip_prefix("dict") {
        let i = i.parse().map_err(|_| Error::Parse(format!("bad dictator '{spec}'")))?;
        return BoolFn::dictator(i, voters);
    }
    if let Some(m) = spec.strip_prefix("olig") {
        return BoolFn::oligarchy(Coalition::new(parse_mask(m)?, voters)?, voters);
    }
    if let Some(m) = spec.strip_prefix("lin") {
        return BoolFn::linear(Coalition::new(parse_mask(m)?, voters)?, voters);
    }
    Err(Error::Parse(format!(
        "unknown function '{spec}' (expected maj, dict<i>, const0, const1, olig<mask>, lin<mask> or n=<arity>:<hex>)"
    )))
}

/// The `n=<arity>:<hex>/<hex>/...` form of [`IndependentMechanism::id_string`].
pub fn parse_id_mechanism(spec: &str) -> Result<IndependentMechanism> {
    let rest = spec.strip_prefix("n=").ok_or_else(|| Error::Parse(format!("mechanism id '{spec}' must start with n=")))?;
    let (n, tables) = rest.split_once(':').ok_or_else(|| Error::Parse(format!("mechanism id '{spec}' missing ':'")))?;
    let n: u32 = n.parse().map_err(|_| Error::Parse(format!("bad arity in '{spec}'")))?;
    let fns = tables.split('/').map(|h| BoolFn::from_table_hex(n, h)).collect::<Result<Vec<_>>>()?;
    IndependentMechanism::new(fns)
}

/// `systematic:<fn>`, `olig:<mask>`, `linear:<mask>:<signs>` with one `+` or `-`
/// per issue, an id string `n=<arity>:<hex>/...`, or `@file`.
pub fn parse_mechanism(spec: &str, agenda: &Agenda, voters: u32) -> Result<Mechanism> {
    let spec = spec.trim();
    let m = agenda.issues();
    if let Some(path) = spec.strip_prefix('@') {
        return Mechanism::from_text(&file_arg(path)?, agenda);
    }
    if spec.starts_with("n=") {
        return Ok(parse_id_mechanism(spec)?.into());
    }
    let mech = match spec.split_once(':') {
        Some(("systematic", f)) => IndependentMechanism::systematic(parse_fn(f, voters)?, m)?,
        Some(("olig", mask)) => IndependentMechanism::oligarchy(Coalition::new(parse_mask(mask)?, voters)?, voters, m)?,
        Some(("linear", rest)) => {
            let (mask, signs) = rest.split_once(':').unwrap_or((rest, ""));
            let chi = BoolFn::linear(Coalition::new(parse_mask(mask)?, voters)?, voters)?;
            let signs: Vec<char> = if signs.is_empty() { vec!['+'; m as usize] } else { signs.chars().collect() };
            if signs.len() != m as usize || signs.iter().any(|c| !matches!(c, '+' | '-')) {
                return Err(Error::Parse(format!("signs '{}' need one of + or - per issue ({m})", signs.iter().collect::<String>())));
            }
            IndependentMechanism::new(signs.iter().map(|&c| if c == '-' { chi.negate() } else { chi.clone() }).collect())?
        }
        _ => {
            return Err(Error::Parse(format!(
                "unknown mechanism spec '{spec}' (expected systematic:<fn>, olig:<mask>, linear:<mask>:<signs>, n=<arity>:<hex>/... or @file)"
            )))
        }
    };
    Ok(mech.into())
}

/// `a/b`, an integer, or a finite decimal, read exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}' (expected a/b or a decimal)"));
    let int = |t: &str| t.parse::<BigInt>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once('/') {
        let b = int(b)?;
        if b == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(int(a)?, b));
    }
    match s.split_once('.') {
        Some((whole, frac)) if !frac.is_empty() && frac.bytes().all(|c| c.is_ascii_digit()) => {
            let neg = whole.starts_with('-');
            let digits = format!("{}{frac}", whole.trim_start_matches('-'));
            let v = Rational::new(int(&digits)?, BigInt::from(10).pow(frac.len() as u32));
            Ok(if neg { Rational::zero() - v } else { v })
        }
        Some(_) => Err(bad()),
        None => Ok(Rational::new(int(s)?, 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("approxagg").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn agenda_show() {
        let (code, out, _) = call(&["agenda", "show", "--kind", "conjunction", "--premises", "2"]);
        assert_eq!(code, 0);
        let ops: Vec<&str> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
        assert_eq!(ops, ["000", "100", "010", "111"]);
    }

    #[test]
    fn indices_ic_row() {
        let (code, out, _) =
            call(&["indices", "ic", "--agenda", "conjunction:2", "--mech", "systematic:maj", "--voters", "3", "--mode", "exact"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().nth(1), Some("n=3:e8/e8/e8,conjunction:2,ic,,exact,3,5,32,0.09375,,,,"));
    }

    #[test]
    fn oracle_verify_xor() {
        let (code, out, _) = call(&["oracle", "verify", "--agenda", "xor:2", "--voters", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().nth(1), Some("xor:2,2,true,16,16,0,0"));
    }

    #[test]
    fn usage_errors() {
        let (code, _, err) = call(&["indices", "ic", "--agenda", "conjunction:2", "--mech", "systematic:maj", "--voters", "3", "--mode", "mc"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--seed") && err.contains("example: approxagg indices"), "{err}");
        let (code, _, err) = call(&["indices", "ic", "--agenda", "conj:2", "--mech", "systematic:maj", "--voters", "3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--agenda"), "{err}");
        let (code, _, err) = call(&["oracle", "verify", "--agenda", "xor:2", "--voters", "2", "--bogus", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--bogus") && err.contains("example: approxagg oracle"), "{err}");
    }

    #[test]
    fn spec_parsers() {
        let a = Agenda::xor(2).unwrap();
        let m = parse_mechanism("linear:0b11:+-+", &a, 2).unwrap();
        assert_eq!(m.id_string(), "n=2:6/9/6");
        assert_eq!(parse_mechanism("n=2:6/9/6", &a, 2).unwrap(), m);
        assert_eq!(parse_fn("!dict1", 2).unwrap(), BoolFn::dictator(1, 2).unwrap().negate());
        assert_eq!(parse_rational("0.125").unwrap(), Rational::ratio(1, 8));
        assert_eq!(parse_rational("3/24").unwrap(), Rational::ratio(1, 8));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn strict_exit() {
        let (code, out, _) = call(&["verify", "mxor", "--agenda", "xor:2", "--voters", "2", "--mech", "linear:3:+++", "--strict"]);
        assert_eq!(code, 0);
        assert!(out.contains(",satisfied,"));
    }
}
