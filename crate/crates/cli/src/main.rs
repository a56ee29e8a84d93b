use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kframe::io::{frame_dot, hasse_dot, parse_congruence, parse_lattice, CongruenceFile, IoError, LatticeFile};
use kframe::mfamily::{m_d_reduced_witness, m_quotient_cofinite, sample_m_pairs, MIdealRep};
use kframe::verify::{build_corpus, registry, run_all, run_check, CheckContext, Corpus};
use kframe::{enumerate_congruences, is_d_reduced, Congruence, Congruences, Lattice, Limits};
use serde_json::json;

#[derive(Parser)]
#[command(name = "kframe", version, about = "Congruences of finite distributive lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a lattice file and describe the lattice.
    Build {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List every congruence with its closed/open/clear/dense tags.
    Congruences {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// The closure cl(C) of a congruence.
    Closure {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        congruence: PathBuf,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Clear congruences: ∂ of an ideal, the largest congruence dense in C,
    /// or 𝔇 ∨ ∇a. With no selector, ∂ of every ideal.
    Clear {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, conflicts_with_all = ["congruence", "element"])]
        ideal: Option<usize>,
        #[arg(long, conflicts_with = "element")]
        congruence: Option<PathBuf>,
        #[arg(long)]
        element: Option<usize>,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// The quotient by a congruence file, or by ∇ of the ideal ↓i.
    Quotient {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, required_unless_present = "ideal", conflicts_with = "ideal")]
        congruence: Option<PathBuf>,
        #[arg(long)]
        ideal: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// The countable lattice M of finite subsets of ℕ plus ℕ, and its
    /// quotient by ∇ of a cofinite ideal.
    Mdemo {
        /// Ideal literal, `fin-of co{…}`.
        #[arg(default_value = "fin-of co{2}")]
        ideal: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Run the check registry, or one named check.
    Verify {
        name: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_poset: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Run on this lattice alone instead of the generated corpus.
        #[arg(long)]
        lattice: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Graphviz DOT for the Hasse diagram or the congruence frame.
    Export {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(value_enum, default_value_t = Diagram::Hasse)]
        diagram: Diagram,
    },
}

#[derive(Args)]
struct LatticeArg {
    #[arg(long = "lattice")]
    path: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Diagram {
    Hasse,
    Frame,
}

#[derive(Debug)]
enum CliError {
    Read(PathBuf, std::io::Error),
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            CliError::Input(m) => f.write_str(m),
        }
    }
}

fn input(path: &Path) -> impl Fn(IoError) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Standard output plus whether every check held.
struct Outcome {
    stdout: String,
    ok: bool,
}

impl From<String> for Outcome {
    fn from(stdout: String) -> Self {
        Outcome { stdout, ok: true }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e))
}

fn load_lattice(path: &Path, limits: &Limits) -> Result<(Lattice, Vec<usize>), CliError> {
    let built = parse_lattice(&read(path)?, limits).map_err(input(path))?;
    Ok((built.lattice, built.permutation))
}

fn load_congruence(l: &Lattice, path: &Path) -> Result<Congruence, CliError> {
    parse_congruence(l, &read(path)?).map_err(input(path))
}

/// Names congruences by the ∇(i), Δ(i) and ∂(i) they coincide with.
struct Namer {
    named: Vec<(String, Congruence)>,
}

impl Namer {
    fn new(l: &Lattice) -> Namer {
        let ops = Congruences::on(l);
        let mut named = Vec::new();
        named.extend(l.elements().map(|i| (format!("∇({i})"), ops.nabla(i))));
        named.extend(l.elements().map(|i| (format!("Δ({i})"), ops.delta(i))));
        named.extend(l.elements().map(|i| (format!("∂({i})"), ops.clear_of_ideal(i))));
        Namer { named }
    }

    fn names(&self, c: &Congruence) -> Vec<String> {
        self.named
            .iter()
            .filter(|(_, d)| d == c)
            .map(|(n, _)| n.clone())
            .collect()
    }

    fn name(&self, c: &Congruence) -> String {
        let names = self.names(c);
        if names.is_empty() {
            c.to_string()
        } else {
            names.join(" = ")
        }
    }

    fn short(&self, c: &Congruence) -> String {
        self.names(c).into_iter().next().unwrap_or_else(|| c.to_string())
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

fn is_chain(l: &Lattice) -> bool {
    l.elements().all(|a| l.elements().all(|b| l.leq(a, b) || l.leq(b, a)))
}

fn describe(l: &Lattice) -> String {
    if is_chain(l) {
        format!("isomorphic to chain({})", l.len())
    } else if l.is_boolean() {
        format!("isomorphic to boolean_algebra({})", l.join_irreducibles().len())
    } else {
        format!("{} elements, not a chain", l.len())
    }
}

fn build(path: &Path, format: Format, limits: &Limits) -> Result<Outcome, CliError> {
    let (l, perm) = load_lattice(path, limits)?;
    Ok(match format {
        Format::Json => LatticeFile::from_lattice(&l, Some(&perm)).to_json(),
        Format::Dot => hasse_dot(&l),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "valid distributive lattice with {} elements", l.len());
            let _ = writeln!(out, "join-irreducibles: {:?}", l.join_irreducibles());
            let _ = writeln!(out, "Boolean: {}", yes_no(l.is_boolean()));
            let _ = writeln!(out, "d-reduced: {}", yes_no(is_d_reduced(&l)));
            if perm.iter().enumerate().any(|(i, &p)| i != p) {
                let _ = writeln!(out, "relabeled (input -> element): {perm:?}");
            }
            out
        }
    }
    .into())
}

fn congruences(path: &Path, format: Format, limits: &Limits) -> Result<Outcome, CliError> {
    let (l, _) = load_lattice(path, limits)?;
    let frame = enumerate_congruences(&l, limits).map_err(invalid)?;
    let namer = Namer::new(&l);
    let ops = Congruences::on(&l);
    Ok(match format {
        Format::Dot => {
            let labels: Vec<String> = frame.congruences().iter().map(|c| namer.short(c)).collect();
            frame_dot(&frame, &labels)
        }
        Format::Json => {
            let entries: Vec<_> = frame
                .iter()
                .enumerate()
                .map(|(i, (c, tags))| {
                    json!({"index": i, "names": namer.names(c), "blocks": c.blocks(), "tags": tags})
                })
                .collect();
            pretty(&json!({"elements": l.len(), "congruences": entries, "covers": frame.covers()}))
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "lattice: {} elements", l.len());
            let _ = writeln!(out, "congruences: {}", frame.len());
            for (i, (c, tags)) in frame.iter().enumerate() {
                let flags: Vec<&str> = [
                    (tags.closed, "closed"),
                    (tags.open, "open"),
                    (tags.clear, "clear"),
                    (tags.dense, "dense"),
                ]
                .iter()
                .filter(|(on, _)| *on)
                .map(|&(_, s)| s)
                .collect();
                let _ = writeln!(out, "  #{i} {}  blocks {c}  [{}]", namer.name(c), flags.join(", "));
            }
            let pick = |f: fn(&kframe::Tags) -> bool| -> Vec<String> {
                frame.iter().filter(|(_, t)| f(t)).map(|(c, _)| namer.short(c)).collect()
            };
            let _ = writeln!(out, "clear: {}", pick(|t| t.clear).join(", "));
            let _ = writeln!(out, "dense: {}", pick(|t| t.dense).join(", "));
            let _ = writeln!(out, "largest dense: {}", namer.short(&ops.largest_dense()));
            let clear: Vec<usize> = (0..frame.len()).filter(|&i| frame.tags(i).clear).collect();
            let mut pairs = Vec::new();
            for (k, &i) in clear.iter().enumerate() {
                for &j in &clear[k + 1..] {
                    if !frame.leq(i, j) && !frame.leq(j, i) {
                        pairs.push(format!("{} | {}", namer.short(frame.get(i)), namer.short(frame.get(j))));
                    }
                }
            }
            if pairs.is_empty() {
                let _ = writeln!(out, "clear congruences form a chain");
            } else {
                let _ = writeln!(out, "incomparable clear pairs:");
                for p in pairs {
                    let _ = writeln!(out, "  {p}");
                }
            }
            out
        }
    }
    .into())
}

fn closure(path: &Path, cpath: &Path, format: TextOrJson, limits: &Limits) -> Result<Outcome, CliError> {
    let (l, _) = load_lattice(path, limits)?;
    let c = load_congruence(&l, cpath)?;
    let ops = Congruences::on(&l);
    let cl = ops.closure(&c).map_err(invalid)?;
    let z = ops.zero_class_generator(&c).map_err(invalid)?;
    let namer = Namer::new(&l);
    Ok(match format {
        TextOrJson::Json => pretty(&json!({
            "congruence": c.blocks(),
            "closure": cl.blocks(),
            "zero_class_generator": z,
            "closed": cl == c,
        })),
        TextOrJson::Text => format!(
            "C     = {c}  ({})\ncl(C) = {cl}  (∇({z}), 0 ~ {z} is the top of the zero class)\nC closed: {}\n",
            namer.name(&c),
            yes_no(cl == c)
        ),
    }
    .into())
}

fn clear(
    path: &Path,
    ideal: Option<usize>,
    cpath: Option<&Path>,
    element: Option<usize>,
    format: TextOrJson,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let (l, _) = load_lattice(path, limits)?;
    let ops = Congruences::on(&l);
    let namer = Namer::new(&l);
    let check = |i: usize| l.check_element(i).map_err(invalid);
    let mut rows: Vec<(String, Congruence)> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut fields = serde_json::Map::new();
    if let Some(i) = ideal {
        check(i)?;
        rows.push((format!("∂(↓{i})"), ops.clear_of_ideal(i)));
    } else if let Some(cp) = cpath {
        let c = load_congruence(&l, cp)?;
        let z = ops.zero_class_generator(&c).map_err(invalid)?;
        let clear = ops.is_clear(&c).map_err(invalid)?;
        rows.push(("C".into(), c.clone()));
        rows.push((format!("largest dense in C = ∂(↓{z})"), ops.largest_dense_in(&c).map_err(invalid)?));
        notes.push(format!("C clear: {}", yes_no(clear)));
        fields.insert("clear".into(), json!(clear));
    } else if let Some(a) = element {
        check(a)?;
        let dd = l.double_pseudocomplement(a);
        rows.push((format!("𝔇 ∨ ∇({a}) = ∂(↓{dd})"), ops.dl_join_nabla(a)));
        notes.push(format!("(↓{a})** = ↓{dd}"));
    } else {
        rows.extend(l.elements().map(|i| (format!("∂(↓{i})"), ops.clear_of_ideal(i))));
    }
    Ok(match format {
        TextOrJson::Json => {
            let list: Vec<_> = rows
                .iter()
                .map(|(label, c)| json!({"label": label, "names": namer.names(c), "blocks": c.blocks()}))
                .collect();
            fields.insert("congruences".into(), json!(list));
            pretty(&serde_json::Value::Object(fields))
        }
        TextOrJson::Text => {
            let mut out = String::new();
            for (label, c) in &rows {
                let _ = writeln!(out, "{label}: {c}  ({})", namer.name(c));
            }
            for n in notes {
                let _ = writeln!(out, "{n}");
            }
            out
        }
    }
    .into())
}

fn quotient(
    path: &Path,
    cpath: Option<&Path>,
    ideal: Option<usize>,
    format: Format,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let (l, _) = load_lattice(path, limits)?;
    let ops = Congruences::on(&l);
    let c = match (cpath, ideal) {
        (Some(cp), _) => load_congruence(&l, cp)?,
        (None, Some(i)) => {
            l.check_element(i).map_err(invalid)?;
            ops.nabla(i)
        }
        (None, None) => return Err(CliError::Input("give --congruence or --ideal".into())),
    };
    let q = ops.quotient(&c).map_err(invalid)?;
    let target = q.target();
    Ok(match format {
        Format::Json => LatticeFile::from_lattice(target, None).to_json(),
        Format::Dot => hasse_dot(target),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "L / {}: {} elements, {}", Namer::new(&l).name(&c), target.len(), describe(target));
            let _ = writeln!(out, "d-reduced: {}", yes_no(is_d_reduced(target)));
            let _ = writeln!(out, "C clear: {}", yes_no(ops.is_clear(&c).map_err(invalid)?));
            for t in target.elements() {
                let members: Vec<usize> = l.elements().filter(|&x| q.apply(x) == t).collect();
                let _ = writeln!(out, "  [{t}] = {members:?}");
            }
            out
        }
    }
    .into())
}

fn mdemo(literal: &str, seed: Option<u64>, format: TextOrJson, limits: &Limits) -> Result<Outcome, CliError> {
    let ideal: MIdealRep = literal.parse().map_err(invalid)?;
    let q = m_quotient_cofinite(&ideal, limits).map_err(invalid)?;
    let ql = q.lattice();
    let seed = seed.unwrap_or(CheckContext::default().seed);
    let pairs = sample_m_pairs(seed, 10_000);
    let report = m_d_reduced_witness(&pairs).map_err(invalid)?;
    let nb = &report.non_boolean;
    let verdict = format!(
        "{}; {}",
        describe(ql),
        if is_d_reduced(ql) { "d-reduced" } else { "not d-reduced" }
    );
    let classes: Vec<String> = ql.elements().map(|c| q.representative(c).to_string()).collect();
    let stdout = match format {
        TextOrJson::Json => pretty(&json!({
            "ideal": ideal.to_string(),
            "classes": classes,
            "quotient": serde_json::to_value(LatticeFile::from_lattice(ql, None)).expect("plain data"),
            "verdict": verdict,
            "m_pairs_checked": report.pairs_checked,
            "m_collisions": report.collisions.len(),
            "m_d_reduced_on_sample": report.collisions.is_empty(),
            "m_boolean": !nb.holds(),
        })),
        TextOrJson::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "M = finite subsets of ℕ, plus ℕ (TOP)");
            let _ = writeln!(out, "I = {ideal}");
            let _ = writeln!(out, "M / ∇I has {} classes:", ql.len());
            for (c, rep) in classes.iter().enumerate() {
                let _ = writeln!(out, "  [{c}] = class of {rep}");
            }
            let covers: Vec<String> = ql.covers().iter().map(|(a, b)| format!("{a} < {b}")).collect();
            let _ = writeln!(out, "covers: {}", covers.join(", "));
            let _ = writeln!(out, "verdict: {verdict}");
            let _ = writeln!(
                out,
                "M: {} sampled pairs, {} with equal pseudocomplements; {}",
                report.pairs_checked,
                report.collisions.len(),
                if report.collisions.is_empty() { "d-reduced on the sample" } else { "NOT d-reduced" }
            );
            let _ = writeln!(
                out,
                "M: {} ∧ TOP = {}, and {} ∨ c stays finite for {} finite candidates; {}",
                nb.element,
                nb.meet_with_top,
                nb.element,
                nb.finite_candidates_checked,
                if nb.holds() { "no complement, M is not Boolean" } else { "complement found" }
            );
            out
        }
    };
    Ok(Outcome {
        stdout,
        ok: report.passed(),
    })
}

fn verify(
    name: Option<&str>,
    max_poset: usize,
    seed: Option<u64>,
    lattice: Option<&Path>,
    format: TextOrJson,
    limits: &Limits,
) -> Result<Outcome, CliError> {
    let corpus = match lattice {
        Some(p) => {
            let (l, _) = load_lattice(p, limits)?;
            Corpus::from_lattices([(p.display().to_string(), l)], limits)
        }
        None => build_corpus(max_poset, limits).map_err(invalid)?,
    };
    let mut ctx = CheckContext {
        limits: limits.clone(),
        ..CheckContext::default()
    };
    if let Some(s) = seed {
        ctx.seed = s;
    }
    let start = Instant::now();
    let reports = match name {
        Some(n) => vec![run_check(n, &corpus, &ctx).map_err(|e| {
            let known: Vec<&str> = registry().iter().map(|s| s.name).collect();
            CliError::Input(format!("{e}; known checks: {}", known.join(", ")))
        })?],
        None => run_all(&corpus, &ctx),
    };
    eprintln!("verified in {:.2?}", start.elapsed());
    let ok = reports.iter().all(|r| r.passed);
    let stdout = match format {
        TextOrJson::Json => pretty(&serde_json::to_value(&reports).expect("plain data")),
        TextOrJson::Text => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(out, "{}", r.line());
                if let Some(cx) = &r.counterexample {
                    if let Some(lf) = &cx.lattice {
                        let _ = writeln!(out, "  lattice: {}", serde_json::to_string(lf).expect("plain data"));
                    }
                    for c in &cx.congruences {
                        let _ = write!(out, "  congruence: {}", CongruenceFile::to_json(c));
                    }
                    if !cx.elements.is_empty() {
                        let _ = writeln!(out, "  elements: {:?}", cx.elements);
                    }
                }
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            let _ = writeln!(
                out,
                "{passed}/{} checks passed on {} corpus lattices",
                reports.len(),
                corpus.len()
            );
            out
        }
    };
    Ok(Outcome { stdout, ok })
}

fn export(path: &Path, diagram: Diagram, limits: &Limits) -> Result<Outcome, CliError> {
    match diagram {
        Diagram::Hasse => build(path, Format::Dot, limits),
        Diagram::Frame => congruences(path, Format::Dot, limits),
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let limits = Limits::default();
    match cli.command {
        Command::Build { lattice, format } => build(&lattice.path, format, &limits),
        Command::Congruences { lattice, format } => congruences(&lattice.path, format, &limits),
        Command::Closure {
            lattice,
            congruence,
            format,
        } => closure(&lattice.path, &congruence, format, &limits),
        Command::Clear {
            lattice,
            ideal,
            congruence,
            element,
            format,
        } => clear(&lattice.path, ideal, congruence.as_deref(), element, format, &limits),
        Command::Quotient {
            lattice,
            congruence,
            ideal,
            format,
        } => quotient(&lattice.path, congruence.as_deref(), ideal, format, &limits),
        Command::Mdemo { ideal, seed, format } => mdemo(&ideal, seed, format, &limits),
        Command::Verify {
            name,
            max_poset,
            seed,
            lattice,
            format,
        } => verify(name.as_deref(), max_poset, seed, lattice.as_deref(), format, &limits),
        Command::Export { lattice, diagram } => export(&lattice.path, diagram, &limits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
