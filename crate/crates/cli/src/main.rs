mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{ArgAction, Parser, Subcommand};
use fgf_core::harness::{self, SampleConfig, SuiteReport};
use fgf_core::interpretation::{
    decode_function, encode_function, free_factor_relation, BasisSplit, ExtractionParams, FiniteFunction,
    FreeFactorHandle,
};
use fgf_core::involutions::{
    build_conjugator, conjugacy_test, decompose_inverted, snake_obstruction, square_root_of_bead, CanonicalData,
    InvertedForm,
};
use fgf_core::whitehead::{is_primitive, minimize, product_of_two_primitives};
use fgf_core::words::inferred_rank;
use fgf_core::{FreeGroupContext, GeneratorMap, SubgroupGraph, Word};
use serde::Serialize;

use config::CliConfig;

const DEFAULT_REPORT: &str = "fgf-report.json";
const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Parser)]
#[command(name = "fgf", version, about = "Computations in free groups of finite rank and their automorphisms")]
struct Cli {
    /// Rank of the free group; inferred from the input when absent.
    #[arg(long, global = true)]
    rank: Option<usize>,
    /// Optional TOML file with default rank, bounds, report path and verbosity.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// More output; repeat for timings on stderr.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Freely reduce a word.
    Reduce { word: String },
    /// Multiply words left to right.
    Multiply {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Inverse of a word.
    InvertWord { word: String },
    /// Write a non-trivial word as root^k with the root not a proper power.
    Root { word: String },
    /// Apply an automorphism file to a word.
    Apply {
        #[arg(long = "auto", value_name = "FILE")]
        auto: PathBuf,
        word: String,
    },
    /// Composition f∘g of two map files (g is applied first).
    Compose { f: PathBuf, g: PathBuf },
    /// Inverse of an automorphism; exits 1 when the map is not invertible.
    InvertAuto { file: PathBuf },
    /// Order of an automorphism up to a bound; exits 1 when none is found.
    Order {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        bound: u32,
    },
    /// Decide whether an automorphism is a conjugation and print the conjugating word.
    IsInner {
        #[arg(long = "auto", value_name = "FILE")]
        auto: PathBuf,
    },
    /// Decide whether a word is part of a basis (Whitehead's algorithm).
    IsPrimitive { word: String },
    /// Shortest cyclic word in the automorphism orbit, with a map reaching it.
    Minimize { word: String },
    /// Write a word of proper support as a product of two primitive elements.
    TwoPrimitives { word: String },
    /// Involution given by a canonical-form file.
    Realize { file: PathBuf },
    /// Conjugacy invariants of a canonical form.
    Classify { file: PathBuf },
    /// Automorphism conjugating the first canonical involution onto the second.
    Conjugator { first: PathBuf, second: PathBuf },
    /// Square root of a bead (every block of one common size).
    SqrtBead { file: PathBuf },
    /// Certificate that a snake (one block, small fixed part) has no square root.
    SnakeCert { file: PathBuf },
    /// Normal form of an element inverted by a soft involution.
    DecomposeInverted { file: PathBuf, word: String },
    /// Stallings graph of a finitely generated subgroup: size, rank and a basis.
    Graph {
        #[arg(required = true)]
        gens: Vec<String>,
    },
    /// Subgroup membership; exits 1 when the word is not in the subgroup.
    Member {
        word: String,
        #[arg(required = true)]
        gens: Vec<String>,
    },
    /// Rank of a finitely generated subgroup.
    Rank {
        #[arg(required = true)]
        gens: Vec<String>,
    },
    /// Intersection of two subgroups, each given as a comma-separated generator list.
    Intersect { first: String, second: String },
    /// Decide whether the fixed factor of B and of C together form a basis of A's.
    FactorRel { a: PathBuf, b: PathBuf, c: PathBuf },
    /// Recover a basis of B from the standard extraction parameters at an even rank.
    ExtractBasis {
        /// Break the named property (a to g) first and report the violation.
        #[arg(long, value_name = "PROPERTY")]
        violate: Option<char>,
    },
    /// Encode a function [m] -> [m] as an automorphism of rank 2m.
    EncodeFn {
        #[arg(long)]
        m: usize,
        /// Comma-separated values f(1),...,f(m).
        #[arg(long)]
        table: String,
    },
    /// Decode an automorphism back into a function table.
    DecodeFn {
        #[arg(long)]
        m: usize,
        #[arg(long = "auto", value_name = "FILE")]
        auto: PathBuf,
    },
    /// Run a verification suite, or all of them, and write a JSON report.
    Verify(VerifyArgs),
    /// Stallings graph as one edge per line, base vertex marked with `*`.
    DumpGraph {
        #[arg(required = true)]
        gens: Vec<String>,
    },
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    /// A suite name, or `all`.
    suite: String,
    /// Maximal length of sampled images or words.
    #[arg(long)]
    len: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, env = "FGF_SEED")]
    seed: Option<u64>,
    /// Instances a suite must check; defaults to the suite's own floor at its default bounds, else 1.
    #[arg(long)]
    min_instances: Option<usize>,
    /// Where the JSON report goes.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

/// Result of a command: text for stdout, and whether the decision was positive.
struct Outcome {
    out: String,
    ok: bool,
}

impl Outcome {
    fn yes(out: impl Into<String>) -> Self {
        Self { out: out.into(), ok: true }
    }

    fn no(out: impl Into<String>) -> Self {
        Self { out: out.into(), ok: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.out);
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Bad input is a usage error; anything the library rejects on mathematical
/// grounds is a negative answer.
fn exit_code(e: &anyhow::Error) -> u8 {
    use fgf_core::Error as E;
    match e.downcast_ref::<E>() {
        Some(
            E::Parse(_)
            | E::RankTooSmall(_)
            | E::IndexOutOfRange { .. }
            | E::ContextMismatch { .. }
            | E::InvalidCanonicalData(_)
            | E::UnknownSuite(_),
        ) => 2,
        Some(_) => 1,
        None => 2,
    }
}

struct Env {
    rank: Option<usize>,
    file: CliConfig,
    verbosity: u8,
}

impl Env {
    fn new(cli: &Cli) -> anyhow::Result<Self> {
        let file = match &cli.config {
            Some(p) => CliConfig::load(p)?,
            None => CliConfig::default(),
        };
        let rank = cli.rank.or(file.rank);
        let verbosity = if cli.verbose > 0 { cli.verbose } else { file.verbosity.unwrap_or(0) };
        Ok(Self { rank, file, verbosity })
    }

    fn context_for(&self, texts: &[&str]) -> anyhow::Result<FreeGroupContext> {
        let n = match self.rank {
            Some(n) => n,
            None => inferred_rank(texts)?,
        };
        Ok(FreeGroupContext::new(n)?)
    }

    fn words(&self, texts: &[String]) -> anyhow::Result<Vec<Word>> {
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let ctx = self.context_for(&refs)?;
        Ok(texts.iter().map(|t| Word::parse(t, ctx)).collect::<fgf_core::Result<_>>()?)
    }

    fn word(&self, text: &str) -> anyhow::Result<Word> {
        Ok(self.words(&[text.to_string()])?.remove(0))
    }

    fn map(&self, path: &Path) -> anyhow::Result<GeneratorMap> {
        let text = read(path)?;
        GeneratorMap::parse(&text, self.rank).with_context(|| format!("in {}", path.display()))
    }

    /// Canonical forms sharing one rank, the largest any file mentions.
    fn canonical(&self, paths: &[&PathBuf]) -> anyhow::Result<Vec<CanonicalData>> {
        let texts = paths.iter().map(|p| read(p)).collect::<anyhow::Result<Vec<_>>>()?;
        let rank = match self.rank {
            Some(n) => n,
            None => {
                let mut n = 0;
                for (t, p) in texts.iter().zip(paths) {
                    let d = CanonicalData::parse(t, None).with_context(|| format!("in {}", p.display()))?;
                    n = n.max(d.context().rank());
                }
                n
            }
        };
        texts
            .iter()
            .zip(paths)
            .map(|(t, p)| CanonicalData::parse(t, Some(rank)).with_context(|| format!("in {}", p.display())))
            .collect()
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn graph_of(env: &Env, gens: &[String]) -> anyhow::Result<SubgroupGraph> {
    let words = env.words(gens)?;
    Ok(SubgroupGraph::build(words[0].context(), &words))
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}

fn lines(words: &[Word]) -> String {
    words.iter().map(|w| format!("{w}\n")).collect()
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let env = Env::new(cli)?;
    Ok(match &cli.command {
        Command::Reduce { word } => Outcome::yes(format!("{}\n", env.word(word)?)),
        Command::Multiply { words } => {
            let ws = env.words(words)?;
            let product = ws.iter().fold(ws[0].context().identity(), |acc, w| &acc * w);
            Outcome::yes(format!("{product}\n"))
        }
        Command::InvertWord { word } => Outcome::yes(format!("{}\n", env.word(word)?.invert())),
        Command::Root { word } => {
            let (root, k) = env.word(word)?.primitive_root()?;
            Outcome::yes(format!("root: {root}\nexponent: {k}\n"))
        }
        Command::Apply { auto, word } => {
            let f = env.map(auto)?;
            let w = Word::parse(word, f.context())?;
            Outcome::yes(format!("{}\n", f.apply(&w)))
        }
        Command::Compose { f, g } => {
            let (f, g) = (env.map(f)?, env.map(g)?);
            Outcome::yes(f.checked_compose(&g)?.to_string())
        }
        Command::InvertAuto { file } => match env.map(file)?.inverse() {
            Ok(g) => Outcome::yes(g.to_string()),
            Err(fgf_core::Error::NotAutomorphism) => Outcome::no("not an automorphism\n"),
            Err(e) => return Err(e.into()),
        },
        Command::Order { file, bound } => match env.map(file)?.order_up_to(*bound) {
            Some(k) => Outcome::yes(format!("{k}\n")),
            None => Outcome::no(format!("no finite order up to {bound}\n")),
        },
        Command::IsInner { auto } => match env.map(auto)?.is_inner() {
            Ok(Some(w)) => Outcome::yes(format!("{w}\n")),
            Ok(None) => Outcome::no("not inner\n"),
            Err(fgf_core::Error::NotAutomorphism) => Outcome::no("not an automorphism\n"),
            Err(e) => return Err(e.into()),
        },
        Command::IsPrimitive { word } => {
            if is_primitive(&env.word(word)?)? {
                Outcome::yes("primitive\n")
            } else {
                Outcome::no("not primitive\n")
            }
        }
        Command::Minimize { word } => {
            let (min, witness) = minimize(&env.word(word)?)?;
            Outcome::yes(format!("{min}\n{witness}"))
        }
        Command::TwoPrimitives { word } => {
            let (p, q) = product_of_two_primitives(&env.word(word)?)?;
            Outcome::yes(lines(&[p, q]))
        }
        Command::Realize { file } => Outcome::yes(env.canonical(&[file])?[0].realize().to_string()),
        Command::Classify { file } => {
            let d = &env.canonical(&[file])?[0];
            let mut out = format!("{}\n", d.classify());
            let kinds = [
                ("soft", d.is_soft()),
                ("quasi-conjugation", d.is_quasi_conjugation()),
                ("symmetry", d.is_symmetry()),
                ("extremal", d.is_extremal()),
            ];
            let named: Vec<&str> = kinds.iter().filter(|k| k.1).map(|k| k.0).collect();
            if !named.is_empty() {
                let _ = writeln!(out, "{}", named.join(" "));
            }
            Outcome::yes(out)
        }
        Command::Conjugator { first, second } => {
            let ds = env.canonical(&[first, second])?;
            if conjugacy_test(&ds[0], &ds[1])? {
                Outcome::yes(build_conjugator(&ds[0], &ds[1])?.to_string())
            } else {
                Outcome::no(format!("not conjugate: {} vs {}\n", ds[0].classify(), ds[1].classify()))
            }
        }
        Command::SqrtBead { file } => Outcome::yes(square_root_of_bead(&env.canonical(&[file])?[0])?.to_string()),
        Command::SnakeCert { file } => Outcome::yes(snake_obstruction(&env.canonical(&[file])?[0])?.to_string()),
        Command::DecomposeInverted { file, word } => {
            let d = &env.canonical(&[file])?[0];
            let a = Word::parse(word, d.context())?;
            Outcome::yes(match decompose_inverted(d, &a)? {
                InvertedForm::Coboundary(w) => format!("coboundary\nw: {w}\n"),
                InvertedForm::BlockForm(w, x) => format!("block x{x}\nw: {w}\n"),
            })
        }
        Command::Graph { gens } => {
            let h = graph_of(&env, gens)?;
            let mut out =
                format!("vertices: {}\nedges: {}\nrank: {}\nbasis:\n", h.vertex_count(), h.edges().len(), h.rank());
            out.push_str(&lines(&h.basis()));
            Outcome::yes(out)
        }
        Command::Member { word, gens } => {
            let mut all = vec![word.clone()];
            all.extend(gens.iter().cloned());
            let ws = env.words(&all)?;
            let h = SubgroupGraph::build(ws[0].context(), &ws[1..]);
            if h.contains(&ws[0]) {
                Outcome::yes("member\n")
            } else {
                Outcome::no("not a member\n")
            }
        }
        Command::Rank { gens } => Outcome::yes(format!("{}\n", graph_of(&env, gens)?.rank())),
        Command::Intersect { first, second } => {
            let (l, r) = (split_list(first), split_list(second));
            let mut all = l.clone();
            all.extend(r.iter().cloned());
            let ctx = env.context_for(&all.iter().map(String::as_str).collect::<Vec<_>>())?;
            let parse = |ts: &[String]| ts.iter().map(|t| Word::parse(t, ctx)).collect::<fgf_core::Result<Vec<_>>>();
            let meet = SubgroupGraph::build(ctx, &parse(&l)?).intersect(&SubgroupGraph::build(ctx, &parse(&r)?));
            Outcome::yes(format!("rank: {}\nbasis:\n{}", meet.rank(), lines(&meet.basis())))
        }
        Command::FactorRel { a, b, c } => {
            let ds = env.canonical(&[a, b, c])?;
            let h: Vec<FreeFactorHandle> = ds.into_iter().map(FreeFactorHandle::new).collect();
            if free_factor_relation(&h[0], &h[1], &h[2])? {
                Outcome::yes("free factor relation holds\n")
            } else {
                Outcome::no("free factor relation fails\n")
            }
        }
        Command::ExtractBasis { violate } => extract(&env, *violate)?,
        Command::EncodeFn { m, table } => {
            let f = FiniteFunction::parse(table, *m).map_err(|e| anyhow!("--table: {e}"))?;
            Outcome::yes(encode_function(&f, &BasisSplit::standard(*m)?)?.to_string())
        }
        Command::DecodeFn { m, auto } => {
            let split = BasisSplit::standard(*m)?;
            let text = read(auto)?;
            let sigma = GeneratorMap::parse(&text, Some(split.context().rank()))
                .with_context(|| format!("in {}", auto.display()))?;
            match decode_function(&sigma, &split) {
                Ok(f) => Outcome::yes(format!("{f}\n")),
                Err(e @ fgf_core::Error::NotFunctionEncoding { .. }) => Outcome::no(format!("{e}\n")),
                Err(e) => return Err(e.into()),
            }
        }
        Command::Verify(args) => verify(&env, args)?,
        Command::DumpGraph { gens } => Outcome::yes(graph_of(&env, gens)?.dump()),
    })
}

fn extract(env: &Env, violate: Option<char>) -> anyhow::Result<Outcome> {
    let n = env.rank.unwrap_or(8);
    let mut params = ExtractionParams::canonical(n)?;
    if let Some(p) = violate {
        params = harness::suites::violated_tuples(&params)
            .into_iter()
            .find(|(c, _)| *c == p)
            .map(|(_, q)| q)
            .ok_or_else(|| anyhow!("no violating tuple for property {p:?}; use one of a to g"))?;
    }
    Ok(match params.extract() {
        Ok(basis) => Outcome::yes(lines(&basis)),
        Err(e @ fgf_core::Error::PropertyViolated(..)) => Outcome::no(format!("{e}\n")),
        Err(e) => return Err(e.into()),
    })
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema_version: u32,
    passed: bool,
    suites: &'a [SuiteReport],
}

fn verify(env: &Env, args: &VerifyArgs) -> anyhow::Result<Outcome> {
    let names: Vec<&str> = if args.suite == "all" { harness::suite_names() } else { vec![args.suite.as_str()] };
    let seed = args.seed.or(env.file.seed).unwrap_or(DEFAULT_SEED);
    let len = args.len.or(env.file.max_image_length);
    let samples = args.samples.or(env.file.samples);
    let floor = args.min_instances.or(env.file.min_instances);
    let mut reports = Vec::new();
    let mut out = String::new();
    for name in names {
        let defaults: SampleConfig = harness::default_config(name, seed)?;
        let mut cfg = defaults;
        if let Some(r) = env.rank {
            cfg.rank = r;
        }
        if let Some(l) = len {
            cfg.max_image_length = l;
        }
        if let Some(s) = samples {
            cfg.sample_count = s;
        }
        cfg.min_instances = match floor {
            Some(f) => f,
            // The suite's floor only means something at its own bounds.
            None if (cfg.max_image_length, cfg.sample_count) != (defaults.max_image_length, defaults.sample_count) => 1,
            None => cfg.min_instances,
        };
        let start = Instant::now();
        let rep = harness::run_suite(name, &cfg)?;
        if env.verbosity > 1 {
            eprintln!("{name}: {:.2?}", start.elapsed());
        }
        let _ = writeln!(out, "{}", rep.summary_line());
        if env.verbosity > 0 {
            for note in &rep.notes {
                let _ = writeln!(out, "    {note}");
            }
        }
        for ce in rep.counterexamples.iter().take(5) {
            let words: Vec<String> = ce.words.iter().map(|w| w.to_string()).collect();
            let _ = writeln!(out, "    instance {}: {} [{}]", ce.instance, ce.message, words.join(", "));
        }
        reports.push(rep);
    }
    let passed = reports.iter().all(|r| r.passed);
    if reports.len() > 1 {
        let n = reports.iter().filter(|r| r.passed).count();
        let _ = writeln!(out, "{n}/{} suites passed", reports.len());
    }
    let path = args.report.clone().or_else(|| env.file.report.clone()).unwrap_or_else(|| DEFAULT_REPORT.into());
    let json =
        serde_json::to_string_pretty(&RunReport { schema_version: harness::SCHEMA_VERSION, passed, suites: &reports })?;
    std::fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    let _ = writeln!(out, "report: {}", path.display());
    Ok(Outcome { out, ok: passed })
}
