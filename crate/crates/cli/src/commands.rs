use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use toeplitz_core::sample::TowerShape;
use toeplitz_core::skeleton::divisors;
use toeplitz_core::{
    apply_block_code, apply_positionwise_permutation, conjugacy_verdict, essential_period_status, growth_profile,
    invariant_compare, natural_factorization, periodic_part, scale_truncation, skeleton_word, BlockCode,
    EfinResult, Error, EssentialStatus, InvariantSummary, NegativeReason, PositionwisePermutation, SkeletonTower,
    StageOutcome, SupernaturalNumber, Trend, Verdict,
};

use crate::format::{parse_tower_document, serialize_tower, TowerFile};
use crate::generate::{generate_paper_example, generate_random};
use crate::report::Report;

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_PARSE: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;
pub const EXIT_IO: i32 = 6;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core { path: Option<PathBuf>, error: Error },
    Io { path: PathBuf, error: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core { error: Error::Parse { .. }, .. } => EXIT_PARSE,
            CliError::Core { .. } => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Core { path: Some(p), error } => format!("{}: {error}", p.display()),
            CliError::Core { path: None, error } => error.to_string(),
            CliError::Io { path, error } => format!("{}: {error}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        CliError::Core { path: None, error }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Exit status of a verdict; depends on the tag alone.
pub fn verdict_exit_code(v: &Verdict) -> i32 {
    match v {
        Verdict::ConjugateCertified { .. } => EXIT_POSITIVE,
        Verdict::NotConjugateCertified { .. } | Verdict::RefutedUpTo { .. } => EXIT_NEGATIVE,
        Verdict::Unknown { .. } => EXIT_UNKNOWN,
    }
}

#[derive(Parser, Debug)]
#[command(name = "toeplitz", version, about = "Certified analysis of finitely presented Toeplitz subshifts")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a tower file.
    Validate { file: PathBuf },
    /// Period sets, skeletons, essential periods, scale and block growth.
    Analyze {
        file: PathBuf,
        /// Report only the first n declared levels.
        #[arg(long)]
        report_depth: Option<usize>,
    },
    /// Natural factorization of a supernatural number.
    Factor {
        #[arg(long)]
        scale: String,
        #[arg(long, default_value_t = 4)]
        count: usize,
    },
    /// Conjugacy verdict for two towers.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_radius: usize,
    },
    /// Stage-wise comparison of the chi invariants.
    Invariant {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 4)]
        stages: usize,
    },
    /// Write a generated tower.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Apply a block code (table file) to a tower.
    ApplyCode {
        file: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a positionwise permutation of the given period.
    Permute {
        file: PathBuf,
        #[arg(long)]
        period: usize,
        /// `;`-separated entries, each `id` or the images of the alphabet, e.g. `1,0;id`.
        #[arg(long)]
        perms: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rotate a tower by k positions.
    Rotate {
        file: PathBuf,
        #[arg(short, allow_negative_numbers = true)]
        k: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pairwise verdicts over every `*.tw` file of a directory.
    Corpus {
        dir: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_radius: usize,
    },
}

#[derive(Subcommand, Debug)]
enum GenerateKind {
    /// The doubling example with periods 5·2^j.
    PaperExample {
        #[arg(long)]
        stages: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// A seeded random tower.
    Random(RandomArgs),
}

#[derive(Args, Debug)]
struct RandomArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    alphabet: usize,
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    #[arg(long, default_value_t = 6)]
    max_base: usize,
    #[arg(long)]
    declare_scale: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Runs one invocation; `argv[0]` is the program name. Returns the exit
/// code and the text to print.
pub fn run_command<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_POSITIVE };
            return (code, e.render().to_string());
        }
    };
    let (code, report) = match execute(cli.command) {
        Ok(done) => done,
        Err(e) => {
            let mut r = Report::new();
            r.put("error", e.message());
            (e.exit_code(), r)
        }
    };
    let text = match cli.format {
        Format::Text => report.to_text(),
        Format::Json => format!("{:#}\n", report.to_json()),
    };
    (code, text)
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|error| CliError::Io {
        path: path.to_path_buf(),
        error,
    })
}

pub fn load_tower(path: &Path) -> CliResult<TowerFile> {
    let text = read_text(path)?;
    parse_tower_document(&text).map_err(|error| CliError::Core {
        path: Some(path.to_path_buf()),
        error,
    })
}

fn emit(tower: &SkeletonTower, output: Option<PathBuf>, report: &mut Report) -> CliResult<()> {
    let text = serialize_tower(tower);
    match output {
        Some(path) => {
            fs::write(&path, &text).map_err(|error| CliError::Io { path: path.clone(), error })?;
            report.put("written", path.display().to_string());
        }
        None => {
            // Text output is the tower file itself, ready for redirection.
            report.put("tower.text", text.clone());
            report.set_raw(text);
        }
    }
    describe(tower, report);
    Ok(())
}

fn describe(t: &SkeletonTower, r: &mut Report) {
    r.put("tower.alphabet", t.alphabet().names().join(" "));
    r.list("tower.periods", t.periods());
    r.put(
        "tower.scale",
        t.declared_scale().map_or("undeclared".to_string(), ToString::to_string),
    );
}

fn execute(command: Command) -> CliResult<(i32, Report)> {
    let mut r = Report::new();
    match command {
        Command::Validate { file } => {
            let t = load_tower(&file)?.tower;
            r.put("valid", true);
            describe(&t, &mut r);
            r.put("tower.blanks", t.deepest().word.blank_count());
        }
        Command::Analyze { file, report_depth } => {
            let t = load_tower(&file)?.tower;
            analyze(&t, report_depth, &mut r)?;
        }
        Command::Factor { scale, count } => {
            let u: SupernaturalNumber = scale.parse()?;
            r.put("scale", u.to_string());
            r.list("factorization", natural_factorization(&u, count)?);
        }
        Command::Compare { a, b, max_radius } => {
            let (ta, tb) = (load_tower(&a)?.tower, load_tower(&b)?.tower);
            let v = conjugacy_verdict(&ta, &tb, max_radius)?;
            verdict_report(&v, &ta, &mut r);
            return Ok((verdict_exit_code(&v), r));
        }
        Command::Invariant { a, b, stages } => {
            let (ta, tb) = (load_tower(&a)?.tower, load_tower(&b)?.tower);
            return invariant_report(&ta, &tb, stages, r);
        }
        Command::Generate { kind } => match kind {
            GenerateKind::PaperExample { stages, output } => {
                emit(&generate_paper_example(stages), output, &mut r)?;
            }
            GenerateKind::Random(args) => {
                let shape = TowerShape {
                    alphabet_size: args.alphabet,
                    max_base: args.max_base,
                    max_depth: args.max_depth,
                    declare_scale: args.declare_scale,
                    ..TowerShape::default()
                };
                r.put("seed", args.seed);
                emit(&generate_random(args.seed, &shape), args.output, &mut r)?;
            }
        },
        Command::ApplyCode { file, code, output } => {
            let t = load_tower(&file)?.tower;
            let c = BlockCode::parse(&read_text(&code)?, t.alphabet()).map_err(|error| CliError::Core {
                path: Some(code.clone()),
                error,
            })?;
            r.put("code.radius", c.radius());
            emit(&apply_block_code(&t, &c)?, output, &mut r)?;
        }
        Command::Permute {
            file,
            period,
            perms,
            output,
        } => {
            let t = load_tower(&file)?.tower;
            let phi = PositionwisePermutation::parse_spec(&perms, t.alphabet())?;
            if phi.period() != period {
                return Err(CliError::Usage(format!(
                    "--perms lists {} entries but --period is {period}",
                    phi.period()
                )));
            }
            emit(&apply_positionwise_permutation(&t, &phi)?, output, &mut r)?;
        }
        Command::Rotate { file, k, output } => {
            let t = load_tower(&file)?.tower;
            emit(&t.rotate(k), output, &mut r)?;
        }
        Command::Corpus { dir, max_radius } => {
            let entries = fs::read_dir(&dir).map_err(|error| CliError::Io { path: dir.clone(), error })?;
            let mut files = Vec::new();
            for entry in entries {
                let path = entry.map_err(|error| CliError::Io { path: dir.clone(), error })?.path();
                if path.extension().is_some_and(|e| e == "tw") {
                    let name = path.file_name().expect("listed files have names").to_string_lossy().into_owned();
                    files.push((name, load_tower(&path)?.tower));
                }
            }
            r = corpus_report(files, max_radius)?;
        }
    }
    Ok((EXIT_POSITIVE, r))
}

fn essential_name(s: EssentialStatus) -> &'static str {
    match s {
        EssentialStatus::EssentialCertified => "essential",
        EssentialStatus::NotEssentialCertified => "not-essential",
        EssentialStatus::Unknown => "unknown",
    }
}

fn trend_name(t: Trend) -> &'static str {
    match t {
        Trend::StrictlyIncreasing => "strictly-increasing",
        Trend::NonDecreasing => "non-decreasing",
        Trend::NotMonotone => "not-monotone",
        Trend::Undetermined => "undetermined",
    }
}

fn analyze(t: &SkeletonTower, report_depth: Option<usize>, r: &mut Report) -> CliResult<()> {
    describe(t, r);
    let depth = report_depth.unwrap_or(t.depth()).min(t.depth());
    for level in &t.levels()[..depth] {
        let p = level.period;
        let st = periodic_part(t, p)?;
        let view = skeleton_word(t, p)?;
        let rendered: String = view
            .word
            .cells()
            .iter()
            .zip(&view.unknown)
            .map(|(&c, &u)| if u { "?" } else { t.alphabet().render_cell(c) })
            .collect::<Vec<_>>()
            .join(if t.alphabet().is_compact() { "" } else { " " });
        let key = format!("period.{p}");
        r.put(format!("{key}.in"), st.in_residues().len());
        r.put(format!("{key}.out"), st.out_residues().len());
        r.put(format!("{key}.unknown"), st.unknown_residues().len());
        r.put(format!("{key}.skeleton"), rendered);
        r.put(format!("{key}.essential"), essential_name(essential_period_status(t, p)?));
    }
    for d in divisors(t.deepest_period()) {
        r.put(format!("essential.{d}"), essential_name(essential_period_status(t, d)?));
    }
    let scale = scale_truncation(t)?;
    r.put("scale.certified", scale.certified.to_string());
    r.list("scale.essential", scale.essential);
    r.list("scale.pending", scale.pending);
    let growth = growth_profile(t);
    for level in &growth.levels[..depth] {
        let key = format!("growth.{}", level.period);
        r.put(format!("{key}.min_block"), level.min_block);
        r.put(format!("{key}.min_gap"), level.min_gap);
    }
    r.put("growth.block_trend", trend_name(growth.block_trend()));
    r.put("growth.gap_trend", trend_name(growth.gap_trend()));
    Ok(())
}

fn verdict_report(v: &Verdict, a: &SkeletonTower, r: &mut Report) {
    r.put("verdict", v.tag());
    match v {
        Verdict::ConjugateCertified { stage, shift, witness } => {
            r.put("stage", *stage);
            r.put("shift", *shift);
            for (i, (x, y)) in witness.render(a.alphabet()).into_iter().enumerate() {
                r.put(format!("witness.{i}"), format!("{x} -> {y}"));
            }
        }
        Verdict::NotConjugateCertified {
            reason: NegativeReason::Scale { left, right },
        } => {
            r.put("reason", "scale");
            r.put("scale.left", left.to_string());
            r.put("scale.right", right.to_string());
        }
        Verdict::RefutedUpTo { radius, stages } => {
            r.put("radius", *radius);
            r.list("stages", stages.iter().copied());
        }
        Verdict::Unknown { notes, stages } => {
            r.list("notes", notes.iter().cloned());
            for d in stages {
                let key = format!("stage.{}", d.stage);
                r.put(format!("{key}.contradicted"), d.contradicted);
                r.put(format!("{key}.undetermined"), d.undetermined);
                r.put(format!("{key}.source_margin"), d.source_margin);
            }
        }
    }
}

fn outcome_name(o: StageOutcome) -> &'static str {
    match o {
        StageOutcome::Compared(EfinResult::CertifiedEqual) => "certified-equal",
        StageOutcome::Compared(EfinResult::Refuted) => "refuted",
        StageOutcome::Compared(EfinResult::Undetermined) => "undetermined",
        StageOutcome::Incomplete => "incomplete",
        StageOutcome::NotEvaluable => "not-evaluable",
    }
}

fn invariant_report(a: &SkeletonTower, b: &SkeletonTower, stages: usize, mut r: Report) -> CliResult<(i32, Report)> {
    let report = invariant_compare(a, b, stages)?;
    let code = match &report.summary {
        InvariantSummary::NotEquivalentScale { left, right } => {
            r.put("summary", "not-equivalent");
            r.put("reason", "scale");
            r.put("scale.left", left.to_string());
            r.put("scale.right", right.to_string());
            EXIT_NEGATIVE
        }
        InvariantSummary::Suffix {
            evaluated,
            equal_suffix,
            from_stage,
        } => {
            r.put("summary", "suffix");
            r.put("evaluated", *evaluated);
            r.put("equal_suffix", *equal_suffix);
            r.put("from_stage", *from_stage);
            if *evaluated > 0 && equal_suffix == evaluated {
                EXIT_POSITIVE
            } else {
                EXIT_UNKNOWN
            }
        }
    };
    r.list("factorization", report.factorization.iter().copied());
    for s in &report.stages {
        let key = format!("stage.{}", s.period);
        r.put(format!("{key}.outcome"), outcome_name(s.outcome));
        if let (Some(x), Some(y)) = (&s.left, &s.right) {
            r.list(format!("{key}.left"), x.residues.iter().copied());
            r.list(format!("{key}.right"), y.residues.iter().copied());
        }
        r.put(format!("{key}.empty"), s.empty);
    }
    r.put("advice.min_block", report.advice.min_block);
    r.put("advice.max_radius", report.advice.max_radius);
    Ok((code, r))
}

/// The pairwise verdict matrix. Rows and columns follow file-name order
/// whatever order the files arrive in.
pub fn corpus_report(mut files: Vec<(String, SkeletonTower)>, max_radius: usize) -> CliResult<Report> {
    files.sort_by(|x, y| x.0.cmp(&y.0));
    let n = files.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let verdicts: Vec<String> = cells
        .par_iter()
        .map(|&(i, j)| match conjugacy_verdict(&files[i].1, &files[j].1, max_radius) {
            Ok(v) => v.tag().to_string(),
            Err(Error::AlphabetMismatch) => "alphabet-mismatch".to_string(),
            Err(e) => format!("error: {e}"),
        })
        .collect();
    let mut r = Report::new();
    r.put("files", n);
    for (i, (name, _)) in files.iter().enumerate() {
        r.put(format!("file.{i}"), name.clone());
    }
    for (&(i, j), tag) in cells.iter().zip(verdicts) {
        r.put(format!("pair.{i}.{j}"), tag);
    }
    Ok(r)
}
