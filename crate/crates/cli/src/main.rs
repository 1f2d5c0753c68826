use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use langgen::dataset::{self, Role, SuiteConfig};
use langgen::editdist::edit_distance;
use langgen::sampler::SamplerTables;
use langgen::{by_name, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "langgen", version, about = "Formal-language dataset generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the six-split suite for one language.
    Generate(GenerateArgs),
    /// Edit distance from each input string to a regular language.
    Editdist(EditdistArgs),
    /// Re-check split files against their language.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Print facts about a language.
    Stats {
        language: String,
        /// Skip the preprocessing timings.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    language: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Override the minimum length of every split.
    #[arg(long)]
    min_len: Option<usize>,
    /// Override the maximum length of every split.
    #[arg(long)]
    max_len: Option<usize>,
    /// Override a split size, e.g. `--count train=500`. Repeatable.
    #[arg(long = "count", value_parser = parse_count)]
    counts: Vec<(Role, usize)>,
    /// Attach next-symbol sets to positive examples.
    #[arg(long)]
    annotate: bool,
    /// Redraws per label for a test-short slot whose text was already used.
    #[arg(long, default_value_t = 100)]
    dedup_factor: usize,
}

#[derive(Args)]
struct EditdistArgs {
    /// Language; defaults to the one named in the probe file header.
    #[arg(long)]
    language: Option<String>,
    /// One string per line.
    #[arg(long, conflicts_with = "probe", required_unless_present = "probe")]
    input: Option<PathBuf>,
    /// A generated split file, typically `<language>.editdist-probe.jsonl`.
    #[arg(long)]
    probe: Option<PathBuf>,
    /// Report path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_count(s: &str) -> Result<(Role, usize), String> {
    let (role, n) = s.split_once('=').ok_or("expected ROLE=COUNT")?;
    let role: Role = role.parse().map_err(|e: Error| e.to_string())?;
    let n = n.parse().map_err(|e| format!("bad count {n:?}: {e}"))?;
    Ok((role, n))
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => 3,
            Error::Format { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn config_failure(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Editdist(a) => editdist(a),
        Command::Validate { paths } => validate(&paths),
        Command::Stats {
            language,
            no_timing,
        } => stats(&language, !no_timing),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let lang = by_name(&a.language)?;
    let mut config = SuiteConfig {
        annotate: a.annotate,
        dedup_attempt_factor: a.dedup_factor,
        ..SuiteConfig::default()
    };
    for spec in &mut config.specs {
        if let Some(n) = a.min_len {
            spec.min_len = n;
        }
        if let Some(n) = a.max_len {
            spec.max_len = n;
        }
        if let Some((_, n)) = a.counts.iter().rev().find(|(r, _)| *r == spec.role) {
            spec.count = *n;
        }
    }
    let suite = dataset::generate_suite(lang.as_ref(), &config, a.seed)?;
    fs::create_dir_all(&a.out)?;
    println!(
        "{:<15} {:>6} {:>8} {:>5} {:>5}  file",
        "split", "count", "pos", "min", "max"
    );
    for split in &suite {
        let path = a.out.join(split.file_name());
        dataset::write_split(split, lang.as_ref(), &path)?;
        let lens = split.examples.iter().map(|e| e.word.len());
        println!(
            "{:<15} {:>6} {:>8.4} {:>5} {:>5}  {}",
            split.role.as_str(),
            split.examples.len(),
            split.positive_fraction(),
            lens.clone().min().map_or("-".into(), |n| n.to_string()),
            lens.max().map_or("-".into(), |n| n.to_string()),
            path.display()
        );
    }
    Ok(())
}

fn editdist(a: EditdistArgs) -> Result<(), Failure> {
    let (lang, inputs) = match (&a.probe, &a.input) {
        (Some(p), _) => {
            let split = dataset::read_split(p)?;
            let name = a.language.as_deref().unwrap_or(&split.language);
            if name != split.language {
                return Err(config_failure(format!(
                    "probe file is for {}, not {name}",
                    split.language
                )));
            }
            let lang = by_name(name)?;
            (lang, split.examples.into_iter().map(|e| e.word).collect())
        }
        (None, Some(p)) => {
            let name = a
                .language
                .as_deref()
                .ok_or_else(|| config_failure("--language is required with --input"))?;
            let lang = by_name(name)?;
            let text = fs::read_to_string(p)?;
            let words = text
                .lines()
                .enumerate()
                .map(|(i, l)| {
                    lang.alphabet().parse(l).map_err(|e| Error::Format {
                        path: p.display().to_string(),
                        line: i + 1,
                        msg: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            (lang, words)
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let dfa = lang
        .dfa()
        .ok_or_else(|| config_failure("edit distance requires a regular language"))?;
    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    let alpha = lang.alphabet();
    for w in &inputs {
        match edit_distance(dfa, w) {
            Some(r) => writeln!(
                out,
                "{}\t{}\t{}",
                r.distance,
                alpha.render(&r.witness),
                alpha.render(w)
            )?,
            None => writeln!(out, "inf\t\t{}", alpha.render(w))?,
        }
    }
    out.flush()?;
    Ok(())
}

fn validate(paths: &[PathBuf]) -> Result<(), Failure> {
    const SHOWN: usize = 20;
    let mut violations = Vec::new();
    for path in paths {
        match dataset::read_split(path) {
            Ok(split) => {
                let lang = by_name(&split.language)?;
                for v in dataset::validate_split(&split, lang.as_ref()) {
                    violations.push(format!("{}:{v}", path.display()));
                }
            }
            Err(e @ Error::Format { .. }) => violations.push(e.to_string()),
            Err(e) => return Err(e.into()),
        }
    }
    if violations.is_empty() {
        println!("ok: {} file(s)", paths.len());
        return Ok(());
    }
    for v in violations.iter().take(SHOWN) {
        println!("{v}");
    }
    if violations.len() > SHOWN {
        println!("... {} more", violations.len() - SHOWN);
    }
    Err(Failure {
        code: 1,
        msg: format!("{} violation(s)", violations.len()),
    })
}

fn stats(name: &str, timing: bool) -> Result<(), Failure> {
    let lang = by_name(name)?;
    println!("language: {}", lang.name());
    println!("class: {}", lang.class());
    println!("alphabet: {}", lang.alphabet().glyphs().join(" "));
    let valid: Vec<usize> = match lang.dfa() {
        Some(dfa) => {
            println!(
                "dfa: |Q|={} |delta|={}",
                dfa.num_states(),
                dfa.num_transitions()
            );
            SamplerTables::build(dfa, 40)
                .map_err(Error::from)?
                .valid_lengths(0, 40)
        }
        None => {
            println!("dfa: none (procedural)");
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (0..=40)
                .filter(|&n| lang.sample_positive(n, n, &mut rng).is_ok())
                .collect()
        }
    };
    println!("valid lengths in [0,40]: {}", ranges(&valid));
    if timing {
        if let Some(dfa) = lang.dfa() {
            for n in [80, 500] {
                let t = Instant::now();
                SamplerTables::build(dfa, n).map_err(Error::from)?;
                println!("preprocessing n_max={n}: {:.3}s", t.elapsed().as_secs_f64());
            }
        }
    }
    Ok(())
}

/// `[1,2,3,5]` as `{1..3, 5}`.
fn ranges(xs: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[j] + 1 {
            j += 1;
        }
        parts.push(if i == j {
            xs[i].to_string()
        } else {
            format!("{}..{}", xs[i], xs[j])
        });
        i = j + 1;
    }
    format!("{{{}}}", parts.join(", "))
}
