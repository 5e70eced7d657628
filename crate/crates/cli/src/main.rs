use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use hwspinc::action::canonical_form_with_element;
use hwspinc::enumeration::{self, EnumOptions};
use hwspinc::structures::analyze_with;
use hwspinc::verification::{verify_lemma, Budget, LemmaId, DEFAULT_CASES, DEFAULT_SEED};
use hwspinc::{parse_matrices, Criterion, Error, Mode, SMatrix};
use serde_json::{json, Value};

const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

#[derive(Parser)]
#[command(name = "hwspinc", version, about = "HW-matrices: spin and spin^c criteria, enumeration, lemma checks")]
struct Cli {
    /// Emit JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for sharded searches.
    #[arg(long, global = true, env = "HWSPINC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Linear,
    Set,
    Both,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Criterion {
        match c {
            CriterionArg::Linear => Criterion::Linear,
            CriterionArg::Set => Criterion::Set,
            CriterionArg::Both => Criterion::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report distinguished / free / effective / HW per matrix.
    Validate { file: PathBuf },
    /// Spin and spin^c report per matrix.
    Spinc {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        criterion: CriterionArg,
    },
    /// All HW-matrices of degree n, raw or one per class.
    Enumerate {
        n: usize,
        #[arg(long)]
        canonical: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Allow degrees above 7.
        #[arg(long)]
        allow_long: bool,
    },
    /// Raw, normalized and class counts for degree n.
    Count {
        n: usize,
        #[arg(long)]
        allow_long: bool,
    },
    /// Canonical form of every matrix.
    Canon { file: PathBuf },
    /// Equivalence of the single matrices in two files.
    Equiv { a: PathBuf, b: PathBuf },
    /// Machine check of a lemma at degree n.
    Verify {
        lemma: String,
        n: usize,
        /// Random cases for randomized lemmas.
        #[arg(long, default_value_t = DEFAULT_CASES)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED, conflicts_with = "fresh_seed")]
        seed: u64,
        /// Seed from the clock; the seed used is reported.
        #[arg(long)]
        fresh_seed: bool,
        #[arg(long)]
        allow_long: bool,
    },
}

enum Failure {
    Lib(Error),
    Io(anyhow::Error),
    Fail,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure::Io(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_PRECONDITION);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Fail) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::EmptyInput | Error::InvalidElement(_) => EXIT_PARSE,
                _ => EXIT_PRECONDITION,
            })
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    Ok(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn read_matrices(path: &Path) -> Result<Vec<SMatrix>, Failure> {
    let text = read_input(path)?;
    parse_matrices(&text).map_err(|e| match e {
        Error::Parse { line, message } => {
            Failure::Io(anyhow::anyhow!("{}: line {line}: {message}", path.display()))
        }
        Error::EmptyInput => Failure::Io(anyhow::anyhow!("{}: no matrices in input", path.display())),
        other => Failure::Lib(other),
    })
}

fn read_single(path: &Path) -> Result<SMatrix, Failure> {
    let mut ms = read_matrices(path)?;
    if ms.len() != 1 {
        return Err(Error::Precondition(format!("{} holds {} matrices, expected 1", path.display(), ms.len())).into());
    }
    Ok(ms.remove(0))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn yes_no(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Validate { file } => validate(cli.json, file),
        Command::Spinc { file, criterion } => spinc(cli.json, file, (*criterion).into()),
        Command::Enumerate { n, canonical, out, allow_long } => {
            enumerate(cli.json, *n, *canonical, out.as_deref(), EnumOptions { allow_long: *allow_long })
        }
        Command::Count { n, allow_long } => {
            let c = enumeration::count_hw(*n, EnumOptions { allow_long: *allow_long })?;
            if cli.json {
                print_json(&serde_json::to_value(c).expect("serializable"));
            } else {
                println!("degree      {}", c.degree);
                println!("raw         {}", c.raw_count);
                println!("normalized  {}", c.normalized_count);
                println!("classes     {}", c.class_count);
            }
            Ok(())
        }
        Command::Canon { file } => canon(cli.json, file),
        Command::Equiv { a, b } => equiv(cli.json, a, b),
        Command::Verify { lemma, n, budget, seed, fresh_seed, allow_long } => {
            let id: LemmaId = lemma.parse()?;
            let seed = if *fresh_seed { clock_seed() } else { *seed };
            let r = verify_lemma(id, *n, Budget { cases: *budget, seed, allow_long: *allow_long })?;
            if cli.json {
                print_json(&serde_json::to_value(&r).expect("serializable"));
            } else {
                println!("{r}");
                if let Some(c) = &r.counterexample {
                    println!("counterexample: {}", c.detail);
                    print!("{}", c.matrix);
                }
            }
            if r.passed {
                Ok(())
            } else {
                Err(Failure::Fail)
            }
        }
    }
}

fn clock_seed() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(DEFAULT_SEED)
}

fn validate(json: bool, file: &Path) -> Result<(), Failure> {
    let ms = read_matrices(file)?;
    let mut rows = Vec::with_capacity(ms.len());
    for m in &ms {
        let distinguished = if m.n_rows() <= m.n_cols() { Some(m.is_distinguished()?) } else { None };
        let hw = if m.is_square() { m.is_hw_matrix()? } else { false };
        rows.push(json!({
            "rows": m.n_rows(),
            "cols": m.n_cols(),
            "distinguished": distinguished,
            "free": m.is_free(),
            "effective": m.is_effective(),
            "is_hw": hw,
        }));
    }
    if json {
        print_json(&Value::Array(rows));
    } else {
        println!("{:>3}  {:>5}  {:>13}  {:>4}  {:>9}  {:>2}", "#", "size", "distinguished", "free", "effective", "hw");
        for (k, r) in rows.iter().enumerate() {
            let b = |key: &str| yes_no(r[key].as_bool());
            println!(
                "{:>3}  {:>5}  {:>13}  {:>4}  {:>9}  {:>2}",
                k + 1,
                format!("{}x{}", r["rows"], r["cols"]),
                b("distinguished"),
                b("free"),
                b("effective"),
                b("is_hw"),
            );
        }
    }
    Ok(())
}

fn spinc(json: bool, file: &Path, criterion: Criterion) -> Result<(), Failure> {
    let ms = read_matrices(file)?;
    let mut reports = Vec::with_capacity(ms.len());
    for (k, m) in ms.iter().enumerate() {
        let r = analyze_with(m, criterion).map_err(|e| match e {
            Error::Precondition(msg) => Error::Precondition(format!("matrix {}: {msg}", k + 1)),
            other => other,
        })?;
        reports.push(r);
    }
    if json {
        print_json(&serde_json::to_value(&reports).expect("serializable"));
        return Ok(());
    }
    println!("{:>3}  {:>2}  {:>4}  {:>12}  {:>9}  {:>10}  witness", "#", "n", "spin", "spinc-linear", "spinc-set", "consistent");
    for (k, r) in reports.iter().enumerate() {
        let set = match (r.spinc_by_set, r.spinc_set) {
            (None, _) => "-".to_string(),
            (Some(_), Some(s)) => s.to_string(),
            (Some(_), None) => "none".to_string(),
        };
        let witness = match (&r.spin_witness, &r.spinc_linear_witness) {
            (Some(s), _) => format!("spin: theta{s}"),
            (None, Some(w)) => format!("spinc: theta{} + sq{}", w.thetas, w.squares),
            _ => "-".to_string(),
        };
        println!(
            "{:>3}  {:>2}  {:>4}  {:>12}  {:>9}  {:>10}  {}",
            k + 1,
            r.degree,
            yes_no(Some(r.spin)),
            yes_no(r.spinc_linear),
            set,
            yes_no(r.consistent),
            witness
        );
    }
    Ok(())
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn enumerate(json: bool, n: usize, canonical: bool, out: Option<&Path>, opts: EnumOptions) -> Result<(), Failure> {
    let mode = if canonical { Mode::Canonical } else { Mode::Raw };
    let mut w = open_out(out)?;
    if canonical {
        let ms = enumeration::enumerate_classes(n, opts)?;
        if json {
            let v = json!({ "degree": n, "mode": mode, "count": ms.len(), "matrices": ms });
            writeln!(w, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
        } else {
            w.write_all(enumeration::corpus_text(n, mode, &ms).as_bytes())?;
        }
    } else {
        // streamed: raw corpora reach 2^(n-1) times the normalized count
        let normalized = enumeration::enumerate_normalized(n, opts)?;
        let count = (normalized.len() as u64) << (n - 1);
        if json {
            write!(w, "{{\n  \"degree\": {n},\n  \"mode\": \"{mode}\",\n  \"count\": {count},\n  \"matrices\": [")?;
        } else {
            write!(
                w,
                "# HW-matrices\n# n = {n}\n# mode = {mode}\n# count = {count}\n# version = {}\n\n",
                env!("CARGO_PKG_VERSION")
            )?;
        }
        let mut first = true;
        for m in &normalized {
            for mask in 0..1u64 << (n - 1) {
                let c = m.conj_columns(mask << 1);
                if json {
                    let sep = if first { "\n    " } else { ",\n    " };
                    write!(w, "{sep}{}", serde_json::to_string(&c).expect("serializable"))?;
                } else {
                    if !first {
                        w.write_all(b"\n")?;
                    }
                    w.write_all(c.to_text().as_bytes())?;
                }
                first = false;
            }
        }
        if json {
            writeln!(w, "\n  ]\n}}")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn canon(json: bool, file: &Path) -> Result<(), Failure> {
    let ms = read_matrices(file)?;
    let mut forms = Vec::with_capacity(ms.len());
    for m in &ms {
        forms.push(canonical_form_with_element(m)?);
    }
    if json {
        let v: Vec<Value> = ms
            .iter()
            .zip(&forms)
            .map(|(m, (c, g))| json!({ "matrix": m, "canonical": c, "element": g }))
            .collect();
        print_json(&Value::Array(v));
    } else {
        print!("{}", hwspinc::format_matrices(forms.iter().map(|(c, _)| c)));
    }
    Ok(())
}

fn equiv(json: bool, a: &Path, b: &Path) -> Result<(), Failure> {
    let ma = read_single(a)?;
    let mb = read_single(b)?;
    if ma.n_rows() != mb.n_rows() || ma.n_cols() != mb.n_cols() {
        return Err(Error::Precondition(format!(
            "sizes differ: {}x{} and {}x{}",
            ma.n_rows(),
            ma.n_cols(),
            mb.n_rows(),
            mb.n_cols()
        ))
        .into());
    }
    let (ca, ga) = canonical_form_with_element(&ma)?;
    let (cb, gb) = canonical_form_with_element(&mb)?;
    let equivalent = ca == cb;
    // ga maps a to the common form, gb^-1 maps it to b
    let element = equivalent.then(|| gb.inverse().compose(&ga));
    if json {
        print_json(&json!({ "equivalent": equivalent, "element": element, "canonical_a": ca, "canonical_b": cb }));
    } else {
        println!("equivalent: {equivalent}");
        if let Some(g) = element {
            let perm: Vec<String> = g.perm.iter().map(|p| (p + 1).to_string()).collect();
            println!("conjugate columns {} then permute [{}]", g.conj_mask, perm.join(" "));
        }
    }
    Ok(())
}
