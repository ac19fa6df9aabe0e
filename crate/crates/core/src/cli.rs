//! Command-line front end. [`run`] parses arguments, runs one operation and
//! returns the process exit code: 0 on success, 1 on a domain error (reported
//! by its error name), 2 on a usage error.

use crate::eg3::{self, BoundaryPoint};
use crate::harmonic::{self, HarmonicError};
use crate::martin::{self, DefaultWeights, MartinError};
use crate::rational::{self, format as fr, format_f64 as ff, Rational};
use crate::smc::{self, ModelError, SmcModel};
use crate::spectral::{self, SpectralError};
use crate::words::{Word, WordError};
use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "smc", version, about = "Substitution Markov chains: exact transition probabilities, Green's functions, Martin kernels and boundary geometry")]
pub struct Cli {
    /// Output layout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for every randomized command (required by them).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Override a model parameter, e.g. `--param q=1/4`.
    #[arg(long = "param", global = true, value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Persistent, expanding and root letters; constant length.
    Classify { model: String },
    /// Sample a trajectory.
    Simulate {
        model: String,
        #[arg(long)]
        steps: usize,
        /// Start word (defaults to the root letter).
        #[arg(long)]
        start: Option<String>,
    },
    /// One-step transition probability P(w, v).
    Prob { model: String, w: String, v: String },
    /// n-step transition probability.
    Nstep { model: String, x: String, y: String, n: usize },
    /// Green's function G(x, y).
    Green { model: String, x: String, y: String },
    /// Martin kernel K(z, x).
    Kernel { model: String, z: String, x: String },
    /// Martin metric between two words with the default weights.
    Theta { model: String, x: String, y: String },
    /// Return bound G(v, v) <= 1/eta.
    Transience { model: String, v: String },
    /// Expected-count matrix and limiting letter frequencies.
    Freq { model: String },
    /// Monte-Carlo letter frequencies.
    FreqSim {
        model: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        start: Option<String>,
    },
    /// Harmonic function along substitution iterates, with exhaustive verification.
    Harmonic {
        model: String,
        #[arg(long, default_value = "1/2")]
        k: String,
        /// Number of iterates in the table (defaults to what --verify-len needs).
        #[arg(long)]
        depth: Option<usize>,
        /// Verify every reachable word up to this length.
        #[arg(long, default_value_t = 32)]
        verify_len: usize,
    },
    /// Print a built-in model in the config grammar.
    ExportPreset { name: String },
    /// Boundary of the b/c growth example.
    #[command(subcommand)]
    Eg3(Eg3Command),
}

#[derive(Debug, Subcommand)]
pub enum Eg3Command {
    /// Boundary metric between two points `lambda,L,R`.
    Rho { xi: String, eta: String },
    /// Cantor-coordinate bits of a point.
    Phi {
        xi: String,
        #[arg(long, default_value_t = 64)]
        bits: usize,
    },
    /// Euclidean image of a point.
    Psi {
        xi: String,
        #[arg(long, default_value_t = 40)]
        terms: usize,
    },
    /// Random point cloud of Euclidean images, as CSV.
    Cloud {
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 40)]
        terms: usize,
    },
    /// Box-counting dimension of a fixed-ratio fiber.
    Dim {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long, default_value_t = 30)]
        scales: usize,
    },
    /// Ratio scan against the Cantor and Euclidean models.
    Lipschitz {
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
    },
}

/// A failure of a command, carrying the owning module's error name.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain { name: &'static str, message: String },
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain { name: e.name(), message: e.to_string() }
            }
        }
    )*};
}
domain_from!(ModelError, WordError, MartinError, SpectralError, HarmonicError, eg3::Eg3Error);

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn params(raw: &[String]) -> Result<Vec<(String, Rational)>, CliError> {
    raw.iter()
        .map(|p| {
            let (name, value) = p.split_once('=').ok_or_else(|| usage(format!("--param expects NAME=VALUE, got '{p}'")))?;
            let v = rational::parse(value).ok_or_else(|| usage(format!("--param {name}: '{value}' is not a rational")))?;
            Ok((name.trim().to_string(), v))
        })
        .collect()
}

/// A preset name or a path to a config file.
fn load_model(source: &str, overrides: &[(String, Rational)]) -> Result<SmcModel, CliError> {
    if smc::preset_text(source).is_some() {
        return Ok(smc::preset_with(source, overrides)?);
    }
    let text = std::fs::read_to_string(source).map_err(|e| CliError::Domain {
        name: "UnknownModel",
        message: format!("UnknownModel: '{source}' is neither a preset nor a readable file ({e})"),
    })?;
    Ok(smc::parse_model_with(&text, overrides)?)
}

fn root_of(m: &SmcModel) -> Result<crate::words::Letter, CliError> {
    m.effective_root().ok_or_else(|| CliError::Domain {
        name: "MissingRoot",
        message: "MissingRoot: the model has no unique root letter".into(),
    })
}

fn seed_of(cli: &Cli) -> Result<u64, CliError> {
    cli.seed.ok_or_else(|| usage("this command is randomized and requires --seed"))
}

fn word(m: &SmcModel, text: &str) -> Result<Word, CliError> {
    Ok(m.parse_word(text)?)
}

fn point(text: &str) -> Result<BoundaryPoint, CliError> {
    Ok(BoundaryPoint::parse(text)?)
}

/// Prints a single exact value: bare in table layout, as a one-row CSV otherwise.
fn single(format: Format, header: &str, fields: &[&str], value: &str) -> String {
    match format {
        Format::Table => format!("{value}\n"),
        Format::Csv => format!("{header}\n{},{value}\n", fields.join(",")),
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let overrides = params(&cli.params)?;
    let fmt = cli.format;
    let mut out = String::new();
    match &cli.command {
        Command::Classify { model } => {
            let m = load_model(model, &overrides)?;
            let c = smc::classify(&m);
            let set = |s: &std::collections::BTreeSet<crate::words::Letter>| {
                s.iter().map(|&l| m.alphabet().symbol(l).to_string()).collect::<Vec<_>>().join(" ")
            };
            let rows = [
                ("persistent", c.is_persistent.to_string()),
                ("persistent_letters", set(&c.persistent_letters)),
                ("expanding_letters", set(&c.expanding_letters)),
                ("roots", set(&c.roots)),
                ("constant_length", c.constant_length.map_or("none".into(), |l| l.to_string())),
            ];
            if fmt == Format::Csv {
                out.push_str("property,value\n");
            }
            for (k, v) in rows {
                match fmt {
                    Format::Table => writeln!(out, "{k:<20} {v}"),
                    Format::Csv => writeln!(out, "{k},{v}"),
                }
                .expect("string write");
            }
        }
        Command::Simulate { model, steps, start } => {
            let m = load_model(model, &overrides)?;
            let seed = seed_of(cli)?;
            let start = match start {
                Some(s) => word(&m, s)?,
                None => Word::single(root_of(&m)?),
            };
            if fmt == Format::Csv {
                out.push_str("step,word\n");
            }
            for (i, w) in smc::simulate(&m, &start, *steps, seed).iter().enumerate() {
                let sep = if fmt == Format::Csv { "," } else { " " };
                writeln!(out, "{i}{sep}{}", m.render(w)).expect("string write");
            }
        }
        Command::Prob { model, w, v } => {
            let m = load_model(model, &overrides)?;
            let p = smc::transition_prob(&m, &word(&m, w)?, &word(&m, v)?);
            out = single(fmt, "w,v,prob", &[w, v], &fr(&p));
        }
        Command::Nstep { model, x, y, n } => {
            let m = load_model(model, &overrides)?;
            let p = martin::nstep_prob(&m, &word(&m, x)?, &word(&m, y)?, *n)?;
            out = single(fmt, "x,y,n,prob", &[x, y, &n.to_string()], &fr(&p));
        }
        Command::Green { model, x, y } => {
            let m = load_model(model, &overrides)?;
            let g = martin::green(&m, &word(&m, x)?, &word(&m, y)?)?;
            out = single(fmt, "x,y,green", &[x, y], &fr(&g));
        }
        Command::Kernel { model, z, x } => {
            let m = load_model(model, &overrides)?;
            let root = root_of(&m)?;
            let k = martin::kernel(&m, &word(&m, z)?, &word(&m, x)?, root)?;
            out = single(fmt, "z,x,kernel", &[z, x], &fr(&k));
        }
        Command::Theta { model, x, y } => {
            let m = load_model(model, &overrides)?;
            let root = root_of(&m)?;
            let t = martin::theta(&m, &word(&m, x)?, &word(&m, y)?, &DefaultWeights, root)?;
            out = single(fmt, "x,y,theta", &[x, y], &fr(&t));
        }
        Command::Transience { model, v } => {
            let m = load_model(model, &overrides)?;
            let r = martin::transience_check(&m, &word(&m, v)?)?;
            match fmt {
                Format::Table => write!(
                    out,
                    "eta      {}\nG(v,v)   {}\nbound_ok {}\n",
                    fr(&r.eta),
                    fr(&r.green_vv),
                    r.bound_ok
                ),
                Format::Csv => write!(out, "v,eta,green_vv,bound_ok\n{v},{},{},{}\n", fr(&r.eta), fr(&r.green_vv), r.bound_ok),
            }
            .expect("string write");
        }
        Command::Freq { model } => {
            let m = load_model(model, &overrides)?;
            let fm = spectral::frequency_matrix(&m);
            let perron = spectral::perron_frequencies(&fm)?;
            let (rho, e): (String, Vec<String>) = match &perron.exact {
                Some((r, v)) => (fr(r), v.iter().map(fr).collect()),
                None => (ff(perron.eigenvalue), perron.vector.iter().map(|x| ff(*x)).collect()),
            };
            let letters: Vec<&str> = m.alphabet().symbols().iter().map(String::as_str).collect();
            match fmt {
                Format::Table => {
                    let rows: Vec<String> = fm
                        .entries
                        .iter()
                        .map(|row| format!("[{}]", row.iter().map(fr).collect::<Vec<_>>().join(",")))
                        .collect();
                    writeln!(out, "letters = ({})", letters.join(", ")).expect("string write");
                    writeln!(out, "M = [{}]", rows.join(",")).expect("string write");
                    writeln!(out, "rho = {rho}").expect("string write");
                    writeln!(out, "e = ({})", e.join(", ")).expect("string write");
                }
                Format::Csv => {
                    let cols: Vec<String> = letters.iter().map(|l| format!("m_{l}")).collect();
                    writeln!(out, "letter,eigenvalue,frequency,{}", cols.join(",")).expect("string write");
                    for (i, l) in letters.iter().enumerate() {
                        let row: Vec<String> = fm.entries[i].iter().map(fr).collect();
                        writeln!(out, "{l},{rho},{},{}", e[i], row.join(",")).expect("string write");
                    }
                }
            }
        }
        Command::FreqSim { model, steps, runs, start } => {
            let m = load_model(model, &overrides)?;
            let seed = seed_of(cli)?;
            let start = match start {
                Some(s) => word(&m, s)?,
                None => Word::single(m.effective_root().unwrap_or(crate::words::Letter(0))),
            };
            let freq = spectral::empirical_frequency(&m, &start, *steps, *runs, seed)?;
            out.push_str("letter,frequency\n");
            for (l, f) in m.alphabet().symbols().iter().zip(freq) {
                writeln!(out, "{l},{}", ff(f)).expect("string write");
            }
        }
        Command::Harmonic { model, k, depth, verify_len } => {
            let m = load_model(model, &overrides)?;
            let k = rational::parse(k).ok_or_else(|| usage(format!("--k: '{k}' is not a rational")))?;
            let root = harmonic::check_hypotheses(&m)?;
            let word_len = smc::classify(&m).constant_length.expect("checked by hypotheses");
            let mut levels = 0usize;
            let mut len = word_len;
            while len <= *verify_len {
                levels += 1;
                len *= word_len;
            }
            let depth = depth.unwrap_or(levels + 1);
            let f = harmonic::build_harmonic(&m, &k, depth)?;
            if fmt == Format::Csv {
                out.push_str("n,iterate,s_n\n");
            }
            for (n, (it, s)) in f.iterates.iter().zip(&f.values).enumerate() {
                let sep = if fmt == Format::Csv { "," } else { " " };
                writeln!(out, "{n}{sep}{}{sep}{}", m.render(it), fr(s)).expect("string write");
            }
            let lang = smc::enumerate_language(&m, root, levels)?;
            let mut checked = 0usize;
            let mut failures = Vec::new();
            for w in lang.union() {
                if w.len() > *verify_len {
                    continue;
                }
                checked += 1;
                let (pf, equal) = harmonic::verify_harmonic(&m, &f, &w)?;
                if !equal {
                    failures.push(format!("{} (Pf = {})", m.render(&w), fr(&pf)));
                }
            }
            let nonpositive = f.nonpositive();
            if fmt == Format::Table {
                writeln!(out, "verified {checked} reachable words of length <= {verify_len}: {} mismatches", failures.len())
                    .expect("string write");
                if !nonpositive.is_empty() {
                    writeln!(out, "warning: s_n <= 0 for n in {nonpositive:?}").expect("string write");
                }
            }
            if !failures.is_empty() {
                return Err(CliError::Domain {
                    name: "HarmonicityViolation",
                    message: format!("HarmonicityViolation: Pf != f at {}", failures.join(", ")),
                });
            }
        }
        Command::ExportPreset { name } => {
            let m = smc::preset_with(name, &overrides)?;
            out = smc::export_model(&m);
        }
        Command::Eg3(sub) => out = execute_eg3(cli, sub)?,
    }
    Ok(out)
}

fn execute_eg3(cli: &Cli, sub: &Eg3Command) -> Result<String, CliError> {
    let fmt = cli.format;
    let mut out = String::new();
    match sub {
        Eg3Command::Rho { xi, eta } => {
            let (x, y) = (point(xi)?, point(eta)?);
            let (n, m) = eg3::agreements(&x, &y)?;
            let show = |a: eg3::Agreement| a.finite().map_or("inf".to_string(), |v| v.to_string());
            let exact = eg3::rho_exact(&x, &y)?.map(|r| fr(&r)).unwrap_or_default();
            let value = ff(eg3::rho(&x, &y)?);
            match fmt {
                Format::Table => {
                    writeln!(out, "n   {}\nm   {}", show(n), show(m)).expect("string write");
                    if !exact.is_empty() {
                        writeln!(out, "rho {exact}").expect("string write");
                    }
                    writeln!(out, "rho {value}").expect("string write");
                    if x.left().is_some() != y.left().is_some() || x.right().is_some() != y.right().is_some() {
                        writeln!(out, "note: a side present at only one point is compared with agreement 0").expect("string write");
                    }
                }
                Format::Csv => {
                    write!(out, "n,m,rho_exact,rho\n{},{},{exact},{value}\n", show(n), show(m)).expect("string write")
                }
            }
        }
        Eg3Command::Phi { xi, bits } => {
            let x = point(xi)?;
            let (lambda, b) = eg3::phi(&x, *bits)?;
            let s: String = b.iter().map(|d| char::from(b'0' + d)).collect();
            match fmt {
                Format::Table => write!(out, "lambda {}\nbits   {s}\n", ff(lambda)),
                Format::Csv => write!(out, "lambda,bits\n{},{s}\n", ff(lambda)),
            }
            .expect("string write");
        }
        Eg3Command::Psi { xi, terms } => {
            let img = eg3::psi(&point(xi)?, *terms)?;
            let p = img.point;
            match fmt {
                Format::Table => write!(
                    out,
                    "lambda {}\ny      {}  (+/- {})\nz      {}  (+/- {})\n",
                    ff(p.lambda),
                    ff(p.y),
                    ff(img.error[0]),
                    ff(p.z),
                    ff(img.error[1])
                ),
                Format::Csv => write!(
                    out,
                    "lambda,y,z,y_error,z_error\n{},{},{},{},{}\n",
                    ff(p.lambda),
                    ff(p.y),
                    ff(p.z),
                    ff(img.error[0]),
                    ff(img.error[1])
                ),
            }
            .expect("string write");
        }
        Eg3Command::Cloud { samples, terms } => {
            out = eg3::generate_cloud(*samples, *terms, seed_of(cli)?)?;
        }
        Eg3Command::Dim { lambda, depth, scales } => {
            let est = eg3::box_dimension(*lambda, *depth, *scales)?;
            let exact = eg3::fiber_dimension(*lambda);
            match fmt {
                Format::Table => write!(out, "estimate {}\nanalytic {}\n", ff(est), ff(exact)),
                Format::Csv => write!(out, "lambda,estimate,analytic\n{},{},{}\n", ff(*lambda), ff(est), ff(exact)),
            }
            .expect("string write");
        }
        Eg3Command::Lipschitz { pairs } => {
            let r = eg3::lipschitz_scan(*pairs, seed_of(cli)?)?;
            match fmt {
                Format::Table => {
                    writeln!(out, "pairs                {}\nskipped              {}", r.pairs, r.skipped).expect("string write");
                    writeln!(out, "sup rho/d_phi        {}", ff(r.sup_rho_over_phi)).expect("string write");
                    writeln!(out, "inf rho/|dpsi|       {}", ff(r.inf_rho_over_psi)).expect("string write");
                    writeln!(out, "sup rho/|dpsi|       {}", ff(r.sup_rho_over_psi)).expect("string write");
                    writeln!(out, "nesting trends: slope of log2(d^r/rho) per shared symbol").expect("string write");
                    for t in &r.trends {
                        writeln!(out, "  r={:<4} lambda={:<12} {:<5} slope {:+.4}", t.r, t.lambda, t.side, t.slope)
                            .expect("string write");
                    }
                }
                Format::Csv => {
                    out.push_str("r,lambda,side,slope\n");
                    for t in &r.trends {
                        writeln!(out, "{},{},{},{}", t.r, ff(t.lambda), t.side, ff(t.slope)).expect("string write");
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Runs the command line `args` (including the program name), writing
/// results to `stdout` (or `--output`) and diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text.as_bytes()),
                None => stdout.write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "IoError: {e}");
                    1
                }
            }
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(CliError::Domain { name, message }) => {
            let _ = writeln!(stderr, "{name}: {}", message.strip_prefix(&format!("{name}: ")).unwrap_or(&message));
            1
        }
    }
}
