use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bellpur::bell::parse_gate_list;
use bellpur::capacity::{emit_curves, linear_grid, log_grid, write_curves_csv};
use bellpur::codesearch::{monte_carlo_search, verify_published, Minimize, SearchConfig};
use bellpur::density::werner;
use bellpur::fmt::csv;
use bellpur::hashing::{hashing_estimate, hashing_simulate, MAX_EXACT_PAIRS};
use bellpur::protocols::{direct_purify_exact, direct_purify_sim, recurrence_iterate, StopRule, Variant};
use bellpur::qecc::{
    codewords_from_circuit, decode_with, kl_check, published_codewords, random_logical, random_single_qubit_error,
    standard_errors, subspace_distance, Codeword, Decoder, ErrorOperator,
};
use bellpur::twirl::twirl_battery;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Entanglement purification and small-code toolkit.
#[derive(Parser, Debug)]
#[command(name = "bellpur", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Yield and bound curves over Werner fidelity (capacity): E_formation,
    /// hashing, recurrence+hashing, Macchiavello+hashing, KL upper bound.
    Curves {
        #[arg(long, default_value_t = 0.26)]
        fmin: f64,
        #[arg(long, default_value_t = 1.0)]
        fmax: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Space points evenly in log10(F − ½) and add that column.
        #[arg(long)]
        log: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Iterate the two-pair recurrence protocol from a Werner state (protocols).
    Recurrence {
        #[arg(long = "F0")]
        f0: f64,
        #[arg(long, default_value = "twirl")]
        variant: Variant,
        #[arg(long, default_value_t = 1.0 - 1e-6)]
        target: f64,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Hashing simulation: exact posterior up to 8 pairs, typical-set
    /// estimates beyond (hashing).
    HashSim {
        #[arg(long)]
        n: usize,
        #[arg(long = "F")]
        f: f64,
        /// Rounds per run; defaults to n.
        #[arg(long)]
        rounds: Option<usize>,
        /// Number of independent runs, seeded seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo search for a one-way block purification circuit (codesearch).
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Gate-append attempts per restart.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Objective: ops or bxors.
        #[arg(long, default_value = "ops")]
        minimize: Minimize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Check the embedded five-pair code fixture row by row (codesearch).
    VerifyPublished {
        #[command(flatten)]
        out: Output,
    },
    /// State-vector check of the five-qubit codewords: KL conditions and
    /// decoding under single-qubit errors (qecc).
    VerifyCode {
        /// Extra random single-qubit unitary errors.
        #[arg(long, default_value_t = 0)]
        random_unitaries: usize,
        /// Random logical states per error operator.
        #[arg(long, default_value_t = 20)]
        logicals: usize,
        /// Gate-list file; check the code derived from this circuit instead.
        #[arg(long)]
        gates: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Random-matrix battery for the twelve-element bilateral twirl (twirl).
    TwirlCheck {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo of direct purification on Ψ+ / |↑↑⟩ mixtures (protocols).
    DirectPurify {
        /// Weight of Ψ+ in the mixture.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 1_000_000)]
        pairs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<bellpur::Error> for Failure {
    fn from(e: bellpur::Error) -> Self {
        match e {
            bellpur::Error::Verification(msg) => Failure::Verification(msg),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Res = Result<(), Failure>;

fn open(out: &Output) -> Result<Box<dyn Write>, Failure> {
    Ok(match &out.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Res {
    match cmd {
        Command::Curves {
            fmin,
            fmax,
            points,
            log,
            out,
        } => {
            let grid = if log { log_grid(fmin, fmax, points)? } else { linear_grid(fmin, fmax, points) };
            let pts = emit_curves(&grid)?;
            let mut w = open(&out)?;
            write_curves_csv(&mut w, &pts, log)?;
            w.flush()?;
        }
        Command::Recurrence {
            f0,
            variant,
            target,
            max_steps,
            out,
        } => {
            let trace = recurrence_iterate(f0, variant, StopRule { target, max_steps })?;
            let mut w = open(&out)?;
            writeln!(w, "step,F,p_pass,fraction_remaining")?;
            for (k, s) in trace.steps.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{}",
                    k + 1,
                    csv(s.p.fidelity()),
                    csv(s.p_pass),
                    csv(s.fraction_remaining)
                )?;
            }
            w.flush()?;
        }
        Command::HashSim {
            n,
            f,
            rounds,
            seeds,
            seed,
            out,
        } => {
            let state = werner(f)?;
            let rounds = rounds.unwrap_or(n);
            let reports = (0..seeds)
                .into_par_iter()
                .map(|k| {
                    let s = seed.wrapping_add(k);
                    let rng = &mut ChaCha8Rng::seed_from_u64(s);
                    let r = if n <= MAX_EXACT_PAIRS {
                        hashing_simulate(&state, n, rounds, rng)
                    } else {
                        hashing_estimate(&state, n, rounds, rng)
                    };
                    r.map(|r| (s, r))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut w = open(&out)?;
            writeln!(w, "seed,round,posterior_entropy,candidates_remaining,identified")?;
            for (s, r) in &reports {
                let last = r.entropy_trace.len() - 1;
                for (k, (h, c)) in r.entropy_trace.iter().zip(&r.candidate_trace).enumerate() {
                    let identified = k == last && r.identified;
                    writeln!(w, "{s},{k},{},{c},{}", csv(*h), identified as u8)?;
                }
            }
            w.flush()?;
        }
        Command::Search {
            n,
            m,
            t,
            budget,
            restarts,
            minimize,
            seed,
            out,
        } => {
            let cfg = SearchConfig {
                restarts,
                minimize,
                ..SearchConfig::new(n, m, t, budget)
            };
            let outcome = monte_carlo_search(&cfg, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let mut w = open(&out)?;
            match &outcome.best {
                Some(sol) => writeln!(w, "{sol}")?,
                None => writeln!(
                    w,
                    "no solution: n={n} m={m} t={t} restarts={restarts} attempts={}",
                    outcome.attempts
                )?,
            }
            w.flush()?;
        }
        Command::VerifyPublished { out } => {
            let mut w = open(&out)?;
            match verify_published() {
                Ok(r) => {
                    writeln!(
                        w,
                        "rows={} det=1 goodcon={} badcon={}: ok",
                        r.rows_checked, r.goodcon as u8, r.badcon as u8
                    )?;
                    w.flush()?;
                }
                Err(e) => {
                    writeln!(w, "FAIL: {e}")?;
                    w.flush()?;
                    return Err(e.into());
                }
            }
        }
        Command::VerifyCode {
            random_unitaries,
            logicals,
            gates,
            seed,
            out,
        } => verify_code(random_unitaries, logicals, gates, seed, &out)?,
        Command::TwirlCheck { samples, seed, out } => {
            let b = twirl_battery(samples, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut w = open(&out)?;
            writeln!(w, "samples={}", b.samples)?;
            writeln!(w, "max_off_diagonal={}", csv(b.max_off_diagonal))?;
            writeln!(w, "max_triplet_spread={}", csv(b.max_triplet_spread))?;
            writeln!(w, "max_singlet_shift={}", csv(b.max_singlet_shift))?;
            writeln!(w, "min_entropy_gain={}", csv(b.min_entropy_gain))?;
            writeln!(w, "min_eigenvalue={}", csv(b.min_eigenvalue))?;
            writeln!(w, "{}", if b.passed() { "PASS" } else { "FAIL" })?;
            w.flush()?;
            if !b.passed() {
                return Err(Failure::Verification("twirl battery".into()));
            }
        }
        Command::DirectPurify { p, pairs, seed, out } => {
            let r = direct_purify_sim(p, pairs, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let (exact, _) = direct_purify_exact(p);
            let mut w = open(&out)?;
            writeln!(
                w,
                "p,trials,successes,success_prob,success_sigma,yield,exact_success_prob,min_survivor_fidelity"
            )?;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                csv(p),
                r.trials,
                r.successes,
                csv(r.estimated_success_prob),
                csv(r.success_sigma()),
                csv(r.estimated_yield),
                csv(exact),
                csv(r.min_survivor_fidelity)
            )?;
            w.flush()?;
        }
    }
    Ok(())
}

fn verify_code(random_unitaries: usize, logicals: usize, gates: Option<PathBuf>, seed: u64, out: &Output) -> Res {
    let published = published_codewords();
    let code: Codeword = match &gates {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let list = parse_gate_list(&text)?;
            let n = list.iter().map(|g| g.max_index() + 1).max().unwrap_or(1).max(5);
            codewords_from_circuit(&list, n)?
        }
        None => published.clone(),
    };
    let n = code.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let errors = standard_errors(n);
    let kl = kl_check(&code, &errors, 1e-10);
    let decoder = Decoder::new(&code, &errors);

    let mut trial: Vec<ErrorOperator> = errors.clone();
    trial.extend((0..random_unitaries).map(|_| random_single_qubit_error(n, &mut rng)));
    let states: Vec<_> = (0..logicals.max(1)).map(|_| random_logical(&mut rng)).collect();

    let mut w = open(out)?;
    let mut ok = kl.holds;
    writeln!(w, "kl_conditions max_residual={} {}", csv(kl.max_residual), verdict(kl.holds))?;
    if gates.is_some() && n == published.n() {
        writeln!(w, "distance_to_published={}", csv(subspace_distance(&code, &published)))?;
    }
    writeln!(w, "error,min_fidelity,status")?;
    for e in &trial {
        let mut worst = f64::INFINITY;
        for &(a, b) in &states {
            worst = worst.min(decode_with(&decoder, &code, a, b, e)?);
        }
        let pass = worst >= 1.0 - 1e-9;
        ok &= pass;
        writeln!(w, "{e},{},{}", csv(worst), verdict(pass))?;
    }
    writeln!(w, "{}", verdict(ok))?;
    w.flush()?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification("code check".into()))
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
