//! The `emuchain` command line. [`run`] is the whole program; `main` only
//! wires it to the process streams.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bits::BitString;
use crate::constructions::{
    fixtures, input_transform, output_transform, quotient_k, synchronizing_universe,
    virus_machines, InputPermutationTable, OutputPermutation, VirusChain,
};
use crate::emulation::ComputerSet;
use crate::error::{Error, Result};
use crate::exact::{parse_rational, render, render_decimal, Rational};
use crate::export::{distribution_csv, matrix_csv, strings_csv, walks_text, DECIMAL_DIGITS};
use crate::format::{self, UniverseFile};
use crate::markov::{
    classify, n_step_by_tree, n_step_computer, never_return_estimate, sample_walks,
    stationary_exact, stationary_power, to_rationals, EmulationMatrix,
};
use crate::probability::{stationary_string_distribution, string_distribution_n};
use crate::universe::{Output, StateId, Universe};
use crate::verify;

#[derive(Parser, Debug)]
#[command(
    name = "emuchain",
    version,
    about = "Exact emulation Markov chains over finite computer universes"
)]
struct Cli {
    /// Add a 12-digit decimal rendering, marked approximate with `~`.
    #[arg(long, global = true)]
    decimal: bool,
    /// Refuse to run randomized commands without an explicit --seed.
    #[arg(long, global = true)]
    strict_seed: bool,
    /// Worker threads for Monte-Carlo commands; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SetArgs {
    file: PathBuf,
    /// Named set from the file; `all` is every state.
    #[arg(long, default_value = "all")]
    set: String,
}

#[derive(Args, Debug)]
struct StartArgs {
    /// Start computer; defaults to the first member of the set.
    #[arg(long)]
    start: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Exact,
    Power,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Fixture {
    TwoState,
    Figure3,
    Toggle,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a universe file.
    Validate { file: PathBuf },
    /// Minimize a universe; sets are mapped to the quotient states.
    Minimize { file: PathBuf },
    /// Flags, period and chain class of a set.
    Analyze(SetArgs),
    /// The emulation matrix as CSV.
    Matrix(SetArgs),
    /// Stationary vector as CSV.
    Stationary {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        /// Stopping threshold for the power method.
        #[arg(long, default_value = "1e-12")]
        tol: String,
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
    },
    /// n-step distribution over members.
    Nstep {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        start: StartArgs,
        #[arg(short)]
        n: usize,
        /// Enumerate the tree instead of powering the matrix.
        #[arg(long)]
        tree: bool,
    },
    /// Sample walks.
    Walk {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        start: StartArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Output-string probabilities, stationary or at step n.
    Probability {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        start: StartArgs,
        /// One output (`eps`, `undef` or bits).
        #[arg(long, conflicts_with = "all")]
        string: Option<String>,
        #[arg(long)]
        all: bool,
        /// Step count; without it the stationary distribution is used.
        #[arg(short)]
        n: Option<usize>,
    },
    /// Never-return estimate on the virus chain.
    Virus {
        #[arg(long, default_value_t = 20)]
        max: usize,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Defaults to `max`.
        #[arg(long)]
        horizon: Option<usize>,
        /// Also build the explicit machines and report their step probabilities.
        #[arg(long)]
        concrete: bool,
    },
    /// Synchronizing-word construction; prints the universe file.
    Sync {
        #[arg(long)]
        word: String,
        /// Base universe; defaults to the two-state fixture.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Apply an output or input permutation; prints the universe file.
    Transform {
        file: PathBuf,
        #[arg(
            long,
            conflicts_with = "input_perm",
            required_unless_present = "input_perm"
        )]
        output_perm: Option<PathBuf>,
        #[arg(long)]
        input_perm: Option<PathBuf>,
    },
    /// k-equivalence quotient chain.
    Quotient {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        k: usize,
    },
    /// Run property suites.
    Verify {
        /// A suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a built-in fixture as a universe file.
    ConstructFixture {
        #[arg(value_enum)]
        name: Fixture,
    },
}

/// Runs the command line; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let result = execute(&cli, stderr).and_then(|text| match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: kind={} reason={}", e.kind(), e);
            match e {
                Error::Parse { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn load(path: &Path) -> Result<UniverseFile> {
    format::load_path(path)
}

fn load_set(args: &SetArgs) -> Result<ComputerSet> {
    let file = load(&args.file)?;
    let members = file.set(&args.set)?;
    ComputerSet::new(Arc::new(file.universe), members)
}

fn start_of(phi: &ComputerSet, start: &StartArgs) -> Result<StateId> {
    let c = match start.start {
        Some(i) => StateId(i),
        None => *phi
            .members()
            .first()
            .ok_or_else(|| Error::Domain("the set is empty".into()))?,
    };
    phi.check_member(c)?;
    Ok(c)
}

fn seed(cli: &Cli, seed: Option<u64>, default: u64) -> Result<u64> {
    match seed {
        Some(s) => Ok(s),
        None if cli.strict_seed => Err(Error::Domain("--strict-seed requires --seed".into())),
        None => Ok(default),
    }
}

fn workers(cli: &Cli) -> Result<usize> {
    match cli.workers {
        Some(0) => Err(Error::Domain("--workers must be positive".into())),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn decimal_suffix(cli: &Cli, r: &Rational) -> String {
    if cli.decimal {
        format!(" ~{}", render_decimal(r, DECIMAL_DIGITS))
    } else {
        String::new()
    }
}

fn parse_output(s: &str) -> Result<Output> {
    s.parse()
}

fn remap_sets(file: &UniverseFile, universe: Universe, map: &[StateId]) -> UniverseFile {
    let mut out = UniverseFile::new(universe);
    for (name, members) in &file.sets {
        let mut m: Vec<StateId> = members.iter().map(|q| map[q.0]).collect();
        let mut seen = std::collections::BTreeSet::new();
        m.retain(|q| seen.insert(*q));
        out.sets.insert(name.clone(), m);
    }
    out
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<String> {
    match &cli.command {
        Command::Validate { file } => {
            let f = load(file)?;
            let names: Vec<&str> = f.sets.keys().map(String::as_str).collect();
            Ok(format!(
                "ok states={} minimized={} sets={}\n",
                f.universe.len(),
                f.universe.is_minimized(),
                names.join(";")
            ))
        }
        Command::Minimize { file } => {
            let f = load(file)?;
            let (m, map) = f.universe.minimize();
            Ok(format::serialize(&remap_sets(&f, m, &map)))
        }
        Command::Analyze(args) => {
            let phi = load_set(args)?;
            let flags = phi.flags();
            let report = classify(&phi);
            let ids: Vec<String> = phi.members().iter().map(|m| m.to_string()).collect();
            Ok(format!(
                "members={}\nbranching={}\nconnected={}\nirreducible={}\nperiod={}\naperiodic={}\nclass={}\n",
                ids.join(";"),
                flags.branching,
                flags.connected,
                flags.irreducible,
                report.period,
                report.aperiodic,
                report.class
            ))
        }
        Command::Matrix(args) => {
            let phi = load_set(args)?;
            let e = EmulationMatrix::new(&phi)?;
            Ok(matrix_csv(e.members(), &e.entries(), cli.decimal))
        }
        Command::Stationary {
            set,
            method,
            tol,
            max_iter,
        } => {
            let phi = load_set(set)?;
            match method {
                Method::Exact => {
                    let pi = stationary_exact(&phi)?;
                    if !pi.is_limit() {
                        let _ =
                            writeln!(stderr, "note: periodic set; invariant measure, not a limit");
                    }
                    Ok(distribution_csv(&pi.members, &pi.values, cli.decimal))
                }
                Method::Power => {
                    let tol = parse_rational(tol)?;
                    let p = stationary_power(&phi, &tol, *max_iter)?;
                    let _ = writeln!(stderr, "iterations={}", p.iterations);
                    Ok(distribution_csv(phi.members(), &p.values, cli.decimal))
                }
            }
        }
        Command::Nstep {
            set,
            start,
            n,
            tree,
        } => {
            let phi = load_set(set)?;
            let c = start_of(&phi, start)?;
            let row = if *tree {
                n_step_by_tree(c, &phi, *n)?
            } else {
                n_step_computer(c, &phi, *n)?
            };
            Ok(distribution_csv(
                phi.members(),
                &to_rationals(&row),
                cli.decimal,
            ))
        }
        Command::Walk {
            set,
            start,
            seed: s,
            len,
            samples,
        } => {
            let phi = load_set(set)?;
            let c = start_of(&phi, start)?;
            let traces = sample_walks(c, &phi, *len, *samples, seed(cli, *s, 0)?, workers(cli)?)?;
            Ok(walks_text(&traces))
        }
        Command::Probability {
            set,
            start,
            string,
            all,
            n,
        } => {
            let phi = load_set(set)?;
            let dist = match n {
                Some(n) => string_distribution_n(start_of(&phi, start)?, &phi, *n)?,
                None => stationary_string_distribution(&phi)?,
            };
            match (string, all) {
                (Some(s), _) => {
                    let o = parse_output(s)?;
                    let p = dist.get(&o);
                    let mut text = String::from("output,probability_num,probability_den");
                    if cli.decimal {
                        text.push_str(",probability_approx");
                    }
                    text.push_str(&format!("\n{},{},{}", o.token(), p.numer(), p.denom()));
                    if cli.decimal {
                        text.push_str(&format!(",~{}", render_decimal(&p, DECIMAL_DIGITS)));
                    }
                    text.push('\n');
                    Ok(text)
                }
                (None, true) => Ok(strings_csv(&dist, cli.decimal)),
                (None, false) => Err(Error::Domain("give --string S or --all".into())),
            }
        }
        Command::Virus {
            max,
            samples,
            seed: s,
            horizon,
            concrete,
        } => {
            let chain = VirusChain::new(*max)?;
            let e = never_return_estimate(
                &chain,
                horizon.unwrap_or(*max),
                *samples,
                seed(cli, *s, 0)?,
                workers(cli)?,
            )?;
            let mut text = format!(
                "horizon={}\nsamples={}\nsurvivors={}\nestimate={:.6}\nci95=[{:.6},{:.6}]\nexact={}\nexact_approx=~{}\n",
                e.horizon,
                e.samples,
                e.survivors,
                e.estimate,
                e.ci_low,
                e.ci_high,
                render(&e.exact),
                render_decimal(&e.exact, DECIMAL_DIGITS)
            );
            if *concrete {
                let v = virus_machines(*max, &fixtures::two_state(), StateId(0))?;
                let phi = ComputerSet::all(Arc::new(v.universe))?;
                for i in 1..*max {
                    let row = n_step_computer(v.machines[i - 1], &phi, i)?;
                    let p = row[phi.check_member(v.machines[i])?].to_rational();
                    text.push_str(&format!(
                        "M{i}->M{} steps={i} p={}{}\n",
                        i + 1,
                        render(&p),
                        decimal_suffix(cli, &p)
                    ));
                }
            }
            Ok(text)
        }
        Command::Sync { word, base } => {
            let w: BitString = word.parse()?;
            let base = match base {
                Some(p) => load(p)?.universe,
                None => fixtures::two_state(),
            };
            let s = synchronizing_universe(&w, &base)?;
            let report = classify(&s.phi);
            let _ = write!(
                stderr,
                "class={} reference={} closure_matches={}",
                report.class, s.reference, s.closure_matches
            );
            if let Ok(pi) = stationary_exact(&s.phi) {
                let pv = pi.value(s.reference).expect("reference is a member");
                let _ = write!(stderr, " pi_reference={}", render(pv));
            }
            let _ = writeln!(stderr);
            let file = UniverseFile::new((*s.universe).clone())
                .with_set("phi", s.phi.members().to_vec())
                .with_set("reference", vec![s.reference]);
            Ok(format::serialize(&file))
        }
        Command::Transform {
            file,
            output_perm,
            input_perm,
        } => {
            let f = load(file)?;
            let read = |p: &PathBuf| {
                std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
            };
            let (u, map) = match (output_perm, input_perm) {
                (Some(p), _) => {
                    output_transform(&f.universe, &read(p)?.parse::<OutputPermutation>()?)?
                }
                (None, Some(p)) => {
                    input_transform(&f.universe, &read(p)?.parse::<InputPermutationTable>()?)?
                }
                (None, None) => unreachable!("clap requires one permutation"),
            };
            Ok(format::serialize(&remap_sets(&f, u, &map)))
        }
        Command::Quotient { set, k } => {
            let phi = load_set(set)?;
            let q = quotient_k(&phi, *k)?;
            let mut text = String::from("class,members\n");
            for (i, c) in q.classes.iter().enumerate() {
                let ids: Vec<String> = c.iter().map(|m| m.to_string()).collect();
                text.push_str(&format!("{i},{}\n", ids.join(";")));
            }
            text.push('\n');
            let labels: Vec<usize> = (0..q.classes.len()).collect();
            text.push_str(&matrix_csv(&labels, &q.matrix, cli.decimal));
            Ok(text)
        }
        Command::Verify { suite, seed: s } => {
            let seed = seed(cli, *s, 1)?;
            let names: Vec<&str> = if suite == "all" {
                verify::SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut text = String::new();
            for name in names {
                match verify::run_suite(name, seed)? {
                    Ok(r) => text.push_str(&format!("suite={} checks={} ok\n", r.name, r.checks)),
                    Err(why) => {
                        return Err(Error::Contract(format!("suite {name} failed: {why}")));
                    }
                }
            }
            Ok(text)
        }
        Command::ConstructFixture { name } => {
            let file = match name {
                Fixture::TwoState => UniverseFile::new(fixtures::two_state())
                    .with_set("all", vec![StateId(0), StateId(1)]),
                Fixture::Figure3 => {
                    let (u, c) = fixtures::figure3();
                    UniverseFile::new(u)
                        .with_set("phi", fixtures::figure3_members())
                        .with_set("root", vec![c])
                }
                Fixture::Toggle => {
                    let (u, phi) = fixtures::toggle();
                    UniverseFile::new((*u).clone()).with_set("all", phi.members().to_vec())
                }
            };
            Ok(format::serialize(&file))
        }
    }
}
