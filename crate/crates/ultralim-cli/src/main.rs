use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ultralim::invlim::{limit_words, xtilde_distance};
use ultralim::shadowing::{
    check_lift_claim, lift_pseudo_orbit, make_pseudo_orbit, max_tuple_len, shadow_point,
    u_shadow_check, PartitionSpec, Perturbation,
};
use ultralim::suites;
use ultralim::systems::{DrSystem, SystemKind};
use ultralim::words::{w0_distance, W0Word};
use ultralim::{BaseSpace, ClopenSet, Error, Point};

/// Exact-arithmetic word spaces, inverse limits and shadowing for the
/// bundled Deaconu-Renault systems. All output is line-delimited with a
/// stable field order; identical invocations produce identical bytes.
#[derive(Parser)]
#[command(name = "ultralim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distance between two points (or two word literals) of a space
    Dist {
        /// nat | cantor | cantor-minus:<point>
        #[arg(long)]
        space: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// search bound for word distances
        #[arg(long, default_value_t = 1000)]
        bound: u64,
    },
    /// Membership of a point in a clopen set
    Member {
        #[arg(long)]
        space: String,
        /// Z(bits)+Z(bits) | {n1,n2,...} | {n..} | empty
        #[arg(long)]
        set: String,
        #[arg(long)]
        x: String,
    },
    /// Basis elements of the frozen enumeration
    Basis {
        #[arg(long)]
        space: String,
        /// first index to print (1-based)
        #[arg(long, default_value_t = 1)]
        i: u64,
        /// how many consecutive elements to print
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Forward orbit of a point (for otw-full: tail orbit of a word)
    Orbit {
        #[arg(long)]
        sys: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 8)]
        steps: u32,
    },
    /// Generate a seeded pseudo-orbit and print its steps
    Pseudo {
        #[arg(long)]
        sys: String,
        #[arg(long, default_value_t = 6)]
        len: usize,
        #[arg(long, default_value_t = 3)]
        delta_level: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// none | flip:<offset> | atom
        #[arg(long, default_value = "atom")]
        perturb: String,
    },
    /// Shadow a seeded pseudo-orbit and verify the tracking levels
    Shadow {
        #[arg(long)]
        sys: String,
        #[arg(long, default_value_t = 5)]
        len: usize,
        #[arg(long, default_value_t = 3)]
        delta_level: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lift a seeded pseudo-orbit to the inverse limit and verify the claim
    Lift {
        #[arg(long)]
        sys: String,
        #[arg(long, default_value_t = 5)]
        len: usize,
        #[arg(long, default_value_t = 4)]
        delta_level: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// tuple-index level bound
        #[arg(long, default_value_t = 6)]
        l: u64,
        /// backward depth; defaults to the longest tuple length
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Closed-form limit words of a system with convergence certificates
    Limits {
        #[arg(long)]
        sys: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// Run a verification suite; exit 0 iff it passes
    Verify {
        /// ultrametric | balls | branches | inverse-limit | lift | shadow | defseq
        #[arg(long)]
        suite: String,
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        sys: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        /// for the ultrametric suite: sample word-space distances instead
        /// of base-point distances
        #[arg(long, default_value_t = false)]
        words: bool,
    },
}

fn parse_space(s: &str) -> Result<BaseSpace, Error> {
    match s {
        "nat" => Ok(BaseSpace::NatDiscrete),
        "cantor" => Ok(BaseSpace::CantorFull),
        _ => {
            let point = s
                .strip_prefix("cantor-minus:")
                .ok_or_else(|| Error::Parse(format!("unknown space {s:?}")))?;
            match Point::parse(point)? {
                Point::Cantor(c) => Ok(BaseSpace::CantorMinusPoint(c)),
                p => Err(Error::Parse(format!("excluded point must be a Cantor point, got {p}"))),
            }
        }
    }
}

fn parse_perturbation(s: &str) -> Result<Perturbation, Error> {
    match s {
        "none" => Ok(Perturbation::None),
        "atom" => Ok(Perturbation::RandomInAtom),
        _ => {
            let offset = s
                .strip_prefix("flip:")
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("unknown perturbation {s:?}")))?;
            Ok(Perturbation::FlipBit { offset })
        }
    }
}

/// exit 0: success / verification pass; 1: verification failure; 2: usage
fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(pass) => {
            if pass {
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

fn run(command: Command) -> Result<bool, Error> {
    match command {
        Command::Dist { space, x, y, bound } => {
            let space = parse_space(&space)?;
            match (Point::parse(&x), Point::parse(&y)) {
                (Ok(px), Ok(py)) => {
                    println!("{}", space.point_distance(&px, &py)?);
                }
                _ => {
                    let wx = W0Word::parse(&x)?;
                    let wy = W0Word::parse(&y)?;
                    println!("{}", w0_distance(&space, &wx, &wy, bound));
                }
            }
            Ok(true)
        }
        Command::Member { space, set, x } => {
            let space = parse_space(&space)?;
            let set = ClopenSet::parse(&set)?;
            let x = Point::parse(&x)?;
            println!("{}", space.clopen_member(&set, &x));
            Ok(true)
        }
        Command::Basis { space, i, count } => {
            let space = parse_space(&space)?;
            for index in i..i + count {
                println!("i={index} set={}", space.enumerate_basis(index));
            }
            Ok(true)
        }
        Command::Orbit { sys, x, steps } => {
            let sys = DrSystem::by_name(&sys)?;
            if sys.kind() == SystemKind::OtwFull {
                // the full shift over the alphabet N acts on words
                let mut word = W0Word::parse(&x)?;
                println!("step=0 word={word}");
                for step in 1..=steps {
                    match word.tail() {
                        Ok(next) => {
                            word = next;
                            println!("step={step} word={word}");
                        }
                        Err(_) => {
                            println!("step={step} note=zero-word-reached");
                            break;
                        }
                    }
                }
                return Ok(true);
            }
            let mut point = Point::parse(&x)?;
            println!("step=0 x={point}");
            for step in 1..=steps {
                if !sys.domain_contains(&point) {
                    println!("step={step} note=left-domain");
                    break;
                }
                point = sys.apply(&point)?;
                println!("step={step} x={point}");
            }
            Ok(true)
        }
        Command::Pseudo { sys, len, delta_level, seed, perturb } => {
            let sys = DrSystem::by_name(&sys)?;
            let perturbation = parse_perturbation(&perturb)?;
            let po = make_pseudo_orbit(&sys, len, delta_level, perturbation, seed)?;
            for (i, p) in po.points().iter().enumerate() {
                if i + 1 < po.len() {
                    let fx = sys.apply(p)?;
                    let level = sys.base().point_distance(&fx, &po.points()[i + 1])?;
                    println!("step={i} x={p} step_distance={level}");
                } else {
                    println!("step={i} x={p}");
                }
            }
            Ok(true)
        }
        Command::Shadow { sys, len, delta_level, seed } => {
            let sys = DrSystem::by_name(&sys)?;
            let po = make_pseudo_orbit(&sys, len, delta_level, Perturbation::RandomInAtom, seed)?;
            let z = shadow_point(&sys, &po)?;
            println!("z={z}");
            let mut current = z.clone();
            let mut pass = true;
            for (i, x) in po.points().iter().enumerate() {
                let level = sys.base().point_distance(&current, x)?;
                let ok = level.distance_at_most(delta_level + 1);
                pass &= ok;
                println!("step={i} x={x} track_distance={level} ok={ok}");
                if i + 1 < po.len() {
                    current = sys.apply(&current)?;
                }
            }
            let shadowed =
                u_shadow_check(&sys, &z, po.points(), PartitionSpec { radius_level: delta_level })?;
            pass &= shadowed;
            println!("verdict={}", if pass { "pass" } else { "fail" });
            Ok(pass)
        }
        Command::Lift { sys, len, delta_level, seed, l, depth } => {
            let sys = DrSystem::by_name(&sys)?;
            let po = make_pseudo_orbit(&sys, len, delta_level, Perturbation::RandomInAtom, seed)?;
            let depth = depth.unwrap_or_else(|| max_tuple_len(sys.base(), l));
            let lift = lift_pseudo_orbit(&sys, &po, l, depth)?;
            for (i, y) in lift.points().iter().enumerate() {
                println!("i={i} y={y}");
            }
            for i in 0..lift.points().len() - 1 {
                let up = ultralim::invlim::alpha_f(&sys, &lift.points()[i])?;
                let d = xtilde_distance(&sys, &up, &lift.points()[i + 1], l);
                println!("pair={i} upstairs_distance={d} below=2^-{l}");
            }
            let pass = check_lift_claim(&sys, lift.points(), l)?.is_none();
            println!("verdict={}", if pass { "pass" } else { "fail" });
            Ok(pass)
        }
        Command::Limits { sys, depth } => {
            let sys = DrSystem::by_name(&sys)?;
            let description = limit_words(&sys)?;
            println!("system={} closed_form=\"{}\"", description.system, description.closed_form);
            let report = suites::limit_witness_suite(&sys, depth)?;
            for line in &report.records {
                println!("{line}");
            }
            Ok(report.pass())
        }
        Command::Verify { suite, space, sys, samples, seed, bound, depth, words } => {
            let report = match suite.as_str() {
                "ultrametric" => {
                    let space = parse_space(space.as_deref().unwrap_or("cantor"))?;
                    let target = match (&space, words) {
                        (BaseSpace::NatDiscrete, false) => {
                            suites::UltrametricTarget::NatInfinityPoints
                        }
                        (BaseSpace::NatDiscrete, true) => suites::UltrametricTarget::W0WordsNat,
                        (_, false) => suites::UltrametricTarget::CantorPoints,
                        (_, true) => suites::UltrametricTarget::W0WordsCantor,
                    };
                    suites::ultrametric_suite(target, samples, bound, seed)?
                }
                "balls" => {
                    let space = parse_space(space.as_deref().unwrap_or("cantor"))?;
                    suites::ball_dichotomy_suite(&space, samples, 8, seed)?
                }
                "branches" => {
                    let sys = DrSystem::by_name(sys.as_deref().unwrap_or("vls"))?;
                    let mut report = suites::branch_suite(&sys, samples / 9 + 1, 8, seed)?;
                    let sep = suites::verify_separation(&sys, samples, seed)?;
                    report.records.extend(sep.records);
                    if !sep.pass {
                        report.failures += 1;
                        if let Some(w) = sep.witness {
                            report.records.push(format!("suite=separation witness: {w}"));
                        }
                    }
                    report
                }
                "inverse-limit" => {
                    let sys = DrSystem::by_name(sys.as_deref().unwrap_or("vls"))?;
                    suites::shift_laws_suite(&sys, samples, 32, seed)?
                }
                "shadow" => {
                    let sys = DrSystem::by_name(sys.as_deref().unwrap_or("vls"))?;
                    let mut report = suites::shadow_suite(&sys, samples.min(500), seed)?;
                    let sweep = suites::probe_sweep_suite(&sys, 6, 50, seed)?;
                    report.records.extend(sweep.records);
                    report.failures += sweep.failures;
                    report
                }
                "lift" => {
                    let sys = DrSystem::by_name(sys.as_deref().unwrap_or("vls"))?;
                    suites::lift_suite(&sys, samples.min(500), seed)?
                }
                "defseq" => {
                    let space = parse_space(space.as_deref().unwrap_or("cantor"))?;
                    let report = ultralim::shadowing::defining_sequence_report(
                        &space,
                        depth.max(1),
                        samples.min(500) as usize,
                        seed,
                    )?;
                    let mut out = suites::SuiteReport {
                        suite: "defseq".into(),
                        records: report.lines(),
                        checks: report.rows.len() as u64,
                        failures: u64::from(!report.pass),
                    };
                    out.records.push(format!(
                        "suite=defseq space={space} verdict={}",
                        if report.pass { "pass" } else { "fail" }
                    ));
                    out
                }
                other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
            };
            for line in &report.records {
                println!("{line}");
            }
            Ok(report.pass())
        }
    }
}
