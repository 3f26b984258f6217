//! Sampling-based verification suites. Each suite runs a family of exact
//! checks (no tolerances: every assertion is an integer comparison on
//! levels) and returns line-delimited structured records plus a verdict.
//! The acceptance tests and the command-line `verify` command both run
//! these.

use rand::Rng;

use crate::error::{Error, Result};
use crate::invlim::{alpha_f, sigma, sigma_hat, ShiftPoint};
use crate::level::Level;
use crate::sampling;
use crate::shadowing::{
    check_lift_claim, lift_pseudo_orbit, make_pseudo_orbit, max_tuple_len,
    partition_shadowing_probe, rho_f_level, shadow_point, u_shadow_check, PartitionSpec,
    Perturbation,
};
use crate::space::BaseSpace;
use crate::systems::{DrSystem, SystemKind};
use crate::words::{w0_distance, W0Distance, WordLen};

/// Outcome of one suite run: structured records (one line each), the number
/// of elementary checks, and the number of failures.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub records: Vec<String>,
    pub checks: u64,
    pub failures: u64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }

    fn push_summary(&mut self, context: &str) {
        self.records.push(format!(
            "suite={} {context} checks={} failures={} verdict={}",
            self.suite,
            self.checks,
            self.failures,
            if self.failures == 0 { "pass" } else { "fail" }
        ));
    }

    fn fail(&mut self, witness: String) {
        self.failures += 1;
        let suite = self.suite.clone();
        self.records.push(format!("suite={suite} verdict=fail witness: {witness}"));
    }
}

/// What the ultrametric suite samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UltrametricTarget {
    /// the chosen metric on `N` and its one-point compactification
    NatInfinityPoints,
    /// the standard Cantor metric
    CantorPoints,
    /// word-space distances over the `vls` base with the frozen pool
    W0WordsCantor,
    /// word-space distances over discrete `N` with the frozen pool
    W0WordsNat,
}

/// Symmetry, identity of indiscernibles, and the level form of the
/// ultrametric inequality `level(x,z) >= min(level(x,y), level(y,z))` on
/// sampled triples. For word targets, distances are bounded scans with the
/// given search bound; the suite also asserts that every distinct pool pair
/// separates within the bound (injectivity of the encoding at desk scale).
pub fn ultrametric_suite(
    target: UltrametricTarget,
    samples: u64,
    bound: u64,
    seed: u64,
) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "ultrametric".into(),
        records: Vec::new(),
        checks: 0,
        failures: 0,
    };
    match target {
        UltrametricTarget::NatInfinityPoints | UltrametricTarget::CantorPoints => {
            let space = match target {
                UltrametricTarget::NatInfinityPoints => BaseSpace::NatDiscrete,
                _ => BaseSpace::CantorFull,
            };
            let mut rng = sampling::rng_from_seed(seed);
            for _ in 0..samples {
                let x = sampling::compactified_point(&mut rng, &space);
                // occasionally force equal points to hit the identity case
                let y = if rng.gen_ratio(1, 8) {
                    x.clone()
                } else {
                    sampling::compactified_point(&mut rng, &space)
                };
                let z = sampling::compactified_point(&mut rng, &space);
                let xy = space.point_distance(&x, &y)?;
                let yx = space.point_distance(&y, &x)?;
                let yz = space.point_distance(&y, &z)?;
                let xz = space.point_distance(&x, &z)?;
                report.checks += 3;
                if xy != yx {
                    report.fail(format!("symmetry x={x} y={y}"));
                }
                if (xy == Level::Infinite) != (x == y) {
                    report.fail(format!("identity x={x} y={y} level={xy}"));
                }
                if xz < xy.min(yz) {
                    report.fail(format!("ultrametric x={x} y={y} z={z}"));
                }
            }
            report.push_summary(&format!("space={space} bound=-"));
        }
        UltrametricTarget::W0WordsCantor | UltrametricTarget::W0WordsNat => {
            let (space, pool) = match target {
                UltrametricTarget::W0WordsCantor => sampling::w0_pool_cantor(),
                _ => sampling::w0_pool_nat(),
            };
            let tables: Vec<Vec<bool>> = pool
                .iter()
                .map(|w| crate::words::alpha_bits(&space, w, bound))
                .collect();
            // level from precomputed tables; None encodes distance zero
            let level_of = |i: usize, k: usize| -> Result<Option<u32>> {
                if pool[i] == pool[k] {
                    return Ok(None);
                }
                match tables[i].iter().zip(&tables[k]).position(|(a, b)| a != b) {
                    Some(j) => Ok(Some(j as u32 + 1)),
                    None => Err(Error::MalformedSequence(format!(
                        "pool words {i} and {k} do not separate within {bound}"
                    ))),
                }
            };
            // injectivity of the encoding on the pool within the bound
            for i in 0..pool.len() {
                for k in i + 1..pool.len() {
                    report.checks += 1;
                    if let Err(e) = level_of(i, k) {
                        report.fail(e.to_string());
                    }
                }
            }
            // consistency of the table route against the scanning route
            let mut rng = sampling::rng_from_seed(seed ^ 0x5eed);
            for _ in 0..24 {
                let i = rng.gen_range(0..pool.len());
                let k = rng.gen_range(0..pool.len());
                let scan = w0_distance(&space, &pool[i], &pool[k], bound);
                let table = match level_of(i, k) {
                    Ok(None) => W0Distance::Resolved(Level::Infinite),
                    Ok(Some(j)) => W0Distance::Resolved(Level::Finite(j)),
                    Err(_) => W0Distance::Indistinguishable { bound },
                };
                report.checks += 1;
                if scan != table {
                    report.fail(format!("route mismatch i={i} k={k} scan={scan} table={table}"));
                }
            }
            let mut rng = sampling::rng_from_seed(seed);
            for _ in 0..samples {
                let i = rng.gen_range(0..pool.len());
                let k = rng.gen_range(0..pool.len());
                let j = rng.gen_range(0..pool.len());
                let (Ok(xy), Ok(yz), Ok(xz)) =
                    (level_of(i, k), level_of(k, j), level_of(i, j))
                else {
                    continue;
                };
                let lvl = |o: Option<u32>| o.map_or(Level::Infinite, Level::Finite);
                report.checks += 2;
                if (xy.is_none()) != (pool[i] == pool[k]) {
                    report.fail(format!("identity words {i},{k}"));
                }
                if lvl(xz) < lvl(xy).min(lvl(yz)) {
                    report.fail(format!("ultrametric words {i},{k},{j}"));
                }
            }
            report.push_summary(&format!("space={space} bound={bound} pool={}", pool.len()));
        }
    }
    Ok(report)
}

/// Ball dichotomy: sampled atoms at each level are equal or disjoint, atoms
/// contain their centers, and points deeper than the radius share the atom.
pub fn ball_dichotomy_suite(
    space: &BaseSpace,
    samples: u64,
    max_level: u32,
    seed: u64,
) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "balls".into(),
        records: Vec::new(),
        checks: 0,
        failures: 0,
    };
    let mut rng = sampling::rng_from_seed(seed);
    for _ in 0..samples {
        let n = rng.gen_range(0..=max_level);
        let x = sampling::space_point(&mut rng, space);
        let y = sampling::space_point(&mut rng, space);
        let ax = space.ball_atom(&x, n)?;
        let ay = space.ball_atom(&y, n)?;
        let level = space.point_distance(&x, &y)?;
        report.checks += 3;
        if !(ax == ay || ax.is_disjoint_from(&ay)?) {
            report.fail(format!("atoms neither equal nor disjoint x={x} y={y} n={n}"));
        }
        if !space.clopen_member(&ax, &x) {
            report.fail(format!("atom misses its center x={x} n={n}"));
        }
        let same = ax == ay;
        if level.distance_below(n) != same {
            report.fail(format!("atom sharing disagrees with level x={x} y={y} n={n}"));
        }
    }
    report.push_summary(&format!("space={space} max_level={max_level}"));
    Ok(report)
}

/// Exact branch contraction and the inverse laws on branches `0..=max_branch`.
pub fn branch_suite(
    sys: &DrSystem,
    samples_per_branch: u64,
    max_branch: u32,
    seed: u64,
) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "branches".into(),
        records: Vec::new(),
        checks: 0,
        failures: 0,
    };
    let mut rng = sampling::rng_from_seed(seed);
    for r in 0..=max_branch {
        let branch = sys.branch(r)?;
        let gain = branch.exact_gain().ok_or_else(|| {
            Error::UnsupportedSystem(format!("{sys} has no exact contraction gains"))
        })?;
        for _ in 0..samples_per_branch {
            let a = sampling::branch_image_point(&mut rng, sys, r);
            let b = sampling::branch_image_point(&mut rng, sys, r);
            let la = sys.base().point_distance(&a, &b)?;
            let ga = branch.inverse(&a)?;
            let gb = branch.inverse(&b)?;
            let lg = sys.base().point_distance(&ga, &gb)?;
            report.checks += 1;
            if lg != la.plus(gain) {
                report.fail(format!(
                    "branch {r}: level(g a, g b) = {lg}, expected level {la} + {gain}"
                ));
            }
            // f(g(y)) = y, including at the added point
            report.checks += 1;
            let back = match branch.forward(&ga) {
                Ok(p) => p,
                Err(e) => {
                    report.fail(format!("branch {r}: forward after inverse failed: {e}"));
                    continue;
                }
            };
            if back != a {
                report.fail(format!("branch {r}: f(g({a})) = {back}"));
            }
        }
        // g(f(x)) = x on sampled domain points of the branch
        for _ in 0..samples_per_branch / 4 + 1 {
            let y = loop {
                let y = sampling::branch_image_point(&mut rng, sys, r);
                if !y.is_infinity() {
                    break y;
                }
            };
            let x = branch.inverse(&y)?;
            report.checks += 1;
            if branch.inverse(&branch.forward(&x)?)? != x {
                report.fail(format!("branch {r}: g(f({x})) differs"));
            }
        }
    }
    report.push_summary(&format!("system={} max_branch={max_branch}", sys.kind()));
    Ok(report)
}

/// Report of a separation-property verification.
#[derive(Debug, Clone)]
pub struct SeparationReport {
    pub records: Vec<String>,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Samples the separation property of a system against its claimed
/// constants: branch homeomorphism laws, uniform contraction at the claimed
/// exponent (exact per-branch gain for the Cantor systems), and the uniform
/// interior radius. Failures carry a witness pair.
pub fn verify_separation(sys: &DrSystem, samples: u64, seed: u64) -> Result<SeparationReport> {
    let theta_gain = sys.theta_gain().ok_or_else(|| {
        Error::UnsupportedSystem(format!("{sys} bundles no separation constants"))
    })?;
    let r_level = sys.r_level().expect("constants come in pairs");
    let mut records = Vec::new();
    let mut pass = true;
    let mut witness = None;
    let mut rng = sampling::rng_from_seed(seed);
    let per_branch = (samples / 9).max(8);
    for r in 0..=8u32 {
        let branch = sys.branch(r)?;
        let mut min_gain: Option<u32> = None;
        let mut a1_ok = true;
        let mut a2_ok = true;
        let mut a3_ok = true;
        for _ in 0..per_branch {
            let a = sampling::branch_image_point(&mut rng, sys, r);
            let b = sampling::branch_image_point(&mut rng, sys, r);
            // A1: homeomorphism laws
            let ga = branch.inverse(&a)?;
            if branch.forward(&ga)? != a {
                a1_ok = false;
                witness.get_or_insert(format!("branch {r}: f(g({a})) != {a}"));
            }
            // A2: uniform contraction at the claimed exponent
            if let Some(observed) = branch.inverse_gain(&a, &b)? {
                min_gain = Some(min_gain.map_or(observed, |g| g.min(observed)));
                if observed < theta_gain {
                    a2_ok = false;
                    witness.get_or_insert(format!(
                        "branch {r}: pair ({a}, {b}) gains {observed} < claimed {theta_gain}"
                    ));
                }
                if let Some(exact) = branch.exact_gain() {
                    if observed != exact {
                        a2_ok = false;
                        witness.get_or_insert(format!(
                            "branch {r}: pair ({a}, {b}) gains {observed} != exact {exact}"
                        ));
                    }
                }
            }
            // A3: the ball of radius 2^-r_level around an image point stays
            // in the image
            let y = &a;
            let z = sampling::compactified_point(&mut rng, sys.base());
            if sys.base().point_distance(y, &z)?.distance_below(r_level)
                && !branch.image_contains(&z)
            {
                a3_ok = false;
                witness.get_or_insert(format!("branch {r}: ball point {z} escapes the image"));
            }
        }
        pass = pass && a1_ok && a2_ok && a3_ok;
        records.push(format!(
            "suite=separation system={} branch={r} pairs={per_branch} min_gain={} claimed={theta_gain} r_level={r_level} a1={} a2={} a3={}",
            sys.kind(),
            min_gain.map_or("-".into(), |g| g.to_string()),
            a1_ok,
            a2_ok,
            a3_ok
        ));
    }
    records.push(format!(
        "suite=separation system={} verdict={}",
        sys.kind(),
        if pass { "pass" } else { "fail" }
    ));
    Ok(SeparationReport { records, pass, witness })
}

/// The shift laws of the inverse limit on sampled points: the prefixing map
/// and the truncated shift are mutually inverse, kinds and lengths move as
/// stated, and infinite samples satisfy the backward-path law to `depth`.
pub fn shift_laws_suite(
    sys: &DrSystem,
    samples: u64,
    depth: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "inverse-limit".into(),
        records: Vec::new(),
        checks: 0,
        failures: 0,
    };
    let mut rng = sampling::rng_from_seed(seed);
    for _ in 0..samples {
        // any sample of length >= 2 feeds the second law; its tail feeds
        // the first (tails always lie in the shift image)
        let q = loop {
            let q = sampling::shift_point(&mut rng, sys);
            if q.len().at_least(2) {
                break q;
            }
        };
        let p = sigma_hat(sys, &q)?;
        report.checks += 2;
        if alpha_f(sys, &p).and_then(|u| sigma_hat(sys, &u).map(|v| v == p)) != Ok(true) {
            report.fail(format!("sigma_hat . alpha_f != id at {p}"));
        }
        if alpha_f(sys, &p).map(|u| u == q) != Ok(true) {
            report.fail(format!("alpha_f . sigma_hat != id at {q}"));
        }
        // kind stability under the shift maps
        report.checks += 1;
        match (&q, &p) {
            (ShiftPoint::Inf(_), ShiftPoint::Inf(_)) | (ShiftPoint::Fin(_), ShiftPoint::Fin(_)) => {}
            _ => report.fail(format!("shift changed the kind of {q}")),
        }
        if let ShiftPoint::Inf(gen) = &q {
            report.checks += 1;
            let coords = gen.coordinates_upto(depth + 1);
            let mut ok = true;
            for t in 0..depth {
                if sys.apply(&coords[t + 1])? != coords[t] {
                    ok = false;
                }
            }
            if !ok {
                report.fail(format!("backward-path law fails at {q}"));
            }
        }
        // length-1 words shift to the zero word
        if let WordLen::Finite(2) = q.len() {
            let one = sigma(sys, &q)?;
            report.checks += 1;
            if sigma(sys, &one)? != ShiftPoint::zero() {
                report.fail(format!("length-1 word does not shift to zero: {one}"));
            }
        }
    }
    report.push_summary(&format!("system={} depth={depth}", sys.kind()));
    Ok(report)
}

/// The constructive shadow contract: the exact orbit of the shadow point
/// tracks every sampled pseudo-orbit one level below its tolerance.
pub fn shadow_suite(sys: &DrSystem, trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "shadow".into(),
        records: Vec::new(),
        checks: 0,
        failures: 0,
    };
    for trial in 0..trials {
        let mut rng = sampling::rng_from_seed(seed ^ (trial << 32));
        let length = rng.gen_range(3..=12);
        let delta_level = rng.gen_range(1..=6);
        let perturbation = match trial % 3 {
            0 => Perturbation::None,
            1 => Perturbation::FlipBit { offset: (trial % 4) as u32 },
            _ => Perturbation::RandomInAtom,
        };
        let po = make_pseudo_orbit(sys, length, delta_level, perturbation, seed ^ trial)?;
        let z = shadow_point(sys, &po)?;
        let mut current = z.clone();
        let mut ok = true;
        for (i, x) in po.points().iter().enumerate() {
            let level = sys.base().point_distance(&current, x)?;
            if !level.distance_at_most(delta_level + 1) {
                ok = false;
            }
            if i + 1 < po.len() {
                current = sys.apply(&current)?;
            }
        }
        report.checks += 2;
        if !ok {
            report.fail(format!("trial {trial}: shadow level bound fails for z={z}"));
        }
        if !u_shadow_check(sys, &z, po.points(), PartitionSpec { radius_level: delta_level })? {
            report.fail(format!("trial {trial}: partition shadow check fails"));
        }
    }
    report.push_summary(&format!("system={}", sys.kind()));
    Ok(report)
}

/// The lift contract: every lifted pseudo-orbit satisfies the membership
/// agreement for all tuple indices up to the level bound, hence consecutive
/// upstairs distances stay below `2^-l`.
pub fn lift_suite(sys: &DrSystem, trials: u64, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "lift".into(),
        records: Vec::new(),
        checks: 0,
        failures: 0,
    };
    for trial in 0..trials {
        let mut rng = sampling::rng_from_seed(seed ^ (trial << 16));
        let level_bound = rng.gen_range(2..=12u64);
        let sep = match rho_f_level(sys, level_bound) {
            Level::Finite(s) => s,
            Level::Infinite => 0,
        };
        let delta_level = sep + 2 + rng.gen_range(0..=2);
        let length = rng.gen_range(3..=8);
        let perturbation =
            if trial % 2 == 0 { Perturbation::RandomInAtom } else { Perturbation::None };
        let po = make_pseudo_orbit(sys, length, delta_level, perturbation, seed ^ trial)?;
        let depth = max_tuple_len(sys.base(), level_bound);
        let lift = lift_pseudo_orbit(sys, &po, level_bound, depth)?;
        report.checks += 2;
        if check_lift_claim(sys, lift.points(), level_bound)?.is_some() {
            report.fail(format!("trial {trial}: membership agreement fails"));
        }
        let mut distances_ok = true;
        for i in 0..lift.points().len() - 1 {
            let up = alpha_f(sys, &lift.points()[i])?;
            let d = crate::invlim::xtilde_distance(sys, &up, &lift.points()[i + 1], level_bound);
            if !d.below(level_bound) {
                distances_ok = false;
            }
        }
        if !distances_ok {
            report.fail(format!("trial {trial}: upstairs distance bound fails"));
        }
    }
    report.push_summary(&format!("system={}", sys.kind()));
    Ok(report)
}

/// Sweep of the partition-shadowing probe: `m = n + theta_gain` suffices
/// for the bundled systems across the requested levels.
pub fn probe_sweep_suite(
    sys: &DrSystem,
    max_n: u32,
    trials_per_level: u32,
    seed: u64,
) -> Result<SuiteReport> {
    let gain = sys.theta_gain().ok_or_else(|| {
        Error::UnsupportedSystem(format!("{sys} bundles no separation constants"))
    })?;
    let mut report = SuiteReport {
        suite: "shadow-probe".into(),
        records: Vec::new(),
        checks: 0,
        failures: 0,
    };
    for n in 1..=max_n {
        let probe = partition_shadowing_probe(sys, n, n + gain, trials_per_level, seed ^ u64::from(n))?;
        report.checks += u64::from(trials_per_level);
        if !probe.pass {
            for rec in probe.records.iter().filter(|r| !r.verdict) {
                report.fail(rec.to_string());
            }
        }
        report.records.push(format!(
            "suite=shadow-probe system={} n={n} m={} trials={trials_per_level} verdict={}",
            sys.kind(),
            n + gain,
            if probe.pass { "pass" } else { "fail" }
        ));
    }
    Ok(report)
}

/// Convergence certificates for the bundled limit-word families.
pub fn limit_witness_suite(sys: &DrSystem, depth: u32) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite: "limits".into(),
        records: Vec::new(),
        checks: 0,
        failures: 0,
    };
    let description = crate::invlim::limit_words(sys)?;
    for (word, family) in &description.members {
        let outcome =
            crate::convergence::check_convergence(sys.base(), family, word, depth)?;
        report.checks += 1;
        if !outcome.is_certificate() {
            report.fail(format!("family for {word}: {outcome}"));
        }
        report.records.push(format!(
            "suite=limits system={} member={word} family=\"{}\" outcome: {outcome}",
            sys.kind(),
            family.describe()
        ));
    }
    report.push_summary(&format!("system={} depth={depth}", sys.kind()));
    Ok(report)
}

/// All bundled systems with point-level dynamics.
pub fn point_systems() -> Vec<DrSystem> {
    [SystemKind::Vls, SystemKind::Frm, SystemKind::Halving, SystemKind::NatIdentity]
        .map(DrSystem::new)
        .to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ultrametric_runs_pass() {
        for target in [
            UltrametricTarget::NatInfinityPoints,
            UltrametricTarget::CantorPoints,
            UltrametricTarget::W0WordsCantor,
            UltrametricTarget::W0WordsNat,
        ] {
            let report = ultrametric_suite(target, 300, 1000, 9).unwrap();
            assert!(report.pass(), "{:?}: {:?}", target, report.records);
        }
    }

    #[test]
    fn separation_negative_control() {
        let sys = DrSystem::new(SystemKind::Vls).claiming_theta_gain(2);
        let report = verify_separation(&sys, 120, 3).unwrap();
        assert!(!report.pass);
        assert!(report.witness.is_some());
    }

    #[test]
    fn shift_laws_small_run() {
        for sys in point_systems() {
            let report = shift_laws_suite(&sys, 60, 16, 4).unwrap();
            assert!(report.pass(), "{}: {:?}", sys.kind(), report.records);
        }
    }
}
