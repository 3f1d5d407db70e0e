//! Exact, exhaustive certification of decodability and demand privacy.
//!
//! Decodability is checked by running place/deliver/decode for every key and
//! demand vector over enumerated or sampled worlds. Privacy is checked per
//! fixed world: the `N^K x N^K` equiprobable `(keys, demands)` pairs are
//! grouped by what user `k` observes (cache, broadcast, own demand) and the
//! conditional distribution of the other users' demands must be exactly
//! uniform within every group. All probability arithmetic is integer counts
//! over equiprobable outcomes; no tolerances anywhere. The joint mutual
//! information is additionally computed in exact form when full world
//! enumeration fits the budget.
//!
//! Per-world tasks are independent; with the `parallel` feature they fan out
//! over a rayon pool, and the `*_seq` entry points always run single-threaded.

mod fixture;

pub use fixture::{run_fixture, FixtureScheme};

use std::collections::HashMap;

use num::BigRational;

use crate::combinatorics::ratio;
use crate::model::{all_vectors, DemandVector, FileLibrary, KeyVector};
use crate::scheme::CachingScheme;
use crate::{Error, Result};

/// How worlds (file libraries) are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorldPolicy {
    /// Every possible library, when `N*P*b` fits the budget.
    Exhaustive,
    /// One seeded world.
    Fixed { seed: u64 },
    /// `count` seeded worlds. The construction's privacy is world-pointwise,
    /// so sampling worlds hunts implementation bugs, not statistical claims.
    Sampled { count: usize, seed: u64 },
}

/// Verification options. `budget_bits` caps exhaustive enumeration.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub policy: WorldPolicy,
    pub budget_bits: usize,
    pub parallel: bool,
    pub max_witnesses: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            policy: WorldPolicy::Sampled { count: 64, seed: 0 },
            budget_bits: crate::model::DEFAULT_ENUM_BUDGET_BITS,
            parallel: cfg!(feature = "parallel"),
            max_witnesses: 16,
        }
    }
}

/// Identifies one world in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorldSpec {
    Index(u64),
    Seed(u64),
}

impl std::fmt::Display for WorldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WorldSpec::Index(i) => write!(f, "world#{i}"),
            WorldSpec::Seed(s) => write!(f, "seed:{s}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecodeWitness {
    pub world: WorldSpec,
    pub keys: Vec<usize>,
    pub demands: Vec<usize>,
    pub user: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct PrivacyWitness {
    pub world: WorldSpec,
    pub user: usize,
    pub own_demand: usize,
    /// Exact conditional distribution of the other demands within the group.
    pub observed: Vec<(Vec<usize>, BigRational)>,
    pub expected: BigRational,
}

/// Exact mutual-information verdict. The exact flag is authoritative; the
/// float is reported alongside for readability.
#[derive(Debug, Clone)]
pub struct MiReport {
    pub exact_zero: bool,
    /// Max over users, in bits.
    pub bits: f64,
    pub per_user_bits: Vec<f64>,
}

/// Outcome of a verification sweep. Empty witness lists mean pass.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub mode: String,
    pub worlds_checked: usize,
    pub pairs_per_world: usize,
    pub decode_failures: Vec<DecodeWitness>,
    pub decode_failure_count: usize,
    pub privacy_violations: Vec<PrivacyWitness>,
    pub privacy_violation_count: usize,
    pub mutual_information: Option<MiReport>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.decode_failure_count == 0
            && self.privacy_violation_count == 0
            && self
                .mutual_information
                .as_ref()
                .is_none_or(|mi| mi.exact_zero)
    }

    /// Merge two partial reports (associative).
    fn absorb(&mut self, other: VerificationReport, max_witnesses: usize) {
        self.worlds_checked += other.worlds_checked;
        self.decode_failure_count += other.decode_failure_count;
        self.privacy_violation_count += other.privacy_violation_count;
        for w in other.decode_failures {
            if self.decode_failures.len() < max_witnesses {
                self.decode_failures.push(w);
            }
        }
        for w in other.privacy_violations {
            if self.privacy_violations.len() < max_witnesses {
                self.privacy_violations.push(w);
            }
        }
    }

    /// Human-readable summary.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "mode={} worlds={} pairs/world={}\n",
            self.mode, self.worlds_checked, self.pairs_per_world
        ));
        out.push_str(&format!(
            "decode failures: {}\nprivacy violations: {}\n",
            self.decode_failure_count, self.privacy_violation_count
        ));
        if let Some(mi) = &self.mutual_information {
            out.push_str(&format!(
                "mutual information: {} ({:.12} bits)\n",
                if mi.exact_zero {
                    "exactly zero"
                } else {
                    "NONZERO"
                },
                mi.bits
            ));
        }
        out.push_str(if self.pass() {
            "verdict: PASS\n"
        } else {
            "verdict: FAIL\n"
        });
        out
    }

    /// Machine-readable witness lines, one per line.
    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for w in &self.decode_failures {
            out.push_str(&format!(
                "decode-failure {} keys={:?} demands={:?} user={} reason={}\n",
                w.world, w.keys, w.demands, w.user, w.reason
            ));
        }
        for w in &self.privacy_violations {
            let obs: Vec<String> = w
                .observed
                .iter()
                .map(|(d, p)| format!("{d:?}:{p}"))
                .collect();
            out.push_str(&format!(
                "privacy-violation {} user={} own_demand={} expected={} observed=[{}]\n",
                w.world,
                w.user,
                w.own_demand,
                w.expected,
                obs.join(" ")
            ));
        }
        out
    }
}

fn empty_report(mode: &str, pairs: usize) -> VerificationReport {
    VerificationReport {
        mode: mode.to_string(),
        worlds_checked: 0,
        pairs_per_world: pairs,
        decode_failures: Vec::new(),
        decode_failure_count: 0,
        privacy_violations: Vec::new(),
        privacy_violation_count: 0,
        mutual_information: None,
    }
}

fn world_specs(
    shape: (usize, usize, usize, usize),
    opts: &VerifyOptions,
) -> Result<(String, Vec<WorldSpec>)> {
    let (n_files, universe, t, b) = shape;
    match opts.policy {
        WorldPolicy::Exhaustive => {
            let p = crate::combinatorics::binomial_usize(universe, t)
                .ok_or_else(|| Error::Overflow(format!("C({universe}, {t})")))?;
            let bits = n_files * p * b;
            if bits > opts.budget_bits {
                return Err(Error::BudgetExceeded {
                    needed: bits,
                    budget: opts.budget_bits,
                });
            }
            Ok((
                "exhaustive-worlds".into(),
                (0..1u64 << bits).map(WorldSpec::Index).collect(),
            ))
        }
        WorldPolicy::Fixed { seed } => Ok(("fixed-world".into(), vec![WorldSpec::Seed(seed)])),
        WorldPolicy::Sampled { count, seed } => Ok((
            "sampled-worlds".into(),
            (0..count as u64)
                .map(|i| WorldSpec::Seed(crate::model::splitmix64(seed.wrapping_add(i))))
                .collect(),
        )),
    }
}

fn build_world(shape: (usize, usize, usize, usize), spec: WorldSpec) -> FileLibrary {
    let (n_files, universe, t, b) = shape;
    match spec {
        WorldSpec::Index(i) => FileLibrary::from_world_index(n_files, universe, t, b, i),
        WorldSpec::Seed(s) => FileLibrary::sample(n_files, universe, t, b, s),
    }
}

fn map_worlds<R, F>(specs: &[WorldSpec], parallel: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(WorldSpec) -> R + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return specs.par_iter().map(|&s| f(s)).collect();
    }
    let _ = parallel;
    specs.iter().map(|&s| f(s)).collect()
}

/// Checks the decoding condition: every user recovers its demanded file
/// bit-for-bit, for every `(keys, demands)` pair over every chosen world.
pub fn check_decodability<S: CachingScheme>(
    scheme: &S,
    shape: (usize, usize, usize, usize),
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let (mode, specs) = world_specs(shape, opts)?;
    let n = scheme.n_files();
    let k = scheme.n_users();
    let pairs = (n as u64).pow(k as u32).pow(2) as usize;

    let partials = map_worlds(&specs, opts.parallel, |spec| {
        let lib = build_world(shape, spec);
        let mut part = empty_report(&mode, pairs);
        part.worlds_checked = 1;
        for s in all_vectors(n, k) {
            let keys = KeyVector(s);
            let caches = scheme.place(&lib, &keys);
            for d in all_vectors(n, k) {
                let demands = DemandVector(d);
                let broadcast = scheme.deliver(&lib, &demands, &keys);
                for user in 1..=k {
                    let verdict = match scheme.decode(user, &caches[user - 1], &broadcast) {
                        Ok(got) if got == lib.file_blocks(demands.0[user - 1]) => None,
                        Ok(_) => Some("wrong file content".to_string()),
                        Err(e) => Some(e.to_string()),
                    };
                    if let Some(reason) = verdict {
                        part.decode_failure_count += 1;
                        if part.decode_failures.len() < opts.max_witnesses {
                            part.decode_failures.push(DecodeWitness {
                                world: spec,
                                keys: keys.0.clone(),
                                demands: demands.0.clone(),
                                user,
                                reason,
                            });
                        }
                    }
                }
            }
        }
        part
    });

    let mut report = empty_report(&mode, pairs);
    for p in partials {
        report.absorb(p, opts.max_witnesses);
    }
    Ok(report)
}

/// Sequential decodability check regardless of features, for benchmarking and
/// cross-checks.
pub fn check_decodability_seq<S: CachingScheme>(
    scheme: &S,
    shape: (usize, usize, usize, usize),
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let mut o = opts.clone();
    o.parallel = false;
    check_decodability(scheme, shape, &o)
}

/// Per-world uniformity check of Lemma 1: conditioned on everything user `k`
/// sees, the other demands are exactly uniform on `[N]^(K-1)`.
pub fn check_privacy_uniform<S: CachingScheme>(
    scheme: &S,
    shape: (usize, usize, usize, usize),
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let (mode, specs) = world_specs(shape, opts)?;
    let n = scheme.n_files();
    let k = scheme.n_users();
    let pairs = (n as u64).pow(k as u32).pow(2) as usize;
    let dminus_total = (n as u64).pow(k as u32 - 1);

    let partials = map_worlds(&specs, opts.parallel, |spec| {
        let lib = build_world(shape, spec);
        let mut part = empty_report(&mode, pairs);
        part.worlds_checked = 1;
        // per user: view digest -> (own demand, counts of the other demands)
        type ViewGroups = HashMap<Vec<u8>, (usize, HashMap<Vec<usize>, u64>)>;
        let mut groups: Vec<ViewGroups> = vec![HashMap::new(); k];
        for s in all_vectors(n, k) {
            let keys = KeyVector(s);
            let caches = scheme.place(&lib, &keys);
            let cache_digests: Vec<Vec<u8>> = caches.iter().map(|c| c.digest()).collect();
            for d in all_vectors(n, k) {
                let demands = DemandVector(d);
                let broadcast = scheme.deliver(&lib, &demands, &keys);
                let bcast_digest = broadcast.digest(n);
                for user in 1..=k {
                    let mut view = cache_digests[user - 1].clone();
                    view.extend_from_slice(&bcast_digest);
                    view.push(demands.0[user - 1] as u8);
                    let entry = groups[user - 1]
                        .entry(view)
                        .or_insert_with(|| (demands.0[user - 1], HashMap::new()));
                    *entry.1.entry(demands.without(user)).or_insert(0) += 1;
                }
            }
        }
        for (user0, user_groups) in groups.into_iter().enumerate() {
            for (_view, (own_demand, counts)) in user_groups {
                let uniform = counts.len() as u64 == dminus_total
                    && counts
                        .values()
                        .all(|&c| c == *counts.values().next().unwrap());
                if !uniform {
                    part.privacy_violation_count += 1;
                    if part.privacy_violations.len() < opts.max_witnesses {
                        let total: u64 = counts.values().sum();
                        let mut observed: Vec<(Vec<usize>, BigRational)> = counts
                            .into_iter()
                            .map(|(dm, c)| (dm, ratio(c as i64, total as i64)))
                            .collect();
                        observed.sort_by(|a, b| a.0.cmp(&b.0));
                        part.privacy_violations.push(PrivacyWitness {
                            world: spec,
                            user: user0 + 1,
                            own_demand,
                            observed,
                            expected: ratio(1, dminus_total as i64),
                        });
                    }
                }
            }
        }
        part
    });

    let mut report = empty_report(&mode, pairs);
    for p in partials {
        report.absorb(p, opts.max_witnesses);
    }
    Ok(report)
}

/// Sequential privacy check regardless of features.
pub fn check_privacy_uniform_seq<S: CachingScheme>(
    scheme: &S,
    shape: (usize, usize, usize, usize),
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let mut o = opts.clone();
    o.parallel = false;
    check_privacy_uniform(scheme, shape, &o)
}

#[derive(Default)]
struct JointCounts {
    joint: HashMap<(Vec<u8>, Vec<usize>), u64>,
    view: HashMap<Vec<u8>, u64>,
    dminus: HashMap<Vec<usize>, u64>,
    total: u64,
}

impl JointCounts {
    fn merge(&mut self, other: JointCounts) {
        for (key, c) in other.joint {
            *self.joint.entry(key).or_insert(0) += c;
        }
        for (key, c) in other.view {
            *self.view.entry(key).or_insert(0) += c;
        }
        for (key, c) in other.dminus {
            *self.dminus.entry(key).or_insert(0) += c;
        }
        self.total += other.total;
    }

    /// Zero mutual information holds exactly iff every joint cell factors.
    /// Checking occupied cells suffices: marginal counts are all positive, so
    /// a missing cell would break the per-view count balance.
    fn exact_zero(&self) -> bool {
        self.joint.iter().all(|((view, dm), &c)| {
            c as u128 * self.total as u128 == self.view[view] as u128 * self.dminus[dm] as u128
        })
    }

    fn bits(&self) -> f64 {
        let t = self.total as f64;
        self.joint
            .iter()
            .map(|((view, dm), &c)| {
                let p = c as f64 / t;
                let pv = self.view[view] as f64 / t;
                let pd = self.dminus[dm] as f64 / t;
                p * (p / (pv * pd)).log2()
            })
            .sum()
    }
}

/// Exact mutual information `I(D_{-k}; Z_k, X, D_k)` over the uniform joint
/// distribution of worlds, keys and demands. Requires full world enumeration
/// within the budget.
pub fn mutual_information<S: CachingScheme>(
    scheme: &S,
    shape: (usize, usize, usize, usize),
    opts: &VerifyOptions,
) -> Result<MiReport> {
    let exhaustive = VerifyOptions {
        policy: WorldPolicy::Exhaustive,
        ..opts.clone()
    };
    let (_, specs) = world_specs(shape, &exhaustive)?;
    let n = scheme.n_files();
    let k = scheme.n_users();

    let partials = map_worlds(&specs, opts.parallel, |spec| {
        let lib = build_world(shape, spec);
        let mut counts: Vec<JointCounts> = (0..k).map(|_| JointCounts::default()).collect();
        for s in all_vectors(n, k) {
            let keys = KeyVector(s);
            let caches = scheme.place(&lib, &keys);
            let cache_digests: Vec<Vec<u8>> = caches.iter().map(|c| c.digest()).collect();
            for d in all_vectors(n, k) {
                let demands = DemandVector(d);
                let broadcast = scheme.deliver(&lib, &demands, &keys);
                let bcast_digest = broadcast.digest(n);
                for user in 1..=k {
                    let mut view = cache_digests[user - 1].clone();
                    view.extend_from_slice(&bcast_digest);
                    view.push(demands.0[user - 1] as u8);
                    let dm = demands.without(user);
                    let jc = &mut counts[user - 1];
                    *jc.joint.entry((view.clone(), dm.clone())).or_insert(0) += 1;
                    *jc.view.entry(view).or_insert(0) += 1;
                    *jc.dminus.entry(dm).or_insert(0) += 1;
                    jc.total += 1;
                }
            }
        }
        counts
    });

    let mut merged: Vec<JointCounts> = (0..k).map(|_| JointCounts::default()).collect();
    for part in partials {
        for (acc, c) in merged.iter_mut().zip(part) {
            acc.merge(c);
        }
    }

    let per_user_bits: Vec<f64> = merged.iter().map(JointCounts::bits).collect();
    let exact_zero = merged.iter().all(JointCounts::exact_zero);
    let bits = per_user_bits.iter().cloned().fold(0.0f64, f64::max);
    Ok(MiReport {
        exact_zero,
        bits,
        per_user_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SchemeParams;
    use crate::scheme::{CleartextDemandScheme, DropBlockScheme, FlipBitScheme, GeneralScheme};

    fn shape_of(p: &SchemeParams) -> (usize, usize, usize, usize) {
        (p.n_files, p.virtual_users(), p.cache_index, p.subfile_bits)
    }

    fn exhaustive() -> VerifyOptions {
        VerifyOptions {
            policy: WorldPolicy::Exhaustive,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn general_scheme_small_instance_passes_everything() {
        let params = SchemeParams::new(2, 2, 1, 1).unwrap();
        let shape = shape_of(&params);
        let scheme = GeneralScheme::new(params);
        let dec = check_decodability(&scheme, shape, &exhaustive()).unwrap();
        assert!(dec.pass());
        assert_eq!(dec.worlds_checked, 256); // 2^(2*4*1)
        let priv_rep = check_privacy_uniform(&scheme, shape, &exhaustive()).unwrap();
        assert!(priv_rep.pass());
        let mi = mutual_information(&scheme, shape, &exhaustive()).unwrap();
        assert!(mi.exact_zero);
        assert!(mi.bits.abs() < 1e-12);
    }

    #[test]
    fn sampled_and_exhaustive_agree_on_verdict() {
        let params = SchemeParams::new(2, 2, 1, 1).unwrap();
        let shape = shape_of(&params);
        let scheme = GeneralScheme::new(params);
        let sampled = VerifyOptions {
            policy: WorldPolicy::Sampled { count: 8, seed: 3 },
            ..VerifyOptions::default()
        };
        let a = check_decodability(&scheme, shape, &exhaustive()).unwrap();
        let b = check_decodability(&scheme, shape, &sampled).unwrap();
        assert_eq!(a.pass(), b.pass());
        let a = check_privacy_uniform(&scheme, shape, &exhaustive()).unwrap();
        let b = check_privacy_uniform(&scheme, shape, &sampled).unwrap();
        assert_eq!(a.pass(), b.pass());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let params = SchemeParams::new(2, 2, 1, 1).unwrap();
        let shape = shape_of(&params);
        let scheme = GeneralScheme::new(params);
        let a = check_decodability(&scheme, shape, &exhaustive()).unwrap();
        let b = check_decodability_seq(&scheme, shape, &exhaustive()).unwrap();
        assert_eq!(a.pass(), b.pass());
        assert_eq!(a.decode_failure_count, b.decode_failure_count);
        let a = check_privacy_uniform(&scheme, shape, &exhaustive()).unwrap();
        let b = check_privacy_uniform_seq(&scheme, shape, &exhaustive()).unwrap();
        assert_eq!(a.privacy_violation_count, b.privacy_violation_count);
    }

    #[test]
    fn budget_enforced() {
        let params = SchemeParams::new(2, 3, 3, 1).unwrap();
        let shape = shape_of(&params);
        let scheme = GeneralScheme::new(params);
        assert!(matches!(
            check_decodability(&scheme, shape, &exhaustive()),
            Err(Error::BudgetExceeded {
                needed: 40,
                budget: 24
            })
        ));
    }

    #[test]
    fn cleartext_header_fails_privacy_with_mass_one() {
        let params = SchemeParams::new(2, 2, 2, 1).unwrap();
        let shape = shape_of(&params);
        let scheme = CleartextDemandScheme::new(params);
        let opts = VerifyOptions {
            policy: WorldPolicy::Fixed { seed: 1 },
            ..VerifyOptions::default()
        };
        let rep = check_privacy_uniform(&scheme, shape, &opts).unwrap();
        assert!(!rep.pass());
        // with demands in the clear each group has a single d_{-k} of mass 1
        let w = &rep.privacy_violations[0];
        assert_eq!(w.observed.len(), 1);
        assert_eq!(w.observed[0].1, ratio(1, 1));
    }

    #[test]
    fn cleartext_header_mi_is_one_bit() {
        let params = SchemeParams::new(2, 2, 2, 1).unwrap();
        let shape = shape_of(&params);
        let scheme = CleartextDemandScheme::new(params);
        let mi = mutual_information(&scheme, shape, &exhaustive()).unwrap();
        assert!(!mi.exact_zero);
        assert!((mi.bits - 1.0).abs() < 1e-9, "got {} bits", mi.bits);
    }

    #[test]
    fn trivial_mi_zero_when_demands_constant() {
        let params = SchemeParams::new(1, 2, 1, 1).unwrap();
        let shape = shape_of(&params);
        let scheme = GeneralScheme::new(params);
        let mi = mutual_information(&scheme, shape, &exhaustive()).unwrap();
        assert!(mi.exact_zero);
        assert_eq!(mi.bits, 0.0);
    }

    #[test]
    fn corrupted_payload_fails_decodability() {
        let params = SchemeParams::new(2, 2, 2, 1).unwrap();
        let shape = shape_of(&params);
        let opts = VerifyOptions {
            policy: WorldPolicy::Fixed { seed: 5 },
            ..VerifyOptions::default()
        };
        let flipped = FlipBitScheme::new(params.clone(), 0);
        let rep = check_decodability(&flipped, shape, &opts).unwrap();
        assert!(rep.decode_failure_count > 0);

        for drop_index in 0..4 {
            let dropped = DropBlockScheme::new(params.clone(), drop_index);
            let rep = check_decodability(&dropped, shape, &opts).unwrap();
            assert!(rep.decode_failure_count > 0, "drop index {drop_index}");
        }
    }
}
