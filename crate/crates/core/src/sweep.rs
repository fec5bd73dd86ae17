//! Seeded random sweeps over small finite instances.
//!
//! Each instance draws at most six points `k/8` on the line, a self-map and
//! an α from one of several strategies, and rotates ζ through the built-in
//! catalog. An instance *qualifies* when the full Suzuki–ζ–α–Geraghty
//! condition holds, α is triangular α-admissible and a start point with
//! `α(x₁, Tx₁) ≥ 1` exists. The convergence properties are only asserted on
//! qualifying instances; gating monotonicity is asserted on all of them.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::functions::{Beta, CClass, Zeta};
use crate::metric::{AdmissibilityMap, FiniteMetricSpace, SelfMap};
use crate::picard::{check_alpha_chain, fixed_points, iterate, TraceStatus};
use crate::slack::Slack;
use crate::verifier::{check_alpha_admissible, check_uniqueness_hypothesis, verify, ContractionKind, VerifyError};

pub const MAX_POINTS: usize = 6;
const LABEL_DENOMINATOR: usize = 8;
const LABEL_RANGE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    pub seed: u64,
    /// Stop once this many instances qualify.
    pub target_qualifying: usize,
    pub max_instances: usize,
}

impl Default for SweepConfig {
    fn default() -> SweepConfig {
        SweepConfig {
            seed: 0,
            target_qualifying: 200,
            max_instances: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapStrategy {
    /// Every point moves strictly closer to an anchor, which is fixed.
    Collapsing,
    Constant,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaStrategy {
    Ones,
    /// Indicator of a random set closed under `T`.
    InvariantSet,
    /// Indicator of a random set, not necessarily closed.
    RandomSet,
    RandomEntries,
}

const MAP_STRATEGIES: [MapStrategy; 3] = [MapStrategy::Collapsing, MapStrategy::Constant, MapStrategy::Uniform];
const ALPHA_STRATEGIES: [AlphaStrategy; 4] = [
    AlphaStrategy::Ones,
    AlphaStrategy::InvariantSet,
    AlphaStrategy::RandomSet,
    AlphaStrategy::RandomEntries,
];

/// One generated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub labels: Vec<String>,
    pub space: FiniteMetricSpace,
    pub map: SelfMap,
    pub alpha: AdmissibilityMap,
    pub zeta: Zeta,
    pub map_strategy: MapStrategy,
    pub alpha_strategy: AlphaStrategy,
}

/// A property failure, with enough context to rebuild the instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepViolation {
    pub instance: usize,
    pub property: &'static str,
    pub labels: Vec<String>,
    pub map: Vec<usize>,
    pub zeta: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SweepCounts {
    pub instances: usize,
    pub qualifying: usize,
    pub traces: usize,
    /// Positive gaps that failed to strictly decrease.
    pub gap_monotonicity_violations: usize,
    /// Ungated Z-contraction held but the Suzuki-gated version did not.
    pub gating_violations: usize,
    pub alpha_chain_violations: usize,
    /// Admissible starts whose orbit did not reach a fixed point.
    pub convergence_violations: usize,
    /// Uniqueness hypothesis held but the fixed point was not unique.
    pub uniqueness_violations: usize,
    pub z_contraction_holds: usize,
    pub suzuki_z_holds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub counts: SweepCounts,
    /// First few violations of any property, in instance order.
    pub violations: Vec<SweepViolation>,
}

impl SweepReport {
    pub fn all_properties_hold(&self) -> bool {
        let c = &self.counts;
        c.gap_monotonicity_violations == 0
            && c.gating_violations == 0
            && c.alpha_chain_violations == 0
            && c.convergence_violations == 0
            && c.uniqueness_violations == 0
    }
}

const MAX_RECORDED_VIOLATIONS: usize = 16;

fn random_map<R: Rng>(rng: &mut R, space: &FiniteMetricSpace, strategy: MapStrategy) -> SelfMap {
    let n = space.len();
    let table = match strategy {
        MapStrategy::Constant => vec![rng.random_range(0..n); n],
        MapStrategy::Uniform => (0..n).map(|_| rng.random_range(0..n)).collect(),
        MapStrategy::Collapsing => {
            let anchor = rng.random_range(0..n);
            (0..n)
                .map(|x| {
                    let closer: Vec<usize> = (0..n).filter(|&y| space.d(y, anchor) < space.d(x, anchor)).collect();
                    if closer.is_empty() {
                        anchor
                    } else {
                        closer[rng.random_range(0..closer.len())]
                    }
                })
                .collect()
        }
    };
    SelfMap::new(table, n).expect("generated images are in range")
}

fn random_alpha<R: Rng>(rng: &mut R, map: &SelfMap, strategy: AlphaStrategy) -> AdmissibilityMap {
    let n = map.len();
    let random_set = |rng: &mut R| {
        let mut members: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        members[rng.random_range(0..n)] = true;
        members
    };
    match strategy {
        AlphaStrategy::Ones => AdmissibilityMap::constant(n, 1.0),
        AlphaStrategy::RandomSet | AlphaStrategy::InvariantSet => {
            let mut members = random_set(rng);
            if strategy == AlphaStrategy::InvariantSet {
                let mut changed = true;
                while changed {
                    changed = false;
                    for x in 0..n {
                        if members[x] && !members[map.at(x)] {
                            members[map.at(x)] = true;
                            changed = true;
                        }
                    }
                }
            }
            let list: Vec<usize> = (0..n).filter(|&x| members[x]).collect();
            AdmissibilityMap::indicator(n, &list)
        }
        AlphaStrategy::RandomEntries => {
            let values: Vec<f64> = (0..n * n)
                .map(|_| if rng.random_bool(0.6) { 1.0 } else { 0.0 })
                .collect();
            AdmissibilityMap::from_fn(n, |x, y| values[x * n + y]).expect("entries are finite")
        }
    }
}

/// Draws instance number `index`. ζ is chosen by `index`, everything else
/// by `rng`.
pub fn random_instance<R: Rng>(rng: &mut R, index: usize) -> Instance {
    let n = rng.random_range(2..=MAX_POINTS);
    let mut ks = sample(rng, LABEL_RANGE + 1, n).into_vec();
    ks.sort_unstable();
    let labels: Vec<String> = ks.iter().map(|k| format!("{k}/{LABEL_DENOMINATOR}")).collect();
    let space = FiniteMetricSpace::euclidean_labels(&labels).expect("distinct k/8 labels");
    let map_strategy = MAP_STRATEGIES[rng.random_range(0..MAP_STRATEGIES.len())];
    let alpha_strategy = ALPHA_STRATEGIES[rng.random_range(0..ALPHA_STRATEGIES.len())];
    let map = random_map(rng, &space, map_strategy);
    let alpha = random_alpha(rng, &map, alpha_strategy);
    let builtins = Zeta::builtins();
    let zeta = builtins[index % builtins.len()].clone();
    Instance {
        labels,
        space,
        map,
        alpha,
        zeta,
        map_strategy,
        alpha_strategy,
    }
}

struct Recorder<'a> {
    violations: &'a mut Vec<SweepViolation>,
    index: usize,
    instance: &'a Instance,
}

impl Recorder<'_> {
    fn record(&mut self, property: &'static str, detail: String) {
        if self.violations.len() < MAX_RECORDED_VIOLATIONS {
            self.violations.push(SweepViolation {
                instance: self.index,
                property,
                labels: self.instance.labels.clone(),
                map: self.instance.map.table().to_vec(),
                zeta: self.instance.zeta.describe(),
                detail,
            });
        }
    }
}

/// Runs the sweep, with `G = s − t`, `C_G = 0` and `β(t) = 1/(1+t)`
/// throughout.
pub fn run_sweep(config: SweepConfig, slack: Slack) -> Result<SweepReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let g = CClass::difference(0.0).expect("zero threshold is valid");
    let beta = Beta::reciprocal();
    let mut counts = SweepCounts::default();
    let mut violations = Vec::new();

    for index in 0..config.max_instances {
        if counts.qualifying >= config.target_qualifying {
            break;
        }
        let inst = random_instance(&mut rng, index);
        counts.instances += 1;
        let mut rec = Recorder {
            violations: &mut violations,
            index,
            instance: &inst,
        };

        let ungated = verify(
            &inst.space,
            &inst.map,
            None,
            &ContractionKind::ZContraction {
                zeta: inst.zeta.clone(),
            },
            slack,
        )?;
        let gated = verify(
            &inst.space,
            &inst.map,
            None,
            &ContractionKind::SuzukiZ {
                zeta: inst.zeta.clone(),
            },
            slack,
        )?;
        counts.z_contraction_holds += usize::from(ungated.holds);
        counts.suzuki_z_holds += usize::from(gated.holds);
        if ungated.holds && !gated.holds {
            counts.gating_violations += 1;
            rec.record("gating", format!("suzuki-z counterexample {:?}", gated.counterexample));
        }

        let kind = ContractionKind::SuzukiZagGeraghty {
            zeta: inst.zeta.clone(),
            g: g.clone(),
            beta: beta.clone(),
        };
        let report = verify(&inst.space, &inst.map, Some(&inst.alpha), &kind, slack)?;
        let admissibility = check_alpha_admissible(&inst.map, &inst.alpha);
        let starts: Vec<usize> = (0..inst.space.len())
            .filter(|&x| inst.alpha.get(x, inst.map.at(x)) >= 1.0)
            .collect();
        if !(report.holds && admissibility.is_triangular_admissible() && !starts.is_empty()) {
            continue;
        }
        counts.qualifying += 1;

        let fixed = fixed_points(&inst.map);
        if check_uniqueness_hypothesis(&inst.alpha, &fixed) && fixed.len() != 1 {
            counts.uniqueness_violations += 1;
            rec.record("uniqueness", format!("fixed points {fixed:?}"));
        }
        for &start in &starts {
            let trace = iterate(&inst.space, &inst.map, start, inst.space.len() + 1)
                .expect("start is in range and max_iter is positive");
            counts.traces += 1;
            if !trace.diagnostics.positive_gaps_strictly_decreasing {
                counts.gap_monotonicity_violations += 1;
                rec.record("gap-monotonicity", format!("start {start}, gaps {:?}", trace.gaps));
            }
            if !check_alpha_chain(&trace, &inst.alpha) {
                counts.alpha_chain_violations += 1;
                rec.record("alpha-chain", format!("start {start}, iterates {:?}", trace.iterates));
            }
            let converged = trace.status == TraceStatus::FixedPointReached
                && (fixed.len() != 1 || trace.fixed_point == Some(fixed[0]));
            if !converged {
                counts.convergence_violations += 1;
                rec.record("convergence", format!("start {start}, status {:?}", trace.status));
            }
        }
    }

    Ok(SweepReport {
        config,
        counts,
        violations,
    })
}
