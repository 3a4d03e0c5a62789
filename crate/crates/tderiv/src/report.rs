//! Campaign drivers and rendering shared by the CLI and the integration
//! tests: the seeded theorem sweep over one nest, the checker campaigns with
//! constructed positives and random negatives, the contrast-algebra story,
//! and single-instance solves. JSON output is deterministic — keys are
//! sorted by the serializer and scalars are exact strings — and the timing
//! field is attached last so that reports stay byte-comparable once it is
//! stripped.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::apps::{
    gd_zero_product_check, ideal_preserving_check, local_centralizer_check,
    local_derivation_check, solve_derivation_at_zero, solve_generalized_derivation,
    solve_left_centralizer, solve_right_centralizer, solve_two_sided,
    CentralizerVerdict, DerivationAtZeroVerdict, GenDerivationVerdict, IdealVerdict,
    LocalCentralizerVerdict, LocalDerivationVerdict, SandwichVerdict, TwoSidedVerdict,
};
use crate::counterexample as contrast;
use crate::engine::{
    extract_inner, gamma_from, inner_ternary, maps_from_triple, step_identities,
    uniqueness_check, z_report, OpMap, StepReport, ZReport, ZVerdict, ZWitness,
};
use crate::error::{Error, ViolationBundle};
use crate::mat::Mat;
use crate::nest::{AlgElement, NestAlgebra, NestSpec};
use crate::rng::SplitMix64;
use crate::scalar::{FieldMode, Scalar};

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub nest: Vec<usize>,
    pub field: FieldMode,
    pub trials: u64,
    pub seed: u64,
}

impl CampaignConfig {
    pub fn algebra(&self) -> Result<Arc<NestAlgebra>, Error> {
        Ok(Arc::new(NestAlgebra::new(NestSpec::new(self.nest.clone())?)))
    }
}

pub fn element_json(alg: &NestAlgebra, e: &AlgElement) -> Value {
    json!({
        "coords": e.coords.iter().map(Scalar::to_string).collect::<Vec<_>>(),
        "pretty": alg.format_element(e),
    })
}

pub fn witness_json(alg: &NestAlgebra, w: &ZWitness) -> Value {
    json!({
        "index": w.index,
        "a": element_json(alg, &w.pair.a),
        "b": element_json(alg, &w.pair.b),
        "value": element_json(alg, &w.value),
    })
}

/// Parse a map for the algebra from the plain matrix text format (one row
/// per line, entries separated by whitespace).
pub fn parse_map(alg: &Arc<NestAlgebra>, text: &str) -> Result<OpMap, Error> {
    OpMap::from_mat(alg, Mat::parse_text(text)?)
}

fn with_provenance(e: Error, seed: u64, trial: u64) -> Error {
    match e {
        Error::TheoremViolation(mut bundle) => {
            bundle.seed = Some(seed);
            bundle.trial = Some(trial);
            Error::TheoremViolation(bundle)
        }
        other => other,
    }
}

fn campaign_violation(
    context: &str,
    config: &CampaignConfig,
    trial: u64,
    delta: Option<&OpMap>,
    tau: Option<&OpMap>,
    detail: String,
) -> Error {
    Error::violation(ViolationBundle {
        context: context.into(),
        nest: config.nest.clone(),
        field: match config.field {
            FieldMode::Rational => "rational".into(),
            FieldMode::Gaussian => "gaussian".into(),
        },
        seed: Some(config.seed),
        trial: Some(trial),
        delta: delta.map(OpMap::to_json),
        tau: tau.map(OpMap::to_json),
        detail,
    })
}

/// Theorem sweep. Per trial, in fixed draw order from the trial's child
/// seed: three elements (a, b, c) for a generated ternary derivation that
/// must round-trip through extraction, completion, and the uniqueness
/// certificate; then two arbitrary random maps as a control pair whose
/// compatibility must be decided one way or the other.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub config: CampaignConfig,
    pub round_trips: u64,
    pub refuted_controls: u64,
    pub compatible_controls: u64,
}

pub fn run_verify(config: &CampaignConfig) -> Result<VerifyReport, Error> {
    if config.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let alg = config.algebra()?;
    let d = alg.dim();
    let mut round_trips = 0;
    let mut refuted_controls = 0;
    let mut compatible_controls = 0;
    for trial in 0..config.trials {
        let mut rng = SplitMix64::new(SplitMix64::child_seed(config.seed, trial));
        let a = AlgElement { coords: rng.element(d, config.field) };
        let b = AlgElement { coords: rng.element(d, config.field) };
        let c = AlgElement { coords: rng.element(d, config.field) };
        let triple = inner_ternary(&alg, &a, &b, &c);
        let sol = extract_inner(&triple)
            .map_err(|e| with_provenance(e, config.seed, trial))?;
        let rebuilt = maps_from_triple(&alg, &sol.triple);
        if rebuilt != triple {
            return Err(campaign_violation(
                "verify_round_trip",
                config,
                trial,
                Some(&triple.delta),
                Some(&triple.tau),
                "extracted triple does not regenerate the maps".into(),
            ));
        }
        let sum = sol.triple.r.add(&sol.triple.t);
        if sum != triple.delta.at_identity().add(&triple.tau.at_identity()) {
            return Err(campaign_violation(
                "verify_round_trip",
                config,
                trial,
                Some(&triple.delta),
                Some(&triple.tau),
                "R + T != delta(I) + tau(I)".into(),
            ));
        }
        let completed = gamma_from(&triple.delta, &triple.tau)
            .map_err(|e| with_provenance(e, config.seed, trial))?;
        let certified = uniqueness_check(&triple.delta, &triple.tau)
            .map_err(|e| with_provenance(e, config.seed, trial))?;
        if completed != triple.gamma || certified != triple.gamma {
            return Err(campaign_violation(
                "verify_round_trip",
                config,
                trial,
                Some(&triple.delta),
                Some(&triple.tau),
                "completion disagrees with the generated gamma".into(),
            ));
        }
        let steps = step_identities(&triple.delta, &triple.tau)
            .map_err(|e| with_provenance(e, config.seed, trial))?;
        if !steps.all_hold() {
            return Err(campaign_violation(
                "verify_round_trip",
                config,
                trial,
                Some(&triple.delta),
                Some(&triple.tau),
                format!("step trace not fully green: {steps:?}"),
            ));
        }
        round_trips += 1;

        let delta = OpMap::random(&alg, &mut rng, config.field);
        let tau = OpMap::random(&alg, &mut rng, config.field);
        let zr = z_report(&delta, &tau)?;
        match zr.verdict {
            ZVerdict::Refuted => {
                let w = zr.witness.as_ref().expect("refutation carries a witness");
                if !alg.mul(&w.pair.a, &w.pair.b).is_zero() || w.value.is_zero() {
                    return Err(campaign_violation(
                        "verify_control",
                        config,
                        trial,
                        Some(&delta),
                        Some(&tau),
                        "refutation witness fails its own defining checks".into(),
                    ));
                }
                refuted_controls += 1;
            }
            ZVerdict::Holds => compatible_controls += 1,
            ZVerdict::Inconclusive => {
                return Err(campaign_violation(
                    "verify_control",
                    config,
                    trial,
                    Some(&delta),
                    Some(&tau),
                    "infeasible control pair produced no witness".into(),
                ));
            }
        }
    }
    Ok(VerifyReport {
        config: config.clone(),
        round_trips,
        refuted_controls,
        compatible_controls,
    })
}

impl VerifyReport {
    pub fn to_json(&self, timing_ms: Option<u128>) -> Value {
        let mut v = json!({
            "command": "verify",
            "nest": self.config.nest,
            "field": self.config.field,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "round_trips": self.round_trips,
            "refuted_controls": self.refuted_controls,
            "compatible_controls": self.compatible_controls,
        });
        if let Some(ms) = timing_ms {
            v["timing_ms"] = json!(ms as u64);
        }
        v
    }

    pub fn render_text(&self) -> String {
        format!(
            "nest {:?} over {:?}: {} trials from seed {}\n\
             \x20 round trips            {}/{}\n\
             \x20 controls refuted       {}\n\
             \x20 controls compatible    {}\n",
            self.config.nest,
            self.config.field,
            self.config.trials,
            self.config.seed,
            self.round_trips,
            self.config.trials,
            self.refuted_controls,
            self.compatible_controls,
        )
    }
}

pub const CHECKERS: [&str; 9] = [
    "right_centralizer",
    "left_centralizer",
    "two_sided_centralizer",
    "derivation_at_zero",
    "generalized_derivation",
    "local_centralizer",
    "local_derivation",
    "ideal_preserving",
    "sandwich_condition",
];

#[derive(Debug, Clone)]
pub struct CheckerRow {
    pub checker: &'static str,
    pub positives: u64,
    pub positives_ok: u64,
    pub negatives: u64,
    pub negatives_ok: u64,
}

impl CheckerRow {
    pub fn clean(&self) -> bool {
        self.positives_ok == self.positives && self.negatives_ok == self.negatives
    }
}

#[derive(Debug, Clone)]
pub struct CorollariesReport {
    pub config: CampaignConfig,
    pub rows: Vec<CheckerRow>,
}

/// Subtract the right amount in one diagonal column so the map kills the
/// identity; used to build negatives that survive the cheap filters.
fn zero_at_identity(map: &OpMap) -> OpMap {
    let alg = map.alg();
    let w = map.at_identity();
    let j0 = alg.unit_index(0, 0).expect("diagonal");
    let mut fix = Mat::zeros(alg.dim(), alg.dim());
    for (s, v) in w.coords.iter().enumerate() {
        if !v.is_zero() {
            *fix.at_mut(s, j0) = v.clone();
        }
    }
    map.sub(&OpMap::from_mat(alg, fix).expect("square"))
}

/// Run one checker over `trials` constructed positives and `trials` random
/// negatives, all seeded. Positives realize the structured form exactly;
/// negatives are arbitrary maps (for the local-derivation checker, every
/// second negative additionally kills the identity so the refutation has to
/// come from an honest membership failure).
fn run_checker(
    alg: &Arc<NestAlgebra>,
    checker: &'static str,
    config: &CampaignConfig,
    root: u64,
) -> Result<CheckerRow, Error> {
    let d = alg.dim();
    let mut row = CheckerRow {
        checker,
        positives: config.trials,
        positives_ok: 0,
        negatives: config.trials,
        negatives_ok: 0,
    };
    for positive in [true, false] {
        for trial in 0..config.trials {
            let branch = SplitMix64::child_seed(root, u64::from(positive));
            let mut rng = SplitMix64::new(SplitMix64::child_seed(branch, trial));
            let sample_seed = rng.next_u64();
            let rand_elem =
                |rng: &mut SplitMix64| AlgElement { coords: rng.element(d, config.field) };
            let map = if positive {
                match checker {
                    "right_centralizer" | "local_centralizer" | "ideal_preserving" => {
                        OpMap::right_mul(alg, &rand_elem(&mut rng))
                    }
                    "left_centralizer" => OpMap::left_mul(alg, &rand_elem(&mut rng)),
                    "two_sided_centralizer" => {
                        OpMap::identity_map(alg).scale(&rng.scalar(config.field))
                    }
                    "derivation_at_zero" => {
                        let s = rand_elem(&mut rng);
                        let t = s.add(&alg.identity().scale(&rng.scalar(config.field)));
                        OpMap::right_mul(alg, &t).sub(&OpMap::left_mul(alg, &s))
                    }
                    "generalized_derivation" | "sandwich_condition" => {
                        let r = rand_elem(&mut rng);
                        let t = rand_elem(&mut rng);
                        OpMap::left_mul(alg, &r).add(&OpMap::right_mul(alg, &t))
                    }
                    "local_derivation" => {
                        let s = rand_elem(&mut rng);
                        OpMap::right_mul(alg, &s).sub(&OpMap::left_mul(alg, &s))
                    }
                    other => unreachable!("unknown checker {other}"),
                }
            } else {
                let raw = OpMap::random(alg, &mut rng, config.field);
                if checker == "local_derivation" && trial % 2 == 1 {
                    zero_at_identity(&raw)
                } else {
                    raw
                }
            };
            let ok = match checker {
                "right_centralizer" => matches!(
                    solve_right_centralizer(&map)?,
                    CentralizerVerdict::Realized { .. }
                ),
                "left_centralizer" => matches!(
                    solve_left_centralizer(&map)?,
                    CentralizerVerdict::Realized { .. }
                ),
                "two_sided_centralizer" => {
                    matches!(solve_two_sided(&map)?, TwoSidedVerdict::Realized { .. })
                }
                "derivation_at_zero" => matches!(
                    solve_derivation_at_zero(&map)?,
                    DerivationAtZeroVerdict::Realized { .. }
                ),
                "generalized_derivation" => matches!(
                    solve_generalized_derivation(&map)?,
                    GenDerivationVerdict::Realized { .. }
                ),
                "local_centralizer" => matches!(
                    local_centralizer_check(&map, 8, sample_seed)?,
                    LocalCentralizerVerdict::Centralizer { .. }
                ),
                "local_derivation" => matches!(
                    local_derivation_check(&map, 8, sample_seed)?,
                    LocalDerivationVerdict::Derivation
                ),
                "ideal_preserving" => matches!(
                    ideal_preserving_check(&map, 8, sample_seed)?,
                    IdealVerdict::Centralizer { .. }
                ),
                "sandwich_condition" => matches!(
                    gd_zero_product_check(&map, 120, sample_seed)?,
                    SandwichVerdict::Passes { .. }
                ),
                other => unreachable!("unknown checker {other}"),
            };
            // A checker is correct when it accepts positives and rejects
            // negatives.
            if ok == positive {
                if positive {
                    row.positives_ok += 1;
                } else {
                    row.negatives_ok += 1;
                }
            }
        }
    }
    Ok(row)
}

pub fn run_corollaries(config: &CampaignConfig) -> Result<CorollariesReport, Error> {
    if config.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let alg = config.algebra()?;
    let mut rows = Vec::with_capacity(CHECKERS.len());
    for (k, checker) in CHECKERS.iter().enumerate() {
        let root = SplitMix64::child_seed(config.seed, k as u64);
        rows.push(run_checker(&alg, checker, config, root)?);
    }
    Ok(CorollariesReport { config: config.clone(), rows })
}

impl CorollariesReport {
    pub fn all_clean(&self) -> bool {
        self.rows.iter().all(CheckerRow::clean)
    }

    pub fn to_json(&self, timing_ms: Option<u128>) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "checker": r.checker,
                    "positives": r.positives,
                    "positives_ok": r.positives_ok,
                    "negatives": r.negatives,
                    "negatives_ok": r.negatives_ok,
                })
            })
            .collect();
        let mut v = json!({
            "command": "corollaries",
            "nest": self.config.nest,
            "field": self.config.field,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "all_clean": self.all_clean(),
            "rows": rows,
        });
        if let Some(ms) = timing_ms {
            v["timing_ms"] = json!(ms as u64);
        }
        v
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "nest {:?} over {:?}: {} positives and {} negatives per checker, seed {}\n",
            self.config.nest,
            self.config.field,
            self.config.trials,
            self.config.trials,
            self.config.seed,
        );
        for r in &self.rows {
            out.push_str(&format!(
                "  {:<24} positives {:>4}/{:<4} negatives {:>4}/{:<4}\n",
                r.checker, r.positives_ok, r.positives, r.negatives_ok, r.negatives,
            ));
        }
        out.push_str(if self.all_clean() {
            "no misclassifications\n"
        } else {
            "MISCLASSIFICATIONS PRESENT\n"
        });
        out
    }
}

#[derive(Debug)]
pub struct CounterexampleOutcome {
    pub z: contrast::ExampleZReport,
    pub no_completion: contrast::NoCompletionReport,
    pub contrast: contrast::ContrastReport,
    pub census: contrast::CensusReport,
}

impl CounterexampleOutcome {
    pub fn ok(&self) -> bool {
        self.z.holds()
            && self.no_completion.rank_gap() >= 1
            && self.no_completion.forced_values_differ()
            && self.contrast.straight_feasible
            && !self.contrast.crossed_feasible
            && !self.census.any_match
    }

    pub fn to_json(&self, timing_ms: Option<u128>) -> Value {
        let scalars =
            |v: &[Scalar]| v.iter().map(Scalar::to_string).collect::<Vec<_>>();
        let alg = Arc::new(NestAlgebra::new(
            NestSpec::new(vec![1, 2]).expect("smallest nest"),
        ));
        let mut v = json!({
            "command": "counterexample",
            "ok": self.ok(),
            "zero_product_certificate": {
                "defect_equals_sandwich": self.z.defect_equals_sandwich,
                "w_annihilates_radical": self.z.w_annihilates_radical,
                "radical_nilpotent": self.z.radical_nilpotent,
                "sampled_first_factors": self.z.sampled_first_factors,
                "sampled_failures": self.z.sampled_failures,
            },
            "completion_system": {
                "rows": self.no_completion.rows,
                "cols": self.no_completion.cols,
                "rank": self.no_completion.rank,
                "augmented_rank": self.no_completion.augmented_rank,
                "forced_from_right": scalars(&self.no_completion.forced_from_right),
                "forced_from_left": scalars(&self.no_completion.forced_from_left),
            },
            "nest_contrast": {
                "straight_feasible": self.contrast.straight_feasible,
                "straight_triple": self.contrast.straight_triple.as_ref().map(|t| json!({
                    "r": element_json(&alg, &t.r),
                    "s": element_json(&alg, &t.s),
                    "t": element_json(&alg, &t.t),
                })),
                "crossed_feasible": self.contrast.crossed_feasible,
                "crossed_witness": self.contrast.crossed_witness.as_ref()
                    .map(|w| witness_json(&alg, w)),
            },
            "census": {
                "example": {
                    "dim": self.census.example_dim,
                    "center_dim": self.census.example_center_dim,
                    "radical_dim": self.census.example_radical_dim,
                },
                "rows": self.census.rows,
                "any_match": self.census.any_match,
            },
        });
        if let Some(ms) = timing_ms {
            v["timing_ms"] = json!(ms as u64);
        }
        v
    }

    pub fn render_text(&self) -> String {
        let fmt_forced = |v: &[Scalar]| {
            let labels = ["1", "u", "v", "w"];
            let parts: Vec<String> = v
                .iter()
                .zip(labels)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, l)| format!("{c}*{l}"))
                .collect();
            if parts.is_empty() { "0".to_string() } else { parts.join(" + ") }
        };
        format!(
            "contrast algebra: basis (1, u, v, w), u*w = v\n\
             \x20 zero products respected     {}\n\
             \x20 completion system           rank {} vs augmented {} over {} rows\n\
             \x20 forced values at u          {} (through u*1) vs {} (through 1*u)\n\
             \x20 smallest-nest contrast      straight {} / crossed {}\n\
             \x20 census at dimension {}      {} candidate nest(s), match: {}\n\
             overall: {}\n",
            if self.z.holds() { "yes" } else { "NO" },
            self.no_completion.rank,
            self.no_completion.augmented_rank,
            self.no_completion.rows,
            fmt_forced(&self.no_completion.forced_from_right),
            fmt_forced(&self.no_completion.forced_from_left),
            if self.contrast.straight_feasible { "feasible" } else { "INFEASIBLE" },
            if self.contrast.crossed_feasible { "FEASIBLE" } else { "refuted" },
            self.census.example_dim,
            self.census.rows.len(),
            if self.census.any_match { "YES" } else { "none" },
            if self.ok() { "as predicted" } else { "UNEXPECTED" },
        )
    }
}

pub fn run_counterexample(samples_per_stratum: usize, seed: u64) -> Result<CounterexampleOutcome, Error> {
    Ok(CounterexampleOutcome {
        z: contrast::verify_example_z(samples_per_stratum, seed),
        no_completion: contrast::show_no_gamma(),
        contrast: contrast::nest_contrast()?,
        census: contrast::dimension_census(4),
    })
}

#[derive(Debug)]
pub struct SolveOutcome {
    pub nest: Vec<usize>,
    pub z: ZReport,
    pub gamma: Option<OpMap>,
    pub steps: StepReport,
}

pub fn run_solve(delta: &OpMap, tau: &OpMap) -> Result<SolveOutcome, Error> {
    let z = z_report(delta, tau)?;
    let gamma = if z.verdict == ZVerdict::Holds {
        Some(gamma_from(delta, tau)?)
    } else {
        None
    };
    let steps = step_identities(delta, tau)?;
    Ok(SolveOutcome {
        nest: delta.alg().spec().dims().to_vec(),
        z,
        gamma,
        steps,
    })
}

impl SolveOutcome {
    pub fn to_json(&self, alg: &NestAlgebra, timing_ms: Option<u128>) -> Value {
        let triple = self.z.solution.as_ref().map(|sol| {
            json!({
                "r": element_json(alg, &sol.triple.r),
                "s": element_json(alg, &sol.triple.s),
                "t": element_json(alg, &sol.triple.t),
                "center_shifts": sol.center_shifts.iter()
                    .map(|c| element_json(alg, c)).collect::<Vec<_>>(),
            })
        });
        let mut v = json!({
            "command": "solve",
            "nest": self.nest,
            "verdict": self.z.verdict,
            "pairs_checked": self.z.pairs_checked,
            "triple": triple,
            "witness": self.z.witness.as_ref().map(|w| witness_json(alg, w)),
            "gamma": self.gamma.as_ref().map(|g| g.mat().to_string_rows()),
            "steps": {
                "zero_products_respected": self.steps.zero_products_respected,
                "displacement_agreement": self.steps.displacement_agreement,
                "difference_is_derivation": self.steps.difference_is_derivation,
                "difference_is_inner": self.steps.difference_is_inner,
                "witness_s": self.steps.witness_s.as_ref()
                    .map(|s| element_json(alg, s)),
                "reconstruction": self.steps.reconstruction,
                "completion_forms_agree": self.steps.completion_forms_agree,
            },
        });
        if let Some(ms) = timing_ms {
            v["timing_ms"] = json!(ms as u64);
        }
        v
    }

    pub fn render_text(&self, alg: &NestAlgebra) -> String {
        let mut out = format!("nest {:?}: verdict {:?}\n", self.nest, self.z.verdict);
        if let Some(sol) = &self.z.solution {
            out.push_str(&format!(
                "  R = {}\n  S = {}\n  T = {}\n",
                alg.format_element(&sol.triple.r),
                alg.format_element(&sol.triple.s),
                alg.format_element(&sol.triple.t),
            ));
            for c in &sol.center_shifts {
                out.push_str(&format!(
                    "  free central shift: (R - C, S + C, T + C) for C = {}\n",
                    alg.format_element(c)
                ));
            }
        }
        if let Some(w) = &self.z.witness {
            out.push_str(&format!(
                "  witness pair #{}: a = {}, b = {}, defect = {}\n",
                w.index,
                alg.format_element(&w.pair.a),
                alg.format_element(&w.pair.b),
                alg.format_element(&w.value),
            ));
        }
        if let Some(g) = &self.gamma {
            out.push_str("  gamma columns (images of basis units):\n");
            for j in 0..alg.dim() {
                out.push_str(&format!(
                    "    {} -> {}\n",
                    alg.unit_label(j),
                    alg.format_element(&AlgElement { coords: g.mat().col(j) }),
                ));
            }
        }
        out.push_str(&format!(
            "  stages: zero-products {} | displacement {} | difference derivation {} | \
             inner {} | reconstruction {} | forms agree {}\n",
            self.steps.zero_products_respected,
            self.steps.displacement_agreement,
            self.steps.difference_is_derivation,
            self.steps.difference_is_inner,
            self.steps.reconstruction,
            self.steps.completion_forms_agree,
        ));
        out
    }
}
