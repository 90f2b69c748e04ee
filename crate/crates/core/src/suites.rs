//! Verification suites: each runs a family of exact checks and returns one
//! [`VerificationReport`] per check.
//!
//! `pass`/`fail` are reserved for exact finite claims. Sampled quantities
//! that only illustrate an asymptotic statement are `report-only`, and
//! checks whose hypotheses do not hold on the given input are
//! `precondition-unmet`.

use crate::analysis::{
    certificate_pool, conv_distance, daug_lower_certificate, daug_profile, daug_upper_estimate, lplus_test,
    rank_one_defect, rank_one_defect_at, slice_search, verify_certificate, AnalysisError, ConvOrder, DaugCertificate, LPlusQuery,
    SliceSpec,
};
use crate::config::RunConfig;
use crate::construction::{
    build_tower, compress, law_of_large_numbers_norm, make_spike, minimal_n, sample_ball, ConstructionError,
    IndependentFamily, SpikeParams, Tower, TowerParams,
};
use crate::measure::{
    best_constant, check_orthogonality, ky_fan, ky_fan_to_zero, tail_measure, ui_delta, worst_set_integral,
    MeasureError, ProductGrid, StepFunction,
};
use crate::rational::{int, one, q, zero, Rational};
use crate::report::{Status, VerificationReport};
use crate::subspace::{SphereNet, Subspace, SubspaceError};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("unknown suite `{0}` (expected one of: {names}, all)", names = Suite::names().join(", "))]
    UnknownSuite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    /// Ky Fan metric axioms, its defining tail inequalities, and the L₁ norm.
    Metric,
    /// `‖f + g‖ ≥ ‖f‖ + ‖g‖ − ε` for `f` small in measure.
    Orthogonality,
    /// The spike, its law of large numbers and independent families.
    Spike,
    /// `d(f, 0) ≤ √ε` for spikes with `‖f − 1‖ ≥ 2 − ε`.
    SpikeDistance,
    /// The three claims of every tower step.
    Stage,
    /// Compression of top-stage balls into the first stage.
    Compression,
    /// The `Daug_n ≥ ½` certificate for `x = −1`, `y = 1`.
    DaugCertificate,
    /// Upper estimates of `Daug_n`, slices and the rank-one defect.
    DaugEstimate,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Metric,
        Suite::Orthogonality,
        Suite::Spike,
        Suite::SpikeDistance,
        Suite::Stage,
        Suite::Compression,
        Suite::DaugCertificate,
        Suite::DaugEstimate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Metric => "kyfan",
            Suite::Orthogonality => "orthogonality",
            Suite::Spike => "spike",
            Suite::SpikeDistance => "spike-distance",
            Suite::Stage => "stage",
            Suite::Compression => "compression",
            Suite::DaugCertificate => "daug-certificate",
            Suite::DaugEstimate => "daug",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Suite::ALL.iter().map(|s| s.name()).collect()
    }

    /// `"all"` selects every suite.
    pub fn parse_selection(s: &str) -> Result<Vec<Suite>, SuiteError> {
        if s == "all" {
            Ok(Suite::ALL.to_vec())
        } else {
            Ok(vec![s.parse()?])
        }
    }

    fn salt(&self) -> u64 {
        (*self as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A file a suite wants written next to its reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutput {
    pub reports: Vec<VerificationReport>,
    pub artifacts: Vec<Artifact>,
}

/// Shared inputs of a run; towers are built once, on first use.
pub struct Context {
    pub config: RunConfig,
    tower: OnceLock<Result<Tower, ConstructionError>>,
    certificate_tower: OnceLock<Result<Tower, ConstructionError>>,
}

impl Context {
    pub fn new(config: RunConfig) -> Self {
        Context {
            config,
            tower: OnceLock::new(),
            certificate_tower: OnceLock::new(),
        }
    }

    pub fn tower(&self) -> Result<&Tower, SuiteError> {
        self.tower
            .get_or_init(|| build_tower(&self.config.tower))
            .as_ref()
            .map_err(|e| e.clone().into())
    }

    pub fn certificate_tower(&self) -> Result<&Tower, SuiteError> {
        self.certificate_tower
            .get_or_init(|| build_tower(&self.config.certificate.tower))
            .as_ref()
            .map_err(|e| e.clone().into())
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed ^ suite.salt())
    }
}

pub fn run_suite(ctx: &Context, suite: Suite) -> Result<SuiteOutput, SuiteError> {
    let mut out = match suite {
        Suite::Metric => metric_suite(ctx),
        Suite::Orthogonality => orthogonality_suite(ctx),
        Suite::Spike => spike_suite(ctx),
        Suite::SpikeDistance => spike_distance_suite(),
        Suite::Stage => stage_suite(ctx),
        Suite::Compression => compression_suite(ctx),
        Suite::DaugCertificate => certificate_suite(ctx),
        Suite::DaugEstimate => estimate_suite(ctx),
    }?;
    for r in &mut out.reports {
        r.suite = suite.name().to_string();
    }
    Ok(out)
}

/// Runs the suites in parallel and returns their outputs ordered by suite
/// name, each in check order.
pub fn run_suites(ctx: &Context, suites: &[Suite]) -> Result<SuiteOutput, SuiteError> {
    let mut sorted = suites.to_vec();
    sorted.sort_by_key(|s| s.name());
    sorted.dedup();
    let outputs: Vec<SuiteOutput> = sorted
        .par_iter()
        .map(|&s| run_suite(ctx, s))
        .collect::<Result<_, _>>()?;
    let mut all = SuiteOutput::default();
    for o in outputs {
        all.reports.extend(o.reports);
        all.artifacts.extend(o.artifacts);
    }
    Ok(all)
}

fn report(anchor: &str, case: impl Into<String>, status: Status) -> VerificationReport {
    VerificationReport::new("", anchor, case, status)
}

/// Tally of a property over many random instances.
fn tally(anchor: &str, case: &str, checked: usize, failures: &[usize], seed: u64) -> VerificationReport {
    let mut r = report(anchor, case, Status::from_bool(failures.is_empty()))
        .text("checked", checked)
        .text("failures", failures.len())
        .with_seed(seed);
    if let Some(first) = failures.first() {
        r = r.note(format!("first failing instance: {first}"));
    }
    r
}

fn failures(flags: &[bool]) -> Vec<usize> {
    flags.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i).collect()
}

/// A random step function on one or two of the coordinates `1..=3`, with
/// breakpoints in `(1/8)ℤ` and values in `(1/4)ℤ ∩ [−2, 2]`.
pub fn random_step<R: Rng>(rng: &mut R) -> StepFunction {
    let mut coords = vec![1u32, 2, 3];
    coords.shuffle(rng);
    coords.truncate(rng.gen_range(1..=2));
    let breaks: Vec<Vec<Rational>> = coords
        .iter()
        .map(|_| {
            let mut inner: Vec<i64> = (1..8).collect();
            inner.shuffle(rng);
            inner.truncate(rng.gen_range(0..=2));
            inner.sort_unstable();
            std::iter::once(0)
                .chain(inner)
                .chain(std::iter::once(8))
                .map(|k| q(k, 8))
                .collect()
        })
        .collect();
    let grid = ProductGrid::new(coords, breaks).expect("valid random grid");
    let values = (0..grid.cell_count()).map(|_| q(rng.gen_range(-8..=8), 4)).collect();
    StepFunction::new(grid, values).expect("values match grid")
}

fn metric_suite(ctx: &Context) -> Result<SuiteOutput, SuiteError> {
    let seed = ctx.config.seed;
    let mut rng = ctx.rng(Suite::Metric);
    let triples: Vec<[StepFunction; 3]> = (0..ctx.config.samples.metric_triples)
        .map(|_| [random_step(&mut rng), random_step(&mut rng), random_step(&mut rng)])
        .collect();
    let etas = [q(1, 1000), q(1, 100), q(1, 10)];
    let c = q(-3, 2);
    let checks: Vec<[bool; 8]> = triples
        .par_iter()
        .map(|[f, g, h]| -> Result<[bool; 8], MeasureError> {
            let fg = ky_fan(f, g)?;
            let gf = ky_fan(g, f)?;
            let gh = ky_fan(g, h)?;
            let fh = ky_fan(f, h)?;
            let diff = f.sub(g)?;
            let identity = ky_fan(f, f)?.is_zero() && (fg.is_zero() == (f == g));
            let above = etas.iter().all(|e| tail_measure(&diff, &(&fg + e)) <= &fg + e);
            let below = fg.is_zero()
                || etas
                    .iter()
                    .filter(|e| **e < fg)
                    .all(|e| tail_measure(&diff, &(&fg - e)) > &fg - e);
            let norm_triangle = f.add(g)?.norm_l1() <= f.norm_l1() + g.norm_l1();
            let homogeneous = f.scale(&c).norm_l1() == c.abs() * f.norm_l1();
            let (rf, rg) = StepFunction::refine(f, g)?;
            let refined = rf.norm_l1() == f.norm_l1() && rf.integral() == f.integral() && rg.integral() == g.integral();
            let budgets = [q(1, 8), q(1, 4), q(1, 2), q(3, 4), one()];
            let w: Vec<Rational> = budgets
                .iter()
                .map(|b| worst_set_integral(f, b))
                .collect::<Result<_, _>>()?;
            let worst_set = w.windows(2).all(|p| p[0] <= p[1])
                && w[4] == f.norm_l1()
                && (0..4).all(|i| {
                    // Concavity between consecutive sampled budgets.
                    let (b0, b1) = (&budgets[i], &budgets[i + 1]);
                    let mid = (b0 + b1) * q(1, 2);
                    let wm = worst_set_integral(f, &mid).expect("budget in range");
                    wm * int(2) >= &w[i] + &w[i + 1]
                });
            Ok([fg == gf, fh <= &fg + &gh, identity, above && below, norm_triangle, homogeneous, refined, worst_set])
        })
        .collect::<Result<_, _>>()?;
    let n = checks.len();
    let col = |i: usize| failures(&checks.iter().map(|c| c[i]).collect::<Vec<_>>());
    let reports = vec![
        tally("ky-fan-metric", "symmetry", n, &col(0), seed),
        tally("ky-fan-metric", "triangle", n, &col(1), seed),
        tally("ky-fan-metric", "identity", n, &col(2), seed),
        tally("ky-fan-infimum", "tail-inequalities", n, &col(3), seed),
        tally("l1-norm", "triangle", n, &col(4), seed),
        tally("l1-norm", "homogeneity", n, &col(5), seed),
        tally("refinement", "norm-and-integral", n, &col(6), seed),
        tally("worst-set-integral", "monotone-concave-total", n, &col(7), seed),
    ];
    Ok(SuiteOutput {
        reports,
        artifacts: Vec::new(),
    })
}

/// A fixed three-dimensional ball for the random `g`.
fn orthogonality_space() -> Result<Subspace, SuiteError> {
    Ok(Subspace::new(vec![
        StepFunction::one(),
        StepFunction::interval(1, zero(), q(1, 2), one())?,
        StepFunction::on_coordinate(2, vec![zero(), q(1, 4), one()], vec![int(2), int(-1)])?,
    ])?)
}

fn orthogonality_suite(ctx: &Context) -> Result<SuiteOutput, SuiteError> {
    let seed = ctx.config.seed;
    let mut reports = Vec::new();
    let one_f = StepFunction::one();
    let zero_check = check_orthogonality(&StepFunction::zero(), &one_f, &q(1, 4), &ui_delta(&[one_f.clone()], &q(1, 4))?)?;
    reports.push(zero_check.to_report("", "f=0"));
    let spike = StepFunction::interval(1, zero(), q(1, 32), int(32))?;
    let half = q(1, 2);
    let spike_check = check_orthogonality(&spike, &one_f, &half, &ui_delta(&[one_f.clone()], &half)?)?;
    reports.push(spike_check.to_report("", "spike-against-one"));

    let space = orthogonality_space()?;
    let mut rng = ctx.rng(Suite::Orthogonality);
    let trials: Vec<(StepFunction, Rational, u32, Rational, Rational, Rational)> = (0..ctx.config.samples.orthogonality_trials)
        .map(|_| {
            let g = space.combine(&sample_ball(&space, &mut rng, 12)).expect("dimension matches");
            let eps = q(rng.gen_range(1..=8), 16);
            let coord = *[1u32, 2, 7].choose(&mut rng).expect("nonempty");
            let mass = q(rng.gen_range(1..=4), 8);
            let height = q(rng.gen_range(-16..=16), 2);
            let floor = q(rng.gen_range(-3..=3), 8);
            (g, eps, coord, mass, height, floor)
        })
        .collect();
    let checked: Vec<VerificationReport> = trials
        .par_iter()
        .enumerate()
        .map(|(i, (g, eps, coord, mass, height, floor))| -> Result<VerificationReport, SuiteError> {
            let delta = ui_delta(std::slice::from_ref(g), eps)?;
            // Support mass ≤ δ/2 and |f| < δ/2 off the support: d(f, 0) ≤ δ/2.
            let m = &delta * mass;
            let f = StepFunction::on_coordinate(*coord, vec![zero(), m, one()], vec![height.clone(), &delta * floor])?;
            Ok(check_orthogonality(&f, g, eps, &delta)?.to_report("", format!("trial {i}")).with_seed(seed))
        })
        .collect::<Result<_, _>>()?;
    reports.extend(checked);
    Ok(SuiteOutput {
        reports,
        artifacts: Vec::new(),
    })
}

/// `Σ_k P(S_n = k)·|k/(nδ) − 1|` with the distribution of `S_n` built by
/// convolving Bernoulli(δ) laws, independently of the closed binomial form.
pub fn law_by_convolution(delta: &Rational, n: usize) -> Rational {
    let mut dist = vec![one()];
    for _ in 0..n {
        let mut next = vec![zero(); dist.len() + 1];
        for (k, p) in dist.iter().enumerate() {
            next[k] += p * (one() - delta);
            next[k + 1] += p * delta;
        }
        dist = next;
    }
    let nd = delta * int(n as i64);
    dist.iter()
        .enumerate()
        .map(|(k, p)| p * (int(k as i64) / &nd - one()).abs())
        .sum()
}

/// `‖n⁻¹ Σ_j f_j − 1‖` on the materialised `2ⁿ`-cell family.
pub fn law_by_tensor(delta: &Rational, n: usize) -> Result<Rational, SuiteError> {
    let fam = IndependentFamily::new(1, n, delta.clone())?;
    let w = vec![q(1, n as i64); n];
    Ok(StepFunction::lin_comb(&w, &fam.members)?.shift(&one()).norm_l1())
}

fn spike_suite(ctx: &Context) -> Result<SuiteOutput, SuiteError> {
    let mut reports = Vec::new();
    for eps in [q(1, 4), q(1, 10), q(1, 2), q(3, 4), q(99, 100)] {
        let params = SpikeParams::new(eps.clone(), 1)?;
        let f = make_spike(&params);
        let norm = f.norm_l1();
        let gap = f.shift(&one()).norm_l1();
        let target = int(2) - &eps;
        let nonneg = f.values().iter().all(|v| !v.is_negative());
        let ok = nonneg && norm == one() && gap == int(2) - &params.delta * int(2) && gap >= target;
        reports.push(
            report("spike-shape", format!("eps={eps}"), Status::from_bool(ok))
                .q("delta", &params.delta)
                .q("norm_f", &norm)
                .q("norm_f_minus_one", &gap)
                .q("two_minus_eps", &target),
        );
    }

    let base = law_of_large_numbers_norm(&q(1, 2), 4);
    reports.push(report("law-of-large-numbers", "delta=1/2 n=4", Status::from_bool(base == q(3, 8))).q("value", &base));
    for delta in [q(1, 4), q(1, 2), q(3, 8)] {
        let v = law_of_large_numbers_norm(&delta, 1);
        let expected = int(2) - &delta * int(2);
        reports.push(
            report("law-of-large-numbers", format!("delta={delta} n=1"), Status::from_bool(v == expected)).q("value", &v),
        );
    }
    let ns = [4usize, 8, 16, 32, 64];
    let values: Vec<Rational> = ns.iter().map(|&n| law_of_large_numbers_norm(&q(1, 2), n)).collect();
    let mut r = report(
        "law-of-large-numbers",
        "delta=1/2 strictly decreasing",
        Status::from_bool(values.windows(2).all(|w| w[1] < w[0])),
    );
    for (n, v) in ns.iter().zip(&values) {
        r = r.q(&format!("n={n}"), v);
    }
    reports.push(r);
    for delta in [q(1, 4), q(1, 2)] {
        let mismatches: Vec<usize> = (1..=10)
            .filter(|&n| {
                let closed = law_of_large_numbers_norm(&delta, n);
                law_by_tensor(&delta, n).map_or(true, |t| t != closed) || law_by_convolution(&delta, n) != closed
            })
            .collect();
        let mut r = report(
            "law-of-large-numbers",
            format!("delta={delta} closed form vs tensor, n<=10"),
            Status::from_bool(mismatches.is_empty()),
        )
        .text("checked", 10)
        .text("mismatches", mismatches.len());
        if let Some(n) = mismatches.first() {
            r = r.note(format!("first mismatch at n = {n}"));
        }
        reports.push(r);
    }

    for (delta, eps, expected) in [(q(1, 2), q(3, 8), Some(4)), (q(1, 2), one(), Some(1)), (q(1, 4), q(1, 4), None)] {
        let n = minimal_n(&delta, &eps, 4096)?;
        let oracle_ok = law_by_convolution(&delta, n) <= eps && (n == 1 || law_by_convolution(&delta, n - 1) > eps);
        let ok = oracle_ok && expected.map_or(true, |e| e == n);
        reports.push(
            report("minimal-family-size", format!("delta={delta} eps={eps}"), Status::from_bool(ok))
                .text("n", n)
                .q("value_at_n", &law_of_large_numbers_norm(&delta, n)),
        );
    }

    for (n, delta) in [(2usize, q(1, 2)), (3, q(1, 4)), (4, q(1, 8))] {
        let fam = IndependentFamily::new(1, n, delta.clone())?;
        let unit = fam.members.iter().all(|f| f.norm_l1() == one());
        let all_mass = fam.members.iter().fold(StepFunction::one(), |acc, f| {
            acc.mul(&f.scale(&delta)).expect("same coordinate")
        });
        let joint = all_mass.integral();
        let ok = unit && fam.is_jointly_independent() && joint == num_traits::pow(delta.clone(), n);
        reports.push(
            report("independent-family", format!("n={n} delta={delta}"), Status::from_bool(ok))
                .text("cells", 1usize << n)
                .q("joint_mass", &joint),
        );
    }

    reports.push(span_sampling(ctx)?);
    Ok(SuiteOutput {
        reports,
        artifacts: Vec::new(),
    })
}

/// How often a random unit element of the span of independent spikes has a
/// constant within `ε` in the Ky Fan metric. Sampled, so report-only.
fn span_sampling(ctx: &Context) -> Result<VerificationReport, SuiteError> {
    let eps = q(1, 4);
    let params = SpikeParams::new(eps.clone(), 1)?;
    let fam = IndependentFamily::new(1, 4, params.delta.clone())?;
    let space = Subspace::new(fam.members.clone())?;
    let mut rng = ctx.rng(Suite::Spike);
    let samples: Vec<Vec<Rational>> = (0..ctx.config.samples.spike_span_samples)
        .map(|_| space.sample_unit(&mut rng, 16))
        .collect();
    let distances: Vec<Rational> = samples
        .par_iter()
        .map(|a| space.combine(a).map(|g| best_constant(&g, None).distance))
        .collect::<Result<_, _>>()?;
    let hits = distances.iter().filter(|d| **d <= eps).count();
    let worst = distances.iter().max().cloned().unwrap_or_else(zero);
    let fraction = if samples.is_empty() {
        zero()
    } else {
        q(hits as i64, samples.len() as i64)
    };
    Ok(report("spike-span-constants", "n=4 eps=1/4", Status::ReportOnly)
        .text("samples", samples.len())
        .text("within_eps", hits)
        .q("fraction", &fraction)
        .q("worst_distance", &worst)
        .with_seed(ctx.config.seed))
}

fn spike_distance_suite() -> Result<SuiteOutput, SuiteError> {
    let mut reports = Vec::new();
    for eps in [q(1, 4), q(1, 10), q(1, 2), q(3, 4), q(1, 100)] {
        let params = SpikeParams::new(eps.clone(), 2)?;
        let d = ky_fan_to_zero(&make_spike(&params));
        let ok = d == params.delta && crate::rational::le_sqrt(&d, &eps);
        reports.push(
            report("spike-distance-bound", format!("eps={eps}"), Status::from_bool(ok))
                .q("ky_fan_f_0", &d)
                .q("eps", &eps),
        );
    }
    Ok(SuiteOutput {
        reports,
        artifacts: Vec::new(),
    })
}

fn single_stage_report(tower: &Tower) -> Option<VerificationReport> {
    (tower.stages.len() < 2).then(|| {
        report("stage-claims", "tower", Status::PreconditionUnmet).note("the tower has a single stage; nothing to check")
    })
}

fn stage_suite(ctx: &Context) -> Result<SuiteOutput, SuiteError> {
    let tower = ctx.tower()?;
    let mut reports: Vec<VerificationReport> = single_stage_report(tower).into_iter().collect();
    for w in tower.stages.windows(2) {
        let prefix = w[1].space.basis().starts_with(w[0].space.basis());
        reports.push(
            report("stage-nesting", format!("stage={}", w[0].index), Status::from_bool(prefix))
                .text("dim", w[0].space.dim())
                .text("next_dim", w[1].space.dim()),
        );
    }
    for s in &tower.stages {
        reports.push(
            report("tail-sum", format!("stage={}", s.index), Status::from_bool(tower.params.tail_condition_holds(s.index)))
                .q("eps", &s.eps)
                .q("tail_sum", &tower.params.tail_sum(s.index)),
        );
    }
    for s in &tower.stages {
        let Some(step) = &s.step else { continue };
        let target = int(2) - &step.eps;
        for (k, fam) in step.families.iter().enumerate() {
            reports.push(
                report("stage-independence", format!("stage={} k={}", s.index, k + 1), Status::from_bool(fam.is_jointly_independent()))
                    .text("coordinate", fam.coordinate)
                    .text("n", fam.n)
                    .q("delta", &fam.delta),
            );
            let gap = &step.average_gaps[k];
            let holds = *gap == step.law_norm && *gap <= step.eps;
            let status = if step.averaging_enforced {
                Status::from_bool(holds)
            } else {
                Status::ReportOnly
            };
            let mut r = report("stage-averaging", format!("stage={} k={}", s.index, k + 1), status)
                .q("gap", gap)
                .q("law_norm", &step.law_norm)
                .q("eps", &step.eps);
            if !step.averaging_enforced {
                r = r.note("family size fixed by configuration; the averaging bound is recorded, not required");
            }
            reports.push(r);
            for (j, (v, b)) in step.bush[k].iter().zip(&step.sphere_bounds[k]).enumerate() {
                let norm = v.norm_l1();
                let ok = norm == one() && b.bound >= target;
                reports.push(
                    report("stage-diametral", format!("stage={} k={} j={}", s.index, k + 1, j + 1), Status::from_bool(ok))
                        .q("norm_v", &norm)
                        .q("net_min", &b.net_min)
                        .q("mesh", &b.mesh)
                        .q("certified_bound", &b.bound)
                        .q("two_minus_eps", &target),
                );
            }
        }
        reports.push(
            report("stage-parameters", format!("stage={}", s.index), Status::ReportOnly)
                .q("inner_eps", &step.inner_eps)
                .q("delta", &step.delta)
                .text("n", step.n)
                .text("families", step.families.len())
                .text("rejected_rungs", step.rejected_rungs),
        );
    }
    reports.extend(later_bush_reports(tower)?);
    Ok(SuiteOutput {
        reports,
        artifacts: Vec::new(),
    })
}

/// Every bush vector added after stage `N` lies in `l⁺(u, ε_N)` for every
/// point `u` of the stage-`N` net.
fn later_bush_reports(tower: &Tower) -> Result<Vec<VerificationReport>, SuiteError> {
    let bush = tower.bush_vectors();
    let mut out = Vec::new();
    for s in &tower.stages {
        let Some(net) = &s.net else { continue };
        let later: Vec<&StepFunction> = bush.iter().filter(|((st, _, _), _)| *st >= s.index).map(|(_, v)| *v).collect();
        let flags: Vec<bool> = net
            .points
            .par_iter()
            .map(|p| -> Result<Vec<bool>, SuiteError> {
                let u = s.space.combine(p)?;
                let query = LPlusQuery::new(u, s.eps.clone())?;
                later.iter().map(|v| Ok(lplus_test(&query, v)?)).collect()
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();
        let bad = failures(&flags);
        out.push(
            report("later-bush-in-lplus", format!("stage={}", s.index), Status::from_bool(bad.is_empty()))
                .text("net_points", net.len())
                .text("bush_vectors", later.len())
                .text("failures", bad.len()),
        );
    }
    Ok(out)
}

fn compression_suite(ctx: &Context) -> Result<SuiteOutput, SuiteError> {
    let tower = ctx.tower()?;
    let params = &tower.params;
    let mut reports: Vec<VerificationReport> = single_stage_report(tower).into_iter().collect();
    for from in 2..=params.max_stage.max(3) {
        let bound = params.chain_bound(from, 1);
        reports.push(
            report("chain-bound", format!("from={from} to=1"), Status::from_bool(bound < params.eps1))
                .q("chain_bound", &bound)
                .q("eps1", &params.eps1),
        );
    }
    if tower.stages.len() >= 2 {
        reports.extend(compress_samples(ctx, tower, ctx.rng(Suite::Compression))?);
    }
    let deeper = TowerParams {
        max_stage: params.max_stage + 1,
        ..params.clone()
    };
    match build_tower(&deeper) {
        Ok(t) => reports.extend(compress_samples(ctx, &t, ctx.rng(Suite::Compression))?),
        Err(e) => reports.push(
            report("compression", format!("from={} to=1", deeper.max_stage), Status::PreconditionUnmet)
                .note(format!("a tower with {} stages does not fit: {e}", deeper.max_stage)),
        ),
    }
    Ok(SuiteOutput {
        reports,
        artifacts: Vec::new(),
    })
}

fn compress_samples(ctx: &Context, tower: &Tower, mut rng: ChaCha8Rng) -> Result<Vec<VerificationReport>, SuiteError> {
    let top = tower.top();
    let samples: Vec<Vec<Rational>> = (0..ctx.config.samples.compression_samples)
        .map(|_| sample_ball(&top.space, &mut rng, 12))
        .collect();
    let reports = samples
        .par_iter()
        .enumerate()
        .map(|(i, a)| -> Result<VerificationReport, SuiteError> {
            let c = compress(tower, a, top.index, 1)?;
            let mut r = report("compression", format!("from={} to=1 sample {i}", top.index), Status::from_bool(c.holds()))
                .q("distance", &c.distance)
                .q("target", &c.target)
                .q("chain_bound", &c.chain_bound)
                .q("result_norm", &c.result_norm)
                .text("step_shortfalls", c.shortfalls())
                .with_seed(ctx.config.seed);
            if c.shortfalls() > 0 {
                r = r.note("an intermediate step missed its per-step bound; the final distance decides");
            }
            Ok(r)
        })
        .collect::<Result<_, _>>()?;
    Ok(reports)
}

fn certificate_report(cert: &DaugCertificate, case: &str) -> VerificationReport {
    let members: Vec<&_> = cert.candidates.iter().filter(|c| c.member).collect();
    let max_alpha = members
        .iter()
        .filter_map(|c| c.constant.as_ref().map(|a| a.alpha.clone()))
        .max()
        .unwrap_or_else(zero);
    let min_distance = cert.combinations.iter().map(|c| c.distance.clone()).min().unwrap_or_else(zero);
    report("daug-lower-bound", case, Status::from_bool(cert.passed))
        .text("n", cert.n)
        .q("eps1", &cert.eps1)
        .q("lplus_eps", &cert.lplus_eps)
        .q("lower_bound", &cert.lower_bound)
        .text("candidates", cert.candidates.len())
        .text("members", members.len())
        .text("combinations", cert.combinations.len())
        .text("hulls", cert.hulls.len())
        .q("max_alpha", &max_alpha)
        .q("min_audited_distance", &min_distance)
        .q("hull_minimum", &cert.hull_minimum)
        .q("threshold_lhs", &cert.threshold.lhs)
}

fn certificate_suite(ctx: &Context) -> Result<SuiteOutput, SuiteError> {
    let tower = ctx.certificate_tower()?;
    let n = ctx.config.certificate.n;
    let mut out = SuiteOutput::default();
    match daug_lower_certificate(tower, n) {
        Ok(cert) => {
            out.reports.push(certificate_report(&cert, &format!("stage={} n={n}", cert.stage)));
            let json = cert.to_json();
            let reparsed = DaugCertificate::from_json(&json)?;
            let check = verify_certificate(&reparsed);
            let mut r = report("daug-lower-bound", "re-verified from serialized form", Status::from_bool(check.passed() == cert.passed));
            for p in check.problems.iter().take(5) {
                r = r.note(p.clone());
            }
            out.reports.push(r);
            out.artifacts.push(Artifact {
                name: format!("certificate-n{n}.json"),
                contents: json,
            });
        }
        Err(AnalysisError::Precondition(why)) => {
            out.reports.push(report("daug-lower-bound", format!("n={n}"), Status::PreconditionUnmet).note(why));
        }
        Err(e) => return Err(e.into()),
    }
    // The guarded path: the smallest order for which this ε₁ is too large.
    let eps1 = &tower.params.eps1;
    let guarded = (one() / (eps1 * int(25))).floor().to_integer().try_into().unwrap_or(0usize) + 1;
    match daug_lower_certificate(tower, guarded) {
        Err(AnalysisError::Precondition(why)) => {
            out.reports.push(report("daug-lower-bound", format!("n={guarded}"), Status::PreconditionUnmet).note(why))
        }
        Ok(cert) => out.reports.push(certificate_report(&cert, &format!("n={guarded}"))),
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn estimate_suite(ctx: &Context) -> Result<SuiteOutput, SuiteError> {
    let tower = ctx.tower()?;
    let mut reports: Vec<VerificationReport> = single_stage_report(tower).into_iter().collect();
    if tower.stages.len() < 2 {
        return Ok(SuiteOutput {
            reports,
            artifacts: Vec::new(),
        });
    }
    let eps = tower.params.eps(1);
    let minus_one = StepFunction::one().neg();
    let query = LPlusQuery::new(minus_one, eps.clone())?;
    let y = StepFunction::one();
    let mut pool = Vec::new();
    for (_, z) in certificate_pool(tower)? {
        if lplus_test(&query, &z)? {
            pool.push(z);
        }
        if pool.len() == 8 {
            break;
        }
    }
    let orders = [1usize, 2, 4, 8];
    let pools: Vec<(usize, Vec<StepFunction>)> = orders.iter().map(|&n| (n, pool.clone())).collect();
    let profile = daug_profile(&query, &y, &pools)?;
    let monotone = profile.windows(2).all(|w| w[1].1.upper <= w[0].1.upper);
    let mut r = report("daug-monotone", "x=-1 y=1", Status::from_bool(monotone)).text("pool", pool.len());
    for (n, d) in &profile {
        r = r.q(&format!("n={n} upper"), &d.upper).q(&format!("n={n} lower"), &d.lower);
    }
    reports.push(r);
    let all = conv_distance(&y, &pool, ConvOrder::All)?;
    let below = profile.iter().all(|(_, d)| all.upper <= d.lower);
    reports.push(
        report("conv-all-below-finite", "x=-1 y=1", Status::from_bool(below)).q("all", &all.upper),
    );

    // Averages of a bush approximate its net point.
    let s1 = tower.stage(1);
    let step = s1.step.as_ref().expect("two stages");
    let net = s1.net.as_ref().expect("two stages");
    for (k, p) in net.points.iter().enumerate() {
        let u = s1.space.combine(p)?;
        let q_u = LPlusQuery::new(u.clone(), step.eps.clone())?;
        let est = daug_upper_estimate(&q_u, &u, &step.bush[k], ConvOrder::All)?;
        reports.push(
            report("bush-average-estimate", format!("k={}", k + 1), Status::from_bool(est.upper <= step.eps))
                .q("estimate", &est.upper)
                .q("eps", &step.eps),
        );
    }

    // Slices: the trivial one on the line, one guaranteed by the stage
    // certificate, and a narrow one that may well be empty of l⁺ members.
    let line = &s1.space;
    let q_one = LPlusQuery::new(StepFunction::one(), eps.clone())?;
    let trivial = slice_search(line, &SliceSpec { weight: StepFunction::one(), alpha: zero() }, &q_one, &SphereNet::line(line), &[])?;
    reports.push(
        report("slice-diametral", "line weight=1 alpha=0", Status::from_bool(trivial.found.is_some()))
            .text("searched", trivial.searched),
    );
    let e2 = &tower.stage(2).space;
    let no_net = SphereNet::empty(e2.dim());
    let plus = net.points.iter().position(|p| p[0].is_positive()).expect("net holds +1");
    let v = step.bush[plus][0].clone();
    let bush: Vec<StepFunction> = step.bush_flat().cloned().collect();
    let guaranteed = slice_search(e2, &SliceSpec { weight: v.clone(), alpha: zero() }, &q_one, &no_net, &bush)?;
    let mut r = report("slice-diametral", "stage=2 weight=v alpha=0", Status::from_bool(guaranteed.found.is_some()))
        .q("functional_norm", &guaranteed.functional_norm)
        .text("in_slice", guaranteed.in_slice);
    if let Some(h) = &guaranteed.found {
        r = r.q("margin", &h.margin);
    }
    reports.push(r);
    let narrow_alpha = &guaranteed.functional_norm - q(1, 1000);
    let narrow = slice_search(e2, &SliceSpec { weight: v.clone(), alpha: narrow_alpha.clone() }, &q_one, &no_net, &bush)?;
    reports.push(
        report("slice-diametral", "stage=2 narrow", Status::ReportOnly)
            .q("alpha", &narrow_alpha)
            .text("in_slice", narrow.in_slice)
            .text("found", narrow.found.is_some()),
    );

    // Rank-one defect: exact on the line, a net estimate on stage 2.
    let d = rank_one_defect(line, &StepFunction::one(), &StepFunction::one(), &q(1, 4), tower.params.lattice_cap)?;
    reports.push(
        report("rank-one-defect", "line T=Id", Status::from_bool(d.defect.is_zero() && d.lower == int(2)))
            .q("t_norm", &d.t_norm)
            .q("lower", &d.lower)
            .q("defect", &d.defect),
    );
    let z = rank_one_defect(line, &StepFunction::zero(), &StepFunction::one(), &q(1, 4), tower.params.lattice_cap)?;
    reports.push(
        report("rank-one-defect", "line T=0", Status::from_bool(z.defect.is_zero() && z.lower == one()))
            .q("t_norm", &z.t_norm)
            .q("defect", &z.defect),
    );
    // Stage 2 is too large for a certified net; any unit vectors still give
    // a lower estimate: the basis directions, the bush vectors and random ones.
    let mut rng = ctx.rng(Suite::DaugEstimate);
    let mut points: Vec<Vec<Rational>> = (0..e2.dim())
        .map(|i| {
            let mut a = vec![zero(); e2.dim()];
            a[i] = one();
            a
        })
        .collect();
    points.extend((0..200).map(|_| e2.sample_unit(&mut rng, 8)));
    let d = rank_one_defect_at(e2, &StepFunction::one(), &v, &points, None)?;
    reports.push(
        report("rank-one-defect", "stage=2 weight=1 y=v", Status::ReportOnly)
            .q("t_norm", &d.t_norm)
            .q("lower", &d.lower)
            .q("upper", &d.upper)
            .q("defect", &d.defect)
            .text("points", d.points)
            .with_seed(ctx.config.seed),
    );
    Ok(SuiteOutput {
        reports,
        artifacts: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Context {
        let mut cfg = RunConfig::default();
        cfg.samples.metric_triples = 40;
        cfg.samples.orthogonality_trials = 10;
        cfg.samples.compression_samples = 3;
        cfg.samples.spike_span_samples = 20;
        Context::new(cfg)
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(Suite::parse_selection("all").unwrap().len(), 8);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn closed_form_matches_convolution() {
        for n in 1..=12 {
            assert_eq!(law_by_convolution(&q(1, 3), n), law_of_large_numbers_norm(&q(1, 3), n));
        }
    }

    #[test]
    fn exact_suites_pass() {
        let ctx = quick();
        for s in [Suite::Metric, Suite::Orthogonality, Suite::Spike, Suite::SpikeDistance] {
            let out = run_suite(&ctx, s).unwrap();
            assert!(!out.reports.is_empty());
            for r in &out.reports {
                assert!(
                    matches!(r.status, Status::Pass | Status::ReportOnly),
                    "{s}: {} {} {:?}",
                    r.anchor,
                    r.case,
                    r.quantities
                );
                assert_eq!(r.suite, s.name());
            }
        }
    }

    #[test]
    fn sampled_suites_are_deterministic() {
        let a = run_suite(&quick(), Suite::Orthogonality).unwrap().reports;
        let b = run_suite(&quick(), Suite::Orthogonality).unwrap().reports;
        assert_eq!(a, b);
    }
}
