//! The eight acceptance criteria, each checked at its stated tolerance and
//! time budget, with one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed; exits nonzero if any
//! criterion fails.

use daugavet::analysis::{
    conv_distance, daug_lower_certificate, daug_profile, lplus_test, verify_certificate, ConvOrder, DaugCertificate,
    LPlusQuery,
};
use daugavet::config::RunConfig;
use daugavet::construction::{
    build_tower, compress, law_of_large_numbers_norm, make_spike, sample_ball, SpikeParams, TowerParams,
};
use daugavet::measure::{ky_fan, ky_fan_to_zero, StepFunction};
use daugavet::rational::{int, one, q, to_f64, zero, Rational};
use daugavet::report::Status;
use daugavet::suites::{law_by_tensor, random_step, run_suite, Context, Suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Spike at ε = 1/4: norm 1, distance 7/4 to the constant one, Ky Fan
/// distance 1/8 to zero.
fn spike_instantiation() -> Outcome {
    let f = make_spike(&SpikeParams::new(q(1, 4), 1).map_err(err)?);
    let gap = f.sub(&StepFunction::one()).map_err(err)?.norm_l1();
    let d = ky_fan_to_zero(&f);
    ensure(f.norm_l1() == one(), || format!("‖f‖ = {}", f.norm_l1()))?;
    ensure(gap == q(7, 4) && gap >= int(2) - q(1, 4), || format!("‖f − 1‖ = {gap}"))?;
    ensure(d == q(1, 8) && d <= q(1, 2), || format!("d(f, 0) = {d}"))?;
    Ok(format!("‖f‖ = 1, ‖f − 1‖ = {gap}, d(f,0) = {d}"))
}

/// Law of large numbers: the 3/8 value, strict decrease, and agreement with
/// the materialised tensor.
fn law_of_large_numbers() -> Outcome {
    let half = q(1, 2);
    let v = law_of_large_numbers_norm(&half, 4);
    ensure(v == q(3, 8), || format!("value at n = 4 is {v}"))?;
    let ns = [4usize, 8, 16, 32, 64];
    let vals: Vec<Rational> = ns.iter().map(|&n| law_of_large_numbers_norm(&half, n)).collect();
    ensure(vals.windows(2).all(|w| w[1] < w[0]), || format!("not strictly decreasing: {vals:?}"))?;
    for delta in [q(1, 4), half.clone()] {
        for n in 1..=10 {
            let tensor = law_by_tensor(&delta, n).map_err(err)?;
            let closed = law_of_large_numbers_norm(&delta, n);
            ensure(tensor == closed, || format!("δ = {delta}, n = {n}: tensor {tensor} vs closed {closed}"))?;
        }
    }
    Ok(format!("value(1/2, 4) = 3/8; decreasing to {} at n = 64; tensor agrees for n ≤ 10", to_f64(&vals[4])))
}

/// 100 random orthogonality instances, all within their hypotheses and all
/// satisfying the inequality exactly.
fn orthogonality_instances() -> Outcome {
    let mut cfg = RunConfig::default();
    cfg.samples.orthogonality_trials = 100;
    cfg.seed = 2024;
    let reports = run_suite(&Context::new(cfg), Suite::Orthogonality).map_err(err)?.reports;
    let trials: Vec<_> = reports.iter().filter(|r| r.case.starts_with("trial")).collect();
    ensure(trials.len() == 100, || format!("{} trials ran", trials.len()))?;
    let bad: Vec<_> = trials.iter().filter(|r| r.status != Status::Pass).collect();
    ensure(bad.is_empty(), || format!("{} trials not passing; first: {} {}", bad.len(), bad[0].case, bad[0].status))?;
    let min_slack = trials
        .iter()
        .filter_map(|r| r.get("slack"))
        .map(|s| daugavet::rational::parse_q(s).expect("exact slack"))
        .min()
        .expect("trials");
    Ok(format!("100/100 pass, smallest slack {min_slack}"))
}

/// The default two-stage tower: averaging bound for every k, diametral bound
/// for every bush vector against the exact sphere {±1}, unit norms.
fn stage_build() -> Outcome {
    let tower = build_tower(&TowerParams::default()).map_err(err)?;
    ensure(tower.stages.len() == 2, || format!("{} stages", tower.stages.len()))?;
    let s1 = tower.stage(1);
    let step = s1.step.as_ref().ok_or("stage 1 has no step")?;
    let net = s1.net.as_ref().ok_or("stage 1 has no net")?;
    let eps = &step.eps;
    let target = int(2) - eps;
    let sphere = [StepFunction::one(), StepFunction::one().neg()];
    let mut vectors = 0;
    for (k, p) in net.points.iter().enumerate() {
        let u = s1.space.combine(p).map_err(err)?;
        let row = &step.bush[k];
        let avg = StepFunction::lin_comb(&vec![q(1, row.len() as i64); row.len()], row).map_err(err)?;
        let gap = u.sub(&avg).map_err(err)?.norm_l1();
        ensure(gap <= *eps && gap == step.law_norm, || format!("k = {k}: averaging gap {gap}"))?;
        for (j, v) in row.iter().enumerate() {
            ensure(v.norm_l1() == one(), || format!("‖v_{k},{j}‖ = {}", v.norm_l1()))?;
            let direct = sphere
                .iter()
                .map(|w| w.add(v).map(|s| s.norm_l1()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?
                .into_iter()
                .min()
                .expect("two points");
            let cert = &step.sphere_bounds[k][j].bound;
            ensure(direct >= target && *cert >= target && *cert <= direct, || {
                format!("v_{k},{j}: direct {direct}, certified {cert}, target {target}")
            })?;
            vectors += 1;
        }
    }
    Ok(format!("{vectors} bush vectors of norm 1, all ≥ {target}; averaging gap {} ≤ {eps}", step.law_norm))
}

/// 50 random elements of the top ball compress into B(E₁) within ε₁.
fn compression() -> Outcome {
    let params = TowerParams::default();
    let chain = params.eps(3) + params.eps(2);
    ensure(chain < params.eps1, || format!("ε₃ + ε₂ = {chain}"))?;
    let mut towers = vec![build_tower(&params).map_err(err)?];
    let deeper = build_tower(&TowerParams { max_stage: 3, ..params.clone() });
    let third = match deeper {
        Ok(t) => {
            towers.push(t);
            "E₃ built".to_string()
        }
        Err(e) => format!("E₃ does not fit ({e})"),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = zero();
    for tower in &towers {
        let top = tower.top();
        let e1 = &tower.stage(1).space;
        let samples: Vec<Vec<Rational>> = (0..50).map(|_| sample_ball(&top.space, &mut rng, 12)).collect();
        let dists: Vec<Rational> = samples
            .par_iter()
            .map(|a| -> Result<Rational, String> {
                let c = compress(tower, a, top.index, 1).map_err(err)?;
                let phi = top.space.combine(a).map_err(err)?;
                let d = ky_fan(&phi, &c.result).map_err(err)?;
                let coeffs = e1.coefficients_of(&c.result).map_err(err)?;
                let norm = e1.coeff_norm(&coeffs).map_err(err)?;
                ensure(norm <= one(), || format!("‖g‖ = {norm}"))?;
                ensure(d < params.eps1, || format!("d(φ, g) = {d}"))?;
                Ok(d)
            })
            .collect::<Result<_, _>>()?;
        worst = dists.into_iter().chain(std::iter::once(worst)).max().expect("nonempty");
    }
    Ok(format!("50 samples per tower, largest d(φ,g) = {worst} < {}; ε₃ + ε₂ = {chain}; {third}", params.eps1))
}

/// The order-2 certificate on a stage with ε₁ = 1/50, re-checked
/// independently of the producer.
fn daug_certificate() -> Outcome {
    let params = TowerParams {
        eps1: q(1, 50),
        family_size: Some(2),
        ..TowerParams::default()
    };
    let tower = build_tower(&params).map_err(err)?;
    let cert = daug_lower_certificate(&tower, 2).map_err(err)?;
    ensure(cert.passed, || "certificate did not pass".into())?;
    let cert = DaugCertificate::from_json(&cert.to_json()).map_err(err)?;
    ensure(verify_certificate(&cert).passed(), || "serialized certificate does not re-verify".into())?;
    let x = StepFunction::one().neg();
    let y = StepFunction::one();
    let query = LPlusQuery::new(x, q(1, 4)).map_err(err)?;
    for c in cert.candidates.iter().filter(|c| c.member) {
        ensure(lplus_test(&query, &c.z).map_err(err)?, || format!("{} is not in l⁺", c.label))?;
        let alpha = &c.constant.as_ref().ok_or("member without constant")?.alpha;
        ensure(*alpha <= q(1, 4), || format!("{}: α = {alpha}", c.label))?;
    }
    let mut min = None::<Rational>;
    for comb in &cert.combinations {
        let zs: Vec<StepFunction> = comb.members.iter().map(|&i| cert.candidates[i].z.clone()).collect();
        let z = StepFunction::lin_comb(&comb.lambda, &zs).map_err(err)?;
        let d = y.sub(&z).map_err(err)?.norm_l1();
        ensure(d >= q(1, 2), || format!("combination {:?}: ‖1 − z‖ = {d}", comb.members))?;
        min = Some(min.map_or(d.clone(), |m| m.min(d)));
    }
    for h in &cert.hulls {
        let zs: Vec<&StepFunction> = h.members.iter().map(|&i| &cert.candidates[i].z).collect();
        let w = daugavet::analysis::HullWitness {
            weight: h.weight.clone(),
            level: h.level.clone(),
            value: h.value.clone(),
        };
        ensure(w.certifies(&y, &zs).map_err(err)? && h.value >= q(1, 2), || format!("hull {:?}", h.members))?;
    }
    Ok(format!(
        "{} audited points, min ‖1 − z‖ = {}, {} hull witnesses ≥ 1/2 (min {})",
        cert.combinations.len(),
        min.unwrap_or_else(zero),
        cert.hulls.len(),
        cert.hull_minimum
    ))
}

/// Upper estimates over nested pools do not increase with n.
fn daug_monotonicity() -> Outcome {
    let tower = build_tower(&TowerParams::default()).map_err(err)?;
    let query = LPlusQuery::new(StepFunction::one().neg(), tower.params.eps(1)).map_err(err)?;
    let mut pool: Vec<StepFunction> = Vec::new();
    for (_, z) in daugavet::analysis::certificate_pool(&tower).map_err(err)? {
        if pool.len() < 8 && lplus_test(&query, &z).map_err(err)? {
            pool.push(z);
        }
    }
    ensure(pool.len() == 8, || format!("only {} pool members", pool.len()))?;
    // Nested pools: the first 2, 4, 8, 8 members.
    let pools: Vec<(usize, Vec<StepFunction>)> =
        [(1, 2), (2, 4), (4, 8), (8, 8)].iter().map(|&(n, m)| (n, pool[..m].to_vec())).collect();
    let profile = daug_profile(&query, &StepFunction::one(), &pools).map_err(err)?;
    let values: Vec<String> = profile.iter().map(|(n, d)| format!("n={n}: {}", d.upper)).collect();
    ensure(profile.windows(2).all(|w| w[1].1.upper <= w[0].1.upper), || values.join(", "))?;
    Ok(values.join(", "))
}

/// A random totally unimodular instance: cell `c` has the pattern
/// `s_c·[k ∈ I_c]` over hull members for an interval `I_c`, and `y` takes
/// values in `(1/1000)ℤ`. With the simplex row this is an interval matrix,
/// so every vertex has `λ ∈ (1/1000)ℤ` and the grid contains the optimum.
struct GridInstance {
    masses: Vec<i64>,
    pattern: Vec<Vec<i64>>,
    y: Vec<i64>,
}

impl GridInstance {
    fn random<R: Rng>(rng: &mut R) -> Self {
        let k = rng.gen_range(1..=4);
        let cells = rng.gen_range(2..=4);
        let mut cuts: Vec<i64> = (1..8).collect();
        rand::seq::SliceRandom::shuffle(&mut cuts[..], rng);
        let mut cuts: Vec<i64> = cuts[..cells - 1].to_vec();
        cuts.sort_unstable();
        let bounds: Vec<i64> = std::iter::once(0).chain(cuts).chain(std::iter::once(8)).collect();
        let masses = bounds.windows(2).map(|w| w[1] - w[0]).collect();
        let pattern = (0..cells)
            .map(|_| {
                let a = rng.gen_range(0..k);
                let b = rng.gen_range(a..k);
                let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                (0..k).map(|i| if (a..=b).contains(&i) { s } else { 0 }).collect()
            })
            .collect();
        let y = (0..cells).map(|_| rng.gen_range(-1500..=1500)).collect();
        GridInstance { masses, pattern, y }
    }

    fn step_functions(&self) -> (StepFunction, Vec<StepFunction>) {
        let mut acc = 0;
        let mut breaks = vec![zero()];
        for m in &self.masses {
            acc += m;
            breaks.push(q(acc, 8));
        }
        let k = self.pattern[0].len();
        let on = |values: Vec<Rational>| StepFunction::on_coordinate(1, breaks.clone(), values).expect("valid");
        let y = on(self.y.iter().map(|v| q(*v, 1000)).collect());
        let zs = (0..k).map(|i| on(self.pattern.iter().map(|row| int(row[i])).collect())).collect();
        (y, zs)
    }

    /// Minimum of `‖y − Σ λ_k z_k‖` over `λ` in the simplex with step 1/1000,
    /// in integer units of `1/8000`.
    fn grid_minimum(&self) -> f64 {
        let k = self.pattern[0].len();
        let eval = |lam: &[i64]| -> i64 {
            self.pattern
                .iter()
                .zip(&self.y)
                .zip(&self.masses)
                .map(|((row, y), m)| m * (y - row.iter().zip(lam).map(|(s, l)| s * l).sum::<i64>()).abs())
                .sum()
        };
        let mut best = i64::MAX;
        let mut lam = vec![0i64; k];
        fn walk(i: usize, left: i64, lam: &mut Vec<i64>, best: &mut i64, eval: &dyn Fn(&[i64]) -> i64) {
            if i + 1 == lam.len() {
                lam[i] = left;
                *best = (*best).min(eval(lam));
                return;
            }
            for v in 0..=left {
                lam[i] = v;
                walk(i + 1, left - v, lam, best, eval);
            }
        }
        walk(0, 1000, &mut lam, &mut best, &eval);
        best as f64 / 8000.0
    }
}

/// Metric axioms on 10³ random triples, and the hull-distance LP against a
/// brute-force grid search on 20 instances.
fn metric_and_lp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let triples: Vec<[StepFunction; 3]> =
        (0..1000).map(|_| [random_step(&mut rng), random_step(&mut rng), random_step(&mut rng)]).collect();
    let bad = triples
        .par_iter()
        .filter(|[f, g, h]| {
            let d = |a: &StepFunction, b: &StepFunction| ky_fan(a, b).expect("same space");
            let (fg, gh, fh) = (d(f, g), d(g, h), d(f, h));
            !(fg == d(g, f) && fh <= &fg + &gh && d(f, f) == zero() && (fg == zero()) == (f == g))
        })
        .count();
    ensure(bad == 0, || format!("{bad} triples violate a metric axiom"))?;

    let instances: Vec<GridInstance> = (0..20).map(|_| GridInstance::random(&mut rng)).collect();
    let gaps: Vec<f64> = instances
        .par_iter()
        .map(|inst| -> Result<f64, String> {
            let (y, zs) = inst.step_functions();
            let lp = to_f64(&conv_distance(&y, &zs, ConvOrder::All).map_err(err)?.upper);
            Ok((lp - inst.grid_minimum()).abs())
        })
        .collect::<Result<_, _>>()?;
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    ensure(worst <= 1e-6, || format!("LP and grid differ by {worst}"))?;
    Ok(format!("1000 triples satisfy the axioms; LP vs grid max gap {worst:e} on 20 instances"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("1 spike instantiation", Duration::from_secs(1), spike_instantiation),
        ("2 law of large numbers", Duration::from_secs(10), law_of_large_numbers),
        ("3 orthogonality instances", Duration::from_secs(30), orthogonality_instances),
        ("4 stage build", Duration::from_secs(120), stage_build),
        ("5 compression", Duration::from_secs(300), compression),
        ("6 daug certificate", Duration::from_secs(300), daug_certificate),
        ("7 daug monotonicity", Duration::from_secs(60), daug_monotonicity),
        ("8 metric and LP oracles", Duration::from_secs(120), metric_and_lp),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS  criterion {name} ({elapsed:.2?}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name} ({elapsed:.2?}): {msg}");
            }
        }
    }
    println!("{} of 8 criteria pass", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
