//! Lower-bound certificate for `dist(conv_n(l⁺(−1, ¼)), 1) ≥ ½` on a stage.
//!
//! For each audited `z_k ∈ l⁺(−1, ¼)` the certificate records a constant
//! `α_k ∈ [−1, 1]` with `d(z_k, α_k) < ε₁` and the exact chain
//! `1 ≥ ‖z_k‖ ≥ |α_k| + ‖z_k − α_k‖ − ¼ ≥ |α_k| − |1 − α_k| + 3/2`,
//! whence `α_k ≤ ¼`. For combinations `z = Σ λ_k z_k` it records
//! `‖1 − z‖ ≥ |1 − Σ λ_k α_k| + ‖Σ λ_k (z_k − α_k)‖ − ¼ ≥ ½`, and for every
//! `n`-subset of audited members a weak-duality witness proving the bound on
//! the whole convex hull at once.

use super::{hull_witness, subsets, AnalysisError, HullWitness};
use crate::construction::Tower;
use crate::measure::text::serde_step;
use crate::measure::{best_constant, delta_is_valid, ky_fan_to_zero, StepFunction};
use crate::rational::{int, one, q, serde_q, zero, Rational};
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateAudit {
    pub label: String,
    #[serde(with = "serde_step")]
    pub z: StepFunction,
    #[serde(with = "serde_q")]
    pub norm: Rational,
    /// `‖x + z‖`.
    #[serde(with = "serde_q")]
    pub plus_norm: Rational,
    /// `‖z‖ = 1` and `‖x + z‖ ≥ 2 − ¼`; non-members are not audited further.
    pub member: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<ConstantAudit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantAudit {
    #[serde(with = "serde_q")]
    pub alpha: Rational,
    /// `d(z, α)`.
    #[serde(with = "serde_q")]
    pub distance: Rational,
    /// `‖z‖ − (|α| + ‖z − α‖ − ¼)`.
    #[serde(with = "serde_q")]
    pub orthogonality_slack: Rational,
    /// `|α| − |1 − α|`.
    #[serde(with = "serde_q")]
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationAudit {
    pub members: Vec<usize>,
    #[serde(with = "serde_q::vec")]
    pub lambda: Vec<Rational>,
    /// `Σ λ_k α_k`.
    #[serde(with = "serde_q")]
    pub alpha_mean: Rational,
    /// `d(Σ λ_k (z_k − α_k), 0)`.
    #[serde(with = "serde_q")]
    pub residual_distance: Rational,
    /// `‖y − z‖`.
    #[serde(with = "serde_q")]
    pub distance: Rational,
    /// `‖y − z‖ − (|1 − Σ λ_k α_k| + ‖Σ λ_k (z_k − α_k)‖ − ¼)`.
    #[serde(with = "serde_q")]
    pub orthogonality_slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullAudit {
    pub members: Vec<usize>,
    #[serde(with = "serde_step")]
    pub weight: StepFunction,
    #[serde(with = "serde_q")]
    pub level: Rational,
    #[serde(with = "serde_q")]
    pub value: Rational,
}

/// The small-in-measure orthogonality threshold: `δ = n·ε₁` is valid for
/// every constant in `[−2, 2]` at tolerance ¼, i.e. `6nε₁ < ¼`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    #[serde(with = "serde_q")]
    pub delta: Rational,
    #[serde(with = "serde_q")]
    pub lhs: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaugCertificate {
    pub stage: usize,
    pub n: usize,
    #[serde(with = "serde_q")]
    pub eps1: Rational,
    #[serde(with = "serde_q")]
    pub lplus_eps: Rational,
    #[serde(with = "serde_q")]
    pub lower_bound: Rational,
    #[serde(with = "serde_step")]
    pub x: StepFunction,
    #[serde(with = "serde_step")]
    pub y: StepFunction,
    pub threshold: Threshold,
    pub candidates: Vec<CandidateAudit>,
    pub combinations: Vec<CombinationAudit>,
    pub hulls: Vec<HullAudit>,
    /// Smallest certified hull distance.
    #[serde(with = "serde_q")]
    pub hull_minimum: Rational,
    pub passed: bool,
}

impl DaugCertificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, AnalysisError> {
        serde_json::from_str(text).map_err(|e| AnalysisError::Format(e.to_string()))
    }

    pub fn member_indices(&self) -> Vec<usize> {
        (0..self.candidates.len()).filter(|&i| self.candidates[i].member).collect()
    }
}

/// The unit vectors a stage offers as `l⁺` candidates: the first stage's net
/// points, every bush vector, and normalised sums of two bush vectors.
pub fn certificate_pool(tower: &Tower) -> Result<Vec<(String, StepFunction)>, AnalysisError> {
    let mut pool = Vec::new();
    let first = tower.stage(1);
    if let Some(net) = &first.net {
        for (k, p) in net.points.iter().enumerate() {
            pool.push((format!("u(1,{})", k + 1), first.space.combine(p)?));
        }
    } else {
        pool.push(("u(1,1)".into(), StepFunction::one()));
        pool.push(("u(1,2)".into(), StepFunction::one().neg()));
    }
    let bush = tower.bush_vectors();
    for ((s, k, j), v) in &bush {
        pool.push((format!("v({s},{k},{j})"), (*v).clone()));
    }
    for a in 0..bush.len() {
        for b in a + 1..bush.len() {
            let sum = bush[a].1.add(bush[b].1)?;
            let norm = sum.norm_l1();
            if norm.is_positive() {
                let ((s1, k1, j1), (s2, k2, j2)) = (bush[a].0, bush[b].0);
                pool.push((
                    format!("v({s1},{k1},{j1})+v({s2},{k2},{j2})"),
                    sum.scale(&(one() / norm)),
                ));
            }
        }
    }
    Ok(pool)
}

fn audit_candidate(label: String, z: StepFunction, x: &StepFunction, lplus_eps: &Rational) -> Result<CandidateAudit, AnalysisError> {
    let norm = z.norm_l1();
    let plus_norm = x.add(&z)?.norm_l1();
    let member = norm == one() && plus_norm >= int(2) - lplus_eps;
    let constant = if member {
        let best = best_constant(&z, Some((&-one(), &one())));
        let alpha = best.constant;
        let off = z.shift(&alpha).norm_l1();
        Some(ConstantAudit {
            orthogonality_slack: &norm - (alpha.abs() + off - q(1, 4)),
            gap: alpha.abs() - (one() - &alpha).abs(),
            distance: best.distance,
            alpha,
        })
    } else {
        None
    };
    Ok(CandidateAudit {
        label,
        z,
        norm,
        plus_norm,
        member,
        constant,
    })
}

fn audit_combination(
    members: &[usize],
    lambda: Vec<Rational>,
    cands: &[CandidateAudit],
    y: &StepFunction,
) -> Result<CombinationAudit, AnalysisError> {
    let zs: Vec<StepFunction> = members.iter().map(|&i| cands[i].z.clone()).collect();
    let alphas: Vec<Rational> = members
        .iter()
        .map(|&i| cands[i].constant.as_ref().map(|c| c.alpha.clone()).unwrap_or_else(zero))
        .collect();
    let z = StepFunction::lin_comb(&lambda, &zs)?;
    let alpha_mean: Rational = lambda.iter().zip(&alphas).map(|(l, a)| l * a).sum();
    let residual = z.shift(&alpha_mean);
    let distance = y.sub(&z)?.norm_l1();
    let orthogonality_slack = &distance - ((one() - &alpha_mean).abs() + residual.norm_l1() - q(1, 4));
    Ok(CombinationAudit {
        members: members.to_vec(),
        lambda,
        residual_distance: ky_fan_to_zero(&residual),
        alpha_mean,
        distance,
        orthogonality_slack,
    })
}

/// The weights audited for a combination of `size` members: the uniform
/// weights, and for pairs the grid `i/4`.
fn lambda_grid(size: usize) -> Vec<Vec<Rational>> {
    if size == 2 {
        (0..=4).map(|i| vec![q(i, 4), q(4 - i, 4)]).collect()
    } else {
        vec![vec![Rational::new(1.into(), (size as i64).into()); size]]
    }
}

fn threshold(n: usize, eps1: &Rational) -> Threshold {
    let delta = int(n as i64) * eps1;
    Threshold {
        lhs: int(6) * &delta,
        holds: delta_is_valid(&[StepFunction::constant(int(2))], &q(1, 4), &delta),
        delta,
    }
}

/// Builds the certificate for `x = −1`, `y = 1` on the tower's top stage.
///
/// Requires `ε₁ ≤ 1/(25n)`; otherwise the hypothesis of the chain is not
/// available and the result is [`AnalysisError::Precondition`].
pub fn daug_lower_certificate(tower: &Tower, n: usize) -> Result<DaugCertificate, AnalysisError> {
    let eps1 = tower.params.eps1.clone();
    if n == 0 || eps1 > Rational::new(1.into(), (25 * n as i64).into()) {
        return Err(AnalysisError::Precondition(format!(
            "eps1 = {eps1} exceeds 1/(25n) for n = {n}"
        )));
    }
    let lplus_eps = q(1, 4);
    let x = StepFunction::one().neg();
    let y = StepFunction::one();
    let pool = certificate_pool(tower)?;
    let candidates: Vec<CandidateAudit> = pool
        .into_par_iter()
        .map(|(label, z)| audit_candidate(label, z, &x, &lplus_eps))
        .collect::<Result<_, _>>()?;
    let members: Vec<usize> = (0..candidates.len()).filter(|&i| candidates[i].member).collect();
    let size = n.min(members.len());
    let groups: Vec<Vec<usize>> = subsets(members.len(), size)
        .into_iter()
        .map(|s| s.into_iter().map(|i| members[i]).collect())
        .collect();
    let combinations: Vec<CombinationAudit> = groups
        .par_iter()
        .flat_map_iter(|g| lambda_grid(g.len()).into_iter().map(move |l| (g.clone(), l)))
        .map(|(g, l)| audit_combination(&g, l, &candidates, &y))
        .collect::<Result<_, _>>()?;
    let hulls: Vec<HullAudit> = groups
        .par_iter()
        .map(|g| {
            let zs: Vec<&StepFunction> = g.iter().map(|&i| &candidates[i].z).collect();
            let HullWitness { weight, level, value } = hull_witness(&y, &zs)?;
            Ok(HullAudit {
                members: g.clone(),
                weight,
                level,
                value,
            })
        })
        .collect::<Result<_, AnalysisError>>()?;
    let hull_minimum = hulls.iter().map(|h| h.value.clone()).min().unwrap_or_else(zero);
    let mut cert = DaugCertificate {
        stage: tower.top().index,
        n,
        eps1,
        lplus_eps,
        lower_bound: q(1, 2),
        x,
        y,
        threshold: threshold(n, &tower.params.eps1),
        candidates,
        combinations,
        hulls,
        hull_minimum,
        passed: false,
    };
    cert.passed = verify_certificate(&cert).passed();
    Ok(cert)
}

/// Outcome of re-checking a certificate from its recorded data alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateCheck {
    pub problems: Vec<String>,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Recomputes every recorded quantity exactly and checks every inequality.
///
/// Does not trust the producer: norms, Ky Fan distances and slacks are
/// recomputed, and each hull bound is re-proved by weak duality from the
/// recorded weight.
pub fn verify_certificate(cert: &DaugCertificate) -> CertificateCheck {
    let mut problems = Vec::new();
    let mut fail = |m: String| problems.push(m);
    let quarter = q(1, 4);
    if cert.x != StepFunction::one().neg() || cert.y != StepFunction::one() {
        fail("x must be −1 and y must be 1".into());
    }
    if cert.lplus_eps != quarter || cert.lower_bound != q(1, 2) {
        fail("certificate must be for l⁺(x, 1/4) and the bound 1/2".into());
    }
    if cert.n == 0 || cert.eps1 > Rational::new(1.into(), (25 * cert.n as i64).into()) {
        fail(format!("eps1 = {} exceeds 1/(25n)", cert.eps1));
    }
    let t = threshold(cert.n, &cert.eps1);
    if t != cert.threshold || !t.holds {
        fail("orthogonality threshold 6nε₁ < 1/4 does not hold as recorded".into());
    }
    for (i, c) in cert.candidates.iter().enumerate() {
        let recomputed = match audit_candidate(c.label.clone(), c.z.clone(), &cert.x, &cert.lplus_eps) {
            Ok(r) => r,
            Err(e) => {
                fail(format!("candidate {i}: {e}"));
                continue;
            }
        };
        if recomputed.norm != c.norm || recomputed.plus_norm != c.plus_norm || recomputed.member != c.member {
            fail(format!("candidate {i} ({}): norms or membership differ", c.label));
        }
        if !c.member {
            continue;
        }
        let Some(a) = &c.constant else {
            fail(format!("candidate {i}: member without a constant"));
            continue;
        };
        if a.alpha.abs() > one() {
            fail(format!("candidate {i}: alpha outside [-1, 1]"));
        }
        let distance = ky_fan_to_zero(&c.z.shift(&a.alpha));
        if distance != a.distance || distance >= cert.eps1 {
            fail(format!("candidate {i}: d(z, alpha) = {distance} is not below eps1"));
        }
        let slack = &c.norm - (a.alpha.abs() + c.z.shift(&a.alpha).norm_l1() - &quarter);
        if slack != a.orthogonality_slack || slack.is_negative() {
            fail(format!("candidate {i}: orthogonality instance fails"));
        }
        let gap = a.alpha.abs() - (one() - &a.alpha).abs();
        if gap != a.gap || gap > q(-1, 2) || a.alpha > quarter {
            fail(format!("candidate {i}: alpha chain fails (alpha = {})", a.alpha));
        }
    }
    let members = cert.member_indices();
    if members.is_empty() {
        fail("no audited l⁺ members".into());
    }
    let size = cert.n.min(members.len());
    let delta = int(cert.n as i64) * &cert.eps1;
    for (i, c) in cert.combinations.iter().enumerate() {
        let ok_members = c.members.len() <= cert.n
            && c.members.iter().all(|&m| cert.candidates.get(m).is_some_and(|k| k.member));
        let ok_lambda = c.lambda.len() == c.members.len()
            && c.lambda.iter().all(|l| !l.is_negative())
            && c.lambda.iter().sum::<Rational>() == one();
        if !ok_members || !ok_lambda {
            fail(format!("combination {i}: not a conv_n combination of members"));
            continue;
        }
        match audit_combination(&c.members, c.lambda.clone(), &cert.candidates, &cert.y) {
            Ok(r) if r == *c => {}
            Ok(_) => fail(format!("combination {i}: recorded values differ")),
            Err(e) => fail(format!("combination {i}: {e}")),
        }
        if c.alpha_mean > quarter
            || c.residual_distance >= delta
            || c.orthogonality_slack.is_negative()
            || c.distance < cert.lower_bound
        {
            fail(format!("combination {i}: chain fails"));
        }
    }
    let mut covered: Vec<Vec<usize>> = Vec::new();
    for (i, h) in cert.hulls.iter().enumerate() {
        if h.members.len() > cert.n || !h.members.iter().all(|&m| cert.candidates.get(m).is_some_and(|k| k.member)) {
            fail(format!("hull {i}: members are not audited l⁺ members"));
            continue;
        }
        let zs: Vec<&StepFunction> = h.members.iter().map(|&m| &cert.candidates[m].z).collect();
        let w = HullWitness {
            weight: h.weight.clone(),
            level: h.level.clone(),
            value: h.value.clone(),
        };
        match w.certifies(&cert.y, &zs) {
            Ok(true) if h.value >= cert.lower_bound => covered.push(h.members.clone()),
            Ok(_) => fail(format!("hull {i}: witness does not prove the bound")),
            Err(e) => fail(format!("hull {i}: {e}")),
        }
    }
    for s in subsets(members.len(), size) {
        let g: Vec<usize> = s.into_iter().map(|i| members[i]).collect();
        if !covered.contains(&g) {
            fail(format!("no hull witness for members {g:?}"));
        }
    }
    let min = cert.hulls.iter().map(|h| h.value.clone()).min().unwrap_or_else(zero);
    if min != cert.hull_minimum {
        fail("recorded hull minimum differs".into());
    }
    CertificateCheck { problems }
}
