use super::{norm_equivalence, NormEquivalence, Subspace, SubspaceError};
use crate::rational::{int, one, q, zero, Rational};
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use std::collections::BTreeSet;

pub const DEFAULT_LATTICE_CAP: usize = 1 << 22;

/// A finite subset of the unit sphere of a subspace, in coefficients.
///
/// When `certified`, every unit vector of the space lies within `mesh` of a
/// point. The lattice certificate: with spacing `s = θ / c_max`, any unit
/// `a` rounds to a lattice point `a'` with `‖a − a'‖ ≤ c_max·s/2 = θ/2`, so
/// `|‖a'‖ − 1| ≤ θ/2` and `‖a − a'/‖a'‖‖ ≤ ‖a − a'‖ + |1 − ‖a'‖| ≤ θ`. Unit
/// vectors have `‖a‖_∞ ≤ 1/c_min`, which bounds the lattice box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereNet {
    pub dim: usize,
    /// Certified covering radius.
    pub mesh: Rational,
    /// Lattice spacing; zero for nets that are the whole sphere.
    pub spacing: Rational,
    pub equivalence: Option<NormEquivalence>,
    pub certified: bool,
    pub points: Vec<Vec<Rational>>,
}

impl SphereNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// No points at all: for searches that only use explicit candidates.
    pub fn empty(dim: usize) -> Self {
        SphereNet {
            dim,
            mesh: zero(),
            spacing: zero(),
            equivalence: None,
            certified: false,
            points: Vec::new(),
        }
    }

    /// The whole unit sphere of a one-dimensional space: `±b/‖b‖`.
    pub fn line(space: &Subspace) -> Self {
        assert_eq!(space.dim(), 1, "line net needs a one-dimensional space");
        let n = space.basis()[0].norm_l1();
        let p = one() / n;
        SphereNet {
            dim: 1,
            mesh: zero(),
            spacing: zero(),
            equivalence: None,
            certified: true,
            points: vec![vec![p.clone()], vec![-p]],
        }
    }
}

/// A certified `theta`-net of the unit sphere of `space`.
///
/// One-dimensional spaces get their exact two-point sphere (mesh 0). For
/// `theta ≥ 2` a single point suffices since the sphere has diameter 2.
pub fn build_net(space: &Subspace, theta: &Rational, lattice_cap: usize) -> Result<SphereNet, SubspaceError> {
    if !theta.is_positive() {
        return Err(SubspaceError::InvalidMesh);
    }
    let d = space.dim();
    if *theta >= int(2) {
        let n = space.basis()[0].norm_l1();
        let mut p = vec![zero(); d];
        p[0] = one() / n;
        return Ok(SphereNet {
            dim: d,
            mesh: int(2),
            spacing: zero(),
            equivalence: None,
            certified: true,
            points: vec![p],
        });
    }
    if d == 1 {
        return Ok(SphereNet::line(space));
    }
    let eq = norm_equivalence(space)?;
    let spacing = theta / &eq.c_max;
    // lattice index range: |k·s| ≤ 1/c_min + s
    let reach: num_bigint::BigInt = (one() / (&eq.c_min * &spacing)).ceil().to_integer() + 1;
    let reach = reach.to_i64().ok_or(SubspaceError::NetTooLarge {
        points: u128::MAX,
        cap: lattice_cap,
    })?;
    let side = (2 * reach + 1) as u128;
    let total = side.checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > lattice_cap as u128 {
        return Err(SubspaceError::NetTooLarge {
            points: total,
            cap: lattice_cap,
        });
    }
    let half = theta * q(1, 2);
    let lo = one() - &half;
    let hi = one() + &half;
    let first: Vec<i64> = (-reach..=reach).collect();
    let found: Vec<Vec<Vec<Rational>>> = first
        .par_iter()
        .map(|&k0| {
            let mut out = Vec::new();
            let mut idx = vec![-reach; d];
            idx[0] = k0;
            loop {
                let a: Vec<Rational> = idx.iter().map(|&k| int(k) * &spacing).collect();
                let n = space.coeff_norm_unchecked(&a);
                if n >= lo && n <= hi {
                    out.push(a.into_iter().map(|x| x / &n).collect());
                }
                // odometer over axes 1..d
                let mut axis = d - 1;
                loop {
                    if axis == 0 {
                        return out;
                    }
                    if idx[axis] < reach {
                        idx[axis] += 1;
                        break;
                    }
                    idx[axis] = -reach;
                    axis -= 1;
                }
            }
        })
        .collect();
    let points: BTreeSet<Vec<Rational>> = found.into_iter().flatten().collect();
    Ok(SphereNet {
        dim: d,
        mesh: theta.clone(),
        spacing,
        equivalence: Some(eq),
        certified: true,
        points: points.into_iter().collect(),
    })
}

/// Smallest `r` with `1/(2r) ≤ target`.
pub fn radial_steps(target: &Rational) -> u64 {
    let r = (one() / (target * int(2))).ceil().to_integer();
    r.to_u64().unwrap_or(u64::MAX).max(1)
}
