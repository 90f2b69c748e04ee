//! Text form of subspaces and sphere nets.
//!
//! ```text
//! subspace 2
//! step-function ... end      # one block per basis function
//! step-function ... end
//! end-subspace
//!
//! sphere-net 2
//! mesh 1/4
//! certified true
//! point 1/1 0/1
//! point -1/1 0/1
//! end-net
//! ```

use super::{SphereNet, Subspace, SubspaceError};
use crate::measure::text::{lines, read_step, write_step};
use crate::measure::MeasureError;
use crate::rational::{fmt_q, parse_q, zero};

fn perr(line: usize, msg: impl Into<String>) -> SubspaceError {
    SubspaceError::Measure(MeasureError::Parse {
        line,
        msg: msg.into(),
    })
}

pub fn write_subspace(space: &Subspace) -> String {
    let mut out = format!("subspace {}\n", space.dim());
    for b in space.basis() {
        out.push_str(&write_step(b));
    }
    out.push_str("end-subspace\n");
    out
}

pub fn parse_subspace(text: &str) -> Result<Subspace, SubspaceError> {
    let mut it = lines(text);
    let (ln, head) = it.next().ok_or_else(|| perr(0, "empty input"))?;
    let dim: usize = head
        .strip_prefix("subspace ")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| perr(ln, "expected `subspace <dim>`"))?;
    let mut basis = Vec::with_capacity(dim);
    for _ in 0..dim {
        basis.push(read_step(&mut it)?);
    }
    match it.next() {
        Some((_, "end-subspace")) => {}
        Some((ln, other)) => return Err(perr(ln, format!("expected `end-subspace`, found {other:?}"))),
        None => return Err(perr(ln, "missing `end-subspace`")),
    }
    if let Some((ln, extra)) = it.next() {
        return Err(perr(ln, format!("trailing content {extra:?}")));
    }
    Subspace::new(basis)
}

/// Nets carry their points only; the lattice data is recomputable.
pub fn write_net(net: &SphereNet) -> String {
    let mut out = format!(
        "sphere-net {}\nmesh {}\ncertified {}\n",
        net.dim,
        fmt_q(&net.mesh),
        net.certified
    );
    for p in &net.points {
        out.push_str("point");
        for x in p {
            out.push(' ');
            out.push_str(&fmt_q(x));
        }
        out.push('\n');
    }
    out.push_str("end-net\n");
    out
}

pub fn parse_net(text: &str) -> Result<SphereNet, SubspaceError> {
    let mut it = lines(text);
    let (ln, head) = it.next().ok_or_else(|| perr(0, "empty input"))?;
    let dim: usize = head
        .strip_prefix("sphere-net ")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| perr(ln, "expected `sphere-net <dim>`"))?;
    let (ln, mesh_line) = it.next().ok_or_else(|| perr(ln, "missing mesh line"))?;
    let mesh = mesh_line
        .strip_prefix("mesh ")
        .ok_or_else(|| perr(ln, "expected `mesh`"))
        .and_then(|m| parse_q(m.trim()).map_err(|e| perr(ln, e.to_string())))?;
    let (ln, cert_line) = it.next().ok_or_else(|| perr(ln, "missing certified line"))?;
    let certified = match cert_line {
        "certified true" => true,
        "certified false" => false,
        _ => return Err(perr(ln, "expected `certified true|false`")),
    };
    let mut points = Vec::new();
    let mut last = ln;
    loop {
        let (ln, line) = it.next().ok_or_else(|| perr(last, "missing `end-net`"))?;
        last = ln;
        if line == "end-net" {
            break;
        }
        let rest = line
            .strip_prefix("point")
            .ok_or_else(|| perr(ln, format!("expected `point`, found {line:?}")))?;
        let p = rest
            .split_whitespace()
            .map(|w| parse_q(w).map_err(|e| perr(ln, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if p.len() != dim {
            return Err(SubspaceError::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        points.push(p);
    }
    if let Some((ln, extra)) = it.next() {
        return Err(perr(ln, format!("trailing content {extra:?}")));
    }
    Ok(SphereNet {
        dim,
        mesh,
        spacing: zero(),
        equivalence: None,
        certified,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::StepFunction;
    use crate::rational::{int, one, q};
    use crate::subspace::{build_net, DEFAULT_LATTICE_CAP};

    fn plane() -> Subspace {
        let spike = StepFunction::interval(1, zero(), q(1, 2), int(2)).unwrap();
        Subspace::new(vec![StepFunction::one(), spike]).unwrap()
    }

    #[test]
    fn subspace_round_trip() {
        let s = plane();
        let text = write_subspace(&s);
        let back = parse_subspace(&text).unwrap();
        assert_eq!(back.basis(), s.basis());
        assert_eq!(write_subspace(&back), text);
    }

    #[test]
    fn net_round_trip_keeps_points() {
        let s = plane();
        let net = build_net(&s, &q(1, 2), DEFAULT_LATTICE_CAP).unwrap();
        let back = parse_net(&write_net(&net)).unwrap();
        assert_eq!(back.points, net.points);
        assert_eq!(back.mesh, net.mesh);
        assert!(back.points.iter().all(|p| s.coeff_norm(p).unwrap() == one()));
    }

    #[test]
    fn net_rejects_wrong_arity() {
        let err = parse_net("sphere-net 2\nmesh 1/2\ncertified true\npoint 1\nend-net\n").unwrap_err();
        assert_eq!(err, SubspaceError::DimensionMismatch { expected: 2, got: 1 });
    }
}
