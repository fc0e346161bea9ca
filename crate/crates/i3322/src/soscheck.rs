//! Sum-of-squares certificate model and verifier for constrained
//! polynomial bounds.
//!
//! A certificate claims `bound >= objective` on the set where every
//! constraint polynomial vanishes, witnessed by the Gram matrix
//! `Q = T - M0 - sum_i t_i M_i` being positive semidefinite, where T
//! carries the bound at the constant-monomial slot. On any point of the
//! constraint set the monomial vector v satisfies
//! `v^T Q v = bound - objective(v) >= 0`.
//!
//! The built-in certificate `i3322-case3` covers the bound 0.368 for
//! `x + z/2 - 2` under `x^2 = a^2 + 2a + 2`, `z^2 = 1 - a^2`,
//! `a in [-1, 1]`, with monomials (1, x, z, a) and multipliers
//! t1 = 0.51 (z-constraint), t2 = 0.24 (x-constraint).

use crate::symmat::{psd_margin, SymMatrix};
use crate::{par, sampling, Error, Result};
use rand::Rng;
use std::fmt;
use std::path::Path;

/// Feasible-point sampler attached to a certificate. Only the built-in
/// case-3 semantics are known; certificates loaded without a sampler get
/// a Gram-consistency residual instead of a constraint-set identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampler {
    Case3,
    None,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub id: String,
    pub monomials: Vec<String>,
    pub bound: f64,
    pub objective: SymMatrix,
    pub constraints: Vec<(SymMatrix, f64)>,
    pub psd_tolerance: f64,
    pub sampler: Sampler,
}

impl Certificate {
    fn validate(&self) -> Result<()> {
        let n = self.monomials.len();
        if n == 0 {
            return Err(Error::Certificate("empty monomial list".into()));
        }
        if self.objective.dim() != n {
            return Err(Error::Certificate(format!(
                "objective is {}x{} but there are {n} monomials",
                self.objective.dim(),
                self.objective.dim()
            )));
        }
        for (i, (m, t)) in self.constraints.iter().enumerate() {
            if m.dim() != n {
                return Err(Error::Certificate(format!(
                    "constraint {i} has dimension {}",
                    m.dim()
                )));
            }
            if !t.is_finite() {
                return Err(Error::Certificate(format!("multiplier {i} is not finite")));
            }
        }
        Ok(())
    }

    fn constant_slot(&self) -> usize {
        self.monomials.iter().position(|m| m == "1").unwrap_or(0)
    }
}

/// The built-in `i3322-case3` certificate.
pub fn builtin_case3() -> Certificate {
    let m0 = SymMatrix::from_rows(&[
        vec![-2.0, 0.5, 0.25, 0.0],
        vec![0.5, 0.0, 0.0, 0.0],
        vec![0.25, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0],
    ])
    .expect("symmetric");
    let m1 = SymMatrix::diag(&[1.0, 0.0, -1.0, -1.0]);
    let m2 = SymMatrix::from_rows(&[
        vec![2.0, 0.0, 0.0, 1.0],
        vec![0.0, -1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 1.0],
    ])
    .expect("symmetric");
    Certificate {
        id: "i3322-case3".into(),
        monomials: vec!["1".into(), "x".into(), "z".into(), "a".into()],
        bound: 0.368,
        objective: m0,
        constraints: vec![(m1, 0.51), (m2, 0.24)],
        psd_tolerance: 1e-10,
        sampler: Sampler::Case3,
    }
}

/// `Q = T - M0 - sum_i t_i M_i`, with T carrying the bound at the
/// constant-monomial slot.
pub fn build_gram(c: &Certificate) -> Result<SymMatrix> {
    c.validate()?;
    let n = c.monomials.len();
    let slot = c.constant_slot();
    let mut q = SymMatrix::zeros(n);
    q.set_sym(slot, slot, c.bound);
    q = q.sub(&c.objective)?;
    for (m, t) in &c.constraints {
        q = q.sub(&m.scale(*t))?;
    }
    Ok(q)
}

/// Minimum pivot of the symmetric elimination running from the last
/// monomial back to the first. For the built-in arrow-shaped Gram matrix
/// the final pivot is the Schur complement at the constant slot; kept as
/// an independent PSD route next to the eigenvalue margin.
pub fn reverse_pivot_margin(q: &SymMatrix) -> f64 {
    let n = q.dim();
    let mut a: Vec<f64> = q.data().to_vec();
    let mut min_pivot = f64::INFINITY;
    for k in (1..n).rev() {
        let piv = a[k * n + k];
        min_pivot = min_pivot.min(piv);
        if piv <= 1e-300 {
            return min_pivot;
        }
        for i in 0..k {
            for j in 0..=i {
                let delta = a[i * n + k] * a[j * n + k] / piv;
                a[i * n + j] -= delta;
                a[j * n + i] = a[i * n + j];
            }
        }
    }
    min_pivot.min(a[0])
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub gram: SymMatrix,
    /// Minimum eigenvalue of the Gram matrix; drives acceptance.
    pub psd_margin: f64,
    /// Reverse-elimination pivot margin (Schur value on arrow matrices).
    pub pivot_margin: f64,
    /// Max over sampled feasible points of
    /// |v^T Q v - (bound - objective(v))|.
    pub identity_residual: f64,
    pub accepted: bool,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "psd margin (min eigenvalue) : {:.6e}", self.psd_margin)?;
        writeln!(f, "pivot (Schur) margin        : {:.6e}", self.pivot_margin)?;
        writeln!(
            f,
            "identity residual           : {:.3e}",
            self.identity_residual
        )?;
        write!(
            f,
            "verdict                     : {}",
            if self.accepted {
                "accepted"
            } else {
                "REJECTED"
            }
        )
    }
}

fn qform(m: &SymMatrix, v: &[f64]) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += m.get(i, j) * v[j];
        }
        acc += v[i] * row;
    }
    acc
}

fn case3_monomial_vector(monomials: &[String], a: f64) -> Result<Vec<f64>> {
    let x = (a * a + 2.0 * a + 2.0).sqrt();
    let z = (1.0 - a * a).max(0.0).sqrt();
    monomials
        .iter()
        .map(|m| match m.as_str() {
            "1" => Ok(1.0),
            "x" => Ok(x),
            "z" => Ok(z),
            "a" => Ok(a),
            other => Err(Error::Certificate(format!(
                "case-3 sampler does not know monomial `{other}`"
            ))),
        })
        .collect()
}

/// Verifies a certificate: PSD check on the Gram matrix plus a sampled
/// polynomial-identity check on the constraint set. A certificate is
/// accepted iff the minimum eigenvalue stays above -psd_tolerance and the
/// residual stays at or below 1e-10.
pub fn verify(c: &Certificate, samples: usize, seed: u64) -> Result<Verdict> {
    verify_with(c, samples, seed, false)
}

/// Sequential twin of [`verify`] for benchmarking.
pub fn verify_sequential(c: &Certificate, samples: usize, seed: u64) -> Result<Verdict> {
    verify_with(c, samples, seed, true)
}

fn verify_with(c: &Certificate, samples: usize, seed: u64, sequential: bool) -> Result<Verdict> {
    c.validate()?;
    let gram = build_gram(c)?;
    let margin = psd_margin(&gram);
    let pivot = reverse_pivot_margin(&gram);
    let residual = match c.sampler {
        Sampler::Case3 => {
            let objective = c.objective.clone();
            let monomials = c.monomials.clone();
            let bound = c.bound;
            let gram_ref = gram.clone();
            let one = |k: usize| -> f64 {
                let mut rng = sampling::substream(seed, k as u64);
                let a = rng.gen_range(-1.0..=1.0);
                let v = case3_monomial_vector(&monomials, a).expect("case-3 monomials");
                let lhs = qform(&gram_ref, &v);
                let rhs = bound - qform(&objective, &v);
                (lhs - rhs).abs()
            };
            let residuals = if sequential {
                par::map_indexed_sequential(samples, one)
            } else {
                par::map_indexed(samples, one)
            };
            residuals.into_iter().fold(0.0, f64::max)
        }
        Sampler::None => {
            // No constraint-set semantics: check the Gram identity
            // Q + M0 + sum t_i M_i - T = 0 at random vectors instead.
            let slot = c.constant_slot();
            let one = |k: usize| -> f64 {
                let mut rng = sampling::substream(seed, k as u64);
                let v: Vec<f64> = (0..c.monomials.len())
                    .map(|_| rng.gen_range(-1.0..=1.0))
                    .collect();
                let mut lhs = qform(&gram, &v) + qform(&c.objective, &v);
                for (m, t) in &c.constraints {
                    lhs += t * qform(m, &v);
                }
                (lhs - c.bound * v[slot] * v[slot]).abs()
            };
            let residuals = if sequential {
                par::map_indexed_sequential(samples, one)
            } else {
                par::map_indexed(samples, one)
            };
            residuals.into_iter().fold(0.0, f64::max)
        }
    };
    let accepted = margin >= -c.psd_tolerance && residual <= 1e-10;
    Ok(Verdict {
        gram,
        psd_margin: margin,
        pivot_margin: pivot,
        identity_residual: residual,
        accepted,
    })
}

/// Joint oracle for the case-3 bound: the certified grid maximum and the
/// certificate must both accept, and the grid maximum must stay below the
/// certified bound.
#[derive(Clone, Debug)]
pub struct Case3CrossCheck {
    pub bound_report: crate::bounds::BoundReport,
    pub verdict: Verdict,
    /// bound - grid maximum.
    pub gap: f64,
    pub consistent: bool,
}

pub fn cross_check_case3(step: f64) -> Result<Case3CrossCheck> {
    let cert = builtin_case3();
    let report = crate::bounds::claim_case(3, step)?;
    let verdict = verify(&cert, 10_000, 0)?;
    let gap = cert.bound - report.grid_max;
    let consistent = report.holds && verdict.accepted && report.grid_max <= cert.bound;
    Ok(Case3CrossCheck {
        bound_report: report,
        verdict,
        gap,
        consistent,
    })
}

// ---------------------------------------------------------------------------
// Certificate files
// ---------------------------------------------------------------------------

fn schema_err(field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_matrix(v: &serde_json::Value, n: usize, field: &str) -> Result<SymMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| schema_err(field, "expected rows"))?;
    if rows.len() != n {
        return Err(schema_err(
            field,
            format!("expected {n} rows, got {}", rows.len()),
        ));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| schema_err(field, format!("row {i} not an array")))?;
        if entries.len() != n {
            return Err(schema_err(
                field,
                format!("row {i} has {} entries", entries.len()),
            ));
        }
        for e in entries {
            data.push(
                e.as_f64()
                    .ok_or_else(|| schema_err(field, "expected a number"))?,
            );
        }
    }
    SymMatrix::new(n, data).map_err(|e| schema_err(field, e.to_string()))
}

pub fn certificate_from_json(text: &str) -> Result<Certificate> {
    let root: serde_json::Value = serde_json::from_str(text)?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema_err("<root>", "expected an object"))?;
    let monomials: Vec<String> = obj
        .get("monomials")
        .ok_or_else(|| schema_err("monomials", "missing"))?
        .as_array()
        .ok_or_else(|| schema_err("monomials", "expected an array"))?
        .iter()
        .map(|m| {
            m.as_str()
                .map(str::to_string)
                .ok_or_else(|| schema_err("monomials", "expected strings"))
        })
        .collect::<Result<_>>()?;
    let n = monomials.len();
    let bound = obj
        .get("bound")
        .ok_or_else(|| schema_err("bound", "missing"))?
        .as_f64()
        .ok_or_else(|| schema_err("bound", "expected a number"))?;
    let objective = parse_matrix(
        obj.get("objective")
            .ok_or_else(|| schema_err("objective", "missing"))?,
        n,
        "objective",
    )?;
    let mut constraints = Vec::new();
    if let Some(list) = obj.get("constraints") {
        let arr = list
            .as_array()
            .ok_or_else(|| schema_err("constraints", "expected array"))?;
        for (i, entry) in arr.iter().enumerate() {
            let field = format!("constraints[{i}]");
            let o = entry
                .as_object()
                .ok_or_else(|| schema_err(&field, "expected object"))?;
            let m = parse_matrix(
                o.get("matrix")
                    .ok_or_else(|| schema_err(&field, "missing matrix"))?,
                n,
                &field,
            )?;
            let t = o
                .get("multiplier")
                .ok_or_else(|| schema_err(&field, "missing multiplier"))?
                .as_f64()
                .ok_or_else(|| schema_err(&field, "multiplier must be a number"))?;
            constraints.push((m, t));
        }
    }
    let psd_tolerance = match obj.get("psd_tolerance") {
        None => 1e-10,
        Some(v) => v
            .as_f64()
            .ok_or_else(|| schema_err("psd_tolerance", "expected a number"))?,
    };
    let sampler = match obj.get("sampler").and_then(|s| s.as_str()) {
        Some("i3322-case3") => Sampler::Case3,
        _ => Sampler::None,
    };
    let cert = Certificate {
        id: obj
            .get("id")
            .and_then(|s| s.as_str())
            .unwrap_or("user-certificate")
            .to_string(),
        monomials,
        bound,
        objective,
        constraints,
        psd_tolerance,
        sampler,
    };
    cert.validate()?;
    Ok(cert)
}

pub fn load_certificate(path: &Path) -> Result<Certificate> {
    let text = std::fs::read_to_string(path)?;
    certificate_from_json(&text)
}

pub fn certificate_to_json(c: &Certificate) -> String {
    let fmt_f64 = |x: f64| format!("{x:.16e}");
    let matrix = |m: &SymMatrix| {
        let rows: Vec<String> = (0..m.dim())
            .map(|i| {
                let entries: Vec<String> = (0..m.dim()).map(|j| fmt_f64(m.get(i, j))).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    };
    let monomials: Vec<String> = c.monomials.iter().map(|m| format!("\"{m}\"")).collect();
    let constraints: Vec<String> = c
        .constraints
        .iter()
        .map(|(m, t)| {
            format!(
                "{{\"matrix\": {}, \"multiplier\": {}}}",
                matrix(m),
                fmt_f64(*t)
            )
        })
        .collect();
    let sampler = match c.sampler {
        Sampler::Case3 => ",\n  \"sampler\": \"i3322-case3\"".to_string(),
        Sampler::None => String::new(),
    };
    format!(
        "{{\n  \"id\": \"{}\",\n  \"monomials\": [{}],\n  \"bound\": {},\n  \"objective\": {},\n  \"constraints\": [{}],\n  \"psd_tolerance\": {}{}\n}}\n",
        c.id,
        monomials.join(", "),
        fmt_f64(c.bound),
        matrix(&c.objective),
        constraints.join(", "),
        fmt_f64(c.psd_tolerance),
        sampler,
    )
}
