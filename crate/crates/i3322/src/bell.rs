//! Strategy data model, correlators, the I3322 functional, classical
//! deterministic enumeration, entanglement entropy and the strategy file
//! format.
//!
//! A strategy is a Schmidt-diagonal bipartite state (weights lambda_i >= 0
//! with sum lambda_i^2 = 1; uniform weights 1/sqrt(d) encode the maximally
//! entangled state) together with six real symmetric projectors, three per
//! party. The functional is
//!
//! ```text
//! -<A2> - <B1> - 2<B2> + <A1B1> + <A1B2> + <A2B1> + <A2B2>
//!                      - <A1B3> + <A2B3> - <A3B1> + <A3B2>
//! ```
//!
//! with `<A B> = Tr(Lambda A^T Lambda B)` and marginals taken against the
//! identity. For uniform weights this reduces to `Tr(A^T B)/d`; since all
//! stored operators are real symmetric the transpose is inert, so matrices
//! are stored untransposed.

use crate::symmat::{Projector, SymMatrix};
use crate::{Error, Result};
use std::fmt;
use std::path::Path;

/// Tolerance on |sum lambda_i^2 - 1|.
pub const SCHMIDT_TOL: f64 = 1e-10;

/// One of the six measurement operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorLabel {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
}

impl OperatorLabel {
    /// Seesaw sweep order.
    pub const ALL: [OperatorLabel; 6] = [
        OperatorLabel::A1,
        OperatorLabel::A2,
        OperatorLabel::A3,
        OperatorLabel::B1,
        OperatorLabel::B2,
        OperatorLabel::B3,
    ];
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorLabel::A1 => "A1",
            OperatorLabel::A2 => "A2",
            OperatorLabel::A3 => "A3",
            OperatorLabel::B1 => "B1",
            OperatorLabel::B2 => "B2",
            OperatorLabel::B3 => "B3",
        };
        f.write_str(s)
    }
}

/// Schmidt-diagonal state plus six projectors.
#[derive(Clone, Debug)]
pub struct Strategy {
    dim: usize,
    schmidt: Vec<f64>,
    a: [Projector; 3],
    b: [Projector; 3],
}

fn validate_schmidt(dim: usize, schmidt: &[f64]) -> Result<()> {
    if schmidt.len() != dim {
        return Err(Error::InvalidSchmidt(format!(
            "expected {dim} weights, got {}",
            schmidt.len()
        )));
    }
    if let Some(neg) = schmidt.iter().find(|&&x| x < 0.0) {
        return Err(Error::InvalidSchmidt(format!("negative weight {neg}")));
    }
    let norm: f64 = schmidt.iter().map(|x| x * x).sum();
    if (norm - 1.0).abs() > SCHMIDT_TOL {
        return Err(Error::InvalidSchmidt(format!(
            "sum of squares {norm} differs from 1 by more than {SCHMIDT_TOL:.0e}"
        )));
    }
    Ok(())
}

pub fn uniform_schmidt(dim: usize) -> Vec<f64> {
    vec![1.0 / (dim as f64).sqrt(); dim]
}

impl Strategy {
    pub fn new(schmidt: Vec<f64>, a: [Projector; 3], b: [Projector; 3]) -> Result<Self> {
        let dim = a[0].dim();
        validate_schmidt(dim, &schmidt)?;
        for (p, name) in a.iter().zip(["A1", "A2", "A3"]) {
            if p.dim() != dim {
                return Err(Error::Schema {
                    field: name.to_string(),
                    message: format!("dimension {} differs from {dim}", p.dim()),
                });
            }
        }
        for (p, name) in b.iter().zip(["B1", "B2", "B3"]) {
            if p.dim() != dim {
                return Err(Error::Schema {
                    field: name.to_string(),
                    message: format!("dimension {} differs from {dim}", p.dim()),
                });
            }
        }
        Ok(Self { dim, schmidt, a, b })
    }

    pub fn with_uniform(dim: usize, a: [Projector; 3], b: [Projector; 3]) -> Result<Self> {
        Self::new(uniform_schmidt(dim), a, b)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn schmidt(&self) -> &[f64] {
        &self.schmidt
    }

    /// True when the weights are uniform to within 1e-8 relative error.
    pub fn has_uniform_schmidt(&self) -> bool {
        let u = 1.0 / (self.dim as f64).sqrt();
        self.schmidt
            .iter()
            .all(|&x| (x - u).abs() <= 1e-8 * u.max(1.0))
    }

    pub fn operator(&self, which: OperatorLabel) -> &Projector {
        match which {
            OperatorLabel::A1 => &self.a[0],
            OperatorLabel::A2 => &self.a[1],
            OperatorLabel::A3 => &self.a[2],
            OperatorLabel::B1 => &self.b[0],
            OperatorLabel::B2 => &self.b[1],
            OperatorLabel::B3 => &self.b[2],
        }
    }

    pub fn replace_operator(&mut self, which: OperatorLabel, p: Projector) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: p.dim(),
                right: self.dim,
            });
        }
        match which {
            OperatorLabel::A1 => self.a[0] = p,
            OperatorLabel::A2 => self.a[1] = p,
            OperatorLabel::A3 => self.a[2] = p,
            OperatorLabel::B1 => self.b[0] = p,
            OperatorLabel::B2 => self.b[1] = p,
            OperatorLabel::B3 => self.b[2] = p,
        }
        Ok(())
    }

    pub fn set_schmidt(&mut self, schmidt: Vec<f64>) -> Result<()> {
        validate_schmidt(self.dim, &schmidt)?;
        self.schmidt = schmidt;
        Ok(())
    }

    /// Swaps the two parties: (A1,A2,A3) <-> (B1,B2,B3).
    pub fn swap_parties(&self) -> Strategy {
        Strategy {
            dim: self.dim,
            schmidt: self.schmidt.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// Block-diagonal direct sum with uniform weights over d1 + d2.
    /// Both inputs must themselves carry uniform weights.
    pub fn direct_sum(&self, other: &Strategy) -> Result<Strategy> {
        if !self.has_uniform_schmidt() || !other.has_uniform_schmidt() {
            return Err(Error::InvalidSchmidt(
                "direct_sum requires uniform weights on both inputs".into(),
            ));
        }
        let d = self.dim + other.dim;
        let embed = |x: &SymMatrix, y: &SymMatrix| {
            SymMatrix::from_fn(d, |i, j| {
                if i < self.dim && j < self.dim {
                    x.get(i, j)
                } else if i >= self.dim && j >= self.dim {
                    y.get(i - self.dim, j - self.dim)
                } else {
                    0.0
                }
            })
        };
        let mk = |x: &Projector, y: &Projector| Projector::new(embed(x.matrix(), y.matrix()));
        let a = [
            mk(&self.a[0], &other.a[0])?,
            mk(&self.a[1], &other.a[1])?,
            mk(&self.a[2], &other.a[2])?,
        ];
        let b = [
            mk(&self.b[0], &other.b[0])?,
            mk(&self.b[1], &other.b[1])?,
            mk(&self.b[2], &other.b[2])?,
        ];
        Strategy::with_uniform(d, a, b)
    }
}

/// `Tr(Lambda A^T Lambda B) = sum_ij lambda_i lambda_j A_ij B_ij`.
///
/// For uniform weights this is `Tr(A^T B)/d`; the transpose is a no-op on
/// the real symmetric operators used throughout.
pub fn correlator(a: &SymMatrix, b: &SymMatrix, schmidt: &[f64]) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    validate_schmidt(a.dim(), schmidt)?;
    let d = a.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += schmidt[i] * schmidt[j] * a.get(i, j) * b.get(i, j);
        }
    }
    Ok(acc)
}

/// Functional value with its eleven-term breakdown; term values carry
/// their signs, so they sum to `value`.
#[derive(Clone, Debug)]
pub struct BellValue {
    pub value: f64,
    pub terms: [(&'static str, f64); 11],
}

pub fn i3322_value(s: &Strategy) -> BellValue {
    let lam = s.schmidt();
    let id = SymMatrix::identity(s.dim());
    let c = |x: &Projector, y: &SymMatrix| correlator(x.matrix(), y, lam).expect("dims agree");
    let a1 = &s.a[0];
    let a2 = &s.a[1];
    let a3 = &s.a[2];
    let b1 = s.b[0].matrix();
    let b2 = s.b[1].matrix();
    let b3 = s.b[2].matrix();
    let terms = [
        ("-<A2>", -c(a2, &id)),
        ("-<B1>", -c(&s.b[0], &id)),
        ("-2<B2>", -2.0 * c(&s.b[1], &id)),
        ("+<A1B1>", c(a1, b1)),
        ("+<A1B2>", c(a1, b2)),
        ("+<A2B1>", c(a2, b1)),
        ("+<A2B2>", c(a2, b2)),
        ("-<A1B3>", -c(a1, b3)),
        ("+<A2B3>", c(a2, b3)),
        ("-<A3B1>", -c(a3, b1)),
        ("+<A3B2>", c(a3, b2)),
    ];
    let value = terms.iter().map(|(_, v)| v).sum();
    BellValue { value, terms }
}

/// Deterministic assignment (a1,a2,a3,b1,b2,b3) with outcomes in {0,1}.
pub type Assignment = ([u8; 3], [u8; 3]);

#[derive(Clone, Debug)]
pub struct ClassicalResult {
    /// Exact maximum over all 64 assignments (integer arithmetic).
    pub max: i64,
    pub maximizers: Vec<Assignment>,
    pub evaluated: usize,
}

/// Functional value of a deterministic assignment, exactly.
pub fn classical_value(a: [u8; 3], b: [u8; 3]) -> i64 {
    let (a1, a2, a3) = (a[0] as i64, a[1] as i64, a[2] as i64);
    let (b1, b2, b3) = (b[0] as i64, b[1] as i64, b[2] as i64);
    -a2 - b1 - 2 * b2 + a1 * b1 + a1 * b2 + a2 * b1 + a2 * b2 - a1 * b3 + a2 * b3 - a3 * b1
        + a3 * b2
}

/// Enumerates all 64 deterministic assignments.
pub fn classical_max() -> ClassicalResult {
    let mut max = i64::MIN;
    let mut maximizers = Vec::new();
    let mut evaluated = 0;
    for bits in 0..64u8 {
        let a = [bits & 1, (bits >> 1) & 1, (bits >> 2) & 1];
        let b = [(bits >> 3) & 1, (bits >> 4) & 1, (bits >> 5) & 1];
        let v = classical_value(a, b);
        evaluated += 1;
        if v > max {
            max = v;
            maximizers.clear();
        }
        if v == max {
            maximizers.push((a, b));
        }
    }
    ClassicalResult {
        max,
        maximizers,
        evaluated,
    }
}

/// Entropy of entanglement in bits: -sum lambda_i^2 log2 lambda_i^2,
/// with 0 log 0 = 0.
pub fn entanglement_entropy(schmidt: &[f64]) -> Result<f64> {
    if schmidt.is_empty() {
        return Err(Error::InvalidSchmidt("empty".into()));
    }
    validate_schmidt(schmidt.len(), schmidt)?;
    let mut h = 0.0;
    for &l in schmidt {
        let p = l * l;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    Ok(h)
}

// ---------------------------------------------------------------------------
// Strategy file format.
//
// UTF-8 JSON object {"dim": int, "schmidt": [real]*d (optional, defaults to
// uniform), "A": [matrix x3], "B": [matrix x3]} where matrix = d rows of d
// reals. Values are written with 17 significant digits so that
// load(save(s)) reproduces s bit-for-bit on the decimal representation.
// ---------------------------------------------------------------------------

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn strategy_to_json(s: &Strategy) -> String {
    let matrix = |m: &SymMatrix| {
        let rows: Vec<String> = (0..m.dim())
            .map(|i| {
                let entries: Vec<String> = (0..m.dim()).map(|j| fmt_f64(m.get(i, j))).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        format!("[\n      {}\n    ]", rows.join(",\n      "))
    };
    let triple = |ps: &[Projector; 3]| {
        let ms: Vec<String> = ps.iter().map(|p| matrix(p.matrix())).collect();
        ms.join(",\n    ")
    };
    let schmidt: Vec<String> = s.schmidt.iter().map(|&x| fmt_f64(x)).collect();
    format!
        ("{{\n  \"dim\": {},\n  \"schmidt\": [{}],\n  \"A\": [\n    {}\n  ],\n  \"B\": [\n    {}\n  ]\n}}\n",
        s.dim,
        schmidt.join(", "),
        triple(&s.a),
        triple(&s.b),
    )
}

pub fn save_strategy(s: &Strategy, path: &Path) -> Result<()> {
    std::fs::write(path, strategy_to_json(s))?;
    Ok(())
}

fn schema_err(field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

fn as_f64(v: &serde_json::Value, field: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| schema_err(field, "expected a number"))
}

fn parse_matrix(v: &serde_json::Value, dim: usize, field: &str) -> Result<SymMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| schema_err(field, "expected an array of rows"))?;
    if rows.len() != dim {
        return Err(schema_err(
            field,
            format!("expected {dim} rows, got {}", rows.len()),
        ));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| schema_err(field, format!("row {i} is not an array")))?;
        if entries.len() != dim {
            return Err(schema_err(
                field,
                format!("row {i} has {} entries, expected {dim}", entries.len()),
            ));
        }
        for e in entries {
            data.push(as_f64(e, field)?);
        }
    }
    SymMatrix::new(dim, data).map_err(|e| schema_err(field, e.to_string()))
}

pub fn strategy_from_json(text: &str) -> Result<Strategy> {
    let root: serde_json::Value = serde_json::from_str(text)?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema_err("<root>", "expected a JSON object"))?;
    let dim = obj
        .get("dim")
        .ok_or_else(|| schema_err("dim", "missing"))?
        .as_u64()
        .ok_or_else(|| schema_err("dim", "expected a positive integer"))? as usize;
    if dim == 0 {
        return Err(schema_err("dim", "must be positive"));
    }
    let schmidt = match obj.get("schmidt") {
        None => uniform_schmidt(dim),
        Some(v) => {
            let arr = v
                .as_array()
                .ok_or_else(|| schema_err("schmidt", "expected an array"))?;
            let mut out = Vec::with_capacity(arr.len());
            for e in arr {
                out.push(as_f64(e, "schmidt")?);
            }
            out
        }
    };
    validate_schmidt(dim, &schmidt).map_err(|e| schema_err("schmidt", e.to_string()))?;
    let side = |key: &str, names: [&str; 3]| -> Result<[Projector; 3]> {
        let arr = obj
            .get(key)
            .ok_or_else(|| schema_err(key, "missing"))?
            .as_array()
            .ok_or_else(|| schema_err(key, "expected an array of three matrices"))?;
        if arr.len() != 3 {
            return Err(schema_err(
                key,
                format!("expected 3 matrices, got {}", arr.len()),
            ));
        }
        let mut out = Vec::with_capacity(3);
        for (v, name) in arr.iter().zip(names) {
            let m = parse_matrix(v, dim, name)?;
            let p = Projector::with_name(m, name).map_err(|e| schema_err(name, e.to_string()))?;
            out.push(p);
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone()])
    };
    let a = side("A", ["A1", "A2", "A3"])?;
    let b = side("B", ["B1", "B2", "B3"])?;
    Strategy::new(schmidt, a, b)
}

pub fn load_strategy(path: &Path) -> Result<Strategy> {
    let text = std::fs::read_to_string(path)?;
    strategy_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};

    fn p1(c: f64) -> Projector {
        let s = (1.0 - c * c).sqrt();
        Projector::new(
            SymMatrix::from_rows(&[
                vec![(1.0 - c) / 2.0, -s / 2.0],
                vec![-s / 2.0, (1.0 + c) / 2.0],
            ])
            .unwrap(),
        )
        .unwrap()
    }

    fn p2(c: f64) -> Projector {
        let s = (1.0 - c * c).sqrt();
        Projector::new(
            SymMatrix::from_rows(&[
                vec![(1.0 - c) / 2.0, s / 2.0],
                vec![s / 2.0, (1.0 + c) / 2.0],
            ])
            .unwrap(),
        )
        .unwrap()
    }

    fn p3() -> Projector {
        Projector::new(SymMatrix::from_fn(2, |_, _| 0.5)).unwrap()
    }

    /// The hand-built one-EPR-pair strategy: A1=B1=P1(-sqrt(3)/2),
    /// A2=B2=P2(-sqrt(3)/2), A3=B3=P3. Evaluates to exactly 1/4.
    pub(crate) fn epr_quarter_strategy() -> Strategy {
        let c = -(3.0f64).sqrt() / 2.0;
        Strategy::with_uniform(2, [p1(c), p2(c), p3()], [p1(c), p2(c), p3()]).unwrap()
    }

    #[test]
    fn correlator_identity_normalization() {
        let id = SymMatrix::identity(2);
        let v = correlator(&id, &id, &uniform_schmidt(2)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlator_orthogonal_supports() {
        let a = SymMatrix::diag(&[1.0, 0.0]);
        let b = SymMatrix::diag(&[0.0, 1.0]);
        let v = correlator(&a, &b, &uniform_schmidt(2)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn correlator_product_state_reduction() {
        let m = p3().into_matrix();
        let v = correlator(&m, &m, &[1.0, 0.0]).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn correlator_rejects_dim_mismatch() {
        let a = SymMatrix::identity(2);
        let b = SymMatrix::identity(3);
        assert!(correlator(&a, &b, &uniform_schmidt(2)).is_err());
    }

    #[test]
    fn functional_zero_strategy() {
        let z = || Projector::new(SymMatrix::zeros(3)).unwrap();
        let s = Strategy::with_uniform(3, [z(), z(), z()], [z(), z(), z()]).unwrap();
        assert_eq!(i3322_value(&s).value, 0.0);
    }

    #[test]
    fn functional_identity_strategy() {
        let id = || Projector::new(SymMatrix::identity(3)).unwrap();
        let s = Strategy::with_uniform(3, [id(), id(), id()], [id(), id(), id()]).unwrap();
        // -4 from the marginals, +4 from the positive product terms, the
        // remaining four terms cancel pairwise.
        assert!(i3322_value(&s).value.abs() < 1e-14);
    }

    #[test]
    fn functional_one_epr_pair_quarter() {
        let v = i3322_value(&epr_quarter_strategy());
        assert!((v.value - 0.25).abs() < 1e-12, "value {}", v.value);
    }

    #[test]
    fn breakdown_sums_to_value() {
        let mut rng = sampling::rng(21);
        for _ in 0..50 {
            let s = sampling::random_strategy(&mut rng, 4);
            let bv = i3322_value(&s);
            let sum: f64 = bv.terms.iter().map(|(_, v)| v).sum();
            assert!((sum - bv.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn uniform_correlator_equals_trace_over_d() {
        let mut rng = sampling::rng(22);
        for trial in 0..1000 {
            let dim = 2 + trial % 6;
            let a = sampling::random_symmetric(&mut rng, dim, 1.0);
            let b = sampling::random_symmetric(&mut rng, dim, 1.0);
            let lhs = correlator(&a, &b, &uniform_schmidt(dim)).unwrap();
            let rhs = a.inner(&b).unwrap() / dim as f64;
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn functional_linearity_under_direct_sum() {
        let mut rng = sampling::rng(23);
        for _ in 0..20 {
            let s1 = sampling::random_strategy(&mut rng, 2);
            let s2 = sampling::random_strategy(&mut rng, 3);
            let v1 = i3322_value(&s1).value;
            let v2 = i3322_value(&s2).value;
            let sum = s1.direct_sum(&s2).unwrap();
            let expected = (2.0 * v1 + 3.0 * v2) / 5.0;
            assert!((i3322_value(&sum).value - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn classical_assignment_examples() {
        assert_eq!(classical_value([0, 0, 0], [0, 0, 0]), 0);
        assert_eq!(classical_value([1, 1, 0], [1, 0, 0]), 0);
    }

    #[test]
    fn classical_max_is_zero() {
        let r = classical_max();
        assert_eq!(r.max, 0);
        assert_eq!(r.evaluated, 64);
        assert!(!r.maximizers.is_empty());
        assert!(r.maximizers.contains(&([0, 0, 0], [0, 0, 0])));
    }

    #[test]
    fn entropy_examples() {
        assert!((entanglement_entropy(&uniform_schmidt(4)).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(entanglement_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        let h = entanglement_entropy(&[(3.0f64).sqrt() / 2.0, 0.5]).unwrap();
        let expect = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((h - expect).abs() < 1e-12);
        assert!((h - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn file_roundtrip_is_bit_exact() {
        let s = epr_quarter_strategy();
        let text = strategy_to_json(&s);
        let back = strategy_from_json(&text).unwrap();
        assert_eq!(strategy_to_json(&back), text);
        assert!((i3322_value(&back).value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn file_missing_schmidt_defaults_to_uniform() {
        let text = r#"{"dim": 2,
            "A": [[[0,0],[0,0]], [[0,0],[0,0]], [[0,0],[0,0]]],
            "B": [[[0,0],[0,0]], [[0,0],[0,0]], [[0,0],[0,0]]]}"#;
        let s = strategy_from_json(text).unwrap();
        assert!(s.has_uniform_schmidt());
    }

    #[test]
    fn file_asymmetric_a1_names_field() {
        let text = r#"{"dim": 2,
            "A": [[[0,0.5],[0,0]], [[0,0],[0,0]], [[0,0],[0,0]]],
            "B": [[[0,0],[0,0]], [[0,0],[0,0]], [[0,0],[0,0]]]}"#;
        let err = strategy_from_json(text).unwrap_err();
        match err {
            Error::Schema { field, .. } => assert_eq!(field, "A1"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn file_non_projector_names_field() {
        let text = r#"{"dim": 2,
            "A": [[[0,0],[0,0]], [[0.5,0],[0,0.5]], [[0,0],[0,0]]],
            "B": [[[0,0],[0,0]], [[0,0],[0,0]], [[0,0],[0,0]]]}"#;
        let err = strategy_from_json(text).unwrap_err();
        match err {
            Error::Schema { field, .. } => assert_eq!(field, "A2"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn file_truncated_is_an_error() {
        assert!(strategy_from_json("{\"dim\": 2, \"A\": [").is_err());
    }

    proptest! {
        #[test]
        fn prop_entropy_bounded_by_log_dim(seed in 0u64..500) {
            let mut rng = sampling::rng(seed);
            let dim = 2 + (seed as usize) % 6;
            let raw: Vec<f64> = (0..dim).map(|_| rand::Rng::gen_range(&mut rng, 0.0..1.0)).collect();
            let norm: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            let schmidt: Vec<f64> = raw.iter().map(|x| x / norm).collect();
            let h = entanglement_entropy(&schmidt).unwrap();
            prop_assert!(h >= -1e-12 && h <= (dim as f64).log2() + 1e-9);
        }

        #[test]
        fn prop_serialized_values_roundtrip(x in -1.0f64..1.0) {
            let text = fmt_f64(x);
            let back: f64 = text.parse().unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
