//! Best-response updates, seesaw ascent over strategies, and
//! coefficient-space optimization of normal forms.
//!
//! Each operator appears linearly in the functional, so for fixed
//! partners the optimal replacement is the projector onto the positive
//! eigenspace of its effective operator:
//!
//! ```text
//! A1 <- B1 + B2 - B3          B1 <- A1 + A2 - A3 - Id
//! A2 <- B1 + B2 + B3 - Id     B2 <- A1 + A2 + A3 - 2 Id
//! A3 <- B2 - B1               B3 <- A2 - A1
//! ```
//!
//! With non-uniform Schmidt weights the effective operator is conjugated
//! by Lambda = diag(lambda) first; for uniform weights that is a positive
//! rescaling and the projector is unchanged.

use crate::bell::{i3322_value, OperatorLabel, Strategy};
use crate::bounds::omega_closed;
use crate::structure::{build_normal_form, Branch, NormalFormSpec};
use crate::symmat::{eig_sym, positive_eigenspace_projector, Projector, SymMatrix};
use crate::{par, sampling, Error, Result};

/// Signed effective operator whose positive eigenspace is the best
/// response for `which`.
pub fn effective_operator(s: &Strategy, which: OperatorLabel) -> SymMatrix {
    use OperatorLabel as L;
    let m = |l: L| s.operator(l).matrix();
    let id = SymMatrix::identity(s.dim());
    let combine = |terms: &[(&SymMatrix, f64)]| {
        let mut acc = SymMatrix::zeros(s.dim());
        for (t, w) in terms {
            acc = acc.add(&t.scale(*w)).expect("same dim");
        }
        acc
    };
    match which {
        L::A1 => combine(&[(m(L::B1), 1.0), (m(L::B2), 1.0), (m(L::B3), -1.0)]),
        L::A2 => combine(&[
            (m(L::B1), 1.0),
            (m(L::B2), 1.0),
            (m(L::B3), 1.0),
            (&id, -1.0),
        ]),
        L::A3 => combine(&[(m(L::B2), 1.0), (m(L::B1), -1.0)]),
        L::B1 => combine(&[
            (m(L::A1), 1.0),
            (m(L::A2), 1.0),
            (m(L::A3), -1.0),
            (&id, -1.0),
        ]),
        L::B2 => combine(&[
            (m(L::A1), 1.0),
            (m(L::A2), 1.0),
            (m(L::A3), 1.0),
            (&id, -2.0),
        ]),
        L::B3 => combine(&[(m(L::A2), 1.0), (m(L::A1), -1.0)]),
    }
}

/// Optimal replacement for one operator; never decreases the value.
pub fn best_response(s: &Strategy, which: OperatorLabel) -> Projector {
    let mut eff = effective_operator(s, which);
    if !s.has_uniform_schmidt() {
        let lam = s.schmidt();
        eff = SymMatrix::from_fn(s.dim(), |i, j| lam[i] * lam[j] * eff.get(i, j));
    }
    positive_eigenspace_projector(&eff)
}

#[derive(Clone, Debug)]
pub struct SeesawStep {
    pub sweep: usize,
    pub operator: OperatorLabel,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct SeesawTrace {
    pub steps: Vec<SeesawStep>,
    pub final_value: f64,
    pub converged: bool,
    pub sweeps: usize,
    pub seed: u64,
}

impl SeesawTrace {
    /// Smallest per-step value change; monotone ascent keeps this above
    /// -1e-12.
    pub fn min_step_delta(&self, initial_value: f64) -> f64 {
        let mut prev = initial_value;
        let mut min_delta = f64::INFINITY;
        for step in &self.steps {
            min_delta = min_delta.min(step.value - prev);
            prev = step.value;
        }
        min_delta
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SeesawParams {
    pub max_sweeps: usize,
    pub tol: f64,
}

impl Default for SeesawParams {
    fn default() -> Self {
        // Convergence tolerance per sweep; bound on sweeps as a safety net.
        Self {
            max_sweeps: 10_000,
            tol: 1e-10,
        }
    }
}

/// Cyclic best-response ascent in the fixed order A1, A2, A3, B1, B2, B3
/// until the per-sweep improvement drops below `tol`.
pub fn seesaw(initial: &Strategy, params: &SeesawParams) -> Result<(Strategy, SeesawTrace)> {
    let mut s = initial.clone();
    let mut steps = Vec::new();
    let mut value = i3322_value(&s).value;
    let mut converged = false;
    let mut sweeps = 0;
    for sweep in 0..params.max_sweeps {
        let before = value;
        for which in OperatorLabel::ALL {
            let p = best_response(&s, which);
            s.replace_operator(which, p)?;
            value = i3322_value(&s).value;
            steps.push(SeesawStep {
                sweep,
                operator: which,
                value,
            });
        }
        sweeps = sweep + 1;
        if value - before < params.tol {
            converged = true;
            break;
        }
    }
    let trace = SeesawTrace {
        steps,
        final_value: value,
        converged,
        sweeps,
        seed: 0,
    };
    Ok((s, trace))
}

#[derive(Clone, Debug)]
pub struct RestartSummary {
    pub index: usize,
    pub final_value: f64,
    pub converged: bool,
    pub sweeps: usize,
    /// Minimum per-step value change over the whole trace (>= -1e-12 for
    /// monotone ascent).
    pub min_step_delta: f64,
}

#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub best: Strategy,
    pub best_value: f64,
    pub best_index: usize,
    pub summaries: Vec<RestartSummary>,
}

fn run_one_restart(
    dim: usize,
    seed: u64,
    index: usize,
    params: &SeesawParams,
) -> (Strategy, RestartSummary) {
    let mut rng = sampling::substream(seed, index as u64);
    let initial = sampling::random_strategy(&mut rng, dim);
    let initial_value = i3322_value(&initial).value;
    let (s, trace) = seesaw(&initial, params).expect("seesaw on valid strategy");
    let summary = RestartSummary {
        index,
        final_value: trace.final_value,
        converged: trace.converged,
        sweeps: trace.sweeps,
        min_step_delta: trace.min_step_delta(initial_value),
    };
    (s, summary)
}

fn pick_best(results: Vec<(Strategy, RestartSummary)>) -> RestartOutcome {
    let mut best: Option<(Strategy, f64, usize)> = None;
    let mut summaries = Vec::with_capacity(results.len());
    for (s, summary) in results {
        let replace = match &best {
            None => true,
            Some((_, v, _)) => summary.final_value > *v,
        };
        if replace {
            best = Some((s, summary.final_value, summary.index));
        }
        summaries.push(summary);
    }
    let (best, best_value, best_index) = best.expect("at least one restart");
    RestartOutcome {
        best,
        best_value,
        best_index,
        summaries,
    }
}

/// Seeded random restarts with uniform Schmidt weights; the best final
/// value wins, ties resolved toward the smallest restart index.
pub fn seesaw_restarts(
    dim: usize,
    restarts: usize,
    seed: u64,
    params: &SeesawParams,
) -> RestartOutcome {
    let results = par::map_indexed(restarts, |i| run_one_restart(dim, seed, i, params));
    pick_best(results)
}

/// Sequential twin of [`seesaw_restarts`] for benchmarking.
pub fn seesaw_restarts_sequential(
    dim: usize,
    restarts: usize,
    seed: u64,
    params: &SeesawParams,
) -> RestartOutcome {
    let results = par::map_indexed_sequential(restarts, |i| run_one_restart(dim, seed, i, params));
    pick_best(results)
}

// ---------------------------------------------------------------------------
// Coefficient-space optimization
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct OptimizeParams {
    /// Coarse grid step over each interior coefficient in [-1, 1].
    pub grid_step: f64,
    /// Rounds of cyclic per-coordinate golden-section refinement.
    pub refine_rounds: usize,
    /// Extra seeded random interior starts refined alongside the grid best.
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for OptimizeParams {
    fn default() -> Self {
        Self {
            grid_step: 0.25,
            refine_rounds: 100,
            random_starts: 4,
            seed: 0,
        }
    }
}

const GRID_BUDGET: usize = 500_000;

fn spec_value(branch: Branch, dim: usize, coeffs: &[f64]) -> f64 {
    let spec = match NormalFormSpec::new(branch, dim, coeffs.to_vec()) {
        Ok(s) => s,
        Err(_) => return f64::NEG_INFINITY,
    };
    if branch.is_exchanged() {
        match build_normal_form(&spec) {
            Ok(s) => i3322_value(&s).value,
            Err(_) => f64::NEG_INFINITY,
        }
    } else {
        omega_closed(&spec).unwrap_or(f64::NEG_INFINITY)
    }
}

fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, iters: usize) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

struct Candidate {
    coeffs: Vec<f64>,
    value: f64,
}

fn refine_candidate(
    branch: Branch,
    dim: usize,
    interior: &[usize],
    mut coeffs: Vec<f64>,
    rounds: usize,
) -> Candidate {
    let mut value = spec_value(branch, dim, &coeffs);
    for _ in 0..rounds {
        let before = value;
        for &idx in interior {
            let mut probe = coeffs.clone();
            let best_x = golden_max(
                |x| {
                    probe[idx] = x;
                    spec_value(branch, dim, &probe)
                },
                -1.0,
                1.0,
                80,
            );
            probe[idx] = best_x;
            let v = spec_value(branch, dim, &probe);
            // Golden section assumes unimodality; only accept improvements.
            if v >= value {
                coeffs[idx] = best_x;
                value = v;
            }
        }
        if value - before < 1e-15 {
            break;
        }
    }
    Candidate { coeffs, value }
}

/// Coarse grid over the free coefficients (boundary entries enumerated
/// over {-1, +1}) followed by cyclic golden-section refinement. The
/// returned value is recomputed by direct strategy evaluation.
pub fn optimize_omega(
    branch: Branch,
    dim: usize,
    params: &OptimizeParams,
) -> Result<(NormalFormSpec, f64)> {
    let len = NormalFormSpec::coeff_len(branch, dim)?;
    let (boundary, interior): (Vec<usize>, Vec<usize>) = match branch {
        Branch::Cyclic => (vec![], (0..len).collect()),
        _ => (
            if len == 1 { vec![0] } else { vec![0, len - 1] },
            (1..len.saturating_sub(1)).collect(),
        ),
    };
    let m = interior.len();
    let n_per_axis = {
        let wanted = (2.0 / params.grid_step).round() as usize + 1;
        let mut n = wanted.max(2);
        while m > 0 && n.pow(m as u32) > GRID_BUDGET && n > 3 {
            n -= 1;
        }
        n
    };
    let grid_point = |i: usize| -1.0 + 2.0 * i as f64 / (n_per_axis - 1) as f64;

    let boundary_combos: Vec<Vec<f64>> = match boundary.len() {
        0 => vec![vec![]],
        1 => vec![vec![-1.0], vec![1.0]],
        _ => vec![
            vec![-1.0, -1.0],
            vec![-1.0, 1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
        ],
    };

    let mut candidates: Vec<Candidate> = Vec::new();
    for combo in &boundary_combos {
        let assemble = |interior_vals: &[f64]| {
            let mut coeffs = vec![0.0; len];
            for (slot, v) in boundary.iter().zip(combo) {
                coeffs[*slot] = *v;
            }
            for (slot, v) in interior.iter().zip(interior_vals) {
                coeffs[*slot] = *v;
            }
            coeffs
        };
        let total = n_per_axis.pow(m as u32);
        let evals = par::map_indexed(total, |flat| {
            let mut rem = flat;
            let mut vals = vec![0.0; m];
            for v in vals.iter_mut().rev() {
                *v = grid_point(rem % n_per_axis);
                rem /= n_per_axis;
            }
            let coeffs = assemble(&vals);
            (spec_value(branch, dim, &coeffs), coeffs)
        });
        let mut best: Option<(f64, Vec<f64>)> = None;
        for (v, coeffs) in evals {
            let replace = match &best {
                None => true,
                Some((bv, _)) => v > *bv,
            };
            if replace {
                best = Some((v, coeffs));
            }
        }
        let (_, start) = best.expect("non-empty grid");
        candidates.push(refine_candidate(
            branch,
            dim,
            &interior,
            start,
            params.refine_rounds,
        ));

        // Seeded extra starts guard against grid-local optima.
        let mut rng = sampling::substream(params.seed, candidates.len() as u64);
        for _ in 0..params.random_starts {
            let vals: Vec<f64> = (0..m)
                .map(|_| rand::Rng::gen_range(&mut rng, -1.0..=1.0))
                .collect();
            let start = assemble(&vals);
            candidates.push(refine_candidate(
                branch,
                dim,
                &interior,
                start,
                params.refine_rounds,
            ));
        }
    }

    let mut best = candidates
        .pop()
        .ok_or_else(|| Error::InvalidSpec("optimizer produced no candidates".into()))?;
    for c in candidates {
        let replace = c.value > best.value
            || (c.value == best.value
                && c.coeffs
                    .iter()
                    .zip(&best.coeffs)
                    .find_map(|(a, b)| match a.total_cmp(b) {
                        std::cmp::Ordering::Equal => None,
                        ord => Some(ord == std::cmp::Ordering::Less),
                    })
                    .unwrap_or(false));
        if replace {
            best = c;
        }
    }
    let spec = NormalFormSpec::new(branch, dim, best.coeffs)?;
    let direct = i3322_value(&build_normal_form(&spec)?).value;
    Ok((spec, direct))
}

// ---------------------------------------------------------------------------
// Schmidt-weight seesaw
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct SchmidtParams {
    /// Outer rounds, each one operator-seesaw to convergence plus one
    /// guarded weight update.
    pub max_rounds: usize,
    pub tol: f64,
    /// Inner operator-seesaw parameters per round.
    pub inner: SeesawParams,
}

impl Default for SchmidtParams {
    fn default() -> Self {
        Self {
            max_rounds: 100,
            tol: 1e-10,
            inner: SeesawParams {
                max_sweeps: 500,
                tol: 1e-11,
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct SchmidtOutcome {
    pub best: Strategy,
    pub best_value: f64,
    pub best_index: usize,
    pub entropy: f64,
    pub summaries: Vec<RestartSummary>,
}

/// Quadratic form M with value(lambda) = lambda^T M lambda for fixed
/// operators: the signed sum of entrywise products over the eleven terms.
fn weight_form(s: &Strategy) -> SymMatrix {
    use OperatorLabel as L;
    let id = SymMatrix::identity(s.dim());
    let m = |l: L| s.operator(l).matrix();
    let terms: [(&SymMatrix, &SymMatrix, f64); 11] = [
        (m(L::A2), &id, -1.0),
        (m(L::B1), &id, -1.0),
        (m(L::B2), &id, -2.0),
        (m(L::A1), m(L::B1), 1.0),
        (m(L::A1), m(L::B2), 1.0),
        (m(L::A2), m(L::B1), 1.0),
        (m(L::A2), m(L::B2), 1.0),
        (m(L::A1), m(L::B3), -1.0),
        (m(L::A2), m(L::B3), 1.0),
        (m(L::A3), m(L::B1), -1.0),
        (m(L::A3), m(L::B2), 1.0),
    ];
    SymMatrix::from_fn(s.dim(), |i, j| {
        terms
            .iter()
            .map(|(x, y, w)| w * x.get(i, j) * y.get(i, j))
            .sum()
    })
}

/// One guarded weight update: move lambda to the entrywise absolute value
/// of the top eigenvector of the weight form, keeping the move only if the
/// true functional does not decrease.
fn weight_step(s: &mut Strategy) -> Result<f64> {
    let before = i3322_value(s).value;
    let spec = eig_sym(&weight_form(s));
    let top = spec.basis.column(0);
    let mut lam: Vec<f64> = top.iter().map(|x| x.abs()).collect();
    let norm: f64 = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Ok(before);
    }
    for x in lam.iter_mut() {
        *x /= norm;
    }
    let old = s.schmidt().to_vec();
    s.set_schmidt(lam)?;
    let after = i3322_value(s).value;
    if after < before {
        s.set_schmidt(old)?;
        return Ok(before);
    }
    Ok(after)
}

/// Applies the shifted Bell operator to a state matrix: for
/// |psi> = sum M_ij |i>|j>, the functional is
/// `sum_k sign_k Tr(M^T X_k M Y_k)` and one power-iteration step is
/// `M <- sum_k sign_k X_k M Y_k + shift * M`.
fn bell_operator_apply(s: &Strategy, m: &SymMatrixFree, shift: f64) -> SymMatrixFree {
    use OperatorLabel as L;
    let d = s.dim();
    let id = SymMatrix::identity(d);
    let op = |l: L| s.operator(l).matrix();
    let terms: [(&SymMatrix, &SymMatrix, f64); 11] = [
        (op(L::A2), &id, -1.0),
        (&id, op(L::B1), -1.0),
        (&id, op(L::B2), -2.0),
        (op(L::A1), op(L::B1), 1.0),
        (op(L::A1), op(L::B2), 1.0),
        (op(L::A2), op(L::B1), 1.0),
        (op(L::A2), op(L::B2), 1.0),
        (op(L::A1), op(L::B3), -1.0),
        (op(L::A2), op(L::B3), 1.0),
        (op(L::A3), op(L::B1), -1.0),
        (op(L::A3), op(L::B2), 1.0),
    ];
    let mut out = vec![0.0; d * d];
    for (x, y, w) in terms {
        // w * X M Y
        let mut xm = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += x.get(i, k) * m.0[k * d + j];
                }
                xm[i * d + j] = acc;
            }
        }
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += xm[i * d + k] * y.get(k, j);
                }
                out[i * d + j] += w * acc;
            }
        }
    }
    for (o, v) in out.iter_mut().zip(&m.0) {
        *o += shift * v;
    }
    SymMatrixFree(out)
}

/// Plain d x d state matrix (not necessarily symmetric).
struct SymMatrixFree(Vec<f64>);

/// Guarded full-state step: power-iterate the state matrix toward the top
/// eigenvector of the Bell operator, re-extract Schmidt weights by SVD and
/// absorb the rotations into the operators. Kept only if the functional
/// does not decrease.
fn full_state_step(s: &mut Strategy) -> Result<f64> {
    let before = i3322_value(s).value;
    let d = s.dim();
    let mut m = SymMatrixFree({
        let mut v = vec![0.0; d * d];
        for (i, &l) in s.schmidt().iter().enumerate() {
            v[i * d + i] = l;
        }
        v
    });
    let shift = 12.0;
    for _ in 0..200 {
        m = bell_operator_apply(s, &m, shift);
        let norm: f64 = m.0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return Ok(before);
        }
        for x in m.0.iter_mut() {
            *x /= norm;
        }
    }
    // SVD of the state matrix via the two Gram matrices.
    let mm_t = SymMatrix::from_fn(d, |i, j| {
        (0..d).map(|k| m.0[i * d + k] * m.0[j * d + k]).sum()
    });
    let mt_m = SymMatrix::from_fn(d, |i, j| {
        (0..d).map(|k| m.0[k * d + i] * m.0[k * d + j]).sum()
    });
    let u = eig_sym(&mm_t).basis;
    let v_basis = eig_sym(&mt_m).basis;
    // Diagonal of U^T M V, signs folded into lambda's magnitude.
    let mut lam = Vec::with_capacity(d);
    let mut v_cols: Vec<Vec<f64>> = (0..d).map(|j| v_basis.column(j).to_vec()).collect();
    for i in 0..d {
        let ui = u.column(i);
        let mut di = 0.0;
        for r in 0..d {
            let mut acc = 0.0;
            for c in 0..d {
                acc += m.0[r * d + c] * v_cols[i][c];
            }
            di += ui[r] * acc;
        }
        if di < 0.0 {
            for x in v_cols[i].iter_mut() {
                *x = -*x;
            }
            di = -di;
        }
        lam.push(di.max(0.0));
    }
    let norm: f64 = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Ok(before);
    }
    for x in lam.iter_mut() {
        *x /= norm;
    }
    let v_fixed = match crate::symmat::Basis::from_columns(d, v_cols) {
        Ok(b) => b,
        Err(_) => return Ok(before), // degenerate SVD; skip the move
    };
    use OperatorLabel as L;
    let conj = |basis: &crate::symmat::Basis, l: L| -> Result<Projector> {
        Projector::new(basis.conjugate_down(s.operator(l).matrix())?)
    };
    let a = [conj(&u, L::A1)?, conj(&u, L::A2)?, conj(&u, L::A3)?];
    let b = [
        conj(&v_fixed, L::B1)?,
        conj(&v_fixed, L::B2)?,
        conj(&v_fixed, L::B3)?,
    ];
    let candidate = Strategy::new(lam, a, b)?;
    let after = i3322_value(&candidate).value;
    if after >= before {
        *s = candidate;
        Ok(after)
    } else {
        Ok(before)
    }
}

/// The one-EPR-pair optimum embedded in dimension `dim` with weights
/// (1/sqrt(2), 1/sqrt(2), 0, ...). Evaluates to exactly 1/4 and serves as
/// the deterministic warm start for the free-weight search.
pub fn embedded_epr_strategy(dim: usize) -> Result<Strategy> {
    if dim < 2 {
        return Err(Error::BadDimension {
            what: "embedded EPR",
            dim,
        });
    }
    let epr = build_normal_form(&NormalFormSpec::cyclic_optimal(2)?)?;
    let embed = |m: &SymMatrix| {
        SymMatrix::from_fn(dim, |i, j| if i < 2 && j < 2 { m.get(i, j) } else { 0.0 })
    };
    let mk = |l: OperatorLabel| Projector::new(embed(epr.operator(l).matrix()));
    use OperatorLabel as L;
    let a = [mk(L::A1)?, mk(L::A2)?, mk(L::A3)?];
    let b = [mk(L::B1)?, mk(L::B2)?, mk(L::B3)?];
    let mut lam = vec![0.0; dim];
    lam[0] = 0.5f64.sqrt();
    lam[1] = 0.5f64.sqrt();
    Strategy::new(lam, a, b)
}

fn schmidt_initial(dim: usize, seed: u64, index: usize) -> Strategy {
    if index == 0 {
        if let Ok(s) = embedded_epr_strategy(dim) {
            return s;
        }
    }
    let mut rng = sampling::substream(seed, index as u64 + 0x5eed);
    if index == 1 && dim > 2 {
        // EPR blocks plus random operators on the complement, with weights
        // leaking into the extra directions: a foothold above 1/4.
        if let Ok(epr) = embedded_epr_strategy(dim) {
            let mut s = epr;
            let rest = dim - 2;
            for which in OperatorLabel::ALL {
                let tail = sampling::random_projector_any_rank(&mut rng, rest);
                let head = s.operator(which).matrix().clone();
                let combined = SymMatrix::from_fn(dim, |i, j| {
                    if i < 2 && j < 2 {
                        head.get(i, j)
                    } else if i >= 2 && j >= 2 {
                        tail.matrix().get(i - 2, j - 2)
                    } else {
                        0.0
                    }
                });
                s.replace_operator(which, Projector::new(combined).expect("block projector"))
                    .expect("same dim");
            }
            let eps = 0.3;
            let mut lam = vec![eps; dim];
            lam[0] = 1.0;
            lam[1] = 1.0;
            let norm: f64 = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in lam.iter_mut() {
                *x /= norm;
            }
            s.set_schmidt(lam).expect("valid weights");
            return s;
        }
    }
    // Fully random restart: random projectors and random non-uniform
    // starting weights.
    let mut s = sampling::random_strategy(&mut rng, dim);
    let mut lam: Vec<f64> = (0..dim)
        .map(|_| {
            let x: f64 = rand::Rng::sample(&mut rng, rand_distr::StandardNormal);
            x.abs().max(1e-3)
        })
        .collect();
    let norm: f64 = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in lam.iter_mut() {
        *x /= norm;
    }
    s.set_schmidt(lam).expect("valid weights");
    s
}

/// Free-weight ascent from a given strategy: rounds of operator seesaw,
/// guarded weight step, and guarded full-state step.
pub fn schmidt_seesaw_from(
    initial: &Strategy,
    params: &SchmidtParams,
) -> Result<(Strategy, RestartSummary)> {
    let mut s = initial.clone();
    let mut value = i3322_value(&s).value;
    let mut min_delta = f64::INFINITY;
    let mut converged = false;
    let mut rounds = 0;
    for round in 0..params.max_rounds {
        let before = value;
        let (next, trace) = seesaw(&s, &params.inner)?;
        min_delta = min_delta.min(trace.min_step_delta(value));
        s = next;
        value = trace.final_value;
        let v = weight_step(&mut s)?;
        min_delta = min_delta.min(v - value);
        value = v;
        let v = full_state_step(&mut s)?;
        min_delta = min_delta.min(v - value);
        value = v;
        rounds = round + 1;
        if value - before < params.tol {
            converged = true;
            break;
        }
    }
    let summary = RestartSummary {
        index: 0,
        final_value: value,
        converged,
        sweeps: rounds,
        min_step_delta: min_delta,
    };
    Ok((s, summary))
}

fn run_one_schmidt(
    dim: usize,
    seed: u64,
    index: usize,
    params: &SchmidtParams,
) -> (Strategy, RestartSummary) {
    let s = schmidt_initial(dim, seed, index);
    let (out, mut summary) = schmidt_seesaw_from(&s, params).expect("valid strategy");
    summary.index = index;
    (out, summary)
}

/// Free-weight seesaw: alternates operator best responses with guarded
/// Schmidt-weight updates. Restart 0 is the embedded one-EPR-pair warm
/// start, so the best value never falls below 1/4 (minus rounding).
pub fn schmidt_seesaw(
    dim: usize,
    restarts: usize,
    seed: u64,
    params: &SchmidtParams,
) -> Result<SchmidtOutcome> {
    if dim < 2 {
        return Err(Error::BadDimension {
            what: "schmidt_seesaw",
            dim,
        });
    }
    let results = par::map_indexed(restarts.max(1), |i| run_one_schmidt(dim, seed, i, params));
    let outcome = pick_best(results);
    let entropy = crate::bell::entanglement_entropy(outcome.best.schmidt())?;
    Ok(SchmidtOutcome {
        best: outcome.best,
        best_value: outcome.best_value,
        best_index: outcome.best_index,
        entropy,
        summaries: outcome.summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    const SQRT3_2: f64 = 0.866_025_403_784_438_6;

    fn cyclic_quarter() -> Strategy {
        build_normal_form(&NormalFormSpec::cyclic_optimal(2).unwrap()).unwrap()
    }

    #[test]
    fn a3_best_response_on_chain_form() {
        // On a chain normal form, B2 - B1 is the off-diagonal swap on each
        // B-side 2-dim block and zero on the 1-dim boundary blocks, so the
        // A3 update is P3 per block and zero at the boundary.
        let spec = NormalFormSpec::new(Branch::ChainEven, 4, vec![1.0, 0.3, -1.0]).unwrap();
        let s = build_normal_form(&spec).unwrap();
        let a3 = best_response(&s, OperatorLabel::A3);
        let mut expected = SymMatrix::zeros(4);
        for (i, j) in [(1, 1), (1, 2), (2, 2)] {
            expected.set_sym(i, j, 0.5);
        }
        assert!(a3.matrix().max_abs_diff(&expected) < 1e-12);
        assert_eq!(a3.rank(), 1);
    }

    #[test]
    fn b3_best_response_vanishes_when_a1_equals_a2() {
        let mut rng = sampling::rng(41);
        let p = sampling::random_projector(&mut rng, 3, 2);
        let q = sampling::random_projector(&mut rng, 3, 1);
        let r = sampling::random_projector(&mut rng, 3, 1);
        let t = sampling::random_projector(&mut rng, 3, 2);
        let u = sampling::random_projector(&mut rng, 3, 1);
        let s = Strategy::with_uniform(3, [p.clone(), p, q], [r, t, u]).unwrap();
        let b3 = best_response(&s, OperatorLabel::B3);
        assert_eq!(b3.rank(), 0);
        assert_eq!(b3.matrix().fro_norm(), 0.0);
    }

    #[test]
    fn best_response_beats_random_alternatives() {
        let mut rng = sampling::rng(42);
        let s = sampling::random_strategy(&mut rng, 2);
        let old = i3322_value(&s).value;
        let mut updated = s.clone();
        updated
            .replace_operator(OperatorLabel::A1, best_response(&s, OperatorLabel::A1))
            .unwrap();
        let new = i3322_value(&updated).value;
        assert!(new >= old - 1e-12);
        for _ in 0..10_000 {
            let rank = rng.gen_range(0..=2);
            let alt = sampling::random_projector(&mut rng, 2, rank);
            let mut probe = s.clone();
            probe.replace_operator(OperatorLabel::A1, alt).unwrap();
            assert!(i3322_value(&probe).value <= new + 1e-12);
        }
    }

    #[test]
    fn seesaw_fixed_point_at_quarter() {
        let s = cyclic_quarter();
        let (out, trace) = seesaw(&s, &SeesawParams::default()).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.sweeps, 1);
        assert!((trace.final_value - 0.25).abs() < 1e-12);
        assert!(
            out.operator(OperatorLabel::A1)
                .matrix()
                .max_abs_diff(s.operator(OperatorLabel::A1).matrix())
                < 1e-9
        );
    }

    #[test]
    fn seesaw_zero_strategy_is_stationary() {
        let z = || Projector::new(SymMatrix::zeros(3)).unwrap();
        let s = Strategy::with_uniform(3, [z(), z(), z()], [z(), z(), z()]).unwrap();
        let (_, trace) = seesaw(&s, &SeesawParams::default()).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.final_value, 0.0);
        assert!(trace.steps.iter().all(|st| st.value == 0.0));
    }

    #[test]
    fn seesaw_random_qubit_bounded_by_quarter() {
        for seed in 0..10 {
            let mut rng = sampling::rng(seed);
            let s = sampling::random_strategy(&mut rng, 2);
            let init = i3322_value(&s).value;
            let (_, trace) = seesaw(&s, &SeesawParams::default()).unwrap();
            assert!(
                trace.final_value <= 0.25 + 1e-9,
                "seed {seed}: {}",
                trace.final_value
            );
            assert!(trace.min_step_delta(init) >= -1e-12);
        }
    }

    #[test]
    fn seesaw_traces_are_deterministic() {
        let mut rng = sampling::rng(40);
        let s = sampling::random_strategy(&mut rng, 4);
        let params = SeesawParams::default();
        let (_, t1) = seesaw(&s, &params).unwrap();
        let (_, t2) = seesaw(&s, &params).unwrap();
        assert_eq!(t1.steps.len(), t2.steps.len());
        for (a, b) in t1.steps.iter().zip(&t2.steps) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.operator, b.operator);
        }
    }

    #[test]
    fn restarts_are_deterministic() {
        let params = SeesawParams::default();
        let a = seesaw_restarts(3, 6, 7, &params);
        let b = seesaw_restarts(3, 6, 7, &params);
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.best_index, b.best_index);
        for (x, y) in a.summaries.iter().zip(&b.summaries) {
            assert_eq!(x.final_value.to_bits(), y.final_value.to_bits());
            assert_eq!(x.sweeps, y.sweeps);
        }
        let c = seesaw_restarts_sequential(3, 6, 7, &params);
        assert_eq!(a.best_value.to_bits(), c.best_value.to_bits());
    }

    #[test]
    fn optimize_chain_even_d2() {
        let (spec, value) =
            optimize_omega(Branch::ChainEven, 2, &OptimizeParams::default()).unwrap();
        let expect = 5.0f64.sqrt() / 2.0 - 1.0;
        assert!((value - expect).abs() < 1e-9, "value {value}");
        assert!(spec.coeffs.iter().all(|c| c.abs() == 1.0));
        assert_eq!(spec.coeffs[0], spec.coeffs[1]);
    }

    #[test]
    fn optimize_chain_even_d4() {
        let (spec, value) =
            optimize_omega(Branch::ChainEven, 4, &OptimizeParams::default()).unwrap();
        // Maximum at (1, 0, -1): boundary term 1/4 plus the d4 sub-claim
        // maximum (2 sqrt(2) - 3)/4, i.e. (sqrt(2) - 1)/2.
        let expect = (2.0f64.sqrt() - 1.0) / 2.0;
        assert!(
            (value - expect).abs() < 1e-6,
            "value {value}, spec {:?}",
            spec.coeffs
        );
        assert_eq!(spec.coeffs[0], -spec.coeffs[2]);
        assert!(spec.coeffs[1].abs() < 1e-4);
    }

    #[test]
    fn optimize_cyclic_attains_quarter() {
        for d in [2usize, 4] {
            let (spec, value) =
                optimize_omega(Branch::Cyclic, d, &OptimizeParams::default()).unwrap();
            assert!((value - 0.25).abs() <= 1e-9, "d={d}: {value}");
            for c in &spec.coeffs {
                assert!((c.abs() - SQRT3_2).abs() < 1e-5, "coeff {c}");
            }
        }
    }

    #[test]
    fn schmidt_seesaw_keeps_quarter_reachable() {
        let params = SchmidtParams::default();
        let out = schmidt_seesaw(2, 3, 5, &params).unwrap();
        assert!(out.best_value >= 0.25 - 1e-9, "best {}", out.best_value);
        let out4 = schmidt_seesaw(4, 4, 5, &params).unwrap();
        assert!(out4.best_value >= 0.25 - 1e-9, "best {}", out4.best_value);
        assert!(out4.entropy >= -1e-12);
    }

    #[test]
    fn embedded_epr_evaluates_to_quarter() {
        let s = embedded_epr_strategy(6).unwrap();
        assert!((i3322_value(&s).value - 0.25).abs() < 1e-12);
    }
}
