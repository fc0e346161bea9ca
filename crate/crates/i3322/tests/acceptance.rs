//! Acceptance suite: one check per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).

use i3322::ascent::{
    optimize_omega, schmidt_seesaw, seesaw_restarts, OptimizeParams, SchmidtParams, SeesawParams,
};
use i3322::bell::{classical_max, i3322_value};
use i3322::bounds::{claim_case, claim_d4, omega_closed, verify_f_cap};
use i3322::sampling;
use i3322::soscheck::{builtin_case3, verify};
use i3322::structure::{align_bases, build_normal_form, cs_decompose, Branch, NormalFormSpec};
use std::time::Instant;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[criterion {criterion}] {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_classical_bound() {
    let start = Instant::now();
    let r = classical_max();
    let elapsed = start.elapsed();
    let pass = r.max == 0 && r.evaluated == 64 && !r.maximizers.is_empty();
    report(
        "1",
        pass,
        &format!(
            "classical max = {} over {} assignments, {} maximizers, {:.3} ms",
            r.max,
            r.evaluated,
            r.maximizers.len(),
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_2_one_epr_value() {
    let start = Instant::now();
    let s = build_normal_form(&NormalFormSpec::cyclic_optimal(2).unwrap()).unwrap();
    let v = i3322_value(&s).value;
    let elapsed = start.elapsed();
    let pass = (v - 0.25).abs() <= 1e-12;
    report(
        "2",
        pass,
        &format!(
            "cyclic d=2 value = {v:.15} (|v - 1/4| = {:.2e}), {:.3} ms",
            (v - 0.25).abs(),
            elapsed.as_secs_f64() * 1e3
        ),
    );
}

#[test]
fn criterion_3_theorem_and_9_monotonicity() {
    let start = Instant::now();
    let params = SeesawParams::default();
    let mut overall_max = f64::NEG_INFINITY;
    let mut min_delta = f64::INFINITY;
    let mut per_dim = Vec::new();
    for dim in [2usize, 3, 4, 5, 6, 8] {
        let out = seesaw_restarts(dim, 50, 1000 + dim as u64, &params);
        overall_max = overall_max.max(out.best_value);
        for s in &out.summaries {
            min_delta = min_delta.min(s.min_step_delta);
        }
        per_dim.push(format!("d{dim}:{:.9}", out.best_value));
    }
    let elapsed = start.elapsed();
    let pass3 = overall_max <= 0.25 + 1e-6;
    report(
        "3",
        pass3,
        &format!(
            "uniform-weight seesaw max over dims 2..8 x 50 restarts = {overall_max:.12} <= 0.25 + 1e-6 ({}), {:.1} s",
            per_dim.join(" "),
            elapsed.as_secs_f64()
        ),
    );
    let pass9 = min_delta >= -1e-12;
    report(
        "9",
        pass9,
        &format!("min best-response step delta over all traces = {min_delta:.3e} >= -1e-12"),
    );
}

#[test]
fn criterion_4_formula_direct_equivalence() {
    let start = Instant::now();
    let mut rng = sampling::rng(4);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let spec = match trial % 3 {
            0 => sampling::random_chain_spec(&mut rng, 2 + 2 * (trial % 10)).unwrap(),
            1 => sampling::random_chain_spec(&mut rng, 3 + 2 * (trial % 9)).unwrap(),
            _ => sampling::random_cyclic_spec(&mut rng, 2 + 2 * (trial % 10)).unwrap(),
        };
        let closed = omega_closed(&spec).unwrap();
        let direct = i3322_value(&build_normal_form(&spec).unwrap()).value;
        worst = worst.max((closed - direct).abs());
    }
    let elapsed = start.elapsed();
    report(
        "4",
        worst <= 1e-9,
        &format!(
            "max |closed - direct| over 1000 random chain/cyclic specs (d <= 20) = {worst:.3e}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_5_cyclic_attainment() {
    let start = Instant::now();
    let params = OptimizeParams::default();
    let mut pass = true;
    let mut notes = Vec::new();
    for d in [2usize, 4, 6, 8] {
        let (_, cyc) = optimize_omega(Branch::Cyclic, d, &params).unwrap();
        pass &= (cyc - 0.25).abs() <= 1e-9;
        let (_, chain) = optimize_omega(Branch::ChainEven, d, &params).unwrap();
        pass &= chain < 0.25;
        if d == 2 {
            pass &= (chain - (5.0f64.sqrt() / 2.0 - 1.0)).abs() <= 1e-6;
        }
        notes.push(format!("d{d}: cyclic {cyc:.12} chain {chain:.9}"));
    }
    let elapsed = start.elapsed();
    report(
        "5",
        pass,
        &format!("{} ({:.1} s)", notes.join("; "), elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_6_bound_claims() {
    let start = Instant::now();
    let fcap = verify_f_cap(1e-3);
    let c1 = claim_case(1, 1e-3).unwrap();
    let c2 = claim_case(2, 1e-3).unwrap();
    let c3 = claim_case(3, 1e-4).unwrap();
    let d4 = claim_d4(1e-3);
    let elapsed = start.elapsed();
    let pass = fcap.holds
        && c1.holds
        && (c1.grid_max - 0.2430).abs() <= 2e-3
        && c2.holds
        && (c2.grid_max - 0.1019).abs() <= 2e-3
        && c3.holds
        && (c3.grid_max - 0.36716).abs() <= 5e-4
        && d4.holds
        && d4.certified_max < 0.0;
    report(
        "6",
        pass,
        &format!(
            "f-cap {} | case1 {} grid {:.6} cert {:.6} | case2 {} grid {:.6} | case3 {} grid {:.6} | d4 {} cert {:.6} | {:.1} s total",
            fcap.holds, c1.holds, c1.grid_max, c1.certified_max, c2.holds, c2.grid_max,
            c3.holds, c3.grid_max, d4.holds, d4.certified_max,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_7_sos_certificate() {
    let start = Instant::now();
    let cert = builtin_case3();
    let v = verify(&cert, 10_000, 0).unwrap();
    let mut lowered = builtin_case3();
    lowered.bound = 0.36;
    let rejected = verify(&lowered, 10_000, 0).unwrap();
    let elapsed = start.elapsed();
    let pass = v.accepted
        && v.pivot_margin >= 3e-4
        && v.pivot_margin <= 6e-4
        && v.psd_margin >= 0.0
        && v.identity_residual <= 1e-10
        && !rejected.accepted;
    report(
        "7",
        pass,
        &format!(
            "accepted={} Schur margin {:.6e} (min eig {:.3e}), residual {:.2e} over 1e4 samples; 0.36 rejected={}, {:.3} s",
            v.accepted,
            v.pivot_margin,
            v.psd_margin,
            v.identity_residual,
            !rejected.accepted,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_8_structure_roundtrips() {
    let start = Instant::now();
    let mut rng = sampling::rng(8);
    let mut worst_recon = 0.0f64;
    let mut worst_trace = 0.0f64;
    for trial in 0..1000 {
        let dim = 2 + trial % 11;
        let p = sampling::random_projector_any_rank(&mut rng, dim);
        let q = sampling::random_projector_any_rank(&mut rng, dim);
        let dec = cs_decompose(p.matrix(), q.matrix()).unwrap();
        let rp = dec.reconstruct_p().sub(p.matrix()).unwrap().fro_norm() / dim as f64;
        let rq = dec.reconstruct_q().sub(q.matrix()).unwrap().fro_norm() / dim as f64;
        worst_recon = worst_recon.max(rp.max(rq));
        let tr = p.matrix().inner(q.matrix()).unwrap();
        worst_trace = worst_trace.max((dec.expected_trace_product() - tr).abs());
    }
    let mut align_ok = true;
    for trial in 0..200 {
        let n = 2 + trial % 5;
        let a: Vec<f64> = (0..n)
            .map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0))
            .collect();
        let b: Vec<f64> = (0..n)
            .map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0))
            .collect();
        let pi = align_bases(&a, &b);
        let got: f64 = (0..n).map(|j| a[pi[j]] * b[j]).sum();
        let best = brute_force_align(&a, &b);
        align_ok &= (got - best).abs() <= 1e-12;
    }
    let elapsed = start.elapsed();
    let pass = worst_recon <= 1e-10 && worst_trace <= 1e-9 && align_ok;
    report(
        "8",
        pass,
        &format!(
            "1000 pairs: reconstruction <= {worst_recon:.2e} per dim, trace identity <= {worst_trace:.2e}; align == brute force: {align_ok}; {:.1} s",
            elapsed.as_secs_f64()
        ),
    );
}

fn brute_force_align(a: &[f64], b: &[f64]) -> f64 {
    fn go(a: &[f64], b: &[f64], used: &mut Vec<bool>, j: usize) -> f64 {
        if j == b.len() {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for i in 0..a.len() {
            if !used[i] {
                used[i] = true;
                best = best.max(a[i] * b[j] + go(a, b, used, j + 1));
                used[i] = false;
            }
        }
        best
    }
    go(a, b, &mut vec![false; a.len()], 0)
}

#[test]
fn criterion_10_exploratory_free_weights() {
    let start = Instant::now();
    let params = SchmidtParams::default();
    let mut pass = true;
    let mut notes = Vec::new();
    for (dim, restarts) in [(8usize, 12usize), (12, 8), (16, 6)] {
        let out = schmidt_seesaw(dim, restarts, 10, &params).unwrap();
        pass &= out.best_value >= 0.25 - 1e-9;
        notes.push(format!(
            "d{dim}: best {:.9} entropy {:.4} bits (restart {})",
            out.best_value, out.entropy, out.best_index
        ));
    }
    let elapsed = start.elapsed();
    report(
        "10",
        pass,
        &format!(
            "free-weight seesaw, non-blocking record: {} ({:.1} s)",
            notes.join("; "),
            elapsed.as_secs_f64()
        ),
    );
}
