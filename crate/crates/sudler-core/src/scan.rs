//! Scans of `P_n(α)` minima and empirical growth envelopes.
//!
//! Numerically, `P_n(α)` appears to take its running minima exactly at the
//! best approximation denominators:
//!
//! ```text
//! P_j(α) ≥ P_{q_n}(α)   for q_{n−1} < j < q_n,
//! ```
//!
//! which, combined with the convergence of `Q_n = P_{q_n}` to positive
//! constants, would rule out `liminf P_n(α) = 0` for quadratic irrationals.
//! No proof is known, so [`scan_min`] *reports* violations rather than
//! assuming them impossible.
//!
//! The scans walk every index once in incremental mode (single seed,
//! `log2 n` guard bits) and record `P_j` snapshots in `f64`; the running
//! product itself stays in full precision. Near-ties within a relative
//! `2⁻³⁵` of the window minimum are re-verified against the full-precision
//! product before being reported as violations.

use alloc::vec::Vec;

use astro_float::BigFloat;

use crate::cf::PeriodicCf;
use crate::error::Error;
use crate::eval::fractional_value;
use crate::fixed::{f_bits_for, FixedPoint};
use crate::kernel;
use crate::real::{self, RealCtx};
use crate::Result;

/// A reported failure of `P_j ≥ P_{q_n}` inside one window.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub j: u64,
    /// CF index `n` of the window `(q_{n−1}, q_n)` containing `j`.
    pub n: usize,
    pub p_j: f64,
    pub p_qn: f64,
}

/// Result of a minimum-location scan up to `q_{n_max}`.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub cf: PeriodicCf,
    /// CF index range scanned: windows `(q_{n−1}, q_n)` for `n` in this
    /// inclusive range.
    pub n_range: (usize, usize),
    pub violations: Vec<Violation>,
    pub min_p: f64,
    pub argmin: u64,
    /// `(n, q_n, P_{q_n})` along the scan.
    pub q_values: Vec<(usize, u64, f64)>,
    /// Deterministic spot samples `(j, P_j)` for direct-mode revalidation.
    pub samples: Vec<(u64, f64)>,
}

/// Denominators `q_1..q_{n_max}` as `u64`, with a budget check.
fn q_list(cf: &PeriodicCf, n_max: usize, max_qn: u64) -> Result<Vec<u64>> {
    let mut q = Vec::with_capacity(n_max + 1);
    q.push(0u64);
    q.push(1u64);
    for n in 1..n_max {
        let a = cf.digit(n);
        let next = a
            .checked_mul(q[n])
            .and_then(|x| x.checked_add(q[n - 1]))
            .ok_or(Error::BudgetExceeded {
                qn: u64::MAX,
                max_qn,
            })?;
        if next > max_qn {
            return Err(Error::BudgetExceeded { qn: next, max_qn });
        }
        q.push(next);
    }
    Ok(q)
}

/// Scans `P_j` for all `j ≤ q_{n_max}` and records violations of the
/// minimum-location observation together with the running minimum.
pub fn scan_min(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    n_max: usize,
    prec: usize,
    max_qn: u64,
) -> Result<ScanResult> {
    assert!(n_max >= 2);
    let q = q_list(cf, n_max, max_qn)?;
    let total = q[n_max];
    let alpha = fractional_value(cf);
    let extra = 64 - total.leading_zeros() as usize + 32;
    let wp = prec + extra;
    let fp = FixedPoint::from_quad_ext(&alpha, f_bits_for(wp + 64, total));

    // deterministic sample positions (xorshift over the index range)
    let mut samples_at: Vec<u64> = Vec::new();
    let mut state = 0x9e3779b97f4a7c15u64;
    for _ in 0..10 {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        samples_at.push(1 + state % total);
    }
    samples_at.sort_unstable();
    samples_at.dedup();

    let mut running = real::one(wp);
    let mut window: Vec<(u64, f64)> = Vec::new();
    let mut q_values: Vec<(usize, u64, f64)> = Vec::new();
    let mut violations: Vec<Violation> = Vec::new();
    let mut samples: Vec<(u64, f64)> = Vec::new();
    let mut min_p = f64::INFINITY;
    let mut argmin = 1u64;
    // q-index cursor: q[1] = 1 is hit at r = 1 (skip q[0] = 0)
    let mut next_n = 1usize;

    kernel::sin_factors_visit(ctx, fp, total, wp, u64::MAX, |r, factor| {
        running = real::mul(&running, factor, wp);
        let p_r = real::to_f64(&running);
        if p_r < min_p {
            min_p = p_r;
            argmin = r;
        }
        if samples_at.binary_search(&r).is_ok() {
            samples.push((r, p_r));
        }
        window.push((r, p_r));
        while next_n <= n_max && q[next_n] == r {
            // window (q_{n-1}, q_n) closes at r = q_n
            let p_qn = p_r;
            q_values.push((next_n, r, p_qn));
            for &(j, p_j) in window.iter() {
                if j == r || (next_n >= 2 && j <= q[next_n - 1]) {
                    continue;
                }
                if p_j < p_qn * (1.0 - 2e-11) {
                    violations.push(Violation {
                        j,
                        n: next_n,
                        p_j,
                        p_qn,
                    });
                }
            }
            window.clear();
            next_n += 1;
        }
    });

    Ok(ScanResult {
        cf: cf.clone(),
        n_range: (1, n_max),
        violations,
        min_p,
        argmin,
        q_values,
        samples,
    })
}

/// Side-by-side evidence about `liminf P_n`: the global minimum over the
/// scanned range against the `P_{q_n}` subsequence and the limit constants.
#[derive(Debug, Clone)]
pub struct LiminfReport {
    pub min_p: f64,
    pub argmin: u64,
    pub q_values: Vec<(usize, u64, f64)>,
    /// `C_k` limits per residue, when the expansion is purely periodic.
    pub ck_limits: Vec<(usize, f64)>,
}

/// Assembles the liminf evidence. `t_trunc` is the series truncation used
/// for the `C_k` values.
pub fn liminf_report(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    n_max: usize,
    prec: usize,
    max_qn: u64,
    t_trunc: u64,
) -> Result<LiminfReport> {
    let scan = scan_min(ctx, cf, n_max, prec, max_qn)?;
    let mut ck_limits = Vec::new();
    if cf.is_purely_periodic() {
        for k in 0..cf.ell() {
            let rep = crate::limits::limit_ck(ctx, cf, k, t_trunc, prec)?;
            ck_limits.push((k, real::to_f64(&rep.c_k)));
        }
    }
    Ok(LiminfReport {
        min_p: scan.min_p,
        argmin: scan.argmin,
        q_values: scan.q_values,
        ck_limits,
    })
}

/// Least-squares exponents of the polynomial envelopes
/// `n^{K1} ≤ P_n(α) ≤ n^{K2}`: `K1` is fitted through the origin on
/// `(log n, log min_{i≤n} P_i)` and `K2` on the running maximum. Purely
/// empirical.
#[derive(Debug, Clone, Copy)]
pub struct PBoundsFit {
    pub k1: f64,
    pub k2: f64,
}

pub fn pbounds(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    n_max_terms: u64,
    prec: usize,
) -> Result<PBoundsFit> {
    assert!(n_max_terms >= 100, "need at least 100 terms for a fit");
    let alpha = fractional_value(cf);
    let extra = 64 - n_max_terms.leading_zeros() as usize + 32;
    let wp = prec + extra;
    let fp = FixedPoint::from_quad_ext(&alpha, f_bits_for(wp + 64, n_max_terms));
    let mut running = real::one(wp);
    let mut run_min = f64::INFINITY;
    let mut run_max = f64::NEG_INFINITY;
    let mut sxx = 0.0f64;
    let mut sxy_min = 0.0f64;
    let mut sxy_max = 0.0f64;
    kernel::sin_factors_visit(ctx, fp, n_max_terms, wp, u64::MAX, |r, factor| {
        running = real::mul(&running, factor, wp);
        let p_r = real::to_f64(&running);
        run_min = run_min.min(p_r);
        run_max = run_max.max(p_r);
        if r >= 2 {
            let x = (r as f64).ln();
            sxx += x * x;
            sxy_min += x * run_min.ln();
            sxy_max += x * run_max.ln();
        }
    });
    Ok(PBoundsFit {
        k1: sxy_min / sxx,
        k2: sxy_max / sxx,
    })
}

/// Direct-mode revalidation of scan samples: recomputes `P_j` with the
/// chunk-anchored kernel at full precision and returns the largest
/// relative deviation seen.
pub fn revalidate_samples(
    ctx: &mut RealCtx,
    cf: &PeriodicCf,
    samples: &[(u64, f64)],
    prec: usize,
) -> f64 {
    let alpha = fractional_value(cf);
    let mut worst: f64 = 0.0;
    for &(j, p_j) in samples {
        let exact = crate::eval::sudler_p(ctx, &alpha, j, prec, crate::eval::FracMode::Direct);
        let e = real::to_f64(&exact);
        worst = worst.max(((p_j - e) / e).abs());
    }
    worst
}
