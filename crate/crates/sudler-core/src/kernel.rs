//! Deterministic chunked evaluation of large sine products.
//!
//! The products `∏_r |2 sin πrα|` and the per-`t` loops of the `A·B·C`
//! decomposition need millions of sines at a hundred-plus bits. A full
//! argument reduction per term is far too slow, so the kernels walk the
//! angle incrementally: `(sin θ_{r+1}, cos θ_{r+1})` follows from
//! `(sin θ_r, cos θ_r)` by one complex rotation — four multiplications and
//! two additions. Rotation is norm-preserving, so rounding does not get
//! amplified; the accumulated drift after `j` steps is `O(j·2^{−wp})` at
//! working precision `wp`.
//!
//! Every chunk of [`CHUNK`] steps is re-seeded from an *exactly* computed
//! anchor (fixed-point `{r₀α}` plus one full-precision sine), which caps
//! the drift per factor at `CHUNK·2^{−wp}` independent of the product
//! length. Working precision adds 64 guard bits, so a product of `n`
//! factors carries a relative error well below `n·2^{−prec+8}`.
//!
//! Chunk boundaries are fixed by the index range alone, and partial
//! products are combined left to right, so results are bit-identical
//! whether or not the `parallel` feature distributes chunks across
//! threads.

use alloc::vec::Vec;

use astro_float::BigFloat;

use crate::fixed::FixedPoint;
use crate::real::{self, RealCtx};

/// Steps per re-anchored chunk.
pub const CHUNK: u64 = 4096;

/// Precomputed data for walking `θ_r = π·{rα}` (mod π, sign-free).
pub struct SineWalk {
    /// `(sin πα', cos πα')` at working precision, `α' = {α}`.
    rot: (BigFloat, BigFloat),
    alpha: FixedPoint,
    wp: usize,
}

impl SineWalk {
    /// `alpha` must already be reduced to `[0,1)` fixed point. `wp` is the
    /// working precision for the rotation state.
    pub fn new(ctx: &mut RealCtx, alpha: FixedPoint, wp: usize) -> Self {
        let a = alpha.frac_r(1, wp + 32);
        let s = ctx.sin_pi(&a, wp);
        let c = ctx.cos_pi(&a, wp);
        SineWalk {
            rot: (s, c),
            alpha,
            wp,
        }
    }

    /// Exact-seeded `(sin π{rα}, cos π{rα})`.
    pub fn anchor(&self, ctx: &mut RealCtx, r: u64) -> (BigFloat, BigFloat) {
        let u = self.alpha.frac_r(r, self.wp + 32);
        (ctx.sin_pi(&u, self.wp), ctx.cos_pi(&u, self.wp))
    }

    /// One rotation step: `(s, c) ← (s·cA + c·sA, c·cA − s·sA)`.
    ///
    /// Note the walked angle is `πrα` while the anchor uses `π{rα}`; they
    /// differ by a multiple of π, so `sin` may differ in sign. Product
    /// kernels take absolute values, which makes the two interchangeable.
    #[inline]
    pub fn step(&self, s: &BigFloat, c: &BigFloat) -> (BigFloat, BigFloat) {
        let (sa, ca) = &self.rot;
        let wp = self.wp;
        let ns = real::add(&real::mul(s, ca, wp), &real::mul(c, sa, wp), wp);
        let nc = real::sub(&real::mul(c, ca, wp), &real::mul(s, sa, wp), wp);
        (ns, nc)
    }
}

/// `∏_{r=lo..=hi} |2 sin πrα|` over one chunk, seeded at `lo`.
fn chunk_product(walk: &SineWalk, seed: (BigFloat, BigFloat), lo: u64, hi: u64) -> BigFloat {
    let wp = walk.wp;
    let (mut s, mut c) = seed;
    let mut prod = real::ldexp(&s.abs(), 1); // factor at r = lo
    let mut r = lo;
    while r < hi {
        let (ns, nc) = walk.step(&s, &c);
        s = ns;
        c = nc;
        prod = real::mul(&prod, &real::ldexp(&s.abs(), 1), wp);
        r += 1;
    }
    prod
}

/// Chunk layout for `r ∈ [1, n]`: fixed boundaries at multiples of
/// [`CHUNK`], independent of thread count.
fn chunks(n: u64) -> Vec<(u64, u64)> {
    let mut v = Vec::with_capacity((n / CHUNK + 1) as usize);
    let mut lo = 1u64;
    while lo <= n {
        let hi = (lo + CHUNK - 1).min(n);
        v.push((lo, hi));
        lo = hi + 1;
    }
    v
}

/// `P_n(α) = ∏_{r=1}^{n} |2 sin πrα|` with per-chunk exact re-anchoring.
///
/// `prec` is the precision of the returned value; the internal state
/// carries 64 guard bits.
pub fn sin_product(ctx: &mut RealCtx, alpha: FixedPoint, n: u64, prec: usize) -> BigFloat {
    assert!(n >= 1);
    let wp = prec + 64;
    let walk = SineWalk::new(ctx, alpha, wp);
    let ranges = chunks(n);
    // anchors are computed sequentially (they need the shared constants
    // cache); the chunk walks are data-parallel
    let seeds: Vec<(BigFloat, BigFloat)> =
        ranges.iter().map(|&(lo, _)| walk.anchor(ctx, lo)).collect();
    let partials = run_chunks(&walk, &ranges, seeds);
    let mut acc = real::one(wp);
    for p in &partials {
        acc = real::mul(&acc, p, wp);
    }
    let mut acc = acc;
    acc.set_precision(prec, astro_float::RoundingMode::ToEven)
        .expect("rounding");
    acc
}

#[cfg(feature = "parallel")]
fn run_chunks(
    walk: &SineWalk,
    ranges: &[(u64, u64)],
    seeds: Vec<(BigFloat, BigFloat)>,
) -> Vec<BigFloat> {
    use rayon::prelude::*;
    ranges
        .par_iter()
        .zip(seeds.into_par_iter())
        .map(|(&(lo, hi), seed)| chunk_product(walk, seed, lo, hi))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_chunks(
    walk: &SineWalk,
    ranges: &[(u64, u64)],
    seeds: Vec<(BigFloat, BigFloat)>,
) -> Vec<BigFloat> {
    ranges
        .iter()
        .zip(seeds)
        .map(|(&(lo, hi), seed)| chunk_product(walk, seed, lo, hi))
        .collect()
}

/// Sequential walk over `r = 1..=n` delivering `|2 sin πrα|` to a visitor,
/// for running-product scans. `anchor_period` controls how often the state
/// is re-seeded from an exact fractional part: [`CHUNK`] matches the
/// product kernel; `u64::MAX` is the pure incremental mode (callers then
/// supply `log2 n` extra guard bits in `prec`).
pub fn sin_factors_visit<F: FnMut(u64, &BigFloat)>(
    ctx: &mut RealCtx,
    alpha: FixedPoint,
    n: u64,
    prec: usize,
    anchor_period: u64,
    mut visit: F,
) {
    assert!(n >= 1);
    let wp = prec + 64;
    let walk = SineWalk::new(ctx, alpha, wp);
    let (mut s, mut c) = walk.anchor(ctx, 1);
    let mut factor = real::ldexp(&s.abs(), 1);
    visit(1, &factor);
    for r in 2..=n {
        if anchor_period != u64::MAX && (r - 1) % anchor_period == 0 {
            let (ns, nc) = walk.anchor(ctx, r);
            s = ns;
            c = nc;
        } else {
            let (ns, nc) = walk.step(&s, &c);
            s = ns;
            c = nc;
        }
        factor = real::ldexp(&s.abs(), 1);
        visit(r, &factor);
    }
}

/// Walk of the rational angles `θ_t = π·t/q` for `t = 1..=m`, with exact
/// re-anchoring, used by the decomposition loops. Calls
/// `visit(t, sin θ_t, cos θ_t)`.
pub struct RationalAngleWalk {
    q: u64,
    wp: usize,
    rot: (BigFloat, BigFloat),
}

impl RationalAngleWalk {
    pub fn new(ctx: &mut RealCtx, q: u64, wp: usize) -> Self {
        let phi = real::from_ratio_u64(1, q, wp + 32);
        RationalAngleWalk {
            q,
            wp,
            rot: (ctx.sin_pi(&phi, wp), ctx.cos_pi(&phi, wp)),
        }
    }

    pub fn anchor(&self, ctx: &mut RealCtx, t: u64) -> (BigFloat, BigFloat) {
        let u = real::from_ratio_u64(t, self.q, self.wp + 32);
        (ctx.sin_pi(&u, self.wp), ctx.cos_pi(&u, self.wp))
    }

    /// Chunked ranges `[1, m]` with the same layout as the product kernel.
    pub fn ranges(&self, m: u64) -> Vec<(u64, u64)> {
        chunks(m)
    }

    #[inline]
    pub fn step(&self, s: &BigFloat, c: &BigFloat) -> (BigFloat, BigFloat) {
        let (sa, ca) = &self.rot;
        let wp = self.wp;
        let ns = real::add(&real::mul(s, ca, wp), &real::mul(c, sa, wp), wp);
        let nc = real::sub(&real::mul(c, ca, wp), &real::mul(s, sa, wp), wp);
        (ns, nc)
    }

    pub fn wp(&self) -> usize {
        self.wp
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

/// Runs `per_chunk` over fixed chunk ranges (possibly in parallel) and
/// folds the chunk outputs left to right with `combine`. `per_chunk`
/// receives the range and its seed `(sin, cos)` at the range start.
pub fn map_reduce_chunks<T, PC, CB>(
    walk: &RationalAngleWalk,
    ctx: &mut RealCtx,
    m: u64,
    per_chunk: PC,
    init: T,
    combine: CB,
) -> T
where
    T: Send,
    PC: Fn((u64, u64), (BigFloat, BigFloat)) -> T + Sync,
    CB: Fn(T, T) -> T,
{
    if m == 0 {
        return init;
    }
    let ranges = walk.ranges(m);
    let seeds: Vec<(BigFloat, BigFloat)> = ranges
        .iter()
        .map(|&(lo, _)| walk.anchor(ctx, lo))
        .collect();
    let outs = run_mapped(&ranges, seeds, &per_chunk);
    let mut acc = init;
    for o in outs {
        acc = combine(acc, o);
    }
    acc
}

#[cfg(feature = "parallel")]
fn run_mapped<T, PC>(ranges: &[(u64, u64)], seeds: Vec<(BigFloat, BigFloat)>, per_chunk: &PC) -> Vec<T>
where
    T: Send,
    PC: Fn((u64, u64), (BigFloat, BigFloat)) -> T + Sync,
{
    use rayon::prelude::*;
    ranges
        .par_iter()
        .zip(seeds.into_par_iter())
        .map(|(&r, seed)| per_chunk(r, seed))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_mapped<T, PC>(ranges: &[(u64, u64)], seeds: Vec<(BigFloat, BigFloat)>, per_chunk: &PC) -> Vec<T>
where
    T: Send,
    PC: Fn((u64, u64), (BigFloat, BigFloat)) -> T + Sync,
{
    ranges
        .iter()
        .zip(seeds)
        .map(|(&r, seed)| per_chunk(r, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::PeriodicCf;
    use crate::fixed::f_bits_for;
    use crate::real::{abs_below_pow2, sub, to_f64};
    use crate::surd::quad_ext_from_cf;

    fn fixed_alpha(s: &str, prec: usize, n: u64) -> FixedPoint {
        let alpha = quad_ext_from_cf(&s.parse::<PeriodicCf>().unwrap());
        FixedPoint::from_quad_ext(&alpha, f_bits_for(prec + 64, n))
    }

    /// Direct oracle: every factor from a full-precision sine.
    fn product_oracle(ctx: &mut RealCtx, s: &str, n: u64, prec: usize) -> BigFloat {
        let alpha = quad_ext_from_cf(&s.parse::<PeriodicCf>().unwrap());
        let fp = FixedPoint::from_quad_ext(&alpha, f_bits_for(prec + 64, n));
        let wp = prec + 64;
        let mut acc = real::one(wp);
        for r in 1..=n {
            let u = fp.frac_r(r, wp);
            let s = ctx.sin_pi(&u, wp);
            acc = real::mul(&acc, &real::ldexp(&s.abs(), 1), wp);
        }
        acc
    }

    #[test]
    fn rotation_product_matches_direct_sines() {
        let mut ctx = RealCtx::new();
        let prec = 128;
        for s in ["[0;(1)]", "[0;(2,3)]"] {
            // spans several chunks to exercise re-anchoring
            let n = 3 * CHUNK + 17;
            let fast = sin_product(&mut ctx, fixed_alpha(s, prec, n), n, prec);
            let slow = product_oracle(&mut ctx, s, n, prec);
            let rel = real::div(&sub(&fast, &slow, prec), &slow, prec);
            assert!(
                abs_below_pow2(&rel, -(prec as i64) + 24),
                "{s}: rel = {}",
                to_f64(&rel)
            );
        }
    }

    #[test]
    fn visitor_prefixes_match_products() {
        let mut ctx = RealCtx::new();
        let prec = 96;
        let n = CHUNK + 100;
        let fp = fixed_alpha("[0;(1)]", prec, n);
        let mut running = real::one(prec + 64);
        let mut at_100 = None;
        let mut at_end = None;
        sin_factors_visit(&mut ctx, fp.clone(), n, prec, CHUNK, |r, f| {
            running = real::mul(&running, f, prec + 64);
            if r == 100 {
                at_100 = Some(running.clone());
            }
            if r == n {
                at_end = Some(running.clone());
            }
        });
        let p100 = sin_product(&mut ctx, fp.clone(), 100, prec);
        let pn = sin_product(&mut ctx, fp, n, prec);
        let d1 = real::div(&sub(&at_100.unwrap(), &p100, prec), &p100, prec);
        let d2 = real::div(&sub(&at_end.unwrap(), &pn, prec), &pn, prec);
        assert!(abs_below_pow2(&d1, -(prec as i64) + 24));
        assert!(abs_below_pow2(&d2, -(prec as i64) + 24));
    }

    #[test]
    fn rational_walk_tracks_exact_angles() {
        let mut ctx = RealCtx::new();
        let wp = 160;
        let q = 977u64;
        let walk = RationalAngleWalk::new(&mut ctx, q, wp);
        let (mut s, mut c) = walk.anchor(&mut ctx, 1);
        for t in 2..=200u64 {
            let (ns, nc) = walk.step(&s, &c);
            s = ns;
            c = nc;
            if t % 50 == 0 {
                let (es, ec) = walk.anchor(&mut ctx, t);
                assert!(abs_below_pow2(&sub(&s, &es, wp), -(wp as i64) + 16), "t={t}");
                assert!(abs_below_pow2(&sub(&c, &ec, wp), -(wp as i64) + 16), "t={t}");
            }
        }
    }
}
