//! Adaptive Gauss–Kronrod integration, Gauss–Legendre panels and the
//! log-scale wrapper used for integrals against Lévy measures.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Result, SpdError};

/// Values that can be integrated: real or complex.
pub trait QuadValue: Copy + Send + Sync + std::fmt::Debug {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, k: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn norm(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_evals: 1_000_000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOutput<V> {
    pub value: V,
    pub abs_err: f64,
    /// ∫|f|, used for roundoff floors.
    pub abs_integral: f64,
    pub evals: usize,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_136_436,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
    abs: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk21<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> Segment<V> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc.scale(WGK[10]);
    let mut gauss = V::zero();
    let mut abs = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1.add(f2);
        kron = kron.add(s.scale(WGK[j]));
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss.add(s.scale(WG[j / 2]));
        }
    }
    let value = kron.scale(h);
    let abs = abs * h.abs();
    // |K21 - G10| is pessimistic for smooth integrands; floored by roundoff.
    let err = kron.sub(gauss).scale(h).norm().max(50.0 * f64::EPSILON * abs);
    Segment { a, b, value, err, abs }
}

/// Globally adaptive Gauss–Kronrod (21 point) integration on a finite interval.
pub fn integrate<V: QuadValue, F: Fn(f64) -> V>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadOutput<V>> {
    if a == b {
        return Ok(QuadOutput {
            value: V::zero(),
            abs_err: 0.0,
            abs_integral: 0.0,
            evals: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(SpdError::QuadratureFailure(format!("infinite interval [{a}, {b}]")));
    }
    let first = gk21(&f, a, b);
    let mut evals = 21;
    let mut total = first.value;
    let mut err = first.err;
    let mut abs = first.abs;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        let target = opts
            .abs_tol
            .max(opts.rel_tol * total.norm())
            .max(50.0 * f64::EPSILON * abs);
        if err <= target {
            break;
        }
        if evals + 42 > opts.max_evals {
            return Err(SpdError::QuadratureFailure(format!(
                "evaluation cap {} reached on [{a}, {b}] (error {err:e}, target {target:e})",
                opts.max_evals
            )));
        }
        let worst = heap.pop().expect("segment heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval cannot be split further; accept what we have
            heap.push(worst);
            break;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        evals += 42;
        total = total.sub(worst.value).add(left.value).add(right.value);
        err += left.err + right.err - worst.err;
        abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
    }
    // Recompute sums to shed accumulated cancellation in the running totals.
    let mut value = V::zero();
    let mut err_sum = 0.0;
    let mut abs_sum = 0.0;
    for s in heap.iter() {
        value = value.add(s.value);
        err_sum += s.err;
        abs_sum += s.abs;
    }
    Ok(QuadOutput {
        value,
        abs_err: err_sum,
        abs_integral: abs_sum,
        evals,
    })
}

/// ∫_lo^hi f(s) ds for 0 ≤ lo < hi ≤ ∞ via s = e^u.
///
/// Infinite ends in u are handled by marching outward in chunks and
/// extrapolating the remainder geometrically once successive chunks decay.
pub fn integrate_log_scale<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    lo: f64,
    hi: f64,
    center: f64,
    opts: QuadOptions,
) -> Result<QuadOutput<V>> {
    if !(lo >= 0.0 && hi > lo) {
        return Ok(QuadOutput {
            value: V::zero(),
            abs_err: 0.0,
            abs_integral: 0.0,
            evals: 0,
        });
    }
    const CHUNK: f64 = 8.0;
    const U_MAX: f64 = 700.0;
    let g = |u: f64| {
        let s = u.exp();
        f(s).scale(s)
    };
    let c = if center > 0.0 { center.ln() } else { 0.0 };
    let ua = if lo > 0.0 {
        lo.ln()
    } else {
        (c - CHUNK).min(if hi.is_finite() { hi.ln() - CHUNK } else { f64::INFINITY })
    };
    let ub = if hi.is_finite() {
        hi.ln()
    } else {
        (c + CHUNK).max(if lo > 0.0 { lo.ln() + CHUNK } else { f64::NEG_INFINITY })
    };
    let core = integrate(g, ua, ub, opts)?;
    let mut value = core.value;
    let mut abs_err = core.abs_err;
    let mut abs_integral = core.abs_integral;
    let mut evals = core.evals;

    for side in [-1.0f64, 1.0] {
        let open = if side < 0.0 { lo == 0.0 } else { hi.is_infinite() };
        if !open {
            continue;
        }
        let mut edge = if side < 0.0 { ua } else { ub };
        let mut prev: Option<f64> = None;
        let mut converged = false;
        for _ in 0..200 {
            let next = edge + side * CHUNK;
            if next.abs() > U_MAX {
                converged = true;
                break;
            }
            let tol_abs = opts.rel_tol * value.norm().max(opts.abs_tol / opts.rel_tol.max(1e-300));
            let chunk_opts = QuadOptions {
                abs_tol: tol_abs.max(opts.abs_tol) * 0.1,
                ..opts
            };
            let (a, b) = if side < 0.0 { (next, edge) } else { (edge, next) };
            let piece = integrate(g, a, b, chunk_opts)?;
            evals += piece.evals;
            value = value.add(piece.value);
            abs_err += piece.abs_err;
            abs_integral += piece.abs_integral;
            edge = next;
            let size = piece.abs_integral;
            let threshold = opts.rel_tol * value.norm().max(opts.abs_tol);
            if size <= 0.1 * threshold || size == 0.0 {
                converged = true;
                break;
            }
            if let Some(p) = prev {
                let q = size / p;
                if q < 0.9 && q > 0.0 {
                    let remainder = size * q / (1.0 - q);
                    if remainder <= threshold {
                        // geometric tail of a power law: fold in the estimate
                        value = value.add(piece.value.scale(q / (1.0 - q)));
                        abs_err += remainder * 0.1;
                        converged = true;
                        break;
                    }
                }
            }
            prev = Some(size);
        }
        if !converged {
            return Err(SpdError::QuadratureFailure(
                "log-scale tail did not decay within 200 chunks".into(),
            ));
        }
    }
    Ok(QuadOutput {
        value,
        abs_err,
        abs_integral,
        evals,
    })
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// The 32-point rule used by the inversion panels.
pub fn gauss_legendre_32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_degree_31() {
        for deg in 0..=31 {
            let seg = gk21(&|x: f64| x.powi(deg), -1.0, 1.0);
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((seg.value - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn embedded_gauss_rule_is_exact_for_degree_19() {
        // Kronrod minus Gauss must vanish for polynomials the Gauss rule integrates exactly.
        let seg = gk21(&|x: f64| x.powi(18) + x.powi(7), -1.0, 1.0);
        assert!(seg.err < 1e-13, "{}", seg.err);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let (x, w) = gauss_legendre(32);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(62)).sum();
        assert!((m - 2.0 / 63.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let out = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((out.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn log_scale_integrates_power_laws_on_half_lines() {
        // ∫_0^∞ s^0.5 e^-s = Γ(1.5)
        let out = integrate_log_scale(
            |s: f64| s.sqrt() * (-s).exp(),
            0.0,
            f64::INFINITY,
            1.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((out.value - 0.886_226_925_452_758).abs() < 1e-12);
        // slow algebraic tail: ∫_1^∞ s^-1.05 ds = 20
        let out = integrate_log_scale(|s: f64| s.powf(-1.05), 1.0, f64::INFINITY, 1.0, QuadOptions::default()).unwrap();
        assert!((out.value - 20.0).abs() < 1e-7 * 20.0, "{}", out.value);
        // slow singularity at 0: ∫_0^1 s^-0.97 ds = 1/0.03
        let out = integrate_log_scale(|s: f64| s.powf(-0.97), 0.0, 1.0, 1.0, QuadOptions::default()).unwrap();
        assert!((out.value - 1.0 / 0.03).abs() < 1e-7 / 0.03, "{}", out.value);
    }

    #[test]
    fn complex_integrand() {
        let out = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((out.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }
}
