//! Saturating linear convolution on a symmetric LLR grid.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Bin counts above this go through the FFT path.
pub(crate) const DIRECT_LIMIT: usize = 512;

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<usize, PlanPair>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(len: usize) -> PlanPair {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry(len)
            .or_insert_with(|| (planner.plan_fft_forward(len), planner.plan_fft_inverse(len)))
            .clone()
    })
}

/// Full linear convolution of two real sequences, `a.len() + b.len() - 1`
/// outputs.
pub(crate) fn linear(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().max(b.len()) <= DIRECT_LIMIT {
        let mut out = vec![0.0; out_len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let n = out_len.next_power_of_two();
    let (fwd, inv) = plans(n);
    // Pack both real inputs into one complex transform: z = a + i b.
    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::new(
                a.get(k).copied().unwrap_or(0.0),
                b.get(k).copied().unwrap_or(0.0),
            )
        })
        .collect();
    fwd.process(&mut buf);
    let mut prod = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let z = buf[k];
        let zc = buf[(n - k) % n].conj();
        let fa = (z + zc) * 0.5;
        let fb = (z - zc) * Complex64::new(0.0, -0.5);
        prod[k] = fa * fb;
    }
    inv.process(&mut prod);
    let scale = 1.0 / n as f64;
    prod[..out_len].iter().map(|c| c.re * scale).collect()
}

/// Convolution of two densities on a `2K + 1` bin grid centered at zero.
/// Mass falling outside `[-K, K]` accumulates in the boundary bins.
pub(crate) fn saturating(a: &[f64], b: &[f64], half_bins: usize) -> Vec<f64> {
    let n = 2 * half_bins + 1;
    debug_assert_eq!(a.len(), n);
    debug_assert_eq!(b.len(), n);
    let full = linear(a, b);
    // full[t] holds the mass of offset t - 2K.
    let mut out = full[half_bins..half_bins + n].to_vec();
    out[0] += full[..half_bins].iter().sum::<f64>();
    out[n - 1] += full[half_bins + n..].iter().sum::<f64>();
    out
}
