//! Flooding belief propagation on a Tanner multigraph.

use super::graph::TannerGraph;

/// Check-node combination of two LLRs, `2 atanh(tanh(a/2) tanh(b/2))`,
/// evaluated without overflow.
pub fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let (x, y) = (a.abs(), b.abs());
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    sign * (x.min(y) + (-(x + y)).exp().ln_1p() - (-(x - y).abs()).exp().ln_1p())
}

/// Reusable message buffers for decoding on one graph.
#[derive(Clone, Debug)]
pub struct BpDecoder<'g> {
    graph: &'g TannerGraph,
    clamp: f64,
    early_stop: bool,
    to_check: Vec<f64>,
    to_var: Vec<f64>,
    scratch: Vec<f64>,
}

/// Outcome of [`BpDecoder::decode`].
#[derive(Clone, Debug, PartialEq)]
pub struct BpOutput {
    /// Posterior LLRs, positive favoring 0.
    pub llr: Vec<f64>,
    /// Hard decisions; ties decide 0.
    pub bits: Vec<u8>,
    pub iterations: usize,
    /// Whether the hard decisions satisfy the target syndrome.
    pub satisfied: bool,
}

impl<'g> BpDecoder<'g> {
    /// `clamp` bounds every message magnitude, mirroring the saturation of
    /// the quantized density grid.
    pub fn new(graph: &'g TannerGraph, clamp: f64) -> Self {
        let e = graph.edges().len();
        BpDecoder {
            graph,
            clamp,
            early_stop: true,
            to_check: vec![0.0; e],
            to_var: vec![0.0; e],
            scratch: Vec::new(),
        }
    }

    /// With early stopping off, every call runs exactly `max_iter` iterations.
    pub fn early_stop(mut self, on: bool) -> Self {
        self.early_stop = on;
        self
    }

    fn clip(&self, x: f64) -> f64 {
        x.clamp(-self.clamp, self.clamp)
    }

    /// Runs up to `max_iter` flooding iterations from channel LLRs
    /// `ln p(y|0)/p(y|1)`, stopping early once the hard decisions satisfy
    /// `syndrome` (all zeros for the linear code) unless disabled.
    pub fn decode(&mut self, channel: &[f64], syndrome: &[u8], max_iter: usize) -> BpOutput {
        let g = self.graph;
        assert_eq!(channel.len(), g.n());
        assert_eq!(syndrome.len(), g.m());
        let channel: Vec<f64> = channel.iter().map(|&x| self.clip(x)).collect();
        for (e, &(v, _)) in g.edges().iter().enumerate() {
            self.to_check[e] = channel[v];
        }
        let mut llr = channel.clone();
        let mut bits = decisions(&llr);
        let mut satisfied = g.syndrome(&bits) == syndrome;
        let mut iterations = 0;
        while !(self.early_stop && satisfied) && iterations < max_iter {
            iterations += 1;
            self.check_pass(syndrome);
            for v in 0..g.n() {
                let es = g.var_edges(v);
                let total = channel[v] + es.iter().map(|&e| self.to_var[e]).sum::<f64>();
                llr[v] = total;
                for &e in es {
                    self.to_check[e] = self.clip(total - self.to_var[e]);
                }
            }
            bits = decisions(&llr);
            satisfied = g.syndrome(&bits) == syndrome;
        }
        BpOutput {
            llr,
            bits,
            iterations,
            satisfied,
        }
    }

    /// Extrinsic box-plus at every check via forward and backward partial
    /// combinations.
    fn check_pass(&mut self, syndrome: &[u8]) {
        let g = self.graph;
        for (c, &s) in syndrome.iter().enumerate() {
            let es = g.check_edges(c);
            let d = es.len();
            let flip = if s & 1 == 1 { -1.0 } else { 1.0 };
            if d == 1 {
                self.to_var[es[0]] = flip * self.clamp;
                continue;
            }
            self.scratch.clear();
            self.scratch.resize(d, 0.0);
            // scratch[i] = box-plus of inputs 0..i (exclusive of i).
            let mut acc = f64::INFINITY;
            for (i, &e) in es.iter().enumerate() {
                self.scratch[i] = acc;
                acc = if acc.is_infinite() {
                    self.to_check[e]
                } else {
                    boxplus(acc, self.to_check[e])
                };
            }
            let mut back = f64::INFINITY;
            for (i, &e) in es.iter().enumerate().rev() {
                let fwd = self.scratch[i];
                let out = match (fwd.is_infinite(), back.is_infinite()) {
                    (true, true) => self.clamp,
                    (true, false) => back,
                    (false, true) => fwd,
                    (false, false) => boxplus(fwd, back),
                };
                self.to_var[e] = flip * out.clamp(-self.clamp, self.clamp);
                back = if back.is_infinite() {
                    self.to_check[e]
                } else {
                    boxplus(back, self.to_check[e])
                };
            }
        }
    }
}

fn decisions(llr: &[f64]) -> Vec<u8> {
    llr.iter().map(|&x| (x < 0.0) as u8).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxplus_agrees_with_tanh_rule() {
        for &(a, b) in &[(1.0f64, 2.0f64), (-0.3, 4.0), (-5.0, -0.7), (0.0, 3.0)] {
            let direct: f64 = 2.0 * ((0.5 * a).tanh() * (0.5 * b).tanh()).atanh();
            assert!((boxplus(a, b) - direct).abs() < 1e-9, "{a} {b}");
        }
        // Where the tanh form loses all precision.
        let far = boxplus(30.0, -31.0);
        assert!((far + 30.0 - (-1.0f64).exp().ln_1p()).abs() < 1e-12);
    }

    #[test]
    fn single_parity_check() {
        // x0 + x1 + x2 = 0 with one unreliable bit.
        let g = TannerGraph::from_edges(3, 1, vec![(0, 0), (1, 0), (2, 0)]).unwrap();
        let mut dec = BpDecoder::new(&g, 25.0);
        let out = dec.decode(&[4.0, 3.0, -0.5], &[0], 5);
        assert!(out.satisfied);
        assert_eq!(out.bits, vec![0, 0, 0]);
        let expect = -0.5 + boxplus(4.0, 3.0);
        assert!((out.llr[2] - expect).abs() < 1e-12);
    }

    #[test]
    fn nonzero_syndrome_flips_check_messages() {
        let g = TannerGraph::from_edges(2, 1, vec![(0, 0), (1, 0)]).unwrap();
        let mut dec = BpDecoder::new(&g, 25.0);
        let out = dec.decode(&[5.0, -0.2], &[1], 5);
        assert!(out.satisfied);
        assert_eq!(out.bits, vec![0, 1]);
    }
}
