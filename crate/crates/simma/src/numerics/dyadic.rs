//! Dyadic grids and variation sums.
//!
//! The level sequence `V_0 <= V_1 <= ... <= V_n` is computed bottom-up: base
//! increments are pair-reduced through a binary tree, and each level's sum of
//! absolute block increments is accumulated through the same tree. Rounding
//! is monotone, so the refinement inequality `V_{n+1} >= V_n` holds exactly
//! in floating point, not just up to epsilon.

/// Uniform dyadic grid: `2^level + 1` points on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicGrid {
    pub a: f64,
    pub b: f64,
    pub level: u32,
}

impl DyadicGrid {
    pub fn unit(level: u32) -> Self {
        Self { a: 0.0, b: 1.0, level }
    }

    pub fn len(&self) -> usize {
        (1usize << self.level) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        self.a + (self.b - self.a) * (i as f64) * 0.5f64.powi(self.level as i32)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Sum of absolute increments over consecutive values.
pub fn dyadic_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

fn tree_sum(xs: &mut Vec<f64>) -> f64 {
    while xs.len() > 1 {
        let mut next = Vec::with_capacity(xs.len() / 2 + 1);
        let mut it = xs.chunks_exact(2);
        for pair in &mut it {
            next.push(pair[0] + pair[1]);
        }
        if let [last] = it.remainder() {
            next.push(*last);
        }
        *xs = next;
    }
    xs.first().copied().unwrap_or(0.0)
}

/// Variation levels `V_0..=V_n` for `2^n + 1` values on a dyadic grid.
///
/// `values.len()` must be `2^n + 1` for some `n`; the returned vector is
/// nondecreasing exactly.
pub fn variation_levels(values: &[f64]) -> Vec<f64> {
    assert!(!values.is_empty(), "variation_levels needs at least one value");
    let cells = values.len() - 1;
    assert!(
        cells.count_ones() <= 1,
        "value count must be 2^n + 1, got {}",
        values.len()
    );
    let n = if cells == 0 { 0 } else { cells.trailing_zeros() };
    let mut incs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = vec![0.0; (n + 1) as usize];
    for lvl in (0..=n).rev() {
        let mut abs: Vec<f64> = incs.iter().map(|d| d.abs()).collect();
        out[lvl as usize] = tree_sum(&mut abs);
        if lvl > 0 {
            incs = incs.chunks_exact(2).map(|p| p[0] + p[1]).collect();
        }
    }
    out
}
