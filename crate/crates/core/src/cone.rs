//! Light-cone evolution of finite segments.
//!
//! A segment covering `[lo, lo + len)` at time 0 determines `F^j` exactly on
//! `[lo + j r, lo + len - j r)`. Segments extracted from a periodic configuration
//! (indices mod `N`) therefore reproduce the periodic evolution on that range.

use crate::ca::{LocalRule, PeriodicConfig};

/// Evolves `cells` (positions `[lo, lo + len)`) for `steps` steps. `visit(j, lo_j, cells_j)`
/// is called for `j = 0..=steps` with the surviving segment; returning `false` stops early.
pub(crate) fn evolve(
    rule: &LocalRule,
    lo: i64,
    mut cells: Vec<u8>,
    steps: usize,
    mut visit: impl FnMut(usize, i64, &[u8]) -> bool,
) {
    let r = rule.radius() as i64;
    let mut next = Vec::with_capacity(cells.len());
    if !visit(0, lo, &cells) {
        return;
    }
    for j in 1..=steps {
        rule.step_segment(&cells, &mut next);
        std::mem::swap(&mut cells, &mut next);
        if !visit(j, lo + j as i64 * r, &cells) {
            return;
        }
    }
}

/// Window `[i1, i2)` of `F^j(x)` for `j = 0..=steps`, computed on the light cone only.
pub(crate) fn window_trace(rule: &LocalRule, x: &PeriodicConfig, i1: i64, i2: i64, steps: usize) -> Vec<Vec<u8>> {
    let reach = (steps * rule.radius()) as i64;
    let lo = i1 - reach;
    let cells = x.segment(lo, i2 + reach);
    let mut out = Vec::with_capacity(steps + 1);
    evolve(rule, lo, cells, steps, |_, lo_j, seg| {
        let a = (i1 - lo_j) as usize;
        out.push(seg[a..a + (i2 - i1) as usize].to_vec());
        true
    });
    out
}
