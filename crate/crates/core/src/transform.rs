//! In-place zeta and Möbius transforms over the Boolean lattice.
//!
//! Vectors have length `2^N` and are indexed by subset bit pattern. Each
//! transform runs in `O(N·2^N)`.

fn dims(values: &[f64]) -> usize {
    debug_assert!(values.len().is_power_of_two());
    values.len().trailing_zeros() as usize
}

/// `f(A) ← Σ_{B ⊇ A} f(B)`. Mass to commonality.
pub fn superset_zeta(values: &mut [f64]) {
    for bit in 0..dims(values) {
        let step = 1 << bit;
        for mask in 0..values.len() {
            if mask & step == 0 {
                values[mask] += values[mask | step];
            }
        }
    }
}

/// Inverse of [`superset_zeta`]. Commonality to mass.
pub fn superset_mobius(values: &mut [f64]) {
    for bit in 0..dims(values) {
        let step = 1 << bit;
        for mask in 0..values.len() {
            if mask & step == 0 {
                values[mask] -= values[mask | step];
            }
        }
    }
}

/// `f(A) ← Σ_{B ⊆ A} f(B)`. Mass to implicability `b(A) = bel(A) + m(∅)`.
pub fn subset_zeta(values: &mut [f64]) {
    for bit in 0..dims(values) {
        let step = 1 << bit;
        for mask in 0..values.len() {
            if mask & step != 0 {
                values[mask] += values[mask ^ step];
            }
        }
    }
}

/// Inverse of [`subset_zeta`].
pub fn subset_mobius(values: &mut [f64]) {
    for bit in 0..dims(values) {
        let step = 1 << bit;
        for mask in 0..values.len() {
            if mask & step != 0 {
                values[mask] -= values[mask ^ step];
            }
        }
    }
}
