//! Deterministic quasi-random sampling of chart boxes.
//!
//! Halton sequences keep sample sets reproducible across runs: the same
//! box, count, seed, and margin always produce byte-identical points.

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical-inverse of `index` in the given base.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut frac = 1.0 / base as f64;
    while index > 0 {
        result += (index % base) as f64 * frac;
        index /= base;
        frac /= base as f64;
    }
    result
}

/// `count` Halton points inside `box_`, shrunk on every side by
/// `margin` (a fraction of each interval width) to stay clear of chart
/// singularities on the boundary. `seed` offsets the sequence index.
pub fn halton_box(box_: &[[f64; 2]], count: usize, seed: u64, margin: f64) -> Vec<Vec<f64>> {
    let dim = box_.len();
    assert!(dim <= PRIMES.len(), "sampling supports up to 8 dimensions");
    let margin = margin.clamp(0.0, 0.45);
    let mut out = Vec::with_capacity(count);
    // skip the first few sequence elements; they cluster on box corners
    let skip = 16;
    for k in 0..count {
        let idx = seed.wrapping_add(skip).wrapping_add(k as u64);
        let mut p = Vec::with_capacity(dim);
        for (d, iv) in box_.iter().enumerate() {
            let u = radical_inverse(idx, PRIMES[d]);
            let width = iv[1] - iv[0];
            let lo = iv[0] + margin * width;
            let hi = iv[1] - margin * width;
            p.push(lo + u * (hi - lo));
        }
        out.push(p);
    }
    out
}
