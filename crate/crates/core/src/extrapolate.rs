//! Richardson extrapolation to `h = 0` by Neville's polynomial scheme.

use rug::Float;

use crate::num::Cx;

/// Extrapolate samples `(h_j, y_j)` of a function with an expansion in
/// integer powers of `h` to `h = 0`.
///
/// Returns the value and the difference between the two highest-order
/// estimates as an error indicator.
pub fn richardson(hs: &[Float], ys: &[Cx]) -> (Cx, f64) {
    assert_eq!(hs.len(), ys.len());
    assert!(!hs.is_empty());
    let n = hs.len();
    let mut table: Vec<Cx> = ys.to_vec();
    let mut prev_top = table[0].clone();
    for k in 1..n {
        prev_top = table[0].clone();
        for i in 0..n - k {
            // P_{i..i+k}(0) = (h_{i+k} P_{i..i+k-1} - h_i P_{i+1..i+k}) / (h_{i+k} - h_i)
            let hi = &hs[i];
            let hk = &hs[i + k];
            let den = Float::with_val(hi.prec(), hk - hi);
            let a = table[i].scale(hk);
            let b = table[i + 1].scale(hi);
            table[i] = (a - b).scale(&den.recip());
        }
    }
    let err = if n > 1 { table[0].dist(&prev_top) } else { f64::INFINITY };
    (table[0].clone(), err)
}
