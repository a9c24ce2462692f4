//! Compensated summation for power sums over whole maps.

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let t = sum + v;
        if f64::abs(sum) >= f64::abs(v) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// `sum v^2` with compensation.
pub fn power<'a, I: IntoIterator<Item = &'a f64>>(values: I) -> f64 {
    compensated_sum(values.into_iter().map(|v| v * v))
}
