//! Peak location on sampled spectra.

/// 3-point moving average; the two ends average with their one neighbour.
pub fn smooth3(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n < 2 {
        return values.to_vec();
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Interior indices strictly greater than both neighbours.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect()
}

/// Interior indices strictly less than both neighbours.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] < values[i + 1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_isolated_peak() {
        let v = [0.0, 1.0, 3.0, 1.0, 0.0, 0.5, 0.0];
        assert_eq!(local_maxima(&v), vec![2, 5]);
        assert_eq!(local_minima(&v), vec![4]);
        let s = smooth3(&v);
        assert_eq!(s.len(), v.len());
        assert!((s[2] - 5.0 / 3.0).abs() < 1e-15);
        assert!((s[0] - 0.5).abs() < 1e-15);
        assert_eq!(local_maxima(&s), vec![2]);
    }

    #[test]
    fn plateaus_are_not_peaks() {
        assert!(local_maxima(&[0.0, 1.0, 1.0, 0.0]).is_empty());
        assert!(local_minima(&[2.0]).is_empty());
        assert!(smooth3(&[]).is_empty());
    }
}
