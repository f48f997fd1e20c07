//! Wynn's epsilon algorithm for accelerating slowly converging (typically
//! alternating) sequences of partial sums.

#[derive(Debug, Default, Clone)]
pub struct WynnEpsilon {
    sums: Vec<f64>,
    history: Vec<f64>,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// Append a partial sum and return the current extrapolated limit
    /// together with an error estimate.
    pub fn push(&mut self, s: f64) -> (f64, f64) {
        self.sums.push(s);
        let limit = extrapolate(&self.sums);
        self.history.push(limit);
        let n = self.history.len();
        let err = match n {
            1 => f64::INFINITY,
            2 => (self.history[1] - self.history[0]).abs(),
            _ => {
                (self.history[n - 1] - self.history[n - 2]).abs()
                    + (self.history[n - 1] - self.history[n - 3]).abs()
            }
        };
        (limit, err)
    }
}

/// Highest even-column entry of the epsilon table built from `sums`.
pub fn extrapolate(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return *sums.last().unwrap_or(&0.0);
    }
    // prev = column k-1, cur = column k; column -1 is all zeros.
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 || !diff.is_finite() {
                // Column has converged exactly; its last entry is the limit.
                return if k % 2 == 0 { cur[cur.len() - 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            best = cur[cur.len() - 1];
        }
    }
    best
}
