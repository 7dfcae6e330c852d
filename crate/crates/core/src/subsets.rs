//! k-subsets of `{0, …, n−1}` in colexicographic order.

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Iterator over sorted k-subsets in colex order: `{0,1,2}, {0,1,3},
/// {0,2,3}, {1,2,3}, {0,1,4}, …`.
#[derive(Debug, Clone)]
pub struct Colex {
    n: usize,
    current: Option<Vec<usize>>,
}

pub fn colex(n: usize, k: usize) -> Colex {
    Colex { n, current: (k <= n).then(|| (0..k).collect()) }
}

impl Iterator for Colex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        // Advance the lowest position that can move up without colliding.
        let mut advanced = false;
        for i in 0..k {
            let limit = if i + 1 < k { next[i + 1] } else { self.n };
            if next[i] + 1 < limit {
                next[i] += 1;
                for (t, slot) in next.iter_mut().enumerate().take(i) {
                    *slot = t;
                }
                advanced = true;
                break;
            }
        }
        if advanced {
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Complement of a sorted subset within `{0, …, n−1}`.
pub fn complement(n: usize, subset: &[usize]) -> Vec<usize> {
    let mut mask = vec![false; n];
    for &s in subset {
        mask[s] = true;
    }
    (0..n).filter(|&i| !mask[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_order_small() {
        let got: Vec<_> = colex(5, 3).take(5).collect();
        assert_eq!(got, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3], vec![0, 1, 4]]);
    }

    #[test]
    fn colex_counts() {
        for n in 0..9 {
            for k in 0..=n + 1 {
                let all: Vec<_> = colex(n, k).collect();
                assert_eq!(all.len() as u64, binomial(n, k), "n={n} k={k}");
                let mut sorted = all.clone();
                sorted.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
                assert_eq!(sorted, all);
            }
        }
        assert_eq!(colex(3, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(10, 5), 252);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(200, 100), u64::MAX);
    }
}
