use crate::error::{Error, Result};

/// UE ids ordered by ascending energy; equal energies keep ascending id order.
pub fn sort_by_energy(per_ue_total_j: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..per_ue_total_j.len()).collect();
    order.sort_by(|&a, &b| per_ue_total_j[a].total_cmp(&per_ue_total_j[b]));
    order
}

/// `W` consecutive entries of the energy-sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub offset: usize,
    pub member_ids: Vec<usize>,
}

impl Window {
    pub fn len(&self) -> usize {
        self.member_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_ids.is_empty()
    }
}

/// All `K - W + 1` windows over `sorted_ids`.
pub fn build_windows(sorted_ids: &[usize], w: usize) -> Result<Vec<Window>> {
    let k = sorted_ids.len();
    if w == 0 || w > k {
        return Err(Error::config("window_len", format!("must satisfy 1 <= W <= K={k}, got {w}")));
    }
    Ok(sorted_ids.windows(w).enumerate().map(|(offset, ids)| Window { offset, member_ids: ids.to_vec() }).collect())
}

/// `C(n, k)`, or any value above `cap` once the coefficient exceeds it.
pub fn binomial_capped(n: usize, k: usize, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // C(n-k+i, i) is non-decreasing in i, so the partial products can stop early
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        let next = c.checked_mul(n as u128 - k as u128 + i).map(|v| v / i);
        match next {
            Some(v) if v <= cap => c = v,
            _ => return cap.saturating_add(1),
        }
    }
    c
}

/// `min(ceil(C(n, k) / m), g_max)`, computed without overflow for any size.
pub fn generation_budget(n: usize, k: usize, m: usize, g_max: usize) -> usize {
    assert!(m > 0);
    let cap = (m as u128).saturating_mul(g_max as u128);
    let c = binomial_capped(n, k, cap);
    if c > cap {
        g_max
    } else {
        (c.div_ceil(m as u128) as usize).min(g_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_order() {
        assert_eq!(sort_by_energy(&[3.0, 1.0, 2.0]), vec![1, 2, 0]);
        assert_eq!(sort_by_energy(&[5.0, 5.0, 5.0]), vec![0, 1, 2]);
        assert_eq!(sort_by_energy(&[2.0, 1.0, 2.0, 1.0]), vec![1, 3, 0, 2]);
    }

    #[test]
    fn window_counts() {
        let ids: Vec<usize> = (0..100).collect();
        assert_eq!(build_windows(&ids, 25).unwrap().len(), 76);
        let all = build_windows(&ids, 100).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].member_ids, ids);
        assert!(build_windows(&ids, 101).is_err());
        assert!(build_windows(&ids, 0).is_err());
    }

    #[test]
    fn small_windows_slide_by_one() {
        let sorted = [4, 2, 0, 3, 1];
        let windows = build_windows(&sorted, 3).unwrap();
        let got: Vec<(usize, Vec<usize>)> = windows.into_iter().map(|w| (w.offset, w.member_ids)).collect();
        assert_eq!(got, vec![(0, vec![4, 2, 0]), (1, vec![2, 0, 3]), (2, vec![0, 3, 1])]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_capped(10, 4, u128::MAX), 210);
        assert_eq!(binomial_capped(100, 25, u128::MAX), 242_519_269_720_337_121_015_504);
        assert_eq!(binomial_capped(7, 7, 10), 1);
        assert_eq!(binomial_capped(3, 5, 10), 0);
        assert_eq!(binomial_capped(1000, 500, 1_000), 1_001);
    }

    #[test]
    fn budgets() {
        assert_eq!(generation_budget(10, 4, 50, 100), 5);
        assert_eq!(generation_budget(100, 25, 40, 100), 100);
        assert_eq!(generation_budget(30, 30, 40, 100), 1);
        assert_eq!(generation_budget(usize::MAX / 2, 3, 40, 100), 100);
    }
}
