//! Closed forms for isolated cliques: two-party caveman graphs and
//! multi-party single cliques / plurality cores.

use super::Scalar;
use crate::error::{invalid, Result};

/// Red count of every clique in a caveman graph, sorted so that red-majority
/// cliques come first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueCounts {
    sorted: Vec<usize>,
    clique_size: usize,
    prefix: Vec<usize>,
    strict: usize,
    weak: usize,
}

impl CliqueCounts {
    pub fn new(red_counts: &[usize], clique_size: usize) -> Result<Self> {
        if red_counts.is_empty() || clique_size == 0 {
            return Err(invalid("need at least one clique of positive size"));
        }
        if let Some(&x) = red_counts.iter().find(|&&x| x > clique_size) {
            return Err(invalid(format!("clique red count {x} exceeds clique size {clique_size}")));
        }
        let mut sorted = red_counts.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let prefix = std::iter::once(0)
            .chain(sorted.iter().scan(0, |acc, &x| {
                *acc += x;
                Some(*acc)
            }))
            .collect();
        let strict = sorted.iter().filter(|&&x| 2 * x > clique_size).count();
        let weak = sorted.iter().filter(|&&x| 2 * x >= clique_size).count();
        Ok(CliqueCounts {
            sorted,
            clique_size,
            prefix,
            strict,
            weak,
        })
    }

    pub fn clique_count(&self) -> usize {
        self.sorted.len()
    }

    pub fn clique_size(&self) -> usize {
        self.clique_size
    }

    /// Cliques with a strict red majority.
    pub fn strict_majorities(&self) -> usize {
        self.strict
    }

    /// Cliques where red holds at least half.
    pub fn weak_majorities(&self) -> usize {
        self.weak
    }

    /// Exactly tied cliques.
    pub fn marginal(&self) -> usize {
        self.weak - self.strict
    }

    /// Red total over the `d` most-red cliques.
    pub fn prefix_sum(&self, d: usize) -> usize {
        self.prefix[d]
    }

    pub fn red_total(&self) -> usize {
        self.prefix[self.sorted.len()]
    }

    pub fn node_count(&self) -> usize {
        self.sorted.len() * self.clique_size
    }

    fn sum_sq(&self) -> i64 {
        self.sorted.iter().map(|&x| (x * x) as i64).sum()
    }
}

fn check_totals(counts: &CliqueCounts, n_red: usize, n_blue: usize) -> Result<()> {
    if n_red + n_blue != counts.node_count() {
        return Err(invalid(format!(
            "N_R + N_B = {} but l*k = {}",
            n_red + n_blue,
            counts.node_count()
        )));
    }
    if n_red != counts.red_total() {
        return Err(invalid(format!(
            "N_R = {n_red} but clique red counts sum to {}",
            counts.red_total()
        )));
    }
    if n_red == 0 || n_blue == 0 {
        return Err(invalid("both parties need at least one voter"));
    }
    Ok(())
}

/// `(A_R, A_B)` on isolated cliques from per-clique red counts.
pub fn caveman_assortments_closed<T: Scalar>(
    counts: &CliqueCounts,
    n_red: usize,
    n_blue: usize,
) -> Result<(T, T)> {
    check_totals(counts, n_red, n_blue)?;
    let k = counts.clique_size as i64;
    let n = counts.node_count() as i64;
    let (nr, nb) = (n_red as i64, n_blue as i64);
    let sq_over_k = T::ratio(counts.sum_sq(), k);
    let x_weak = counts.prefix_sum(counts.weak) as i64;
    let x_strict = counts.prefix_sum(counts.strict) as i64;
    let m = counts.strict as i64;
    let a_red = (sq_over_k + T::ratio(x_weak, 1)) / T::ratio(nr, 1) - T::one();
    let a_blue = (sq_over_k + T::ratio(x_strict + n - 2 * nr - m * k, 1)) / T::ratio(nb, 1);
    Ok((a_red, a_blue))
}

/// `G_R = A_R - A_B` on isolated cliques. Taken as the difference of the two
/// party closed forms; the single-expression form circulating for this gap
/// flips the sign of its `(N_B - N_R)/N_B` term.
pub fn caveman_gap_closed<T: Scalar>(counts: &CliqueCounts, n_red: usize, n_blue: usize) -> Result<T> {
    let (a_red, a_blue) = caveman_assortments_closed::<T>(counts, n_red, n_blue)?;
    Ok(a_red - a_blue)
}

/// Red gap on isolated cliques under equal representation, from the strict
/// (`m`) and weak (`m_weak`) red-majority clique counts.
pub fn equal_rep_gap<T: Scalar>(m: usize, m_weak: usize, l: usize) -> Result<T> {
    if m > m_weak || m_weak > l || l == 0 {
        return Err(invalid(format!("need M <= M' <= l with l > 0, got M={m}, M'={m_weak}, l={l}")));
    }
    Ok(T::ratio((m + m_weak) as i64, l as i64) - T::one())
}

/// Gap on a clique of `n` voters where `w` parties tie for first with `n0`
/// voters each: `+2 n0 / n` for those winners, `-2 n0 / n` otherwise.
pub fn clique_gap<T: Scalar>(n: usize, n0: usize, w: usize, is_winner: bool) -> Result<T> {
    if n == 0 || n0 == 0 || w == 0 || w * n0 > n {
        return Err(invalid(format!("need 0 < W*N0 <= N, got N={n}, N0={n0}, W={w}")));
    }
    let g = T::ratio(2 * n0 as i64, n as i64);
    Ok(if is_winner { g } else { -g })
}

/// Approximate gap when the `w` winning parties form a fully connected core
/// and every other voter only sees that core: `±2 n0 / (w n0 + 1)`.
pub fn plurality_core_gap<T: Scalar>(n0: usize, w: usize, is_winner: bool) -> Result<T> {
    if n0 == 0 || w == 0 {
        return Err(invalid("need N0 >= 1 and W >= 1"));
    }
    let g = T::ratio(2 * n0 as i64, (w * n0 + 1) as i64);
    Ok(if is_winner { g } else { -g })
}
