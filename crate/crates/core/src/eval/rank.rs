use crate::scalar::Real;

/// Ranks `1..=n` of `values`, ties sharing the mean of the ranks they span.
pub fn rank_row<T: Real>(values: &[T], lower_is_better: bool) -> Vec<T> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let o = values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal);
        if lower_is_better {
            o
        } else {
            o.reverse()
        }
    });
    let mut ranks = vec![T::zero(); values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut k = i;
        while k + 1 < idx.len() && values[idx[k + 1]] == values[idx[i]] {
            k += 1;
        }
        // Positions i..=k hold ranks i+1..=k+1.
        let r = T::from_count(i + k + 2) / T::lit(2.0);
        for &p in &idx[i..=k] {
            ranks[p] = r;
        }
        i = k + 1;
    }
    ranks
}

/// Mean rank of each method (column) across datasets (rows).
pub fn avg_rank<T: Real>(rows: &[Vec<T>], lower_is_better: bool) -> Vec<T> {
    let n = rows.first().map_or(0, Vec::len);
    let mut sums = vec![T::zero(); n];
    for row in rows {
        for (s, r) in sums.iter_mut().zip(rank_row(row, lower_is_better)) {
            *s += r;
        }
    }
    let d = T::from_count(rows.len().max(1));
    sums.into_iter().map(|s| s / d).collect()
}

/// Like [`avg_rank`] but missing cells are left out: each row ranks only the
/// methods it has, and a method averages over the rows where it appears.
pub fn avg_rank_partial<T: Real>(rows: &[Vec<Option<T>>], lower_is_better: bool) -> Vec<Option<T>> {
    let n = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut sums = vec![T::zero(); n];
    let mut counts = vec![0usize; n];
    for row in rows {
        let present: Vec<usize> = (0..row.len()).filter(|&j| row[j].is_some()).collect();
        let vals: Vec<T> = present.iter().filter_map(|&j| row[j]).collect();
        for (&j, r) in present.iter().zip(rank_row(&vals, lower_is_better)) {
            sums[j] += r;
            counts[j] += 1;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| (c > 0).then(|| s / T::from_count(c)))
        .collect()
}
