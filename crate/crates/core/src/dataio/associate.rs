/// Greedy nearest-timestamp matching.
///
/// All candidate pairs closer than `max_dt` are visited in increasing order of
/// `|a - b|` (ties broken by the timestamps themselves) and a pair is accepted
/// when neither side has been used yet. Because the visit order only depends
/// on the timestamp values, permuting either input does not change which
/// timestamps end up paired.
///
/// Returns `(index_in_a, index_in_b)` pairs sorted by `a`'s timestamp.
pub fn associate(a: &[f64], b: &[f64], max_dt: f64) -> Vec<(usize, usize)> {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &ta) in a.iter().enumerate() {
        for (j, &tb) in b.iter().enumerate() {
            let d = (ta - tb).abs();
            if d <= max_dt {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(a[x.1].total_cmp(&a[y.1]))
            .then(b[x.2].total_cmp(&b[y.2]))
    });

    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_by(|x, y| a[x.0].total_cmp(&a[y.0]));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn close_pair_is_matched() {
        assert_eq!(associate(&[1.000], &[1.002], 0.02), vec![(0, 0)]);
    }

    #[test]
    fn distant_pair_is_dropped() {
        assert!(associate(&[1.000], &[1.500], 0.02).is_empty());
    }

    #[test]
    fn each_entry_used_once() {
        // Both a-entries want b[0]; the closer one gets it.
        let pairs = associate(&[1.00, 1.01], &[1.008, 1.05], 0.02);
        assert_eq!(pairs, vec![(1, 0)]);
    }

    fn matched_values(a: &[f64], b: &[f64], dt: f64) -> Vec<(u64, u64)> {
        let mut v: Vec<_> = associate(a, b, dt)
            .into_iter()
            .map(|(i, j)| (a[i].to_bits(), b[j].to_bits()))
            .collect();
        v.sort();
        v
    }

    proptest! {
        #[test]
        fn permutation_does_not_change_pairs(
            a in prop::collection::vec(0u32..2000, 1..12),
            b in prop::collection::vec(0u32..2000, 1..12),
            rot_a in 0usize..12,
            rot_b in 0usize..12,
        ) {
            let a: Vec<f64> = a.into_iter().map(|v| v as f64 * 1e-3).collect();
            let b: Vec<f64> = b.into_iter().map(|v| v as f64 * 1e-3).collect();
            let mut pa = a.clone();
            pa.rotate_left(rot_a % a.len());
            pa.reverse();
            let mut pb = b.clone();
            pb.rotate_left(rot_b % b.len());
            prop_assert_eq!(matched_values(&a, &b, 0.05), matched_values(&pa, &pb, 0.05));
        }
    }
}
