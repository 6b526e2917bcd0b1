/// All partitions of `n_aps` APs into at most `g_max` non-empty blocks.
///
/// Each partition is a block label per AP in restricted-growth form: AP 0
/// is in block 0 and every AP's label is at most one more than the largest
/// label before it. That form is canonical, so no partition appears twice.
/// Partitions come out in lexicographic order of their labels.
pub fn enumerate_groupings(n_aps: usize, g_max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n_aps == 0 || g_max == 0 {
        return out;
    }
    let mut labels = Vec::with_capacity(n_aps);
    grow(n_aps, g_max, 0, &mut labels, &mut out);
    out
}

fn grow(n: usize, g_max: usize, blocks: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if labels.len() == n {
        out.push(labels.clone());
        return;
    }
    let limit = (blocks + 1).min(g_max);
    for g in 0..limit {
        labels.push(g);
        grow(n, g_max, blocks.max(g + 1), labels, out);
        labels.pop();
    }
}

/// Size of the largest block of a labelled partition.
pub fn largest_block(labels: &[usize]) -> usize {
    let mut counts = vec![0usize; labels.iter().max().map_or(0, |m| m + 1)];
    for &g in labels {
        counts[g] += 1;
    }
    counts.into_iter().max().unwrap_or(0)
}
