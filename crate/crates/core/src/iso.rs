//! Exact order-isomorphism search shared by posets and lattices.

/// Per-point invariants preserved by every order isomorphism.
fn signature(n: usize, leq: &impl Fn(usize, usize) -> bool, i: usize) -> (usize, usize) {
    let below = (0..n).filter(|&j| leq(j, i)).count();
    let above = (0..n).filter(|&j| leq(i, j)).count();
    (below, above)
}

/// Backtracking search for a bijection `f` with `a(i, j) <=> b(f(i), f(j))`.
/// Candidates are pruned by down/up-set sizes; any mapping found is
/// re-verified in full before it is returned.
pub(crate) fn find_order_isomorphism(
    n: usize,
    a: impl Fn(usize, usize) -> bool,
    b: impl Fn(usize, usize) -> bool,
) -> Option<Vec<usize>> {
    let sig_a: Vec<_> = (0..n).map(|i| signature(n, &a, i)).collect();
    let sig_b: Vec<_> = (0..n).map(|i| signature(n, &b, i)).collect();
    let mut sorted_a = sig_a.clone();
    let mut sorted_b = sig_b.clone();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return None;
    }
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| sig_a[i] == sig_b[j]).collect())
        .collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if !extend(0, n, &a, &b, &candidates, &mut map, &mut used) {
        return None;
    }
    let ok = (0..n).all(|i| (0..n).all(|j| a(i, j) == b(map[i], map[j])));
    ok.then_some(map)
}

fn extend(
    depth: usize,
    n: usize,
    a: &impl Fn(usize, usize) -> bool,
    b: &impl Fn(usize, usize) -> bool,
    candidates: &[Vec<usize>],
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == n {
        return true;
    }
    for &c in &candidates[depth] {
        if used[c] {
            continue;
        }
        let consistent = (0..depth)
            .all(|u| a(u, depth) == b(map[u], c) && a(depth, u) == b(c, map[u]));
        if !consistent {
            continue;
        }
        map[depth] = c;
        used[c] = true;
        if extend(depth + 1, n, a, b, candidates, map, used) {
            return true;
        }
        used[c] = false;
    }
    map[depth] = usize::MAX;
    false
}
