//! Brute-force oracles. Each works from an order table or from raw
//! definitions and shares no code with the library algorithms.
#![allow(dead_code)]

use kframe::{Lattice, Limits};

pub type Relation = Vec<Vec<bool>>;

pub fn is_partial_order(r: &Relation) -> bool {
    let n = r.len();
    (0..n).all(|i| r[i][i])
        && (0..n).all(|i| (0..n).all(|j| i == j || !(r[i][j] && r[j][i])))
        && (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(r[i][j] && r[j][k]) || r[i][k])))
}

/// Exhaustive bijection search, abandoning a partial map as soon as it
/// breaks the order on the points mapped so far.
pub fn order_isomorphic(a: &Relation, b: &Relation) -> bool {
    fn extend(a: &Relation, b: &Relation, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == a.len() {
            return true;
        }
        for j in 0..b.len() {
            if used[j] || (0..i).any(|k| a[k][i] != b[map[k]][j] || a[i][k] != b[j][map[k]]) {
                continue;
            }
            map.push(j);
            used[j] = true;
            if extend(a, b, map, used) {
                return true;
            }
            map.pop();
            used[j] = false;
        }
        false
    }
    a.len() == b.len() && extend(a, b, &mut Vec::new(), &mut vec![false; b.len()])
}

/// Every partial order on `k` labeled points, deduplicated up to isomorphism.
pub fn posets_up_to_iso(k: usize) -> Vec<Relation> {
    let off: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let mut reps: Vec<Relation> = Vec::new();
    for bits in 0u64..1 << off.len() {
        let mut r = vec![vec![false; k]; k];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for (b, &(i, j)) in off.iter().enumerate() {
            r[i][j] = bits >> b & 1 == 1;
        }
        if is_partial_order(&r) && !reps.iter().any(|q| order_isomorphic(q, &r)) {
            reps.push(r);
        }
    }
    reps
}

pub fn table(l: &Lattice) -> Relation {
    l.order_table()
}

/// Least upper bound straight from the order table.
pub fn lub(t: &Relation, a: usize, b: usize) -> Option<usize> {
    let n = t.len();
    let ubs: Vec<usize> = (0..n).filter(|&u| t[a][u] && t[b][u]).collect();
    ubs.iter().copied().find(|&u| ubs.iter().all(|&v| t[u][v]))
}

pub fn glb(t: &Relation, a: usize, b: usize) -> Option<usize> {
    let n = t.len();
    let lbs: Vec<usize> = (0..n).filter(|&u| t[u][a] && t[u][b]).collect();
    lbs.iter().copied().find(|&u| lbs.iter().all(|&v| t[v][u]))
}

/// Every set partition of `0..n`, as block labels.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            go(i + 1, n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// An equivalence relation as a boolean matrix.
pub type Equiv = Vec<Vec<bool>>;

pub fn equiv_of(labels: &[usize]) -> Equiv {
    labels.iter().map(|a| labels.iter().map(|b| a == b).collect()).collect()
}

pub fn equiv_of_congruence(c: &kframe::Congruence) -> Equiv {
    let labels: Vec<usize> = c.labels().collect();
    equiv_of(&labels)
}

pub fn contained(a: &Equiv, b: &Equiv) -> bool {
    a.iter().zip(b).all(|(ra, rb)| ra.iter().zip(rb).all(|(&x, &y)| !x || y))
}

/// All lattice congruences, by filtering every partition for compatibility
/// with the brute-force join and meet.
pub fn congruences(l: &Lattice) -> Vec<Equiv> {
    let t = table(l);
    let n = t.len();
    let join = |a, b| lub(&t, a, b).unwrap();
    let meet = |a, b| glb(&t, a, b).unwrap();
    partitions(n)
        .into_iter()
        .map(|p| equiv_of(&p))
        .filter(|e| {
            (0..n).all(|a| {
                (0..n).all(|b| {
                    !e[a][b] || (0..n).all(|c| e[join(a, c)][join(b, c)] && e[meet(a, c)][meet(b, c)])
                })
            })
        })
        .collect()
}

/// The smallest congruence containing `pairs`.
pub fn generated(all: &[Equiv], pairs: &[(usize, usize)]) -> Equiv {
    let holding: Vec<&Equiv> = all.iter().filter(|e| pairs.iter().all(|&(a, b)| e[a][b])).collect();
    let n = all[0].len();
    (0..n)
        .map(|a| (0..n).map(|b| holding.iter().all(|e| e[a][b])).collect())
        .collect()
}

pub fn is_diagonal(e: &Equiv) -> bool {
    (0..e.len()).all(|a| (0..e.len()).all(|b| a == b || !e[a][b]))
}

/// Largest closed congruence (generated by some `(0,b)`) below `c`.
pub fn closure(l: &Lattice, all: &[Equiv], c: &Equiv) -> Equiv {
    let closed: Vec<Equiv> = l.elements().map(|b| generated(all, &[(l.bottom(), b)])).collect();
    let below: Vec<&Equiv> = closed.iter().filter(|k| contained(k, c)).collect();
    let top = below.iter().find(|k| below.iter().all(|o| contained(o, k))).expect("closed congruences below C have a largest");
    (*top).clone()
}

/// Largest congruence `d` with `∇i <= d` and `cl(d) <= ∇i`.
pub fn clear_of_ideal(l: &Lattice, all: &[Equiv], i: usize) -> Equiv {
    let nabla = generated(all, &[(l.bottom(), i)]);
    let cands: Vec<&Equiv> = all
        .iter()
        .filter(|d| contained(&nabla, d) && contained(&closure(l, all, d), &nabla))
        .collect();
    (*cands.iter().find(|d| cands.iter().all(|o| contained(o, d))).expect("a largest one exists")).clone()
}

/// Complement search straight from the order table.
pub fn is_boolean(l: &Lattice) -> bool {
    let t = table(l);
    let n = t.len();
    let (bot, top) = ((0..n).find(|&b| (0..n).all(|x| t[b][x])).unwrap(), (0..n).find(|&u| (0..n).all(|x| t[x][u])).unwrap());
    (0..n).all(|a| (0..n).any(|b| lub(&t, a, b) == Some(top) && glb(&t, a, b) == Some(bot)))
}

/// Lattices isomorphic as orders, by bijection search on the order tables.
pub fn lattices_isomorphic(a: &Lattice, b: &Lattice) -> bool {
    order_isomorphic(&table(a), &table(b))
}

pub fn corpus(max_points: usize) -> Vec<(String, Lattice)> {
    kframe::verify::build_corpus(max_points, &Limits::default())
        .unwrap()
        .entries()
        .iter()
        .map(|e| (e.name.clone(), e.lattice.clone()))
        .collect()
}
