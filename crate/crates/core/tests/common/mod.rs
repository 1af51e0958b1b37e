//! Independent oracles: closed forms and a dense rational solver over balls
//! enumerated from string words, sharing no code with the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `μ_{B(0,r)}(k, r + 1)` for the simple walk on Z.
pub fn gamblers_ruin(r: i64, k: i64) -> BigRational {
    q(k + r + 1, 2 * r + 2)
}

/// Free reduction of a word over `aAbB...`.
pub fn free_reduce(word: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in word.chars() {
        match out.last() {
            Some(&l) if l != c && l.eq_ignore_ascii_case(&c) => {
                out.pop();
            }
            _ => out.push(c),
        }
    }
    out.into_iter().collect()
}

/// A ball given by interior states, boundary states and uniform neighbor lists.
pub struct OracleBall<S> {
    pub interior: Vec<S>,
    pub boundary: Vec<S>,
    pub neighbors: Vec<Vec<S>>,
}

pub fn oracle_ball<S, F>(center: S, radius: usize, step: F) -> OracleBall<S>
where
    S: Clone + Eq + std::hash::Hash + Ord,
    F: Fn(&S) -> Vec<S>,
{
    let mut dist: HashMap<S, usize> = HashMap::from([(center.clone(), 0)]);
    let mut queue = VecDeque::from([center]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius + 1 {
            continue;
        }
        for w in step(&v) {
            if !dist.contains_key(&w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    let mut interior: Vec<S> = dist.iter().filter(|(_, &d)| d <= radius).map(|(v, _)| v.clone()).collect();
    let mut boundary: Vec<S> = dist.iter().filter(|(_, &d)| d == radius + 1).map(|(v, _)| v.clone()).collect();
    interior.sort();
    boundary.sort();
    let neighbors = interior.iter().map(&step).collect();
    OracleBall { interior, boundary, neighbors }
}

/// Dense Gauss-Jordan solve of `h(v) = mean_w h(w)` with boundary data `[w = x]`,
/// for every boundary `x`. Returns `μ[interior state][boundary state]`.
pub fn dense_exit<S: Clone + Eq + Ord>(ball: &OracleBall<S>) -> BTreeMap<S, BTreeMap<S, BigRational>> {
    let n = ball.interior.len();
    let m = ball.boundary.len();
    let pos_i: BTreeMap<&S, usize> = ball.interior.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let pos_b: BTreeMap<&S, usize> = ball.boundary.iter().enumerate().map(|(i, s)| (s, i)).collect();
    // Augmented matrix [I - Q | R].
    let mut a = vec![vec![BigRational::zero(); n + m]; n];
    for (i, nbrs) in ball.neighbors.iter().enumerate() {
        let p = q(1, nbrs.len() as i64);
        a[i][i] += BigRational::one();
        for w in nbrs {
            if let Some(&j) = pos_i.get(w) {
                a[i][j] -= &p;
            } else {
                a[i][n + pos_b[w]] += &p;
            }
        }
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("nonsingular");
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n + m {
                    let t = &a[col][c] * &f;
                    a[r][c] -= t;
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (i, s) in ball.interior.iter().enumerate() {
        let row = ball.boundary.iter().enumerate().map(|(j, x)| (x.clone(), a[i][n + j].clone())).collect();
        out.insert(s.clone(), row);
    }
    out
}

pub fn free_steps(w: &String) -> Vec<String> {
    ["a", "A", "b", "B"].iter().map(|g| free_reduce(&format!("{w}{g}"))).collect()
}

pub fn z2_steps(v: &(i64, i64)) -> Vec<(i64, i64)> {
    vec![(v.0 + 1, v.1), (v.0 - 1, v.1), (v.0, v.1 + 1), (v.0, v.1 - 1)]
}

/// `ε` from two oracle rows.
pub fn oracle_epsilon<S: Ord>(row_a: &BTreeMap<S, BigRational>, row_b: &BTreeMap<S, BigRational>) -> BigRational {
    row_a
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(x, v)| ((v - &row_b[x]) / v).abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}

pub fn z2_ball_size(r: u64) -> u64 {
    2 * r * r + 2 * r + 1
}

pub fn f2_ball_size(r: u32) -> u64 {
    2 * 3u64.pow(r) - 1
}
