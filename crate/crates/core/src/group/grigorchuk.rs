//! Word problem and canonical keys for the first Grigorchuk group.
//!
//! Generators `a, b, c, d` act on the binary rooted tree. `a` swaps the two
//! subtrees at the root and has trivial sections; the others fix the first
//! level with sections `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
//!
//! Words are kept freely reduced: no `aa`, and no two adjacent letters from
//! `{b, c, d}` (equal ones cancel, distinct ones multiply to the third). That
//! reduction is not a normal form, so equality goes through the wreath
//! recursion. A reduced word of length `n >= 2` has sections of length at most
//! `(n + 1) / 2`, which bounds the recursion depth by `log2 n`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub const A: u8 = 0;
pub const B: u8 = 1;
pub const C: u8 = 2;
pub const D: u8 = 3;

const LETTERS: [char; 4] = ['a', 'b', 'c', 'd'];

// Portrait tags. Leaves name nucleus elements, nodes carry the root permutation.
const LEAF_ID: u8 = 0;
const LEAF_A: u8 = 1;
const LEAF_B: u8 = 2;
const LEAF_C: u8 = 3;
const LEAF_D: u8 = 4;
const NODE_FIX: u8 = 5;
const NODE_SWAP: u8 = 6;

const MEMO_LIMIT: usize = 1 << 20;

thread_local! {
    static TRIVIAL_MEMO: RefCell<HashMap<Vec<u8>, bool>> = RefCell::new(HashMap::new());
    static PORTRAIT_MEMO: RefCell<HashMap<Vec<u8>, Arc<[u8]>>> = RefCell::new(HashMap::new());
}

/// An element of the Grigorchuk group.
///
/// Equality and hashing use the canonical portrait key only; `word` is one
/// reduced representative kept for display and further multiplication.
#[derive(Clone)]
pub struct GrigElement {
    word: Vec<u8>,
    key: Arc<[u8]>,
}

impl GrigElement {
    pub fn identity() -> Self {
        Self::from_letters(&[])
    }

    pub fn from_letters(letters: &[u8]) -> Self {
        let word = reduce(letters);
        let key = portrait(&word);
        Self { word, key }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut w = self.word.clone();
        w.extend_from_slice(&other.word);
        Self::from_letters(&w)
    }

    /// Every generator is an involution, so the inverse is the reversed word.
    pub fn inverse(&self) -> Self {
        let w: Vec<u8> = self.word.iter().rev().copied().collect();
        Self::from_letters(&w)
    }

    pub fn is_identity(&self) -> bool {
        is_trivial(&self.word)
    }
}

impl PartialEq for GrigElement {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for GrigElement {}

impl Hash for GrigElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl fmt::Debug for GrigElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grig({})", self)
    }
}

impl fmt::Display for GrigElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.word {
            write!(f, "{}", LETTERS[l as usize])?;
        }
        Ok(())
    }
}

pub fn letter_from_char(c: char) -> Option<u8> {
    LETTERS.iter().position(|&l| l == c).map(|i| i as u8)
}

fn push_reduced(stack: &mut Vec<u8>, x: u8) {
    match stack.last().copied() {
        Some(top) if top == x => {
            stack.pop();
        }
        Some(top) if top != A && x != A => {
            // {b, c, d} is a Klein four-group: the product of two distinct letters is the third.
            stack.pop();
            stack.push(6 - top - x);
        }
        _ => stack.push(x),
    }
}

pub fn reduce(letters: &[u8]) -> Vec<u8> {
    let mut stack = Vec::with_capacity(letters.len());
    for &x in letters {
        push_reduced(&mut stack, x);
    }
    stack
}

fn section(letter: u8, vertex: u8) -> Option<u8> {
    match (letter, vertex) {
        (A, _) => None,
        (B, 0) | (C, 0) => Some(A),
        (B, _) => Some(C),
        (C, _) => Some(D),
        (D, 0) => None,
        _ => Some(B),
    }
}

/// Root permutation (true = swap) and the reduced sections at vertices 0 and 1.
///
/// Letters act on the right: the section of `xy` at `v` is `x|_v` followed by
/// `y|_{v^x}`.
pub fn sections(word: &[u8]) -> (bool, Vec<u8>, Vec<u8>) {
    let mut out = [Vec::new(), Vec::new()];
    let mut swaps = false;
    for (start, sec) in out.iter_mut().enumerate() {
        let mut pos = start as u8;
        for &x in word {
            if let Some(s) = section(x, pos) {
                push_reduced(sec, s);
            }
            if x == A {
                pos ^= 1;
            }
        }
        if start == 0 {
            swaps = pos == 1;
        }
    }
    let [s0, s1] = out;
    (swaps, s0, s1)
}

/// Decides whether a word is the identity: it must fix the first level and
/// have both sections trivial. Memoized per thread by reduced word.
pub fn is_trivial(letters: &[u8]) -> bool {
    let word = reduce(letters);
    trivial_reduced(&word)
}

fn trivial_reduced(word: &[u8]) -> bool {
    match word.len() {
        0 => return true,
        1 => return false,
        _ => {}
    }
    if let Some(v) = TRIVIAL_MEMO.with(|m| m.borrow().get(word).copied()) {
        return v;
    }
    let (swaps, s0, s1) = sections(word);
    let v = !swaps && trivial_reduced(&s0) && trivial_reduced(&s1);
    TRIVIAL_MEMO.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() >= MEMO_LIMIT {
            m.clear();
        }
        m.insert(word.to_vec(), v);
    });
    v
}

fn leaf(tag: u8) -> Arc<[u8]> {
    Arc::from(vec![tag])
}

fn is_leaf(p: &[u8], tag: u8) -> bool {
    p.len() == 1 && p[0] == tag
}

/// Canonical key of a reduced word: a preorder encoding of its portrait,
/// truncated at nucleus elements `{1, a, b, c, d}`.
///
/// Two words give the same key iff they represent the same element. A node
/// whose (permutation, sections) match a nucleus element collapses to that
/// leaf, so nucleus elements are always leaves and everything else is a node
/// determined by its faithful action on the tree.
pub fn portrait(word: &[u8]) -> Arc<[u8]> {
    if word.len() <= 1 {
        return leaf(word.first().map_or(LEAF_ID, |&l| l + 1));
    }
    if let Some(p) = PORTRAIT_MEMO.with(|m| m.borrow().get(word).cloned()) {
        return p;
    }
    let (swaps, s0, s1) = sections(word);
    let p0 = portrait(&s0);
    let p1 = portrait(&s1);
    let collapsed = if swaps {
        (is_leaf(&p0, LEAF_ID) && is_leaf(&p1, LEAF_ID)).then_some(LEAF_A)
    } else if is_leaf(&p0, LEAF_ID) && is_leaf(&p1, LEAF_ID) {
        Some(LEAF_ID)
    } else if is_leaf(&p0, LEAF_A) && is_leaf(&p1, LEAF_C) {
        Some(LEAF_B)
    } else if is_leaf(&p0, LEAF_A) && is_leaf(&p1, LEAF_D) {
        Some(LEAF_C)
    } else if is_leaf(&p0, LEAF_ID) && is_leaf(&p1, LEAF_B) {
        Some(LEAF_D)
    } else {
        None
    };
    let key = match collapsed {
        Some(tag) => leaf(tag),
        None => {
            let mut v = Vec::with_capacity(1 + p0.len() + p1.len());
            v.push(if swaps { NODE_SWAP } else { NODE_FIX });
            v.extend_from_slice(&p0);
            v.extend_from_slice(&p1);
            Arc::from(v)
        }
    };
    PORTRAIT_MEMO.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() >= MEMO_LIMIT {
            m.clear();
        }
        m.insert(word.to_vec(), key.clone());
    });
    key
}
