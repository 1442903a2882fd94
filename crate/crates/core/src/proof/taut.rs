//! Tautology checking over the propositional skeleton.
//!
//! Every maximal subformula whose principal operator is not `¬`, `∧` or `⊤`
//! becomes an atom; equal subformulas share an atom.

use crate::syntax::Formula;

/// Largest number of skeleton atoms the truth table will enumerate.
pub const MAX_TAUT_ATOMS: usize = 12;

/// Distinct skeleton atoms of `f` in order of first occurrence.
pub fn skeleton_atoms(f: &Formula) -> Vec<&Formula> {
    fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::Top => {}
            Formula::Neg(a) => go(a, out),
            Formula::And(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out
}

/// `Some(true)` if `f` is a tautology of its skeleton, `Some(false)` if not,
/// `None` if the skeleton has more than [`MAX_TAUT_ATOMS`] atoms.
pub fn is_tautology(f: &Formula) -> Option<bool> {
    let atoms = skeleton_atoms(f);
    if atoms.len() > MAX_TAUT_ATOMS {
        return None;
    }
    // truth tables as bitsets over the 2^k rows
    let rows = 1usize << atoms.len();
    let words = rows.div_ceil(64);
    let column = |k: usize| -> Vec<u64> {
        let mut v = vec![0u64; words];
        for row in 0..rows {
            if row >> k & 1 == 1 {
                v[row / 64] |= 1 << (row % 64);
            }
        }
        v
    };
    let columns: Vec<Vec<u64>> = (0..atoms.len()).map(column).collect();
    fn table(f: &Formula, atoms: &[&Formula], columns: &[Vec<u64>], words: usize) -> Vec<u64> {
        match f {
            Formula::Top => vec![u64::MAX; words],
            Formula::Neg(a) => table(a, atoms, columns, words).into_iter().map(|x| !x).collect(),
            Formula::And(a, b) => table(a, atoms, columns, words)
                .into_iter()
                .zip(table(b, atoms, columns, words))
                .map(|(x, y)| x & y)
                .collect(),
            _ => columns[atoms.iter().position(|g| *g == f).expect("atom")].clone(),
        }
    }
    let t = table(f, &atoms, &columns, words);
    let tail = if rows.is_multiple_of(64) { u64::MAX } else { (1u64 << (rows % 64)) - 1 };
    let full = t[..words - 1].iter().all(|&x| x == u64::MAX) && t[words - 1] & tail == tail;
    Some(full)
}
