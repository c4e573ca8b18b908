//! Thue–Morse machinery: the three derived digit families, their block
//! substitutions, and the doubling block towers they generate.
//!
//! For `M = 3N+1`, `3N+2`, `3N+3` there is one family each. Every family
//! owns a four-element set of integer 3-blocks with an involutive block map,
//! a matching set of planar-digit 3-blocks with its own involution, and a
//! tower `w_0, w_1, ...` built by `w_{n+1} = w_n^+ phi(w_n^+)`, whose
//! periodizations define the base ladder climbing to the second critical
//! base.

use crate::symbolic::{lex_compare_words, Digit, Word};
use serde::Serialize;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TmError {
    #[error("word of length {0} does not factor into 3-blocks")]
    NotBlockAligned(usize),
    #[error("block {0:?} is not in the family block set")]
    UnknownBlock(Vec<u32>),
    #[error("digit block not in the family block set")]
    UnknownDigitBlock,
    #[error("word does not end with the designated final symbol")]
    BadFinalSymbol,
    #[error("tower level {0} has no block map image")]
    IrregularLevel(usize),
}

/// Classical Thue–Morse prefix `tau_0 .. tau_{n-1}`.
pub fn tau_prefix(n: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push((i.count_ones() & 1) as u8);
    }
    out
}

fn tau(i: usize) -> u32 {
    (i.count_ones() & 1) as u32
}

/// Which residue family a given `M` belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FamilyClass {
    /// `M = 3N+1`
    Mod1,
    /// `M = 3N+2`
    Mod2,
    /// `M = 3N+3`
    Mod3,
}

/// One of the three Thue–Morse type constructions, fixed by `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TMFamily {
    pub class: FamilyClass,
    pub n: u32,
    pub m: u32,
}

/// Which block level a substitution acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockLevel {
    Integer,
    Digit,
}

impl TMFamily {
    pub fn from_m(m: u32) -> Option<TMFamily> {
        if m == 0 {
            return None;
        }
        let (class, n) = match m % 3 {
            1 => (FamilyClass::Mod1, (m - 1) / 3),
            2 => (FamilyClass::Mod2, (m - 2) / 3),
            _ => (FamilyClass::Mod3, (m - 3) / 3),
        };
        Some(TMFamily { class, n, m })
    }

    fn digit(&self, i: u32, j: u32) -> Digit {
        Digit::new(i, j, self.m).expect("family digit out of range")
    }

    /// i-th symbol (1-based) of the family sequence, or of its conjugate.
    pub fn symbol(&self, i: usize, conjugate: bool) -> u32 {
        assert!(i >= 1);
        let n = self.n;
        let k = (i - 1) / 3;
        let t = |idx: usize| if conjugate { 1 - tau(idx) } else { tau(idx) };
        match (self.class, (i - 1) % 3) {
            (FamilyClass::Mod1, 0) => n + t(2 * k + 1),
            (FamilyClass::Mod1, 1) => n,
            (FamilyClass::Mod1, _) => n + t(2 * k + 2),
            (FamilyClass::Mod2, 0) => n + t(2 * k + 1),
            (FamilyClass::Mod2, 1) => n + 1,
            (FamilyClass::Mod2, _) => n + t(2 * k + 2),
            (FamilyClass::Mod3, 0) => n + 2 - 2 * t(k),
            (FamilyClass::Mod3, 1) => n + t(k),
            (FamilyClass::Mod3, _) => n + 1 + t(k + 1),
        }
    }

    /// The four integer 3-blocks; the involution swaps 0<->1 and 2<->3.
    pub fn integer_blocks(&self) -> [[u32; 3]; 4] {
        let n = self.n;
        match self.class {
            FamilyClass::Mod1 => [
                [n + 1, n, n + 1],
                [n, n, n],
                [n + 1, n, n],
                [n, n, n + 1],
            ],
            FamilyClass::Mod2 => [
                [n + 1, n + 1, n + 1],
                [n, n + 1, n],
                [n + 1, n + 1, n],
                [n, n + 1, n + 1],
            ],
            FamilyClass::Mod3 => [
                [n + 2, n, n + 2],
                [n, n + 1, n + 1],
                [n + 2, n, n + 1],
                [n, n + 1, n + 2],
            ],
        }
    }

    /// The four digit 3-blocks; same pairing as [`integer_blocks`].
    pub fn digit_blocks(&self) -> [[Digit; 3]; 4] {
        let n = self.n;
        let d = |i, j| self.digit(i, j);
        match self.class {
            FamilyClass::Mod1 => [
                [d(n + 1, n), d(n, n + 1), d(n + 1, n)],
                [d(n, n), d(n, n + 1), d(n, n)],
                [d(n + 1, n), d(n, n + 1), d(n, n)],
                [d(n, n), d(n, n + 1), d(n + 1, n)],
            ],
            FamilyClass::Mod2 => [
                [d(n + 1, n + 1), d(n + 1, n), d(n, n + 1)],
                [d(n, n + 1), d(n + 1, n), d(n + 1, n + 1)],
                [d(n + 1, n + 1), d(n + 1, n), d(n + 1, n + 1)],
                [d(n, n + 1), d(n + 1, n), d(n, n + 1)],
            ],
            FamilyClass::Mod3 => [
                [d(n + 2, n + 1), d(n, n + 2), d(n + 2, n)],
                [d(n, n + 1), d(n + 1, n + 2), d(n + 1, n)],
                [d(n + 2, n + 1), d(n, n + 2), d(n + 1, n)],
                [d(n, n + 1), d(n + 1, n + 2), d(n + 2, n)],
            ],
        }
    }

    /// Designated final digit of tower blocks, and its `+` replacement.
    pub fn final_digit_swap(&self) -> (Digit, Digit) {
        let n = self.n;
        match self.class {
            FamilyClass::Mod1 => (self.digit(n, n), self.digit(n + 1, n)),
            FamilyClass::Mod2 => (self.digit(n, n + 1), self.digit(n + 1, n + 1)),
            FamilyClass::Mod3 => (self.digit(n + 1, n), self.digit(n + 2, n)),
        }
    }

    /// Seed of the integer tower. Mod3 has the irregular one-symbol level 0.
    fn integer_seed(&self) -> Vec<Vec<u32>> {
        let n = self.n;
        match self.class {
            FamilyClass::Mod1 => vec![vec![n + 1, n, n]],
            FamilyClass::Mod2 => vec![vec![n + 1, n + 1, n]],
            FamilyClass::Mod3 => vec![vec![n + 1], vec![n + 2, n, n + 1]],
        }
    }

    fn digit_seed(&self) -> Vec<Word> {
        let n = self.n;
        let w = |ds: Vec<Digit>| Word::new(ds, self.m);
        match self.class {
            FamilyClass::Mod1 => {
                vec![w(vec![self.digit(n + 1, n), self.digit(n, n + 1), self.digit(n, n)])]
            }
            FamilyClass::Mod2 => vec![w(vec![
                self.digit(n + 1, n + 1),
                self.digit(n + 1, n),
                self.digit(n, n + 1),
            ])],
            FamilyClass::Mod3 => vec![
                w(vec![self.digit(n + 1, n + 1)]),
                w(vec![self.digit(n + 2, n + 1), self.digit(n, n + 2), self.digit(n + 1, n)]),
            ],
        }
    }

    /// Index of the first tower level produced by the doubling recursion.
    pub fn first_regular_level(&self) -> usize {
        match self.class {
            FamilyClass::Mod3 => 1,
            _ => 0,
        }
    }
}

/// First `n` symbols of the family sequence (`conjugate` flips the
/// underlying Thue–Morse bits).
pub fn family_prefix(family: &TMFamily, n: usize, conjugate: bool) -> Vec<u32> {
    (1..=n).map(|i| family.symbol(i, conjugate)).collect()
}

fn increment_last(w: &[u32]) -> Vec<u32> {
    let mut v = w.to_vec();
    *v.last_mut().expect("empty word") += 1;
    v
}

/// Blockwise involution on integer words made of whole family 3-blocks.
pub fn substitution_apply_integer(family: &TMFamily, w: &[u32]) -> Result<Vec<u32>, TmError> {
    if w.is_empty() || w.len() % 3 != 0 {
        return Err(TmError::NotBlockAligned(w.len()));
    }
    let blocks = family.integer_blocks();
    let mut out = Vec::with_capacity(w.len());
    for chunk in w.chunks(3) {
        let idx = blocks
            .iter()
            .position(|b| b == chunk)
            .ok_or_else(|| TmError::UnknownBlock(chunk.to_vec()))?;
        out.extend_from_slice(&blocks[idx ^ 1]);
    }
    Ok(out)
}

/// Blockwise involution on digit words made of whole family 3-blocks.
pub fn substitution_apply_digit(family: &TMFamily, w: &Word) -> Result<Word, TmError> {
    if w.is_empty() || w.len() % 3 != 0 {
        return Err(TmError::NotBlockAligned(w.len()));
    }
    let blocks = family.digit_blocks();
    let mut out = Vec::with_capacity(w.len());
    for chunk in w.digits.chunks(3) {
        let idx = blocks
            .iter()
            .position(|b| b == chunk)
            .ok_or(TmError::UnknownDigitBlock)?;
        out.extend_from_slice(&blocks[idx ^ 1]);
    }
    Ok(Word::new(out, w.m))
}

/// Dispatch over the two block levels for callers that keep words untyped.
pub enum LevelWord {
    Integer(Vec<u32>),
    Digit(Word),
}

pub fn substitution_apply(family: &TMFamily, w: LevelWord) -> Result<LevelWord, TmError> {
    match w {
        LevelWord::Integer(v) => substitution_apply_integer(family, &v).map(LevelWord::Integer),
        LevelWord::Digit(v) => substitution_apply_digit(family, &v).map(LevelWord::Digit),
    }
}

/// `w^+` on a digit tower block: swaps the designated final digit.
pub fn digit_block_plus(family: &TMFamily, w: &Word) -> Result<Word, TmError> {
    let (from, to) = family.final_digit_swap();
    let mut v = w.digits.clone();
    match v.last_mut() {
        Some(last) if *last == from => {
            *last = to;
            Ok(Word::new(v, w.m))
        }
        _ => Err(TmError::BadFinalSymbol),
    }
}

/// Integer and digit tower levels `0..=n_max` for one family.
#[derive(Clone, Debug, Serialize)]
pub struct BlockTower {
    pub family: TMFamily,
    pub integer_blocks: Vec<Vec<u32>>,
    pub digit_blocks: Vec<Word>,
}

/// Builds the tower by `w_{n+1} = w_n^+ phi(w_n^+)` from the family seed.
pub fn block_tower(family: &TMFamily, n_max: usize) -> BlockTower {
    let mut ints = family.integer_seed();
    let mut digs = family.digit_seed();
    while ints.len() <= n_max {
        let prev = ints.last().unwrap();
        let plus = increment_last(prev);
        let image = substitution_apply_integer(family, &plus).expect("tower block must map");
        let mut next = plus;
        next.extend_from_slice(&image);
        ints.push(next);

        let dprev = digs.last().unwrap();
        let dplus = digit_block_plus(family, dprev).expect("tower block final digit");
        let dimage = substitution_apply_digit(family, &dplus).expect("tower block must map");
        digs.push(dplus.concat(&dimage));
    }
    ints.truncate(n_max + 1);
    digs.truncate(n_max + 1);
    BlockTower { family: *family, integer_blocks: ints, digit_blocks: digs }
}

impl BlockTower {
    pub fn level(&self, n: usize) -> (&[u32], &Word) {
        (&self.integer_blocks[n], &self.digit_blocks[n])
    }

    /// `w_n^+` at the integer level.
    pub fn integer_plus(&self, n: usize) -> Vec<u32> {
        increment_last(&self.integer_blocks[n])
    }

    /// `w_n^+` at the digit level (irregular Mod3 level 0 has none).
    pub fn digit_plus(&self, n: usize) -> Result<Word, TmError> {
        digit_block_plus(&self.family, &self.digit_blocks[n])
            .map_err(|_| TmError::IrregularLevel(n))
    }

    /// Substitution image of level `n` at the integer level.
    pub fn integer_image(&self, n: usize) -> Result<Vec<u32>, TmError> {
        substitution_apply_integer(&self.family, &self.integer_blocks[n])
            .map_err(|_| TmError::IrregularLevel(n))
    }

    /// Substitution image of level `n` at the digit level.
    pub fn digit_image(&self, n: usize) -> Result<Word, TmError> {
        substitution_apply_digit(&self.family, &self.digit_blocks[n])
            .map_err(|_| TmError::IrregularLevel(n))
    }
}

/// Exhaustive check report for the shift inequalities of one family level.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub family: TMFamily,
    pub n: usize,
    pub checks: usize,
    pub pass: bool,
    pub first_counterexample: Option<CounterExample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterExample {
    pub i: usize,
    pub inequality: &'static str,
}

/// For `L = 3*2^n` and every `0 <= i < L`, verifies the four lexicographic
/// inequalities between the family prefix `x`, its conjugate `y`, and their
/// shifts:
///
/// * `y[..L-i] < x[i..L] <= x[..L-i]`
/// * `y[..L-i] <= y[i..L] < x[..L-i]`
pub fn verify_tm_inequalities(family: &TMFamily, n: usize) -> InequalityReport {
    let len = 3usize << n;
    let x = family_prefix(family, len, false);
    let y = family_prefix(family, len, true);
    let mut checks = 0;
    for i in 0..len {
        let tail_x = &x[i..];
        let tail_y = &y[i..];
        let head_x = &x[..len - i];
        let head_y = &y[..len - i];
        checks += 4;
        let violated = if lex_compare_words(head_y, tail_x) != Ordering::Less {
            Some("conj_head < shifted")
        } else if lex_compare_words(tail_x, head_x) == Ordering::Greater {
            Some("shifted <= head")
        } else if lex_compare_words(head_y, tail_y) == Ordering::Greater {
            Some("conj_head <= conj_shifted")
        } else if lex_compare_words(tail_y, head_x) != Ordering::Less {
            Some("conj_shifted < head")
        } else {
            None
        };
        if let Some(name) = violated {
            return InequalityReport {
                family: *family,
                n,
                checks,
                pass: false,
                first_counterexample: Some(CounterExample { i, inequality: name }),
            };
        }
    }
    InequalityReport { family: *family, n, checks, pass: true, first_counterexample: None }
}
