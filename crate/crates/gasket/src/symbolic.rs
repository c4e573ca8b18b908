//! Digit alphabet, words, eventually periodic sequences and lexicographic order.
//!
//! Digits are pairs `(i, j)` with `i + j <= M`; the derived complement
//! `M - i - j` makes every word readable as three integer rows that sum to
//! `M` pointwise. The order-3 permutation `theta` rotates those rows.

use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolicError {
    #[error("digit ({i},{j}) outside the triangle for M={m}")]
    InvalidDigit { i: u32, j: u32, m: u32 },
    #[error("symbol {0} exceeds alphabet bound M={1}")]
    SymbolTooLarge(u32, u32),
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("malformed sequence literal: {0}")]
    Parse(String),
}

/// One digit `(i, j)` of the planar alphabet for a fixed `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Digit {
    pub i: u32,
    pub j: u32,
    pub m: u32,
}

impl Digit {
    pub fn new(i: u32, j: u32, m: u32) -> Result<Self, SymbolicError> {
        if i + j > m {
            return Err(SymbolicError::InvalidDigit { i, j, m });
        }
        Ok(Digit { i, j, m })
    }

    /// Third coordinate `M - i - j`.
    pub fn complement(&self) -> u32 {
        self.m - self.i - self.j
    }

    /// `theta(d) = (M - i - j, i)`; `theta^3 = id`.
    pub fn theta(&self) -> Digit {
        Digit { i: self.complement(), j: self.i, m: self.m }
    }

    pub fn theta_k(&self, k: u32) -> Digit {
        match k % 3 {
            0 => *self,
            1 => self.theta(),
            _ => self.theta().theta(),
        }
    }

    /// Enumerates the whole alphabet for `m` (size `(m+1)(m+2)/2`).
    pub fn alphabet(m: u32) -> Vec<Digit> {
        let mut out = Vec::new();
        for i in 0..=m {
            for j in 0..=(m - i) {
                out.push(Digit { i, j, m });
            }
        }
        out
    }
}

pub fn theta_apply(d: Digit, k: u32) -> Digit {
    d.theta_k(k)
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.i, self.j)
    }
}

/// Finite word over the digit alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Word {
    pub digits: Vec<Digit>,
    pub m: u32,
}

impl Word {
    pub fn new(digits: Vec<Digit>, m: u32) -> Self {
        assert!(digits.iter().all(|d| d.m == m), "mixed alphabets in word");
        Word { digits, m }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// The three integer rows `(d^1), (d^2), (M - d^1 - d^2)`.
    pub fn rows(&self) -> [Vec<u32>; 3] {
        let r1 = self.digits.iter().map(|d| d.i).collect();
        let r2 = self.digits.iter().map(|d| d.j).collect();
        let r3 = self.digits.iter().map(|d| d.complement()).collect();
        [r1, r2, r3]
    }

    pub fn theta(&self) -> Word {
        Word { digits: self.digits.iter().map(|d| d.theta()).collect(), m: self.m }
    }

    pub fn theta_k(&self, k: u32) -> Word {
        Word { digits: self.digits.iter().map(|d| d.theta_k(k)).collect(), m: self.m }
    }

    pub fn concat(&self, other: &Word) -> Word {
        assert_eq!(self.m, other.m);
        let mut digits = self.digits.clone();
        digits.extend_from_slice(&other.digits);
        Word { digits, m: self.m }
    }

    pub fn repeat(&self, k: usize) -> Word {
        let mut digits = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            digits.extend_from_slice(&self.digits);
        }
        Word { digits, m: self.m }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Comparison outcome for sequences.
pub type Lex = Ordering;

/// Eventually periodic sequence over `{0..M}`, kept in canonical form:
/// primitive period, preperiod trimmed as far as rotation allows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EPSequence {
    pre: Vec<u32>,
    per: Vec<u32>,
}

/// Smallest period of `w` by the failure-function bound.
fn primitive_root_len(w: &[u32]) -> usize {
    let n = w.len();
    let mut fail = vec![0usize; n];
    for i in 1..n {
        let mut k = fail[i - 1];
        while k > 0 && w[i] != w[k] {
            k = fail[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n % p == 0 { p } else { n }
}

impl EPSequence {
    pub fn new(pre: Vec<u32>, per: Vec<u32>) -> Result<Self, SymbolicError> {
        if per.is_empty() {
            return Err(SymbolicError::EmptyPeriod);
        }
        let mut s = EPSequence { pre, per };
        s.canonicalize();
        Ok(s)
    }

    pub fn periodic(per: Vec<u32>) -> Result<Self, SymbolicError> {
        Self::new(Vec::new(), per)
    }

    pub fn constant(sym: u32) -> Self {
        EPSequence { pre: Vec::new(), per: vec![sym] }
    }

    fn canonicalize(&mut self) {
        let root = primitive_root_len(&self.per);
        self.per.truncate(root);
        while let Some(&last) = self.pre.last() {
            if last == *self.per.last().unwrap() {
                self.pre.pop();
                self.per.rotate_right(1);
            } else {
                break;
            }
        }
    }

    pub fn preperiod(&self) -> &[u32] {
        &self.pre
    }

    pub fn period(&self) -> &[u32] {
        &self.per
    }

    /// 0-based symbol access.
    pub fn symbol(&self, idx: usize) -> u32 {
        if idx < self.pre.len() {
            self.pre[idx]
        } else {
            self.per[(idx - self.pre.len()) % self.per.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.symbol(i)).collect()
    }

    /// Left shift by `k`.
    pub fn shift(&self, k: usize) -> EPSequence {
        if k <= self.pre.len() {
            EPSequence::new(self.pre[k..].to_vec(), self.per.clone()).unwrap()
        } else {
            let r = (k - self.pre.len()) % self.per.len();
            let mut per = self.per.clone();
            per.rotate_left(r);
            EPSequence::new(Vec::new(), per).unwrap()
        }
    }

    pub fn max_symbol(&self) -> u32 {
        self.pre.iter().chain(self.per.iter()).copied().max().unwrap()
    }

    pub fn is_zero_tail(&self) -> bool {
        self.per == [0]
    }

    /// Pointwise `M - symbol` reflection (an involution).
    pub fn reflect(&self, m: u32) -> Result<EPSequence, SymbolicError> {
        let flip = |v: &[u32]| -> Result<Vec<u32>, SymbolicError> {
            v.iter()
                .map(|&c| {
                    if c > m {
                        Err(SymbolicError::SymbolTooLarge(c, m))
                    } else {
                        Ok(m - c)
                    }
                })
                .collect()
        };
        EPSequence::new(flip(&self.pre)?, flip(&self.per)?)
    }

    /// Decidable horizon for comparisons against `other`.
    fn horizon(&self, other: &EPSequence) -> usize {
        let lcm = num_integer::lcm(self.per.len(), other.per.len());
        self.pre.len() + other.pre.len() + 2 * lcm
    }

    /// Renders as `"pre | per"` with bare symbols when all fit one character.
    pub fn to_text(&self) -> String {
        let fmt_side = |v: &[u32]| -> String {
            if v.iter().all(|&c| c < 10) {
                v.iter().map(|c| c.to_string()).collect()
            } else {
                v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        format!("{} | {}", fmt_side(&self.pre), fmt_side(&self.per))
    }

    /// Parses `"pre | per"` integer-sequence literals: bare digit strings
    /// (`"212 | 111"`) or comma-separated symbols for alphabets past 9.
    pub fn parse(text: &str) -> Result<EPSequence, SymbolicError> {
        let (pre, per) = split_bar(text)?;
        let parse_side = |side: &str| -> Result<Vec<u32>, SymbolicError> {
            let side = side.trim();
            if side.is_empty() {
                return Ok(Vec::new());
            }
            if side.contains(',') {
                side.split(',')
                    .map(|t| t.trim().parse::<u32>().map_err(|_| SymbolicError::Parse(text.into())))
                    .collect()
            } else {
                side.chars()
                    .map(|c| c.to_digit(10).ok_or_else(|| SymbolicError::Parse(text.into())))
                    .collect()
            }
        };
        let per = parse_side(per)?;
        if per.is_empty() {
            return Err(SymbolicError::EmptyPeriod);
        }
        EPSequence::new(parse_side(pre)?, per)
    }
}

fn split_bar(text: &str) -> Result<(&str, &str), SymbolicError> {
    let mut it = text.splitn(2, '|');
    let pre = it.next().unwrap_or("");
    let per = it.next().ok_or_else(|| SymbolicError::Parse(text.into()))?;
    Ok((pre, per))
}

impl fmt::Display for EPSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Lexicographic comparison, decided within the eventually periodic horizon.
pub fn lex_compare(a: &EPSequence, b: &EPSequence) -> Lex {
    let n = a.horizon(b);
    for i in 0..n {
        match a.symbol(i).cmp(&b.symbol(i)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Compares two equal-length finite words lexicographically.
pub fn lex_compare_words(a: &[u32], b: &[u32]) -> Lex {
    a.cmp(b)
}

pub fn reflect(a: &EPSequence, m: u32) -> Result<EPSequence, SymbolicError> {
    a.reflect(m)
}

/// Eventually periodic sequence of planar digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DigitEPSequence {
    pub pre: Word,
    pub per: Word,
    pub m: u32,
}

impl DigitEPSequence {
    pub fn new(pre: Word, per: Word) -> Result<Self, SymbolicError> {
        if per.is_empty() {
            return Err(SymbolicError::EmptyPeriod);
        }
        assert_eq!(pre.m, per.m, "mixed alphabets");
        let m = per.m;
        Ok(DigitEPSequence { pre, per, m })
    }

    pub fn periodic(per: Word) -> Result<Self, SymbolicError> {
        let m = per.m;
        Self::new(Word::new(Vec::new(), m), per)
    }

    pub fn digit(&self, idx: usize) -> Digit {
        if idx < self.pre.len() {
            self.pre.digits[idx]
        } else {
            self.per.digits[(idx - self.pre.len()) % self.per.len()]
        }
    }

    pub fn theta(&self) -> DigitEPSequence {
        DigitEPSequence { pre: self.pre.theta(), per: self.per.theta(), m: self.m }
    }

    pub fn theta_k(&self, k: u32) -> DigitEPSequence {
        DigitEPSequence { pre: self.pre.theta_k(k), per: self.per.theta_k(k), m: self.m }
    }

    /// The three integer rows as canonical eventually periodic sequences.
    pub fn rows(&self) -> [EPSequence; 3] {
        let pre = self.pre.rows();
        let per = self.per.rows();
        [
            EPSequence::new(pre[0].clone(), per[0].clone()).unwrap(),
            EPSequence::new(pre[1].clone(), per[1].clone()).unwrap(),
            EPSequence::new(pre[2].clone(), per[2].clone()).unwrap(),
        ]
    }

    pub fn total_len(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    pub fn to_text(&self) -> String {
        format!("{} | {}", self.pre, self.per)
    }

    /// Parses `"PRE | PER"` with digits as `i,j` pairs separated by `;`,
    /// e.g. `"1,0 | 1,0;0,1;0,0"`.
    pub fn parse(text: &str, m: u32) -> Result<DigitEPSequence, SymbolicError> {
        let (pre, per) = split_bar(text)?;
        let parse_side = |side: &str| -> Result<Word, SymbolicError> {
            let side = side.trim();
            let mut digits = Vec::new();
            if !side.is_empty() {
                for pair in side.split(';') {
                    let (i, j) = pair
                        .trim()
                        .split_once(',')
                        .ok_or_else(|| SymbolicError::Parse(text.into()))?;
                    let i: u32 = i.trim().parse().map_err(|_| SymbolicError::Parse(text.into()))?;
                    let j: u32 = j.trim().parse().map_err(|_| SymbolicError::Parse(text.into()))?;
                    digits.push(Digit::new(i, j, m)?);
                }
            }
            Ok(Word::new(digits, m))
        };
        let per = parse_side(per)?;
        if per.is_empty() {
            return Err(SymbolicError::EmptyPeriod);
        }
        DigitEPSequence::new(parse_side(pre)?, per)
    }
}

/// Applies `rows` to a word or a digit sequence.
pub fn rows_of_word(w: &Word) -> [Vec<u32>; 3] {
    assert!(!w.is_empty(), "rows of an empty word");
    w.rows()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(i: u32, j: u32, m: u32) -> Digit {
        Digit::new(i, j, m).unwrap()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_apply(d(1, 0, 4), 1), d(3, 1, 4));
        assert_eq!(theta_apply(d(0, 0, 1), 1), d(1, 0, 1));
        for m in 1..=6 {
            for dig in Digit::alphabet(m) {
                assert_eq!(theta_apply(dig, 3), dig);
            }
        }
    }

    #[test]
    fn theta_orbit_sizes() {
        for m in 1..=12 {
            for dig in Digit::alphabet(m) {
                let orbit = [dig, dig.theta(), dig.theta().theta()];
                let distinct = {
                    let mut o = orbit.to_vec();
                    o.sort();
                    o.dedup();
                    o.len()
                };
                let fixed = m % 3 == 0 && dig.i == m / 3 && dig.j == m / 3;
                assert_eq!(distinct, if fixed { 1 } else { 3 }, "m={m} d={dig}");
            }
        }
    }

    #[test]
    fn rows_examples() {
        let w = Word::new(vec![d(1, 2, 4), d(4, 0, 4)], 4);
        assert_eq!(w.rows(), [vec![1, 4], vec![2, 0], vec![1, 0]]);

        // a_0 for M=1
        let a0 = Word::new(vec![d(1, 0, 1), d(0, 1, 1), d(0, 0, 1)], 1);
        assert_eq!(a0.rows(), [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);

        // c_1 for M=3 (N=0)
        let c1 = Word::new(vec![d(2, 1, 3), d(0, 2, 3), d(1, 0, 3)], 3);
        assert_eq!(c1.rows(), [vec![2, 0, 1], vec![1, 2, 0], vec![0, 1, 2]]);
    }

    #[test]
    fn rows_rotate_under_theta() {
        for m in 1..=4u32 {
            let alpha = Digit::alphabet(m);
            let mut words: Vec<Vec<Digit>> = alpha.iter().map(|&x| vec![x]).collect();
            let mut next = Vec::new();
            for _ in 0..2 {
                next.clear();
                for w in &words {
                    for &x in &alpha {
                        let mut v = w.clone();
                        v.push(x);
                        next.push(v);
                    }
                }
                words.extend(next.iter().cloned());
            }
            for digits in words {
                let w = Word::new(digits, m);
                let [r1, r2, r3] = w.rows();
                let [t1, t2, t3] = w.theta().rows();
                assert_eq!((t1, t2, t3), (r3, r1, r2));
            }
        }
    }

    #[test]
    fn rows_sum_to_m() {
        for m in 1..=5 {
            let w = Word::new(Digit::alphabet(m), m);
            let [r1, r2, r3] = w.rows();
            for k in 0..w.len() {
                assert_eq!(r1[k] + r2[k] + r3[k], m);
            }
        }
    }

    #[test]
    fn lex_examples() {
        let a = EPSequence::parse("| 10").unwrap();
        let b = EPSequence::parse("1 | 10").unwrap();
        assert_eq!(lex_compare(&a, &b), Ordering::Less);

        let z = EPSequence::constant(0);
        assert_eq!(lex_compare(&z, &z), Ordering::Equal);

        let dg = EPSequence::parse("| 100").unwrap();
        // 30-symbol prefix of the Thue-Morse type expansion for M=1
        let lam = EPSequence::new(
            crate::tm::family_prefix(&crate::tm::TMFamily::from_m(1).unwrap(), 30, false),
            vec![0, 1], // placeholder tail; prefix decides
        )
        .unwrap();
        assert_eq!(lex_compare(&dg, &lam), Ordering::Less);
    }

    #[test]
    fn reflect_examples() {
        let s = EPSequence::parse("| 10").unwrap();
        assert_eq!(s.reflect(1).unwrap(), EPSequence::parse("| 01").unwrap());
        let s = EPSequence::parse("| 212").unwrap();
        assert_eq!(s.reflect(4).unwrap(), EPSequence::parse("| 232").unwrap());
        assert_eq!(
            EPSequence::parse("| 05").unwrap().reflect(4),
            Err(SymbolicError::SymbolTooLarge(5, 4))
        );
    }

    #[test]
    fn canonical_form_merges_pre_into_period() {
        // 1(01)^inf == (10)^inf
        let s = EPSequence::new(vec![1], vec![0, 1]).unwrap();
        assert_eq!(s, EPSequence::periodic(vec![1, 0]).unwrap());
        // period 1212 reduces to 12
        let s = EPSequence::periodic(vec![1, 2, 1, 2]).unwrap();
        assert_eq!(s.period(), &[1, 2]);
    }

    #[test]
    fn digit_sequence_parse_round_trip() {
        let s = DigitEPSequence::parse("| 1,0;0,1;0,0", 1).unwrap();
        assert_eq!(s.per.len(), 3);
        assert!(s.pre.is_empty());
        let text = s.to_text();
        assert_eq!(DigitEPSequence::parse(&text, 1).unwrap(), s);
        let with_pre = DigitEPSequence::parse("1,0 | 1,0;0,1;0,0", 1).unwrap();
        assert_eq!(with_pre.pre.len(), 1);
    }

    #[test]
    fn digit_rows_are_eventually_periodic_rows() {
        let s = DigitEPSequence::parse("2,1 | 2,1;0,2;1,0", 3).unwrap();
        let [r1, r2, r3] = s.rows();
        for idx in 0..12 {
            let dg = s.digit(idx);
            assert_eq!(r1.symbol(idx), dg.i);
            assert_eq!(r2.symbol(idx), dg.j);
            assert_eq!(r3.symbol(idx), dg.complement());
        }
    }

    fn arb_ep() -> impl Strategy<Value = EPSequence> {
        (
            proptest::collection::vec(0u32..4, 0..6),
            proptest::collection::vec(0u32..4, 1..6),
        )
            .prop_map(|(pre, per)| EPSequence::new(pre, per).unwrap())
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(s in arb_ep()) {
            let again = EPSequence::new(s.preperiod().to_vec(), s.period().to_vec()).unwrap();
            prop_assert_eq!(&again, &s);
        }

        #[test]
        fn reflect_is_involution(s in arb_ep()) {
            let r = s.reflect(4).unwrap().reflect(4).unwrap();
            prop_assert_eq!(r, s);
        }

        #[test]
        fn lex_total_order(a in arb_ep(), b in arb_ep(), c in arb_ep()) {
            // antisymmetry
            let ab = lex_compare(&a, &b);
            let ba = lex_compare(&b, &a);
            prop_assert_eq!(ab, ba.reverse());
            if ab == Ordering::Equal {
                prop_assert_eq!(&a, &b);
            }
            // transitivity
            if ab != Ordering::Greater && lex_compare(&b, &c) != Ordering::Greater {
                prop_assert!(lex_compare(&a, &c) != Ordering::Greater);
            }
        }

        #[test]
        fn shift_agrees_with_symbols(s in arb_ep(), k in 0usize..12) {
            let sh = s.shift(k);
            for i in 0..20 {
                prop_assert_eq!(sh.symbol(i), s.symbol(i + k));
            }
        }
    }
}
