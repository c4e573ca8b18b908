//! Intrinsic univoque-set machinery: lexicographic membership of digit
//! sequences, the exceptional-digit census for the first residue class,
//! coding multiplicity by geometric branch and bound, phase-regime
//! classification against the two critical bases, and the eventually
//! periodic tails that populate each difference set along the base ladder.

use crate::critical::{beta_hat_ladder, beta_n_ladder, critical_bases, CriticalError};
use crate::expansion::{pi_eval, quasi_greedy_one, Beta, ExpansionError};
use crate::interval::{Dyadic, RealInterval, Trivalent, DEFAULT_PREC};
use crate::symbolic::{lex_compare, Digit, DigitEPSequence, EPSequence, Word};
use crate::tm::{block_tower, substitution_apply_digit, FamilyClass, TMFamily};
use serde::Serialize;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum UnivoqueError {
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error("branch-and-bound depth {0} exceeds the combinatorial guard {1}")]
    DepthExceeded(usize, usize),
    #[error("branch-and-bound node budget exhausted")]
    BudgetExhausted,
    #[error("comparison against the expansion of 1 undecided within the horizon")]
    Undecidable,
}

/// How a row tail compared against the expansion of 1.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ComparisonWitness {
    /// 1-based position of the triggering digit.
    pub position: usize,
    /// Row index 0/1/2 (first coordinate, second, complement).
    pub row: usize,
    /// Human-readable transcript of the decisive comparison.
    pub transcript: String,
}

/// Verdict of the three-row membership test.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum MembershipStatus {
    Member,
    NonMember { position: usize, row: usize },
    VerifiedToDepth { depth: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    pub witnesses: Vec<ComparisonWitness>,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self.status, MembershipStatus::Member)
    }
    pub fn is_non_member(&self) -> bool {
        matches!(self.status, MembershipStatus::NonMember { .. })
    }
}

/// Oracle for the expansion of 1 in the given base: exact sequence when the
/// base knows it, otherwise a digit stream of the requested depth.
enum DeltaOracle {
    Periodic(EPSequence),
    Stream(Vec<u32>),
}

impl DeltaOracle {
    fn build(beta: &Beta, depth: usize) -> Result<DeltaOracle, ExpansionError> {
        match beta.delta_known() {
            Some(s) => Ok(DeltaOracle::Periodic(s.clone())),
            None => Ok(DeltaOracle::Stream(quasi_greedy_one(beta, depth)?)),
        }
    }

    /// Lexicographic comparison of an eventually periodic tail against the
    /// expansion of 1; `None` when a stream oracle runs out of symbols.
    fn compare_tail(&self, tail: &EPSequence) -> Option<(Ordering, usize)> {
        match self {
            DeltaOracle::Periodic(s) => Some((lex_compare(tail, s), 0)),
            DeltaOracle::Stream(d) => {
                for (i, &sym) in d.iter().enumerate() {
                    match tail.symbol(i).cmp(&sym) {
                        Ordering::Equal => continue,
                        ord => return Some((ord, i)),
                    }
                }
                None
            }
        }
    }

    /// Comparison of a finite word against the expansion of 1; running out
    /// of word before a difference counts as "below".
    fn compare_finite(&self, tail: &[u32]) -> (Ordering, usize) {
        let sym = |i: usize| match self {
            DeltaOracle::Periodic(s) => Some(s.symbol(i)),
            DeltaOracle::Stream(d) => d.get(i).copied(),
        };
        for (i, &c) in tail.iter().enumerate() {
            match sym(i) {
                None => return (Ordering::Less, i),
                Some(s) => match c.cmp(&s) {
                    Ordering::Equal => continue,
                    ord => return (ord, i),
                },
            }
        }
        (Ordering::Less, tail.len())
    }
}

/// Membership input: a full eventually periodic sequence (absolute verdicts)
/// or a finite stream prefix (verdicts up to its depth).
#[derive(Clone, Debug)]
pub enum MembershipInput {
    Ep(DigitEPSequence),
    Stream(Word),
}

/// Three-row lexicographic membership test: after every digit whose row
/// entry is below `M`, that row's tail must stay strictly below the
/// expansion of 1.
pub fn check_membership(
    input: &MembershipInput,
    beta: &Beta,
    depth: usize,
) -> Result<MembershipVerdict, UnivoqueError> {
    let oracle = DeltaOracle::build(beta, depth.max(64))?;
    let m = beta.m;
    match input {
        MembershipInput::Ep(s) => {
            assert_eq!(s.m, m, "sequence alphabet does not match the base");
            let rows = s.rows();
            let span = s.total_len();
            let mut witnesses = Vec::new();
            for pos in 1..=span {
                let digit = s.digit(pos - 1);
                let coords = [digit.i, digit.j, digit.complement()];
                for (r, &c) in coords.iter().enumerate() {
                    if c < m {
                        let tail = rows[r].shift(pos);
                        match oracle.compare_tail(&tail) {
                            None => return Err(UnivoqueError::Undecidable),
                            Some((Ordering::Less, at)) => {
                                witnesses.push(ComparisonWitness {
                                    position: pos,
                                    row: r,
                                    transcript: format!(
                                        "row {r} tail after position {pos}: below the expansion (decided at offset {at})"
                                    ),
                                });
                            }
                            Some((ord, at)) => {
                                let rel = if ord == Ordering::Equal { "equals" } else { "exceeds" };
                                witnesses.push(ComparisonWitness {
                                    position: pos,
                                    row: r,
                                    transcript: format!(
                                        "row {r} tail after position {pos}: {rel} the expansion (offset {at})"
                                    ),
                                });
                                return Ok(MembershipVerdict {
                                    status: MembershipStatus::NonMember { position: pos, row: r },
                                    witnesses,
                                });
                            }
                        }
                    }
                }
            }
            Ok(MembershipVerdict { status: MembershipStatus::Member, witnesses })
        }
        MembershipInput::Stream(w) => {
            assert_eq!(w.m, m, "word alphabet does not match the base");
            let rows = w.rows();
            let mut witnesses = Vec::new();
            for pos in 1..w.len() {
                let digit = w.digits[pos - 1];
                let coords = [digit.i, digit.j, digit.complement()];
                for (r, &c) in coords.iter().enumerate() {
                    if c < m {
                        let (ord, at) = oracle.compare_finite(&rows[r][pos..]);
                        if ord == Ordering::Greater {
                            witnesses.push(ComparisonWitness {
                                position: pos,
                                row: r,
                                transcript: format!(
                                    "row {r} tail after position {pos}: exceeds the expansion (offset {at})"
                                ),
                            });
                            return Ok(MembershipVerdict {
                                status: MembershipStatus::NonMember { position: pos, row: r },
                                witnesses,
                            });
                        }
                    }
                }
            }
            Ok(MembershipVerdict {
                status: MembershipStatus::VerifiedToDepth { depth: w.len() },
                witnesses,
            })
        }
    }
}

/// Digits that can appear only finitely often in members at the second
/// critical base of the first residue class: the rotation orbit of
/// `alpha_{(N+1)(N+1)}`.
pub fn exceptional_digits(n: u32, m: u32) -> Vec<Digit> {
    assert!(m == 3 * n + 1 && n >= 1, "exceptional digits need M = 3N+1, N >= 1");
    let d = Digit::new(n + 1, n + 1, m).unwrap();
    vec![d, d.theta(), d.theta().theta()]
}

/// Number of positions over one preperiod+period carrying an exceptional
/// digit.
pub fn exceptional_digit_count(s: &DigitEPSequence, n: u32) -> usize {
    let ex = exceptional_digits(n, s.m);
    s.pre.digits.iter().chain(s.per.digits.iter()).filter(|d| ex.contains(d)).count()
}

/// Result of the depth-limited coding count: how many digit prefixes keep
/// the remainder inside the convex hull at each depth. The final count is a
/// depth-limited certificate: 1 certifies uniqueness up to the depth, and
/// two separated survivors witness genuine multiplicity.
#[derive(Clone, Debug, Serialize)]
pub struct CodingCount {
    pub depth: usize,
    /// survivors per depth; `counts[k]` counts prefixes of length `k+1`
    pub counts: Vec<u64>,
    pub sample_prefixes: Vec<String>,
}

impl CodingCount {
    pub fn final_count(&self) -> u64 {
        *self.counts.last().unwrap_or(&0)
    }
}

const COUNT_DEPTH_CAP: usize = 24;
const NODE_BUDGET: usize = 40_000_000;

/// Exhaustive branch and bound over digit prefixes: a prefix survives while
/// the rescaled remainder stays in the closed hull triangle, inflated by an
/// outward slack of ten interval widths (so survivors can be overcounted but
/// never undercounted).
pub fn count_codings(
    x: (&RealInterval, &RealInterval),
    beta: &Beta,
    depth: usize,
) -> Result<CodingCount, UnivoqueError> {
    if depth > COUNT_DEPTH_CAP {
        return Err(UnivoqueError::DepthExceeded(depth, COUNT_DEPTH_CAP));
    }
    let prec = DEFAULT_PREC;
    let m = beta.m;
    let bv = beta.value();
    let leg = RealInterval::from_int(m as i64).div(&bv.sub(&RealInterval::from_int(1), prec), prec);
    let alphabet = Digit::alphabet(m);

    struct Node {
        rx: RealInterval,
        ry: RealInterval,
        depth: usize,
        prefix: Vec<Digit>,
    }

    let mut counts = vec![0u64; depth];
    let mut samples: Vec<String> = Vec::new();
    let mut stack = vec![Node { rx: x.0.clone(), ry: x.1.clone(), depth: 0, prefix: Vec::new() }];
    let mut nodes = 0usize;
    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > NODE_BUDGET {
            return Err(UnivoqueError::BudgetExhausted);
        }
        for &d in &alphabet {
            let nx = bv.mul(&node.rx, prec).sub(&RealInterval::from_int(d.i as i64), prec);
            let ny = bv.mul(&node.ry, prec).sub(&RealInterval::from_int(d.j as i64), prec);
            let eps = nx.width().add(&ny.width()).mul_int(10);
            let inside = !nx.hi().add(&eps).is_negative()
                && !ny.hi().add(&eps).is_negative()
                && nx.lo().add(&ny.lo()).cmp(&leg.hi().add(&eps)) != Ordering::Greater;
            if !inside {
                continue;
            }
            let nd = node.depth + 1;
            counts[nd - 1] += 1;
            let mut prefix = node.prefix.clone();
            prefix.push(d);
            if nd == depth {
                if samples.len() < 8 {
                    samples.push(Word::new(prefix.clone(), m).to_string());
                }
            } else {
                stack.push(Node { rx: nx, ry: ny, depth: nd, prefix });
            }
        }
    }
    Ok(CodingCount { depth, counts, sample_prefixes: samples })
}

/// Phase of the uniqueness structure at a given base.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum Regime {
    Finite3,
    CountablyInfinite,
    UncountableZeroDim,
    PositiveDim,
    UndecidedNearBoundary,
}

/// Which set the classification speaks about: both the univoque set and the
/// intrinsic one for `M >= 2`; only the intrinsic one for `M = 1`, where the
/// positive-dimension threshold for the full univoque set is open.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum AppliesTo {
    UnivoqueAndIntrinsic,
    IntrinsicOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeReport {
    pub m: u32,
    pub beta_lo: String,
    pub beta_hi: String,
    pub regime: Regime,
    pub applies_to: AppliesTo,
}

/// Compares the base enclosure against both critical bases. Enclosures
/// overlapping a critical base stay undecided rather than guessing.
pub fn classify_regime(m: u32, beta: &Beta, tol: &Dyadic) -> Result<RegimeReport, UnivoqueError> {
    let cb = critical_bases(m, tol)?;
    let g = cb.beta_g.value();
    let c = cb.beta_c.value();
    let v = beta.value();
    let regime = if v.le(g) == Trivalent::True {
        Regime::Finite3
    } else if v.gt(g).is_true() && v.lt(c).is_true() {
        Regime::CountablyInfinite
    } else if v.gt(c).is_true() {
        Regime::PositiveDim
    } else {
        Regime::UndecidedNearBoundary
    };
    Ok(RegimeReport {
        m,
        beta_lo: v.lo().to_decimal(17, false),
        beta_hi: v.hi().to_decimal(17, true),
        regime,
        applies_to: if m >= 2 { AppliesTo::UnivoqueAndIntrinsic } else { AppliesTo::IntrinsicOnly },
    })
}

/// The eventually periodic tails populating the difference set between
/// consecutive ladder levels: the rotation orbit of the periodized level-`n`
/// digit block and of its substitution image. The irregular third-class
/// level 0 contributes only the single rotation-fixed tail.
pub fn difference_tail_enumerate(m: u32, n: usize) -> Result<Vec<DigitEPSequence>, UnivoqueError> {
    let family = TMFamily::from_m(m).expect("M >= 1");
    let tower = block_tower(&family, n);
    let block = tower.digit_blocks[n].clone();
    let mut tails = Vec::new();
    let mut push = |w: Word| {
        for k in 0..3 {
            let t = DigitEPSequence::periodic(w.theta_k(k)).unwrap();
            if !tails.contains(&t) {
                tails.push(t);
            }
        }
    };
    push(block.clone());
    if !(family.class == FamilyClass::Mod3 && n == 0) {
        push(substitution_apply_digit(&family, &block).expect("regular level maps"));
    }
    Ok(tails)
}

/// Ladders around level `n`, for probing membership on both sides of a rung.
pub fn ladder_windows(
    m: u32,
    n: usize,
    tol: &Dyadic,
) -> Result<(Vec<Beta>, Vec<Beta>), UnivoqueError> {
    Ok((beta_n_ladder(m, n + 1, tol)?, beta_hat_ladder(m, n + 1, tol)?))
}

/// Builds `x = Pi_beta(s)` as a pair of coordinate enclosures.
pub fn point_of_sequence(
    s: &DigitEPSequence,
    beta: &Beta,
    depth: usize,
) -> Result<(RealInterval, RealInterval), UnivoqueError> {
    let [r1, r2, _] = s.rows();
    let prec = DEFAULT_PREC;
    let x = pi_eval(&r1, beta, depth, prec)?;
    let y = pi_eval(&r2, beta, depth, prec)?;
    Ok((x, y))
}
