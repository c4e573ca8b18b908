//! Subshifts of finite type read off the block towers, spectral radii with
//! Collatz–Wielandt certificates, and the dimension bounds they induce.

use crate::critical::{beta_hat_ladder, CriticalError};
use crate::expansion::Beta;
use crate::interval::{Dyadic, RealInterval, DEFAULT_PREC};
use crate::symbolic::Word;
use crate::tm::{block_tower, digit_block_plus, substitution_apply_digit, TMFamily};
use serde::Serialize;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SftError {
    #[error("adjacency matrix is not irreducible")]
    NotIrreducible,
    #[error("base must exceed the level-{0} hat-ladder rung")]
    BetaTooSmall(usize),
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error("power iteration did not reach the tolerance in {0} steps")]
    NoConvergence(usize),
}

/// Labeled directed graph; edge labels are digit words.
#[derive(Clone, Debug, Serialize)]
pub struct SFTGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize, Word)>,
    pub m: u32,
}

impl SFTGraph {
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.nodes.len();
        let mut a = vec![vec![0u64; n]; n];
        for &(from, to, _) in &self.edges {
            a[from][to] += 1;
        }
        a
    }

    /// All label words read along paths with exactly `len` edges.
    pub fn path_words(&self, len: usize) -> Vec<Word> {
        let mut acc: Vec<(usize, Word)> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, _)| (i, Word::new(Vec::new(), self.m)))
            .collect();
        for _ in 0..len {
            let mut next = Vec::new();
            for (at, w) in &acc {
                for (from, to, label) in &self.edges {
                    if from == at {
                        next.push((*to, w.concat(label)));
                    }
                }
            }
            acc = next;
        }
        acc.into_iter().map(|(_, w)| w).collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph sft {\n  rankdir=LR;\n");
        for (i, name) in self.nodes.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{name}\"];\n"));
        }
        for (from, to, label) in &self.edges {
            out.push_str(&format!("  n{from} -> n{to} [label=\"{label}\"];\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Two-node graph over the level-`k` tower blocks: one loop carries the
/// block, the other its substitution image, and the cross edges carry the
/// incremented forms. For the third residue class the k-th regular level is
/// tower level `k+1`, so edge labels have length `3 * 2^k` in every class.
pub fn build_xk_graph(m: u32, k: usize) -> SFTGraph {
    let family = TMFamily::from_m(m).expect("M >= 1");
    let lvl = k + family.first_regular_level();
    let tower = block_tower(&family, lvl);
    let block = tower.digit_blocks[lvl].clone();
    let block_plus = digit_block_plus(&family, &block).expect("regular level");
    let image = substitution_apply_digit(&family, &block).expect("regular level");
    let image_plus = substitution_apply_digit(&family, &block_plus).expect("regular level");
    SFTGraph {
        nodes: vec!["image".into(), "block".into()],
        edges: vec![(0, 0, image), (0, 1, image_plus), (1, 1, block), (1, 0, block_plus)],
        m,
    }
}

fn reachable(adj: &[Vec<u64>], transpose: bool) -> bool {
    let n = adj.len();
    for start in 0..n {
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let edge = if transpose { adj[w][v] } else { adj[v][w] };
                if edge > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return false;
        }
    }
    true
}

/// Spectral radius of a nonnegative irreducible integer matrix, enclosed by
/// Collatz–Wielandt bounds of the power iteration on `A + I` (the shift
/// makes the iteration primitive, so the sandwich contracts).
pub fn spectral_radius(adj: &[Vec<u64>], tol: &Dyadic) -> Result<RealInterval, SftError> {
    let n = adj.len();
    assert!(n > 0 && adj.iter().all(|r| r.len() == n), "matrix must be square");
    if !reachable(adj, false) || !reachable(adj, true) {
        return Err(SftError::NotIrreducible);
    }
    let prec = DEFAULT_PREC;
    let mut v: Vec<RealInterval> = vec![RealInterval::from_int(1); n];
    let max_iter = 10_000usize;
    for _ in 0..max_iter {
        // w = (A + I) v
        let w: Vec<RealInterval> = (0..n)
            .map(|i| {
                let mut acc = v[i].clone();
                for j in 0..n {
                    if adj[i][j] > 0 {
                        acc = acc.add(&v[j].mul_int(adj[i][j] as i64), prec);
                    }
                }
                acc
            })
            .collect();
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for i in 0..n {
            let ratio = w[i].div(&v[i], prec);
            lo = Some(match lo {
                None => ratio.lo().clone(),
                Some(cur) => cur.min(ratio.lo().clone()),
            });
            hi = Some(match hi {
                None => ratio.hi().clone(),
                Some(cur) => cur.max(ratio.hi().clone()),
            });
        }
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        debug_assert!(lo.cmp(&hi) != Ordering::Greater);
        if hi.sub(&lo).cmp(tol) != Ordering::Greater {
            let one = Dyadic::one();
            return Ok(RealInterval::new(lo.sub(&one), hi.sub(&one)));
        }
        // normalize by the largest entry to keep mantissas bounded
        let max = w.iter().map(|x| x.hi().clone()).max().unwrap();
        let scale = RealInterval::point(max);
        v = w.iter().map(|x| x.div(&scale, prec)).collect();
    }
    Err(SftError::NoConvergence(max_iter))
}

/// Dimension bounds carried by the level-`k` subshift.
#[derive(Clone, Debug, Serialize)]
pub struct DimBounds {
    pub m: u32,
    pub k: usize,
    /// dimension of the subshift in the 2^-n sequence metric: 1/(3*2^k)
    pub symbolic_lo: String,
    pub symbolic_hi: String,
    /// lower bound for the Hausdorff dimension of the planar image:
    /// log 2 / (3*2^k * log beta)
    pub geometric_lo: String,
}

/// Requires `beta` strictly above the level-`k` hat-ladder rung, then
/// returns the symbolic dimension `1/(3*2^k)` and the geometric lower bound
/// `log 2 / (3*2^k log beta)`.
pub fn dim_bounds(
    m: u32,
    k: usize,
    beta: &Beta,
    tol: &Dyadic,
) -> Result<(RealInterval, RealInterval), SftError> {
    let hats = beta_hat_ladder(m, k, tol)?;
    let gate = hats[k].value();
    if !beta.value().gt(gate).is_true() {
        return Err(SftError::BetaTooSmall(k));
    }
    let prec = DEFAULT_PREC;
    let len = 3i64 << k;
    let symbolic = RealInterval::from_ratio(1, len, prec);
    let ln2 = RealInterval::from_int(2).ln_f64();
    let geometric = ln2.div(&beta.value().ln_f64().mul_int(len), prec);
    Ok((symbolic, geometric))
}

pub fn dim_bounds_report(m: u32, k: usize, beta: &Beta, tol: &Dyadic) -> Result<DimBounds, SftError> {
    let (s, g) = dim_bounds(m, k, beta, tol)?;
    Ok(DimBounds {
        m,
        k,
        symbolic_lo: s.lo().to_decimal(17, false),
        symbolic_hi: s.hi().to_decimal(17, true),
        geometric_lo: g.lo().to_decimal(17, false),
    })
}

/// The 3-node no-repeat graph over the three-digit alphabet at `M = 1`
/// (forbidden words are the three doubled digits): all ones off the
/// diagonal.
pub fn multinacci_adjacency() -> Vec<Vec<u64>> {
    vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
}

/// `log rho(A) / log beta` for the no-repeat graph; at the golden ratio this
/// is the exact dimension of the uniquely coded set.
pub fn multinacci_dimension(beta: &Beta, tol: &Dyadic) -> Result<RealInterval, SftError> {
    assert_eq!(beta.m, 1, "the no-repeat graph lives over the three-digit alphabet");
    let rho = spectral_radius(&multinacci_adjacency(), tol)?;
    let prec = DEFAULT_PREC;
    Ok(rho.ln_f64().div(&beta.value().ln_f64(), prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::tol_from_f64;
    use crate::expansion::delta_inverse;
    use crate::symbolic::EPSequence;
    use crate::univoque::{check_membership, MembershipInput};

    #[test]
    fn graph_shape_and_label_lengths() {
        for m in [1u32, 2, 3] {
            for k in 0..=3usize {
                let g = build_xk_graph(m, k);
                assert_eq!(g.nodes.len(), 2);
                assert_eq!(g.edges.len(), 4);
                for (_, _, label) in &g.edges {
                    assert_eq!(label.len(), 3 << k, "m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn graph_adjacency_is_all_ones() {
        let g = build_xk_graph(1, 0);
        assert_eq!(g.adjacency(), vec![vec![1, 1], vec![1, 1]]);
        let dot = g.to_dot();
        assert!(dot.contains("digraph"));
        assert_eq!(dot.matches("->").count(), 4);
    }

    #[test]
    fn path_words_pass_membership_above_the_gate() {
        let tol = tol_from_f64(1e-30);
        for m in [1u32, 2, 3] {
            for k in 0..=2usize {
                let hats = beta_hat_ladder(m, k, &tol).unwrap();
                let eighth = Dyadic::from_int(1).half().half().half();
                let Ok(above) = Beta::from_dyadic(hats[k].value().hi().add(&eighth), m) else {
                    continue;
                };
                let g = build_xk_graph(m, k);
                // admissible left context: the origin digit triggers rows 1, 2
                let origin = crate::symbolic::Digit::new(0, 0, m).unwrap();
                for l in 1..=3usize {
                    for w in g.path_words(l) {
                        let mut digits = vec![origin];
                        digits.extend_from_slice(&w.digits);
                        let word = Word::new(digits, m);
                        let v =
                            check_membership(&MembershipInput::Stream(word), &above, 512).unwrap();
                        assert!(!v.is_non_member(), "m={m} k={k} len={l} word={w}");
                    }
                }
            }
        }
    }

    #[test]
    fn spectral_radius_reference_matrices() {
        let tol = tol_from_f64(1e-13);
        let r = spectral_radius(&multinacci_adjacency(), &tol).unwrap();
        assert!(r.contains_int(2));
        assert!(r.width().to_f64() <= 1e-12);

        let r = spectral_radius(&[vec![1]], &tol).unwrap();
        assert!(r.contains_int(1));

        let r = spectral_radius(&[vec![1, 1], vec![1, 1]], &tol).unwrap();
        assert!(r.contains_int(2));

        assert!(matches!(
            spectral_radius(&[vec![1, 1], vec![0, 1]], &tol),
            Err(SftError::NotIrreducible)
        ));
    }

    #[test]
    fn collatz_wielandt_sandwich_contracts() {
        // golden-mean shift: rho = (1+sqrt 5)/2
        let tol = tol_from_f64(1e-12);
        let r = spectral_radius(&[vec![1, 1], vec![1, 0]], &tol).unwrap();
        let phi = 0.5 * (1.0 + 5f64.sqrt());
        assert!(r.lo().to_f64() <= phi && phi <= r.hi().to_f64());
        assert!(r.width().to_f64() <= 1e-12);
    }

    #[test]
    fn dimension_values_and_gating() {
        let tol = tol_from_f64(1e-30);
        let beta = Beta::from_decimal("1.7", 1, 256).unwrap();
        let (s, g) = dim_bounds(1, 0, &beta, &tol).unwrap();
        assert!((s.mid().to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.mid().to_f64() - 2f64.ln() / (3.0 * 1.7f64.ln())).abs() < 1e-10);
        let (s2, _) = dim_bounds(1, 2, &beta, &tol).unwrap();
        assert!((s2.mid().to_f64() - 1.0 / 12.0).abs() < 1e-15);

        // below the gate (the level-0 hat rung sits near 1.5589) the bound
        // is refused
        let low = Beta::from_decimal("1.556", 1, 256).unwrap();
        assert!(matches!(dim_bounds(1, 0, &low, &tol), Err(SftError::BetaTooSmall(0))));
    }

    #[test]
    fn symbolic_dimension_halves_with_level() {
        let tol = tol_from_f64(1e-30);
        let beta = Beta::from_decimal("1.9", 1, 256).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..4usize {
            let (s, _) = dim_bounds(1, k, &beta, &tol).unwrap();
            let v = s.mid().to_f64();
            if prev.is_finite() {
                assert!((prev / v - 2.0).abs() < 1e-12);
            }
            prev = v;
        }
    }

    #[test]
    fn multinacci_dimension_at_the_golden_ratio() {
        let tol = tol_from_f64(1e-13);
        let golden = delta_inverse(&EPSequence::parse("| 10").unwrap(), 1, &tol).unwrap();
        let d = multinacci_dimension(&golden, &tol).unwrap();
        let want = 2f64.ln() / (0.5 * (1.0 + 5f64.sqrt())).ln();
        assert!(d.lo().to_f64() <= want && want <= d.hi().to_f64());
        assert_eq!(d.mid().to_decimal_half_even(5), "1.44042");

        let two = Beta::exact_int(2, 1);
        let d = multinacci_dimension(&two, &tol).unwrap();
        assert!((d.mid().to_f64() - 1.0).abs() < 1e-10);
    }
}
