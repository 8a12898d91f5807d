//! Periodicity of fixed points: factor complexity, minimal and essential
//! periods, and the periodicity verdict used as a precondition elsewhere.

use crate::arith::divisors;
use crate::error::{domain, Error, Result};
use crate::heightgraph::GraphContext;
use crate::words::{Letter, Morphism, SeedPair};

pub const DEFAULT_NONPERIODIC_BOUND: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeriodicityVerdict {
    /// The fixed point is periodic. `per_residue[i]` is the smallest divisor
    /// `p` of `minimal_period` such that every position `≡ i mod p` carries
    /// the letter at position `i`.
    Periodic {
        minimal_period: u64,
        per_residue: Vec<u64>,
    },
    /// Non-periodic, certified through the period graph.
    NonPeriodicCertified,
    /// The complexity satisfies `p(n) > n` for every `n <= bound`.
    NonPeriodicUpTo { bound: usize },
}

impl PeriodicityVerdict {
    pub fn is_periodic(&self) -> bool {
        matches!(self, PeriodicityVerdict::Periodic { .. })
    }
}

/// Number of distinct factors of length `n`.
pub fn complexity(sigma: &Morphism, seed: &SeedPair, n: usize) -> Result<usize> {
    Ok(sigma.factors_of_length(seed, n)?.len())
}

pub fn periodicity_test(sigma: &Morphism, seed: &SeedPair, bound: usize) -> Result<PeriodicityVerdict> {
    if !sigma.is_endomorphism() || sigma.is_erasing() || !sigma.is_primitive() {
        return Err(Error::Primitivity);
    }
    if sigma.profile().constant_length.is_some_and(|l| l >= 2) {
        let ctx = GraphContext::new(sigma, Some(*seed))?;
        if !ctx.graph.is_eventually_singleton()? {
            return Ok(PeriodicityVerdict::NonPeriodicCertified);
        }
        let q = stable_complexity(sigma, seed)?;
        return periodic_verdict(sigma, seed, q);
    }
    let profile = sigma.complexity_profile(Some(seed), bound)?;
    match (1..=bound).find(|&n| profile[n - 1] <= n) {
        Some(n) => periodic_verdict(sigma, seed, profile[n - 1] as u64),
        None => Ok(PeriodicityVerdict::NonPeriodicUpTo { bound }),
    }
}

/// First value `p(n)` with `p(n) <= n`, searching without bound; only
/// called once periodicity is known.
fn stable_complexity(sigma: &Morphism, seed: &SeedPair) -> Result<u64> {
    let mut n_max = 16;
    loop {
        let profile = sigma.complexity_profile(Some(seed), n_max)?;
        if let Some(n) = (1..=n_max).find(|&n| profile[n - 1] <= n) {
            return Ok(profile[n - 1] as u64);
        }
        n_max *= 2;
    }
}

fn periodic_verdict(sigma: &Morphism, seed: &SeedPair, q: u64) -> Result<PeriodicityVerdict> {
    let len = 3 * q as usize * sigma.max_len();
    let prefix = sigma.fixed_point_prefix(seed, len)?;
    if !has_period(&prefix, q as usize) {
        return Err(Error::Invariant(format!(
            "complexity predicts period {q} but the prefix of length {len} disagrees"
        )));
    }
    let (minimal_period, per_residue) = essential_period_scan(&prefix, q)?;
    Ok(PeriodicityVerdict::Periodic {
        minimal_period,
        per_residue,
    })
}

fn has_period(w: &[Letter], p: usize) -> bool {
    w.iter().zip(w.iter().skip(p)).all(|(a, b)| a == b)
}

/// Smallest divisor `p` of `q` that is a period of `prefix`, and for each
/// residue `i < p` the essential period of the letter `prefix[i]` within the
/// period word. The caller is responsible for the prefix being long enough
/// (`2q` letters) for its periods to be those of the infinite word.
pub fn essential_period_scan(prefix: &[Letter], q: u64) -> Result<(u64, Vec<u64>)> {
    if q == 0 {
        return domain("period must be positive");
    }
    let qs = q as usize;
    if prefix.len() < qs {
        return domain(format!("prefix of length {} is shorter than {q}", prefix.len()));
    }
    if !has_period(prefix, qs) {
        return domain(format!("prefix does not have period {q}"));
    }
    let p = divisors(q)
        .into_iter()
        .find(|&p| has_period(prefix, p as usize))
        .unwrap_or(q);
    let word = &prefix[..p as usize];
    let divs = divisors(p);
    let per_residue = (0..p as usize)
        .map(|i| {
            divs.iter()
                .copied()
                .find(|&r| {
                    (i % r as usize..word.len())
                        .step_by(r as usize)
                        .all(|j| word[j] == word[i])
                })
                .unwrap_or(p)
        })
        .collect();
    Ok((p, per_residue))
}

/// Residues modulo `p` on which a `p`-periodic word is constant.
pub fn periodic_witnesses(period_word: &[Letter], p: u64) -> Vec<(u64, Letter)> {
    let q = period_word.len() as u64;
    if p == 0 || q == 0 {
        return Vec::new();
    }
    (0..p)
        .filter_map(|r| {
            // Positions ≡ r mod p cover the classes r + j·p mod q.
            let g = crate::arith::gcd_u64(p, q);
            let first = period_word[(r % q) as usize];
            let constant = (0..q / g).all(|j| period_word[((r + j * p) % q) as usize] == first);
            constant.then_some((r, first))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::words::{Alphabet, Word};

    #[test]
    fn complexity_values() {
        let f = corpus::fibonacci();
        let seed = SeedPair::one_sided(0);
        assert_eq!(complexity(&f, &seed, 1).unwrap(), 2);
        assert_eq!(complexity(&f, &seed, 2).unwrap(), 3);
        assert_eq!(complexity(&f, &seed, 3).unwrap(), 4);
        let alt = corpus::alternating();
        for n in 1..=6 {
            assert_eq!(complexity(&alt, &seed, n).unwrap(), 2);
        }
        assert_eq!(complexity(&corpus::proper_01_0110(), &seed, 1).unwrap(), 2);
    }

    #[test]
    fn verdicts() {
        let seed = SeedPair::one_sided(0);
        match periodicity_test(&corpus::alternating(), &seed, 64).unwrap() {
            PeriodicityVerdict::Periodic { minimal_period, per_residue } => {
                assert_eq!(minimal_period, 2);
                assert_eq!(per_residue, vec![2, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            periodicity_test(&corpus::fibonacci(), &seed, 50).unwrap(),
            PeriodicityVerdict::NonPeriodicUpTo { bound: 50 }
        );
        assert_eq!(
            periodicity_test(&corpus::length_three_height_two(), &seed, 50).unwrap(),
            PeriodicityVerdict::NonPeriodicCertified
        );
    }

    #[test]
    fn period_scan() {
        let a = Alphabet::digits(2);
        let scan = |s: &str, q| essential_period_scan(&Word::parse_chars(&a, s).unwrap(), q).unwrap();
        assert_eq!(scan("010101", 6).0, 2);
        assert_eq!(scan("000000", 6), (1, vec![1]));
        assert_eq!(scan("011011", 6), (3, vec![3, 3, 3]));
        let w = Word::parse_chars(&a, "01100110").unwrap();
        assert!(essential_period_scan(&w, 3).is_err());
        let w = Word::parse_chars(&a, "0100").unwrap();
        assert_eq!(essential_period_scan(&w, 2).ok(), None);
    }

    #[test]
    fn residues_of_periodic_words() {
        let a = Alphabet::digits(2);
        let w = Word::parse_chars(&a, "0001").unwrap();
        assert_eq!(essential_period_scan(&[w.to_vec(), w.to_vec()].concat(), 4).unwrap().1, vec![2, 4, 2, 4]);
        assert_eq!(periodic_witnesses(&w, 2), vec![(0, 0)]);
        assert_eq!(periodic_witnesses(&w, 8), vec![(0, 0), (1, 0), (2, 0), (3, 1), (4, 0), (5, 0), (6, 0), (7, 1)]);
        assert!(periodic_witnesses(&w, 3).is_empty());
    }
}
