//! Brute-force checks over explicit prefixes, independent of the decision
//! procedures: residue scans for arithmetic subsequences and counts of
//! common factors.

use std::collections::BTreeSet;

use crate::error::{domain, Result};
use crate::words::{Letter, Morphism, SeedPair, Word};

pub const MIN_WINDOW: usize = 10_000;
pub const DEFAULT_MAX_WINDOW: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Every scanned position carries this letter.
    Constant(Letter),
    /// The first scanned position and the first position whose letter differs.
    Violated(u64, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueStatus {
    pub residue: u64,
    pub status: Status,
    pub positions_scanned: u64,
}

impl ResidueStatus {
    pub fn is_constant(&self) -> bool {
        matches!(self.status, Status::Constant(_))
    }
}

/// Scans the positions `k, k+p, k+2p, ...` of `w` for every `k < p`.
pub fn prefix_ap_scan(w: &[Letter], p: u64) -> Result<Vec<ResidueStatus>> {
    if p == 0 {
        return domain("difference must be positive");
    }
    let step = p as usize;
    if w.len() < 2 * step {
        return domain(format!("window of length {} is shorter than 2·{p}", w.len()));
    }
    Ok((0..step)
        .map(|k| {
            let first = w[k];
            let mut scanned = 0u64;
            for j in (k..w.len()).step_by(step) {
                scanned += 1;
                if w[j] != first {
                    return ResidueStatus {
                        residue: k as u64,
                        status: Status::Violated(k as u64, j as u64),
                        positions_scanned: scanned,
                    };
                }
            }
            ResidueStatus {
                residue: k as u64,
                status: Status::Constant(first),
                positions_scanned: scanned,
            }
        })
        .collect())
}

/// `max(10^4, 20·p·|σ|^m)` clamped to `max_window`.
pub fn default_window(p: u64, max_len: usize, exponent: u32, max_window: usize) -> usize {
    let grown = (max_len as u64)
        .checked_pow(exponent)
        .and_then(|x| x.checked_mul(20))
        .and_then(|x| x.checked_mul(p))
        .map_or(usize::MAX, |x| usize::try_from(x).unwrap_or(usize::MAX));
    grown.max(MIN_WINDOW).min(max_window.max(2 * p as usize))
}

/// Prefix of `φ(x)` where `x` is the fixed point grown from `seed`.
pub fn coded_prefix(sigma: &Morphism, seed: &SeedPair, phi: Option<&Morphism>, len: usize) -> Result<Word> {
    let x = sigma.fixed_point_prefix(seed, len)?;
    Ok(match phi {
        Some(phi) => x.iter().map(|&a| phi.code(a)).collect(),
        None => x,
    })
}

fn named_factors(sigma: &Morphism, seed: &SeedPair, n: usize) -> Result<BTreeSet<Vec<String>>> {
    let alphabet = sigma.domain();
    Ok(sigma
        .factors_of_length(seed, n)?
        .into_iter()
        .map(|w| w.iter().map(|&a| alphabet.symbol(a).to_string()).collect())
        .collect())
}

/// Number of length-`n` words occurring in both fixed points, letters being
/// compared by their symbols.
pub fn factor_intersection(
    a: (&Morphism, &SeedPair),
    b: (&Morphism, &SeedPair),
    n: usize,
) -> Result<usize> {
    let fa = named_factors(a.0, a.1, n)?;
    let fb = named_factors(b.0, b.1, n)?;
    Ok(fa.intersection(&fb).count())
}
