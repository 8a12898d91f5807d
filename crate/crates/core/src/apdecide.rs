//! Constant arithmetic subsequences of a fixed point `x` of a proper
//! substitution, or of its image `y = φ(x)` under a coding, for a given
//! common difference.

use num_bigint::BigInt;

use crate::error::{domain, Error, Result};
use crate::spectrum::{factor_difference, spectrum_with, SpectrumAnalysis, SpectrumDescriptor, SpectrumOptions};
use crate::words::{Letter, Morphism};

const MAX_ESCALATIONS: u32 = 64;

/// Residue `residue` modulo `reduced` carries the single letter `letter`.
/// Every `k ≡ residue mod reduced` with `k < requested` is then a witness
/// for the requested difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APWitness {
    pub requested: u64,
    pub reduced: u64,
    pub residue: u64,
    pub letter: Letter,
    pub exponent: u32,
}

/// Outcome of a decision for one difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APDecision {
    pub requested: u64,
    pub reduced: u64,
    pub exponent: u32,
    /// Extra multiples of `d` added to the exponent before `reduced`
    /// divided every block length.
    pub escalations: u32,
    pub witnesses: Vec<APWitness>,
}

/// `d` times the largest exponent in the factorization of `p̃`.
pub fn m_exponent(reduced: u64, desc: &SpectrumDescriptor, d: usize) -> Result<u32> {
    if !desc.member(reduced)? {
        return domain(format!("{reduced} is not in the spectrum"));
    }
    let max_exp = factor_difference(reduced)?.into_values().max().unwrap_or(0);
    Ok(d as u32 * max_exp)
}

/// Letters seen in one residue class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Seen {
    Empty,
    One(Letter),
    Many,
}

impl Seen {
    fn join(self, other: Seen) -> Seen {
        match (self, other) {
            (Seen::Empty, x) | (x, Seen::Empty) => x,
            (Seen::One(a), Seen::One(b)) if a == b => Seen::One(a),
            _ => Seen::Many,
        }
    }
}

/// For each letter `a` and residue `r < q`, the `φ`-letters at positions
/// `≡ r mod q` of `σ^m(a)`.
fn residue_tables(sigma: &Morphism, phi: &Morphism, q: u64, m: u32) -> Vec<Vec<Seen>> {
    let d = sigma.domain().len();
    let q = q as usize;
    let mut table: Vec<Vec<Seen>> = (0..d)
        .map(|a| {
            let mut row = vec![Seen::Empty; q];
            row[0] = Seen::One(phi.code(a));
            row
        })
        .collect();
    let mut lengths: Vec<usize> = vec![1 % q; d];
    for _ in 0..m {
        let mut next = vec![vec![Seen::Empty; q]; d];
        let mut next_lengths = vec![0usize; d];
        for a in 0..d {
            let mut offset = 0usize;
            for &c in sigma.image(a).iter() {
                for (r, &s) in table[c].iter().enumerate() {
                    if s != Seen::Empty {
                        let slot = &mut next[a][(offset + r) % q];
                        *slot = slot.join(s);
                    }
                }
                offset = (offset + lengths[c]) % q;
            }
            next_lengths[a] = offset;
        }
        table = next;
        lengths = next_lengths;
    }
    table
}

pub fn constant_ap_witnesses(sigma: &Morphism, phi: Option<&Morphism>, p: u64) -> Result<Vec<APWitness>> {
    Ok(decide(sigma, phi, p, &SpectrumOptions::default())?.witnesses)
}

pub fn decide(
    sigma: &Morphism,
    phi: Option<&Morphism>,
    p: u64,
    options: &SpectrumOptions,
) -> Result<APDecision> {
    APDecider::new(sigma, phi, options)?.decide(p)
}

/// Checked preconditions and spectrum of `(σ, φ)`, reusable across differences.
#[derive(Clone, Debug)]
pub struct APDecider {
    sigma: Morphism,
    phi: Morphism,
    spectrum: SpectrumAnalysis,
}

impl APDecider {
    pub fn new(sigma: &Morphism, phi: Option<&Morphism>, options: &SpectrumOptions) -> Result<Self> {
        let phi = match phi {
            Some(phi) => phi.clone(),
            None => Morphism::identity(sigma.domain()),
        };
        if !phi.is_coding() {
            return Err(Error::NotCoding(phi.to_string()));
        }
        if phi.domain() != sigma.domain() {
            return domain("coding alphabet differs from the substitution alphabet");
        }
        let spectrum = spectrum_with(sigma, options)?;
        if !sigma.profile().is_proper_one_side() {
            return Err(Error::ProperRequired);
        }
        Ok(APDecider {
            sigma: sigma.clone(),
            phi,
            spectrum,
        })
    }

    pub fn spectrum(&self) -> &SpectrumAnalysis {
        &self.spectrum
    }

    pub fn coding(&self) -> &Morphism {
        &self.phi
    }

    pub fn decide(&self, p: u64) -> Result<APDecision> {
        if p == 0 {
            return domain("difference must be positive");
        }
        let reduced = self.spectrum.descriptor.reduce(p)?;
        if reduced == 1 {
            return Ok(APDecision {
                requested: p,
                reduced,
                exponent: 0,
                escalations: 0,
                witnesses: Vec::new(),
            });
        }
        let d = self.sigma.domain().len();
        let mut exponent = m_exponent(reduced, &self.spectrum.descriptor, d)?;
        let m = self.sigma.incidence();
        let q = BigInt::from(reduced);
        let mut escalations = 0;
        while !m.row_power(exponent as usize).divisible_by(&q) {
            if escalations == MAX_ESCALATIONS {
                return Err(Error::Invariant(format!(
                    "{reduced} divides no block length |σ^m(a)| for m up to {exponent}"
                )));
            }
            escalations += 1;
            exponent += d as u32;
        }
        if escalations > 0 {
            log::warn!("exponent for difference {reduced} escalated {escalations} time(s) to {exponent}");
        }
        let table = residue_tables(&self.sigma, &self.phi, reduced, exponent);
        let witnesses = (0..reduced as usize)
            .filter_map(|r| match table.iter().fold(Seen::Empty, |acc, row| acc.join(row[r])) {
                Seen::One(b) => Some(APWitness {
                    requested: p,
                    reduced,
                    residue: r as u64,
                    letter: b,
                    exponent,
                }),
                _ => None,
            })
            .collect();
        Ok(APDecision {
            requested: p,
            reduced,
            exponent,
            escalations,
            witnesses,
        })
    }
}
