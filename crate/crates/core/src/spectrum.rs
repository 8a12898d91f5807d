//! The periodic spectrum `P(X,S)`: the set of `p >= 1` such that
//! `exp(2iπ/p)` is a continuous eigenvalue of the substitution subshift.
//!
//! Constant-length substitutions use Dekking's description (divisors of
//! `h·l^n`); proper ones use the incidence-matrix algorithm built on the
//! powers `1·M^k`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_big, factor_u64, gcd_u64, valuation, Factorization};
use crate::error::{domain, Error, Result};
use crate::heightgraph::height;
use crate::intmat::IntMatrix;
use crate::periodicity::{periodicity_test, PeriodicityVerdict, DEFAULT_NONPERIODIC_BOUND};
use crate::words::Morphism;

/// Finite presentation of a spectrum: products of arbitrary powers of the
/// infinite primes and powers of the bounded primes up to their caps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpectrumDescriptor {
    pub infinite_primes: BTreeSet<u64>,
    pub bounded_primes: BTreeMap<u64, u32>,
}

impl SpectrumDescriptor {
    pub fn new(infinite_primes: BTreeSet<u64>, bounded_primes: BTreeMap<u64, u32>) -> Result<Self> {
        if let Some(q) = bounded_primes.keys().find(|q| infinite_primes.contains(q)) {
            return domain(format!("prime {q} is both bounded and unbounded"));
        }
        if let Some((q, _)) = bounded_primes.iter().find(|(_, &e)| e == 0) {
            return domain(format!("bounded prime {q} has a zero cap"));
        }
        Ok(SpectrumDescriptor {
            infinite_primes,
            bounded_primes,
        })
    }

    /// The spectrum `{1}`.
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn is_trivial(&self) -> bool {
        self.infinite_primes.is_empty() && self.bounded_primes.is_empty()
    }

    /// Cap of `q`: `None` for unbounded primes, `Some(0)` for absent ones.
    pub fn cap(&self, q: u64) -> Option<u32> {
        if self.infinite_primes.contains(&q) {
            None
        } else {
            Some(self.bounded_primes.get(&q).copied().unwrap_or(0))
        }
    }

    pub fn member(&self, p: u64) -> Result<bool> {
        Ok(self.reduce(p)? == p)
    }

    /// Greatest divisor of `p` lying in the spectrum.
    pub fn reduce(&self, p: u64) -> Result<u64> {
        if p == 0 {
            return domain("difference must be positive");
        }
        Ok(factor_u64(p)
            .into_iter()
            .map(|(q, e)| {
                let keep = self.cap(q).map_or(e, |c| e.min(c));
                q.pow(keep)
            })
            .product())
    }

    /// All members up to `limit`, ascending.
    pub fn elements_up_to(&self, limit: u64) -> Vec<u64> {
        (1..=limit)
            .filter(|&p| self.member(p).unwrap_or(false))
            .collect()
    }

    /// Divisors of `h·l^n` for `n >= 0`.
    pub fn from_generator(base: u64, scale: u64) -> Result<Self> {
        if base == 0 || scale == 0 {
            return domain("generators of a spectrum must be positive");
        }
        let infinite: BTreeSet<u64> = if base == 1 {
            BTreeSet::new()
        } else {
            factor_u64(base).into_keys().collect()
        };
        let bounded: BTreeMap<u64, u32> = factor_u64(scale)
            .into_iter()
            .filter(|(q, _)| !infinite.contains(q))
            .collect();
        Self::new(infinite, bounded)
    }
}

impl fmt::Display for SpectrumDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "{{1}}");
        }
        let mut parts: Vec<String> = self
            .infinite_primes
            .iter()
            .map(|q| format!("{q}^n"))
            .collect();
        parts.extend(self.bounded_primes.iter().map(|(q, e)| format!("{q}^(0..={e})")));
        write!(f, "{{{}}}", parts.join(" × "))
    }
}

/// One step of the stabilization loop: `g = gcd(1·M^{nd})` and its part
/// supported on the bounded primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepThreeEntry {
    pub n: u64,
    pub g: BigInt,
    pub g_tilde: BigInt,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepThreeTrace {
    pub entries: Vec<StepThreeEntry>,
    /// First `n` with `g̃_n = g̃_{n+1}` (0 when no bounded prime exists).
    pub stop: u64,
    /// Iteration cap that was in force.
    pub cap: u64,
}

/// How a spectrum was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpectrumMethod {
    ConstantLength {
        length: u64,
        height: u64,
    },
    Proper {
        prime_periods: BTreeSet<u64>,
        infinite_primes: BTreeSet<u64>,
        trace: StepThreeTrace,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumAnalysis {
    pub descriptor: SpectrumDescriptor,
    pub method: SpectrumMethod,
    pub periodicity: PeriodicityVerdict,
}

impl SpectrumAnalysis {
    /// Bound on the non-periodicity scan when the verdict depends on it.
    pub fn conditional_bound(&self) -> Option<usize> {
        match self.periodicity {
            PeriodicityVerdict::NonPeriodicUpTo { bound } => Some(bound),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectrumOptions {
    pub nonperiodic_bound: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            nonperiodic_bound: DEFAULT_NONPERIODIC_BOUND,
        }
    }
}

fn prime_divisors(n: &BigInt) -> Result<BTreeSet<u64>> {
    if n.is_one() {
        return Ok(BTreeSet::new());
    }
    Ok(factor_big(n)?.into_keys().collect())
}

/// Checks primitivity, properness and non-periodicity; returns the verdict
/// of the periodicity scan.
fn proper_preconditions(sigma: &Morphism, bound: usize) -> Result<PeriodicityVerdict> {
    let verdict = nonperiodic_precondition(sigma, bound)?;
    if !sigma.profile().is_proper_one_side() {
        return Err(Error::ProperRequired);
    }
    Ok(verdict)
}

/// Checks that `σ` is primitive and its fixed points are not periodic.
pub(crate) fn nonperiodic_precondition(sigma: &Morphism, bound: usize) -> Result<PeriodicityVerdict> {
    if !sigma.is_endomorphism() {
        return domain("substitution must be an endomorphism");
    }
    if sigma.is_erasing() || !sigma.is_primitive() {
        return Err(Error::Primitivity);
    }
    let (_, power, seed) = sigma.seeded_power()?;
    let verdict = periodicity_test(&power, &seed, bound)?;
    if let PeriodicityVerdict::Periodic { minimal_period, .. } = verdict {
        return Err(Error::PeriodicInput {
            period: minimal_period,
        });
    }
    Ok(verdict)
}

/// Primes dividing every entry of `1·M^d`.
pub fn prime_periods(sigma: &Morphism) -> Result<BTreeSet<u64>> {
    proper_preconditions(sigma, DEFAULT_NONPERIODIC_BOUND)?;
    prime_periods_of(&sigma.incidence())
}

pub(crate) fn prime_periods_of(m: &IntMatrix) -> Result<BTreeSet<u64>> {
    prime_divisors(&m.row_power(m.rows()).gcd())
}

/// Primes of `prime_periods` whose powers are all in the spectrum.
pub fn infinite_primes(sigma: &Morphism) -> Result<BTreeSet<u64>> {
    proper_preconditions(sigma, DEFAULT_NONPERIODIC_BOUND)?;
    let m = sigma.incidence();
    infinite_primes_of(&m, &prime_periods_of(&m)?)
}

pub(crate) fn infinite_primes_of(m: &IntMatrix, pp: &BTreeSet<u64>) -> Result<BTreeSet<u64>> {
    let g = m.minimal_recurrence()?.coeff_gcd();
    Ok(pp
        .iter()
        .copied()
        .filter(|&q| g.is_zero() || g.is_multiple_of(&BigInt::from(q)))
        .collect())
}

/// Caps `N_max(q)` of the primes in `pp \ pp_inf`.
pub fn bounded_exponents(
    sigma: &Morphism,
    pp: &BTreeSet<u64>,
    pp_inf: &BTreeSet<u64>,
) -> Result<(BTreeMap<u64, u32>, StepThreeTrace)> {
    proper_preconditions(sigma, DEFAULT_NONPERIODIC_BOUND)?;
    bounded_exponents_of(&sigma.incidence(), pp, pp_inf)
}

fn bounded_part(g: &BigInt, bounded: &[u64]) -> BigInt {
    bounded
        .iter()
        .map(|&q| BigInt::from(q).pow(valuation(g, q)))
        .product()
}

/// Largest `k` with `q^{k-1} <= s`.
fn k_bound(q: u64, s: &BigInt) -> u64 {
    let mut k = 1u64;
    let mut power = BigInt::one();
    let q = BigInt::from(q);
    while &power * &q <= *s {
        power *= &q;
        k += 1;
    }
    k
}

pub(crate) fn bounded_exponents_of(
    m: &IntMatrix,
    pp: &BTreeSet<u64>,
    pp_inf: &BTreeSet<u64>,
) -> Result<(BTreeMap<u64, u32>, StepThreeTrace)> {
    let bounded: Vec<u64> = pp.difference(pp_inf).copied().collect();
    if bounded.is_empty() {
        return Ok((BTreeMap::new(), StepThreeTrace::default()));
    }
    let d = m.rows();
    let max_col = m
        .column_sums()
        .entries()
        .iter()
        .max()
        .cloned()
        .unwrap_or_default();
    let cap = bounded
        .iter()
        .map(|&q| {
            let qd = q.checked_pow(d as u32).unwrap_or(u64::MAX);
            k_bound(q, &max_col).saturating_mul(qd).saturating_add(d as u64)
        })
        .max()
        .unwrap_or(0);
    let md = m.pow(d as u64)?;
    let mut trace = StepThreeTrace {
        entries: Vec::new(),
        stop: 0,
        cap,
    };
    let mut v = m.row_power(d);
    let mut prev: Option<BigInt> = None;
    for n in 1..=cap.saturating_add(1) {
        let g = v.gcd();
        let g_tilde = bounded_part(&g, &bounded);
        trace.entries.push(StepThreeEntry {
            n,
            g,
            g_tilde: g_tilde.clone(),
        });
        if prev.as_ref() == Some(&g_tilde) {
            trace.stop = n - 1;
            let caps: BTreeMap<u64, u32> = bounded
                .iter()
                .map(|&q| (q, valuation(&g_tilde, q)))
                .collect();
            check_window(m, (n - 1) * d as u64, &caps)?;
            log::debug!("bounded exponents stabilized at n = {}: {caps:?}", n - 1);
            return Ok((caps, trace));
        }
        prev = Some(g_tilde);
        v = v.times(&md);
    }
    Err(Error::Invariant(format!(
        "bounded part of gcd(1·M^(nd)) did not stabilize within {cap} steps"
    )))
}

/// The valuations of `gcd(1·M^j)` for `j` in `start..=start+d` must all equal
/// the caps.
fn check_window(m: &IntMatrix, start: u64, caps: &BTreeMap<u64, u32>) -> Result<()> {
    let d = m.rows() as u64;
    let mut v = m.row_power(start as usize);
    for j in start..=start + d {
        let g = v.gcd();
        for (&q, &e) in caps {
            let got = valuation(&g, q);
            if got != e {
                return Err(Error::Invariant(format!(
                    "valuation of {q} in gcd(1·M^{j}) is {got}, expected the stabilized cap {e}"
                )));
            }
        }
        v = v.times(m);
    }
    Ok(())
}

/// Spectrum of a proper substitution from its incidence matrix.
fn proper_spectrum(m: &IntMatrix) -> Result<(SpectrumDescriptor, SpectrumMethod)> {
    let pp = prime_periods_of(m)?;
    let pp_inf = infinite_primes_of(m, &pp)?;
    let (caps, trace) = bounded_exponents_of(m, &pp, &pp_inf)?;
    let descriptor = SpectrumDescriptor::new(pp_inf.clone(), caps)?;
    Ok((
        descriptor,
        SpectrumMethod::Proper {
            prime_periods: pp,
            infinite_primes: pp_inf,
            trace,
        },
    ))
}

/// Runs the matrix algorithm on a proper substitution regardless of its length profile.
pub fn algorithm_one_spectrum(sigma: &Morphism) -> Result<SpectrumDescriptor> {
    proper_preconditions(sigma, DEFAULT_NONPERIODIC_BOUND)?;
    Ok(proper_spectrum(&sigma.incidence())?.0)
}

pub fn spectrum(sigma: &Morphism) -> Result<SpectrumDescriptor> {
    Ok(spectrum_with(sigma, &SpectrumOptions::default())?.descriptor)
}

pub fn spectrum_with(sigma: &Morphism, options: &SpectrumOptions) -> Result<SpectrumAnalysis> {
    let periodicity = nonperiodic_precondition(sigma, options.nonperiodic_bound)?;
    let profile = sigma.profile();
    if let Some(l) = profile.constant_length {
        let (_, power, seed) = sigma.seeded_power()?;
        let h = height(&power, &seed)?.h as u64;
        let descriptor = dekking_spectrum(l as u64, h)?;
        return Ok(SpectrumAnalysis {
            descriptor,
            method: SpectrumMethod::ConstantLength {
                length: l as u64,
                height: h,
            },
            periodicity,
        });
    }
    if !profile.is_proper_one_side() {
        return Err(Error::ProperRequired);
    }
    let (descriptor, method) = proper_spectrum(&sigma.incidence())?;
    Ok(SpectrumAnalysis {
        descriptor,
        method,
        periodicity,
    })
}

/// Divisors of `h·l^n`.
pub fn dekking_spectrum(l: u64, h: u64) -> Result<SpectrumDescriptor> {
    if l < 2 || h == 0 {
        return domain(format!("need length >= 2 and height >= 1, got l = {l}, h = {h}"));
    }
    if gcd_u64(h, l) != 1 {
        return domain(format!("height {h} is not coprime to the length {l}"));
    }
    SpectrumDescriptor::from_generator(l, h)
}

/// Host's description for two-letter substitutions: divisors of `w·r^n`
/// with `r = gcd(det M, tr M)`.
pub fn host_two_letter(sigma: &Morphism) -> Result<SpectrumDescriptor> {
    let (r, w) = host_parameters(sigma)?;
    SpectrumDescriptor::from_generator(r, w)
}

/// The pair `(r, w)`.
pub fn host_parameters(sigma: &Morphism) -> Result<(u64, u64)> {
    if !sigma.is_endomorphism() || sigma.domain().len() != 2 {
        return domain("two-letter substitution required");
    }
    let profile = sigma.profile();
    if profile.constant_length.is_some() {
        return domain("substitution has constant length");
    }
    match nonperiodic_precondition(sigma, DEFAULT_NONPERIODIC_BOUND) {
        Ok(_) => {}
        Err(Error::Primitivity) => return domain("substitution is not primitive"),
        Err(Error::PeriodicInput { period }) => {
            return domain(format!("fixed point is periodic with period {period}"))
        }
        Err(e) => return Err(e),
    }
    let m = sigma.incidence();
    let r = m.det()?.gcd(&m.trace());
    let r = r
        .abs()
        .to_u64()
        .ok_or_else(|| Error::Domain("gcd(det, trace) exceeds 64 bits".into()))?;
    let len0 = sigma.image(0).len() as u64;
    let len1 = sigma.image(1).len() as u64;
    let diff = len0.abs_diff(len1);
    let primes: BTreeSet<u64> = factor_u64(len0)
        .into_keys()
        .chain(factor_u64(len1).into_keys())
        .collect();
    let w = primes
        .into_iter()
        .filter(|&q| r % q != 0)
        .map(|q| q.pow(crate::arith::valuation_u64(diff, q)))
        .product();
    Ok((r, w))
}

/// Prime factorization of a positive difference, as used for exponents.
pub(crate) fn factor_difference(p: u64) -> Result<Factorization> {
    if p == 0 {
        return domain("difference must be positive");
    }
    Ok(factor_u64(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn proper_example_spectrum() {
        let s = corpus::proper_01_0110();
        assert_eq!(prime_periods(&s).unwrap(), set(&[2, 3]));
        assert_eq!(infinite_primes(&s).unwrap(), set(&[3]));
        let (caps, trace) = bounded_exponents(&s, &set(&[2, 3]), &set(&[3])).unwrap();
        assert_eq!(caps, BTreeMap::from([(2, 1)]));
        assert_eq!(trace.entries[0].g, BigInt::from(6));
        assert_eq!(trace.entries[0].g_tilde, BigInt::from(2));
        assert_eq!(trace.entries[1].g_tilde, BigInt::from(2));
        assert_eq!(trace.stop, 1);
        let desc = spectrum(&s).unwrap();
        assert_eq!(desc.infinite_primes, set(&[3]));
        assert_eq!(desc.bounded_primes, BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn fibonacci_is_trivial() {
        let f = corpus::fibonacci();
        assert!(prime_periods(&f).unwrap().is_empty());
        assert!(infinite_primes(&f).unwrap().is_empty());
        assert!(spectrum(&f).unwrap().is_trivial());
        assert_eq!(host_parameters(&f).unwrap(), (1, 1));
    }

    #[test]
    fn six_letter_example_is_trivial() {
        let tau = corpus::proper_six_letter();
        assert!(prime_periods(&tau).unwrap().is_empty());
        assert!(spectrum(&tau).unwrap().is_trivial());
    }

    #[test]
    fn doubling_recurrence_prime() {
        let m = corpus::period_doubling().incidence();
        let pp = prime_periods_of(&m).unwrap();
        assert_eq!(infinite_primes_of(&m, &pp).unwrap(), set(&[2]));
    }

    #[test]
    fn membership_and_reduction() {
        let desc = spectrum(&corpus::proper_01_0110()).unwrap();
        assert!(desc.member(6).unwrap());
        assert!(desc.member(1).unwrap());
        assert!(!desc.member(4).unwrap());
        assert_eq!(desc.reduce(1).unwrap(), 1);
        assert_eq!(desc.reduce(12).unwrap(), 6);
        assert_eq!(desc.reduce(5).unwrap(), 1);
        assert!(matches!(desc.reduce(0), Err(Error::Domain(_))));
    }

    #[test]
    fn dekking_descriptors() {
        let d = dekking_spectrum(4, 3).unwrap();
        assert_eq!(d.infinite_primes, set(&[2]));
        assert_eq!(d.bounded_primes, BTreeMap::from([(3, 1)]));
        let d = dekking_spectrum(2, 1).unwrap();
        assert_eq!(d.infinite_primes, set(&[2]));
        assert!(d.bounded_primes.is_empty());
        let d = dekking_spectrum(2, 3).unwrap();
        assert_eq!(d.bounded_primes, BTreeMap::from([(3, 1)]));
        assert!(matches!(dekking_spectrum(4, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn dekking_example_via_dispatch() {
        let desc = spectrum(&corpus::height_three_length_four()).unwrap();
        assert_eq!(desc, dekking_spectrum(4, 3).unwrap());
    }

    #[test]
    fn host_examples() {
        let s = corpus::proper_01_0110();
        assert_eq!(host_parameters(&s).unwrap(), (3, 2));
        assert_eq!(host_two_letter(&s).unwrap(), spectrum(&s).unwrap());
        let s = Morphism::from_char_rules(&[("0", "001"), ("1", "0")]).unwrap();
        assert_eq!(host_parameters(&s).unwrap(), (1, 1));
        assert!(host_two_letter(&s).unwrap().is_trivial());
    }

    #[test]
    fn improper_input_is_rejected() {
        assert!(matches!(
            spectrum(&corpus::open_three_letter()),
            Err(Error::ProperRequired)
        ));
    }

    #[test]
    fn periodic_input_is_rejected() {
        assert!(matches!(
            spectrum(&corpus::alternating()),
            Err(Error::PeriodicInput { period: 2 })
        ));
    }

    #[test]
    fn descriptor_display() {
        let desc = spectrum(&corpus::proper_01_0110()).unwrap();
        assert_eq!(desc.to_string(), "{3^n × 2^(0..=1)}");
        assert_eq!(desc.elements_up_to(20), vec![1, 2, 3, 6, 9, 18]);
    }
}
