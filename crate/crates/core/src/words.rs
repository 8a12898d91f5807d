//! Alphabets, words, morphisms and the languages of substitutions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::intmat::IntMatrix;

/// Index of a symbol inside its [`Alphabet`].
pub type Letter = usize;

/// An ordered list of distinct symbol names. Letters are the indices
/// `0..len()` into that list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return domain("alphabet must not be empty");
        }
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return domain(format!("invalid symbol {s:?}"));
            }
            if !seen.insert(s.as_str()) {
                return domain(format!("duplicate symbol {s:?}"));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The alphabet `0, 1, ..., d-1`.
    pub fn digits(d: usize) -> Self {
        Alphabet::new((0..d).map(|i| i.to_string())).expect("d > 0")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, a: Letter) -> &str {
        &self.symbols[a]
    }

    pub fn index_of(&self, symbol: &str) -> Option<Letter> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn letters(&self) -> std::ops::Range<Letter> {
        0..self.symbols.len()
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }
}

/// A finite word, stored as letter indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn into_vec(self) -> Vec<Letter> {
        self.0
    }

    /// Renders the word with symbol names; symbols are separated by spaces
    /// unless every symbol is a single character.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        let sep = if alphabet.single_char() { "" } else { " " };
        self.0
            .iter()
            .map(|&a| alphabet.symbol(a))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Parses a word whose symbols are single characters.
    pub fn parse_chars(alphabet: &Alphabet, text: &str) -> Result<Self> {
        text.chars()
            .map(|c| {
                alphabet
                    .index_of(&c.to_string())
                    .ok_or_else(|| Error::Domain(format!("symbol {c:?} not in alphabet")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl std::ops::Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Length data and properness flags of a morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionProfile {
    pub max_len: usize,
    pub min_len: usize,
    pub constant_length: Option<usize>,
    pub left_proper: bool,
    pub right_proper: bool,
    pub growing_letters: BTreeSet<Letter>,
    pub is_coding: bool,
}

impl SubstitutionProfile {
    pub fn is_proper_one_side(&self) -> bool {
        self.left_proper || self.right_proper
    }
}

/// Where an admissible fixed point is grown from: the right ray starts at
/// `right`; a two-sided fixed point additionally has `left` at position -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeedPair {
    pub left: Option<Letter>,
    pub right: Letter,
}

impl SeedPair {
    pub fn one_sided(right: Letter) -> Self {
        SeedPair { left: None, right }
    }

    pub fn two_sided(left: Letter, right: Letter) -> Self {
        SeedPair {
            left: Some(left),
            right,
        }
    }

    pub fn is_two_sided(&self) -> bool {
        self.left.is_some()
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        match self.left {
            Some(b) => format!("{}.{}", alphabet.symbol(b), alphabet.symbol(self.right)),
            None => alphabet.symbol(self.right).to_string(),
        }
    }
}

/// A morphism between free monoids, given by the image of each letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    domain: Alphabet,
    codomain: Alphabet,
    images: Vec<Word>,
    allow_erasing: bool,
}

impl Morphism {
    /// Builds a non-erasing morphism.
    pub fn new(domain: Alphabet, codomain: Alphabet, images: Vec<Word>) -> Result<Self> {
        Self::build(domain, codomain, images, false)
    }

    /// Builds a morphism that may send letters to the empty word.
    pub fn new_erasing(domain: Alphabet, codomain: Alphabet, images: Vec<Word>) -> Result<Self> {
        Self::build(domain, codomain, images, true)
    }

    fn build(
        dom: Alphabet,
        codomain: Alphabet,
        images: Vec<Word>,
        allow_erasing: bool,
    ) -> Result<Self> {
        if images.len() != dom.len() {
            return domain(format!(
                "{} images given for an alphabet of {} letters",
                images.len(),
                dom.len()
            ));
        }
        for (a, img) in images.iter().enumerate() {
            if img.is_empty() && !allow_erasing {
                return domain(format!("letter {} has an empty image", dom.symbol(a)));
            }
            if let Some(&bad) = img.iter().find(|&&b| b >= codomain.len()) {
                return domain(format!("image letter index {bad} outside codomain"));
            }
        }
        Ok(Morphism {
            domain: dom,
            codomain,
            images,
            allow_erasing,
        })
    }

    /// Endomorphism from `(symbol, image)` pairs whose symbols are single
    /// characters, e.g. `[("0", "01"), ("1", "0")]`.
    pub fn from_char_rules(rules: &[(&str, &str)]) -> Result<Self> {
        let alphabet = Alphabet::new(rules.iter().map(|(a, _)| a.to_string()))?;
        let images = rules
            .iter()
            .map(|(_, img)| Word::parse_chars(&alphabet, img))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(alphabet.clone(), alphabet, images)
    }

    /// Letter-to-letter morphism from `(symbol, target)` pairs. The codomain
    /// lists targets in order of first appearance.
    pub fn coding_from_pairs(domain: &Alphabet, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut targets: Vec<String> = Vec::new();
        let mut images = vec![None; domain.len()];
        for (a, t) in pairs {
            let a = domain
                .index_of(a)
                .ok_or_else(|| Error::Domain(format!("symbol {a:?} not in alphabet")))?;
            let ti = match targets.iter().position(|s| s == t) {
                Some(i) => i,
                None => {
                    targets.push(t.to_string());
                    targets.len() - 1
                }
            };
            images[a] = Some(Word(vec![ti]));
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(a, w)| {
                w.ok_or_else(|| Error::Domain(format!("no code for {}", domain.symbol(a))))
            })
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(domain.clone(), Alphabet::new(targets)?, images)
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        let images = alphabet.letters().map(|a| Word(vec![a])).collect();
        Morphism {
            domain: alphabet.clone(),
            codomain: alphabet.clone(),
            images,
            allow_erasing: false,
        }
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn image(&self, a: Letter) -> &Word {
        &self.images[a]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn is_erasing(&self) -> bool {
        self.images.iter().any(Word::is_empty)
    }

    pub fn allows_erasing(&self) -> bool {
        self.allow_erasing
    }

    pub fn is_coding(&self) -> bool {
        self.images.iter().all(|w| w.len() == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.is_endomorphism() && self.images.iter().enumerate().all(|(a, w)| w[..] == [a])
    }

    pub fn max_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> usize {
        self.images.iter().map(Word::len).min().unwrap_or(0)
    }

    /// Image of a single letter of a coding.
    pub fn code(&self, a: Letter) -> Letter {
        debug_assert!(self.images[a].len() == 1);
        self.images[a][0]
    }

    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        let mut out = Vec::with_capacity(w.len() * self.max_len());
        for &a in w {
            match self.images.get(a) {
                Some(img) => out.extend_from_slice(img),
                None => return domain(format!("letter index {a} outside the domain")),
            }
        }
        Ok(Word(out))
    }

    fn require_endomorphism(&self) -> Result<()> {
        if self.is_endomorphism() {
            Ok(())
        } else {
            domain("operation requires an endomorphism")
        }
    }

    /// `σ^k(a)`.
    pub fn iterate(&self, a: Letter, k: usize) -> Result<Word> {
        self.require_endomorphism()?;
        if a >= self.domain.len() {
            return domain(format!("letter index {a} outside the domain"));
        }
        let mut w = Word(vec![a]);
        for _ in 0..k {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    /// `σ^k(w)`.
    pub fn iterate_word(&self, w: &[Letter], k: usize) -> Result<Word> {
        self.require_endomorphism()?;
        let mut w = Word(w.to_vec());
        for _ in 0..k {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    /// The endomorphism `σ^k` (`k >= 1`).
    pub fn power(&self, k: usize) -> Result<Morphism> {
        self.require_endomorphism()?;
        if k == 0 {
            return Ok(Morphism::identity(&self.domain));
        }
        let images = self
            .domain
            .letters()
            .map(|a| self.iterate(a, k))
            .collect::<Result<Vec<_>>>()?;
        Morphism::build(
            self.domain.clone(),
            self.codomain.clone(),
            images,
            self.allow_erasing,
        )
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &Morphism) -> Result<Morphism> {
        if inner.codomain != self.domain {
            return domain("codomain of the inner morphism must be the outer domain");
        }
        let images = inner
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Morphism::build(
            inner.domain.clone(),
            self.codomain.clone(),
            images,
            self.allow_erasing || inner.allow_erasing,
        )
    }

    pub fn incidence(&self) -> IntMatrix {
        IntMatrix::incidence(self)
    }

    /// True when the incidence matrix is primitive.
    pub fn is_primitive(&self) -> bool {
        self.is_endomorphism()
            && self
                .incidence()
                .is_primitive()
                .expect("incidence matrices are non-negative")
    }

    pub fn profile(&self) -> SubstitutionProfile {
        let max_len = self.max_len();
        let min_len = self.min_len();
        let first = self.images[0].first();
        let last = self.images[0].last();
        let left_proper = first.is_some() && self.images.iter().all(|w| w.first() == first);
        let right_proper = last.is_some() && self.images.iter().all(|w| w.last() == last);
        SubstitutionProfile {
            max_len,
            min_len,
            constant_length: (min_len == max_len).then_some(max_len),
            left_proper,
            right_proper,
            growing_letters: if self.is_endomorphism() {
                self.growing_letters()
            } else {
                BTreeSet::new()
            },
            is_coding: self.is_coding(),
        }
    }

    /// Letters `c` with `|σ^n(c)| -> ∞`.
    ///
    /// A letter is mortal when some power erases it. On the graph of
    /// non-mortal occurrences every vertex has an out-edge, so `c` grows
    /// exactly when it reaches a letter lying on a cycle whose image holds at
    /// least two non-mortal letters.
    pub fn growing_letters(&self) -> BTreeSet<Letter> {
        let d = self.domain.len();
        let mut mortal = vec![false; d];
        loop {
            let mut changed = false;
            for a in 0..d {
                if !mortal[a] && self.images[a].iter().all(|&b| mortal[b]) {
                    mortal[a] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let succ: Vec<Vec<Letter>> = (0..d)
            .map(|a| self.images[a].iter().copied().filter(|&b| !mortal[b]).collect())
            .collect();
        let reach = |start: Letter| -> Vec<bool> {
            let mut seen = vec![false; d];
            let mut queue: VecDeque<Letter> = succ[start].iter().copied().collect();
            while let Some(b) = queue.pop_front() {
                if !seen[b] {
                    seen[b] = true;
                    queue.extend(succ[b].iter().copied());
                }
            }
            seen
        };
        let strict: Vec<Vec<bool>> = (0..d).map(reach).collect();
        let pumping: Vec<bool> = (0..d)
            .map(|b| strict[b][b] && succ[b].len() >= 2)
            .collect();
        (0..d)
            .filter(|&c| !mortal[c] && (pumping[c] || (0..d).any(|b| strict[c][b] && pumping[b])))
            .collect()
    }

    fn right_prolongable(&self, a: Letter, growing: &BTreeSet<Letter>) -> bool {
        let img = &self.images[a];
        img.len() >= 2 && img[0] == a && growing.contains(&a)
    }

    fn left_prolongable(&self, b: Letter, growing: &BTreeSet<Letter>) -> bool {
        let img = &self.images[b];
        img.len() >= 2 && img.last() == Some(b) && growing.contains(&b)
    }

    /// All one-sided seeds followed by all two-sided seeds `b.a` whose
    /// word `ba` belongs to the language.
    pub fn admissible_seeds(&self) -> Result<Vec<SeedPair>> {
        self.require_endomorphism()?;
        let growing = self.growing_letters();
        let rights: Vec<Letter> = self
            .domain
            .letters()
            .filter(|&a| self.right_prolongable(a, &growing))
            .collect();
        let lefts: Vec<Letter> = self
            .domain
            .letters()
            .filter(|&b| self.left_prolongable(b, &growing))
            .collect();
        let mut seeds: Vec<SeedPair> = rights.iter().map(|&a| SeedPair::one_sided(a)).collect();
        if !lefts.is_empty() && !rights.is_empty() {
            let language = self.language_two_factors();
            for &b in &lefts {
                for &a in &rights {
                    if language.contains(&[b, a]) {
                        seeds.push(SeedPair::two_sided(b, a));
                    }
                }
            }
        }
        Ok(seeds)
    }

    /// First one-sided seed, if any.
    pub fn canonical_seed(&self) -> Option<SeedPair> {
        let growing = self.growing_letters();
        self.domain
            .letters()
            .find(|&a| self.right_prolongable(a, &growing))
            .map(SeedPair::one_sided)
    }

    /// Smallest power `σ^k` (`1 <= k <= d`) admitting a one-sided seed.
    pub fn seeded_power(&self) -> Result<(usize, Morphism, SeedPair)> {
        self.require_endomorphism()?;
        if let Some(seed) = self.canonical_seed() {
            return Ok((1, self.clone(), seed));
        }
        for k in 2..=self.domain.len().max(2) {
            let p = self.power(k)?;
            if let Some(seed) = p.canonical_seed() {
                return Ok((k, p, seed));
            }
        }
        domain("no power of the substitution is prolongable on a growing letter")
    }

    fn close_two_factors(&self, start: Vec<[Letter; 2]>) -> BTreeSet<[Letter; 2]> {
        let mut set: BTreeSet<[Letter; 2]> = BTreeSet::new();
        let mut queue: VecDeque<[Letter; 2]> = VecDeque::new();
        for f in start {
            if set.insert(f) {
                queue.push_back(f);
            }
        }
        while let Some([u, v]) = queue.pop_front() {
            let mut img = self.images[u].0.clone();
            img.extend_from_slice(&self.images[v]);
            for win in img.windows(2) {
                let f = [win[0], win[1]];
                if set.insert(f) {
                    queue.push_back(f);
                }
            }
        }
        set
    }

    /// Length-2 words of `L(σ)`: every 2-factor of some `σ^n(c)`.
    pub fn language_two_factors(&self) -> BTreeSet<[Letter; 2]> {
        let start = self
            .images
            .iter()
            .flat_map(|w| w.windows(2).map(|p| [p[0], p[1]]).collect::<Vec<_>>())
            .collect();
        self.close_two_factors(start)
    }

    /// Least set of 2-letter words containing the 2-factors of `σ(a)` for each
    /// seed `a` (and `ba` for two-sided seeds), closed under taking the
    /// 2-factors of `σ(uv)`.
    pub fn two_factor_closure(&self, seeds: &[SeedPair]) -> BTreeSet<Word> {
        let mut start = Vec::new();
        for seed in seeds {
            start.extend(self.images[seed.right].windows(2).map(|p| [p[0], p[1]]));
            if let Some(b) = seed.left {
                start.push([b, seed.right]);
            }
        }
        self.close_two_factors(start)
            .into_iter()
            .map(|f| Word(f.to_vec()))
            .collect()
    }

    fn require_primitive(&self) -> Result<()> {
        self.require_endomorphism()?;
        if self.is_erasing() || !self.is_primitive() {
            return Err(Error::Primitivity);
        }
        Ok(())
    }

    /// Blocks `σ^k(w)` over the seed's 2-factors, with `k` minimal such that
    /// every `σ^k(a)` has length at least `n`. Every factor of length at most
    /// `n` of the fixed point occurs inside one of these blocks.
    fn covering_blocks(&self, seed: Option<&SeedPair>, n: usize) -> Result<Vec<Word>> {
        self.require_primitive()?;
        let mut lengths: Vec<u128> = vec![1; self.domain.len()];
        let mut k = 0;
        while (lengths.iter().min().copied().unwrap_or(0) as usize) < n {
            lengths = self
                .images
                .iter()
                .map(|img| img.iter().map(|&b| lengths[b]).sum())
                .collect();
            k += 1;
        }
        let pairs: Vec<Word> = match seed {
            Some(s) => self.two_factor_closure(std::slice::from_ref(s)).into_iter().collect(),
            None => self
                .language_two_factors()
                .into_iter()
                .map(|f| Word(f.to_vec()))
                .collect(),
        };
        pairs
            .iter()
            .map(|w| {
                let mut w = w.clone();
                for _ in 0..k {
                    w = self.apply(&w)?;
                }
                Ok(w)
            })
            .collect()
    }

    /// The length-`n` factors of the fixed point grown from `seed` (for a
    /// primitive substitution these are the length-`n` words of `L(σ)`).
    pub fn factors_of_length(&self, seed: &SeedPair, n: usize) -> Result<BTreeSet<Word>> {
        self.factors_impl(Some(seed), n)
    }

    /// Length-`n` words of `L(σ)` for a primitive `σ`.
    pub fn language_factors(&self, n: usize) -> Result<BTreeSet<Word>> {
        self.factors_impl(None, n)
    }

    fn factors_impl(&self, seed: Option<&SeedPair>, n: usize) -> Result<BTreeSet<Word>> {
        let blocks = self.covering_blocks(seed, n)?;
        Ok(blocks
            .iter()
            .flat_map(|b| b.windows(n.max(1)).map(|f| Word(f[..n].to_vec())))
            .collect())
    }

    /// Factor complexities `p(1), ..., p(n_max)` from one set of covering blocks.
    pub fn complexity_profile(&self, seed: Option<&SeedPair>, n_max: usize) -> Result<Vec<usize>> {
        let blocks = self.covering_blocks(seed, n_max)?;
        // Sorted distinct suffixes (cut at n_max): a suffix of length `len`
        // sharing `lcp` letters with its predecessor starts a new factor of
        // every length in `lcp+1..=len`.
        let mut suffixes: Vec<&[Letter]> = blocks
            .iter()
            .flat_map(|b| (0..b.len()).map(move |i| &b[i..(i + n_max).min(b.len())]))
            .collect();
        suffixes.sort_unstable();
        suffixes.dedup();
        let mut delta = vec![0isize; n_max + 2];
        let mut prev: &[Letter] = &[];
        for s in suffixes {
            let lcp = prev.iter().zip(s).take_while(|(a, b)| a == b).count();
            delta[lcp + 1] += 1;
            delta[s.len() + 1] -= 1;
            prev = s;
        }
        let mut running = 0isize;
        Ok((1..=n_max)
            .map(|n| {
                running += delta[n];
                running as usize
            })
            .collect())
    }

    /// Prefix of length `len` of the one-sided fixed point `σ^∞(seed.right)`.
    pub fn fixed_point_prefix(&self, seed: &SeedPair, len: usize) -> Result<Word> {
        self.require_endomorphism()?;
        let a = seed.right;
        if a >= self.domain.len() || !self.right_prolongable(a, &self.growing_letters()) {
            return domain(format!(
                "substitution is not right-prolongable on {}",
                self.domain.symbol(a.min(self.domain.len() - 1))
            ));
        }
        let mut out = self.images[a].0.clone();
        let mut i = 1;
        while out.len() < len {
            if i >= out.len() {
                return Err(Error::Invariant("fixed point stopped growing".into()));
            }
            let b = out[i];
            out.extend_from_slice(&self.images[b]);
            i += 1;
        }
        out.truncate(len);
        Ok(Word(out))
    }

    /// Renders the rules as `a -> image` lines.
    pub fn render_rules(&self) -> Vec<String> {
        self.domain
            .letters()
            .map(|a| {
                format!(
                    "{} -> {}",
                    self.domain.symbol(a),
                    self.images[a].render(&self.codomain)
                )
            })
            .collect()
    }

    /// For a coding: the domain letters sent to each codomain letter.
    pub fn fibres(&self) -> BTreeMap<Letter, BTreeSet<Letter>> {
        let mut out: BTreeMap<Letter, BTreeSet<Letter>> = BTreeMap::new();
        for (a, w) in self.images.iter().enumerate() {
            for &b in w.iter() {
                out.entry(b).or_default().insert(a);
            }
        }
        out
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_rules().join(", "))
    }
}
