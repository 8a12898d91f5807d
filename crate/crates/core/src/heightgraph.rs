//! Constant-length substitutions: the height and its letter partition, the
//! period graph whose walks compute the alphabets of arithmetic
//! subsequences `(y_{k + n·h·l^m})_n`, and the questions answered by it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::arith::{divisors, gcd_u64};
use crate::error::{domain, Error, Result};
use crate::spectrum::{dekking_spectrum, SpectrumDescriptor};
use crate::words::{Letter, Morphism, SeedPair};

pub const DEFAULT_MAX_LEVEL: u32 = 6;
pub const DEFAULT_RESIDUE_BUDGET: u64 = 1_000_000;
const STEP_SET_LIMIT: usize = 100_000;

/// Height `h` and the classes `A_0, ..., A_{h-1}`: `A_i` holds the letters
/// occurring at positions `≡ i mod h` of the fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightData {
    pub h: usize,
    pub classes: Vec<BTreeSet<Letter>>,
}

fn constant_length(sigma: &Morphism) -> Result<usize> {
    if !sigma.is_endomorphism() {
        return domain("substitution must be an endomorphism");
    }
    match sigma.profile().constant_length {
        Some(l) if l >= 2 => Ok(l),
        Some(l) => domain(format!("constant length {l} is too small")),
        None => domain("substitution is not of constant length"),
    }
}

fn require_primitive(sigma: &Morphism) -> Result<()> {
    if sigma.is_primitive() {
        Ok(())
    } else {
        Err(Error::Primitivity)
    }
}

pub fn height(sigma: &Morphism, seed: &SeedPair) -> Result<HeightData> {
    let l = constant_length(sigma)?;
    require_primitive(sigma)?;
    let a = seed.right;
    if a >= sigma.domain().len() || sigma.image(a).first() != Some(a) {
        return domain("seed letter is not right-prolongable");
    }
    let d = sigma.domain().len();
    for n in (1..=d).rev() {
        if gcd_u64(n as u64, l as u64) != 1 {
            continue;
        }
        if let Some(classes) = residue_partition(sigma, a, n, l) {
            return Ok(HeightData { h: n, classes });
        }
    }
    Err(Error::Invariant("no height found, not even 1".into()))
}

/// Letters at positions `≡ i mod n`, when every letter sits in one class.
fn residue_partition(sigma: &Morphism, a: Letter, n: usize, l: usize) -> Option<Vec<BTreeSet<Letter>>> {
    let d = sigma.domain().len();
    let mut residue: Vec<Option<usize>> = vec![None; d];
    residue[a] = Some(0);
    let mut queue = VecDeque::from([(a, 0usize)]);
    while let Some((c, i)) = queue.pop_front() {
        for (r, &b) in sigma.image(c).iter().enumerate() {
            let j = (i * l + r) % n;
            match residue[b] {
                None => {
                    residue[b] = Some(j);
                    queue.push_back((b, j));
                }
                Some(k) if k != j => return None,
                Some(_) => {}
            }
        }
    }
    let mut classes = vec![BTreeSet::new(); n];
    for (b, r) in residue.iter().enumerate() {
        classes[(*r)?].insert(b);
    }
    classes.iter().all(|c| !c.is_empty()).then_some(classes)
}

/// Digit-labelled graph on letter sets. The successor of `C` under digit
/// `i` is `{σ(b)_i : b ∈ C}`; the roots are the height classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodGraph {
    length: usize,
    height: usize,
    alphabet_size: usize,
    vertices: Vec<BTreeSet<Letter>>,
    succ: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

pub fn build_graph(sigma: &Morphism, hd: &HeightData) -> Result<PeriodGraph> {
    let l = constant_length(sigma)?;
    require_primitive(sigma)?;
    let mut index: HashMap<BTreeSet<Letter>, usize> = HashMap::new();
    let mut vertices: Vec<BTreeSet<Letter>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut roots = Vec::with_capacity(hd.h);
    for class in &hd.classes {
        let id = *index.entry(class.clone()).or_insert_with(|| {
            vertices.push(class.clone());
            queue.push_back(vertices.len() - 1);
            vertices.len() - 1
        });
        roots.push(id);
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    while let Some(v) = queue.pop_front() {
        let mut out = Vec::with_capacity(l);
        for i in 0..l {
            let next: BTreeSet<Letter> = vertices[v].iter().map(|&b| sigma.image(b)[i]).collect();
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    vertices.push(next.clone());
                    succ.push(Vec::new());
                    index.insert(next, vertices.len() - 1);
                    queue.push_back(vertices.len() - 1);
                    vertices.len() - 1
                }
            };
            out.push(id);
        }
        succ[v] = out;
    }
    Ok(PeriodGraph {
        length: l,
        height: hd.h,
        alphabet_size: sigma.domain().len(),
        vertices,
        succ,
        roots,
    })
}

/// A substitution prepared for graph queries. When `σ` itself has no
/// one-sided seed, the smallest power `σ^power` that has one is used.
#[derive(Clone, Debug)]
pub struct GraphContext {
    pub power: usize,
    pub sigma: Morphism,
    pub seed: SeedPair,
    pub height: HeightData,
    pub graph: PeriodGraph,
}

impl GraphContext {
    pub fn new(sigma: &Morphism, seed: Option<SeedPair>) -> Result<Self> {
        constant_length(sigma)?;
        require_primitive(sigma)?;
        let (power, sigma, seed) = match seed {
            Some(seed) => (1, sigma.clone(), seed),
            None => sigma.seeded_power()?,
        };
        let height = height(&sigma, &seed)?;
        let graph = build_graph(&sigma, &height)?;
        Ok(GraphContext {
            power,
            sigma,
            seed,
            height,
            graph,
        })
    }
}

/// Answer for a common difference `p` on a coded automatic sequence.
/// `witnesses` lists residues modulo `reduced` carrying a single letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphCheck {
    pub requested: u64,
    pub reduced: u64,
    pub level: u32,
    pub witnesses: Vec<(u64, Letter)>,
}

impl GraphCheck {
    /// Witness residues modulo the requested difference.
    pub fn expanded(&self) -> Vec<(u64, Letter)> {
        (0..self.requested)
            .filter_map(|k| {
                self.witnesses
                    .iter()
                    .find(|(r, _)| k % self.reduced == *r)
                    .map(|&(_, b)| (k, b))
            })
            .collect()
    }
}

impl GraphContext {
    /// Divisors of `h·l^n`.
    pub fn spectrum(&self) -> Result<SpectrumDescriptor> {
        dekking_spectrum(self.graph.length as u64, self.height.h as u64)
    }

    /// Constant subsequences of `φ(x)` with common difference `p`, read off
    /// the graph at the first level whose difference `h·l^M` is a multiple of
    /// the reduced difference.
    pub fn check_difference(&self, phi: &Morphism, p: u64) -> Result<GraphCheck> {
        let reduced = self.spectrum()?.reduce(p)?;
        let mut level = 0;
        while self.graph.difference(level)? % reduced != 0 {
            level += 1;
        }
        let witnesses = self.graph.constant_difference_witnesses(phi, reduced, level)?;
        Ok(GraphCheck {
            requested: p,
            reduced,
            level,
            witnesses,
        })
    }
}

/// One essential period found by the level enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssentialPeriod {
    pub period: u64,
    pub residue: u64,
    pub letter: Letter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelReport {
    pub level: u32,
    pub difference: u64,
    pub singleton_count: u64,
    pub new_essential_periods: Vec<EssentialPeriod>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutoClassification {
    /// No arithmetic subsequence of the coded fixed point is constant.
    NoConstantAP,
    /// Every residue modulo `difference = h·l^level` is constant.
    Periodic {
        level: u32,
        difference: u64,
        minimal_period: u64,
    },
    /// `cycle` runs through vertices with at least two letters and
    /// `path_to_singleton` leads from `cycle[0]` to a singleton vertex.
    UnboundedEssentialPeriods {
        cycle: Vec<usize>,
        path_to_singleton: Vec<usize>,
    },
    /// Constant subsequences exist; per-level counts are attached.
    HasConstantAP {
        levels: Vec<LevelReport>,
        truncated: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub max_level: u32,
    pub budget: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            max_level: DEFAULT_MAX_LEVEL,
            budget: DEFAULT_RESIDUE_BUDGET,
        }
    }
}

impl PeriodGraph {
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[BTreeSet<Letter>] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &BTreeSet<Letter> {
        &self.vertices[v]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn successor(&self, v: usize, digit: usize) -> usize {
        self.succ[v][digit]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn find_vertex(&self, letters: &BTreeSet<Letter>) -> Option<usize> {
        self.vertices.iter().position(|v| v == letters)
    }

    /// `h·l^m`, or a domain error on overflow.
    pub fn difference(&self, m: u32) -> Result<u64> {
        (self.length as u64)
            .checked_pow(m)
            .and_then(|p| p.checked_mul(self.height as u64))
            .ok_or_else(|| Error::Domain(format!("h·l^{m} overflows")))
    }

    fn check_coding(&self, phi: &Morphism) -> Result<()> {
        if phi.domain().len() != self.alphabet_size {
            return domain("coding alphabet differs from the substitution alphabet");
        }
        if !phi.is_coding() {
            return Err(Error::NotCoding(phi.to_string()));
        }
        Ok(())
    }

    fn images(&self, phi: &Morphism) -> Vec<BTreeSet<Letter>> {
        self.vertices
            .iter()
            .map(|v| v.iter().map(|&b| phi.code(b)).collect())
            .collect()
    }

    /// Vertex reached for residue `k` modulo `h·l^m`.
    pub fn vertex_at(&self, k: u64, m: u32) -> Result<usize> {
        let n = self.difference(m)?;
        if k >= n {
            return domain(format!("residue {k} is not below h·l^{m} = {n}"));
        }
        let l = self.length as u64;
        let scale = n / self.height as u64;
        let mut v = self.roots[(k / scale) as usize];
        let mut rest = k % scale;
        let mut place = scale;
        for _ in 0..m {
            place /= l;
            v = self.succ[v][(rest / place) as usize];
            rest %= place;
        }
        Ok(v)
    }

    /// Letters of `φ(y)` at positions `≡ k mod h·l^m`.
    pub fn alphabet_at(&self, phi: &Morphism, k: u64, m: u32) -> Result<BTreeSet<Letter>> {
        self.check_coding(phi)?;
        let v = self.vertex_at(k, m)?;
        Ok(self.vertices[v].iter().map(|&b| phi.code(b)).collect())
    }

    /// Vertex of every residue modulo `h·l^m`, in residue order.
    pub fn level_vertices(&self, m: u32) -> Result<Vec<usize>> {
        self.difference(m)?;
        let mut level = self.roots.clone();
        for _ in 0..m {
            level = self.refine(&level);
        }
        Ok(level)
    }

    fn refine(&self, level: &[usize]) -> Vec<usize> {
        level
            .iter()
            .flat_map(|&v| self.succ[v].iter().copied())
            .collect()
    }

    /// Residues `r mod q` whose positions all carry the same letter `b`,
    /// where `q` divides `h·l^M`.
    pub fn constant_difference_witnesses(
        &self,
        phi: &Morphism,
        q: u64,
        big_m: u32,
    ) -> Result<Vec<(u64, Letter)>> {
        self.check_coding(phi)?;
        let n = self.difference(big_m)?;
        if q == 0 || n % q != 0 {
            return domain(format!("{q} does not divide h·l^{big_m} = {n}"));
        }
        let images = self.images(phi);
        let level = self.level_vertices(big_m)?;
        Ok(constant_classes(&level, &images, q)
            .into_iter()
            .enumerate()
            .filter_map(|(r, b)| b.map(|b| (r as u64, b)))
            .collect())
    }

    /// Smallest vertex size.
    pub fn branching_number(&self) -> usize {
        self.vertices.iter().map(BTreeSet::len).min().unwrap_or(0)
    }

    pub fn classify(&self, phi: &Morphism) -> Result<AutoClassification> {
        self.classify_with(phi, &ClassifyOptions::default())
    }

    pub fn classify_with(&self, phi: &Morphism, options: &ClassifyOptions) -> Result<AutoClassification> {
        self.check_coding(phi)?;
        let images = self.images(phi);
        let singleton: Vec<bool> = images.iter().map(|s| s.len() == 1).collect();
        if !singleton.iter().any(|&s| s) {
            return Ok(AutoClassification::NoConstantAP);
        }
        if let Some(level) = self.all_singleton_level(&singleton)? {
            let difference = self.difference(level)?;
            let vertices = self.level_vertices(level)?;
            let minimal_period = divisors(difference)
                .into_iter()
                .find(|&q| constant_classes(&vertices, &images, q).iter().all(Option::is_some))
                .unwrap_or(difference);
            return Ok(AutoClassification::Periodic {
                level,
                difference,
                minimal_period,
            });
        }
        let injective = self
            .vertices
            .iter()
            .zip(&images)
            .all(|(v, img)| v.len() == img.len());
        if injective {
            let (cycle, path_to_singleton) = self.unbounded_certificate().ok_or_else(|| {
                Error::Invariant("no cycle of non-singleton vertices leads to a singleton".into())
            })?;
            return Ok(AutoClassification::UnboundedEssentialPeriods {
                cycle,
                path_to_singleton,
            });
        }
        match self.level_reports_with(phi, options.max_level, options.budget) {
            Ok(levels) => Ok(AutoClassification::HasConstantAP {
                levels,
                truncated: false,
            }),
            Err(Error::Budget { partial, .. }) => Ok(AutoClassification::HasConstantAP {
                levels: partial,
                truncated: true,
            }),
            Err(e) => Err(e),
        }
    }

    /// Whether the coded fixed point is periodic for the identity coding,
    /// i.e. some level has only singleton vertices.
    pub fn is_eventually_singleton(&self) -> Result<bool> {
        let singleton: Vec<bool> = self.vertices.iter().map(|v| v.len() == 1).collect();
        Ok(self.all_singleton_level(&singleton)?.is_some())
    }

    /// First `m` such that every walk of length `m` from a root ends in a
    /// vertex flagged in `good`.
    fn all_singleton_level(&self, good: &[bool]) -> Result<Option<u32>> {
        let mut current: BTreeSet<usize> = self.roots.iter().copied().collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for m in 0..STEP_SET_LIMIT {
            if current.iter().all(|&v| good[v]) {
                return Ok(Some(m as u32));
            }
            if !seen.insert(current.iter().copied().collect()) {
                return Ok(None);
            }
            current = current
                .iter()
                .flat_map(|&v| self.succ[v].iter().copied())
                .collect();
        }
        Err(Error::Invariant(format!(
            "step sets did not repeat within {STEP_SET_LIMIT} steps"
        )))
    }

    fn shortest_path(&self, from: usize, allowed: impl Fn(usize) -> bool, target: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.vertices.len()];
        let mut visited = vec![false; self.vertices.len()];
        let mut queue = VecDeque::new();
        for &w in &self.succ[from] {
            if !visited[w] && (allowed(w) || target(w)) {
                visited[w] = true;
                parent[w] = Some(from);
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            if target(v) {
                let mut path = vec![v];
                let mut cur = v;
                while let Some(p) = parent[cur] {
                    path.push(p);
                    if p == from && path.len() > 1 {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            if !allowed(v) {
                continue;
            }
            for &w in &self.succ[v] {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn unbounded_certificate(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let big = |v: usize| self.vertices[v].len() >= 2;
        for c in (0..self.vertices.len()).filter(|&v| big(v)) {
            let Some(mut cycle) = self.shortest_path(c, big, |w| w == c) else {
                continue;
            };
            let Some(path) = self.shortest_path(c, |_| true, |w| !big(w)) else {
                continue;
            };
            cycle.pop();
            return Some((cycle, path));
        }
        None
    }

    pub fn level_reports(&self, phi: &Morphism, max_level: u32) -> Result<Vec<LevelReport>> {
        self.level_reports_with(phi, max_level, DEFAULT_RESIDUE_BUDGET)
    }

    /// Counts `s_m` of constant residues modulo `h·l^m` for `m <= max_level`,
    /// with the residues that become constant at each level and the minimal
    /// period of their arithmetic subsequence.
    pub fn level_reports_with(
        &self,
        phi: &Morphism,
        max_level: u32,
        budget: u64,
    ) -> Result<Vec<LevelReport>> {
        self.check_coding(phi)?;
        let images = self.images(phi);
        let mut reports: Vec<LevelReport> = Vec::new();
        let mut previous: Vec<usize> = Vec::new();
        let mut level: Vec<usize> = Vec::new();
        for m in 0..=max_level {
            let n = match self.difference(m) {
                Ok(n) if n <= budget => n,
                _ => {
                    return Err(Error::Budget {
                        budget,
                        level: m,
                        partial: reports,
                    })
                }
            };
            level = if m == 0 {
                self.roots.clone()
            } else {
                self.refine(&level)
            };
            let parent_n = previous.len() as u64;
            let mut fresh: Vec<(u64, Letter)> = Vec::new();
            let mut count = 0u64;
            for (k, &v) in level.iter().enumerate() {
                if images[v].len() != 1 {
                    continue;
                }
                count += 1;
                let known = m > 0 && images[previous[(k as u64 % parent_n) as usize]].len() == 1;
                if !known {
                    fresh.push((k as u64, *images[v].first().expect("singleton")));
                }
            }
            let mut new_periods = Vec::with_capacity(fresh.len());
            if !fresh.is_empty() {
                let tables: Vec<(u64, Vec<Option<Letter>>)> = divisors(n)
                    .into_iter()
                    .map(|q| (q, constant_classes(&level, &images, q)))
                    .collect();
                for (k, b) in fresh {
                    let period = tables
                        .iter()
                        .find(|(q, table)| table[(k % q) as usize].is_some())
                        .map(|(q, _)| *q)
                        .unwrap_or(n);
                    new_periods.push(EssentialPeriod {
                        period,
                        residue: k,
                        letter: b,
                    });
                }
            }
            reports.push(LevelReport {
                level: m,
                difference: n,
                singleton_count: count,
                new_essential_periods: new_periods,
            });
            previous = level.clone();
        }
        Ok(reports)
    }

    /// DOT rendering. Node names are `"<letters>|<φ-image>"`; roots are drawn
    /// as double circles and vertices with a one-letter image get two
    /// peripheries.
    pub fn export_automaton(&self, sigma_alphabet: &crate::words::Alphabet, phi: &Morphism) -> Result<String> {
        self.check_coding(phi)?;
        let images = self.images(phi);
        let name = |v: usize| -> String {
            let letters: Vec<&str> = self.vertices[v].iter().map(|&b| sigma_alphabet.symbol(b)).collect();
            let image: Vec<&str> = images[v].iter().map(|&b| phi.codomain().symbol(b)).collect();
            format!("{}|{}", letters.join(","), image.join(","))
        };
        let mut out = String::from("digraph period_graph {\n");
        for (v, image) in images.iter().enumerate() {
            let mut attrs = Vec::new();
            if self.roots.contains(&v) {
                attrs.push("shape=doublecircle");
            }
            if image.len() == 1 {
                attrs.push("peripheries=2");
            }
            if attrs.is_empty() {
                let _ = writeln!(out, "  \"{}\";", name(v));
            } else {
                let _ = writeln!(out, "  \"{}\" [{}];", name(v), attrs.join(", "));
            }
        }
        for v in 0..self.vertices.len() {
            for (i, &w) in self.succ[v].iter().enumerate() {
                let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{i}\"];", name(v), name(w));
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

/// For each residue `r mod q`, the common letter of all positions `≡ r`, if any.
/// `level` lists the vertex of each residue modulo a multiple of `q`.
fn constant_classes(level: &[usize], images: &[BTreeSet<Letter>], q: u64) -> Vec<Option<Letter>> {
    let q = q as usize;
    let mut state: Vec<Option<Option<Letter>>> = vec![None; q];
    for (k, &v) in level.iter().enumerate() {
        let slot = &mut state[k % q];
        let img = &images[v];
        *slot = match *slot {
            Some(None) => Some(None),
            _ if img.len() != 1 => Some(None),
            None => Some(img.first().copied()),
            Some(Some(b)) if img.first() == Some(&b) => Some(Some(b)),
            Some(Some(_)) => Some(None),
        };
    }
    state.into_iter().map(Option::flatten).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::words::Word;

    fn set(v: &[Letter]) -> BTreeSet<Letter> {
        v.iter().copied().collect()
    }

    fn context(sigma: &Morphism) -> GraphContext {
        GraphContext::new(sigma, None).unwrap()
    }

    #[test]
    fn heights() {
        let s = corpus::length_three_height_two();
        let hd = height(&s, &SeedPair::one_sided(0)).unwrap();
        assert_eq!(hd.h, 2);
        assert_eq!(hd.classes, vec![set(&[0, 3]), set(&[1, 2])]);

        let s = corpus::length_two_height_three();
        let hd = height(&s, &SeedPair::one_sided(0)).unwrap();
        assert_eq!(hd.h, 3);
        assert_eq!(hd.classes, vec![set(&[0]), set(&[1]), set(&[2, 3])]);

        let s = corpus::toeplitz();
        let hd = height(&s, &SeedPair::one_sided(1)).unwrap();
        assert_eq!(hd.h, 1);

        let s = corpus::height_three_length_four();
        assert_eq!(height(&s, &SeedPair::one_sided(0)).unwrap().h, 3);
    }

    #[test]
    fn two_vertex_graph() {
        let ctx = context(&corpus::length_three_height_two());
        let g = &ctx.graph;
        assert_eq!(g.vertex_count(), 2);
        let a = g.find_vertex(&set(&[0, 3])).unwrap();
        let b = g.find_vertex(&set(&[1, 2])).unwrap();
        assert_eq!(g.successors(a), &[a, b, a]);
        assert_eq!(g.successors(b), &[b, a, b]);
        assert_eq!(g.branching_number(), 2);
        let id = Morphism::identity(ctx.sigma.domain());
        assert_eq!(g.classify(&id).unwrap(), AutoClassification::NoConstantAP);
    }

    #[test]
    fn six_vertex_graph() {
        let ctx = context(&corpus::length_five_height_two());
        let g = &ctx.graph;
        assert_eq!(g.vertex_count(), 6);
        let mut got: Vec<BTreeSet<Letter>> = g.vertices().to_vec();
        got.sort();
        let mut want = vec![set(&[0, 2]), set(&[1, 3]), set(&[0]), set(&[1]), set(&[2]), set(&[3])];
        want.sort();
        assert_eq!(got, want);
        let id = Morphism::identity(ctx.sigma.domain());
        assert_eq!(g.alphabet_at(&id, 1, 1).unwrap(), set(&[1]));
        assert_eq!(g.constant_difference_witnesses(&id, 10, 1).unwrap(), vec![(1, 1)]);
        assert!(g.constant_difference_witnesses(&id, 5, 1).unwrap().is_empty());
        assert!(g.constant_difference_witnesses(&id, 2, 1).unwrap().is_empty());
        assert!(g.constant_difference_witnesses(&id, 3, 1).is_err());
        assert_eq!(g.branching_number(), 1);
        let reports = g.level_reports(&id, 1).unwrap();
        assert_eq!(reports[0].singleton_count, 0);
        assert_eq!(reports[1].singleton_count, 1);
        assert_eq!(
            reports[1].new_essential_periods,
            vec![EssentialPeriod { period: 10, residue: 1, letter: 1 }]
        );
    }

    #[test]
    fn coded_two_vertex_graph() {
        let ctx = context(&corpus::length_three_height_two());
        let phi = corpus::four_to_three_coding();
        let g = &ctx.graph;
        let a = phi.codomain().index_of("a").unwrap();
        assert_eq!(g.alphabet_at(&phi, 0, 0).unwrap(), set(&[a]));
        assert_eq!(g.constant_difference_witnesses(&phi, 2, 0).unwrap(), vec![(0, a)]);
        match g.classify(&phi).unwrap() {
            AutoClassification::HasConstantAP { levels, truncated } => {
                assert!(!truncated);
                assert_eq!(levels[0].singleton_count, 1);
                for w in levels.windows(2) {
                    assert_eq!(w[1].singleton_count, 3 * w[0].singleton_count);
                    assert!(w[1].new_essential_periods.is_empty());
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        let dot = g.export_automaton(ctx.sigma.domain(), &phi).unwrap();
        assert!(dot.contains("\"0,3|a\" [shape=doublecircle, peripheries=2];"));
        assert!(dot.contains("\"1,2|b,c\" [shape=doublecircle];"));
        assert_eq!(dot.matches("label=").count(), 6);
    }

    #[test]
    fn difference_checks() {
        let ctx = context(&corpus::length_three_height_two());
        let phi = corpus::four_to_three_coding();
        let check = ctx.check_difference(&phi, 6).unwrap();
        assert_eq!((check.reduced, check.level), (6, 1));
        assert_eq!(check.witnesses, vec![(0, 0), (2, 0), (4, 0)]);
        let check = ctx.check_difference(&phi, 4).unwrap();
        assert_eq!((check.reduced, check.level), (2, 0));
        assert_eq!(check.expanded(), vec![(0, 0), (2, 0)]);
        let ctx = context(&corpus::length_five_height_two());
        let id = Morphism::identity(ctx.sigma.domain());
        let check = ctx.check_difference(&id, 30).unwrap();
        assert_eq!((check.reduced, check.level), (10, 1));
        assert_eq!(check.witnesses, vec![(1, 1)]);
    }

    #[test]
    fn unbounded_periods() {
        let ctx = context(&corpus::length_two_height_three());
        let g = &ctx.graph;
        assert_eq!(g.vertex_count(), 5);
        let id = Morphism::identity(ctx.sigma.domain());
        match g.classify(&id).unwrap() {
            AutoClassification::UnboundedEssentialPeriods { cycle, path_to_singleton } => {
                assert!(cycle.iter().all(|&v| g.vertex(v).len() >= 2));
                assert_eq!(path_to_singleton[0], cycle[0]);
                assert_eq!(g.vertex(*path_to_singleton.last().unwrap()).len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        let reports = g.level_reports(&id, 5).unwrap();
        assert_eq!(reports[0].singleton_count, 2);
        assert_eq!(reports[1].singleton_count, 5);
        assert_eq!(
            reports[1].new_essential_periods,
            vec![EssentialPeriod { period: 6, residue: 2, letter: 2 }]
        );
        let periods: BTreeSet<u64> = reports
            .iter()
            .flat_map(|r| r.new_essential_periods.iter().map(|e| e.period))
            .collect();
        assert_eq!(periods, [3, 6, 12, 24, 48, 96].into_iter().collect());
    }

    #[test]
    fn toeplitz_and_periodic() {
        let ctx = context(&corpus::toeplitz());
        let id = Morphism::identity(ctx.sigma.domain());
        assert!(matches!(
            ctx.graph.classify(&id).unwrap(),
            AutoClassification::UnboundedEssentialPeriods { .. }
        ));
        let ctx = context(&corpus::alternating());
        let id = Morphism::identity(ctx.sigma.domain());
        assert_eq!(
            ctx.graph.classify(&id).unwrap(),
            AutoClassification::Periodic { level: 1, difference: 2, minimal_period: 2 }
        );
        assert_eq!(ctx.graph.branching_number(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let ctx = context(&corpus::length_two_height_three());
        let id = Morphism::identity(ctx.sigma.domain());
        match ctx.graph.level_reports_with(&id, 10, 100) {
            Err(Error::Budget { level, partial, .. }) => {
                assert_eq!(level, 6);
                assert_eq!(partial.len(), 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn alphabets_match_prefix_scan() {
        for sigma in corpus::constant_length() {
            let ctx = context(&sigma);
            let id = Morphism::identity(ctx.sigma.domain());
            for m in 0..3 {
                let n = ctx.graph.difference(m).unwrap();
                let prefix: Word = ctx.sigma.fixed_point_prefix(&ctx.seed, (50 * n) as usize).unwrap();
                for k in 0..n {
                    let seen: BTreeSet<Letter> =
                        prefix.iter().skip(k as usize).step_by(n as usize).copied().collect();
                    assert_eq!(ctx.graph.alphabet_at(&id, k, m).unwrap(), seen, "{sigma} k={k} m={m}");
                }
            }
        }
    }
}
