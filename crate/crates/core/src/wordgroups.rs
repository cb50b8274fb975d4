//! Words, presentations and homomorphisms of finitely generated matrix groups.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::cartan::{GroupDesc, GroupElement};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::par;

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

impl Ord for Letter {
    /// `a < a⁻¹ < b < b⁻¹ < …`
    fn cmp(&self, other: &Self) -> Ordering {
        (self.gen, self.inverse).cmp(&(other.gen, other.inverse))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Rejects words containing a cancelling pair.
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if let Some(i) = letters.windows(2).position(|w| w[0] == w[1].inv()) {
            return Err(Error::invalid(format!("word is not reduced at position {i}")));
        }
        Ok(Word(letters))
    }

    /// Freely reduces `letters`.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn gen(i: usize) -> Self {
        Word(vec![Letter::new(i, false)])
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

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Reduced concatenation.
    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(&other.0).copied())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        Word::reduce((0..k.unsigned_abs()).flat_map(|_| base.0.iter().copied()))
    }

    /// Largest generator index used, if any.
    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    /// Shorter first, then lexicographic on letters.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// Parses `a*b^-1*c^3`; `1` or the empty string is the identity. The
    /// expansion of powers must already be reduced.
    pub fn parse(s: &str, symbols: &[String]) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (sym, exp) = match tok.split_once('^') {
                Some((a, e)) => {
                    let e: i64 = e.parse().map_err(|_| Error::invalid(format!("bad exponent in {tok:?}")))?;
                    (a, e)
                }
                None => (tok, 1),
            };
            let gen = symbols
                .iter()
                .position(|x| x == sym)
                .ok_or_else(|| Error::invalid(format!("unknown generator {sym:?}")))?;
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter::new(gen, exp < 0));
            }
        }
        Word::new(letters)
    }

    /// Inverse of [`Word::parse`], with runs collapsed into powers.
    pub fn format(&self, symbols: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let k = (j - i) as i64 * if l.inverse { -1 } else { 1 };
            let sym = symbols.get(l.gen).cloned().unwrap_or_else(|| format!("g{}", l.gen));
            parts.push(if k == 1 { sym } else { format!("{sym}^{k}") });
            i = j;
        }
        parts.join("*")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syms: Vec<String> = (0..=self.max_gen().unwrap_or(0)).map(|i| format!("g{i}")).collect();
        write!(f, "{}", self.format(&syms))
    }
}

/// How the generators of a presentation are organised.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    Free,
    /// `Γ₁ ∗_{Γ₀} Γ₂`; each `common` pair `(w₁, w₂)` identifies a side-1 word with a side-2 word.
    Amalgam { side1: Vec<usize>, side2: Vec<usize>, common: Vec<(Word, Word)> },
    /// HNN extension of the base by the stable letter `ν`, with `ν·j₁ ν⁻¹ = j₂` for every pair.
    Hnn { base: Vec<usize>, stable: usize, pairings: Vec<(Word, Word)> },
}

impl Structure {
    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Free => "free",
            Structure::Amalgam { .. } => "amalgam",
            Structure::Hnn { .. } => "hnn",
        }
    }
}

/// Generators, their matrices, and the relations they are asserted to satisfy.
#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    symbols: Vec<String>,
    generators: Vec<GroupElement>,
    structure: Structure,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(
        symbols: Vec<String>,
        generators: Vec<GroupElement>,
        structure: Structure,
        relators: Vec<Word>,
    ) -> Result<Self> {
        let n = symbols.len();
        if generators.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: generators.len() });
        }
        if n == 0 {
            return Err(Error::invalid("a presentation needs at least one generator"));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s == "1" || s.contains(['*', '^', ' ']) {
                return Err(Error::invalid(format!("bad generator symbol {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::invalid(format!("duplicate generator symbol {s:?}")));
            }
        }
        let group = generators[0].group().clone();
        if generators.iter().any(|g| g.group() != &group) {
            return Err(Error::invalid("generators lie in different groups"));
        }
        let in_range = |w: &Word| w.max_gen().is_none_or(|m| m < n);
        if !relators.iter().all(in_range) {
            return Err(Error::invalid("relator uses an unknown generator"));
        }
        let uses_only = |w: &Word, set: &[usize]| w.letters().iter().all(|l| set.contains(&l.gen));
        match &structure {
            Structure::Free => {}
            Structure::Amalgam { side1, side2, common } => {
                let mut all: Vec<usize> = side1.iter().chain(side2).copied().collect();
                all.sort_unstable();
                if all != (0..n).collect::<Vec<_>>() {
                    return Err(Error::invalid("amalgam sides must partition the generators"));
                }
                if !common.iter().all(|(a, b)| uses_only(a, side1) && uses_only(b, side2)) {
                    return Err(Error::invalid("common-subgroup words must use side-1 then side-2 letters"));
                }
            }
            Structure::Hnn { base, stable, pairings } => {
                let mut all: Vec<usize> = base.iter().copied().chain([*stable]).collect();
                all.sort_unstable();
                if all != (0..n).collect::<Vec<_>>() {
                    return Err(Error::invalid("HNN base and stable letter must partition the generators"));
                }
                if !pairings.iter().all(|(a, b)| uses_only(a, base) && uses_only(b, base)) {
                    return Err(Error::invalid("HNN pairing words must use base letters only"));
                }
            }
        }
        let p = Presentation { symbols, generators, structure, relators };
        // structural relations must already hold for the given matrices
        if let Structure::Hnn { .. } | Structure::Amalgam { .. } = p.structure {
            let rep = check_relators(&p, &p.inclusion())?;
            if !rep.pass {
                let bad = rep.rows.iter().find(|r| !r.holds).map(|r| r.label.clone()).unwrap_or_default();
                return Err(Error::precondition(format!("generator matrices violate {bad}")));
            }
        }
        Ok(p)
    }

    /// A free presentation with generators named `symbols`.
    pub fn free(symbols: &[&str], generators: Vec<GroupElement>) -> Result<Self> {
        Self::new(symbols.iter().map(|s| s.to_string()).collect(), generators, Structure::Free, Vec::new())
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.symbols.len()
    }

    pub fn group(&self) -> &GroupDesc {
        self.generators[0].group()
    }

    pub fn symbol_index(&self, s: &str) -> Option<usize> {
        self.symbols.iter().position(|x| x == s)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Word::parse(s, &self.symbols)
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.format(&self.symbols)
    }

    /// The homomorphism sending each generator to its own matrix.
    pub fn inclusion(&self) -> Homomorphism {
        Homomorphism {
            group: self.group().clone(),
            images: self.generators.iter().map(|g| g.matrix().clone()).collect(),
            inverses: self.generators.iter().map(|g| g.matrix().inverse().expect("group element")).collect(),
        }
    }

    /// Every word that must evaluate to the identity, with a label.
    pub fn relations(&self) -> Vec<(String, Word)> {
        let mut out: Vec<(String, Word)> = self
            .relators
            .iter()
            .map(|w| (format!("relator {}", self.format_word(w)), w.clone()))
            .collect();
        match &self.structure {
            Structure::Free => {}
            Structure::Amalgam { common, .. } => {
                for (a, b) in common {
                    let label = format!("common {} = {}", self.format_word(a), self.format_word(b));
                    out.push((label, a.concat(&b.inverse())));
                }
            }
            Structure::Hnn { stable, pairings, .. } => {
                let nu = Word::gen(*stable);
                for (a, b) in pairings {
                    let label = format!(
                        "pairing {}·{}·{}⁻¹ = {}",
                        self.symbols[*stable],
                        self.format_word(a),
                        self.symbols[*stable],
                        self.format_word(b)
                    );
                    out.push((label, nu.concat(a).concat(&nu.inverse()).concat(&b.inverse())));
                }
            }
        }
        out
    }
}

/// An assignment of matrices to generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Homomorphism {
    group: GroupDesc,
    images: Vec<Matrix>,
    inverses: Vec<Matrix>,
}

impl Homomorphism {
    pub fn new(group: GroupDesc, images: Vec<Matrix>) -> Result<Self> {
        let n = group.size();
        if let Some(m) = images.iter().find(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
        }
        let inverses = images.iter().map(Matrix::inverse).collect::<Result<Vec<_>>>()?;
        Ok(Homomorphism { group, images, inverses })
    }

    pub fn group(&self) -> &GroupDesc {
        &self.group
    }

    pub fn images(&self) -> &[Matrix] {
        &self.images
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn letter(&self, l: Letter) -> &Matrix {
        if l.inverse {
            &self.inverses[l.gen]
        } else {
            &self.images[l.gen]
        }
    }

    pub fn is_exact(&self) -> bool {
        self.images.iter().all(Matrix::is_exact)
    }

    /// `g ↦ c·φ(g)·c⁻¹`.
    pub fn conjugate(&self, c: &Matrix) -> Result<Homomorphism> {
        let ci = c.inverse()?;
        let images = self.images.iter().map(|m| c.mul(m)?.mul(&ci)).collect::<Result<Vec<_>>>()?;
        Homomorphism::new(self.group.clone(), images)
    }

    /// The same images with floating entries.
    pub fn to_floating(&self) -> Result<Homomorphism> {
        let conv = |m: &Matrix| -> Result<Matrix> {
            Ok(if m.is_complex() { Matrix::Complex(m.to_complex()) } else { Matrix::Real(m.to_real()?) })
        };
        Ok(Homomorphism {
            group: self.group.clone(),
            images: self.images.iter().map(conv).collect::<Result<_>>()?,
            inverses: self.inverses.iter().map(conv).collect::<Result<_>>()?,
        })
    }
}

/// Product of generator images along `w`; exact when the images are.
pub fn evaluate(w: &Word, phi: &Homomorphism) -> Result<GroupElement> {
    if let Some(m) = w.max_gen().filter(|&m| m >= phi.rank()) {
        return Err(Error::invalid(format!("generator index {m} out of range")));
    }
    let mut acc = Matrix::identity(phi.group.size());
    for &l in w.letters() {
        acc = acc.mul(phi.letter(l))?;
    }
    Ok(GroupElement::new_unchecked(acc, phi.group.clone()))
}

/// Outcome for one relation word.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelatorRow {
    pub label: String,
    pub exact: bool,
    pub holds: bool,
    /// Sup-norm distance of the image from the identity (0 when exact and holding).
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelatorReport {
    pub pass: bool,
    pub max_deviation: f64,
    pub rows: Vec<RelatorRow>,
}

/// Floating tolerance for relator checks.
pub const RELATOR_TOL: f64 = 1e-9;

/// Evaluates relators, amalgam identifications and HNN pairings under `phi`.
pub fn check_relators(p: &Presentation, phi: &Homomorphism) -> Result<RelatorReport> {
    check_relators_tol(p, phi, RELATOR_TOL)
}

pub fn check_relators_tol(p: &Presentation, phi: &Homomorphism, tol: f64) -> Result<RelatorReport> {
    if phi.rank() != p.rank() {
        return Err(Error::DimensionMismatch { expected: p.rank(), got: phi.rank() });
    }
    let mut rows = Vec::new();
    for (label, w) in p.relations() {
        let m = evaluate(&w, phi)?.into_matrix();
        let id = Matrix::identity(m.nrows());
        let (exact, holds, deviation) = match m.exact_eq(&id) {
            Some(b) => (true, b, if b { 0.0 } else { m.sup_dist(&id) }),
            None => {
                let d = m.sup_dist(&id);
                (false, d <= tol, d)
            }
        };
        rows.push(RelatorRow { label, exact, holds, deviation });
    }
    Ok(RelatorReport {
        pass: rows.iter().all(|r| r.holds),
        max_deviation: rows.iter().map(|r| r.deviation).fold(0.0, f64::max),
        rows,
    })
}

/// One distinct matrix of a word ball with its shortest representative.
#[derive(Clone, Debug, PartialEq)]
pub struct BallEntry {
    pub word: Word,
    pub matrix: Matrix,
    /// Index of the entry whose word is `word` minus its last letter.
    pub parent: Option<usize>,
}

impl BallEntry {
    pub fn last(&self) -> Option<Letter> {
        self.word.letters().last().copied()
    }
}

/// A floating-mode identification of two words, logged for audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Merge {
    pub kept: usize,
    pub word: String,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub radius: usize,
    pub entries: Vec<BallEntry>,
    /// Number of new matrices at each word length `0..=radius`.
    pub sphere_sizes: Vec<usize>,
    pub exact: bool,
    /// `true` when the element budget stopped the expansion early.
    pub truncated: bool,
    pub merges: Vec<Merge>,
    /// Distinct matrices that shared a hash bucket (exact mode).
    pub hash_collisions: usize,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Images of every entry under another homomorphism of the same
    /// presentation, built along the parent links.
    pub fn images_under(&self, phi: &Homomorphism) -> Result<Vec<Matrix>> {
        let mut out: Vec<Matrix> = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let m = match (e.parent, e.last()) {
                (Some(p), Some(l)) => out[p].mul(phi.letter(l))?,
                _ => Matrix::identity(phi.group().size()),
            };
            out.push(m);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallOptions {
    pub max_elements: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions { max_elements: 500_000 }
    }
}

/// Relative sup-norm tolerance for identifying floating matrices.
pub const FLOAT_DEDUP_TOL: f64 = 1e-8;

pub fn word_ball(p: &Presentation, phi: &Homomorphism, radius: usize) -> Result<Ball> {
    word_ball_with(p, phi, radius, &BallOptions::default())
}

/// Breadth-first enumeration of reduced words of length `≤ radius`, keeping
/// one shortlex-least word per distinct matrix.
///
/// Only newly found matrices are expanded, so the cost is proportional to
/// the number of distinct elements rather than words.
pub fn word_ball_with(p: &Presentation, phi: &Homomorphism, radius: usize, opts: &BallOptions) -> Result<Ball> {
    if phi.rank() != p.rank() {
        return Err(Error::DimensionMismatch { expected: p.rank(), got: phi.rank() });
    }
    let exact = phi.is_exact();
    let letters: Vec<Letter> =
        (0..p.rank()).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)]).collect();
    let mut store = Store::new(exact);
    let mut ball = Ball {
        radius,
        entries: Vec::new(),
        sphere_sizes: Vec::new(),
        exact,
        truncated: false,
        merges: Vec::new(),
        hash_collisions: 0,
    };
    let id = Matrix::identity(phi.group().size());
    store.insert(&id, 0);
    ball.entries.push(BallEntry { word: Word::identity(), matrix: id, parent: None });
    ball.sphere_sizes.push(1);
    let mut frontier: Vec<usize> = vec![0];
    for _ in 1..=radius {
        let jobs: Vec<(usize, Letter)> = frontier
            .iter()
            .flat_map(|&i| {
                let last = ball.entries[i].last();
                letters.iter().filter(move |l| last != Some(l.inv())).map(move |&l| (i, l))
            })
            .collect();
        let entries = &ball.entries;
        let products = par::map(&jobs, |&(i, l)| entries[i].matrix.mul(phi.letter(l)));
        let mut next = Vec::new();
        for ((i, l), m) in jobs.into_iter().zip(products) {
            let m = m?;
            let word = Word(ball.entries[i].word.letters().iter().copied().chain([l]).collect());
            match store.find(&m, &ball.entries) {
                Lookup::Found { index, deviation, collided } => {
                    ball.hash_collisions += collided;
                    if !exact {
                        ball.merges.push(Merge { kept: index, word: p.format_word(&word), deviation });
                    }
                }
                Lookup::Missing { collided } => {
                    ball.hash_collisions += collided;
                    if ball.entries.len() >= opts.max_elements {
                        ball.truncated = true;
                        break;
                    }
                    let idx = ball.entries.len();
                    store.insert(&m, idx);
                    ball.entries.push(BallEntry { word, matrix: m, parent: Some(i) });
                    next.push(idx);
                }
            }
        }
        ball.sphere_sizes.push(next.len());
        frontier = next;
        if ball.truncated || frontier.is_empty() {
            break;
        }
    }
    Ok(ball)
}

enum Lookup {
    Found { index: usize, deviation: f64, collided: usize },
    Missing { collided: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

enum Store {
    Exact(HashMap<u64, Vec<usize>>),
    /// Keyed by a fixed linear functional of the entries, so near-equal
    /// matrices sit in a short key range.
    Float(BTreeMap<Key, Vec<usize>>),
}

impl Store {
    fn new(exact: bool) -> Self {
        if exact {
            Store::Exact(HashMap::new())
        } else {
            Store::Float(BTreeMap::new())
        }
    }

    fn insert(&mut self, m: &Matrix, idx: usize) {
        match self {
            Store::Exact(h) => h.entry(exact_hash(m)).or_default().push(idx),
            Store::Float(t) => t.entry(Key(float_key(m).0)).or_default().push(idx),
        }
    }

    fn find(&self, m: &Matrix, entries: &[BallEntry]) -> Lookup {
        match self {
            Store::Exact(h) => {
                let Some(bucket) = h.get(&exact_hash(m)) else {
                    return Lookup::Missing { collided: 0 };
                };
                let mut collided = 0;
                for &i in bucket {
                    if entries[i].matrix.exact_eq(m) == Some(true) {
                        return Lookup::Found { index: i, deviation: 0.0, collided };
                    }
                    collided += 1;
                }
                Lookup::Missing { collided }
            }
            Store::Float(t) => {
                let (key, weight, scale) = float_key(m);
                let tol = FLOAT_DEDUP_TOL * scale.max(1.0);
                let reach = weight * tol * 1.5;
                for (_, bucket) in t.range(Key(key - reach)..=Key(key + reach)) {
                    for &i in bucket {
                        let d = entries[i].matrix.sup_dist(m);
                        let other = max_abs(&entries[i].matrix);
                        if d <= FLOAT_DEDUP_TOL * scale.max(other).max(1.0) {
                            return Lookup::Found { index: i, deviation: d, collided: 0 };
                        }
                    }
                }
                Lookup::Missing { collided: 0 }
            }
        }
    }
}

fn exact_hash(m: &Matrix) -> u64 {
    let mut h = DefaultHasher::new();
    match m {
        Matrix::Rational(q) => {
            for x in q.entries() {
                x.hash(&mut h);
                BigRational::zero().hash(&mut h);
            }
        }
        Matrix::Quadratic(q) => {
            for x in q.entries() {
                x.a().hash(&mut h);
                x.b().hash(&mut h);
            }
        }
        _ => unreachable!("exact store with floating matrix"),
    }
    h.finish()
}

fn max_abs(m: &Matrix) -> f64 {
    m.to_complex().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(Σ w_k x_k, Σ w_k, max |x_k|)` over real and imaginary parts.
fn float_key(m: &Matrix) -> (f64, f64, f64) {
    let c = m.to_complex();
    let mut key = 0.0;
    let mut weight = 0.0;
    let mut scale = 0.0f64;
    for (k, z) in c.iter().enumerate() {
        let w = 1.0 + (k % 7) as f64 / 7.0;
        let w2 = 1.0 + ((k + 3) % 5) as f64 / 5.0;
        key += w * z.re + w2 * z.im;
        weight += w + w2;
        scale = scale.max(z.norm());
    }
    (key, weight, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDesc;
    use crate::linalg::rational_matrix;

    fn schottky() -> (Presentation, Homomorphism) {
        let g = GroupDesc::sl(2, FieldDesc::real()).unwrap();
        let a = rational_matrix(&[&[(4, 1), (0, 1)], &[(0, 1), (1, 4)]]);
        let b = rational_matrix(&[&[(17, 8), (15, 8)], &[(15, 8), (17, 8)]]);
        let p = Presentation::free(
            &["a", "b"],
            vec![GroupElement::new(a, g.clone()).unwrap(), GroupElement::new(b, g).unwrap()],
        )
        .unwrap();
        let phi = p.inclusion();
        (p, phi)
    }

    #[test]
    fn parse_and_format_round_trip() {
        let syms: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let w = Word::parse("a^2*b^-1*a", &syms).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.format(&syms), "a^2*b^-1*a");
        assert!(Word::parse("a*a^-1", &syms).is_err());
        assert_eq!(Word::parse("1", &syms).unwrap(), Word::identity());
    }

    #[test]
    fn free_sphere_counts() {
        let (p, phi) = schottky();
        let ball = word_ball(&p, &phi, 3).unwrap();
        assert_eq!(ball.sphere_sizes, vec![1, 4, 12, 36]);
        assert_eq!(ball.len(), 53);
        assert_eq!(ball.hash_collisions, 0);
    }

    #[test]
    fn floating_ball_matches_exact() {
        let (p, phi) = schottky();
        let exact = word_ball(&p, &phi, 3).unwrap();
        let float = word_ball(&p, &phi.to_floating().unwrap(), 3).unwrap();
        assert_eq!(float.len(), exact.len());
        assert!(float.merges.is_empty());
    }

    #[test]
    fn torsion_collapses() {
        // rotation of order 3 over ℚ is impossible; use the integer matrix [[0,−1],[1,−1]]
        let g = GroupDesc::sl(2, FieldDesc::real()).unwrap();
        let r = rational_matrix(&[&[(0, 1), (-1, 1)], &[(1, 1), (-1, 1)]]);
        let p = Presentation::new(
            vec!["r".into()],
            vec![GroupElement::new(r, g).unwrap()],
            Structure::Free,
            vec![Word::parse("r^3", &["r".to_string()]).unwrap()],
        )
        .unwrap();
        let ball = word_ball(&p, &p.inclusion(), 10).unwrap();
        assert_eq!(ball.len(), 3);
        assert!(check_relators(&p, &p.inclusion()).unwrap().pass);
    }

    #[test]
    fn images_follow_parents() {
        let (p, phi) = schottky();
        let ball = word_ball(&p, &phi, 2).unwrap();
        let imgs = ball.images_under(&phi).unwrap();
        for (e, m) in ball.entries.iter().zip(&imgs) {
            assert_eq!(e.matrix.exact_eq(m), Some(true));
            assert_eq!(evaluate(&e.word, &phi).unwrap().matrix().exact_eq(m), Some(true));
        }
    }
}
