//! Involutions in canonical form on the standard basis.
//!
//! Canonical data partitions the generators into a fixed part `U`, swapped
//! pairs `Z`, and blocks `(x, Y_x)`. The realized involution acts by
//! `u ↦ u`, `z ↦ z'`, `z' ↦ z`, `x ↦ x⁻¹` and `y ↦ x y x⁻¹`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{GeneratorMap, IntMatrix};
use crate::stallings::SubgroupGraph;
use crate::words::{parse_letters, FreeGroupContext, Word};

/// A block `(x, Y)` of size `|Y| + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Block {
    pub x: usize,
    pub ys: Vec<usize>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.ys.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CanonicalData {
    ctx: FreeGroupContext,
    u: Vec<usize>,
    z: Vec<(usize, usize)>,
    blocks: Vec<Block>,
}

/// Which canonical part a generator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Fixed,
    Swapped(usize),
    InBlock(usize),
}

impl CanonicalData {
    pub fn new(ctx: FreeGroupContext, u: Vec<usize>, z: Vec<(usize, usize)>, blocks: Vec<Block>) -> Result<Self> {
        let n = ctx.rank();
        let mut seen = vec![false; n + 1];
        let all = u
            .iter()
            .copied()
            .chain(z.iter().flat_map(|&(a, b)| [a, b]))
            .chain(blocks.iter().flat_map(|b| std::iter::once(b.x).chain(b.ys.iter().copied())));
        for i in all {
            if i == 0 || i > n {
                return Err(Error::InvalidCanonicalData(format!("x{i} is out of range for rank {n}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidCanonicalData(format!("x{i} occurs twice")));
            }
        }
        if let Some(i) = (1..=n).find(|&i| !seen[i]) {
            return Err(Error::InvalidCanonicalData(format!("x{i} is not assigned to any part")));
        }
        Ok(Self { ctx, u, z, blocks })
    }

    /// One block `(x_1, {x_2, ..., x_n})`.
    pub fn quasi_conjugation(ctx: FreeGroupContext) -> Self {
        let block = Block { x: 1, ys: (2..=ctx.rank()).collect() };
        Self { ctx, u: vec![], z: vec![], blocks: vec![block] }
    }

    /// Singleton blocks for all generators.
    pub fn symmetry(ctx: FreeGroupContext) -> Self {
        let blocks = (1..=ctx.rank()).map(|x| Block { x, ys: vec![] }).collect();
        Self { ctx, u: vec![], z: vec![], blocks }
    }

    /// The singleton block `(x_1, ∅)` with everything else fixed.
    pub fn extremal(ctx: FreeGroupContext) -> Self {
        Self { ctx, u: (2..=ctx.rank()).collect(), z: vec![], blocks: vec![Block { x: 1, ys: vec![] }] }
    }

    /// Random partition of the generators; `Z` pairs only when `allow_swaps`.
    pub fn random<R: Rng + ?Sized>(ctx: FreeGroupContext, allow_swaps: bool, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (1..=ctx.rank()).collect();
        order.shuffle(rng);
        let (mut u, mut z, mut blocks) = (Vec::new(), Vec::new(), Vec::new());
        let mut rest = &order[..];
        while let Some(&first) = rest.first() {
            match rng.gen_range(0..3) {
                0 => {
                    u.push(first);
                    rest = &rest[1..];
                }
                1 if allow_swaps && rest.len() >= 2 => {
                    z.push((rest[0], rest[1]));
                    rest = &rest[2..];
                }
                _ => {
                    let size = rng.gen_range(1..=rest.len());
                    blocks.push(Block { x: first, ys: rest[1..size].to_vec() });
                    rest = &rest[size..];
                }
            }
        }
        Self { ctx, u, z, blocks }
    }

    /// Renames `x_i` to `x_{perm[i-1]}` and reorders the blocks.
    pub fn relabeled(&self, perm: &[usize], block_order: &[usize]) -> Self {
        let r = |i: usize| perm[i - 1];
        Self {
            ctx: self.ctx,
            u: self.u.iter().map(|&i| r(i)).collect(),
            z: self.z.iter().map(|&(a, b)| (r(a), r(b))).collect(),
            blocks: block_order
                .iter()
                .map(|&k| {
                    let b = &self.blocks[k];
                    Block { x: r(b.x), ys: b.ys.iter().map(|&y| r(y)).collect() }
                })
                .collect(),
        }
    }

    /// A random relabeling with shuffled block order.
    pub fn random_relabeling<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (1..=self.ctx.rank()).collect();
        perm.shuffle(rng);
        let mut order: Vec<usize> = (0..self.blocks.len()).collect();
        order.shuffle(rng);
        self.relabeled(&perm, &order)
    }

    pub fn context(&self) -> FreeGroupContext {
        self.ctx
    }

    pub fn fixed(&self) -> &[usize] {
        &self.u
    }

    pub fn swapped(&self) -> &[(usize, usize)] {
        &self.z
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_soft(&self) -> bool {
        self.z.is_empty()
    }

    fn parts(&self) -> Vec<Part> {
        let mut p = vec![Part::Fixed; self.ctx.rank() + 1];
        for (k, &(a, b)) in self.z.iter().enumerate() {
            p[a] = Part::Swapped(k);
            p[b] = Part::Swapped(k);
        }
        for (k, b) in self.blocks.iter().enumerate() {
            p[b.x] = Part::InBlock(k);
            for &y in &b.ys {
                p[y] = Part::InBlock(k);
            }
        }
        p
    }

    /// The subgroup `⟨U⟩`.
    pub fn fixed_subgroup(&self) -> SubgroupGraph {
        let gens: Vec<Word> = self.u.iter().map(|&i| self.ctx.generator(i)).collect();
        SubgroupGraph::build(self.ctx, &gens)
    }

    /// Parses the three-line text format; missing lines are empty parts.
    pub fn parse(text: &str, rank: Option<usize>) -> Result<Self> {
        fn index(tok: &str) -> Result<usize> {
            match parse_letters(tok)?[..] {
                [l] if l > 0 => Ok(l as usize),
                _ => Err(Error::Parse(format!("expected a single positive generator, got {tok:?}"))),
            }
        }
        fn indices(s: &str) -> Result<Vec<usize>> {
            s.split_whitespace().map(index).collect()
        }
        let (mut u, mut z, mut blocks) = (Vec::new(), Vec::new(), Vec::new());
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(':').ok_or_else(|| Error::Parse(format!("missing ':' in {line:?}")))?;
            match key.trim() {
                "U" => u = indices(rest)?,
                "Z" => {
                    for group in bracketed(rest, '(', ')')? {
                        match indices(group)?[..] {
                            [a, b] => z.push((a, b)),
                            _ => return Err(Error::Parse(format!("a Z pair needs two generators: {group:?}"))),
                        }
                    }
                }
                "blocks" => {
                    for group in bracketed(rest, '[', ']')? {
                        let (x, ys) = group
                            .split_once('|')
                            .ok_or_else(|| Error::Parse(format!("missing '|' in block {group:?}")))?;
                        blocks.push(Block { x: index(x.trim())?, ys: indices(ys)? });
                    }
                }
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let max = u
            .iter()
            .copied()
            .chain(z.iter().flat_map(|&(a, b)| [a, b]))
            .chain(blocks.iter().flat_map(|b: &Block| std::iter::once(b.x).chain(b.ys.iter().copied())))
            .max()
            .unwrap_or(0);
        let ctx = FreeGroupContext::new(rank.unwrap_or(max))?;
        Self::new(ctx, u, z, blocks)
    }

    /// The involution with this canonical form on the standard basis.
    pub fn realize(&self) -> GeneratorMap {
        let ctx = self.ctx;
        let mut f = GeneratorMap::identity(ctx);
        for &(a, b) in &self.z {
            f = f.with_image(a, ctx.generator(b)).with_image(b, ctx.generator(a));
        }
        for b in &self.blocks {
            let x = ctx.generator(b.x);
            f = f.with_image(b.x, x.invert());
            for &y in &b.ys {
                f = f.with_image(y, ctx.generator(y).conjugate_by(&x));
            }
        }
        f
    }

    pub fn classify(&self) -> InvolutionClass {
        let mut block_sizes: Vec<usize> = self.blocks.iter().map(Block::size).collect();
        block_sizes.sort_unstable();
        InvolutionClass { fixed_rank: self.u.len(), z_count: self.z.len(), block_sizes }
    }

    pub fn is_quasi_conjugation(&self) -> bool {
        self.u.is_empty() && self.z.is_empty() && self.blocks.len() == 1
    }

    pub fn is_symmetry(&self) -> bool {
        self.u.is_empty() && self.z.is_empty() && self.blocks.iter().all(|b| b.ys.is_empty())
    }

    pub fn is_extremal(&self) -> bool {
        self.z.is_empty() && self.blocks.len() == 1 && self.blocks[0].ys.is_empty()
    }
}

fn bracketed(s: &str, open: char, close: char) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix(open)
            .and_then(|r| r.split_once(close))
            .ok_or_else(|| Error::Parse(format!("expected {open}...{close} in {rest:?}")))?;
        out.push(inner.0);
        rest = inner.1.trim_start();
    }
    Ok(out)
}

impl fmt::Display for CanonicalData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U:")?;
        for i in &self.u {
            write!(f, " x{i}")?;
        }
        write!(f, "\nZ:")?;
        for (a, b) in &self.z {
            write!(f, " (x{a} x{b})")?;
        }
        write!(f, "\nblocks:")?;
        for b in &self.blocks {
            write!(f, " [x{} |", b.x)?;
            for y in &b.ys {
                write!(f, " x{y}")?;
            }
            write!(f, "]")?;
        }
        writeln!(f)
    }
}

/// Conjugacy invariants of a canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct InvolutionClass {
    pub fixed_rank: usize,
    pub z_count: usize,
    pub block_sizes: Vec<usize>,
}

impl fmt::Display for InvolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fixed_rank={} z_count={} block_sizes={:?}", self.fixed_rank, self.z_count, self.block_sizes)
    }
}

/// True iff `f` is an involution acting trivially mod 2.
pub fn is_soft(f: &GeneratorMap) -> Result<bool> {
    if !f.compose(f).is_identity() {
        return Err(Error::NotInvolution);
    }
    Ok(f.mod2_matrix().is_identity())
}

/// Decides conjugacy of two soft canonical forms by their invariants.
pub fn conjugacy_test(d1: &CanonicalData, d2: &CanonicalData) -> Result<bool> {
    d1.ctx.ensure_same(&d2.ctx)?;
    if !d1.is_soft() || !d2.is_soft() {
        return Err(Error::Precondition("the conjugacy criterion applies to soft involutions only".into()));
    }
    Ok(d1.classify() == d2.classify())
}

/// A permutation `σ` of the generators with `σ⁻¹ realize(d1) σ = realize(d2)`.
pub fn build_conjugator(d1: &CanonicalData, d2: &CanonicalData) -> Result<GeneratorMap> {
    d1.ctx.ensure_same(&d2.ctx)?;
    if d1.classify() != d2.classify() {
        return Err(Error::Precondition(format!("canonical forms differ: {} vs {}", d1.classify(), d2.classify())));
    }
    let ctx = d1.ctx;
    let mut sigma = GeneratorMap::identity(ctx);
    for (&a, &b) in d2.u.iter().zip(&d1.u) {
        sigma = sigma.with_image(a, ctx.generator(b));
    }
    for (&(a2, b2), &(a1, b1)) in d2.z.iter().zip(&d1.z) {
        sigma = sigma.with_image(a2, ctx.generator(a1)).with_image(b2, ctx.generator(b1));
    }
    fn by_size(d: &CanonicalData) -> Vec<&Block> {
        let mut v: Vec<&Block> = d.blocks.iter().collect();
        v.sort_by_key(|b| b.size());
        v
    }
    for (b2, b1) in by_size(d2).into_iter().zip(by_size(d1)) {
        sigma = sigma.with_image(b2.x, ctx.generator(b1.x));
        for (&y2, &y1) in b2.ys.iter().zip(&b1.ys) {
            sigma = sigma.with_image(y2, ctx.generator(y1));
        }
    }
    Ok(sigma)
}

/// An element inverted by a soft involution, in one of its two normal forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum InvertedForm {
    /// `a = φ(w) w⁻¹`.
    Coboundary(Word),
    /// `a = φ(w) x w⁻¹` for the block letter `x = x_index`.
    BlockForm(Word, usize),
}

impl InvertedForm {
    pub fn reconstruct(&self, phi: &GeneratorMap) -> Word {
        match self {
            InvertedForm::Coboundary(w) => &phi.apply(w) * &w.invert(),
            InvertedForm::BlockForm(w, x) => &(&phi.apply(w) * &w.context().generator(*x)) * &w.invert(),
        }
    }
}

/// Writes `a` with `φ(a) = a⁻¹` as `φ(w) w⁻¹` or `φ(w) x w⁻¹`.
///
/// The word is first cut into syllables from the invariant free factors `⟨U⟩`
/// and `⟨x, Y_x⟩`; the syllables pair off from the outside in, leaving at most
/// one middle syllable, which is reduced inside its factor by peeling either
/// its first `Y`-syllable or its trailing power of `x`.
pub fn decompose_inverted(d: &CanonicalData, a: &Word) -> Result<InvertedForm> {
    d.ctx.ensure_same(&a.context())?;
    if !d.is_soft() {
        return Err(Error::Precondition("decomposition needs a soft involution".into()));
    }
    let phi = d.realize();
    if phi.apply(a) != a.invert() {
        return Err(Error::Precondition(format!("{a} is not inverted by the involution")));
    }
    let parts = d.parts();
    let mut syllables: Vec<(Part, Vec<i32>)> = Vec::new();
    for &l in a.letters() {
        let p = parts[l.unsigned_abs() as usize];
        match syllables.last_mut() {
            Some((q, s)) if *q == p => s.push(l),
            _ => syllables.push((p, vec![l])),
        }
    }
    let half = syllables.len() / 2;
    let prefix: Vec<i32> = syllables[..half].iter().flat_map(|(_, s)| s.iter().copied()).collect();
    let w0 = phi.apply(&Word::from_reduced(d.ctx, prefix));
    let form = if syllables.len().is_multiple_of(2) {
        InvertedForm::Coboundary(w0)
    } else {
        let (part, middle) = &syllables[half];
        let Part::InBlock(k) = *part else {
            return Err(Error::InternalDisagreement(format!("middle syllable of {a} lies outside every block")));
        };
        let x = d.blocks[k].x;
        let (w1, has_x) = decompose_in_block(&phi, x, Word::from_reduced(d.ctx, middle.clone()))?;
        let w = &w0 * &w1;
        if has_x {
            InvertedForm::BlockForm(w, x)
        } else {
            InvertedForm::Coboundary(w)
        }
    };
    if form.reconstruct(&phi) != *a {
        return Err(Error::InternalDisagreement(format!("decomposition of {a} does not reconstruct it")));
    }
    Ok(form)
}

fn decompose_in_block(phi: &GeneratorMap, x: usize, mut v: Word) -> Result<(Word, bool)> {
    let ctx = v.context();
    let xi = x as i32;
    let xw = ctx.generator(x);
    let mut acc = ctx.identity();
    loop {
        let l = v.letters();
        if l.iter().all(|c| c.abs() == xi) {
            let k = v.exponent_sums()[x - 1];
            return Ok(if k % 2 == 0 {
                (&acc * &xw.pow(-k / 2), false)
            } else {
                (&acc * &xw.pow(-(k - 1).div_euclid(2)), true)
            });
        }
        let s = if l.last().is_some_and(|c| c.abs() != xi) {
            let start = l.iter().position(|c| c.abs() != xi).expect("some letter comes from Y");
            let len = l[start..].iter().take_while(|c| c.abs() != xi).count();
            Word::from_reduced(ctx, l[start..start + len].to_vec())
        } else {
            let run = l.iter().rev().take_while(|c| c.abs() == xi).count() as i64;
            let km = if l[l.len() - 1] > 0 { run } else { -run };
            xw.pow(-km)
        };
        let t = &(&phi.apply(&s).invert() * &v) * &s;
        // Peeling a trailing power of x may keep the length when k_m = -1,
        // but then t ends in a Y letter and the next peel shortens it.
        let ends_in_x = |u: &Word| u.letters().last().is_some_and(|c| c.abs() == xi);
        let progress = t.len() < v.len() || (t.len() == v.len() && ends_in_x(&v) && !ends_in_x(&t));
        if !progress {
            return Err(Error::InternalDisagreement(format!("peeling {v} did not shorten it")));
        }
        acc = &acc * &s;
        v = t;
    }
}

/// For a single-block form and a primitive `a` with `φ(a) = a⁻¹`, returns
/// `(v, ε)` with `a = v x^ε v⁻¹` and `v ∈ ⟨U⟩`.
pub fn primitive_inverted_form(d: &CanonicalData, a: &Word) -> Result<(Word, i32)> {
    d.ctx.ensure_same(&a.context())?;
    if d.blocks.len() != 1 || !d.is_soft() {
        return Err(Error::Precondition("expected canonical data with exactly one block and no Z pairs".into()));
    }
    if a.is_identity() || !crate::whitehead::is_primitive(a)? {
        return Err(Error::Precondition(format!("{a} is not primitive")));
    }
    let phi = d.realize();
    if phi.apply(a) != a.invert() {
        return Err(Error::Precondition(format!("{a} is not inverted by the involution")));
    }
    let x = d.blocks[0].x;
    let (core, c) = a.cyclic_reduce();
    let sign = match core.letters() {
        [l] if l.unsigned_abs() as usize == x => l.signum(),
        _ => return Err(Error::InternalDisagreement(format!("cyclic core of {a} is not x{x}^±1"))),
    };
    // φ(c) = c x^k, and v = c x^{k/2} is fixed.
    let shift = &c.invert() * &phi.apply(&c);
    let k = shift.exponent_sums()[x - 1];
    if shift != d.ctx.generator(x).pow(k) || k % 2 != 0 {
        return Err(Error::InternalDisagreement(format!("conjugator of {a} has an unexpected image")));
    }
    let v = &c * &d.ctx.generator(x).pow(k / 2);
    if !d.fixed_subgroup().contains(&v) {
        return Err(Error::InternalDisagreement(format!("{v} is not in the fixed subgroup")));
    }
    Ok((v, sign))
}

/// `σ` with `σ² = realize(d)` for data with an even number of equal blocks
/// and fixed part smaller than the block size.
pub fn square_root_of_bead(d: &CanonicalData) -> Result<GeneratorMap> {
    if !d.is_soft() {
        return Err(Error::Precondition("bead form has no Z pairs".into()));
    }
    let size = d.blocks.first().map(Block::size).unwrap_or(0);
    if d.blocks.len() < 2 || d.blocks.iter().any(|b| b.size() != size) {
        return Err(Error::Precondition("bead form needs at least two blocks of equal size".into()));
    }
    if !d.blocks.len().is_multiple_of(2) {
        return Err(Error::Precondition("square roots are only constructed for an even number of blocks".into()));
    }
    if d.u.len() >= size {
        return Err(Error::Precondition("fixed part must be smaller than the block size".into()));
    }
    let ctx = d.ctx;
    let mut sigma = GeneratorMap::identity(ctx);
    for pair in d.blocks.chunks(2) {
        let (first, second) = (&pair[0], &pair[1]);
        let a = ctx.generator(second.x);
        sigma = sigma.with_image(first.x, a.invert()).with_image(second.x, ctx.generator(first.x));
        for (&y, &b) in first.ys.iter().zip(&second.ys) {
            sigma = sigma.with_image(y, ctx.generator(b).conjugate_by(&a)).with_image(b, ctx.generator(y));
        }
    }
    Ok(sigma)
}

/// Evidence that a single-block involution has no square root: the
/// `(-1)`-eigenspace of its abelianization is the line spanned by `x̄`, so a
/// square root would act on it by an integer `m` with `m² = -1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnakeCertificate {
    pub matrix: Vec<Vec<i64>>,
    pub eigenvector: Vec<i64>,
    pub minus_eigenspace_rank: usize,
}

impl fmt::Display for SnakeCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "induced matrix:")?;
        for row in &self.matrix {
            writeln!(f, "  {row:?}")?;
        }
        writeln!(f, "(-1)-eigenvector: {:?}", self.eigenvector)?;
        writeln!(f, "(-1)-eigenspace rank: {}", self.minus_eigenspace_rank)?;
        writeln!(f, "a square root would scale this line by m with m^2 = -1; no such integer exists")
    }
}

pub fn snake_obstruction(d: &CanonicalData) -> Result<SnakeCertificate> {
    if !d.is_soft() || d.blocks.len() != 1 || d.u.len() >= d.blocks[0].size() {
        return Err(Error::Precondition(
            "snake form needs no Z pairs, exactly one block, and a fixed part smaller than the block".into(),
        ));
    }
    let m = d.realize().induced_matrix();
    let n = d.ctx.rank();
    let mut e = vec![0i64; n];
    e[d.blocks[0].x - 1] = 1;
    let minus: Vec<i64> = e.iter().map(|v| -v).collect();
    let rank = n - m.add_scalar(1).rank();
    if m.apply(&e) != minus || rank != 1 {
        return Err(Error::InternalDisagreement("the (-1)-eigenspace is not the line of x".into()));
    }
    let IntMatrix(rows) = m;
    Ok(SnakeCertificate { matrix: rows, eigenvector: e, minus_eigenspace_rank: rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{random_word, words_up_to};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(n: usize) -> FreeGroupContext {
        FreeGroupContext::new(n).unwrap()
    }

    fn w(s: &str, n: usize) -> Word {
        Word::parse(s, ctx(n)).unwrap()
    }

    fn data(text: &str, n: usize) -> CanonicalData {
        CanonicalData::parse(text, Some(n)).unwrap()
    }

    fn sample_data() -> Vec<CanonicalData> {
        vec![
            CanonicalData::quasi_conjugation(ctx(2)),
            CanonicalData::quasi_conjugation(ctx(4)),
            CanonicalData::symmetry(ctx(3)),
            CanonicalData::extremal(ctx(3)),
            data("U: x2 x5\nZ: (x3 x4)\nblocks: [x1 | x6 x7] [x8 |]", 8),
            data("U: x3\nblocks: [x1 | x2] [x4 | x5]", 5),
            data("U: x1 x2", 2),
        ]
    }

    #[test]
    fn random_data_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for n in 2..=6 {
            for _ in 0..50 {
                let d = CanonicalData::random(ctx(n), true, &mut rng);
                let again = CanonicalData::new(ctx(n), d.u.clone(), d.z.clone(), d.blocks.clone());
                assert_eq!(again.as_ref(), Ok(&d));
                assert!(CanonicalData::random(ctx(n), false, &mut rng).is_soft());
                let r = d.random_relabeling(&mut rng);
                assert_eq!(r.classify(), d.classify());
                assert!(CanonicalData::new(ctx(n), r.u.clone(), r.z.clone(), r.blocks.clone()).is_ok());
            }
        }
    }

    #[test]
    fn validation() {
        assert!(CanonicalData::parse("U: x1 x1", Some(2)).is_err());
        assert!(CanonicalData::parse("U: x1", Some(2)).is_err());
        assert!(CanonicalData::parse("U: x3", Some(2)).is_err());
        assert!(CanonicalData::parse("blocks: [x1 x2]", Some(2)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "U: x2 x5\nZ: (x3 x4)\nblocks: [x1 | x6 x7] [x8 |]\n";
        let d = CanonicalData::parse(text, None).unwrap();
        assert_eq!(d.to_string(), text);
        assert_eq!(d.context().rank(), 8);
        assert_eq!(d.classify(), InvolutionClass { fixed_rank: 2, z_count: 1, block_sizes: vec![1, 3] });
    }

    #[test]
    fn realize_examples() {
        let q = CanonicalData::quasi_conjugation(ctx(2)).realize();
        assert_eq!(q, GeneratorMap::parse("x1 -> x1-\nx2 -> x1 x2 x1-", None).unwrap());
        assert!(data("U: x1 x2 x3", 3).realize().is_identity());
        let s = CanonicalData::symmetry(ctx(3)).realize();
        assert!(ctx(3).generators().all(|g| s.apply(&g) == g.invert()));
    }

    #[test]
    fn realized_forms_are_involutions() {
        for d in sample_data() {
            let f = d.realize();
            assert!(f.compose(&f).is_identity());
            let nontrivial = !d.swapped().is_empty() || !d.blocks().is_empty();
            assert_eq!(f.order_up_to(12), Some(if nontrivial { 2 } else { 1 }));
        }
    }

    #[test]
    fn fixed_subgroup_is_generated_by_u() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for d in sample_data() {
            let f = d.realize();
            let fix = d.fixed_subgroup();
            for _ in 0..300 {
                let u = random_word(d.context(), 8, &mut rng);
                assert_eq!(f.apply(&u) == u, fix.contains(&u), "{u}");
            }
            for &i in d.fixed() {
                let g = d.context().generator(i);
                assert_eq!(f.apply(&g), g);
            }
        }
    }

    #[test]
    fn softness() {
        let phi = GeneratorMap::parse("x1 -> x2-\nx2 -> x1-", None).unwrap();
        assert_eq!(is_soft(&phi), Ok(false));
        assert_eq!(is_soft(&data("Z: (x1 x2)", 2).realize()), Ok(false));
        for d in sample_data() {
            assert_eq!(is_soft(&d.realize()).unwrap(), d.is_soft());
        }
        let not_inv = GeneratorMap::parse("x1 -> x1 x2\nx2 -> x2", None).unwrap();
        assert_eq!(is_soft(&not_inv), Err(Error::NotInvolution));
    }

    #[test]
    fn inverted_elements_are_even_coboundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for d in sample_data().into_iter().filter(CanonicalData::is_soft) {
            let f = d.realize();
            for _ in 0..50 {
                let u = random_word(d.context(), 8, &mut rng);
                assert!(crate::maps::is_even(&(&f.apply(&u) * &u.invert())));
            }
        }
    }

    #[test]
    fn two_forms_of_the_same_block_are_conjugate() {
        let phi = GeneratorMap::parse("x1 -> x1-\nx2 -> x1 x2 x1-", None).unwrap();
        let psi = GeneratorMap::parse("x1 -> x1-\nx2 -> x1- x2 x1-", None).unwrap();
        let sigma = GeneratorMap::parse("x1 -> x1\nx2 -> x1 x2", None).unwrap();
        assert!(psi.compose(&psi).is_identity());
        assert_eq!(sigma.inverse().unwrap().compose(&phi.compose(&sigma)), psi);
        // psi acts canonically on {x1, x1⁻¹ x2}
        assert_eq!(psi.apply(&w("x1- x2", 2)), w("x1- x2", 2).conjugate_by(&w("x1", 2)));
    }

    #[test]
    fn conjugacy_examples() {
        let q = CanonicalData::quasi_conjugation(ctx(3));
        let s = CanonicalData::symmetry(ctx(3));
        assert_eq!(conjugacy_test(&q, &s), Ok(false));
        assert_eq!(conjugacy_test(&q, &q), Ok(true));
        let d1 = data("U: x3\nblocks: [x1 | x2] [x4 | x5]", 5);
        let d2 = data("U: x5\nblocks: [x4 | x1] [x2 | x3]", 5);
        assert_eq!(conjugacy_test(&d1, &d2), Ok(true));
        let nonsoft = data("Z: (x1 x2)", 2);
        assert!(conjugacy_test(&nonsoft, &nonsoft).is_err());
    }

    #[test]
    fn conjugators_satisfy_the_identity() {
        let pairs = [
            (data("U: x3\nblocks: [x1 | x2] [x4 | x5]", 5), data("U: x5\nblocks: [x4 | x1] [x2 | x3]", 5)),
            (data("blocks: [x1 |] [x2 | x3]", 3), data("blocks: [x3 | x1] [x2 |]", 3)),
            (CanonicalData::symmetry(ctx(2)), CanonicalData::symmetry(ctx(2))),
            (data("Z: (x1 x2)\nU: x3", 3), data("Z: (x3 x1)\nU: x2", 3)),
        ];
        for (d1, d2) in pairs {
            let s = build_conjugator(&d1, &d2).unwrap();
            assert_eq!(s.inverse().unwrap().compose(&d1.realize().compose(&s)), d2.realize());
        }
        let q = CanonicalData::quasi_conjugation(ctx(2));
        let s = CanonicalData::symmetry(ctx(2));
        assert!(build_conjugator(&q, &s).is_err());
    }

    #[test]
    fn no_conjugator_between_distinct_classes_rank_two() {
        // Exhaustive over images of length ≤ 3: φ1 σ = σ φ2 never holds for an automorphism σ.
        let c = ctx(2);
        let forms = [CanonicalData::quasi_conjugation(c), CanonicalData::symmetry(c), CanonicalData::extremal(c)];
        let words = words_up_to(c, 3);
        for (i, d1) in forms.iter().enumerate() {
            for d2 in &forms[i + 1..] {
                let (f1, f2) = (d1.realize(), d2.realize());
                for a in &words {
                    for b in &words {
                        let s = GeneratorMap::new(c, vec![a.clone(), b.clone()]).unwrap();
                        if f1.compose(&s) == s.compose(&f2) {
                            assert!(!s.is_automorphism(), "{s}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let q = CanonicalData::quasi_conjugation(ctx(2));
        assert_eq!(decompose_inverted(&q, &w("x1-", 2)).unwrap(), InvertedForm::BlockForm(w("x1", 2), 1));
        assert_eq!(decompose_inverted(&q, &ctx(2).identity()).unwrap(), InvertedForm::Coboundary(ctx(2).identity()));
        // αx = x⁻¹, αy = xyx⁻¹, αu = u with x = x1, y = x2, u = x3
        let alpha = data("U: x3\nblocks: [x1 | x2]", 3);
        let a = w("x3 x1 x3-", 3);
        let form = decompose_inverted(&alpha, &a).unwrap();
        assert_eq!(form, InvertedForm::BlockForm(w("x3", 3), 1));
        assert!(decompose_inverted(&q, &w("x2", 2)).is_err());
    }

    #[test]
    fn decomposition_reconstructs_random_inverted_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for d in sample_data().into_iter().filter(CanonicalData::is_soft) {
            let f = d.realize();
            for _ in 0..100 {
                let u = random_word(d.context(), 7, &mut rng);
                let cob = &f.apply(&u) * &u.invert();
                let form = decompose_inverted(&d, &cob).unwrap();
                assert!(matches!(form, InvertedForm::Coboundary(_)));
                assert_eq!(form.reconstruct(&f), cob);
                for b in d.blocks() {
                    let a = &(&f.apply(&u) * &d.context().generator(b.x)) * &u.invert();
                    let form = decompose_inverted(&d, &a).unwrap();
                    assert!(matches!(form, InvertedForm::BlockForm(_, x) if x == b.x));
                    assert_eq!(form.reconstruct(&f), a);
                }
            }
        }
    }

    #[test]
    fn primitive_inverted_examples() {
        let alpha = data("U: x3\nblocks: [x1 | x2]", 3);
        assert_eq!(primitive_inverted_form(&alpha, &w("x1", 3)).unwrap(), (ctx(3).identity(), 1));
        assert_eq!(primitive_inverted_form(&alpha, &w("x1-", 3)).unwrap(), (ctx(3).identity(), -1));
        assert_eq!(primitive_inverted_form(&alpha, &w("x3 x1 x3-", 3)).unwrap(), (w("x3", 3), 1));
        assert!(primitive_inverted_form(&alpha, &w("x1 x1", 3)).is_err());
    }

    #[test]
    fn primitive_inverted_by_enumeration() {
        let alpha = data("U: x3\nblocks: [x1 | x2]", 3);
        let f = alpha.realize();
        for a in words_up_to(ctx(3), 5).into_iter().skip(1) {
            if f.apply(&a) == a.invert() && crate::whitehead::is_primitive(&a).unwrap() {
                let (v, e) = primitive_inverted_form(&alpha, &a).unwrap();
                assert_eq!(ctx(3).generator(1).pow(e.into()).conjugate_by(&v), a);
            }
        }
    }

    #[test]
    fn centralizing_set_of_a_block_is_generated_by_y() {
        for n in [2, 3] {
            let d = CanonicalData::quasi_conjugation(ctx(n));
            let f = d.realize();
            let x = ctx(n).generator(1);
            let ys: Vec<Word> = (2..=n).map(|i| ctx(n).generator(i)).collect();
            let cy = SubgroupGraph::build(ctx(n), &ys);
            for c in words_up_to(ctx(n), if n == 2 { 6 } else { 5 }) {
                if f.apply(&c) == c.conjugate_by(&x) {
                    assert!(cy.contains(&c), "{c}");
                }
            }
        }
    }

    #[test]
    fn predicates() {
        assert!(CanonicalData::quasi_conjugation(ctx(4)).is_quasi_conjugation());
        assert!(!CanonicalData::quasi_conjugation(ctx(4)).is_symmetry());
        assert!(CanonicalData::symmetry(ctx(4)).is_symmetry());
        assert!(CanonicalData::extremal(ctx(4)).is_extremal());
        assert!(!CanonicalData::extremal(ctx(4)).is_quasi_conjugation());
        assert!(!CanonicalData::symmetry(ctx(4)).is_extremal());
    }

    #[test]
    fn bead_square_roots() {
        let two = CanonicalData::symmetry(ctx(2));
        let s = square_root_of_bead(&two).unwrap();
        assert_eq!(s, GeneratorMap::parse("x1 -> x2-\nx2 -> x1", None).unwrap());
        assert_eq!(s.compose(&s), two.realize());
        // x = x1, y = x2, a = x3, b = x4
        let beads = data("blocks: [x1 | x2] [x3 | x4]", 4);
        let s = square_root_of_bead(&beads).unwrap();
        assert_eq!(s, GeneratorMap::parse("x1 -> x3-\nx2 -> x3 x4 x3-\nx3 -> x1\nx4 -> x2", None).unwrap());
        assert_eq!(s.compose(&s), beads.realize());
        let four = CanonicalData::symmetry(ctx(4));
        let s = square_root_of_bead(&four).unwrap();
        assert_eq!(s.compose(&s), four.realize());
        let with_u = data("U: x5\nblocks: [x1 | x2] [x3 | x4]", 5);
        let s = square_root_of_bead(&with_u).unwrap();
        assert_eq!(s.compose(&s), with_u.realize());
        assert!(square_root_of_bead(&CanonicalData::symmetry(ctx(3))).is_err());
        assert!(square_root_of_bead(&data("blocks: [x1 | x2] [x3 |]", 3)).is_err());
        assert!(square_root_of_bead(&data("U: x3\nblocks: [x1 |] [x2 |]", 3)).is_err());
    }

    #[test]
    fn snake_certificates() {
        let q = CanonicalData::quasi_conjugation(ctx(2));
        let cert = snake_obstruction(&q).unwrap();
        assert_eq!(cert.eigenvector, vec![1, 0]);
        assert_eq!(cert.minus_eigenspace_rank, 1);
        let e = data("U: x3\nblocks: [x1 | x2]", 3);
        assert!(snake_obstruction(&e).is_ok());
        assert!(snake_obstruction(&CanonicalData::symmetry(ctx(2))).is_err());
        assert!(snake_obstruction(&CanonicalData::extremal(ctx(3))).is_err());
    }

    #[test]
    fn quasi_conjugation_has_no_short_square_root() {
        let c = ctx(2);
        let f = CanonicalData::quasi_conjugation(c).realize();
        let words = words_up_to(c, 3);
        for a in &words {
            for b in &words {
                let s = GeneratorMap::new(c, vec![a.clone(), b.clone()]).unwrap();
                assert_ne!(s.compose(&s), f, "{s}");
            }
        }
    }
}
