//! Endomorphisms of `F_n` given by generator images.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::stallings::LabeledFolding;
use crate::words::{parse_letters, reduce_letters, FreeGroupContext, Word};

/// The endomorphism `x_i ↦ images[i-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorMap {
    ctx: FreeGroupContext,
    images: Vec<Word>,
}

impl GeneratorMap {
    pub fn new(ctx: FreeGroupContext, images: Vec<Word>) -> Result<Self> {
        if images.len() != ctx.rank() {
            return Err(Error::Precondition(format!("expected {} generator images, got {}", ctx.rank(), images.len())));
        }
        for w in &images {
            ctx.ensure_same(&w.context())?;
        }
        Ok(Self { ctx, images })
    }

    pub fn identity(ctx: FreeGroupContext) -> Self {
        Self { ctx, images: ctx.generators().collect() }
    }

    /// Builds a map from raw letter sequences, reducing each image.
    pub fn from_letters(ctx: FreeGroupContext, images: &[&[i32]]) -> Result<Self> {
        let images = images.iter().map(|l| Word::reduce(l, ctx)).collect::<Result<Vec<_>>>()?;
        Self::new(ctx, images)
    }

    /// Conjugation `τ_a : z ↦ a z a⁻¹`.
    pub fn inner(a: &Word) -> Self {
        let ctx = a.context();
        Self { ctx, images: ctx.generators().map(|g| g.conjugate_by(a)).collect() }
    }

    /// Replaces the image of `x_i`.
    pub fn with_image(mut self, i: usize, w: Word) -> Self {
        assert_eq!(w.context(), self.ctx);
        self.images[i - 1] = w;
        self
    }

    pub(crate) fn set_image(&mut self, i: usize, w: Word) {
        self.images[i - 1] = w;
    }

    pub fn context(&self) -> FreeGroupContext {
        self.ctx
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Word {
        &self.images[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, w)| w.letters() == [k as i32 + 1])
    }

    /// Homomorphic extension to a word. Panics on a context mismatch.
    pub fn apply(&self, w: &Word) -> Word {
        assert_eq!(self.ctx, w.context(), "applying a map to a word from another context");
        let mut raw = Vec::new();
        for &l in w.letters() {
            let img = self.images[l.unsigned_abs() as usize - 1].letters();
            if l > 0 {
                raw.extend_from_slice(img);
            } else {
                raw.extend(img.iter().rev().map(|x| -x));
            }
        }
        Word::from_reduced(self.ctx, reduce_letters(&raw))
    }

    pub fn checked_apply(&self, w: &Word) -> Result<Word> {
        self.ctx.ensure_same(&w.context())?;
        Ok(self.apply(w))
    }

    /// `self ∘ g`: apply `g` first.
    pub fn compose(&self, g: &GeneratorMap) -> GeneratorMap {
        assert_eq!(self.ctx, g.ctx, "composing maps from different contexts");
        GeneratorMap { ctx: self.ctx, images: g.images.iter().map(|w| self.apply(w)).collect() }
    }

    pub fn checked_compose(&self, g: &GeneratorMap) -> Result<GeneratorMap> {
        self.ctx.ensure_same(&g.ctx)?;
        Ok(self.compose(g))
    }

    pub fn power(&self, k: u32) -> GeneratorMap {
        (0..k).fold(GeneratorMap::identity(self.ctx), |acc, _| acc.compose(self))
    }

    pub fn commutes_with(&self, other: &GeneratorMap) -> bool {
        self.compose(other) == other.compose(self)
    }

    /// `σ ∘ self ∘ σ⁻¹`, given `σ` and its inverse.
    pub fn conjugated(&self, sigma: &GeneratorMap, sigma_inv: &GeneratorMap) -> GeneratorMap {
        sigma.compose(&self.compose(sigma_inv))
    }

    fn folding(&self) -> LabeledFolding {
        LabeledFolding::new(self.ctx, &self.images)
    }

    /// True iff the images form a basis of `F_n`.
    pub fn is_automorphism(&self) -> bool {
        let lf = self.folding();
        lf.graph().is_whole_group() && lf.is_free_basis()
    }

    /// The inverse automorphism, reading each `x_i` as a word in the images.
    pub fn inverse(&self) -> Result<GeneratorMap> {
        let lf = self.folding();
        if !(lf.graph().is_whole_group() && lf.is_free_basis()) {
            return Err(Error::NotAutomorphism);
        }
        let images = self
            .ctx
            .generators()
            .map(|g| {
                let expr = lf.express(&g).expect("every generator lies in the whole group");
                Word::from_reduced(self.ctx, expr)
            })
            .collect();
        Ok(GeneratorMap { ctx: self.ctx, images })
    }

    /// The unique `a` with `self = τ_a`, if any.
    ///
    /// Writing `a = a' x_1^k` with `a'` not ending in `x_1^{±1}`, the reduced
    /// image of `x_1` is `a' x_1 a'⁻¹`, which fixes `a'`; `k` is then read off
    /// `a'⁻¹ f(x_2) a' = x_1^k x_2 x_1^{-k}`.
    pub fn is_inner(&self) -> Result<Option<Word>> {
        if !self.is_automorphism() {
            return Err(Error::NotAutomorphism);
        }
        let f1 = self.image(1).letters();
        if f1.len().is_multiple_of(2) {
            return Ok(None);
        }
        let h = f1.len() / 2;
        if f1[h] != 1 {
            return Ok(None);
        }
        let prefix = Word::from_reduced(self.ctx, f1[..h].to_vec());
        if self.ctx.generator(1).conjugate_by(&prefix) != *self.image(1) {
            return Ok(None);
        }
        let b = self.image(2).conjugate_by(&prefix.invert());
        let bl = b.letters();
        let run = bl.iter().take_while(|&&l| l.abs() == 1).count();
        let k = match bl.first() {
            Some(&-1) => -(run as i64),
            _ => run as i64,
        };
        let candidate = &prefix * &self.ctx.generator(1).pow(k);
        if GeneratorMap::inner(&candidate) == *self {
            Ok(Some(candidate))
        } else {
            Ok(None)
        }
    }

    /// Least `k ≤ bound` with `self^k = id`.
    pub fn order_up_to(&self, bound: u32) -> Option<u32> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return Some(k);
            }
            p = p.compose(self);
        }
        None
    }

    pub fn is_involution(&self) -> bool {
        !self.is_identity() && self.compose(self).is_identity()
    }

    /// Column `i` is the exponent-sum vector of the image of `x_i`.
    pub fn induced_matrix(&self) -> IntMatrix {
        let n = self.ctx.rank();
        let mut m = vec![vec![0i64; n]; n];
        for (col, w) in self.images.iter().enumerate() {
            for (row, e) in w.exponent_sums().into_iter().enumerate() {
                m[row][col] = e;
            }
        }
        IntMatrix(m)
    }

    pub fn mod2_matrix(&self) -> Mod2Matrix {
        self.induced_matrix().mod2()
    }

    /// Parses the automorphism file format (`x<i> -> <word>` lines).
    pub fn parse(text: &str, rank: Option<usize>) -> Result<GeneratorMap> {
        let mut rows: Vec<(usize, Vec<i32>)> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| Error::Parse(format!("missing '->' in {line:?}")))?;
            let lhs = parse_letters(lhs)?;
            let [g] = lhs[..] else {
                return Err(Error::Parse(format!("left side must be one generator in {line:?}")));
            };
            if g < 0 {
                return Err(Error::Parse(format!("left side must be a positive generator in {line:?}")));
            }
            rows.push((g as usize, parse_letters(rhs)?));
        }
        let n = rank.unwrap_or(rows.len());
        let ctx = FreeGroupContext::new(n)?;
        if rows.len() != n || rows.iter().enumerate().any(|(k, (g, _))| *g != k + 1) {
            return Err(Error::Parse(format!("expected lines for x1..x{n} in increasing order")));
        }
        let images = rows.iter().map(|(_, l)| Word::reduce(l, ctx)).collect::<Result<Vec<_>>>()?;
        GeneratorMap::new(ctx, images)
    }

    // Elementary Nielsen maps.

    /// `x_i ↦ x_i x_j^ε`.
    pub fn right_transvection(ctx: FreeGroupContext, i: usize, j: usize, inverse: bool) -> Self {
        assert_ne!(i, j);
        let t = if inverse { ctx.generator(j).invert() } else { ctx.generator(j) };
        Self::identity(ctx).with_image(i, &ctx.generator(i) * &t)
    }

    /// `x_i ↦ x_j^ε x_i`.
    pub fn left_transvection(ctx: FreeGroupContext, i: usize, j: usize, inverse: bool) -> Self {
        assert_ne!(i, j);
        let t = if inverse { ctx.generator(j).invert() } else { ctx.generator(j) };
        Self::identity(ctx).with_image(i, &t * &ctx.generator(i))
    }

    /// `x_i ↦ x_i⁻¹`.
    pub fn inversion(ctx: FreeGroupContext, i: usize) -> Self {
        Self::identity(ctx).with_image(i, ctx.generator(i).invert())
    }

    /// Swaps `x_i` and `x_j`.
    pub fn transposition(ctx: FreeGroupContext, i: usize, j: usize) -> Self {
        Self::identity(ctx).with_image(i, ctx.generator(j)).with_image(j, ctx.generator(i))
    }

    /// Inversions, transpositions and one-sided transvections; closed under inverses.
    pub fn elementary_nielsen(ctx: FreeGroupContext) -> Vec<GeneratorMap> {
        Self::elementary_nielsen_on(ctx, &(1..=ctx.rank()).collect::<Vec<_>>())
    }

    /// Elementary Nielsen maps moving only the generators in `indices`.
    pub fn elementary_nielsen_on(ctx: FreeGroupContext, indices: &[usize]) -> Vec<GeneratorMap> {
        Self::elementary_pairs_on(ctx, indices).into_iter().map(|(m, _)| m).collect()
    }

    /// Elementary Nielsen maps paired with their inverses.
    pub fn elementary_pairs_on(ctx: FreeGroupContext, indices: &[usize]) -> Vec<(GeneratorMap, GeneratorMap)> {
        let mut out = Vec::new();
        for &i in indices {
            let m = Self::inversion(ctx, i);
            out.push((m.clone(), m));
        }
        for (k, &i) in indices.iter().enumerate() {
            for &j in &indices[k + 1..] {
                let m = Self::transposition(ctx, i, j);
                out.push((m.clone(), m));
            }
        }
        for &i in indices {
            for &j in indices {
                if i != j {
                    for inv in [false, true] {
                        out.push((Self::right_transvection(ctx, i, j, inv), Self::right_transvection(ctx, i, j, !inv)));
                        out.push((Self::left_transvection(ctx, i, j, inv), Self::left_transvection(ctx, i, j, !inv)));
                    }
                }
            }
        }
        out
    }

    /// Product of `len` random elementary Nielsen maps.
    pub fn random_nielsen_product<R: Rng + ?Sized>(ctx: FreeGroupContext, len: usize, rng: &mut R) -> Self {
        Self::random_with_inverse(ctx, len, rng).0
    }

    /// Random automorphism together with its inverse, built from the same moves.
    pub fn random_with_inverse<R: Rng + ?Sized>(ctx: FreeGroupContext, len: usize, rng: &mut R) -> (Self, Self) {
        Self::random_with_inverse_on(ctx, &(1..=ctx.rank()).collect::<Vec<_>>(), len, rng)
    }

    /// As [`GeneratorMap::random_with_inverse`], moving only the generators in `indices`.
    pub fn random_with_inverse_on<R: Rng + ?Sized>(
        ctx: FreeGroupContext,
        indices: &[usize],
        len: usize,
        rng: &mut R,
    ) -> (Self, Self) {
        let moves = Self::elementary_pairs_on(ctx, indices);
        let mut f = Self::identity(ctx);
        let mut f_inv = Self::identity(ctx);
        if moves.is_empty() {
            return (f, f_inv);
        }
        for _ in 0..len {
            let (m, m_inv) = &moves[rng.gen_range(0..moves.len())];
            f = f.compose(m);
            f_inv = m_inv.compose(&f_inv);
        }
        (f, f_inv)
    }
}

/// One `x<i> -> <word>` line per generator.
impl fmt::Display for GeneratorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, w) in self.images.iter().enumerate() {
            writeln!(f, "x{} -> {}", k + 1, w)?;
        }
        Ok(())
    }
}

/// True iff every exponent sum is even.
pub fn is_even(w: &Word) -> bool {
    w.exponent_sums().iter().all(|e| e % 2 == 0)
}

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix(pub Vec<Vec<i64>>);

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        IntMatrix((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect())
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.size();
        IntMatrix(
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| self.0[i][k] * other.0[k][j]).sum()).collect()).collect(),
        )
    }

    pub fn add_scalar(&self, lambda: i64) -> IntMatrix {
        let mut m = self.clone();
        for (i, row) in m.0.iter_mut().enumerate() {
            row[i] += lambda;
        }
        m
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.0.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Fraction-free Gaussian elimination; returns `(rank, determinant)`.
    fn eliminate(&self) -> (usize, i128) {
        let n = self.size();
        let mut a: Vec<Vec<i128>> = self.0.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
        let mut rank = 0;
        let mut sign = 1i128;
        let mut prev = 1i128;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| a[r][col] != 0) else { continue };
            if p != rank {
                a.swap(p, rank);
                sign = -sign;
            }
            for r in rank + 1..n {
                for c in col + 1..n {
                    a[r][c] = (a[r][c] * a[rank][col] - a[r][col] * a[rank][c]) / prev;
                }
                a[r][col] = 0;
            }
            prev = a[rank][col];
            rank += 1;
        }
        let det = if rank == n { sign * a[n - 1][n - 1] } else { 0 };
        (rank, det)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    pub fn determinant(&self) -> i128 {
        self.eliminate().1
    }

    pub fn mod2(&self) -> Mod2Matrix {
        Mod2Matrix(self.0.iter().map(|r| r.iter().map(|x| x.rem_euclid(2) == 1).collect()).collect())
    }
}

/// Square matrix over the two-element field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mod2Matrix(pub Vec<Vec<bool>>);

impl Mod2Matrix {
    pub fn identity(n: usize) -> Self {
        Mod2Matrix((0..n).map(|i| (0..n).map(|j| i == j).collect()).collect())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.0.len())
    }

    pub fn mul(&self, other: &Mod2Matrix) -> Mod2Matrix {
        let n = self.0.len();
        Mod2Matrix(
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).fold(false, |acc, k| acc ^ (self.0[i][k] & other.0[k][j]))).collect())
                .collect(),
        )
    }
}
