//! Free factors given by involutions, basis extraction from a parameter
//! tuple, and the coding of finite functions by automorphisms.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::involutions::{Block, CanonicalData};
use crate::maps::GeneratorMap;
use crate::stallings::SubgroupGraph;
use crate::words::{FreeGroupContext, Word};

/// The free factor `frame(Fix(realize(data))) = frame(⟨U⟩)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeFactorHandle {
    data: CanonicalData,
    frame: GeneratorMap,
    frame_inv: GeneratorMap,
    graph: SubgroupGraph,
}

impl FreeFactorHandle {
    pub fn new(data: CanonicalData) -> Self {
        let id = GeneratorMap::identity(data.context());
        Self::build(data, id.clone(), id)
    }

    /// The factor in the basis given by the automorphism `frame`.
    pub fn with_frame(data: CanonicalData, frame: GeneratorMap) -> Result<Self> {
        data.context().ensure_same(&frame.context())?;
        let frame_inv = frame.inverse()?;
        Ok(Self::build(data, frame, frame_inv))
    }

    /// `⟨x_i : i ∈ indices⟩`, realized by inverting every other generator.
    pub fn standard(ctx: FreeGroupContext, indices: &[usize]) -> Result<Self> {
        let blocks = (1..=ctx.rank()).filter(|i| !indices.contains(i)).map(|x| Block { x, ys: vec![] }).collect();
        Ok(Self::new(CanonicalData::new(ctx, indices.to_vec(), vec![], blocks)?))
    }

    fn build(data: CanonicalData, frame: GeneratorMap, frame_inv: GeneratorMap) -> Self {
        let basis: Vec<Word> = data.fixed().iter().map(|&u| frame.image(u).clone()).collect();
        let graph = SubgroupGraph::build(data.context(), &basis);
        Self { data, frame, frame_inv, graph }
    }

    pub fn context(&self) -> FreeGroupContext {
        self.data.context()
    }

    pub fn data(&self) -> &CanonicalData {
        &self.data
    }

    pub fn frame(&self) -> &GeneratorMap {
        &self.frame
    }

    pub fn graph(&self) -> &SubgroupGraph {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.data.fixed().len()
    }

    /// Images of the fixed generators under the frame.
    pub fn basis(&self) -> Vec<Word> {
        self.data.fixed().iter().map(|&u| self.frame.image(u).clone()).collect()
    }

    /// An involution (or the identity) whose fixed subgroup is this factor.
    pub fn involution(&self) -> GeneratorMap {
        self.data.realize().conjugated(&self.frame, &self.frame_inv)
    }
}

/// Membership in the factor, decided both by `φ τ_a φ⁻¹ = τ_a` and by the
/// Stallings graph; the two must agree.
pub fn fix_membership(h: &FreeFactorHandle, a: &Word) -> Result<bool> {
    h.context().ensure_same(&a.context())?;
    let phi = h.involution();
    let tau = GeneratorMap::inner(a);
    let by_maps = phi.compose(&tau).compose(&phi) == tau;
    let by_graph = h.graph.contains(a);
    if by_maps != by_graph {
        return Err(Error::InternalDisagreement(format!(
            "membership of {a}: conjugation test says {by_maps}, graph says {by_graph}"
        )));
    }
    Ok(by_maps)
}

/// True iff `A = B * C`.
pub fn free_factor_relation(a: &FreeFactorHandle, b: &FreeFactorHandle, c: &FreeFactorHandle) -> Result<bool> {
    a.context().ensure_same(&b.context())?;
    a.context().ensure_same(&c.context())?;
    let joined = b.graph.join(&c.graph);
    Ok(joined.same_subgroup(&a.graph) && a.graph.rank() == b.graph.rank() + c.graph.rank())
}

fn violated(p: char, msg: impl Into<String>) -> Error {
    Error::PropertyViolated(p, msg.into())
}

fn preserves(f: &GeneratorMap, h: &FreeFactorHandle) -> bool {
    let images: Vec<Word> = h.basis().iter().map(|b| f.apply(b)).collect();
    SubgroupGraph::build(h.context(), &images).same_subgroup(h.graph())
}

/// `Fix(ψ|_B)` for a `ψ` acting on the basis of `B` by `b ↦ b^{±1}`.
fn fix_on_factor(psi: &GeneratorMap, b: &FreeFactorHandle) -> Option<SubgroupGraph> {
    let mut fixed = Vec::new();
    for w in b.basis() {
        let img = psi.apply(&w);
        if img == w {
            fixed.push(w);
        } else if img != w.invert() {
            return None;
        }
    }
    Some(SubgroupGraph::build(b.context(), &fixed))
}

/// A basis of `B` recovered from the parameters `(A, B, φ, Ψ, π₀, π₁)`.
///
/// Each property (a) to (g) is checked by finite verification; the first
/// failing one is reported. `Fix(ψ|_B)` is computed for maps acting on the
/// basis of the handle `B` by `b ↦ b^{±1}`, the shape every element of `Ψ`
/// has; other maps fail property (a).
pub fn extract_basis(
    a: &FreeFactorHandle,
    b: &FreeFactorHandle,
    phi: &GeneratorMap,
    psis: &[GeneratorMap],
    pi0: &GeneratorMap,
    pi1: &GeneratorMap,
) -> Result<Vec<Word>> {
    let ctx = a.context();
    for m in [phi, pi0, pi1].into_iter().chain(psis) {
        ctx.ensure_same(&m.context())?;
    }
    ctx.ensure_same(&b.context())?;
    let a_basis = a.basis();
    let mut fixes = Vec::with_capacity(psis.len());
    for (k, psi) in psis.iter().enumerate() {
        if !psi.compose(psi).is_identity() {
            return Err(violated('a', format!("element {k} of the family is not an involution")));
        }
        if !psi.commutes_with(phi) || a_basis.iter().any(|u| psi.apply(u) != *u) {
            return Err(violated('a', format!("element {k} does not commute with φ or moves A")));
        }
        let fix = fix_on_factor(psi, b)
            .ok_or_else(|| violated('a', format!("element {k} does not act on B by inverting basis elements")))?;
        fixes.push(fix);
    }
    if !fixes.iter().any(|f| f.same_subgroup(b.graph())) {
        // Fix(ψ|_B) is generated by basis elements, so B is covered only if
        // some Fix(ψ|_B) contains their product, that is, all of B.
        return Err(violated('b', "no fixed subgroup contains the product of the basis of B"));
    }
    for (k, f) in fixes.iter().enumerate() {
        if f.rank() > 1 {
            let split = fixes.iter().any(|f1| {
                f1.rank() >= 1
                    && fixes
                        .iter()
                        .any(|f2| f2.rank() >= 1 && f1.rank() + f2.rank() == f.rank() && f1.join(f2).same_subgroup(f))
            });
            if !split {
                return Err(violated('c', format!("fixed subgroup of element {k} does not split")));
            }
        }
    }
    let ones: Vec<usize> = (0..fixes.len()).filter(|&k| fixes[k].rank() == 1).collect();
    for &k in &ones {
        let rest = ones.iter().filter(|&&j| j != k).fold(SubgroupGraph::trivial(ctx), |acc, &j| acc.join(&fixes[j]));
        if !(fixes[k].join(&rest).same_subgroup(b.graph()) && b.graph().rank() == 1 + rest.rank()) {
            return Err(violated('d', format!("B is not the free product of Fix of element {k} and the others")));
        }
    }
    let mut cands: Vec<Word> = Vec::new();
    for &k in &ones {
        let c = fixes[k].basis().remove(0);
        for w in [c.invert(), c] {
            if !cands.contains(&w) {
                cands.push(w);
            }
        }
    }
    for (name, p) in [("π₀", pi0), ("π₁", pi1)] {
        if !p.compose(p).is_identity() || a_basis.iter().any(|u| p.apply(u) != *u) || !preserves(p, b) {
            return Err(violated('e', format!("{name} is not an involution fixing A and preserving B")));
        }
    }
    let (c0, c1): (Vec<Word>, Vec<Word>) = cands.iter().cloned().partition(|c| pi0.apply(c) == c.invert());
    let maps_into = |from: &[Word], to: &[Word]| from.iter().all(|c| to.contains(&pi1.apply(c)));
    if c0.len() != c1.len() || !maps_into(&c0, &c1) || !maps_into(&c1, &c0) {
        return Err(violated('f', "π₁ does not exchange the candidates inverted by π₀ with the rest"));
    }
    for c in &c1 {
        if !c0.iter().any(|c0| pi0.apply(c) == c.conjugate_by(c0)) {
            return Err(violated('g', format!("π₀({c}) is not a conjugate of {c} by an inverted candidate")));
        }
    }
    let b0: Vec<Word> =
        c0.iter().filter(|c| cands.iter().any(|c2| pi0.apply(c2) == c2.conjugate_by(c))).cloned().collect();
    let mut out = b0.clone();
    out.extend(b0.iter().map(|c| pi1.apply(c)));
    Ok(out)
}

/// A parameter tuple for basis extraction.
#[derive(Debug, Clone)]
pub struct ExtractionParams {
    pub a: FreeFactorHandle,
    pub b: FreeFactorHandle,
    pub phi: GeneratorMap,
    pub psis: Vec<GeneratorMap>,
    pub pi0: GeneratorMap,
    pub pi1: GeneratorMap,
}

impl ExtractionParams {
    /// The standard tuple at even rank `n ≥ 4`: `B` spanned by the last
    /// `2k` generators with `2k` the largest even number `≤ n/2`, `A` by the
    /// rest, `φ` pairing `b_i` with `a_i`, and `Ψ` all sign patterns on `B`.
    pub fn canonical(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::Precondition(format!("canonical tuples need even rank at least 4, got {n}")));
        }
        let ctx = FreeGroupContext::new(n)?;
        let bk = 2 * (n / 4);
        let ar = n - bk;
        let a_idx: Vec<usize> = (1..=ar).collect();
        let b_idx: Vec<usize> = (ar + 1..=n).collect();
        let a = FreeFactorHandle::standard(ctx, &a_idx)?;
        let b = FreeFactorHandle::standard(ctx, &b_idx)?;
        let blocks =
            a_idx.iter().map(|&x| Block { x, ys: if x <= bk { vec![b_idx[x - 1]] } else { vec![] } }).collect();
        let phi = CanonicalData::new(ctx, vec![], vec![], blocks)?.realize();
        let psis = (0..1u32 << bk)
            .map(|mask| {
                b_idx.iter().enumerate().fold(GeneratorMap::identity(ctx), |f, (k, &j)| {
                    if mask >> k & 1 == 1 {
                        f.with_image(j, ctx.generator(j).invert())
                    } else {
                        f
                    }
                })
            })
            .collect();
        let half = bk / 2;
        let pi_blocks = (0..half).map(|i| Block { x: b_idx[i], ys: vec![b_idx[half + i]] }).collect();
        let pi0 = CanonicalData::new(ctx, a_idx.clone(), vec![], pi_blocks)?.realize();
        let pi1 = (0..half).fold(GeneratorMap::identity(ctx), |f, i| {
            let (p, q) = (b_idx[i], b_idx[half + i]);
            f.with_image(p, ctx.generator(q)).with_image(q, ctx.generator(p))
        });
        Ok(Self { a, b, phi, psis, pi0, pi1 })
    }

    /// Every map conjugated by `beta`, which must fix the generators of `A`
    /// and preserve `B`; `B` is re-framed so its basis is `beta(basis)`.
    pub fn transported(&self, beta: &GeneratorMap) -> Result<Self> {
        let beta_inv = beta.inverse()?;
        let frame = beta.compose(self.b.frame());
        let conj = |m: &GeneratorMap| m.conjugated(beta, &beta_inv);
        Ok(Self {
            a: self.a.clone(),
            b: FreeFactorHandle::with_frame(self.b.data().clone(), frame)?,
            phi: conj(&self.phi),
            psis: self.psis.iter().map(conj).collect(),
            pi0: conj(&self.pi0),
            pi1: conj(&self.pi1),
        })
    }

    pub fn extract(&self) -> Result<Vec<Word>> {
        extract_basis(&self.a, &self.b, &self.phi, &self.psis, &self.pi0, &self.pi1)
    }
}

/// A total function on `{1, ..., m}`, `table[i-1] = f(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteFunction {
    m: usize,
    table: Vec<usize>,
}

impl FiniteFunction {
    pub fn new(m: usize, table: Vec<usize>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("functions need a nonempty domain".into()));
        }
        if table.len() != m || table.iter().any(|&v| v == 0 || v > m) {
            return Err(Error::Precondition(format!("table must list {m} values in 1..={m}")));
        }
        Ok(Self { m, table })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i - 1]
    }

    /// All `m^m` functions in lexicographic order of their tables.
    pub fn all(m: usize) -> impl Iterator<Item = FiniteFunction> {
        let total = (m as u32).checked_pow(m as u32).expect("m^m fits");
        (0..total).map(move |mut code| {
            let mut table = vec![0; m];
            for v in table.iter_mut().rev() {
                *v = (code % m as u32) as usize + 1;
                code /= m as u32;
            }
            FiniteFunction { m, table }
        })
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        Self { m, table: (0..m).map(|_| rng.gen_range(1..=m)).collect() }
    }

    /// Parses a comma-separated table such as `2,3,1`.
    pub fn parse(text: &str, m: usize) -> Result<Self> {
        let table = text
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad table entry {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, table)
    }
}

impl fmt::Display for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.table.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// A split of the standard basis of `F_{2m}` into `B₁` and `B₂ = π₁ B₁`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSplit {
    ctx: FreeGroupContext,
    b1: Vec<usize>,
    pi0: GeneratorMap,
    pi1: GeneratorMap,
    /// `partner[k]` is the index of `π₁(x_{b1[k]})`.
    partner: Vec<usize>,
}

impl BasisSplit {
    /// `B₁ = {x_1, ..., x_m}`, `π₀` inverting `x_{m+i}`, `π₁` swapping `x_i` and `x_{m+i}`.
    pub fn standard(m: usize) -> Result<Self> {
        let ctx = FreeGroupContext::new(2 * m)?;
        let mut pi0 = GeneratorMap::identity(ctx);
        let mut pi1 = GeneratorMap::identity(ctx);
        for i in 1..=m {
            pi0 = pi0.with_image(m + i, ctx.generator(m + i).invert());
            pi1 = pi1.with_image(i, ctx.generator(m + i)).with_image(m + i, ctx.generator(i));
        }
        Self::new(ctx, (1..=m).collect(), pi0, pi1)
    }

    pub fn new(ctx: FreeGroupContext, b1: Vec<usize>, pi0: GeneratorMap, pi1: GeneratorMap) -> Result<Self> {
        let n = ctx.rank();
        if !n.is_multiple_of(2) || b1.len() * 2 != n {
            return Err(Error::Precondition(format!("B1 must hold half of the {n} generators")));
        }
        for i in 1..=n {
            let fixed = *pi0.image(i) == ctx.generator(i);
            if fixed != b1.contains(&i) {
                return Err(Error::Precondition(format!("π₀ fixes x{i} exactly when x{i} lies in B1 fails")));
            }
        }
        let mut partner = Vec::with_capacity(b1.len());
        for &i in &b1 {
            match pi1.image(i).letters() {
                &[j] if j > 0 && !b1.contains(&(j as usize)) && !partner.contains(&(j as usize)) => {
                    partner.push(j as usize)
                }
                _ => return Err(Error::Precondition(format!("π₁ must send x{i} to a distinct generator outside B1"))),
            }
        }
        Ok(Self { ctx, b1, pi0, pi1, partner })
    }

    pub fn context(&self) -> FreeGroupContext {
        self.ctx
    }

    pub fn m(&self) -> usize {
        self.b1.len()
    }

    pub fn b1(&self) -> &[usize] {
        &self.b1
    }

    pub fn pi0(&self) -> &GeneratorMap {
        &self.pi0
    }

    pub fn pi1(&self) -> &GeneratorMap {
        &self.pi1
    }
}

/// `σ` fixing `B₁` with `σ(π₁ b_i) = π₁ b_i · b_{f(i)}`.
pub fn encode_function(f: &FiniteFunction, split: &BasisSplit) -> Result<GeneratorMap> {
    if f.m != split.m() {
        return Err(Error::Precondition(format!("function on {} points, split of size {}", f.m, split.m())));
    }
    let ctx = split.ctx;
    Ok(split.partner.iter().enumerate().fold(GeneratorMap::identity(ctx), |s, (k, &p)| {
        let target = ctx.generator(split.b1[f.table[k] - 1]);
        s.with_image(p, &ctx.generator(p) * &target)
    }))
}

pub fn decode_function(sigma: &GeneratorMap, split: &BasisSplit) -> Result<FiniteFunction> {
    split.ctx.ensure_same(&sigma.context())?;
    let ctx = split.ctx;
    for (k, &i) in split.b1.iter().enumerate() {
        if *sigma.image(i) != ctx.generator(i) {
            return Err(Error::NotFunctionEncoding { index: k + 1, reason: format!("x{i} in B1 is moved") });
        }
    }
    let mut table = Vec::with_capacity(split.m());
    for (k, &p) in split.partner.iter().enumerate() {
        let suffix = &ctx.generator(p).invert() * sigma.image(p);
        let j = match suffix.letters() {
            &[j] if j > 0 => split.b1.iter().position(|&b| b == j as usize),
            _ => None,
        };
        match j {
            Some(j) => table.push(j + 1),
            None => {
                return Err(Error::NotFunctionEncoding {
                    index: k + 1,
                    reason: format!("suffix {suffix} is not a single generator of B1"),
                })
            }
        }
    }
    FiniteFunction::new(split.m(), table)
}
