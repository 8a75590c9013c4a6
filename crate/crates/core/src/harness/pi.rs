//! Products of conjugate centralizer elements of a quasi-conjugation, and the
//! normal form of automorphisms commuting with all of them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::involutions::{Block, CanonicalData};
use crate::maps::GeneratorMap;
use crate::words::{FreeGroupContext, Word};

/// `product` is `σ σ′` or `σ′ σ` with `σ, σ′` in the centralizer of `φ` and
/// `conjugator σ conjugator⁻¹ = σ′`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiElement {
    pub name: String,
    pub sigma: GeneratorMap,
    pub sigma_prime: GeneratorMap,
    pub conjugator: GeneratorMap,
    pub product: GeneratorMap,
}

impl PiElement {
    /// Checks every claim the element carries against `phi`.
    pub fn verify(&self, phi: &GeneratorMap) -> std::result::Result<(), String> {
        if !self.sigma.commutes_with(phi) || !self.sigma_prime.commutes_with(phi) {
            return Err(format!("{}: a factor does not commute with the involution", self.name));
        }
        let inv = self.conjugator.inverse().map_err(|_| format!("{}: conjugator is not invertible", self.name))?;
        if self.sigma.conjugated(&self.conjugator, &inv) != self.sigma_prime {
            return Err(format!("{}: the factors are not conjugate by the recorded map", self.name));
        }
        if self.product != self.sigma.compose(&self.sigma_prime)
            && self.product != self.sigma_prime.compose(&self.sigma)
        {
            return Err(format!("{}: product does not match its factors", self.name));
        }
        Ok(())
    }

    /// The element conjugated by `g`, factors and conjugator included.
    pub fn conjugated(&self, name: &str, g: &GeneratorMap, g_inv: &GeneratorMap) -> PiElement {
        PiElement {
            name: name.to_string(),
            sigma: self.sigma.conjugated(g, g_inv),
            sigma_prime: self.sigma_prime.conjugated(g, g_inv),
            conjugator: self.conjugator.conjugated(g, g_inv),
            product: self.product.conjugated(g, g_inv),
        }
    }
}

fn map_with(ctx: FreeGroupContext, images: &[(usize, Word)]) -> GeneratorMap {
    images.iter().fold(GeneratorMap::identity(ctx), |f, (i, w)| f.with_image(*i, w.clone()))
}

fn word(ctx: FreeGroupContext, letters: &[i32]) -> Word {
    Word::reduce(letters, ctx).expect("letters are in range")
}

fn block_of(d: &CanonicalData) -> Result<&Block> {
    if !d.is_quasi_conjugation() {
        return Err(Error::Precondition("expected a quasi-conjugation".into()));
    }
    let block = &d.blocks()[0];
    if block.ys.len() < 2 {
        return Err(Error::RankTooSmall(d.context().rank()));
    }
    Ok(block)
}

/// Restricts to conjugation by the block generator `c` on `⟨Y⟩`, fixing `x`.
fn conjugation_on_block(ctx: FreeGroupContext, block: &Block, c: usize, name: &str) -> PiElement {
    let ci = c as i32;
    let sigma = map_with(ctx, &block.ys.iter().map(|&y| (y, word(ctx, &[-(y as i32)]))).collect::<Vec<_>>());
    let mut sp = vec![(c, word(ctx, &[-ci]))];
    let mut rho = Vec::new();
    for &y in block.ys.iter().filter(|&&y| y != c) {
        let yi = y as i32;
        sp.push((y, word(ctx, &[-ci, -yi, ci])));
        rho.push((y, word(ctx, &[yi, ci])));
    }
    let sigma_prime = map_with(ctx, &sp);
    PiElement {
        name: name.to_string(),
        product: sigma.compose(&sigma_prime),
        sigma,
        sigma_prime,
        conjugator: map_with(ctx, &rho),
    }
}

/// The explicit members of Π for a quasi-conjugation of rank at least 3.
///
/// With block `(x, {a, b} ∪ C)`: conjugations by `a`, by `b` and by `ab` on
/// `⟨Y⟩`, the map `π₁` sending `a ↦ b`, and its conjugate sending `a ↦ ab`.
pub fn pi_family(d: &CanonicalData) -> Result<Vec<PiElement>> {
    let block = block_of(d)?;
    let ctx = d.context();
    let (a, b) = (block.ys[0], block.ys[1]);
    let (ai, bi) = (a as i32, b as i32);

    let pa = conjugation_on_block(ctx, block, a, "conjugation by a");
    let pb = conjugation_on_block(ctx, block, b, "conjugation by b");
    let beta = map_with(ctx, &[(a, word(ctx, &[ai, bi]))]);
    let beta_inv = map_with(ctx, &[(a, word(ctx, &[ai, -bi]))]);
    let pab = pa.conjugated("conjugation by ab", &beta, &beta_inv);

    let sigma1 = map_with(ctx, &[(a, word(ctx, &[-bi])), (b, word(ctx, &[-ai]))]);
    let sigma1p = map_with(ctx, &[(a, word(ctx, &[ai, bi])), (b, word(ctx, &[-bi]))]);
    let rho1 = map_with(ctx, &[(b, word(ctx, &[-bi, -ai]))]);
    let p1 = PiElement {
        name: "a to b".into(),
        product: sigma1p.compose(&sigma1),
        sigma: sigma1,
        sigma_prime: sigma1p,
        conjugator: rho1,
    };
    let gamma = map_with(ctx, &[(b, word(ctx, &[ai, bi]))]);
    let gamma_inv = map_with(ctx, &[(b, word(ctx, &[-ai, bi]))]);
    let p2 = p1.conjugated("a to ab", &gamma, &gamma_inv);
    Ok(vec![pa, pb, pab, p1, p2])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CenPiKind {
    ConjugationByXPower,
    Extremal,
    QuasiConjugation,
}

/// `τx = x^ε` and `τy = x^k y x^{-k}` for every `y ∈ Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenPiForm {
    pub epsilon: i32,
    pub k: i64,
    pub kind: CenPiKind,
    /// For the involutive kinds: canonical data `c` and a basis change `β`
    /// with `β⁻¹ τ β = realize(c)`.
    pub certificate: Option<(CanonicalData, GeneratorMap)>,
}

/// Matches `tau` against the normal form relative to the block of `d`.
pub fn cen_pi_form(tau: &GeneratorMap, d: &CanonicalData) -> Result<CenPiForm> {
    let block = block_of(d)?;
    let ctx = d.context();
    let x = ctx.generator(block.x);
    let tx = tau.image(block.x);
    let epsilon = if *tx == x {
        1
    } else if *tx == x.invert() {
        -1
    } else {
        return Err(Error::PropertyViolated('x', format!("x maps to {tx}, not x or its inverse")));
    };
    let y0 = tau.image(block.ys[0]);
    let run = y0.letters().iter().take_while(|l| l.unsigned_abs() as usize == block.x).count() as i64;
    let k = if y0.letters().first().is_some_and(|&l| l < 0) { -run } else { run };
    let xk = x.pow(k);
    for &y in &block.ys {
        if *tau.image(y) != ctx.generator(y).conjugate_by(&xk) {
            return Err(Error::PropertyViolated('y', format!("x{y} is not conjugated by x^{k}")));
        }
    }
    if epsilon == 1 {
        if tau.is_inner()? != Some(xk.clone()) {
            return Err(Error::InternalDisagreement(format!("inner witness of x^{k} disagrees")));
        }
        return Ok(CenPiForm { epsilon, k, kind: CenPiKind::ConjugationByXPower, certificate: None });
    }
    let m = k.div_euclid(2);
    let xm = x.pow(m);
    let beta =
        block.ys.iter().fold(GeneratorMap::identity(ctx), |f, &y| f.with_image(y, ctx.generator(y).conjugate_by(&xm)));
    let (kind, canon) = if k % 2 == 0 {
        let c = CanonicalData::new(ctx, block.ys.clone(), vec![], vec![Block { x: block.x, ys: vec![] }])?;
        (CenPiKind::Extremal, c)
    } else {
        (CenPiKind::QuasiConjugation, d.clone())
    };
    let beta_inv = beta.inverse()?;
    if beta_inv.compose(&tau.compose(&beta)) != canon.realize() {
        return Err(Error::InternalDisagreement("basis change does not normalize τ".into()));
    }
    Ok(CenPiForm { epsilon, k, kind, certificate: Some((canon, beta)) })
}
