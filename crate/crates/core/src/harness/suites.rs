//! The individual suites. Each takes a validated config and never panics on
//! a failed check; failures become counterexamples.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::pi::{cen_pi_form, pi_family, CenPiKind};
use super::search::{commutant_automorphisms, find_conjugator, nielsen_ball};
use super::{Recorder, SampleConfig, SuiteReport};
use crate::error::Result;
use crate::interpretation::{decode_function, encode_function, BasisSplit, ExtractionParams, FiniteFunction};
use crate::involutions::{
    build_conjugator, conjugacy_test, decompose_inverted, snake_obstruction, square_root_of_bead, Block, CanonicalData,
    InvertedForm,
};
use crate::maps::GeneratorMap;
use crate::stallings::SubgroupGraph;
use crate::whitehead::{is_primitive, product_of_two_primitives};
use crate::words::{random_word, words_up_to, FreeGroupContext, Word};

fn ctx(n: usize) -> FreeGroupContext {
    FreeGroupContext::new(n).expect("suite ranks are at least 2")
}

/// Rank of instance `i` when a suite cycles through `lo..=hi`.
fn cycled_rank(i: usize, lo: usize, hi: usize) -> usize {
    lo + i % (hi.max(lo) - lo + 1)
}

/// Random word of length `≤ max_len` in the generators `indices`.
pub(crate) fn random_word_on<R: Rng + ?Sized>(
    ctx: FreeGroupContext,
    indices: &[usize],
    max_len: usize,
    rng: &mut R,
) -> Word {
    if indices.is_empty() {
        return ctx.identity();
    }
    let len = rng.gen_range(0..=max_len);
    let letters: Vec<i32> = (0..len)
        .map(|_| {
            let g = indices[rng.gen_range(0..indices.len())] as i32;
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    Word::reduce(&letters, ctx).expect("indices are in range")
}

fn basis_of(gens: &[Word]) -> SubgroupGraph {
    SubgroupGraph::build(gens[0].context(), gens)
}

/// True iff `images` is a basis of the subgroup generated by the generators `ys`.
fn is_basis_of(ctx: FreeGroupContext, images: &[Word], ys: &[usize]) -> bool {
    let target = SubgroupGraph::build(ctx, &ys.iter().map(|&y| ctx.generator(y)).collect::<Vec<_>>());
    let g = SubgroupGraph::build(ctx, images);
    g.same_subgroup(&target) && g.rank() == images.len()
}

/// Dimensions of the `+1` and `-1` eigenspaces of the induced integer matrix.
fn eigen_dims(f: &GeneratorMap) -> (usize, usize) {
    let m = f.induced_matrix();
    let n = m.size();
    (n - m.add_scalar(-1).rank(), n - m.add_scalar(1).rank())
}

/// Soft data with at least one block, so the realization is not the identity.
fn random_soft<R: Rng + ?Sized>(c: FreeGroupContext, rng: &mut R) -> CanonicalData {
    loop {
        let d = CanonicalData::random(c, false, rng);
        if !d.blocks().is_empty() {
            return d;
        }
    }
}

struct BallCache {
    radius: usize,
    balls: BTreeMap<usize, Vec<(GeneratorMap, GeneratorMap)>>,
}

impl BallCache {
    fn new(radius: usize) -> Self {
        Self { radius, balls: BTreeMap::new() }
    }

    fn get(&mut self, c: FreeGroupContext) -> &[(GeneratorMap, GeneratorMap)] {
        let r = self.radius;
        self.balls.entry(c.rank()).or_insert_with(|| nielsen_ball(c, r))
    }
}

pub fn canonical_forms(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("canonical-forms", *cfg);
    let words_per_instance = 24;
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let c = ctx(cycled_rank(i, 2, cfg.rank));
        let d = CanonicalData::random(c, true, &mut rng);
        let f = d.realize();
        let fix = d.fixed_subgroup();
        if !f.compose(&f).is_identity() {
            r.check(i, false, || format!("square of the realization of\n{d}is not the identity"), &[]);
            continue;
        }
        let u = d.fixed().to_vec();
        let outside: Vec<usize> = (1..=c.rank()).filter(|j| !u.contains(j)).collect();
        let mut bad = None;
        for k in 0..words_per_instance {
            let w = match k % 4 {
                0 => random_word_on(c, &u, cfg.max_image_length, &mut rng),
                1 if !outside.is_empty() => {
                    let v = random_word_on(c, &u, cfg.max_image_length - 1, &mut rng);
                    let g = c.generator(*outside.choose(&mut rng).unwrap());
                    &v * &g
                }
                _ => random_word(c, cfg.max_image_length, &mut rng),
            };
            if (f.apply(&w) == w) != fix.contains(&w) {
                bad = Some(w);
                break;
            }
        }
        r.check(
            i,
            bad.is_none(),
            || format!("fixed-word test and membership in <U> disagree for\n{d}"),
            bad.as_slice(),
        );
    }
    r.finish()
}

pub fn conjugacy_criterion(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("conjugacy-criterion", *cfg);
    let mut balls = BallCache::new(cfg.max_image_length.div_ceil(2));
    let (mut by_eigen, mut by_blocks) = (0, 0);
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let c = ctx(cycled_rank(i, 2, cfg.rank));
        let d1 = random_soft(c, &mut rng);
        let d2 = d1.random_relabeling(&mut rng);
        let ok = build_conjugator(&d1, &d2)
            .is_ok_and(|s| s.inverse().is_ok_and(|si| si.compose(&d1.realize().compose(&s)) == d2.realize()));
        r.check(i, ok, || format!("no valid conjugator built from\n{d1}to\n{d2}"), &[]);
    }
    for i in 0..cfg.sample_count {
        let inst = cfg.sample_count + i;
        let mut rng = cfg.rng(inst);
        let c = ctx(cycled_rank(i, 2, cfg.rank));
        let d1 = random_soft(c, &mut rng);
        let d2 = loop {
            let d = random_soft(c, &mut rng);
            if d.classify() != d1.classify() {
                break d;
            }
        };
        let (f1, f2) = (d1.realize(), d2.realize());
        if let Some(s) = find_conjugator(&f1, &f2, balls.get(c)) {
            r.check(inst, false, || format!("bounded search conjugates\n{d1}to\n{d2}via\n{s}"), &[]);
            continue;
        }
        let certified = if eigen_dims(&f1) != eigen_dims(&f2) {
            by_eigen += 1;
            true
        } else {
            by_blocks += 1;
            conjugacy_test(&d1, &d2) == Ok(false)
        };
        r.check(inst, certified, || format!("no invariant separates\n{d1}and\n{d2}"), &[]);
    }
    r.note(format!(
        "bounded search: products of at most {} elementary Nielsen maps",
        2 * cfg.max_image_length.div_ceil(2)
    ));
    r.note(format!("non-conjugacy certified by abelianization eigenspaces: {by_eigen}"));
    r.note(format!("non-conjugacy certified by block multiset only: {by_blocks}"));
    r.finish()
}

pub fn decomposition(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("decomposition", *cfg);
    let mut odd = 0;
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let c = ctx(cycled_rank(i, 2, cfg.rank));
        let d = CanonicalData::quasi_conjugation(c);
        let phi = d.realize();
        let w = random_word(c, cfg.max_image_length, &mut rng);
        let delta = rng.gen_range(0..2);
        let a = &(&phi.apply(&w) * &c.generator(1).pow(delta)) * &w.invert();
        odd += delta;
        let outcome = decompose_inverted(&d, &a);
        let ok = match &outcome {
            Ok(form) if form.reconstruct(&phi) != a => Err("does not reconstruct".to_string()),
            Ok(InvertedForm::Coboundary(_)) if delta == 0 => Ok(()),
            Ok(InvertedForm::BlockForm(_, 1)) if delta == 1 => Ok(()),
            Ok(form) => Err(format!("wrong shape {form:?} for delta = {delta}")),
            Err(e) => Err(e.to_string()),
        };
        r.check(i, ok.is_ok(), || format!("decomposition failed: {}", ok.unwrap_err()), &[a.clone(), w.clone()]);
    }
    r.note(format!("instances with an odd power of x: {odd}"));
    r.finish()
}

/// `(number of blocks, block size, fixed rank)` with an even number of equal
/// blocks and fixed part smaller than the block size.
fn bead_shapes(max_rank: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for blocks in (2..=max_rank).step_by(2) {
        for size in 1..=max_rank / blocks {
            for u in 0..size {
                if blocks * size + u <= max_rank && blocks * size + u >= 2 {
                    out.push((blocks, size, u));
                }
            }
        }
    }
    out
}

fn bead_data(blocks: usize, size: usize, u: usize) -> CanonicalData {
    let c = ctx(blocks * size + u);
    let bs = (0..blocks).map(|k| Block { x: k * size + 1, ys: (k * size + 2..=(k + 1) * size).collect() }).collect();
    CanonicalData::new(c, (blocks * size + 1..=blocks * size + u).collect(), vec![], bs).expect("valid bead")
}

/// All automorphisms of `F_2` with images of length `≤ max_len`, by nested loops.
fn all_rank_two_automorphisms(max_len: usize) -> Vec<GeneratorMap> {
    let c = ctx(2);
    let words: Vec<Word> = words_up_to(c, max_len).into_iter().filter(|w| !w.is_identity()).collect();
    let mut out = Vec::new();
    for a in &words {
        for b in &words {
            let f = GeneratorMap::new(c, vec![a.clone(), b.clone()]).expect("two images");
            if f.is_automorphism() {
                out.push(f);
            }
        }
    }
    out
}

pub fn squares(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("squares", *cfg);
    let shapes = bead_shapes(cfg.rank);
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let (blocks, size, u) = shapes[i % shapes.len()];
        let d = bead_data(blocks, size, u).random_relabeling(&mut rng);
        let ok = square_root_of_bead(&d).is_ok_and(|s| s.is_automorphism() && s.compose(&s) == d.realize());
        r.check(i, ok, || format!("no verified square root for\n{d}"), &[]);
    }
    r.note(format!("bead shapes (blocks, size, fixed rank): {shapes:?}"));

    let inst = cfg.sample_count;
    let phi = CanonicalData::quasi_conjugation(ctx(2)).realize();
    let autos = all_rank_two_automorphisms(cfg.max_image_length);
    let roots: Vec<_> = autos.iter().filter(|s| s.compose(s) == phi).collect();
    r.check(inst, roots.is_empty(), || format!("square root of the rank-2 quasi-conjugation found: {}", roots[0]), &[]);
    r.note(format!(
        "exhaustive rank-2 search: {} automorphisms with image length <= {}, {} square roots",
        autos.len(),
        cfg.max_image_length,
        roots.len()
    ));

    let mut snakes = 0;
    for size in 2..=cfg.rank {
        for u in 0..size.min(cfg.rank + 1 - size) {
            let c = ctx(size + u);
            let d = CanonicalData::new(
                c,
                (size + 1..=size + u).collect(),
                vec![],
                vec![Block { x: 1, ys: (2..=size).collect() }],
            )
            .expect("valid snake");
            let ok = snake_obstruction(&d).is_ok_and(|cert| {
                let m = d.realize().induced_matrix();
                let minus: Vec<i64> = cert.eigenvector.iter().map(|v| -v).collect();
                m.0 == cert.matrix && m.apply(&cert.eigenvector) == minus && c.rank() - m.add_scalar(1).rank() == 1
            });
            r.check(inst + 1 + snakes, ok, || format!("snake certificate invalid for\n{d}"), &[]);
            snakes += 1;
        }
    }
    r.note(format!("snake certificates checked: {snakes}"));
    r.finish()
}

/// Which centralizer form `sigma` has relative to the block `(x, ys)`, if any.
fn centralizer_form(sigma: &GeneratorMap, x: usize, ys: &[usize]) -> Option<u8> {
    let c = sigma.context();
    let xw = c.generator(x);
    let images: Vec<Word> = ys.iter().map(|&y| sigma.image(y).clone()).collect();
    if *sigma.image(x) == xw {
        return is_basis_of(c, &images, ys).then_some(1);
    }
    if *sigma.image(x) == xw.invert() {
        let theta: Vec<Word> = images.iter().map(|w| w.conjugate_by(&xw.invert())).collect();
        return is_basis_of(c, &theta, ys).then_some(2);
    }
    None
}

pub fn centralizer_form_suite(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("centralizer-form", *cfg);
    let c = ctx(cfg.rank);
    let d = CanonicalData::quasi_conjugation(c);
    let phi = d.realize();
    let block = &d.blocks()[0];
    let found = commutant_automorphisms(c, std::slice::from_ref(&phi), cfg.max_image_length);
    let mut counts = [0usize; 2];
    for (i, s) in found.iter().enumerate() {
        let form = centralizer_form(s, block.x, &block.ys);
        if let Some(k) = form {
            counts[k as usize - 1] += 1;
        }
        r.check(i, form.is_some(), || format!("centralizer element matches neither form:\n{s}"), s.images());
    }
    if cfg.rank == 2 {
        let brute =
            all_rank_two_automorphisms(cfg.max_image_length).into_iter().filter(|s| s.commutes_with(&phi)).count();
        r.check(
            found.len(),
            brute == found.len(),
            || format!("search found {} centralizer elements, direct enumeration {brute}", found.len()),
            &[],
        );
    }
    r.note(format!(
        "centralizer elements with image length <= {}: {} (x fixed: {}, x inverted: {})",
        cfg.max_image_length,
        found.len(),
        counts[0],
        counts[1]
    ));
    r.finish()
}

/// Elements of the centralizer of `realize(d)` for a quasi-conjugation:
/// Nielsen maps on `Y`, optionally followed by the involution itself.
fn random_quasi_centralizer<R: Rng + ?Sized>(
    d: &CanonicalData,
    len: usize,
    rng: &mut R,
) -> (GeneratorMap, GeneratorMap) {
    let c = d.context();
    let (s, s_inv) = GeneratorMap::random_with_inverse_on(c, &d.blocks()[0].ys, len, rng);
    if rng.gen_bool(0.5) {
        let phi = d.realize();
        (s.compose(&phi), phi.compose(&s_inv))
    } else {
        (s, s_inv)
    }
}

fn random_signed_permutation<R: Rng + ?Sized>(c: FreeGroupContext, rng: &mut R) -> (GeneratorMap, GeneratorMap) {
    let mut perm: Vec<usize> = (1..=c.rank()).collect();
    perm.shuffle(rng);
    let images: Vec<Word> =
        perm.iter().map(|&p| if rng.gen_bool(0.5) { c.generator(p) } else { c.generator(p).invert() }).collect();
    let s = GeneratorMap::new(c, images).expect("rank images");
    let s_inv = s.inverse().expect("signed permutations are invertible");
    (s, s_inv)
}

pub fn anti_commutativity(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("anti-commutativity", *cfg);
    let mut commuting = [0usize; 2];
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let c = ctx(cycled_rank(i, 2, cfg.rank));
        let quasi = CanonicalData::quasi_conjugation(c);
        let sym = CanonicalData::symmetry(c);
        for (k, d) in [quasi, sym].iter().enumerate() {
            let phi = d.realize();
            let (s, s_inv) = match (i % 4, k) {
                (0, 0) => random_quasi_centralizer(d, cfg.max_image_length, &mut rng),
                (0, _) => random_signed_permutation(c, &mut rng),
                _ => GeneratorMap::random_with_inverse(c, cfg.max_image_length, &mut rng),
            };
            let psi = s_inv.compose(&phi.compose(&s));
            let commutes = psi.commutes_with(&phi);
            if commutes {
                commuting[k] += 1;
            }
            r.check(
                2 * i + k,
                !commutes || psi == phi,
                || format!("distinct commuting conjugates:\n{phi}and\n{psi}"),
                &[],
            );
        }
    }
    r.note(format!("commuting conjugates (quasi-conjugation, symmetry): {commuting:?}"));

    // The extremal class is not anti-commutative.
    let c = ctx(2);
    let e1 = CanonicalData::extremal(c).realize();
    let t = GeneratorMap::transposition(c, 1, 2);
    let e2 = t.compose(&e1.compose(&t));
    r.check(
        2 * cfg.sample_count,
        e1 != e2 && e1.commutes_with(&e2),
        || "control: the two rank-2 extremal involutions should differ and commute".into(),
        &[],
    );
    r.finish()
}

/// Checks `tau` against every element of Π for `d` and its normal form.
pub fn cen_pi_form_check(tau: &GeneratorMap, d: &CanonicalData, cfg: &SampleConfig) -> Result<SuiteReport> {
    let fam = pi_family(d)?;
    let mut r = Recorder::new("cen-pi-form", *cfg);
    for (i, p) in fam.iter().enumerate() {
        r.check(i, tau.commutes_with(&p.product), || format!("does not commute with {}", p.name), tau.images());
    }
    let form = cen_pi_form(tau, d);
    r.check(fam.len(), form.is_ok(), || format!("no normal form: {}", form.as_ref().unwrap_err()), tau.images());
    if let Ok(f) = form {
        r.note(format!("epsilon = {}, k = {}, {:?}", f.epsilon, f.k, f.kind));
    }
    Ok(r.finish())
}

/// Independent check of a normal form's classification.
fn classification_holds(tau: &GeneratorMap, d: &CanonicalData) -> std::result::Result<(i32, i64), String> {
    let f = cen_pi_form(tau, d).map_err(|e| e.to_string())?;
    let x = d.context().generator(d.blocks()[0].x);
    let expected = match (f.epsilon, f.k.rem_euclid(2)) {
        (1, _) => CenPiKind::ConjugationByXPower,
        (_, 0) => CenPiKind::Extremal,
        _ => CenPiKind::QuasiConjugation,
    };
    if f.kind != expected {
        return Err(format!("classified as {:?}, parity predicts {expected:?}", f.kind));
    }
    match (&f.kind, &f.certificate) {
        (CenPiKind::ConjugationByXPower, None) if *tau == GeneratorMap::inner(&x.pow(f.k)) => {}
        (CenPiKind::Extremal, Some((c, b))) | (CenPiKind::QuasiConjugation, Some((c, b))) => {
            let shape = if f.kind == CenPiKind::Extremal { c.is_extremal() } else { c.is_quasi_conjugation() };
            let b_inv = b.inverse().map_err(|e| e.to_string())?;
            if !shape || !tau.is_involution() || b_inv.compose(&tau.compose(b)) != c.realize() {
                return Err("certificate does not normalize τ".into());
            }
        }
        _ => return Err("certificate does not match the classification".into()),
    }
    Ok((f.epsilon, f.k))
}

pub fn cen_pi(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("cen-pi", *cfg);
    let c = ctx(cfg.rank.max(3));
    let d = CanonicalData::quasi_conjugation(c);
    let phi = d.realize();
    let fam = match pi_family(&d) {
        Ok(f) => f,
        Err(e) => {
            r.fail(0, e.to_string(), &[]);
            return r.finish();
        }
    };
    let mut inst = 0;
    for p in &fam {
        let v = p.verify(&phi);
        r.check(inst, v.is_ok(), || v.unwrap_err(), p.product.images());
        inst += 1;
    }
    let maps: Vec<GeneratorMap> = fam.iter().map(|p| p.product.clone()).collect();

    let found = commutant_automorphisms(c, &maps, cfg.max_image_length);
    let mut forms = Vec::new();
    for t in &found {
        let res = classification_holds(t, &d);
        if let Ok(f) = &res {
            forms.push(*f);
        }
        r.check(inst, res.is_ok(), || res.unwrap_err(), t.images());
        inst += 1;
    }
    forms.sort();
    let half = (cfg.max_image_length as i64 - 1) / 2;
    let expected: Vec<(i32, i64)> = [-1, 1].iter().flat_map(|&e| (-half..=half).map(move |k| (e, k))).collect();
    r.check(inst, forms == expected, || format!("commutant forms {forms:?}, expected {expected:?}"), &[]);
    inst += 1;
    r.note(format!("exhaustive commutant with image length <= {}: {} elements", cfg.max_image_length, found.len()));

    let x = c.generator(d.blocks()[0].x);
    let (mut commuting_random, mut kinds) = (0, BTreeMap::new());
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let tau = if i % 2 == 0 {
            let eps = if rng.gen_bool(0.5) { 1 } else { -1 };
            let k = rng.gen_range(-8..=8i64);
            let xk = x.pow(k);
            d.blocks()[0].ys.iter().fold(GeneratorMap::identity(c).with_image(d.blocks()[0].x, x.pow(eps)), |f, &y| {
                f.with_image(y, c.generator(y).conjugate_by(&xk))
            })
        } else {
            GeneratorMap::random_with_inverse(c, cfg.max_image_length, &mut rng).0
        };
        let in_cen = maps.iter().all(|m| tau.commutes_with(m));
        if i % 2 == 0 {
            r.check(inst, in_cen, || "normal-form map does not commute with Π".into(), tau.images());
        } else if in_cen {
            commuting_random += 1;
        }
        if in_cen {
            let res = classification_holds(&tau, &d);
            if let Ok((e, k)) = res {
                *kinds.entry((e, k.rem_euclid(2))).or_insert(0usize) += 1;
            }
            r.check(inst, res.is_ok(), || res.unwrap_err(), tau.images());
        }
        inst += 1;
    }
    r.note(format!("random automorphisms that commute with Π: {commuting_random}"));
    r.note(format!("sampled normal forms by (epsilon, k mod 2): {kinds:?}"));
    r.finish()
}

pub fn intersection(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("intersection", *cfg);
    let mut inst = 0;
    for n in 3..=cfg.rank.max(3) {
        let c = ctx(n);
        for x in 1..=n {
            let xw = c.generator(x);
            let target = SubgroupGraph::build(c, std::slice::from_ref(&xw));
            for a in (1..=n).filter(|&a| a != x) {
                for b in (1..=n).filter(|&b| b != x && b != a) {
                    let ha = basis_of(&[xw.clone(), c.generator(a)]);
                    let hb = basis_of(&[xw.clone(), c.generator(b)]);
                    let meet = ha.intersect(&hb);
                    let ok =
                        meet.same_subgroup(&target) && meet.contains(&xw.pow(3)) && !meet.contains(&c.generator(a));
                    r.check(inst, ok, || format!("<x{x}, x{a}> and <x{x}, x{b}> at rank {n}"), &[]);
                    inst += 1;
                }
            }
        }
    }
    r.finish()
}

pub fn primitive_conjugations(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("primitive-conjugations", *cfg);
    let c = ctx(cfg.rank);
    let mut trivial = 0;
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let omit = rng.gen_range(1..=c.rank());
        let support: Vec<usize> = (1..=c.rank()).filter(|&j| j != omit).collect();
        let a = random_word_on(c, &support, cfg.max_image_length, &mut rng);
        if a.is_identity() {
            trivial += 1;
            r.check(i, GeneratorMap::inner(&a).is_identity(), || "conjugation by e is not the identity".into(), &[]);
            continue;
        }
        let res = product_of_two_primitives(&a).and_then(|(p1, p2)| {
            let prim = is_primitive(&p1)? && is_primitive(&p2)?;
            let tau = GeneratorMap::inner(&p1).compose(&GeneratorMap::inner(&p2));
            Ok(prim && &p1 * &p2 == a && tau == GeneratorMap::inner(&a))
        });
        r.check(i, res == Ok(true), || format!("product of two primitives fails: {res:?}"), std::slice::from_ref(&a));
    }
    r.note(format!("trivial samples: {trivial}"));
    r.finish()
}

/// The symmetry `x ↦ x⁻¹, y ↦ x y⁻¹ x⁻¹` commuting with a quasi-conjugation.
fn natural_symmetry(d: &CanonicalData) -> GeneratorMap {
    let c = d.context();
    let block = &d.blocks()[0];
    let x = c.generator(block.x);
    block.ys.iter().fold(GeneratorMap::identity(c).with_image(block.x, x.invert()), |f, &y| {
        f.with_image(y, c.generator(y).invert().conjugate_by(&x))
    })
}

pub fn product_class(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("product-class", *cfg);
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let c = ctx(cycled_rank(i, 2, cfg.rank));
        let d = CanonicalData::quasi_conjugation(c);
        let phi = d.realize();
        let block = &d.blocks()[0];
        let psi0 = natural_symmetry(&d);
        let basis0: Vec<Word> = std::iter::once(c.generator(block.x))
            .chain(block.ys.iter().map(|&y| &c.generator(block.x) * &c.generator(y)))
            .collect();
        let (rho, rho_inv) = GeneratorMap::random_with_inverse_on(c, &block.ys, cfg.max_image_length, &mut rng);
        let (rho2, rho2_inv) = if i % 10 == 0 {
            (rho.clone(), rho_inv.clone())
        } else {
            GeneratorMap::random_with_inverse_on(c, &block.ys, cfg.max_image_length, &mut rng)
        };
        let psi = psi0.conjugated(&rho, &rho_inv);
        let psi2 = psi0.conjugated(&rho2, &rho2_inv);
        let symmetric = [(&psi, &rho), (&psi2, &rho2)].iter().all(|(p, g)| {
            p.is_involution()
                && p.commutes_with(&phi)
                && basis0.iter().all(|b| {
                    let gb = g.apply(b);
                    p.apply(&gb) == gb.invert()
                })
        });
        let (chi, chi2) = (phi.compose(&psi), phi.compose(&psi2));
        let conj = rho2.compose(&rho_inv);
        let conj_inv = rho.compose(&rho2_inv);
        let expected0 = CanonicalData::new(
            c,
            vec![block.x],
            vec![],
            block.ys.iter().map(|&y| Block { x: y, ys: vec![] }).collect(),
        )
        .expect("valid data")
        .realize();
        let ok = symmetric && chi.conjugated(&conj, &conj_inv) == chi2 && phi.compose(&psi0) == expected0;
        r.check(i, ok, || "product of the quasi-conjugation with a natural symmetry failed".into(), &[]);
    }
    if cfg.rank >= 3 {
        let res = twisted_counterexample();
        r.check(cfg.sample_count, res.is_ok(), || res.unwrap_err(), &[]);
        r.note("twisted rank-3 symmetry: product has a block of size two, not conjugate to the natural product");
    }
    r.finish()
}

/// The rank-3 example: fixed `u0 = x3`, block `(x1, {x2})`, and a symmetry
/// twisted by `u0` whose product with the involution has a block of size two.
pub fn twisted_counterexample() -> std::result::Result<(), String> {
    let c = ctx(3);
    let w = |s: &str| Word::parse(s, c).expect("valid word");
    let g = |imgs: [&str; 3]| GeneratorMap::new(c, imgs.iter().map(|s| w(s)).collect()).expect("rank 3");
    let d = CanonicalData::parse("U: x3\nblocks: [x1 | x2]", Some(3)).map_err(|e| e.to_string())?;
    let phi = d.realize();
    let twisted = g(["x3 x1- x3-", "x3 x1 x2- x1- x3-", "x3-"]);
    let natural = g(["x1-", "x1 x2- x1-", "x3-"]);
    for (name, psi, basis) in
        [("twisted", &twisted, ["x3", "x3 x1", "x3 x1 x2"]), ("natural", &natural, ["x1", "x1 x2", "x3"])]
    {
        let b = g(basis);
        if !psi.is_involution() || !psi.commutes_with(&phi) || !b.is_automorphism() {
            return Err(format!("{name} symmetry is not an involution commuting with the fixed involution"));
        }
        if b.images().iter().any(|v| psi.apply(v) != v.invert()) {
            return Err(format!("{name} symmetry does not invert its basis"));
        }
    }
    let cases = [
        (phi.compose(&twisted), g(["x3", "x1", "x3 x2"]), "blocks: [x1 | x2] [x3 |]"),
        (phi.compose(&natural), GeneratorMap::identity(c), "U: x1\nblocks: [x3 |] [x2 |]"),
    ];
    let mut data = Vec::new();
    for (chi, beta, text) in &cases {
        let cd = CanonicalData::parse(text, Some(3)).map_err(|e| e.to_string())?;
        let beta_inv = beta.inverse().map_err(|e| e.to_string())?;
        if beta_inv.compose(&chi.compose(beta)) != cd.realize() {
            return Err(format!("basis change does not bring the product to\n{cd}"));
        }
        data.push(cd);
    }
    if data[0].classify().block_sizes != vec![1, 2] || conjugacy_test(&data[0], &data[1]) != Ok(false) {
        return Err("twisted product should have a size-two block and a different class".into());
    }
    if find_conjugator(&cases[0].0, &cases[1].0, &nielsen_ball(c, 2)).is_some() {
        return Err("bounded search conjugates products of different class".into());
    }
    Ok(())
}

/// Tuples violating exactly the named property, derived from a canonical tuple.
pub fn violated_tuples(p: &ExtractionParams) -> Vec<(char, ExtractionParams)> {
    let c = p.a.context();
    let b_idx: Vec<usize> = p.b.basis().iter().map(|w| w.letters()[0].unsigned_abs() as usize).collect();
    let half = b_idx.len() / 2;
    let mut out = Vec::new();

    let mut q = p.clone();
    q.psis.push(GeneratorMap::right_transvection(c, b_idx[0], b_idx[1], false));
    out.push(('a', q));

    let mut q = p.clone();
    q.psis.retain(|m| !m.is_identity());
    out.push(('b', q));

    let mut q = p.clone();
    q.psis = vec![GeneratorMap::identity(c), GeneratorMap::inversion(c, *b_idx.last().unwrap())];
    out.push(('c', q));

    let mut q = p.clone();
    let one = b_idx[1..].iter().fold(GeneratorMap::identity(c), |f, &j| f.with_image(j, c.generator(j).invert()));
    q.psis.push(one);
    out.push(('d', q));

    let mut q = p.clone();
    q.pi0 = q.pi0.compose(&GeneratorMap::inversion(c, 1));
    out.push(('e', q));

    let mut q = p.clone();
    q.pi1 = GeneratorMap::identity(c);
    out.push(('f', q));

    let mut q = p.clone();
    q.pi0 = b_idx[..half].iter().fold(GeneratorMap::identity(c), |f, &j| f.with_image(j, c.generator(j).invert()));
    out.push(('g', q));
    out
}

fn check_extracted(p: &ExtractionParams, basis: &[Word]) -> std::result::Result<(), String> {
    let c = p.a.context();
    if basis.len() != p.b.rank() {
        return Err(format!("{} elements for a factor of rank {}", basis.len(), p.b.rank()));
    }
    if !SubgroupGraph::build(c, basis).same_subgroup(p.b.graph()) {
        return Err("output does not generate B".into());
    }
    for (i, x) in basis.iter().enumerate() {
        if basis[i + 1..].iter().any(|y| y == x || *y == x.invert()) {
            return Err(format!("{x} occurs twice up to inversion"));
        }
        if is_primitive(x) != Ok(true) {
            return Err(format!("{x} is not primitive"));
        }
    }
    Ok(())
}

pub fn basis_extraction(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("basis-extraction", *cfg);
    let mut inst = 0;
    for n in (4..=cfg.rank.max(4)).step_by(2) {
        let p = ExtractionParams::canonical(n).expect("even rank at least 4");
        let base = p.extract();
        let res = base.as_ref().map_err(|e| e.to_string()).and_then(|b| check_extracted(&p, b));
        r.check(inst, res.is_ok(), || format!("rank {n}: {}", res.unwrap_err()), &[]);
        inst += 1;
        for (want, q) in violated_tuples(&p) {
            let got = q.extract();
            let ok = matches!(&got, Err(crate::Error::PropertyViolated(c, _)) if *c == want);
            r.check(inst, ok, || format!("rank {n}: expected property ({want}) to fail, got {got:?}"), &[]);
            inst += 1;
        }
        let b_idx: Vec<usize> = p.b.basis().iter().map(|w| w.letters()[0].unsigned_abs() as usize).collect();
        for i in 0..cfg.sample_count {
            let mut rng = cfg.rng(inst + i);
            let (beta, _) = GeneratorMap::random_with_inverse_on(p.a.context(), &b_idx, cfg.max_image_length, &mut rng);
            let res = p.transported(&beta).and_then(|q| Ok((q.extract()?, q))).map_err(|e| e.to_string()).and_then(
                |(b, q)| {
                    check_extracted(&q, &b)?;
                    let same = base.as_ref().is_ok_and(|b0| {
                        SubgroupGraph::build(q.a.context(), &b).same_subgroup(&SubgroupGraph::build(q.a.context(), b0))
                    });
                    if same {
                        Ok(())
                    } else {
                        Err("transported tuple gives a basis of a different subgroup".into())
                    }
                },
            );
            r.check(inst + i, res.is_ok(), || format!("rank {n}: {}", res.unwrap_err()), beta.images());
        }
        inst += cfg.sample_count;
    }
    r.finish()
}

pub fn encode_decode(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("encode-decode", *cfg);
    let round_trip = |f: &FiniteFunction, split: &BasisSplit| -> std::result::Result<(), String> {
        let sigma = encode_function(f, split).map_err(|e| e.to_string())?;
        if split.b1().iter().any(|&i| *sigma.image(i) != split.context().generator(i)) || !sigma.is_automorphism() {
            return Err(format!("encoding of {f} is not an automorphism fixing B1"));
        }
        match decode_function(&sigma, split) {
            Ok(g) if g == *f => Ok(()),
            other => Err(format!("decoding the encoding of {f} gives {other:?}")),
        }
    };
    let mut inst = 0;
    for m in 1..=3 {
        let split = BasisSplit::standard(m).expect("rank at least 2");
        for f in FiniteFunction::all(m) {
            let res = round_trip(&f, &split);
            r.check(inst, res.is_ok(), || res.unwrap_err(), &[]);
            inst += 1;
        }
    }
    let m = cfg.rank;
    let split = BasisSplit::standard(m).expect("rank at least 2");
    for i in 0..cfg.sample_count {
        let f = FiniteFunction::random(m, &mut cfg.rng(i));
        let res = round_trip(&f, &split);
        r.check(inst, res.is_ok(), || res.unwrap_err(), &[]);
        inst += 1;
    }
    r.note(format!("exhaustive for m = 1, 2, 3; {} random functions at m = {m}", cfg.sample_count));
    r.finish()
}

/// Reduced products of at most `k` factors from `gens` and their inverses.
fn products_up_to(gens: &[Word], k: usize) -> std::collections::BTreeSet<Word> {
    let c = gens[0].context();
    let letters: Vec<Word> = gens.iter().flat_map(|g| [g.clone(), g.invert()]).collect();
    let mut all = std::collections::BTreeSet::from([c.identity()]);
    let mut layer = vec![c.identity()];
    for _ in 0..k {
        layer = layer.iter().flat_map(|w| letters.iter().map(move |l| w * l)).collect();
        all.extend(layer.iter().cloned());
    }
    all
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn oracles(cfg: &SampleConfig) -> SuiteReport {
    let mut r = Recorder::new("oracles", *cfg);
    let c = ctx(cfg.rank);
    let mut accepted_outside = 0;
    for i in 0..cfg.sample_count {
        let mut rng = cfg.rng(i);
        let gens: Vec<Word> = (0..2)
            .map(|_| loop {
                let w = random_word(c, cfg.max_image_length, &mut rng);
                if !w.is_identity() {
                    break w;
                }
            })
            .collect();
        let lf = crate::stallings::LabeledFolding::new(c, &gens);
        let brute = products_up_to(&gens, 4);
        let mut probes: Vec<Word> = brute.iter().cloned().collect();
        let mut extra: Vec<Word> =
            probes.iter().take(40).map(|w| w * &c.generator(rng.gen_range(1..=c.rank()))).collect();
        extra.extend((0..40).map(|_| random_word(c, 2 * cfg.max_image_length, &mut rng)));
        probes.extend(extra);
        let mut bad = None;
        for w in &probes {
            let inside = lf.graph().contains(w);
            let ok = if inside {
                // The graph's own certificate: an expression in the generators.
                lf.express(w).is_some_and(|e| {
                    let value = e.iter().fold(c.identity(), |acc, &l| {
                        let g = &gens[l.unsigned_abs() as usize - 1];
                        &acc * &if l > 0 { g.clone() } else { g.invert() }
                    });
                    if !brute.contains(w) {
                        accepted_outside += 1;
                    }
                    value == *w && (brute.contains(w) || e.len() > 4)
                })
            } else {
                !brute.contains(w)
            };
            if !ok {
                bad = Some(w.clone());
                break;
            }
        }
        let words: Vec<Word> = gens.iter().cloned().chain(bad.clone()).collect();
        r.check(i, bad.is_none(), || "membership disagrees with enumeration of short products".into(), &words);
    }
    r.note(format!("accepted words needing more than 4 factors: {accepted_outside}"));

    let mut primitive = 0;
    for i in 0..10 * cfg.sample_count {
        let mut rng = cfg.rng(cfg.sample_count + i);
        let (w, known) = if i % 2 == 0 {
            let w = loop {
                let w = random_word(c, 2 * cfg.max_image_length, &mut rng);
                if !w.is_identity() {
                    break w;
                }
            };
            (w, false)
        } else {
            let f = GeneratorMap::random_nielsen_product(c, cfg.max_image_length, &mut rng);
            (f.apply(&c.generator(rng.gen_range(1..=c.rank()))), true)
        };
        let prim = is_primitive(&w);
        let g = w.exponent_sums().into_iter().fold(0, gcd);
        let ok = match prim {
            Ok(true) => {
                primitive += 1;
                g == 1
            }
            Ok(false) => !known,
            Err(_) => false,
        };
        r.check(cfg.sample_count + i, ok, || format!("primitivity {prim:?} with gcd {g}"), std::slice::from_ref(&w));
    }
    r.note(format!("primitive words among {}: {primitive}", 10 * cfg.sample_count));
    r.finish()
}
