//! Bounded searches over automorphisms.

use std::collections::HashMap;

use crate::maps::GeneratorMap;
use crate::words::{words_up_to, FreeGroupContext};

/// All endomorphisms `τ` with every image non-trivial of length `≤ max_len`
/// and `τ ∘ f = g ∘ τ` for each pair `(f, g)`.
///
/// Generators are assigned in order; the constraint at `x_i` is checked as
/// soon as every generator occurring in `f(x_i)` and `x_i` itself has an image.
pub fn twisted_commutant(
    ctx: FreeGroupContext,
    pairs: &[(GeneratorMap, GeneratorMap)],
    max_len: usize,
) -> Vec<GeneratorMap> {
    let n = ctx.rank();
    let candidates: Vec<_> = words_up_to(ctx, max_len).into_iter().filter(|w| !w.is_identity()).collect();
    // constraints[k] lists (pair, generator) checkable once x_1..x_{k+1} are assigned.
    let mut constraints: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (p, (f, _)) in pairs.iter().enumerate() {
        for i in 1..=n {
            let depth = f.image(i).letters().iter().map(|l| l.unsigned_abs() as usize).chain([i]).max().unwrap();
            constraints[depth - 1].push((p, i));
        }
    }
    let mut out = Vec::new();
    let mut tau = GeneratorMap::identity(ctx);
    fn go(
        k: usize,
        tau: &mut GeneratorMap,
        candidates: &[crate::words::Word],
        constraints: &[Vec<(usize, usize)>],
        pairs: &[(GeneratorMap, GeneratorMap)],
        out: &mut Vec<GeneratorMap>,
    ) {
        if k == constraints.len() {
            out.push(tau.clone());
            return;
        }
        for c in candidates {
            tau.set_image(k + 1, c.clone());
            let ok = constraints[k].iter().all(|&(p, i)| {
                let (f, g) = &pairs[p];
                tau.apply(f.image(i)) == g.apply(tau.image(i))
            });
            if ok {
                go(k + 1, tau, candidates, constraints, pairs, out);
            }
        }
    }
    go(0, &mut tau, &candidates, &constraints, pairs, &mut out);
    out
}

/// Automorphisms commuting with every map in `maps`, images of length `≤ max_len`.
pub fn commutant_automorphisms(ctx: FreeGroupContext, maps: &[GeneratorMap], max_len: usize) -> Vec<GeneratorMap> {
    let pairs: Vec<_> = maps.iter().map(|m| (m.clone(), m.clone())).collect();
    twisted_commutant(ctx, &pairs, max_len).into_iter().filter(GeneratorMap::is_automorphism).collect()
}

/// Distinct products of at most `radius` elementary Nielsen maps, paired with
/// their inverses, in order of discovery.
pub fn nielsen_ball(ctx: FreeGroupContext, radius: usize) -> Vec<(GeneratorMap, GeneratorMap)> {
    let moves = GeneratorMap::elementary_pairs_on(ctx, &(1..=ctx.rank()).collect::<Vec<_>>());
    let id = GeneratorMap::identity(ctx);
    let mut seen: HashMap<GeneratorMap, ()> = HashMap::from([(id.clone(), ())]);
    let mut ball = vec![(id.clone(), id)];
    let mut frontier = 0..1;
    for _ in 0..radius {
        let start = ball.len();
        for k in frontier.clone() {
            for (m, m_inv) in &moves {
                let (h, h_inv) = &ball[k];
                let next = h.compose(m);
                if seen.insert(next.clone(), ()).is_none() {
                    let next_inv = m_inv.compose(h_inv);
                    ball.push((next, next_inv));
                }
            }
        }
        frontier = start..ball.len();
    }
    ball
}

/// Searches for `σ = h k` with `h, k` in `ball` and `σ⁻¹ f σ = g`.
pub fn find_conjugator(
    f: &GeneratorMap,
    g: &GeneratorMap,
    ball: &[(GeneratorMap, GeneratorMap)],
) -> Option<GeneratorMap> {
    let left: HashMap<GeneratorMap, usize> =
        ball.iter().enumerate().map(|(i, (h, h_inv))| (h_inv.compose(&f.compose(h)), i)).collect();
    for (k, k_inv) in ball {
        let right = k.compose(&g.compose(k_inv));
        if let Some(&i) = left.get(&right) {
            return Some(ball[i].0.compose(k));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involutions::CanonicalData;

    fn ctx(n: usize) -> FreeGroupContext {
        FreeGroupContext::new(n).unwrap()
    }

    #[test]
    fn enumeration_is_exhaustive_at_rank_two() {
        // Independent generation: every pair of non-trivial words of length ≤ 2, filtered.
        let c = ctx(2);
        let words: Vec<_> = words_up_to(c, 2).into_iter().filter(|w| !w.is_identity()).collect();
        let mut brute = 0;
        for a in &words {
            for b in &words {
                if GeneratorMap::new(c, vec![a.clone(), b.clone()]).unwrap().is_automorphism() {
                    brute += 1;
                }
            }
        }
        let found = commutant_automorphisms(c, &[], 2);
        assert_eq!(found.len(), brute);
        assert_eq!(twisted_commutant(c, &[], 2).len(), words.len() * words.len());
    }

    #[test]
    fn centralizer_search_matches_brute_force() {
        let c = ctx(2);
        let phi = CanonicalData::quasi_conjugation(c).realize();
        let words: Vec<_> = words_up_to(c, 3).into_iter().filter(|w| !w.is_identity()).collect();
        let mut brute = Vec::new();
        for a in &words {
            for b in &words {
                let s = GeneratorMap::new(c, vec![a.clone(), b.clone()]).unwrap();
                if s.commutes_with(&phi) && s.is_automorphism() {
                    brute.push(s);
                }
            }
        }
        let mut found = commutant_automorphisms(c, &[phi], 3);
        found.sort();
        brute.sort();
        assert_eq!(found, brute);
        assert!(!found.is_empty());
    }

    #[test]
    fn ball_sizes_and_inverses() {
        let ball = nielsen_ball(ctx(2), 1);
        // identity plus the 2 inversions, 1 transposition and 8 transvections
        assert_eq!(ball.len(), 12);
        for (h, h_inv) in nielsen_ball(ctx(3), 2) {
            assert!(h.compose(&h_inv).is_identity());
        }
    }

    #[test]
    fn finds_short_conjugators() {
        let c = ctx(3);
        let d1 = CanonicalData::quasi_conjugation(c);
        let f = d1.realize();
        let ball = nielsen_ball(c, 2);
        for (s, s_inv) in ball.iter().take(200) {
            let g = s_inv.compose(&f.compose(s));
            let found = find_conjugator(&f, &g, &ball).expect("conjugator of length ≤ 2 exists");
            assert_eq!(found.inverse().unwrap().compose(&f.compose(&found)), g);
        }
        let sym = CanonicalData::symmetry(c).realize();
        assert!(find_conjugator(&f, &sym, &ball).is_none());
    }
}
