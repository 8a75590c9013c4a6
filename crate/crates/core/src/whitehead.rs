//! Whitehead automorphisms, orbit minimization and primitivity.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::maps::GeneratorMap;
use crate::words::{FreeGroupContext, Word};

/// A Whitehead automorphism in symbolic form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WhiteheadMove {
    /// `x_i ↦ x_{|p_i|}^{sign p_i}`.
    Permutation(Vec<i32>),
    /// Multiplier letter `a` and a set `S` of letters avoiding `a^{±1}`:
    /// each occurrence of a letter `l ∈ S` is replaced by `l a`.
    TypeTwo { multiplier: i32, set: Vec<i32> },
}

impl WhiteheadMove {
    pub fn to_map(&self, ctx: FreeGroupContext) -> GeneratorMap {
        let images = match self {
            WhiteheadMove::Permutation(p) => p.iter().map(|&l| Word::from_reduced(ctx, vec![l])).collect(),
            WhiteheadMove::TypeTwo { multiplier: a, set } => (1..=ctx.rank() as i32)
                .map(|x| {
                    let mut img = Vec::with_capacity(3);
                    if x == a.abs() {
                        img.push(x);
                    } else {
                        if set.contains(&-x) {
                            img.push(-a);
                        }
                        img.push(x);
                        if set.contains(&x) {
                            img.push(*a);
                        }
                    }
                    Word::from_reduced(ctx, img)
                })
                .collect(),
        };
        GeneratorMap::new(ctx, images).expect("images built in the move's context")
    }
}

fn signed_permutations(n: usize) -> Vec<Vec<i32>> {
    fn perms(rest: &mut Vec<i32>, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            cur.push(x);
            perms(rest, cur, out);
            cur.pop();
            rest.insert(k, x);
        }
    }
    let mut unsigned = Vec::new();
    perms(&mut (1..=n as i32).collect(), &mut Vec::new(), &mut unsigned);
    let mut out = Vec::new();
    for p in unsigned {
        for signs in 0u32..(1 << n) {
            out.push(p.iter().enumerate().map(|(k, &x)| if signs >> k & 1 == 1 { -x } else { x }).collect());
        }
    }
    out
}

fn type_two_moves(ctx: FreeGroupContext) -> Vec<WhiteheadMove> {
    let mut out = Vec::new();
    for a in ctx.letters() {
        let others: Vec<i32> = ctx.letters().into_iter().filter(|l| l.abs() != a.abs()).collect();
        for mask in 1u64..(1 << others.len()) {
            let set = others.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &l)| l).collect();
            out.push(WhiteheadMove::TypeTwo { multiplier: a, set });
        }
    }
    out
}

/// All Whitehead moves: signed permutations first, then type-II moves.
pub fn whitehead_move_set(ctx: FreeGroupContext) -> Vec<WhiteheadMove> {
    let mut out: Vec<WhiteheadMove> =
        signed_permutations(ctx.rank()).into_iter().map(WhiteheadMove::Permutation).collect();
    out.extend(type_two_moves(ctx));
    out
}

/// The complete finite set of Whitehead automorphisms of `F_n`.
pub fn whitehead_moves(ctx: FreeGroupContext) -> Vec<GeneratorMap> {
    whitehead_move_set(ctx).iter().map(|m| m.to_map(ctx)).collect()
}

struct MoveTables {
    /// Type-II maps, used for length reduction.
    reducing: Vec<GeneratorMap>,
    /// Type-II maps plus inversions and transpositions, which generate the orbit at fixed length.
    closure: Vec<GeneratorMap>,
}

fn tables(ctx: FreeGroupContext) -> Arc<MoveTables> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<MoveTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&ctx.rank()) {
        return t.clone();
    }
    let reducing: Vec<GeneratorMap> = type_two_moves(ctx).iter().map(|m| m.to_map(ctx)).collect();
    let mut closure = reducing.clone();
    for i in 1..=ctx.rank() {
        closure.push(GeneratorMap::inversion(ctx, i));
        for j in i + 1..=ctx.rank() {
            closure.push(GeneratorMap::transposition(ctx, i, j));
        }
    }
    let t = Arc::new(MoveTables { reducing, closure });
    cache.lock().unwrap().insert(ctx.rank(), t.clone());
    t
}

/// Move applications allowed during the fixed-length closure.
const CLOSURE_BUDGET: usize = 200_000;

fn least_rotation(w: &Word) -> Word {
    let l = w.letters();
    (0..l.len().max(1))
        .map(|s| Word::from_reduced(w.context(), [&l[s..], &l[..s]].concat()))
        .min()
        .expect("at least one rotation")
}

/// Greedy descent of cyclic length; returns the final cyclic core and the composed map.
fn descend(w: &Word, moves: &[GeneratorMap], mut track: Option<&mut GeneratorMap>) -> Word {
    let mut cur = w.cyclic_reduce().0;
    loop {
        let mut best: Option<(usize, usize)> = None;
        for (k, m) in moves.iter().enumerate() {
            let len = m.apply(&cur).cyclic_len();
            if len < best.map_or(cur.len(), |b| b.0) {
                best = Some((len, k));
            }
        }
        let Some((_, k)) = best else { return cur };
        cur = moves[k].apply(&cur).cyclic_reduce().0;
        if let Some(t) = track.as_deref_mut() {
            *t = moves[k].compose(t);
        }
    }
}

/// A word of least cyclic length in the automorphism orbit of `w`, and a map
/// sending `w` onto it exactly.
///
/// Among the states reached by the fixed-length closure the shortlex-least
/// cyclically reduced word is returned.
pub fn minimize(w: &Word) -> Result<(Word, GeneratorMap)> {
    if w.is_identity() {
        return Err(Error::EmptyWord);
    }
    let ctx = w.context();
    let t = tables(ctx);
    let mut map = GeneratorMap::identity(ctx);
    let mut start = descend(w, &t.reducing, Some(&mut map));
    let state_limit = (CLOSURE_BUDGET / t.closure.len()).max(1);
    let (best, best_map) = 'outer: loop {
        let key = least_rotation(&start);
        let mut seen: HashSet<Word> = HashSet::from([key.clone()]);
        let mut queue = VecDeque::from([(start.clone(), map.clone())]);
        let mut best = (key, map.clone());
        while let Some((cur, cur_map)) = queue.pop_front() {
            if seen.len() >= state_limit {
                break;
            }
            for m in &t.closure {
                let next = m.apply(&cur).cyclic_reduce().0;
                if next.len() < cur.len() {
                    map = m.compose(&cur_map);
                    start = descend(&next, &t.reducing, Some(&mut map));
                    continue 'outer;
                }
                if next.len() > cur.len() {
                    continue;
                }
                let key = least_rotation(&next);
                if seen.insert(key.clone()) {
                    let next_map = m.compose(&cur_map);
                    if key < best.0 {
                        best = (key, next_map.clone());
                    }
                    queue.push_back((next, next_map));
                }
            }
        }
        break best;
    };
    // Absorb the conjugator and rotation with an inner automorphism.
    let u = best_map.apply(w);
    let (core, h) = u.cyclic_reduce();
    let cl = core.letters();
    let shift = (0..cl.len())
        .find(|&s| [&cl[s..], &cl[..s]].concat() == best.letters())
        .expect("the orbit representative is a rotation of the image core");
    let p = Word::from_reduced(ctx, cl[..shift].to_vec());
    let witness = GeneratorMap::inner(&(&h * &p).invert()).compose(&best_map);
    debug_assert_eq!(witness.apply(w), best);
    Ok((best, witness))
}

const CACHE_LIMIT: usize = 100_000;

/// True iff `w` belongs to some basis of `F_n`.
pub fn is_primitive(w: &Word) -> Result<bool> {
    if w.is_identity() {
        return Err(Error::EmptyWord);
    }
    static CACHE: OnceLock<Mutex<HashMap<Word, bool>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&b) = cache.lock().unwrap().get(w) {
        return Ok(b);
    }
    let ans = descend(w, &tables(w.context()).reducing, None).len() == 1;
    let mut c = cache.lock().unwrap();
    if c.len() >= CACHE_LIMIT {
        c.clear();
    }
    c.insert(w.clone(), ans);
    Ok(ans)
}

/// `(p, k)` with `p` primitive and `w = p^k`, when it exists.
pub fn is_power_of_primitive(w: &Word) -> Result<Option<(Word, u32)>> {
    let (root, k) = w.primitive_root()?;
    Ok(is_primitive(&root)?.then_some((root, k)))
}

/// Writes `a` as `b · (b⁻¹ a)` with `b` the least generator not occurring in `a`.
pub fn product_of_two_primitives(a: &Word) -> Result<(Word, Word)> {
    if a.is_identity() {
        return Err(Error::EmptyWord);
    }
    let ctx = a.context();
    let used = a.support();
    let b = (1..=ctx.rank()).find(|i| !used.contains(i)).ok_or(Error::NoFreeGenerator(ctx.rank()))?;
    let p1 = ctx.generator(b);
    let p2 = &p1.invert() * a;
    Ok((p1, p2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{random_word, words_up_to};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(n: usize) -> FreeGroupContext {
        FreeGroupContext::new(n).unwrap()
    }

    fn w(s: &str, n: usize) -> Word {
        Word::parse(s, ctx(n)).unwrap()
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn move_set_rank_two() {
        let moves = whitehead_moves(ctx(2));
        assert!(moves.contains(&GeneratorMap::inversion(ctx(2), 1)));
        assert!(moves.contains(&GeneratorMap::right_transvection(ctx(2), 1, 2, false)));
        assert!(moves.iter().all(|m| m.is_automorphism()));
        // Count by definition: signed permutations, and for each of the four
        // multiplier letters the nonempty subsets of the two remaining letters.
        let mut oracle = 0;
        for _a in [1, -1, 2, -2] {
            oracle += (1 << 2) - 1;
        }
        oracle += 2 * 2 * 2;
        assert_eq!(moves.len(), oracle);
        let distinct: HashSet<_> = moves.iter().collect();
        assert_eq!(distinct.len(), moves.len());
    }

    #[test]
    fn move_set_rank_three_are_automorphisms() {
        let moves = whitehead_moves(ctx(3));
        assert_eq!(moves.len(), 48 + 6 * 15);
        assert!(moves.iter().all(|m| m.is_automorphism()));
    }

    #[test]
    fn minimize_examples() {
        let (m, f) = minimize(&w("x1 x2 x1-", 2)).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(f.apply(&w("x1 x2 x1-", 2)), m);
        assert_eq!(minimize(&w("x1", 2)).unwrap().0, w("x1", 2));
        assert_eq!(minimize(&Word::parse("e", ctx(2)).unwrap()), Err(Error::EmptyWord));
        let (m, _) = minimize(&w("x1 x2 x1- x2-", 2)).unwrap();
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn minimize_orbit_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let u = random_word(ctx(2), 8, &mut rng);
            if u.is_identity() {
                continue;
            }
            let s = GeneratorMap::random_nielsen_product(ctx(2), 6, &mut rng);
            let (m1, f1) = minimize(&u).unwrap();
            let (m2, f2) = minimize(&s.apply(&u)).unwrap();
            assert_eq!(m1.len(), m2.len());
            assert_eq!(f1.apply(&u), m1);
            assert!(f2.is_automorphism());
        }
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_primitive(&w("x1 x2", 2)).unwrap());
        assert!(!is_primitive(&w("x1 x1", 2)).unwrap());
        assert!(!is_primitive(&w("x1 x2 x1- x2-", 2)).unwrap());
        assert!(is_primitive(&w("x1 x1 x2", 2)).unwrap());
        assert!(!is_primitive(&w("x1 x1 x2 x2", 2)).unwrap());
    }

    #[test]
    fn primitive_implies_unimodular_abelianization() {
        for u in words_up_to(ctx(2), 6).into_iter().skip(1) {
            if is_primitive(&u).unwrap() {
                let g = u.exponent_sums().into_iter().fold(0, gcd);
                assert_eq!(g, 1, "{u}");
            }
        }
    }

    #[test]
    fn primitivity_matches_images_of_generators() {
        // Oracle: images of x1 under products of up to three elementary maps are primitive.
        let moves = GeneratorMap::elementary_nielsen(ctx(2));
        let mut images = HashSet::new();
        for a in &moves {
            for b in &moves {
                for c in &moves {
                    images.insert(a.compose(b).compose(c).image(1).clone());
                }
            }
        }
        for u in &images {
            assert!(is_primitive(u).unwrap(), "{u}");
        }
    }

    #[test]
    fn primitivity_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let u = random_word(ctx(3), 7, &mut rng);
            if u.is_identity() {
                continue;
            }
            let s = GeneratorMap::random_nielsen_product(ctx(3), 5, &mut rng);
            assert_eq!(is_primitive(&u).unwrap(), is_primitive(&s.apply(&u)).unwrap(), "{u}");
        }
    }

    #[test]
    fn conjugates_of_primitives_are_primitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let s = GeneratorMap::random_nielsen_product(ctx(3), 4, &mut rng);
            let p = s.image(1).clone();
            let g = random_word(ctx(3), 6, &mut rng);
            let q = p.pow(if rng.gen_bool(0.5) { 1 } else { -1 }).conjugate_by(&g);
            assert!(is_primitive(&q).unwrap());
        }
    }

    #[test]
    fn powers_of_primitives() {
        assert_eq!(is_power_of_primitive(&w("x1 x2", 2).pow(3)).unwrap(), Some((w("x1 x2", 2), 3)));
        assert_eq!(is_power_of_primitive(&w("x1 x1 x2 x2", 2)).unwrap(), None);
        assert_eq!(is_power_of_primitive(&w("x1", 2)).unwrap(), Some((w("x1", 2), 1)));
        let c = w("x2 x1 x1 x2-", 2);
        assert_eq!(is_power_of_primitive(&c).unwrap(), Some((w("x2 x1 x2-", 2), 2)));
    }

    #[test]
    fn products_of_two_primitives() {
        let (p1, p2) = product_of_two_primitives(&w("x1 x1", 2)).unwrap();
        assert_eq!((p1.clone(), p2.clone()), (w("x2", 2), w("x2- x1 x1", 2)));
        assert!(is_primitive(&p1).unwrap() && is_primitive(&p2).unwrap());
        assert_eq!(product_of_two_primitives(&w("x1", 2)).unwrap(), (w("x2", 2), w("x2- x1", 2)));
        assert_eq!(product_of_two_primitives(&w("x1 x2", 2)), Err(Error::NoFreeGenerator(2)));
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..50 {
            let a = random_word(ctx(2), 8, &mut rng);
            let a = Word::reduce(a.letters(), ctx(3)).unwrap();
            if a.is_identity() {
                continue;
            }
            let (p1, p2) = product_of_two_primitives(&a).unwrap();
            assert_eq!(&p1 * &p2, a);
            assert!(is_primitive(&p1).unwrap() && is_primitive(&p2).unwrap());
        }
    }
}
