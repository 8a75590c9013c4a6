//! Folded subgroup graphs (Stallings graphs) of finitely generated subgroups.
//!
//! A [`SubgroupGraph`] is the folded core graph of a subgroup with a
//! distinguished base vertex `0` and vertices numbered by breadth-first
//! search from the base, exploring letters in the order `x1, x1-, x2, ...`.
//! Two graphs are equal exactly when they represent the same subgroup.
//!
//! [`LabeledFolding`] runs the same folding while tracking, for every edge, a
//! word in the abstract generators of the subgroup. It expresses members as
//! words in the given generators and is used to invert automorphisms.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::words::{invert_letters, reduce_letters, FreeGroupContext, Word};

/// A folded core graph based at vertex 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubgroupGraph {
    ctx: FreeGroupContext,
    vertex_count: usize,
    /// Sorted `(source, generator, target)` triples.
    edges: Vec<(usize, u32, usize)>,
    out: Vec<Vec<Option<usize>>>,
    inn: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone)]
struct FoldEdge {
    src: usize,
    dst: usize,
    gen: u32,
    /// Label read from `src` to `dst`.
    label: Vec<i32>,
}

#[derive(Debug, Clone, Copy)]
struct HalfEdge {
    edge: usize,
    letter: i32,
    far: usize,
}

/// Worklist folding of a bouquet of labelled paths.
struct Folder {
    edges: Vec<Option<FoldEdge>>,
    incident: Vec<Vec<usize>>,
    base: usize,
    base_conj: Vec<i32>,
    parallel_relations: Vec<Vec<i32>>,
}

impl Folder {
    fn bouquet(gens: &[Word]) -> Folder {
        let mut f = Folder {
            edges: Vec::new(),
            incident: vec![Vec::new()],
            base: 0,
            base_conj: Vec::new(),
            parallel_relations: Vec::new(),
        };
        for (k, g) in gens.iter().enumerate() {
            let tag = k as i32 + 1;
            if g.is_identity() {
                f.parallel_relations.push(vec![tag]);
                continue;
            }
            let letters = g.letters();
            let mut prev = 0;
            for (pos, &l) in letters.iter().enumerate() {
                let next = if pos + 1 == letters.len() { 0 } else { f.new_vertex() };
                let label = if pos == 0 { vec![tag] } else { Vec::new() };
                if l > 0 {
                    f.add_edge(prev, next, l as u32, label);
                } else {
                    f.add_edge(next, prev, (-l) as u32, invert_letters(&label));
                }
                prev = next;
            }
        }
        f
    }

    fn new_vertex(&mut self) -> usize {
        self.incident.push(Vec::new());
        self.incident.len() - 1
    }

    fn add_edge(&mut self, src: usize, dst: usize, gen: u32, label: Vec<i32>) {
        let id = self.edges.len();
        self.edges.push(Some(FoldEdge { src, dst, gen, label }));
        self.incident[src].push(id);
        if dst != src {
            self.incident[dst].push(id);
        }
    }

    fn half_edges(&self, v: usize) -> Vec<HalfEdge> {
        let mut out = Vec::new();
        for &id in &self.incident[v] {
            let Some(e) = &self.edges[id] else { continue };
            if e.src == v {
                out.push(HalfEdge { edge: id, letter: e.gen as i32, far: e.dst });
            }
            if e.dst == v {
                out.push(HalfEdge { edge: id, letter: -(e.gen as i32), far: e.src });
            }
        }
        out
    }

    fn half_label(&self, h: HalfEdge) -> Vec<i32> {
        let e = self.edges[h.edge].as_ref().expect("live edge");
        if h.letter > 0 {
            e.label.clone()
        } else {
            invert_letters(&e.label)
        }
    }

    fn remove_edge(&mut self, id: usize) {
        if let Some(e) = self.edges[id].take() {
            self.incident[e.src].retain(|&x| x != id);
            self.incident[e.dst].retain(|&x| x != id);
        }
    }

    fn find_conflict(&self, v: usize) -> Option<(HalfEdge, HalfEdge)> {
        let hs = self.half_edges(v);
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                if hs[i].letter == hs[j].letter && hs[i].edge != hs[j].edge {
                    return Some((hs[i], hs[j]));
                }
            }
        }
        None
    }

    fn fold(&mut self) {
        let mut work: VecDeque<usize> = (0..self.incident.len()).collect();
        while let Some(v) = work.pop_front() {
            let Some((mut h1, mut h2)) = self.find_conflict(v) else { continue };
            if h1.far == h2.far {
                let mut rel = self.half_label(h1);
                rel.extend(invert_letters(&self.half_label(h2)));
                let rel = reduce_letters(&rel);
                if !rel.is_empty() {
                    self.parallel_relations.push(rel);
                }
                self.remove_edge(h2.edge);
            } else {
                if h2.far == v {
                    std::mem::swap(&mut h1, &mut h2);
                }
                let (l1, l2) = (self.half_label(h1), self.half_label(h2));
                let (t1, t2) = (h1.far, h2.far);
                // New labels leaving t2 get the prefix g = l1^-1 l2.
                let mut g = invert_letters(&l1);
                g.extend(&l2);
                let g = reduce_letters(&g);
                let g_inv = invert_letters(&g);
                let mut moved = std::mem::take(&mut self.incident[t2]);
                moved.dedup();
                for &id in &moved {
                    let e = self.edges[id].as_mut().expect("incident edges are live");
                    if e.src == t2 {
                        let mut l = g.clone();
                        l.extend(&e.label);
                        e.label = reduce_letters(&l);
                        e.src = t1;
                    }
                    if e.dst == t2 {
                        let mut l = e.label.clone();
                        l.extend(&g_inv);
                        e.label = reduce_letters(&l);
                        e.dst = t1;
                    }
                    if !self.incident[t1].contains(&id) {
                        self.incident[t1].push(id);
                    }
                }
                if t2 == self.base {
                    self.base = t1;
                    let mut c = self.base_conj.clone();
                    c.extend(&g_inv);
                    self.base_conj = reduce_letters(&c);
                }
                debug_assert_eq!(self.half_label(h2), l1);
                self.remove_edge(h2.edge);
                work.push_back(t1);
            }
            work.push_back(v);
        }
    }

    /// Iteratively removes non-base vertices of degree one.
    fn prune(&mut self) {
        let mut work: VecDeque<usize> = (0..self.incident.len()).collect();
        while let Some(v) = work.pop_front() {
            if v == self.base {
                continue;
            }
            let hs = self.half_edges(v);
            if hs.len() == 1 {
                let far = hs[0].far;
                self.remove_edge(hs[0].edge);
                work.push_back(far);
            }
        }
    }
}

/// Renumbers the component of `base` by BFS and returns the graph plus the
/// old-to-new vertex map.
fn canonicalize(
    ctx: FreeGroupContext,
    vertex_total: usize,
    base: usize,
    raw_edges: &[(usize, u32, usize)],
) -> (SubgroupGraph, BTreeMap<usize, usize>) {
    let n = ctx.rank();
    let mut out = vec![vec![None; n]; vertex_total];
    let mut inn = vec![vec![None; n]; vertex_total];
    for &(s, g, t) in raw_edges {
        out[s][g as usize - 1] = Some(t);
        inn[t][g as usize - 1] = Some(s);
    }
    let mut order = BTreeMap::new();
    order.insert(base, 0usize);
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for g in 0..n {
            for next in [out[v][g], inn[v][g]].into_iter().flatten() {
                if !order.contains_key(&next) {
                    order.insert(next, order.len());
                    queue.push_back(next);
                }
            }
        }
    }
    let count = order.len();
    let mut edges: Vec<(usize, u32, usize)> = raw_edges
        .iter()
        .filter(|(s, _, _)| order.contains_key(s))
        .map(|&(s, g, t)| (order[&s], g, order[&t]))
        .collect();
    edges.sort_unstable();
    let mut out = vec![vec![None; n]; count];
    let mut inn = vec![vec![None; n]; count];
    for &(s, g, t) in &edges {
        out[s][g as usize - 1] = Some(t);
        inn[t][g as usize - 1] = Some(s);
    }
    (SubgroupGraph { ctx, vertex_count: count, edges, out, inn }, order)
}

impl SubgroupGraph {
    /// Folded core graph of `⟨gens⟩`.
    pub fn build(ctx: FreeGroupContext, gens: &[Word]) -> SubgroupGraph {
        LabeledFolding::new(ctx, gens).graph
    }

    pub fn trivial(ctx: FreeGroupContext) -> SubgroupGraph {
        Self::build(ctx, &[])
    }

    pub fn whole_group(ctx: FreeGroupContext) -> SubgroupGraph {
        Self::build(ctx, &ctx.generators().collect::<Vec<_>>())
    }

    pub fn context(&self) -> FreeGroupContext {
        self.ctx
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, u32, usize)] {
        &self.edges
    }

    fn step(&self, v: usize, letter: i32) -> Option<usize> {
        let g = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            self.out[v][g]
        } else {
            self.inn[v][g]
        }
    }

    /// Membership by tracing the word from the base vertex.
    pub fn contains(&self, w: &Word) -> bool {
        assert_eq!(self.ctx, w.context(), "membership across contexts");
        let mut v = 0;
        for &l in w.letters() {
            match self.step(v, l) {
                Some(next) => v = next,
                None => return false,
            }
        }
        v == 0
    }

    /// `|E| - |V| + 1` of the core.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    pub fn is_whole_group(&self) -> bool {
        self.vertex_count == 1 && self.edges.len() == self.ctx.rank()
    }

    pub fn same_subgroup(&self, other: &SubgroupGraph) -> bool {
        self == other
    }

    /// Fiber product of the two graphs, restricted to the base component.
    pub fn intersect(&self, other: &SubgroupGraph) -> SubgroupGraph {
        assert_eq!(self.ctx, other.ctx, "intersection across contexts");
        let n = self.ctx.rank();
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        index.insert((0, 0), 0);
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        let mut raw = Vec::new();
        while let Some((a, b)) = queue.pop_front() {
            let here = index[&(a, b)];
            for g in 0..n {
                if let (Some(a2), Some(b2)) = (self.out[a][g], other.out[b][g]) {
                    let fresh = index.len();
                    let next = *index.entry((a2, b2)).or_insert_with(|| {
                        queue.push_back((a2, b2));
                        fresh
                    });
                    raw.push((here, g as u32 + 1, next));
                }
                if let (Some(a2), Some(b2)) = (self.inn[a][g], other.inn[b][g]) {
                    if !index.contains_key(&(a2, b2)) {
                        index.insert((a2, b2), index.len());
                        queue.push_back((a2, b2));
                    }
                }
            }
        }
        from_folded_edges(self.ctx, index.len(), 0, &raw)
    }

    /// The subgroup generated by both.
    pub fn join(&self, other: &SubgroupGraph) -> SubgroupGraph {
        let mut gens = self.basis();
        gens.extend(other.basis());
        SubgroupGraph::build(self.ctx, &gens)
    }

    /// Path label from the base to every vertex along the BFS spanning tree.
    fn tree_paths(&self) -> Vec<Word> {
        let mut path: Vec<Option<Vec<i32>>> = vec![None; self.vertex_count];
        path[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for g in 0..self.ctx.rank() {
                for (next, letter) in [(self.out[v][g], g as i32 + 1), (self.inn[v][g], -(g as i32 + 1))] {
                    if let Some(t) = next {
                        if path[t].is_none() {
                            let mut p = path[v].clone().unwrap();
                            p.push(letter);
                            path[t] = Some(p);
                            queue.push_back(t);
                        }
                    }
                }
            }
        }
        path.into_iter().map(|p| Word::from_reduced(self.ctx, p.expect("core graphs are connected"))).collect()
    }

    /// A free basis read off the BFS spanning tree.
    pub fn basis(&self) -> Vec<Word> {
        let paths = self.tree_paths();
        let mut basis = Vec::new();
        for &(s, g, t) in &self.edges {
            let tree_edge = {
                let ps = paths[s].letters();
                let pt = paths[t].letters();
                (pt.len() == ps.len() + 1 && pt[..ps.len()] == *ps && pt[ps.len()] == g as i32)
                    || (ps.len() == pt.len() + 1 && ps[..pt.len()] == *pt && ps[pt.len()] == -(g as i32))
            };
            if !tree_edge {
                let letter = Word::from_reduced(self.ctx, vec![g as i32]);
                basis.push(&(&paths[s] * &letter) * &paths[t].invert());
            }
        }
        basis
    }

    /// One edge per line as `v1 --x<i>--> v2`, base vertex marked `*`.
    pub fn dump(&self) -> String {
        let name = |v: usize| if v == 0 { "0*".to_string() } else { v.to_string() };
        let mut s = String::new();
        if self.edges.is_empty() {
            let _ = writeln!(s, "0*");
        }
        for &(a, g, b) in &self.edges {
            let _ = writeln!(s, "{} --x{}--> {}", name(a), g, name(b));
        }
        s
    }
}

/// Builds a graph from edges that are already folded: prunes and renumbers.
fn from_folded_edges(
    ctx: FreeGroupContext,
    vertex_total: usize,
    base: usize,
    raw: &[(usize, u32, usize)],
) -> SubgroupGraph {
    let mut f = Folder {
        edges: Vec::new(),
        incident: vec![Vec::new(); vertex_total],
        base,
        base_conj: Vec::new(),
        parallel_relations: Vec::new(),
    };
    for &(s, g, t) in raw {
        f.add_edge(s, t, g, Vec::new());
    }
    f.prune();
    let live: Vec<_> = f.edges.iter().flatten().map(|e| (e.src, e.gen, e.dst)).collect();
    canonicalize(ctx, vertex_total, f.base, &live).0
}

/// Folding of `⟨u_1, ..., u_m⟩` that remembers how each path reads in the
/// abstract generators `1..=m`.
#[derive(Debug, Clone)]
pub struct LabeledFolding {
    graph: SubgroupGraph,
    generator_count: usize,
    /// Label of the out-edge `(vertex, generator - 1)`.
    labels: BTreeMap<(usize, u32), Vec<i32>>,
    base_conj: Vec<i32>,
}

impl LabeledFolding {
    pub fn new(ctx: FreeGroupContext, gens: &[Word]) -> LabeledFolding {
        for g in gens {
            assert_eq!(g.context(), ctx, "generator from a different context");
        }
        let mut f = Folder::bouquet(gens);
        f.fold();
        f.prune();
        let live: Vec<_> = f.edges.iter().flatten().cloned().collect();
        let triples: Vec<_> = live.iter().map(|e| (e.src, e.gen, e.dst)).collect();
        let (graph, order) = canonicalize(ctx, f.incident.len(), f.base, &triples);
        let labels = live
            .into_iter()
            .filter(|e| order.contains_key(&e.src))
            .map(|e| ((order[&e.src], e.gen), e.label))
            .collect();
        LabeledFolding { graph, generator_count: gens.len(), labels, base_conj: f.base_conj }
    }

    pub fn graph(&self) -> &SubgroupGraph {
        &self.graph
    }

    pub fn into_graph(self) -> SubgroupGraph {
        self.graph
    }

    /// True when the generators are a free basis of the subgroup they generate.
    pub fn is_free_basis(&self) -> bool {
        self.graph.rank() == self.generator_count
    }

    /// Writes a member as a reduced word in the abstract generators
    /// (letter `k` stands for the `k`-th generator); `None` for non-members.
    pub fn express(&self, w: &Word) -> Option<Vec<i32>> {
        let mut v = 0;
        let mut acc = self.base_conj.clone();
        for &l in w.letters() {
            let g = l.unsigned_abs();
            if l > 0 {
                let t = self.graph.out[v][g as usize - 1]?;
                acc.extend(&self.labels[&(v, g)]);
                v = t;
            } else {
                let s = self.graph.inn[v][g as usize - 1]?;
                acc.extend(invert_letters(&self.labels[&(s, g)]));
                v = s;
            }
        }
        if v != 0 {
            return None;
        }
        acc.extend(invert_letters(&self.base_conj));
        Some(reduce_letters(&acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{random_word, words_up_to};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn ctx(n: usize) -> FreeGroupContext {
        FreeGroupContext::new(n).unwrap()
    }

    fn w(s: &str, n: usize) -> Word {
        Word::parse(s, ctx(n)).unwrap()
    }

    fn g(gens: &[&str], n: usize) -> SubgroupGraph {
        let gens: Vec<_> = gens.iter().map(|s| w(s, n)).collect();
        SubgroupGraph::build(ctx(n), &gens)
    }

    /// Evaluates a word in abstract generators on concrete generators.
    fn evaluate(gens: &[Word], word: &[i32], c: FreeGroupContext) -> Word {
        word.iter().fold(c.identity(), |acc, &l| {
            let u = &gens[l.unsigned_abs() as usize - 1];
            if l > 0 {
                &acc * u
            } else {
                &acc * &u.invert()
            }
        })
    }

    #[test]
    fn single_loop_and_trivial() {
        let one = g(&["x1"], 2);
        assert_eq!(one.vertex_count(), 1);
        assert_eq!(one.edges(), &[(0, 1, 0)]);
        let t = SubgroupGraph::trivial(ctx(2));
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.rank(), 0);
        assert!(t.contains(&ctx(2).identity()));
        assert!(!t.contains(&w("x1", 2)));
    }

    #[test]
    fn membership_examples() {
        assert!(g(&["x1", "x2"], 2).contains(&w("x1 x2 x1-", 2)));
        assert!(!g(&["x1 x1"], 2).contains(&w("x1", 2)));
        let h = g(&["x1 x2 x1-", "x2 x2 x1"], 3);
        assert!(h.contains(&w("x1 x2 x1-", 3)));
        assert!(h.contains(&w("x2 x2 x1", 3)));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(g(&["x1", "x2"], 2).rank(), 2);
        // The second generator is the square of the first.
        assert_eq!(g(&["x1 x2 x1-", "x1 x2 x2 x1-"], 2).rank(), 1);
        assert_eq!(g(&["x1 x2 x1-", "x2 x1 x2-"], 2).rank(), 2);
        assert_eq!(g(&["x1 x2", "x2- x1-"], 2).rank(), 1);
        assert_eq!(g(&["x1 x1", "x1 x1 x1"], 2).rank(), 1);
    }

    #[test]
    fn intersection_examples() {
        let i = g(&["x1", "x2"], 3).intersect(&g(&["x1", "x3"], 3));
        assert!(i.same_subgroup(&g(&["x1"], 3)));
        let h = g(&["x1 x2", "x2 x2 x1-"], 2);
        assert_eq!(h.intersect(&h), h);
        let a = g(&["x1 x1", "x2"], 2);
        let b = g(&["x1 x1 x1", "x2"], 2);
        let ab = a.intersect(&b);
        for u in words_up_to(ctx(2), 6) {
            if ab.contains(&u) {
                assert!(a.contains(&u) && b.contains(&u), "{u}");
            }
        }
        assert!(ab.contains(&w("x1 x1 x1 x1 x1 x1", 2)));
    }

    #[test]
    fn same_subgroup_examples() {
        assert!(g(&["x1 x2"], 2).same_subgroup(&g(&["x2- x1-"], 2)));
        assert!(!g(&["x1"], 2).same_subgroup(&g(&["x1 x1"], 2)));
    }

    #[test]
    fn nielsen_equivalent_tuples_give_same_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut gens: Vec<Word> = (0..3).map(|_| random_word(ctx(3), 5, &mut rng)).collect();
            let before = SubgroupGraph::build(ctx(3), &gens);
            for _ in 0..6 {
                let i = rng.gen_range(0..3);
                let j = (i + rng.gen_range(1..3)) % 3;
                gens[i] = match rng.gen_range(0..4) {
                    0 => &gens[i] * &gens[j],
                    1 => &gens[i] * &gens[j].invert(),
                    2 => &gens[j] * &gens[i],
                    _ => gens[i].invert(),
                };
            }
            assert_eq!(SubgroupGraph::build(ctx(3), &gens), before);
        }
    }

    #[test]
    fn membership_against_enumeration() {
        // Oracle: all products of at most four generator letters.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let gens: Vec<Word> = (0..2).map(|_| random_word(ctx(2), 4, &mut rng)).collect();
            let h = SubgroupGraph::build(ctx(2), &gens);
            let mut products: HashSet<Word> = HashSet::from([ctx(2).identity()]);
            let mut frontier = products.clone();
            let letters: Vec<Word> = gens.iter().flat_map(|u| [u.clone(), u.invert()]).collect();
            for _ in 0..4 {
                let mut next = HashSet::new();
                for p in &frontier {
                    for l in &letters {
                        next.insert(p * l);
                    }
                }
                products.extend(next.iter().cloned());
                frontier = next;
            }
            for p in &products {
                assert!(h.contains(p));
            }
        }
    }

    #[test]
    fn labelled_folding_expresses_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let gens: Vec<Word> = (0..3).map(|_| random_word(ctx(3), 5, &mut rng)).collect();
            let lf = LabeledFolding::new(ctx(3), &gens);
            for _ in 0..5 {
                let k = rng.gen_range(0..5);
                let raw: Vec<i32> = (0..k)
                    .map(|_| {
                        let i = rng.gen_range(1..=3);
                        if rng.gen_bool(0.5) {
                            i
                        } else {
                            -i
                        }
                    })
                    .collect();
                let member = evaluate(&gens, &raw, ctx(3));
                let expr = lf.express(&member).expect("member");
                assert_eq!(evaluate(&gens, &expr, ctx(3)), member);
            }
        }
    }

    #[test]
    fn basis_generates_the_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let gens: Vec<Word> = (0..3).map(|_| random_word(ctx(3), 6, &mut rng)).collect();
            let h = SubgroupGraph::build(ctx(3), &gens);
            let b = h.basis();
            assert_eq!(b.len(), h.rank());
            assert_eq!(SubgroupGraph::build(ctx(3), &b), h);
            assert!(LabeledFolding::new(ctx(3), &b).is_free_basis());
        }
    }

    #[test]
    fn dump_format() {
        assert_eq!(g(&["x1", "x2 x1 x2-"], 2).dump(), "0* --x1--> 0*\n0* --x2--> 1\n1 --x1--> 1\n");
    }
}
