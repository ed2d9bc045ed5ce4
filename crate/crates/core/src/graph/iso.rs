use super::{ExtensionPair, Graph, RootedGraph};
use crate::error::{capacity, Result};

/// Default vertex cap for brute-force isomorphism work.
pub const DEFAULT_VERTEX_CAP: usize = 12;

/// Limits for the brute-force isomorphism routines.
#[derive(Clone, Copy, Debug)]
pub struct IsoOptions {
    pub vertex_cap: usize,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n > 64 {
        return capacity(format!("graph on {n} vertices exceeds the isomorphism cap {cap}"));
    }
    Ok(())
}

/// Calls `visit` with every isomorphism `a → b` (as `map[x] = image of x`)
/// that sends `fixed[i].0` to `fixed[i].1`. `visit` returns `false` to stop.
pub fn for_each_isomorphism(
    a: &Graph,
    b: &Graph,
    fixed: &[(usize, usize)],
    opts: IsoOptions,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<()> {
    check_cap(a.n().max(b.n()), opts.vertex_cap)?;
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Ok(());
    }
    let n = a.n();
    let am = a.masks();
    let bm = b.masks();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = 0u64;
    for &(x, _) in fixed {
        if placed >> x & 1 == 0 {
            order.push(x);
            placed |= 1 << x;
        }
    }
    // Remaining vertices: greedily take the one with most already-ordered neighbours.
    while order.len() < n {
        let mut best = usize::MAX;
        let mut key = (0u32, 0u32);
        for x in 0..n {
            if placed >> x & 1 == 1 {
                continue;
            }
            let k = ((am[x] & placed).count_ones(), am[x].count_ones());
            if best == usize::MAX || k > key {
                best = x;
                key = k;
            }
        }
        order.push(best);
        placed |= 1 << best;
    }
    let mut forced = vec![usize::MAX; n];
    for &(x, y) in fixed {
        if y >= n {
            return Ok(());
        }
        if forced[x] != usize::MAX && forced[x] != y {
            return Ok(());
        }
        forced[x] = y;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = 0u64;
    let mut state = Search {
        am: &am,
        bm: &bm,
        order: &order,
        forced: &forced,
    };
    state.run(0, &mut map, &mut used, visit);
    Ok(())
}

struct Search<'a> {
    am: &'a [u64],
    bm: &'a [u64],
    order: &'a [usize],
    forced: &'a [usize],
}

impl Search<'_> {
    fn run(
        &mut self,
        depth: usize,
        map: &mut [usize],
        used: &mut u64,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == self.order.len() {
            return visit(map);
        }
        let x = self.order[depth];
        let deg = self.am[x].count_ones();
        let candidates: Vec<usize> = if self.forced[x] != usize::MAX {
            vec![self.forced[x]]
        } else {
            (0..map.len()).collect()
        };
        for y in candidates {
            if *used >> y & 1 == 1 || self.bm[y].count_ones() != deg {
                continue;
            }
            let consistent = self.order[..depth].iter().all(|&x2| {
                let y2 = map[x2];
                (self.am[x] >> x2 & 1) == (self.bm[y] >> y2 & 1)
            });
            if !consistent {
                continue;
            }
            map[x] = y;
            *used |= 1 << y;
            let go_on = self.run(depth + 1, map, used, visit);
            *used &= !(1 << y);
            map[x] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Number of automorphisms of `g`.
pub fn count_automorphisms(g: &Graph) -> Result<u64> {
    let mut count = 0u64;
    for_each_isomorphism(g, g, &[], IsoOptions::default(), &mut |_| {
        count += 1;
        true
    })?;
    Ok(count)
}

/// Number of automorphisms of the top graph fixing every base vertex.
pub fn count_rooted_automorphisms(pair: &ExtensionPair) -> Result<u64> {
    let fixed: Vec<(usize, usize)> = pair.base_vertices().iter().map(|&v| (v, v)).collect();
    let mut count = 0u64;
    for_each_isomorphism(pair.top(), pair.top(), &fixed, IsoOptions::default(), &mut |_| {
        count += 1;
        true
    })?;
    Ok(count)
}

/// Whether some isomorphism maps `a.roots[i]` to `b.roots[i]` for every `i`.
pub fn are_isomorphic_rooted(a: &RootedGraph, b: &RootedGraph) -> Result<bool> {
    check_cap(a.graph().n().max(b.graph().n()), DEFAULT_VERTEX_CAP)?;
    if a.arity() != b.arity() {
        return Ok(false);
    }
    let fixed: Vec<(usize, usize)> = a
        .roots()
        .iter()
        .zip(b.roots())
        .map(|(&x, &y)| (x, y))
        .collect();
    let mut found = false;
    for_each_isomorphism(a.graph(), b.graph(), &fixed, IsoOptions::default(), &mut |_| {
        found = true;
        false
    })?;
    Ok(found)
}

/// Canonical relabeling of a rooted graph: roots go to `0..k` in order and
/// the rest are ordered to minimise the adjacency code within colour-refinement
/// cells. Returns the relabeled graph and the map `old → new`.
pub fn canonical_rooted(g: &Graph, roots: &[usize]) -> Result<(Graph, Vec<usize>)> {
    let n = g.n();
    if n > 64 {
        return capacity(format!("canonical form needs at most 64 vertices, got {n}"));
    }
    let masks = g.masks();
    let colors = refine_colors(&masks, roots);
    // Position cells: positions sorted by colour.
    let mut by_color: Vec<usize> = (0..n).collect();
    by_color.sort_by_key(|&v| colors[v]);
    let cell_of_pos: Vec<usize> = by_color.iter().map(|&v| colors[v]).collect();

    let mut best = None;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut rows: Vec<u64> = Vec::with_capacity(n);
    let mut used = 0u64;
    canon_search(&masks, &colors, &cell_of_pos, &mut order, &mut rows, &mut used, &mut best);
    let (_, best_order) = best.unwrap_or_default();
    let mut perm = vec![0; n];
    for (pos, &v) in best_order.iter().enumerate() {
        perm[v] = pos;
    }
    Ok((g.relabel(&perm), perm))
}

fn canon_search(
    masks: &[u64],
    colors: &[usize],
    cell_of_pos: &[usize],
    order: &mut Vec<usize>,
    rows: &mut Vec<u64>,
    used: &mut u64,
    best: &mut Option<(Vec<u64>, Vec<usize>)>,
) {
    let i = order.len();
    if i == masks.len() {
        let better = match best {
            None => true,
            Some((b, _)) => rows.as_slice() < b.as_slice(),
        };
        if better {
            *best = Some((rows.clone(), order.clone()));
        }
        return;
    }
    for x in 0..masks.len() {
        if *used >> x & 1 == 1 || colors[x] != cell_of_pos[i] {
            continue;
        }
        // Twins (same colour, same neighbourhood apart from each other) are
        // exchanged by an automorphism, so only the first needs exploring.
        let has_earlier_twin = (0..x).any(|y| {
            *used >> y & 1 == 0
                && colors[y] == colors[x]
                && masks[x] & !(1 << y) == masks[y] & !(1 << x)
        });
        if has_earlier_twin {
            continue;
        }
        let mut row = 0u64;
        for (j, &y) in order.iter().enumerate() {
            if masks[x] >> y & 1 == 1 {
                row |= 1 << j;
            }
        }
        rows.push(row);
        let prune = match best {
            Some((b, _)) => rows.as_slice() > &b[..=i],
            None => false,
        };
        if !prune {
            order.push(x);
            *used |= 1 << x;
            canon_search(masks, colors, cell_of_pos, order, rows, used, best);
            *used &= !(1 << x);
            order.pop();
        }
        rows.pop();
    }
}

/// Colour refinement seeded with one colour per root (in root order) and a
/// shared colour for all other vertices. Colour ids are canonical ranks.
fn refine_colors(masks: &[u64], roots: &[usize]) -> Vec<usize> {
    let n = masks.len();
    let k = roots.len();
    let mut colors = vec![k; n];
    for (i, &r) in roots.iter().enumerate() {
        colors[r] = i;
    }
    let mut count = distinct(&colors);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = (0..n)
                    .filter(|&w| masks[v] >> w & 1 == 1)
                    .map(|w| colors[w])
                    .collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq = sigs.clone();
        uniq.sort();
        uniq.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| uniq.binary_search(s).expect("signature present"))
            .collect();
        let c = uniq.len();
        colors = next;
        if c == count {
            return colors;
        }
        count = c;
    }
}

fn distinct(v: &[usize]) -> usize {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}
