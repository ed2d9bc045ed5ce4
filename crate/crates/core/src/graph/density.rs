use super::{Graph, DEFAULT_VERTEX_CAP};
use crate::error::{capacity, input, Result};
use num_rational::Ratio;

/// `|E| / |V|` as an exact rational.
pub fn density(g: &Graph) -> Result<Ratio<i64>> {
    if g.n() == 0 {
        return input("density of the empty graph is undefined");
    }
    Ok(Ratio::new(g.edge_count() as i64, g.n() as i64))
}

/// Maximum density over nonempty induced subgraphs, with a maximising vertex
/// set. Ties prefer fewer vertices, then the lexicographically smallest set.
pub fn max_density(g: &Graph) -> Result<(Ratio<i64>, Vec<usize>)> {
    max_density_with_cap(g, DEFAULT_VERTEX_CAP)
}

pub fn max_density_with_cap(g: &Graph, cap: usize) -> Result<(Ratio<i64>, Vec<usize>)> {
    let n = g.n();
    if n == 0 {
        return input("maximum density of the empty graph is undefined");
    }
    if n > cap || n > 63 {
        return capacity(format!("max_density over {n} vertices exceeds the cap {cap}"));
    }
    let masks = g.masks();
    let mut best: Option<(Ratio<i64>, Vec<usize>)> = None;
    for set in 1u64..(1u64 << n) {
        let e = Graph::edges_within_mask(&masks, set) as i64;
        let v = set.count_ones() as i64;
        let r = Ratio::new(e, v);
        let better = match &best {
            None => true,
            Some((br, bs)) => {
                r > *br || (r == *br && (v as usize) < bs.len())
                    || (r == *br && v as usize == bs.len() && mask_vertices(set) < *bs)
            }
        };
        if better {
            best = Some((r, mask_vertices(set)));
        }
    }
    Ok(best.expect("n >= 1 gives at least one subset"))
}

fn mask_vertices(set: u64) -> Vec<usize> {
    (0..64).filter(|&v| set >> v & 1 == 1).collect()
}
