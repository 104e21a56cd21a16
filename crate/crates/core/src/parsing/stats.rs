use super::Parsing;

#[derive(Debug, Clone, PartialEq)]
pub struct HeightReport {
    pub h: usize,
    /// Per-position copy counts, `c[k - 1]` for text position `k`.
    pub c: Vec<u32>,
    pub avg_c: f64,
}

/// Copy counts: 1 at every phrase end, and one more than the count of the
/// corresponding source position inside copied parts. `h` is the maximum.
pub fn compute_height(p: &Parsing) -> HeightReport {
    let mut c = Vec::with_capacity(p.text_len);
    for ph in &p.phrases {
        for off in 0..ph.copy_len {
            let v = c[ph.copy_start - 1 + off] + 1;
            c.push(v);
        }
        c.push(1u32);
    }
    let h = c.iter().copied().max().unwrap_or(0) as usize;
    let avg_c = if c.is_empty() {
        0.0
    } else {
        c.iter().map(|&x| x as f64).sum::<f64>() / c.len() as f64
    };
    HeightReport { h, c, avg_c }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthAssignment {
    /// Depth of every source, in source order.
    pub depths: Vec<u32>,
    /// Maximum depth.
    pub delta: u32,
}

impl DepthAssignment {
    pub fn average(&self) -> f64 {
        if self.depths.is_empty() {
            0.0
        } else {
            self.depths.iter().map(|&d| d as f64).sum::<f64>() / self.depths.len() as f64
        }
    }
}

/// Prefix-maximum Fenwick tree.
struct MaxFenwick(Vec<u32>);

impl MaxFenwick {
    fn update(&mut self, mut i: usize, v: u32) {
        while i < self.0.len() {
            self.0[i] = self.0[i].max(v);
            i += i & i.wrapping_neg();
        }
    }

    fn query(&self, mut i: usize) -> u32 {
        let mut m = 0;
        while i > 0 {
            m = m.max(self.0[i]);
            i -= i & i.wrapping_neg();
        }
        m
    }
}

/// Source depths under the strict cover relation: `[l1, r1]` covers
/// `[l2, r2]` when `l1 < l2` and `r1 >= r2`. Uncovered and empty sources
/// have depth 0; otherwise depth is one more than the deepest cover.
///
/// Sources are swept by start; each start group is queried against all
/// strictly earlier sources for the deepest one ending at or after it.
pub fn compute_source_depths(p: &Parsing) -> DepthAssignment {
    let order = p.source_order();
    let n = p.text_len;
    // index by reversed end so that "end >= r" becomes a prefix query
    let mut tree = MaxFenwick(vec![0; n + 2]);
    let slot = |r: usize| n + 1 - r;
    let mut depths = vec![0u32; order.len()];
    let mut g = 0;
    while g < order.len() {
        let start = p.phrases[order[g]].source().map_or(0, |s| s.0);
        let mut h = g;
        while h < order.len() && p.phrases[order[h]].source().map_or(0, |s| s.0) == start {
            h += 1;
        }
        if start > 0 {
            for idx in g..h {
                let (_, r) = p.phrases[order[idx]].source().unwrap();
                // tree holds depth + 1, 0 meaning "no cover"
                let best = tree.query(slot(r));
                depths[idx] = best; // (deepest cover + 1) or 0
            }
            for idx in g..h {
                let (_, r) = p.phrases[order[idx]].source().unwrap();
                tree.update(slot(r), depths[idx] + 1);
            }
        }
        g = h;
    }
    let delta = depths.iter().copied().max().unwrap_or(0);
    DepthAssignment { depths, delta }
}
