//! Nested-dissection ordering and the matching assembly tree.

use super::CsrMatrix;

/// Components at or below this size become a single dense front.
const LEAF_SIZE: usize = 24;

const REMOVED: u32 = u32::MAX;

/// Symmetrized adjacency (pattern of `A + A^T` without the diagonal).
pub(crate) struct Graph {
    pub offsets: Vec<usize>,
    pub adj: Vec<u32>,
}

impl Graph {
    pub fn from_matrix(m: &CsrMatrix) -> Graph {
        let n = m.n_rows;
        let mut deg = vec![0usize; n + 1];
        for i in 0..n {
            for &j in m.row(i).0 {
                if j != i {
                    deg[i + 1] += 1;
                    deg[j + 1] += 1;
                }
            }
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut next = deg.clone();
        let mut adj = vec![0u32; deg[n]];
        for i in 0..n {
            for &j in m.row(i).0 {
                if j != i {
                    adj[next[i]] = j as u32;
                    next[i] += 1;
                    adj[next[j]] = i as u32;
                    next[j] += 1;
                }
            }
        }
        // Sort and deduplicate each list, compacting in place.
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut write = 0;
        for i in 0..n {
            let (s, e) = (deg[i], deg[i + 1]);
            adj[s..e].sort_unstable();
            let mut last = u32::MAX;
            for k in s..e {
                let v = adj[k];
                if v != last {
                    adj[write] = v;
                    write += 1;
                    last = v;
                }
            }
            offsets.push(write);
        }
        adj.truncate(write);
        adj.shrink_to_fit();
        Graph { offsets, adj }
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// A front of the assembly tree: pivots at positions `start..end` of the
/// new ordering, eliminated after all of `children`.
#[derive(Debug, Clone)]
pub(crate) struct TreeNode {
    pub start: usize,
    pub end: usize,
    pub children: Vec<usize>,
}

pub(crate) struct Ordering {
    /// `perm[new] = old`.
    pub perm: Vec<usize>,
    /// `inv[old] = new`.
    pub inv: Vec<usize>,
    /// Tree nodes in postorder.
    pub nodes: Vec<TreeNode>,
}

struct Dissector<'g> {
    g: &'g Graph,
    mark: Vec<u32>,
    level: Vec<u32>,
    next_mark: u32,
    perm: Vec<usize>,
    nodes: Vec<TreeNode>,
}

impl<'g> Dissector<'g> {
    fn fresh_mark(&mut self) -> u32 {
        self.next_mark += 1;
        self.next_mark
    }

    fn place(&mut self, verts: &[u32], children: Vec<usize>) -> usize {
        let start = self.perm.len();
        for &v in verts {
            self.perm.push(v as usize);
            self.mark[v as usize] = REMOVED;
        }
        self.nodes.push(TreeNode {
            start,
            end: self.perm.len(),
            children,
        });
        self.nodes.len() - 1
    }

    /// Split `set` (all carrying mark `id`) into connected components, each
    /// relabelled with a fresh mark.
    fn components(&mut self, set: &[u32], id: u32) -> Vec<(Vec<u32>, u32)> {
        let mut out = Vec::new();
        for &s in set {
            if self.mark[s as usize] != id {
                continue;
            }
            let cid = self.fresh_mark();
            self.mark[s as usize] = cid;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head] as usize;
                head += 1;
                for &w in self.g.neighbors(v) {
                    if self.mark[w as usize] == id {
                        self.mark[w as usize] = cid;
                        comp.push(w);
                    }
                }
            }
            out.push((comp, cid));
        }
        out
    }

    /// Breadth-first levels from `root` inside component `cid`; returns the
    /// vertices in visiting order and the number of levels.
    fn bfs(&mut self, root: u32, cid: u32, size: usize) -> (Vec<u32>, usize) {
        let mut order = Vec::with_capacity(size);
        order.push(root);
        self.level[root as usize] = 0;
        // Temporarily mark visited vertices with cid ^ top bit.
        let visited = cid | 0x8000_0000;
        self.mark[root as usize] = visited;
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            let lv = self.level[v];
            for &w in self.g.neighbors(v) {
                if self.mark[w as usize] == cid {
                    self.mark[w as usize] = visited;
                    self.level[w as usize] = lv + 1;
                    order.push(w);
                }
            }
        }
        for &v in &order {
            self.mark[v as usize] = cid;
        }
        let depth = self.level[*order.last().unwrap() as usize] as usize + 1;
        (order, depth)
    }

    fn dissect(&mut self, set: Vec<u32>, id: u32) -> Vec<usize> {
        let mut roots = Vec::new();
        for (comp, cid) in self.components(&set, id) {
            roots.push(self.dissect_component(comp, cid));
        }
        roots
    }

    fn dissect_component(&mut self, comp: Vec<u32>, cid: u32) -> usize {
        let size = comp.len();
        if size <= LEAF_SIZE {
            return self.place(&comp, Vec::new());
        }
        // Pseudo-peripheral root: restart from a low-degree vertex of the
        // last level while the eccentricity grows. The level array always
        // belongs to the most recent search.
        let (mut order, mut depth) = self.bfs(comp[0], cid, size);
        for _ in 0..4 {
            let last = self.level[*order.last().unwrap() as usize];
            let cand = order
                .iter()
                .rev()
                .take_while(|&&v| self.level[v as usize] == last)
                .min_by_key(|&&v| self.g.neighbors(v as usize).len())
                .copied()
                .unwrap();
            let (o2, d2) = self.bfs(cand, cid, size);
            let grew = d2 > depth;
            order = o2;
            depth = d2;
            if !grew {
                break;
            }
        }
        if depth < 3 {
            return self.place(&comp, Vec::new());
        }

        let mut count = vec![0usize; depth];
        // thin[l]: vertices of level l adjacent to level l + 1.
        let mut thin = vec![0usize; depth];
        for &v in &order {
            let l = self.level[v as usize];
            count[l as usize] += 1;
            if self
                .g
                .neighbors(v as usize)
                .iter()
                .any(|&w| self.mark[w as usize] == cid && self.level[w as usize] == l + 1)
            {
                thin[l as usize] += 1;
            }
        }
        let mut before = vec![0usize; depth + 1];
        for l in 0..depth {
            before[l + 1] = before[l] + count[l];
        }
        let pick = |lo: f64| {
            (1..depth - 1)
                .filter(|&l| {
                    let b = before[l] + count[l] - thin[l];
                    let a = size - before[l + 1];
                    b as f64 >= lo * size as f64 && a as f64 >= lo * size as f64
                })
                .min_by_key(|&l| (thin[l], l))
        };
        let sep_level = pick(0.3)
            .or_else(|| pick(0.15))
            .unwrap_or_else(|| (1..depth - 1).min_by_key(|&l| before[l].abs_diff(size / 2)).unwrap())
            as u32;

        let mark_a = self.fresh_mark();
        let mark_b = self.fresh_mark();
        let mut part_a = Vec::new();
        let mut part_b = Vec::new();
        let mut sep = Vec::new();
        for &v in &order {
            let l = self.level[v as usize];
            if l < sep_level {
                part_a.push(v);
            } else if l > sep_level {
                part_b.push(v);
            } else if self
                .g
                .neighbors(v as usize)
                .iter()
                .any(|&w| self.mark[w as usize] == cid && self.level[w as usize] == l + 1)
            {
                sep.push(v);
            } else {
                part_a.push(v);
            }
        }
        for &v in &part_a {
            self.mark[v as usize] = mark_a;
        }
        for &v in &part_b {
            self.mark[v as usize] = mark_b;
        }
        for &v in &sep {
            self.mark[v as usize] = REMOVED - 1;
        }
        let mut children = self.dissect(part_a, mark_a);
        children.extend(self.dissect(part_b, mark_b));
        self.place(&sep, children)
    }
}

pub(crate) fn nested_dissection(g: &Graph) -> Ordering {
    let n = g.len();
    let mut d = Dissector {
        g,
        mark: vec![0; n],
        level: vec![0; n],
        next_mark: 0,
        perm: Vec::with_capacity(n),
        nodes: Vec::new(),
    };
    let all: Vec<u32> = (0..n as u32).collect();
    d.dissect(all, 0);
    debug_assert_eq!(d.perm.len(), n);
    let mut inv = vec![0usize; n];
    for (new, &old) in d.perm.iter().enumerate() {
        inv[old] = new;
    }
    Ordering {
        perm: d.perm,
        inv,
        nodes: d.nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;

    fn grid(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = i * n + j;
                t.push((v, v, Complex64::new(4.0, 0.0)));
                if j + 1 < n {
                    t.push((v, v + 1, Complex64::new(-1.0, 0.0)));
                }
                if i + 1 < n {
                    t.push((v, v + n, Complex64::new(-1.0, 0.0)));
                }
            }
        }
        CsrMatrix::from_triplets(n * n, n * n, &t).unwrap()
    }

    #[test]
    fn ordering_is_a_permutation_and_tree_is_postordered() {
        let g = Graph::from_matrix(&grid(30));
        let o = nested_dissection(&g);
        let mut seen = vec![false; 900];
        for &p in &o.perm {
            assert!(!seen[p]);
            seen[p] = true;
        }
        for (i, node) in o.nodes.iter().enumerate() {
            for &c in &node.children {
                assert!(c < i);
                assert!(o.nodes[c].end <= node.start);
            }
        }
    }

    #[test]
    fn separators_split_the_graph() {
        // No edge joins two different subtrees except through an ancestor.
        let g = Graph::from_matrix(&grid(25));
        let o = nested_dissection(&g);
        let mut owner = vec![0usize; g.len()];
        for (i, node) in o.nodes.iter().enumerate() {
            for pos in node.start..node.end {
                owner[o.perm[pos]] = i;
            }
        }
        let mut parent = vec![usize::MAX; o.nodes.len()];
        for (i, node) in o.nodes.iter().enumerate() {
            for &c in &node.children {
                parent[c] = i;
            }
        }
        let is_ancestor = |a: usize, mut b: usize| {
            while b != usize::MAX {
                if a == b {
                    return true;
                }
                b = parent[b];
            }
            false
        };
        for v in 0..g.len() {
            for &w in g.neighbors(v) {
                let (a, b) = (owner[v], owner[w as usize]);
                assert!(is_ancestor(a, b) || is_ancestor(b, a));
            }
        }
    }
}
