use std::collections::VecDeque;

use super::TypeError;

const UNREACHED: u32 = u32::MAX;

/// An explicit finite subtree of `T_d` with marked points.
///
/// `marked[i]` is the node realizing point `i`; distinct points occupy
/// distinct nodes.
#[derive(Debug, Clone)]
pub(crate) struct MarkedTree {
    adj: Vec<Vec<usize>>,
    marked: Vec<usize>,
}

impl MarkedTree {
    pub fn single() -> Self {
        Self {
            adj: vec![Vec::new()],
            marked: vec![0],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add_node(&mut self, attach: usize) -> usize {
        let id = self.adj.len();
        self.adj.push(vec![attach]);
        self.adj[attach].push(id);
        id
    }

    pub fn set_marked(&mut self, marked: Vec<usize>) {
        self.marked = marked;
    }

    fn bfs_from(&self, sources: &[usize]) -> (Vec<u32>, Vec<usize>, Vec<usize>) {
        let mut dist = vec![UNREACHED; self.adj.len()];
        let mut parent = vec![usize::MAX; self.adj.len()];
        let mut order = Vec::with_capacity(self.adj.len());
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == UNREACHED {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &self.adj[x] {
                if dist[y] == UNREACHED {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        (dist, parent, order)
    }

    pub fn distances_from(&self, src: usize) -> Vec<u32> {
        self.bfs_from(&[src]).0
    }

    /// Distance of every node to the nearest marked node.
    pub fn distance_to_marks(&self) -> Vec<u32> {
        self.bfs_from(&self.marked).0
    }

    /// Reconstructs the Steiner tree of a finite tree metric by inserting
    /// points one at a time at their Gromov-product attachment position, then
    /// checks the realized distances against the input.
    pub fn from_distances(n: usize, dist: &[u32]) -> Result<Self, TypeError> {
        let at = |i: usize, j: usize| dist[i * n + j] as i64;
        let mut tree = Self::single();
        for x in 1..n {
            let (d0, parent0, _) = tree.bfs_from(&[tree.marked[0]]);
            let mut best = (0i64, 0usize);
            for j in 0..x {
                let twice = at(x, 0) + at(0, j) - at(x, j);
                if twice < 0 || twice % 2 != 0 {
                    return Err(TypeError::NotTreeMetric { i: x, j });
                }
                if twice / 2 > best.0 {
                    best = (twice / 2, j);
                }
            }
            let (gromov, j) = best;
            if gromov > at(0, j) || gromov > at(x, 0) {
                return Err(TypeError::NotTreeMetric { i: x, j });
            }
            let mut node = tree.marked[j];
            for _ in 0..(d0[node] as i64 - gromov) {
                node = parent0[node];
            }
            for _ in 0..(at(x, 0) - gromov) {
                node = tree.add_node(node);
            }
            if tree.marked.contains(&node) {
                return Err(TypeError::NotTreeMetric { i: x, j });
            }
            tree.marked.push(node);
            let realized = tree.distances_from(node);
            if let Some(j) = (0..x).find(|&j| realized[tree.marked[j]] as i64 != at(x, j)) {
                return Err(TypeError::NotTreeMetric { i: x, j });
            }
        }
        Ok(tree)
    }

    /// Prunes unmarked leaves until every leaf is marked; the result is the
    /// Steiner hull with nodes renumbered.
    pub fn hull(&self) -> MarkedTree {
        let n = self.adj.len();
        let mut is_marked = vec![false; n];
        for &m in &self.marked {
            is_marked[m] = true;
        }
        let mut deg: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut alive = vec![true; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&x| deg[x] <= 1 && !is_marked[x]).collect();
        while let Some(x) = queue.pop_front() {
            if !alive[x] {
                continue;
            }
            alive[x] = false;
            for &y in &self.adj[x] {
                if alive[y] {
                    deg[y] -= 1;
                    if deg[y] <= 1 && !is_marked[y] {
                        queue.push_back(y);
                    }
                }
            }
        }
        let mut index = vec![usize::MAX; n];
        let mut next = 0;
        for x in 0..n {
            if alive[x] {
                index[x] = next;
                next += 1;
            }
        }
        let mut adj = vec![Vec::new(); next];
        for x in 0..n {
            if alive[x] {
                adj[index[x]] = self.adj[x]
                    .iter()
                    .filter(|&&y| alive[y])
                    .map(|&y| index[y])
                    .collect();
            }
        }
        MarkedTree {
            adj,
            marked: self.marked.iter().map(|&m| index[m]).collect(),
        }
    }

    /// One or two central nodes of the tree.
    fn centers(&self) -> Vec<usize> {
        let (_, _, order) = self.bfs_from(&[0]);
        let a = *order.last().unwrap();
        let (da, parent, order_a) = self.bfs_from(&[a]);
        let b = *order_a.last().unwrap();
        let diam = da[b] as usize;
        let mut path = vec![b];
        while *path.last().unwrap() != a {
            path.push(parent[*path.last().unwrap()]);
        }
        if diam % 2 == 0 {
            vec![path[diam / 2]]
        } else {
            vec![path[diam / 2], path[diam / 2 + 1]]
        }
    }

    fn encode(&self, x: usize, parent: usize, is_marked: &[bool], codes: &mut [Vec<u8>]) {
        let mut kids: Vec<usize> = self.adj[x].iter().copied().filter(|&y| y != parent).collect();
        for &y in &kids {
            self.encode(y, x, is_marked, codes);
        }
        kids.sort_by(|&p, &q| codes[p].cmp(&codes[q]));
        let mut code = vec![b'(', if is_marked[x] { b'1' } else { b'0' }];
        for &y in &kids {
            code.extend_from_slice(&codes[y]);
        }
        code.push(b')');
        codes[x] = code;
    }

    fn preorder(&self, x: usize, parent: usize, codes: &[Vec<u8>], out: &mut Vec<usize>) {
        out.push(x);
        let mut kids: Vec<usize> = self.adj[x].iter().copied().filter(|&y| y != parent).collect();
        kids.sort_by(|&p, &q| codes[p].cmp(&codes[q]));
        for y in kids {
            self.preorder(y, x, codes, out);
        }
    }

    /// Point indices in canonical order. Two marked trees that are isomorphic
    /// as marked trees yield orderings with identical distance matrices.
    /// Expects a hull (all leaves marked).
    pub fn canonical_order(&self) -> Vec<usize> {
        let n = self.adj.len();
        let mut is_marked = vec![false; n];
        let mut point_of = vec![usize::MAX; n];
        for (i, &m) in self.marked.iter().enumerate() {
            is_marked[m] = true;
            point_of[m] = i;
        }
        let mut codes = vec![Vec::new(); n];
        let mut nodes = Vec::with_capacity(n);
        match self.centers().as_slice() {
            [c] => {
                self.encode(*c, usize::MAX, &is_marked, &mut codes);
                self.preorder(*c, usize::MAX, &codes, &mut nodes);
            }
            [a, b] => {
                self.encode(*a, *b, &is_marked, &mut codes);
                self.encode(*b, *a, &is_marked, &mut codes);
                let (first, second) = if codes[*a] <= codes[*b] { (*a, *b) } else { (*b, *a) };
                self.preorder(first, second, &codes, &mut nodes);
                self.preorder(second, first, &codes, &mut nodes);
            }
            _ => unreachable!("a tree has one or two centers"),
        }
        nodes
            .into_iter()
            .filter(|&x| is_marked[x])
            .map(|x| point_of[x])
            .collect()
    }

    /// Row-major distance matrix between points listed in `order`.
    pub fn distance_matrix(&self, order: &[usize]) -> Vec<u32> {
        let n = order.len();
        let mut out = vec![0; n * n];
        for (a, &i) in order.iter().enumerate() {
            let dist = self.distances_from(self.marked[i]);
            for (b, &j) in order.iter().enumerate() {
                out[a * n + b] = dist[self.marked[j]];
            }
        }
        out
    }

    /// Embeds the tree in `T_d` by growing every node within distance `k - 1`
    /// of the marked set to full degree, and marks everything within `k`.
    pub fn dilate(&self, d: usize, k: usize) -> MarkedTree {
        let mut delta = self.distance_to_marks();
        let mut tree = MarkedTree {
            adj: self.adj.clone(),
            marked: Vec::new(),
        };
        let k = k as u32;
        let mut queue: VecDeque<usize> = (0..self.adj.len()).filter(|&x| delta[x] < k).collect();
        while let Some(x) = queue.pop_front() {
            while tree.adj[x].len() < d {
                let y = tree.add_node(x);
                delta.push(delta[x] + 1);
                if delta[y] < k {
                    queue.push_back(y);
                }
            }
        }
        tree.marked = (0..tree.adj.len()).filter(|&x| delta[x] <= k).collect();
        tree
    }

    /// `|B_k(V)|` in `T_d`, counted from the hull without materializing the
    /// missing branches.
    pub fn ball_count(&self, d: usize, k: usize) -> u64 {
        let delta = self.distance_to_marks();
        // nodes of a pendant branch of depth m: 1 + (d-1) + ... + (d-1)^(m-1)
        let branch = |m: u32| -> u64 {
            let mut total: u64 = 0;
            let mut layer: u64 = 1;
            for _ in 0..m {
                total = total.checked_add(layer).expect("ball size overflows u64");
                layer = layer.checked_mul(d as u64 - 1).expect("ball size overflows u64");
            }
            total
        };
        let mut count: u64 = 0;
        for x in 0..self.adj.len() {
            if delta[x] as usize <= k {
                let missing = (d - self.adj[x].len()) as u64;
                let extra = missing
                    .checked_mul(branch(k as u32 - delta[x]))
                    .expect("ball size overflows u64");
                count = count
                    .checked_add(1 + extra)
                    .expect("ball size overflows u64");
            }
        }
        count
    }
}
