//! Earth mover's distance by the transportation simplex.
//!
//! The problem is restricted to the support of both distributions, started
//! from a north-west-corner basis, and pivoted with the most negative reduced
//! cost (ties to the lowest cell index). After a run of degenerate pivots the
//! solver switches to Bland's rule, which cannot cycle.

const MAX_ITERATIONS: usize = 100_000;

/// Optimal transport cost between `supply` and `demand` under `cost(i, j)`.
///
/// Both inputs must be nonnegative with equal, positive totals (callers
/// normalise). Entries that are exactly zero are dropped from the problem.
pub fn transport_cost(supply: &[f64], demand: &[f64], cost: impl Fn(usize, usize) -> f64) -> f64 {
    let rows: Vec<usize> = (0..supply.len()).filter(|&i| supply[i] > 0.0).collect();
    let cols: Vec<usize> = (0..demand.len()).filter(|&j| demand[j] > 0.0).collect();
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    let m = rows.len();
    let n = cols.len();
    let c: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
        .map(|(i, j)| cost(i, j))
        .collect();

    if m == 1 || n == 1 {
        // The only feasible plan ships everything along the single row/column.
        let mut total = 0.0;
        for (r, &i) in rows.iter().enumerate() {
            for (k, &j) in cols.iter().enumerate() {
                let amount = if m == 1 { demand[j] } else { supply[i] };
                total += amount * c[r * n + k];
            }
        }
        return total;
    }

    let mut s: Vec<f64> = rows.iter().map(|&i| supply[i]).collect();
    let mut d: Vec<f64> = cols.iter().map(|&j| demand[j]).collect();
    let mut solver = Simplex::north_west(m, n, &mut s, &mut d);
    solver.optimise(&c);
    solver.cost(&c)
}

struct Simplex {
    m: usize,
    n: usize,
    flow: Vec<f64>,
    basic: Vec<bool>,
    basis: Vec<usize>,
}

impl Simplex {
    fn north_west(m: usize, n: usize, s: &mut [f64], d: &mut [f64]) -> Self {
        let mut flow = vec![0.0; m * n];
        let mut basic = vec![false; m * n];
        let mut basis = Vec::with_capacity(m + n - 1);
        let (mut i, mut j) = (0, 0);
        loop {
            let x = s[i].min(d[j]);
            let cell = i * n + j;
            flow[cell] = x;
            basic[cell] = true;
            basis.push(cell);
            s[i] -= x;
            d[j] -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            // Move down when the row is exhausted (or the columns are); this
            // keeps exactly m + n - 1 basic cells even with degenerate steps.
            if j == n - 1 || (i < m - 1 && s[i] <= d[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        // The final cell absorbs rounding so that row totals stay exact.
        debug_assert_eq!(basis.len(), m + n - 1);
        Self {
            m,
            n,
            flow,
            basic,
            basis,
        }
    }

    fn cost(&self, c: &[f64]) -> f64 {
        self.basis.iter().map(|&cell| self.flow[cell] * c[cell]).sum()
    }

    /// Row potentials `u` and column potentials `v` with `u_i + v_j = c_ij` on basic cells.
    fn potentials(&self, c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        let mut queue = vec![0usize];
        while let Some(node) = queue.pop() {
            if node < m {
                let i = node;
                for j in 0..n {
                    if self.basic[i * n + j] && v[j].is_nan() {
                        v[j] = c[i * n + j] - u[i];
                        queue.push(m + j);
                    }
                }
            } else {
                let j = node - m;
                for i in 0..m {
                    if self.basic[i * n + j] && u[i].is_nan() {
                        u[i] = c[i * n + j] - v[j];
                        queue.push(i);
                    }
                }
            }
        }
        (u, v)
    }

    /// Tree path of basic cells from column node `j` to row node `i`.
    fn path(&self, i: usize, j: usize) -> Vec<usize> {
        let (m, n) = (self.m, self.n);
        let total = m + n;
        let mut parent = vec![usize::MAX; total];
        let mut via = vec![usize::MAX; total];
        let start = m + j;
        parent[start] = start;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            if node == i {
                break;
            }
            let neighbours: Vec<(usize, usize)> = if node < m {
                (0..n)
                    .filter(|&k| self.basic[node * n + k])
                    .map(|k| (m + k, node * n + k))
                    .collect()
            } else {
                let k = node - m;
                (0..m)
                    .filter(|&r| self.basic[r * n + k])
                    .map(|r| (r, r * n + k))
                    .collect()
            };
            for (next, cell) in neighbours {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    via[next] = cell;
                    queue.push_back(next);
                }
            }
        }
        let mut cells = Vec::new();
        let mut node = i;
        while node != start {
            cells.push(via[node]);
            node = parent[node];
        }
        cells.reverse();
        cells
    }

    fn optimise(&mut self, c: &[f64]) {
        let scale = c.iter().fold(0.0_f64, |a, &b| a.max(b.abs())).max(1.0);
        let eps = 1e-12 * scale;
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_ITERATIONS {
            let (u, v) = self.potentials(c);
            let bland = degenerate_run > 2 * (self.m + self.n);
            let mut entering = None;
            let mut best = -eps;
            for cell in 0..self.m * self.n {
                if self.basic[cell] {
                    continue;
                }
                let (i, j) = (cell / self.n, cell % self.n);
                let reduced = c[cell] - u[i] - v[j];
                if reduced < best {
                    entering = Some(cell);
                    if bland {
                        break;
                    }
                    best = reduced;
                }
            }
            let Some(cell) = entering else {
                return;
            };
            let (i, j) = (cell / self.n, cell % self.n);
            // Cycle: entering (+), then path cells alternate -, +, -, ...
            let path = self.path(i, j);
            let mut theta = f64::INFINITY;
            let mut leaving = usize::MAX;
            for (k, &p) in path.iter().enumerate() {
                if k % 2 == 0 {
                    let f = self.flow[p];
                    if f < theta || (f == theta && bland && p < leaving) {
                        theta = f;
                        leaving = p;
                    }
                }
            }
            degenerate_run = if theta == 0.0 { degenerate_run + 1 } else { 0 };
            self.flow[cell] += theta;
            for (k, &p) in path.iter().enumerate() {
                if k % 2 == 0 {
                    self.flow[p] -= theta;
                } else {
                    self.flow[p] += theta;
                }
            }
            self.flow[leaving] = 0.0;
            self.basic[leaving] = false;
            self.basic[cell] = true;
            let slot = self.basis.iter().position(|&b| b == leaving).expect("leaving cell is basic");
            self.basis[slot] = cell;
        }
    }
}
