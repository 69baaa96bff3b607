//! Independent reference implementations used by the acceptance suite.
//!
//! Nothing here calls into the engine: repertoires, cuts and distances are
//! recomputed from raw transition tables by direct summation.

#![allow(dead_code)]

/// Optimal transport by successive shortest paths (Bellman-Ford on the
/// residual graph). Supplies and demands must have equal totals.
pub fn emd_ssp(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> f64 {
    let (m, n) = (supply.len(), demand.len());
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let mut flow = vec![vec![0.0; n]; m];
    let eps = 1e-15;
    loop {
        // Nodes 0..m are rows, m..m+n columns.
        let mut dist = vec![f64::INFINITY; m + n];
        let mut prev = vec![usize::MAX; m + n];
        for i in 0..m {
            if s[i] > eps {
                dist[i] = 0.0;
            }
        }
        for _ in 0..m + n {
            let mut changed = false;
            for i in 0..m {
                if dist[i].is_finite() {
                    for j in 0..n {
                        let nd = dist[i] + cost[i][j];
                        if nd < dist[m + j] - 1e-15 {
                            dist[m + j] = nd;
                            prev[m + j] = i;
                            changed = true;
                        }
                    }
                }
            }
            for j in 0..n {
                if dist[m + j].is_finite() {
                    for i in 0..m {
                        if flow[i][j] > eps {
                            let nd = dist[m + j] - cost[i][j];
                            if nd < dist[i] - 1e-15 {
                                dist[i] = nd;
                                prev[i] = m + j;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let target = (0..n)
            .filter(|&j| d[j] > eps && dist[m + j].is_finite())
            .min_by(|&a, &b| dist[m + a].partial_cmp(&dist[m + b]).unwrap());
        let Some(j) = target else { break };
        // Walk back to the source row, collecting the bottleneck.
        let mut path = Vec::new();
        let mut node = m + j;
        let mut amount = d[j];
        while prev[node] != usize::MAX {
            let p = prev[node];
            if node >= m {
                path.push((p, node - m, 1.0));
            } else {
                amount = amount.min(flow[node][p - m]);
                path.push((node, p - m, -1.0));
            }
            node = p;
        }
        amount = amount.min(s[node]);
        for (i, jj, sign) in path {
            flow[i][jj] += sign * amount;
        }
        s[node] -= amount;
        d[j] -= amount;
        if amount <= eps {
            break;
        }
    }
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..n {
            total += flow[i][j] * cost[i][j];
        }
    }
    total
}

/// Exhaustive transport plans for integer marginals (in units of `1/q`):
/// every nonnegative integer matrix with the given row and column sums.
pub fn emd_integer_plans(supply: &[u32], demand: &[u32], q: u32, cost: &[Vec<f64>]) -> f64 {
    fn fill(
        cell: usize,
        n: usize,
        rows: &mut Vec<u32>,
        cols: &mut Vec<u32>,
        acc: f64,
        cost: &[Vec<f64>],
        best: &mut f64,
    ) {
        let m = rows.len();
        if cell == m * n {
            if rows.iter().all(|&r| r == 0) && cols.iter().all(|&c| c == 0) {
                *best = best.min(acc);
            }
            return;
        }
        let (i, j) = (cell / n, cell % n);
        // The last cell of a row must take what is left of the row.
        let hi = rows[i].min(cols[j]);
        let lo = if j == n - 1 { rows[i] } else { 0 };
        if lo > hi {
            return;
        }
        for x in lo..=hi {
            rows[i] -= x;
            cols[j] -= x;
            fill(cell + 1, n, rows, cols, acc + x as f64 * cost[i][j], cost, best);
            rows[i] += x;
            cols[j] += x;
        }
    }
    let mut best = f64::INFINITY;
    fill(0, demand.len(), &mut supply.to_vec(), &mut demand.to_vec(), 0.0, cost, &mut best);
    best / q as f64
}

/// `sup Σ f(a)(s(a) - t(a))` over `|f(a) - f(b)| ≤ d(a, b)`, by enumerating
/// the vertices of the potential polytope with `f(0) = 0`.
pub fn emd_dual(s: &[f64], t: &[f64], metric: &[Vec<f64>]) -> f64 {
    let k = s.len();
    if k == 1 {
        return 0.0;
    }
    // Constraints f(a) - f(b) ≤ d(a, b) over the free variables f(1..k).
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if a != b {
                let mut row = vec![0.0; k - 1];
                if a > 0 {
                    row[a - 1] += 1.0;
                }
                if b > 0 {
                    row[b - 1] -= 1.0;
                }
                cons.push((row, metric[a][b]));
            }
        }
    }
    let v = k - 1;
    let mut best = f64::NEG_INFINITY;
    let mut pick = vec![0usize; v];
    fn choose(start: usize, depth: usize, total: usize, pick: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
        if depth == pick.len() {
            out(pick);
            return;
        }
        for c in start..total {
            pick[depth] = c;
            choose(c + 1, depth + 1, total, pick, out);
        }
    }
    let total = cons.len();
    choose(0, 0, total, &mut pick, &mut |idx: &[usize]| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&c| cons[c].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&c| cons[c].1).collect();
        let Some(f) = solve(a, b) else { return };
        if cons.iter().all(|(row, rhs)| dot(row, &f) <= rhs + 1e-9) {
            let mut value = 0.0;
            for a in 1..k {
                value += f[a - 1] * (s[a] - t[a]);
            }
            best = best.max(value);
        }
    });
    best
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[p][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= factor * a[col][c];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

// ---------------------------------------------------------------------------
// Naive integrated information over binary elements.

pub const ZERO: f64 = 1e-12;
pub const FLOOR: f64 = 1e-12;
pub const TIE: f64 = 1e-9;

fn bits_of(set: u32) -> Vec<usize> {
    (0..32).filter(|i| set & (1 << i) != 0).collect()
}

/// Index of the restriction of global state `x` to the elements of `set`.
fn project(x: usize, set: u32) -> usize {
    bits_of(set).iter().enumerate().map(|(k, &i)| ((x >> i) & 1) << k).sum()
}

fn subsets(set: u32) -> Vec<u32> {
    (0..=set).filter(|s| s & !set == 0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub iit3: bool,
    pub directional: bool,
}

/// A repertoire over some purview: weights, or zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Rep {
    pub w: Vec<f64>,
    pub zero: bool,
}

impl Rep {
    fn normalised(w: Vec<f64>) -> Rep {
        let total: f64 = w.iter().sum();
        if total <= ZERO {
            Rep { zero: true, w: vec![0.0; w.len()] }
        } else {
            Rep { zero: false, w: w.into_iter().map(|x| x / total).collect() }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Net {
    pub n: usize,
    /// `tpm[x][y]` = probability of next state `y` from state `x`.
    pub tpm: Vec<Vec<f64>>,
}

impl Net {
    pub fn full(&self) -> u32 {
        (1u32 << self.n) - 1
    }

    /// Effect of mechanism state `m` (indexed over `mech`) on `purview`.
    fn generic_effect(&self, mech: u32, m: usize, purview: u32) -> Rep {
        let others = self.n - mech.count_ones() as usize;
        let weight = 1.0 / (1u64 << others) as f64;
        let mut w = vec![0.0; 1 << purview.count_ones()];
        for x in 0..1usize << self.n {
            if project(x, mech) != m {
                continue;
            }
            for y in 0..1usize << self.n {
                w[project(y, purview)] += weight * self.tpm[x][y];
            }
        }
        Rep { w, zero: false }
    }

    fn generic_cause(&self, mech: u32, m: usize, purview: u32) -> Rep {
        let others = self.n - mech.count_ones() as usize;
        let weight = 1.0 / (1u64 << others) as f64;
        let mut w = vec![0.0; 1 << purview.count_ones()];
        for x in 0..1usize << self.n {
            for y in 0..1usize << self.n {
                if project(y, mech) == m {
                    w[project(x, purview)] += weight * self.tpm[x][y];
                }
            }
        }
        Rep::normalised(w)
    }

    pub fn effect(&self, cfg: Settings, mech: u32, m: usize, purview: u32) -> Rep {
        if !cfg.iit3 || purview.count_ones() <= 1 {
            return self.generic_effect(mech, m, purview);
        }
        let parts: Vec<Rep> = bits_of(purview).iter().map(|&j| self.generic_effect(mech, m, 1 << j)).collect();
        let mut w = vec![0.0; 1 << purview.count_ones()];
        for (y, slot) in w.iter_mut().enumerate() {
            *slot = parts.iter().enumerate().map(|(k, p)| p.w[(y >> k) & 1]).product();
        }
        Rep { w, zero: false }
    }

    pub fn cause(&self, cfg: Settings, mech: u32, m: usize, purview: u32) -> Rep {
        if !cfg.iit3 || mech.count_ones() <= 1 {
            return self.generic_cause(mech, m, purview);
        }
        let mut w = vec![1.0; 1 << purview.count_ones()];
        for (k, &i) in bits_of(mech).iter().enumerate() {
            let r = self.generic_cause(1 << i, (m >> k) & 1, purview);
            if r.zero {
                return Rep { zero: true, w: vec![0.0; w.len()] };
            }
            for (x, slot) in w.iter_mut().enumerate() {
                *slot *= r.w[x];
            }
        }
        Rep::normalised(w)
    }

    fn value(&self, cfg: Settings, cause: bool, mech: u32, state: usize, purview: u32) -> Rep {
        let m = project(state, mech);
        if cause {
            self.cause(cfg, mech, m, purview)
        } else {
            self.effect(cfg, mech, m, purview)
        }
    }

    /// Product of parts over `(purview_i)` plus unconstrained on the rest, as
    /// a distribution over all elements.
    fn joint(&self, cfg: Settings, cause: bool, state: usize, parts: &[(u32, u32)]) -> Rep {
        let covered = parts.iter().fold(0, |acc, (_, p)| acc | p);
        let rest = self.full() & !covered;
        let mut all: Vec<(u32, Rep)> = parts
            .iter()
            .map(|&(mech, p)| (p, self.value(cfg, cause, mech, state, p)))
            .collect();
        all.push((rest, self.value(cfg, cause, 0, state, rest)));
        let size = 1usize << self.n;
        if all.iter().any(|(_, r)| r.zero) {
            return Rep { zero: true, w: vec![0.0; size] };
        }
        let w = (0..size)
            .map(|x| all.iter().map(|(p, r)| r.w[project(x, *p)]).product())
            .collect();
        Rep { w, zero: false }
    }

    pub fn extended(&self, cfg: Settings, cause: bool, state: usize, mech: u32, purview: u32) -> Rep {
        self.joint(cfg, cause, state, &[(mech, purview)])
    }

    pub fn phi(&self, cfg: Settings, cause: bool, state: usize, mech: u32, purview: u32) -> f64 {
        let whole = self.extended(cfg, cause, state, mech, purview);
        if whole.zero {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for m1 in subsets(mech) {
            for p1 in subsets(purview) {
                if (m1 == mech && p1 == purview) || (m1 == 0 && p1 == 0) {
                    continue;
                }
                let parts = self.joint(cfg, cause, state, &[(m1, p1), (mech & !m1, purview & !p1)]);
                best = best.min(distance(&whole, &parts));
            }
        }
        if best.is_infinite() || best <= FLOOR {
            0.0
        } else {
            best
        }
    }

    pub fn concept(&self, cfg: Settings, state: usize, mech: u32) -> Option<NaiveConcept> {
        let pick = |cause: bool| {
            let scores: Vec<(u32, f64)> = subsets(self.full())
                .into_iter()
                .map(|p| (p, self.phi(cfg, cause, state, mech, p)))
                .collect();
            let max = scores.iter().map(|s| s.1).fold(0.0, f64::max);
            scores
                .into_iter()
                .filter(|s| s.1 >= max - TIE)
                .min_by_key(|s| (s.0.count_ones(), bits_of(s.0)))
                .unwrap()
        };
        let (pc, phic) = pick(true);
        let (pe, phie) = pick(false);
        let phi = phic.min(phie);
        if phi == 0.0 {
            return None;
        }
        Some(NaiveConcept {
            mech,
            cause_purview: pc,
            effect_purview: pe,
            cause_phi: phic,
            effect_phi: phie,
            phi,
            cause: self.extended(cfg, true, state, mech, pc),
            effect: self.extended(cfg, false, state, mech, pe),
        })
    }

    pub fn qshape(&self, cfg: Settings, state: usize) -> Vec<NaiveConcept> {
        (1..=self.full()).filter_map(|m| self.concept(cfg, state, m)).collect()
    }

    /// Symmetric cut: both parts see noise in place of the other's input.
    pub fn symmetric_cut(&self, part: u32) -> Net {
        let other = self.full() & !part;
        let size = 1usize << self.n;
        let marginal = |keep: u32, x: usize, y: usize| -> f64 {
            // Average over the inputs outside `keep`, sum over outputs outside `keep`.
            let mut total = 0.0;
            let mut count = 0.0;
            for xx in 0..size {
                if project(xx, keep) != project(x, keep) {
                    continue;
                }
                count += 1.0;
                for yy in 0..size {
                    if project(yy, keep) == project(y, keep) {
                        total += self.tpm[xx][yy];
                    }
                }
            }
            total / count
        };
        let mut tpm = vec![vec![0.0; size]; size];
        for x in 0..size {
            for y in 0..size {
                tpm[x][y] = marginal(part, x, y) * marginal(other, x, y);
            }
        }
        Net { n: self.n, tpm }
    }

    /// Directional cut: elements outside `part` see noise in place of the
    /// inputs from `part`.
    pub fn directional_cut(&self, part: u32) -> Net {
        let size = 1usize << self.n;
        let element = |x: usize, i: usize, yi: usize| -> f64 {
            (0..size).filter(|y| (y >> i) & 1 == yi).map(|y| self.tpm[x][y]).sum()
        };
        let mut tpm = vec![vec![0.0; size]; size];
        for x in 0..size {
            for y in 0..size {
                let mut p = 1.0;
                for i in 0..self.n {
                    let yi = (y >> i) & 1;
                    if part & (1 << i) != 0 {
                        p *= element(x, i, yi);
                    } else {
                        let mut avg = 0.0;
                        let mut count = 0.0;
                        for xx in 0..size {
                            if project(xx, !part & self.full()) == project(x, !part & self.full()) {
                                avg += element(xx, i, yi);
                                count += 1.0;
                            }
                        }
                        p *= avg / count;
                    }
                }
                tpm[x][y] = p;
            }
        }
        Net { n: self.n, tpm }
    }

    /// Subsystem on `set`, the rest clamped to its value in `state`.
    pub fn subsystem(&self, set: u32, state: usize) -> (Net, usize) {
        let members = bits_of(set);
        let k = members.len();
        let rest = self.full() & !set;
        let lift = |local: usize| -> usize {
            let mut x = state & rest as usize;
            for (b, &i) in members.iter().enumerate() {
                x |= ((local >> b) & 1) << i;
            }
            x
        };
        let mut tpm = vec![vec![0.0; 1 << k]; 1 << k];
        for a in 0..1usize << k {
            for y in 0..1usize << self.n {
                tpm[a][project(y, set)] += self.tpm[lift(a)][y];
            }
        }
        (Net { n: k, tpm }, project(state, set))
    }

    pub fn system_phi(&self, cfg: Settings, state: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let q = self.qshape(cfg, state);
        let mut best = f64::INFINITY;
        for part in 1..self.full() {
            if !cfg.directional && part & 1 == 0 {
                continue;
            }
            let cut = if cfg.directional { self.directional_cut(part) } else { self.symmetric_cut(part) };
            best = best.min(qshape_distance(&q, &cut.qshape(cfg, state)));
        }
        if best <= FLOOR {
            0.0
        } else {
            best
        }
    }

    /// Major complex (global element set) and Φ.
    pub fn major_complex(&self, cfg: Settings, state: usize) -> (Option<u32>, f64) {
        let scored: Vec<(u32, f64)> = (1..=self.full())
            .map(|c| {
                let (sub, s) = self.subsystem(c, state);
                (c, sub.system_phi(cfg, s))
            })
            .collect();
        let max = scored.iter().map(|s| s.1).fold(0.0, f64::max);
        if max == 0.0 {
            return (None, 0.0);
        }
        let best = scored
            .into_iter()
            .filter(|s| s.1 >= max - TIE)
            .min_by_key(|s| (std::cmp::Reverse(s.0.count_ones()), bits_of(s.0)))
            .unwrap();
        (Some(best.0), best.1)
    }
}

#[derive(Debug, Clone)]
pub struct NaiveConcept {
    pub mech: u32,
    pub cause_purview: u32,
    pub effect_purview: u32,
    pub cause_phi: f64,
    pub effect_phi: f64,
    pub phi: f64,
    pub cause: Rep,
    pub effect: Rep,
}

/// Point-metric transport between two repertoires, with `d(x, 0) = Σ|x|`.
pub fn distance(a: &Rep, b: &Rep) -> f64 {
    match (a.zero, b.zero) {
        (true, true) => 0.0,
        (true, false) => b.w.iter().map(|x| x.abs()).sum(),
        (false, true) => a.w.iter().map(|x| x.abs()).sum(),
        (false, false) => {
            let k = a.w.len();
            let cost: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
            emd_ssp(&a.w, &b.w, &cost)
        }
    }
}

fn pe(x: &Rep, r: f64, y: &Rep, t: f64) -> f64 {
    let w = r.min(t);
    let d = if w == 0.0 { 0.0 } else { distance(x, y) };
    w * d + (r - t).abs()
}

pub fn qshape_distance(a: &[NaiveConcept], b: &[NaiveConcept]) -> f64 {
    let mut total = 0.0;
    let mut mechs: Vec<u32> = a.iter().chain(b).map(|c| c.mech).collect();
    mechs.sort();
    mechs.dedup();
    for m in mechs {
        let x = a.iter().find(|c| c.mech == m);
        let y = b.iter().find(|c| c.mech == m);
        total += match (x, y) {
            (Some(x), Some(y)) => pe(&x.cause, x.phi, &y.cause, y.phi) + pe(&x.effect, x.phi, &y.effect, y.phi),
            (Some(c), None) | (None, Some(c)) => 2.0 * c.phi,
            (None, None) => 0.0,
        };
    }
    total
}
