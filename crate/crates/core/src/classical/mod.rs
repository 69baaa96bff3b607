//! Classical stochastic processes over finite metric spaces.
//!
//! A process `A -> B` is a row-major `|A| x |B|` table of nonnegative reals;
//! it is causal exactly when every row sums to one. States are rows of a
//! process out of `I`, i.e. plain weight vectors. Distances between causal
//! states are earth mover's distances under the object's ground metric.

pub mod emd;

use crate::error::{domain, Error, Result};
use crate::theory::{Backend, Object, Process, State, Theory};
use crate::tol;

/// The classical backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classical;

pub type ClassicalProcess = Process<Classical>;
pub type Distribution = State<Classical>;

impl Theory for Classical {
    type Data = Vec<f64>;

    const BACKEND: Backend = Backend::Classical;

    fn validate(dom: &Object, cod: &Object, data: &Vec<f64>) -> Result<()> {
        let expected = dom.dim() * cod.dim();
        if data.len() != expected {
            return Err(Error::Validation(format!(
                "table has {} entries, expected {}x{}",
                data.len(),
                dom.dim(),
                cod.dim()
            )));
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Validation(format!(
                "entry ({}, {}) = {} is not a nonnegative number",
                k / cod.dim(),
                k % cod.dim(),
                data[k]
            )));
        }
        Ok(())
    }

    fn identity(obj: &Object) -> Vec<f64> {
        let n = obj.dim();
        let mut t = vec![0.0; n * n];
        for a in 0..n {
            t[a * n + a] = 1.0;
        }
        t
    }

    fn zero(dom: &Object, cod: &Object) -> Vec<f64> {
        vec![0.0; dom.dim() * cod.dim()]
    }

    fn scalar(value: f64) -> Vec<f64> {
        vec![value]
    }

    fn scalar_value(data: &Vec<f64>) -> f64 {
        data[0]
    }

    fn compose(f: &Process<Self>, g: &Process<Self>) -> Vec<f64> {
        let (na, nb, nc) = (f.dom().dim(), f.cod().dim(), g.cod().dim());
        let (fd, gd) = (f.data(), g.data());
        let mut out = vec![0.0; na * nc];
        for a in 0..na {
            let row = &mut out[a * nc..(a + 1) * nc];
            for b in 0..nb {
                let x = fd[a * nb + b];
                if x == 0.0 {
                    continue;
                }
                for (o, &y) in row.iter_mut().zip(&gd[b * nc..(b + 1) * nc]) {
                    *o += x * y;
                }
            }
        }
        out
    }

    fn tensor(f: &Process<Self>, g: &Process<Self>) -> Vec<f64> {
        let (fa, fb) = (f.dom().dim(), f.cod().dim());
        let (ga, gb) = (g.dom().dim(), g.cod().dim());
        let cols = fb * gb;
        let mut out = vec![0.0; fa * ga * cols];
        for c in 0..ga {
            for a in 0..fa {
                let row = a + fa * c;
                for d in 0..gb {
                    let y = g.data()[c * gb + d];
                    for b in 0..fb {
                        out[row * cols + b + fb * d] = f.data()[a * fb + b] * y;
                    }
                }
            }
        }
        out
    }

    fn permutation(obj: &Object, order: &[usize]) -> Vec<f64> {
        let n = obj.dim();
        let target = obj.sub_indices(order);
        let mut t = vec![0.0; n * n];
        for (x, &y) in target.iter().enumerate() {
            t[x * n + y] = 1.0;
        }
        t
    }

    fn discard(obj: &Object) -> Vec<f64> {
        vec![1.0; obj.dim()]
    }

    fn mixed(obj: &Object) -> Vec<f64> {
        let n = obj.dim();
        vec![1.0 / n as f64; n]
    }

    fn dagger(f: &Process<Self>) -> Vec<f64> {
        let (na, nb) = (f.dom().dim(), f.cod().dim());
        let mut t = vec![0.0; na * nb];
        for a in 0..na {
            for b in 0..nb {
                t[b * na + a] = f.data()[a * nb + b];
            }
        }
        t
    }

    fn scale(data: &Vec<f64>, factor: f64) -> Vec<f64> {
        data.iter().map(|x| x * factor).collect()
    }

    fn max_abs_diff(a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    fn apply(f: &Process<Self>, s: &State<Self>) -> Vec<f64> {
        let nb = f.cod().dim();
        let mut out = vec![0.0; nb];
        for (a, &w) in s.data().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &y) in out.iter_mut().zip(&f.data()[a * nb..(a + 1) * nb]) {
                *o += w * y;
            }
        }
        out
    }

    fn marginal(s: &State<Self>, keep: &[usize]) -> Vec<f64> {
        let sub = s.object().sub_indices(keep);
        let mut out = vec![0.0; s.object().select(keep).dim()];
        for (x, &w) in s.data().iter().enumerate() {
            out[sub[x]] += w;
        }
        out
    }

    fn assemble(obj: &Object, parts: &[(&[usize], &State<Self>)]) -> Vec<f64> {
        let subs: Vec<Vec<usize>> = parts.iter().map(|(p, _)| obj.sub_indices(p)).collect();
        (0..obj.dim())
            .map(|x| {
                parts
                    .iter()
                    .zip(&subs)
                    .fold(1.0, |acc, ((_, s), sub)| acc * s.data()[sub[x]])
            })
            .collect()
    }

    fn mass(s: &State<Self>) -> f64 {
        s.data().iter().sum()
    }

    fn norm1(s: &State<Self>) -> f64 {
        s.data().iter().map(|x| x.abs()).sum()
    }

    fn distance(obj: &Object, a: &Vec<f64>, b: &Vec<f64>) -> Result<f64> {
        let sa = normalised(a)?;
        let sb = normalised(b)?;
        let metric = obj.ground_metric();
        let n = obj.dim();
        Ok(emd::transport_cost(&sa, &sb, |i, j| metric[i * n + j]))
    }

    fn probe_states(obj: &Object) -> Vec<Vec<f64>> {
        (0..obj.dim()).map(|x| point_weights(obj.dim(), x)).collect()
    }

    fn has_copy() -> bool {
        true
    }

    fn copy(obj: &Object, k: usize) -> Result<Vec<f64>> {
        if k == 0 {
            return domain("copy needs at least one output");
        }
        let n = obj.dim();
        let cols = n.pow(k as u32);
        let mut t = vec![0.0; n * cols];
        for a in 0..n {
            let diag = (0..k).fold(0, |acc, _| acc * n + a);
            t[a * cols + diag] = 1.0;
        }
        Ok(t)
    }

    fn compare(obj: &Object, k: usize) -> Result<Vec<f64>> {
        let n = obj.dim();
        let copy = Self::copy(obj, k)?;
        let rows = n.pow(k as u32);
        let mut t = vec![0.0; rows * n];
        for a in 0..n {
            for x in 0..rows {
                t[x * n + a] = copy[a * rows + x];
            }
        }
        Ok(t)
    }

    fn pointwise_product(obj: &Object, states: &[&State<Self>]) -> Result<Vec<f64>> {
        if states.iter().any(|s| s.object() != obj) {
            return domain("pointwise product of states on different objects");
        }
        Ok((0..obj.dim())
            .map(|x| states.iter().fold(1.0, |acc, s| acc * s.data()[x]))
            .collect())
    }
}

fn normalised(w: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = w.iter().sum();
    if w.iter().any(|x| *x < 0.0) || (total - 1.0).abs() > tol::CAUSAL {
        return domain(format!("distance needs causal states, got total mass {total}"));
    }
    Ok(w.iter().map(|x| x / total).collect())
}

fn point_weights(n: usize, x: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    w[x] = 1.0;
    w
}

/// Point distribution at basis index `x` of `obj`.
pub fn point(obj: &Object, x: usize) -> Result<Distribution> {
    if x >= obj.dim() {
        return domain(format!("basis index {x} out of range for dimension {}", obj.dim()));
    }
    Ok(State::from_parts(obj.clone(), point_weights(obj.dim(), x)))
}

/// A distribution with the given weights.
pub fn distribution(obj: &Object, weights: Vec<f64>) -> Result<Distribution> {
    State::new(obj.clone(), weights)
}

/// A stochastic table `dom -> cod` given as rows.
pub fn table(dom: &Object, cod: &Object, rows: &[Vec<f64>]) -> Result<ClassicalProcess> {
    if rows.len() != dom.dim() || rows.iter().any(|r| r.len() != cod.dim()) {
        return Err(Error::Validation(format!(
            "table must have {} rows of length {}",
            dom.dim(),
            cod.dim()
        )));
    }
    Process::new(dom.clone(), cod.clone(), rows.concat())
}

/// Earth mover's distance between causal distributions of the same object.
pub fn emd(s: &Distribution, t: &Distribution) -> Result<f64> {
    s.distance(t)
}

/// Copy map `obj -> obj^{⊗k}`.
pub fn copy(obj: &Object, k: usize) -> Result<ClassicalProcess> {
    let cod = (0..k).fold(Object::unit(), |acc, _| acc.tensor(obj));
    Ok(Process::from_parts(obj.clone(), cod, Classical::copy(obj, k)?))
}

/// Comparison map `obj^{⊗k} -> obj`.
pub fn compare(obj: &Object, k: usize) -> Result<ClassicalProcess> {
    Ok(copy(obj, k)?.dagger())
}

/// Which factor of a bipartite state to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Marginal of a state on `left ⊗ right` (factor split after `left_factors`).
pub fn marginalize(s: &Distribution, left_factors: usize, side: Side) -> Result<Distribution> {
    let n = s.object().n_factors();
    if left_factors > n {
        return domain("split point beyond the factor count");
    }
    let keep: Vec<usize> = match side {
        Side::Left => (0..left_factors).collect(),
        Side::Right => (left_factors..n).collect(),
    };
    s.marginal(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit() -> Object {
        Object::single(2)
    }

    #[test]
    fn emd_uniform_bit_vs_point_is_half() {
        let u = State::mixed(&bit());
        let p = point(&bit(), 0).unwrap();
        assert!((emd(&u, &p).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn emd_two_bits_sum_metric() {
        let f = crate::theory::Factor::with_metric(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let obj = Object::new(vec![f.clone(), f]).unwrap();
        let a = point(&obj, 0).unwrap();
        let b = point(&obj, 3).unwrap();
        assert_eq!(emd(&a, &b).unwrap(), 2.0);
        // Without tables the whole product carries the point metric.
        let flat = Object::from_dims(&[2, 2]);
        let a = point(&flat, 0).unwrap();
        let b = point(&flat, 3).unwrap();
        assert_eq!(emd(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn emd_rejects_non_causal_input() {
        let a = State::from_parts(bit(), vec![0.5, 0.4]);
        let b = point(&bit(), 0).unwrap();
        assert!(matches!(emd(&a, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn copy_of_a_distribution_is_diagonal() {
        let obj = Object::single(3);
        let s = distribution(&obj, vec![0.2, 0.3, 0.5]).unwrap();
        let out = s.apply(&copy(&obj, 2).unwrap()).unwrap();
        let mut expected = vec![0.0; 9];
        for (a, w) in [0.2, 0.3, 0.5].iter().enumerate() {
            expected[a * 3 + a] = *w;
        }
        assert_eq!(out.data(), &expected);
    }

    #[test]
    fn counit_and_special_laws() {
        let obj = Object::single(3);
        let id = Process::<Classical>::identity(&obj);
        let c2 = copy(&obj, 2).unwrap();
        let counit = c2
            .then(&id.tensor(&Process::discard(&obj)))
            .unwrap();
        assert_eq!(counit, id);
        let special = c2.then(&compare(&obj, 2).unwrap()).unwrap();
        assert_eq!(special, id);
    }

    #[test]
    fn marginals_of_correlated_bits() {
        let obj = Object::from_dims(&[2, 2]);
        let s = distribution(&obj, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        for side in [Side::Left, Side::Right] {
            let m = marginalize(&s, 1, side).unwrap();
            assert_eq!(m.data(), &vec![0.5, 0.5]);
        }
    }

    #[test]
    fn marginal_of_product_recovers_factor() {
        let p = distribution(&bit(), vec![0.3, 0.7]).unwrap();
        let q = distribution(&Object::single(3), vec![0.1, 0.2, 0.7]).unwrap();
        let joint = p.tensor(&q);
        assert_eq!(marginalize(&joint, 1, Side::Left).unwrap(), p);
        let right = marginalize(&joint, 1, Side::Right).unwrap();
        assert!(right.approx_eq(&q, 1e-15));
    }

    #[test]
    fn table_rejects_negative_entries() {
        let err = table(&bit(), &bit(), &[vec![1.2, -0.2], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }
}
