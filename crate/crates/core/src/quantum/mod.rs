//! Completely positive maps between finite-dimensional Hilbert spaces.
//!
//! A map `f: B(H) -> B(K)` is stored as its Choi matrix
//! `J = Σ_ab |a⟩⟨b| ⊗ f(|a⟩⟨b|)`, row-major over the composite index
//! `a * dim K + i`. States are density matrices (the Choi matrix of a map out
//! of `C`). Every evaluation goes through the contraction
//! `f(ρ)_ij = Σ_ab ρ_ab J_(a,i),(b,j)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::ClassicalProcess;
use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect};
use crate::theory::{Backend, Object, Process, State, Theory};
use crate::tol;

/// The quantum backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Quantum;

pub type Channel = Process<Quantum>;
pub type DensityState = State<Quantum>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn choi_at(j: &[Complex64], dc: usize, a: usize, i: usize, b: usize, jj: usize, dd: usize) -> Complex64 {
    let n = dd * dc;
    j[(a * dc + i) * n + (b * dc + jj)]
}

impl Theory for Quantum {
    type Data = Vec<Complex64>;

    const BACKEND: Backend = Backend::Quantum;

    fn validate(dom: &Object, cod: &Object, data: &Vec<Complex64>) -> Result<()> {
        let n = dom.dim() * cod.dim();
        if data.len() != n * n {
            return Err(Error::Validation(format!(
                "Choi matrix has {} entries, expected {n}x{n}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("Choi matrix has non-finite entries".into()));
        }
        let scale = data.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
        let herm = hermiticity_defect(data, n);
        if herm > 1e-10 * scale {
            return Err(Error::Validation(format!(
                "Choi matrix is not Hermitian (defect {herm:e})"
            )));
        }
        let min = hermitian_eigenvalues(data, n)[0];
        if min < tol::PSD * scale {
            return Err(Error::Validation(format!(
                "map is not completely positive (minimum Choi eigenvalue {min:e})"
            )));
        }
        Ok(())
    }

    fn identity(obj: &Object) -> Vec<Complex64> {
        let d = obj.dim();
        let n = d * d;
        let mut j = vec![ZERO; n * n];
        for a in 0..d {
            for b in 0..d {
                j[(a * d + a) * n + (b * d + b)] = ONE;
            }
        }
        j
    }

    fn zero(dom: &Object, cod: &Object) -> Vec<Complex64> {
        let n = dom.dim() * cod.dim();
        vec![ZERO; n * n]
    }

    fn scalar(value: f64) -> Vec<Complex64> {
        vec![Complex64::new(value, 0.0)]
    }

    fn scalar_value(data: &Vec<Complex64>) -> f64 {
        data[0].re
    }

    fn compose(f: &Process<Self>, g: &Process<Self>) -> Vec<Complex64> {
        let (da, db, dc) = (f.dom().dim(), f.cod().dim(), g.cod().dim());
        let n = da * dc;
        let mut out = vec![ZERO; n * n];
        let (jf, jg) = (f.data(), g.data());
        for a in 0..da {
            for b in 0..da {
                for i in 0..db {
                    for j in 0..db {
                        let x = choi_at(jf, db, a, i, b, j, da);
                        if x == ZERO {
                            continue;
                        }
                        for k in 0..dc {
                            for l in 0..dc {
                                let y = choi_at(jg, dc, i, k, j, l, db);
                                if y != ZERO {
                                    out[(a * dc + k) * n + (b * dc + l)] += x * y;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn tensor(f: &Process<Self>, g: &Process<Self>) -> Vec<Complex64> {
        let (fa, fb) = (f.dom().dim(), f.cod().dim());
        let (ga, gb) = (g.dom().dim(), g.cod().dim());
        let (din, dout) = (fa * ga, fb * gb);
        let n = din * dout;
        let mut out = vec![ZERO; n * n];
        for c in 0..ga {
            for a in 0..fa {
                let x = a + fa * c;
                for c2 in 0..ga {
                    for a2 in 0..fa {
                        let x2 = a2 + fa * c2;
                        for d in 0..gb {
                            for d2 in 0..gb {
                                let y = choi_at(g.data(), gb, c, d, c2, d2, ga);
                                if y == ZERO {
                                    continue;
                                }
                                for b in 0..fb {
                                    for b2 in 0..fb {
                                        let z = choi_at(f.data(), fb, a, b, a2, b2, fa);
                                        let row = x * dout + b + fb * d;
                                        let col = x2 * dout + b2 + fb * d2;
                                        out[row * n + col] = z * y;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn permutation(obj: &Object, order: &[usize]) -> Vec<Complex64> {
        let d = obj.dim();
        let n = d * d;
        let target = obj.sub_indices(order);
        let mut j = vec![ZERO; n * n];
        for a in 0..d {
            for b in 0..d {
                j[(a * d + target[a]) * n + (b * d + target[b])] = ONE;
            }
        }
        j
    }

    fn discard(obj: &Object) -> Vec<Complex64> {
        let d = obj.dim();
        let mut j = vec![ZERO; d * d];
        for a in 0..d {
            j[a * d + a] = ONE;
        }
        j
    }

    fn mixed(obj: &Object) -> Vec<Complex64> {
        let d = obj.dim();
        let mut j = vec![ZERO; d * d];
        for a in 0..d {
            j[a * d + a] = Complex64::new(1.0 / d as f64, 0.0);
        }
        j
    }

    fn dagger(f: &Process<Self>) -> Vec<Complex64> {
        // J_{f†}[(i,a),(j,b)] = conj(J_f[(a,i),(b,j)]).
        let (dd, dc) = (f.dom().dim(), f.cod().dim());
        let n = dd * dc;
        let mut out = vec![ZERO; n * n];
        for a in 0..dd {
            for b in 0..dd {
                for i in 0..dc {
                    for j in 0..dc {
                        out[(i * dd + a) * n + (j * dd + b)] = choi_at(f.data(), dc, a, i, b, j, dd).conj();
                    }
                }
            }
        }
        out
    }

    fn scale(data: &Vec<Complex64>, factor: f64) -> Vec<Complex64> {
        data.iter().map(|z| z * factor).collect()
    }

    fn max_abs_diff(a: &Vec<Complex64>, b: &Vec<Complex64>) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    fn apply(f: &Process<Self>, s: &State<Self>) -> Vec<Complex64> {
        let (dd, dc) = (f.dom().dim(), f.cod().dim());
        let rho = s.data();
        let mut out = vec![ZERO; dc * dc];
        for a in 0..dd {
            for b in 0..dd {
                let w = rho[a * dd + b];
                if w == ZERO {
                    continue;
                }
                for i in 0..dc {
                    for j in 0..dc {
                        out[i * dc + j] += w * choi_at(f.data(), dc, a, i, b, j, dd);
                    }
                }
            }
        }
        out
    }

    fn marginal(s: &State<Self>, keep: &[usize]) -> Vec<Complex64> {
        let obj = s.object();
        let d = obj.dim();
        let rest: Vec<usize> = (0..obj.n_factors()).filter(|p| !keep.contains(p)).collect();
        let kept = obj.sub_indices(keep);
        let other = obj.sub_indices(&rest);
        let dk = obj.select(keep).dim();
        let mut out = vec![ZERO; dk * dk];
        for x in 0..d {
            for y in 0..d {
                if other[x] == other[y] {
                    out[kept[x] * dk + kept[y]] += s.data()[x * d + y];
                }
            }
        }
        out
    }

    fn assemble(obj: &Object, parts: &[(&[usize], &State<Self>)]) -> Vec<Complex64> {
        let d = obj.dim();
        let subs: Vec<Vec<usize>> = parts.iter().map(|(p, _)| obj.sub_indices(p)).collect();
        let mut out = vec![ZERO; d * d];
        for x in 0..d {
            for y in 0..d {
                out[x * d + y] = parts.iter().zip(&subs).fold(ONE, |acc, ((_, s), sub)| {
                    let dk = s.object().dim();
                    acc * s.data()[sub[x] * dk + sub[y]]
                });
            }
        }
        out
    }

    fn mass(s: &State<Self>) -> f64 {
        let d = s.object().dim();
        (0..d).map(|a| s.data()[a * d + a].re).sum()
    }

    fn norm1(s: &State<Self>) -> f64 {
        let d = s.object().dim();
        hermitian_eigenvalues(s.data(), d).iter().map(|x| x.abs()).sum()
    }

    fn distance(obj: &Object, a: &Vec<Complex64>, b: &Vec<Complex64>) -> Result<f64> {
        let d = obj.dim();
        for m in [a, b] {
            let t: f64 = (0..d).map(|k| m[k * d + k].re).sum();
            if (t - 1.0).abs() > tol::CAUSAL {
                return domain(format!("trace distance needs causal states, got trace {t}"));
            }
        }
        Ok(trace_distance_raw(a, b, d))
    }

    fn probe_states(obj: &Object) -> Vec<Vec<Complex64>> {
        let d = obj.dim();
        let mut out: Vec<Vec<Complex64>> = (0..d)
            .map(|x| {
                let mut m = vec![ZERO; d * d];
                m[x * d + x] = ONE;
                m
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + d as u64);
        for _ in 0..8 {
            out.push(random_density(d, &mut rng));
        }
        out
    }
}

fn trace_distance_raw(a: &[Complex64], b: &[Complex64], d: usize) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    0.5 * hermitian_eigenvalues(&diff, d).iter().map(|x| x.abs()).sum::<f64>()
}

/// `½ Σ |eig(ρ - σ)|` for causal states of the same object.
pub fn trace_distance(rho: &DensityState, sigma: &DensityState) -> Result<f64> {
    rho.distance(sigma)
}

/// Random density matrix `G G† / Tr(G G†)` with Gaussian-ish entries.
pub fn random_density(d: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let g: Vec<Complex64> = (0..d * d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut m = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            m[i * d + j] = (0..d).map(|k| g[i * d + k] * g[j * d + k].conj()).sum();
        }
    }
    let t: f64 = (0..d).map(|k| m[k * d + k].re).sum();
    m.iter().map(|z| z / t).collect()
}

/// Density matrix from a row-major complex array.
pub fn density(obj: &Object, matrix: Vec<Complex64>) -> Result<DensityState> {
    State::new(obj.clone(), matrix)
}

/// Pure state `|x⟩⟨x|` for basis index `x`.
pub fn basis_state(obj: &Object, x: usize) -> Result<DensityState> {
    let d = obj.dim();
    if x >= d {
        return domain(format!("basis index {x} out of range for dimension {d}"));
    }
    let mut m = vec![ZERO; d * d];
    m[x * d + x] = ONE;
    Ok(State::from_parts(obj.clone(), m))
}

/// Channel with Kraus operators `K_k` (each `dim cod x dim dom`, row-major).
///
/// Completeness is not enforced here; use [`is_cptp`] or
/// [`kraus_completeness_defect`].
pub fn from_kraus(dom: &Object, cod: &Object, kraus: &[Vec<Complex64>]) -> Result<Channel> {
    let (dd, dc) = (dom.dim(), cod.dim());
    if kraus.iter().any(|k| k.len() != dd * dc) {
        return Err(Error::Validation(format!(
            "Kraus operators must be {dc}x{dd} matrices"
        )));
    }
    let n = dd * dc;
    let mut j = vec![ZERO; n * n];
    for k in kraus {
        for a in 0..dd {
            for i in 0..dc {
                let x = k[i * dd + a];
                if x == ZERO {
                    continue;
                }
                for b in 0..dd {
                    for jj in 0..dc {
                        j[(a * dc + i) * n + (b * dc + jj)] += x * k[jj * dd + b].conj();
                    }
                }
            }
        }
    }
    Ok(Process::from_parts(dom.clone(), cod.clone(), j))
}

/// `max |Σ K†K - I|`.
pub fn kraus_completeness_defect(dom: &Object, kraus: &[Vec<Complex64>]) -> f64 {
    let dd = dom.dim();
    let mut worst = 0.0_f64;
    for a in 0..dd {
        for b in 0..dd {
            let mut s = ZERO;
            for k in kraus {
                let dc = k.len() / dd;
                for i in 0..dc {
                    s += k[i * dd + a].conj() * k[i * dd + b];
                }
            }
            let target = if a == b { ONE } else { ZERO };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Unitary channel `ρ ↦ U ρ U†`.
pub fn unitary(obj: &Object, u: Vec<Complex64>) -> Result<Channel> {
    from_kraus(obj, obj, &[u])
}

/// Checks for a Choi matrix that fails to be PSD or trace preserving.
pub fn is_cptp(f: &Channel) -> bool {
    let n = f.dom().dim() * f.cod().dim();
    let scale = f.data().iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    if hermiticity_defect(f.data(), n) > tol::CPTP * scale {
        return false;
    }
    if hermitian_eigenvalues(f.data(), n)[0] < -tol::CPTP * scale {
        return false;
    }
    f.is_causal(tol::CPTP)
}

/// Builds a channel from a Choi matrix, checking complete positivity.
pub fn from_choi(dom: &Object, cod: &Object, choi: Vec<Complex64>) -> Result<Channel> {
    Process::new(dom.clone(), cod.clone(), choi)
}

/// `Tr_B` or `Tr_A` of a state on `A ⊗ B` (split after `left_factors`).
pub fn partial_trace(
    rho: &DensityState,
    left_factors: usize,
    side: crate::classical::Side,
) -> Result<DensityState> {
    let n = rho.object().n_factors();
    if left_factors > n {
        return domain("split point beyond the factor count");
    }
    let keep: Vec<usize> = match side {
        crate::classical::Side::Left => (0..left_factors).collect(),
        crate::classical::Side::Right => (left_factors..n).collect(),
    };
    rho.marginal(&keep)
}

/// The classical table as a channel acting on diagonal (classical-basis) states.
pub fn embed_classical(f: &ClassicalProcess) -> Channel {
    let (dd, dc) = (f.dom().dim(), f.cod().dim());
    let n = dd * dc;
    let mut j = vec![ZERO; n * n];
    for a in 0..dd {
        for i in 0..dc {
            j[(a * dc + i) * n + (a * dc + i)] = Complex64::new(f.data()[a * dc + i], 0.0);
        }
    }
    Process::from_parts(f.dom().clone(), f.cod().clone(), j)
}

/// Diagonal density matrix of a classical distribution.
pub fn embed_distribution(s: &crate::classical::Distribution) -> DensityState {
    let d = s.object().dim();
    let mut m = vec![ZERO; d * d];
    for (x, &w) in s.data().iter().enumerate() {
        m[x * d + x] = Complex64::new(w, 0.0);
    }
    State::from_parts(s.object().clone(), m)
}
