//! Multi-sequence Baum-Welch for left-to-right chains.
//!
//! Each M-step maximizes the expected complete-data log-likelihood subject
//! to every free entry staying at or above [`EMISSION_FLOOR`]. That keeps
//! unseen symbols scoreable and, because the previous parameters are always
//! feasible, the training log-likelihood never decreases.

use super::chain::HmmChain;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const EMISSION_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    pub max_iter: usize,
    /// Stop once an iteration improves the total log-likelihood by less.
    pub tol: f64,
    pub floor: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            max_iter: 200,
            tol: 1e-6,
            floor: EMISSION_FLOOR,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainReport<T> {
    pub chain: HmmChain<T>,
    /// Total log-likelihood of the training set before each M-step, followed
    /// by the value for the returned chain.
    pub history: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes `sum c_j ln p_j` over the simplex with `p_j >= floor`.
/// Returns `None` when all counts are zero.
fn constrained_row<T: Scalar>(counts: &[T], floor: T) -> Option<Vec<T>> {
    let m = counts.len();
    let total: T = counts.iter().copied().sum();
    if total <= T::zero() {
        return None;
    }
    if m == 1 {
        return Some(vec![T::one()]);
    }
    let mut pinned = vec![false; m];
    loop {
        let n_pinned = pinned.iter().filter(|&&p| p).count();
        let mass = T::one() - T::of(n_pinned as f64) * floor;
        let free: T = counts
            .iter()
            .zip(&pinned)
            .filter(|(_, &p)| !p)
            .map(|(&c, _)| c)
            .sum();
        let mut changed = false;
        let row: Vec<T> = counts
            .iter()
            .zip(pinned.iter_mut())
            .map(|(&c, p)| {
                if *p {
                    return floor;
                }
                let v = c * mass / free;
                if v < floor {
                    *p = true;
                    changed = true;
                }
                v
            })
            .collect();
        if !changed {
            return Some(row);
        }
    }
}

struct Expectations<T> {
    trans: Vec<T>,
    emit: Vec<T>,
    log_likelihood: T,
}

fn expectations<T: Scalar>(chain: &HmmChain<T>, sequences: &[Vec<usize>]) -> Result<Expectations<T>> {
    let n = chain.states();
    let s = chain.symbols();
    let mut trans = vec![T::zero(); n * n];
    let mut emit = vec![T::zero(); n * s];
    let mut log_likelihood = T::zero();
    let mut beta = Vec::new();
    for obs in sequences {
        chain.check_obs(obs)?;
        let Some((alpha, norms)) = chain.forward_scaled(obs) else {
            // A zero-probability sequence contributes nothing but -inf.
            log_likelihood = T::neg_infinity();
            continue;
        };
        log_likelihood = log_likelihood + norms.iter().map(|z| z.ln()).sum::<T>();
        let len = obs.len();
        beta.clear();
        beta.resize(len * n, T::zero());
        for v in &mut beta[(len - 1) * n..] {
            *v = T::one();
        }
        for t in (0..len - 1).rev() {
            let o = obs[t + 1];
            for i in 0..n {
                let mut acc = chain.a(i, i) * chain.b(i, o) * beta[(t + 1) * n + i];
                if i + 1 < n {
                    acc = acc + chain.a(i, i + 1) * chain.b(i + 1, o) * beta[(t + 1) * n + i + 1];
                }
                beta[t * n + i] = acc / norms[t + 1];
            }
        }
        for t in 0..len {
            for i in 0..n {
                let gamma = alpha[t * n + i] * beta[t * n + i];
                emit[i * s + obs[t]] = emit[i * s + obs[t]] + gamma;
            }
            if t + 1 < len {
                let o = obs[t + 1];
                for i in 0..n {
                    for j in [i, i + 1] {
                        if j >= n {
                            continue;
                        }
                        let xi = alpha[t * n + i] * chain.a(i, j) * chain.b(j, o) * beta[(t + 1) * n + j]
                            / norms[t + 1];
                        trans[i * n + j] = trans[i * n + j] + xi;
                    }
                }
            }
        }
    }
    Ok(Expectations {
        trans,
        emit,
        log_likelihood,
    })
}

/// One E-step plus constrained M-step. Returns the re-estimated chain and
/// the training log-likelihood of the input chain.
pub fn baum_welch_step<T: Scalar>(
    chain: &HmmChain<T>,
    sequences: &[Vec<usize>],
    floor: f64,
) -> Result<(HmmChain<T>, T)> {
    if sequences.is_empty() {
        return Err(Error::Empty("training sequences"));
    }
    let floor = T::of(floor);
    let n = chain.states();
    let s = chain.symbols();
    let e = expectations(chain, sequences)?;
    let mut next = chain.clone();
    for i in 0..n.saturating_sub(1) {
        let counts = [e.trans[i * n + i], e.trans[i * n + i + 1]];
        if let Some(row) = constrained_row(&counts, floor) {
            next.a_mut()[i * n + i] = row[0];
            next.a_mut()[i * n + i + 1] = row[1];
        }
    }
    for i in 0..n {
        if let Some(row) = constrained_row(&e.emit[i * s..(i + 1) * s], floor) {
            next.b_mut()[i * s..(i + 1) * s].copy_from_slice(&row);
        }
    }
    Ok((next, e.log_likelihood))
}

/// Iterates [`baum_welch_step`] until the improvement drops below `tol` or
/// `max_iter` steps have run.
pub fn baum_welch_train<T: Scalar>(
    chain: &HmmChain<T>,
    sequences: &[Vec<usize>],
    opts: TrainOptions,
) -> Result<TrainReport<T>> {
    if sequences.is_empty() {
        return Err(Error::Empty("training sequences"));
    }
    let tol = T::of(opts.tol);
    let mut current = chain.clone();
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let (next, ll) = baum_welch_step(&current, sequences, opts.floor)?;
        if let Some(&prev) = history.last() {
            if ll - prev < tol {
                history.push(ll);
                converged = true;
                break;
            }
        }
        history.push(ll);
        current = next;
        iterations += 1;
    }
    if !converged {
        let ll = expectations(&current, sequences)?.log_likelihood;
        history.push(ll);
    }
    Ok(TrainReport {
        chain: current,
        history,
        iterations,
        converged,
    })
}
