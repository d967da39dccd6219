use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Left-to-right discrete HMM: state `i` may only stay or advance to `i + 1`,
/// the last state only loops, and every sequence starts in state 0.
#[derive(Clone, Debug, PartialEq)]
pub struct HmmChain<T> {
    pub name: String,
    n: usize,
    symbols: usize,
    pi: Vec<T>,
    /// Row-major `n x n` transitions.
    a: Vec<T>,
    /// Row-major `n x symbols` emissions.
    b: Vec<T>,
}

impl<T: Scalar> HmmChain<T> {
    /// Validates shapes, stochasticity (within `1e-6`), `pi = e0` and the
    /// left-to-right zero pattern.
    pub fn from_parts(name: impl Into<String>, pi: Vec<T>, a: Vec<T>, b: Vec<T>) -> Result<Self> {
        let n = pi.len();
        if n == 0 {
            return Err(Error::InvalidArgument("chain needs at least one state".into()));
        }
        if a.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: a.len(),
            });
        }
        if b.is_empty() || b.len() % n != 0 {
            return Err(Error::InvalidArgument(format!(
                "emission matrix of {} entries does not have {n} rows",
                b.len()
            )));
        }
        let symbols = b.len() / n;
        let chain = HmmChain {
            name: name.into(),
            n,
            symbols,
            pi,
            a,
            b,
        };
        chain.validate(T::of(1e-6))?;
        Ok(chain)
    }

    fn validate(&self, tol: T) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(format!("chain `{}`: {msg}", self.name)));
        if self.pi[0] != T::one() || self.pi[1..].iter().any(|&p| p != T::zero()) {
            return bad("initial distribution must be [1, 0, ...]".into());
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.a(i, j);
                if v < T::zero() || !v.is_finite() {
                    return bad(format!("A[{i}][{j}] = {v} is not a probability"));
                }
                if !Self::allowed(self.n, i, j) && v != T::zero() {
                    return bad(format!("A[{i}][{j}] breaks the left-to-right pattern"));
                }
            }
            if (self.a_row(i).iter().copied().sum::<T>() - T::one()).abs() > tol {
                return bad(format!("row {i} of A does not sum to 1"));
            }
            if self.b_row(i).iter().any(|&v| v < T::zero() || !v.is_finite()) {
                return bad(format!("row {i} of B has an invalid entry"));
            }
            if (self.b_row(i).iter().copied().sum::<T>() - T::one()).abs() > tol {
                return bad(format!("row {i} of B does not sum to 1"));
            }
        }
        Ok(())
    }

    /// Whether the transition `i -> j` is structurally permitted.
    pub fn allowed(n: usize, i: usize, j: usize) -> bool {
        j == i || (j == i + 1 && j < n)
    }

    pub fn states(&self) -> usize {
        self.n
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn pi(&self) -> &[T] {
        &self.pi
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> T {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn b(&self, i: usize, s: usize) -> T {
        self.b[i * self.symbols + s]
    }

    pub fn a_row(&self, i: usize) -> &[T] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn b_row(&self, i: usize) -> &[T] {
        &self.b[i * self.symbols..(i + 1) * self.symbols]
    }

    pub(crate) fn a_mut(&mut self) -> &mut [T] {
        &mut self.a
    }

    pub(crate) fn b_mut(&mut self) -> &mut [T] {
        &mut self.b
    }

    pub(crate) fn check_obs(&self, obs: &[usize]) -> Result<()> {
        if obs.is_empty() {
            return Err(Error::Empty("observation sequence"));
        }
        if let Some(&s) = obs.iter().find(|&&s| s >= self.symbols) {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                size: self.symbols,
            });
        }
        Ok(())
    }

    /// Scaled forward pass. Returns per-step normalized `alpha` rows
    /// (row-major `T x n`) and the normalizers; `None` if some prefix has
    /// probability zero.
    pub(crate) fn forward_scaled(&self, obs: &[usize]) -> Option<(Vec<T>, Vec<T>)> {
        let n = self.n;
        let mut alpha = vec![T::zero(); obs.len() * n];
        let mut norms = Vec::with_capacity(obs.len());
        for (t, &o) in obs.iter().enumerate() {
            let (prev, cur) = alpha.split_at_mut(t * n);
            let cur = &mut cur[..n];
            for j in 0..n {
                let reach = if t == 0 {
                    self.pi[j]
                } else {
                    let p = &prev[(t - 1) * n..];
                    // only i = j and i = j - 1 can reach j
                    let mut r = p[j] * self.a(j, j);
                    if j > 0 {
                        r = r + p[j - 1] * self.a(j - 1, j);
                    }
                    r
                };
                cur[j] = reach * self.b(j, o);
            }
            let z: T = cur.iter().copied().sum();
            if z <= T::zero() {
                return None;
            }
            for v in cur.iter_mut() {
                *v = *v / z;
            }
            norms.push(z);
        }
        Some((alpha, norms))
    }
}

/// `log P(obs | chain)` via the scaled forward recursion; `-inf` for
/// impossible sequences.
pub fn forward_log_likelihood<T: Scalar>(chain: &HmmChain<T>, obs: &[usize]) -> Result<T> {
    chain.check_obs(obs)?;
    Ok(match chain.forward_scaled(obs) {
        Some((_, norms)) => norms.iter().map(|z| z.ln()).sum(),
        None => T::neg_infinity(),
    })
}

/// Fresh chain: `pi = e0`; non-final rows of A are `[0.5 stay, 0.5 advance]`;
/// emissions uniform except hinted `(state, symbol)` pairs, which share half
/// of their row's mass (the other half spread evenly over unhinted symbols).
pub fn init_chain<T: Scalar>(
    name: impl Into<String>,
    n_states: usize,
    symbols: usize,
    hints: &[(usize, usize)],
) -> Result<HmmChain<T>> {
    if n_states == 0 {
        return Err(Error::InvalidArgument("chain needs at least one state".into()));
    }
    if symbols < 2 {
        return Err(Error::InvalidArgument("alphabet needs at least two symbols".into()));
    }
    let n = n_states;
    let mut pi = vec![T::zero(); n];
    pi[0] = T::one();
    let mut a = vec![T::zero(); n * n];
    for i in 0..n {
        if i + 1 < n {
            a[i * n + i] = T::of(0.5);
            a[i * n + i + 1] = T::of(0.5);
        } else {
            a[i * n + i] = T::one();
        }
    }
    let mut b = vec![T::of(1.0 / symbols as f64); n * symbols];
    for state in 0..n {
        let mut hinted: Vec<usize> = hints.iter().filter(|h| h.0 == state).map(|h| h.1).collect();
        hinted.sort_unstable();
        hinted.dedup();
        if hinted.is_empty() {
            continue;
        }
        let h = hinted.len();
        let rest = symbols - h;
        for s in 0..symbols {
            let v = if hinted.contains(&s) {
                if rest == 0 {
                    1.0 / h as f64
                } else {
                    0.5 / h as f64
                }
            } else {
                0.5 / rest as f64
            };
            b[state * symbols + s] = T::of(v);
        }
    }
    for &(state, sym) in hints {
        if state >= n {
            return Err(Error::InvalidArgument(format!("hint state {state} >= {n} states")));
        }
        if sym >= symbols {
            return Err(Error::SymbolOutOfRange {
                symbol: sym,
                size: symbols,
            });
        }
    }
    HmmChain::from_parts(name, pi, a, b)
}
