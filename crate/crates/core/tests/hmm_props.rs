use proptest::prelude::*;

use islr_core::gesture_hmm::{baum_welch_step, forward_log_likelihood, HmmChain};

/// Random left-to-right chain from uniform draws in (0, 1).
fn chain_from(n: usize, s: usize, draws: &[f64]) -> HmmChain<f64> {
    let mut it = draws.iter().copied().cycle();
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        if i + 1 < n {
            let stay = 0.05 + 0.9 * it.next().unwrap();
            a[i * n + i] = stay;
            a[i * n + i + 1] = 1.0 - stay;
        } else {
            a[i * n + i] = 1.0;
        }
    }
    let mut b = Vec::with_capacity(n * s);
    for _ in 0..n {
        let row: Vec<f64> = (0..s).map(|_| 0.01 + it.next().unwrap()).collect();
        let z: f64 = row.iter().sum();
        b.extend(row.iter().map(|v| v / z));
    }
    HmmChain::from_parts("r", pi, a, b).unwrap()
}

/// Sum over every state path.
fn brute_force(c: &HmmChain<f64>, obs: &[usize]) -> f64 {
    let n = c.states();
    let mut total = 0.0;
    let paths = n.pow(obs.len() as u32);
    for code in 0..paths {
        let mut states = Vec::with_capacity(obs.len());
        let mut k = code;
        for _ in 0..obs.len() {
            states.push(k % n);
            k /= n;
        }
        let mut p = c.pi()[states[0]] * c.b(states[0], obs[0]);
        for t in 1..obs.len() {
            p *= c.a(states[t - 1], states[t]) * c.b(states[t], obs[t]);
        }
        total += p;
    }
    total
}

fn chain_case(max_n: usize, max_s: usize) -> impl Strategy<Value = HmmChain<f64>> {
    (1..=max_n, 2..=max_s, proptest::collection::vec(0.0f64..1.0, 64))
        .prop_map(|(n, s, d)| chain_from(n, s, &d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forward_matches_path_sum(
        c in chain_case(4, 13),
        raw in proptest::collection::vec(any::<usize>(), 1..=6),
    ) {
        let obs: Vec<usize> = raw.iter().map(|v| v % c.symbols()).collect();
        let fwd = forward_log_likelihood(&c, &obs).unwrap().exp();
        let want = brute_force(&c, &obs);
        prop_assert!(((fwd - want) / want).abs() < 1e-10, "{fwd} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn probabilities_sum_to_one(c in chain_case(3, 3), t in 1usize..=4) {
        let s = c.symbols();
        let mut total = 0.0;
        for code in 0..s.pow(t as u32) {
            let obs: Vec<usize> = (0..t).map(|i| code / s.pow(i as u32) % s).collect();
            total += forward_log_likelihood(&c, &obs).unwrap().exp();
        }
        prop_assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn baum_welch_is_monotone_and_structured(
        c in chain_case(4, 6),
        raw in proptest::collection::vec(proptest::collection::vec(any::<usize>(), 1..10), 1..6),
    ) {
        let seqs: Vec<Vec<usize>> = raw.iter().map(|s| s.iter().map(|v| v % c.symbols()).collect()).collect();
        let mut cur = c.clone();
        let mut prev = f64::NEG_INFINITY;
        for _ in 0..15 {
            let (next, ll) = baum_welch_step(&cur, &seqs, 1e-6).unwrap();
            prop_assert!(ll >= prev - 1e-9, "{ll} < {prev}");
            prev = ll;
            let n = next.states();
            for i in 0..n {
                for j in 0..n {
                    if !HmmChain::<f64>::allowed(n, i, j) {
                        prop_assert_eq!(next.a(i, j), 0.0);
                    }
                }
                prop_assert!((next.a_row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
                prop_assert!((next.b_row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
            cur = next;
        }
    }
}
