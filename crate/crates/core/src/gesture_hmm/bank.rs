use std::fmt::Write as _;
use std::path::Path;

use super::chain::{forward_log_likelihood, init_chain, HmmChain};
use super::symbols::SymbolTable;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_REJECT_MARGIN: f64 = 2.0;

/// One gesture's state count and emission hints, as read from a gesture
/// definition file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GestureDefinition {
    pub name: String,
    pub states: usize,
    /// `(state, symbol label)` affinities used to seed emissions.
    pub hints: Vec<(usize, String)>,
}

impl GestureDefinition {
    /// Parses `gesture <name> states=<n>` blocks with optional
    /// `hint <state> <symbol_label>` lines, plus an optional `poses a,b,...`
    /// line fixing the pose symbol order.
    pub fn parse_file(text: &str) -> Result<(Option<Vec<String>>, Vec<GestureDefinition>)> {
        let mut poses = None;
        let mut defs: Vec<GestureDefinition> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["poses", list] => {
                    poses = Some(list.split(',').map(str::to_string).collect());
                }
                ["gesture", name, states] => {
                    let n = states
                        .strip_prefix("states=")
                        .and_then(|v| v.parse::<usize>().ok())
                        .filter(|&n| n >= 1)
                        .ok_or_else(|| Error::parse(ln, format!("bad state count `{states}`")))?;
                    if defs.iter().any(|d| d.name == *name) {
                        return Err(Error::parse(ln, format!("duplicate gesture `{name}`")));
                    }
                    defs.push(GestureDefinition {
                        name: name.to_string(),
                        states: n,
                        hints: Vec::new(),
                    });
                }
                ["hint", state, label] => {
                    let def = defs
                        .last_mut()
                        .ok_or_else(|| Error::parse(ln, "hint before any gesture"))?;
                    let st: usize = state
                        .parse()
                        .ok()
                        .filter(|&s| s < def.states)
                        .ok_or_else(|| Error::parse(ln, format!("bad hint state `{state}`")))?;
                    def.hints.push((st, label.to_string()));
                }
                _ => return Err(Error::parse(ln, format!("unrecognized line `{line}`"))),
            }
        }
        Ok((poses, defs))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("gesture {} states={}\n", self.name, self.states);
        for (st, label) in &self.hints {
            let _ = writeln!(s, "hint {st} {label}");
        }
        s
    }

    pub fn init_chain<T: Scalar>(&self, table: &SymbolTable) -> Result<HmmChain<T>> {
        let hints = self
            .hints
            .iter()
            .map(|(st, label)| Ok((*st, table.symbol_by_name(label)?)))
            .collect::<Result<Vec<_>>>()?;
        init_chain(self.name.clone(), self.states, table.size(), &hints)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GestureDecision<T> {
    /// Winning gesture, or `None` for a rejected sequence.
    pub label: Option<String>,
    /// Index of the best-scoring chain.
    pub best: usize,
    /// Best log-likelihood divided by sequence length.
    pub avg_log_likelihood: T,
    /// Log-likelihood of every chain, in bank order.
    pub scores: Vec<T>,
}

impl<T> GestureDecision<T> {
    pub fn is_rejected(&self) -> bool {
        self.label.is_none()
    }

    /// Label, with `WRONG` for rejections.
    pub fn label_or_wrong(&self) -> &str {
        self.label.as_deref().unwrap_or("WRONG")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GestureBank<T> {
    pub chains: Vec<HmmChain<T>>,
    pub symbols: SymbolTable,
    /// Per-symbol average log-likelihood below which a sequence is rejected.
    pub reject_threshold: T,
}

impl<T: Scalar> GestureBank<T> {
    pub fn new(chains: Vec<HmmChain<T>>, symbols: SymbolTable, reject_threshold: T) -> Result<Self> {
        if chains.is_empty() {
            return Err(Error::Empty("gesture chains"));
        }
        for c in &chains {
            if c.symbols() != symbols.size() {
                return Err(Error::DimensionMismatch {
                    expected: symbols.size(),
                    got: c.symbols(),
                });
            }
            if c.name.is_empty() || c.name.chars().any(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!("invalid gesture name `{}`", c.name)));
            }
        }
        Ok(GestureBank {
            chains,
            symbols,
            reject_threshold,
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.chains.iter().map(|c| c.name.as_str()).collect()
    }

    /// Scores `obs` against every chain; the best chain wins unless its
    /// per-symbol log-likelihood falls below the rejection threshold.
    /// Equal scores keep the earlier chain.
    pub fn classify(&self, obs: &[usize]) -> Result<GestureDecision<T>> {
        let scores = self
            .chains
            .iter()
            .map(|c| forward_log_likelihood(c, obs))
            .collect::<Result<Vec<T>>>()?;
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        let avg = scores[best] / T::of(obs.len() as f64);
        let label = (avg >= self.reject_threshold).then(|| self.chains[best].name.clone());
        Ok(GestureDecision {
            label,
            best,
            avg_log_likelihood: avg,
            scores,
        })
    }

    /// Header `HMMBANK v1 S=<S> poses=<..> reject=<t>`, then per chain its
    /// name, state count, `pi`, the A rows and the B rows (12 significant
    /// digits), then `end <chains>`.
    pub fn to_text(&self) -> String {
        let num = |v: T| format!("{:.11e}", v.as_f64());
        let row = |vals: &[T]| vals.iter().map(|&v| num(v)).collect::<Vec<_>>().join(" ");
        let mut s = format!(
            "HMMBANK v1 S={} poses={} reject={}\n",
            self.symbols.size(),
            self.symbols.poses().join(","),
            num(self.reject_threshold)
        );
        for c in &self.chains {
            let _ = writeln!(s, "{}", c.name);
            let _ = writeln!(s, "{}", c.states());
            let _ = writeln!(s, "{}", row(c.pi()));
            for i in 0..c.states() {
                let _ = writeln!(s, "{}", row(c.a_row(i)));
            }
            for i in 0..c.states() {
                let _ = writeln!(s, "{}", row(c.b_row(i)));
            }
        }
        let _ = writeln!(s, "end {}", self.chains.len());
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines.next().ok_or(Error::parse(1, "empty bank file"))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.first() != Some(&"HMMBANK") {
            return Err(Error::parse(1, "expected `HMMBANK` header"));
        }
        match toks.get(1) {
            Some(&"v1") => {}
            Some(v) => return Err(Error::Version(format!("HMMBANK {v}"))),
            None => return Err(Error::parse(1, "missing version")),
        }
        let field = |key: &str| {
            toks.iter()
                .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| Error::parse(1, format!("missing `{key}=`")))
        };
        let size: usize = field("S")?.parse().map_err(|_| Error::parse(1, "bad S"))?;
        let poses_field = field("poses")?;
        let poses: Vec<String> = if poses_field.is_empty() {
            Vec::new()
        } else {
            poses_field.split(',').map(str::to_string).collect()
        };
        let symbols = SymbolTable::new(poses).map_err(|e| Error::parse(1, e.to_string()))?;
        if symbols.size() != size {
            return Err(Error::parse(1, format!("S={size} but poses give {}", symbols.size())));
        }
        let reject = T::of(field("reject")?.parse::<f64>().map_err(|_| Error::parse(1, "bad reject"))?);

        let mut last = 1;
        let mut next = |what: &str| -> Result<(usize, &str)> {
            match lines.next() {
                Some((ln, l)) => {
                    last = ln;
                    Ok((ln, l))
                }
                None => Err(Error::parse(last + 1, format!("truncated: expected {what}"))),
            }
        };
        let parse_row = |ln: usize, l: &str, len: usize| -> Result<Vec<T>> {
            let v = l
                .split_whitespace()
                .map(|t| t.parse::<f64>().map(T::of))
                .collect::<std::result::Result<Vec<T>, _>>()
                .map_err(|e| Error::parse(ln, format!("bad number: {e}")))?;
            if v.len() != len {
                return Err(Error::parse(ln, format!("expected {len} values, got {}", v.len())));
            }
            Ok(v)
        };
        let mut chains = Vec::new();
        loop {
            let (ln, name) = next("chain name or end marker")?;
            if let Some(count) = name.strip_prefix("end ") {
                if count.trim().parse::<usize>().ok() != Some(chains.len()) {
                    return Err(Error::parse(ln, "end marker does not match chain count"));
                }
                break;
            }
            let (ln_n, n_line) = next("state count")?;
            let n: usize = n_line
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::parse(ln_n, format!("bad state count `{n_line}`")))?;
            let (l, t) = next("pi row")?;
            let pi = parse_row(l, t, n)?;
            let mut a = Vec::with_capacity(n * n);
            for _ in 0..n {
                let (l, t) = next("transition row")?;
                a.extend(parse_row(l, t, n)?);
            }
            let mut b = Vec::with_capacity(n * size);
            for _ in 0..n {
                let (l, t) = next("emission row")?;
                b.extend(parse_row(l, t, size)?);
            }
            let chain = HmmChain::from_parts(name, pi, a, b).map_err(|e| Error::parse(ln, e.to_string()))?;
            chains.push(chain);
        }
        GestureBank::new(chains, symbols, reject)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Minimum per-symbol log-likelihood of each training sequence under its own
/// chain, minus `margin`.
pub fn calibrate_threshold<T: Scalar>(
    chains: &[HmmChain<T>],
    training: &[Vec<Vec<usize>>],
    margin: f64,
) -> Result<T> {
    let mut min = T::infinity();
    for (chain, seqs) in chains.iter().zip(training) {
        for obs in seqs {
            let avg = forward_log_likelihood(chain, obs)? / T::of(obs.len() as f64);
            min = min.min(avg);
        }
    }
    if min == T::infinity() {
        return Err(Error::Empty("calibration sequences"));
    }
    Ok(min - T::of(margin))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        SymbolTable::new(vec!["Thumbs_Up".into(), "Sun_Up".into()]).unwrap()
    }

    #[test]
    fn definition_file() {
        let text = "poses Thumbs_Up,Sun_Up\n\
                    gesture Good_Afternoon states=3\n\
                    hint 0 Thumbs_Up\nhint 1 up\nhint 2 Sun_Up\n\
                    gesture Other states=1\n";
        let (poses, defs) = GestureDefinition::parse_file(text).unwrap();
        assert_eq!(poses.unwrap(), vec!["Thumbs_Up", "Sun_Up"]);
        assert_eq!(defs.len(), 2);
        assert_eq!(defs[0].hints[1], (1, "up".to_string()));
        let chain: HmmChain<f64> = defs[0].init_chain(&table()).unwrap();
        assert_eq!(chain.b(1, 0), 0.5);
        assert_eq!(chain.b(0, 4), 0.5);

        assert!(matches!(
            GestureDefinition::parse_file("hint 0 up\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            GestureDefinition::parse_file("gesture a states=2\nhint 2 up\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        let bad_hint = GestureDefinition {
            name: "x".into(),
            states: 1,
            hints: vec![(0, "Nope".into())],
        };
        assert!(bad_hint.init_chain::<f64>(&table()).is_err());
    }

    #[test]
    fn single_chain_bank_accepts() {
        let c: HmmChain<f64> = init_chain("only", 2, 6, &[]).unwrap();
        let bank = GestureBank::new(vec![c], table(), -10.0).unwrap();
        let d = bank.classify(&[0, 4, 5]).unwrap();
        assert_eq!(d.label.as_deref(), Some("only"));
        assert!((d.avg_log_likelihood - (1.0f64 / 6.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn threshold_rejects() {
        let c: HmmChain<f64> = init_chain("only", 2, 6, &[]).unwrap();
        let bank = GestureBank::new(vec![c], table(), -1.0).unwrap();
        let d = bank.classify(&[0, 1]).unwrap();
        assert!(d.is_rejected());
        assert_eq!(d.label_or_wrong(), "WRONG");
    }

    #[test]
    fn text_round_trip() {
        let c1: HmmChain<f64> = init_chain("a", 3, 6, &[(0, 4), (1, 0)]).unwrap();
        let c2: HmmChain<f64> = init_chain("b", 1, 6, &[]).unwrap();
        let bank = GestureBank::new(vec![c1, c2], table(), -3.25).unwrap();
        let text = bank.to_text();
        assert!(text.starts_with("HMMBANK v1 S=6 poses=Thumbs_Up,Sun_Up reject="));
        let back = GestureBank::<f64>::parse(&text).unwrap();
        assert_eq!(back.names(), vec!["a", "b"]);
        let obs = [4, 4, 0, 5];
        let (x, y) = (bank.classify(&obs).unwrap(), back.classify(&obs).unwrap());
        for (s, t) in x.scores.iter().zip(&y.scores) {
            assert!((s - t).abs() < 1e-9);
        }
        assert!(matches!(
            GestureBank::<f64>::parse(&text.replacen("v1", "v2", 1)),
            Err(Error::Version(_))
        ));
        let cut: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(GestureBank::<f64>::parse(&cut), Err(Error::Parse { line: 6, .. })));
    }
}
