//! Grid specifications of the form `a:b:n` or `a:b:n,log`.

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct GridArg {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub log: bool,
}

impl GridArg {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                let f = i as f64 / last;
                if i == 0 {
                    self.lo
                } else if i + 1 == self.n {
                    self.hi
                } else if self.log {
                    (self.lo.ln() + f * (self.hi / self.lo).ln()).exp()
                } else {
                    self.lo + f * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (body, log) = match s.split_once(',') {
            Some((body, "log")) => (body, true),
            Some((body, "lin")) => (body, false),
            Some((_, flag)) => return Err(format!("unknown grid flag `{flag}` (expected log or lin)")),
            None => (s, false),
        };
        let parts: Vec<&str> = body.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("grid `{s}` is not of the form a:b:n[,log]"));
        };
        let lo: f64 = a.trim().parse().map_err(|_| format!("bad grid start `{a}`"))?;
        let hi: f64 = b.trim().parse().map_err(|_| format!("bad grid end `{b}`"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("bad grid size `{n}`"))?;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err("grid endpoints must be finite".into());
        }
        if n == 0 {
            return Err("grid needs at least one point".into());
        }
        if n == 1 && lo != hi {
            return Err("a one-point grid needs a == b".into());
        }
        if n > 1 && hi <= lo {
            return Err(format!("grid must be strictly increasing, got {lo} ≥ {hi}"));
        }
        if log && lo <= 0.0 {
            return Err("log grid needs a positive start".into());
        }
        Ok(Self { lo, hi, n, log })
    }
}

/// A closed interval `a:b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeArg(pub f64, pub f64);

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("range `{s}` is not of the form a:b"))?;
        let lo: f64 = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
        let hi: f64 = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return Err(format!("range needs 0 < a < b < ∞, got {lo}:{hi}"));
        }
        Ok(Self(lo, hi))
    }
}
