//! Running-supremum envelopes of positive functions on (0, ∞) and their
//! right-sided generalized inverses, tabulated on a logarithmic grid.

use std::sync::{Arc, RwLock};

use crate::error::{Result, SpdError};

pub type ScalarFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

const MIN_DECADE: i32 = -150;
const MAX_DECADE: i32 = 150;

#[derive(Debug, Clone)]
struct Table {
    lo_decade: i32,
    hi_decade: i32,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl Table {
    fn node(&self, i: usize, per_decade: usize) -> f64 {
        10f64.powf(self.lo_decade as f64 + i as f64 / per_decade as f64)
    }

    fn lo(&self) -> f64 {
        10f64.powi(self.lo_decade)
    }

    fn hi(&self) -> f64 {
        10f64.powi(self.hi_decade)
    }
}

/// `E(r) = sup_{0 < u ≤ r} f(u)`, resolved exactly at grid nodes and by
/// `max(E(node), f(r))` between them. The table is built on first use and
/// grown by whole decades when a query falls outside it; readers always see
/// a complete table.
pub struct MonotoneEnvelope {
    f: ScalarFn,
    per_decade: usize,
    initial: (i32, i32),
    table: RwLock<Option<Arc<Table>>>,
}

impl std::fmt::Debug for MonotoneEnvelope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let range = self.current().map(|t| (t.lo_decade, t.hi_decade));
        f.debug_struct("MonotoneEnvelope")
            .field("per_decade", &self.per_decade)
            .field("decades", &range)
            .finish()
    }
}

impl MonotoneEnvelope {
    pub fn new(f: ScalarFn, per_decade: usize) -> Self {
        Self::with_range(f, per_decade, -6, 6)
    }

    pub fn with_range(f: ScalarFn, per_decade: usize, lo_decade: i32, hi_decade: i32) -> Self {
        Self {
            f,
            per_decade: per_decade.max(4),
            initial: (lo_decade, hi_decade),
            table: RwLock::new(None),
        }
    }

    pub fn nodes_per_decade(&self) -> usize {
        self.per_decade
    }

    /// Current tabulated range `(lo, hi)`, if built.
    pub fn range(&self) -> Option<(f64, f64)> {
        self.current().map(|t| (t.lo(), t.hi()))
    }

    fn current(&self) -> Option<Arc<Table>> {
        self.table.read().expect("envelope lock poisoned").clone()
    }

    fn build(&self, lo_decade: i32, hi_decade: i32, old: Option<&Table>) -> Result<Table> {
        let n = (hi_decade - lo_decade) as usize * self.per_decade + 1;
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let reuse = old.and_then(|t| {
                let offset = (lo_decade - t.lo_decade) as i64 * self.per_decade as i64 + i as i64;
                (offset >= 0 && (offset as usize) < t.values.len()).then(|| t.values[offset as usize])
            });
            let v = match reuse {
                Some(v) => v,
                None => {
                    let x = 10f64.powf(lo_decade as f64 + i as f64 / self.per_decade as f64);
                    (self.f)(x)?
                }
            };
            values.push(v);
        }
        let mut prefix = Vec::with_capacity(n);
        let mut run = f64::NEG_INFINITY;
        for &v in &values {
            run = run.max(v);
            prefix.push(run);
        }
        Ok(Table {
            lo_decade,
            hi_decade,
            values,
            prefix,
        })
    }

    /// Returns a table covering `[r_lo, r_hi]`, growing the shared one if needed.
    fn covering(&self, r_lo: f64, r_hi: f64) -> Result<Arc<Table>> {
        if let Some(t) = self.current() {
            if t.lo() <= r_lo && r_hi <= t.hi() {
                return Ok(t);
            }
        }
        let mut guard = self.table.write().expect("envelope lock poisoned");
        let (mut lo_d, mut hi_d) = match guard.as_deref() {
            Some(t) => (t.lo_decade, t.hi_decade),
            None => self.initial,
        };
        if guard.is_some() || r_lo < 10f64.powi(lo_d) || r_hi > 10f64.powi(hi_d) {
            while 10f64.powi(lo_d) > r_lo && lo_d > MIN_DECADE {
                lo_d -= 2;
            }
            while 10f64.powi(hi_d) < r_hi && hi_d < MAX_DECADE {
                hi_d += 2;
            }
        }
        if let Some(t) = guard.as_deref() {
            if t.lo_decade == lo_d && t.hi_decade == hi_d {
                return Ok(guard.clone().expect("table present"));
            }
        }
        let table = Arc::new(self.build(lo_d, hi_d, guard.as_deref())?);
        *guard = Some(table.clone());
        Ok(table)
    }

    fn value_in(&self, t: &Table, r: f64) -> Result<f64> {
        let pos = (r.log10() - t.lo_decade as f64) * self.per_decade as f64;
        let i = (pos.floor().max(0.0) as usize).min(t.values.len() - 1);
        let i = if t.node(i, self.per_decade) > r && i > 0 {
            i - 1
        } else {
            i
        };
        Ok(t.prefix[i].max((self.f)(r)?))
    }

    /// The envelope value `E(r)`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(SpdError::RangeError(format!(
                "envelope argument must be positive, got {r}"
            )));
        }
        let t = self.covering(r, r)?;
        if r < t.lo() || r > t.hi() {
            return Err(SpdError::RangeError(format!("argument {r} outside the supported grid")));
        }
        self.value_in(&t, r)
    }

    /// `sup { r > 0 : E(r) ≤ s }`, so that `E(inverse(s)) = s` for
    /// continuous `f`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(SpdError::RangeError(format!(
                "inverse needs a positive finite level, got {s}"
            )));
        }
        let mut t = self.covering(1.0, 1.0)?;
        while t.prefix[0] > s {
            if t.lo_decade <= MIN_DECADE {
                return Err(SpdError::RangeError(format!(
                    "level {s} lies below the envelope on the probed grid"
                )));
            }
            t = self.covering(t.lo() * 0.5, t.hi())?;
        }
        let idx = loop {
            match t.prefix.iter().position(|&p| p > s) {
                Some(i) => break i,
                None => {
                    if t.hi_decade >= MAX_DECADE {
                        return Err(SpdError::RangeError(format!(
                            "level {s} exceeds the envelope on the probed grid"
                        )));
                    }
                    t = self.covering(t.lo(), t.hi() * 2.0)?;
                }
            }
        };
        let mut lo = t.node(idx - 1, self.per_decade);
        let mut hi = t.node(idx, self.per_decade);
        let base = t.prefix[idx - 1];
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || (hi - lo) <= 1e-16 * hi {
                break;
            }
            if base.max((self.f)(mid)?) <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_envelope_and_inverse() {
        let env = MonotoneEnvelope::new(Arc::new(|x: f64| Ok(0.75 * x.powf(1.5))), 512);
        assert!((env.value(2.0).unwrap() - 0.75 * 2f64.powf(1.5)).abs() < 1e-14);
        assert!((env.inverse(0.75).unwrap() - 1.0).abs() < 1e-13);
        for s in [1e-12, 1e-3, 3.0, 1e9, 1e15] {
            let r = env.inverse(s).unwrap();
            assert!((env.value(r).unwrap() / s - 1.0).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn non_monotone_function_uses_right_endpoint() {
        // bump at 1 then dip: the inverse of a level inside the plateau must
        // land on the far side of the flat stretch
        let f = |x: f64| {
            Ok(if x < 1.0 {
                x
            } else if x < 4.0 {
                1.0 - 0.1 * (x - 1.0)
            } else {
                0.7 + (x - 4.0)
            })
        };
        let env = MonotoneEnvelope::new(Arc::new(f), 512);
        assert!((env.value(3.0).unwrap() - 1.0).abs() < 1e-12);
        let r = env.inverse(1.0).unwrap();
        assert!((r - 4.3).abs() < 1e-9, "{r}");
        let r = env.inverse(0.5).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_of_envelope_dominates() {
        let env = MonotoneEnvelope::new(Arc::new(|x: f64| Ok(x * x * (2.0 + (5.0 * x.ln()).sin()))), 512);
        for r in [1e-3, 0.2, 1.0, 7.0, 300.0] {
            let s = env.value(r).unwrap();
            assert!(env.inverse(s).unwrap() >= r * (1.0 - 1e-12));
        }
    }

    #[test]
    fn table_extends_on_demand() {
        let env = MonotoneEnvelope::new(Arc::new(|x: f64| Ok(x)), 16);
        env.value(1.0).unwrap();
        assert_eq!(env.range(), Some((1e-6, 1e6)));
        assert!((env.inverse(1e9).unwrap() - 1e9).abs() < 1e-3);
        assert!(env.range().unwrap().1 >= 1e9);
        assert!((env.value(1e-9).unwrap() - 1e-9).abs() < 1e-22);
        assert!(env.range().unwrap().0 <= 1e-9);
    }
}
