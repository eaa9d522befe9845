//! CSV assembly with round-trip exact number formatting.

/// 17 significant digits, enough to recover every binary64 value.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut buf = header.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(",");
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
