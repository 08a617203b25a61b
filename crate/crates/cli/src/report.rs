use qgca::measure::format_rational;
use qgca::{Alphabet, Prob, Symbol};

/// Buffered report text, written out once the command finishes.
#[derive(Default)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn line(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    pub fn row<S: AsRef<str>>(&mut self, cols: &[S]) {
        let cols: Vec<&str> = cols.iter().map(AsRef::as_ref).collect();
        self.line(cols.join("\t"));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn rat(q: &Prob) -> String {
    format_rational(q)
}

/// Twelve significant digits, no exponent.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" { "0".into() } else { s }
}

/// `{a,b}`, or `{a b}` when some name contains a comma.
pub fn set(alphabet: &Alphabet, members: &[Symbol]) -> String {
    let names: Vec<&str> = members.iter().map(|&s| alphabet.name(s)).collect();
    let sep = if names.iter().any(|n| n.contains(',')) { " " } else { "," };
    format!("{{{}}}", names.join(sep))
}

pub fn word(alphabet: &Alphabet, w: &[Symbol]) -> String {
    alphabet.format_word(w)
}
