//! JSON report envelope and number formatting.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    if !(-5..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let dot = if frac.is_empty() { String::new() } else { format!(".{frac}") };
        return format!("{sign}{}{dot}e{exp}", &digits[..1]);
    }
    let (int, frac) = if exp >= 0 {
        let e = exp as usize + 1;
        (digits[..e].to_string(), digits[e..].to_string())
    } else {
        ("0".to_string(), format!("{}{}", "0".repeat((-exp - 1) as usize), digits))
    };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Pretty printing with [`format_g17`] floats; non-finite values become `null`.
pub struct G17Formatter(PrettyFormatter<'static>);

impl G17Formatter {
    pub fn new() -> Self {
        G17Formatter(PrettyFormatter::new())
    }
}

fn write_float<W: ?Sized + io::Write>(w: &mut W, x: f64) -> io::Result<()> {
    if x.is_finite() {
        w.write_all(format_g17(x).as_bytes())
    } else {
        w.write_all(b"null")
    }
}

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, x: f64) -> io::Result<()> {
        write_float(w, x)
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, x: f32) -> io::Result<()> {
        write_float(w, f64::from(x))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter::new());
    value.serialize(&mut ser).expect("serializable report");
    out.push(b'\n');
    String::from_utf8(out).expect("utf-8 JSON")
}

#[derive(Serialize)]
pub struct Hashes {
    pub inputs: BTreeMap<String, String>,
    pub config: String,
    pub result: String,
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a C,
    result: &'a R,
    hashes: &'a Hashes,
    #[serde(skip_serializing_if = "Option::is_none")]
    report_sha256: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<&'a str>,
}

/// The report hash covers every field except itself and `timestamp`.
pub fn render<C: Serialize, R: Serialize>(config: &C, result: &R, inputs: BTreeMap<String, String>, timestamp: &str) -> String {
    let hashes = Hashes {
        inputs,
        config: sha256_hex(to_json(config).as_bytes()),
        result: sha256_hex(to_json(result).as_bytes()),
    };
    let mut env = Envelope {
        tool: "mm",
        version: env!("CARGO_PKG_VERSION"),
        config,
        result,
        hashes: &hashes,
        report_sha256: None,
        timestamp: None,
    };
    let digest = sha256_hex(to_json(&env).as_bytes());
    env.report_sha256 = Some(&digest);
    env.timestamp = Some(timestamp);
    to_json(&env)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(0.125), "0.125");
        assert_eq!(format_g17(3.0), "3");
        assert_eq!(format_g17(-2.5e-7), "-2.4999999999999999e-7");
        assert_eq!(format_g17(1e20), "1e20");
        assert_eq!(format_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_g17(0.0), "0");
    }

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -1.5e-300, 123456.789, f64::MIN_POSITIVE, f64::MAX] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn report_hash_ignores_timestamp() {
        let a = render(&"cfg", &[1.5, 2.0], BTreeMap::new(), "t1");
        let b = render(&"cfg", &[1.5, 2.0], BTreeMap::new(), "t2");
        let strip = |s: &str| s.lines().filter(|l| !l.contains("\"timestamp\"")).collect::<Vec<_>>().join("\n");
        assert_ne!(a, b);
        assert_eq!(strip(&a), strip(&b));
    }
}
