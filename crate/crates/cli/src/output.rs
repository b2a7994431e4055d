//! Deterministic text output: a `%g`-style float printer, CSV assembly,
//! and JSON serialization helpers shared by the subcommands.
//!
//! Reruns with identical arguments must produce byte-identical files, so
//! nothing here consults the clock or the environment beyond the argument
//! list itself (the optional timestamp is injected explicitly by the
//! caller).

use serde::Serializer;

/// Formats a float with 12 significant digits in the shortest of
/// positional or scientific form, mirroring `printf("%.12g")` except that
/// exponents carry no padding (`1e-5`, not `1e-05`).
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp_text) = sci
        .split_once('e')
        .expect("scientific form has an exponent");
    let exp: i32 = exp_text.parse().expect("exponent is an integer");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);

    let body = if (-4..12).contains(&exp) {
        if exp >= 0 {
            let split = (exp + 1) as usize;
            let int_part = &digits[..split];
            let frac = digits[split..].trim_end_matches('0');
            if frac.is_empty() {
                int_part.to_string()
            } else {
                format!("{int_part}.{frac}")
            }
        } else {
            let frac = digits.trim_end_matches('0');
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), frac)
        }
    } else {
        let head = &digits[..1];
        let tail = digits[1..].trim_end_matches('0');
        if tail.is_empty() {
            format!("{head}e{exp}")
        } else {
            format!("{head}.{tail}e{exp}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// A CSV table with a single comment line identifying the producing
/// invocation, then a header, then rows. Fields never need quoting here:
/// all values are numbers or fixed identifiers.
pub struct Table {
    comment: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(args_echo: &str, timestamp: Option<u64>, header: Vec<&'static str>) -> Self {
        let mut comment = format!(
            "# tool=thermosep version={} args=\"{}\"",
            env!("CARGO_PKG_VERSION"),
            args_echo
        );
        if let Some(ts) = timestamp {
            comment.push_str(&format!(" timestamp={ts}"));
        }
        Table {
            comment,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.comment);
        out.push('\n');
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Serializes a float as a JSON number, or as the string `"inf"` /
/// `"-inf"` when infinite, keeping threshold records valid JSON even for
/// degenerate spectra.
pub fn ser_extended<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_g_table() {
        let cases: &[(f64, &str)] = &[
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (-1.5, "-1.5"),
            (0.1, "0.1"),
            (2.0 / 3.0, "0.666666666667"),
            (1e-4, "0.0001"),
            (1e-5, "1e-5"),
            (123456789012.0, "123456789012"),
            (99999999999.5, "99999999999.5"),
            (1e12, "1e12"),
            (2.3993572805, "2.3993572805"),
            (-6.02e23, "-6.02e23"),
            (f64::INFINITY, "inf"),
            (f64::NEG_INFINITY, "-inf"),
            (f64::NAN, "nan"),
        ];
        for &(x, expected) in cases {
            assert_eq!(fmt_g(x), expected, "formatting {x}");
        }
    }

    #[test]
    fn fmt_g_round_trips_to_full_precision() {
        for &x in &[
            std::f64::consts::PI,
            1.199678640257734,
            0.8335560478,
            -3.25e-17,
            7.0,
        ] {
            let text = fmt_g(x);
            let back: f64 = text.parse().unwrap();
            assert!(
                (back - x).abs() <= 5e-12 * x.abs(),
                "{x} -> {text} -> {back}"
            );
        }
    }

    #[test]
    fn table_renders_comment_header_rows() {
        let mut t = Table::new("spectrum --system s.json", None, vec!["j", "omega_j"]);
        t.push(vec!["0".into(), fmt_g(0.5)]);
        t.push(vec!["1".into(), fmt_g(2.0)]);
        let text = t.render();
        let mut lines = text.lines();
        let comment = lines.next().unwrap();
        assert!(comment.starts_with("# tool=thermosep version="));
        assert!(comment.ends_with("args=\"spectrum --system s.json\""));
        assert_eq!(lines.next().unwrap(), "j,omega_j");
        assert_eq!(lines.next().unwrap(), "0,0.5");
        assert_eq!(lines.next().unwrap(), "1,2");
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn table_timestamp_is_opt_in() {
        let t = Table::new("ring", Some(1_700_000_000), vec!["r"]);
        assert!(t.render().starts_with("# tool=thermosep"));
        assert!(t.render().contains(" timestamp=1700000000"));
        let bare = Table::new("ring", None, vec!["r"]);
        assert!(!bare.render().contains("timestamp"));
    }
}
