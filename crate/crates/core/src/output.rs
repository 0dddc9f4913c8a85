//! Machine-readable output: every float is written with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::Result;

/// `%.17g`-style rendering: lossless for every finite `f64`.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        trim_fraction(format!("{:.*}", (16 - exp) as usize, x))
    } else {
        format!("{}e{}", trim_fraction(mantissa.to_string()), exp)
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with 17-significant-digit floats; non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn renders_like_printf_g17() {
        assert_eq!(format_sig17(8f64.sqrt()), "2.8284271247461903");
        assert_eq!(format_sig17(0.25), "0.25");
        assert_eq!(format_sig17(2.0), "2");
        assert_eq!(format_sig17(-1.0), "-1");
        assert_eq!(format_sig17(0.1), "0.10000000000000001");
        assert_eq!(format_sig17(1e-8), "1e-8");
        assert_eq!(format_sig17(1.5e20), "1.5e20");
        assert_eq!(format_sig17(0.0), "0");
    }

    #[test]
    fn json_floats_use_sig17() {
        let text = to_json(&serde_json::json!({"x": 0.1, "n": [1.0, -0.5]})).unwrap();
        assert_eq!(text, r#"{"n":[1,-0.5],"x":0.10000000000000001}"#);
    }

    proptest! {
        #[test]
        fn sig17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let back: f64 = format_sig17(x).parse().unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
