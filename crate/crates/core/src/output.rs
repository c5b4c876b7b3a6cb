//! Writers for the JSON reports and CSV tables.
//!
//! Every floating-point number is written with 17 significant digits in
//! exponent notation, independent of locale, so a value read back is
//! bit-identical to the one written.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::bifurcation::SweepPoint;
use crate::dynamics::Trajectory;

/// Format a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Pretty JSON formatter that prints floats with 17 significant digits.
/// Non-finite values become `null`, as in plain serde_json.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut writer: W) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut writer, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(io::Error::other)?;
    writer.write_all(b"\n")
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    write_json(value, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub const TRAJECTORY_HEADER: &str = "t,X,Y,Z";

pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, writer: W) -> io::Result<()> {
    let mut w = io::BufWriter::new(writer);
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for (t, s) in tr.times.iter().zip(&tr.states) {
        writeln!(w, "{},{},{},{}", fmt_f64(*t), fmt_f64(s.x), fmt_f64(s.y), fmt_f64(s.z))?;
    }
    w.flush()
}

pub const SWEEP_HEADER: &str = "param,value,feasible,max_re_lambda,a1,a3,hurwitz_margin,f1_stable";

pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], writer: W) -> io::Result<()> {
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let mut w = io::BufWriter::new(writer);
    writeln!(w, "{SWEEP_HEADER}")?;
    for pt in points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            pt.param,
            fmt_f64(pt.value),
            pt.feasible,
            opt(pt.max_re_lambda),
            opt(pt.a1),
            opt(pt.a3),
            opt(pt.hurwitz_margin),
            pt.f1_stable
        )?;
    }
    w.flush()
}
