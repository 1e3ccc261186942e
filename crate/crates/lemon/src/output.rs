//! CSV, JSON and SVG writers. Every float is written with 17 significant
//! digits so that it reads back to the same double.

use serde_json::Value;
use std::fmt::Write as _;

use crate::phase::Trajectory;

/// Scientific notation with 17 significant digits; non-finite values as
/// `NaN`, `inf`, `-inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A table with a header row, written as comma-separated UTF-8 with LF endings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt17(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => json_f64(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("write to memory");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("write to memory");
        }
        w.into_inner().expect("flush to memory")
    }

    /// Rows as an array of objects keyed by the header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    Value::Object(
                        self.header
                            .iter()
                            .zip(r)
                            .map(|(h, c)| (h.clone(), c.to_json()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

/// Non-finite floats have no JSON number form and become strings.
pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(format!("{x}"))
    }
}

/// The JSON envelope `{command, config, results, residuals}`.
pub fn envelope(command: &str, config: Value, results: Value, residuals: Value) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), Value::from(command));
    m.insert("config".into(), config);
    m.insert("results".into(), results);
    m.insert("residuals".into(), residuals);
    Value::Object(m)
}

/// Serialise a JSON value, writing floats with [`fmt17`]. Keys keep their
/// insertion order.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, &mut out, 0);
    out.push('\n');
    out
}

fn write_json(v: &Value, out: &mut String, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => {
            out.push_str(&serde_json::to_string(v).expect("plain value"));
        }
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) if !n.is_f64() => {
                let _ = write!(out, "{i}");
            }
            (_, Some(u), _) if !n.is_f64() => {
                let _ = write!(out, "{u}");
            }
            (_, _, Some(x)) => out.push_str(&fmt17(x)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(x, out, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("string key"));
                out.push_str(": ");
                write_json(x, out, indent + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

pub fn phase_table(trajs: &[Trajectory]) -> Table {
    let mut t = Table::new(&["traj_id", "step", "phi", "theta"]);
    for tr in trajs {
        for &(step, phi, theta) in &tr.samples {
            t.push(vec![tr.id.into(), step.into(), phi.into(), theta.into()]);
        }
    }
    t
}

/// One series of points for [`svg_scatter`].
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [[f64; 2]],
    pub polyline: bool,
}

const SVG_SIZE: f64 = 800.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Scatter plot on a fixed 800x800 view box mapping `bounds = [xmin, xmax,
/// ymin, ymax]` to the frame. Contains no text, so its bytes depend only on
/// the data.
pub fn svg_scatter(series: &[Series], bounds: [f64; 4]) -> String {
    let [x0, x1, y0, y1] = bounds;
    let sx = |x: f64| (x - x0) / (x1 - x0) * SVG_SIZE;
    let sy = |y: f64| SVG_SIZE - (y - y0) / (y1 - y0) * SVG_SIZE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SVG_SIZE} {SVG_SIZE}\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, "<g data-series=\"{}\">", ser.label);
        if ser.polyline {
            let pts: Vec<String> = ser
                .points
                .iter()
                .filter(|p| p[0].is_finite() && p[1].is_finite())
                .map(|p| format!("{:.2},{:.2}", sx(p[0]), sy(p[1])))
                .collect();
            let _ = writeln!(
                s,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\"{}\"/>",
                pts.join(" ")
            );
        } else {
            for p in ser.points.iter().filter(|p| p[0].is_finite() && p[1].is_finite()) {
                let _ = writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"0.6\" fill=\"{color}\"/>", sx(p[0]), sy(p[1]));
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

/// Bounding box of all series, padded by 2%.
pub fn bounds_of(series: &[Series]) -> [f64; 4] {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for p in series.iter().flat_map(|s| s.points.iter()) {
        if p[0].is_finite() && p[1].is_finite() {
            b = [b[0].min(p[0]), b[1].max(p[0]), b[2].min(p[1]), b[3].max(p[1])];
        }
    }
    if !b[0].is_finite() {
        return [0.0, 1.0, 0.0, 1.0];
    }
    let px = ((b[1] - b[0]) * 0.02).max(1e-9);
    let py = ((b[3] - b[2]) * 0.02).max(1e-9);
    [b[0] - px, b[1] + px, b[2] - py, b[3] + py]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1.6347654210405709, -2.5e-300, 0.0] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
    }

    #[test]
    fn csv_has_header_and_lf() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1usize.into(), 0.5.into()]);
        let s = String::from_utf8(t.to_csv()).unwrap();
        assert_eq!(s, "a,b\n1,5.0000000000000000e-1\n");
    }

    #[test]
    fn json_is_valid_and_precise() {
        let v = envelope(
            "constants",
            serde_json::json!({"b": 1.6}),
            serde_json::json!([{"x": 0.1, "n": 3}]),
            serde_json::json!({}),
        );
        let s = to_json_string(&v);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["results"][0]["x"].as_f64(), Some(0.1));
        assert_eq!(back["results"][0]["n"].as_i64(), Some(3));
        assert!(s.contains("1.0000000000000001e-1") || s.contains("1.0000000000000000e-1"));
        let keys: Vec<&String> = back.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 4);
    }

    #[test]
    fn svg_is_deterministic() {
        let pts = [[0.0, 0.0], [1.0, 1.0]];
        let s = [Series {
            label: "a",
            points: &pts,
            polyline: false,
        }];
        let a = svg_scatter(&s, bounds_of(&s));
        assert_eq!(a, svg_scatter(&s, bounds_of(&s)));
        assert_eq!(a.matches("<circle").count(), 2);
        assert!(a.starts_with("<svg"));
    }
}
