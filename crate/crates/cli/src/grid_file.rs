//! Grid export format of `aniso map`.
//!
//! CSV: an optional `# blowup_radius=<r>` line when the grid was truncated,
//! then the header `t,u_index,R,radial_sv,tangential_sv` and one row per
//! node in t-major order.

use aniso_core::GridProjection;
use serde::{Deserialize, Serialize};

use crate::table::fmt_num;

pub const HEADER: &str = "t,u_index,R,radial_sv,tangential_sv";
const BLOWUP_PREFIX: &str = "# blowup_radius=";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub t: f64,
    pub u_index: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub radial_sv: f64,
    pub tangential_sv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub blowup_radius: Option<f64>,
    pub rows: Vec<GridRow>,
}

impl From<&GridProjection> for GridFile {
    fn from(grid: &GridProjection) -> Self {
        Self {
            blowup_radius: grid.blowup_radius,
            rows: grid
                .nodes
                .iter()
                .map(|n| GridRow {
                    t: n.t,
                    u_index: n.u_index,
                    r: n.r,
                    radial_sv: n.radial_sv,
                    tangential_sv: n.tangential_sv,
                })
                .collect(),
        }
    }
}

impl GridFile {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(r) = self.blowup_radius {
            out.push_str(BLOWUP_PREFIX);
            out.push_str(&fmt_num(r));
            out.push('\n');
        }
        out.push_str(HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_num(row.t),
                row.u_index,
                fmt_num(row.r),
                fmt_num(row.radial_sv),
                fmt_num(row.tangential_sv)
            ));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().peekable();
        let mut blowup_radius = None;
        if let Some(rest) = lines.peek().and_then(|l| l.strip_prefix(BLOWUP_PREFIX)) {
            blowup_radius = Some(rest.parse::<f64>().map_err(|e| format!("bad blowup_radius: {e}"))?);
            lines.next();
        }
        match lines.next() {
            Some(HEADER) => {}
            other => return Err(format!("expected header '{HEADER}', found {other:?}")),
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(format!("row {}: expected 5 fields, found {}", i + 1, fields.len()));
            }
            let num = |k: usize| fields[k].parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1));
            rows.push(GridRow {
                t: num(0)?,
                u_index: fields[1].parse().map_err(|e| format!("row {}: {e}", i + 1))?,
                r: num(2)?,
                radial_sv: num(3)?,
                tangential_sv: num(4)?,
            });
        }
        Ok(Self { blowup_radius, rows })
    }
}
