//! Air-to-water heat pumps: temperature and part-load dependent COP,
//! electric power, sizing and annual electricity.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chamber::AnnualResult;
use crate::error::{Error, Result};
use crate::table::{Table1D, Table2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Duty {
    Heating,
    Cooling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatPumpSpec {
    pub duty: Duty,
    /// kW thermal
    pub q_nominal: f64,
    pub cop_nominal: f64,
    /// outdoor temperature of the rating point, °C
    pub t_ext_rating: f64,
    /// supply water temperature, °C
    pub t_wat: f64,
    /// COP multiplier over (t_ext, t_wat)
    pub cop_t_table: Table2D,
    /// COP multiplier over part-load ratio
    pub plf_table: Table1D,
    /// kW_el of auxiliaries per kW_th delivered
    pub aux_coeff: f64,
    /// lower bound on the outdoor temperature seen by the unit, °C
    /// (condenser pressure limit of chillers)
    pub t_ext_min: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopEval {
    pub cop: f64,
    /// t_ext or plr fell outside the table anchors
    pub clamped: bool,
}

impl HeatPumpSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cop_nominal > 1.0) {
            return Err(Error::validation("cop_nominal", format!("{} must exceed 1", self.cop_nominal)));
        }
        if !(self.q_nominal > 0.0 && self.q_nominal.is_finite()) {
            return Err(Error::validation("q_nominal", format!("{}", self.q_nominal)));
        }
        if (self.plf_table.eval(1.0) - 1.0).abs() > 1e-9 {
            return Err(Error::validation("plf_table", "PLF(1.0) must equal 1"));
        }
        if self.plf_table.ys().iter().any(|&v| v <= 0.0) || self.cop_t_table.values().iter().flatten().any(|&v| v <= 0.0) {
            return Err(Error::validation("cop tables", "multipliers must be positive"));
        }
        if !(self.aux_coeff >= 0.0) {
            return Err(Error::validation("aux_coeff", format!("{}", self.aux_coeff)));
        }
        Ok(())
    }

    fn effective_t_ext(&self, t_ext: f64) -> f64 {
        match self.t_ext_min {
            Some(min) => t_ext.max(min),
            None => t_ext,
        }
    }

    /// Largest COP the tables can produce, for bounds checks.
    pub fn cop_max(&self) -> f64 {
        let rating = self.cop_t_table.eval(self.t_ext_rating, self.t_wat);
        let t_max = self.cop_t_table.values().iter().flatten().fold(0.0_f64, |a, &b| a.max(b));
        let plf_max = self.plf_table.ys().iter().fold(0.0_f64, |a, &b| a.max(b));
        self.cop_nominal * t_max / rating * plf_max
    }
}

pub fn cop(spec: &HeatPumpSpec, t_ext: f64, plr: f64) -> Result<CopEval> {
    if !(plr > 0.0 && plr <= 1.0 + 1e-9) {
        return Err(Error::Domain(format!("part-load ratio {plr} outside (0, 1]")));
    }
    let t = spec.effective_t_ext(t_ext);
    let at = spec.cop_t_table.lookup(t, spec.t_wat);
    let rating = spec.cop_t_table.eval(spec.t_ext_rating, spec.t_wat);
    let plf = spec.plf_table.lookup(plr);
    Ok(CopEval {
        cop: spec.cop_nominal * at.value / rating * plf.value,
        clamped: at.clamped || plf.clamped,
    })
}

/// Electric input in kW for a thermal output `q` in kW.
pub fn electric_power(spec: &HeatPumpSpec, q: f64, t_ext: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("thermal load {q} kW must be non-negative")));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    if q > spec.q_nominal * (1.0 + 1e-9) {
        return Err(Error::Capacity {
            context: format!("{:?} unit", spec.duty),
            load_kw: q,
            nominal_kw: spec.q_nominal,
        });
    }
    let c = cop(spec, t_ext, (q / spec.q_nominal).min(1.0))?;
    Ok(q / c.cop + spec.aux_coeff * q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sizing {
    /// capacity over annual peak
    pub margin: f64,
    /// kW step the capacity is rounded up to
    pub step_kw: f64,
}

impl Default for Sizing {
    fn default() -> Self {
        Self { margin: 1.1, step_kw: 1.0 }
    }
}

/// Nominal capacity for an annual peak load, kW.
pub fn size_unit(peak_kw: f64, sizing: &Sizing) -> f64 {
    let q = (peak_kw.max(0.0) * sizing.margin / sizing.step_kw).ceil() * sizing.step_kw;
    q.max(sizing.step_kw)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ElectricResult {
    /// kWh electric
    pub e_heating: f64,
    pub e_cooling: f64,
    pub e_lighting: f64,
    pub e_total: f64,
    pub seasonal_cop_heat: Option<f64>,
    pub seasonal_cop_cool: Option<f64>,
    /// kWh_el kg⁻¹
    pub seec: Option<f64>,
    pub q_nominal_heat: f64,
    pub q_nominal_cool: f64,
    pub clamped_hours: u64,
}

/// Annual electricity of both units from the hourly load series.
pub fn annualize(result: &AnnualResult, heat: &HeatPumpSpec, cool: &HeatPumpSpec) -> Result<ElectricResult> {
    let mut out = ElectricResult {
        e_lighting: result.lighting_electric,
        q_nominal_heat: heat.q_nominal,
        q_nominal_cool: cool.q_nominal,
        ..Default::default()
    };
    let (mut q_heat, mut q_cool, mut aux_heat, mut aux_cool) = (0.0, 0.0, 0.0, 0.0);
    for (h, hour) in result.hourly.iter().enumerate() {
        for (spec, q, e, qsum, aux) in [
            (heat, hour.heat_unit, &mut out.e_heating, &mut q_heat, &mut aux_heat),
            (cool, hour.cool_unit, &mut out.e_cooling, &mut q_cool, &mut aux_cool),
        ] {
            if q <= 0.0 {
                continue;
            }
            let p = electric_power(spec, q, hour.t_ext).map_err(|e| match e {
                Error::Capacity { context, load_kw, nominal_kw } => Error::Capacity {
                    context: format!("{context} at hour {h}"),
                    load_kw,
                    nominal_kw,
                },
                other => other,
            })?;
            if cop(spec, hour.t_ext, (q / spec.q_nominal).min(1.0))?.clamped {
                out.clamped_hours += 1;
            }
            *e += p;
            *qsum += q;
            *aux += spec.aux_coeff * q;
        }
    }
    out.seasonal_cop_heat = (out.e_heating > aux_heat).then(|| q_heat / (out.e_heating - aux_heat));
    out.seasonal_cop_cool = (out.e_cooling > aux_cool).then(|| q_cool / (out.e_cooling - aux_cool));
    out.e_total = out.e_heating + out.e_cooling + out.e_lighting;
    out.seec = (result.yield_kg > 0.0).then(|| out.e_total / result.yield_kg);
    Ok(out)
}

pub const COP_TABLE_HEADER: [&str; 3] = ["t_ext", "t_wat", "multiplier"];
pub const PLF_TABLE_HEADER: [&str; 2] = ["plr", "plf"];

fn read_rows(text: &str, source_name: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let got = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(parse_err(1, format!("expected header `{}`", header.join(","))));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map(|p| p.line() as usize).unwrap_or(0), e.to_string()))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != header.len() {
            return Err(parse_err(line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let row = rec
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("bad number `{c}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Schema(format!("{source_name}: table has no rows")));
    }
    Ok(rows)
}

/// `t_ext,t_wat,multiplier` rows covering a full grid.
pub fn parse_cop_table_str(text: &str, source_name: &str) -> Result<Table2D> {
    let rows = read_rows(text, source_name, &COP_TABLE_HEADER)?;
    let triples: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r[0], r[1], r[2])).collect();
    let t = Table2D::from_triples(&triples)?;
    if t.values().iter().flatten().any(|&v| v <= 0.0) {
        return Err(Error::validation("multiplier", "must be positive"));
    }
    Ok(t)
}

/// `plr,plf` rows; PLF(1.0) must be 1.
pub fn parse_plf_table_str(text: &str, source_name: &str) -> Result<Table1D> {
    let mut rows = read_rows(text, source_name, &PLF_TABLE_HEADER)?;
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    if rows.iter().any(|r| !(r[0] > 0.0 && r[0] <= 1.0)) {
        return Err(Error::validation("plr", "anchors must lie in (0, 1]"));
    }
    if rows.iter().any(|r| r[1] <= 0.0) {
        return Err(Error::validation("plf", "must be positive"));
    }
    let t = Table1D::new(rows.iter().map(|r| r[0]).collect(), rows.iter().map(|r| r[1]).collect())?;
    if (t.eval(1.0) - 1.0).abs() > 1e-9 || *t.xs().last().unwrap() != 1.0 {
        return Err(Error::validation("plf", "table must end at plr 1.0 with plf 1.0"));
    }
    Ok(t)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitFile {
    cop_nominal: f64,
    t_ext_rating: f64,
    t_wat: f64,
    #[serde(default)]
    t_ext_min: Option<f64>,
    cop_t_table: PathBuf,
    plf_table: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct HvacFile {
    aux_coeff: f64,
    sizing: Sizing,
    heating: UnitFile,
    cooling: UnitFile,
}

/// Heat-pump definitions before sizing.
#[derive(Debug, Clone, PartialEq)]
pub struct HvacConfig {
    pub sizing: Sizing,
    pub heating: HeatPumpSpec,
    pub cooling: HeatPumpSpec,
}

impl HvacConfig {
    /// Load `units.toml`; table paths are relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let f: HvacFile = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let unit = |u: &UnitFile, duty: Duty| -> Result<HeatPumpSpec> {
            let read = |p: &Path| -> Result<String> {
                let full = dir.join(p);
                std::fs::read_to_string(&full).map_err(|e| Error::io(full, e))
            };
            let cop_src = dir.join(&u.cop_t_table).display().to_string();
            let plf_src = dir.join(&u.plf_table).display().to_string();
            let spec = HeatPumpSpec {
                duty,
                q_nominal: 1.0,
                cop_nominal: u.cop_nominal,
                t_ext_rating: u.t_ext_rating,
                t_wat: u.t_wat,
                cop_t_table: parse_cop_table_str(&read(&u.cop_t_table)?, &cop_src)?,
                plf_table: parse_plf_table_str(&read(&u.plf_table)?, &plf_src)?,
                aux_coeff: f.aux_coeff,
                t_ext_min: u.t_ext_min,
            };
            spec.validate()?;
            Ok(spec)
        };
        if !(f.sizing.margin >= 1.0 && f.sizing.step_kw > 0.0) {
            return Err(Error::validation("sizing", "margin must be >= 1 and step_kw > 0"));
        }
        Ok(Self {
            sizing: f.sizing,
            heating: unit(&f.heating, Duty::Heating)?,
            cooling: unit(&f.cooling, Duty::Cooling)?,
        })
    }

    /// Both units sized to the annual peaks of `result`.
    pub fn sized_for(&self, result: &AnnualResult) -> (HeatPumpSpec, HeatPumpSpec) {
        let mut heat = self.heating.clone();
        let mut cool = self.cooling.clone();
        heat.q_nominal = size_unit(result.peak_heat_unit, &self.sizing);
        cool.q_nominal = size_unit(result.peak_cool_unit, &self.sizing);
        (heat, cool)
    }
}
