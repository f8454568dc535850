//! Scenario grid, parallel execution and report files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chamber::{integrate_year, AnnualResult, ChamberModel, DailyLoads};
use crate::config::{RunConfig, Site};
use crate::crop::CropParams;
use crate::econ::{self, CostBook, EconInputs, EconResult, OpexInputs, RateMode};
use crate::error::{Error, Result};
use crate::hvac::{self, ElectricResult, HvacConfig};
use crate::stats::{self, Column, ObservationMatrix, SensitivityEntry};
use crate::sustain::{self, Savings, SupplyChain};
use crate::weather::{parse_weather, ClimateTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub site: Site,
    pub insulated: bool,
    /// μmol m⁻² s⁻¹
    pub ppfd: u32,
    /// °C
    pub t_in: u32,
    /// ppm
    pub co2: u32,
}

impl ScenarioSpec {
    pub fn id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins = if self.insulated { 'I' } else { 'O' };
        write!(f, "{}_{}_{}_{}_{}", self.site.code(), ins, self.ppfd, self.t_in, self.co2)
    }
}

impl FromStr for ScenarioSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("scenario id `{s}` is not of the form {{T|S|D}}_{{I|O}}_<ppfd>_<t_in>_<co2>"));
        let parts: Vec<&str> = s.split('_').collect();
        let [site, ins, ppfd, t_in, co2] = parts.as_slice() else { return Err(bad()) };
        let one_char = |p: &str| {
            let mut c = p.chars();
            match (c.next(), c.next()) {
                (Some(ch), None) => Some(ch),
                _ => None,
            }
        };
        let site = one_char(site).and_then(Site::from_code).ok_or_else(bad)?;
        let insulated = match *ins {
            "I" => true,
            "O" => false,
            _ => return Err(bad()),
        };
        // canonical decimal integers only, so that parsing inverts formatting
        let num = |p: &str| -> Result<u32> {
            let v: u32 = p.parse().map_err(|_| bad())?;
            if v.to_string() == p {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        Ok(Self {
            site,
            insulated,
            ppfd: num(ppfd)?,
            t_in: num(t_in)?,
            co2: num(co2)?,
        })
    }
}

/// Cartesian product in (location, insulation, ppfd, t_in, co2) order.
pub fn build_grid(config: &RunConfig) -> Result<Vec<ScenarioSpec>> {
    config.validate()?;
    let g = &config.grid;
    let mut out = Vec::with_capacity(g.locations.len() * g.insulation.len() * g.ppfd.len() * g.t_in.len() * g.co2.len());
    for &site in &g.locations {
        for &insulated in &g.insulation {
            for &ppfd in &g.ppfd {
                for &t_in in &g.t_in {
                    for &co2 in &g.co2 {
                        out.push(ScenarioSpec { site, insulated, ppfd, t_in, co2 });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Everything loaded from disk that the scenarios share.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub config: RunConfig,
    pub model: ChamberModel,
    pub hvac: HvacConfig,
    pub costs: CostBook,
    pub supply: BTreeMap<String, SupplyChain>,
    pub climates: BTreeMap<Site, Arc<ClimateTrace>>,
    /// SHA-256 over the config and every data file it references
    pub config_hash: String,
}

impl Inputs {
    /// Load data for every site named in the grid.
    pub fn load(config: RunConfig, config_text: &str) -> Result<Self> {
        let sites = config.grid.locations.clone();
        Self::load_for(config, config_text, &sites)
    }

    pub fn load_for(config: RunConfig, config_text: &str, sites: &[Site]) -> Result<Self> {
        let as_config = |e: Error| if e.is_config() { e } else { Error::Config(e.to_string()) };
        let crop = CropParams::load(&config.paths.crop).map_err(as_config)?;
        let hvac = HvacConfig::load(&config.paths.hvac).map_err(as_config)?;
        let costs = CostBook::load(&config.paths.costs_dir).map_err(as_config)?;
        let supply = sustain::load_supply_dir(&config.paths.supply_dir).map_err(as_config)?;
        let model = ChamberModel {
            geometry: config.geometry.clone(),
            config: config.chamber.clone(),
            crop,
        };
        let mut climates = BTreeMap::new();
        for &site in sites {
            if climates.contains_key(&site) {
                continue;
            }
            costs.local(site.key())?;
            if !supply.contains_key(site.key()) {
                return Err(Error::Config(format!("no supply-chain file for `{site}`")));
            }
            let (location, path) = config.site(site)?;
            let series = parse_weather(&path, location).map_err(as_config)?;
            let trace = ClimateTrace::build(&series, model.config.dt, model.config.days, model.geometry.orientation, &model.config.sky)
                .map_err(as_config)?;
            climates.insert(site, trace);
        }
        let mut hasher = Sha256::new();
        hasher.update(config_text.as_bytes());
        for file in config.data_files()? {
            let bytes = std::fs::read(&file).map_err(|e| Error::io(&file, e))?;
            hasher.update(file.file_name().map(|n| n.as_encoded_bytes()).unwrap_or_default());
            hasher.update(&bytes);
        }
        let config_hash = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            config,
            model,
            hvac,
            costs,
            supply,
            climates,
            config_hash,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SustainRecord {
    /// g CO₂ per kg of lettuce
    pub vf: f64,
    pub import: f64,
    pub savings: Savings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub id: String,
    pub spec: ScenarioSpec,
    pub annual: AnnualResult,
    pub electric: ElectricResult,
    pub econ_inputs: EconInputs,
    pub econ: EconResult,
    pub sustain: SustainRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioError {
    pub id: String,
    pub spec: ScenarioSpec,
    pub kind: String,
    pub message: String,
}

/// Simulate one scenario through chamber, heat pumps, costs and emissions.
pub fn run_scenario(spec: &ScenarioSpec, inputs: &Inputs, mode: RateMode) -> Result<ScenarioRecord> {
    let model = &inputs.model;
    let climate = inputs
        .climates
        .get(&spec.site)
        .ok_or_else(|| Error::Config(format!("no weather loaded for `{}`", spec.site)))?;
    let sp = model.config.setpoints(spec.t_in as f64, spec.ppfd as f64, spec.co2 as f64);
    let annual = integrate_year(&sp, spec.insulated, climate, model)?;
    let (heat, cool) = inputs.hvac.sized_for(&annual);
    let electric = hvac::annualize(&annual, &heat, &cool)?;
    let geometry = &model.geometry;
    let econ_inputs = EconInputs {
        p_light: annual.p_light,
        p_hvacd: (heat.q_nominal + cool.q_nominal) * 1000.0,
        crop_area: geometry.crop_area,
        env_area: geometry.envelope_area(),
        insulated: spec.insulated,
        opex: OpexInputs {
            yield_kg: annual.yield_kg,
            electricity: electric.e_total,
            water: annual.water_net / 1000.0,
            co2: annual.co2_consumed,
            footprint: geometry.footprint(),
        },
    };
    let econ = econ::evaluate(&inputs.costs.global, inputs.costs.local(spec.site.key())?, &econ_inputs, mode)?;
    let chain = inputs
        .supply
        .get(spec.site.key())
        .ok_or_else(|| Error::Config(format!("no supply chain for `{}`", spec.site)))?;
    let import = sustain::import_footprint(chain)?;
    let seec = electric
        .seec
        .ok_or_else(|| Error::Domain("no harvest, so no per-kg electricity".into()))?;
    let vf = sustain::vf_footprint(seec, chain.grid_factor);
    Ok(ScenarioRecord {
        id: spec.id(),
        spec: *spec,
        annual,
        electric,
        econ_inputs,
        econ,
        sustain: SustainRecord {
            vf,
            import,
            savings: sustain::savings(vf, import)?,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config_hash: String,
    pub code_version: String,
    pub started_at: String,
    pub elapsed_s: f64,
    pub workers: usize,
}

/// What the post-processing commands need to recompute tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub rate_mode: RateMode,
    pub breakeven_co2: u32,
    pub c_el_max: f64,
    pub c_ins_max: f64,
    pub costs: CostBook,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakevenRow {
    pub location: Site,
    pub t_in: u32,
    pub co2: u32,
    /// current price, $ kWh⁻¹
    pub c_el: f64,
    /// price at which PPFD 400 ties the intermediate level
    pub c_el400: Option<f64>,
    /// price at which PPFD 100 ties the intermediate level
    pub c_el100: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsulationBreakeven {
    pub insulated_id: String,
    pub bare_id: String,
    /// $ m⁻²
    pub c_ins: f64,
    /// insulation cost at which both variants tie
    pub c_ins_breakeven: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub metadata: RunMetadata,
    pub settings: ReportSettings,
    pub records: Vec<ScenarioRecord>,
    pub errors: Vec<ScenarioError>,
    pub sensitivity: Vec<SensitivityEntry>,
    pub breakeven: Vec<BreakevenRow>,
    pub insulation_breakeven: Vec<InsulationBreakeven>,
    /// daily loads per scenario id, written to loads/<id>.csv
    #[serde(skip)]
    pub daily: BTreeMap<String, Vec<DailyLoads>>,
}

impl SweepReport {
    pub fn record(&self, id: &str) -> Option<&ScenarioRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("report.json");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Simulation { source, .. } => error_kind(source),
        Error::Parse { .. } => "parse",
        Error::Schema(_) => "schema",
        Error::Validation { .. } => "validation",
        Error::Domain(_) => "domain",
        Error::Numeric(_) => "numeric",
        Error::Range(_) => "range",
        Error::Capacity { .. } => "capacity",
        Error::Config(_) => "config",
        Error::Shape(_) => "shape",
        Error::Type(_) => "type",
        Error::Lookup(_) => "lookup",
        Error::Io { .. } => "io",
    }
}

/// Run every scenario on a pool of `workers` threads.
pub fn run_sweep(grid: &[ScenarioSpec], inputs: &Inputs, workers: usize, mode: RateMode) -> Result<SweepReport> {
    let started = Instant::now();
    let started_at = chrono::DateTime::<chrono::Utc>::from(std::time::SystemTime::now()).to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<ScenarioRecord>> = pool.install(|| grid.par_iter().map(|s| run_scenario(s, inputs, mode)).collect());

    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut daily = BTreeMap::new();
    for (spec, outcome) in grid.iter().zip(outcomes) {
        match outcome {
            Ok(mut r) => {
                daily.insert(r.id.clone(), std::mem::take(&mut r.annual.daily));
                records.push(r);
            }
            Err(e) => errors.push(ScenarioError {
                id: spec.id(),
                spec: *spec,
                kind: error_kind(&e).to_string(),
                message: e.to_string(),
            }),
        }
    }
    let settings = ReportSettings {
        rate_mode: mode,
        breakeven_co2: inputs.config.econ.breakeven_co2,
        c_el_max: inputs.config.econ.c_el_max,
        c_ins_max: inputs.config.econ.c_ins_max,
        costs: inputs.costs.clone(),
    };
    let sensitivity = sensitivity(&records)?;
    let breakeven = breakeven_table(&records, &settings)?;
    let insulation_breakeven = insulation_breakeven(&records, &settings)?;
    Ok(SweepReport {
        metadata: RunMetadata {
            config_hash: inputs.config_hash.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at,
            elapsed_s: started.elapsed().as_secs_f64(),
            workers: workers.max(1),
        },
        settings,
        records,
        errors,
        sensitivity,
        breakeven,
        insulation_breakeven,
        daily,
    })
}

pub const SENSITIVITY_INPUTS: [&str; 5] = ["climate", "insulation", "ppfd", "t_in", "co2"];
pub const SENSITIVITY_OUTCOMES: [&str; 10] = [
    "crop_production",
    "thermal_energy",
    "total_energy",
    "sec",
    "seec",
    "water",
    "capex",
    "opex",
    "lcol",
    "co2_savings",
];

pub fn observation_matrix(records: &[ScenarioRecord]) -> Result<ObservationMatrix> {
    let mut m = ObservationMatrix::new(records.len());
    let num = |f: &dyn Fn(&ScenarioRecord) -> f64| Column::Numeric(records.iter().map(f).collect());
    m.insert("climate", Column::Categorical(records.iter().map(|r| r.spec.site.key().to_string()).collect()))?;
    m.insert(
        "insulation",
        Column::Categorical(records.iter().map(|r| if r.spec.insulated { "I" } else { "O" }.to_string()).collect()),
    )?;
    m.insert("ppfd", num(&|r| r.spec.ppfd as f64))?;
    m.insert("t_in", num(&|r| r.spec.t_in as f64))?;
    m.insert("co2", num(&|r| r.spec.co2 as f64))?;
    m.insert("crop_production", num(&|r| r.annual.yield_kg))?;
    m.insert("thermal_energy", num(&|r| r.annual.thermal_total()))?;
    m.insert("total_energy", num(&|r| r.annual.total_energy()))?;
    m.insert("sec", num(&|r| r.annual.sec.unwrap_or(f64::NAN)))?;
    m.insert("seec", num(&|r| r.electric.seec.unwrap_or(f64::NAN)))?;
    m.insert("water", num(&|r| r.annual.water_net))?;
    m.insert("capex", num(&|r| r.econ.capex.total))?;
    m.insert("opex", num(&|r| r.econ.opex.total))?;
    m.insert("lcol", num(&|r| r.econ.lcol))?;
    m.insert("co2_savings", num(&|r| r.sustain.savings.abs))?;
    Ok(m)
}

/// Cross table of scenario inputs against outcomes; empty below two records.
pub fn sensitivity(records: &[ScenarioRecord]) -> Result<Vec<SensitivityEntry>> {
    if records.len() < 2 {
        return Ok(Vec::new());
    }
    stats::sensitivity_report(&observation_matrix(records)?, &SENSITIVITY_INPUTS, &SENSITIVITY_OUTCOMES)
}

fn find<'a>(records: &'a [ScenarioRecord], spec: &ScenarioSpec) -> Option<&'a ScenarioRecord> {
    records.iter().find(|r| r.spec == *spec)
}

/// Electricity prices at which the high and low PPFD levels tie the
/// intermediate one, for every insulated (location, t_in) pair present.
pub fn breakeven_table(records: &[ScenarioRecord], settings: &ReportSettings) -> Result<Vec<BreakevenRow>> {
    let mut levels: Vec<u32> = records.iter().map(|r| r.spec.ppfd).collect();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() < 3 {
        return Ok(Vec::new());
    }
    let (low, mid, high) = (levels[0], levels[levels.len() / 2], levels[levels.len() - 1]);
    let mut keys: Vec<(Site, u32)> = records
        .iter()
        .filter(|r| r.spec.insulated && r.spec.co2 == settings.breakeven_co2)
        .map(|r| (r.spec.site, r.spec.t_in))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let mut rows = Vec::new();
    for (site, t_in) in keys {
        let at = |ppfd| {
            find(records, &ScenarioSpec { site, insulated: true, ppfd, t_in, co2: settings.breakeven_co2 })
        };
        let (Some(lo), Some(md), Some(hi)) = (at(low), at(mid), at(high)) else { continue };
        let local = settings.costs.local(site.key())?;
        let g = &settings.costs.global;
        let solve = |other: &ScenarioRecord| {
            econ::breakeven_electricity(g, local, &other.econ_inputs, &md.econ_inputs, settings.rate_mode, settings.c_el_max)
        };
        rows.push(BreakevenRow {
            location: site,
            t_in,
            co2: settings.breakeven_co2,
            c_el: local.c_el,
            c_el400: solve(hi)?,
            c_el100: solve(lo)?,
        });
    }
    Ok(rows)
}

/// For each location, the insulation price at which the lowest-LCoL
/// insulated scenario ties its uninsulated twin.
pub fn insulation_breakeven(records: &[ScenarioRecord], settings: &ReportSettings) -> Result<Vec<InsulationBreakeven>> {
    let mut out = Vec::new();
    for site in Site::ALL {
        let best = records
            .iter()
            .filter(|r| r.spec.site == site && r.spec.insulated)
            .min_by(|a, b| a.econ.lcol.total_cmp(&b.econ.lcol));
        let Some(best) = best else { continue };
        let Some(bare) = find(records, &ScenarioSpec { insulated: false, ..best.spec }) else { continue };
        let local = settings.costs.local(site.key())?;
        let g = &settings.costs.global;
        out.push(InsulationBreakeven {
            insulated_id: best.id.clone(),
            bare_id: bare.id.clone(),
            c_ins: g.c_ins,
            c_ins_breakeven: econ::breakeven_insulation(g, local, &best.econ_inputs, &bare.econ_inputs, settings.rate_mode, settings.c_ins_max)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    id: &'a str,
    location: Site,
    insulated: bool,
    ppfd: u32,
    t_in: u32,
    co2: u32,
    heating_kwh: f64,
    cooling_kwh: f64,
    dehum_kwh: f64,
    postheat_kwh: f64,
    thermal_kwh: f64,
    lighting_kwh: f64,
    total_energy_kwh: f64,
    yield_kg: f64,
    productivity_kg_m2: f64,
    cycles: u32,
    mean_cycle_days: Option<f64>,
    water_net_l: f64,
    co2_kg: f64,
    sec_kwh_kg: Option<f64>,
    wue_g_l: Option<f64>,
    e_heating_kwh: f64,
    e_cooling_kwh: f64,
    e_total_kwh: f64,
    seec_kwh_kg: Option<f64>,
    cop_heat: Option<f64>,
    cop_cool: Option<f64>,
    q_nominal_heat_kw: f64,
    q_nominal_cool_kw: f64,
    capex: f64,
    opex: f64,
    c_rep: f64,
    lcol: f64,
    vf_g_kg: f64,
    import_g_kg: f64,
    savings_g_kg: f64,
    savings_rel: f64,
}

fn summary_row<'a>(r: &'a ScenarioRecord, crop_area: f64) -> SummaryRow<'a> {
    let a = &r.annual;
    let mean_cycle = (!a.cycle_days.is_empty()).then(|| a.cycle_days.iter().sum::<f64>() / a.cycle_days.len() as f64);
    SummaryRow {
        id: &r.id,
        location: r.spec.site,
        insulated: r.spec.insulated,
        ppfd: r.spec.ppfd,
        t_in: r.spec.t_in,
        co2: r.spec.co2,
        heating_kwh: a.heating,
        cooling_kwh: a.cooling,
        dehum_kwh: a.dehum,
        postheat_kwh: a.postheat,
        thermal_kwh: a.thermal_total(),
        lighting_kwh: a.lighting_electric,
        total_energy_kwh: a.total_energy(),
        yield_kg: a.yield_kg,
        productivity_kg_m2: a.yield_kg / crop_area,
        cycles: a.cycles,
        mean_cycle_days: mean_cycle,
        water_net_l: a.water_net,
        co2_kg: a.co2_consumed,
        sec_kwh_kg: a.sec,
        wue_g_l: a.wue,
        e_heating_kwh: r.electric.e_heating,
        e_cooling_kwh: r.electric.e_cooling,
        e_total_kwh: r.electric.e_total,
        seec_kwh_kg: r.electric.seec,
        cop_heat: r.electric.seasonal_cop_heat,
        cop_cool: r.electric.seasonal_cop_cool,
        q_nominal_heat_kw: r.electric.q_nominal_heat,
        q_nominal_cool_kw: r.electric.q_nominal_cool,
        capex: r.econ.capex.total,
        opex: r.econ.opex.total,
        c_rep: r.econ.c_rep,
        lcol: r.econ.lcol,
        vf_g_kg: r.sustain.vf,
        import_g_kg: r.sustain.import,
        savings_g_kg: r.sustain.savings.abs,
        savings_rel: r.sustain.savings.rel,
    }
}

const SUMMARY_HEADER: [&str; 37] = [
    "id",
    "location",
    "insulated",
    "ppfd",
    "t_in",
    "co2",
    "heating_kwh",
    "cooling_kwh",
    "dehum_kwh",
    "postheat_kwh",
    "thermal_kwh",
    "lighting_kwh",
    "total_energy_kwh",
    "yield_kg",
    "productivity_kg_m2",
    "cycles",
    "mean_cycle_days",
    "water_net_l",
    "co2_kg",
    "sec_kwh_kg",
    "wue_g_l",
    "e_heating_kwh",
    "e_cooling_kwh",
    "e_total_kwh",
    "seec_kwh_kg",
    "cop_heat",
    "cop_cool",
    "q_nominal_heat_kw",
    "q_nominal_cool_kw",
    "capex",
    "opex",
    "c_rep",
    "lcol",
    "vf_g_kg",
    "import_g_kg",
    "savings_g_kg",
    "savings_rel",
];

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::io(path, std::io::Error::other(e))
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_sensitivity(path: &Path, table: &[SensitivityEntry]) -> Result<()> {
    write_rows(path, &["input", "outcome", "rho"], table.iter().map(|e| (&e.input, &e.outcome, e.rho)))
}

pub fn write_breakeven(path: &Path, rows: &[BreakevenRow]) -> Result<()> {
    write_rows(path, &["location", "t_in", "co2", "c_el", "c_el400", "c_el100"], rows.iter().map(|r| (r.location, r.t_in, r.co2, r.c_el, r.c_el400, r.c_el100)))
}

/// Write all report files into `out_dir`, returning the paths written.
pub fn emit_reports(report: &SweepReport, out_dir: &Path, crop_area: f64) -> Result<Vec<PathBuf>> {
    let loads_dir = out_dir.join("loads");
    std::fs::create_dir_all(&loads_dir).map_err(|e| Error::io(&loads_dir, e))?;
    let mut written = Vec::new();

    let summary = out_dir.join("summary.csv");
    write_rows(&summary, &SUMMARY_HEADER, report.records.iter().map(|r| summary_row(r, crop_area)))?;
    written.push(summary);

    let sens = out_dir.join("sensitivity.csv");
    write_sensitivity(&sens, &report.sensitivity)?;
    written.push(sens);

    let be = out_dir.join("breakeven.csv");
    write_breakeven(&be, &report.breakeven)?;
    written.push(be);

    for (id, days) in &report.daily {
        let path = loads_dir.join(format!("{id}.csv"));
        write_rows(&path, &["day", "q_heat_kwh", "q_cool_kwh", "q_dehum_kwh", "q_postheat_kwh"], days.iter().map(|d| (d.day, d.q_heat, d.q_cool, d.q_dehum, d.q_postheat)))?;
        written.push(path);
    }

    let json = out_dir.join("report.json");
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::io(&json, std::io::Error::other(e)))?;
    std::fs::write(&json, text).map_err(|e| Error::io(&json, e))?;
    written.push(json);
    Ok(written)
}
