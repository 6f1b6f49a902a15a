//! Parameter sweeps and CSV output.
//!
//! A sweep is described by a TOML file:
//!
//! ```toml
//! mode = "osa"              # "osa" (transmit-power) or "ss" (interference-power)
//! axis = "p_av_db"          # "p_av_db", "q_av_db" or "num_users"
//! range = [0.0, 20.0, 2.0]  # start, stop (inclusive), step
//! num_users = [1, 5, 15]    # ignored when axis = "num_users"
//! m = [1.0]
//! p_av_db = 20.0            # fixed value when it is not the axis
//! q_av_db = 0.0
//! ber_target = 1e-3
//! constellation = [0, 4, 8, 16, 64]
//! output = "fig1.csv"
//!
//! [mc]
//! validate = false
//! samples = 1000000
//! seed = 1
//! ```
//!
//! dB values become linear factors 10^(dB/10). In `osa` mode P_av sets the
//! mean SNR of the direct link and the transmit budget is 1. In `ss` mode
//! P_av sets the scale of the gain-ratio SNR and the interference budget is
//! Q̄/P̄.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::db_to_linear;
use crate::error::{Error, Result};
use crate::fading::{FadingSpec, SnrDistribution};
use crate::metrics;
use crate::mud::MudDistribution;
use crate::oracle::{self, McConfig, McEstimate};
use crate::power::{self, ConstellationSet, ConstraintSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Osa,
    Ss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    PAvDb,
    QAvDb,
    NumUsers,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default)]
    pub validate: bool,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            validate: false,
            samples: default_samples(),
            seed: default_seed(),
        }
    }
}

fn default_samples() -> u64 {
    1_000_000
}
fn default_seed() -> u64 {
    1
}
fn default_m() -> Vec<f64> {
    vec![1.0]
}
fn default_ber() -> f64 {
    1e-3
}
fn default_constellation() -> Vec<u32> {
    vec![0, 4, 8, 16, 64]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: Mode,
    pub axis: Axis,
    pub range: [f64; 3],
    #[serde(default)]
    pub num_users: Vec<u32>,
    #[serde(default = "default_m")]
    pub m: Vec<f64>,
    #[serde(default)]
    pub p_av_db: f64,
    #[serde(default)]
    pub q_av_db: f64,
    #[serde(default = "default_ber")]
    pub ber_target: f64,
    #[serde(default = "default_constellation")]
    pub constellation: Vec<u32>,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    /// Parses TOML text, then applies `key=value` overrides. Dotted keys
    /// reach into tables (`mc.samples=1000`); values are read as TOML and
    /// fall back to plain strings.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg: SweepConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, overrides).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let [start, stop, step] = self.range;
        if !(start.is_finite() && stop.is_finite() && step > 0.0 && stop >= start) {
            return Err(Error::Config(format!(
                "range must be [start, stop, step] with step > 0 and stop >= start, got {:?}",
                self.range
            )));
        }
        if self.mode == Mode::Osa && self.axis == Axis::QAvDb {
            return Err(Error::Config(
                "q_av_db has no effect under the transmit-power constraint (mode = \"osa\")".into(),
            ));
        }
        if self.axis == Axis::NumUsers {
            if start < 1.0 || start.fract() != 0.0 || step.fract() != 0.0 {
                return Err(Error::Config(
                    "a num_users axis needs integer start >= 1 and integer step".into(),
                ));
            }
        } else if self.num_users.is_empty() || self.num_users.contains(&0) {
            return Err(Error::Config(
                "num_users must list at least one count, all >= 1".into(),
            ));
        }
        if self.m.is_empty() || self.m.iter().any(|&m| !(m >= 0.5) || !m.is_finite()) {
            return Err(Error::Config(format!(
                "m must list shape factors >= 0.5, got {:?}",
                self.m
            )));
        }
        if !(self.ber_target > 0.0 && self.ber_target < 0.04) {
            return Err(Error::Config(format!(
                "ber_target must lie in (0, 0.04), got {}",
                self.ber_target
            )));
        }
        ConstellationSet::new(self.constellation.clone(), self.ber_target)
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.mc.validate && self.mc.samples == 0 {
            return Err(Error::Config("mc.samples must be >= 1".into()));
        }
        Ok(())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        let [start, stop, step] = self.range;
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| start + i as f64 * step).collect()
    }

    /// Grid points in output order: axis, then users, then m.
    pub fn grid(&self) -> Vec<PointSpec> {
        let mut points = Vec::new();
        for axis in self.axis_values() {
            let users: Vec<u32> = match self.axis {
                Axis::NumUsers => vec![axis as u32],
                _ => self.num_users.clone(),
            };
            for &ns in &users {
                for &m in &self.m {
                    let mut p = PointSpec {
                        mode: self.mode,
                        p_av_db: self.p_av_db,
                        q_av_db: self.q_av_db,
                        users: ns,
                        m,
                        ber_target: self.ber_target,
                        constellation: self.constellation.clone(),
                    };
                    match self.axis {
                        Axis::PAvDb => p.p_av_db = axis,
                        Axis::QAvDb => p.q_av_db = axis,
                        Axis::NumUsers => {}
                    }
                    points.push(p);
                }
            }
        }
        points
    }
}

fn apply_override(table: &mut toml::Table, ov: &str) -> Result<()> {
    let (key, raw) = ov
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {ov:?} is not key=value")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.trim().split('.').collect();
    let last = parts.pop().unwrap_or_default();
    let mut cur = table;
    for part in parts {
        cur = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {key:?}: {part} is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// One evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpec {
    pub mode: Mode,
    pub p_av_db: f64,
    pub q_av_db: f64,
    pub users: u32,
    pub m: f64,
    pub ber_target: f64,
    pub constellation: Vec<u32>,
}

impl PointSpec {
    pub fn distribution(&self) -> Result<MudDistribution> {
        let spec = FadingSpec::from_shape(self.m, db_to_linear(self.p_av_db))?;
        let base = match self.mode {
            Mode::Osa => SnrDistribution::direct(spec),
            Mode::Ss => SnrDistribution::ratio(spec),
        };
        MudDistribution::new(base, self.users)
    }

    pub fn constraint(&self) -> Result<ConstraintSpec> {
        match self.mode {
            Mode::Osa => Ok(ConstraintSpec::transmit()),
            Mode::Ss => ConstraintSpec::interference(db_to_linear(self.q_av_db - self.p_av_db)),
        }
    }

    pub fn constellation_set(&self) -> Result<ConstellationSet> {
        ConstellationSet::new(self.constellation.clone(), self.ber_target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMetrics {
    pub capacity: f64,
    pub se_cr: f64,
    pub se_dr: f64,
    pub gamma0_cap: f64,
    pub gamma0_cr: f64,
    pub gamma_star_dr: f64,
    pub dr_saturated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McColumns {
    pub capacity: McEstimate,
    pub se_cr: McEstimate,
    pub se_dr: McEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: f64,
    pub ns: u32,
    pub m: f64,
    pub metrics: std::result::Result<PointMetrics, String>,
    pub mc: Option<McColumns>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub mc_enabled: bool,
}

/// Solves all three policies and evaluates the metrics at one point.
pub fn evaluate_point(p: &PointSpec) -> Result<PointMetrics> {
    let dist = p.distribution()?;
    let c = p.constraint()?;
    let set = p.constellation_set()?;
    let k = set.k();
    let cap_cut = power::solve_cutoff(&dist, &c)?;
    let cr_cut = power::solve_cutoff_cr(&dist, &c, k)?;
    let dr = power::solve_dr_policy(&dist, &c, &set)?;
    Ok(PointMetrics {
        capacity: metrics::capacity(&dist, &cap_cut)?.value,
        se_cr: metrics::spectral_efficiency_cr(&dist, &cr_cut, k)?.value,
        se_dr: metrics::spectral_efficiency_dr(&dist, &dr, &set)?.value,
        gamma0_cap: cap_cut.gamma0,
        gamma0_cr: cr_cut.gamma0,
        gamma_star_dr: dr.gamma_star,
        dr_saturated: dr.saturated,
    })
}

fn monte_carlo_point(p: &PointSpec, pm: &PointMetrics, cfg: &McConfig) -> Result<McColumns> {
    let dist = p.distribution()?;
    let set = p.constellation_set()?;
    let cap = power::CutoffSolution {
        gamma0: pm.gamma0_cap,
        residual: 0.0,
        iterations: 0,
    };
    let cr = power::CutoffSolution {
        gamma0: pm.gamma0_cr,
        ..cap
    };
    let dr = power::DrPolicy {
        gamma_star: pm.gamma_star_dr,
        boundaries: Vec::new(),
        region_probs: Vec::new(),
        outage_prob: 0.0,
        average_power: 0.0,
        residual: 0.0,
        saturated: pm.dr_saturated,
    };
    // Three independent seeds so the metric estimates are not correlated.
    let sub = |i: u64| McConfig {
        seed: splitmix64(cfg.seed ^ i),
        ..*cfg
    };
    Ok(McColumns {
        capacity: oracle::mc_capacity(&dist, &cap, &sub(1)),
        se_cr: oracle::mc_se_cr(&dist, &cr, set.k(), &sub(2)),
        se_dr: oracle::mc_se_dr(&dist, &dr, &set, &sub(3)),
    })
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Evaluates every grid point. Point failures land in the row; only an
/// invalid configuration fails the whole sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let grid = cfg.grid();
    let axis_of = |p: &PointSpec| match cfg.axis {
        Axis::PAvDb => p.p_av_db,
        Axis::QAvDb => p.q_av_db,
        Axis::NumUsers => p.users as f64,
    };
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let metrics = evaluate_point(p).map_err(|e| e.to_string());
            let mc = match (&metrics, cfg.mc.validate) {
                (Ok(pm), true) => {
                    let mc_cfg = McConfig::new(
                        cfg.mc.samples,
                        splitmix64(cfg.mc.seed.wrapping_add(i as u64)),
                    );
                    monte_carlo_point(p, pm, &mc_cfg).ok()
                }
                _ => None,
            };
            SweepRow {
                axis: axis_of(p),
                ns: p.users,
                m: p.m,
                metrics,
                mc,
            }
        })
        .collect();
    Ok(SweepResult {
        rows,
        mc_enabled: cfg.mc.validate,
    })
}

pub const CSV_HEADER: [&str; 9] = [
    "axis",
    "ns",
    "m",
    "capacity",
    "se_cr",
    "se_dr",
    "gamma0_cap",
    "gamma0_cr",
    "gamma_star_dr",
];

pub const CSV_MC_HEADER: [&str; 6] = [
    "mc_capacity",
    "mc_capacity_stderr",
    "mc_se_cr",
    "mc_se_cr_stderr",
    "mc_se_dr",
    "mc_se_dr_stderr",
];

/// Formats like C's `%.9g`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the sweep as CSV: fixed header, one row per grid point, LF line
/// endings. A trailing `error` column carries per-point failures.
pub fn write_csv<W: Write>(res: &SweepResult, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if res.mc_enabled {
        header.extend(CSV_MC_HEADER);
    }
    header.push("error");
    w.write_record(&header)?;
    for row in &res.rows {
        let mut rec = vec![
            format_sig9(row.axis),
            row.ns.to_string(),
            format_sig9(row.m),
        ];
        let blank =
            |n: usize, rec: &mut Vec<String>| rec.extend(std::iter::repeat_n(String::new(), n));
        match &row.metrics {
            Ok(pm) => rec.extend(
                [
                    pm.capacity,
                    pm.se_cr,
                    pm.se_dr,
                    pm.gamma0_cap,
                    pm.gamma0_cr,
                    pm.gamma_star_dr,
                ]
                .map(format_sig9),
            ),
            Err(_) => blank(6, &mut rec),
        }
        if res.mc_enabled {
            match &row.mc {
                Some(mc) => {
                    for e in [mc.capacity, mc.se_cr, mc.se_dr] {
                        rec.push(format_sig9(e.mean));
                        rec.push(format_sig9(e.stderr));
                    }
                }
                None => blank(6, &mut rec),
            }
        }
        rec.push(row.metrics.as_ref().err().cloned().unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(res: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(res, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}
