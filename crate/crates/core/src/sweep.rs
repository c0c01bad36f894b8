//! Parameter sweeps over the channel catalog, emitted as CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::channels::{self, ChannelError, DephasingRabiParams, DickeParams};
use crate::cohinfo::{coherent_information, CohError};
use crate::numkit::c;
use crate::qstate::DensityMatrix;
use crate::superop::Superoperator;

pub const DEFAULT_STEPS: usize = 64;
pub const MAX_AXES: usize = 2;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn usage(msg: impl Into<String>) -> SweepError {
    SweepError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Dephasing,
    Hydrogen,
    CoupledTlas,
    Measurement,
    Duplication,
    AtomField,
    TwoAtoms,
}

/// A scenario parameter: its flag name, fixed default and default sweep range.
#[derive(Debug, Clone, Copy)]
pub struct ParamDef {
    pub name: &'static str,
    pub help: &'static str,
    pub default: f64,
    pub axis: Option<(f64, f64)>,
}

const fn fixed(name: &'static str, help: &'static str, default: f64) -> ParamDef {
    ParamDef {
        name,
        help,
        default,
        axis: None,
    }
}

const fn swept(name: &'static str, help: &'static str, lo: f64, hi: f64) -> ParamDef {
    ParamDef {
        name,
        help,
        default: lo,
        axis: Some((lo, hi)),
    }
}

const PI: f64 = std::f64::consts::PI;

const RHO12: ParamDef = fixed("rho12", "input coherence <0|rho|1> (real)", 0.0);

static DEPHASING: &[ParamDef] = &[
    fixed("gamma", "pure dephasing rate", 1.0),
    swept("omega", "Rabi frequency", 0.0, 4.0),
    swept("t", "time", 0.0, 1.5),
];
static HYDROGEN: &[ParamDef] = &[swept("x", "sin(omega_s t)", -1.0, 1.0)];
static COUPLED: &[ParamDef] = &[
    swept("theta", "coupling precession angle", 0.0, PI),
    swept(
        "rho11",
        "ground population of atom 2's pure state",
        0.0,
        1.0,
    ),
];
static ROTATED: &[ParamDef] = &[
    swept("theta", "basis rotation angle", 0.0, PI),
    swept("rho11", "input ground population", 0.0, 1.0),
    RHO12,
];
static ATOM_FIELD: &[ParamDef] = &[
    swept("gamma-t", "dimensionless time gamma t", 0.0, 5.0),
    swept("rho22", "input excited population", 0.0, 1.0),
    RHO12,
];
static TWO_ATOMS: &[ParamDef] = &[
    swept("phi", "dimensionless distance k0 R", 0.3, 3.0),
    swept("gamma-t", "dimensionless time gamma t", 0.0, 4.0),
    fixed("rho22", "input excited population", 0.5),
    RHO12,
    fixed(
        "shift",
        "1 for the physical dipole shift, 0 to switch it off",
        1.0,
    ),
];

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Dephasing,
        Scenario::Hydrogen,
        Scenario::CoupledTlas,
        Scenario::Measurement,
        Scenario::Duplication,
        Scenario::AtomField,
        Scenario::TwoAtoms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Dephasing => "dephasing",
            Scenario::Hydrogen => "hydrogen",
            Scenario::CoupledTlas => "coupled-tlas",
            Scenario::Measurement => "measurement",
            Scenario::Duplication => "duplication",
            Scenario::AtomField => "atom-field",
            Scenario::TwoAtoms => "two-atoms",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|sc| sc.name() == s)
    }

    pub fn about(self) -> &'static str {
        match self {
            Scenario::Dephasing => "Driven two-level atom with pure dephasing, input I/2",
            Scenario::Hydrogen => "Stark-coupled hydrogen 2s -> 2p channel, input I/2",
            Scenario::CoupledTlas => "Exchange-coupled atoms, atom 2 in a pure state, input I/2",
            Scenario::Measurement => "Full von Neumann measurement in a rotated basis",
            Scenario::Duplication => "Coherent duplication in a rotated basis",
            Scenario::AtomField => "Atom decaying into the vacuum field",
            Scenario::TwoAtoms => "Atom 1 to atom 2 through the shared vacuum field",
        }
    }

    pub fn params(self) -> &'static [ParamDef] {
        match self {
            Scenario::Dephasing => DEPHASING,
            Scenario::Hydrogen => HYDROGEN,
            Scenario::CoupledTlas => COUPLED,
            Scenario::Measurement | Scenario::Duplication => ROTATED,
            Scenario::AtomField => ATOM_FIELD,
            Scenario::TwoAtoms => TWO_ATOMS,
        }
    }

    pub fn param(self, name: &str) -> Option<&'static ParamDef> {
        self.params().iter().find(|p| p.name == name)
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Scenario::TwoAtoms => &["s_in", "s_out", "s_e", "i_c", "raw_ic", "n2"],
            _ => &["s_in", "s_out", "s_e", "i_c", "raw_ic"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64
        }
    }

    /// Parses `name=min:max` or `name=min:max:count`.
    pub fn parse(text: &str, steps: usize) -> Result<Axis, SweepError> {
        let bad = || usage(format!("axis `{text}` is not name=min:max[:count]"));
        let (name, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(bad());
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        let count = match parts.get(2) {
            Some(s) => s.trim().parse::<usize>().map_err(|_| bad())?,
            None => steps,
        };
        Ok(Axis {
            name: name.trim().to_string(),
            min: num(parts[0])?,
            max: num(parts[1])?,
            count,
        })
    }
}

/// One fully resolved sweep: scenario, up to two axes and fixed values for
/// every other parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
}

/// User choices before defaults are applied.
#[derive(Debug, Clone, Default)]
pub struct SweepRequest {
    pub scenario: Option<String>,
    pub fixed: BTreeMap<String, f64>,
    pub axes: Vec<String>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
}

impl SweepRequest {
    /// Reads `key = value` lines. Keys: `scenario`, `steps`, `out`, `axis`
    /// (repeatable, `name=min:max[:count]`); any other key fixes a parameter.
    pub fn parse_spec(text: &str) -> Result<SweepRequest, SweepError> {
        let mut req = SweepRequest::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| usage(format!("spec line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "scenario" => req.scenario = Some(value.to_string()),
                "steps" => {
                    req.steps = Some(value.parse().map_err(|_| bad("steps must be an integer"))?)
                }
                "out" => req.out = Some(PathBuf::from(value)),
                "axis" => req.axes.push(value.to_string()),
                _ => {
                    let v = value.parse().map_err(|_| bad("value must be a number"))?;
                    req.fixed.insert(key.to_string(), v);
                }
            }
        }
        Ok(req)
    }

    /// Overlays `other` on `self`; values in `other` win.
    pub fn merge(mut self, other: SweepRequest) -> SweepRequest {
        if other.scenario.is_some() {
            self.scenario = other.scenario;
        }
        if other.steps.is_some() {
            self.steps = other.steps;
        }
        if other.out.is_some() {
            self.out = other.out;
        }
        for (k, v) in other.fixed {
            self.axes
                .retain(|a| a.split('=').next().map(str::trim) != Some(k.as_str()));
            self.fixed.insert(k, v);
        }
        for a in other.axes {
            let name = a.split('=').next().unwrap_or("").trim().to_string();
            self.fixed.remove(&name);
            self.axes
                .retain(|b| b.split('=').next().map(str::trim) != Some(name.as_str()));
            self.axes.push(a);
        }
        self
    }

    pub fn resolve(self) -> Result<SweepSpec, SweepError> {
        let name = self.scenario.ok_or_else(|| usage("no scenario given"))?;
        let scenario = Scenario::from_name(&name)
            .ok_or_else(|| usage(format!("unknown scenario `{name}`")))?;
        let steps = self.steps.unwrap_or(DEFAULT_STEPS);
        for key in self.fixed.keys() {
            if scenario.param(key).is_none() {
                return Err(usage(format!("scenario {name} has no parameter `{key}`")));
            }
        }
        let mut explicit = Vec::new();
        for text in &self.axes {
            let axis = Axis::parse(text, steps)?;
            if scenario.param(&axis.name).is_none() {
                return Err(usage(format!(
                    "scenario {name} has no parameter `{}`",
                    axis.name
                )));
            }
            if explicit.iter().any(|a: &Axis| a.name == axis.name) {
                return Err(usage(format!("axis `{}` given twice", axis.name)));
            }
            explicit.push(axis);
        }
        let mut axes = Vec::new();
        let mut fixed = BTreeMap::new();
        for p in scenario.params() {
            if let Some(a) = explicit.iter().find(|a| a.name == p.name) {
                axes.push(a.clone());
            } else if let Some(&v) = self.fixed.get(p.name) {
                fixed.insert(p.name.to_string(), v);
            } else if let Some((lo, hi)) = p.axis {
                axes.push(Axis {
                    name: p.name.to_string(),
                    min: lo,
                    max: hi,
                    count: steps,
                });
            } else {
                fixed.insert(p.name.to_string(), p.default);
            }
        }
        let spec = SweepSpec {
            scenario,
            axes,
            fixed,
            out: self.out,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.axes.len() > MAX_AXES {
            let names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
            return Err(usage(format!(
                "at most {MAX_AXES} axes allowed, got {} ({}); fix the others with flags",
                names.len(),
                names.join(", ")
            )));
        }
        for a in &self.axes {
            if a.count < 2 {
                return Err(usage(format!("axis {} needs at least 2 points", a.name)));
            }
            if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
                return Err(usage(format!("axis {} needs finite min < max", a.name)));
            }
        }
        if let Some(v) = self.fixed.values().find(|v| !v.is_finite()) {
            return Err(usage(format!("parameter value {v} is not finite")));
        }
        Ok(())
    }

    /// Grid points in row-major order (first axis slowest).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let total: usize = self.axes.iter().map(|a| a.count).product();
        (0..total)
            .map(|mut flat| {
                let mut coords = vec![0.0; self.axes.len()];
                for (d, a) in self.axes.iter().enumerate().rev() {
                    coords[d] = a.value(flat % a.count);
                    flat /= a.count;
                }
                coords
            })
            .collect()
    }

    fn params_at(&self, coords: &[f64]) -> Params {
        let mut map = self.fixed.clone();
        for (a, &v) in self.axes.iter().zip(coords) {
            map.insert(a.name.clone(), v);
        }
        Params(map)
    }
}

struct Params(BTreeMap<String, f64>);

impl Params {
    fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

fn domain_err(e: impl std::fmt::Display) -> SweepError {
    SweepError::Domain(e.to_string())
}

impl From<ChannelError> for SweepError {
    fn from(e: ChannelError) -> Self {
        domain_err(e)
    }
}

impl From<CohError> for SweepError {
    fn from(e: CohError) -> Self {
        domain_err(e)
    }
}

fn qubit_input(rho11: f64, rho12: f64) -> Result<DensityMatrix, SweepError> {
    if !(0.0..=1.0).contains(&rho11) {
        return Err(domain_err(format!(
            "input population {rho11} outside [0, 1]"
        )));
    }
    DensityMatrix::qubit(rho11, c(rho12, 0.0)).map_err(domain_err)
}

fn rotated_basis(theta: f64) -> Vec<Vec<Complex64>> {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![vec![c(cs, 0.0), c(sn, 0.0)], vec![c(-sn, 0.0), c(cs, 0.0)]]
}

/// Channel, input state and extra columns for one grid point.
fn build(sc: Scenario, p: &Params) -> Result<(Superoperator, DensityMatrix, Vec<f64>), SweepError> {
    let mixed = DensityMatrix::maximally_mixed(2);
    Ok(match sc {
        Scenario::Dephasing => {
            let params = DephasingRabiParams {
                gamma: p.get("gamma"),
                omega: p.get("omega"),
                t: p.get("t"),
            };
            (channels::dephasing_rabi(params)?, mixed, vec![])
        }
        Scenario::Hydrogen => (channels::hydrogen_stark(p.get("x"))?, mixed, vec![]),
        Scenario::CoupledTlas => {
            let rho2 = channels::pure_qubit(p.get("rho11"))?;
            let u = channels::exchange_unitary(p.get("theta"));
            (channels::coupled_tlas(&u, &rho2)?, mixed, vec![])
        }
        Scenario::Measurement => {
            let s = channels::direct_measurement(&rotated_basis(p.get("theta")))?;
            (s, qubit_input(p.get("rho11"), p.get("rho12"))?, vec![])
        }
        Scenario::Duplication => {
            let s = channels::duplication(&rotated_basis(p.get("theta")), 2)?;
            (s, qubit_input(p.get("rho11"), p.get("rho12"))?, vec![])
        }
        Scenario::AtomField => {
            let rho = qubit_input(1.0 - p.get("rho22"), p.get("rho12"))?;
            (channels::atom_field(p.get("gamma-t"))?, rho, vec![])
        }
        Scenario::TwoAtoms => {
            let dp = match p.get("shift") {
                1.0 => DickeParams::new(p.get("phi"), p.get("gamma-t")),
                0.0 => DickeParams::without_shift(p.get("phi"), p.get("gamma-t")),
                s => return Err(domain_err(format!("shift must be 0 or 1, got {s}"))),
            };
            let rho = qubit_input(1.0 - p.get("rho22"), p.get("rho12"))?;
            let n2 = channels::two_atom_population(&dp)?;
            (channels::two_atom_channel(&dp)?, rho, vec![n2])
        }
    })
}

/// Output columns for one grid point, in [`Scenario::columns`] order.
pub fn evaluate_point(
    sc: Scenario,
    spec: &SweepSpec,
    coords: &[f64],
) -> Result<Vec<f64>, SweepError> {
    let p = spec.params_at(coords);
    let (s, rho, extra) = build(sc, &p)?;
    let r = coherent_information(&s, &rho)?;
    let mut row = vec![r.s_in, r.s_out, r.s_e, r.i_c, r.raw_ic];
    row.extend(extra);
    Ok(row)
}

/// Runs the sweep and returns the CSV text. `threads = None` uses the global pool.
pub fn run_scenario(spec: &SweepSpec, threads: Option<usize>) -> Result<String, SweepError> {
    spec.validate()?;
    let points = spec.points();
    let eval = || -> Vec<Result<Vec<f64>, SweepError>> {
        points
            .par_iter()
            .map(|x| evaluate_point(spec.scenario, spec, x))
            .collect()
    };
    let rows = match threads {
        Some(0) => return Err(usage("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| usage(e.to_string()))?
            .install(eval),
        None => eval(),
    };
    let mut csv = String::new();
    let header: Vec<&str> = spec
        .axes
        .iter()
        .map(|a| a.name.as_str())
        .chain(spec.scenario.columns().iter().copied())
        .collect();
    writeln!(csv, "{}", header.join(",")).unwrap();
    for (x, row) in points.iter().zip(rows) {
        let row = row?;
        let fields: Vec<String> = x.iter().chain(&row).map(|&v| format_sig(v)).collect();
        writeln!(csv, "{}", fields.join(",")).unwrap();
    }
    Ok(csv)
}

/// Formats with 12 significant digits, dropping trailing zeros.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_zeros(format!("{v:.*}", (11 - exp) as usize))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(scenario: &str, fixed: &[(&str, f64)], axes: &[&str]) -> SweepRequest {
        SweepRequest {
            scenario: Some(scenario.into()),
            fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            axes: axes.iter().map(|s| s.to_string()).collect(),
            steps: None,
            out: None,
        }
    }

    fn csv(scenario: &str, fixed: &[(&str, f64)], axes: &[&str]) -> String {
        run_scenario(&request(scenario, fixed, axes).resolve().unwrap(), Some(1)).unwrap()
    }

    fn last_row(text: &str) -> Vec<f64> {
        text.lines()
            .last()
            .unwrap()
            .split(',')
            .map(|f| f.parse().unwrap())
            .collect()
    }

    #[test]
    fn sig_format() {
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(-0.0), "0");
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(123456.7890123456), "123456.789012");
        assert_eq!(format_sig(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
        assert_eq!(format_sig(1e15), "1e15");
        assert_eq!(format_sig(-0.9999999999999), "-1");
    }

    #[test]
    fn scenario_examples() {
        let out = csv(
            "dephasing",
            &[("gamma", 1.0), ("omega", 0.0), ("t", 0.0)],
            &[],
        );
        assert_eq!(out.lines().next().unwrap(), "s_in,s_out,s_e,i_c,raw_ic");
        assert_eq!(last_row(&out)[3], 1.0);

        let out = csv("hydrogen", &[("x", 1.0)], &[]);
        assert_eq!(last_row(&out)[3], 1.0);

        let out = csv("two-atoms", &[("phi", 0.5), ("gamma-t", 0.0)], &[]);
        assert_eq!(out.lines().next().unwrap(), "s_in,s_out,s_e,i_c,raw_ic,n2");
        let row = last_row(&out);
        assert_eq!(row[3], 0.0);
        assert_eq!(row[5], 0.0);
    }

    #[test]
    fn default_grids() {
        for sc in Scenario::ALL {
            let mut req = request(sc.name(), &[], &[]);
            req.steps = Some(3);
            let spec = req.resolve().unwrap();
            assert!(!spec.axes.is_empty() && spec.axes.len() <= MAX_AXES);
            let text = run_scenario(&spec, None).unwrap();
            let expected_rows: usize = spec.axes.iter().map(|a| a.count).product();
            assert_eq!(text.lines().count(), expected_rows + 1, "{}", sc.name());
        }
    }

    #[test]
    fn row_major_order() {
        let mut req = request("atom-field", &[], &["gamma-t=0:1:2", "rho22=0:1:3"]);
        req.steps = Some(5);
        let spec = req.resolve().unwrap();
        let pts = spec.points();
        assert_eq!(
            pts,
            vec![
                vec![0.0, 0.0],
                vec![0.0, 0.5],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 0.5],
                vec![1.0, 1.0]
            ]
        );
    }

    #[test]
    fn deterministic_across_threads() {
        let spec = request("two-atoms", &[], &["phi=0.3:3:9", "gamma-t=0:4:7"])
            .resolve()
            .unwrap();
        let a = run_scenario(&spec, Some(1)).unwrap();
        let b = run_scenario(&spec, Some(4)).unwrap();
        let c = run_scenario(&spec, Some(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn usage_and_domain_errors() {
        let three = request("dephasing", &[], &["gamma=0:1"]).resolve();
        assert!(matches!(three, Err(SweepError::Usage(_))));
        assert!(matches!(
            request("nope", &[], &[]).resolve(),
            Err(SweepError::Usage(_))
        ));
        assert!(matches!(
            request("hydrogen", &[("y", 1.0)], &[]).resolve(),
            Err(SweepError::Usage(_))
        ));
        assert!(matches!(
            request("hydrogen", &[], &["x=1:-1"]).resolve(),
            Err(SweepError::Usage(_))
        ));
        assert!(matches!(
            request("hydrogen", &[], &["x=-1:1:1"]).resolve(),
            Err(SweepError::Usage(_))
        ));
        let spec = request("hydrogen", &[("x", 2.0)], &[]).resolve().unwrap();
        assert!(matches!(
            run_scenario(&spec, None),
            Err(SweepError::Domain(_))
        ));
        let spec = request("two-atoms", &[("shift", 0.5)], &[])
            .resolve()
            .unwrap();
        assert!(matches!(
            run_scenario(&spec, None),
            Err(SweepError::Domain(_))
        ));
    }

    #[test]
    fn spec_file_and_merge() {
        let text = "# fig 6\nscenario = atom-field\nsteps = 4\naxis = gamma-t=0:5\nrho22 = 0.5\n";
        let req = SweepRequest::parse_spec(text).unwrap();
        let spec = req.clone().resolve().unwrap();
        assert_eq!(spec.axes.len(), 1);
        assert_eq!(spec.axes[0].count, 4);
        assert_eq!(spec.fixed["rho22"], 0.5);

        let flags = request("atom-field", &[("gamma-t", 1.0)], &["rho22=0:1:3"]);
        let merged = req.merge(flags).resolve().unwrap();
        assert_eq!(merged.fixed["gamma-t"], 1.0);
        assert_eq!(merged.axes[0].name, "rho22");

        assert!(matches!(
            SweepRequest::parse_spec("scenario atom-field\n"),
            Err(SweepError::Usage(_))
        ));
    }

    #[test]
    fn ic_is_bounded_on_all_grids() {
        for sc in Scenario::ALL {
            let mut req = request(sc.name(), &[], &[]);
            req.steps = Some(7);
            let spec = req.resolve().unwrap();
            for x in spec.points() {
                let row = evaluate_point(sc, &spec, &x).unwrap();
                assert!(row[3] >= 0.0 && row[3] <= 2.0 + 1e-9, "{} {x:?}", sc.name());
            }
        }
    }
}
