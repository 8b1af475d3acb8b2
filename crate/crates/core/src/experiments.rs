//! Deterministic sweep datasets comparing the recovery map against the
//! benchmark and optimal protocols, with stable CSV and JSON serialization.
//!
//! Three experiments are provided: fidelity against the reference occupation
//! (`fig2`), fidelity across the recovery family (`fig3`), and relative
//! differences against the forward transmissivity (`fig4`). Identical
//! configurations produce byte-identical output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::fidelity;
use crate::gaussian::{GaussianState, Mat2, Vec2};
use crate::petz::{generalized_transmissivity, petz_map, LossySpec};
use crate::recovery::{
    eta_max, family_member, member_fidelity, optimal_recovery, protocol_r0, protocol_r1,
};

/// Named input states used throughout the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputPreset {
    /// Thermal state with mean photon number 2.
    Thermal2,
    /// Zero-mean squeezed state with covariance diag(2.5, 10).
    Squeezed,
    /// Coherent state of amplitude (1 + i) / (2 sqrt(2)).
    Coherent,
}

impl InputPreset {
    pub fn all() -> Vec<InputPreset> {
        vec![
            InputPreset::Thermal2,
            InputPreset::Squeezed,
            InputPreset::Coherent,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            InputPreset::Thermal2 => "thermal2",
            InputPreset::Squeezed => "squeezed",
            InputPreset::Coherent => "coherent",
        }
    }

    fn panel_index(&self) -> usize {
        match self {
            InputPreset::Thermal2 => 0,
            InputPreset::Squeezed => 1,
            InputPreset::Coherent => 2,
        }
    }

    pub fn state(&self) -> GaussianState {
        match self {
            InputPreset::Thermal2 => GaussianState::thermal(2.0).expect("valid occupation"),
            InputPreset::Squeezed => {
                GaussianState::from_parts(Vec2::zeros(), Mat2::new(2.5, 0.0, 0.0, 10.0))
                    .expect("valid squeezed covariance")
            }
            InputPreset::Coherent => {
                let a = 0.5 / std::f64::consts::SQRT_2;
                GaussianState::coherent(a, a)
            }
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<InputPreset>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let preset = match part {
                "thermal2" => InputPreset::Thermal2,
                "squeezed" => InputPreset::Squeezed,
                "coherent" => InputPreset::Coherent,
                other => {
                    return Err(Error::Domain(format!(
                        "unknown input preset '{other}' (expected thermal2, squeezed, coherent)"
                    )))
                }
            };
            if !out.contains(&preset) {
                out.push(preset);
            }
        }
        if out.is_empty() {
            return Err(Error::Domain("empty input preset list".into()));
        }
        Ok(out)
    }
}

/// Inclusive linear sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        if steps < 2 || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(Error::Domain(format!(
                "invalid sweep {start}:{stop}:{steps} (need finite start <= stop and steps >= 2)"
            )));
        }
        Ok(Self { start, stop, steps })
    }

    /// Parses the `start:stop:steps` flag syntax.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Domain(format!(
                "sweep must be start:stop:steps, got '{s}'"
            )));
        }
        let start = parts[0]
            .parse::<f64>()
            .map_err(|e| Error::Domain(format!("bad sweep start '{}': {e}", parts[0])))?;
        let stop = parts[1]
            .parse::<f64>()
            .map_err(|e| Error::Domain(format!("bad sweep stop '{}': {e}", parts[1])))?;
        let steps = parts[2]
            .parse::<usize>()
            .map_err(|e| Error::Domain(format!("bad sweep steps '{}': {e}", parts[2])))?;
        Self::new(start, stop, steps)
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.steps)
            .map(|i| self.start + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub panel: String,
    pub input: String,
    pub n_sigma: f64,
    pub f_petz: f64,
    pub f_r0: f64,
    pub f_r1: f64,
    pub eta_prime: f64,
    pub realization: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub set: String,
    pub input: String,
    /// One of `sweep`, `petz`, `optimal`.
    pub kind: String,
    pub eta_r: f64,
    pub fidelity: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Row {
    pub set: String,
    pub input: String,
    pub eta: f64,
    pub eta_rel: f64,
    pub f_rel: f64,
    pub eta_petz: f64,
    pub eta_max: f64,
    pub realization: String,
}

pub const FIG2_HEADERS: &[&str] = &[
    "panel",
    "input",
    "n_sigma",
    "f_petz",
    "f_r0",
    "f_r1",
    "eta_prime",
    "realization",
];
pub const FIG3_HEADERS: &[&str] = &["set", "input", "kind", "eta_r", "fidelity", "feasible"];
pub const FIG4_HEADERS: &[&str] = &[
    "set",
    "input",
    "eta",
    "eta_rel",
    "f_rel",
    "eta_petz",
    "eta_max",
    "realization",
];

/// A finished experiment: rows plus the fixed CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", content = "rows", rename_all = "lowercase")]
pub enum Dataset {
    Fig2(Vec<Fig2Row>),
    Fig3(Vec<Fig3Row>),
    Fig4(Vec<Fig4Row>),
}

/// All numeric CSV fields carry 12 significant digits, locale-independent.
pub fn fmt_g12(x: f64) -> String {
    debug_assert!(x.is_finite());
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

impl Dataset {
    pub fn headers(&self) -> &'static [&'static str] {
        match self {
            Dataset::Fig2(_) => FIG2_HEADERS,
            Dataset::Fig3(_) => FIG3_HEADERS,
            Dataset::Fig4(_) => FIG4_HEADERS,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Dataset::Fig2(rows) => rows.len(),
            Dataset::Fig3(rows) => rows.len(),
            Dataset::Fig4(rows) => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers().join(","));
        out.push('\n');
        match self {
            Dataset::Fig2(rows) => {
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        r.panel,
                        r.input,
                        fmt_g12(r.n_sigma),
                        fmt_g12(r.f_petz),
                        fmt_g12(r.f_r0),
                        fmt_g12(r.f_r1),
                        fmt_g12(r.eta_prime),
                        r.realization
                    ));
                }
            }
            Dataset::Fig3(rows) => {
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.set,
                        r.input,
                        r.kind,
                        fmt_g12(r.eta_r),
                        fmt_g12(r.fidelity),
                        r.feasible
                    ));
                }
            }
            Dataset::Fig4(rows) => {
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        r.set,
                        r.input,
                        fmt_g12(r.eta),
                        fmt_g12(r.eta_rel),
                        fmt_g12(r.f_rel),
                        fmt_g12(r.eta_petz),
                        fmt_g12(r.eta_max),
                        r.realization
                    ));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dataset serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Domain(format!("bad dataset JSON: {e}")))
    }
}

/// Dataset plus skipped-point notices (degenerate sweep points).
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub dataset: Dataset,
    pub notices: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Fig2Config {
    pub eta: f64,
    /// Replaces the default pair of environments (10, 0) with a single one.
    pub n_xi_override: Option<f64>,
    pub sweep: SweepSpec,
    pub inputs: Vec<InputPreset>,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            eta: 0.5,
            n_xi_override: None,
            sweep: SweepSpec::new(0.0, 10.0, 201).expect("static sweep"),
            inputs: InputPreset::all(),
        }
    }
}

const PANEL_LETTERS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Fidelity of the three protocols against the reference occupation.
pub fn run_fig2(cfg: &Fig2Config) -> Result<ExperimentRun> {
    let environments: Vec<f64> = match cfg.n_xi_override {
        Some(v) => vec![v],
        None => vec![10.0, 0.0],
    };
    let mut rows = Vec::new();
    let mut notices = Vec::new();
    for (env_idx, &n_xi) in environments.iter().enumerate() {
        let spec = LossySpec::thermal(cfg.eta, n_xi)?;
        for preset in &cfg.inputs {
            let rho = preset.state();
            let noisy = spec.channel().apply(&rho)?;
            let f_r0 = fidelity(&rho, &protocol_r0().apply(&noisy)?)?.value;
            let panel = PANEL_LETTERS[(env_idx * 3 + preset.panel_index()).min(5)];
            for &n_sigma in &cfg.sweep.points() {
                let sigma = GaussianState::thermal(n_sigma)?;
                let petz = match petz_map(&spec, &sigma) {
                    Ok(p) => p,
                    Err(Error::PureOutput { .. }) => {
                        notices.push(format!(
                            "fig2: skipped degenerate point n_sigma = {n_sigma}, n_xi = {n_xi} \
                             (pure channel output)"
                        ));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let f_petz = fidelity(&rho, &petz.channel.apply(&noisy)?)?.value;
                let f_r1 = fidelity(&rho, &protocol_r1(&sigma).apply(&noisy)?)?.value;
                let eta_prime = petz.eta_prime.expect("thermal reference is scalar");
                let realization = petz.realization.expect("thermal reference is scalar");
                rows.push(Fig2Row {
                    panel: panel.to_string(),
                    input: preset.label().to_string(),
                    n_sigma,
                    f_petz,
                    f_r0,
                    f_r1,
                    eta_prime,
                    realization: realization.to_string(),
                });
            }
        }
    }
    Ok(ExperimentRun {
        dataset: Dataset::Fig2(rows),
        notices,
    })
}

#[derive(Debug, Clone)]
pub struct Fig3Config {
    pub eta: f64,
    /// Replaces the default parameter sets with a single `(n_xi, n_sigma)`.
    pub custom_set: Option<(f64, f64)>,
    /// Fractions of the feasible range `[0, eta_max]` to sweep.
    pub sweep: SweepSpec,
    pub inputs: Vec<InputPreset>,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Self {
            eta: 0.5,
            custom_set: None,
            sweep: SweepSpec::new(0.0, 1.0, 401).expect("static sweep"),
            inputs: InputPreset::all(),
        }
    }
}

/// Fidelity across the feasible recovery family, with markers for the
/// recovery map and the optimum.
pub fn run_fig3(cfg: &Fig3Config) -> Result<ExperimentRun> {
    let sets: Vec<(String, f64, f64)> = match cfg.custom_set {
        Some((n_xi, n_sigma)) => vec![("custom".to_string(), n_xi, n_sigma)],
        None => vec![
            ("a".to_string(), 0.0, 4.0),
            ("b".to_string(), 2.0, 6.0),
            ("c".to_string(), 10.0, 4.0),
        ],
    };
    let mut rows = Vec::new();
    for (set, n_xi, n_sigma) in &sets {
        let spec = LossySpec::thermal(cfg.eta, *n_xi)?;
        let sigma = GaussianState::thermal(*n_sigma)?;
        let top = eta_max(&spec, &sigma)?;
        let eta_p = generalized_transmissivity(&spec, &sigma)?;
        for preset in &cfg.inputs {
            let rho = preset.state();
            for &frac in &cfg.sweep.points() {
                let mut eta_r = (frac.clamp(0.0, 1.0)) * top;
                let mut member = family_member(eta_r, &spec, &sigma)?;
                if !member.feasible {
                    // The exact upper edge can flip infeasible by rounding.
                    eta_r *= 1.0 - 1e-12;
                    member = family_member(eta_r, &spec, &sigma)?;
                }
                let f = member_fidelity(&rho, &spec, &member)?;
                rows.push(Fig3Row {
                    set: set.clone(),
                    input: preset.label().to_string(),
                    kind: "sweep".to_string(),
                    eta_r,
                    fidelity: f,
                    feasible: member.feasible,
                });
            }
            let petz_member = family_member(eta_p, &spec, &sigma)?;
            rows.push(Fig3Row {
                set: set.clone(),
                input: preset.label().to_string(),
                kind: "petz".to_string(),
                eta_r: eta_p,
                fidelity: member_fidelity(&rho, &spec, &petz_member)?,
                feasible: petz_member.feasible,
            });
            let opt = optimal_recovery(&rho, &spec, &sigma, None)?;
            rows.push(Fig3Row {
                set: set.clone(),
                input: preset.label().to_string(),
                kind: "optimal".to_string(),
                eta_r: opt.eta_r,
                fidelity: opt.fidelity,
                feasible: true,
            });
        }
    }
    Ok(ExperimentRun {
        dataset: Dataset::Fig3(rows),
        notices: Vec::new(),
    })
}

#[derive(Debug, Clone)]
pub struct Fig4Config {
    /// Replaces the default parameter sets with a single `(n_xi, n_sigma)`.
    pub custom_set: Option<(f64, f64)>,
    /// Forward transmissivities to sweep.
    pub sweep: SweepSpec,
    pub inputs: Vec<InputPreset>,
}

impl Default for Fig4Config {
    fn default() -> Self {
        Self {
            custom_set: None,
            sweep: SweepSpec::new(0.05, 0.95, 19).expect("static sweep"),
            inputs: InputPreset::all(),
        }
    }
}

/// Relative transmissivity and fidelity differences against the forward
/// transmissivity.
pub fn run_fig4(cfg: &Fig4Config) -> Result<ExperimentRun> {
    let sets: Vec<(String, f64, f64)> = match cfg.custom_set {
        Some((n_xi, n_sigma)) => vec![("custom".to_string(), n_xi, n_sigma)],
        None => vec![
            ("purple".to_string(), 10.0, 4.0),
            ("green".to_string(), 2.0, 6.0),
        ],
    };
    let mut rows = Vec::new();
    for (set, n_xi, n_sigma) in &sets {
        for &eta in &cfg.sweep.points() {
            let spec = LossySpec::thermal(eta, *n_xi)?;
            let sigma = GaussianState::thermal(*n_sigma)?;
            let petz = petz_map(&spec, &sigma)?;
            let realization = petz.realization.expect("thermal reference is scalar");
            let eta_p = petz.eta_prime.expect("thermal reference is scalar");
            for preset in &cfg.inputs {
                let rho = preset.state();
                let diffs = crate::recovery::relative_diffs(&rho, &spec, &sigma)?;
                rows.push(Fig4Row {
                    set: set.clone(),
                    input: preset.label().to_string(),
                    eta,
                    eta_rel: diffs.eta_rel,
                    f_rel: diffs.f_rel,
                    eta_petz: eta_p,
                    eta_max: diffs.eta_max,
                    realization: realization.to_string(),
                });
            }
        }
    }
    Ok(ExperimentRun {
        dataset: Dataset::Fig4(rows),
        notices: Vec::new(),
    })
}

/// Gnuplot companion script for a CSV written by `to_csv`.
pub fn gnuplot_script(dataset: &Dataset, csv_path: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key outside\n");
    match dataset {
        Dataset::Fig2(_) => {
            s.push_str("set xlabel 'n_sigma'\nset ylabel 'fidelity'\n");
            s.push_str(&format!(
                "plot '{csv_path}' using 3:4 title 'petz', \\\n     \
                 '{csv_path}' using 3:5 title 'r0', \\\n     '{csv_path}' using 3:6 title 'r1'\n"
            ));
        }
        Dataset::Fig3(_) => {
            s.push_str("set xlabel 'eta_R'\nset ylabel 'fidelity'\n");
            s.push_str(&format!("plot '{csv_path}' using 4:5 title 'family'\n"));
        }
        Dataset::Fig4(_) => {
            s.push_str("set xlabel 'eta'\nset ylabel 'relative difference'\n");
            s.push_str(&format!(
                "plot '{csv_path}' using 3:4 title 'eta_rel', \\\n     \
                 '{csv_path}' using 3:5 title 'f_rel'\n"
            ));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sweep_parsing() {
        let s = SweepSpec::parse("0:10:201").unwrap();
        assert_eq!(s.steps, 201);
        let pts = s.points();
        assert_abs_diff_eq!(pts[0], 0.0);
        assert_abs_diff_eq!(pts[200], 10.0);
        assert_abs_diff_eq!(pts[1], 0.05, epsilon = 1e-12);

        assert!(SweepSpec::parse("0:10").is_err());
        assert!(SweepSpec::parse("0:10:1").is_err());
        assert!(SweepSpec::parse("5:1:10").is_err());
    }

    #[test]
    fn preset_parsing() {
        let all = InputPreset::parse_list("thermal2,squeezed,coherent").unwrap();
        assert_eq!(all, InputPreset::all());
        assert_eq!(
            InputPreset::parse_list("coherent").unwrap(),
            vec![InputPreset::Coherent]
        );
        assert!(InputPreset::parse_list("squeezy").is_err());
    }

    #[test]
    fn g12_formatting() {
        assert_eq!(fmt_g12(0.5), "5.00000000000e-1");
        assert_eq!(fmt_g12(0.0), "0.00000000000e0");
        assert_eq!(fmt_g12(-0.0), "0.00000000000e0");
        assert_eq!(fmt_g12(1.05), "1.05000000000e0");
    }

    #[test]
    fn fig2_smoke() {
        let cfg = Fig2Config {
            sweep: SweepSpec::new(0.0, 10.0, 11).unwrap(),
            inputs: vec![InputPreset::Thermal2],
            ..Fig2Config::default()
        };
        let run = run_fig2(&cfg).unwrap();
        // 11 points x 2 environments, minus the degenerate vacuum point.
        assert_eq!(run.dataset.len(), 21);
        assert_eq!(run.notices.len(), 1);
        if let Dataset::Fig2(rows) = &run.dataset {
            assert!(rows.iter().all(|r| r.f_petz >= r.f_r1 - 1e-12));
            // r0 is constant per panel.
            let f0: Vec<f64> = rows
                .iter()
                .filter(|r| r.panel == "a")
                .map(|r| r.f_r0)
                .collect();
            assert!(f0.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-15));
        } else {
            panic!("wrong dataset kind");
        }
    }

    #[test]
    fn fig3_markers() {
        let cfg = Fig3Config {
            sweep: SweepSpec::new(0.0, 1.0, 21).unwrap(),
            inputs: vec![InputPreset::Thermal2],
            ..Fig3Config::default()
        };
        let run = run_fig3(&cfg).unwrap();
        if let Dataset::Fig3(rows) = &run.dataset {
            // Set a: the recovery-map marker sits at the right edge 5/3.
            let petz_a = rows
                .iter()
                .find(|r| r.set == "a" && r.kind == "petz")
                .unwrap();
            assert_abs_diff_eq!(petz_a.eta_r, 5.0 / 3.0, epsilon = 1e-12);
            let opt_a = rows
                .iter()
                .find(|r| r.set == "a" && r.kind == "optimal")
                .unwrap();
            assert_abs_diff_eq!(opt_a.eta_r, petz_a.eta_r, epsilon = 1e-6);

            // Set c: the optimum lies strictly right of the recovery map.
            let petz_c = rows
                .iter()
                .find(|r| r.set == "c" && r.kind == "petz")
                .unwrap();
            let opt_c = rows
                .iter()
                .find(|r| r.set == "c" && r.kind == "optimal")
                .unwrap();
            assert!(opt_c.eta_r > petz_c.eta_r + 0.1);

            // eta_r = 0 rows re-prepare sigma.
            let rho = InputPreset::Thermal2.state();
            let sigma = GaussianState::thermal(4.0).unwrap();
            let expect = fidelity(&rho, &sigma).unwrap().value;
            let zero_row = rows
                .iter()
                .find(|r| r.set == "a" && r.kind == "sweep" && r.eta_r == 0.0)
                .unwrap();
            assert_abs_diff_eq!(zero_row.fidelity, expect, epsilon = 1e-12);
        } else {
            panic!("wrong dataset kind");
        }
    }

    #[test]
    fn dataset_json_round_trip() {
        let cfg = Fig4Config {
            sweep: SweepSpec::new(0.1, 0.9, 3).unwrap(),
            inputs: vec![InputPreset::Coherent],
            ..Fig4Config::default()
        };
        let run = run_fig4(&cfg).unwrap();
        let json = run.dataset.to_json();
        let back = Dataset::from_json(&json).unwrap();
        assert_eq!(back, run.dataset);
        // Serialization is deterministic.
        assert_eq!(json, back.to_json());
        assert_eq!(run.dataset.to_csv(), back.to_csv());
    }
}
