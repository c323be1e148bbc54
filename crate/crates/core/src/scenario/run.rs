use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schema::*;
use super::{ScenarioError, TraceSet};
use crate::certify::{
    bell_visibility, cauchy_schwarz, chain_efficiency, g2_2pe_with, g2_memory, inverted_emission_exact,
    tv_criterion, ChainDirection, ChainEfficiency, ChainModel, Criterion, CriterionInputs, CriterionReport,
    InvertedEmission, TvProtocol,
};
use crate::echo::{analytic_efficiency, run_2pe, run_crib, run_rose, CribDirection, EchoProtocol, EfficiencyReport};
use crate::numcore::PulseShape;
use crate::slowlight::{run_slowlight, run_transfer_archetype, ArchetypeReport};

/// Numeric result next to its closed-form comparator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparator {
    pub numeric: f64,
    pub analytic: f64,
    /// `(numeric − analytic) / analytic`.
    pub relative_deviation: f64,
}

impl Comparator {
    pub fn new(numeric: f64, analytic: f64) -> Self {
        Self { numeric, analytic, relative_deviation: (numeric - analytic) / analytic }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEntry {
    pub label: String,
    pub report: EfficiencyReport,
    pub comparator: Comparator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeEntry {
    pub label: String,
    pub report: ArchetypeReport,
    pub delay_comparator: Comparator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub atoms: usize,
    pub d: f64,
    /// Single-photon absorption probability and its limit `1 − e^{−d}`.
    pub absorption: Comparator,
    pub forward: ChainEfficiency,
    pub backward: ChainEfficiency,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverted: Option<InvertedEmission>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub kind: ScenarioKind,
    pub figure: String,
    pub description: String,
    pub grid_scale: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub efficiency: Vec<EfficiencyEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub archetypes: Vec<ArchetypeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<CriterionReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<ChainEntry>,
    pub warnings: Vec<String>,
    /// Artifact file names written next to this report.
    pub artifacts: Vec<String>,
}

/// A table written to `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub traces: TraceSet,
    pub sweep: Option<SweepTable>,
}

pub(super) fn execute(file: &ScenarioFile, grid_scale: f64) -> Result<Outcome, ScenarioError> {
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        scenario: file.name.clone(),
        kind: file.kind,
        figure: file.figure.clone(),
        description: file.description.clone(),
        grid_scale,
        efficiency: vec![],
        archetypes: vec![],
        criteria: vec![],
        chain: vec![],
        warnings: super::regime_warnings(file),
        artifacts: vec![],
    };
    let mut traces = TraceSet::default();
    let mut sweep = None;
    match file.kind {
        ScenarioKind::Echo => {
            let e = file.echo.as_ref().expect("validated");
            let r = run_echo(e, grid_scale)?;
            traces.push_report("", &r);
            report.efficiency.push(entry(e.protocol_label(), r));
        }
        ScenarioKind::Slowlight => {
            let labelled: Vec<(String, &SlowLightSection)> =
                file.slowlight.iter().enumerate().map(|(i, s)| (slowlight_label(s, i), s)).collect();
            let prefix = |l: &str| if labelled.len() > 1 { format!("{l}/") } else { String::new() };
            for (label, s) in &labelled {
                match s.method {
                    SlowLightMethod::Simulate => {
                        let mut sc = s.preset_scenario().expect("validated");
                        sc.numerics = sc.numerics.scaled(grid_scale);
                        let r = run_slowlight(&sc)?;
                        traces.push_report(&prefix(label), &r);
                        report.efficiency.push(entry(label.clone(), r));
                    }
                    SlowLightMethod::Transfer => {
                        let (tf, signal, cut) = s.transfer_setup().expect("validated");
                        let r = run_transfer_archetype(&tf, &signal, cut, s.samples_per_width * grid_scale)?;
                        let p = prefix(label);
                        if let (Some(i), Some(o)) = (&r.input, &r.output) {
                            traces.push(format!("{p}input"), i.clone());
                            traces.push(format!("{p}output"), o.clone());
                        }
                        let delay_comparator = Comparator::new(r.group_delay, r.predicted_delay);
                        report.archetypes.push(ArchetypeEntry { label: label.clone(), report: r, delay_comparator });
                    }
                }
            }
        }
        ScenarioKind::Certify => match file.certify.as_ref().expect("validated") {
            CertifySection::Chain { atoms, depths, n_max, inverted } => {
                let (entries, table) = run_chain(atoms, depths, *n_max, *inverted)?;
                report.chain = entries;
                sweep = Some(table);
            }
            CertifySection::Tv { protocols, scan } => {
                for p in protocols {
                    report.criteria.push(tv_criterion(p)?);
                }
                if let Some(scan) = scan {
                    sweep = Some(tv_scan(scan)?);
                }
            }
            CertifySection::Counting { checks } => {
                for c in checks {
                    report.criteria.push(counting(c)?);
                }
            }
        },
        ScenarioKind::Sweep => {
            sweep = Some(run_sweep(file.sweep.as_ref().expect("validated"), grid_scale)?);
        }
    }
    report.artifacts = artifact_names(&traces, sweep.is_some());
    Ok(Outcome { report, traces, sweep })
}

fn artifact_names(traces: &TraceSet, sweep: bool) -> Vec<String> {
    let mut v = vec!["report.json".to_string()];
    if !traces.is_empty() {
        v.push("traces.csv".into());
    }
    if sweep {
        v.push("sweep.csv".into());
    }
    v
}

fn entry(label: String, report: EfficiencyReport) -> EfficiencyEntry {
    let comparator = Comparator::new(report.numeric, report.analytic);
    EfficiencyEntry { label, report, comparator }
}

pub(super) fn slowlight_label(s: &SlowLightSection, index: usize) -> String {
    if let Some(l) = &s.label {
        return l.clone();
    }
    match (s.preset, s.transfer) {
        (_, Some(tf)) => serde_json::to_value(tf.kind).ok().and_then(|v| v.as_str().map(String::from)),
        (Some(p), None) => Some(p.name().to_string()),
        _ => None,
    }
    .unwrap_or_else(|| format!("run{index}"))
}

impl EchoSection {
    fn protocol_label(&self) -> String {
        match self.protocol {
            EchoKind::TwoPulse => "2pe".into(),
            EchoKind::Crib => match self.direction.unwrap_or(CribDirection::Forward) {
                CribDirection::Forward => "crib-forward".into(),
                CribDirection::Backward => "crib-backward".into(),
            },
            EchoKind::Rose => "rose".into(),
        }
    }
}

fn run_echo(e: &EchoSection, grid_scale: f64) -> crate::Result<EfficiencyReport> {
    let settings = e.numerics.settings(e.d, grid_scale);
    match e.protocol {
        EchoKind::TwoPulse => {
            let pi = e.pi_pulse.expect("validated");
            run_2pe(&settings, &e.signal, &pi, e.tau.expect("validated"))
        }
        EchoKind::Crib => run_crib(
            &settings,
            &e.signal,
            e.tau.expect("validated"),
            e.direction.unwrap_or(CribDirection::Forward),
        ),
        EchoKind::Rose => run_rose(&settings, &e.signal, e.rose.as_ref().expect("validated")),
    }
}

fn run_chain(
    atoms: &[usize],
    depths: &[f64],
    n_max: usize,
    inverted: bool,
) -> crate::Result<(Vec<ChainEntry>, SweepTable)> {
    let points: Vec<(usize, f64)> = atoms.iter().flat_map(|&n| depths.iter().map(move |&d| (n, d))).collect();
    let entries = points
        .par_iter()
        .map(|&(n, d)| {
            let model = ChainModel::new(n, d)?;
            let forward = chain_efficiency(&model, ChainDirection::Forward)?;
            let backward = chain_efficiency(&model, ChainDirection::Backward)?;
            let inverted = if inverted { Some(inverted_emission_exact(&model, n_max)?) } else { None };
            Ok(ChainEntry {
                atoms: n,
                d,
                absorption: Comparator::new(forward.absorption, forward.absorption_limit),
                forward,
                backward,
                inverted,
                warnings: model.warnings(),
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let columns = [
        "atoms",
        "d",
        "absorption_exact",
        "absorption_limit",
        "forward_exact",
        "forward_limit",
        "backward_exact",
        "backward_limit",
        "inverted_exact",
        "inverted_limit",
    ];
    let rows = entries
        .iter()
        .map(|e| {
            let (ie, il) = e.inverted.map_or((f64::NAN, f64::NAN), |i| (i.exact, i.limit));
            vec![
                e.atoms as f64,
                e.d,
                e.forward.absorption,
                e.forward.absorption_limit,
                e.forward.exact,
                e.forward.limit,
                e.backward.exact,
                e.backward.limit,
                ie,
                il,
            ]
        })
        .collect();
    Ok((entries, SweepTable { columns: columns.iter().map(|s| s.to_string()).collect(), rows }))
}

fn tv_scan(scan: &DepthScan) -> crate::Result<SweepTable> {
    let rows = scan
        .values()
        .into_iter()
        .map(|d| {
            let c = tv_criterion(&TvProtocol::Crib { d })?;
            let e = tv_criterion(&TvProtocol::TwoPulseEcho { d })?;
            Ok(vec![
                d,
                c.value,
                c.secondary.unwrap_or(f64::NAN),
                e.value,
                e.secondary.unwrap_or(f64::NAN),
            ])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let columns = ["d", "crib_t", "crib_v", "2pe_t", "2pe_v"].iter().map(|s| s.to_string()).collect();
    Ok(SweepTable { columns, rows })
}

fn counting(c: &CountingCheck) -> crate::Result<CriterionReport> {
    match c {
        CountingCheck::G2Memory { detector } => g2_memory(detector),
        CountingCheck::G2TwoPulse { d, eta_d, conditioning } => {
            let v = g2_2pe_with(*d, *eta_d, *conditioning)?;
            let inputs = CriterionInputs { d: Some(*d), protocol: Some("2pe".into()), ..Default::default() };
            let mut r = CriterionReport::new(Criterion::G2, v, None, inputs);
            r.flags.push(format!("conditioning:{conditioning:?}").to_lowercase());
            Ok(r)
        }
        CountingCheck::CauchySchwarz { a, b, p } => cauchy_schwarz(a, b, *p),
        CountingCheck::BellVisibility { a, b, p } => bell_visibility(a, b, *p),
    }
}

fn column_name(p: EchoProtocol) -> &'static str {
    match p {
        EchoProtocol::TwoPulse => "2pe",
        EchoProtocol::CribFwd => "crib_fwd",
        EchoProtocol::CribBwd => "crib_bwd",
        EchoProtocol::RoseFwd => "rose_fwd",
    }
}

fn run_sweep(s: &SweepSection, grid_scale: f64) -> crate::Result<SweepTable> {
    let depths = s.depth_values();
    let mut columns = vec!["d".to_string()];
    columns.extend(s.analytic.iter().map(|p| format!("{}_analytic", column_name(*p))));
    // One simulated column per (protocol, ratio).
    let mut numeric_cols: Vec<Option<f64>> = vec![];
    if let Some(n) = &s.numeric {
        let name = column_name(n.protocol);
        if n.protocol == EchoProtocol::TwoPulse {
            for r in &n.ratios {
                columns.push(format!("{name}_numeric_ratio{r}"));
                numeric_cols.push(Some(*r));
            }
        } else {
            columns.push(format!("{name}_numeric"));
            numeric_cols.push(None);
        }
    }
    let jobs: Vec<(usize, usize)> =
        (0..depths.len()).flat_map(|i| (0..numeric_cols.len()).map(move |j| (i, j))).collect();
    let values = match &s.numeric {
        Some(n) => jobs
            .par_iter()
            .map(|&(i, j)| numeric_point(n, depths[i], numeric_cols[j], grid_scale))
            .collect::<crate::Result<Vec<f64>>>()?,
        None => vec![],
    };
    let rows = depths
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut row = vec![d];
            row.extend(s.analytic.iter().map(|p| analytic_efficiency(*p, d)));
            row.extend((0..numeric_cols.len()).map(|j| values[i * numeric_cols.len() + j]));
            row
        })
        .collect();
    Ok(SweepTable { columns, rows })
}

fn numeric_point(n: &NumericSweep, d: f64, ratio: Option<f64>, grid_scale: f64) -> crate::Result<f64> {
    let settings = n.numerics.settings(d, grid_scale);
    let r = match n.protocol {
        EchoProtocol::TwoPulse => {
            let pi: PulseShape = n.pi_pulse(ratio.expect("2pe sweep has ratios"));
            run_2pe(&settings, &n.signal, &pi, n.tau)?
        }
        EchoProtocol::CribFwd => run_crib(&settings, &n.signal, n.tau, CribDirection::Forward)?,
        EchoProtocol::CribBwd => run_crib(&settings, &n.signal, n.tau, CribDirection::Backward)?,
        EchoProtocol::RoseFwd => unreachable!("rejected by validation"),
    };
    Ok(r.numeric)
}
