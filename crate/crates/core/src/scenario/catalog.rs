use serde::Serialize;

use super::{parse_scenario, ScenarioKind};

const BUNDLED: &[(&str, &str)] = &[
    ("certify_chain", include_str!("../../scenarios/certify_chain.toml")),
    ("certify_counting", include_str!("../../scenarios/certify_counting.toml")),
    ("certify_tv", include_str!("../../scenarios/certify_tv.toml")),
    ("crib_backward_d2", include_str!("../../scenarios/crib_backward_d2.toml")),
    ("crib_forward_d2", include_str!("../../scenarios/crib_forward_d2.toml")),
    ("fig10_shome", include_str!("../../scenarios/fig10_shome.toml")),
    ("fig11_fid", include_str!("../../scenarios/fig11_fid.toml")),
    ("fig12_eit", include_str!("../../scenarios/fig12_eit.toml")),
    ("fig13_raman", include_str!("../../scenarios/fig13_raman.toml")),
    ("fig3_2pe_ratio2", include_str!("../../scenarios/fig3_2pe_ratio2.toml")),
    ("fig3_2pe_sweep", include_str!("../../scenarios/fig3_2pe_sweep.toml")),
    ("fig5_efficiency_compare", include_str!("../../scenarios/fig5_efficiency_compare.toml")),
    ("fig6_inverted_lorentzian", include_str!("../../scenarios/fig6_inverted_lorentzian.toml")),
    ("fig7_lorentzian", include_str!("../../scenarios/fig7_lorentzian.toml")),
    ("fig8_shaded_area", include_str!("../../scenarios/fig8_shaded_area.toml")),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: ScenarioKind,
    pub figure: String,
    pub description: String,
}

/// Source text of a bundled scenario.
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Every bundled scenario, in name order.
pub fn list_scenarios() -> Vec<CatalogEntry> {
    BUNDLED
        .iter()
        .map(|(_, text)| {
            let f = parse_scenario(text).expect("bundled scenarios are valid");
            CatalogEntry { name: f.name, kind: f.kind, figure: f.figure, description: f.description }
        })
        .collect()
}
