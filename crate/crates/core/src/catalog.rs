//! Built-in absorbing sets, embedded from the `catalog/` directory.

use crate::asgraph::{build_routing, parse_catalog, AbsorbingSetSpec, RoutingSystem};

const SOURCES: &[&str] = &[
    include_str!("../../../catalog/paper_figs.as"),
    include_str!("../../../catalog/as_6_4.as"),
    include_str!("../../../catalog/as_7_3.as"),
];

/// Every built-in set, in file order.
pub fn builtin() -> Vec<AbsorbingSetSpec> {
    SOURCES
        .iter()
        .flat_map(|src| parse_catalog(src).expect("built-in catalog parses"))
        .collect()
}

pub fn fixture(name: &str) -> Option<AbsorbingSetSpec> {
    builtin().into_iter().find(|s| s.name == name)
}

/// Routing system of a built-in set. Panics on an unknown name.
pub fn routing(name: &str) -> RoutingSystem {
    let spec = fixture(name).unwrap_or_else(|| panic!("no built-in set named {name}"));
    build_routing(&spec).expect("built-in sets are elementary absorbing sets")
}
