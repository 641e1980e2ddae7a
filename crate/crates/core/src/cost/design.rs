use serde::{Deserialize, Serialize};

use crate::error::{Result, TransitError};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    /// Line density and headway vary by row (E/W lines) and column (N/S lines).
    #[serde(alias = "het")]
    Heterogeneous,
    /// One density and headway per axis for the whole city.
    #[serde(alias = "hom")]
    Homogeneous,
}

impl NetworkKind {
    pub fn label(self) -> &'static str {
        match self {
            NetworkKind::Heterogeneous => "het",
            NetworkKind::Homogeneous => "hom",
        }
    }

    /// Number of line groups per axis.
    pub fn groups(self, n_cells: usize) -> usize {
        match self {
            NetworkKind::Heterogeneous => n_cells,
            NetworkKind::Homogeneous => 1,
        }
    }
}

impl std::str::FromStr for NetworkKind {
    type Err = TransitError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "het" | "heterogeneous" => Ok(NetworkKind::Heterogeneous),
            "hom" | "homogeneous" => Ok(NetworkKind::Homogeneous),
            _ => Err(TransitError::InvalidConfig(format!("unknown network kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    /// Lines running east-west, one group per row.
    EastWest,
    /// Lines running north-south, one group per column.
    NorthSouth,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::EastWest => "EW",
            Axis::NorthSouth => "NS",
        }
    }
}

/// Line densities (1/km) and headways (hr) for E/W and N/S lines.
///
/// E/W vectors are indexed by row `y`, N/S vectors by column `x`; in the
/// homogeneous case every vector has length one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVariables {
    pub kind: NetworkKind,
    pub delta_ew: Vec<f64>,
    pub delta_ns: Vec<f64>,
    pub headway_ew: Vec<f64>,
    pub headway_ns: Vec<f64>,
}

impl DesignVariables {
    pub fn uniform(kind: NetworkKind, n_cells: usize, delta: f64, headway: f64) -> Self {
        let g = kind.groups(n_cells);
        DesignVariables {
            kind,
            delta_ew: vec![delta; g],
            delta_ns: vec![delta; g],
            headway_ew: vec![headway; g],
            headway_ns: vec![headway; g],
        }
    }

    pub fn groups(&self) -> usize {
        self.delta_ew.len()
    }

    /// Group serving row `y` (E/W lines) or column `x` (N/S lines).
    pub fn group(&self, line: usize) -> usize {
        match self.kind {
            NetworkKind::Heterogeneous => line,
            NetworkKind::Homogeneous => 0,
        }
    }

    pub fn delta(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::EastWest => &self.delta_ew,
            Axis::NorthSouth => &self.delta_ns,
        }
    }

    pub fn headway(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::EastWest => &self.headway_ew,
            Axis::NorthSouth => &self.headway_ns,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let want = self.kind.groups(grid.n_cells());
        for (name, v) in self.named() {
            if v.len() != want {
                return Err(TransitError::DesignMismatch(format!(
                    "{name} has {} entries, expected {want}",
                    v.len()
                )));
            }
            if let Some(x) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                return Err(TransitError::NonPositiveDesign {
                    name: name.to_string(),
                    value: *x,
                });
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, &Vec<f64>); 4] {
        [
            ("delta_ew", &self.delta_ew),
            ("delta_ns", &self.delta_ns),
            ("headway_ew", &self.headway_ew),
            ("headway_ns", &self.headway_ns),
        ]
    }

    /// Flattens to `[delta_ew.., delta_ns.., headway_ew.., headway_ns..]`,
    /// the variable order of the GP.
    pub fn to_vector(&self) -> Vec<f64> {
        self.named().iter().flat_map(|(_, v)| v.iter().copied()).collect()
    }

    pub fn from_vector(kind: NetworkKind, n_cells: usize, r: &[f64]) -> Result<Self> {
        let g = kind.groups(n_cells);
        if r.len() != 4 * g {
            return Err(TransitError::DesignMismatch(format!(
                "expected {} variables, got {}",
                4 * g,
                r.len()
            )));
        }
        Ok(DesignVariables {
            kind,
            delta_ew: r[..g].to_vec(),
            delta_ns: r[g..2 * g].to_vec(),
            headway_ew: r[2 * g..3 * g].to_vec(),
            headway_ns: r[3 * g..].to_vec(),
        })
    }

    pub fn variable_names(kind: NetworkKind, n_cells: usize) -> Vec<String> {
        let g = kind.groups(n_cells);
        let mut names = Vec::with_capacity(4 * g);
        for prefix in ["delta_ew", "delta_ns", "h_ew", "h_ns"] {
            for i in 0..g {
                names.push(match kind {
                    NetworkKind::Heterogeneous => format!("{prefix}[{}]", i + 1),
                    NetworkKind::Homogeneous => prefix.to_string(),
                });
            }
        }
        names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_round_trip() {
        let d = DesignVariables {
            kind: NetworkKind::Heterogeneous,
            delta_ew: vec![1.0, 2.0],
            delta_ns: vec![3.0, 4.0],
            headway_ew: vec![0.1, 0.2],
            headway_ns: vec![0.3, 0.4],
        };
        let r = d.to_vector();
        assert_eq!(r, vec![1.0, 2.0, 3.0, 4.0, 0.1, 0.2, 0.3, 0.4]);
        assert_eq!(DesignVariables::from_vector(NetworkKind::Heterogeneous, 2, &r).unwrap(), d);
        assert!(DesignVariables::from_vector(NetworkKind::Homogeneous, 2, &r).is_err());
    }

    #[test]
    fn validation() {
        let g = Grid::new(2.0, 1.0).unwrap();
        let mut d = DesignVariables::uniform(NetworkKind::Heterogeneous, 2, 0.5, 0.1);
        d.validate(&g).unwrap();
        d.headway_ns[1] = 0.0;
        assert!(matches!(d.validate(&g), Err(TransitError::NonPositiveDesign { .. })));
        let h = DesignVariables::uniform(NetworkKind::Homogeneous, 2, 0.5, 0.1);
        h.validate(&g).unwrap();
        let wrong = DesignVariables::uniform(NetworkKind::Heterogeneous, 3, 0.5, 0.1);
        assert!(matches!(wrong.validate(&g), Err(TransitError::DesignMismatch(_))));
    }

    #[test]
    fn names_and_kinds() {
        assert_eq!(
            DesignVariables::variable_names(NetworkKind::Homogeneous, 20),
            ["delta_ew", "delta_ns", "h_ew", "h_ns"]
        );
        assert_eq!(DesignVariables::variable_names(NetworkKind::Heterogeneous, 20).len(), 80);
        assert_eq!("hom".parse::<NetworkKind>().unwrap(), NetworkKind::Homogeneous);
        let k: NetworkKind = serde_json::from_str("\"het\"").unwrap();
        assert_eq!(k, NetworkKind::Heterogeneous);
    }
}
