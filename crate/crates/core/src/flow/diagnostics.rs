use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

pub const DIAGNOSTICS_HEADER: &str =
    "step,time,area,volume,chi,H_mean,H_relstd,energy,sphericity,max_C";

/// Invariants of one recorded state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    pub area: f64,
    pub volume: f64,
    pub chi: i64,
    pub h_mean: f64,
    pub h_relstd: f64,
    /// `σ · Area`.
    pub energy: f64,
    pub sphericity: f64,
    pub max_c: f64,
    /// Largest vertex displacement of the step that produced this state.
    pub max_displacement: f64,
    /// `|Σ angle defects − 2πχ|`; zero for curves.
    pub gauss_bonnet_residual: f64,
    /// Total transported mass, when a density rides along.
    pub mass_total: Option<f64>,
}

impl DiagnosticsRecord {
    fn csv_row(&self, with_mass: bool) -> String {
        let mut row = format!(
            "{},{:.12e},{:.12e},{:.12e},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.step,
            self.time,
            self.area,
            self.volume,
            self.chi,
            self.h_mean,
            self.h_relstd,
            self.energy,
            self.sphericity,
            self.max_c
        );
        if with_mass {
            let _ = write!(row, ",{:.15e}", self.mass_total.unwrap_or(f64::NAN));
        }
        row
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowDiagnostics {
    pub records: Vec<DiagnosticsRecord>,
}

impl FlowDiagnostics {
    pub fn push(&mut self, record: DiagnosticsRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first(&self) -> Option<&DiagnosticsRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.records.last()
    }

    /// `|V_last − V_0| / V_0`.
    pub fn volume_drift(&self) -> f64 {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => (b.volume - a.volume).abs() / a.volume.abs(),
            _ => 0.0,
        }
    }

    /// Whether every record has the Euler characteristic of the first.
    pub fn chi_constant(&self) -> bool {
        self.first()
            .is_none_or(|a| self.records.iter().all(|r| r.chi == a.chi))
    }

    pub fn max_gauss_bonnet_residual(&self) -> f64 {
        self.records
            .iter()
            .fold(0.0, |m, r| m.max(r.gauss_bonnet_residual))
    }

    /// Largest single-step increase of the energy (zero when it never rises).
    pub fn max_energy_increase(&self) -> f64 {
        self.records
            .windows(2)
            .fold(0.0, |m, w| m.max(w[1].energy - w[0].energy))
    }

    pub fn to_csv(&self) -> String {
        let with_mass = self.records.iter().any(|r| r.mass_total.is_some());
        let mut out = String::from(DIAGNOSTICS_HEADER);
        if with_mass {
            out.push_str(",mass_total");
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row(with_mass));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}
