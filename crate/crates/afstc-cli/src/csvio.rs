//! CSV plot data with a fixed, self-describing column layout.
//!
//! Every curve kind shares the same header —
//! `snr_db,value,ci_halfwidth,provenance,scheme,R,Ns,Nd,M,family` — so a
//! plotting script can overlay simulated, exact, and bound curves without
//! caring which is which. Floating-point fields use the shortest decimal
//! representation that parses back to the identical value, which is what
//! makes [`read_curve_csv`] an exact inverse of [`write_curve_csv`].

use std::path::Path;

use afstc::analysis::{Provenance, SerCurve, SerPoint};
use afstc::montecarlo::SimPlan;
use afstc::network::ModulationFamily;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    snr_db: f64,
    value: f64,
    ci_halfwidth: f64,
    provenance: String,
    scheme: String,
    #[serde(rename = "R")]
    num_relays: usize,
    #[serde(rename = "Ns")]
    src_antennas: usize,
    #[serde(rename = "Nd")]
    dst_antennas: usize,
    #[serde(rename = "M")]
    m: u32,
    family: String,
}

fn family_name(family: ModulationFamily) -> &'static str {
    match family {
        ModulationFamily::Mpsk => "MPSK",
        ModulationFamily::Mqam => "MQAM",
    }
}

fn parse_provenance(name: &str) -> Result<Provenance, CliError> {
    for candidate in [
        Provenance::Simulated,
        Provenance::Exact,
        Provenance::Asymptotic,
        Provenance::UpperBound,
        Provenance::Mgf,
    ] {
        if candidate.name() == name {
            return Ok(candidate);
        }
    }
    Err(CliError::Run(format!("unknown provenance `{name}` in CSV")))
}

/// Writes one curve as CSV, one row per grid point.
pub fn write_curve_csv(path: &Path, curve: &SerCurve, plan: &SimPlan) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::Run(e.to_string()))?;
    for point in &curve.points {
        writer.serialize(Row {
            snr_db: point.snr_db,
            value: point.value,
            ci_halfwidth: point.ci_halfwidth,
            provenance: curve.provenance.name().to_string(),
            scheme: plan.scheme.name().to_string(),
            num_relays: plan.config.num_relays,
            src_antennas: plan.config.src_antennas,
            dst_antennas: plan.config.dst_antennas,
            m: plan.modulation.m,
            family: family_name(plan.modulation.family).to_string(),
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a curve back from CSV; exact inverse of [`write_curve_csv`].
pub fn read_curve_csv(path: &Path) -> Result<SerCurve, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Run(e.to_string()))?;
    let mut provenance = None;
    let mut points = Vec::new();
    for row in reader.deserialize() {
        let row: Row = row?;
        let parsed = parse_provenance(&row.provenance)?;
        match provenance {
            None => provenance = Some(parsed),
            Some(existing) if existing == parsed => {}
            Some(existing) => {
                return Err(CliError::Run(format!(
                    "mixed provenance in one CSV: {} then {}",
                    existing.name(),
                    parsed.name()
                )));
            }
        }
        points.push(SerPoint {
            snr_db: row.snr_db,
            value: row.value,
            ci_halfwidth: row.ci_halfwidth,
        });
    }
    let provenance = provenance.ok_or_else(|| {
        CliError::Run(format!("{}: no curve rows in CSV", path.display()))
    })?;
    Ok(SerCurve { provenance, points })
}
