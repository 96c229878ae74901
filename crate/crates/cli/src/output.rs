//! Comma-separated tables for external plotting.

use std::collections::BTreeMap;

use anyhow::Result;
use qwalk_povm::noise::ErrorBudget;
use qwalk_povm::povm::PovmElement;
use qwalk_povm::{DensityMatrix, Position, PositionDistribution};

fn p6(v: f64) -> String {
    // avoid "-0.000000" for rounding noise
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(String::from_utf8(bytes)?)
}

/// `position,probability[,counts]`.
pub fn distribution_csv(
    dist: &PositionDistribution,
    counts: Option<&BTreeMap<Position, u64>>,
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match counts {
        Some(_) => w.write_record(["position", "probability", "counts"])?,
        None => w.write_record(["position", "probability"])?,
    }
    for (x, p) in dist.iter() {
        let mut row = vec![x.to_string(), p6(p)];
        if let Some(c) = counts {
            row.push(c.get(&x).copied().unwrap_or(0).to_string());
        }
        w.write_record(&row)?;
    }
    finish(w)
}

/// One row per site with the real and imaginary parts of `E_x`.
pub fn povm_csv(povm: &[PovmElement]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "position", "e00_re", "e00_im", "e01_re", "e01_im", "e10_re", "e10_im", "e11_re", "e11_im",
    ])?;
    for e in povm {
        let m = &e.operator.0;
        let mut row = vec![e.position.to_string()];
        for entry in [m[0][0], m[0][1], m[1][0], m[1][1]] {
            row.push(format!("{:.10}", entry.re));
            row.push(format!("{:.10}", entry.im));
        }
        w.write_record(&row)?;
    }
    finish(w)
}

pub fn trials_csv(budget: &ErrorBudget) -> Result<String> {
    let sites: Vec<Position> = budget.theory.iter().map(|(x, _)| x).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "trial".to_string(),
        "distance".to_string(),
        "fidelity".to_string(),
    ];
    header.extend(sites.iter().map(|x| format!("counts_{x}")));
    w.write_record(&header)?;
    for t in &budget.trials {
        let mut row = vec![t.index.to_string(), p6(t.distance), p6(t.fidelity)];
        row.extend(
            sites
                .iter()
                .map(|x| t.counts.get(x).copied().unwrap_or(0).to_string()),
        );
        w.write_record(&row)?;
    }
    finish(w)
}

/// Real parts then imaginary parts of each reconstructed matrix.
pub fn tomography_csv(matrices: &[DensityMatrix], fidelities: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "input", "re00", "re01", "re10", "re11", "im00", "im01", "im10", "im11", "fidelity",
    ])?;
    for (i, (rho, f)) in matrices.iter().zip(fidelities).enumerate() {
        let m = &rho.matrix().0;
        let entries = [m[0][0], m[0][1], m[1][0], m[1][1]];
        let mut row = vec![(i + 1).to_string()];
        row.extend(entries.iter().map(|z| p6(z.re)));
        row.extend(entries.iter().map(|z| p6(z.im)));
        row.push(p6(*f));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `phi,eta_theory,eta_sampled`.
pub fn sweep_csv(rows: &[(f64, f64, f64)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["phi", "eta_theory", "eta_sampled"])?;
    for (phi, theory, sampled) in rows {
        w.write_record([format!("{phi}"), p6(*theory), p6(*sampled)])?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_format() {
        let d: PositionDistribution = [(-1, 0.0), (1, 0.25), (3, 0.75)].into_iter().collect();
        assert_eq!(
            distribution_csv(&d, None).unwrap(),
            "position,probability\n-1,0.000000\n1,0.250000\n3,0.750000\n"
        );
        let counts: BTreeMap<Position, u64> = [(1, 3), (3, 9)].into_iter().collect();
        assert_eq!(
            distribution_csv(&d, Some(&counts)).unwrap().lines().nth(1),
            Some("-1,0.000000,0")
        );
    }

    #[test]
    fn negative_zero_is_printed_plainly() {
        assert_eq!(p6(-1e-12), "0.000000");
        assert_eq!(p6(-0.5), "-0.500000");
    }
}
