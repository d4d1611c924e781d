//! Plot-ready CSV tables, one per figure panel. Every file starts with a
//! header row naming its columns.

use std::path::{Path, PathBuf};

use dicke_core::protocols::CLASSICAL_FIDELITY;
use dicke_core::qstate::bitstring;
use dicke_core::sampler::poisson_error;

use crate::output::{fmt_sig, setting_label, write_csv};
use crate::{CliError, Report};

fn empty(what: &str) -> CliError {
    CliError::Numerical(format!("no plot data: {what} is empty"))
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Writes the tables derived from `report`; a report without rows is an error.
pub fn emit_plotdata(report: &Report, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    match report {
        Report::State(r) => {
            let n = r.num_qubits;
            let p = &r.populations;
            if p.z.is_empty() {
                return Err(empty("population table"));
            }
            let rows = (0..p.z.len())
                .map(|k| vec![bitstring(k, n), fmt_sig(p.z[k]), fmt_sig(p.x[k]), fmt_sig(p.y[k])])
                .collect::<Vec<_>>();
            paths.push(write_csv(out, "populations.csv", &["outcome", "p_z", "p_x", "p_y"], &rows)?);
        }
        Report::Simulate(r) => {
            if let Some(c) = &r.calibration {
                if c.points.is_empty() {
                    return Err(empty("calibration sweep"));
                }
                let rows = c
                    .points
                    .iter()
                    .map(|p| [p.lambda, p.eta, p.fidelity, p.p_exact, p.p_event].map(fmt_sig).to_vec())
                    .collect::<Vec<_>>();
                paths.push(write_csv(out, "calibration_sweep.csv", &["lambda", "eta", "fidelity", "p_exact", "p_event"], &rows)?);
            }
        }
        Report::Witness(r) => {
            if r.pair_correlations.is_empty() {
                return Err(empty("pair correlations"));
            }
            let rows = r
                .pair_correlations
                .iter()
                .map(|&(j, k, cx, cy, cz)| vec![j.to_string(), k.to_string(), fmt_sig(cx), fmt_sig(cy), fmt_sig(cz)])
                .collect::<Vec<_>>();
            paths.push(write_csv(out, "pair_correlations.csv", &["j", "k", "xx", "yy", "zz"], &rows)?);
        }
        Report::Bound(r) => {
            if r.points.is_empty() {
                return Err(empty("bound curve"));
            }
            let rows = r
                .points
                .iter()
                .map(|p| [p.alpha, p.estimate.value, p.state_value, p.gap].map(fmt_sig).to_vec())
                .collect::<Vec<_>>();
            paths.push(write_csv(out, "biseparable_region.csv", &["alpha", "bound", "state_value", "gap"], &rows)?);
        }
        Report::Scan(r) => {
            if r.points.is_empty() {
                return Err(empty("correlator scan"));
            }
            let rows = r.points.iter().map(|&(t, v, i)| [t, v, i].map(fmt_sig).to_vec()).collect::<Vec<_>>();
            paths.push(write_csv(out, "correlator_scan.csv", &["theta", "value", "ideal_dicke"], &rows)?);
        }
        Report::Lms(r) => {
            if r.settings == 0 {
                return Err(empty("setting plan"));
            }
        }
        Report::Sample(r) => {
            if r.histograms.is_empty() {
                return Err(empty("coincidence histograms"));
            }
            let mut rows = Vec::new();
            for (s, h) in r.histograms.iter().enumerate() {
                let n = h.setting.len();
                let label = setting_label(&h.setting);
                for (k, &c) in h.counts.iter().enumerate() {
                    let e = poisson_error(c);
                    rows.push(vec![
                        s.to_string(),
                        label.clone(),
                        bitstring(k, n),
                        c.to_string(),
                        fmt_sig(e.value),
                        e.flagged.to_string(),
                    ]);
                }
            }
            paths.push(write_csv(
                out,
                "coincidences.csv",
                &["setting", "axes", "outcome", "count", "poisson_error", "zero_count"],
                &rows,
            )?);
        }
        Report::Pairs(r) => {
            if r.result.pairs.is_empty() {
                return Err(empty("pair figures"));
            }
            let rows = r
                .result
                .pairs
                .iter()
                .map(|p| {
                    vec![
                        p.i.to_string(),
                        p.j.to_string(),
                        fmt_sig(p.msf),
                        fmt_sig(p.f_max),
                        fmt_sig(r.result.ideal_line),
                        fmt_sig(CLASSICAL_FIDELITY),
                    ]
                })
                .collect::<Vec<_>>();
            paths.push(write_csv(out, "pair_fmax.csv", &["i", "j", "msf", "f_max", "ideal", "classical"], &rows)?);
        }
        Report::Odt(r) => {
            if r.result.outcomes.is_empty() {
                return Err(empty("heralding outcomes"));
            }
            let rows = r
                .result
                .outcomes
                .iter()
                .map(|o| vec![o.pattern.clone(), fmt_sig(o.probability), fmt_sig(o.fidelity), o.success.to_string()])
                .collect::<Vec<_>>();
            paths.push(write_csv(out, "odt_outcomes.csv", &["pattern", "probability", "fidelity", "success"], &rows)?);
        }
        Report::Qss(r) => {
            let q = &r.result;
            let rows = vec![
                vec!["x".into(), q.x.sifted.to_string(), q.x.errors.to_string(), opt(q.x.error_rate)],
                vec!["y".into(), q.y.sifted.to_string(), q.y.errors.to_string(), opt(q.y.error_rate)],
                vec!["all".into(), q.sifted_bits.to_string(), q.errors.to_string(), fmt_sig(q.qber)],
            ];
            paths.push(write_csv(out, "qss_error_rates.csv", &["basis", "sifted", "errors", "error_rate"], &rows)?);
        }
        Report::Compare(r) => {
            if r.rows.is_empty() {
                return Err(empty("comparison table"));
            }
            let rows = r
                .rows
                .iter()
                .map(|row| {
                    let c = &row.comparison;
                    vec![
                        c.key.to_string(),
                        row.source.clone(),
                        fmt_sig(c.computed),
                        fmt_sig(c.reference),
                        opt(c.uncertainty),
                        fmt_sig(c.deviation),
                        opt(c.deviation_sigma),
                    ]
                })
                .collect::<Vec<_>>();
            paths.push(write_csv(
                out,
                "compare.csv",
                &["key", "source", "computed", "reference", "uncertainty", "deviation", "deviation_sigma"],
                &rows,
            )?);
        }
    }
    Ok(paths)
}
