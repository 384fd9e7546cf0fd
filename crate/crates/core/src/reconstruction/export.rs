use super::tensor::ReconReport;
use crate::tensor_algebra::CanonicalIter;
use serde_json::{json, Value};
use std::io::Write;

pub const REPORT_SCHEMA_VERSION: u64 = 1;

/// CSV with ζ, ω, then per canonical component re/im of recovered and
/// reference, then rel_error and family_cond.
pub fn write_recon_csv<W: Write>(out: W, report: &ReconReport) -> csv::Result<()> {
    let n = report.n;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..=n).map(|i| format!("zeta{i}")).collect();
    header.extend((1..=n).map(|i| format!("omega{i}")));
    for idx in CanonicalIter::new(n + 1, report.rank) {
        let key: String = idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("");
        for part in ["re_rec", "im_rec", "re_ref", "im_ref"] {
            header.push(format!("{part}_{key}"));
        }
    }
    header.push("rel_error".into());
    header.push("family_cond".into());
    w.write_record(&header)?;
    for p in &report.points {
        let mut rec: Vec<String> = p.zeta.iter().chain(&p.omega).map(f64::to_string).collect();
        for (a, b) in p.recovered.iter().zip(&p.reference) {
            rec.extend([a.re, a.im, b.re, b.im].map(|v| v.to_string()));
        }
        rec.push(p.rel_error.to_string());
        rec.push(p.family_cond.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Summary JSON: sign, aggregate error, point count and failures, plus
/// diagnostics.
pub fn report_json(report: &ReconReport) -> Value {
    json!({
        "version": REPORT_SCHEMA_VERSION,
        "sign": report.sign.sign,
        "sign_errors": {"plus": report.sign.error_plus, "minus": report.sign.error_minus},
        "psi_sign": report.psi_sign.as_ref().map(|s| s.sign),
        "rank": report.rank,
        "n": report.n,
        "aggregate_rel_error": report.aggregate_rel_error,
        "points": report.points.len(),
        "failures": report.failures,
        "input_trace_free": report.input_trace_free,
        "max_family_cond": report.max_family_cond,
        "max_spread": report.max_spread,
        "max_recovered_abs": report.max_recovered_abs,
    })
}
