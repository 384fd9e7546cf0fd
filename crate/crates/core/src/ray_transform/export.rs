use super::Ray;
use std::io::Write;

pub struct DataRow {
    pub ray: Ray,
    pub k: usize,
    pub value: f64,
}

/// CSV with columns t, x1..xn, omega1..omegan, k, value.
pub fn write_data_csv<W: Write>(out: W, n: usize, rows: &[DataRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("omega{i}")));
    header.push("k".into());
    header.push("value".into());
    w.write_record(&header)?;
    for row in rows {
        let mut rec: Vec<String> = row.ray.base.iter().map(f64::to_string).collect();
        rec.extend(row.ray.omega.iter().map(f64::to_string));
        rec.push(row.k.to_string());
        rec.push(row.value.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
