//! Report files.
//!
//! Points CSV: `x,y,true_theta_index,assigned_mode`, one row per symbol.
//! Sweep CSV: `M_order,snr_db,runs,successes,rate`, one row per grid cell.

use std::io::Write;

use super::{Classification, SweepRow};

pub fn write_points_csv<W: Write>(
    classification: &Classification,
    true_indices: &[usize],
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "true_theta_index", "assigned_mode"])?;
    let points = &classification.embedding.points;
    for (i, p) in points.iter().enumerate() {
        w.write_record([
            p[0].to_string(),
            p[1].to_string(),
            true_indices.get(i).map(|t| t.to_string()).unwrap_or_default(),
            classification.clusters.assignments[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_layout() {
        let rows = [SweepRow {
            m_order: 4,
            snr_db: 10.0,
            runs: 10,
            successes: 9,
            rate: 0.9,
        }];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "M_order,snr_db,runs,successes,rate\n4,10.0,10,9,0.9\n"
        );
    }
}
