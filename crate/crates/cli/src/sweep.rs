use std::f64::consts::PI;
use std::io::Write;

use qrc_core::cgp::{
    cgp_closed_form, cgp_estimate, ut_bound_branches, utheta_bound_branches, CgpFamily, CgpKind,
};
use qrc_core::gates::{standard_gate, GateName};
use qrc_core::linalg::LogBase;

use crate::error::usage;
use crate::format::float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Utheta,
    Ut,
}

impl Family {
    fn domain(self) -> (f64, f64) {
        match self {
            Family::Utheta => (0.0, PI),
            Family::Ut => (0.0, 1.0),
        }
    }
}

/// `LO:HI:STEPS`, giving `STEPS + 1` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    pub fn parse(s: &str) -> anyhow::Result<Range> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(usage(format!("range `{s}` is not LO:HI:STEPS")));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| usage(format!("range `{s}`: `{x}` is not a number")));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let steps: usize =
            steps.trim().parse().map_err(|_| usage(format!("range `{s}`: STEPS must be a positive integer")))?;
        if steps == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(usage(format!("range `{s}`: need finite LO <= HI and STEPS >= 1")));
        }
        Ok(Range { lo, hi, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| if i == self.steps { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / self.steps as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub cgp_s_closed: f64,
    pub cgp_r_closed_nats: f64,
    pub bound_f_or_g: f64,
    pub bound_branch_s: f64,
    pub bound_branch_r: f64,
    pub mc: Option<McColumns>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McColumns {
    pub cgp_s: f64,
    pub cgp_r_nats: f64,
    pub cgp_s_std_error: f64,
    pub cgp_r_std_error: f64,
}

pub const HEADER: [&str; 10] = [
    "param",
    "cgp_s_closed",
    "cgp_r_closed_nats",
    "bound_f_or_g",
    "bound_branch_s",
    "bound_branch_r",
    "cgp_s_mc",
    "cgp_r_mc_nats",
    "cgp_s_std_error",
    "cgp_r_std_error",
];

/// Closed forms and bound branches at every point; Monte Carlo columns when
/// `samples > 0`, with point `i` seeded by `seed + i`.
pub fn sweep(family: Family, range: Range, samples: usize, seed: u64) -> anyhow::Result<Vec<SweepRow>> {
    let (lo, hi) = family.domain();
    if range.lo < lo || range.hi > hi {
        return Err(usage(format!("range [{}, {}] leaves the parameter domain [{lo}, {hi}]", range.lo, range.hi)));
    }
    range
        .points()
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let (fam, gate) = match family {
                Family::Utheta => (CgpFamily::Utheta(p), GateName::Utheta(p)),
                Family::Ut => (CgpFamily::Ut(p), GateName::Ut(p)),
            };
            let (bs, br) = match family {
                Family::Utheta => utheta_bound_branches(p)?,
                Family::Ut => ut_bound_branches(p)?,
            };
            let bound = match family {
                Family::Utheta => bs.max(br),
                Family::Ut => br,
            };
            let mc = if samples > 0 {
                let u = standard_gate(gate)?;
                let s_seed = seed.wrapping_add(i as u64);
                let s = cgp_estimate(&u, CgpKind::Skew, samples, s_seed, LogBase::E)?;
                let r = cgp_estimate(&u, CgpKind::RelEnt, samples, s_seed, LogBase::E)?;
                Some(McColumns { cgp_s: s.mean, cgp_r_nats: r.mean, cgp_s_std_error: s.std_error, cgp_r_std_error: r.std_error })
            } else {
                None
            };
            Ok(SweepRow {
                param: p,
                cgp_s_closed: cgp_closed_form(fam, CgpKind::Skew)?,
                cgp_r_closed_nats: cgp_closed_form(fam, CgpKind::RelEnt)?,
                bound_f_or_g: bound,
                bound_branch_s: bs,
                bound_branch_r: br,
                mc,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        let mut rec = vec![
            float(r.param),
            float(r.cgp_s_closed),
            float(r.cgp_r_closed_nats),
            float(r.bound_f_or_g),
            float(r.bound_branch_s),
            float(r.bound_branch_r),
        ];
        match r.mc {
            Some(m) => rec.extend([m.cgp_s, m.cgp_r_nats, m.cgp_s_std_error, m.cgp_r_std_error].map(float)),
            None => rec.extend(std::iter::repeat_n(String::new(), 4)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_grammar() {
        assert_eq!(Range::parse("0:1:4").unwrap().points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        for bad in ["0:1", "a:1:2", "1:0:3", "0:1:0", "0:1:-2", "0:1:2:3"] {
            assert!(Range::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn endpoint_values() {
        let r = sweep(Family::Ut, Range::parse("0:1:10").unwrap(), 0, 0).unwrap();
        assert_eq!(r[0].bound_f_or_g, 0.0);
        assert_eq!(r[10].bound_f_or_g, 0.0);
        assert!((r[3].bound_f_or_g - 0.0149709).abs() < 1e-7);
        let r = sweep(Family::Utheta, Range { lo: PI / 2.0, hi: PI / 2.0, steps: 1 }, 0, 0).unwrap();
        assert!(r[0].bound_f_or_g.abs() < 1e-12);
        assert!(sweep(Family::Ut, Range::parse("0:2:2").unwrap(), 0, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = sweep(Family::Utheta, Range::parse("0.5:0.7:2").unwrap(), 1000, 4).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], HEADER.join(","));
        assert_eq!(lines.len(), 4);
        assert!(lines[1].split(',').all(|f| !f.is_empty()));
    }
}
