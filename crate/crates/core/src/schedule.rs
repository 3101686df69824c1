//! Annealing schedules `(Γ(s), 𝒥(s))` on the normalized time `s ∈ [0, 1]`.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("cannot read schedule {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("schedule row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("schedule needs at least two knots, found {0}")]
    TooFewKnots(usize),
    #[error("s = {0} lies outside [0, 1]")]
    OutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct Knot {
    pub s: f64,
    pub gamma: f64,
    pub jcal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    knots: Vec<Knot>,
}

const DEFAULT_KNOTS: usize = 1001;
const ENDPOINT_TOL: f64 = 1e-12;

/// `Γ(s) = cos²(πs/2)`, `𝒥(s) = sin²(πs/2)` on 1001 evenly spaced knots.
pub fn default_schedule() -> Schedule {
    let knots = (0..DEFAULT_KNOTS)
        .map(|i| {
            let s = i as f64 / (DEFAULT_KNOTS - 1) as f64;
            let (sin, cos) = (FRAC_PI_2 * s).sin_cos();
            let (gamma, jcal) = match i {
                0 => (1.0, 0.0),
                i if i == DEFAULT_KNOTS - 1 => (0.0, 1.0),
                _ => (cos * cos, sin * sin),
            };
            Knot { s, gamma, jcal }
        })
        .collect();
    Schedule { knots }
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<Schedule, ScheduleError> {
    let path = path.as_ref();
    let io = |reason: String| ScheduleError::Io {
        path: path.display().to_string(),
        reason,
    };
    let file = std::fs::File::open(path).map_err(|e| io(e.to_string()))?;
    Schedule::from_reader(file)
}

impl Schedule {
    /// Parses `s,gamma,jcal` CSV. Row numbers in errors count the header as row 1.
    pub fn from_reader<R: std::io::Read>(r: R) -> Result<Schedule, ScheduleError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let mut knots = Vec::new();
        for (i, rec) in reader.deserialize::<Knot>().enumerate() {
            let row = i + 2;
            let knot = rec.map_err(|e| ScheduleError::Row {
                row,
                reason: e.to_string(),
            })?;
            knots.push(knot);
        }
        Schedule::from_knots(knots)
    }

    /// Validates the knots and rescales so that `Γ(0) = 𝒥(1) = 1`.
    pub fn from_knots(mut knots: Vec<Knot>) -> Result<Schedule, ScheduleError> {
        if knots.len() < 2 {
            return Err(ScheduleError::TooFewKnots(knots.len()));
        }
        let bad = |row: usize, reason: String| ScheduleError::Row { row: row + 2, reason };
        for (i, k) in knots.iter().enumerate() {
            if !(k.s.is_finite() && k.gamma.is_finite() && k.jcal.is_finite()) {
                return Err(bad(i, "non-finite value".into()));
            }
            if k.gamma < 0.0 || k.jcal < 0.0 {
                return Err(bad(i, "negative gamma or jcal".into()));
            }
            if i > 0 && k.s <= knots[i - 1].s {
                return Err(bad(i, format!("s = {} does not increase", k.s)));
            }
        }
        let last = knots.len() - 1;
        if knots[0].s.abs() > ENDPOINT_TOL {
            return Err(bad(0, format!("first knot must have s = 0, got {}", knots[0].s)));
        }
        if (knots[last].s - 1.0).abs() > ENDPOINT_TOL {
            return Err(bad(last, format!("last knot must have s = 1, got {}", knots[last].s)));
        }
        let (g0, j1) = (knots[0].gamma, knots[last].jcal);
        if g0 <= 0.0 || j1 <= 0.0 {
            return Err(bad(0, "gamma(0) and jcal(1) must be positive".into()));
        }
        for (i, w) in knots.windows(2).enumerate() {
            if w[1].gamma > w[0].gamma {
                return Err(bad(i + 1, "gamma increases".into()));
            }
            if w[1].jcal < w[0].jcal {
                return Err(bad(i + 1, "jcal decreases".into()));
            }
        }
        if knots[last].gamma > ENDPOINT_TOL * g0 {
            return Err(bad(last, "gamma(1) must be 0".into()));
        }
        if knots[0].jcal > ENDPOINT_TOL * j1 {
            return Err(bad(0, "jcal(0) must be 0".into()));
        }
        knots[0].s = 0.0;
        knots[last].s = 1.0;
        knots[last].gamma = 0.0;
        knots[0].jcal = 0.0;
        for k in &mut knots {
            k.gamma /= g0;
            k.jcal /= j1;
        }
        Ok(Schedule { knots })
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    /// Linear interpolation between the bracketing knots.
    pub fn evaluate(&self, s: f64) -> Result<(f64, f64), ScheduleError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(ScheduleError::OutOfRange(s));
        }
        let i = self.knots.partition_point(|k| k.s <= s);
        if i == 0 {
            let k = self.knots[0];
            return Ok((k.gamma, k.jcal));
        }
        let a = self.knots[i - 1];
        if a.s == s || i == self.knots.len() {
            return Ok((a.gamma, a.jcal));
        }
        let b = self.knots[i];
        let t = (s - a.s) / (b.s - a.s);
        Ok((
            a.gamma + t * (b.gamma - a.gamma),
            a.jcal + t * (b.jcal - a.jcal),
        ))
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["s", "gamma", "jcal"])?;
        for k in &self.knots {
            out.write_record([k.s.to_string(), k.gamma.to_string(), k.jcal.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_boundaries() {
        let s = default_schedule();
        assert_eq!(s.knots().len(), 1001);
        assert_eq!(s.evaluate(0.0).unwrap(), (1.0, 0.0));
        let (g, j) = s.evaluate(1.0).unwrap();
        assert_abs_diff_eq!(g, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j, 1.0, epsilon = 1e-15);
        let (g, j) = s.evaluate(0.5).unwrap();
        assert_abs_diff_eq!(g, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(j, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn default_quarter_point() {
        let (g, j) = default_schedule().evaluate(0.25).unwrap();
        let c = (std::f64::consts::PI / 8.0).cos();
        assert_abs_diff_eq!(g, c * c, epsilon = 1e-12);
        assert_abs_diff_eq!(j, 1.0 - c * c, epsilon = 1e-12);
        assert_abs_diff_eq!(g, 0.8536, epsilon = 1e-4);
    }

    #[test]
    fn two_row_file_is_linear() {
        let s = Schedule::from_reader("s,gamma,jcal\n0,1,0\n1,0,1\n".as_bytes()).unwrap();
        for x in [0.1, 0.37, 0.5, 0.99] {
            let (g, j) = s.evaluate(x).unwrap();
            assert_abs_diff_eq!(g, 1.0 - x, epsilon = 1e-15);
            assert_abs_diff_eq!(j, x, epsilon = 1e-15);
        }
    }

    #[test]
    fn midpoint_is_mean_and_knots_exact() {
        let text = "s,gamma,jcal\n0,1,0\n0.3,0.8,0.1\n0.7,0.2,0.6\n1,0,1\n";
        let s = Schedule::from_reader(text.as_bytes()).unwrap();
        assert_eq!(s.evaluate(0.3).unwrap(), (0.8, 0.1));
        let (g, j) = s.evaluate(0.5).unwrap();
        assert_abs_diff_eq!(g, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(j, 0.35, epsilon = 1e-15);
    }

    #[test]
    fn unsorted_rows_rejected_with_row_number() {
        let text = "s,gamma,jcal\n0,1,0\n0.6,0.5,0.5\n0.4,0.4,0.6\n1,0,1\n";
        match Schedule::from_reader(text.as_bytes()) {
            Err(ScheduleError::Row { row, .. }) => assert_eq!(row, 4),
            other => panic!("expected row error, got {other:?}"),
        }
    }

    #[test]
    fn gamma_normalized() {
        let s = Schedule::from_reader("s,gamma,jcal\n0,2,0\n0.5,1,1\n1,0,4\n".as_bytes()).unwrap();
        assert_eq!(s.evaluate(0.0).unwrap(), (1.0, 0.0));
        assert_eq!(s.evaluate(0.5).unwrap(), (0.5, 0.25));
        assert_eq!(s.evaluate(1.0).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "s,gamma,jcal\n0.1,1,0\n1,0,1\n",
            "s,gamma,jcal\n0,1,0\n0.9,0,1\n",
            "s,gamma,jcal\n0,1,0\n0.5,-0.1,0.5\n1,0,1\n",
            "s,gamma,jcal\n0,1,0\n",
            "s,gamma,jcal\n0,1,0\nx,0,1\n",
        ] {
            assert!(Schedule::from_reader(text.as_bytes()).is_err(), "{text}");
        }
        assert!(matches!(
            default_schedule().evaluate(1.5),
            Err(ScheduleError::OutOfRange(_))
        ));
        assert!(default_schedule().evaluate(-0.01).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = default_schedule();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = Schedule::from_reader(&buf[..]).unwrap();
        assert_eq!(back.knots().len(), 1001);
        for (a, b) in s.knots().iter().zip(back.knots()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_schedule("/nonexistent/sched.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/sched.csv"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn interpolant_stays_between_knots(s in 0.0f64..=1.0) {
                let sched = default_schedule();
                let (g, j) = sched.evaluate(s).unwrap();
                let i = sched.knots().partition_point(|k| k.s <= s).clamp(1, sched.knots().len() - 1);
                let (a, b) = (sched.knots()[i - 1], sched.knots()[i]);
                prop_assert!(g <= a.gamma + 1e-15 && g >= b.gamma - 1e-15);
                prop_assert!(j >= a.jcal - 1e-15 && j <= b.jcal + 1e-15);
            }

            #[test]
            fn interpolant_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
                let sched = default_schedule();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let (g0, j0) = sched.evaluate(lo).unwrap();
                let (g1, j1) = sched.evaluate(hi).unwrap();
                prop_assert!(g1 <= g0 + 1e-15);
                prop_assert!(j1 >= j0 - 1e-15);
            }
        }
    }
}
