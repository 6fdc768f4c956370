//! Parameter sweeps in `t` with continuation and branch tracking.

use serde::{Deserialize, Serialize};

use super::{solve_from, start_points, CriticalPoint, Family, SolveConfig};
use crate::error::{Error, Result};
use crate::functionals::FunctionalParams;

/// `steps` equally spaced values from `t_min` to `t_max` inclusive.
pub fn t_grid(t_min: f64, t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !t_min.is_finite() || !t_max.is_finite() {
        return Err(Error::InvalidParameter(
            "t grid needs finite bounds and steps ≥ 1".into(),
        ));
    }
    if steps == 1 {
        return Ok(vec![t_min]);
    }
    let h = (t_max - t_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                t_max
            } else {
                t_min + h * i as f64
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub status: String,
    pub branch: Option<usize>,
    pub point: Option<CriticalPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchEvent {
    pub t: f64,
    pub branch: usize,
    /// `start` on the first grid value, `split` when a point cannot be
    /// continued from any branch of the previous grid value.
    pub kind: String,
    /// Distance to the closest point of the previous grid value, if any.
    pub jump: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub s: f64,
    pub rows: Vec<SweepRow>,
    pub events: Vec<BranchEvent>,
}

fn key_distance(family: Family, a: &[f64], b: &[f64]) -> f64 {
    match (family.canonical_key(a), family.canonical_key(b)) {
        (Ok(ka), Ok(kb)) => ka
            .iter()
            .zip(&kb)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs())),
        _ => f64::INFINITY,
    }
}

/// Solves at each `t` in order, seeding every solve with the critical points
/// of the previous grid value. Failures become rows with a status.
pub fn sweep(family: Family, grid: &[f64], s: f64, config: &SolveConfig) -> Result<SweepResult> {
    config.validate()?;
    if grid.windows(2).any(|w| !(w[1] > w[0])) && grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(
            "t grid must be strictly monotone".into(),
        ));
    }
    let base = start_points(family, config);
    let mut rows = Vec::new();
    let mut events = Vec::new();
    // (branch id, params) of the previous grid value
    let mut prev: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut prev_t: Option<f64> = None;
    let mut next_branch = 0;

    for &t in grid {
        let p = FunctionalParams::new(t, s)?;
        let head = usize::from(config.symmetric_start);
        let mut starts = base[..head].to_vec();
        starts.extend(prev.iter().map(|(_, q)| q.iter().map(|x| x.ln()).collect()));
        starts.extend(base[head..].iter().cloned());

        let outcome = match solve_from(family, p, config, &starts) {
            Ok(o) => o,
            Err(e) => {
                rows.push(SweepRow {
                    t,
                    status: format!("error: {e}"),
                    branch: None,
                    point: None,
                });
                prev.clear();
                prev_t = Some(t);
                continue;
            }
        };
        if outcome.points.is_empty() {
            rows.push(SweepRow {
                t,
                status: "no_points".into(),
                branch: None,
                point: None,
            });
        }

        let limit = prev_t.map(|pt| 10.0 * (t - pt).abs());
        // match closest pairs first
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, cp) in outcome.points.iter().enumerate() {
            for (j, (_, q)) in prev.iter().enumerate() {
                pairs.push((key_distance(family, &cp.params, q), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut assigned: Vec<Option<usize>> = vec![None; outcome.points.len()];
        let mut used = vec![false; prev.len()];
        if let Some(limit) = limit {
            for &(d, i, j) in &pairs {
                if d < limit && assigned[i].is_none() && !used[j] {
                    assigned[i] = Some(prev[j].0);
                    used[j] = true;
                }
            }
        }
        let mut current = Vec::new();
        for (i, cp) in outcome.points.into_iter().enumerate() {
            let branch = match assigned[i] {
                Some(b) => b,
                None => {
                    let b = next_branch;
                    next_branch += 1;
                    let jump = pairs
                        .iter()
                        .filter(|(_, pi, _)| *pi == i)
                        .map(|(d, _, _)| *d)
                        .next();
                    events.push(BranchEvent {
                        t,
                        branch: b,
                        kind: if prev_t.is_none() { "start" } else { "split" }.into(),
                        jump,
                    });
                    b
                }
            };
            current.push((branch, cp.params.clone()));
            rows.push(SweepRow {
                t,
                status: "ok".into(),
                branch: Some(branch),
                point: Some(cp),
            });
        }
        prev = current;
        prev_t = Some(t);
    }
    Ok(SweepResult { s, rows, events })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = t_grid(-0.45, 0.75, 25).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], -0.45);
        assert_eq!(g[24], 0.75);
        assert!((g[1] - g[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn berger_sweep_tracks_two_branches() {
        let grid = t_grid(-0.3, 0.0, 4).unwrap();
        let res = sweep(Family::Berger, &grid, 0.0, &SolveConfig::default()).unwrap();
        assert_eq!(res.rows.len(), 8);
        assert!(res.events.iter().all(|e| e.kind == "start"));
        for r in &res.rows {
            let cp = r.point.as_ref().unwrap();
            if !cp.is_einstein {
                let x = (2.0 + 4.0 * r.t) / (3.0 + r.t);
                assert!((cp.params[0] - x).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_non_monotone_grid() {
        assert!(sweep(
            Family::Berger,
            &[0.0, 0.1, 0.05],
            0.0,
            &SolveConfig::default()
        )
        .is_err());
    }
}
