//! Sample point selection.

use rand::Rng;
use weylscope_core::metric::ChartMetric;
use weylscope_core::random::seeded;

use crate::error::CliError;
use crate::spec::SamplePoints;

pub const DEFAULT_GRID: usize = 5;

/// Parsed `--points` argument.
#[derive(Debug, Clone, PartialEq)]
pub enum PointsArg {
    /// Use the spec's `sample_points`, or the box center.
    Spec,
    /// `K` points on the box diagonal; bare `grid` means [`DEFAULT_GRID`].
    Grid(usize),
    /// Full `K^n` tensor grid.
    Lattice(usize),
    /// `N` uniform points drawn with the run seed.
    Random(usize),
    List(Vec<Vec<f64>>),
}

impl std::str::FromStr for PointsArg {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let count = |v: &str| -> Result<usize, CliError> {
            match v.parse::<usize>() {
                Ok(k) if k > 0 => Ok(k),
                _ => Err(CliError::Points(format!("expected a positive count in '{s}'"))),
            }
        };
        let s = s.trim();
        if s == "spec" {
            return Ok(PointsArg::Spec);
        }
        if s == "grid" {
            return Ok(PointsArg::Grid(DEFAULT_GRID));
        }
        if let Some(k) = s.strip_prefix("grid:") {
            return Ok(PointsArg::Grid(count(k)?));
        }
        if let Some(k) = s.strip_prefix("lattice:") {
            return Ok(PointsArg::Lattice(count(k)?));
        }
        if let Some(k) = s.strip_prefix("random:") {
            return Ok(PointsArg::Random(count(k)?));
        }
        let list = s
            .split(';')
            .map(|p| {
                p.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::Points(format!("'{}' is not a number", v.trim())))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PointsArg::List(list))
    }
}

/// Interior fraction of each box side used by generated grids.
const MARGIN: f64 = 0.1;

fn along(lo: f64, hi: f64, k: usize, count: usize) -> f64 {
    let t = if count == 1 {
        0.5
    } else {
        MARGIN + (1.0 - 2.0 * MARGIN) * k as f64 / (count - 1) as f64
    };
    lo + t * (hi - lo)
}

fn diagonal(m: &ChartMetric, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| m.bounds().iter().map(|(lo, hi)| along(*lo, *hi, k, count)).collect())
        .collect()
}

pub fn resolve_points(
    arg: &PointsArg,
    spec_points: Option<&SamplePoints>,
    m: &ChartMetric,
    seed: u64,
) -> Result<Vec<Vec<f64>>, CliError> {
    let n = m.dim();
    let points = match arg {
        PointsArg::Spec => match spec_points {
            None => vec![m.center()],
            Some(SamplePoints::Grid { grid }) => diagonal(m, *grid),
            Some(SamplePoints::List(l)) => l.clone(),
        },
        PointsArg::Grid(k) => diagonal(m, *k),
        PointsArg::Lattice(k) => {
            let total = k.checked_pow(n as u32).filter(|t| *t <= 100_000);
            let total = total.ok_or_else(|| CliError::Points(format!("lattice:{k} is too large in dimension {n}")))?;
            (0..total)
                .map(|mut idx| {
                    m.bounds()
                        .iter()
                        .map(|(lo, hi)| {
                            let c = idx % k;
                            idx /= k;
                            along(*lo, *hi, c, *k)
                        })
                        .collect()
                })
                .collect()
        }
        PointsArg::Random(count) => {
            let mut rng = seeded(seed);
            (0..*count)
                .map(|_| {
                    m.bounds()
                        .iter()
                        .map(|(lo, hi)| {
                            let (a, b) = (lo + MARGIN * (hi - lo), hi - MARGIN * (hi - lo));
                            rng.gen_range(a..b)
                        })
                        .collect()
                })
                .collect()
        }
        PointsArg::List(l) => l.clone(),
    };
    if points.is_empty() {
        return Err(CliError::Points("no points selected".into()));
    }
    for p in &points {
        if p.len() != n {
            return Err(CliError::Points(format!("point {p:?} has {} coordinates, expected {n}", p.len())));
        }
        if !m.contains(p) {
            return Err(CliError::Points(format!("point {p:?} lies outside the coordinate box")));
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use weylscope_core::catalog::{catalog_metric, CatalogParams};

    fn flat() -> ChartMetric {
        catalog_metric("flat", &CatalogParams::default()).unwrap()
    }

    #[test]
    fn parses_every_form() {
        assert_eq!("spec".parse::<PointsArg>().unwrap(), PointsArg::Spec);
        assert_eq!("grid:5".parse::<PointsArg>().unwrap(), PointsArg::Grid(5));
        assert_eq!("grid".parse::<PointsArg>().unwrap(), PointsArg::Grid(DEFAULT_GRID));
        assert_eq!("lattice:2".parse::<PointsArg>().unwrap(), PointsArg::Lattice(2));
        assert_eq!("random:3".parse::<PointsArg>().unwrap(), PointsArg::Random(3));
        assert_eq!(
            "0,0,0,0; 0.1,0.2,0.3,0.4".parse::<PointsArg>().unwrap(),
            PointsArg::List(vec![vec![0.0; 4], vec![0.1, 0.2, 0.3, 0.4]])
        );
        assert!("grid:0".parse::<PointsArg>().is_err());
        assert!("1,a".parse::<PointsArg>().is_err());
    }

    #[test]
    fn generated_points_stay_inside() {
        let m = flat();
        assert_eq!(resolve_points(&PointsArg::Grid(5), None, &m, 0).unwrap().len(), 5);
        assert_eq!(resolve_points(&PointsArg::Lattice(2), None, &m, 0).unwrap().len(), 16);
        let a = resolve_points(&PointsArg::Random(4), None, &m, 7).unwrap();
        assert_eq!(a, resolve_points(&PointsArg::Random(4), None, &m, 7).unwrap());
        assert_eq!(resolve_points(&PointsArg::Spec, None, &m, 0).unwrap(), vec![vec![0.0; 4]]);
    }

    #[test]
    fn bad_points_are_rejected() {
        let m = flat();
        assert!(resolve_points(&PointsArg::List(vec![vec![0.0; 3]]), None, &m, 0).is_err());
        assert!(resolve_points(&PointsArg::List(vec![vec![2.0, 0.0, 0.0, 0.0]]), None, &m, 0).is_err());
    }
}
