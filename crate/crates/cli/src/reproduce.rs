//! Figure presets: every curve of a figure family written as its own CSV.

use std::path::{Path, PathBuf};

use cvmdi_core::{CaseId, Geometry, RinModel, Scenario};
use rayon::prelude::*;

use crate::error::CliError;
use crate::sweep::{emit, inclusive_grid, render, Evaluator, Point};

/// Fine grid for the symmetric geometry, whose range is a few km.
const SYMMETRIC_KM: (f64, f64, f64) = (0.05, 6.0, 0.05);
const ASYMMETRIC_KM: (f64, f64, f64) = (0.5, 50.0, 0.5);
const RIN_LEVELS: [f64; 3] = [0.1, 0.2, 0.4];

pub const FIGURES: [u32; 4] = [2, 3, 4, 5];

/// One output file: its name and the points it holds.
pub struct Curve {
    pub file: String,
    pub points: Vec<Point>,
}

fn distances(geometry: Geometry) -> Vec<f64> {
    let (from, to, step) = match geometry {
        Geometry::Symmetric => SYMMETRIC_KM,
        Geometry::Asymmetric => ASYMMETRIC_KM,
    };
    inclusive_grid(from, to, step).expect("preset grids are valid")
}

fn curve(file: String, sc: Scenario, case: CaseId, mode: RinModel) -> Curve {
    let points =
        distances(sc.geometry).into_iter().map(|l_ab_km| Point { scenario: sc, case, l_ab_km, mode }).collect();
    Curve { file, points }
}

/// Monitor taps for the transmittance surfaces.
pub fn eta_m_grid() -> Vec<f64> {
    let mut g = inclusive_grid(0.05, 0.95, 0.05).expect("preset grid is valid");
    g.push(0.999);
    g
}

/// Curves of one figure, built on `base` for every parameter the caption
/// does not fix.
pub fn curves(figure: u32, base: &Scenario) -> Result<Vec<Curve>, CliError> {
    let monitored = [("alice", CaseId::AliceOnly), ("bob", CaseId::BobOnly), ("both", CaseId::Both)];
    let with = |geometry, v_rin| {
        let mut sc = Scenario { geometry, ..*base };
        sc.params.v_rin = v_rin;
        sc
    };
    let mut out = Vec::new();
    match figure {
        2 => {
            let panels = ["a", "b", "c", "d", "e", "f"];
            let layouts = [Geometry::Symmetric, Geometry::Asymmetric]
                .into_iter()
                .flat_map(|g| monitored.iter().map(move |&(_, c)| (g, c)));
            for (panel, (geometry, case)) in panels.iter().zip(layouts) {
                out.push(curve(format!("fig2_{panel}_estimated.csv"), with(geometry, 0.0), case, RinModel::Estimated));
                for v_rin in RIN_LEVELS {
                    let file = format!("fig2_{panel}_vrin{v_rin}.csv");
                    out.push(curve(file, with(geometry, v_rin), case, RinModel::Realistic));
                }
            }
        }
        3 | 4 => {
            let (geometry, panel) =
                if figure == 3 { (Geometry::Symmetric, "sym") } else { (Geometry::Asymmetric, "asym") };
            for case in CaseId::ALL {
                let file = format!("fig{figure}_{panel}_{case}.csv");
                out.push(curve(file, with(geometry, 0.0), case, RinModel::Realistic));
            }
        }
        5 => {
            let sc = with(Geometry::Asymmetric, 0.0);
            for (panel, (name, case)) in ["a", "b", "c"].iter().zip(monitored) {
                let points = eta_m_grid()
                    .into_iter()
                    .flat_map(|eta| {
                        distances(Geometry::Asymmetric).into_iter().map(move |l_ab_km| {
                            Point { scenario: sc, case, l_ab_km, mode: RinModel::Realistic }.with_eta_m(eta)
                        })
                    })
                    .collect();
                out.push(Curve { file: format!("fig5_{panel}_{name}.csv"), points });
            }
        }
        other => return Err(CliError::Config(format!("unknown figure `{other}`, expected one of 2, 3, 4, 5"))),
    }
    Ok(out)
}

/// Writes every curve of `figure` into `dir` and returns the paths.
pub fn run(figure: u32, base: &Scenario, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let curves = curves(figure, base)?;
    let eval = Evaluator::substitution();
    let rendered =
        curves.par_iter().map(|c| eval.rows(&c.points).map(|rows| render(&rows))).collect::<Result<Vec<_>, _>>()?;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    curves
        .iter()
        .zip(rendered)
        .map(|(c, text)| {
            let path = dir.join(&c.file);
            emit(&text, Some(&path))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_counts() {
        let sc = Scenario::default();
        let count = |f| curves(f, &sc).unwrap().len();
        assert_eq!((count(2), count(3), count(4), count(5)), (24, 4, 4, 3));
        assert!(curves(6, &sc).is_err());
    }

    #[test]
    fn fig2_panels_follow_caption() {
        let c = curves(2, &Scenario::default()).unwrap();
        assert_eq!(c[0].file, "fig2_a_estimated.csv");
        assert_eq!(c[7].file, "fig2_b_vrin0.4.csv");
        assert_eq!(c[0].points[0].scenario.geometry, Geometry::Symmetric);
        assert_eq!(c[12].points[0].scenario.geometry, Geometry::Asymmetric);
        assert_eq!(c[23].points[0].case, CaseId::Both);
    }
}
