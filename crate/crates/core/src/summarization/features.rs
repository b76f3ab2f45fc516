use std::fs::File;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::linalg::SymMatrix;

/// One feature vector per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatures {
    rows: Vec<Vec<f64>>,
}

impl FrameFeatures {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::EmptyFeatures);
        };
        let p = first.len();
        if p == 0 {
            return Err(Error::EmptyFeatures);
        }
        for (frame, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::RaggedRow {
                    row: frame,
                    found: row.len(),
                    expected: p,
                });
            }
            if let Some(dim) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature { frame, dim });
            }
        }
        Ok(Self { rows })
    }

    /// Reads comma separated reals, one frame per row. A first row that does
    /// not parse as numbers is taken as a header.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(File::open(path)?);
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(|t| t.trim().parse::<f64>()).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(_) => {
                    return Err(Error::MalformedLine {
                        line: i + 1,
                        content: record.iter().collect::<Vec<_>>().join(","),
                    })
                }
            }
        }
        Self::new(rows)
    }

    pub fn frames(&self) -> usize {
        self.rows.len()
    }

    pub fn dims(&self) -> usize {
        self.rows[0].len()
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .zip(&self.rows[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Frames drawn around `scenes` random centres laid out in consecutive
    /// runs, as a stand-in for decoded video.
    pub fn synthetic<R: Rng + ?Sized>(
        frames: usize,
        dims: usize,
        scenes: usize,
        noise: f64,
        rng: &mut R,
    ) -> Self {
        let scenes = scenes.clamp(1, frames.max(1));
        let centres: Vec<Vec<f64>> = (0..scenes)
            .map(|_| (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let rows = (0..frames)
            .map(|f| {
                let c = &centres[f * scenes / frames];
                c.iter()
                    .map(|x| x + noise * rng.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        Self::new(rows).expect("finite synthetic features")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    Fixed(f64),
    /// Median of all pairwise Euclidean distances.
    Median,
}

/// Median pairwise distance; 1 when there are no pairs or the median is 0.
pub fn median_bandwidth(features: &FrameFeatures) -> f64 {
    let n = features.frames();
    let mut d: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| features.squared_distance(i, j).sqrt())
        .collect();
    if d.is_empty() {
        return 1.0;
    }
    d.sort_by(f64::total_cmp);
    let mid = d.len() / 2;
    let median = if d.len() % 2 == 1 {
        d[mid]
    } else {
        0.5 * (d[mid - 1] + d[mid])
    };
    if median > 0.0 {
        median
    } else {
        1.0
    }
}

/// Symmetric kernel matrix `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    x: SymMatrix,
}

impl GramMatrix {
    pub fn new(x: SymMatrix) -> Result<Self> {
        if let Some((row, col)) = x.asymmetry(1e-12) {
            return Err(Error::NotSymmetric { row, col });
        }
        Ok(Self { x })
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn x(&self) -> &SymMatrix {
        &self.x
    }

    /// `A = I + X`.
    pub fn a(&self) -> SymMatrix {
        self.x.shifted_identity()
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::new(SymMatrix::load_csv(path)?)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.x.save_csv(path)
    }
}

/// `X_ij = exp(−‖x_i − x_j‖² / (2h²))`. Returns the matrix and the `h` used.
pub fn gaussian_gram(features: &FrameFeatures, bandwidth: Bandwidth) -> Result<(GramMatrix, f64)> {
    let h = match bandwidth {
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
        Bandwidth::Fixed(h) => return Err(Error::InvalidBandwidth(h)),
        Bandwidth::Median => median_bandwidth(features),
    };
    let n = features.frames();
    let mut x = SymMatrix::zeros(n);
    for i in 0..n {
        x.set(i, i, 1.0);
        for j in i + 1..n {
            let v = (-features.squared_distance(i, j) / (2.0 * h * h)).exp();
            x.set(i, j, v);
            x.set(j, i, v);
        }
    }
    Ok((GramMatrix { x }, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        let h = 0.7;
        let f = FrameFeatures::new(vec![
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![h * 2f64.sqrt(), 0.0],
        ])
        .unwrap();
        let (g, used) = gaussian_gram(&f, Bandwidth::Fixed(h)).unwrap();
        assert_eq!(used, h);
        assert_eq!(g.x().get(0, 1), 1.0);
        assert!((g.x().get(0, 2) - (-1.0f64).exp()).abs() < 1e-15);
        for i in 0..3 {
            assert_eq!(g.x().get(i, i), 1.0);
        }
        assert!(g.x().asymmetry(0.0).is_none());
    }

    #[test]
    fn validation() {
        assert_eq!(
            FrameFeatures::new(vec![]).unwrap_err(),
            Error::EmptyFeatures
        );
        assert_eq!(
            FrameFeatures::new(vec![vec![1.0], vec![f64::NAN]]).unwrap_err(),
            Error::NonFiniteFeature { frame: 1, dim: 0 }
        );
        assert!(matches!(
            FrameFeatures::new(vec![vec![1.0, 2.0], vec![1.0]]),
            Err(Error::RaggedRow { row: 1, .. })
        ));
        let f = FrameFeatures::new(vec![vec![1.0]]).unwrap();
        assert!(gaussian_gram(&f, Bandwidth::Fixed(0.0)).is_err());
    }

    #[test]
    fn median_heuristic() {
        let f = FrameFeatures::new(vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        // distances 1, 2, 3
        assert_eq!(median_bandwidth(&f), 2.0);
        let same = FrameFeatures::new(vec![vec![2.0], vec![2.0]]).unwrap();
        assert_eq!(median_bandwidth(&same), 1.0);
    }

    #[test]
    fn csv_with_and_without_header() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        std::fs::write(&a, "f1,f2\n1.0,2.0\n3.5,-1\n").unwrap();
        let b = dir.path().join("b.csv");
        std::fs::write(&b, "1.0,2.0\n3.5,-1\n").unwrap();
        let fa = FrameFeatures::load_csv(&a).unwrap();
        assert_eq!(fa, FrameFeatures::load_csv(&b).unwrap());
        assert_eq!((fa.frames(), fa.dims()), (2, 2));
        let c = dir.path().join("c.csv");
        std::fs::write(&c, "1.0,2.0\n3.5,x\n").unwrap();
        assert!(matches!(
            FrameFeatures::load_csv(&c),
            Err(Error::MalformedLine { line: 2, .. })
        ));
    }
}
