use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::sampling::sample_covariance_eigenvalues;

/// Real `p x T` panel of observations, one row per series.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    series_ids: Vec<String>,
    p: usize,
    t: usize,
    values: Vec<f64>,
}

impl Panel {
    pub fn new(series_ids: Vec<String>, p: usize, t: usize, values: Vec<f64>) -> Result<Self> {
        if p == 0 || t == 0 {
            return Err(Error::InvalidInput(format!("panel must be non-empty, got {p}x{t}")));
        }
        if series_ids.len() != p {
            return Err(Error::InvalidInput(format!(
                "{} series ids for {p} series",
                series_ids.len()
            )));
        }
        if values.len() != p * t {
            return Err(Error::InvalidInput(format!(
                "expected {} values for a {p}x{t} panel, got {}",
                p * t,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value for series {} at period {}",
                series_ids[pos / t],
                pos % t + 1
            )));
        }
        Ok(Self {
            series_ids,
            p,
            t,
            values,
        })
    }

    pub fn series_ids(&self) -> &[String] {
        &self.series_ids
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.t..(i + 1) * self.t]
    }

    pub fn scaled(&self, a: f64) -> Result<Self> {
        Self::new(
            self.series_ids.clone(),
            self.p,
            self.t,
            self.values.iter().map(|v| a * v).collect(),
        )
    }

    /// Reads delimiter-separated text: series id, then observations in time
    /// order. A first row whose observation cells are not all numeric is
    /// taken as a header.
    pub fn read_csv<R: Read>(reader: R, delimiter: u8) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut ids = Vec::new();
        let mut values = Vec::new();
        let mut width: Option<usize> = None;
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Format(e.to_string()))?;
            let line = line + 1;
            if record.len() < 2 {
                return Err(Error::Format(format!(
                    "line {line}: need a series id and at least one observation"
                )));
            }
            let cells: Vec<&str> = record.iter().skip(1).collect();
            let parsed: Vec<Option<f64>> = cells.iter().map(|c| parse_cell(c)).collect();
            if line == 1 && parsed.iter().all(Option::is_none) && cells.iter().all(|c| !c.is_empty()) {
                continue;
            }
            match width {
                None => width = Some(cells.len()),
                Some(w) if w != cells.len() => {
                    return Err(Error::Format(format!(
                        "line {line}: {} observations, expected {w}",
                        cells.len()
                    )))
                }
                _ => {}
            }
            for (j, (cell, v)) in cells.iter().zip(&parsed).enumerate() {
                match v {
                    Some(v) => values.push(*v),
                    None if cell.is_empty() => {
                        return Err(Error::Format(format!("line {line}, column {}: missing value", j + 2)))
                    }
                    None => {
                        return Err(Error::Format(format!(
                            "line {line}, column {}: cannot parse {cell:?} as a number",
                            j + 2
                        )))
                    }
                }
            }
            ids.push(record[0].to_string());
        }
        let t = width.ok_or_else(|| Error::Format("panel file contains no data rows".into()))?;
        let p = ids.len();
        Self::new(ids, p, t, values)
    }

    pub fn read_csv_path(path: impl AsRef<std::path::Path>, delimiter: u8) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file), delimiter)
    }

    /// Writes a header row `id,t1,...,tT` and one row per series; floats
    /// use the shortest representation that round-trips exactly.
    pub fn write_csv<W: Write>(&self, writer: W, delimiter: u8) -> Result<()> {
        let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
        let header: Vec<String> = std::iter::once("id".to_string())
            .chain((1..=self.t).map(|s| format!("t{s}")))
            .collect();
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.p {
            let row: Vec<String> = std::iter::once(self.series_ids[i].clone())
                .chain(self.row(i).iter().map(|v| format!("{v:?}")))
                .collect();
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn parse_cell(cell: &str) -> Option<f64> {
    if cell.is_empty() {
        return None;
    }
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// `p x n` complex panel with `n = T / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPanel {
    values: ComplexMatrix,
}

impl ComplexPanel {
    pub fn values(&self) -> &ComplexMatrix {
        &self.values
    }

    pub fn p(&self) -> usize {
        self.values.rows()
    }

    pub fn n(&self) -> usize {
        self.values.cols()
    }
}

/// Pairs period `t` with period `t + n`: `x_it + sqrt(-1) x_{i,t+n}`.
pub fn complexify(panel: &Panel) -> Result<ComplexPanel> {
    if !panel.t.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "complexification needs an even number of periods, got {}",
            panel.t
        )));
    }
    let n = panel.t / 2;
    let values = ComplexMatrix::from_fn(panel.p, n, |i, t| {
        let row = panel.row(i);
        Complex64::new(row[t], row[t + n])
    });
    Ok(ComplexPanel { values })
}

/// Inverse of [`complexify`].
pub fn split(cp: &ComplexPanel, series_ids: Vec<String>) -> Result<Panel> {
    let (p, n) = (cp.p(), cp.n());
    let mut values = Vec::with_capacity(2 * p * n);
    for i in 0..p {
        let row = cp.values.row(i);
        values.extend(row.iter().map(|z| z.re));
        values.extend(row.iter().map(|z| z.im));
    }
    Panel::new(series_ids, p, 2 * n, values)
}

/// Descending eigenvalues of `X X^* / n`, length `p`.
pub fn cov_eigs(cp: &ComplexPanel) -> Result<Vec<f64>> {
    sample_covariance_eigenvalues(&cp.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centering::SpectrumModel;
    use crate::sampling::{synth_factor_panel, FactorPanelSpec, SeedSpec};
    use proptest::prelude::*;

    fn panel(p: usize, t: usize, values: Vec<f64>) -> Panel {
        Panel::new((0..p).map(|i| format!("r{i}")).collect(), p, t, values).unwrap()
    }

    #[test]
    fn complexify_pairs_halves() {
        let cp = complexify(&panel(1, 4, vec![1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(cp.n(), 2);
        assert_eq!(cp.values()[(0, 0)], Complex64::new(1.0, 3.0));
        assert_eq!(cp.values()[(0, 1)], Complex64::new(2.0, 4.0));
    }

    #[test]
    fn zero_panel_and_odd_t() {
        let cp = complexify(&panel(2, 6, vec![0.0; 12])).unwrap();
        assert!(cp.values().entries().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(matches!(
            complexify(&panel(1, 3, vec![1.0, 2.0, 3.0])),
            Err(Error::InvalidInput(_))
        ));
    }

    proptest! {
        #[test]
        fn split_inverts_complexify(
            p in 1usize..5,
            n in 1usize..6,
            seed in any::<u64>(),
        ) {
            use rand::Rng;
            let mut rng = SeedSpec::new(seed, 0).rng();
            let values: Vec<f64> = (0..2 * p * n).map(|_| rng.random_range(-1e3..1e3)).collect();
            let pn = panel(p, 2 * n, values);
            let back = split(&complexify(&pn).unwrap(), pn.series_ids().to_vec()).unwrap();
            prop_assert_eq!(back, pn);
        }
    }

    #[test]
    fn rank_one_panel() {
        let mut values = vec![0.0; 3 * 8];
        for i in 0..3 {
            values[i * 8] = (i + 1) as f64;
        }
        let ev = cov_eigs(&complexify(&panel(3, 8, values)).unwrap()).unwrap();
        assert_eq!(ev.len(), 3);
        assert!((ev[0] - 14.0 / 4.0).abs() < 1e-12);
        assert!(ev[1].abs() < 1e-12 && ev[2].abs() < 1e-12);
    }

    #[test]
    fn scaling_panel_scales_eigenvalues_quadratically() {
        let spec = FactorPanelSpec::white(5, 7, 1, 1.0, 1.0).unwrap();
        let pn = synth_factor_panel(&spec, SeedSpec::new(4, 0)).unwrap();
        let a = cov_eigs(&complexify(&pn).unwrap()).unwrap();
        let b = cov_eigs(&complexify(&pn.scaled(3.0).unwrap()).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((9.0 * x - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn null_trace_matches_population_trace() {
        let ell = vec![2.0, 1.5, 1.0, 0.5];
        let model = SpectrumModel::new(ell.clone()).unwrap();
        let spec = FactorPanelSpec {
            p: 4,
            n_half: 6,
            k: 0,
            loading_scale: 1.0,
            factor_variance: 1.0,
            idio_spectrum: model,
        };
        let reps = 4000;
        let mean: f64 = (0..reps)
            .map(|r| {
                let pn = synth_factor_panel(&spec, SeedSpec::new(21, r)).unwrap();
                cov_eigs(&complexify(&pn).unwrap()).unwrap().iter().sum::<f64>()
            })
            .sum::<f64>()
            / reps as f64;
        // Var of the trace is sum(ell^2)/n = 7.5/6 per draw.
        let se = (7.5f64 / 6.0 / reps as f64).sqrt();
        assert!((mean - 5.0).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let pn = panel(2, 4, vec![0.1, -2.5e-300, 3.0, 1.0 / 3.0, 1e300, 0.0, -0.0, 7.25]);
        let mut buf = Vec::new();
        pn.write_csv(&mut buf, b',').unwrap();
        let back = Panel::read_csv(buf.as_slice(), b',').unwrap();
        assert_eq!(back.series_ids(), pn.series_ids());
        for (a, b) in back.values().iter().zip(pn.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn csv_without_header_and_other_delimiter() {
        let text = "a;1.5;2.0\nb;-1.0;4.0\n";
        let pn = Panel::read_csv(text.as_bytes(), b';').unwrap();
        assert_eq!(pn.p(), 2);
        assert_eq!(pn.t(), 2);
        assert_eq!(pn.values(), &[1.5, 2.0, -1.0, 4.0]);
    }

    #[test]
    fn csv_rejects_missing_ragged_and_garbage() {
        let missing = "a,1.0,,3.0\n";
        assert!(matches!(
            Panel::read_csv(missing.as_bytes(), b','),
            Err(Error::Format(_))
        ));
        let ragged = "a,1.0,2.0\nb,1.0\n";
        assert!(matches!(
            Panel::read_csv(ragged.as_bytes(), b','),
            Err(Error::Format(_))
        ));
        let garbage = "a,1.0,2.0\nb,1.0,NA\n";
        assert!(matches!(
            Panel::read_csv(garbage.as_bytes(), b','),
            Err(Error::Format(_))
        ));
        assert!(Panel::read_csv("".as_bytes(), b',').is_err());
        let comma_decimal = "a;1,5;2.0\n";
        assert!(Panel::read_csv(comma_decimal.as_bytes(), b';').is_err());
    }
}
