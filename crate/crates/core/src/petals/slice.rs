use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;

use super::orbit::{Classification, Classifier, OrbitConfig, VerticalMap, Verdict};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest accepted grid side.
pub const MAX_RESOLUTION: usize = 4096;

/// Square sampling of `[re0, re1] x [im0, im1]` at `res x res` pixel centers.
/// Row 0 is the top (`im` near `im1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
    pub res: usize,
}

impl Grid {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64, res: usize) -> Result<Self> {
        let finite = [re0, re1, im0, im1].iter().all(|x| x.is_finite());
        if !finite || re0 >= re1 || im0 >= im1 {
            return Err(Error::Malformed(format!("degenerate grid rectangle [{re0}, {re1}] x [{im0}, {im1}]")));
        }
        if res == 0 || res > MAX_RESOLUTION {
            return Err(Error::Precondition(format!("grid resolution {res} outside 1..={MAX_RESOLUTION}")));
        }
        Ok(Self { re0, re1, im0, im1, res })
    }

    pub fn len(&self) -> usize {
        self.res * self.res
    }

    pub fn is_empty(&self) -> bool {
        self.res == 0
    }

    pub fn point<T: Real>(&self, row: usize, col: usize) -> Complex<T> {
        let n = self.res as f64;
        let re = self.re0 + (self.re1 - self.re0) * (col as f64 + 0.5) / n;
        let im = self.im1 - (self.im1 - self.im0) * (row as f64 + 0.5) / n;
        Complex::new(T::of(re), T::of(im))
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `"re0,re1,im0,im1,res"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::Malformed(format!("grid needs 5 comma-separated fields, got {}", parts.len())));
        }
        let num = |i: usize| -> Result<f64> {
            parts[i]
                .parse()
                .map_err(|_| Error::Malformed(format!("grid field {:?} is not a number", parts[i])))
        };
        let res = parts[4]
            .parse()
            .map_err(|_| Error::Malformed(format!("grid resolution {:?} is not an integer", parts[4])))?;
        Grid::new(num(0)?, num(1)?, num(2)?, num(3)?, res)
    }
}

/// Integer verdict code per pixel: 0 undecided, 1 escape, `100 + c` attracting
/// cycle `c`, `200 + j` parabolic direction `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceGrid<T> {
    pub grid: Grid,
    pub z0: Complex<T>,
    pub codes: Vec<u32>,
    pub n_stop: Vec<usize>,
    /// Anchors of the distinct attracting cycles, indexed by cycle id.
    pub cycles: Vec<Complex<T>>,
}

pub const CODE_UNDECIDED: u32 = 0;
pub const CODE_ESCAPE: u32 = 1;
pub const CODE_ATTRACTING: u32 = 100;
pub const CODE_PARABOLIC: u32 = 200;

/// Cycle color table, indexed by `cycle id mod 8`.
pub const CYCLE_COLORS: [[u8; 3]; 8] = [
    [230, 25, 75],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [255, 225, 25],
    [70, 240, 240],
    [240, 50, 230],
    [128, 128, 0],
];

/// Parabolic color table, indexed by `direction mod 4`.
pub const PETAL_COLORS: [[u8; 3]; 4] = [[0, 100, 0], [34, 139, 34], [60, 179, 113], [144, 238, 144]];

pub const ESCAPE_COLOR: [u8; 3] = [255, 255, 255];
pub const UNDECIDED_COLOR: [u8; 3] = [0, 0, 0];

/// Anchors within this distance are the same cycle.
const CYCLE_MERGE_TOL: f64 = 1e-6;

/// Classifies every grid point of the fiber over `z0`.
///
/// Points are evaluated in parallel; cycle ids are assigned afterwards from the
/// sorted anchors, so the result does not depend on scheduling.
pub fn fatou_slice<T: Real, M: VerticalMap<T> + ?Sized>(
    map: &M,
    z0: Complex<T>,
    grid: Grid,
    config: OrbitConfig<T>,
) -> Result<SliceGrid<T>> {
    let classifier = Classifier::new(map, z0, OrbitConfig { run_to_end: false, ..config })?;
    let results: Vec<Classification<T>> = (0..grid.len())
        .into_par_iter()
        .map(|i| classifier.classify(grid.point(i / grid.res, i % grid.res)))
        .collect();

    let mut anchors: Vec<Complex<T>> = results
        .iter()
        .filter_map(|c| match c.verdict {
            Verdict::AttractingBasin { anchor, .. } => Some(anchor),
            _ => None,
        })
        .collect();
    anchors.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap_or(std::cmp::Ordering::Equal));
    let tol = T::of(CYCLE_MERGE_TOL);
    let mut cycles: Vec<Complex<T>> = Vec::new();
    for a in anchors {
        if !cycles.iter().any(|c| (*c - a).norm() <= tol) {
            cycles.push(a);
        }
    }

    let codes = results
        .iter()
        .map(|c| match c.verdict {
            Verdict::Undecided => CODE_UNDECIDED,
            Verdict::Escape => CODE_ESCAPE,
            Verdict::AttractingBasin { anchor, .. } => {
                let id = cycles.iter().position(|c| (*c - anchor).norm() <= tol).unwrap_or(0);
                CODE_ATTRACTING + id as u32
            }
            Verdict::ParabolicPetal { direction, .. } => CODE_PARABOLIC + direction as u32,
        })
        .collect();
    Ok(SliceGrid {
        grid,
        z0,
        codes,
        n_stop: results.iter().map(|c| c.n_stop).collect(),
        cycles,
    })
}

pub fn code_color(code: u32) -> [u8; 3] {
    match code {
        CODE_ESCAPE => ESCAPE_COLOR,
        c if c >= CODE_PARABOLIC => PETAL_COLORS[(c - CODE_PARABOLIC) as usize % PETAL_COLORS.len()],
        c if c >= CODE_ATTRACTING => CYCLE_COLORS[(c - CODE_ATTRACTING) as usize % CYCLE_COLORS.len()],
        _ => UNDECIDED_COLOR,
    }
}

impl<T: Real> SliceGrid<T> {
    pub fn code(&self, row: usize, col: usize) -> u32 {
        self.codes[row * self.grid.res + col]
    }

    /// Fraction of pixels whose codes agree with `other`.
    pub fn agreement(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Precondition("slices use different grids".into()));
        }
        let same = self.codes.iter().zip(&other.codes).filter(|(a, b)| a == b).count();
        Ok(same as f64 / self.codes.len() as f64)
    }

    pub fn count(&self, code: u32) -> usize {
        self.codes.iter().filter(|c| **c == code).count()
    }

    /// Plain-text pixmap, one pixel per grid point.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let res = self.grid.res;
        writeln!(out, "P3")?;
        writeln!(out, "{res} {res}")?;
        writeln!(out, "255")?;
        for row in 0..res {
            let line: Vec<String> = (0..res)
                .map(|col| {
                    let [r, g, b] = code_color(self.code(row, col));
                    format!("{r} {g} {b}")
                })
                .collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// `re_w,im_w,code,n_stop`, row-major from the top-left pixel.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "re_w,im_w,code,n_stop")?;
        let res = self.grid.res;
        for row in 0..res {
            for col in 0..res {
                let w: Complex<f64> = self.grid.point(row, col);
                writeln!(out, "{:?},{:?},{},{}", w.re, w.im, self.code(row, col), self.n_stop[row * res + col])?;
            }
        }
        Ok(())
    }
}
