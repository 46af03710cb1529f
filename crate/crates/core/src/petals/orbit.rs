use std::collections::VecDeque;

use num_complex::Complex;

use super::local::ParabolicLocal;
use super::roots::{polynomial_roots, taylor_shift};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::{horner_with_derivative, SkewGerm};
use crate::smalldiv::{unit_power, RotationNumber};

/// Fiber maps `w -> g_z(w)` over the rotation `z -> lambda z`.
pub trait VerticalMap<T: Real>: Sync {
    /// Base rotation; only consulted when the fibers depend on `z`.
    fn base_rotation(&self) -> Option<&RotationNumber>;
    fn depends_on_z(&self) -> bool;
    /// Coefficients of `g_z`.
    fn fiber(&self, z: Complex<T>) -> Result<Vec<Complex<T>>>;
}

impl<T: Real> VerticalMap<T> for SkewGerm<T> {
    fn base_rotation(&self) -> Option<&RotationNumber> {
        Some(self.lambda_powers().rotation())
    }

    fn depends_on_z(&self) -> bool {
        self.coeffs().iter().any(|s| !s.is_constant())
    }

    fn fiber(&self, z: Complex<T>) -> Result<Vec<Complex<T>>> {
        self.fiber_at(z)
    }
}

impl<T: Real> VerticalMap<T> for ParabolicLocal<T> {
    fn base_rotation(&self) -> Option<&RotationNumber> {
        self.lambda().map(|l| &**l.rotation())
    }

    fn depends_on_z(&self) -> bool {
        ParabolicLocal::depends_on_z(self)
    }

    fn fiber(&self, z: Complex<T>) -> Result<Vec<Complex<T>>> {
        Ok(ParabolicLocal::fiber(self, z))
    }
}

/// A single polynomial fiber map, the same over every `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberPolynomial<T>(pub Vec<Complex<T>>);

impl<T: Real> VerticalMap<T> for FiberPolynomial<T> {
    fn base_rotation(&self) -> Option<&RotationNumber> {
        None
    }

    fn depends_on_z(&self) -> bool {
        false
    }

    fn fiber(&self, _z: Complex<T>) -> Result<Vec<Complex<T>>> {
        Ok(self.0.clone())
    }
}

/// Fiber coefficients along `z_n = lambda^n z_0`, `n = 0..=n_max`.
#[derive(Clone, Debug)]
pub struct FiberSchedule<T> {
    zs: Vec<Complex<T>>,
    fibers: Vec<Vec<Complex<T>>>,
}

impl<T: Real> FiberSchedule<T> {
    /// `lambda^n` comes from the exact fractional multiple `n theta mod 1`.
    pub fn new<M: VerticalMap<T> + ?Sized>(map: &M, z0: Complex<T>, n_max: usize) -> Result<Self> {
        let zero = Complex::new(T::zero(), T::zero());
        if !map.depends_on_z() || z0 == zero {
            return Ok(Self {
                zs: vec![z0],
                fibers: vec![map.fiber(z0)?],
            });
        }
        let rot = map
            .base_rotation()
            .ok_or_else(|| Error::Precondition("z-dependent map without a base rotation".into()))?;
        rot.check_multiples(n_max.max(1) as u64)?;
        let mut zs = Vec::with_capacity(n_max + 1);
        let mut fibers = Vec::with_capacity(n_max + 1);
        for x in rot.multiples().take(n_max + 1) {
            let z = z0 * unit_power::<T>(&x);
            fibers.push(map.fiber(z)?);
            zs.push(z);
        }
        Ok(Self { zs, fibers })
    }

    pub fn z(&self, n: usize) -> Complex<T> {
        if self.zs.len() == 1 {
            self.zs[0]
        } else {
            self.zs[n]
        }
    }

    pub fn fiber(&self, n: usize) -> &[Complex<T>] {
        if self.fibers.len() == 1 {
            &self.fibers[0]
        } else {
            &self.fibers[n]
        }
    }

    /// Largest `n` the schedule covers (unbounded for a constant schedule).
    pub fn horizon(&self) -> usize {
        if self.fibers.len() == 1 {
            usize::MAX
        } else {
            self.fibers.len() - 1
        }
    }
}

/// Fixed point with multiplier one: `g(p + v) = p + v + a v^(k+1) + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParabolicPoint<T> {
    pub point: Complex<T>,
    pub k: usize,
    pub lead: Complex<T>,
    /// Unit vectors `v` with `a v^k < 0`, starting from the principal root of `-1/a`.
    pub directions: Vec<Complex<T>>,
}

/// Parabolic fixed points of a polynomial map (multiplier within `1e-6` of one).
pub fn parabolic_points<T: Real>(g: &[Complex<T>]) -> Vec<ParabolicPoint<T>> {
    let mut shifted = g.to_vec();
    if shifted.len() < 2 {
        shifted.resize(2, Complex::new(T::zero(), T::zero()));
    }
    shifted[1] = shifted[1] - T::one();
    let mut points: Vec<Complex<T>> = Vec::new();
    for r in polynomial_roots(&shifted) {
        if !points.iter().any(|p| *p == r.value) {
            points.push(r.value);
        }
    }
    let mut out = Vec::new();
    for p in points {
        let taylor = taylor_shift(g, p);
        if taylor.len() < 3 || (taylor[1] - T::one()).norm() > T::of(1e-6) {
            continue;
        }
        let scale = taylor.iter().skip(2).map(|c| c.norm()).fold(T::zero(), T::max);
        let Some(j) = taylor.iter().skip(2).position(|c| c.norm() > T::of(1e-10) * scale) else {
            continue;
        };
        let k = j + 1;
        let lead = taylor[k + 1];
        let base = (-lead.inv()).powf(T::one() / T::from_usize(k).unwrap());
        let base = base / base.norm();
        let directions = (0..k)
            .map(|i| base * Complex::from_polar(T::one(), T::TAU() * T::from_usize(i).unwrap() / T::from_usize(k).unwrap()))
            .collect();
        out.push(ParabolicPoint {
            point: p,
            k,
            lead,
            directions,
        });
    }
    out.sort_by(|a, b| {
        a.point
            .re
            .partial_cmp(&b.point.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.point.im.partial_cmp(&b.point.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    out
}

/// Classification budgets and tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitConfig<T> {
    pub n_max: usize,
    pub escape_radius: T,
    /// `|w_n - w_{n-p}|` below this (relative to `max(1, |w_n|)`) counts as a return.
    pub cycle_tol: T,
    /// Consecutive qualifying steps before a verdict.
    pub confirm: usize,
    /// Angular tolerance to an attracting direction, in radians.
    pub arg_tol: T,
    pub max_period: usize,
    /// Petal verdicts only within this distance of the parabolic point.
    pub petal_radius: T,
    /// Keep iterating after a verdict until `n_max` or escape.
    pub run_to_end: bool,
}

impl<T: Real> Default for OrbitConfig<T> {
    fn default() -> Self {
        Self {
            n_max: 10_000,
            escape_radius: T::of(1e6),
            cycle_tol: T::of(1e-9),
            confirm: 50,
            arg_tol: T::of(0.2),
            max_period: 64,
            petal_radius: T::one(),
            run_to_end: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict<T> {
    Escape,
    /// Converging to parabolic point `point` along direction `direction`.
    ParabolicPetal { point: usize, direction: usize },
    /// Captured by a cycle; `anchor` is its lexicographically smallest point.
    AttractingBasin {
        period: usize,
        anchor: Complex<T>,
        multiplier_log: T,
    },
    Undecided,
}

impl<T> Verdict<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Escape => "escape",
            Verdict::ParabolicPetal { .. } => "parabolic_petal",
            Verdict::AttractingBasin { .. } => "attracting_basin",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Escaped,
    PetalConfirmed,
    CycleConfirmed,
    Budget,
}

/// A computed orbit: points `(z_n, w_n)`, `log |dg_{z_n}/dw (w_n)|` for each
/// step taken, and the verdict reached at step `n_stop`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord<T> {
    pub points: Vec<(Complex<T>, Complex<T>)>,
    pub log_derivatives: Vec<T>,
    pub verdict: Verdict<T>,
    pub n_stop: usize,
    pub reason: StopReason,
}

/// Verdict and stopping step without storing the orbit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification<T> {
    pub verdict: Verdict<T>,
    pub n_stop: usize,
    pub reason: StopReason,
}

/// Everything a classification needs that does not depend on the start point.
#[derive(Clone, Debug)]
pub struct Classifier<T> {
    schedule: FiberSchedule<T>,
    parabolic: Vec<ParabolicPoint<T>>,
    config: OrbitConfig<T>,
}

impl<T: Real> Classifier<T> {
    /// Parabolic targets come from the fiber over `z = 0`.
    pub fn new<M: VerticalMap<T> + ?Sized>(map: &M, z0: Complex<T>, config: OrbitConfig<T>) -> Result<Self> {
        if config.n_max < 1 {
            return Err(Error::Precondition("n_max must be at least 1".into()));
        }
        let schedule = FiberSchedule::new(map, z0, config.n_max)?;
        let g0 = map.fiber(Complex::new(T::zero(), T::zero()))?;
        Ok(Self {
            schedule,
            parabolic: parabolic_points(&g0),
            config,
        })
    }

    pub fn parabolic_points(&self) -> &[ParabolicPoint<T>] {
        &self.parabolic
    }

    pub fn config(&self) -> &OrbitConfig<T> {
        &self.config
    }

    pub fn classify(&self, w0: Complex<T>) -> Classification<T> {
        let (c, _) = self.run(w0, false);
        c
    }

    pub fn orbit(&self, w0: Complex<T>) -> OrbitRecord<T> {
        let (c, rec) = self.run(w0, true);
        let (points, log_derivatives) = rec.expect("recording requested");
        OrbitRecord {
            points,
            log_derivatives,
            verdict: c.verdict,
            n_stop: c.n_stop,
            reason: c.reason,
        }
    }

    #[allow(clippy::type_complexity)]
    fn run(&self, w0: Complex<T>, record: bool) -> (Classification<T>, Option<(Vec<(Complex<T>, Complex<T>)>, Vec<T>)>) {
        let cfg = &self.config;
        let n_max = cfg.n_max.min(self.schedule.horizon());
        let mut points = Vec::new();
        let mut logs = Vec::new();
        let mut history: VecDeque<(Complex<T>, T)> = VecDeque::with_capacity(cfg.max_period + 1);
        let mut petal = PetalTracker::new(self.parabolic.len());
        let (mut cycle_period, mut cycle_streak) = (0usize, 0usize);
        let mut result: Option<Classification<T>> = None;
        let mut w = w0;
        for n in 0..=n_max {
            let finite = w.re.is_finite() && w.im.is_finite();
            if !finite || w.norm() > cfg.escape_radius {
                if result.is_none() {
                    result = Some(Classification {
                        verdict: Verdict::Escape,
                        n_stop: n,
                        reason: StopReason::Escaped,
                    });
                }
                if finite && record {
                    points.push((self.schedule.z(n), w));
                }
                break;
            }
            if record {
                points.push((self.schedule.z(n), w));
            }
            if result.is_none() {
                if let Some((point, direction)) = petal.update(w, &self.parabolic, cfg) {
                    result = Some(Classification {
                        verdict: Verdict::ParabolicPetal { point, direction },
                        n_stop: n,
                        reason: StopReason::PetalConfirmed,
                    });
                }
            }
            if result.is_none() {
                let scale = w.norm().max(T::one());
                let period = (1..=history.len()).find(|&p| (w - history[history.len() - p].0).norm() <= cfg.cycle_tol * scale);
                match period {
                    Some(p) if p == cycle_period => cycle_streak += 1,
                    Some(p) => {
                        cycle_period = p;
                        cycle_streak = 1;
                    }
                    None => cycle_streak = 0,
                }
                if cycle_streak >= cfg.confirm {
                    let last = history.iter().skip(history.len() - cycle_period);
                    let multiplier_log = last.clone().fold(T::zero(), |acc, (_, l)| acc + *l);
                    if multiplier_log < T::zero() {
                        let anchor = last.map(|(p, _)| *p).fold(w, lexicographic_min);
                        result = Some(Classification {
                            verdict: Verdict::AttractingBasin {
                                period: cycle_period,
                                anchor,
                                multiplier_log,
                            },
                            n_stop: n,
                            reason: StopReason::CycleConfirmed,
                        });
                    } else {
                        cycle_streak = 0;
                    }
                }
            }
            if n == n_max || (result.is_some() && !cfg.run_to_end) {
                break;
            }
            let (next, dg) = horner_with_derivative(self.schedule.fiber(n), w);
            let log_d = dg.norm().ln();
            if record {
                logs.push(log_d);
            }
            if history.len() == cfg.max_period {
                history.pop_front();
            }
            history.push_back((w, log_d));
            w = next;
        }
        let c = result.unwrap_or(Classification {
            verdict: Verdict::Undecided,
            n_stop: n_max,
            reason: StopReason::Budget,
        });
        (c, record.then_some((points, logs)))
    }
}

fn lexicographic_min<T: Real>(a: Complex<T>, b: Complex<T>) -> Complex<T> {
    if (b.re, b.im) < (a.re, a.im) {
        b
    } else {
        a
    }
}

/// Streak of steps with `|w - p|` strictly decreasing and `arg (w - p)` near one direction.
struct PetalTracker<T> {
    last_distance: Vec<T>,
    streak: Vec<usize>,
    direction: Vec<usize>,
}

impl<T: Real> PetalTracker<T> {
    fn new(n: usize) -> Self {
        Self {
            last_distance: vec![T::infinity(); n],
            streak: vec![0; n],
            direction: vec![usize::MAX; n],
        }
    }

    fn update(&mut self, w: Complex<T>, points: &[ParabolicPoint<T>], cfg: &OrbitConfig<T>) -> Option<(usize, usize)> {
        for (i, pp) in points.iter().enumerate() {
            let v = w - pp.point;
            let d = v.norm();
            let aligned = pp
                .directions
                .iter()
                .position(|dir| (v * dir.conj()).arg().abs() < cfg.arg_tol);
            let qualifies = d > T::zero() && d < cfg.petal_radius && d < self.last_distance[i];
            match aligned {
                Some(j) if qualifies => {
                    if self.direction[i] == j {
                        self.streak[i] += 1;
                    } else {
                        self.direction[i] = j;
                        self.streak[i] = 1;
                    }
                }
                _ => self.streak[i] = 0,
            }
            self.last_distance[i] = d;
            if self.streak[i] >= cfg.confirm {
                return Some((i, self.direction[i]));
            }
        }
        None
    }
}

/// Orbit of `(z_0, w_0)` under a vertical map.
pub fn iterate_orbit<T: Real, M: VerticalMap<T> + ?Sized>(
    map: &M,
    z0: Complex<T>,
    w0: Complex<T>,
    config: OrbitConfig<T>,
) -> Result<OrbitRecord<T>> {
    Ok(Classifier::new(map, z0, config)?.orbit(w0))
}

/// Partial sums `sum_{i<n} log |dg_{z_i}/dw (w_i)|`, `n = 1..=steps`.
pub fn vertical_derivative_sum<T: Real>(orbit: &OrbitRecord<T>) -> Result<Vec<T>> {
    if orbit.log_derivatives.is_empty() {
        return Err(Error::Precondition("orbit has no steps".into()));
    }
    let mut acc = T::zero();
    Ok(orbit
        .log_derivatives
        .iter()
        .map(|l| {
            acc += *l;
            acc
        })
        .collect())
}
