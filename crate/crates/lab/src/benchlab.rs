//! Analysis of call records: speedup distribution, utilization profile and
//! growth-rate fits. Everything here is a pure function of the rows, so
//! the same file always gives the same numbers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::records::CallRow;
use crate::simulator::Algorithm;
use crate::LabError;

pub const UTILIZATION_BIN: f64 = 0.05;
pub const MIN_GROUPS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Model {
    /// `a * x^b`
    PowerLaw,
    /// `a + b * ln x`
    Logarithmic,
    /// `a + b * x`
    Linear,
    /// `a * x * ln x`
    NLogN,
}

impl Model {
    pub const ALL: [Model; 4] = [
        Model::PowerLaw,
        Model::Logarithmic,
        Model::Linear,
        Model::NLogN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::PowerLaw => "power-law",
            Model::Logarithmic => "logarithmic",
            Model::Linear => "linear",
            Model::NLogN => "n-log-n",
        }
    }

    pub fn eval(self, coefficients: [f64; 2], x: f64) -> f64 {
        let [a, b] = coefficients;
        match self {
            Model::PowerLaw => a * x.powf(b),
            Model::Logarithmic => a + b * x.ln(),
            Model::Linear => a + b * x,
            Model::NLogN => a * x * x.ln(),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub model: Model,
    /// `[a, b]` as in the model formula; `b` is unused for n-log-n.
    pub coefficients: [f64; 2],
    /// Power-law exponent; `None` for other models.
    pub exponent: Option<f64>,
    /// Coefficient of determination of the predictions in the original
    /// (not log) space, clamped to `[0, 1]`.
    pub r_squared: f64,
    pub samples: usize,
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.coefficients;
        write!(
            f,
            "{:<12} r2={:.6} a={a:.6e} b={b:.6e}",
            self.model.name(),
            self.r_squared
        )?;
        if let Some(e) = self.exponent {
            write!(f, " exponent={e:.4}")?;
        }
        write!(f, " n={}", self.samples)
    }
}

/// Ordinary least squares `y = a + b x`.
fn ols(xs: &[f64], ys: &[f64]) -> [f64; 2] {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    [my - b * mx, b]
}

fn r_squared(model: Model, coefficients: [f64; 2], xs: &[f64], ys: &[f64]) -> f64 {
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = y - model.eval(coefficients, x);
            e * e
        })
        .sum();
    if !ss_res.is_finite() {
        return 0.0;
    }
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

fn fit_model(model: Model, xs: &[f64], ys: &[f64]) -> FitResult {
    let coefficients = match model {
        Model::PowerLaw => {
            let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
            let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
            let [ln_a, b] = ols(&lx, &ly);
            [ln_a.exp(), b]
        }
        Model::Logarithmic => {
            let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
            ols(&lx, ys)
        }
        Model::Linear => ols(xs, ys),
        Model::NLogN => {
            let z: Vec<f64> = xs.iter().map(|x| x * x.ln()).collect();
            let zz: f64 = z.iter().map(|z| z * z).sum();
            let zy: f64 = z.iter().zip(ys).map(|(z, y)| z * y).sum();
            [if zz > 0.0 { zy / zz } else { 0.0 }, 0.0]
        }
    };
    FitResult {
        model,
        coefficients,
        exponent: (model == Model::PowerLaw).then_some(coefficients[1]),
        r_squared: r_squared(model, coefficients, xs, ys),
        samples: xs.len(),
    }
}

/// Fits every model to the points, best `r_squared` first. Ties keep the
/// order of [`Model::ALL`].
///
/// Needs at least two points, all coordinates positive.
pub fn fit_points(xs: &[f64], ys: &[f64]) -> Result<Vec<FitResult>, LabError> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(LabError::Config("need at least two points to fit".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(LabError::Config("fit coordinates must be positive".into()));
    }
    let mut fits: Vec<FitResult> = Model::ALL.iter().map(|&m| fit_model(m, xs, ys)).collect();
    fits.sort_by(|a, b| b.r_squared.total_cmp(&a.r_squared));
    Ok(fits)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Vertices,
    Units,
    Utilization,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Vertices => "vertices",
            Dimension::Units => "units",
            Dimension::Utilization => "utilization",
        }
    }
}

impl FromStr for Dimension {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        match s {
            "vertices" => Ok(Dimension::Vertices),
            "units" => Ok(Dimension::Units),
            "utilization" => Ok(Dimension::Utilization),
            _ => Err(LabError::Config(format!("unknown dimension {s:?}"))),
        }
    }
}

fn utilization_bin(u: f64) -> u64 {
    (u / UTILIZATION_BIN).floor().max(0.0) as u64
}

fn bin_center(bin: u64) -> f64 {
    (bin as f64 + 0.5) * UTILIZATION_BIN
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Group {
    /// Dimension value; the bin center for utilization.
    pub x: f64,
    pub mean_ns: f64,
    pub count: u64,
}

/// Mean call time of `algorithm` per distinct value of `dimension`,
/// ordered by that value.
pub fn group_means(rows: &[CallRow], dimension: Dimension, algorithm: Algorithm) -> Vec<Group> {
    let mut acc: BTreeMap<u64, (u128, u64)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.algorithm == algorithm) {
        let key = match dimension {
            Dimension::Vertices => r.vertices as u64,
            Dimension::Units => r.units as u64,
            Dimension::Utilization => utilization_bin(r.utilization),
        };
        let e = acc.entry(key).or_default();
        e.0 += r.time_ns as u128;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (sum, count))| Group {
            x: match dimension {
                Dimension::Utilization => bin_center(k),
                _ => k as f64,
            },
            mean_ns: sum as f64 / count as f64,
            count,
        })
        .collect()
}

/// Groups the rows as in [`group_means`] and fits every model to the group
/// means.
pub fn fit_growth(
    rows: &[CallRow],
    dimension: Dimension,
    algorithm: Algorithm,
) -> Result<Vec<FitResult>, LabError> {
    let groups = group_means(rows, dimension, algorithm);
    if groups.len() < MIN_GROUPS {
        return Err(LabError::InsufficientSpread {
            dimension: dimension.name().into(),
            needed: MIN_GROUPS,
            got: groups.len(),
        });
    }
    let xs: Vec<f64> = groups.iter().map(|g| g.x).collect();
    // a zero mean would break the log fits; one nanosecond is below timer resolution
    let ys: Vec<f64> = groups.iter().map(|g| g.mean_ns.max(1.0)).collect();
    fit_points(&xs, &ys)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioCdf {
    /// Per-call `t_filtered / t_generic`, ascending.
    pub ratios: Vec<f64>,
    pub mean_of_ratios: f64,
    /// Total filtered time over total generic time.
    pub ratio_of_means: f64,
    pub median: f64,
    /// Share of calls where Generic Dijkstra was strictly faster.
    pub fraction_faster: f64,
}

impl RatioCdf {
    pub fn from_times(pairs: &[(u64, u64)]) -> Option<Self> {
        if pairs.is_empty() {
            return None;
        }
        // a zero reading means "below timer resolution"; one nanosecond keeps ratios finite
        let mut ratios: Vec<f64> = pairs
            .iter()
            .map(|&(g, f)| f.max(1) as f64 / g.max(1) as f64)
            .collect();
        let (tg, tf) = pairs.iter().fold((0u128, 0u128), |(a, b), &(g, f)| {
            (a + g.max(1) as u128, b + f.max(1) as u128)
        });
        let faster = pairs.iter().filter(|&&(g, f)| g < f).count();
        let mean_of_ratios = ratios.iter().sum::<f64>() / ratios.len() as f64;
        ratios.sort_by(f64::total_cmp);
        let mut cdf = RatioCdf {
            ratios,
            mean_of_ratios,
            ratio_of_means: tf as f64 / tg as f64,
            median: 0.0,
            fraction_faster: faster as f64 / pairs.len() as f64,
        };
        cdf.median = cdf.quantile(0.5);
        Some(cdf)
    }

    /// Linear interpolation between order statistics.
    pub fn quantile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        let pos = q * (self.ratios.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let t = pos - lo as f64;
        self.ratios[lo] + (self.ratios[hi] - self.ratios[lo]) * t
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }
}

type CallKey<'a> = (&'a str, u32, u32, u64, u64);

/// Pairs generic and filtered rows of the same call.
pub fn matched_pairs(rows: &[CallRow]) -> Result<Vec<(&CallRow, &CallRow)>, LabError> {
    let mut slots: BTreeMap<CallKey<'_>, [Option<&CallRow>; 2]> = BTreeMap::new();
    for r in rows {
        let key = (
            r.topology.as_str(),
            r.units,
            r.mean_demand,
            r.seed,
            r.call_index,
        );
        let slot = &mut slots.entry(key).or_default()[r.algorithm as usize];
        if slot.is_some() {
            return Err(LabError::UnmatchedRecords(format!(
                "{} units={} mean={} seed={} call={}: duplicate {} row",
                key.0,
                key.1,
                key.2,
                key.3,
                key.4,
                r.algorithm.as_str()
            )));
        }
        *slot = Some(r);
    }
    slots
        .into_iter()
        .map(|(key, pair)| match pair {
            [Some(g), Some(f)] => Ok((g, f)),
            _ => Err(LabError::UnmatchedRecords(format!(
                "{} units={} mean={} seed={} call={}: missing an algorithm",
                key.0, key.1, key.2, key.3, key.4
            ))),
        })
        .collect()
}

pub fn speedup_cdf(rows: &[CallRow]) -> Result<RatioCdf, LabError> {
    let pairs: Vec<(u64, u64)> = matched_pairs(rows)?
        .into_iter()
        .map(|(g, f)| (g.time_ns, f.time_ns))
        .collect();
    RatioCdf::from_times(&pairs).ok_or_else(|| LabError::UnmatchedRecords("no calls".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UtilizationProfile {
    pub bins: Vec<Group>,
    /// Index into `bins` of the largest mean.
    pub peak: usize,
    /// Slope of a least-squares line through the bin means.
    pub slope: f64,
}

pub fn utilization_profile(rows: &[CallRow], algorithm: Algorithm) -> Option<UtilizationProfile> {
    let bins = group_means(rows, Dimension::Utilization, algorithm);
    if bins.is_empty() {
        return None;
    }
    let peak = bins.iter().enumerate().fold(0, |best, (i, b)| {
        if b.mean_ns > bins[best].mean_ns {
            i
        } else {
            best
        }
    });
    let xs: Vec<f64> = bins.iter().map(|b| b.x).collect();
    let ys: Vec<f64> = bins.iter().map(|b| b.mean_ns).collect();
    let slope = ols(&xs, &ys)[1];
    Some(UtilizationProfile { bins, peak, slope })
}
