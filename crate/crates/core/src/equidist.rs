//! Orbit statistics and equidistribution verdicts.
//!
//! The exact side of the crate hands this module digit streams; here they
//! become finite-sample statistics: star and box discrepancies, Weyl sums,
//! cylinder frequencies with z-scores, and the aggregate reports behind the
//! CLI verdicts. Box indices and cylinder counts come from exact digit
//! prefixes; floating point enters only when a prefix of up to 40 digits is
//! divided down to a coordinate in [0,1), so a stored value sits within
//! about 1e-19 of the exact rational it stands for.
//!
//! Verdicts are statistical conventions, not certificates: a pass means
//! "consistent with equidistribution at this sample size under a binomial
//! or discrepancy model", nothing stronger. The default thresholds (|z| <=
//! 5, star discrepancy <= 0.02 at 10^5 samples) leave a wide margin over
//! the concentration scale of genuinely uniform sequences.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::padic::{chunk_len, PadicInt, Prime};
use crate::prng::CounterRng;
use crate::solenoid::{nonzero_vectors, CharacterIndex, ProductPoint};
use crate::symbolic::{CylinderSpec, OneSidedWord, PadicInterval, TwoSidedWord};
use crate::{Error, Result};

/// Box statistics refuse to allocate more cells than this.
pub const MAX_BOX_CELLS: u128 = 10_000_000;

/// How many leading digits a stored coordinate keeps: enough that the f64
/// value is exact to ~1e-19, capped so a prefix always folds into a u64.
pub(crate) fn lead_len(p: Prime) -> usize {
    chunk_len(p.get()).min(40)
}

fn pow_u64(p: u64, e: usize) -> u64 {
    p.checked_pow(e as u32).expect("exponent fits by construction")
}

/// A length-M list of points in [0,1)^r with exact leading-digit prefixes.
///
/// `exact_source` records provenance: rows built from digit streams carry
/// prefixes that are exact base-p expansions (the f64 is a rounding of the
/// true rational); rows built from plain doubles carry prefixes re-read
/// from the doubles themselves.
#[derive(Debug, Clone)]
pub struct SequenceSample {
    p: Prime,
    dims: usize,
    len: usize,
    lead_len: usize,
    exact_source: bool,
    values: Vec<f64>,
    leads: Vec<u64>,
}

impl SequenceSample {
    /// The partial-sum sequence of the products alpha*beta_i: row n holds
    /// the coordinates s_n(alpha*beta_i)/p^(n+1), each the base-p value
    /// 0.t_n t_(n-1) ... t_0 of the reversed digit prefix.
    pub fn from_orbit(alpha: &PadicInt, betas: &[PadicInt], len: usize) -> Result<SequenceSample> {
        if betas.is_empty() {
            return Err(Error::EmptyInput("betas"));
        }
        if len == 0 {
            return Err(Error::EmptyInput("sample length"));
        }
        let p = alpha.prime();
        let products: Vec<PadicInt> = betas
            .iter()
            .map(|b| alpha.mul(b))
            .collect::<Result<_>>()?;
        for g in &products {
            if g.precision() < len {
                return Err(Error::PrecisionExhausted {
                    wanted: len,
                    available: g.precision(),
                });
            }
        }
        let dims = products.len();
        let ll = lead_len(p);
        let top = pow_u64(p.get(), ll - 1);
        let scale = pow_u64(p.get(), ll) as f64;
        let mut values = vec![0.0; len * dims];
        let mut leads = vec![0u64; len * dims];
        for (i, g) in products.iter().enumerate() {
            let digits = g.digits();
            let mut lead = 0u64;
            for n in 0..len {
                // prefix of row n = digit n followed by row n-1's prefix
                lead = digits[n] * top + lead / p.get();
                values[n * dims + i] = lead as f64 / scale;
                leads[n * dims + i] = lead;
            }
        }
        Ok(SequenceSample {
            p,
            dims,
            len,
            lead_len: ll,
            exact_source: true,
            values,
            leads,
        })
    }

    /// Wrap plain double rows; prefixes are read back off the doubles.
    /// A coordinate of exactly 1.0 counts in the last box at every depth.
    pub fn from_rows(p: Prime, rows: &[Vec<f64>]) -> Result<SequenceSample> {
        let dims = match rows.first() {
            Some(r) if !r.is_empty() => r.len(),
            _ => return Err(Error::EmptyInput("sample rows")),
        };
        let ll = lead_len(p);
        let mut values = Vec::with_capacity(rows.len() * dims);
        let mut leads = Vec::with_capacity(rows.len() * dims);
        for row in rows {
            if row.len() != dims {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: dims,
                });
            }
            for &v in row {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidParameter(format!(
                        "coordinate {v} outside [0, 1]"
                    )));
                }
                let mut lead = 0u64;
                let mut x = v;
                for _ in 0..ll {
                    x *= p.get() as f64;
                    let d = (x.floor() as u64).min(p.get() - 1);
                    x -= d as f64;
                    lead = lead * p.get() + d;
                }
                values.push(v);
                leads.push(lead);
            }
        }
        Ok(SequenceSample {
            p,
            dims,
            len: rows.len(),
            lead_len: ll,
            exact_source: false,
            values,
            leads,
        })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn exact_source(&self) -> bool {
        self.exact_source
    }

    pub fn value(&self, row: usize, coord: usize) -> f64 {
        self.values[row * self.dims + coord]
    }

    /// One coordinate column as a plain vector.
    pub fn coordinate(&self, coord: usize) -> Result<Vec<f64>> {
        if coord >= self.dims {
            return Err(Error::DimensionMismatch {
                left: coord,
                right: self.dims,
            });
        }
        Ok((0..self.len).map(|n| self.value(n, coord)).collect())
    }

    /// Star discrepancy of one coordinate column.
    pub fn star_discrepancy(&self, coord: usize) -> Result<f64> {
        star_discrepancy_1d(&self.coordinate(coord)?)
    }

    /// Exact cell counts over the p^(r*depth) boxes that split each axis
    /// into p^depth equal parts, indexed row-major with coordinate 0 most
    /// significant.
    pub fn box_counts(&self, depth: u32) -> Result<Vec<u64>> {
        let cells = (self.p.get() as u128)
            .checked_pow(depth * self.dims as u32)
            .unwrap_or(u128::MAX);
        if cells > MAX_BOX_CELLS {
            return Err(Error::DepthTooLarge {
                depth: depth as usize,
                cells,
                max: MAX_BOX_CELLS,
            });
        }
        debug_assert!((depth as usize) <= self.lead_len);
        let per_axis = pow_u64(self.p.get(), depth as usize);
        let shift = pow_u64(self.p.get(), self.lead_len - depth as usize);
        let mut counts = vec![0u64; cells as usize];
        for row in 0..self.len {
            let mut idx = 0u64;
            for coord in 0..self.dims {
                idx = idx * per_axis + self.leads[row * self.dims + coord] / shift;
            }
            counts[idx as usize] += 1;
        }
        Ok(counts)
    }

    /// Worst box-count deviation: max over cells of |freq - p^(-r*depth)|.
    pub fn box_discrepancy(&self, depth: u32) -> Result<f64> {
        let counts = self.box_counts(depth)?;
        let target = 1.0 / counts.len() as f64;
        let m = self.len as f64;
        Ok(counts
            .iter()
            .map(|&c| (c as f64 / m - target).abs())
            .fold(0.0, f64::max))
    }

    /// The Weyl average (1/M) sum of exp(2 pi i k.x_n) for a nonzero
    /// integer frequency vector. Summation is sequential, so the result is
    /// a pure function of the sample.
    pub fn weyl_average(&self, k: &[i64]) -> Result<Complex64> {
        if k.len() != self.dims {
            return Err(Error::DimensionMismatch {
                left: k.len(),
                right: self.dims,
            });
        }
        if k.iter().all(|&c| c == 0) {
            return Err(Error::ZeroVector);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for row in 0..self.len {
            let theta: f64 = k
                .iter()
                .enumerate()
                .map(|(i, &c)| c as f64 * self.value(row, i))
                .sum();
            sum += Complex64::from_polar(1.0, TAU * theta);
        }
        Ok(sum / self.len as f64)
    }
}

/// Exact order-statistics star discrepancy of a 1-D sample:
/// D* = max over i of max(i/M - x_(i), x_(i) - (i-1)/M).
/// Sorts a copy, so the input order is irrelevant.
pub fn star_discrepancy_1d(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let up = (i + 1) as f64 / m - x;
        let down = x - i as f64 / m;
        worst = worst.max(up).max(down);
    }
    Ok(worst)
}

/// Empirical frequency of a cylinder over a word list, with the z-score
/// against the exact measure p^(-depth) under the binomial model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyStat {
    pub count: u64,
    pub frequency: f64,
    pub z: f64,
}

pub fn cylinder_frequency(words: &[OneSidedWord], spec: &CylinderSpec) -> Result<FrequencyStat> {
    if words.is_empty() {
        return Err(Error::EmptyInput("words"));
    }
    let mut count = 0u64;
    for w in words {
        if spec.prime() != w.prime() {
            return Err(Error::PrimeMismatch {
                left: spec.prime().get(),
                right: w.prime().get(),
            });
        }
        let mut hit = true;
        for (index, digit) in spec.pairs() {
            if index < 0 {
                return Err(Error::WindowExhausted {
                    index,
                    lo: 0,
                    hi: w.len() as i64,
                });
            }
            if w.digit(index as usize)? != digit {
                hit = false;
                break;
            }
        }
        if hit {
            count += 1;
        }
    }
    let m = words.len() as f64;
    let mu = (spec.prime().get() as f64).powi(-(spec.depth() as i32));
    Ok(FrequencyStat {
        count,
        frequency: count as f64 / m,
        z: z_score(count, words.len() as u64, mu),
    })
}

/// (freq - mu) / sqrt(mu(1-mu)/M), with the depth-0 case (mu = 1, zero
/// variance) guarded as z = 0.
fn z_score(count: u64, total: u64, mu: f64) -> f64 {
    let sigma = (mu * (1.0 - mu) / total as f64).sqrt();
    if sigma == 0.0 {
        0.0
    } else {
        (count as f64 / total as f64 - mu) / sigma
    }
}

/// One anchored digit block and its orbit statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderStat {
    pub depth: u32,
    pub block: Vec<u64>,
    pub count: u64,
    pub frequency: f64,
    pub z: f64,
}

/// Magnitude of one tested Weyl frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylStat {
    pub frequency: Vec<i64>,
    pub magnitude: f64,
}

/// The operational genericity verdict for one digit stream: every anchored
/// block of depth <= max_depth within z_threshold of its uniform
/// frequency, and the forward-window values within dstar_threshold of
/// equidistributed. The verdict is a pure function of the stored
/// statistics; [`GenericityReport::recomputed_verdict`] re-derives it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub p: u64,
    pub length: usize,
    pub max_depth: u32,
    pub z_threshold: f64,
    pub dstar_threshold: f64,
    pub star_discrepancy: f64,
    pub box_discrepancy: f64,
    pub max_abs_z: f64,
    pub weyl: Vec<WeylStat>,
    pub cylinders: Vec<CylinderStat>,
    pub pass: bool,
}

impl GenericityReport {
    /// The verdict implied by the stored statistics and thresholds.
    pub fn recomputed_verdict(&self) -> bool {
        let worst = self
            .cylinders
            .iter()
            .map(|c| c.z.abs())
            .fold(0.0, f64::max);
        worst <= self.z_threshold && self.star_discrepancy <= self.dstar_threshold
    }

    /// Row-per-statistic CSV for plotting: kind, label, value, z, count.
    pub fn to_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        write_row(&mut w, &["kind", "label", "value", "z", "count"])?;
        write_row(
            &mut w,
            &[
                "dstar",
                "",
                &format!("{}", self.star_discrepancy),
                "",
                "",
            ],
        )?;
        write_row(
            &mut w,
            &[
                "box",
                &format!("depth={}", self.max_depth),
                &format!("{}", self.box_discrepancy),
                "",
                "",
            ],
        )?;
        for stat in &self.weyl {
            write_row(
                &mut w,
                &[
                    "weyl",
                    &format!("k={}", join_i64(&stat.frequency)),
                    &format!("{}", stat.magnitude),
                    "",
                    "",
                ],
            )?;
        }
        for c in &self.cylinders {
            write_row(
                &mut w,
                &[
                    "cylinder",
                    &format!("depth={} block={}", c.depth, join_u64(&c.block)),
                    &format!("{}", c.frequency),
                    &format!("{}", c.z),
                    &format!("{}", c.count),
                ],
            )?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

fn write_row<W: Write>(w: &mut csv::Writer<W>, fields: &[&str]) -> Result<()> {
    w.write_record(fields)
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn join_u64(xs: &[u64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

fn join_i64(xs: &[i64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

/// Run the digit-shift orbit of alpha for `len` steps and test it for
/// genericity: anchored block frequencies at every depth up to max_depth,
/// and the star discrepancy of the forward-window values 0.t_n t_(n+1)...
/// Needs precision >= len + max_depth so every tested window is fully
/// known.
pub fn genericity_test(
    alpha: &PadicInt,
    len: usize,
    max_depth: u32,
    z_threshold: f64,
    dstar_threshold: f64,
) -> Result<GenericityReport> {
    if len == 0 {
        return Err(Error::EmptyInput("orbit length"));
    }
    if max_depth == 0 {
        return Err(Error::InvalidParameter("max depth must be >= 1".into()));
    }
    let needed = len + max_depth as usize;
    if alpha.precision() < needed {
        return Err(Error::PrecisionExhausted {
            wanted: needed,
            available: alpha.precision(),
        });
    }
    let p = alpha.prime();
    let cells_at_max = (p.get() as u128).checked_pow(max_depth).unwrap_or(u128::MAX);
    if cells_at_max > MAX_BOX_CELLS {
        return Err(Error::DepthTooLarge {
            depth: max_depth as usize,
            cells: cells_at_max,
            max: MAX_BOX_CELLS,
        });
    }
    let digits = alpha.digits();
    let ll = lead_len(p);

    // forward-window values; windows shorten to the precision end, which
    // only touches the last ~40 rows
    let pow_f: Vec<f64> = (0..=ll).map(|e| pow_u64(p.get(), e) as f64).collect();
    let xs: Vec<f64> = (0..len)
        .map(|n| {
            let w = ll.min(digits.len() - n);
            let fold = digits[n..n + w]
                .iter()
                .fold(0u64, |acc, &d| acc * p.get() + d);
            fold as f64 / pow_f[w]
        })
        .collect();
    let star = star_discrepancy_1d(&xs)?;

    let mut cylinders = Vec::new();
    let mut box_discrepancy = 0.0;
    let mut max_abs_z = 0.0f64;
    for k in 1..=max_depth {
        let cells = pow_u64(p.get(), k as usize);
        let drop = cells / p.get(); // p^(k-1), weight of the leading digit
        let mut counts = vec![0u64; cells as usize];
        let mut idx: u64 = digits[..k as usize]
            .iter()
            .fold(0, |acc, &d| acc * p.get() + d);
        counts[idx as usize] += 1;
        for n in 1..len {
            idx = (idx % drop) * p.get() + digits[n + k as usize - 1];
            counts[idx as usize] += 1;
        }
        let mu = 1.0 / cells as f64;
        let mut worst = 0.0f64;
        for (b, &count) in counts.iter().enumerate() {
            let mut block = vec![0u64; k as usize];
            let mut rest = b as u64;
            for slot in block.iter_mut().rev() {
                *slot = rest % p.get();
                rest /= p.get();
            }
            let frequency = count as f64 / len as f64;
            let z = z_score(count, len as u64, mu);
            max_abs_z = max_abs_z.max(z.abs());
            worst = worst.max((frequency - mu).abs());
            cylinders.push(CylinderStat {
                depth: k,
                block,
                count,
                frequency,
                z,
            });
        }
        if k == max_depth {
            box_discrepancy = worst;
        }
    }

    let weyl = (1..=3i64)
        .map(|k| {
            let mut sum = Complex64::new(0.0, 0.0);
            for &x in &xs {
                sum += Complex64::from_polar(1.0, TAU * k as f64 * x);
            }
            WeylStat {
                frequency: vec![k],
                magnitude: (sum / len as f64).norm(),
            }
        })
        .collect();

    let pass = max_abs_z <= z_threshold && star <= dstar_threshold;
    Ok(GenericityReport {
        p: p.get(),
        length: len,
        max_depth,
        z_threshold,
        dstar_threshold,
        star_discrepancy: star,
        box_discrepancy,
        max_abs_z,
        weyl,
        cylinders,
        pass,
    })
}

/// Ergodic average of the level-t character with frequency vector m along
/// the product skew-orbit of points with zero real parts: (1/M) sum over
/// n = 1..=M of the character at the n-step image. After n steps the
/// level-t coordinate over p^t is exactly the base-p value of the reversed
/// prefix t_(n+t-1) ... t_0, so each term costs O(1) via a rolling prefix.
pub fn character_average(
    points: &ProductPoint,
    chi: &CharacterIndex,
    steps: usize,
) -> Result<Complex64> {
    if steps == 0 {
        return Err(Error::EmptyInput("steps"));
    }
    if chi.m().len() != points.dims() {
        return Err(Error::DimensionMismatch {
            left: chi.m().len(),
            right: points.dims(),
        });
    }
    let p = points.prime();
    let t = chi.level() as usize;
    for c in points.components() {
        if c.real().digits().iter().any(|&d| d != 0) {
            return Err(Error::InvalidParameter(
                "character averages need zero real parts".into(),
            ));
        }
        let needed = steps + t;
        if c.padic().precision() < needed {
            return Err(Error::PrecisionExhausted {
                wanted: needed,
                available: c.padic().precision(),
            });
        }
    }
    let ll = lead_len(p);
    let top = pow_u64(p.get(), ll - 1);
    let scale = pow_u64(p.get(), ll) as f64;
    // per-component rolling reversed prefix, pre-fed with the first t digits
    let mut leads = vec![0u64; points.dims()];
    for (i, c) in points.components().iter().enumerate() {
        for j in 0..t {
            leads[i] = c.padic().digits()[j] * top + leads[i] / p.get();
        }
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=steps {
        let mut theta = 0.0f64;
        for (i, c) in points.components().iter().enumerate() {
            leads[i] = c.padic().digits()[t + n - 1] * top + leads[i] / p.get();
            theta += chi.m()[i] as f64 * (leads[i] as f64 / scale);
        }
        sum += Complex64::from_polar(1.0, TAU * theta);
    }
    Ok(sum / steps as f64)
}

/// Thresholds for [`reduction_check`]: the per-sigma genericity settings
/// plus the joint box test's depth and allowance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionThresholds {
    pub max_depth: u32,
    pub z_threshold: f64,
    pub dstar_threshold: f64,
    pub box_depth: u32,
    pub box_threshold: f64,
}

impl Default for ReductionThresholds {
    fn default() -> ReductionThresholds {
        ReductionThresholds {
            max_depth: 3,
            z_threshold: 5.0,
            dstar_threshold: 0.02,
            box_depth: 2,
            box_threshold: 0.005,
        }
    }
}

/// One integer combination sigma = sum of m_i beta_i and the genericity
/// verdict of sigma*alpha.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaVerdict {
    pub coefficients: Vec<i64>,
    pub star_discrepancy: f64,
    pub max_abs_z: f64,
    pub pass: bool,
}

/// Both sides of the dimension-reduction argument on one sample: the joint
/// box test of (alpha*beta_1, ..., alpha*beta_r), and the one-dimensional
/// genericity of sigma*alpha for every nonzero combination sigma with
/// coefficients bounded by `bound`. `agree` records whether the two sides
/// reach the same verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub p: u64,
    pub dims: usize,
    pub bound: i64,
    pub length: usize,
    pub thresholds: ReductionThresholds,
    pub joint_box_discrepancy: f64,
    pub joint_pass: bool,
    pub sigma: Vec<SigmaVerdict>,
    pub sigma_all_pass: bool,
    pub agree: bool,
}

pub fn reduction_check(
    alpha: &PadicInt,
    betas: &[PadicInt],
    bound: i64,
    len: usize,
    thresholds: &ReductionThresholds,
) -> Result<ReductionReport> {
    if betas.is_empty() {
        return Err(Error::EmptyInput("betas"));
    }
    if bound < 1 {
        return Err(Error::InvalidParameter(
            "coefficient bound must be >= 1".into(),
        ));
    }
    let p = alpha.prime();
    let sample = SequenceSample::from_orbit(alpha, betas, len)?;
    let joint_box_discrepancy = sample.box_discrepancy(thresholds.box_depth)?;
    let joint_pass = joint_box_discrepancy <= thresholds.box_threshold;

    let mut sigma = Vec::new();
    for coeffs in nonzero_vectors(betas.len(), bound) {
        let mut acc = PadicInt::zero(p, betas[0].precision());
        for (b, &m) in betas.iter().zip(&coeffs) {
            acc = acc.add(&b.mul_int(m))?;
        }
        let product = acc.mul(alpha)?;
        let report = genericity_test(
            &product,
            len,
            thresholds.max_depth,
            thresholds.z_threshold,
            thresholds.dstar_threshold,
        )?;
        sigma.push(SigmaVerdict {
            coefficients: coeffs,
            star_discrepancy: report.star_discrepancy,
            max_abs_z: report.max_abs_z,
            pass: report.pass,
        });
    }
    let sigma_all_pass = sigma.iter().all(|s| s.pass);
    Ok(ReductionReport {
        p: p.get(),
        dims: betas.len(),
        bound,
        length: len,
        thresholds: thresholds.clone(),
        joint_box_discrepancy,
        joint_pass,
        sigma,
        sigma_all_pass,
        agree: joint_pass == sigma_all_pass,
    })
}

/// One pushforward test of the measure-compatibility battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureTestStat {
    pub name: String,
    pub expected: f64,
    pub count: u64,
    pub frequency: f64,
    pub z: f64,
}

/// Monte Carlo check that the uniform word measure pushes forward to the
/// expected masses: base-p intervals with numerator coprime to p on the
/// real factor, digit blocks across the index seam on the product space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureCheckReport {
    pub p: u64,
    pub length: usize,
    pub depth: u32,
    pub seed: u64,
    pub z_threshold: f64,
    pub tests: Vec<MeasureTestStat>,
    pub max_abs_z: f64,
    pub pass: bool,
}

impl MeasureCheckReport {
    pub fn recomputed_verdict(&self) -> bool {
        self.tests.iter().all(|t| t.z.abs() <= self.z_threshold)
    }

    pub fn to_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        write_row(&mut w, &["name", "expected", "count", "frequency", "z"])?;
        for t in &self.tests {
            write_row(
                &mut w,
                &[
                    &t.name,
                    &format!("{}", t.expected),
                    &format!("{}", t.count),
                    &format!("{}", t.frequency),
                    &format!("{}", t.z),
                ],
            )?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

/// Extra negative digits sampled beyond the interval depth, so that "the
/// tail beyond the block is nonzero" is resolved exactly with probability
/// 1 - p^-20 per draw.
const INTERVAL_TAIL: u32 = 20;

pub fn measure_check(
    p: Prime,
    len: usize,
    depth: u32,
    seed: u64,
    z_threshold: f64,
) -> Result<MeasureCheckReport> {
    if len == 0 {
        return Err(Error::EmptyInput("sample length"));
    }
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be >= 1".into()));
    }
    let battery = (p.get() as u128).checked_pow(depth).unwrap_or(u128::MAX);
    if battery > 100_000 {
        return Err(Error::DepthTooLarge {
            depth: depth as usize,
            cells: battery,
            max: 100_000,
        });
    }

    // the fixed battery: every coprime-numerator interval at scales up to
    // depth, and every digit block bridging the seam at indices -1..
    let mut intervals = Vec::new();
    for n in 1..=depth {
        for a in 1..pow_u64(p.get(), n as usize) {
            if a % p.get() != 0 {
                intervals.push((
                    format!("interval a={a} depth={n}"),
                    PadicInterval::new(p, a, n)?,
                ));
            }
        }
    }
    let mut blocks = Vec::new();
    for k in 1..=depth {
        let cells = pow_u64(p.get(), k as usize);
        for b in 0..cells {
            let mut block = vec![0u64; k as usize];
            let mut rest = b;
            for slot in block.iter_mut().rev() {
                *slot = rest % p.get();
                rest /= p.get();
            }
            let spec = CylinderSpec::new(
                p,
                block
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| (i as i64 - 1, d)),
            )?;
            blocks.push((format!("cylinder base=-1 digits={}", join_u64(&block)), spec));
        }
    }

    let neg_len = (depth + INTERVAL_TAIL) as usize;
    let mut interval_counts = vec![0u64; intervals.len()];
    let mut block_counts = vec![0u64; blocks.len()];
    let mut rng = CounterRng::new(seed);
    for _ in 0..len {
        // digits in ascending index order, matching sample_uniform_word
        let mut ascending: Vec<u64> = (0..neg_len).map(|_| rng.below(p.get())).collect();
        ascending.reverse();
        let neg = ascending;
        let nonneg: Vec<u64> = (0..depth as usize).map(|_| rng.below(p.get())).collect();
        for (c, (_, interval)) in interval_counts.iter_mut().zip(&intervals) {
            if interval.contains_digits(&neg)? {
                *c += 1;
            }
        }
        let word = TwoSidedWord::new(p, neg, nonneg)?;
        for (c, (_, spec)) in block_counts.iter_mut().zip(&blocks) {
            if spec.contains(&word)? {
                *c += 1;
            }
        }
    }

    let mut tests = Vec::new();
    for ((name, interval), &count) in intervals.iter().zip(&interval_counts) {
        let mu = (p.get() as f64).powi(-(interval.depth() as i32));
        tests.push(MeasureTestStat {
            name: name.clone(),
            expected: mu,
            count,
            frequency: count as f64 / len as f64,
            z: z_score(count, len as u64, mu),
        });
    }
    for ((name, spec), &count) in blocks.iter().zip(&block_counts) {
        let mu = (p.get() as f64).powi(-(spec.depth() as i32));
        tests.push(MeasureTestStat {
            name: name.clone(),
            expected: mu,
            count,
            frequency: count as f64 / len as f64,
            z: z_score(count, len as u64, mu),
        });
    }
    let max_abs_z = tests.iter().map(|t| t.z.abs()).fold(0.0, f64::max);
    Ok(MeasureCheckReport {
        p: p.get(),
        length: len,
        depth,
        seed,
        z_threshold,
        tests,
        max_abs_z,
        pass: max_abs_z <= z_threshold,
    })
}
