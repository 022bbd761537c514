//! Decision thresholds from misclassification cost ratios.
//!
//! Scores are unit-root probabilities and a series is called a unit root
//! when its score is at least the threshold. A Type I error (`e1`) rejects a
//! true unit root, a Type II error (`e2`) accepts a near unit root. With unit
//! cost on `e1` and `ratio` on `e2`, a larger ratio makes accepting the null
//! more expensive and so raises the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CostRatio(f64);

impl CostRatio {
    pub fn new(ratio: f64) -> Result<Self> {
        if ratio.is_finite() && ratio > 0.0 {
            Ok(CostRatio(ratio))
        } else {
            Err(Error::InvalidConfig(format!("cost ratio must be positive, got {ratio}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Threshold interval `(lo, hi]` over which the error counts are constant.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    lo: f64,
    hi: f64,
    e1: u64,
    e2: u64,
}

fn segments(scores: &[f64], truths: &[i8]) -> Result<(Vec<Segment>, u64, u64)> {
    if scores.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: truths.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numerical("non-finite score".into()));
    }
    let n_ur = truths.iter().filter(|&&t| t == 1).count() as u64;
    let n_nur = truths.len() as u64 - n_ur;
    if n_ur == 0 || n_nur == 0 {
        return Err(Error::DegenerateLabels("calibration needs both classes".into()));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut out = Vec::new();
    let (mut e1, mut e2) = (0, n_nur);
    let mut lo = f64::NEG_INFINITY;
    let mut j = 0;
    while j < idx.len() {
        let s = scores[idx[j]];
        out.push(Segment { lo, hi: s, e1, e2 });
        while j < idx.len() && scores[idx[j]] == s {
            if truths[idx[j]] == 1 {
                e1 += 1;
            } else {
                e2 -= 1;
            }
            j += 1;
        }
        lo = s;
    }
    out.push(Segment {
        lo,
        hi: f64::INFINITY,
        e1,
        e2,
    });
    Ok((out, n_ur, n_nur))
}

/// Point of `(lo, hi]` used when 0.5 is not inside it.
fn representative(s: &Segment) -> f64 {
    if s.lo < 0.5 && 0.5 <= s.hi {
        0.5
    } else if s.lo == f64::NEG_INFINITY {
        s.hi
    } else if s.hi == f64::INFINITY {
        if s.lo < 1.0 {
            0.5 * (s.lo + 1.0)
        } else {
            s.lo.next_up()
        }
    } else {
        0.5 * (s.lo + s.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub ratio: f64,
    pub threshold: f64,
    /// Validation counts at the threshold.
    pub type_i: u64,
    pub type_ii: u64,
    pub cost: f64,
}

/// Cost-minimising threshold over the distinct validation scores. Among
/// optimal intervals the one nearest 0.5 wins; within it, 0.5 itself if
/// covered, otherwise the interval midpoint.
pub fn calibrate(scores: &[f64], truths: &[i8], ratio: CostRatio) -> Result<Calibration> {
    let (segs, _, _) = segments(scores, truths)?;
    let r = ratio.value();
    let cost = |s: &Segment| s.e1 as f64 + r * s.e2 as f64;
    let best = segs.iter().map(cost).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * best.max(1.0);
    let mut chosen: Option<(f64, &Segment)> = None;
    for s in segs.iter().filter(|s| cost(s) <= best + tol) {
        let t = representative(s);
        if chosen.map_or(true, |(c, _)| (t - 0.5).abs() < (c - 0.5).abs()) {
            chosen = Some((t, s));
        }
    }
    let (threshold, s) = chosen.expect("at least one segment");
    Ok(Calibration {
        ratio: r,
        threshold,
        type_i: s.e1,
        type_ii: s.e2,
        cost: cost(s),
    })
}

pub fn threshold_for_cost_ratio(scores: &[f64], truths: &[i8], ratio: CostRatio) -> Result<f64> {
    Ok(calibrate(scores, truths, ratio)?.threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaMapping {
    pub alpha: f64,
    pub ratio: f64,
    pub threshold: f64,
    /// Validation size at `threshold`.
    pub achieved_alpha: f64,
    /// Set when `alpha` lies outside the sizes reachable with ratios in
    /// `[1e-4, 1e4]`. Inside the range the achieved size can still differ
    /// from `alpha`, since only sizes on the convex hull of the ROC curve
    /// are cost-optimal for some ratio.
    pub warning: bool,
}

const RATIO_RANGE: (f64, f64) = (1e-4, 1e4);

/// Cost ratio whose calibrated threshold has validation size `alpha`.
///
/// Size is a non-decreasing step function of the ratio. The ratio returned
/// is the geometric centre of the ratios whose size is `alpha` (or of the
/// jump across it), found by bisection on the log scale.
pub fn alpha_to_cost_ratio(scores: &[f64], truths: &[i8], alpha: f64) -> Result<AlphaMapping> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (_, n_ur, _) = segments(scores, truths)?;
    let size = |log_r: f64| -> Result<(f64, Calibration)> {
        let c = calibrate(scores, truths, CostRatio::new(log_r.exp())?)?;
        Ok((c.type_i as f64 / n_ur as f64, c))
    };
    let (a, b) = (RATIO_RANGE.0.ln(), RATIO_RANGE.1.ln());
    let tol = 1e-12;
    let (lo_size, lo_cal) = size(a)?;
    let (hi_size, hi_cal) = size(b)?;
    if alpha < lo_size - tol || alpha > hi_size + tol {
        let (s, c) = if alpha < lo_size { (lo_size, lo_cal) } else { (hi_size, hi_cal) };
        return Ok(AlphaMapping {
            alpha,
            ratio: c.ratio,
            threshold: c.threshold,
            achieved_alpha: s,
            warning: true,
        });
    }
    // First log-ratio with size >= alpha, and last with size <= alpha.
    let bisect = |pred: &dyn Fn(f64) -> bool| -> Result<f64> {
        let (mut lo, mut hi) = (a, b);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if pred(size(mid)?.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let first = bisect(&|s| s >= alpha - tol)?;
    let last = bisect(&|s| s > alpha + tol)?;
    let log_r = 0.5 * (first + last);
    let (achieved, cal) = size(log_r)?;
    Ok(AlphaMapping {
        alpha,
        ratio: cal.ratio,
        threshold: cal.threshold,
        achieved_alpha: achieved,
        warning: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::logistic;
    use crate::rng::rng_from_seed;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn scored(n: usize, seed: u64) -> (Vec<f64>, Vec<i8>) {
        let mut rng = rng_from_seed(seed);
        let mut s = Vec::new();
        let mut t = Vec::new();
        for _ in 0..n {
            let ur = rng.gen::<bool>();
            let z: f64 = rng.sample(StandardNormal);
            s.push(logistic(if ur { 1.0 } else { -1.0 } + 1.2 * z));
            t.push(if ur { 1 } else { -1 });
        }
        (s, t)
    }

    /// Brute-force minimum cost over a fine threshold grid.
    fn brute_cost(s: &[f64], t: &[i8], r: f64) -> f64 {
        let mut best = f64::INFINITY;
        let mut cands: Vec<f64> = s.to_vec();
        cands.push(2.0);
        for c in cands {
            let e1 = s.iter().zip(t).filter(|(v, l)| **l == 1 && **v < c).count() as f64;
            let e2 = s.iter().zip(t).filter(|(v, l)| **l == -1 && **v >= c).count() as f64;
            best = best.min(e1 + r * e2);
        }
        best
    }

    #[test]
    fn minimises_cost() {
        let (s, t) = scored(400, 1);
        for r in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let c = calibrate(&s, &t, CostRatio::new(r).unwrap()).unwrap();
            assert!((c.cost - brute_cost(&s, &t, r)).abs() < 1e-9);
            let e1 = s.iter().zip(&t).filter(|(v, l)| **l == 1 && **v < c.threshold).count() as u64;
            let e2 = s.iter().zip(&t).filter(|(v, l)| **l == -1 && **v >= c.threshold).count() as u64;
            assert_eq!((e1, e2), (c.type_i, c.type_ii));
        }
    }

    #[test]
    fn monotone_in_ratio() {
        let (s, t) = scored(2000, 2);
        let th: Vec<f64> = [0.25, 0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&r| threshold_for_cost_ratio(&s, &t, CostRatio::new(r).unwrap()).unwrap())
            .collect();
        for w in th.windows(2) {
            assert!(w[0] < w[1], "{th:?}");
        }
    }

    #[test]
    fn separated_scores_pick_half() {
        let s = [0.1, 0.2, 0.8, 0.9];
        let t = [-1, -1, 1, 1];
        assert_eq!(threshold_for_cost_ratio(&s, &t, CostRatio::new(1.0).unwrap()).unwrap(), 0.5);
        let s = [0.6, 0.65, 0.8, 0.9];
        let th = threshold_for_cost_ratio(&s, &t, CostRatio::new(1.0).unwrap()).unwrap();
        assert!((th - 0.725).abs() < 1e-12);
    }

    #[test]
    fn alpha_mapping_inverts_calibration() {
        let (s, t) = scored(3000, 3);
        let m = alpha_to_cost_ratio(&s, &t, 0.05).unwrap();
        assert!(!m.warning);
        let n_ur = t.iter().filter(|&&v| v == 1).count() as f64;
        let size_at = |r: f64| calibrate(&s, &t, CostRatio::new(r).unwrap()).unwrap().type_i as f64 / n_ur;
        assert!(size_at(m.ratio * 0.999) <= 0.05 && size_at(m.ratio * 1.001) >= 0.05, "{m:?}");
        let c = calibrate(&s, &t, CostRatio::new(m.ratio).unwrap()).unwrap();
        assert_eq!(c.threshold, m.threshold);

        let one = calibrate(&s, &t, CostRatio::new(1.0).unwrap()).unwrap();
        let balanced = alpha_to_cost_ratio(&s, &t, one.type_i as f64 / n_ur).unwrap();
        let back = calibrate(&s, &t, CostRatio::new(balanced.ratio).unwrap()).unwrap();
        assert_eq!(back.type_i, one.type_i);
    }

    #[test]
    fn errors() {
        assert!(CostRatio::new(0.0).is_err());
        assert!(calibrate(&[0.1, 0.2], &[1, 1], CostRatio::new(1.0).unwrap()).is_err());
        assert!(alpha_to_cost_ratio(&[0.1, 0.9], &[-1, 1], 1.5).is_err());
    }
}
