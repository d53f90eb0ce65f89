//! Post-processing of logged time series.

/// Periodogram power of `y` (mean and linear trend removed) at angular
/// frequency `w`, for possibly non-uniform sample times.
fn power(t: &[f64], y: &[f64], w: f64) -> f64 {
    let (mut c, mut s) = (0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(y) {
        let (sn, cs) = (w * ti).sin_cos();
        c += yi * cs;
        s += yi * sn;
    }
    c * c + s * s
}

fn detrend(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|x| (x - tm) * (x - tm)).sum();
    let sty: f64 = t.iter().zip(y).map(|(x, v)| (x - tm) * (v - ym)).sum();
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    t.iter().zip(y).map(|(x, v)| v - ym - slope * (x - tm)).collect()
}

/// Angular frequency of the strongest oscillation in `y(t)`.
///
/// Scans from one cycle per record length up to the sampling Nyquist limit,
/// then refines the peak by golden-section search. `None` for fewer than
/// eight samples.
pub fn dominant_frequency(t: &[f64], y: &[f64]) -> Option<f64> {
    if t.len() < 8 || t.len() != y.len() {
        return None;
    }
    let span = t[t.len() - 1] - t[0];
    let dt = span / (t.len() - 1) as f64;
    if !(span > 0.0) {
        return None;
    }
    let r = detrend(t, y);
    let w_lo = 2.0 * std::f64::consts::PI / span;
    let w_hi = std::f64::consts::PI / dt;
    let step = w_lo / 8.0;
    let n = ((w_hi - w_lo) / step).ceil() as usize;
    let mut best = (w_lo, -1.0);
    for k in 0..=n {
        let w = w_lo + k as f64 * step;
        let p = power(t, &r, w);
        if p > best.1 {
            best = (w, p);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(w_lo * 0.5), best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if power(t, &r, c) > power(t, &r, d) {
            b = d;
        } else {
            a = c;
        }
    }
    Some(0.5 * (a + b))
}

/// Half the peak-to-peak range of `y` over samples with `t` in `[t0, t1]`.
pub fn half_range(t: &[f64], y: &[f64], t0: f64, t1: f64) -> Option<f64> {
    let v: Vec<f64> = t.iter().zip(y).filter(|(x, _)| **x >= t0 && **x <= t1).map(|(_, v)| *v).collect();
    if v.is_empty() {
        return None;
    }
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    Some(0.5 * (hi - lo))
}

/// Mean of `y` over samples with `t` in `[t0, t1]`.
pub fn window_mean(t: &[f64], y: &[f64], t0: f64, t1: f64) -> Option<f64> {
    let v: Vec<f64> = t.iter().zip(y).filter(|(x, _)| **x >= t0 && **x <= t1).map(|(_, v)| *v).collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Linear interpolation of `y(t)` at `x`; `None` outside the sampled range.
pub fn interp_at(t: &[f64], y: &[f64], x: f64) -> Option<f64> {
    let k = t.iter().position(|s| *s >= x)?;
    if k == 0 {
        return (t[0] == x).then(|| y[0]);
    }
    let f = (x - t[k - 1]) / (t[k] - t[k - 1]);
    Some(y[k - 1] + f * (y[k] - y[k - 1]))
}

/// Turn of the cloud's major axis between `t0` and `t1`, counted positive in
/// the trap's sense of rotation. The trap matrix is O(φ)DO(φ)ᵀ with
/// O(φ) = [[cos φ, sin φ], [−sin φ, cos φ]], so its axes turn clockwise.
pub fn turn_in_trap_sense(t: &[f64], angle: &[f64], t0: f64, t1: f64) -> Option<f64> {
    Some(-(interp_at(t, angle, t1)? - interp_at(t, angle, t0)?))
}

pub fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation.
pub fn rank_correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}
