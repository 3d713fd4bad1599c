//! Closed-form RK4 steps for stretches where every rate limiter stays in one
//! regime.
//!
//! A limiter is either inside its band or pinned at `±limit`. With each
//! limiter's regime fixed the network is `ẋ = A·x + b`, and one RK4 step is
//! `x⁺ = M·x + m` with `M = I + hA + h²A²/2 + h³A³/6 + h⁴A⁴/24`. Each limited
//! rate is a linear function of the stage states, so its value at all four
//! stages can be predicted from `x`. When every prediction agrees with the
//! assumed regime the closed form matches the ordinary step up to rounding;
//! otherwise the caller takes an ordinary step.

use super::Network;

/// Regime maps are built lazily; beyond this many limiters only the
/// all-free regime is used.
const MAX_TRACKED_LIMITERS: usize = 4;

/// A limited rate `value = row·x` that enters the derivative as
/// `inject·clamp(value)`.
struct Limiter {
    row: Vec<f64>,
    inject: Vec<f64>,
    limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Free,
    High,
    Low,
}

impl Regime {
    fn of(value: f64, limit: f64) -> Self {
        if value > limit {
            Regime::High
        } else if value < -limit {
            Regime::Low
        } else {
            Regime::Free
        }
    }

    fn holds(self, value: f64, limit: f64) -> bool {
        match self {
            Regime::Free => value.abs() <= limit,
            Regime::High => value >= limit,
            Regime::Low => value <= -limit,
        }
    }

    fn pinned(self, limit: f64) -> Option<f64> {
        match self {
            Regime::Free => None,
            Regime::High => Some(limit),
            Regime::Low => Some(-limit),
        }
    }
}

/// Matrix stored as blocks of four rows, each block column by column, with
/// the row count padded to a multiple of four. Carries one offset for the
/// load applied and one without.
struct Blocks {
    rows: usize,
    n: usize,
    data: Vec<f64>,
    offset_on: Vec<f64>,
    offset_off: Vec<f64>,
}

impl Blocks {
    fn new(rows: &[Vec<f64>], mut offset_on: Vec<f64>, mut offset_off: Vec<f64>, n: usize) -> Self {
        let padded = rows.len().div_ceil(4) * 4;
        let mut data = vec![0.0; padded * n];
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                data[((i / 4) * n + j) * 4 + i % 4] = *v;
            }
        }
        offset_on.resize(padded, 0.0);
        offset_off.resize(padded, 0.0);
        Self {
            rows: rows.len(),
            n,
            data,
            offset_on,
            offset_off,
        }
    }

    fn padded(&self) -> usize {
        self.offset_on.len()
    }

    /// `out = A·x + offset`; `out` has `padded()` entries.
    fn apply(&self, x: &[f64], load_on: bool, out: &mut [f64]) {
        let offset = if load_on { &self.offset_on } else { &self.offset_off };
        #[cfg(target_arch = "x86_64")]
        if std::arch::is_x86_feature_detected!("avx") {
            // SAFETY: the CPU supports AVX.
            unsafe { apply_avx(&self.data, self.n, x, offset, out) };
            return;
        }
        apply_kernel(&self.data, self.n, x, offset, out);
    }
}

#[inline(always)]
fn apply_kernel(data: &[f64], n: usize, x: &[f64], offset: &[f64], out: &mut [f64]) {
    let (blocks, _) = out.as_chunks_mut::<4>();
    let (offsets, _) = offset.as_chunks::<4>();
    let (coeffs, _) = data.as_chunks::<4>();
    for ((o, off), block) in blocks.iter_mut().zip(offsets).zip(coeffs.chunks_exact(n)) {
        let mut acc = *off;
        for (&xj, a) in x.iter().zip(block) {
            for k in 0..4 {
                acc[k] += a[k] * xj;
            }
        }
        *o = acc;
    }
}

/// Same arithmetic as `apply_kernel` in 4-wide registers; no fused
/// multiply-add, so results match bit for bit.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx")]
fn apply_avx(data: &[f64], n: usize, x: &[f64], offset: &[f64], out: &mut [f64]) {
    apply_kernel(data, n, x, offset, out)
}

/// Step map and stage predictions for one combination of regimes.
struct RegimeStep {
    step: Blocks,
    /// Row `4·l + k`: limiter `l` at stage `k`.
    guards: Blocks,
}

type Dense = Vec<Vec<f64>>;

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn mat_vec(a: &Dense, v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

fn vec_mat(v: &[f64], a: &Dense) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|j| (0..n).map(|i| v[i] * a[i][j]).sum()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `Σ_k c_k·A^k`.
fn poly(powers: &[Dense], coeffs: &[f64]) -> Dense {
    let n = powers[0].len();
    let mut out = vec![vec![0.0; n]; n];
    for (p, c) in powers.iter().zip(coeffs) {
        for (o, r) in out.iter_mut().zip(p) {
            for (oij, pij) in o.iter_mut().zip(r) {
                *oij += c * pij;
            }
        }
    }
    out
}

/// `Σ_k c_k·A^k·b` given `[b, A·b, A²·b, …]`.
fn poly_vec(power_b: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let n = power_b[0].len();
    let mut out = vec![0.0; n];
    for (p, c) in power_b.iter().zip(coeffs) {
        for (o, v) in out.iter_mut().zip(p) {
            *o += c * v;
        }
    }
    out
}

pub(super) struct AffineStep {
    n: usize,
    h: f64,
    /// Dynamics with every limiter free.
    a_free: Dense,
    b_load: Vec<f64>,
    limiters: Vec<Limiter>,
    regimes: Vec<Option<RegimeStep>>,
    current: Vec<Regime>,
    out: Vec<f64>,
    guard_out: Vec<f64>,
}

impl AffineStep {
    pub(super) fn new(net: &Network, h: f64) -> Self {
        let n = net.dim;
        let mut tie = vec![0.0; net.area_count()];
        let mut limiters = Vec::new();
        let mut linear = Network {
            thermal: net.thermal.clone(),
            hydro: net.hydro.clone(),
            wind: net.wind.clone(),
            ties: net.ties.clone(),
            freq: net.freq.clone(),
            ..*net
        };
        for b in &mut linear.thermal {
            let s = b.c.base;
            if b.turbine_limit.is_finite() {
                let mut row = vec![0.0; n];
                row[s + 2] = b.inv_tt;
                row[s + 3] = -b.inv_tt;
                let mut inject = vec![0.0; n];
                inject[s + 3] = 1.0;
                inject[s + 4] = b.kr;
                limiters.push(Limiter {
                    row,
                    inject,
                    limit: b.turbine_limit,
                });
            }
            if b.reheat_limit.is_finite() {
                let mut row = vec![0.0; n];
                row[s + 2] = b.kr * b.inv_tt;
                row[s + 3] = b.inv_tr - b.kr * b.inv_tt;
                row[s + 4] = -b.inv_tr;
                let mut inject = vec![0.0; n];
                inject[s + 4] = 1.0;
                limiters.push(Limiter {
                    row,
                    inject,
                    limit: b.reheat_limit,
                });
            }
            b.turbine_limit = f64::INFINITY;
            b.reheat_limit = f64::INFINITY;
        }

        // columns of A from unit probes with the load off
        let mut a_free = vec![vec![0.0; n]; n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            linear.derivative(f64::NEG_INFINITY, &e, &mut col, &mut tie);
            for (i, c) in col.iter().enumerate() {
                a_free[i][j] = *c;
            }
            e[j] = 0.0;
        }
        let mut b_load = vec![0.0; n];
        linear.derivative(f64::INFINITY, &vec![0.0; n], &mut b_load, &mut tie);

        let tracked = if limiters.len() <= MAX_TRACKED_LIMITERS {
            3usize.pow(limiters.len() as u32)
        } else {
            1
        };
        let mut this = Self {
            n,
            h,
            a_free,
            b_load,
            regimes: (0..tracked).map(|_| None).collect(),
            current: vec![Regime::Free; limiters.len()],
            limiters,
            out: Vec::new(),
            guard_out: Vec::new(),
        };
        let free = this.build(&vec![Regime::Free; this.limiters.len()]);
        this.out = vec![0.0; free.step.padded()];
        this.guard_out = vec![0.0; free.guards.padded()];
        this.regimes[0] = Some(free);
        this
    }

    fn index(regimes: &[Regime]) -> usize {
        regimes.iter().rev().fold(0, |acc, r| {
            acc * 3
                + match r {
                    Regime::Free => 0,
                    Regime::High => 1,
                    Regime::Low => 2,
                }
        })
    }

    fn build(&self, regimes: &[Regime]) -> RegimeStep {
        let (n, h) = (self.n, self.h);
        let mut a = self.a_free.clone();
        let mut pinned = vec![0.0; n];
        for (lim, regime) in self.limiters.iter().zip(regimes) {
            if let Some(value) = regime.pinned(lim.limit) {
                for (i, w) in lim.inject.iter().enumerate() {
                    if *w != 0.0 {
                        for (aij, g) in a[i].iter_mut().zip(&lim.row) {
                            *aij -= w * g;
                        }
                        pinned[i] += w * value;
                    }
                }
            }
        }
        let with_load: Vec<f64> = self.b_load.iter().zip(&pinned).map(|(l, p)| l + p).collect();

        let mut powers = vec![identity(n)];
        for k in 1..=4 {
            let next = mat_mul(&powers[k - 1], &a);
            powers.push(next);
        }
        let power_b = |b: &[f64]| {
            let mut out = vec![b.to_vec()];
            for k in 1..=3 {
                let next = mat_vec(&a, &out[k - 1]);
                out.push(next);
            }
            out
        };
        let (pb_on, pb_off) = (power_b(&with_load), power_b(&pinned));

        let step_coeffs = [h, h * h / 2.0, h.powi(3) / 6.0, h.powi(4) / 24.0];
        let step_matrix = poly(&powers, &[1.0, h, h * h / 2.0, h.powi(3) / 6.0, h.powi(4) / 24.0]);
        let step = Blocks::new(
            &step_matrix,
            poly_vec(&pb_on, &step_coeffs),
            poly_vec(&pb_off, &step_coeffs),
            n,
        );

        // stage states as affine maps of x: (matrix coefficients, offset coefficients)
        let stage_coeffs: [(&[f64], &[f64]); 4] = [
            (&[1.0], &[]),
            (&[1.0, h / 2.0], &[h / 2.0]),
            (&[1.0, h / 2.0, h * h / 4.0], &[h / 2.0, h * h / 4.0]),
            (&[1.0, h, h * h / 2.0, h.powi(3) / 4.0], &[h, h * h / 2.0, h.powi(3) / 4.0]),
        ];
        let mut rows = Vec::new();
        let mut on = Vec::new();
        let mut off = Vec::new();
        for lim in &self.limiters {
            for (mc, oc) in stage_coeffs {
                rows.push(vec_mat(&lim.row, &poly(&powers, mc)));
                let offset = |pb: &[Vec<f64>]| {
                    if oc.is_empty() {
                        0.0
                    } else {
                        dot(&lim.row, &poly_vec(pb, oc))
                    }
                };
                on.push(offset(&pb_on));
                off.push(offset(&pb_off));
            }
        }
        RegimeStep {
            step,
            guards: Blocks::new(&rows, on, off, n),
        }
    }

    /// Advances `x` in place and returns true when every limiter keeps one
    /// regime through the step; leaves `x` untouched otherwise.
    pub(super) fn try_step(&mut self, x: &mut [f64], load_on: bool) -> bool {
        for (r, lim) in self.current.iter_mut().zip(&self.limiters) {
            *r = Regime::of(dot(&lim.row, x), lim.limit);
        }
        let idx = if self.regimes.len() == 1 {
            if self.current.iter().any(|r| *r != Regime::Free) {
                return false;
            }
            0
        } else {
            Self::index(&self.current)
        };
        if self.regimes[idx].is_none() {
            self.regimes[idx] = Some(self.build(&self.current));
        }
        let Some(regime) = &self.regimes[idx] else {
            return false;
        };

        if regime.guards.rows > 0 {
            regime.guards.apply(x, load_on, &mut self.guard_out);
            let guard_values = self.guard_out[..regime.guards.rows].chunks_exact(4);
            for ((values, lim), r) in guard_values.zip(&self.limiters).zip(&self.current) {
                if !values.iter().all(|v| r.holds(*v, lim.limit)) {
                    return false;
                }
            }
        }
        regime.step.apply(x, load_on, &mut self.out);
        x.copy_from_slice(&self.out[..self.n]);
        true
    }
}
