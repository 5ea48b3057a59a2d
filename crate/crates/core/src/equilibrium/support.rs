//! Support enumeration.
//!
//! Each player is assigned to one of three slots: withholding (`x = 0`),
//! disclosing (`x = 1`) or mixing (`0 < x < 1`). Mixing players must be
//! indifferent, `C1 - C0 = 0`, which gives one equation per mixing player in
//! the *other* players' probabilities. Boundary players must have a marginal
//! of the right sign. Every pattern is solved independently and the surviving
//! candidates are verified against the KKT conditions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    certificate_from_profile, kkt_residuals, verify_kkt, EquilibriumError, EquilibriumReport,
    KktCertificate, Method, Residuals, Result, SearchTrace,
};
use crate::config::{Limits, Tolerances};
use crate::game::{expected_increment, GameSpec, StrategyProfile};

/// At most this many failing patterns are listed by name in the trace.
const TRACE_LIMIT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: Tolerances,
    pub limits: Limits,
    /// Starting points per pattern for the interior Newton solve.
    pub starts: usize,
    /// Newton iterations per start.
    pub max_iters: usize,
    /// Step shrink factor in the backtracking line search.
    pub damping: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            limits: Limits::default(),
            starts: 8,
            max_iters: 500,
            damping: 0.5,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Withhold,
    Disclose,
    Mix,
}

fn decode_pattern(n: usize, mut index: usize) -> Vec<Slot> {
    (0..n)
        .map(|_| {
            let slot = match index % 3 {
                0 => Slot::Withhold,
                1 => Slot::Disclose,
                _ => Slot::Mix,
            };
            index /= 3;
            slot
        })
        .collect()
}

fn pattern_label(pattern: &[Slot]) -> String {
    pattern
        .iter()
        .map(|s| match s {
            Slot::Withhold => '0',
            Slot::Disclose => '1',
            Slot::Mix => '*',
        })
        .collect()
}

fn others(x: &[f64], j: usize) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|(k, _)| *k != j)
        .map(|(_, v)| *v)
        .collect()
}

/// `C1 - C0` for player `j`, evaluated on any real vector (the multilinear
/// extension outside the unit cube).
fn gap(g: &GameSpec, x: &[f64], j: usize) -> f64 {
    expected_increment(g.a(), g.gamma(), &others(x, j)) - g.beta()[j]
}

#[derive(Default)]
struct PatternOutcome {
    candidates: Vec<(Vec<f64>, bool)>,
    pruned: bool,
    solved: bool,
    failed: Option<String>,
}

struct PatternSolver<'a> {
    g: &'a GameSpec,
    opts: &'a SolveOptions,
}

impl PatternSolver<'_> {
    fn run(&self, index: usize) -> PatternOutcome {
        let n = self.g.n();
        let pattern = decode_pattern(n, index);
        let mixing: Vec<usize> = (0..n).filter(|&j| pattern[j] == Slot::Mix).collect();
        let base: Vec<f64> = pattern
            .iter()
            .map(|s| match s {
                Slot::Disclose => 1.0,
                _ => 0.0,
            })
            .collect();

        if mixing.is_empty() {
            return self.pure(&pattern, base);
        }
        if !self.range_feasible(&pattern, &base, &mixing) {
            return PatternOutcome {
                pruned: true,
                ..Default::default()
            };
        }
        if mixing.len() == 1 {
            return self.single_mixer(&pattern, base, mixing[0]);
        }
        self.newton(index, &pattern, base, &mixing)
    }

    fn sign_ok(&self, slot: Slot, gap: f64, slack: f64) -> bool {
        match slot {
            Slot::Withhold => gap <= slack,
            Slot::Disclose => gap >= -slack,
            Slot::Mix => true,
        }
    }

    fn pure(&self, pattern: &[Slot], x: Vec<f64>) -> PatternOutcome {
        let tie = self.opts.tol.deviation_tie;
        let ok = (0..x.len()).all(|j| self.sign_ok(pattern[j], gap(self.g, &x, j), tie));
        let mut out = PatternOutcome::default();
        if ok {
            out.candidates.push((x, false));
        }
        out
    }

    /// Each `C1 - C0` is monotone in every other player's probability, so its
    /// range over the free coordinates is spanned by setting all mixing
    /// players to 0 or all to 1.
    fn range_feasible(&self, pattern: &[Slot], base: &[f64], mixing: &[usize]) -> bool {
        let slack = self.opts.tol.kkt;
        let mut high = base.to_vec();
        for &k in mixing {
            high[k] = 1.0;
        }
        (0..base.len()).all(|j| {
            let (a, b) = (gap(self.g, base, j), gap(self.g, &high, j));
            let (lo, hi) = (a.min(b), a.max(b));
            match pattern[j] {
                Slot::Withhold => lo <= slack,
                Slot::Disclose => hi >= -slack,
                Slot::Mix => lo <= slack && hi >= -slack,
            }
        })
    }

    /// One mixing player: her own indifference does not involve her own
    /// probability, so either it fails outright or it holds for every value
    /// (a degenerate continuum). In the latter case the boundary players'
    /// marginals are affine in the mixer's probability; report the midpoint
    /// of the interval where all of them keep the right sign.
    fn single_mixer(&self, pattern: &[Slot], mut x: Vec<f64>, j: usize) -> PatternOutcome {
        let mut out = PatternOutcome::default();
        if gap(self.g, &x, j).abs() > self.opts.tol.interior_solve {
            return out;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for i in (0..x.len()).filter(|&i| i != j) {
            x[j] = 0.0;
            let at0 = gap(self.g, &x, i);
            x[j] = 1.0;
            let slope = gap(self.g, &x, i) - at0;
            // Need sign * (at0 + slope t) <= 0 with sign = +1 for withholders.
            let sign = if pattern[i] == Slot::Withhold {
                1.0
            } else {
                -1.0
            };
            let (c, s) = (sign * at0, sign * slope);
            if s.abs() < f64::EPSILON {
                if c > self.opts.tol.deviation_tie {
                    return out;
                }
            } else if s > 0.0 {
                hi = hi.min(-c / s);
            } else {
                lo = lo.max(-c / s);
            }
        }
        if lo > hi {
            return out;
        }
        x[j] = 0.5 * (lo + hi);
        out.solved = true;
        if x[j] > 0.0 && x[j] < 1.0 {
            out.candidates.push((x, true));
        }
        out
    }

    fn newton(
        &self,
        index: usize,
        pattern: &[Slot],
        base: Vec<f64>,
        mixing: &[usize],
    ) -> PatternOutcome {
        let mut out = PatternOutcome::default();
        let mut rng = ChaCha8Rng::seed_from_u64(
            self.opts
                .seed
                .wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let mut any_converged = false;
        for start in 0..self.opts.starts.max(1) {
            let mut x = base.clone();
            for &k in mixing {
                x[k] = if start == 0 { 0.5 } else { rng.random::<f64>() };
            }
            let Some(root) = self.newton_from(x, mixing) else {
                continue;
            };
            any_converged = true;
            let Some(root) = self.accept_root(pattern, root, mixing) else {
                continue;
            };
            let dup = out.candidates.iter().any(|(y, _)| {
                y.iter()
                    .zip(&root)
                    .all(|(a, b)| (a - b).abs() <= self.opts.tol.dedupe)
            });
            if !dup {
                out.candidates.push((root, false));
            }
        }
        out.solved = any_converged;
        if !any_converged {
            out.failed = Some(pattern_label(pattern));
        }
        out
    }

    fn residual(&self, x: &[f64], mixing: &[usize]) -> Vec<f64> {
        mixing.iter().map(|&j| gap(self.g, x, j)).collect()
    }

    /// Damped Newton on the indifference system of the mixing players.
    fn newton_from(&self, mut x: Vec<f64>, mixing: &[usize]) -> Option<Vec<f64>> {
        let k = mixing.len();
        let tol = self.opts.tol.interior_solve;
        let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut f = self.residual(&x, mixing);
        for _ in 0..self.opts.max_iters {
            let fnorm = norm(&f);
            if !fnorm.is_finite() {
                return None;
            }
            if fnorm <= tol {
                return Some(x);
            }
            // Multilinear: the partial derivative in x_l is the difference of
            // the function at x_l = 1 and x_l = 0.
            let mut jac = vec![vec![0.0; k]; k];
            for (a, &j) in mixing.iter().enumerate() {
                for (b, &l) in mixing.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    let mut y = x.clone();
                    y[l] = 1.0;
                    let hi = gap(self.g, &y, j);
                    y[l] = 0.0;
                    jac[a][b] = hi - gap(self.g, &y, j);
                }
            }
            let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
            let step = solve_linear(jac, rhs)?;
            let mut t = 1.0;
            loop {
                let trial: Vec<f64> = {
                    let mut y = x.clone();
                    for (a, &j) in mixing.iter().enumerate() {
                        y[j] += t * step[a];
                    }
                    y
                };
                let inside = mixing.iter().all(|&j| (-1.0..=2.0).contains(&trial[j]));
                if inside {
                    let ft = self.residual(&trial, mixing);
                    if norm(&ft) < fnorm {
                        x = trial;
                        f = ft;
                        break;
                    }
                }
                t *= self.opts.damping;
                if t < 1e-12 {
                    return None;
                }
            }
        }
        (norm(&f) <= tol).then_some(x)
    }

    /// Keeps a converged root if it lies in the cube, is genuinely mixed and
    /// the boundary players' marginals have the right sign.
    fn accept_root(&self, pattern: &[Slot], mut x: Vec<f64>, mixing: &[usize]) -> Option<Vec<f64>> {
        let edge = self.opts.tol.degeneracy;
        for &j in mixing {
            if x[j] < -edge || x[j] > 1.0 + edge {
                return None;
            }
            x[j] = x[j].clamp(0.0, 1.0);
        }
        // Pure profiles belong to the pure patterns.
        if x.iter().all(|&v| v == 0.0 || v == 1.0) {
            return None;
        }
        let slack = self.opts.tol.kkt;
        (0..x.len())
            .all(|j| self.sign_ok(pattern[j], gap(self.g, &x, j), slack))
            .then_some(x)
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
#[allow(clippy::needless_range_loop)]
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for c in col..n {
                    a[row][c] -= factor * a[col][c];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

fn is_degenerate(g: &GameSpec, x: &[f64], tol: f64) -> bool {
    (0..x.len()).any(|j| (x[j] == 0.0 || x[j] == 1.0) && gap(g, x, j).abs() < tol)
}

/// Searches all `3^n` support patterns for equilibria.
///
/// Every returned certificate passes [`verify_kkt`] at `opts.tol.kkt`, and the
/// pure ones coincide with the pure-profile oracle. Mixed equilibria are found
/// on a best-effort basis; the trace records patterns where the interior solve
/// did not converge and warns when the count is even in a non-degenerate game.
pub fn solve_equilibria(g: &GameSpec, opts: &SolveOptions) -> Result<EquilibriumReport> {
    let n = g.n();
    if n > opts.limits.support {
        return Err(EquilibriumError::Cap {
            what: "support-enumeration",
            n,
            cap: opts.limits.support,
        });
    }
    let patterns = 3usize.pow(n as u32);
    let solver = PatternSolver { g, opts };
    let outcomes: Vec<PatternOutcome> = (0..patterns)
        .into_par_iter()
        .map(|index| solver.run(index))
        .collect();

    let mut trace = SearchTrace {
        patterns,
        ..Default::default()
    };
    let mut degenerate = false;
    let mut candidates: Vec<KktCertificate> = Vec::new();
    for outcome in outcomes {
        trace.pruned += outcome.pruned as usize;
        trace.solved += outcome.solved as usize;
        if let Some(label) = outcome.failed {
            if trace.non_converged.len() < TRACE_LIMIT {
                trace.non_converged.push(label);
            }
        }
        for (x, flagged) in outcome.candidates {
            let profile = StrategyProfile::new(x)?;
            let cert = certificate_from_profile(g, &profile)?;
            if verify_kkt(g, &cert, opts.tol.kkt)?.is_valid() {
                degenerate |= flagged;
                candidates.push(cert);
            }
        }
    }

    candidates.sort_by(|a, b| {
        a.x.iter()
            .zip(&b.x)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut certificates: Vec<KktCertificate> = Vec::new();
    for cert in candidates {
        let seen = certificates.iter().any(|c| {
            c.x.iter()
                .zip(&cert.x)
                .all(|(u, v)| (u - v).abs() <= opts.tol.dedupe)
        });
        if !seen {
            certificates.push(cert);
        }
    }

    let mut residuals = Residuals::default();
    for cert in &certificates {
        residuals = residuals.merge(&kkt_residuals(g, cert)?);
        degenerate |= is_degenerate(g, &cert.x, opts.tol.degeneracy);
    }
    if certificates.is_empty() {
        trace.warnings.push(format!(
            "no equilibrium found among {patterns} support patterns ({} pruned, {} interior solves failed)",
            trace.pruned,
            trace.non_converged.len()
        ));
    } else if !degenerate && certificates.len().is_multiple_of(2) {
        trace.warnings.push(format!(
            "non-degenerate game with an even number ({}) of equilibria; a mixed equilibrium was probably missed",
            certificates.len()
        ));
    }
    Ok(EquilibriumReport {
        method: Method::SupportEnumeration,
        certificates,
        residuals,
        degenerate,
        trace,
    })
}
