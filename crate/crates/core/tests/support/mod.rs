//! Reference implementations used as oracles by the integration tests.
//!
//! Everything here is built from dense matrices over a finite position
//! window, independently of the sparse engine.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qwalk_povm::{CoinSchedule, Mat2, Position, Spinor};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Index of `(x, coin)` in a window `[-span, span]`.
fn index(x: Position, coin: usize, span: Position) -> usize {
    2 * (x + span) as usize + coin
}

/// Full one-step operator `T·Σ_x |x⟩⟨x| ⊗ C_{x,n}` on the window.
pub fn dense_step(schedule: &CoinSchedule, n: u32, span: Position) -> DMatrix<Complex64> {
    let dim = 2 * (2 * span + 1) as usize;
    let mut coin = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for x in -span..=span {
        let m = schedule.coin(n, x);
        for a in 0..2 {
            for b in 0..2 {
                coin[(index(x, a, span), index(x, b, span))] = m.0[a][b];
            }
        }
    }
    let mut shift = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for x in -span..=span {
        if x < span {
            shift[(index(x + 1, 0, span), index(x, 0, span))] = c(1.0, 0.0);
        }
        if x > -span {
            shift[(index(x - 1, 1, span), index(x, 1, span))] = c(1.0, 0.0);
        }
    }
    shift * coin
}

/// Product of all step operators, wide enough that nothing leaves the window.
pub fn dense_walk(
    schedule: &CoinSchedule,
    steps: u32,
    x0: Position,
) -> (DMatrix<Complex64>, Position) {
    let span = x0.abs() + steps as Position + 1;
    let dim = 2 * (2 * span + 1) as usize;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for n in 1..=steps {
        u = dense_step(schedule, n, span) * u;
    }
    (u, span)
}

/// Final spinor at every site reached with nonzero amplitude.
pub fn dense_final_state(
    schedule: &CoinSchedule,
    steps: u32,
    x0: Position,
    coin: &Spinor,
) -> BTreeMap<Position, Spinor> {
    let (u, span) = dense_walk(schedule, steps, x0);
    let mut out = BTreeMap::new();
    for x in -span..=span {
        let mut amp = [c(0.0, 0.0); 2];
        for a in 0..2 {
            for b in 0..2 {
                amp[a] += u[(index(x, a, span), index(x0, b, span))] * coin.0[b];
            }
        }
        if amp[0].norm_sqr() + amp[1].norm_sqr() > 1e-28 {
            out.insert(x, Spinor::new(amp[0], amp[1]));
        }
    }
    out
}

/// `E_x = K_x†K_x` read off the dense propagator.
pub fn dense_povm(schedule: &CoinSchedule, steps: u32, x0: Position) -> BTreeMap<Position, Mat2> {
    let (u, span) = dense_walk(schedule, steps, x0);
    let mut out = BTreeMap::new();
    for x in -span..=span {
        let mut k = Mat2::zeros();
        for a in 0..2 {
            for b in 0..2 {
                k.0[a][b] = u[(index(x, a, span), index(x0, b, span))];
            }
        }
        let e = k.adjoint() * k;
        if e.max_abs() > 1e-28 {
            out.insert(x, e);
        }
    }
    out
}

/// `e^{iα}[[e^{iβ}cosθ, e^{iγ}sinθ], [−e^{−iγ}sinθ, e^{−iβ}cosθ]]`.
pub fn unitary_from_angles(alpha: f64, beta: f64, gamma: f64, theta: f64) -> Mat2 {
    let e = |t: f64| Complex64::from_polar(1.0, t);
    Mat2::new(
        e(beta) * theta.cos(),
        e(gamma) * theta.sin(),
        -e(-gamma) * theta.sin(),
        e(-beta) * theta.cos(),
    )
    .scale(e(alpha))
}

pub fn arb_unitary() -> impl Strategy<Value = Mat2> {
    let a = -std::f64::consts::PI..std::f64::consts::PI;
    (a.clone(), a.clone(), a, 0.0..std::f64::consts::FRAC_PI_2)
        .prop_map(|(al, be, ga, th)| unitary_from_angles(al, be, ga, th))
}

pub fn arb_spinor() -> impl Strategy<Value = Spinor> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter_map("nonzero", |(a, b, c2, d)| {
            Spinor::new(c(a, b), c(c2, d)).normalized()
        })
}

/// Random schedule of up to `max_steps` steps with coins on a random subset
/// of light-cone sites around the origin.
pub fn arb_schedule(max_steps: u32) -> impl Strategy<Value = (u32, CoinSchedule)> {
    (1..=max_steps).prop_flat_map(|steps| {
        let sites: Vec<(u32, Position)> = (1..=steps)
            .flat_map(|n| {
                let r = n as Position - 1;
                (-r..=r).step_by(2).map(move |x| (n, x))
            })
            .collect();
        let count = sites.len();
        (
            Just(steps),
            Just(sites),
            proptest::collection::vec((any::<bool>(), arb_unitary()), count),
        )
            .prop_map(|(steps, sites, coins)| {
                let mut schedule = CoinSchedule::new();
                for ((n, x), (keep, u)) in sites.into_iter().zip(coins) {
                    if keep {
                        schedule.set(n, x, u).unwrap();
                    }
                }
                (steps, schedule)
            })
    })
}

/// Spinors equal up to a single global phase.
pub fn phase_equal(
    a: &BTreeMap<Position, Spinor>,
    b: &BTreeMap<Position, Spinor>,
    tol: f64,
) -> bool {
    let mut overlap = c(0.0, 0.0);
    for (x, s) in a {
        if let Some(t) = b.get(x) {
            overlap += t.inner(s);
        }
    }
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        c(1.0, 0.0)
    };
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter().all(|x| {
        let s = a.get(x).copied().unwrap_or_else(Spinor::zero);
        let t = b.get(x).copied().unwrap_or_else(Spinor::zero);
        s.max_abs_diff(&t.scale(phase)) <= tol
    })
}
