//! Core algorithms for robust polynomial homotopy continuation.
//!
//! This crate tracks solution paths of square (Laurent) polynomial
//! homotopies `H(x, t) = 0` from `t = 0` to `t = 1` in double precision,
//! using an a-priori adaptive stepsize. At every accepted point the tracker
//! computes a truncated power-series solution by Newton iteration on series,
//! fits a rational (Padé) approximant per coordinate, and derives the next
//! stepsize from two safety criteria before the step is taken:
//!
//! * a curvature bound comparing the local approximation error against an
//!   estimate of the distance to the nearest different path, and
//! * a trust region given by the distance to the nearest approximant pole.
//!
//! The crate is `no_std` (it requires `alloc`) and performs no I/O; the
//! companion `padtrack` crate provides the command line interface and the
//! JSON formats.
//!
//! Modules mirror the layers of the method:
//!
//! * [`algebra`] — dense complex LU, singular values, small polynomial roots
//! * [`series`] — truncated power series arithmetic over ℂ
//! * [`polysys`] — Laurent polynomial homotopies and their derivatives
//! * [`newton`] — series-valued Newton iteration and the point corrector
//! * [`pade`] — Padé approximants, error coefficients, pole distances
//! * [`tracker`] — the predictor, the path loop, and homotopy construction

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod newton;
pub mod pade;
pub mod polysys;
pub mod series;
pub mod tracker;

pub use num_complex::Complex64;
