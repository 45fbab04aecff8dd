//! GJR-GARCH-MIDAS volatility modelling with realized-volatility and
//! macro-variable long-run drivers, plus random-matrix composite indices.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod estimate;
pub mod midas;
pub mod rmtindex;
pub mod simulate;
pub mod timeseries;
pub mod volmodel;

pub use error::{Error, Result};
pub use estimate::{fit, FitReport, FitResult, ModelData, OptimOptions};
pub use timeseries::{DailySeries, MonthlySeries, ReturnPanel, YearMonth};
pub use volmodel::{Drivers, Indicator, LagSpacing, ModelSpec, ParamSet, Span};
