//! Command-line front end for spdkit and the timing harness behind `spdkit bench`.
//!
//! Exit codes are stable: 0 success, 2 input error, 3 numerical failure,
//! 4 non-convergence, 5 indefinite kernel, 6 law violation.

pub mod bench;
mod commands;

use spdkit::Error;

pub use commands::{run, Cli, Command};

pub mod exit {
    pub const OK: u8 = 0;
    pub const INPUT: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const NON_CONVERGENCE: u8 = 4;
    pub const INDEFINITE: u8 = 5;
    pub const VIOLATION: u8 = 6;
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MaxItersExceeded { .. } => exit::NON_CONVERGENCE,
        e if e.is_numerical() => exit::NUMERICAL,
        _ => exit::INPUT,
    }
}

/// Formats a value with 15 significant digits.
///
/// Fixed notation is used for magnitudes in `[1e-5, 1e15)`, scientific otherwise;
/// zero prints as `0.000000000000000`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        return format!("{:.15}", 0.0);
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    if (-5..15).contains(&magnitude) {
        let decimals = (14 - magnitude) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.14e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(format_value(0.0), "0.000000000000000");
        assert_eq!(format_value(2.0 * 1.25f64.ln()), "0.446287102628420");
        assert_eq!(format_value(2f64.sqrt() * 4f64.ln()), "1.96051628693709");
        assert_eq!(format_value(-1234.5), "-1234.50000000000");
        assert_eq!(format_value(1.5e-9), "1.50000000000000e-9");
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::MaxItersExceeded { iterations: 1, residual: 1.0 }), 4);
        assert_eq!(exit_code(&Error::ConvergenceFailure { max_iters: 3 }), 3);
        assert_eq!(exit_code(&Error::UnknownLaw("x".into())), 2);
        assert_eq!(exit_code(&Error::Io("x".into())), 2);
    }
}
