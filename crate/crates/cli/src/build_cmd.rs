//! `loopgas build`: construction report for a code family.
//!
//! Prints the instance sizes (symbols, checks, metachecks), the measured
//! rank and logical dimension, declared-versus-measured sparsity, and the
//! boundary-to-volume table whose decay certifies amenable growth of the
//! syndrome network.

use clap::Args;

use loopgas_core::code::{amenability_profile, build_toric_4d, CodeSpec, Sector};
use loopgas_core::error::{Error, Result};

/// Flags selecting one code instance. Shared by `build` and `oracle`.
#[derive(Debug, Args)]
pub struct CodeArgs {
    /// Code family: ising1d, ising2d, ising-rect, or toric4d.
    #[arg(long)]
    pub code: String,

    /// Side length (ising1d, ising2d).
    #[arg(long)]
    pub side: Option<usize>,

    /// Row count (ising-rect).
    #[arg(long)]
    pub rows: Option<usize>,

    /// Column count (ising-rect).
    #[arg(long)]
    pub cols: Option<usize>,

    /// Linear size (toric4d).
    #[arg(long)]
    pub w: Option<usize>,

    /// CSS sector for toric4d: x or z.
    #[arg(long, default_value = "x")]
    pub sector: String,
}

impl CodeArgs {
    /// Translates the flags into a code descriptor, rejecting unknown
    /// families and missing size flags as configuration errors.
    pub fn spec(&self) -> Result<CodeSpec> {
        let need = |value: Option<usize>, flag: &str| {
            value.ok_or_else(|| {
                Error::Config(format!("--{flag} is required for --code {}", self.code))
            })
        };
        match self.code.as_str() {
            "ising1d" => Ok(CodeSpec::Ising1d {
                side: need(self.side, "side")?,
            }),
            "ising2d" => Ok(CodeSpec::Ising2d {
                side: need(self.side, "side")?,
            }),
            "ising-rect" => Ok(CodeSpec::IsingRect {
                rows: need(self.rows, "rows")?,
                cols: need(self.cols, "cols")?,
            }),
            "toric4d" => {
                let sector = match self.sector.as_str() {
                    "x" | "X" => Sector::X,
                    "z" | "Z" => Sector::Z,
                    other => {
                        return Err(Error::Config(format!(
                            "unknown sector {other:?} (expected x or z)"
                        )))
                    }
                };
                Ok(CodeSpec::Toric4d {
                    w: need(self.w, "w")?,
                    sector,
                })
            }
            other => Err(Error::Config(format!(
                "unknown code family {other:?} \
                 (expected ising1d, ising2d, ising-rect, or toric4d)"
            ))),
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub code: CodeArgs,

    /// Largest ball radius in the amenability table.
    #[arg(long, default_value_t = 4)]
    pub max_radius: usize,
}

pub fn run(args: &BuildArgs) -> Result<()> {
    let spec = args.code.spec()?;
    let code = spec.build()?;
    let n = code.num_symbols();
    let m = code.num_checks();
    let rank = code.rank_h();
    // Classical families encode k = dim ker H; for the CSS family the
    // logical count comes from the full two-sector complex.
    let k = match spec {
        CodeSpec::Toric4d { w, .. } => build_toric_4d(w)?.num_logical(),
        _ => n - rank,
    };
    let row_max = (0..m)
        .map(|c| code.check_symbols(c).len())
        .max()
        .unwrap_or(0);
    let col_max = (0..n)
        .map(|j| code.symbol_checks(j).len())
        .max()
        .unwrap_or(0);
    let profile = code.profile();
    println!("code            {}", spec.label());
    println!("symbols n       {n}");
    println!("checks m        {m}");
    println!("metachecks t    {}", code.num_metachecks());
    println!("rank(H)         {rank}");
    println!("logical k       {k}");
    println!(
        "check weight l  {} declared, {} measured",
        profile.check_weight,
        row_max.max(col_max)
    );
    println!(
        "network degree  {} declared, {} measured",
        profile.network_degree,
        code.network().max_degree()
    );
    let radii: Vec<usize> = (1..=args.max_radius.max(1)).collect();
    let rows = amenability_profile(code.network(), &radii, &[1]);
    println!("amenability (annulus width 1):");
    println!(
        "  {:>6}  {:>10}  {:>11}  {:>8}  {:>9}",
        "radius", "width-ball", "max-annulus", "min-ball", "ratio"
    );
    for row in rows {
        println!(
            "  {:>6}  {:>10}  {:>11}  {:>8}  {:>9.3}",
            row.radius, row.max_width_ball, row.max_annulus, row.min_ball, row.ratio
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(code: &str) -> CodeArgs {
        CodeArgs {
            code: code.to_string(),
            side: Some(3),
            rows: None,
            cols: None,
            w: Some(2),
            sector: "x".to_string(),
        }
    }

    #[test]
    fn known_families_translate() {
        assert!(matches!(
            args("ising2d").spec().unwrap(),
            CodeSpec::Ising2d { side: 3 }
        ));
        assert!(matches!(
            args("toric4d").spec().unwrap(),
            CodeSpec::Toric4d { w: 2, .. }
        ));
    }

    #[test]
    fn unknown_family_is_a_config_error() {
        let err = args("nosuch").spec().unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err:?}");
    }

    #[test]
    fn missing_size_flag_is_a_config_error() {
        let mut a = args("ising-rect");
        a.rows = None;
        let err = a.spec().unwrap_err();
        assert!(err.to_string().contains("--rows"), "got {err}");
    }
}
