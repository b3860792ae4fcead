//! Modified-energy (I-method) symbols for the quintic NLS on `λ𝕋`.
//!
//! Multilinear frequency tuples carry conjugated slots as negated frequencies,
//! so every `Γ_n` is the plain zero-sum hyperplane. The phase is
//! `Ω_n = Σ(−1)^{j+1}k_j²` and `ε = ±1` is the sign of `|u|⁴u`.

pub mod bounds;
pub mod ftc;
pub mod galerkin;
pub mod lambda;
pub mod multiplier;
pub mod resonance;
pub mod symbols;
pub mod tuple;

pub use bounds::{bound_scan_symbols, BoundRecord, BoundScan, BoundScanParams, RatioMax};
pub use ftc::{derivative_check, elongation_naive, ftc_residual, simpson, FtcReport, FtcTerms, Rates, SexticTable};
pub use galerkin::{integrate_galerkin, quintic_projected, GalerkinOptions, Trajectory};
pub use lambda::{energy_e1i, hamiltonian, lambda_n, lambda_n_evaluate, lambda_symbol, DEFAULT_GAMMA_CAP};
pub use multiplier::{apply_i, Interp, MultiplierParams};
pub use resonance::{canonical_order, classify_resonance, in_upsilon6, ResonanceKind, ResonanceVerdict, Thresholds};
pub use symbols::{evaluate_symbol, sextic_symbols, NlsSign, SexticSymbols, SymbolContext, SymbolId};
pub use tuple::{dyadic_class, omega_n, rearrange_decreasing, FreqTuple, Starred};
