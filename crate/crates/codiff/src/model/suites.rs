//! The executable axiom suites, each equation a parsed term pair.
//!
//! The textual forms below are the single source of truth: suites are built
//! by parsing them, so the surface grammar round-trips every axiom the
//! checkers consume. Free symbols `f`, `g`, `h`, `k` are instantiated with
//! seeded random morphisms at check time; naturality is therefore verified
//! by spot instantiation rather than as a universally quantified statement.

use crate::model::{Equation, SuiteKind};

const ADDITIVE: &[(&str, &str, &str)] = &[
    (
        "comp_add_distrib",
        "f ; (g + h) ; k",
        "f ; g ; k + f ; h ; k",
    ),
    ("comp_zero_annihilates", "f ; zero[A, A] ; k", "zero[A, A]"),
    (
        "tensor_add_distrib",
        "f * (g + h) * k",
        "f * g * k + f * h * k",
    ),
    (
        "tensor_zero_annihilates",
        "f * zero[A, A] * k",
        "zero[A*A*A, A*A*A]",
    ),
];

const TRACED: &[(&str, &str, &str)] = &[
    (
        "tightening",
        "tr[A]((id[A] * g) ; f[A*A, A*A] ; (id[A] * h))",
        "g ; tr[A](f[A*A, A*A]) ; h",
    ),
    (
        "sliding",
        "tr[A](f[A*A, A*A] ; (h * id[A]))",
        "tr[A]((h * id[A]) ; f[A*A, A*A])",
    ),
    ("vanishing_unit", "tr[I](f)", "f"),
    (
        "vanishing_tensor",
        "tr[A*A](f[A*A*A, A*A*A])",
        "tr[A](tr[A](f[A*A*A, A*A*A]))",
    ),
    (
        "superposition",
        "tr[A](f[A*A, A*A] * g)",
        "tr[A](f[A*A, A*A]) * g",
    ),
    ("yanking", "tr[A](sym[A, A])", "id[A]"),
    (
        "trace_additive",
        "tr[A](f[A*A, A*A] + g[A*A, A*A])",
        "tr[A](f[A*A, A*A]) + tr[A](g[A*A, A*A])",
    ),
    ("trace_zero", "tr[A](zero[A*A, A*A])", "zero[A, A]"),
];

const CODIFFERENTIAL: &[(&str, &str, &str)] = &[
    // AM.1: (S, mu, eta) is a monad
    ("am1_unit_left", "eta[S(A)] ; mu", "id[S(A)]"),
    ("am1_unit_right", "S(eta) ; mu", "id[S(A)]"),
    ("am1_assoc", "mu[S(A)] ; mu", "S(mu) ; mu"),
    // AM.2: (SA, m, u) is a commutative monoid
    ("am2_assoc", "(m * id[S(A)]) ; m", "(id[S(A)] * m) ; m"),
    ("am2_unit_left", "(u * id[S(A)]) ; m", "id[S(A)]"),
    ("am2_unit_right", "(id[S(A)] * u) ; m", "id[S(A)]"),
    ("am2_comm", "sym[S(A), S(A)] ; m", "m"),
    // AM.3: mu is a monoid morphism
    ("am3_mult", "(mu * mu) ; m", "m[S(A)] ; mu"),
    ("am3_unit", "u[S(A)] ; mu", "u"),
    // deriving transformation rules
    ("constant_rule", "u ; d", "zero[I, S(A)*A]"),
    ("linear_rule", "eta ; d", "u * id[A]"),
    (
        "product_rule",
        "m ; d",
        "(id[S(A)] * d) ; (m * id[A]) + (d * id[S(A)]) ; (id[S(A)] * sym[A, S(A)]) ; (m * id[A])",
    ),
    ("chain_rule", "mu ; d", "d[S(A)] ; (mu * d) ; (m * id[A])"),
    (
        "interchange_rule",
        "d ; (d * id[A])",
        "d ; (d * id[A]) ; (id[S(A)] * sym[A, A])",
    ),
    // the coderiving transformation agrees with its definition
    ("coderiving_def", "dco", "(id[S(A)] * eta) ; m"),
    // naturality spot checks with a random f : A -> A
    ("eta_naturality", "f ; eta", "eta ; S(f)"),
    ("u_naturality", "u", "u ; S(f)"),
    ("mu_naturality", "S(S(f)) ; mu", "mu ; S(f)"),
    ("m_naturality", "(S(f) * S(f)) ; m", "m ; S(f)"),
    ("d_naturality", "S(f) ; d", "d ; (S(f) * f)"),
];

fn build(kind: SuiteKind, table: &[(&str, &str, &str)]) -> Vec<Equation> {
    table
        .iter()
        .map(|(name, lhs, rhs)| Equation::new(kind, name, lhs, rhs))
        .collect()
}

/// Composition bilinearity, annihilation by zero, and tensor distribution.
pub fn additive_suite() -> Vec<Equation> {
    build(SuiteKind::Additive, ADDITIVE)
}

/// Tightening, sliding, both vanishing forms, superposition, yanking, and
/// additivity of the trace.
pub fn traced_suite() -> Vec<Equation> {
    build(SuiteKind::Traced, TRACED)
}

/// The monad, monoid, and monoid-morphism laws of the algebra modality, the
/// five deriving-transformation rules, the coderiving definition, and
/// naturality spot checks.
pub fn codifferential_suite() -> Vec<Equation> {
    build(SuiteKind::Codifferential, CODIFFERENTIAL)
}

/// Every axiom of the three suites; the single registry the checkers and the
/// CLI consume.
pub fn axiom_registry() -> Vec<Equation> {
    let mut all = additive_suite();
    all.extend(traced_suite());
    all.extend(codifferential_suite());
    all
}
