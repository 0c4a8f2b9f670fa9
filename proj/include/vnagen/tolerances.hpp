#pragma once

namespace vnagen {

// Numerical cutoffs shared by every module.
//   rank_tol     relative singular-value cutoff (nullspaces, null atoms)
//   residual_tol relative matrix-residual cutoff (identities between operators)
//   value_tol    scalar equality cutoff (symbol values, separation)
struct Tolerances {
    double rank_tol = 1e-9;
    double residual_tol = 1e-8;
    double value_tol = 1e-9;

    // Throws Error{InvalidArgument} unless every cutoff lies in (0, 1).
    void validate() const;
};

} // namespace vnagen
