#pragma once

#include "telewell/flow.hpp"
#include "telewell/quadrature.hpp"

#include <string>
#include <vector>

namespace telewell {

struct PassageOptions {
    double tol_1d = 1e-10;
    double tol_2d = 1e-8;
};

/// Exit probabilities from the metastable interval through the upper bound.
/// B0 > 0 and B1 < 0 carry the Psi normalization picked by the flow-map
/// reference convention: only ratios of same-system integrals are
/// convention free. log_anchor is the log Psi offset folded out of the
/// integrals, so B_physical = value * exp(log_anchor).
struct ExitProbabilities {
    double p0 = 0.0;
    double p1 = 0.0;
    double p0_error = 0.0;
    double p1_error = 0.0;
    QuadratureResult B0;
    QuadratureResult B1;
    double log_anchor = 0.0;
};

/// p0(x), p1(x) for case A with x inside G0 = (b0, a0).
ExitProbabilities exit_prob_upper(const FlowSystem& system, double x,
                                  const PassageOptions& opts = {});

/// Rows of (Lambda + L) p at x via central differences of the closed form;
/// both should vanish on G0.
std::pair<double, double> exit_prob_ode_residual(const FlowSystem& system, double x, double h,
                                                 const PassageOptions& opts = {});

/// I_i(x, y) = int_x^y beta(z, y) / (c_i - U'(z)) dz, signed in the usual
/// iterated sense for descending x > y. Returns exactly zero when Psi(y)
/// diverges (y at an attracting critical point).
QuadratureResult I_integral(int i, const FlowSystem& system, double x, double y,
                            const PassageOptions& opts = {});

/// J_i(x, y): triangle integral of beta over Delta_i(x, y) divided by both
/// velocity gaps.
QuadratureResult J_integral(int i, const FlowSystem& system, double x, double y,
                            const PassageOptions& opts = {});

enum class PassageCase {
    Trivial,      // x == y
    ZeroBoundary, // x<y<a+ or x>y>b+ (both reach times finite, zero bc)
    EntryAnchor,  // x<y, y == a+ : proof anchored at the entry point
    EntryPrinted, // x<y, y in (a+, b+) : printed formula, unanchored
    ExitAnchor,   // x>y, y == b+ : proof anchored at the exit point
    ExitPrinted,  // x>y, y in (a+, b+) : printed formula evaluates at b+
};

const char* to_string(PassageCase c);

struct MeanPassage {
    double m0 = 0.0;
    double m1 = 0.0;
    double m0_error = 0.0;
    double m1_error = 0.0;
    PassageCase case_tag = PassageCase::Trivial;
    bool mirrored = false; // evaluated on the reflected system (x, y < b0)
    QuadratureResult I0, I1, J0, J1;
    std::vector<std::string> notes;
};

/// Mean first-passage times by explicit geometric dispatch over the proven
/// case list. Throws InfiniteMeanError where the passage time is a.s.
/// infinite or has a defective distribution, AmbiguousCaseError where no
/// stated formula applies.
MeanPassage mean_passage(const FlowSystem& system, double x, double y,
                         const PassageOptions& opts = {});

/// Componentwise (Lambda + L) m(x, y) + 1 via central differences in x;
/// target 0.
std::pair<double, double> mean_passage_ode_residual(const FlowSystem& system, double x, double y,
                                                    double h, const PassageOptions& opts = {});

/// Residual of v0 = L0 m0 against dv0/dx = psi v0 + (l0+l1)/(c1 - U'),
/// and of v1 = L1 m1 against its row; target 0.
std::pair<double, double> mean_passage_v_residual(const FlowSystem& system, double x, double y,
                                                  double h, const PassageOptions& opts = {});

// --- batch evaluation (file interface) ---

struct BatchRequest {
    std::vector<double> xs;
    double y = 0.0;
    std::string quantity; // "exit_prob" or "mfpt"
};

struct BatchRow {
    double x = 0.0;
    double v0 = 0.0, v1 = 0.0;     // p0/p1 or m0/m1
    double err0 = 0.0, err1 = 0.0;
    std::string case_tag;
};

std::vector<BatchRow> run_batch(const FlowSystem& system, const BatchRequest& request,
                                const PassageOptions& opts = {});

} // namespace telewell
