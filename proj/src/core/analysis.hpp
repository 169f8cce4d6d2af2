#pragma once

#include <optional>
#include <vector>

#include "core/basis.hpp"
#include "core/echo.hpp"

namespace loschmidt {

// Characteristic decay time: first downward crossing of M_11 = 2/3,
// linearly interpolated between the bracketing samples. nullopt when the
// trace never crosses (the explicit no-decay outcome).
std::optional<double> tau_phi(const LETrace& trace);

struct PlateauEstimate {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    bool flat = true; // linear drift across the tail below 2x stderr
    int n_samples = 0;
};

// Mean and standard error over the trailing tail_fraction of samples.
// Requires at least 5 tail samples.
PlateauEstimate plateau(const LETrace& trace, double tail_fraction = 0.25);

enum class DecayModel { gaussian, exponential };

const char* to_string(DecayModel model);

struct DecayFit {
    DecayModel model = DecayModel::exponential;
    double tau_phi = 0.0;     // decay constant of the selected model
    double amplitude = 0.0;   // prefactor of the selected model
    double residual = 0.0;    // RMS log-residual of the selected model
    double residual_alt = 0.0; // RMS log-residual of the rejected model
    std::optional<double> crossing_tau; // 2/3-crossing time of the raw trace
    int skipped_points = 0;   // non-positive values excluded from the log fit
};

struct FitWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

// Fits log(m11 - plateau) against t and t^2 over the window and returns the
// model with the smaller RMS log-residual.
DecayFit classify_decay(const LETrace& trace, const FitWindow& window);

// Window from the first drop below 0.9 down to plateau + 2 stderr.
FitWindow default_fit_window(const LETrace& trace);

enum class RateRegime { perturbative, fgr };

struct RatePoint {
    double sigma_eff = 0.0;
    double rate = 0.0; // 1/tau_phi
};

struct RegimeFit {
    RateRegime regime = RateRegime::fgr;
    std::vector<RatePoint> points;
    double exponent = 0.0;    // log-log slope (of rate - offset for fgr)
    double offset_rate = 0.0; // 1/tau_phi_N^0 intercept; 0 for perturbative
    double coefficient = 0.0; // prefactor of the power law
    double window_lo = 0.0;
    double window_hi = 0.0;
    double residual = 0.0;    // RMS log-residual
};

// perturbative: straight line through the points, exponent from the log-log
// slope, offset fixed at zero. fgr: least squares rate = offset + c sigma^2,
// exponent from the log-log slope of (rate - offset). Needs >= 4 points.
RegimeFit fit_rate_scaling(std::vector<RatePoint> points, RateRegime regime);

struct TwoBranchFit {
    RegimeFit fgr;          // weak-perturbation side
    RegimeFit perturbative; // strong-perturbation side
    std::size_t split_index = 0;
};

// Splits sorted points into a weak (fgr) and a strong (perturbative) branch
// at the boundary minimizing the total fit residual.
TwoBranchFit fit_two_branches(std::vector<RatePoint> points);

// Gaussian prediction for the per-subspace local density of states.
struct LdosPrediction {
    SpinProjection nu;
    double mean = 0.0;     // E_nu = nu * omega1
    double variance = 0.0; // <H_dip^2>

    static LdosPrediction make(SpinProjection nu, double omega1, double variance);
};

double predicted_ldos(const LdosPrediction& p, double epsilon);

} // namespace loschmidt
