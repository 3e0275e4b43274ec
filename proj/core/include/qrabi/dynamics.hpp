#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qrabi/adiabatic.hpp"
#include "qrabi/lindblad.hpp"

namespace qrabi {

struct IntegratorControls {
    double dt = 0.05;            // nominal step
    double tolerance = 1e-10;    // step-doubling error bound (max abs entry)
    int check_every = 64;        // steps between step-doubling checks
    int max_halvings = 20;
    double store_interval = 0.0; // 0: store initial and final state only
    bool store_states = false;
    bool check_invariants = true;
};

inline constexpr double kTraceDriftTol = 1e-8;
inline constexpr double kMinEigenvalueTol = -1e-7;

struct Observable {
    std::string name;
    Matrix op;  // real part of tr(op rho) is recorded
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;  // only when store_states
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // values[k][i]: observable k at times[i]
    Matrix final_state;
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;
    long steps = 0;
    int halvings = 0;
    double final_dt = 0.0;

    const std::vector<double>& series(const std::string& name) const;
};

// Generator split for the integrating-factor scheme: the diagonal part of the effective
// non-Hermitian Hamiltonian (and purely diagonal jumps) is exponentiated exactly, the remainder
// goes through classical RK4 stages with sparse kernels.
class CompiledGenerator {
public:
    explicit CompiledGenerator(const MasterEquation& me);
    ~CompiledGenerator();
    CompiledGenerator(CompiledGenerator&&) noexcept;
    CompiledGenerator& operator=(CompiledGenerator&&) noexcept;

    int dim() const;
    // Full right-hand side L(t)[rho].
    void apply(double t, const Matrix& rho, Matrix& out) const;
    // One integrating-factor RK4 step of size h from (t, rho).
    void step(double t, double h, Matrix& rho) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

using StepObserver = std::function<void(double t, const Matrix& rho)>;

Trajectory evolve(const MasterEquation& me, const Matrix& rho0, double t_end, const IntegratorControls& controls = {},
                  const std::vector<Observable>& observables = {});

enum class SteadyMethod { nullspace, longtime, timeaveraged };
const char* to_string(SteadyMethod m);

inline constexpr double kNullspaceResidualTol = 1e-10;
inline constexpr double kLongtimeResidualTol = 1e-7;

struct SteadyState {
    Matrix rho;
    double residual = 0.0;  // max abs entry of L[rho]
    SteadyMethod method = SteadyMethod::nullspace;
    bool degenerate = false;
    std::vector<Matrix> basis;  // all stationary states when degenerate
    double clipped_weight = 0.0;
    // time-averaged runs
    double t_start = 0.0;
    double window = 0.0;
    std::vector<std::string> names;
    std::vector<double> averages;
    std::vector<double> peak_to_peak;
    long steps = 0;

    double average(const std::string& name) const;
};

SteadyState steady_state_nullspace(const MasterEquation& me);

struct LongtimeControls {
    IntegratorControls integrator{};
    double residual_tol = kLongtimeResidualTol;  // on max|L[rho]| / smallest rate, a distance estimate
    double chunk = 0.0;     // 0: 1/(smallest positive rate)
    double max_time = 0.0;  // 0: 500 chunks
};

SteadyState steady_state_longtime(const MasterEquation& me, const Matrix& rho0, const LongtimeControls& controls = {});

struct AveragingWindow {
    double t_start = 0.0;  // 0: burn_in_factor / (smallest positive rate)
    double length = 0.0;   // 0: min_periods periods of the slowest tone
    double burn_in_factor = 10.0;
    int min_periods = 20;
};

// Resolved window: t_start and length after defaults and rounding to whole periods.
AveragingWindow resolve_window(const MasterEquation& me, const AveragingWindow& window);

SteadyState steady_state_timeaveraged(const MasterEquation& me, const Matrix& rho0, const AveragingWindow& window,
                                      const IntegratorControls& controls = {},
                                      const std::vector<Observable>& observables = {});

double smallest_positive_rate(const MasterEquation& me);

struct ObservableRecord {
    double n_minus = 0.0;
    double n_plus = 0.0;
    double n_total = 0.0;
    double sector_plus = 0.0;
    double sector_minus = 0.0;
    double leakage = 0.0;
};

// rho in the representation of the basis' dressed coordinates or the joint space.
ObservableRecord observables(const Matrix& rho, const DressedBasis& b, Representation rep);

// Dressed-coordinate observables: N_minus, N_plus, N_total, sector_plus, sector_minus.
std::vector<Observable> dressed_observables(const DressedBasis& b);

}  // namespace qrabi
