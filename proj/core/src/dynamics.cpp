#include "qrabi/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>

#include "qrabi/linalg.hpp"

namespace qrabi {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

constexpr Complex kI(0.0, 1.0);

struct Entry {
    int r;
    int c;
    Complex v;
};

using Sparse = std::vector<Entry>;

Sparse sparsify(const Matrix& m, bool off_diagonal_only) {
    Sparse s;
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0 && !(off_diagonal_only && i == j)) s.push_back({i, j, m(i, j)});
    return s;
}

bool is_diagonal(const Matrix& m) {
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (i != j && m(i, j) != 0.0) return false;
    return true;
}

}  // namespace

// ----- compiled generator -----

struct CompiledGenerator::Impl {
    struct Jump {
        double rate;
        Sparse op;
        bool pairwise;
        // shift form: entries (r0 + i, c0 + i), applied as out.block(r0) += weight o y.block(c0)
        int r0 = -1;
        int c0 = -1;
        Matrix weight;
    };
    // Entries of a tone operator mapped onto the merged Hamiltonian pattern.
    struct Tone {
        std::vector<int> slot;
        std::vector<Complex> op;      // O entries at slot
        std::vector<Complex> op_adj;  // O^dag entries at the mirrored slot
        std::vector<int> slot_adj;
        Complex amplitude;
        double frequency;
    };

    std::uint64_t id = 0;
    int d = 0;
    Matrix A;                     // elementwise exponent: Hamiltonian phases and diagonal jumps (trace-free)
    Eigen::ArrayXd decay;         // -(g_i + g_j)/2 from sum r L^dag L over non-diagonal jumps, each entry twice
    bool has_decay = false;
    std::vector<int> pr, pc;      // merged off-diagonal Hamiltonian pattern
    std::vector<Complex> kval;    // static values on the pattern
    std::vector<Jump> jumps;
    std::vector<Tone> tones;

    std::unordered_map<long, int> slots;

    int slot_of(int r, int c) {
        const long key = static_cast<long>(r) * d + c;
        if (auto it = slots.find(key); it != slots.end()) return it->second;
        slots.emplace(key, static_cast<int>(pr.size()));
        pr.push_back(r);
        pc.push_back(c);
        kval.push_back(0.0);
        return static_cast<int>(pr.size() - 1);
    }

    void hamiltonian_values(double t, std::vector<Complex>& hv) const {
        hv.assign(kval.begin(), kval.end());
        for (const Tone& tn : tones) {
            const Complex c = tn.amplitude * std::exp(Complex(0.0, -tn.frequency * t));
            const Complex cc = std::conj(c);
            for (std::size_t k = 0; k < tn.slot.size(); ++k) hv[tn.slot[k]] += c * tn.op[k];
            for (std::size_t k = 0; k < tn.slot_adj.size(); ++k) hv[tn.slot_adj[k]] += cc * tn.op_adj[k];
        }
    }

    // out += L_rest(t)[y]; hermitian: y is Hermitian, so only -i H y is formed and mirrored
    void add_rest(double t, const Matrix& y, Matrix& out, bool hermitian) const {
        thread_local std::vector<Complex> hv;
        thread_local Matrix mt;
        hamiltonian_values(t, hv);
        const Complex* yp = y.data();
        Complex* op = out.data();
        const int n = d;
        const std::size_t m = pr.size();
        if (hermitian) {
            // mt = (-i H y)^T; column r of mt gains -i h_rc conj(y(:, c))
            mt.setZero(n, n);
            for (std::size_t k = 0; k < m; ++k) mt.col(pr[k]) += Complex(hv[k].imag(), -hv[k].real()) * y.col(pc[k]).conjugate();
            out += mt.transpose() + mt.conjugate();
        } else {
            // -i (H y - y H^dag), column by column
            for (int j = 0; j < n; ++j) {
                const Complex* yc = yp + static_cast<std::ptrdiff_t>(j) * n;
                Complex* oc = op + static_cast<std::ptrdiff_t>(j) * n;
                for (std::size_t k = 0; k < m; ++k) oc[pr[k]] += Complex(hv[k].imag(), -hv[k].real()) * yc[pc[k]];
            }
            for (std::size_t k = 0; k < m; ++k) {
                // out(:, r) += i conj(h_rc) y(:, c)
                const Complex w(hv[k].imag(), hv[k].real());
                Complex* oc = op + static_cast<std::ptrdiff_t>(pr[k]) * n;
                const Complex* yc = yp + static_cast<std::ptrdiff_t>(pc[k]) * n;
                for (int i = 0; i < n; ++i) oc[i] += w * yc[i];
            }
        }
        if (has_decay) {
            // real factors applied to the interleaved (re, im) storage
            const Eigen::Index len = 2 * static_cast<Eigen::Index>(n) * n;
            Eigen::Map<Eigen::ArrayXd>(reinterpret_cast<double*>(op), len) +=
                decay * Eigen::Map<const Eigen::ArrayXd>(reinterpret_cast<const double*>(yp), len);
        }
        for (const Jump& jp : jumps) {
            if (jp.r0 >= 0) {
                const Eigen::Index k = jp.weight.rows();
                out.block(jp.r0, jp.r0, k, k) += jp.weight.cwiseProduct(y.block(jp.c0, jp.c0, k, k));
            } else if (jp.pairwise) {
                for (const Entry& a : jp.op) {
                    const Complex ra = jp.rate * a.v;
                    for (const Entry& b : jp.op) op[a.r + b.r * n] += ra * std::conj(b.v) * yp[a.c + b.c * n];
                }
            } else {
                Matrix tmp = Matrix::Zero(n, n);
                Complex* tp = tmp.data();
                for (const Entry& e : jp.op)
                    for (int j = 0; j < n; ++j) tp[e.r + j * n] += e.v * yp[e.c + j * n];
                for (const Entry& e : jp.op) {
                    const Complex w = jp.rate * std::conj(e.v);
                    Complex* oc = op + static_cast<std::ptrdiff_t>(e.r) * n;
                    const Complex* tc = tp + static_cast<std::ptrdiff_t>(e.c) * n;
                    for (int i = 0; i < n; ++i) oc[i] += w * tc[i];
                }
            }
        }
    }
};

CompiledGenerator::CompiledGenerator(const MasterEquation& me) : impl_(std::make_unique<Impl>()) {
    me.validate();
    static std::atomic<std::uint64_t> next_id{1};
    Impl& g = *impl_;
    const int d = me.dim();
    g.id = next_id.fetch_add(1);
    g.d = d;
    Matrix heff = me.hamiltonian.matrix().cast<Complex>();
    Matrix diag_jump_term = Matrix::Zero(d, d);  // sum r l_i conj(l_j) for diagonal jumps
    Eigen::VectorXd gain_decay = Eigen::VectorXd::Zero(d);

    auto add_jump = [&](double rate, const Matrix& l) {
        if (rate == 0.0) return;
        heff += Complex(0.0, -0.5 * rate) * (l.adjoint() * l);
        if (is_diagonal(l)) {
            const Vector dl = l.diagonal();
            diag_jump_term += rate * dl * dl.adjoint();
        } else {
            gain_decay += rate * (l.adjoint() * l).diagonal().real();
            Sparse s = sparsify(l, false);
            const bool pairwise = s.size() < static_cast<std::size_t>(2 * d);
            Impl::Jump jp;
            jp.rate = rate;
            jp.op = std::move(s);
            jp.pairwise = pairwise;
            Sparse by_row = jp.op;
            std::sort(by_row.begin(), by_row.end(), [](const Entry& a, const Entry& b) { return a.r < b.r; });
            bool shift = !by_row.empty();
            for (std::size_t i = 0; shift && i < by_row.size(); ++i) {
                shift = by_row[i].r == by_row[0].r + static_cast<int>(i) && by_row[i].c == by_row[0].c + static_cast<int>(i);
            }
            if (shift) {
                Vector v(static_cast<Eigen::Index>(by_row.size()));
                for (std::size_t i = 0; i < by_row.size(); ++i) v(static_cast<Eigen::Index>(i)) = by_row[i].v;
                jp.r0 = by_row[0].r;
                jp.c0 = by_row[0].c;
                jp.weight = rate * v * v.adjoint();
            }
            g.jumps.push_back(std::move(jp));
        }
    };
    for (const auto& j : me.jumps) add_jump(j.rate, j.op.matrix());
    if (me.dephasing) add_jump(me.dephasing->rate, me.dephasing->op.matrix());

    // the decay balancing the sandwich terms stays with them, so every RK4 stage is traceless
    const Vector h = heff.diagonal() + Complex(0.0, 0.5) * gain_decay.cast<Complex>();
    g.has_decay = gain_decay.any();
    const Eigen::MatrixXd dm = -0.5 * (gain_decay.replicate(1, d) + gain_decay.transpose().replicate(d, 1));
    g.decay = Eigen::Map<const Eigen::ArrayXd>(dm.data(), dm.size()).replicate(1, 2).transpose().reshaped();
    g.A.resize(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) g.A(i, j) = -kI * (h(i) - std::conj(h(j))) + diag_jump_term(i, j);
    for (const Entry& e : sparsify(heff, true)) g.kval[g.slot_of(e.r, e.c)] += e.v;
    for (const auto& t : me.drive) {
        Impl::Tone tn;
        tn.amplitude = t.amplitude;
        tn.frequency = t.frequency;
        for (const Entry& e : sparsify(t.op.matrix(), false)) {
            tn.slot.push_back(g.slot_of(e.r, e.c));
            tn.op.push_back(e.v);
            tn.slot_adj.push_back(g.slot_of(e.c, e.r));
            tn.op_adj.push_back(std::conj(e.v));
        }
        g.tones.push_back(std::move(tn));
    }
}

CompiledGenerator::~CompiledGenerator() = default;
CompiledGenerator::CompiledGenerator(CompiledGenerator&&) noexcept = default;
CompiledGenerator& CompiledGenerator::operator=(CompiledGenerator&&) noexcept = default;

int CompiledGenerator::dim() const { return impl_->d; }

void CompiledGenerator::apply(double t, const Matrix& rho, Matrix& out) const {
    out = impl_->A.cwiseProduct(rho);
    impl_->add_rest(t, rho, out, false);
}

namespace {

bool is_hermitian(const Matrix& m) {
    const Eigen::Index n = m.rows();
    double defect = 0.0, scale = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            defect = std::max(defect, std::norm(m(i, j) - std::conj(m(j, i))));
            scale = std::max(scale, std::norm(m(i, j)));
        }
    }
    return defect <= 1e-24 * scale;
}

// Per-thread scratch; the exponential factors are cached per (generator, h), two slots so the
// step-doubling checks do not evict the regular step.
struct ExpSlot {
    std::uint64_t owner = 0;
    double h = std::numeric_limits<double>::quiet_NaN();
    Matrix e_half, e_full;
};

struct Workspace {
    ExpSlot slots[2];
    int last = 0;
    Matrix k1, k2, k3, k4, y;

    const ExpSlot& factors(std::uint64_t owner, double h, const Matrix& A) {
        for (int s = 0; s < 2; ++s) {
            if (slots[s].owner == owner && slots[s].h == h) {
                last = s;
                return slots[s];
            }
        }
        last = 1 - last;
        ExpSlot& e = slots[last];
        e.e_half = (A * (0.5 * h)).array().exp().matrix();
        e.e_full = e.e_half.cwiseProduct(e.e_half);
        e.owner = owner;
        e.h = h;
        return e;
    }
};

thread_local Workspace tls_workspace;

}  // namespace

void CompiledGenerator::step(double t, double h, Matrix& rho) const {
    const Impl& g = *impl_;
    Workspace& w = tls_workspace;
    const ExpSlot& e = w.factors(g.id, h, g.A);
    const int d = g.d;
    // stages of a Hermitian state stay Hermitian (the factors satisfy e_ji = conj(e_ij)); rounding-level
    // defects are projected out by the mirrored kernel
    const bool herm = is_hermitian(rho);
    for (Matrix* m : {&w.k1, &w.k2, &w.k3, &w.k4}) m->setZero(d, d);
    g.add_rest(t, rho, w.k1, herm);
    w.y = e.e_half.cwiseProduct(rho + (0.5 * h) * w.k1);
    g.add_rest(t + 0.5 * h, w.y, w.k2, herm);
    w.y = e.e_half.cwiseProduct(rho) + (0.5 * h) * w.k2;
    g.add_rest(t + 0.5 * h, w.y, w.k3, herm);
    w.y = e.e_full.cwiseProduct(rho) + h * e.e_half.cwiseProduct(w.k3);
    g.add_rest(t + h, w.y, w.k4, herm);
    rho = e.e_full.cwiseProduct(rho + (h / 6.0) * w.k1) + (h / 3.0) * e.e_half.cwiseProduct(w.k2 + w.k3) +
          (h / 6.0) * w.k4;
}

// ----- time stepping -----

namespace {

// Advances rho from t to t_target with the step-halving rule; calls observer after every step.
struct Stepper {
    const CompiledGenerator& g;
    const IntegratorControls& c;
    double dt;
    int halvings = 0;
    int since_check;
    long steps = 0;

    Stepper(const CompiledGenerator& gen, const IntegratorControls& controls)
        : g(gen), c(controls), dt(controls.dt), since_check(controls.check_every) {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrator dt must be positive");
        if (!(c.tolerance > 0.0)) throw DomainError("integrator tolerance must be positive");
    }

    void advance(Matrix& rho, double& t, double t_target, const StepObserver& observer) {
        while (t < t_target) {
            // uniform steps to the target so the cached exponentials stay valid
            const double t0 = t;
            const long m = std::max(1L, static_cast<long>(std::ceil((t_target - t0) / dt - 1e-9)));
            const double h = (t_target - t0) / static_cast<double>(m);
            bool rejected = false;
            for (long k = 1; k <= m; ++k) {
                const double t_next = (k == m) ? t_target : t0 + static_cast<double>(k) * h;
                if (c.check_every > 0 && since_check >= c.check_every) {
                    Matrix full = rho;
                    g.step(t, h, full);
                    Matrix half = rho;
                    g.step(t, 0.5 * h, half);
                    g.step(t + 0.5 * h, 0.5 * h, half);
                    const double err = max_abs(full - half) / 15.0;
                    if (!std::isfinite(err) || err > c.tolerance) {
                        dt = 0.5 * h;
                        if (++halvings > c.max_halvings) {
                            throw NumericError("integrator step-size underflow (dt = " + sci(dt) + ")");
                        }
                        rejected = true;
                        break;
                    }
                    rho = std::move(half);
                    since_check = 0;
                    steps += 3;
                } else {
                    g.step(t, h, rho);
                    ++since_check;
                    ++steps;
                }
                t = t_next;
                if (observer) observer(t, rho);
            }
            if (!rejected) t = t_target;
        }
    }
};

void check_state(const Matrix& rho, double trace0, double& max_drift, double& min_eig, bool enforce) {
    const double drift = std::abs(rho.trace() - trace0);
    const double ev = min_eigenvalue(hermitian_part(rho));
    max_drift = std::max(max_drift, drift);
    min_eig = std::min(min_eig, ev);
    if (!enforce) return;
    if (!std::isfinite(drift) || drift > kTraceDriftTol) {
        throw NumericError("trace drift " + sci(drift) + " exceeds 1e-8");
    }
    if (ev < kMinEigenvalueTol) throw NumericError("state lost positivity (min eigenvalue " + sci(ev) + ")");
}

void require_state(const MasterEquation& me, const Matrix& rho0) {
    if (rho0.rows() != me.dim() || rho0.cols() != me.dim()) throw DimensionError("initial state has wrong dimension");
}

}  // namespace

const std::vector<double>& Trajectory::series(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return values[k];
    throw DomainError("no observable named " + name);
}

Trajectory evolve(const MasterEquation& me, const Matrix& rho0, double t_end, const IntegratorControls& controls,
                  const std::vector<Observable>& observables) {
    require_state(me, rho0);
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be non-negative");
    for (const auto& o : observables)
        if (o.op.rows() != me.dim() || o.op.cols() != me.dim()) throw DimensionError("observable " + o.name + " has wrong dimension");

    const CompiledGenerator g(me);
    Stepper stepper(g, controls);
    Trajectory tr;
    for (const auto& o : observables) tr.names.push_back(o.name);
    tr.values.resize(observables.size());
    const double trace0 = rho0.trace().real();
    tr.min_eigenvalue = min_eigenvalue(hermitian_part(rho0));

    auto record = [&](double t, const Matrix& rho) {
        tr.times.push_back(t);
        if (controls.store_states) tr.states.push_back(rho);
        for (std::size_t k = 0; k < observables.size(); ++k) tr.values[k].push_back(expectation(observables[k].op, rho).value);
        check_state(rho, trace0, tr.max_trace_drift, tr.min_eigenvalue, controls.check_invariants);
    };

    Matrix rho = rho0;
    double t = 0.0;
    record(t, rho);
    if (controls.store_interval > 0.0) {
        const long n = static_cast<long>(std::ceil(t_end / controls.store_interval - 1e-9));
        for (long k = 1; k <= n; ++k) {
            const double target = (k == n) ? t_end : static_cast<double>(k) * controls.store_interval;
            stepper.advance(rho, t, target, nullptr);
            record(t, rho);
        }
    } else if (t_end > 0.0) {
        stepper.advance(rho, t, t_end, nullptr);
        record(t, rho);
    }
    tr.final_state = std::move(rho);
    tr.steps = stepper.steps;
    tr.halvings = stepper.halvings;
    tr.final_dt = stepper.dt;
    return tr;
}

// ----- steady states -----

const char* to_string(SteadyMethod m) {
    switch (m) {
        case SteadyMethod::nullspace: return "nullspace";
        case SteadyMethod::longtime: return "longtime";
        case SteadyMethod::timeaveraged: return "timeaveraged";
    }
    return "unknown";
}

double SteadyState::average(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return averages[k];
    throw DomainError("no averaged observable named " + name);
}

double smallest_positive_rate(const MasterEquation& me) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& j : me.jumps)
        if (j.rate > 0.0) r = std::min(r, j.rate);
    if (me.dephasing && me.dephasing->rate > 0.0) r = std::min(r, me.dephasing->rate);
    return r;
}

namespace {

Matrix unvec(const Vector& v, int d) {
    Matrix m(d, d);
    for (int j = 0; j < d; ++j) m.col(j) = v.segment(static_cast<Eigen::Index>(j) * d, d);
    return m;
}

}  // namespace

SteadyState steady_state_nullspace(const MasterEquation& me) {
    if (me.time_dependent()) throw DomainError("nullspace steady state needs a time-independent generator");
    const int d = me.dim();
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    const Matrix l = liouvillian(me);

    // Trace-one row appended to the column-stacked generator.
    Matrix a(n + 1, n);
    a.topRows(n) = l;
    a.row(n).setZero();
    for (int i = 0; i < d; ++i) a(n, static_cast<Eigen::Index>(i) * d + i) = 1.0;
    Vector rhs = Vector::Zero(n + 1);
    rhs(n) = 1.0;

    Eigen::FullPivLU<Matrix> lu(a);
    SteadyState ss;
    ss.method = SteadyMethod::nullspace;
    if (lu.rank() < n) {
        ss.degenerate = true;
        Eigen::FullPivLU<Matrix> lu_l(l);
        const Matrix k = lu_l.kernel();
        for (Eigen::Index c = 0; c < k.cols(); ++c) {
            Matrix m = unvec(k.col(c), d);
            const Complex tr = m.trace();
            if (std::abs(tr) > 1e-12) m /= tr;
            ss.basis.push_back(hermitian_part(m));
        }
        Vector x = lu.solve(rhs);
        ss.rho = unvec(x, d);
    } else {
        ss.rho = unvec(lu.solve(rhs), d);
    }
    ss.rho = hermitian_part(ss.rho);
    ss.clipped_weight = clip_to_density(ss.rho);
    ss.residual = max_abs(me.apply(ss.rho));
    return ss;
}

SteadyState steady_state_longtime(const MasterEquation& me, const Matrix& rho0, const LongtimeControls& controls) {
    if (me.time_dependent()) throw DomainError("long-time steady state needs a time-independent generator");
    require_state(me, rho0);
    const double rmin = smallest_positive_rate(me);
    if (!std::isfinite(rmin)) throw DomainError("generator has no dissipation; no long-time limit");
    const double chunk = controls.chunk > 0.0 ? controls.chunk : 1.0 / rmin;
    const double t_max = controls.max_time > 0.0 ? controls.max_time : 500.0 * chunk;

    const CompiledGenerator g(me);
    Stepper stepper(g, controls.integrator);
    Matrix rho = rho0;
    double t = 0.0;
    SteadyState ss;
    ss.method = SteadyMethod::longtime;
    const double trace0 = rho0.trace().real();
    double drift = 0.0, min_eig = 0.0;
    for (;;) {
        stepper.advance(rho, t, t + chunk, nullptr);
        check_state(rho, trace0, drift, min_eig, controls.integrator.check_invariants);
        ss.residual = max_abs(me.apply(rho));
        if (ss.residual / rmin < controls.residual_tol) break;
        if (t >= t_max) {
            throw NumericError("long-time evolution did not reach residual / rate " + sci(controls.residual_tol) +
                               " by t = " + std::to_string(t));
        }
    }
    ss.rho = hermitian_part(rho);
    ss.clipped_weight = clip_to_density(ss.rho);
    ss.residual = max_abs(me.apply(ss.rho));
    ss.steps = stepper.steps;
    ss.t_start = t;
    return ss;
}

AveragingWindow resolve_window(const MasterEquation& me, const AveragingWindow& window) {
    double w_min = std::numeric_limits<double>::infinity();
    for (const auto& tone : me.drive)
        if (tone.frequency > 0.0) w_min = std::min(w_min, tone.frequency);
    if (!std::isfinite(w_min)) throw DomainError("time-averaged steady state needs a drive tone with positive frequency");
    const double rmin = smallest_positive_rate(me);
    if (!std::isfinite(rmin)) throw DomainError("generator has no dissipation; no steady state");

    AveragingWindow r = window;
    const double period = 2.0 * std::numbers::pi / w_min;
    const double t_min = 10.0 / rmin;
    const double len_min = 20.0 * period;
    if (r.t_start == 0.0) r.t_start = r.burn_in_factor * (1.0 / rmin);
    if (r.length == 0.0) r.length = std::max(1, r.min_periods) * period;
    if (r.t_start < t_min * (1.0 - 1e-12)) {
        throw DomainError("averaging window starts at t = " + std::to_string(r.t_start) + ", before 10/min rate = " +
                          std::to_string(t_min));
    }
    if (r.length < len_min * (1.0 - 1e-12)) {
        throw DomainError("averaging window length " + std::to_string(r.length) + " shorter than 20 drive periods (" +
                          std::to_string(len_min) + ")");
    }
    r.length = std::ceil(r.length / period - 1e-9) * period;
    return r;
}

SteadyState steady_state_timeaveraged(const MasterEquation& me, const Matrix& rho0, const AveragingWindow& window,
                                      const IntegratorControls& controls, const std::vector<Observable>& observables) {
    require_state(me, rho0);
    const AveragingWindow w = resolve_window(me, window);
    const CompiledGenerator g(me);
    Stepper stepper(g, controls);
    Matrix rho = rho0;
    double t = 0.0;
    const double trace0 = rho0.trace().real();
    double drift = 0.0, min_eig = 0.0;

    stepper.advance(rho, t, w.t_start, nullptr);
    check_state(rho, trace0, drift, min_eig, controls.check_invariants);

    const std::size_t k = observables.size();
    std::vector<double> sum(k, 0.0), lo(k, std::numeric_limits<double>::infinity()),
        hi(k, -std::numeric_limits<double>::infinity()), prev(k, 0.0);
    Matrix rho_sum = Matrix::Zero(me.dim(), me.dim());
    Matrix rho_prev = rho;
    double t_prev = t;
    for (std::size_t i = 0; i < k; ++i) {
        prev[i] = expectation(observables[i].op, rho).value;
        lo[i] = hi[i] = prev[i];
    }
    const double t_end = w.t_start + w.length;
    stepper.advance(rho, t, t_end, [&](double tn, const Matrix& r) {
        const double h = tn - t_prev;
        rho_sum += (0.5 * h) * (rho_prev + r);
        for (std::size_t i = 0; i < k; ++i) {
            const double v = expectation(observables[i].op, r).value;
            sum[i] += 0.5 * h * (prev[i] + v);
            prev[i] = v;
            lo[i] = std::min(lo[i], v);
            hi[i] = std::max(hi[i], v);
        }
        rho_prev = r;
        t_prev = tn;
    });
    check_state(rho, trace0, drift, min_eig, controls.check_invariants);

    SteadyState ss;
    ss.method = SteadyMethod::timeaveraged;
    ss.t_start = w.t_start;
    ss.window = w.length;
    ss.rho = rho_sum / w.length;
    for (std::size_t i = 0; i < k; ++i) {
        ss.names.push_back(observables[i].name);
        ss.averages.push_back(sum[i] / w.length);
        ss.peak_to_peak.push_back(hi[i] - lo[i]);
    }
    ss.residual = max_abs(me.apply(ss.rho, t_end));
    ss.steps = stepper.steps;
    return ss;
}

// ----- observables -----

ObservableRecord observables(const Matrix& rho, const DressedBasis& b, Representation rep) {
    Matrix r;
    ObservableRecord o;
    if (rep == Representation::joint) {
        if (rho.rows() != b.dims.total_dim()) throw DimensionError("observables: expected joint-space state");
        r = b.embedding.adjoint() * rho * b.embedding;
        o.leakage = b.leakage(rho);
    } else {
        if (rho.rows() != b.size()) throw DimensionError("observables: expected dressed-coordinate state");
        r = rho;
    }
    for (int N = 0; N < b.n_levels; ++N) {
        const double pp = r(b.index(N, Branch::plus), b.index(N, Branch::plus)).real();
        const double pm = r(b.index(N, Branch::minus), b.index(N, Branch::minus)).real();
        o.n_plus += N * pp;
        o.n_minus += N * pm;
        o.sector_plus += pp;
        o.sector_minus += pm;
    }
    o.n_total = o.n_plus + o.n_minus;
    return o;
}

std::vector<Observable> dressed_observables(const DressedBasis& b) {
    const int d = b.size();
    Matrix nm = Matrix::Zero(d, d), np = Matrix::Zero(d, d), sp = Matrix::Zero(d, d), sm = Matrix::Zero(d, d);
    for (int N = 0; N < b.n_levels; ++N) {
        np(b.index(N, Branch::plus), b.index(N, Branch::plus)) = static_cast<double>(N);
        nm(b.index(N, Branch::minus), b.index(N, Branch::minus)) = static_cast<double>(N);
        sp(b.index(N, Branch::plus), b.index(N, Branch::plus)) = 1.0;
        sm(b.index(N, Branch::minus), b.index(N, Branch::minus)) = 1.0;
    }
    return {{"N_minus", nm}, {"N_plus", np}, {"N_total", nm + np}, {"sector_plus", sp}, {"sector_minus", sm}};
}

}  // namespace qrabi
