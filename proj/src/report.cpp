#include "lwp/bounds.hpp"
#include "lwp/error.hpp"
#include "lwp/renewal.hpp"
#include "lwp/scenario.hpp"
#include "lwp/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace lwp {

using Json = nlohmann::ordered_json;

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

bool RunResult::passed() const {
    return !error && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

bool VerifySummary::passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const MatrixRow& r) { return r.passed; });
}

std::vector<std::string> VerifySummary::verdicts() const {
    std::vector<std::string> out;
    for (const auto& r : rows)
        out.push_back(std::to_string(r.criterion) + "|" + r.scenario + "|" + r.check + "|" + (r.passed ? "PASS" : "FAIL"));
    return out;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kLawStream = 1000;
constexpr std::uint64_t kGridStream = 1001;
constexpr std::uint64_t kTrajectoryStream = 1002;

class Csv {
public:
    explicit Csv(std::initializer_list<std::string_view> header) {
        bool first = true;
        for (auto h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }
    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }
    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
    std::ostringstream out_;
};

Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json bound_json(const BoundReport& r) {
    Json obs = Json::array();
    for (const auto& o : r.observed)
        obs.push_back({{"label", o.label},
                       {"probe", number_json(o.probe)},
                       {"estimate", number_json(o.estimate)},
                       {"half_width", number_json(o.half_width)}});
    return {{"name", r.name},
            {"bound", number_json(r.bound_value)},
            {"satisfied", r.satisfied},
            {"slack", number_json(r.slack)},
            {"observed", obs}};
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

class Runner {
public:
    Runner(const Scenario& sc, const RunOptions& opts)
        : sc_(sc),
          seed_(opts.seed.value_or(sc.seed)),
          workers_(std::max(1u, opts.workers)),
          replicas_(opts.replicas.value_or(sc.replicas)),
          step_(opts.grid_step.value_or(sc.grid_step)) {}

    RunResult run(const std::filesystem::path& out_dir) {
        RunResult result;
        result.scenario = sc_.name;
        result.mode = sc_.mode;
        result.seed = seed_;
        result.workers = workers_;
        try {
            if (sc_.chain) {
                process_.emplace(sc_.process());
                if (sc_.mode == Mode::Linearwise)
                    law_.emplace(stationary_law(process_->chain(), process_->level_laws()));
            }
        } catch (const Error& e) {
            result.error = e.what();
        }
        if (!result.error) {
            for (std::size_t i = 0; i < sc_.checks.size(); ++i) result.checks.push_back(evaluate(sc_.checks[i], i));
        }
        if (!out_dir.empty()) write_outputs(out_dir / sc_.name, result);
        return result;
    }

private:
    RunConfig config(std::uint64_t stream) const { return {splitmix(seed_ ^ splitmix(stream)), workers_}; }

    const RenewalFunctionTable& table() {
        if (!table_) table_.emplace(renewal_function(*sc_.cycle, sc_.t_max, step_));
        return *table_;
    }

    const EmpiricalLaw& empirical() {
        if (!empirical_) empirical_.emplace(estimate_law(*process_, sc_.t_obs, replicas_, config(kLawStream)));
        return *empirical_;
    }

    CheckResult evaluate(const Check& c, std::size_t index) {
        CheckResult r;
        r.id = c.id;
        r.type = c.type;
        r.criteria = c.criteria;
        try {
            dispatch(c, index, r);
        } catch (const Error& e) {
            r.passed = false;
            r.detail = e.what();
        }
        return r;
    }

    void dispatch(const Check& c, std::size_t index, CheckResult& r) {
        const std::string& type = c.type;
        const RunConfig cfg = config(index + 1);
        auto set = [&r](const std::string& key, double v) { r.values.emplace_back(key, v); };

        if (type == "renewal-poisson") {
            r.provenance = "renewal_function_poisson";
            const auto& tab = table();
            const double rate = 1.0 / sc_.cycle->mean();
            double err = 0.0;
            for (std::size_t j = 0; j < tab.values().size(); ++j)
                err = std::max(err, std::abs(tab.values()[j] - rate * tab.step() * static_cast<double>(j)));
            set("max_error", err);
            set("tolerance", c.tolerance);
            set("grid_step", tab.step());
            set("truncation_m", tab.truncation_m());
            r.passed = err <= c.tolerance;
            r.detail = "max |H(t) - t/mean| = " + fmt(err) + " on [0, " + fmt(tab.t_max()) + "]";
        } else if (type == "renewal-value") {
            r.provenance = "renewal_function";
            const double h = table().at(c.t);
            set("t", c.t);
            set("H", h);
            set("expected", *c.value);
            r.passed = std::abs(h - *c.value) <= c.tolerance;
            r.detail = "H(" + fmt(c.t) + ") = " + fmt(h) + ", expected " + fmt(*c.value) + " +- " + fmt(c.tolerance);
        } else if (type == "overjump-survival") {
            r.provenance = "stationary_overjump_survival";
            const LimitValue stat = stationary_overjump_survival(*sc_.cycle, c.s);
            const double exact = overjump_survival_exact(*sc_.cycle, table(), c.s, c.t);
            const double times[] = {c.t};
            std::vector<unsigned char> hits(replicas_);
            for_each_replica(replicas_, cfg, [&](std::size_t i, Rng& rng) {
                OverUnder o;
                sample_over_under(*sc_.cycle, times, rng, std::span<OverUnder>(&o, 1));
                hits[i] = o.x_star > c.s;
            });
            const double p = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / static_cast<double>(replicas_);
            const double hw = binomial_half_width(stat.value, replicas_, two_sided_z(c.confidence));
            set("s", c.s);
            set("t", c.t);
            set("stationary", stat.value);
            set("grid_exact", exact);
            set("empirical", p);
            set("band", hw);
            const bool mc_ok = std::abs(p - stat.value) <= hw;
            const bool grid_ok = std::abs(exact - stat.value) <= c.tolerance;
            r.passed = mc_ok && grid_ok && !stat.lattice_warning;
            r.detail = "P{x*>" + fmt(c.s) + "} at t=" + fmt(c.t) + ": MC " + fmt(p) + " vs " + fmt(stat.value) +
                       " +- " + fmt(hw) + ", grid " + fmt(exact);
            if (stat.lattice_warning) r.detail += " (lattice cycle: limit does not apply)";
        } else if (type == "overjump-mean") {
            r.provenance = "stationary_overjump_mean";
            const LimitValue stat = stationary_overjump_mean(*sc_.cycle);
            const double times[] = {c.t};
            std::vector<double> xs(replicas_);
            for_each_replica(replicas_, cfg, [&](std::size_t i, Rng& rng) {
                OverUnder o;
                sample_over_under(*sc_.cycle, times, rng, std::span<OverUnder>(&o, 1));
                xs[i] = o.x_star;
            });
            const MeanEstimate est = estimate_mean(xs);
            const double hw = est.half_width(kThreeSigma);
            set("t", c.t);
            set("analytic", stat.value);
            set("estimate", est.mean);
            set("half_width", hw);
            bool ok = std::abs(est.mean - stat.value) <= hw && !stat.lattice_warning;
            if (c.value) {
                set("expected", *c.value);
                ok = ok && std::abs(stat.value - *c.value) <= c.tolerance;
            }
            r.passed = ok;
            r.detail = "E x*_" + fmt(c.t) + " = " + fmt(est.mean) + " +- " + fmt(hw) + " vs " + fmt(stat.value);
        } else if (type == "key-renewal") {
            r.provenance = "key_renewal_theorem";
            const Distribution kernel = *sc_.kernel;
            const Kernel b = [kernel](double s) { return kernel.survival(s); };
            const double limit = key_renewal_limit(b, *sc_.cycle);
            const double integral = key_renewal_integral(b, table(), c.t);
            convergence_ = key_renewal_convergence(b, table(), limit);
            set("t", c.t);
            set("integral", integral);
            set("limit", limit);
            bool ok = std::abs(integral - limit) <= c.tolerance;
            if (c.value) {
                set("expected_limit", *c.value);
                ok = ok && std::abs(limit - *c.value) <= 1e-9;
            }
            r.passed = ok;
            r.detail = "integral at t=" + fmt(c.t) + " is " + fmt(integral) + ", limit " + fmt(limit);
        } else if (type == "query") {
            r.provenance = "stationary_law";
            const double analytic = law_->query(c.state, c.a, c.b);
            const EmpiricalLaw& emp = empirical();
            const ProportionEstimate pe = emp.probability(c.state, c.a, c.b, two_sided_z(c.confidence));
            const double hw = binomial_half_width(analytic, emp.replicas(), two_sided_z(c.confidence));
            set("analytic", analytic);
            set("estimate", pe.estimate);
            set("band", hw);
            bool ok = std::abs(pe.estimate - analytic) <= hw;
            if (c.value) {
                set("expected", *c.value);
                ok = ok && std::abs(analytic - *c.value) <= c.tolerance;
            }
            r.passed = ok;
            r.detail = "P{n=" + std::to_string(c.state) + ", x>" + fmt(c.a) + ", x*>" + fmt(c.b) + "}: analytic " +
                       fmt(analytic) + ", MC " + fmt(pe.estimate) + " +- " + fmt(hw);
        } else if (type == "normalization") {
            r.provenance = "stationary_law";
            double total = 0.0;
            for (int s : law_->states()) total += law_->query(s, 0.0, 0.0);
            set("total", total);
            r.passed = std::abs(total - 1.0) <= c.tolerance;
            r.detail = "sum over levels of P{n=i} = " + format_number(total);
        } else if (type == "start-independence") {
            r.provenance = "stationary_law_start_independence";
            const double z = two_sided_z(c.confidence);
            const ProportionEstimate p1 = empirical().probability(c.state, c.a, c.b, z);
            const LinearwiseProcess alt = process_->restarted(*c.alt_state, c.alt_age);
            const EmpiricalLaw other = estimate_law(alt, sc_.t_obs, replicas_, cfg);
            const ProportionEstimate p2 = other.probability(c.state, c.a, c.b, z);
            const double band = std::hypot(p1.half_width, p2.half_width);
            set("estimate_initial", p1.estimate);
            set("estimate_alternative", p2.estimate);
            set("band", band);
            r.passed = std::abs(p1.estimate - p2.estimate) <= band;
            r.detail = "from (" + std::to_string(process_->initial_state()) + "," + fmt(process_->initial_age()) +
                       ") " + fmt(p1.estimate) + " vs from (" + std::to_string(*c.alt_state) + "," + fmt(c.alt_age) +
                       ") " + fmt(p2.estimate) + ", band " + fmt(band);
        } else if (type == "level-probability") {
            r.provenance = "level_probability";
            const double p = law_->level_probability(c.state);
            set("analytic", p);
            set("expected", *c.value);
            r.passed = std::abs(p - *c.value) <= c.tolerance;
            r.detail = "P{n=" + std::to_string(c.state) + "} = " + fmt(p) + ", expected " + fmt(*c.value);
        } else if (type == "cycle-length") {
            r.provenance = "regeneration_cycle_mean";
            const double expected = law_->mean_cycle_length(c.state);
            Rng rng = make_stream(cfg.seed, 0);
            const auto cycles = regeneration_cycles(*process_, c.state, c.count, rng);
            const MeanEstimate est = estimate_mean(cycles);
            const double hw = est.half_width(kThreeSigma);
            set("analytic", expected);
            set("estimate", est.mean);
            set("half_width", hw);
            r.passed = std::abs(est.mean - expected) <= hw;
            r.detail = "mean cycle into (" + std::to_string(c.state) + ",0): " + fmt(est.mean) + " +- " + fmt(hw) +
                       " vs T/p = " + fmt(expected);
        } else if (type == "degeneration") {
            r.provenance = "single_state_reduction";
            const Distribution& cycle = process_->level_laws().front();
            const EmpiricalLaw lw = estimate_law(*process_, c.t, replicas_, cfg);
            std::vector<double> a;
            for (const auto& o : lw.observations()) a.push_back(o.x_star);
            std::vector<double> b(replicas_);
            const double times[] = {c.t};
            for_each_replica(replicas_, config(index + 1 + 500), [&](std::size_t i, Rng& rng) {
                OverUnder o;
                sample_over_under(cycle, times, rng, std::span<OverUnder>(&o, 1));
                b[i] = o.x_star;
            });
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            double d = 0.0;
            std::size_t i = 0;
            std::size_t j = 0;
            while (i < a.size() && j < b.size()) {
                const double v = std::min(a[i], b[j]);
                while (i < a.size() && a[i] <= v) ++i;
                while (j < b.size() && b[j] <= v) ++j;
                d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                                         static_cast<double>(j) / static_cast<double>(b.size())));
            }
            set("t", c.t);
            set("sup_distance", d);
            r.passed = d < c.tolerance;
            r.detail = "sup_s |linearwise - renewal| P{x*>s} at t=" + fmt(c.t) + " is " + fmt(d);
        } else if (type == "mean-curve" || type == "underjump-curve") {
            const bool over = type == "mean-curve";
            r.provenance = over ? "overjump_mean_monotone" : "underjump_mean_monotone";
            const MeanCurve curve = over ? overjump_mean_curve(*sc_.cycle, c.times, replicas_, cfg)
                                         : underjump_mean_curve(*sc_.cycle, c.times, replicas_, cfg);
            BoundReport rep = curve_bound_report(c.id, curve);
            set("limit", curve.limit);
            for (const auto& p : curve.points) set("t=" + format_number(p.t), p.estimate);
            r.passed = rep.satisfied;
            r.detail = std::string(curve.monotonicity_violation ? "significant decrease; " : "nondecreasing; ") +
                       (curve.bound_violation ? "lower band above limit " : "below limit ") + fmt(curve.limit);
            const auto worst = std::max_element(curve.points.begin(), curve.points.end(),
                                                [](const CurvePoint& x, const CurvePoint& y) { return x.estimate < y.estimate; });
            r.detail += "; max estimate " + fmt(worst->estimate) + " +- " + fmt(worst->half_width) + " at t=" + fmt(worst->t);
            bounds_.push_back(std::move(rep));
        } else if (type == "monotonicity-gap") {
            r.provenance = "overjump_survival_monotone";
            const auto& tab = table();
            Rng rng = make_stream(cfg.seed, 0);
            const double limit = -2.0 * tab.discretization_bound();
            double worst = std::numeric_limits<double>::infinity();
            double ws = 0.0, wt = 0.0, wd = 0.0;
            for (std::size_t i = 0; i < c.count; ++i) {
                const double s = 2.0 * sc_.cycle->mean() * uniform_open(rng);
                const double t = c.t * uniform_open(rng);
                const double delta = (tab.t_max() - t) * uniform_open(rng);
                const double g = monotonicity_gap(*sc_.cycle, tab, s, t, delta);
                if (g < worst) {
                    worst = g;
                    ws = s;
                    wt = t;
                    wd = delta;
                }
            }
            set("min_gap", worst);
            set("allowed", limit);
            set("worst_s", ws);
            set("worst_t", wt);
            set("worst_delta", wd);
            r.passed = worst >= limit;
            r.detail = "min R(s,t+d)-R(s,t) = " + fmt(worst) + " at (s,t,d)=(" + fmt(ws) + "," + fmt(wt) + "," +
                       fmt(wd) + "), allowed " + fmt(limit);
        } else if (type == "power-moment") {
            r.provenance = "power_moment_bound";
            const double times[] = {c.t};
            BoundReport rep = verify_power_moment(*sc_.cycle, c.k, times, replicas_, cfg);
            const auto& o = rep.observed.front();
            set("bound", rep.bound_value);
            set("estimate", o.estimate);
            set("half_width", o.half_width);
            r.passed = c.sharp ? std::abs(o.estimate - rep.bound_value) <= o.half_width : rep.satisfied;
            r.detail = o.label + " at t=" + fmt(c.t) + ": " + fmt(o.estimate) + " +- " + fmt(o.half_width) +
                       (c.sharp ? " vs sharp bound " : " vs bound ") + fmt(rep.bound_value);
            bounds_.push_back(std::move(rep));
        } else if (type == "exp-moment") {
            r.provenance = "exp_moment_bound";
            const double times[] = {c.t};
            BoundReport rep = verify_exp_moment(*sc_.cycle, c.alpha, times, replicas_, cfg);
            const auto& o = rep.observed.front();
            set("bound", rep.bound_value);
            set("estimate", o.estimate);
            set("half_width", o.half_width);
            bool ok = rep.satisfied;
            if (c.value) {
                set("expected", *c.value);
                ok = ok && std::abs(o.estimate - *c.value) <= o.half_width + c.tolerance;
            }
            r.passed = ok;
            r.detail = o.label + " at t=" + fmt(c.t) + ": " + fmt(o.estimate) + " +- " + fmt(o.half_width) +
                       " vs bound " + fmt(rep.bound_value);
            bounds_.push_back(std::move(rep));
        } else if (type == "conditional-bound") {
            r.provenance = "conditional_mean_bound";
            BoundReport rep = conditional_bound_check(*process_, c.state, c.t, replicas_, cfg);
            set("bound", rep.bound_value);
            for (const auto& o : rep.observed) {
                set(o.label, o.estimate);
                set(o.label + " half_width", o.half_width);
            }
            r.passed = rep.satisfied;
            r.detail = "bound " + fmt(rep.bound_value);
            for (const auto& o : rep.observed) r.detail += "; " + o.label + " = " + fmt(o.estimate) + " +- " + fmt(o.half_width);
            bounds_.push_back(std::move(rep));
        } else {
            throw Error(ErrorCode::InvalidArgument, "unhandled check type " + type);
        }
    }

    void write_outputs(const std::filesystem::path& dir, RunResult& result) {
        std::filesystem::create_directories(dir);
        auto emit = [&](const std::string& file, const std::string& content) {
            write_atomically(dir / file, content);
            result.files.push_back(dir / file);
        };

        if (!result.error) {
            if (sc_.cycle && !table_ && (sc_.mode == Mode::Renewal || sc_.mode == Mode::KeyRenewal)) {
                try {
                    table();
                } catch (const Error&) {
                }
            }
            if (table_) {
                Csv csv({"t", "H"});
                const auto& tab = table();
                for (std::size_t j = 0; j < tab.values().size(); ++j)
                    csv.row(tab.step() * static_cast<double>(j), tab.values()[j]);
                emit("renewal_function.csv", csv.str());
            }
            if (sc_.mode == Mode::Renewal && table_ && !sc_.probe_s.empty() && !sc_.probe_t.empty()) write_overjump_grid(emit);
            if (sc_.mode == Mode::KeyRenewal && !convergence_.empty()) {
                Csv csv({"t", "integral", "gap"});
                for (const auto& p : convergence_) csv.row(p.t, p.integral, p.gap);
                emit("convergence.csv", csv.str());
            }
            if (sc_.mode == Mode::Linearwise) write_linearwise(emit);
            if (!bounds_.empty()) {
                Json arr = Json::array();
                Csv csv({"report", "label", "probe", "estimate", "half_width", "bound"});
                for (const auto& b : bounds_) {
                    arr.push_back(bound_json(b));
                    for (const auto& o : b.observed) csv.row(b.name, o.label, o.probe, o.estimate, o.half_width, b.bound_value);
                }
                emit("bounds.json", arr.dump(2) + "\n");
                emit("bounds.csv", csv.str());
            }
        }

        Json checks = Json::array();
        for (const auto& c : result.checks) {
            Json values = Json::object();
            for (const auto& [k, v] : c.values) values[k] = number_json(v);
            checks.push_back({{"id", c.id},
                              {"type", c.type},
                              {"provenance", c.provenance},
                              {"criteria", c.criteria},
                              {"passed", c.passed},
                              {"detail", c.detail},
                              {"values", values}});
        }
        Json files = Json::array();
        for (const auto& f : result.files) files.push_back(f.filename().string());
        Json summary = {{"scenario", sc_.name},
                        {"mode", std::string(to_string(sc_.mode))},
                        {"seed", seed_},
                        {"workers", workers_},
                        {"replicas", replicas_},
                        {"grid_step", number_json(step_)},
                        {"passed", result.passed()},
                        {"error", result.error ? Json(*result.error) : Json(nullptr)},
                        {"checks", checks},
                        {"files", files}};
        emit("summary.json", summary.dump(2) + "\n");
    }

    template <class Emit>
    void write_overjump_grid(Emit& emit) {
        std::vector<double> ts;
        for (double t : sc_.probe_t)
            if (t <= sc_.t_max) ts.push_back(t);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        if (ts.empty()) return;
        const std::size_t m = ts.size();
        const std::size_t ns = sc_.probe_s.size();
        std::vector<std::uint32_t> hits(replicas_ * m * ns);
        for_each_replica(replicas_, config(kGridStream), [&](std::size_t i, Rng& rng) {
            std::vector<OverUnder> obs(m);
            sample_over_under(*sc_.cycle, ts, rng, obs);
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t k = 0; k < ns; ++k) hits[(i * m + j) * ns + k] = obs[j].x_star > sc_.probe_s[k];
        });
        Csv csv({"s", "t", "exact", "stationary", "empirical"});
        const auto& tab = table();
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < ns; ++k) {
                std::size_t n = 0;
                for (std::size_t i = 0; i < replicas_; ++i) n += hits[(i * m + j) * ns + k];
                const double s = sc_.probe_s[k];
                csv.row(s, ts[j], overjump_survival_exact(*sc_.cycle, tab, s, ts[j]),
                        stationary_overjump_survival(*sc_.cycle, s).value,
                        static_cast<double>(n) / static_cast<double>(replicas_));
            }
        }
        emit("overjump_survival.csv", csv.str());
    }

    template <class Emit>
    void write_linearwise(Emit& emit) {
        std::vector<double> as = sc_.probe_a.empty() ? std::vector<double>{0.0} : sc_.probe_a;
        std::vector<double> bs = sc_.probe_b.empty() ? std::vector<double>{0.0} : sc_.probe_b;
        const double z = two_sided_z(0.999);
        Csv analytic({"state", "a", "b", "analytic"});
        Csv emp({"state", "a", "b", "estimate", "half_width", "analytic", "discrepancy"});
        const EmpiricalLaw& el = empirical();
        for (int s : law_->states()) {
            for (double a : as) {
                for (double b : bs) {
                    const double q = law_->query(s, a, b);
                    const ProportionEstimate pe = el.probability(s, a, b, z);
                    analytic.row(s, a, b, q);
                    emp.row(s, a, b, pe.estimate, pe.half_width, q, pe.estimate - q);
                }
            }
        }
        emit("stationary_law.csv", analytic.str());
        emit("empirical_law.csv", emp.str());

        Rng rng = make_stream(config(kTrajectoryStream).seed, 0);
        const Trajectory traj = simulate(*process_, sc_.t_obs, rng);
        Csv path({"jump", "time", "level"});
        path.row(std::size_t{0}, 0.0, traj.level_labels.front());
        for (std::size_t j = 0; j < traj.jump_times.size(); ++j)
            path.row(j + 1, traj.jump_times[j], traj.level_labels[j + 1]);
        emit("trajectory.csv", path.str());
    }

    const Scenario& sc_;
    std::uint64_t seed_;
    unsigned workers_;
    std::size_t replicas_;
    double step_;
    std::optional<RenewalFunctionTable> table_;
    std::optional<LinearwiseProcess> process_;
    std::optional<StationaryLaw> law_;
    std::optional<EmpiricalLaw> empirical_;
    std::vector<ConvergencePoint> convergence_;
    std::vector<BoundReport> bounds_;
};

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    if (options.replicas && *options.replicas == 0) throw Error(ErrorCode::InvalidArgument, "replicas must be positive");
    if (options.grid_step && !(*options.grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
    Runner runner(scenario, options);
    return runner.run(options.out_dir);
}

std::vector<std::filesystem::path> bundled_scenarios(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

VerifySummary verify_all(const RunOptions& options, const std::filesystem::path& dir) {
    VerifySummary summary;
    for (const auto& path : bundled_scenarios(dir)) {
        const std::string file = path.filename().string();
        try {
            const Scenario sc = load_scenario(path);
            const RunResult res = run_scenario(sc, options);
            if (res.error) {
                for (int crit : sc.criteria.empty() ? std::vector<int>{0} : sc.criteria)
                    summary.rows.push_back({crit, sc.name, "run", false, *res.error});
                continue;
            }
            for (const auto& c : res.checks)
                for (int crit : c.criteria.empty() ? std::vector<int>{0} : c.criteria)
                    summary.rows.push_back({crit, sc.name, c.id, c.passed, c.detail});
        } catch (const std::exception& e) {
            summary.rows.push_back({0, file, "load", false, e.what()});
        }
    }
    std::stable_sort(summary.rows.begin(), summary.rows.end(),
                     [](const MatrixRow& a, const MatrixRow& b) { return a.criterion < b.criterion; });
    return summary;
}

void print_matrix(const VerifySummary& summary, std::ostream& out) {
    std::size_t w1 = 8, w2 = 5;
    for (const auto& r : summary.rows) {
        w1 = std::max(w1, r.scenario.size());
        w2 = std::max(w2, r.check.size());
    }
    out << std::left << std::setw(6) << "AC" << std::setw(static_cast<int>(w1) + 2) << "scenario"
        << std::setw(static_cast<int>(w2) + 2) << "check" << "verdict  detail\n";
    for (const auto& r : summary.rows) {
        out << std::left << std::setw(6) << (r.criterion > 0 ? std::to_string(r.criterion) : std::string("-"))
            << std::setw(static_cast<int>(w1) + 2) << r.scenario << std::setw(static_cast<int>(w2) + 2) << r.check
            << (r.passed ? "PASS     " : "FAIL     ") << r.detail << '\n';
    }
    const auto failed = std::count_if(summary.rows.begin(), summary.rows.end(), [](const MatrixRow& r) { return !r.passed; });
    out << summary.rows.size() - static_cast<std::size_t>(failed) << " passed, " << failed << " failed\n";
}

void print_result(const RunResult& result, std::ostream& out) {
    out << result.scenario << " (" << to_string(result.mode) << ", seed " << result.seed << ", workers "
        << result.workers << ")\n";
    if (result.error) out << "  ERROR " << *result.error << '\n';
    for (const auto& c : result.checks)
        out << "  " << (c.passed ? "PASS " : "FAIL ") << c.id << ": " << c.detail << '\n';
    for (const auto& f : result.files) out << "  wrote " << f.string() << '\n';
}

}  // namespace lwp
