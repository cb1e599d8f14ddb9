// runner.hpp — experiment configuration, figure presets, dispatch to solvers and artifact manifest

#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "lrhsr/analytic.hpp"
#include "lrhsr/classical.hpp"
#include "lrhsr/csv.hpp"
#include "lrhsr/errors.hpp"
#include "lrhsr/manybody.hpp"
#include "lrhsr/model.hpp"
#include "lrhsr/quantum.hpp"

namespace lrhsr {

inline constexpr int schema_version = 1;

enum class ExperimentKind { quantum_variance, classical_profile, classical_moments, manybody_relax, spectrum, analytic_report };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::quantum_variance: return "quantum-variance";
    case ExperimentKind::classical_profile: return "classical-profile";
    case ExperimentKind::classical_moments: return "classical-moments";
    case ExperimentKind::manybody_relax: return "manybody-relax";
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::analytic_report: return "analytic-report";
    }
    return {};
}

inline ExperimentKind parse_kind(const std::string& s) {
    for (auto k : {ExperimentKind::quantum_variance, ExperimentKind::classical_profile, ExperimentKind::classical_moments,
                   ExperimentKind::manybody_relax, ExperimentKind::spectrum, ExperimentKind::analytic_report})
        if (to_string(k) == s) return k;
    throw ConfigError("kind", "unknown experiment kind '" + s + "'");
}

enum class TimeUnit { bare, kappa, gamma };

inline std::string to_string(TimeUnit u) { return u == TimeUnit::bare ? "bare" : u == TimeUnit::kappa ? "kappa" : "gamma"; }

inline TimeUnit parse_time_unit(const std::string& s) {
    if (s == "bare") return TimeUnit::bare;
    if (s == "kappa") return TimeUnit::kappa;
    if (s == "gamma") return TimeUnit::gamma;
    throw ConfigError("time_unit", "expected bare, kappa or gamma, got '" + s + "'");
}

enum class Source { center, edge };

struct RunConfig {
    std::vector<double> times;    // explicit output times, in `time_unit`
    double t_max{0.0};            // uniform grid 0..t_max when `times` is empty
    long points{100};
    TimeUnit time_unit{TimeUnit::bare};
    long trajectories{0};
    std::uint64_t seed{1};
    std::vector<long> N_list;     // empty: use model N
    std::vector<double> alpha_list; // empty: use model alpha
    std::vector<int> d_list;      // analytic-report only
    double fit_lo{1e-6};
    double fit_hi{1e-2};
    Source source{Source::center};
    long tail_min{0};
    long tail_max{0};
};

struct ExperimentConfig {
    std::string name{"run"};
    ExperimentKind kind{ExperimentKind::analytic_report};
    ModelParams model;
    RunConfig run;
};

namespace detail {

inline std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s + ' ') {
        if (c == ' ' || c == ',' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& s, F parse) {
    std::vector<T> out;
    for (const auto& tok : split_list(s)) out.push_back(static_cast<T>(parse(key, tok)));
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        if constexpr (std::is_floating_point_v<T>) s += num(v[i]);
        else s += std::to_string(v[i]);
    }
    return s;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(key, "not an unsigned integer: '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ConfigError(key, "out of range: '" + s + "'");
    }
}

inline void apply_run_key(RunConfig& r, const std::string& k, const std::string& v) {
    if (k == "times") r.times = parse_list<double>(k, v, parse_double);
    else if (k == "t_max") r.t_max = parse_double(k, v);
    else if (k == "points") r.points = parse_long(k, v);
    else if (k == "time_unit") r.time_unit = parse_time_unit(v);
    else if (k == "trajectories") r.trajectories = parse_long(k, v);
    else if (k == "seed") r.seed = parse_u64(k, v);
    else if (k == "N_list") r.N_list = parse_list<long>(k, v, parse_long);
    else if (k == "alpha_list") r.alpha_list = parse_list<double>(k, v, parse_double);
    else if (k == "d_list") r.d_list = parse_list<int>(k, v, parse_long);
    else if (k == "fit_lo") r.fit_lo = parse_double(k, v);
    else if (k == "fit_hi") r.fit_hi = parse_double(k, v);
    else if (k == "source") {
        if (v == "center") r.source = Source::center;
        else if (v == "edge") r.source = Source::edge;
        else throw ConfigError(k, "expected center or edge, got '" + v + "'");
    } else if (k == "tail_min") r.tail_min = parse_long(k, v);
    else if (k == "tail_max") r.tail_max = parse_long(k, v);
    else throw ConfigError(k, "unknown run key");
}

} // namespace detail

inline std::map<std::string, std::string> run_key_values(const RunConfig& r) {
    return {{"times", detail::join(r.times)},
            {"t_max", detail::num(r.t_max)},
            {"points", std::to_string(r.points)},
            {"time_unit", to_string(r.time_unit)},
            {"trajectories", std::to_string(r.trajectories)},
            {"seed", std::to_string(r.seed)},
            {"N_list", detail::join(r.N_list)},
            {"alpha_list", detail::join(r.alpha_list)},
            {"d_list", detail::join(r.d_list)},
            {"fit_lo", detail::num(r.fit_lo)},
            {"fit_hi", detail::num(r.fit_hi)},
            {"source", r.source == Source::center ? "center" : "edge"},
            {"tail_min", std::to_string(r.tail_min)},
            {"tail_max", std::to_string(r.tail_max)}};
}

inline void validate(const ExperimentConfig& c) {
    try {
        c.model.validate();
    } catch (const DomainError& e) {
        throw ConfigError("model", e.what());
    }
    const RunConfig& r = c.run;
    if (r.times.empty() && !(r.t_max > 0.0) && c.kind != ExperimentKind::analytic_report && c.kind != ExperimentKind::spectrum &&
        !(c.kind == ExperimentKind::manybody_relax && !r.N_list.empty()))
        throw ConfigError("times", "no output times: give times or t_max > 0");
    for (double t : r.times)
        if (!(t >= 0.0)) throw ConfigError("times", "output times must be >= 0");
    for (std::size_t i = 1; i < r.times.size(); ++i)
        if (r.times[i] < r.times[i - 1]) throw ConfigError("times", "output times must be non-decreasing");
    if (r.points < 1) throw ConfigError("points", "must be >= 1");
    if (r.trajectories < 0) throw ConfigError("trajectories", "must be >= 0");
    for (long N : r.N_list)
        if (N < 2) throw ConfigError("N_list", "sizes must be >= 2");
    for (double a : r.alpha_list)
        if (!(a > 0.0)) throw ConfigError("alpha_list", "exponents must be positive");
    for (int d : r.d_list)
        if (d < 1 || d > 3) throw ConfigError("d_list", "dimensions must be 1, 2 or 3");
    if (!(r.fit_lo > 0.0) || !(r.fit_hi > r.fit_lo)) throw ConfigError("fit_lo", "need 0 < fit_lo < fit_hi");
    if (r.tail_min < 0 || (r.tail_max > 0 && r.tail_max < r.tail_min)) throw ConfigError("tail_min", "invalid tail window");
    if ((c.run.time_unit == TimeUnit::kappa || c.run.time_unit == TimeUnit::gamma) && !(c.model.gamma > 0.0))
        throw ConfigError("time_unit", "kappa and gamma time units need gamma > 0");
    for (char ch : c.name)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
            throw ConfigError("name", "experiment names use letters, digits, '_' and '-' only");
}

// INI sections [experiment] (name, kind), [model], [run]; unknown sections and keys are rejected.
inline ExperimentConfig parse_config(std::istream& in) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config", e.message() + " at line " + std::to_string(e.line()));
    }
    ExperimentConfig c;
    std::map<std::string, std::string> model_kv;
    bool have_kind = false;
    for (const auto& [section, body] : pt) {
        if (body.empty() && !body.data().empty()) throw ConfigError(section, "key outside a section");
        for (const auto& [key, val] : body) {
            const std::string v = val.get_value<std::string>();
            if (section == "experiment") {
                if (key == "name") c.name = v;
                else if (key == "kind") {
                    c.kind = parse_kind(v);
                    have_kind = true;
                } else throw ConfigError(key, "unknown experiment key");
            } else if (section == "model") {
                model_kv[key] = v;
            } else if (section == "run") {
                detail::apply_run_key(c.run, key, v);
            } else {
                throw ConfigError(section, "unknown section");
            }
        }
    }
    if (!have_kind) throw ConfigError("kind", "missing [experiment] kind");
    c.model = from_key_values(model_kv);
    validate(c);
    return c;
}

inline std::string to_ini(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[experiment]\nname = " << c.name << "\nkind = " << to_string(c.kind) << "\n\n[model]\n";
    for (const auto& [k, v] : to_key_values(c.model)) os << k << " = " << v << '\n';
    os << "\n[run]\n";
    for (const auto& [k, v] : run_key_values(c.run)) os << k << " = " << v << '\n';
    return os.str();
}

// ---- presets ----

inline std::vector<std::string> preset_names() {
    return {"fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "figS1", "figS2", "figS3", "figS4"};
}

inline std::vector<ExperimentConfig> figure_preset(const std::string& name) {
    auto make = [](std::string n, ExperimentKind k, ModelParams m, RunConfig r) {
        return ExperimentConfig{std::move(n), k, m, std::move(r)};
    };
    ModelParams m;
    RunConfig r;
    if (name == "fig1b") {
        m = {1, 3.0, 1.0, 10.0, 41, Boundary::open};
        r.t_max = 100.0;
        r.points = 400;
        r.time_unit = TimeUnit::gamma;
        r.N_list = {21, 41};
        return {make("fig1b", ExperimentKind::quantum_variance, m, r)};
    }
    if (name == "fig1c" || name == "fig1d") {
        m = {1, name == "fig1c" ? 1.0 : 2.0, 1.0, 10.0, 1000, Boundary::open};
        r.times = {1.0, 3.0};
        r.time_unit = TimeUnit::kappa;
        return {make(name, ExperimentKind::classical_profile, m, r)};
    }
    if (name == "fig2a") {
        m = {1, 2.0, 1.0, 2.0, 100, Boundary::open};
        r.times = {0.5};
        r.time_unit = TimeUnit::kappa;
        r.alpha_list = {1.0, 1.5, 2.0, 3.0};
        return {make("fig2a", ExperimentKind::manybody_relax, m, r)};
    }
    if (name == "fig2b") {
        m = {1, 2.0, 1.0, 2.0, 100, Boundary::open};
        r.N_list = {100, 200, 400, 800};
        r.alpha_list = {1.0, 1.5, 2.0, 3.0};
        r.time_unit = TimeUnit::kappa;
        return {make("fig2b", ExperimentKind::manybody_relax, m, r)};
    }
    if (name == "figS1") {
        m = {1, 1.0, 1.0, 10.0, 41, Boundary::open};
        r.t_max = 100.0;
        r.points = 400;
        r.time_unit = TimeUnit::gamma;
        r.alpha_list = {1.0, 1.5, 2.0, 3.0};
        return {make("figS1", ExperimentKind::quantum_variance, m, r)};
    }
    if (name == "figS2") {
        r.times = {0.1, 1.0};
        r.time_unit = TimeUnit::kappa;
        r.source = Source::edge;
        RunConfig r2 = r, r3 = r;
        r2.alpha_list = {1.5, 3.0};
        r3.alpha_list = {2.0, 3.0};
        return {make("figS2_d2", ExperimentKind::classical_profile, {2, 1.5, 1.0, 10.0, 100, Boundary::open}, r2),
                make("figS2_d3", ExperimentKind::classical_profile, {3, 2.0, 1.0, 10.0, 30, Boundary::open}, r3)};
    }
    if (name == "figS3") {
        m = {1, 1.0, 1.0, 0.1, 51, Boundary::periodic};
        r.N_list = {51, 101, 201};
        r.alpha_list = {1.0, 2.0, 3.0};
        return {make("figS3", ExperimentKind::spectrum, m, r)};
    }
    if (name == "figS4") {
        m = {1, 2.0, 1.0, 0.1, 201, Boundary::periodic};
        r.t_max = 30.0;
        r.points = 120;
        r.N_list = {51, 101, 201};
        return {make("figS4", ExperimentKind::quantum_variance, m, r)};
    }
    throw ConfigError("preset", "unknown preset '" + name + "'");
}

// ---- running ----

struct Artifact {
    std::string path;   // relative to the output directory
    std::string schema; // table or summary layout identifier
};

inline std::vector<double> resolve_times(const ExperimentConfig& c, const ModelParams& p) {
    std::vector<double> t = c.run.times;
    if (t.empty())
        for (long k = 0; k <= c.run.points; ++k) t.push_back(c.run.t_max * static_cast<double>(k) / c.run.points);
    const double scale = c.run.time_unit == TimeUnit::kappa ? 1.0 / p.kappa() : c.run.time_unit == TimeUnit::gamma ? 1.0 / p.gamma : 1.0;
    for (double& x : t) x *= scale;
    return t;
}

inline std::vector<double> alphas_of(const ExperimentConfig& c) {
    return c.run.alpha_list.empty() ? std::vector<double>{c.model.alpha} : c.run.alpha_list;
}

inline std::vector<long> sizes_of(const ExperimentConfig& c) {
    return c.run.N_list.empty() ? std::vector<long>{c.model.N} : c.run.N_list;
}

inline std::string alpha_tag(double a) { return "alpha" + detail::num(a); }

class ArtifactWriter {
public:
    ArtifactWriter(std::filesystem::path root, std::string prefix) : root_(std::move(root)), prefix_(std::move(prefix)) {
        std::filesystem::create_directories(root_ / prefix_);
    }

    void write(const std::string& file, const std::string& schema, const std::string& body) {
        const std::string rel = prefix_ + "/" + file;
        std::ofstream os(root_ / rel, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + (root_ / rel).string());
        os << body;
        if (!os) throw std::runtime_error("write failed for " + (root_ / rel).string());
        artifacts_.push_back({rel, schema});
    }

    const std::vector<Artifact>& artifacts() const { return artifacts_; }

private:
    std::filesystem::path root_;
    std::string prefix_;
    std::vector<Artifact> artifacts_;
};

inline void run_quantum_variance(const ExperimentConfig& c, ArtifactWriter& out) {
    std::ostringstream os;
    os << "N,alpha,t,qme,eq3,classical,S\n";
    for (double a : alphas_of(c))
        for (long N : sizes_of(c)) {
            ModelParams p = c.model;
            p.alpha = a;
            p.N = N;
            const long origin = center_site(p);
            const double S = hopping_second_moment(p);
            const auto times = resolve_times(c, p);
            const auto traj = propagate_G(localized_G0(p, origin), p, times);
            for (const auto& g : traj)
                os << N << ',' << fmt(a) << ',' << fmt(g.t) << ',' << fmt(population_variance(g.G, p, origin)) << ','
                   << fmt(variance_closed_form(p, g.t)) << ',' << fmt(2.0 * S / p.gamma * g.t) << ',' << fmt(S) << '\n';
        }
    out.write("variance.csv", "variance", os.str());
}

inline std::vector<DensityProfile> classical_trajectory(const ModelParams& p, const std::vector<double>& times, Source src) {
    const Coord origin = src == Source::edge ? edge_site(p) : lattice_center(p);
    return cme_integrate(delta_profile(p, origin), p, times);
}

inline void run_classical(const ExperimentConfig& c, ArtifactWriter& out) {
    const auto alphas = alphas_of(c);
    std::ostringstream summary;
    for (double a : alphas) {
        ModelParams p = c.model;
        p.alpha = a;
        const auto traj = classical_trajectory(p, resolve_times(c, p), c.run.source);
        const std::string suffix = alphas.size() > 1 ? "_" + alpha_tag(a) : "";
        std::ostringstream os;
        if (c.kind == ExperimentKind::classical_profile) {
            write_profiles_csv(os, traj);
            out.write("profile" + suffix + ".csv", "profile", os.str());
            if (c.run.tail_min > 0 && c.run.tail_max > 0)
                for (const auto& n : traj) {
                    const TailFit f = tail_fit(n, c.run.tail_min, c.run.tail_max, 0);
                    summary << "alpha = " << fmt(a) << ", t = " << fmt(n.t) << ", tail_exponent = " << fmt(f.exponent)
                            << ", tail_amplitude = " << fmt(f.amplitude) << ", residual = " << fmt(f.residual) << '\n';
                }
        } else {
            os << "t,mean_x,mean_y,mean_z,variance,mass\n";
            for (const auto& n : traj) {
                const Moments m = moments(n);
                os << fmt(n.t) << ',' << fmt(m.mean[0]) << ',' << fmt(m.mean[1]) << ',' << fmt(m.mean[2]) << ','
                   << fmt(m.variance) << ',' << fmt(n.total()) << '\n';
            }
            out.write("moments" + suffix + ".csv", "moments", os.str());
        }
    }
    if (!summary.str().empty()) out.write("tail_fit.txt", "tail-fit", summary.str());
}

inline void run_manybody(const ExperimentConfig& c, ArtifactWriter& out) {
    const bool have_times = !c.run.times.empty() || c.run.t_max > 0.0;
    std::ostringstream occ, chi;
    occ << "alpha,t,j,n\n";
    chi << "alpha,N,t,chi\n";
    for (double a : alphas_of(c)) {
        ModelParams p = c.model;
        p.alpha = a;
        if (have_times) {
            const auto times = resolve_times(c, p);
            for (const auto& prof : occupation_evolution(p, times, OccupationMethod::eigen))
                for (long i = 0; i < p.N; ++i)
                    occ << fmt(a) << ',' << fmt(prof.t) << ',' << i - p.N / 2 << ',' << fmt(prof.n[static_cast<std::size_t>(i)]) << '\n';
            if (c.run.trajectories > 0) {
                const Ensemble e = kmc_simulate(SpinConfiguration::domain_wall(p.N), p, times, c.run.trajectories, c.run.seed);
                std::ostringstream os;
                write_ensemble_csv(os, e);
                out.write("ensemble_" + alpha_tag(a) + ".csv", "ensemble", os.str());
            }
        }
        if (!c.run.N_list.empty()) {
            std::vector<ChiSeries> series;
            for (long N : c.run.N_list) {
                ModelParams q = p;
                q.N = N;
                series.push_back(relaxation_series(q, 0.1 * c.run.fit_lo));
                for (std::size_t k = 0; k < series.back().t.size(); ++k)
                    chi << fmt(a) << ',' << N << ',' << fmt(series.back().t[k]) << ',' << fmt(series.back().chi[k]) << '\n';
            }
            if (series.size() >= 4) {
                std::ostringstream os;
                write_fit_summary(os, relaxation_fit(series, a, {c.run.fit_lo, c.run.fit_hi}));
                out.write("fit_" + alpha_tag(a) + ".txt", "relaxation-fit", os.str());
            }
        }
    }
    if (have_times) out.write("occupation.csv", "occupation", occ.str());
    if (!c.run.N_list.empty()) out.write("chi.csv", "chi", chi.str());
}

inline void run_spectrum(const ExperimentConfig& c, ArtifactWriter& out) {
    std::ostringstream summary;
    for (double a : alphas_of(c)) {
        std::vector<SlowModeSummary> runs;
        for (long N : sizes_of(c)) {
            ModelParams p = c.model;
            p.alpha = a;
            p.N = N;
            std::vector<SpectralSet> sets;
            for (long qi = 0; qi < N; ++qi) sets.push_back(solve_momentum(qi, p, false));
            std::ostringstream os;
            write_spectrum_csv(os, sets);
            out.write("spectrum_" + alpha_tag(a) + "_N" + std::to_string(N) + ".csv", "spectrum", os.str());
            runs.push_back(slow_modes(sets, p));
            const auto& s = runs.back();
            summary << "alpha = " << fmt(a) << ", N = " << N << ", real_min = " << (s.real_min ? fmt(*s.real_min) : "none")
                    << ", complex_min = " << (s.complex_min ? fmt(*s.complex_min) : "none") << ", slow_real_count = " << s.slow_real.size();
            try {
                double mn = std::numeric_limits<double>::infinity();
                for (long qi = 1; qi < N; ++qi)
                    for (const auto& e : perturbative_spectrum(qi, p)) mn = std::min(mn, e.real());
                summary << ", perturbative_min = " << fmt(mn);
            } catch (const DegeneracyError&) {
                summary << ", perturbative_min = degenerate";
            }
            summary << ", first_order = " << fmt(p.gamma * (N - 1.0) / N) << '\n';
        }
        if (runs.size() >= 2) {
            const PowerFit f = slow_gap_fit(runs);
            summary << "alpha = " << fmt(a) << ", gap_exponent = " << fmt(f.exponent) << ", gap_prefactor = " << fmt(f.prefactor)
                    << ", residual = " << fmt(f.residual) << '\n';
        }
    }
    out.write("slow_modes.txt", "slow-modes", summary.str());
}

inline void run_analytic_report(const ExperimentConfig& c, ArtifactWriter& out) {
    const std::vector<int> dims = c.run.d_list.empty() ? std::vector<int>{c.model.d} : c.run.d_list;
    std::ostringstream os;
    for (int d : dims) {
        ModelParams p = c.model;
        p.d = d;
        os << "d = " << d << "\nalpha_cr = " << fmt(alpha_critical(d)) << "\nforster_ratio = " << fmt(forster_ratio(d)) << '\n';
        for (double a : alphas_of(c)) {
            p.alpha = a;
            os << "alpha = " << fmt(a);
            if (!(2.0 * a > d)) {
                os << ", regime = divergent\n";
                continue;
            }
            const auto k = coefficients(p);
            os << ", regime = " << (k.regime == Regime::mixed ? "mixed" : "levy");
            os << ", D_alpha_over_kappa = " << (k.D_alpha ? fmt(*k.D_alpha / p.kappa()) : "none");
            os << ", C_alpha_over_kappa = " << (k.C_alpha ? fmt(*k.C_alpha / p.kappa()) : "none") << '\n';
        }
    }
    out.write("summary.txt", "analytic-report", os.str());
}

inline std::vector<Artifact> run(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
    validate(c);
    ArtifactWriter out(out_dir, c.name);
    switch (c.kind) {
    case ExperimentKind::quantum_variance: run_quantum_variance(c, out); break;
    case ExperimentKind::classical_profile:
    case ExperimentKind::classical_moments: run_classical(c, out); break;
    case ExperimentKind::manybody_relax: run_manybody(c, out); break;
    case ExperimentKind::spectrum: run_spectrum(c, out); break;
    case ExperimentKind::analytic_report: run_analytic_report(c, out); break;
    }
    return out.artifacts();
}

// ---- manifest ----

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_manifest(const std::filesystem::path& out_dir, const std::vector<ExperimentConfig>& configs,
                           const std::vector<Artifact>& artifacts) {
    std::ostringstream os;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    os << "schema_version = " << schema_version << "\ngenerated = " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << "\n\n";
    for (const auto& a : artifacts)
        os << "[artifact]\npath = " << a.path << "\nschema = " << a.schema << "/" << schema_version
           << "\nsha256 = " << sha256_hex(read_file(out_dir / a.path)) << "\n\n";
    for (const auto& c : configs) os << "# config " << c.name << '\n' << to_ini(c) << '\n';
    std::ofstream f(out_dir / "manifest.txt", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write manifest");
    f << os.str();
}

} // namespace lrhsr
