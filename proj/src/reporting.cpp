#include "dnfkpp/reporting.hpp"

#include "dnfkpp/errors.hpp"
#include "dnfkpp/evolution.hpp"
#include "dnfkpp/scaling_limit.hpp"
#include "dnfkpp/stability.hpp"
#include "dnfkpp/stationary.hpp"
#include "dnfkpp/uniqueness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace dnfkpp::report {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& why) {
    throw Error(ErrorKind::Config, path + ": " + why);
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) config_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) config_error(path + "." + key, "required field missing");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) config_error(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) config_error(path, "must be finite");
    return x;
}

double number(const json& obj, const std::string& path, const char* key) {
    return as_number(require(obj, path, key), path + "." + key);
}

double positive(const json& obj, const std::string& path, const char* key) {
    const double x = number(obj, path, key);
    if (!(x > 0.0)) config_error(path + "." + key, "must be positive");
    return x;
}

template <class T>
void optional_field(const json& obj, const std::string& path, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    const std::string p = path + "." + key;
    if constexpr (std::is_same_v<T, int>) {
        if (!it->is_number_integer()) config_error(p, "expected an integer");
        out = it->template get<int>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) config_error(p, "expected a string");
        out = it->template get<std::string>();
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
        out = as_number(*it, p);
    } else {
        out = as_number(*it, p);
    }
}

std::vector<double> number_list(const json& obj, const std::string& path, const char* key, bool required) {
    auto it = obj.find(key);
    const std::string p = path + "." + key;
    if (it == obj.end()) {
        if (required) config_error(p, "required field missing");
        return {};
    }
    if (!it->is_array()) config_error(p, "expected an array of numbers");
    if (it->empty()) config_error(p, "must not be empty");
    std::vector<double> out;
    for (std::size_t i = 0; i < it->size(); ++i) out.push_back(as_number((*it)[i], p + "[" + std::to_string(i) + "]"));
    return out;
}

Kernel parse_kernel(const json& j, const std::string& path, const std::string& base_dir) {
    if (!j.is_object()) config_error(path, "expected an object");
    const json& t = require(j, path, "type");
    if (!t.is_string()) config_error(path + ".type", "expected a string");
    const std::string type = t.get<std::string>();
    try {
        if (type == "gaussian") return Kernel::gaussian(positive(j, path, "l"));
        if (type == "uniform") return Kernel::uniform(positive(j, path, "l"));
        if (type == "gaussian_pair") {
            double h = 0.0;
            optional_field(j, path, "h", h);
            return Kernel::gaussian_pair(positive(j, path, "q"), h);
        }
        if (type == "uniform_pair") {
            double h_inner = 0.0;
            optional_field(j, path, "h_inner", h_inner);
            return Kernel::uniform_pair(positive(j, path, "q"), h_inner);
        }
        if (type == "tabulated") {
            const json& f = require(j, path, "file");
            if (!f.is_string()) config_error(path + ".file", "expected a string");
            fs::path file = f.get<std::string>();
            if (file.is_relative()) file = fs::path(base_dir) / file;
            if (!fs::exists(file)) config_error(path + ".file", "no such file " + file.string());
            std::optional<TailBound> tail;
            if (auto it = j.find("tail"); it != j.end()) {
                tail = TailBound{positive(*it, path + ".tail", "C"), positive(*it, path + ".tail", "xi")};
            }
            return load_tabulated_csv(file.string(), tail);
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        config_error(path, e.what());
    }
    config_error(path + ".type", "unknown kernel type '" + type + "'");
}

json kernel_json(const Kernel& k) {
    json j;
    j["type"] = k.type_name();
    if (const auto* g = k.as<Gaussian>()) j["l"] = g->l;
    if (const auto* g = k.as<GaussianPair>()) {
        j["q"] = g->q;
        j["h"] = g->h;
    }
    if (const auto* u = k.as<Uniform>()) j["l"] = u->l;
    if (const auto* u = k.as<UniformPair>()) {
        j["q"] = u->q;
        j["h_inner"] = u->h_inner;
    }
    if (const auto* t = k.as<Tabulated>()) {
        j["samples"] = t->data->x.size();
        j["dx"] = t->data->dx;
    }
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace

KernelFamily ExperimentConfig::kernel_family() const {
    if (!family) config_error("family", "required field missing");
    try {
        return shift_family(plus, minus);
    } catch (const Error& e) {
        config_error("kernels.minus", e.what());
    }
}

ExperimentConfig parse_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) config_error("$", "expected a JSON object");
    ExperimentConfig c;
    c.canonical = j.dump();

    const json& model = require(j, "$", "model");
    c.kappa_plus = number(model, "model", "kappa_plus");
    c.kappa_minus = number(model, "model", "kappa_minus");
    c.m = number(model, "model", "m");
    try {
        (void)c.params();
    } catch (const Error& e) {
        config_error("model", e.what());
    }

    const json& kernels = require(j, "$", "kernels");
    c.plus = parse_kernel(require(kernels, "kernels", "plus"), "kernels.plus", base_dir);
    c.minus = parse_kernel(require(kernels, "kernels", "minus"), "kernels.minus", base_dir);

    if (auto it = j.find("family"); it != j.end()) {
        FamilyRange r{positive(*it, "family", "h_min"), positive(*it, "family", "h_max")};
        if (!(r.h_max > r.h_min)) config_error("family.h_max", "must exceed family.h_min");
        c.family = r;
        (void)c.kernel_family();
    }

    auto check_order = [](int n, const std::string& path) {
        if (n < 2 || n > 256) config_error(path, "must lie in [2, 256]");
    };
    if (auto it = j.find("branch"); it != j.end()) {
        if (it->contains("eps")) c.branch.eps = number_list(*it, "branch", "eps", true);
        optional_field(*it, "branch", "delta", c.branch.delta);
        optional_field(*it, "branch", "order", c.branch.order);
        optional_field(*it, "branch", "tol", c.branch.tol);
        optional_field(*it, "branch", "max_iter", c.branch.max_iter);
        check_order(c.branch.order, "branch.order");
    }
    if (auto it = j.find("stability"); it != j.end()) {
        if (it->contains("eps")) c.stability.eps = number_list(*it, "stability", "eps", true);
        optional_field(*it, "stability", "order", c.stability.order);
        check_order(c.stability.order, "stability.order");
    }
    if (auto it = j.find("evolve"); it != j.end()) {
        EvolveConfig& e = c.evolve;
        optional_field(*it, "evolve", "eps", e.eps);
        optional_field(*it, "evolve", "order", e.order);
        optional_field(*it, "evolve", "t_max", e.t_max);
        optional_field(*it, "evolve", "dt", e.dt);
        optional_field(*it, "evolve", "initial", e.initial);
        optional_field(*it, "evolve", "amplitude", e.amplitude);
        optional_field(*it, "evolve", "file", e.file);
        optional_field(*it, "evolve", "tol", e.tol);
        check_order(e.order, "evolve.order");
        if (!(e.t_max > 0.0)) config_error("evolve.t_max", "must be positive");
        if (e.dt && !(*e.dt > 0.0)) config_error("evolve.dt", "must be positive");
        if (!e.file.empty()) {
            fs::path f = e.file;
            if (f.is_relative()) f = fs::path(base_dir) / f;
            if (!fs::exists(f)) config_error("evolve.file", "no such file " + f.string());
            e.file = f.string();
        }
    }
    if (auto it = j.find("limit"); it != j.end()) {
        if (it->contains("sigma")) c.limit.sigma = number_list(*it, "limit", "sigma", true);
    }
    if (auto it = j.find("uniqueness"); it != j.end()) {
        optional_field(*it, "uniqueness", "period", c.uniqueness.period);
        if (c.uniqueness.period && !(*c.uniqueness.period > 0.0)) config_error("uniqueness.period", "must be positive");
    }
    if (auto it = j.find("sweep"); it != j.end()) {
        c.sweep.m = number_list(*it, "sweep", "m", true);
        c.sweep.h = number_list(*it, "sweep", "h", true);
        for (std::size_t i = 0; i < c.sweep.m.size(); ++i) {
            const double m = c.sweep.m[i];
            if (!(m > 0.0 && m < c.kappa_plus)) {
                config_error("sweep.m[" + std::to_string(i) + "]", "must lie in (0, kappa_plus)");
            }
        }
    }
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_integer() || (!it->is_number_unsigned() && it->get<std::int64_t>() < 0))
            config_error("seed", "expected a non-negative integer");
        c.seed = it->get<std::uint64_t>();
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("--config", "cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j, fs::path(path).parent_path().string());
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::InvalidArgument, "SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

void Table::add(const std::vector<double>& row) {
    std::vector<std::string> cells;
    for (double x : row) cells.push_back(format_double(x));
    rows_.push_back(std::move(cells));
}

void Table::add_text(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

std::string Table::csv() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, int threads) {
    if (cfg.sweep.m.empty() || cfg.sweep.h.empty()) config_error("sweep", "required field missing");
    const KernelFamily family = cfg.kernel_family();

    struct Task {
        double m, h;
    };
    std::vector<Task> tasks;
    for (double m : cfg.sweep.m)
        for (double h : cfg.sweep.h) tasks.push_back({m, h});
    std::vector<SweepRow> rows(tasks.size());
    std::vector<std::string> failures(tasks.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task t = tasks[i];
            try {
                const ModelParams params(cfg.kappa_plus, cfg.kappa_minus, t.m);
                const KernelPair k = family.at(t.h);
                const ScanResult s = scan_sup_alpha(params, k);
                double w = std::numeric_limits<double>::quiet_NaN();
                try {
                    w = omega_coefficient(params, k, s.argmax);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::DegenerateDenominator) throw;
                }
                rows[i] = {t.m, t.h, s.sup, s.argmax, w};
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, tasks.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!failures[i].empty()) {
            std::ostringstream msg;
            msg << "sweep task (m = " << tasks[i].m << ", h = " << tasks[i].h << "): " << failures[i];
            throw Error(ErrorKind::InvalidArgument, msg.str());
        }
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.m != b.m ? a.m < b.m : a.h < b.h;
    });
    return rows;
}

Table sweep_table(const std::vector<SweepRow>& rows) {
    Table t({"m", "h", "sup_alpha", "argmax_p", "omega"});
    for (const auto& r : rows) t.add({r.m, r.h, r.sup_alpha, r.argmax, r.omega});
    return t;
}

namespace {

class Runner {
public:
    Runner(const ExperimentConfig& cfg, const RunOptions& opt) : cfg_(cfg), opt_(opt), out_(opt.out_dir) {
        seed_ = opt.seed.value_or(cfg.seed);
    }

    int execute();

private:
    void log(const std::string& msg) const {
        if (opt_.verbose) std::cerr << "[" << opt_.subcommand << "] " << msg << "\n";
    }
    void emit(const std::string& name, const std::string& text) {
        write_text(out_ / name, text);
        outputs_.push_back(name);
    }

    const CriticalPoint& critical();
    KernelPair analysis_kernels();

    void step_critical();
    void step_branch();
    void step_stability();
    void step_evolve();
    void step_limit();
    void step_uniqueness();
    void step_sweep();

    template <class F>
    bool stage(const std::string& name, F&& body);

    const ExperimentConfig& cfg_;
    const RunOptions& opt_;
    fs::path out_;
    std::uint64_t seed_ = 0;
    std::optional<CriticalPoint> crit_;
    json steps_ = json::array();
    std::vector<std::string> outputs_;
    int exit_code_ = 0;
};

template <class F>
bool Runner::stage(const std::string& name, F&& body) {
    json s;
    s["name"] = name;
    log("start " + name);
    try {
        body();
        s["status"] = "ok";
        steps_.push_back(s);
        return true;
    } catch (const Error& e) {
        s["status"] = "failed";
        s["error"] = e.what();
        exit_code_ = e.kind() == ErrorKind::Config ? 2 : 3;
    } catch (const std::exception& e) {
        s["status"] = "failed";
        s["error"] = e.what();
        exit_code_ = 3;
    }
    std::cerr << "stage '" << name << "' failed: " << s["error"].get<std::string>() << "\n";
    steps_.push_back(s);
    return false;
}

const CriticalPoint& Runner::critical() {
    if (!crit_) {
        const KernelFamily fam = cfg_.kernel_family();
        crit_ = find_tangency(cfg_.params(), fam, cfg_.family->h_min, cfg_.family->h_max);
        log("h_c = " + format_double(crit_->h_c) + ", k_c = " + format_double(crit_->k_c));
    }
    return *crit_;
}

KernelPair Runner::analysis_kernels() { return cfg_.family ? critical().kernels : cfg_.kernels(); }

void Runner::step_critical() {
    const ModelParams params = cfg_.params();
    const CriticalPoint& cp = critical();
    const KernelPair& k = cp.kernels;

    json j;
    j["h_c"] = cp.h_c;
    j["k_c"] = cp.k_c;
    j["residual_alpha"] = cp.residual_alpha;
    j["residual_dk"] = cp.residual_dk;
    j["bisection_h"] = cp.oracle_h;
    j["bisection_k"] = cp.oracle_k;
    j["newton_iters"] = cp.newton_iters;
    j["grid_sup"] = cp.grid_sup;
    j["omega"] = omega_coefficient(params, k, cp.k_c);
    j["alpha_dk2"] = alpha_dk2(params.rates(), k, cp.k_c);
    j["alpha_deps"] = alpha_deps(params, k, cp.k_c);
    j["kernels"] = {{"plus", kernel_json(k.plus)}, {"minus", kernel_json(k.minus)}};
    const AssumptionReport& a = cp.assumptions;
    json entries = json::array();
    for (const auto& e : a.entries) {
        entries.push_back({{"name", e.name}, {"pass", e.pass}, {"value", e.value}, {"tolerance", e.tolerance}});
    }
    j["assumptions"] = {{"entries", entries},
                        {"pass", a.pass()},
                        {"wedge_bound", a.wedge_bound},
                        {"j_max", a.j_max},
                        {"p_max", a.p_max},
                        {"minus_ft_negative", a.minus_ft_negative},
                        {"minus_positive_at_zero", a.minus_positive_at_zero}};

    const double P = scan_horizon(params.rates(), k);
    const double step = scan_step(k);
    auto f = [&](double p) { return alpha(params.rates(), k, p); };
    int touching = 0;
    for (const ScanResult& s : scan_local_maxima(f, P, step))
        if (s.sup > -tol_sep) ++touching;
    j["touching_maxima"] = touching;

    Table curve({"p", "alpha"});
    const int n = static_cast<int>(std::ceil(P / step));
    for (int i = 0; i <= n; ++i) {
        const double p = P * i / n;
        curve.add({p, f(p)});
    }
    emit("critical.json", dump(j));
    emit("dispersion.csv", curve.csv());
}

void Runner::step_branch() {
    const ModelParams params = cfg_.params();
    const CriticalPoint& cp = critical();
    const BranchConfig& b = cfg_.branch;
    SolveOptions so;
    so.tol = b.tol;
    so.max_iter = b.max_iter;

    Table t({"eps", "delta", "k", "c1", "c1_predicted", "relative_error", "residual_norm", "newton_iters", "order"});
    json fields = json::array();
    for (double eps : b.eps) {
        const BranchPoint bp = solve_at(params, cp.kernels, cp, eps, b.delta, b.order, so);
        const double rel = std::abs(bp.amplitude_measured - bp.amplitude_predicted) / bp.amplitude_predicted;
        t.add({eps, b.delta, bp.field.k, bp.amplitude_measured, bp.amplitude_predicted, rel, bp.residual_norm,
               static_cast<double>(bp.newton_iters), static_cast<double>(bp.field.order())});
        fields.push_back({{"eps", eps}, {"delta", b.delta}, {"k", bp.field.k}, {"coefficients", bp.field.c}});
    }
    emit("branch.csv", t.csv());
    emit("branch_fields.json", dump(fields));
}

void Runner::step_stability() {
    const ModelParams params = cfg_.params();
    const CriticalPoint& cp = critical();
    Table t({"eps", "Omega", "leading_in_Y", "ratio", "translation_abs", "translation_similarity", "essential_min",
             "essential_max"});
    Table ev({"eps", "index", "re", "im"});
    json warnings = json::array();
    for (double eps : cfg_.stability.eps) {
        const BranchPoint bp = solve_at(params, cp.kernels, cp, eps, 0.0, cfg_.stability.order);
        const SpectrumReport s = spectrum(bp.field, EpsParams{params, eps}, cp.kernels);
        const double Om = capital_omega(params, cp.kernels, cp.k_c, eps, 0.0);
        t.add({eps, Om, s.leading_in_Y, s.leading_in_Y / Om, std::abs(s.translation_eigenvalue),
               s.translation_similarity, s.essential_interval.first, s.essential_interval.second});
        for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
            ev.add({eps, static_cast<double>(i), s.eigenvalues[i].real(), s.eigenvalues[i].imag()});
        }
        for (const auto& w : s.warnings) warnings.push_back({{"eps", eps}, {"warning", w}});
    }
    emit("stability.csv", t.csv());
    emit("eigenvalues.csv", ev.csv());
    emit("stability_warnings.json", dump(warnings));
}

namespace {

TrigField read_coefficients(const std::string& path, double k) {
    std::ifstream in(path);
    if (!in) config_error("evolve.file", "cannot open " + path);
    std::vector<std::array<double, 3>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream s(line);
        double j = 0, a = 0, b = 0;
        if (!(s >> j >> a)) {
            if (rows.empty()) continue;
            config_error("evolve.file", "malformed row: " + line);
        }
        s >> b;
        if (j < 0 || j != std::floor(j)) config_error("evolve.file", "mode index must be a non-negative integer");
        rows.push_back({j, a, b});
    }
    int n = 1;
    for (const auto& r : rows) n = std::max(n, static_cast<int>(r[0]));
    TrigField f = TrigField::zeros(n, k);
    for (const auto& r : rows) {
        const auto j = static_cast<std::size_t>(r[0]);
        f.a[j] = r[1];
        if (j > 0) f.b[j] = r[2];
    }
    return f;
}

} // namespace

void Runner::step_evolve() {
    const ModelParams params = cfg_.params();
    const CriticalPoint& cp = critical();
    const EvolveConfig& e = cfg_.evolve;
    const std::string initial = opt_.initial.value_or(e.initial);
    const int N = e.order;
    const EpsParams ep{params, e.eps};

    TrigField target = TrigField::zeros(N, cp.k_c);
    bool patterned = false;
    if (delta_bound(params, cp.kernels, cp.k_c, e.eps) > 0.0) {
        target = TrigField::from(solve_at(params, cp.kernels, cp, e.eps, 0.0, N).field);
        patterned = true;
    }

    TrigField init;
    if (initial == "pattern-perturbation") {
        if (!patterned) config_error("evolve.eps", "pattern-perturbation needs a patterned state (eps inside the wedge)");
        std::mt19937_64 rng(seed_);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        TrigField d = TrigField::zeros(N, cp.k_c);
        for (int j = 0; j <= N; ++j) d.a[j] = u(rng);
        const double s = e.amplitude / d.norm();
        init = target;
        for (int j = 0; j <= N; ++j) init.a[j] += s * d.a[j];
    } else if (initial == "theta-perturbation") {
        init = TrigField::zeros(N, cp.k_c);
        init.a[1] = e.amplitude;
    } else if (initial == "file") {
        const std::string path = opt_.initial_file.value_or(e.file);
        if (path.empty()) config_error("evolve.file", "required when initial = file");
        if (!fs::exists(path)) config_error("evolve.file", "no such file " + path);
        init = read_coefficients(path, cp.k_c);
        if (init.order() != N) {
            TrigField r = TrigField::zeros(N, cp.k_c);
            for (int j = 0; j <= std::min(N, init.order()); ++j) {
                r.a[j] = init.a[j];
                r.b[j] = init.b[j];
            }
            init = r;
        }
    } else {
        config_error("evolve.initial", "expected theta-perturbation, pattern-perturbation or file");
    }

    const double t_max = opt_.t_max.value_or(e.t_max);
    const double dt = opt_.dt ? *opt_.dt : e.dt ? *e.dt : default_dt(ep.rates(), cp.kernels, cp.k_c, N);
    if (!(t_max > 0.0)) config_error("--t-max", "must be positive");
    if (!(dt > 0.0)) config_error("--dt", "must be positive");
    EvolutionOptions eo;
    eo.tol_dyn = e.tol;
    log("integrating to t = " + format_double(t_max) + " with dt = " + format_double(dt));
    const EvolutionOutcome out = integrate(init, ep, cp.kernels, t_max, dt, target, eo);

    Table hist({"t", "distance"});
    for (const auto& [t, d] : out.distance_history) hist.add({t, d});
    json j;
    j["status"] = to_string(out.status);
    j["t_final"] = out.t_final;
    j["final_distance"] = out.final_distance;
    j["dt"] = dt;
    j["t_max"] = t_max;
    j["initial"] = initial;
    j["eps"] = e.eps;
    j["target"] = patterned ? "pattern" : "theta";
    j["warnings"] = out.warnings;
    j["final_field"] = {{"a", out.final_field.a}, {"b", out.final_field.b}, {"k", out.final_field.k}};
    emit("evolve.csv", hist.csv());
    emit("evolve.json", dump(j));
    if (out.status != EvolutionStatus::Converged) log("evolution ended as " + to_string(out.status));
}

void Runner::step_limit() {
    const ModelParams params = cfg_.params();
    if (!cfg_.family) config_error("family", "required field missing");
    const LocalLimitData ld = local_quantities(params, cfg_.kernel_family(), cfg_.family->h_min, cfg_.family->h_max);
    std::vector<double> sig = cfg_.limit.sigma;
    const ConvergenceStudy st = convergence_study(params, ld.kernels, ld, sig);

    double identity = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double p = 4.0 * ld.k_c * i / 400;
        const double lhs = tilde_alpha(0.0, p, 0.0, 0.0, params, ld.kernels);
        const double rhs = params.kappa_plus() * local_d(ld.mu_c, p, ld.kernels.minus);
        identity = std::max(identity, std::abs(lhs - rhs));
    }

    Table t({"sigma", "k_c", "kappa", "d_eps", "d_eps_reduced", "d_kk", "omega", "omega_discrepancy"});
    for (const auto& r : st.rows) {
        t.add({r.sigma, r.k_c, r.kappa, r.d_eps, r.d_eps_reduced, r.d_kk, r.omega, r.omega_discrepancy});
    }
    json j;
    j["mu_c"] = ld.mu_c;
    j["h_c"] = ld.h_c;
    j["k_c"] = ld.k_c;
    j["d"] = ld.d;
    j["d_k"] = ld.d_k;
    j["d_kk"] = ld.d_kk;
    j["omega_1"] = ld.omega_1;
    j["omega_0"] = ld.omega_0;
    j["omega0_eps"] = ld.omega0_eps;
    j["omega0_delta"] = ld.omega0_delta;
    j["omega0_delta_printed"] = ld.omega0_delta_printed;
    j["gamma"] = gamma_second_moment(ld.kernels.plus);
    j["kappa_rate"] = st.kappa_rate;
    j["k_rate"] = st.k_rate;
    j["local_identity_max_error"] = identity;
    emit("limit.csv", t.csv());
    emit("limit.json", dump(j));
}

void Runner::step_uniqueness() {
    const ModelParams params = cfg_.params();
    const KernelPair k = analysis_kernels();
    double period = 0.0;
    if (cfg_.uniqueness.period) {
        period = *cfg_.uniqueness.period;
    } else if (cfg_.family) {
        period = 2.0 * std::numbers::pi / critical().k_c;
    } else {
        config_error("uniqueness.period", "required when no family is given");
    }

    json j;
    const DominanceReport d = check_dominance(params, k);
    j["dominance"] = {{"status", to_string(d.status)},
                      {"min_margin", d.min_margin},
                      {"argmin", d.argmin},
                      {"margin_at_zero", d.margin_at_zero},
                      {"grid_extent", d.grid_extent},
                      {"conclusion", d.conclusion}};
    j["period"] = period;
    j["gamma_p"] = gamma_p(params, k, period);
    const CertifiedValue ip = i_p_bound(k.minus, period);
    j["i_p"] = {{"value", ip.value}, {"tail_bound", ip.tail_bound}};
    try {
        j["l2_radius"] = l2_uniqueness_radius(params, k, period);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotApplicable) throw;
        j["l2_radius"] = nullptr;
        j["l2_radius_note"] = e.what();
    }
    const CertifiedValue jt = j_theta_l1(params, k);
    j["j_theta_l1"] = {{"value", jt.value}, {"tail_bound", jt.tail_bound}};
    try {
        j["linf_radius"] = linf_uniqueness_radius(params, k);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotApplicable) throw;
        j["linf_radius"] = nullptr;
        j["linf_radius_note"] = e.what();
    }
    emit("uniqueness.json", dump(j));
}

void Runner::step_sweep() {
    const auto rows = run_sweep(cfg_, opt_.threads);
    emit("sweep.csv", sweep_table(rows).csv());
}

int Runner::execute() {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out_);
    const std::string& sc = opt_.subcommand;
    if (sc == "critical") {
        stage("critical", [&] { step_critical(); });
    } else if (sc == "branch") {
        stage("branch", [&] { step_branch(); });
    } else if (sc == "stability") {
        stage("stability", [&] { step_stability(); });
    } else if (sc == "evolve") {
        stage("evolve", [&] { step_evolve(); });
    } else if (sc == "limit") {
        stage("limit", [&] { step_limit(); });
    } else if (sc == "uniqueness") {
        stage("uniqueness", [&] { step_uniqueness(); });
    } else if (sc == "sweep") {
        stage("sweep", [&] { step_sweep(); });
    } else if (sc == "analyze") {
        stage("critical", [&] { step_critical(); }) && stage("branch", [&] { step_branch(); }) &&
            stage("stability", [&] { step_stability(); }) && stage("uniqueness", [&] { step_uniqueness(); });
    } else {
        stage(sc, [&] { config_error("subcommand", "unknown subcommand '" + sc + "'"); });
    }

    json m;
    m["tool"] = "dnfkpp";
    m["version"] = tool_version;
    m["subcommand"] = sc;
    m["config_sha256"] = sha256_hex(cfg_.canonical);
    m["seed"] = seed_;
    m["steps"] = steps_;
    m["outputs"] = outputs_;
    m["exit_code"] = exit_code_;
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(out_ / "manifest.json", dump(m));
    return exit_code_;
}

} // namespace

int run(const ExperimentConfig& cfg, const RunOptions& opt) {
    Runner r(cfg, opt);
    return r.execute();
}

} // namespace dnfkpp::report
