#include "app.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "twinbeam/twinbeam.hpp"

namespace twinbeam::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tolerance-exceeded verdict from the oracle; maps to exit code 2.
class ToleranceExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
        throw UsageError("invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
    return v;
}

long long parse_integer(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw UsageError("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
    return v;
}

Json number(double v) {
    if (std::isnan(v)) return nullptr;
    return rounded(v);
}

/// Option values of one subcommand, resolved as flags > config file > defaults.
class Settings {
public:
    explicit Settings(CLI::App* sub) : sub_(sub) {
        sub_->add_option("--config", config_path_, "config file (JSON object or key=value lines)");
    }

    void add(const std::string& key, const std::string& help) {
        auto& slot = values_[key];
        slot.text = std::make_unique<std::string>();
        slot.option = sub_->add_option("--" + key, *slot.text, help);
    }

    void add_flag(const std::string& key, const std::string& help) {
        auto& slot = values_[key];
        slot.text = std::make_unique<std::string>();
        slot.option = sub_->add_flag("--" + key, help);
    }

    void load_config() {
        if (config_path_.empty()) return;
        std::ifstream in(config_path_);
        if (!in) throw IoError("cannot read config file " + config_path_);
        std::stringstream buf;
        buf << in.rdbuf();
        config_ = parse_config(buf.str());
        for (const auto& [k, v] : config_)
            if (!values_.count(k)) throw UsageError("unknown config key '" + k + "'");
    }

    std::optional<std::string> lookup(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        if (it->second.option->count() > 0) return *it->second.text;
        auto c = config_.find(key);
        if (c != config_.end()) return c->second;
        return std::nullopt;
    }

    bool flag(const std::string& key) const {
        auto it = values_.find(key);
        if (it != values_.end() && it->second.option->count() > 0) return true;
        auto c = config_.find(key);
        return c != config_.end() && (c->second == "true" || c->second == "1");
    }

    double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        if (auto v = lookup(key)) return parse_double(*v, "--" + key);
        if (fallback) return *fallback;
        throw UsageError("--" + key + " is required");
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) const {
        if (auto v = lookup(key)) return parse_integer(*v, "--" + key);
        if (fallback) return *fallback;
        throw UsageError("--" + key + " is required");
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        if (auto v = lookup(key)) return *v;
        return fallback;
    }

    Range range(const std::string& key) const {
        auto v = lookup(key);
        if (!v) throw UsageError("--" + key + " is required");
        return Range::parse(*v);
    }

private:
    struct Slot {
        std::unique_ptr<std::string> text;
        CLI::Option* option = nullptr;
    };
    CLI::App* sub_;
    std::string config_path_;
    std::map<std::string, Slot> values_;
    std::map<std::string, std::string> config_;
};

PdcParams params_from(const Settings& s) {
    try {
        return PdcParams(s.real("mu1"), s.real("mu2"), s.real("muk"), s.real("phi", 0.0));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

LossModel loss_from(const Settings& s) {
    try {
        return LossModel(s.real("tau", 1.0));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

Json inputs_json(const PdcParams& p) {
    Json j;
    j["mu1"] = number(p.mu1());
    j["mu2"] = number(p.mu2());
    j["muk"] = number(p.muk());
    j["phi"] = number(p.phi());
    return j;
}

Json moments_json(const TwoModeMoments& m) {
    Json j;
    j["n1"] = number(m.n1);
    j["n2"] = number(m.n2);
    j["var1"] = number(m.var1);
    j["var2"] = number(m.var2);
    j["cov12"] = number(m.cov12);
    j["varH"] = number(m.varH);
    return j;
}

void put_gammas(Json& j, const GammaReport& g) {
    j["gamma_c"] = number(g.gamma_c);
    j["gamma_n"] = number(g.gamma_n);
    j["gamma_e"] = number(g.gamma_e);
    j["region"] = std::string(to_string(g.region));
}

Json thresholds_json(const Thresholds& t) {
    Json j;
    j["muk_n"] = number(t.muk_n);
    j["muk_c"] = number(t.muk_c);
    j["muk_e"] = number(t.muk_e);
    return j;
}

/// Analytic gammas at loss tau, straight from the closed forms when lossless.
GammaReport analytic_gammas(const PdcParams& p, const LossModel& loss) {
    return loss.tau() == 1.0 ? gamma_report(p) : gamma_with_loss(p, loss);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file " + path);
    return f;
}

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

// -- subcommands -------------------------------------------------------------

int cmd_gamma(const Settings& s, std::ostream& out) {
    const PdcParams p = params_from(s);
    const LossModel loss = loss_from(s);
    const GammaReport g = analytic_gammas(p, loss);
    const std::string format = s.text("format", "json");
    if (format == "csv") {
        write_scan_csv(out, {ScanRow{p.mu1(), p.mu2(), p.muk(), g}});
        return kOk;
    }
    if (format != "json") throw UsageError("--format must be csv or json");
    Json j;
    j["command"] = "gamma";
    j["inputs"] = inputs_json(p);
    j["inputs"]["tau"] = number(loss.tau());
    put_gammas(j, g);
    j["thresholds"] = thresholds_json(thresholds(p.mu1(), p.mu2()));
    emit(out, j);
    return kOk;
}

int cmd_thresholds(const Settings& s, std::ostream& out) {
    const double mu1 = s.real("mu1"), mu2 = s.real("mu2");
    if (mu1 < 0.0 || mu2 < 0.0) throw UsageError("seed intensities must be non-negative");
    Json j;
    j["command"] = "thresholds";
    j["inputs"] = {{"mu1", number(mu1)}, {"mu2", number(mu2)}};
    j["thresholds"] = thresholds_json(thresholds(mu1, mu2));
    emit(out, j);
    return kOk;
}

int cmd_scan(const Settings& s, std::ostream& out) {
    ScanSpec spec;
    spec.mu1 = s.range("mu1");
    spec.mu2 = s.range("mu2");
    spec.muk = s.range("muk");
    spec.tau = loss_from(s).tau();
    spec.n_modes = static_cast<int>(s.integer("modes", 1));
    if (s.flag("allow-large")) spec.max_points = std::numeric_limits<std::size_t>::max();
    const std::string format = s.text("format", "csv");
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");

    const auto rows = run_scan(spec);

    auto write = [&](std::ostream& os) {
        if (format == "csv") {
            write_scan_csv(os, rows);
            return;
        }
        Json arr = Json::array();
        for (const auto& r : rows) {
            Json j;
            j["mu1"] = number(r.mu1);
            j["mu2"] = number(r.mu2);
            j["muk"] = number(r.muk);
            put_gammas(j, r.gammas);
            arr.push_back(std::move(j));
        }
        Json doc;
        doc["command"] = "scan";
        doc["tau"] = number(spec.tau);
        doc["modes"] = spec.n_modes;
        doc["rows"] = std::move(arr);
        emit(os, doc);
    };

    const std::string path = s.text("out", "");
    if (path.empty() || path == "-") {
        write(out);
    } else {
        auto f = open_output(path);
        write(f);
        if (!f) throw IoError("failed writing " + path);
    }
    return kOk;
}

int cmd_simulate(const Settings& s, std::ostream& out, std::ostream& err) {
    const PdcParams p = params_from(s);
    const LossModel loss = loss_from(s);
    if (!s.lookup("seed")) throw UsageError("--seed is required for simulate");
    const auto seed = static_cast<std::uint64_t>(s.integer("seed"));
    const long long trials = s.integer("trials", 100000);
    if (trials < 2) throw UsageError("--trials must be >= 2");
    const int cutoff = static_cast<int>(s.integer("cutoff", 0));
    const bool timing = s.flag("timing");

    const auto t0 = std::chrono::steady_clock::now();
    const FockSampler sampler(p, cutoff);
    const auto ideal = sampler.sample(static_cast<std::size_t>(trials), seed);
    const auto events = thin_counts(ideal, loss, seed);
    const CountRecord record(events);
    const GammaEstimate est = estimate_gammas(record, 1, BootstrapOptions{200, seed});
    const auto t1 = std::chrono::steady_clock::now();

    const std::string path = s.text("out", "");
    if (!path.empty()) {
        auto f = open_output(path);
        f << "k,l\n";
        for (const auto& e : events) f << e.k << ',' << e.l << '\n';
        if (!f) throw IoError("failed writing " + path);
    }

    // Sample mean of k - l and its standard error; the difference is
    // conserved by the downconverter so its target is mu1 - mu2 (times tau).
    const double n = static_cast<double>(record.trials());
    const double diff_mean = est.moments.n1 - est.moments.n2;
    const double diff_stderr = std::sqrt(std::max(0.0, est.moments.varH) / n);

    const GammaReport target = analytic_gammas(p, loss);
    Json j;
    j["command"] = "simulate";
    j["inputs"] = inputs_json(p);
    j["inputs"]["tau"] = number(loss.tau());
    j["seed"] = seed;
    j["trials"] = record.trials();
    j["cutoff"] = sampler.cutoff();
    j["gamma_c"] = number(est.gamma_c.value);
    j["stderr_gamma_c"] = number(est.gamma_c.std_error);
    j["gamma_n"] = number(est.gamma_n ? est.gamma_n->value : kNaN);
    j["stderr_gamma_n"] = number(est.gamma_n ? est.gamma_n->std_error : kNaN);
    j["gamma_e"] = number(est.gamma_e.value);
    j["stderr_gamma_e"] = number(est.gamma_e.std_error);
    j["region"] = std::string(to_string(est.region));
    j["mean_difference"] = number(diff_mean);
    j["stderr_mean_difference"] = number(diff_stderr);
    j["sample_moments"] = moments_json(est.moments);
    Json a;
    put_gammas(a, target);
    a["mean_difference"] = number(loss.tau() * (p.mu1() - p.mu2()));
    j["analytic"] = std::move(a);
    if (timing) j["elapsed_seconds"] = std::chrono::duration<double>(t1 - t0).count();
    emit(out, j);
    (void)err;
    return kOk;
}

int cmd_oracle(const Settings& s, std::ostream& out) {
    const PdcParams p = params_from(s);
    const int cutoff = static_cast<int>(s.integer("cutoff", 0));

    const TwoModeMoments analytic = output_moments(p);
    const JointPhotonPmf pmf = joint_pmf(p, cutoff);
    const TwoModeMoments fock = pmf.moments();
    const PptReport ppt = ppt_check(build_covariance(p));

    auto rel = [](double a, double f) { return std::abs(a - f) / std::max(std::abs(a), 1e-300); };
    double moment_delta = 0.0;
    for (auto [a, f] : {std::pair{analytic.n1, fock.n1}, std::pair{analytic.n2, fock.n2},
                        std::pair{analytic.var1, fock.var1}, std::pair{analytic.var2, fock.var2},
                        std::pair{analytic.cov12, fock.cov12}, std::pair{analytic.varH, fock.varH}}) {
        if (a == 0.0 && std::abs(f) <= 1e-12) continue;
        moment_delta = std::max(moment_delta, rel(a, f));
    }

    Json j;
    j["command"] = "oracle";
    j["inputs"] = inputs_json(p);
    j["cutoff"] = pmf.cutoff;
    j["trace_defect"] = number(pmf.trace_defect);
    j["analytic_moments"] = moments_json(analytic);
    j["fock_moments"] = moments_json(fock);
    j["max_relative_moment_delta"] = number(moment_delta);

    bool pass = moment_delta <= 1e-6 && pmf.trace_defect < kDefaultTraceTolerance;
    const GammaReport g = gamma_report(p);
    Json ga, gf;
    put_gammas(ga, g);
    double gamma_delta = 0.0;
    if (g.defined()) {
        const GammaReport gfock = gammas_from_moments(fock);
        put_gammas(gf, gfock);
        gamma_delta = std::max({std::abs(g.gamma_c - gfock.gamma_c), std::abs(g.gamma_n - gfock.gamma_n),
                                std::abs(g.gamma_e - gfock.gamma_e)});
        pass = pass && gamma_delta <= 1e-5;
    } else {
        put_gammas(gf, GammaReport{});
    }
    j["analytic"] = std::move(ga);
    j["fock"] = std::move(gf);
    j["max_gamma_delta"] = number(gamma_delta);

    j["nu_minus"] = number(ppt.nu_minus);
    j["ppt_entangled"] = ppt.entangled;
    const bool near_boundary = !g.defined() || std::abs(g.gamma_e) < 1e-9;
    const bool agree = near_boundary || ppt.entangled == violates(g.gamma_e);
    j["ppt_agrees_with_gamma_e"] = agree;
    pass = pass && agree;
    j["pass"] = pass;
    emit(out, j);
    return pass ? kOk : kNumerical;
}

int cmd_multimode(const Settings& s, std::ostream& out) {
    const PdcParams p = params_from(s);
    const LossModel loss = loss_from(s);
    const long long modes = s.integer("modes", 1);
    if (modes < 1) throw UsageError("--modes must be >= 1");
    const MultimodeParams mp(static_cast<int>(modes), p);

    const TwoModeMoments m = lossy_moments(multimode_moments(mp), loss);
    const TwoModeMoments single = lossy_moments(output_moments(p), loss);

    Json j;
    j["command"] = "multimode";
    j["inputs"] = inputs_json(p);
    j["inputs"]["tau"] = number(loss.tau());
    j["inputs"]["modes"] = modes;
    j["moments"] = moments_json(m);
    if (!(m.total() > 0.0)) {
        j["witness_margin"] = nullptr;
        j["entangled"] = nullptr;
        j["single_pair_margin"] = nullptr;
        j["mode_invariant"] = nullptr;
        j["snl_margin"] = nullptr;
        j["snl_violated"] = nullptr;
        j["region"] = std::string(to_string(Region::Undefined));
        emit(out, j);
        return kOk;
    }
    const WitnessResult w = multimode_witness(m, static_cast<int>(modes));
    const WitnessResult w1 = multimode_witness(single, 1);
    j["witness_margin"] = number(w.margin);
    j["entangled"] = w.violated;
    j["single_pair_margin"] = number(w1.margin);
    j["mode_invariant"] = std::abs(w.margin - w1.margin) <= 1e-12 && w.violated == w1.violated;
    const double snl = 1.0 - m.varH / m.total();
    j["snl_margin"] = number(snl);
    j["snl_violated"] = violates(snl);
    j["region"] = std::string(to_string(gammas_from_moments(m, static_cast<int>(modes)).region));
    emit(out, j);
    return kOk;
}

} // namespace

// -- public helpers ------------------------------------------------------------

std::string format_number(double value, std::string_view nan_text) {
    if (std::isnan(value)) return std::string(nan_text);
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

double rounded(double value) {
    if (!std::isfinite(value)) return value;
    const std::string t = format_number(value);
    double v = 0.0;
    std::from_chars(t.data(), t.data() + t.size(), v);
    return v;
}

Range Range::parse(std::string_view text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    Range r;
    if (parts.size() == 1) {
        r.start = r.stop = parse_double(parts[0], "range");
        r.step = 1.0;
    } else if (parts.size() == 3) {
        r.start = parse_double(parts[0], "range start");
        r.stop = parse_double(parts[1], "range stop");
        r.step = parse_double(parts[2], "range step");
    } else {
        throw UsageError("range must be 'x' or 'start:stop:step', got '" + std::string(text) + "'");
    }
    if (!(r.start <= r.stop)) throw UsageError("range start must not exceed stop");
    if (!(r.step > 0.0)) throw UsageError("range step must be positive");
    return r;
}

std::size_t Range::size() const {
    // The stop value is included when it lies on the grid up to rounding.
    const double span = (stop - start) / step;
    if (span > 1e15) return std::numeric_limits<std::size_t>::max();
    return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

std::vector<ScanRow> run_scan(const ScanSpec& spec) {
    if (spec.n_modes < 1) throw UsageError("--modes must be >= 1");
    const std::size_t n1 = spec.mu1.size(), n2 = spec.mu2.size(), nk = spec.muk.size();
    const double points = static_cast<double>(n1) * static_cast<double>(n2) * static_cast<double>(nk);
    if (points > static_cast<double>(spec.max_points))
        throw UsageError("scan grid has " + format_number(points) + " points, above the cap of " +
                         std::to_string(spec.max_points) + " (pass --allow-large to override)");
    if (spec.mu1.start < 0.0 || spec.mu2.start < 0.0 || spec.muk.start < 0.0)
        throw UsageError("scan ranges must be non-negative");
    const LossModel loss(spec.tau);

    std::vector<ScanRow> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (std::size_t a = 0; a < n1; ++a) {
        for (std::size_t b = 0; b < n2; ++b) {
            for (std::size_t c = 0; c < nk; ++c) {
                ScanRow row{spec.mu1.at(a), spec.mu2.at(b), spec.muk.at(c), {}};
                const PdcParams p(row.mu1, row.mu2, row.muk);
                row.gammas = analytic_gammas(p, loss);
                if (spec.n_modes > 1 && row.gammas.defined()) {
                    // Homogeneous pairs: gamma_c and the corrected witness are
                    // N-independent; negativity does not extend.
                    row.gammas.gamma_n = kNaN;
                    row.gammas.region = classify(row.gammas.gamma_c, kNaN, row.gammas.gamma_e);
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << kScanHeader << '\n';
    for (const auto& r : rows) {
        os << format_number(r.mu1) << ',' << format_number(r.mu2) << ',' << format_number(r.muk) << ','
           << format_number(r.gammas.gamma_c, "") << ',' << format_number(r.gammas.gamma_n, "") << ','
           << format_number(r.gammas.gamma_e, "") << ',' << to_string(r.gammas.region) << '\n';
    }
}

std::vector<ParsedScanRow> read_scan_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || trim(line) != kScanHeader) throw UsageError("scan CSV header mismatch");
    std::vector<ParsedScanRow> rows;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        f.push_back(cur);
        if (f.size() != 7) throw UsageError("scan CSV row has " + std::to_string(f.size()) + " fields");
        auto opt = [](const std::string& t) { return t.empty() ? kNaN : parse_double(t, "csv field"); };
        rows.push_back({parse_double(f[0], "mu1"), parse_double(f[1], "mu2"), parse_double(f[2], "muk"),
                        opt(f[3]), opt(f[4]), opt(f[5]), f[6]});
    }
    return rows;
}

std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{') {
        Json j;
        try {
            j = Json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(std::string("config JSON: ") + e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& v = it.value();
            if (v.is_string())
                out[it.key()] = v.get<std::string>();
            else if (v.is_boolean())
                out[it.key()] = v.get<bool>() ? "true" : "false";
            else if (v.is_number_integer() || v.is_number_unsigned())
                out[it.key()] = v.dump();
            else if (v.is_number_float())
                out[it.key()] = format_number(v.get<double>());
            else
                throw UsageError("config value for '" + it.key() + "' must be a scalar");
        }
        return out;
    }
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + " lacks '='");
        std::string key = trim(t.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        out[key] = trim(t.substr(eq + 1));
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonclassicality of thermally seeded parametric downconversion", "twinbeam"};
    app.require_subcommand(1);

    auto* gamma = app.add_subcommand("gamma", "gamma parameters, region and thresholds at one point");
    auto* thr = app.add_subcommand("thresholds", "critical muk values for given seeds");
    auto* scan = app.add_subcommand("scan", "gamma grid over (mu1, mu2, muk) ranges");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo photon counting with loss");
    auto* orc = app.add_subcommand("oracle", "analytic vs Fock-space and Gaussian cross-checks");
    auto* mm = app.add_subcommand("multimode", "multimode entanglement witness");

    Settings s_gamma(gamma), s_thr(thr), s_scan(scan), s_sim(sim), s_orc(orc), s_mm(mm);
    for (Settings* st : {&s_gamma, &s_sim, &s_orc, &s_mm}) {
        st->add("mu1", "mean photons of seed 1");
        st->add("mu2", "mean photons of seed 2");
        st->add("muk", "spontaneous downconversion mean photons");
        st->add("phi", "pump phase (radians)");
    }
    for (Settings* st : {&s_gamma, &s_sim, &s_mm, &s_scan}) st->add("tau", "overall transmission in [0, 1]");
    s_gamma.add("format", "json | csv");
    s_thr.add("mu1", "mean photons of seed 1");
    s_thr.add("mu2", "mean photons of seed 2");
    s_scan.add("mu1", "value or start:stop:step");
    s_scan.add("mu2", "value or start:stop:step");
    s_scan.add("muk", "value or start:stop:step");
    s_scan.add("modes", "number of identical mode pairs");
    s_scan.add("out", "output path (default stdout)");
    s_scan.add("format", "csv | json");
    s_scan.add_flag("allow-large", "lift the grid size cap");
    s_sim.add("trials", "number of events");
    s_sim.add("seed", "64-bit seed (required)");
    s_sim.add("cutoff", "Fock cutoff per mode (default automatic)");
    s_sim.add("out", "write raw (k,l) events as CSV");
    s_sim.add_flag("timing", "include elapsed time in the summary");
    s_orc.add("cutoff", "Fock cutoff per mode (default automatic)");
    s_mm.add("modes", "number of identical mode pairs");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (gamma->parsed()) return s_gamma.load_config(), cmd_gamma(s_gamma, out);
        if (thr->parsed()) return s_thr.load_config(), cmd_thresholds(s_thr, out);
        if (scan->parsed()) return s_scan.load_config(), cmd_scan(s_scan, out);
        if (sim->parsed()) return s_sim.load_config(), cmd_simulate(s_sim, out, err);
        if (orc->parsed()) return s_orc.load_config(), cmd_oracle(s_orc, out);
        if (mm->parsed()) return s_mm.load_config(), cmd_multimode(s_mm, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const TruncationError& e) {
        err << "numerical error: " << e.what() << " (defect " << format_number(e.defect()) << ")\n";
        return kNumerical;
    } catch (const NumericalFailure& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const InsufficientData& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    }
    err << "error: no subcommand\n";
    return kUsage;
}

} // namespace twinbeam::cli
