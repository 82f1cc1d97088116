#ifndef TWINBEAM_TOOLS_APP_HPP_
#define TWINBEAM_TOOLS_APP_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twinbeam/core.hpp"

namespace twinbeam::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kNumerical = 2,
    kIo = 3,
};

/// 12 significant digits, C locale, '.' separator; NaN becomes `nan_text`.
std::string format_number(double value, std::string_view nan_text = "null");

/// `value` as it appears in emitted files: the double nearest to its
/// 12-digit rendering.
double rounded(double value);

/// Either a single value "x" or an inclusive grid "start:stop:step".
struct Range {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    static Range parse(std::string_view text);
    std::size_t size() const;
    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
};

struct ScanSpec {
    Range mu1, mu2, muk;
    double tau = 1.0;
    int n_modes = 1;
    std::size_t max_points = 10'000'000;
};

struct ScanRow {
    double mu1 = 0, mu2 = 0, muk = 0;
    GammaReport gammas;
};

/// Rows in lexicographic (mu1, mu2, muk) order.
std::vector<ScanRow> run_scan(const ScanSpec& spec);

inline constexpr std::string_view kScanHeader = "mu1,mu2,muk,gamma_c,gamma_n,gamma_e,region";

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

/// Parses a scan CSV back; empty gamma fields become NaN. The region column
/// is returned as written.
struct ParsedScanRow {
    double mu1 = 0, mu2 = 0, muk = 0;
    double gamma_c, gamma_n, gamma_e;
    std::string region;
};
std::vector<ParsedScanRow> read_scan_csv(std::istream& is);

/// Key/value settings from a config file: JSON object or `key = value` lines.
std::map<std::string, std::string> parse_config(std::string_view text);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace twinbeam::cli

#endif // TWINBEAM_TOOLS_APP_HPP_
