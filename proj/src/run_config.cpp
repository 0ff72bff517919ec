#include "diracbvp/run_config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "diracbvp/errors.hpp"
#include "diracbvp/io.hpp"

namespace diracbvp::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"seed", "output"}},
      {"torus", {"n", "period", "points"}},
      {"coefficient", {"family", "k", "seed", "kappa_floor", "scale", "matrix", "csv"}},
      {"problem",
       {"kind", "profile", "mode", "axis", "center", "width", "amplitude", "alpha_plus", "alpha_minus", "degree", "csv"}},
      {"campaign", {"id", "k", "points", "eps", "ratios", "families", "samples", "delta", "t", "tolerance"}},
      {"tolerances",
       {"cond_cap", "residual_tol", "hardy_tol", "invariance_tol", "kernel_tol", "eigenbasis_cond_limit", "oracle_tol"}},
  };
  return keys;
}

const std::set<std::string> kFamilies{"identity", "scaled_identity", "constant", "kkpt",
                                      "real_symmetric", "accretive", "block", "csv"};
const std::set<std::string> kProfiles{"mode", "gaussian", "step", "csv"};
const std::set<std::string> kCampaigns{"rellich", "block", "perturbation", "kkpt", "psi",
                                       "hodge", "duality", "offdiag", "sector"};

/// Line numbers of "section.key" entries, for errors raised after parsing.
std::map<std::string, int> index_lines(const std::string& text) {
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string line, section;
  for (int number = 1; std::getline(in, line); ++number) {
    boost::algorithm::trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = boost::algorithm::trim_copy(line.substr(1, line.size() - 2));
      lines.emplace(section, number);
      continue;
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos) lines.emplace(section + "." + boost::algorithm::trim_copy(line.substr(0, eq)), number);
  }
  return lines;
}

double parse_double(const std::string& s) {
  std::string t = boost::algorithm::trim_copy(s);
  if (t.size() > 1 && t[0] == '+') t.erase(0, 1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) throw std::invalid_argument("not a number: '" + t + "'");
  return v;
}

long long parse_integer(const std::string& s) {
  const std::string t = boost::algorithm::trim_copy(s);
  long long v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) throw std::invalid_argument("not an integer: '" + t + "'");
  return v;
}

/// "x", "yi", "x+yi" or "x-yi".
Complex parse_complex(const std::string& s) {
  std::string t;
  std::remove_copy_if(s.begin(), s.end(), std::back_inserter(t), [](unsigned char c) { return std::isspace(c); });
  if (t.empty()) throw std::invalid_argument("empty complex value");
  if (t.back() != 'i') return parse_double(t);
  t.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t i = 1; i < t.size(); ++i)
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') split = i;
  auto imag = [](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_double(part);
  };
  if (split == std::string::npos) return Complex(0.0, imag(t));
  return Complex(parse_double(t.substr(0, split)), imag(t.substr(split)));
}

std::vector<std::string> split_list(const std::string& s, const char* separators) {
  std::vector<std::string> parts;
  const std::string t = boost::algorithm::trim_copy(s);
  if (t.empty()) return parts;
  boost::algorithm::split(parts, t, boost::algorithm::is_any_of(separators), boost::algorithm::token_compress_on);
  for (auto& p : parts) boost::algorithm::trim(p);
  std::erase_if(parts, [](const std::string& p) { return p.empty(); });
  return parts;
}

std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return io::format_number(c.real());
  return fmt::format("{}{}{}i", io::format_number(c.real()), c.imag() < 0.0 ? "-" : "+", io::format_number(std::abs(c.imag())));
}

template <class T>
std::string join(const std::vector<T>& values, const char* sep, auto&& format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? sep : "") + format(values[i]);
  return out;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::map<std::string, int> lines) : tree_(tree), lines_(std::move(lines)) {}

  void check_known() const {
    for (const auto& [section, body] : tree_) {
      const auto it = known_keys().find(section);
      if (it == known_keys().end()) throw ConfigError(fmt::format("unknown section [{}]", section), line(section));
      if (!body.data().empty()) throw ConfigError(fmt::format("key '{}' outside any section", section), line(section));
      for (const auto& [key, value] : body)
        if (!it->second.contains(key))
          throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section), line(section + "." + key));
    }
  }

  std::optional<std::string> raw(const std::string& path) const {
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'));
    if (!v) return std::nullopt;
    return boost::algorithm::trim_copy(*v);
  }

  template <class F>
  auto convert(const std::string& path, F&& f) const -> std::optional<decltype(f(std::string()))> {
    const auto v = raw(path);
    if (!v) return std::nullopt;
    try {
      return f(*v);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("{}: {}", path, e.what()), line(path));
    }
  }

  void fail(const std::string& path, const std::string& message) const {
    throw ConfigError(fmt::format("{}: {}", path, message), line(path));
  }

  int line(const std::string& path) const {
    const auto it = lines_.find(path);
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  const pt::ptree& tree_;
  std::map<std::string, int> lines_;
};

template <class T>
void read_into(const Reader& r, const std::string& path, T& target, auto&& f) {
  if (auto v = r.convert(path, f)) target = *v;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split_list(s, ",")) out.push_back(parse_double(p));
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), static_cast<int>(e.line()));
  }
  const Reader r(tree, index_lines(text));
  r.check_known();

  RunConfig c;
  const auto as_double = [](const std::string& s) { return parse_double(s); };
  const auto as_int = [](const std::string& s) { return static_cast<int>(parse_integer(s)); };
  const auto as_text = [](const std::string& s) { return s; };

  read_into(r, "run.seed", c.seed, [](const std::string& s) {
    const long long v = parse_integer(s);
    if (v < 0) throw std::invalid_argument("seed must be non-negative");
    return static_cast<std::uint64_t>(v);
  });
  read_into(r, "run.output", c.output, [](const std::string& s) { return std::filesystem::path(s); });

  read_into(r, "torus.n", c.torus.n, as_int);
  if (c.torus.n != 1 && c.torus.n != 2) r.fail("torus.n", "must be 1 or 2");
  read_into(r, "torus.period", c.torus.period, as_double);
  if (!(c.torus.period > 0.0)) r.fail("torus.period", "must be positive");
  read_into(r, "torus.points", c.torus.points, as_int);
  if (c.torus.points < 8 || (c.torus.points & (c.torus.points - 1)) != 0)
    r.fail("torus.points", "must be a power of two >= 8");

  auto& co = c.coefficient;
  read_into(r, "coefficient.family", co.family, as_text);
  if (!kFamilies.contains(co.family)) r.fail("coefficient.family", "unknown family '" + co.family + "'");
  read_into(r, "coefficient.k", co.k, as_double);
  if (auto v = r.convert("coefficient.seed", [](const std::string& s) { return parse_integer(s); })) {
    if (*v < 0) r.fail("coefficient.seed", "must be non-negative");
    co.seed = static_cast<std::uint64_t>(*v);
  }
  read_into(r, "coefficient.kappa_floor", co.kappa_floor, as_double);
  read_into(r, "coefficient.scale", co.scale, [](const std::string& s) { return parse_complex(s); });
  read_into(r, "coefficient.matrix", co.matrix, [](const std::string& s) {
    std::vector<Complex> entries;
    for (const auto& row : split_list(s, ";"))
      for (const auto& e : split_list(row, ", \t")) entries.push_back(parse_complex(e));
    return entries;
  });
  read_into(r, "coefficient.csv", co.csv, [](const std::string& s) { return std::filesystem::path(s); });
  const auto side = static_cast<std::size_t>(c.torus.n + 1);
  if (co.family == "constant" && co.matrix.size() != side * side)
    r.fail("coefficient.matrix", fmt::format("constant family needs {} entries", side * side));
  if (co.family == "kkpt" && c.torus.n != 1) r.fail("coefficient.family", "kkpt needs n = 1");
  if (co.family == "csv" && co.csv.empty()) r.fail("coefficient.csv", "csv family needs a file");

  auto& pr = c.problem;
  if (auto v = r.convert("problem.kind", [](const std::string& s) { return parse_bvp_kind(s); })) pr.kind = *v;
  read_into(r, "problem.profile", pr.profile, as_text);
  if (!pr.profile.empty() && !kProfiles.contains(pr.profile)) r.fail("problem.profile", "unknown profile '" + pr.profile + "'");
  read_into(r, "problem.mode", pr.mode, as_int);
  read_into(r, "problem.axis", pr.axis, as_int);
  if (pr.axis < 0 || pr.axis >= c.torus.n) r.fail("problem.axis", "out of range");
  if (auto v = r.convert("problem.center", as_double)) pr.center = *v;
  read_into(r, "problem.width", pr.width, as_double);
  if (!(pr.width > 0.0)) r.fail("problem.width", "must be positive");
  read_into(r, "problem.amplitude", pr.amplitude, as_double);
  read_into(r, "problem.alpha_plus", pr.alpha_plus, [](const std::string& s) { return parse_complex(s); });
  read_into(r, "problem.alpha_minus", pr.alpha_minus, [](const std::string& s) { return parse_complex(s); });
  read_into(r, "problem.degree", pr.degree, as_int);
  read_into(r, "problem.csv", pr.csv, [](const std::string& s) { return std::filesystem::path(s); });
  if (pr.profile == "csv" && pr.csv.empty()) r.fail("problem.csv", "csv profile needs a file");

  auto& ca = c.campaign;
  read_into(r, "campaign.id", ca.id, as_text);
  if (!ca.id.empty() && !kCampaigns.contains(ca.id)) r.fail("campaign.id", "unknown campaign '" + ca.id + "'");
  read_into(r, "campaign.k", ca.k, to_doubles);
  read_into(r, "campaign.points", ca.points, [](const std::string& s) {
    std::vector<int> out;
    for (const auto& p : split_list(s, ",")) out.push_back(static_cast<int>(parse_integer(p)));
    return out;
  });
  read_into(r, "campaign.eps", ca.eps, to_doubles);
  read_into(r, "campaign.ratios", ca.ratios, to_doubles);
  read_into(r, "campaign.families", ca.families, [](const std::string& s) { return split_list(s, ","); });
  read_into(r, "campaign.samples", ca.samples, as_int);
  read_into(r, "campaign.delta", ca.delta, as_double);
  read_into(r, "campaign.t", ca.t, as_double);
  if (auto v = r.convert("campaign.tolerance", as_double)) ca.tolerance = *v;
  // The grid axis each campaign sweeps; an empty one is a config error.
  const std::map<std::string, std::pair<std::string, std::size_t>> sweeps{
      {"kkpt", {"k", std::min(ca.k.size(), ca.points.size())}},
      {"perturbation", {"eps", ca.eps.size()}},
      {"offdiag", {"ratios", ca.ratios.size()}},
      {"sector", {"families", ca.families.size()}},
      {"rellich", {"samples", static_cast<std::size_t>(std::max(ca.samples, 0))}},
  };
  if (const auto it = sweeps.find(ca.id); it != sweeps.end() && it->second.second == 0) {
    const std::string key = ca.id == "kkpt" && !ca.k.empty() ? "points" : it->second.first;
    r.fail("campaign." + key, "empty campaign grid");
  }
  for (const auto& f : ca.families)
    if (!kFamilies.contains(f) || f == "csv" || f == "constant") r.fail("campaign.families", "unsupported family '" + f + "'");

  auto& tol = c.tolerances;
  read_into(r, "tolerances.cond_cap", tol.cond_cap, as_double);
  read_into(r, "tolerances.residual_tol", tol.residual_tol, as_double);
  read_into(r, "tolerances.hardy_tol", tol.hardy_tol, as_double);
  read_into(r, "tolerances.invariance_tol", tol.invariance_tol, as_double);
  read_into(r, "tolerances.kernel_tol", tol.decomposition.kernel_tol, as_double);
  read_into(r, "tolerances.eigenbasis_cond_limit", tol.decomposition.cond_limit, as_double);
  read_into(r, "tolerances.oracle_tol", c.oracle_tolerance, as_double);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string RunConfig::to_text() const {
  const auto num = [](double v) { return io::format_number(v); };
  std::string out;
  out += fmt::format("[run]\nseed = {}\noutput = {}\n\n", seed, output.string());
  out += fmt::format("[torus]\nn = {}\nperiod = {}\npoints = {}\n\n", torus.n, num(torus.period), torus.points);
  out += fmt::format("[coefficient]\nfamily = {}\nk = {}\nseed = {}\nkappa_floor = {}\nscale = {}\n", coefficient.family,
                     num(coefficient.k), coefficient_seed(), num(coefficient.kappa_floor), format_complex(coefficient.scale));
  if (!coefficient.matrix.empty()) {
    const auto side = static_cast<std::size_t>(torus.n + 1);
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < side; ++i)
      rows.push_back(join(std::vector<Complex>(coefficient.matrix.begin() + static_cast<long>(i * side),
                                               coefficient.matrix.begin() + static_cast<long>((i + 1) * side)),
                          " ", format_complex));
    out += "matrix = " + join(rows, " ; ", [](const std::string& s) { return s; }) + "\n";
  }
  if (!coefficient.csv.empty()) out += "csv = " + coefficient.csv.string() + "\n";
  out += "\n[problem]\n";
  if (problem.kind) out += "kind = " + to_string(*problem.kind) + "\n";
  if (!problem.profile.empty()) out += "profile = " + problem.profile + "\n";
  out += fmt::format("mode = {}\naxis = {}\ncenter = {}\nwidth = {}\namplitude = {}\nalpha_plus = {}\nalpha_minus = {}\ndegree = {}\n",
                     problem.mode, problem.axis, num(problem.center.value_or(torus.period / 2.0)), num(problem.width),
                     num(problem.amplitude), format_complex(problem.alpha_plus), format_complex(problem.alpha_minus),
                     problem.degree);
  if (!problem.csv.empty()) out += "csv = " + problem.csv.string() + "\n";
  out += "\n[campaign]\n";
  if (!campaign.id.empty()) out += "id = " + campaign.id + "\n";
  out += fmt::format("k = {}\npoints = {}\neps = {}\nratios = {}\nfamilies = {}\nsamples = {}\ndelta = {}\nt = {}\n",
                     join(campaign.k, ", ", num), join(campaign.points, ", ", [](int p) { return std::to_string(p); }),
                     join(campaign.eps, ", ", num), join(campaign.ratios, ", ", num),
                     join(campaign.families, ", ", [](const std::string& s) { return s; }), campaign.samples,
                     num(campaign.delta), num(campaign.t));
  if (campaign.tolerance) out += "tolerance = " + num(*campaign.tolerance) + "\n";
  out += fmt::format(
      "\n[tolerances]\ncond_cap = {}\nresidual_tol = {}\nhardy_tol = {}\ninvariance_tol = {}\nkernel_tol = {}\n"
      "eigenbasis_cond_limit = {}\noracle_tol = {}\n",
      num(tolerances.cond_cap), num(tolerances.residual_tol), num(tolerances.hardy_tol), num(tolerances.invariance_tol),
      num(tolerances.decomposition.kernel_tol), num(tolerances.decomposition.cond_limit), num(oracle_tolerance));
  return out;
}

}  // namespace diracbvp::cli
