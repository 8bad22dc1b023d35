#include "nelp/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "nelp/text.hpp"

namespace nelp {

void RunConfig::validate() const {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (c_p <= 0 || c_n <= 0) throw std::invalid_argument("c_p and c_n must be > 0");
  if (c_b < 0) throw std::invalid_argument("c_b must be >= 0");
  sampling_config().validate();
  solver::KernelSpec{kernel, rbf_bandwidth}.validate();
  if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be > 0");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
  if (path_cap < 1) throw std::invalid_argument("path_cap must be >= 1");
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  if (!(random_rate >= 0 && random_rate <= 1)) throw std::invalid_argument("random_rate must lie in [0,1]");
  if (spath_lengths.empty()) throw std::invalid_argument("spath_lengths must not be empty");
  for (int l : spath_lengths)
    if (l < 1) throw std::invalid_argument("spath_lengths must be >= 1");
  if (!(missing_ratio >= 0)) throw std::invalid_argument("missing_ratio must be >= 0");
  if (cb_values.empty()) throw std::invalid_argument("cb_values must not be empty");
  for (double v : cb_values)
    if (!(v >= 0)) throw std::invalid_argument("cb_values must be >= 0");
  planted.validate();
}

solver::Hyperparameters RunConfig::hyperparameters() const { return {c_p, c_n, c_b, weight_mode}; }

sampling::SamplingConfig RunConfig::sampling_config() const {
  sampling::SamplingConfig s;
  s.closure_weight = closure_weight;
  s.positive_ratio = ps_ratio;
  s.seed = seed;
  s.weight_mode = weight_mode;
  return s;
}

namespace {

struct Key {
  const char* name;
  std::function<void(RunConfig&, std::string_view, const std::string&, std::size_t)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
std::vector<T> parse_list(std::string_view v, const std::string& src, std::size_t line) {
  std::vector<T> out;
  while (true) {
    auto comma = v.find(',');
    auto item = v.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if constexpr (std::is_same_v<T, int>)
      out.push_back(static_cast<int>(parse_int(item, src, line)));
    else
      out.push_back(parse_double(item, src, line));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
std::string format_list(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_same_v<T, int>)
      s += std::to_string(v[i]);
    else
      s += format_double(v[i]);
  }
  return s;
}

#define NELP_STRING(key, field)                                                                        \
  Key {                                                                                                \
    key, [](RunConfig& c, std::string_view v, const std::string&, std::size_t) { c.field = v; },      \
        [](const RunConfig& c) { return c.field; }                                                     \
  }
#define NELP_DOUBLE(key, field)                                                                                 \
  Key {                                                                                                         \
    key, [](RunConfig& c, std::string_view v, const std::string& s, std::size_t l) { c.field = parse_double(v, s, l); }, \
        [](const RunConfig& c) { return format_double(c.field); }                                               \
  }
#define NELP_INT(key, field, type)                                                                     \
  Key {                                                                                                \
    key,                                                                                               \
        [](RunConfig& c, std::string_view v, const std::string& s, std::size_t l) {                   \
          auto x = parse_int(v, s, l);                                                                 \
          if (x < 0 && !std::is_signed_v<type>) throw InputError(s, l, "value must be >= 0");         \
          c.field = static_cast<type>(x);                                                              \
        },                                                                                             \
        [](const RunConfig& c) { return std::to_string(c.field); }                                     \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      NELP_STRING("name", name),
      NELP_STRING("users", users),
      NELP_STRING("positive", positive),
      NELP_STRING("authorship", authorship),
      NELP_STRING("opinions", opinions),
      NELP_STRING("truth", truth),
      Key{"rating_threshold",
          [](RunConfig& c, std::string_view v, const std::string& s, std::size_t l) {
            if (v.empty())
              c.rating_threshold.reset();
            else
              c.rating_threshold = parse_int(v, s, l);
          },
          [](const RunConfig& c) { return c.rating_threshold ? std::to_string(*c.rating_threshold) : std::string(); }},
      Key{"seed",
          [](RunConfig& c, std::string_view v, const std::string& s, std::size_t l) {
            std::uint64_t x = 0;
            auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
              throw InputError(s, l, "seed must be a nonnegative integer");
            c.seed = x;
          },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      NELP_INT("threads", threads, unsigned),
      NELP_DOUBLE("c_p", c_p),
      NELP_DOUBLE("c_n", c_n),
      NELP_DOUBLE("c_b", c_b),
      NELP_DOUBLE("closure_weight", closure_weight),
      NELP_DOUBLE("ps_ratio", ps_ratio),
      Key{"weight_mode",
          [](RunConfig& c, std::string_view v, const std::string& s, std::size_t l) {
            if (v == "reliability")
              c.weight_mode = sampling::WeightMode::Reliability;
            else if (v == "uniform")
              c.weight_mode = sampling::WeightMode::Uniform;
            else
              throw InputError(s, l, "weight_mode must be reliability or uniform");
          },
          [](const RunConfig& c) {
            return std::string(c.weight_mode == sampling::WeightMode::Uniform ? "uniform" : "reliability");
          }},
      Key{"kernel",
          [](RunConfig& c, std::string_view v, const std::string& s, std::size_t l) {
            try {
              c.kernel = solver::kernel_from_string(v);
            } catch (const std::invalid_argument& e) {
              throw InputError(s, l, e.what());
            }
          },
          [](const RunConfig& c) { return std::string(solver::to_string(c.kernel)); }},
      NELP_DOUBLE("rbf_bandwidth", rbf_bandwidth),
      NELP_INT("max_unlabeled", max_unlabeled, std::size_t),
      NELP_DOUBLE("tolerance", tolerance),
      NELP_INT("max_sweeps", max_sweeps, std::size_t),
      NELP_INT("path_cap", path_cap, int),
      NELP_INT("k_max", k_max, int),
      NELP_INT("min_pairs_per_k", min_pairs_per_k, std::size_t),
      NELP_DOUBLE("random_rate", random_rate),
      Key{"spath_lengths",
          [](RunConfig& c, std::string_view v, const std::string& s, std::size_t l) {
            c.spath_lengths = parse_list<int>(v, s, l);
          },
          [](const RunConfig& c) { return format_list(c.spath_lengths); }},
      NELP_DOUBLE("missing_ratio", missing_ratio),
      Key{"cb_values",
          [](RunConfig& c, std::string_view v, const std::string& s, std::size_t l) {
            c.cb_values = parse_list<double>(v, s, l);
          },
          [](const RunConfig& c) { return format_list(c.cb_values); }},
      NELP_INT("planted.users", planted.users, std::int32_t),
      NELP_INT("planted.window", planted.window, std::int32_t),
      NELP_INT("planted.faction_run", planted.faction_run, std::int32_t),
      NELP_DOUBLE("planted.positive_density", planted.positive_density),
      NELP_DOUBLE("planted.negative_density", planted.negative_density),
      NELP_DOUBLE("planted.bridge_density", planted.bridge_density),
      NELP_DOUBLE("planted.shortcuts", planted.shortcuts),
      NELP_DOUBLE("planted.closure_probability", planted.closure_probability),
      NELP_DOUBLE("planted.balanced_fraction", planted.balanced_fraction),
      NELP_DOUBLE("planted.reciprocity", planted.reciprocity),
      NELP_DOUBLE("planted.status_noise", planted.status_noise),
      NELP_DOUBLE("planted.posts_mean", planted.posts_mean),
      NELP_DOUBLE("planted.dislike_probability", planted.dislike_probability),
      NELP_DOUBLE("planted.mild_dislike_probability", planted.mild_dislike_probability),
      NELP_DOUBLE("planted.like_probability", planted.like_probability),
      NELP_DOUBLE("planted.friend_dislike_probability", planted.friend_dislike_probability),
      NELP_DOUBLE("planted.background_dislikes", planted.background_dislikes),
      NELP_DOUBLE("planted.background_likes", planted.background_likes),
  };
  return table;
}

#undef NELP_STRING
#undef NELP_DOUBLE
#undef NELP_INT

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
  RunConfig c;
  std::vector<bool> seen(keys().size(), false);
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto end = text.find('\n');
    auto line = trim(text.substr(0, end));
    text.remove_prefix(end == std::string_view::npos ? text.size() : end + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InputError(source, line_no, "expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    std::size_t k = 0;
    while (k < keys().size() && key != keys()[k].name) ++k;
    if (k == keys().size()) throw InputError(source, line_no, "unknown key '" + std::string(key) + "'");
    if (seen[k]) throw InputError(source, line_no, "key '" + std::string(key) + "' given twice");
    seen[k] = true;
    keys()[k].set(c, value, source, line_no);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(source, 0, e.what());
  }
  return c;
}

std::string to_string(const RunConfig& config) {
  std::string out;
  for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(config) + "\n";
  return out;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_string(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nelp
