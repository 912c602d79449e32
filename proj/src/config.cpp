#include <relbeam/config.hpp>

#include <algorithm>
#include <initializer_list>
#include <utility>

#include <relbeam/errors.hpp>

namespace relbeam {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

json parse_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // The parser's message already carries line and column.
    throw ConfigError(e.what());
  }
  if (!root.is_object()) fail("config", "expected a JSON object");
  return root;
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&](const char* key) { return item.key() == key; });
    if (!known) fail(path, "unknown key \"" + item.key() + "\"");
  }
}

const json& require_field(const json& obj, const std::string& path,
                          const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    fail(path, "missing required key \"" + std::string(key) + "\"");
  }
  return *it;
}

const json* find_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::uint64_t get_u64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) fail(path, "expected a nonnegative integer");
  fail(path, "expected an integer");
}

double get_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

ExperimentKind get_experiment(const json& v, const std::string& path) {
  const auto kind = experiment_from_name(get_string(v, path));
  if (!kind) fail(path, "expected one of \"E1\" through \"E5\"");
  return *kind;
}

/// The single key naming the object's source, e.g. "weights" or "generator".
std::string sole_source(const json& obj, const std::string& path,
                        std::initializer_list<const char*> sources) {
  require_keys(obj, path, sources);
  std::string found;
  for (const char* key : sources) {
    if (!obj.contains(key)) continue;
    if (!found.empty()) {
      fail(path, "give exactly one of \"" + found + "\" and \"" + key + "\"");
    }
    found = key;
  }
  if (found.empty()) {
    std::string names;
    for (const char* key : sources) {
      if (!names.empty()) names += ", ";
      names += '"';
      names += key;
      names += '"';
    }
    fail(path, "give exactly one of " + names);
  }
  return found;
}

struct GeneratorParams {
  std::size_t dim = 0;
  std::size_t rank = 0;
  std::uint64_t seed = 0;
};

GeneratorParams parse_generator(const json& node, const std::string& path,
                              bool with_rank) {
  if (!node.is_object()) fail(path, "expected an object");
  GeneratorParams params;
  if (with_rank) {
    require_keys(node, path, {"dim", "rank", "seed"});
    params.rank = get_u64(require_field(node, path, "rank"), path + ".rank");
  } else {
    require_keys(node, path, {"dim", "seed"});
  }
  params.dim = get_u64(require_field(node, path, "dim"), path + ".dim");
  params.seed = get_u64(require_field(node, path, "seed"), path + ".seed");
  if (params.dim < 1) fail(path + ".dim", "dimension must be at least 1");
  return params;
}

ClassicalState parse_classical_state(const json& node,
                                     const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  const std::string source = sole_source(node, path, {"weights", "generator"});
  if (source == "weights") {
    const json& arr = node["weights"];
    const std::string wpath = path + ".weights";
    if (!arr.is_array() || arr.empty()) {
      fail(wpath, "expected a nonempty array of numbers");
    }
    std::vector<double> weights;
    weights.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      weights.push_back(
          get_double(arr[i], wpath + "[" + std::to_string(i) + "]"));
    }
    try {
      return ClassicalState(std::move(weights));
    } catch (const Error& e) {
      fail(wpath, e.what());
    }
  }
  const GeneratorParams params =
      parse_generator(node["generator"], path + ".generator", false);
  RandomSource rng(params.seed);
  return draw_classical_state(params.dim, rng);
}

Event parse_event(const json& node, const std::string& path,
                  std::size_t state_dim) {
  if (!node.is_object()) fail(path, "expected an object");
  const std::string source = sole_source(node, path, {"set", "generator"});
  if (source == "set") {
    const json& arr = node["set"];
    const std::string spath = path + ".set";
    if (!arr.is_array()) fail(spath, "expected an array of outcome indices");
    std::vector<std::size_t> members;
    members.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      members.push_back(
          get_u64(arr[i], spath + "[" + std::to_string(i) + "]"));
    }
    try {
      return Event::from_members(state_dim, members);
    } catch (const Error& e) {
      fail(spath, e.what());
    }
  }
  const GeneratorParams params =
      parse_generator(node["generator"], path + ".generator", false);
  if (params.dim != state_dim) {
    fail(path + ".generator.dim",
         "dimension " + std::to_string(params.dim) +
             " does not match the state dimension " +
             std::to_string(state_dim));
  }
  RandomSource rng(params.seed);
  return draw_event(params.dim, rng);
}

CMatrix parse_cmatrix(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) {
    fail(path, "expected a nonempty array of rows");
  }
  const std::size_t rows = node.size();
  const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = node[i];
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != cols || cols == 0) {
      fail(rpath, "expected a row of " + std::to_string(cols) +
                      " [re, im] entries");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      const json& entry = row[j];
      const std::string epath = rpath + "[" + std::to_string(j) + "]";
      if (!entry.is_array() || entry.size() != 2) {
        fail(epath, "expected a [re, im] pair");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Complex(get_double(entry[0], epath + "[0]"),
                  get_double(entry[1], epath + "[1]"));
    }
  }
  return m;
}

DensityMatrix parse_density(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  const std::string source = sole_source(node, path, {"matrix", "generator"});
  if (source == "matrix") {
    try {
      return DensityMatrix(parse_cmatrix(node["matrix"], path + ".matrix"));
    } catch (const Error& e) {
      fail(path + ".matrix", e.what());
    }
  }
  const GeneratorParams params =
      parse_generator(node["generator"], path + ".generator", true);
  RandomSource rng(params.seed);
  try {
    return random_density(static_cast<Eigen::Index>(params.dim),
                          static_cast<Eigen::Index>(params.rank), rng);
  } catch (const Error& e) {
    fail(path + ".generator", e.what());
  }
}

Projector parse_projector(const json& node, const std::string& path,
                          std::size_t state_dim) {
  if (!node.is_object()) fail(path, "expected an object");
  const std::string source = sole_source(node, path, {"matrix", "generator"});
  if (source == "matrix") {
    Projector p = [&] {
      try {
        return Projector(parse_cmatrix(node["matrix"], path + ".matrix"));
      } catch (const Error& e) {
        fail(path + ".matrix", e.what());
      }
    }();
    if (static_cast<std::size_t>(p.dim()) != state_dim) {
      fail(path + ".matrix", "dimension " + std::to_string(p.dim()) +
                                 " does not match the state dimension " +
                                 std::to_string(state_dim));
    }
    return p;
  }
  const GeneratorParams params =
      parse_generator(node["generator"], path + ".generator", true);
  if (params.dim != state_dim) {
    fail(path + ".generator.dim",
         "dimension " + std::to_string(params.dim) +
             " does not match the state dimension " +
             std::to_string(state_dim));
  }
  RandomSource rng(params.seed);
  try {
    return random_projector(static_cast<Eigen::Index>(params.dim),
                            static_cast<Eigen::Index>(params.rank), rng);
  } catch (const Error& e) {
    fail(path + ".generator", e.what());
  }
}

std::uint64_t resolve_seed(const json& obj, const std::string& path,
                           std::optional<std::uint64_t> seed_override) {
  if (seed_override) return *seed_override;
  if (const json* v = find_field(obj, "seed")) {
    return get_u64(*v, path + ".seed");
  }
  fail(path, "a seed is required (config key \"seed\" or the --seed flag)");
}

}  // namespace

Instance parse_instance(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  require_keys(node, path, {"model", "state", "x", "r"});
  const auto model = model_from_name(
      get_string(require_field(node, path, "model"), path + ".model"));
  if (!model) fail(path + ".model", "expected \"classical\" or \"quantum\"");

  const json& state_node = require_field(node, path, "state");
  const json& x_node = require_field(node, path, "x");
  const json& r_node = require_field(node, path, "r");
  if (*model == ModelKind::Classical) {
    ClassicalState state = parse_classical_state(state_node, path + ".state");
    const std::size_t dim = state.dim();
    Event x = parse_event(x_node, path + ".x", dim);
    Event r = parse_event(r_node, path + ".r", dim);
    return ClassicalTriple{std::move(state), std::move(x), std::move(r)};
  }
  DensityMatrix rho = parse_density(state_node, path + ".state");
  const auto dim = static_cast<std::size_t>(rho.dim());
  Projector x = parse_projector(x_node, path + ".x", dim);
  Projector r = parse_projector(r_node, path + ".r", dim);
  return QuantumTriple{std::move(rho), std::move(x), std::move(r)};
}

ExactConfig parse_exact_config(const std::string& text) {
  const json root = parse_text(text);
  // The extra keys are the ones a violation report carries, so a report file
  // can be fed back verbatim; anything else is still rejected.
  require_keys(root, "config",
               {"instance", "command", "dim", "budget", "seed", "evaluated",
                "residual", "note"});
  return ExactConfig{
      parse_instance(require_field(root, "config", "instance"), "instance")};
}

SimulateConfig parse_simulate_config(
    const std::string& text, std::optional<std::uint64_t> seed_override) {
  const json root = parse_text(text);
  require_keys(root, "config",
               {"instance", "experiment", "n", "seed", "emission_cap"});
  SimulateConfig config{
      parse_instance(require_field(root, "config", "instance"), "instance"),
      get_experiment(require_field(root, "config", "experiment"),
                     "experiment"),
      get_u64(require_field(root, "config", "n"), "n"),
      resolve_seed(root, "config", seed_override),
      RunOptions{}.emission_cap};
  if (config.n < 1) fail("n", "at least one recorded particle is required");
  if (const json* v = find_field(root, "emission_cap")) {
    config.emission_cap = get_u64(*v, "emission_cap");
    if (config.emission_cap < 1) fail("emission_cap", "must be at least 1");
  }
  return config;
}

ScanConfig parse_scan_config(const std::string& text,
                             std::optional<std::uint64_t> seed_override) {
  const json root = parse_text(text);
  require_keys(root, "config", {"model", "dims", "trials", "band", "seed"});
  ScanConfig config;
  const auto model = model_from_name(
      get_string(require_field(root, "config", "model"), "model"));
  if (!model) fail("model", "expected \"classical\" or \"quantum\"");
  config.model = *model;

  const json& dims = require_field(root, "config", "dims");
  if (!dims.is_array() || dims.empty()) {
    fail("dims", "expected a nonempty array of dimensions");
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const std::string dpath = "dims[" + std::to_string(i) + "]";
    const std::uint64_t d = get_u64(dims[i], dpath);
    if (d < 1) fail(dpath, "dimension must be at least 1");
    config.dims.push_back(d);
  }
  config.trials = get_u64(require_field(root, "config", "trials"), "trials");
  if (config.trials < 1) fail("trials", "at least one trial is required");
  if (const json* v = find_field(root, "band")) {
    config.band = get_double(*v, "band");
    if (config.band < 0) fail("band", "must be nonnegative");
  }
  config.seed = resolve_seed(root, "config", seed_override);
  return config;
}

ViolateConfig parse_violate_config(const std::string& text,
                                   std::optional<std::uint64_t> seed_override) {
  const json root = parse_text(text);
  require_keys(root, "config",
               {"dim", "budget", "seed", "rho_rank", "x_rank", "r_rank",
                "diagonal_only"});
  ViolateConfig config;
  config.dim = get_u64(require_field(root, "config", "dim"), "dim");
  if (config.dim < 1) fail("dim", "dimension must be at least 1");
  config.budget = get_u64(require_field(root, "config", "budget"), "budget");
  if (config.budget < 1) fail("budget", "at least one draw is required");
  config.seed = resolve_seed(root, "config", seed_override);
  if (const json* v = find_field(root, "rho_rank")) {
    config.options.rho_rank = get_u64(*v, "rho_rank");
  }
  if (const json* v = find_field(root, "x_rank")) {
    config.options.x_rank = get_u64(*v, "x_rank");
  }
  if (const json* v = find_field(root, "r_rank")) {
    config.options.r_rank = get_u64(*v, "r_rank");
  }
  if (const json* v = find_field(root, "diagonal_only")) {
    config.options.diagonal_only = get_bool(*v, "diagonal_only");
  }
  const auto check_rank = [&](std::size_t rank, const char* name) {
    if (rank > config.dim) {
      fail(name, "rank " + std::to_string(rank) +
                     " exceeds the dimension " + std::to_string(config.dim));
    }
  };
  check_rank(config.options.rho_rank, "rho_rank");
  check_rank(config.options.x_rank, "x_rank");
  check_rank(config.options.r_rank, "r_rank");
  return config;
}

ConvergenceConfig parse_convergence_config(
    const std::string& text, std::optional<std::uint64_t> seed_override) {
  const json root = parse_text(text);
  require_keys(root, "config", {"instance", "experiment", "n_list", "seed"});
  ConvergenceConfig config{
      parse_instance(require_field(root, "config", "instance"), "instance"),
      get_experiment(require_field(root, "config", "experiment"),
                     "experiment"),
      {},
      resolve_seed(root, "config", seed_override)};
  const json& ns = require_field(root, "config", "n_list");
  if (!ns.is_array() || ns.empty()) {
    fail("n_list", "expected a nonempty array of run lengths");
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const std::string npath = "n_list[" + std::to_string(i) + "]";
    const std::uint64_t n = get_u64(ns[i], npath);
    if (n < 1) fail(npath, "run length must be at least 1");
    config.n_list.push_back(n);
  }
  return config;
}

}  // namespace relbeam
