#include <relbeam/report.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <relbeam/errors.hpp>

namespace relbeam {

namespace {

using nlohmann::json;

json cmatrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json event_to_json(const Event& e) {
  json members = json::array();
  for (std::size_t m : e.members()) members.push_back(m);
  return json{{"set", std::move(members)}};
}

template <class T>
json or_null(const std::optional<T>& v) {
  if (v) return *v;
  return nullptr;
}

std::string_view mode_name(ApplianceMode mode) {
  switch (mode) {
    case ApplianceMode::Record:
      return "record";
    case ApplianceMode::Select:
      return "select";
    case ApplianceMode::Block:
      return "block";
  }
  return "?";
}

/// Full-precision decimal for CSV cells; JSON gets the shorter round-trip
/// form from the serializer itself.
std::string csv_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

json instance_to_json(const Instance& instance) {
  if (const auto* t = std::get_if<ClassicalTriple>(&instance)) {
    return json{{"model", "classical"},
                {"state", {{"weights", t->state.weights()}}},
                {"x", event_to_json(t->x)},
                {"r", event_to_json(t->r)}};
  }
  const auto& t = std::get<QuantumTriple>(instance);
  return json{{"model", "quantum"},
              {"state", {{"matrix", cmatrix_to_json(t.rho.matrix())}}},
              {"x", {{"matrix", cmatrix_to_json(t.x.matrix())}}},
              {"r", {{"matrix", cmatrix_to_json(t.r.matrix())}}}};
}

json exact_json(const Instance& instance, const ExactReport& report) {
  json reasons = json::object();
  for (const auto& [field, why] : report.reasons) reasons[field] = why;
  return json{{"command", "exact"},
              {"model", model_name(instance_is_classical(instance)
                                       ? ModelKind::Classical
                                       : ModelKind::Quantum)},
              {"dim", instance_dim(instance)},
              {"r", or_null(report.r)},
              {"p", or_null(report.p)},
              {"q", or_null(report.q)},
              {"x", or_null(report.x)},
              {"boost", or_null(report.boost)},
              {"natural", or_null(report.natural)},
              {"ltp_residual", or_null(report.ltp_residual)},
              {"reasons", std::move(reasons)}};
}

json simulate_json(const SimulateConfig& config, const FrequencyTable& table,
                   const Estimates& estimates) {
  json stages = json::array();
  for (std::size_t s = 0; s < table.stages.size(); ++s) {
    stages.push_back(json{{"label", table.layout[s].label},
                          {"mode", mode_name(table.layout[s].mode)},
                          {"entered", table.stages[s].entered},
                          {"clicked", table.stages[s].clicked},
                          {"forwarded", table.stages[s].forwarded}});
  }
  json paths = json::object();
  for (const auto& [path, count] : table.paths) paths[path] = count;

  json fields = json::object();
  const auto add = [&](const char* name,
                       const std::optional<EstimateEntry>& entry) {
    if (!entry) return;
    json cell{{"value", entry->value},
              {"std_error", entry->std_error},
              {"numer", entry->numer},
              {"denom", entry->denom}};
    try {
      const double exact =
          exact_estimate(*experiment_for_field(name), config.instance);
      cell["exact"] = exact;
      cell["abs_error"] = std::abs(entry->value - exact);
      cell["within_5se"] =
          std::abs(entry->value - exact) <= 5.0 * entry->std_error;
    } catch (const Error& e) {
      cell["exact"] = nullptr;
      cell["exact_reason"] = e.what();
    }
    fields[name] = std::move(cell);
  };
  add("r", estimates.r);
  add("p", estimates.p);
  add("q", estimates.q);
  add("x", estimates.x);
  add("px", estimates.px);

  return json{{"command", "simulate"},
              {"experiment", experiment_name(config.kind)},
              {"model", model_name(instance_is_classical(config.instance)
                                       ? ModelKind::Classical
                                       : ModelKind::Quantum)},
              {"dim", instance_dim(config.instance)},
              {"n", config.n},
              {"seed", config.seed},
              {"counts",
               {{"recorded", table.recorded},
                {"emitted", table.emitted},
                {"stages", std::move(stages)},
                {"paths", std::move(paths)}}},
              {"estimates", std::move(fields)}};
}

json scan_json(const ScanReport& report) {
  json dims = json::array();
  for (const DimScan& cell : report.dims) {
    json reasons = json::object();
    for (const auto& [why, count] : cell.skip_reasons) reasons[why] = count;
    dims.push_back(json{{"dim", cell.dim},
                        {"agree", cell.agree},
                        {"tie", cell.tie},
                        {"disagree", cell.disagree},
                        {"skipped", cell.skipped},
                        {"skip_reasons", std::move(reasons)},
                        {"worst_tie_gap", cell.worst_tie_gap}});
  }
  return json{{"command", "scan"},
              {"model", model_name(report.model)},
              {"trials", report.trials},
              {"seed", report.seed},
              {"band", report.band},
              {"dims", std::move(dims)},
              {"total_disagree", report.total_disagree()}};
}

std::string scan_csv(const ScanReport& report) {
  std::ostringstream out;
  out << "dim,agree,tie,disagree,skipped,worst_tie_gap\n";
  for (const DimScan& cell : report.dims) {
    out << cell.dim << ',' << cell.agree << ',' << cell.tie << ','
        << cell.disagree << ',' << cell.skipped << ','
        << csv_double(cell.worst_tie_gap) << '\n';
  }
  return out.str();
}

json violate_json(const ViolationReport& report) {
  json instance = nullptr;
  if (report.instance) {
    instance = instance_to_json(Instance(*report.instance));
  }
  return json{{"command", "violate"},
              {"dim", report.dim},
              {"budget", report.budget},
              {"seed", report.seed},
              {"evaluated", report.evaluated},
              {"residual", report.residual},
              {"note", report.note},
              {"instance", std::move(instance)}};
}

json convergence_json(const ConvergenceTable& table) {
  json rows = json::array();
  for (const ConvergenceRow& row : table.rows) {
    rows.push_back(json{{"n", row.n},
                        {"estimate", row.estimate},
                        {"std_error", row.std_error},
                        {"exact", row.exact},
                        {"abs_error", row.abs_error},
                        {"within_5se", row.within_band}});
  }
  return json{{"command", "convergence"},
              {"experiment", experiment_name(table.kind)},
              {"field", table.field},
              {"seed", table.seed},
              {"rows", std::move(rows)}};
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "n,estimate,std_error,exact,abs_error,within_5se\n";
  for (const ConvergenceRow& row : table.rows) {
    out << row.n << ',' << csv_double(row.estimate) << ','
        << csv_double(row.std_error) << ',' << csv_double(row.exact) << ','
        << csv_double(row.abs_error) << ',' << (row.within_band ? 1 : 0)
        << '\n';
  }
  return out.str();
}

std::string render_json(const json& value) { return value.dump(2) + "\n"; }

void write_output(const std::optional<std::string>& path,
                  std::string_view text) {
  if (!path) {
    std::cout << text << std::flush;
    return;
  }
  const std::filesystem::path target(*path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error("failed while writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    throw Error("cannot move " + tmp.string() + " into place: " +
                ec.message());
  }
}

}  // namespace relbeam
