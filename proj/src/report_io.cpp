#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "sdg/driver.hpp"

namespace sdg {

namespace {

std::string fp17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_moments_csv(const std::string& path, const MomentFields& fields) {
  std::ofstream out = open_or_throw(path);
  out << "x,y,mean,variance\n";
  for (int i = 0; i < fields.mean.size(); ++i) {
    out << fp17(fields.nodes[i].x()) << ',' << fp17(fields.nodes[i].y()) << ','
        << fp17(fields.mean[i]) << ',' << fp17(fields.variance[i]) << '\n';
  }
}

void write_report_json(const std::string& path, const std::vector<SolveReport>& reports,
                       const std::vector<std::string>& labels) {
  nlohmann::json arr = nlohmann::json::array();
  for (size_t i = 0; i < reports.size(); ++i) {
    const SolveReport& r = reports[i];
    nlohmann::json obj;
    if (i < labels.size()) obj["label"] = labels[i];
    obj["iterations"] = r.iterations;
    obj["final_rank"] = r.final_rank;
    obj["relative_residual"] = r.relative_residual;
    obj["wall_seconds"] = r.wall_seconds;
    obj["memory_kb"] = r.memory_kb;
    obj["termination"] = termination_name(r.reason);
    arr.push_back(std::move(obj));
  }
  std::ofstream out = open_or_throw(path);
  out << arr.dump(2) << '\n';
}

void write_history_csv(const std::string& path, const std::vector<SolveReport>& reports) {
  std::ofstream out = open_or_throw(path);
  out << "step,iteration,relative_residual,rank\n";
  for (size_t s = 0; s < reports.size(); ++s) {
    for (size_t k = 0; k < reports[s].history.size(); ++k) {
      out << s << ',' << (k + 1) << ',' << fp17(reports[s].history[k].residual) << ','
          << reports[s].history[k].rank << '\n';
    }
  }
}

}  // namespace sdg
