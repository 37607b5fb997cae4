//
// Copyright 2026 The purdest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// JSON and CSV encodings of ExperimentReport.
//
// JSON output is canonical: keys in a fixed order, two-space indentation, and
// every floating-point value printed with 17 significant digits in lowercase
// scientific notation, so equal reports always produce equal bytes.

#ifndef PURDEST_REPORT_IO_HPP_
#define PURDEST_REPORT_IO_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "purdest/errors.hpp"
#include "purdest/harness.hpp"

namespace purdest {

inline constexpr std::string_view kCsvHeader =
    "trial,seed,tv_exact,tv_upper,success,rounds,truncations,wall_ms";

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

namespace internal {

class JsonWriter {
 public:
  std::string str() const { return out_.str(); }

  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(std::string_view k) {
    separator();
    out_ << quote(k) << ": ";
    after_key_ = true;
  }

  void value(double v) { scalar(format_double(v)); }
  void value(std::uint64_t v) { scalar(std::to_string(v)); }
  void value(bool v) { scalar(v ? "true" : "false"); }
  void value(std::string_view v) { scalar(quote(v)); }
  void value(const char* v) { value(std::string_view(v)); }
  void null() { scalar("null"); }

  template <class T>
  void field(std::string_view k, const T& v) {
    key(k);
    value(v);
  }

  void number_array(const std::vector<double>& values) {
    begin_array();
    for (double v : values) value(v);
    end_array();
  }

 private:
  struct Level {
    bool first = true;
  };

  static std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
          } else {
            out += c;
          }
      }
    }
    return out + "\"";
  }

  void separator() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (stack_.empty()) return;
    if (!stack_.back().first) out_ << ',';
    stack_.back().first = false;
    out_ << '\n' << std::string(2 * stack_.size(), ' ');
  }

  void scalar(const std::string& text) {
    separator();
    out_ << text;
  }

  void open(char c) {
    separator();
    out_ << c;
    stack_.push_back({});
  }

  void close(char c) {
    const bool empty = stack_.back().first;
    stack_.pop_back();
    if (!empty) out_ << '\n' << std::string(2 * stack_.size(), ' ');
    out_ << c;
  }

  std::ostringstream out_;
  std::vector<Level> stack_;
  bool after_key_ = false;
};

inline std::uint64_t u64(std::size_t v) { return static_cast<std::uint64_t>(v); }

}  // namespace internal

inline std::string to_json(const ExperimentReport& report) {
  internal::JsonWriter w;
  const auto& c = report.config;
  w.begin_object();

  w.key("config");
  w.begin_object();
  w.field("d", internal::u64(c.d));
  w.field("epsilon", c.epsilon);
  w.field("alpha", c.alpha);
  w.field("beta", c.beta);
  w.field("c_scale", c.c_scale);
  w.field("c_alpha", c.c_alpha);
  w.field("learner", c.learner);
  w.field("flip", c.flip_preprocess);
  w.field("seed", c.seed);
  w.field("profile", report.profile);
  w.field("trials", internal::u64(report.trials_requested));
  w.end_object();

  w.key("params");
  w.begin_object();
  w.field("R", internal::u64(report.params.R));
  w.field("m", internal::u64(report.params.m));
  w.field("m0", internal::u64(report.params.m0));
  w.field("m1", internal::u64(report.params.m1));
  w.field("n_total", internal::u64(report.params.n_total));
  w.field("m_flip", internal::u64(report.params.m_flip));
  w.end_object();

  w.key("p");
  w.number_array(report.p);
  w.field("tv_kind", report.tv_kind);

  w.key("trials");
  w.begin_array();
  for (const auto& t : report.trials) {
    w.begin_object();
    w.field("trial", internal::u64(t.trial));
    w.field("seed", t.seed);
    w.key("tv_exact");
    if (t.tv_exact) {
      w.value(*t.tv_exact);
    } else {
      w.null();
    }
    w.field("tv_upper", t.tv_upper);
    w.field("success", t.success);
    w.field("rounds", internal::u64(t.rounds));
    w.field("truncations", internal::u64(t.truncations));
    w.field("wall_ms", t.wall_ms);
    w.key("q");
    w.number_array(t.q);
    w.end_object();
  }
  w.end_array();

  w.key("aggregate");
  w.begin_object();
  w.field("success_rate", report.aggregate.success_rate);
  w.field("mean_tv", report.aggregate.mean_tv);
  w.field("median_tv", report.aggregate.median_tv);
  w.end_object();

  w.key("audit_trail");
  w.begin_array();
  for (const auto& a : report.audit_trail) {
    w.begin_object();
    w.field("trial", internal::u64(a.trial));
    w.field("block", a.record.block);
    w.field("mechanism", a.record.mechanism);
    w.field("sensitivity", a.record.sensitivity);
    w.field("epsilon", a.record.epsilon);
    w.field("scale", a.record.scale);
    w.end_object();
  }
  w.end_array();

  w.key("warnings");
  w.begin_array();
  for (const auto& s : report.warnings) w.value(s);
  w.end_array();

  w.end_object();
  return w.str() + "\n";
}

inline ExperimentReport from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ReportIoError(std::string("malformed report JSON: ") + e.what());
  }
  for (const char* k : {"config", "params", "trials", "aggregate", "audit_trail"}) {
    if (!j.contains(k)) throw ReportIoError(std::string("report lacks key ") + k);
  }
  ExperimentReport r;
  try {
    const auto& c = j.at("config");
    r.config.d = c.at("d").get<std::size_t>();
    r.config.epsilon = c.at("epsilon").get<double>();
    r.config.alpha = c.at("alpha").get<double>();
    r.config.beta = c.at("beta").get<double>();
    r.config.c_scale = c.at("c_scale").get<double>();
    r.config.c_alpha = c.at("c_alpha").get<double>();
    r.config.learner = c.at("learner").get<std::string>();
    r.config.flip_preprocess = c.at("flip").get<bool>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    r.profile = c.at("profile").get<std::string>();
    r.trials_requested = c.at("trials").get<std::size_t>();

    const auto& p = j.at("params");
    r.params.R = p.at("R").get<std::size_t>();
    r.params.m = p.at("m").get<std::size_t>();
    r.params.m0 = p.at("m0").get<std::size_t>();
    r.params.m1 = p.at("m1").get<std::size_t>();
    r.params.n_total = p.at("n_total").get<std::size_t>();
    r.params.m_flip = p.value("m_flip", std::size_t{0});

    r.p = j.value("p", std::vector<double>{});
    r.tv_kind = j.value("tv_kind", std::string(kTvExact));

    for (const auto& t : j.at("trials")) {
      TrialRecord rec;
      rec.trial = t.at("trial").get<std::size_t>();
      rec.seed = t.at("seed").get<std::uint64_t>();
      if (!t.at("tv_exact").is_null()) rec.tv_exact = t.at("tv_exact").get<double>();
      rec.tv_upper = t.at("tv_upper").get<double>();
      rec.success = t.at("success").get<bool>();
      rec.rounds = t.at("rounds").get<std::size_t>();
      rec.truncations = t.at("truncations").get<std::size_t>();
      rec.wall_ms = t.at("wall_ms").get<double>();
      rec.q = t.value("q", std::vector<double>{});
      r.trials.push_back(std::move(rec));
    }

    const auto& a = j.at("aggregate");
    r.aggregate.success_rate = a.at("success_rate").get<double>();
    r.aggregate.mean_tv = a.at("mean_tv").get<double>();
    r.aggregate.median_tv = a.at("median_tv").get<double>();

    for (const auto& e : j.at("audit_trail")) {
      TrialAudit ta;
      ta.trial = e.value("trial", std::size_t{0});
      ta.record.block = e.at("block").get<std::string>();
      ta.record.mechanism = e.value("mechanism", std::string(kLaplaceMechanism));
      ta.record.sensitivity = e.at("sensitivity").get<double>();
      ta.record.epsilon = e.at("epsilon").get<double>();
      ta.record.scale = e.at("scale").get<double>();
      r.audit_trail.push_back(std::move(ta));
    }
    r.warnings = j.value("warnings", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ReportIoError(std::string("report JSON has wrong shape: ") + e.what());
  }
  return r;
}

inline std::string to_csv(const ExperimentReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& t : report.trials) {
    out += std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',';
    if (t.tv_exact) out += format_double(*t.tv_exact);
    out += ',' + format_double(t.tv_upper) + ',' +
           (t.success ? "true" : "false") + ',' + std::to_string(t.rounds) +
           ',' + std::to_string(t.truncations) + ',' +
           format_double(t.wall_ms) + '\n';
  }
  return out;
}

// Trial rows of a CSV report. Only the CSV columns are populated.
inline std::vector<TrialRecord> trials_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ReportIoError("CSV header mismatch");
  }
  std::vector<TrialRecord> trials;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cols.push_back(cell);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() != 8) throw ReportIoError("CSV row has wrong arity: " + line);
    try {
      TrialRecord t;
      t.trial = std::stoull(cols[0]);
      t.seed = std::stoull(cols[1]);
      if (!cols[2].empty()) t.tv_exact = std::stod(cols[2]);
      t.tv_upper = std::stod(cols[3]);
      if (cols[4] != "true" && cols[4] != "false") {
        throw ReportIoError("CSV success flag must be true or false");
      }
      t.success = cols[4] == "true";
      t.rounds = std::stoull(cols[5]);
      t.truncations = std::stoull(cols[6]);
      t.wall_ms = std::stod(cols[7]);
      trials.push_back(std::move(t));
    } catch (const std::logic_error&) {
      throw ReportIoError("unparseable CSV row: " + line);
    }
  }
  return trials;
}

enum class ReportFormat { kJson, kCsv };

inline ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw InvalidConfig("unknown report format '" + name + "' (json|csv)");
}

inline void emit_report(const ExperimentReport& report, ReportFormat format,
                        const std::string& path) {
  const std::string body =
      format == ReportFormat::kJson ? to_json(report) : to_csv(report);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportIoError("cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw ReportIoError("write to '" + path + "' failed");
}

}  // namespace purdest

#endif  // PURDEST_REPORT_IO_HPP_
