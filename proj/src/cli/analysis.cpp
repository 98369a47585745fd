#include "rcourt/cli/analysis.hpp"

#include "rcourt/cli/runner.hpp"
#include "rcourt/errors.hpp"

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rcourt::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string pct(double fraction) { return fmt::format("{:.1f}", 100.0 * fraction); }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::optional<nlohmann::json> read_manifest(const fs::path& run_dir) {
  auto path = run_dir / kManifestFile;
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

// Display width: UTF-8 continuation bytes do not advance the cursor.
std::size_t cells(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

// Columns padded to their widest cell.
std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cells(row[i]));
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (i > 0) line += "  ";
      line += rows[r][i];
      if (i + 1 < rows[r].size()) line += std::string(width[i] - cells(rows[r][i]), ' ');
    }
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    }
  }
  return out;
}

nlohmann::json bucket_json(const BucketStats& b) {
  return {{"bucket", to_string(b.bucket)},
          {"title", bucket_title(b.bucket)},
          {"count", b.count},
          {"judge_correct", b.judge_correct},
          {"accuracy_percent", percent_1dp(b.judge_correct, b.count)}};
}

std::string digest_of(const fs::path& run_dir) {
  auto manifest = read_manifest(run_dir);
  return manifest ? manifest->value("config_digest", std::string()) : std::string();
}

}  // namespace

std::vector<fs::path> expand_run_dirs(const fs::path& dir) {
  if (fs::exists(dir / kRecordsFile)) return {dir};
  std::vector<std::pair<int, fs::path>> runs;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      auto name = entry.path().filename().string();
      if (!entry.is_directory() || name.rfind("run-", 0) != 0) continue;
      try {
        runs.emplace_back(std::stoi(name.substr(4)), entry.path());
      } catch (const std::exception&) {
      }
    }
  }
  if (runs.empty()) throw Error("no record log under " + dir.string());
  std::sort(runs.begin(), runs.end());
  std::vector<fs::path> out;
  for (auto& [i, p] : runs) out.push_back(p);
  return out;
}

std::vector<RunRecord> load_scored_records(const fs::path& run_dir) {
  auto records = read_records(run_dir / kRecordsFile);
  for (auto& r : records) {
    if (r.failed()) {
      r.em = 0.0;
      r.f1 = 0.0;
      continue;
    }
    r.em = exact_match(r.final_answer, r.gold);
    r.f1 = f1_score(r.final_answer, r.gold);
  }
  return records;
}

std::vector<Aggregate> cmd_score(const fs::path& run_dir) {
  std::vector<Aggregate> out;
  for (const auto& dir : expand_run_dirs(run_dir)) {
    auto records = load_scored_records(dir);
    auto agg = aggregate(records);
    nlohmann::json doc = {{"config_digest", digest_of(dir)},
                          {"normalizer", kNormalizerId},
                          {"groups", nlohmann::json::array()}};
    std::string csv = "strategy,dataset,n,failed,em,f1,mean_calls,mean_time_seconds\n";
    for (const auto& m : agg.metrics) {
      doc["groups"].push_back({{"strategy", m.strategy},
                               {"dataset", to_string(m.dataset)},
                               {"n", m.n},
                               {"failed", m.failed},
                               {"em", m.em_mean},
                               {"f1", m.f1_mean},
                               {"mean_calls", m.mean_calls},
                               {"mean_time_seconds", m.mean_time_seconds}});
      csv += fmt::format("{},{},{},{},{:.6f},{:.6f},{:.4f},{:.4f}\n", csv_field(m.strategy),
                         to_string(m.dataset), m.n, m.failed, m.em_mean, m.f1_mean, m.mean_calls,
                         m.mean_time_seconds);
    }
    write_text(dir / "metrics.json", doc.dump(2) + "\n");
    write_text(dir / "metrics.csv", csv);
    out.push_back(std::move(agg));
  }
  return out;
}

std::vector<Aggregate> cmd_analyze(const fs::path& run_dir) {
  std::vector<Aggregate> out;
  for (const auto& dir : expand_run_dirs(run_dir)) {
    auto records = load_scored_records(dir);
    auto agg = aggregate(records);
    nlohmann::json doc = {{"config_digest", digest_of(dir)}, {"groups", nlohmann::json::array()}};
    std::string csv = "strategy,dataset,bucket,count,judge_correct,accuracy_percent\n";
    std::string text;
    for (const auto& j : agg.judged) {
      nlohmann::json buckets = nlohmann::json::array();
      std::vector<std::vector<std::string>> rows{{"Scenario", "Count", "Judge correct", "Accuracy"}};
      for (const auto& b : j.buckets) {
        buckets.push_back(bucket_json(b));
        csv += fmt::format("{},{},{},{},{},{:.1f}\n", csv_field(j.strategy), to_string(j.dataset),
                           to_string(b.bucket), b.count, b.judge_correct,
                           percent_1dp(b.judge_correct, b.count));
        rows.push_back({std::string(bucket_title(b.bucket)), std::to_string(b.count),
                        std::to_string(b.judge_correct),
                        fmt::format("{:.1f}%", percent_1dp(b.judge_correct, b.count))});
      }
      doc["groups"].push_back({{"strategy", j.strategy},
                               {"dataset", to_string(j.dataset)},
                               {"judged_n", j.n},
                               {"judged_em", j.em_mean},
                               {"judged_f1", j.f1_mean},
                               {"buckets", buckets}});
      text += fmt::format("{} on {}: {} judged questions, EM {} F1 {}\n\n", j.strategy,
                          to_string(j.dataset), j.n, pct(j.em_mean), pct(j.f1_mean));
      text += aligned(rows) + "\n";
    }
    write_text(dir / "analysis.json", doc.dump(2) + "\n");
    write_text(dir / "scenarios.csv", csv);
    write_text(dir / "analysis.txt", text);
    out.push_back(std::move(agg));
  }
  return out;
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::vector<ReportRow> collect_report(const std::vector<fs::path>& run_dirs) {
  struct Acc {
    ReportRow row;
    std::vector<double> em, f1, calls, time, judged_em;
  };
  std::vector<std::pair<std::string, Dataset>> order;
  std::map<std::pair<std::string, Dataset>, Acc> groups;

  for (const auto& given : run_dirs) {
    for (const auto& dir : expand_run_dirs(given)) {
      auto manifest = read_manifest(dir);
      auto records = load_scored_records(dir);
      auto agg = aggregate(records);
      for (std::size_t g = 0; g < agg.metrics.size(); ++g) {
        const auto& m = agg.metrics[g];
        const auto& j = agg.judged[g];
        int k = 0;
        std::string label = m.strategy;
        if (manifest) {
          const auto& params = (*manifest)["config"]["strategy_params"];
          if (m.strategy == "rc") k = params.value("rc_agents", 2);
          if (m.strategy == "rc_k") {
            k = params.value("k", 3);
            label = fmt::format("rc_k(k={})", k);
          }
        } else if (m.strategy == "rc") {
          k = 2;
        }
        auto key = std::make_pair(label, m.dataset);
        auto [it, inserted] = groups.try_emplace(key);
        auto& acc = it->second;
        if (inserted) {
          order.push_back(key);
          acc.row.label = label;
          acc.row.strategy = m.strategy;
          acc.row.dataset = m.dataset;
          acc.row.k = k;
          acc.row.n = m.n;
          acc.row.buckets = j.buckets;
        } else {
          for (const auto& b : j.buckets) {
            auto pos = std::find_if(acc.row.buckets.begin(), acc.row.buckets.end(),
                                    [&](const BucketStats& s) { return s.bucket == b.bucket; });
            if (pos == acc.row.buckets.end()) {
              acc.row.buckets.push_back(b);
            } else {
              pos->count += b.count;
              pos->judge_correct += b.judge_correct;
            }
          }
        }
        ++acc.row.runs;
        acc.row.judged_n += j.n;
        acc.em.push_back(m.em_mean);
        acc.f1.push_back(m.f1_mean);
        acc.calls.push_back(m.mean_calls);
        acc.time.push_back(m.mean_time_seconds);
        acc.judged_em.push_back(j.em_mean);
        acc.row.config_digests.push_back(manifest ? manifest->value("config_digest", std::string())
                                                  : std::string());
      }
    }
  }

  std::vector<ReportRow> rows;
  for (const auto& key : order) {
    auto& acc = groups[key];
    std::tie(acc.row.em_mean, acc.row.em_std) = mean_and_std(acc.em);
    std::tie(acc.row.f1_mean, acc.row.f1_std) = mean_and_std(acc.f1);
    acc.row.mean_calls = mean_and_std(acc.calls).first;
    acc.row.mean_time_seconds = mean_and_std(acc.time).first;
    acc.row.judged_em = mean_and_std(acc.judged_em).first;
    rows.push_back(acc.row);
  }
  return rows;
}

namespace {

std::string diversity_svg(Dataset dataset, const std::vector<const ReportRow*>& points) {
  const double w = 480, h = 320, left = 56, right = 24, top = 36, bottom = 48;
  int kmin = points.front()->k, kmax = points.back()->k;
  if (kmin == kmax) {
    --kmin;
    ++kmax;
  }
  auto x = [&](int k) { return left + (w - left - right) * (k - kmin) / double(kmax - kmin); };
  auto y = [&](double v) { return top + (h - top - bottom) * (1.0 - v); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n",
      w, h);
  svg += fmt::format("<text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}: score vs number of agents</text>\n",
                     w / 2, to_string(dataset));
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left,
                     h - bottom, w - right);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", left, top,
                     h - bottom);
  for (int tick = 0; tick <= 100; tick += 20) {
    svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6,
                       y(tick / 100.0) + 4, tick);
  }
  for (int k = kmin; k <= kmax; ++k) {
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x(k),
                       h - bottom + 18, k);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">k</text>\n", (left + w - right) / 2,
                     h - 8);

  struct Series {
    const char* name;
    const char* color;
    double ReportRow::*field;
  };
  int legend = 0;
  for (const auto& s : {Series{"EM", "#1f77b4", &ReportRow::em_mean}, Series{"F1", "#d62728", &ReportRow::f1_mean}}) {
    std::string pts;
    for (const auto* p : points) pts += fmt::format("{:.1f},{:.1f} ", x(p->k), y(p->*s.field));
    svg += fmt::format("<polyline class=\"series\" data-metric=\"{}\" fill=\"none\" stroke=\"{}\" "
                       "stroke-width=\"2\" points=\"{}\"/>\n",
                       s.name, s.color, pts);
    for (const auto* p : points) {
      svg += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", x(p->k),
                         y(p->*s.field), s.color);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", w - right - 40,
                       top + 14 + 16 * legend++, s.color, s.name);
  }
  return svg + "</svg>\n";
}

}  // namespace

std::vector<ReportRow> cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out_dir) {
  auto rows = collect_report(run_dirs);
  fs::create_directories(out_dir);

  std::vector<Dataset> datasets;
  for (const auto& r : rows) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
  }
  std::sort(datasets.begin(), datasets.end());
  std::vector<std::string> labels;
  for (const auto& r : rows) {
    if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) labels.push_back(r.label);
  }
  auto find_row = [&](const std::string& label, Dataset d) -> const ReportRow* {
    for (const auto& r : rows) {
      if (r.label == label && r.dataset == d) return &r;
    }
    return nullptr;
  };

  // Strategy-by-dataset comparison, mean ± sample std over runs, in percent.
  std::string csv = "strategy,dataset,runs,n,em_mean,em_std,f1_mean,f1_std\n";
  for (const auto& r : rows) {
    csv += fmt::format("{},{},{},{},{:.2f},{:.2f},{:.2f},{:.2f}\n", csv_field(r.label), to_string(r.dataset),
                       r.runs, r.n, 100 * r.em_mean, 100 * r.em_std, 100 * r.f1_mean, 100 * r.f1_std);
  }
  write_text(out_dir / "table1.csv", csv);

  std::vector<std::vector<std::string>> table{{"Strategy"}};
  for (auto d : datasets) {
    table[0].push_back(fmt::format("{} EM", to_string(d)));
    table[0].push_back(fmt::format("{} F1", to_string(d)));
  }
  for (const auto& label : labels) {
    std::vector<std::string> line{label};
    for (auto d : datasets) {
      const auto* r = find_row(label, d);
      if (!r) {
        line.insert(line.end(), {"-", "-"});
        continue;
      }
      line.push_back(fmt::format("{:.1f} ± {:.1f}", 100 * r->em_mean, 100 * r->em_std));
      line.push_back(fmt::format("{:.1f} ± {:.1f}", 100 * r->f1_mean, 100 * r->f1_std));
    }
    table.push_back(std::move(line));
  }
  write_text(out_dir / "table1.txt", aligned(table));

  std::string judged = "strategy,dataset,judged_n,judged_em\n";
  std::string scenarios = "strategy,dataset,bucket,count,judge_correct,accuracy_percent\n";
  for (const auto& r : rows) {
    if (r.judged_n == 0) continue;
    judged += fmt::format("{},{},{},{:.2f}\n", csv_field(r.label), to_string(r.dataset), r.judged_n,
                          100 * r.judged_em);
    for (const auto& b : r.buckets) {
      scenarios += fmt::format("{},{},{},{},{},{:.1f}\n", csv_field(r.label), to_string(r.dataset),
                               to_string(b.bucket), b.count, b.judge_correct,
                               percent_1dp(b.judge_correct, b.count));
    }
  }
  write_text(out_dir / "judged.csv", judged);
  write_text(out_dir / "scenarios.csv", scenarios);

  std::string eff = "strategy,dataset,mean_calls,mean_time_seconds\n";
  for (const auto& r : rows) {
    eff += fmt::format("{},{},{:.3f},{:.3f}\n", csv_field(r.label), to_string(r.dataset), r.mean_calls,
                       r.mean_time_seconds);
  }
  write_text(out_dir / "efficiency.csv", eff);

  std::string div = "dataset,k,strategy,em_mean,f1_mean\n";
  for (auto d : datasets) {
    std::vector<const ReportRow*> points;
    for (const auto& r : rows) {
      if (r.dataset == d && r.k > 0) points.push_back(&r);
    }
    if (points.empty()) continue;
    std::stable_sort(points.begin(), points.end(),
                     [](const ReportRow* a, const ReportRow* b) { return a->k < b->k; });
    for (const auto* p : points) {
      div += fmt::format("{},{},{},{:.2f},{:.2f}\n", to_string(d), p->k, csv_field(p->label),
                         100 * p->em_mean, 100 * p->f1_mean);
    }
    write_text(out_dir / fmt::format("diversity_{}.svg", to_string(d)), diversity_svg(d, points));
  }
  write_text(out_dir / "diversity.csv", div);

  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json buckets = nlohmann::json::array();
    for (const auto& b : r.buckets) buckets.push_back(bucket_json(b));
    doc.push_back({{"label", r.label},
                   {"strategy", r.strategy},
                   {"dataset", to_string(r.dataset)},
                   {"k", r.k},
                   {"runs", r.runs},
                   {"n", r.n},
                   {"em_mean", r.em_mean},
                   {"em_std", r.em_std},
                   {"f1_mean", r.f1_mean},
                   {"f1_std", r.f1_std},
                   {"mean_calls", r.mean_calls},
                   {"mean_time_seconds", r.mean_time_seconds},
                   {"judged_n", r.judged_n},
                   {"judged_em", r.judged_em},
                   {"buckets", buckets},
                   {"config_digests", r.config_digests}});
  }
  write_text(out_dir / "report.json", doc.dump(2) + "\n");
  return rows;
}

}  // namespace rcourt::cli
