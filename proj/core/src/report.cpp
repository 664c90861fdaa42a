#include "cdf/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include <json.hpp>

namespace cdf {

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string episodes_csv(const std::vector<const ModeSummary*>& summaries) {
  std::string out =
      "seed,scenario_label,predicted_label,alarm_time,collision,min_gap,"
      "mode,termination,termination_time,final_p_left,anomalous\n";
  for (const ModeSummary* s : summaries) {
    for (const EpisodeResult& r : s->results) {
      out += std::to_string(r.seed);
      out += ',';
      out += to_string(r.scenario_label);
      out += ',';
      out += to_string(r.predicted_label);
      out += ',';
      if (r.alarm_time) out += format_g9(*r.alarm_time);
      out += ',';
      out += r.collision ? '1' : '0';
      out += ',';
      out += format_g9(r.min_gap);
      out += ',';
      out += to_string(r.mode);
      out += ',';
      out += r.termination;
      out += ',';
      out += format_g9(r.termination_time);
      out += ',';
      out += format_g9(r.final_p_left);
      out += ',';
      out += r.anomalous ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

std::string confusion_csv(const std::vector<const ModeSummary*>& summaries) {
  std::string out = "mode,scenario,pred_cutoff,pred_yield,pred_right\n";
  static const char* labels[3] = {"cutoff", "yield", "right"};
  for (const ModeSummary* s : summaries) {
    for (int row = 0; row < 3; ++row) {
      out += to_string(s->mode);
      out += ',';
      out += labels[row];
      for (int col = 0; col < 3; ++col) {
        out += ',';
        out += std::to_string(s->confusion[static_cast<std::size_t>(row)]
                                          [static_cast<std::size_t>(col)]);
      }
      out += '\n';
    }
  }
  return out;
}

PairedComparison pair_modes(const ModeSummary& cdf, const ModeSummary& reactive) {
  PairedComparison pc;
  const std::size_t n = std::min(cdf.results.size(), reactive.results.size());
  pc.episodes = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const EpisodeResult& a = cdf.results[i];
    const EpisodeResult& b = reactive.results[i];
    if (a.scenario_label != ScenarioLabel::Cutoff) continue;
    ++pc.cutoffs;
    const bool ca = !a.collision;
    const bool cb = !b.collision;
    if (ca) ++pc.cdf_avoided;
    if (cb) ++pc.reactive_avoided;
    if (ca && cb) ++pc.both_avoided;
    if (ca && !cb) ++pc.cdf_only;
    if (!ca && cb) ++pc.reactive_only;
    if (!ca && !cb) ++pc.neither;
  }
  return pc;
}

std::string summary_json(const std::vector<const ModeSummary*>& summaries,
                         const std::optional<PairedComparison>& paired) {
  nlohmann::ordered_json root;
  static const char* labels[3] = {"cutoff", "yield", "right"};
  nlohmann::ordered_json modes = nlohmann::ordered_json::object();
  for (const ModeSummary* s : summaries) {
    nlohmann::ordered_json m;
    m["episodes"] = s->episodes;
    nlohmann::ordered_json conf = nlohmann::ordered_json::object();
    for (int row = 0; row < 3; ++row) {
      nlohmann::ordered_json line = nlohmann::ordered_json::object();
      for (int col = 0; col < 3; ++col) {
        line[labels[col]] = s->confusion[static_cast<std::size_t>(row)]
                                        [static_cast<std::size_t>(col)];
      }
      conf[labels[row]] = line;
    }
    m["confusion"] = conf;
    m["collisions_imminent"] = s->collisions_imminent;
    m["collisions_occurred"] = s->collisions_occurred;
    m["percent_avoided"] = std::llround(percent_avoided(*s));
    m["avoided_fraction"] =
        s->collisions_imminent == 0
            ? 1.0
            : 1.0 - static_cast<double>(s->collisions_occurred) /
                        static_cast<double>(s->collisions_imminent);
    m["anomalous"] = s->anomalous;
    modes[to_string(s->mode)] = m;
  }
  root["modes"] = modes;
  if (paired) {
    nlohmann::ordered_json p;
    p["episodes"] = paired->episodes;
    p["cutoffs"] = paired->cutoffs;
    p["cdf_avoided"] = paired->cdf_avoided;
    p["reactive_avoided"] = paired->reactive_avoided;
    p["both_avoided"] = paired->both_avoided;
    p["cdf_only"] = paired->cdf_only;
    p["reactive_only"] = paired->reactive_only;
    p["neither"] = paired->neither;
    root["paired"] = p;
  }
  return root.dump(2) + "\n";
}

std::string manifest_json(const Config& cfg, const std::vector<std::string>& modes,
                          const std::string& out_dir,
                          const std::vector<std::string>& outputs,
                          const std::string& created_utc,
                          const std::optional<std::string>& finished_utc) {
  nlohmann::ordered_json root;
  root["artifact"] = "cdfsim";
  root["artifact_version"] = "0.1.0";
  root["created_utc"] = created_utc;
  if (finished_utc) {
    root["finished_utc"] = *finished_utc;
  } else {
    root["finished_utc"] = nullptr;
  }
  root["seed"] = cfg.seed;
  root["episodes"] = cfg.episodes;
  root["modes"] = modes;
  root["out_dir"] = out_dir;
  root["outputs"] = outputs;
  root["config_text"] = serialize_config(cfg);
  return root.dump(2) + "\n";
}

std::string trace_csv(const EpisodeResult& episode) {
  std::string out =
      "t,obstacle_x,obstacle_y,obstacle_theta,obstacle_v,"
      "ego_x,ego_y,ego_theta,ego_v,observed,"
      "believed_x,believed_y,believed_theta,believed_v,"
      "obstacle_accel,obstacle_steer,ego_accel,ego_steer,"
      "yield_state,p_left,p_right,p_imminent,braking,gap\n";
  for (const TraceRow& r : episode.trace) {
    out += format_g9(r.t);
    for (const VehiclePose* p : {&r.obstacle, &r.ego}) {
      out += ',';
      out += format_g9(p->x);
      out += ',';
      out += format_g9(p->y);
      out += ',';
      out += format_g9(p->theta);
      out += ',';
      out += format_g9(p->v);
    }
    out += ',';
    out += r.observed ? '1' : '0';
    if (r.believed) {
      out += ',';
      out += format_g9(r.believed->x);
      out += ',';
      out += format_g9(r.believed->y);
      out += ',';
      out += format_g9(r.believed->theta);
      out += ',';
      out += format_g9(r.believed->v);
    } else {
      out += ",,,,";
    }
    out += ',';
    out += format_g9(r.obstacle_u.accel);
    out += ',';
    out += format_g9(r.obstacle_u.steer);
    out += ',';
    out += format_g9(r.ego_u.accel);
    out += ',';
    out += format_g9(r.ego_u.steer);
    out += ',';
    out += to_string(r.yield_state);
    out += ',';
    out += format_g9(r.p_left);
    out += ',';
    out += format_g9(r.p_right);
    out += ',';
    out += format_g9(r.p_imminent);
    out += ',';
    out += r.braking ? '1' : '0';
    out += ',';
    out += format_g9(r.gap);
    out += '\n';
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace cdf
