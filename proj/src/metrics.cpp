#include "ifrl/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

#include "ifrl/error.hpp"

namespace ifrl {

namespace {

void check_rankings(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::kValidation, "rankings differ in length (" + std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) fail(ErrorKind::kValidation, "rankings need at least 2 items");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      fail(ErrorKind::kValidation, "rankings contain non-finite values");
    }
  }
}

// Pairs tied within runs of equal values in a sorted sequence.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    It run = first;
    std::int64_t len = 0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++len;
    }
    total += len * (len - 1) / 2;
    first = run;
  }
  return total;
}

// Merge sort on .second, counting inversions (strictly greater before smaller).
std::int64_t sort_counting_swaps(std::vector<std::pair<double, double>>& v,
                                 std::vector<std::pair<double, double>>& buf, std::size_t lo,
                                 std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_counting_swaps(v, buf, lo, mid) + sort_counting_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j].second < v[i].second) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double kendall_tau(std::span<const double> rank_a, std::span<const double> rank_b) {
  check_rankings(rank_a, rank_b);
  const std::size_t n = rank_a.size();
  std::vector<std::pair<double, double>> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {rank_a[i], rank_b[i]};
  std::sort(v.begin(), v.end());

  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 = tied_pairs(v.begin(), v.end(), [](auto& x, auto& y) { return x.first == y.first; });
  const std::int64_t n3 = tied_pairs(v.begin(), v.end(), [](auto& x, auto& y) { return x == y; });
  std::vector<std::pair<double, double>> buf(n);
  const std::int64_t swaps = sort_counting_swaps(v, buf, 0, n);
  const std::int64_t n2 = tied_pairs(v.begin(), v.end(), [](auto& x, auto& y) { return x.second == y.second; });

  const std::int64_t denom_a = n0 - n1;
  const std::int64_t denom_b = n0 - n2;
  if (denom_a == 0 || denom_b == 0) return 0.0;
  // concordant - discordant = n0 - n1 - n2 + n3 - 2 * swaps
  const std::int64_t s = n0 - n1 - n2 + n3 - 2 * swaps;
  return static_cast<double>(s) /
         std::sqrt(static_cast<double>(denom_a) * static_cast<double>(denom_b));
}

double position_consistency(std::span<const double> rank_a, std::span<const double> rank_b) {
  check_rankings(rank_a, rank_b);
  const std::size_t n = rank_a.size();
  if (std::set<double>(rank_a.begin(), rank_a.end()).size() != n) {
    fail(ErrorKind::kValidation, "position_consistency: rank_a must be tie-free");
  }
  // Doubled credit keeps the accumulator integral.
  std::int64_t credit2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = rank_a[i] - rank_a[j];
      const double db = rank_b[i] - rank_b[j];
      if (db == 0.0) {
        credit2 += 1;
      } else if ((da < 0) == (db < 0)) {
        credit2 += 2;
      }
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(credit2) / (2.0 * pairs);
}

std::vector<double> ranks_descending(std::span<const double> scores) {
  std::vector<double> ranks(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::size_t better = 0;
    for (double s : scores) better += s > scores[i] ? 1 : 0;
    ranks[i] = static_cast<double>(better + 1);
  }
  return ranks;
}

void validate(const PreferenceGroup& group) {
  const std::string where = "preference group '" + group.id + "': ";
  if (group.constraints.empty()) fail(ErrorKind::kValidation, where + "empty constraint set");
  std::set<std::string> ids;
  for (const auto& c : group.constraints) {
    validate(c);
    if (!ids.insert(c.id).second) fail(ErrorKind::kValidation, where + "duplicate constraint id '" + c.id + "'");
  }
  if (group.responses.size() != kPreferenceGroupSize) {
    fail(ErrorKind::kValidation, where + "expected " + std::to_string(kPreferenceGroupSize) +
                                     " responses, got " + std::to_string(group.responses.size()));
  }
  std::vector<int> ranks;
  for (const auto& r : group.responses) ranks.push_back(r.human_rank);
  std::sort(ranks.begin(), ranks.end());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] != static_cast<int>(i + 1)) {
      fail(ErrorKind::kValidation, where + "human_rank values must be a permutation of 1.." +
                                       std::to_string(ranks.size()));
    }
  }
}

nlohmann::json to_json(const PreferenceGroup& group) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : group.constraints) cs.push_back(to_json(c));
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : group.responses) rs.push_back({{"text", r.text}, {"human_rank", r.human_rank}});
  return {{"id", group.id}, {"constraints", cs}, {"responses", rs}};
}

PreferenceGroup preference_group_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kValidation, "group: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "id" && key != "constraints" && key != "responses") {
      fail(ErrorKind::kValidation, "group." + key + ": unknown field");
    }
  }
  PreferenceGroup g;
  if (!j.contains("id") || !j["id"].is_string()) fail(ErrorKind::kValidation, "group.id: expected a string");
  g.id = j["id"].get<std::string>();
  if (!j.contains("constraints") || !j["constraints"].is_array()) {
    fail(ErrorKind::kValidation, "group.constraints: expected an array");
  }
  for (std::size_t i = 0; i < j["constraints"].size(); ++i) {
    g.constraints.push_back(constraint_from_json(j["constraints"][i], "group.constraints[" + std::to_string(i) + "]"));
  }
  if (!j.contains("responses") || !j["responses"].is_array()) {
    fail(ErrorKind::kValidation, "group.responses: expected an array");
  }
  for (std::size_t i = 0; i < j["responses"].size(); ++i) {
    const auto& r = j["responses"][i];
    const std::string path = "group.responses[" + std::to_string(i) + "]";
    if (!r.is_object() || !r.contains("text") || !r["text"].is_string()) {
      fail(ErrorKind::kValidation, path + ".text: expected a string");
    }
    if (!r.contains("human_rank") || !r["human_rank"].is_number_integer()) {
      fail(ErrorKind::kValidation, path + ".human_rank: expected an integer");
    }
    g.responses.push_back({r["text"].get<std::string>(), r["human_rank"].get<int>()});
  }
  validate(g);
  return g;
}

nlohmann::json to_json(const AgreementReport& report) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& g : report.per_group) {
    per.push_back({{"kendall_tau", g.kendall_tau}, {"position_consistency", g.position_consistency}});
  }
  return {{"kendall_tau", report.kendall_tau},
          {"position_consistency", report.position_consistency},
          {"time_per_group", report.time_per_group},
          {"groups", report.per_group.size()},
          {"per_group", per}};
}

AgreementReport eval_reward_model(std::span<const PreferenceGroup> groups, const RewardEngine& engine) {
  if (groups.empty()) fail(ErrorKind::kValidation, "eval_reward_model: no groups");
  AgreementReport report;
  double total_seconds = 0.0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    std::vector<double> scores;
    std::vector<double> human;
    try {
      validate(g);
      const auto start = std::chrono::steady_clock::now();
      for (const auto& r : g.responses) {
        scores.push_back(engine.sample_reward(r.text, g.constraints).aggregate);
      }
      total_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (const Error& e) {
      fail(e.kind(), "groups[" + std::to_string(gi) + "]: " + e.what());
    }
    for (const auto& r : g.responses) human.push_back(r.human_rank);
    const auto model = ranks_descending(scores);
    report.per_group.push_back({kendall_tau(human, model), position_consistency(human, model)});
  }
  for (const auto& g : report.per_group) {
    report.kendall_tau += g.kendall_tau;
    report.position_consistency += g.position_consistency;
  }
  const double n = static_cast<double>(groups.size());
  report.kendall_tau /= n;
  report.position_consistency /= n;
  report.time_per_group = total_seconds / n;
  return report;
}

SatisfactionRates satisfaction_rates(std::span<const InstructionOutcome> results) {
  if (results.empty()) fail(ErrorKind::kValidation, "satisfaction_rates: empty input");
  // Per-instruction fractions averaged over instructions, so an instruction with
  // many constraints does not outweigh the others and isr <= csr holds.
  double csr = 0.0;
  std::size_t full = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].empty()) {
      fail(ErrorKind::kValidation, "satisfaction_rates: results[" + std::to_string(i) + "] has no constraints");
    }
    std::size_t satisfied = 0;
    for (const auto& o : results[i]) satisfied += o.satisfied ? 1 : 0;
    csr += static_cast<double>(satisfied) / static_cast<double>(results[i].size());
    full += satisfied == results[i].size() ? 1 : 0;
  }
  const double n = static_cast<double>(results.size());
  return {csr / n, static_cast<double>(full) / n};
}

StrictRates strict_rates(std::span<const InstructionOutcome> results) {
  std::vector<InstructionOutcome> hard_only;
  for (const auto& r : results) {
    InstructionOutcome h;
    for (const auto& o : r) {
      if (o.hard) h.push_back(o);
    }
    if (!h.empty()) hard_only.push_back(std::move(h));
  }
  if (hard_only.empty()) fail(ErrorKind::kValidation, "strict_rates: no hard constraints in input");
  const auto rates = satisfaction_rates(hard_only);
  return {rates.csr, rates.isr};
}

}  // namespace ifrl
