#include "fedsel/broker.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <map>

#include <json.hpp>

#include "fedsel/error.hpp"
#include "fedsel/stemmer.hpp"
#include "fedsel/tokenizer.hpp"

namespace fedsel {

TermSet analyze_query(std::string_view text) {
  TermSet terms;
  for (const auto& word : tokenize(text)) terms.insert(porter_stem(word));
  return terms;
}

std::vector<SourcedHit> merge_results(std::span<const CollectionHits> per_collection,
                                      std::span<const RankedCollection> selection) {
  std::map<std::string_view, double> belief_of;
  for (const auto& r : selection) belief_of.emplace(r.collection, r.belief);

  struct Candidate {
    SourcedHit hit;
    double belief;
  };
  // Orders candidates for the same URL: best first.
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.hit.hit.score != b.hit.hit.score) return a.hit.hit.score > b.hit.hit.score;
    if (a.belief != b.belief) return a.belief > b.belief;
    return a.hit.source < b.hit.source;
  };

  std::map<std::string, Candidate> best_by_url;
  for (const auto& [source, hits] : per_collection) {
    auto it = belief_of.find(source);
    if (it == belief_of.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "merge input from '" + source + "' which is not in the selection");
    }
    for (const auto& hit : hits) {
      Candidate c{SourcedHit{hit, source}, it->second};
      auto [slot, inserted] = best_by_url.try_emplace(hit.url, c);
      if (!inserted && better(c, slot->second)) slot->second = std::move(c);
    }
  }

  std::vector<Candidate> merged;
  merged.reserve(best_by_url.size());
  for (auto& [url, c] : best_by_url) merged.push_back(std::move(c));
  std::sort(merged.begin(), merged.end(), [](const Candidate& a, const Candidate& b) {
    if (a.hit.hit.score != b.hit.hit.score) return a.hit.hit.score > b.hit.hit.score;
    if (a.belief != b.belief) return a.belief > b.belief;
    return a.hit.hit.url < b.hit.hit.url;
  });

  std::vector<SourcedHit> out;
  out.reserve(merged.size());
  for (auto& c : merged) out.push_back(std::move(c.hit));
  return out;
}

Broker::Broker(const CollectionSet& collections, const ServiceDirectory& directory,
               ActivityLog* log)
    : collections_(collections), directory_(directory), log_(log) {}

std::vector<CollectionFrequency> Broker::frequency_report(const TermSet& terms) const {
  std::vector<CollectionFrequency> out;
  for (auto& [name, df] : directory_.frequency_report(terms)) out.push_back({name, df});
  return out;
}

QueryResponse Broker::handle_query(const QueryRequest& request) const {
  return run(request, false);
}

QueryResponse Broker::respond(const QueryRequest& request) const { return run(request, true); }

QueryResponse Broker::run(const QueryRequest& request, bool advisory_on_empty) const {
  const auto start = std::chrono::steady_clock::now();

  ActivityRecord record;
  record.query = request.text;
  auto log = [&](std::string outcome) {
    if (!log_) return;
    record.outcome = std::move(outcome);
    log_->append(record);
  };

  QueryResponse response;
  response.query = request.text;
  try {
    request.constraints.validate();
    const TermSet terms = analyze_query(request.text);
    if (terms.empty()) {
      throw Error(ErrorCode::invalid_query, "query has no searchable terms after tokenization");
    }
    response.terms.assign(terms.begin(), terms.end());
    record.terms = response.terms;
    response.frequency = frequency_report(terms);

    if (request.target_db) {
      const auto& target = *request.target_db;
      if (!directory_.matrix().contains(target) || !collections_.contains(target)) {
        throw Error(ErrorCode::not_found, "unknown target collection '" + target + "'");
      }
      response.selection_bypassed = true;
      record.selection_bypassed = true;
      response.selected.push_back({target, 0.0, 0.0, 1});
    } else {
      response.selected = directory_.rank(terms, request.constraints);
      if (response.selected.empty()) {
        if (!advisory_on_empty) {
          throw Error(ErrorCode::no_eligible_database,
                      "no collection satisfies the time and price constraints");
        }
        response.advisory = "no eligible database: every collection was filtered out by the "
                            "time or price constraints";
      }
    }
    for (const auto& s : response.selected) record.selected.push_back(s.collection);

    const std::size_t limit = request.constraints.max_results;
    std::vector<CollectionHits> per_collection;
    if (response.selected.size() == 1) {
      const auto& name = response.selected.front().collection;
      per_collection.emplace_back(name, collections_.search(name, terms, limit));
    } else {
      std::vector<std::future<std::vector<SearchHit>>> pending;
      for (const auto& s : response.selected) {
        pending.push_back(std::async(std::launch::async, [this, &s, &terms, limit] {
          return collections_.search(s.collection, terms, limit);
        }));
      }
      for (std::size_t i = 0; i < pending.size(); ++i) {
        per_collection.emplace_back(response.selected[i].collection, pending[i].get());
      }
    }
    response.hits = merge_results(per_collection, response.selected);
    if (response.hits.size() > limit) response.hits.resize(limit);
    record.hits = response.hits.size();
  } catch (const Error& e) {
    log(std::string(to_string(e.code())));
    throw;
  }
  log(response.advisory ? "no_eligible_database" : "ok");

  response.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return response;
}

std::string format_response(const QueryResponse& r, bool include_timing) {
  nlohmann::ordered_json j;
  j["query"] = r.query;
  j["terms"] = r.terms;
  j["selection_bypassed"] = r.selection_bypassed;
  auto& selected = j["selected"] = nlohmann::ordered_json::array();
  for (const auto& s : r.selected) {
    nlohmann::ordered_json e;
    e["collection"] = s.collection;
    e["belief"] = s.belief;
    e["utility"] = s.utility;
    e["rank"] = s.rank;
    selected.push_back(std::move(e));
  }
  auto& hits = j["hits"] = nlohmann::ordered_json::array();
  for (const auto& h : r.hits) {
    nlohmann::ordered_json e;
    e["url"] = h.hit.url;
    e["source"] = h.source;
    e["score"] = h.hit.score;
    e["matched_terms"] = h.hit.matched_terms;
    hits.push_back(std::move(e));
  }
  auto& freq = j["frequency"] = nlohmann::ordered_json::array();
  for (const auto& f : r.frequency) {
    nlohmann::ordered_json e;
    e["collection"] = f.collection;
    e["df"] = f.df;
    freq.push_back(std::move(e));
  }
  if (r.advisory) j["advisory"] = *r.advisory;
  if (include_timing) j["timing_ms"] = r.elapsed_ms;
  return j.dump();
}

}  // namespace fedsel
