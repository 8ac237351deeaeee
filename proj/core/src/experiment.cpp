#include "fedsel/experiment.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fedsel/corpus.hpp"
#include "fedsel/error.hpp"
#include "fedsel/stemmer.hpp"
#include "fedsel/tokenizer.hpp"

namespace fedsel {

namespace {

// The first word of every vocabulary is the topic label itself.
constexpr std::array<std::string_view, 20> kEducation = {
    "education", "school",  "teacher",   "student",  "curriculum", "classroom", "lecture",
    "university", "pedagogy", "homework", "syllabus", "tutor",     "exam",      "literacy",
    "scholarship", "kindergarten", "diploma", "enrollment", "textbook", "academic"};
constexpr std::array<std::string_view, 20> kMedicine = {
    "medicine", "hospital",  "patient",   "doctor",  "surgery",  "diagnosis", "vaccine",
    "clinic",   "therapy",   "nurse",     "symptom", "prescription", "cardiology", "antibiotic",
    "infection", "pharmacy", "anatomy",   "disease", "treatment", "physician"};
constexpr std::array<std::string_view, 20> kAstronomy = {
    "astronomy", "telescope", "galaxy",  "planet",   "comet",  "nebula",  "orbit",
    "asteroid",  "supernova", "constellation", "cosmology", "meteor", "eclipse", "observatory",
    "quasar",    "stellar",   "pulsar",  "solar",    "lunar",  "spacecraft"};
constexpr std::array<std::string_view, 20> kFinance = {
    "finance",  "bank",     "investment", "stock",   "dividend", "mortgage", "portfolio",
    "interest", "loan",     "currency",   "inflation", "budget", "equity",   "bond",
    "audit",    "revenue",  "taxation",   "credit",  "asset",    "banker"};
constexpr std::array<std::string_view, 20> kCooking = {
    "cooking", "recipe",  "kitchen", "oven",   "flavor",  "spice", "bake",
    "sauce",   "dessert", "chef",    "ingredient", "grill", "pastry", "soup",
    "vegetable", "roast", "garlic",  "noodle", "cuisine", "simmer"};

constexpr std::array<std::string_view, 24> kBackground = {
    "web",     "page",   "information", "online", "site",    "home",   "news",  "contact",
    "people",  "world",  "time",        "year",   "search",  "link",   "article", "update",
    "free",    "index",  "content",     "resource", "guide", "list",   "general", "member"};

struct TopicEntry {
  std::string_view topic;
  std::span<const std::string_view> words;
};

const std::array<TopicEntry, 5>& topic_table() {
  static const std::array<TopicEntry, 5> table = {{
      {"education", kEducation},
      {"medicine", kMedicine},
      {"astronomy", kAstronomy},
      {"finance", kFinance},
      {"cooking", kCooking},
  }};
  return table;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// Every stem may belong to at most one vocabulary; ground truth relies on it.
void check_vocabularies_disjoint() {
  std::map<std::string, std::string_view> owner;
  auto claim = [&](std::string_view vocab, std::string_view word) {
    const auto tokens = tokenize(word);
    if (tokens.size() != 1 || tokens.front() != word) {
      throw Error(ErrorCode::invalid_state, "vocabulary word '" + std::string(word) +
                                                "' does not survive tokenization");
    }
    auto [it, inserted] = owner.emplace(porter_stem(word), vocab);
    if (!inserted && it->second != vocab) {
      throw Error(ErrorCode::invalid_state, "stem of '" + std::string(word) + "' is shared by " +
                                                std::string(it->second) + " and " +
                                                std::string(vocab));
    }
  };
  for (const auto& t : topic_table()) {
    for (auto w : t.words) claim(t.topic, w);
  }
  for (auto w : kBackground) claim("background", w);
}

std::string capitalize(std::string_view w) {
  std::string s(w);
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

}  // namespace

std::vector<std::string> experiment_topics() {
  std::vector<std::string> out;
  for (const auto& t : topic_table()) out.emplace_back(t.topic);
  return out;
}

std::span<const std::string_view> topic_vocabulary(std::string_view topic) {
  for (const auto& t : topic_table()) {
    if (t.topic == topic) return t.words;
  }
  throw Error(ErrorCode::not_found, "no vocabulary for topic '" + std::string(topic) + "'");
}

std::span<const std::string_view> background_vocabulary() { return kBackground; }

void ExperimentSpec::validate() const {
  std::set<std::string> names, topics;
  for (const auto& c : collections) {
    if (c.name.empty()) throw Error(ErrorCode::invalid_argument, "collection name is empty");
    if (!names.insert(c.name).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate collection '" + c.name + "'");
    }
    if (!topics.insert(c.topic).second) {
      throw Error(ErrorCode::invalid_argument, "topic '" + c.topic + "' used twice");
    }
    topic_vocabulary(c.topic);
  }
  for (const auto& q : queries) {
    if (q.owning_topic && !topics.contains(*q.owning_topic)) {
      throw Error(ErrorCode::invalid_argument, "query topic '" + *q.owning_topic + "' has no collection");
    }
  }
}

ExperimentSpec ExperimentSpec::five_collections(std::uint64_t seed) {
  ExperimentSpec spec;
  spec.vocabulary_seed = seed;
  spec.collections = {
      {"DB1", 119, "education"}, {"DB2", 105, "medicine"}, {"DB3", 81, "astronomy"},
      {"DB4", 108, "finance"},   {"DB5", 125, "cooking"},
  };
  for (const auto& c : spec.collections) {
    const auto words = topic_vocabulary(c.topic);
    spec.queries.push_back({std::string(words[0]), c.topic});
    spec.queries.push_back({std::string(words[1]), c.topic});
    spec.queries.push_back({std::string(words[2]), c.topic});
    spec.queries.push_back({std::string(words[3]) + " " + std::string(words[4]), c.topic});
  }
  spec.queries.push_back({"online information", std::nullopt});
  spec.queries.push_back({"news", std::nullopt});
  return spec;
}

BuiltExperiment build_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  check_vocabularies_disjoint();
  std::filesystem::create_directories(out_dir);

  BuiltExperiment built;
  for (std::size_t ci = 0; ci < spec.collections.size(); ++ci) {
    const auto& c = spec.collections[ci];
    const auto words = topic_vocabulary(c.topic);
    std::mt19937_64 rng(spec.vocabulary_seed * 1000003ULL + ci);

    std::vector<RawDocument> docs;
    docs.reserve(c.record_count);
    for (std::size_t d = 0; d < c.record_count; ++d) {
      char url[160];
      std::snprintf(url, sizeof url, "http://%s.example.org/%s/doc-%04zu", c.name.c_str(),
                    c.topic.c_str(), d + 1);
      RawDocument doc;
      doc.url = url;
      doc.title = capitalize(c.topic) + " " + std::string(kBackground[pick(rng, kBackground.size())]);
      const std::size_t length = 30 + pick(rng, 31);
      std::string body;
      for (std::size_t w = 0; w < length; ++w) {
        const bool noise = pick(rng, 100) < 20;
        const auto word = noise ? kBackground[pick(rng, kBackground.size())]
                                : words[pick(rng, words.size())];
        if (!body.empty()) body.push_back(' ');
        body += word;
      }
      doc.body = std::move(body);
      doc.topic = c.topic;
      docs.push_back(std::move(doc));
    }
    const auto path = out_dir / (c.name + ".jsonl");
    write_corpus(path, docs);
    built.sources.push_back({c.name, std::filesystem::absolute(path), {}});
    built.owner_of_topic.emplace(c.topic, c.name);
  }

  built.queries_file = out_dir / "queries.txt";
  std::ofstream q(built.queries_file, std::ios::binary | std::ios::trunc);
  if (!q) throw Error(ErrorCode::io_error, "cannot write " + built.queries_file.string());
  q << "# one query per line\n";
  for (const auto& query : spec.queries) q << query.text << '\n';
  return built;
}

EvalReport evaluate_queries(const Deployment& deployment, std::span<const EvalQuery> queries,
                            const UtilityConstraints& constraints) {
  const auto& collections = deployment.collections;
  const auto& directory = deployment.directory;
  const Broker broker(collections, directory);

  EvalReport report;
  report.num_collections = directory.matrix().size();
  double overlap_sum = 0.0;
  std::size_t overlap_n = 0, agree = 0, doc_agree = 0, searched = 0;

  for (const auto& q : queries) {
    QueryRequest request{q.text, constraints, std::nullopt, std::nullopt};
    const auto selective = broker.respond(request);
    const TermSet terms(selective.terms.begin(), selective.terms.end());

    // Exhaustive baseline: every collection, no selection.
    const auto scores = directory.score(terms);
    std::vector<RankedCollection> all;
    for (const auto& s : scores) all.push_back({s.collection, s.belief, 0.0, all.size() + 1});
    std::vector<CollectionHits> per_collection;
    for (const auto& r : all) {
      per_collection.emplace_back(r.collection,
                                  collections.search(r.collection, terms, constraints.max_results));
    }
    auto exhaustive = merge_results(per_collection, all);
    if (exhaustive.size() > constraints.max_results) exhaustive.resize(constraints.max_results);

    QueryEvaluation e;
    e.query = q.text;
    if (!selective.selected.empty()) e.selected = selective.selected.front().collection;
    e.expected = q.expected;
    if (!e.expected && q.infer_expected && !exhaustive.empty()) e.expected = exhaustive.front().source;
    if (e.expected) e.agreement = e.selected == e.expected;
    if (!exhaustive.empty()) {
      e.top_doc_agreement =
          !selective.hits.empty() && selective.hits.front().hit.url == exhaustive.front().hit.url;
      std::set<std::string> top_sel, top_exh;
      for (std::size_t i = 0; i < std::min<std::size_t>(10, selective.hits.size()); ++i) {
        top_sel.insert(selective.hits[i].hit.url);
      }
      for (std::size_t i = 0; i < std::min<std::size_t>(10, exhaustive.size()); ++i) {
        top_exh.insert(exhaustive[i].hit.url);
      }
      std::size_t common = 0;
      for (const auto& u : top_exh) common += top_sel.count(u);
      e.overlap_at_10 = static_cast<double>(common) / static_cast<double>(top_exh.size());
    }
    e.collections_searched = selective.selected.size();
    e.exhaustive_searched = all.size();
    e.frequency = selective.frequency;

    searched += e.collections_searched;
    if (e.agreement) {
      ++report.aggregate.agreement_queries;
      agree += *e.agreement ? 1 : 0;
    }
    if (e.top_doc_agreement) {
      ++report.aggregate.top_doc_queries;
      doc_agree += *e.top_doc_agreement ? 1 : 0;
    }
    if (e.overlap_at_10) {
      overlap_sum += *e.overlap_at_10;
      ++overlap_n;
    }
    report.per_query.push_back(std::move(e));
  }

  auto& a = report.aggregate;
  a.queries = report.per_query.size();
  auto ratio = [](double num, std::size_t den) { return den ? num / static_cast<double>(den) : 0.0; };
  a.top1_agreement = ratio(static_cast<double>(agree), a.agreement_queries);
  a.top_doc_agreement = ratio(static_cast<double>(doc_agree), a.top_doc_queries);
  a.mean_overlap_at_10 = ratio(overlap_sum, overlap_n);
  a.mean_collections_searched = ratio(static_cast<double>(searched), a.queries);
  a.reduction_factor = a.mean_collections_searched > 0.0
                           ? static_cast<double>(report.num_collections) / a.mean_collections_searched
                           : 0.0;
  return report;
}

EvalReport run_experiment(const ExperimentSpec& spec, const CoriParams& params,
                          const UtilityConstraints& constraints,
                          const std::filesystem::path& work_dir) {
  const auto built = build_experiment(spec, work_dir);
  const auto deployment = build_deployment(built.sources, params);

  std::vector<EvalQuery> queries;
  for (const auto& q : spec.queries) {
    EvalQuery eq{q.text, std::nullopt, false};
    if (q.owning_topic) eq.expected = built.owner_of_topic.at(*q.owning_topic);
    queries.push_back(std::move(eq));
  }
  return evaluate_queries(*deployment, queries, constraints);
}

std::vector<std::string> read_queries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read queries '" + path.string() + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(line);
  }
  return out;
}

std::string format_eval_report(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["num_collections"] = r.num_collections;
  const auto& a = r.aggregate;
  auto& agg = j["aggregate"];
  agg["queries"] = a.queries;
  agg["agreement_queries"] = a.agreement_queries;
  agg["top1_agreement"] = a.top1_agreement;
  agg["top_doc_queries"] = a.top_doc_queries;
  agg["top_doc_agreement"] = a.top_doc_agreement;
  agg["mean_overlap_at_10"] = a.mean_overlap_at_10;
  agg["mean_collections_searched"] = a.mean_collections_searched;
  agg["reduction_factor"] = a.reduction_factor;
  auto& list = j["per_query"] = nlohmann::ordered_json::array();
  for (const auto& e : r.per_query) {
    nlohmann::ordered_json q;
    q["query"] = e.query;
    q["selected"] = optional_json(e.selected);
    q["expected"] = optional_json(e.expected);
    q["agreement"] = optional_json(e.agreement);
    q["top_doc_agreement"] = optional_json(e.top_doc_agreement);
    q["overlap_at_10"] = optional_json(e.overlap_at_10);
    q["collections_searched"] = e.collections_searched;
    q["exhaustive_searched"] = e.exhaustive_searched;
    auto& freq = q["frequency"] = nlohmann::ordered_json::array();
    for (const auto& f : e.frequency) freq.push_back({{"collection", f.collection}, {"df", f.df}});
    list.push_back(std::move(q));
  }
  return j.dump(2) + "\n";
}

EvalReport parse_eval_report(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EvalReport r;
    r.num_collections = j.at("num_collections").get<std::size_t>();
    const auto& agg = j.at("aggregate");
    auto& a = r.aggregate;
    a.queries = agg.at("queries").get<std::size_t>();
    a.agreement_queries = agg.at("agreement_queries").get<std::size_t>();
    a.top1_agreement = agg.at("top1_agreement").get<double>();
    a.top_doc_queries = agg.at("top_doc_queries").get<std::size_t>();
    a.top_doc_agreement = agg.at("top_doc_agreement").get<double>();
    a.mean_overlap_at_10 = agg.at("mean_overlap_at_10").get<double>();
    a.mean_collections_searched = agg.at("mean_collections_searched").get<double>();
    a.reduction_factor = agg.at("reduction_factor").get<double>();
    for (const auto& q : j.at("per_query")) {
      QueryEvaluation e;
      e.query = q.at("query").get<std::string>();
      e.selected = optional_from<std::string>(q, "selected");
      e.expected = optional_from<std::string>(q, "expected");
      e.agreement = optional_from<bool>(q, "agreement");
      e.top_doc_agreement = optional_from<bool>(q, "top_doc_agreement");
      e.overlap_at_10 = optional_from<double>(q, "overlap_at_10");
      e.collections_searched = q.at("collections_searched").get<std::size_t>();
      e.exhaustive_searched = q.at("exhaustive_searched").get<std::size_t>();
      for (const auto& f : q.at("frequency")) {
        e.frequency.push_back({f.at("collection").get<std::string>(), f.at("df").get<std::uint64_t>()});
      }
      r.per_query.push_back(std::move(e));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad eval report: ") + e.what());
  }
}

std::string format_eval_table(const EvalReport& r) {
  auto flag = [](const std::optional<bool>& b) -> std::string {
    return b ? (*b ? "yes" : "no") : "n/a";
  };
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%-28s %-10s %-10s %-6s %-8s %-10s\n", "query", "selected",
                "expected", "agree", "top-doc", "overlap@10");
  out << line;
  for (const auto& e : r.per_query) {
    std::string overlap = "n/a";
    if (e.overlap_at_10) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", *e.overlap_at_10);
      overlap = buf;
    }
    std::snprintf(line, sizeof line, "%-28s %-10s %-10s %-6s %-8s %-10s\n", e.query.c_str(),
                  e.selected.value_or("-").c_str(), e.expected.value_or("-").c_str(),
                  flag(e.agreement).c_str(), flag(e.top_doc_agreement).c_str(), overlap.c_str());
    out << line;
    out << "    frequency:";
    for (const auto& f : e.frequency) out << ' ' << f.collection << '=' << f.df;
    out << '\n';
  }
  const auto& a = r.aggregate;
  std::snprintf(line, sizeof line,
                "top-1 collection agreement %.4f (%zu queries)\n"
                "top-1 document agreement   %.4f (%zu queries)\n"
                "mean overlap@10            %.4f\n"
                "collections searched       %.2f of %zu per query (reduction %.2fx)\n",
                a.top1_agreement, a.agreement_queries, a.top_doc_agreement, a.top_doc_queries,
                a.mean_overlap_at_10, a.mean_collections_searched, r.num_collections,
                a.reduction_factor);
  out << line;
  return out.str();
}

}  // namespace fedsel
