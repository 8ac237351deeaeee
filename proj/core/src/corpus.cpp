#include "fedsel/corpus.hpp"

#include <fstream>

#include <json.hpp>

#include "fedsel/error.hpp"
#include "fedsel/stemmer.hpp"
#include "fedsel/tokenizer.hpp"

namespace fedsel {

namespace {

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::parse_error, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

TokenizedDocument tokenize_document(const RawDocument& doc) {
  TokenizedDocument out{doc.url, {}};
  std::string text = doc.title.value_or("");
  text.push_back(' ');
  text += doc.body;
  for (const auto& word : tokenize(text)) ++out.terms[porter_stem(word)];
  return out;
}

TokenizedDocument ingest_document(CollectionSet& collections, std::string_view collection,
                                  const RawDocument& doc) {
  auto& index = collections.at(collection);
  auto tokenized = tokenize_document(doc);
  index.add(tokenized);
  return tokenized;
}

std::optional<RawDocument> parse_corpus_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto first = line.find_first_not_of(" \t");
  if (first == std::string_view::npos || line[first] == '#') return std::nullopt;

  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error(ErrorCode::parse_error, "record must be a JSON object");

  RawDocument doc;
  auto url = optional_string(obj, "url");
  if (!url || url->empty()) throw Error(ErrorCode::parse_error, "missing required string field 'url'");
  doc.url = std::move(*url);
  doc.title = optional_string(obj, "title");
  doc.body = optional_string(obj, "body").value_or("");
  doc.topic = optional_string(obj, "topic");
  return doc;
}

std::string format_corpus_line(const RawDocument& doc) {
  nlohmann::ordered_json obj;
  obj["url"] = doc.url;
  if (doc.title) obj["title"] = *doc.title;
  obj["body"] = doc.body;
  if (doc.topic) obj["topic"] = *doc.topic;
  return obj.dump();
}

std::vector<RawDocument> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read corpus '" + path.string() + "'");
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      if (auto doc = parse_corpus_line(line)) docs.push_back(std::move(*doc));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::io_error, "read failure on '" + path.string() + "'");
  return docs;
}

std::size_t load_corpus(const std::filesystem::path& path, CollectionSet& collections,
                        std::string_view collection) {
  collections.at(collection);
  const auto docs = read_corpus(path);
  for (const auto& doc : docs) ingest_document(collections, collection, doc);
  return docs.size();
}

void write_corpus(const std::filesystem::path& path, const std::vector<RawDocument>& docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write corpus '" + path.string() + "'");
  for (const auto& doc : docs) out << format_corpus_line(doc) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failure on '" + path.string() + "'");
}

}  // namespace fedsel
