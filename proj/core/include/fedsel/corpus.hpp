#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedsel/collection_index.hpp"

namespace fedsel {

/// One web-page record as it appears in a corpus file.
struct RawDocument {
  std::string url;
  std::optional<std::string> title;
  std::string body;
  std::optional<std::string> topic;

  bool operator==(const RawDocument&) const = default;
};

/// Stems every token of title + body and counts occurrences.
TokenizedDocument tokenize_document(const RawDocument& doc);

/// Tokenizes the document and adds it to the named collection.
/// Throws not_found for an unknown collection and duplicate_document for a
/// repeated URL.
TokenizedDocument ingest_document(CollectionSet& collections, std::string_view collection,
                                  const RawDocument& doc);

/// Parses one corpus line (a single-line JSON object). Returns nullopt for
/// blank and `#` comment lines. Throws parse_error with the reason.
std::optional<RawDocument> parse_corpus_line(std::string_view line);

/// Encodes a document as one corpus line, without the trailing newline.
std::string format_corpus_line(const RawDocument& doc);

/// Reads every record of a corpus file. Parse errors name the line number.
std::vector<RawDocument> read_corpus(const std::filesystem::path& path);

/// Ingests a corpus file into an existing collection and returns the number of
/// documents added. Stops at the first malformed line or duplicate URL.
std::size_t load_corpus(const std::filesystem::path& path, CollectionSet& collections,
                        std::string_view collection);

void write_corpus(const std::filesystem::path& path, const std::vector<RawDocument>& docs);

}  // namespace fedsel
