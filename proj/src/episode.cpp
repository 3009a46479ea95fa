#include "spanproto/episode.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace spanproto {

using nlohmann::json;

std::vector<Span> LabeledSentence::gold_spans() const {
  std::vector<Span> out;
  out.reserve(mentions.size());
  for (const Mention& m : mentions) out.push_back(m.span);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int Episode::type_index(const std::string& name) const {
  for (size_t i = 0; i < types.size(); ++i) {
    if (types[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "dev") return Split::dev;
  if (name == "test") return Split::test;
  throw ConfigError("unknown split name: " + name);
}

namespace {

std::string where(int episode_index, const char* role, int sentence_index) {
  std::ostringstream os;
  os << "episode " << episode_index << ", " << role << " sentence " << sentence_index;
  return os.str();
}

}  // namespace

void validate_sentence(const LabeledSentence& s, int episode_index, const char* role,
                       int sentence_index, const std::vector<std::string>& types) {
  const int len = s.length();
  if (len < 1) {
    throw ValidationError("validation error: " + where(episode_index, role, sentence_index) +
                          ": field tokens: empty token list");
  }
  std::set<std::pair<std::pair<int, int>, std::string>> seen;
  for (const Mention& m : s.mentions) {
    if (m.span.start < 0 || m.span.start > m.span.end || m.span.end >= len) {
      std::ostringstream os;
      os << "validation error: " << where(episode_index, role, sentence_index)
         << ": field spans: span [" << m.span.start << ", " << m.span.end
         << "] out of range for length " << len;
      throw ValidationError(os.str());
    }
    if (std::find(types.begin(), types.end(), m.type) == types.end()) {
      throw ValidationError("validation error: " + where(episode_index, role, sentence_index) +
                            ": field spans: mention type \"" + m.type +
                            "\" absent from episode types");
    }
    auto key = std::make_pair(std::make_pair(m.span.start, m.span.end), m.type);
    if (!seen.insert(key).second) {
      std::ostringstream os;
      os << "validation error: " << where(episode_index, role, sentence_index)
         << ": field spans: duplicate (span, type) pair [" << m.span.start << ", "
         << m.span.end << ", " << m.type << "]";
      throw ValidationError(os.str());
    }
  }
}

void Episode::validate(int episode_index) const {
  const std::string at = "validation error: episode " + std::to_string(episode_index);
  if (types.empty()) throw ValidationError(at + ": field types: empty type list");
  std::unordered_set<std::string> distinct(types.begin(), types.end());
  if (distinct.size() != types.size()) {
    throw ValidationError(at + ": field types: duplicate type name");
  }
  if (support.empty()) throw ValidationError(at + ": field support: empty support set");
  if (query.empty()) throw ValidationError(at + ": field query: empty query set");

  for (size_t i = 0; i < support.size(); ++i) {
    validate_sentence(support[i], episode_index, "support", static_cast<int>(i), types);
  }
  for (size_t i = 0; i < query.size(); ++i) {
    validate_sentence(query[i], episode_index, "query", static_cast<int>(i), types);
  }

  // Every target type must have at least one support mention, or its
  // prototype is undefined.
  for (const std::string& t : types) {
    bool found = false;
    for (const LabeledSentence& s : support) {
      for (const Mention& m : s.mentions) {
        if (m.type == t) {
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) {
      throw ValidationError(at + ": field support: type \"" + t +
                            "\" has no support mention");
    }
  }
}

namespace {

LabeledSentence sentence_from_json(const json& j) {
  LabeledSentence s;
  for (const auto& tok : j.at("tokens")) s.tokens.push_back(tok.get<std::string>());
  for (const auto& sp : j.at("spans")) {
    if (!sp.is_array() || sp.size() != 3) {
      throw ParseError("span entry must be [start, end, type]");
    }
    Mention m;
    m.span.start = sp[0].get<int>();
    m.span.end = sp[1].get<int>();
    m.type = sp[2].get<std::string>();
    s.mentions.push_back(std::move(m));
  }
  return s;
}

json sentence_to_json(const LabeledSentence& s) {
  json j;
  j["tokens"] = s.tokens;
  json spans = json::array();
  for (const Mention& m : s.mentions) {
    spans.push_back(json::array({m.span.start, m.span.end, m.type}));
  }
  j["spans"] = std::move(spans);
  return j;
}

}  // namespace

EpisodeDataset read_episodes(const std::string& path, Split split) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open episode file: " + path);

  EpisodeDataset ds;
  ds.split = split;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("parse error: " + path + ": line " + std::to_string(line_no) +
                       ": " + e.what());
    }
    Episode ep;
    try {
      for (const auto& t : j.at("types")) ep.types.push_back(t.get<std::string>());
      for (const auto& s : j.at("support")) ep.support.push_back(sentence_from_json(s));
      for (const auto& s : j.at("query")) ep.query.push_back(sentence_from_json(s));
    } catch (const json::exception& e) {
      throw ParseError("parse error: " + path + ": line " + std::to_string(line_no) +
                       ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("parse error: " + path + ": line " + std::to_string(line_no) +
                       ": " + e.what());
    }
    ep.validate(static_cast<int>(ds.episodes.size()));
    ds.episodes.push_back(std::move(ep));
  }
  ds.empty_input_warning = ds.episodes.empty();
  return ds;
}

void write_episodes(const EpisodeDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const Episode& ep : dataset.episodes) {
    json j;
    j["types"] = ep.types;
    json support = json::array();
    for (const LabeledSentence& s : ep.support) support.push_back(sentence_to_json(s));
    j["support"] = std::move(support);
    json query = json::array();
    for (const LabeledSentence& s : ep.query) query.push_back(sentence_to_json(s));
    j["query"] = std::move(query);
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace spanproto
