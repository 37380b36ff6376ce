#include "synthetic.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "dupliq/rng.hpp"

namespace synth {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("dupliq-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

const std::vector<std::string>& topic_words() {
  static const std::vector<std::string> words = {
      "python",   "learn",    "money",   "online",  "india",    "phone",   "weight",  "lose",
      "best",     "book",     "movie",   "career",  "engineer", "college", "startup", "job",
      "travel",   "language", "english", "code",    "quora",    "google",  "health",  "sleep",
      "music",    "guitar",   "chess",   "market",  "stock",    "invest",  "bank",    "loan",
      "science",  "physics",  "math",    "history", "war",      "country", "visa",    "city"};
  return words;
}

namespace {

std::string pick(dupliq::Rng& rng, const std::vector<std::string>& from) {
  return from[rng.below(from.size())];
}

std::string sentence(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s += ' ';
    s += w;
  }
  return s;
}

}  // namespace

dupliq::corpus::PairTable question_pairs(std::size_t n, std::uint64_t seed, std::size_t short_rows) {
  static const std::vector<std::string> openers = {"how do i", "what is the", "why do", "which is the",
                                                   "can i", "what are the"};
  const auto& vocab = topic_words();
  dupliq::Rng rng(seed);
  dupliq::corpus::PairTable table;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> topic;
    const std::size_t len = 2 + rng.below(4);
    while (topic.size() < len) topic.push_back(pick(rng, vocab));
    const bool duplicate = rng.uniform() < 0.37;
    std::vector<std::string> other = topic;
    if (duplicate) {
      rng.shuffle(std::span<std::string>(other));
      if (rng.bernoulli(0.5)) other[rng.below(other.size())] = pick(rng, vocab);
    } else {
      const std::size_t keep = rng.below(2);
      for (std::size_t k = keep; k < other.size(); ++k) other[k] = pick(rng, vocab);
      if (rng.bernoulli(0.5)) other.push_back(pick(rng, vocab));
    }
    dupliq::corpus::QuestionPair p;
    p.row_id = static_cast<std::int64_t>(i);
    p.qid1 = static_cast<std::int64_t>(2 * i + 1);
    p.qid2 = static_cast<std::int64_t>(2 * i + 2);
    // One draw per statement keeps the sequence independent of argument
    // evaluation order.
    const std::string opener1 = pick(rng, openers);
    const std::string opener2 = pick(rng, openers);
    const bool mark = rng.bernoulli(0.8);
    p.question1 = opener1 + " " + sentence(topic) + "?";
    p.question2 = opener2 + " " + sentence(other) + (mark ? "?" : "");
    if (rng.bernoulli(0.1)) p.question1[0] = static_cast<char>(p.question1[0] - 'a' + 'A');
    p.is_duplicate = duplicate ? 1 : 0;
    table.rows.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < short_rows; ++i) {
    dupliq::corpus::QuestionPair p;
    p.row_id = static_cast<std::int64_t>(n + i);
    p.qid1 = static_cast<std::int64_t>(2 * (n + i) + 1);
    p.qid2 = static_cast<std::int64_t>(2 * (n + i) + 2);
    p.question1 = i % 2 ? "why?" : "what is " + pick(rng, vocab) + "?";
    p.question2 = i % 2 ? "what is " + pick(rng, vocab) + "?" : "hi";
    p.is_duplicate = static_cast<int>(i % 2);
    table.rows.push_back(std::move(p));
  }
  return table;
}

oracle::WordVectors word_vectors(const std::vector<std::string>& words, std::size_t dim, std::uint64_t seed) {
  dupliq::Rng rng(seed);
  oracle::WordVectors out;
  for (const auto& w : words) {
    std::vector<float> v(dim);
    // Multiples of 1/1024 print exactly and survive float parsing.
    for (float& x : v) x = static_cast<float>(static_cast<int>(rng.below(4097)) - 2048) / 1024.0f;
    out[w] = v;
  }
  return out;
}

void write_glove(const oracle::WordVectors& vectors, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(10);
  for (const auto& [word, v] : vectors) {
    out << word;
    for (float x : v) out << ' ' << x;
    out << '\n';
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace synth
