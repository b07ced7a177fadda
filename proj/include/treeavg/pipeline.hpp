#pragma once

// Batch execution over whole treebanks: loading and aligning multi-file
// corpora, running an ensemble mode per sentence (in parallel when asked),
// and writing one output tree per input line. Sentences are independent,
// so worker count never changes the result.

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "treeavg/bracket_io.hpp"
#include "treeavg/ensemble.hpp"
#include "treeavg/metrics.hpp"
#include "treeavg/tree.hpp"

namespace treeavg {

enum class Mode { ensemble, selective, oracle, baseline };

struct RunConfig {
  std::vector<std::string> teacher_paths;
  std::optional<std::string> gold_path;
  EvalConfig eval;
  Mode mode = Mode::ensemble;
  std::string output_path;
  bool strip_punct_pre = false;  // strip punctuation before ensembling
  Direction baseline_direction = Direction::right;
  int workers = 1;
  TreeDialect teacher_dialect = TreeDialect::unlabeled;
  TreeDialect gold_dialect = TreeDialect::labeled;
};

struct Sentence {
  int id = 0;  // 1-based line number
  std::vector<Tree> teachers;
  std::optional<Tree> gold;
};

struct AlignedCorpus {
  int teacher_count = 0;
  std::vector<Sentence> sentences;
};

struct RunResult {
  int sentence_count = 0;
  int teacher_count = 0;
  std::vector<long long> objectives;  // per sentence; empty for baselines
  std::optional<EvalReport> report;   // present when a gold file was given
};

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

struct IssueLog {
  std::vector<std::string> issues;
  void add(const std::string& msg) { issues.push_back(msg); }
  void throw_if_any() const {
    if (issues.empty()) return;
    std::string msg = std::to_string(issues.size()) + " validation error(s):";
    for (const std::string& i : issues) msg += "\n  " + i;
    throw ValidationError(msg);
  }
};

}  // namespace detail

// Loads every line of one file; throws after collecting all parse errors.
inline std::vector<Tree> load_tree_file(const std::string& path,
                                        TreeDialect dialect) {
  const std::vector<std::string> lines = detail::read_lines(path);
  detail::IssueLog log;
  std::vector<Tree> trees;
  trees.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      if (lines[i].find_first_not_of(" \t") == std::string::npos)
        throw ParseError("blank line", 0);
      trees.push_back(parse_bracketed(lines[i], dialect));
    } catch (const ParseError& e) {
      log.add(path + ", line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  log.throw_if_any();
  return trees;
}

inline AlignedCorpus load_aligned(const RunConfig& cfg) {
  std::vector<std::string> paths = cfg.teacher_paths;
  if (cfg.gold_path) paths.push_back(*cfg.gold_path);
  if (paths.empty()) throw ValidationError("no input files given");
  const std::size_t n_teachers = cfg.teacher_paths.size();

  std::vector<std::vector<Tree>> files;
  files.reserve(paths.size());
  for (std::size_t f = 0; f < paths.size(); ++f) {
    const TreeDialect dialect =
        f < n_teachers ? cfg.teacher_dialect : cfg.gold_dialect;
    files.push_back(load_tree_file(paths[f], dialect));
    if (files.back().size() != files.front().size())
      throw ValidationError("line count mismatch: '" + paths.front() + "' has " +
                            std::to_string(files.front().size()) +
                            " lines but '" + paths[f] + "' has " +
                            std::to_string(files.back().size()));
  }

  detail::IssueLog log;
  const std::size_t n_lines = files.front().size();
  if (cfg.strip_punct_pre) {
    for (std::size_t f = 0; f < files.size(); ++f)
      for (std::size_t i = 0; i < n_lines; ++i) {
        try {
          files[f][i] = strip_punctuation(files[f][i], cfg.eval);
        } catch (const ValidationError&) {
          log.add(paths[f] + ", line " + std::to_string(i + 1) +
                  ": nothing left after punctuation stripping");
        }
      }
    log.throw_if_any();
  }

  for (std::size_t i = 0; i < n_lines; ++i) {
    const Tree& ref = files[0][i];
    for (std::size_t f = 1; f < files.size(); ++f) {
      const Tree& other = files[f][i];
      if (other.size() != ref.size()) {
        log.add(paths[f] + ", line " + std::to_string(i + 1) + ": has " +
                std::to_string(other.size()) + " tokens but '" + paths[0] +
                "' has " + std::to_string(ref.size()));
        continue;
      }
      for (int t = 0; t < ref.size(); ++t) {
        if (other.tokens[t].surface != ref.tokens[t].surface) {
          log.add(paths[f] + ", line " + std::to_string(i + 1) + ", token " +
                  std::to_string(t + 1) + ": '" + other.tokens[t].surface +
                  "' vs '" + ref.tokens[t].surface + "'");
          break;
        }
      }
    }
  }
  log.throw_if_any();

  AlignedCorpus corpus;
  corpus.teacher_count = static_cast<int>(n_teachers);
  corpus.sentences.reserve(n_lines);
  for (std::size_t i = 0; i < n_lines; ++i) {
    Sentence sent;
    sent.id = static_cast<int>(i) + 1;
    for (std::size_t f = 0; f < n_teachers; ++f)
      sent.teachers.push_back(std::move(files[f][i]));
    if (cfg.gold_path) sent.gold = std::move(files[n_teachers][i]);
    corpus.sentences.push_back(std::move(sent));
  }
  return corpus;
}

namespace detail {

struct SentenceOutput {
  Tree tree;
  long long objective = 0;
};

inline SentenceOutput run_sentence(const Sentence& sent, const RunConfig& cfg) {
  switch (cfg.mode) {
    case Mode::ensemble: {
      AvgTreeResult res = avg_tree(hit_counts(sent.teachers));
      const long long obj = res.objective();
      return {std::move(res.tree), obj};
    }
    case Mode::selective: {
      const HitCountTable table = hit_counts(sent.teachers);
      Tree tree = selective_mbr(sent.teachers);
      const long long obj = total_hit_count(tree, table);
      return {std::move(tree), obj};
    }
    case Mode::oracle: {
      const HitCountTable table = hit_counts({*sent.gold});
      Tree tree = avg_tree(table).tree;
      const long long obj = total_hit_count(tree, table);
      return {std::move(tree), obj};
    }
    case Mode::baseline: {
      std::vector<std::string> words;
      for (const Token& tok : sent.gold->tokens) words.push_back(tok.surface);
      return {branching_tree(std::move(words), cfg.baseline_direction), 0};
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

inline RunResult run(const RunConfig& cfg) {
  if ((cfg.mode == Mode::ensemble || cfg.mode == Mode::selective) &&
      cfg.teacher_paths.empty())
    throw ValidationError("this mode requires at least one teacher file");
  if ((cfg.mode == Mode::oracle || cfg.mode == Mode::baseline) && !cfg.gold_path)
    throw ValidationError("this mode requires a gold file");

  const AlignedCorpus corpus = load_aligned(cfg);
  const std::size_t n = corpus.sentences.size();
  std::vector<detail::SentenceOutput> outputs(n);

  const int workers = cfg.workers > 1 ? cfg.workers : 1;
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i)
      outputs[i] = detail::run_sentence(corpus.sentences[i], cfg);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            outputs[i] = detail::run_sentence(corpus.sentences[i], cfg);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  if (!cfg.output_path.empty()) {
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out)
      throw ValidationError("cannot open output file '" + cfg.output_path + "'");
    for (const detail::SentenceOutput& o : outputs)
      out << render_bracketed(o.tree) << '\n';
    if (!out) throw ValidationError("write failed: '" + cfg.output_path + "'");
  }

  RunResult result;
  result.sentence_count = static_cast<int>(n);
  result.teacher_count = corpus.teacher_count;
  if (cfg.mode != Mode::baseline) {
    result.objectives.reserve(n);
    for (const detail::SentenceOutput& o : outputs)
      result.objectives.push_back(o.objective);
  }
  if (cfg.gold_path) {
    std::vector<Tree> preds;
    std::vector<Tree> golds;
    preds.reserve(n);
    golds.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds.push_back(outputs[i].tree);
      golds.push_back(*corpus.sentences[i].gold);
    }
    result.report = corpus_eval(preds, golds, cfg.eval);
  }
  return result;
}

}  // namespace treeavg
