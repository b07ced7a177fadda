#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "support/helpers.hpp"
#include "treeavg/treeavg.hpp"

using namespace treeavg;
using testsupport::fig5_average;
using testsupport::fig5_teacher_lines;
using testsupport::sample_binary_tree;

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("treeavg_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name,
                   const std::vector<std::string>& lines) const {
    const fs::path p = path / name;
    std::ofstream out(p, std::ios::binary);
    for (const std::string& line : lines) out << line << '\n';
    return p.string();
  }
  std::string file_path(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("load_aligned bundles teachers per line") {
  TempDir dir;
  RunConfig cfg;
  cfg.teacher_paths = {
      dir.file("t1.txt", {"((a b) c)", "(a (b c))", "((a b) (c d))"}),
      dir.file("t2.txt", {"(a (b c))", "(a (b c))", "(a ((b c) d))"})};
  const AlignedCorpus corpus = load_aligned(cfg);
  CHECK(corpus.teacher_count == 2);
  REQUIRE(corpus.sentences.size() == 3);
  CHECK(corpus.sentences[0].teachers.size() == 2);
  CHECK(corpus.sentences[2].id == 3);
  CHECK(!corpus.sentences[0].gold.has_value());
}

TEST_CASE("line count mismatch names both files and counts") {
  TempDir dir;
  RunConfig cfg;
  cfg.teacher_paths = {dir.file("t1.txt", {"(a b)", "(a b)"}),
                       dir.file("t2.txt", {"(a b)", "(a b)", "(a b)"})};
  try {
    load_aligned(cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("t1.txt") != std::string::npos);
    CHECK(msg.find("t2.txt") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
}

TEST_CASE("token mismatch reports file, line, and first differing token") {
  TempDir dir;
  std::vector<std::string> a(7, "(the (dog barks))");
  std::vector<std::string> b(7, "(the (dog barks))");
  b[6] = "(the (dogs bark))";
  RunConfig cfg;
  cfg.teacher_paths = {dir.file("t1.txt", a), dir.file("t2.txt", b)};
  try {
    load_aligned(cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("t2.txt") != std::string::npos);
    CHECK(msg.find("line 7") != std::string::npos);
    CHECK(msg.find("token 2") != std::string::npos);
    CHECK(msg.find("'dogs'") != std::string::npos);
    CHECK(msg.find("'dog'") != std::string::npos);
  }
}

TEST_CASE("blank lines are rejected") {
  TempDir dir;
  RunConfig cfg;
  cfg.teacher_paths = {dir.file("t1.txt", {"(a b)", "", "(a b)"})};
  cfg.mode = Mode::ensemble;
  cfg.output_path = dir.file_path("out.txt");
  CHECK_THROWS_AS(run(cfg), ValidationError);
}

TEST_CASE("parse errors carry file and line") {
  TempDir dir;
  RunConfig cfg;
  cfg.teacher_paths = {dir.file("t1.txt", {"(a b)", "((a b"})};
  try {
    load_aligned(cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("unbalanced") != std::string::npos);
  }
}

TEST_CASE("ensemble run on the worked example") {
  TempDir dir;
  RunConfig cfg;
  const auto lines = fig5_teacher_lines();
  for (std::size_t i = 0; i < lines.size(); ++i)
    cfg.teacher_paths.push_back(
        dir.file("t" + std::to_string(i) + ".txt", {lines[i]}));
  cfg.mode = Mode::ensemble;
  cfg.output_path = dir.file_path("out.txt");
  const RunResult result = run(cfg);
  CHECK(result.sentence_count == 1);
  CHECK(result.teacher_count == 4);
  REQUIRE(result.objectives.size() == 1);
  CHECK(result.objectives[0] == 31);
  CHECK(slurp(cfg.output_path) == std::string(fig5_average) + "\n");
  CHECK(!result.report.has_value());
}

TEST_CASE("single-teacher ensemble reproduces the teacher file") {
  TempDir dir;
  std::mt19937 rng(7401);
  std::vector<std::string> lines;
  for (int i = 0; i < 25; ++i)
    lines.push_back(render_bracketed(sample_binary_tree(2 + i % 9, rng)));
  RunConfig cfg;
  cfg.teacher_paths = {dir.file("t.txt", lines)};
  cfg.mode = Mode::ensemble;
  cfg.output_path = dir.file_path("out.txt");
  run(cfg);
  CHECK(slurp(cfg.output_path) == slurp(cfg.teacher_paths[0]));
}

TEST_CASE("baseline over short gold sentences skips everything") {
  TempDir dir;
  RunConfig cfg;
  cfg.mode = Mode::baseline;
  cfg.baseline_direction = Direction::right;
  cfg.gold_path = dir.file("gold.txt", {"(S w1 w2)", "(S a b)"});
  cfg.gold_dialect = TreeDialect::labeled;
  cfg.output_path = dir.file_path("out.txt");
  const RunResult result = run(cfg);
  REQUIRE(result.report.has_value());
  CHECK(result.report->skipped == 2);
  CHECK(!result.report->corpus_f1.has_value());
}

TEST_CASE("oracle mode scores a non-binary gold") {
  TempDir dir;
  RunConfig cfg;
  cfg.mode = Mode::oracle;
  cfg.gold_path = dir.file("gold.txt", {"(A (B w1 w2 w3) (C w4 w5))"});
  cfg.output_path = dir.file_path("out.txt");
  const RunResult result = run(cfg);
  REQUIRE(result.report.has_value());
  REQUIRE(result.report->corpus_f1.has_value());
  // all gold non-trivial spans recovered; the oracle tree has 3 of them
  CHECK(*result.report->corpus_f1 == Catch::Approx(0.8));  // 2*2/(3+2)
  // every one of the gold's 8 spans (5 words, B, C, A) is hit
  REQUIRE(result.objectives.size() == 1);
  CHECK(result.objectives[0] == 8);
}

TEST_CASE("runs are deterministic and worker count never changes output") {
  TempDir dir;
  std::mt19937 rng(7402);
  std::vector<std::vector<std::string>> teacher_lines(3);
  for (int i = 0; i < 40; ++i) {
    const int n = 2 + i % 10;
    for (auto& lines : teacher_lines)
      lines.push_back(render_bracketed(sample_binary_tree(n, rng)));
  }
  RunConfig cfg;
  for (std::size_t f = 0; f < teacher_lines.size(); ++f)
    cfg.teacher_paths.push_back(
        dir.file("t" + std::to_string(f) + ".txt", teacher_lines[f]));
  cfg.mode = Mode::ensemble;
  cfg.output_path = dir.file_path("out1.txt");
  run(cfg);
  cfg.output_path = dir.file_path("out2.txt");
  run(cfg);
  CHECK(slurp(dir.file_path("out1.txt")) == slurp(dir.file_path("out2.txt")));
  cfg.workers = 4;
  cfg.output_path = dir.file_path("out4.txt");
  run(cfg);
  CHECK(slurp(dir.file_path("out1.txt")) == slurp(dir.file_path("out4.txt")));
}

TEST_CASE("pre-ensemble punctuation stripping aligns outputs with stripped gold") {
  TempDir dir;
  RunConfig cfg;
  cfg.teacher_paths = {dir.file("t1.txt", {"(((a b) c) .)"}),
                       dir.file("t2.txt", {"((a (b c)) .)"})};
  cfg.strip_punct_pre = true;
  cfg.mode = Mode::ensemble;
  cfg.output_path = dir.file_path("out.txt");
  const RunResult result = run(cfg);
  CHECK(result.sentence_count == 1);
  const Tree out = parse_bracketed(slurp(cfg.output_path), TreeDialect::unlabeled);
  CHECK(out.size() == 3);  // the period is gone before ensembling
}

TEST_CASE("a sentence of only punctuation fails pre-stripping loudly") {
  TempDir dir;
  RunConfig cfg;
  cfg.teacher_paths = {dir.file("t1.txt", {"(. ,)"})};
  cfg.strip_punct_pre = true;
  cfg.mode = Mode::ensemble;
  cfg.output_path = dir.file_path("out.txt");
  CHECK_THROWS_AS(run(cfg), ValidationError);
}

TEST_CASE("gold evaluation report is attached when a gold file is given") {
  TempDir dir;
  RunConfig cfg;
  cfg.teacher_paths = {dir.file("t1.txt", {"((a b) (c d))"}),
                       dir.file("t2.txt", {"((a b) (c d))"})};
  cfg.gold_path = dir.file("gold.txt", {"(S (NP a b) (VP c d))"});
  cfg.mode = Mode::ensemble;
  cfg.output_path = dir.file_path("out.txt");
  const RunResult result = run(cfg);
  REQUIRE(result.report.has_value());
  CHECK(result.report->corpus_f1 == 1.0);
}

TEST_CASE("mode preconditions") {
  RunConfig cfg;
  cfg.mode = Mode::ensemble;
  CHECK_THROWS_AS(run(cfg), ValidationError);  // no teachers
  cfg.mode = Mode::oracle;
  CHECK_THROWS_AS(run(cfg), ValidationError);  // no gold
}

TEST_CASE("unreadable input and unwritable output") {
  TempDir dir;
  RunConfig cfg;
  cfg.teacher_paths = {dir.file_path("missing.txt")};
  cfg.mode = Mode::ensemble;
  cfg.output_path = dir.file_path("out.txt");
  CHECK_THROWS_AS(run(cfg), ValidationError);

  cfg.teacher_paths = {dir.file("t1.txt", {"(a b)"})};
  cfg.output_path = dir.file_path("no_such_dir/out.txt");
  CHECK_THROWS_AS(run(cfg), ValidationError);
}
