// Command-line front end: ensembling, evaluation, agreement matrices,
// oracles, baselines, and breakdown reports over bracketed-tree files.
// Human tables print percentages with one decimal; TSV output keeps raw
// fractions. Exit codes: 0 success, 1 validation error, 2 usage error.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "treeavg/treeavg.hpp"

namespace {

using namespace treeavg;

std::string format_fraction(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v * 100.0);
  return buf;
}

std::string basename_of(const std::string& path) {
  const auto pos = path.find_last_of('/');
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

TreeDialect dialect_from_name(const std::string& name) {
  if (name == "labeled") return TreeDialect::labeled;
  if (name == "unlabeled") return TreeDialect::unlabeled;
  return TreeDialect::auto_detect;
}

std::vector<LengthBucket> parse_buckets(const std::string& text) {
  std::vector<LengthBucket> buckets;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string part = text.substr(pos, comma - pos);
    LengthBucket b;
    if (!part.empty() && part.back() == '+') {
      b.lo = std::stoi(part.substr(0, part.size() - 1));
      b.hi = INT_MAX;
    } else {
      const auto dash = part.find('-');
      if (dash == std::string::npos)
        throw CLI::ValidationError("--buckets", "expected 'lo-hi' or 'lo+': " + part);
      b.lo = std::stoi(part.substr(0, dash));
      b.hi = std::stoi(part.substr(dash + 1));
    }
    buckets.push_back(b);
    pos = comma + 1;
  }
  return buckets;
}

void print_eval_tsv(std::ostream& out, const EvalReport& report) {
  out << "id\tlength\tf1\n";
  for (const SentenceScore& s : report.sentences)
    out << s.id << '\t' << s.length << '\t'
        << (s.f1 ? format_fraction(*s.f1) : std::string("NA")) << '\n';
  out << "corpus\t"
      << (report.sentences.size() - static_cast<std::size_t>(report.skipped))
      << '\t'
      << (report.corpus_f1 ? format_fraction(*report.corpus_f1)
                           : std::string("NA"))
      << '\n';
}

void print_human_summary(const EvalReport& report) {
  std::cerr << "scored " << (report.sentences.size() - report.skipped)
            << " sentences (" << report.skipped << " skipped)";
  if (report.corpus_f1)
    std::cerr << ", corpus F1 " << format_percent(*report.corpus_f1);
  std::cerr << "\n";
}

struct CommonOptions {
  std::vector<std::string> punct;
  int min_gold = 1;
  std::string buckets;
  int workers = 1;

  EvalConfig eval_config() const {
    EvalConfig cfg;
    if (!punct.empty())
      cfg.punctuation = std::set<std::string>(punct.begin(), punct.end());
    cfg.min_gold_constituents = min_gold;
    if (!buckets.empty()) cfg.length_buckets = parse_buckets(buckets);
    validate_eval_config(cfg);
    return cfg;
  }
};

void add_eval_flags(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--punct", opts.punct,
                  "Punctuation surface forms to ignore (default: . , : ; `` '' "
                  "' ` ? ! -LRB- -RRB- ... -- -)");
  cmd->add_option("--min-gold", opts.min_gold,
                  "Minimum filtered gold constituents for a sentence to be "
                  "scored (default 1)");
}

int run_mode(Mode mode, RunConfig cfg, const std::string& report_path) {
  const RunResult result = run(cfg);
  if (mode == Mode::ensemble || mode == Mode::selective ||
      mode == Mode::oracle) {
    double mean = 0.0;
    if (!result.objectives.empty())
      mean = std::accumulate(result.objectives.begin(), result.objectives.end(),
                             0.0) /
             static_cast<double>(result.objectives.size());
    std::cout << result.sentence_count
              << (result.sentence_count == 1 ? " sentence" : " sentences");
    if (mode != Mode::oracle) std::cout << ", K=" << result.teacher_count;
    std::cout << ", mean objective " << mean << "\n";
  } else {
    std::cout << result.sentence_count
              << (result.sentence_count == 1 ? " sentence" : " sentences")
              << "\n";
  }
  if (result.report) {
    if (report_path.empty() || report_path == "-") {
      print_eval_tsv(std::cout, *result.report);
    } else {
      std::ofstream out(report_path, std::ios::binary);
      if (!out)
        throw ValidationError("cannot open report file '" + report_path + "'");
      print_eval_tsv(out, *result.report);
    }
    print_human_summary(*result.report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "treeavg: exact minimum-risk averaging of constituency trees over "
      "multiple parsers' outputs, with evalb-style evaluation tools"};
  app.require_subcommand(1);

  // ensemble / mbr-select
  struct EnsembleArgs {
    std::vector<std::string> teachers;
    std::string out;
    std::string gold;
    std::string report;
    bool strip_pre = false;
    std::string teacher_dialect = "unlabeled";
    std::string gold_dialect = "labeled";
    CommonOptions common;
  };
  EnsembleArgs ens;
  auto add_ensemble_flags = [&](CLI::App* cmd) {
    cmd->add_option("--teachers", ens.teachers, "Teacher tree files")
        ->required()
        ->expected(-1);
    cmd->add_option("--out", ens.out, "Output tree file")->required();
    cmd->add_option("--gold", ens.gold, "Reference trees for evaluation");
    cmd->add_option("--report", ens.report,
                    "Where to write the TSV report (default stdout)");
    cmd->add_flag("--strip-punct-pre", ens.strip_pre,
                  "Strip punctuation before ensembling instead of only at "
                  "evaluation time");
    cmd->add_option("--teacher-dialect", ens.teacher_dialect,
                    "labeled|unlabeled|auto (default unlabeled)");
    cmd->add_option("--gold-dialect", ens.gold_dialect,
                    "labeled|unlabeled|auto (default labeled)");
    cmd->add_option("--workers", ens.common.workers,
                    "Worker threads (default 1)");
    add_eval_flags(cmd, ens.common);
  };
  CLI::App* cmd_ensemble = app.add_subcommand(
      "ensemble", "Average the teachers' trees (searches all binary trees)");
  add_ensemble_flags(cmd_ensemble);
  CLI::App* cmd_select = app.add_subcommand(
      "mbr-select", "Pick the lowest-risk tree among the teachers' own trees");
  add_ensemble_flags(cmd_select);

  // eval
  struct EvalArgs {
    std::string pred, gold;
    std::string pred_dialect = "unlabeled", gold_dialect = "labeled";
    CommonOptions common;
  } ev;
  CLI::App* cmd_eval =
      app.add_subcommand("eval", "Score predictions against references (TSV)");
  cmd_eval->add_option("--pred", ev.pred, "Predicted trees")->required();
  cmd_eval->add_option("--gold", ev.gold, "Reference trees")->required();
  cmd_eval->add_option("--pred-dialect", ev.pred_dialect,
                       "labeled|unlabeled|auto (default unlabeled)");
  cmd_eval->add_option("--gold-dialect", ev.gold_dialect,
                       "labeled|unlabeled|auto (default labeled)");
  add_eval_flags(cmd_eval, ev.common);

  // agree
  struct AgreeArgs {
    std::vector<std::string> inputs;
    std::string dialect = "unlabeled";
    CommonOptions common;
  } ag;
  CLI::App* cmd_agree = app.add_subcommand(
      "agree", "Pairwise F1 matrix between model outputs (percent)");
  cmd_agree->add_option("--inputs", ag.inputs, "Two or more tree files")
      ->required()
      ->expected(-1);
  cmd_agree->add_option("--dialect", ag.dialect,
                        "labeled|unlabeled|auto (default unlabeled)");
  add_eval_flags(cmd_agree, ag.common);

  // oracle
  struct OracleArgs {
    std::string gold, out, report;
    std::string gold_dialect = "labeled";
    CommonOptions common;
  } orc;
  CLI::App* cmd_oracle = app.add_subcommand(
      "oracle", "Best achievable binary tree against each gold tree");
  cmd_oracle->add_option("--gold", orc.gold, "Reference trees")->required();
  cmd_oracle->add_option("--out", orc.out, "Output tree file")->required();
  cmd_oracle->add_option("--report", orc.report,
                         "Where to write the TSV report (default stdout)");
  cmd_oracle->add_option("--gold-dialect", orc.gold_dialect,
                         "labeled|unlabeled|auto (default labeled)");
  cmd_oracle->add_option("--workers", orc.common.workers,
                         "Worker threads (default 1)");
  add_eval_flags(cmd_oracle, orc.common);

  // baseline
  struct BaselineArgs {
    std::string direction;
    std::string gold, out, report;
    std::string gold_dialect = "labeled";
    CommonOptions common;
  } base;
  CLI::App* cmd_baseline = app.add_subcommand(
      "baseline", "Left- or right-branching trees over the gold tokens");
  cmd_baseline
      ->add_option("--direction", base.direction, "left or right")
      ->required()
      ->check(CLI::IsMember({"left", "right"}));
  cmd_baseline->add_option("--gold", base.gold, "Reference trees")->required();
  cmd_baseline->add_option("--out", base.out, "Output tree file")->required();
  cmd_baseline->add_option("--report", base.report,
                           "Where to write the TSV report (default stdout)");
  cmd_baseline->add_option("--gold-dialect", base.gold_dialect,
                           "labeled|unlabeled|auto (default labeled)");
  add_eval_flags(cmd_baseline, base.common);

  // by-length / by-label
  struct BreakdownArgs {
    std::string pred, gold;
    std::string pred_dialect = "unlabeled", gold_dialect = "labeled";
    std::vector<std::string> labels = {"NP", "PP", "VP", "S", "SBAR"};
    CommonOptions common;
  } br;
  CLI::App* cmd_by_length = app.add_subcommand(
      "by-length", "Mean F1 per sentence-length bucket (TSV)");
  cmd_by_length->add_option("--pred", br.pred, "Predicted trees")->required();
  cmd_by_length->add_option("--gold", br.gold, "Reference trees")->required();
  cmd_by_length->add_option(
      "--buckets", br.common.buckets,
      "Comma-separated lo-hi ranges, last may be 'lo+' (default "
      "1-10,11-20,21-30,31-40,41+)");
  cmd_by_length->add_option("--pred-dialect", br.pred_dialect,
                            "labeled|unlabeled|auto (default unlabeled)");
  cmd_by_length->add_option("--gold-dialect", br.gold_dialect,
                            "labeled|unlabeled|auto (default labeled)");
  add_eval_flags(cmd_by_length, br.common);

  CLI::App* cmd_by_label = app.add_subcommand(
      "by-label", "Recall of gold constituents per label (TSV)");
  cmd_by_label->add_option("--pred", br.pred, "Predicted trees")->required();
  cmd_by_label->add_option("--gold", br.gold, "Labeled reference trees")
      ->required();
  cmd_by_label->add_option("--labels", br.labels,
                           "Labels to report (default NP PP VP S SBAR)");
  cmd_by_label->add_option("--pred-dialect", br.pred_dialect,
                           "labeled|unlabeled|auto (default unlabeled)");
  cmd_by_label->add_option("--gold-dialect", br.gold_dialect,
                           "labeled|unlabeled|auto (default labeled)");
  add_eval_flags(cmd_by_label, br.common);

  // enumerate
  struct EnumArgs {
    int n = 0;
    int cap = kDefaultEnumerationCap;
  } en;
  CLI::App* cmd_enum = app.add_subcommand(
      "enumerate", "Print every binary bracketing of n tokens");
  cmd_enum->add_option("--n", en.n, "Token count")->required();
  cmd_enum->add_option("--cap", en.cap,
                       "Enumeration cap (default 12; Catalan growth)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_ensemble || *cmd_select) {
      RunConfig cfg;
      cfg.mode = *cmd_ensemble ? Mode::ensemble : Mode::selective;
      cfg.teacher_paths = ens.teachers;
      if (!ens.gold.empty()) cfg.gold_path = ens.gold;
      cfg.output_path = ens.out;
      cfg.strip_punct_pre = ens.strip_pre;
      cfg.workers = ens.common.workers;
      cfg.eval = ens.common.eval_config();
      cfg.teacher_dialect = dialect_from_name(ens.teacher_dialect);
      cfg.gold_dialect = dialect_from_name(ens.gold_dialect);
      return run_mode(cfg.mode, cfg, ens.report);
    }
    if (*cmd_eval) {
      const auto preds = load_tree_file(ev.pred, dialect_from_name(ev.pred_dialect));
      const auto golds = load_tree_file(ev.gold, dialect_from_name(ev.gold_dialect));
      const EvalReport report = corpus_eval(preds, golds, ev.common.eval_config());
      print_eval_tsv(std::cout, report);
      print_human_summary(report);
      return 0;
    }
    if (*cmd_agree) {
      if (ag.inputs.size() < 2)
        throw ValidationError("agree needs at least two input files");
      std::vector<std::vector<Tree>> models;
      for (const std::string& path : ag.inputs)
        models.push_back(load_tree_file(path, dialect_from_name(ag.dialect)));
      const auto matrix = agreement_matrix(models, ag.common.eval_config());
      std::cout << "model";
      for (const std::string& path : ag.inputs) std::cout << '\t' << basename_of(path);
      std::cout << '\n';
      for (std::size_t i = 0; i < matrix.size(); ++i) {
        std::cout << basename_of(ag.inputs[i]);
        for (std::size_t j = 0; j < matrix[i].size(); ++j)
          std::cout << '\t'
                    << (matrix[i][j] ? format_percent(*matrix[i][j])
                                     : std::string("NA"));
        std::cout << '\n';
      }
      return 0;
    }
    if (*cmd_oracle) {
      RunConfig cfg;
      cfg.mode = Mode::oracle;
      cfg.gold_path = orc.gold;
      cfg.output_path = orc.out;
      cfg.workers = orc.common.workers;
      cfg.eval = orc.common.eval_config();
      cfg.gold_dialect = dialect_from_name(orc.gold_dialect);
      return run_mode(Mode::oracle, cfg, orc.report);
    }
    if (*cmd_baseline) {
      RunConfig cfg;
      cfg.mode = Mode::baseline;
      cfg.baseline_direction =
          base.direction == "left" ? Direction::left : Direction::right;
      cfg.gold_path = base.gold;
      cfg.output_path = base.out;
      cfg.eval = base.common.eval_config();
      cfg.gold_dialect = dialect_from_name(base.gold_dialect);
      return run_mode(Mode::baseline, cfg, base.report);
    }
    if (*cmd_by_length) {
      const auto preds = load_tree_file(br.pred, dialect_from_name(br.pred_dialect));
      const auto golds = load_tree_file(br.gold, dialect_from_name(br.gold_dialect));
      const auto buckets = f1_by_length(preds, golds, br.common.eval_config());
      std::cout << "bucket\tcount\tmean_f1\n";
      for (const BucketScore& b : buckets) {
        std::cout << b.bucket.lo << '-';
        if (b.bucket.hi == INT_MAX)
          std::cout << "inf";
        else
          std::cout << b.bucket.hi;
        std::cout << '\t' << b.count << '\t'
                  << (b.mean_f1 ? format_fraction(*b.mean_f1) : std::string("NA"))
                  << '\n';
      }
      return 0;
    }
    if (*cmd_by_label) {
      const auto preds = load_tree_file(br.pred, dialect_from_name(br.pred_dialect));
      const auto golds = load_tree_file(br.gold, dialect_from_name(br.gold_dialect));
      const auto recalls =
          recall_by_label(preds, golds, br.common.eval_config(), br.labels);
      std::cout << "label\tcount\trecall\n";
      for (const LabelRecall& r : recalls)
        std::cout << r.label << '\t' << r.gold_count << '\t'
                  << (r.recall ? format_fraction(*r.recall) : std::string("NA"))
                  << '\n';
      return 0;
    }
    if (*cmd_enum) {
      for (const Tree& t : enumerate_binary_trees(en.n, en.cap))
        std::cout << render_bracketed(t) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
