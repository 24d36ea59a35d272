// Command-line front end: build index variants, run topic batches under a
// chosen model and topic fields, evaluate runs against judgments, and
// generate stop-word / stem-rule resources from an existing index.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bowkit/bowkit.hpp"

namespace {

using namespace bowkit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

void print_issues(const std::string& source, const std::vector<ParseIssue>& issues, bool byte_offsets) {
  for (const auto& issue : issues)
    std::cerr << "warning: " << source << (byte_offsets ? " byte " : " line ") << issue.position << ": "
              << issue.message << "\n";
}

struct IndexArgs {
  std::string corpus_dir;
  std::string out_dir;
  std::string stoplist_path;
  std::string stem_rules_path;
  std::string digits = "keep";
  bool strict = false;
  unsigned threads = 1;
};

void run_index(const IndexArgs& args) {
  PipelineConfig config;
  if (args.digits == "keep")
    config.digits = DigitPolicy::kKeep;
  else if (args.digits == "drop")
    config.digits = DigitPolicy::kDrop;
  else
    throw UsageError("--digits must be keep or drop");
  if (!args.stoplist_path.empty()) config.stoplist = StopList::load_file(args.stoplist_path);
  if (!args.stem_rules_path.empty()) config.stemmer = StemRuleSet::load_file(args.stem_rules_path);

  const ParseMode mode = args.strict ? ParseMode::kStrict : ParseMode::kLenient;
  const auto files = list_corpus_files(args.corpus_dir);
  InvertedIndex index = [&] {
    if (args.threads <= 1) {
      // one-pass streaming build: documents never all live in memory
      IndexBuilder builder(std::move(config));
      for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open corpus file: " + path.string());
        DocumentParser parser(in, mode);
        while (auto doc = parser.next()) builder.add(*doc);
        print_issues(path.string(), parser.issues(), /*byte_offsets=*/true);
      }
      return builder.finish();
    }
    std::vector<Document> docs;
    for (const auto& path : files) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error("cannot open corpus file: " + path.string());
      std::vector<ParseIssue> issues;
      auto parsed = parse_documents(in, mode, &issues);
      print_issues(path.string(), issues, /*byte_offsets=*/true);
      docs.insert(docs.end(), std::make_move_iterator(parsed.begin()), std::make_move_iterator(parsed.end()));
    }
    return build_index(docs, std::move(config), args.threads);
  }();
  index.save(args.out_dir);
  const CollectionStats& stats = index.stats();
  std::cout << "documents: " << stats.num_docs << "\n"
            << "unique terms: " << stats.unique_terms << "\n"
            << "total tokens (post-pipeline): " << stats.total_tokens << "\n"
            << "raw tokens (tokenizer output): " << stats.raw_tokens << "\n"
            << "average document length: " << stats.avg_doclen << "\n"
            << "index written to: " << args.out_dir << "\n";
}

struct SearchArgs {
  std::string index_dir;
  std::string topics_path;
  std::string fields = "T";
  std::string model = "bm25";
  std::size_t k = 1000;
  std::string tag = "bowkit";
  std::string out_path;
  std::string fcg_path;
  std::vector<std::string> params;
  bool strict = false;
};

ModelParams parse_params(const std::vector<std::string>& overrides) {
  ModelParams params;
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    double parsed = 0.0;
    try {
      std::size_t used = 0;
      parsed = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw UsageError("--param " + key + ": bad numeric value '" + value + "'");
    }
    if (key == "k1")
      params.k1 = parsed;
    else if (key == "b")
      params.b = parsed;
    else if (key == "mu")
      params.mu = parsed;
    else if (key == "lambda")
      params.lambda = parsed;
    else if (key == "c")
      params.c = parsed;
    else
      throw UsageError("--param: unknown key '" + key + "' (expected k1, b, mu, lambda, or c)");
  }
  params.validate();
  return params;
}

void run_search(const SearchArgs& args) {
  const Model model = parse_model(args.model);
  const ModelParams params = parse_params(args.params);
  const std::string fields = validate_fields(args.fields);
  InvertedIndex index = load_index(args.index_dir);

  std::optional<ParadigmSet> paradigms;
  if (!args.fcg_path.empty()) {
    if (index.config().has_stemmer())
      throw Error(
          "inflectional variant expansion requires an index of plain word forms; "
          "index '" +
          args.index_dir + "' was built with a stemmer");
    paradigms = ParadigmSet::load_file(args.fcg_path);
  }

  std::ifstream topics_in(args.topics_path, std::ios::binary);
  if (!topics_in) throw Error("cannot open topics file: " + args.topics_path);
  std::vector<ParseIssue> issues;
  const auto topics = parse_topics(topics_in, args.strict ? ParseMode::kStrict : ParseMode::kLenient, &issues);
  print_issues(args.topics_path, issues, /*byte_offsets=*/true);

  std::vector<RunEntry> run;
  std::size_t skipped = 0;
  for (const auto& topic : topics) {
    Query query;
    try {
      query = build_query(topic, fields, index.config(), paradigms);
    } catch (const EmptyQueryError& e) {
      std::cerr << "warning: skipping topic '" << e.qid() << "': no query terms survived the pipeline\n";
      ++skipped;
      continue;
    }
    const auto results = search(index, query, model, params, args.k);
    const auto entries = make_run_entries(index, topic.qid, results, args.tag);
    run.insert(run.end(), entries.begin(), entries.end());
  }

  std::ofstream out(args.out_path, std::ios::binary);
  if (!out) throw Error("cannot write run file: " + args.out_path);
  write_run(run, out);
  if (!out) throw Error("write failed for run file: " + args.out_path);
  std::cout << "topics: " << topics.size() << " (skipped " << skipped << " empty)\n"
            << "run entries: " << run.size() << "\n"
            << "run written to: " << args.out_path << "\n";
}

struct EvaluateArgs {
  std::string run_path;
  std::string qrels_path;
  std::vector<std::uint32_t> pk = {5, 10, 100};
  std::uint64_t collection_size = 0;
  std::string format = "text";
  bool strict = false;
};

void run_evaluate(const EvaluateArgs& args) {
  if (args.format != "text" && args.format != "delim") throw UsageError("--format must be text or delim");
  const ParseMode mode = args.strict ? ParseMode::kStrict : ParseMode::kLenient;

  std::ifstream run_in(args.run_path, std::ios::binary);
  if (!run_in) throw Error("cannot open run file: " + args.run_path);
  std::vector<ParseIssue> run_issues;
  const auto run = parse_run(run_in, mode, &run_issues);
  print_issues(args.run_path, run_issues, /*byte_offsets=*/false);

  std::ifstream qrels_in(args.qrels_path, std::ios::binary);
  if (!qrels_in) throw Error("cannot open qrels file: " + args.qrels_path);
  auto qrels_result = parse_qrels(qrels_in, mode);
  print_issues(args.qrels_path, qrels_result.issues, /*byte_offsets=*/false);
  if (qrels_result.duplicates > 0)
    std::cerr << "warning: " << args.qrels_path << ": " << qrels_result.duplicates
              << " duplicate (qid, docid) judgments (last one kept)\n";

  EvalOptions options;
  options.pk = args.pk;
  if (options.pk.empty()) throw UsageError("--pk needs at least one cutoff");
  for (const auto k : options.pk)
    if (k < 1) throw UsageError("--pk cutoffs must be >= 1");
  if (args.collection_size > 0) options.collection_size = args.collection_size;

  const MetricsReport report = evaluate(run, qrels_result.qrels, options);
  std::cout << (args.format == "delim" ? render_delim(report) : render_text(report));
}

struct StopgenArgs {
  std::string index_dir;
  long top = 0;
};

void run_stopgen(const StopgenArgs& args) {
  InvertedIndex index = load_index(args.index_dir);
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& [term, entry] : index.lexicon()) counts.emplace(term, entry.cf);
  for (const auto& [term, cf] : top_frequency_terms(counts, args.top)) std::cout << term << "\t" << cf << "\n";
}

struct StemlearnArgs {
  std::string index_dir;
  long max_suffix_len = 4;
  long min_freq = 2;
  long min_stem_len = 2;
  std::string out_path;
};

void run_stemlearn(const StemlearnArgs& args) {
  InvertedIndex index = load_index(args.index_dir);
  std::unordered_set<std::string> lexicon;
  for (const auto& [term, entry] : index.lexicon()) lexicon.insert(term);
  const StemRuleSet rules = learn_suffix_rules(lexicon, args.max_suffix_len, args.min_freq, args.min_stem_len);
  rules.save_file(args.out_path);
  std::cout << "lexicon terms: " << lexicon.size() << "\n"
            << "suffix rules learned: " << rules.size() << "\n"
            << "rules written to: " << args.out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bag-of-words ad hoc retrieval toolkit"};
  app.require_subcommand(1);

  IndexArgs index_args;
  auto* index_cmd = app.add_subcommand("index", "Build an inverted index from a corpus directory");
  index_cmd->add_option("--corpus", index_args.corpus_dir, "Directory of document files")->required();
  index_cmd->add_option("--out", index_args.out_dir, "Output index directory")->required();
  index_cmd->add_option("--stoplist", index_args.stoplist_path, "Stop-word file (one term per line)");
  index_cmd->add_option("--stem-rules", index_args.stem_rules_path, "Suffix-stripping rule file");
  index_cmd->add_option("--digits", index_args.digits, "Digit token policy: keep or drop (default keep)");
  index_cmd->add_option("--threads", index_args.threads, "Worker threads for in-memory builds");
  index_cmd->add_flag("--strict", index_args.strict, "Fail on the first malformed document");
  index_cmd->callback([&] { run_index(index_args); });

  SearchArgs search_args;
  auto* search_cmd = app.add_subcommand("search", "Rank documents for a batch of topics");
  search_cmd->add_option("--index", search_args.index_dir, "Index directory")->required();
  search_cmd->add_option("--topics", search_args.topics_path, "Topic file")->required();
  search_cmd->add_option("--fields", search_args.fields, "Topic fields: T, TD, or TDN (default T)");
  search_cmd->add_option("--model", search_args.model,
                         "Retrieval model: tfidf, bm25, dirichlet_lm, hiemstra_lm, in_expb2 (default bm25)");
  search_cmd->add_option("--k", search_args.k, "Result depth per topic (default 1000)");
  search_cmd->add_option("--tag", search_args.tag, "Run tag written to the output (default bowkit)");
  search_cmd->add_option("--out", search_args.out_path, "Run file to write")->required();
  search_cmd->add_option("--fcg", search_args.fcg_path, "Paradigm file enabling query variant expansion");
  search_cmd->add_option("--param", search_args.params, "Model parameter override key=value (repeatable)");
  search_cmd->add_flag("--strict", search_args.strict, "Fail on the first malformed topic");
  search_cmd->callback([&] { run_search(search_args); });

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a run against relevance judgments");
  eval_cmd->add_option("--run", eval_args.run_path, "Run file")->required();
  eval_cmd->add_option("--qrels", eval_args.qrels_path, "Judgment file")->required();
  eval_cmd->add_option("--pk", eval_args.pk, "Precision cutoffs (default 5,10,100)")->delimiter(',');
  eval_cmd->add_option("--collection-size", eval_args.collection_size,
                       "Total documents in the collection; enables fallout");
  eval_cmd->add_option("--format", eval_args.format, "Output format: text or delim (default text)");
  eval_cmd->add_flag("--strict", eval_args.strict, "Fail on the first malformed line");
  eval_cmd->callback([&] { run_evaluate(eval_args); });

  StopgenArgs stopgen_args;
  auto* stopgen_cmd = app.add_subcommand("stopgen", "Print the highest-frequency index terms for curation");
  stopgen_cmd->add_option("--index", stopgen_args.index_dir, "Index directory")->required();
  stopgen_cmd->add_option("--top", stopgen_args.top, "Number of terms to print")->required();
  stopgen_cmd->callback([&] { run_stopgen(stopgen_args); });

  StemlearnArgs stemlearn_args;
  auto* stemlearn_cmd = app.add_subcommand("stemlearn", "Derive suffix-stripping rules from an index lexicon");
  stemlearn_cmd->add_option("--index", stemlearn_args.index_dir, "Index directory")->required();
  stemlearn_cmd->add_option("--max-suffix-len", stemlearn_args.max_suffix_len, "Longest suffix to consider");
  stemlearn_cmd->add_option("--min-freq", stemlearn_args.min_freq, "Minimum suffix support in the lexicon");
  stemlearn_cmd->add_option("--min-stem-len", stemlearn_args.min_stem_len, "Shortest stem a rule may leave");
  stemlearn_cmd->add_option("--out", stemlearn_args.out_path, "Rule file to write")->required();
  stemlearn_cmd->callback([&] { run_stemlearn(stemlearn_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
