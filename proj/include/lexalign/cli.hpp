#pragma once

// `lexalign` command-line front end. run_cli() is the whole program; the
// executable in tools/ only forwards argv.
//
// Exit codes: 0 success, 1 validation/usage error, 2 I/O error. Diagnostics
// are written as "error: <category>: <detail>".

#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lexalign/alignment.hpp"
#include "lexalign/concept_dataset.hpp"
#include "lexalign/config.hpp"
#include "lexalign/embedding_store.hpp"
#include "lexalign/evaluation.hpp"
#include "lexalign/parallel.hpp"
#include "lexalign/retrieval.hpp"

namespace lexalign {

namespace detail {

inline std::vector<Role> parse_roles(const std::string& s) {
  std::vector<Role> roles;
  for (auto part : text::split(s, ',')) roles.push_back(parse_role(text::trim(part)));
  if (roles.empty()) throw ValidationError("no roles given");
  return roles;
}

inline std::vector<std::size_t> parse_k_list(const std::string& s) {
  std::vector<std::size_t> ks;
  for (auto part : text::split(s, ',')) {
    std::uint64_t k = 0;
    if (!text::parse_count(text::trim(part), k) || k == 0) throw ValidationError("invalid k value '" + std::string(part) + "'");
    ks.push_back(k);
  }
  return ks;
}

inline void log_stage(std::ostream& err, const std::string& stage, const std::string& hash) {
  err << "lexalign " << stage << ": config_hash=" << hash << "\n";
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Concept-space alignment toolkit: datasets, Procrustes maps, CSLS retrieval, P@k reports.", "lexalign"};
  app.require_subcommand(1);
  long threads_flag = 0;
  app.add_option("--threads", threads_flag, "Worker threads (default: $LEXALIGN_THREADS or all cores)");

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Build the parallel concept table from per-language exports");
  std::vector<std::string> exports;
  std::string langs_arg;
  int max_depth = 5;
  bool lexfile = false;
  std::string build_out;
  build->add_option("--export", exports,
                    "Export file, as LANG=PATH or PATH (language taken from the file name); repeatable")
      ->required();
  build->add_option("--langs", langs_arg, "Comma-separated languages to intersect (default: all exports)");
  build->add_option("--max-filtered-depth", max_depth,
                    "Drop synsets with depth <= this value, root = depth 0 (default 5 drops the top five levels)");
  build->add_flag("--lexfile-categories", lexfile,
                  "Accept WordNet lexicographer file names in the category column (approximate heuristic)");
  build->add_option("--out", build_out, "Output concept table (TSV)")->required();

  // split
  auto* split = app.add_subcommand("split", "Sample a train/test seed dictionary from a concept table");
  std::string split_table_path;
  std::size_t train_per_category = 0;
  std::uint64_t split_seed = 0;
  std::string split_out;
  split->add_option("--table", split_table_path, "Concept table (TSV)")->required();
  split->add_option("--train-per-category", train_per_category, "Training concepts per category")->required();
  split->add_option("--seed", split_seed, "RNG seed")->required();
  split->add_option("--out", split_out, "Output dictionary (TSV)")->required();

  // align
  auto* align = app.add_subcommand("align", "Fit an orthogonal map from source to target space");
  std::string align_src, align_tgt, align_dict, align_out, align_roles = "train", align_pre = "unit";
  align->add_option("--src", align_src, "Source space (.cvec)")->required();
  align->add_option("--tgt", align_tgt, "Target space (.cvec)")->required();
  align->add_option("--dict", align_dict, "Seed dictionary (TSV)")->required();
  align->add_option("--out", align_out, "Output map (.omap)")->required();
  align->add_option("--roles", align_roles, "Dictionary roles used for fitting: train, test or train,test");
  align->add_option("--preprocess", align_pre, "unit | center_then_unit | none");

  // map
  auto* mapcmd = app.add_subcommand("map", "Apply an orthogonal map to a space");
  std::string map_path, map_src, map_out;
  mapcmd->add_option("--map", map_path, "Map (.omap)")->required();
  mapcmd->add_option("--src", map_src, "Space to transform (.cvec)")->required();
  mapcmd->add_option("--out", map_out, "Output space (.cvec)")->required();

  // retrieve
  auto* retr = app.add_subcommand("retrieve", "Rank target concepts for each query concept");
  std::string retr_q, retr_t, retr_out, retr_method = "csls", retr_dict, retr_roles = "test", retr_pre = "unit";
  std::size_t retr_k = 30, retr_csls_k = kDefaultCslsK, retr_block = 1024;
  retr->add_option("--queries", retr_q, "Query space, usually mapped (.cvec)")->required();
  retr->add_option("--targets", retr_t, "Target space (.cvec)")->required();
  retr->add_option("--out", retr_out, "Results file (TSV)")->required();
  retr->add_option("--k", retr_k, "Candidates per query (clamped to the target vocabulary)");
  retr->add_option("--method", retr_method, "csls | nn");
  retr->add_option("--csls-k", retr_csls_k, "CSLS neighbourhood size");
  retr->add_option("--dict", retr_dict, "Restrict queries to dictionary entries with --roles");
  retr->add_option("--roles", retr_roles, "Roles selected from --dict (default test)");
  retr->add_option("--preprocess", retr_pre, "Applied to queries and targets: unit | center_then_unit | none");
  retr->add_option("--block-size", retr_block, "Targets per similarity block");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Run an experiment config, or score a results file");
  std::string eval_config, eval_format = "json", eval_out, eval_results, eval_dict, eval_gold, eval_k = "1,5,10,30";
  eval->add_option("--config", eval_config, "Experiment config (key = value)");
  eval->add_option("--format", eval_format, "json | csv | markdown");
  eval->add_option("--out", eval_out, "Write the report here instead of stdout");
  eval->add_option("--results", eval_results, "Score an existing results file instead of running a config");
  eval->add_option("--dict", eval_dict, "With --results: dictionary whose test entries are scored");
  eval->add_option("--gold", eval_gold, "With --results: explicit gold TSV (default: shared ids)");
  eval->add_option("--k", eval_k, "With --results: comma-separated k values");

  // stats
  auto* stats = app.add_subcommand("stats", "Dataset statistics: category counts, senses, frequency, identical forms");
  std::string stats_table, stats_reference = "en";
  stats->add_option("--table", stats_table, "Concept table (TSV)")->required();
  stats->add_option("--reference", stats_reference, "Reference language for identical-form ratios");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) {
      err << "run 'lexalign --help' or 'lexalign <subcommand> --help' for usage\n";
      return 1;
    }
    return 0;
  }

  const std::size_t threads = resolve_threads(threads_flag);
  try {
    if (*build) {
      std::vector<WordnetExport> loaded;
      std::map<std::string, std::string> flags{{"max_filtered_depth", std::to_string(max_depth)},
                                               {"lexfile_categories", lexfile ? "1" : "0"}};
      std::vector<std::string> languages;
      for (const auto& arg : exports) {
        const auto eq = arg.find('=');
        const std::string lang = eq == std::string::npos ? language_from_path(arg) : arg.substr(0, eq);
        const std::string path = eq == std::string::npos ? arg : arg.substr(eq + 1);
        loaded.push_back(load_export(path, lang, lexfile));
        languages.push_back(lang);
        flags["export." + lang] = path;
      }
      if (!langs_arg.empty()) {
        languages.clear();
        for (auto l : text::split(langs_arg, ',')) languages.emplace_back(text::trim(l));
      }
      flags["langs"] = detail::join(languages, [](const std::string& s) { return s; });
      detail::log_stage(err, "build-dataset", flags_hash(flags));
      const auto table = build_table(loaded, languages, max_depth);
      save_table(table, build_out);
      err << "lexalign build-dataset: " << table.size() << " concepts\n";
    } else if (*split) {
      detail::log_stage(err, "split",
                        flags_hash({{"table", split_table_path},
                                    {"train_per_category", std::to_string(train_per_category)},
                                    {"seed", std::to_string(split_seed)}}));
      const auto table = load_table(split_table_path);
      const auto dict = split_table(table, train_per_category, split_seed);
      save_dictionary(dict, split_out);
      err << "lexalign split: " << dict.ids({Role::train}).size() << " train, " << dict.ids({Role::test}).size()
          << " test\n";
    } else if (*align) {
      const auto scheme = parse_preprocessing(align_pre);
      const auto roles = detail::parse_roles(align_roles);
      detail::log_stage(err, "align",
                        flags_hash({{"src", align_src}, {"tgt", align_tgt}, {"dict", align_dict},
                                    {"roles", align_roles}, {"preprocess", align_pre}}));
      const auto src = normalize_space(load_space(align_src), scheme);
      const auto tgt = normalize_space(load_space(align_tgt), scheme);
      const auto map = procrustes_fit(src, tgt, load_dictionary(align_dict), roles);
      if (map.degenerate_directions > 0)
        err << "warning: cross-covariance has " << map.degenerate_directions
            << " singular values below 1e-10 of the largest; the map is not unique in those directions\n";
      save_map(map, align_out);
    } else if (*mapcmd) {
      detail::log_stage(err, "map", flags_hash({{"map", map_path}, {"src", map_src}}));
      const auto map = load_map(map_path);
      const auto src = normalize_space(load_space(map_src), map.preprocessing);
      save_space(apply_map(map, src, threads), map_out);
    } else if (*retr) {
      const auto scheme = parse_preprocessing(retr_pre);
      const auto method = parse_method(retr_method);
      detail::log_stage(err, "retrieve",
                        flags_hash({{"queries", retr_q}, {"targets", retr_t}, {"k", std::to_string(retr_k)},
                                    {"method", std::string(to_string(method))},
                                    {"csls_k", std::to_string(retr_csls_k)}, {"dict", retr_dict},
                                    {"roles", retr_dict.empty() ? "" : retr_roles}, {"preprocess", retr_pre}}));
      const auto queries = normalize_space(load_space(retr_q), scheme);
      const auto targets = normalize_space(load_space(retr_t), scheme);
      RetrievalOptions opt;
      opt.threads = threads;
      opt.block_size = retr_block;
      if (!retr_dict.empty())
        for (const auto& id : load_dictionary(retr_dict).ids(detail::parse_roles(retr_roles)))
          opt.query_rows.push_back(queries.index_of(id));
      if (!retr_dict.empty() && opt.query_rows.empty()) throw ValidationError("no dictionary entries with the selected roles");
      const auto results = retrieve(queries, targets, std::min(retr_k, targets.size()), method, retr_csls_k, opt);
      save_results(results, retr_out);
    } else if (*eval) {
      const auto format = parse_report_format(eval_format);
      std::string rendered;
      if (!eval_config.empty()) {
        if (!eval_results.empty()) throw ValidationError("--config and --results are mutually exclusive");
        auto cfg = load_config(eval_config);
        if (threads_flag > 0) cfg.threads = static_cast<std::size_t>(threads_flag);
        detail::log_stage(err, "evaluate", config_hash(cfg));
        rendered = render_report(run_experiment(cfg), format);
      } else if (!eval_results.empty()) {
        const auto ks = detail::parse_k_list(eval_k);
        const std::string hash = flags_hash({{"results", eval_results}, {"dict", eval_dict}, {"gold", eval_gold}, {"k", eval_k}});
        detail::log_stage(err, "evaluate", hash);
        auto results = load_results(eval_results);
        if (!eval_dict.empty()) {
          const auto test = load_dictionary(eval_dict).ids({Role::test});
          const std::set<std::string> keep(test.begin(), test.end());
          std::erase_if(results, [&](const RetrievalResult& r) { return !keep.contains(r.query_id); });
        }
        GoldMap gold;
        if (!eval_gold.empty()) {
          gold = parse_gold(text::read_file(eval_gold));
        } else {
          for (const auto& r : results) gold.emplace(r.query_id, r.query_id);
        }
        EvalReport report{hash, {}};
        for (std::size_t k : ks) {
          EvalEntry e;
          e.mode = Mode::after;
          e.k = k;
          e.hits = count_hits(results, gold, k);
          e.n_queries = results.size();
          e.precision = precision_at_k(results, gold, k);
          e.config_hash = hash;
          report.entries.push_back(e);
        }
        rendered = render_report(report, format);
      } else {
        throw ValidationError("evaluate needs --config or --results");
      }
      if (eval_out.empty()) out << rendered;
      else text::write_file(eval_out, rendered);
    } else if (*stats) {
      detail::log_stage(err, "stats", flags_hash({{"table", stats_table}, {"reference", stats_reference}}));
      const auto table = load_table(stats_table);
      out << "concepts\t" << table.size() << "\n";
      for (const auto& s : category_stats(table)) {
        const std::string c(to_string(s.category));
        out << c << ".count\t" << s.records << "\n";
        auto field = [&](const char* name, const FieldStats& f) {
          out << c << "." << name << ".mean\t" << (f.mean ? text::format_fixed(*f.mean, 2) : "NA") << "\n";
          out << c << "." << name << ".median\t" << (f.median ? std::to_string(*f.median) : "NA") << "\n";
          out << c << "." << name << ".excluded\t" << f.excluded << "\n";
        };
        field("senses", s.senses);
        field("frequency", s.frequency);
      }
      if (table.has_language(stats_reference)) {
        for (const auto& lang : table.languages()) {
          if (lang == stats_reference) continue;
          const auto r = identical_form_ratio(table, lang, stats_reference);
          out << "identical_forms." << lang << "\t" << r.identical << "/" << r.total << "\t"
              << text::format_fixed(r.value(), 4) << "\n";
        }
      }
    }
  } catch (const IoError& e) {
    err << "error: " << e.category() << ": " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lexalign
