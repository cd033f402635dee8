/*
 * Copyright (c) 2026, the rdma-lit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdmalit/checker.hpp"
#include "rdmalit/parser.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rdmalit;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitResource = 3;

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f.good()) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

LitmusTest load(const std::string& path) {
  return parse_litmus(slurp(path), fs::path(path).stem().string());
}

json verdict_json(const Verdict& v) {
  json j;
  j["test"] = v.test;
  j["model"] = v.model;
  json as = json::array();
  for (const auto& r : v.results) {
    json a;
    a["expr"] = r.text;
    a["expected"] = r.expect_allowed ? "allowed" : "forbidden";
    a["observed"] = r.observed_allowed ? "allowed" : "forbidden";
    a["pass"] = r.pass();
    if (!r.witness.empty()) a["witness"] = r.witness;
    as.push_back(std::move(a));
  }
  j["assertions"] = std::move(as);
  json outs = json::array();
  for (const Outcome& o : v.outcomes) {
    json m;
    for (std::size_t i = 0; i < v.vocab.entries.size(); ++i)
      m[v.vocab.entries[i].name] = o[i];
    outs.push_back(std::move(m));
  }
  j["outcomes"] = std::move(outs);
  j["stats"] = {{"paths", v.stats.paths},
                {"candidates", v.stats.candidates},
                {"consistent", v.stats.consistent},
                {"states", v.stats.states},
                {"deadlocks", v.stats.deadlocks},
                {"exhausted_paths", v.stats.exhausted_paths},
                {"time_ms", v.stats.time_ms}};
  if (v.resource_exceeded) j["resource_exceeded"] = true;
  if (!v.error.empty()) j["error"] = v.error;
  return j;
}

void print_verdict(const Verdict& v) {
  for (const auto& r : v.results)
    std::cout << (r.pass() ? "PASS" : "FAIL") << "  " << v.test << " [" << v.model << "]  "
              << r.text << "  expected " << (r.expect_allowed ? "allowed" : "forbidden")
              << ", observed " << (r.observed_allowed ? "allowed" : "forbidden") << "\n";
  if (v.results.empty())
    std::cout << "PASS  " << v.test << " [" << v.model << "]  (no assertions)\n";
  std::cout << "  outcomes:";
  for (const Outcome& o : v.outcomes) std::cout << "  {" << outcome_to_string(v.vocab, o) << "}";
  std::cout << "\n  stats: " << v.stats.paths << " unfoldings, " << v.stats.candidates
            << " candidates, " << v.stats.consistent << " consistent, " << v.stats.states
            << " states, " << v.stats.time_ms << " ms\n";
  if (v.resource_exceeded) std::cout << "  RESOURCE CAP EXCEEDED\n";
  if (!v.error.empty()) std::cout << "  ERROR: " << v.error << "\n";
}

int exit_code(const Verdict& v) {
  if (v.resource_exceeded) return kExitResource;
  return v.all_pass() ? 0 : kExitFail;
}

void write_witnesses(const Verdict& v, const std::string& dir) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < v.results.size(); ++i) {
    if (v.results[i].witness.empty()) continue;
    std::ofstream f(dir + "/" + v.test + ".assert" + std::to_string(i) + ".witness");
    f << v.results[i].witness;
  }
}

struct CorpusRow {
  std::string file, model, result;
  std::size_t assertions = 0;
  long time_ms = 0;
  int code = 0;
};

CorpusRow run_one(const fs::path& path, const CheckOptions& opt) {
  CorpusRow row;
  row.file = path.filename().string();
  try {
    LitmusTest t = load(path.string());
    for (const std::string& m : default_models(t)) {
      Verdict v = run_model(t, m, opt);
      row.model += (row.model.empty() ? "" : "+") + m;
      row.assertions = v.results.size();
      row.time_ms += v.stats.time_ms;
      int c = exit_code(v);
      if (c > row.code) row.code = c;
      if (c != 0)
        for (const auto& r : v.results)
          if (!r.pass()) row.result += (row.result.empty() ? "" : "; ") + r.text;
    }
    if (row.code == 0) row.result = "PASS";
  } catch (const ParseError& e) {
    row.result = std::string("parse error: ") + e.what();
    row.code = kExitParse;
  } catch (const std::exception& e) {
    row.result = std::string("error: ") + e.what();
    row.code = kExitFail;
  }
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"litmus-test checker for RDMA memory models with remote RMWs"};
  app.require_subcommand(1);

  CheckOptions opt;
  bool as_json = false;
  std::string witness_dir;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--loop-bound", opt.loop_bound, "loop unrolling bound (default 3)");
    cmd->add_option("--max-candidates", opt.candidate_cap, "candidate cap per test");
    cmd->add_option("--max-states", opt.state_cap, "state cap for the operational machine");
    cmd->add_flag("--json", as_json, "machine-readable output");
  };

  // check
  std::string check_path, check_model;
  auto* check = app.add_subcommand("check", "check one litmus test");
  check->add_option("path", check_path)->required();
  check->add_option("--model", check_model,
                    "wait | tso-decl | tso-op | spec:<lib> | pipeline (e.g. inline:sc+wait)");
  check->add_option("--witness", witness_dir, "directory for witness dumps");
  add_common(check);

  // compare
  std::string cmp_path, model_a, model_b;
  auto* compare = app.add_subcommand("compare", "compare outcome sets under two models");
  compare->add_option("path", cmp_path)->required();
  compare->add_option("modelA", model_a)->required();
  compare->add_option("modelB", model_b)->required();
  add_common(compare);

  // corpus
  std::string corpus_dir;
  int jobs = 1;
  auto* corpus = app.add_subcommand("corpus", "run every .lit file in a directory");
  corpus->add_option("dir", corpus_dir)->required();
  corpus->add_option("--jobs", jobs, "parallel files");
  add_common(corpus);

  // inline
  std::string inl_path, inl_libs = "wlock,slock,nlock,sc";
  auto* inl = app.add_subcommand("inline", "emit a test with library calls inlined");
  inl->add_option("path", inl_path)->required();
  inl->add_option("--libs", inl_libs, "comma-separated: wlock, slock, nlock, sc");

  // translate
  std::string tr_path;
  auto* tr = app.add_subcommand("translate", "emit the wait-to-poll translation of a test");
  tr->add_option("path", tr_path)->required();

  // dump-tables
  auto* dump = app.add_subcommand("dump-tables", "emit the order matrices as TSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      LitmusTest t = load(check_path);
      opt.want_witnesses = !witness_dir.empty();
      std::vector<std::string> models =
          check_model.empty() ? default_models(t) : std::vector<std::string>{check_model};
      int code = 0;
      json all = json::array();
      for (const std::string& m : models) {
        Verdict v = run_model(t, m, opt);
        if (as_json)
          all.push_back(verdict_json(v));
        else
          print_verdict(v);
        if (!witness_dir.empty()) write_witnesses(v, witness_dir);
        code = std::max(code, exit_code(v));
      }
      if (as_json) std::cout << all.dump(2) << "\n";
      return code;
    }
    if (*compare) {
      LitmusTest t = load(cmp_path);
      Verdict a = run_model(t, model_a, opt);
      Verdict b = run_model(t, model_b, opt);
      OutcomeComparison cmp = compare_outcomes(a, b);
      if (as_json) {
        json j;
        j["test"] = t.name;
        j["modelA"] = model_a;
        j["modelB"] = model_b;
        j["relation"] = cmp.relation();
        auto dump_set = [&](const std::set<Outcome>& s) {
          json arr = json::array();
          for (const Outcome& o : s) {
            json m;
            for (std::size_t i = 0; i < cmp.names.size(); ++i) m[cmp.names[i]] = o[i];
            arr.push_back(std::move(m));
          }
          return arr;
        };
        j["onlyA"] = dump_set(cmp.only_a);
        j["onlyB"] = dump_set(cmp.only_b);
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << t.name << ": " << model_a << " vs " << model_b << ": " << cmp.relation()
                  << "\n";
        auto show = [&](const char* tag, const std::set<Outcome>& s) {
          for (const Outcome& o : s) {
            std::cout << "  " << tag << ":";
            for (std::size_t i = 0; i < cmp.names.size(); ++i)
              std::cout << " " << cmp.names[i] << "=" << o[i];
            std::cout << "\n";
          }
        };
        show("only-A", cmp.only_a);
        show("only-B", cmp.only_b);
      }
      return cmp.equal() ? 0 : kExitFail;
    }
    if (*corpus) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(corpus_dir))
        if (e.path().extension() == ".lit") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      std::vector<CorpusRow> rows(files.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < files.size();)
          rows[i] = run_one(files[i], opt);
      };
      std::vector<std::thread> pool;
      for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();
      int code = 0;
      for (const CorpusRow& r : rows) {
        std::cout << (r.code == 0 ? "PASS" : "FAIL") << "  " << r.file << "  [" << r.model
                  << "]  " << r.assertions << " assertions  " << r.time_ms << " ms";
        if (r.code != 0) std::cout << "  " << r.result;
        std::cout << "\n";
        code = std::max(code, r.code);
      }
      std::cout << rows.size() << " tests\n";
      return code;
    }
    if (*inl) {
      LitmusTest t = load(inl_path);
      std::string one;
      for (char c : inl_libs + ",") {
        if (c == ',') {
          if (!one.empty()) t = apply_inline(t, one);
          one.clear();
        } else {
          one += c;
        }
      }
      std::cout << pretty_print(t);
      return 0;
    }
    if (*tr) {
      std::cout << pretty_print(translate_wait_to_tso(load(tr_path)));
      return 0;
    }
    if (*dump) {
      std::cout << dump_sto_table() << "\n" << dump_ippo_table() << "\n" << dump_oppo_table();
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return 0;
}
