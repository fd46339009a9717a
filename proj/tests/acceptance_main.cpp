// Acceptance harness: drives the command line tool end to end, then grades
// every acceptance criterion from the emitted report. Prints one pass/fail
// line per criterion and exits nonzero if any fails.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct Row {
  std::string name;
  bool pass = false;
  bool skipped = false;
  double lhs = 0, rhs = 0, margin = 0;
  json meta;
};

std::vector<Row> g_rows;
int g_failures = 0;

bool starts_with(const std::string& s, const std::string& p) {
  return s.rfind(p, 0) == 0;
}
bool ends_with(const std::string& s, const std::string& p) {
  return s.size() >= p.size() && s.compare(s.size() - p.size(), p.size(), p) == 0;
}

double as_number(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::nan("");
  }
  return v.get<double>();
}

int spawn(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Selection {
  int total = 0;
  int passed = 0;
  int skipped = 0;
};

Selection select(const std::function<bool(const Row&)>& pred) {
  Selection sel;
  for (const Row& r : g_rows) {
    if (!pred(r)) continue;
    ++sel.total;
    if (r.skipped)
      ++sel.skipped;
    else if (r.pass)
      ++sel.passed;
  }
  return sel;
}

void grade(int idx, const std::string& label, bool ok, const std::string& detail) {
  std::printf("criterion %02d [%s] %s (%s)\n", idx, ok ? "PASS" : "FAIL",
              label.c_str(), detail.c_str());
  if (!ok) ++g_failures;
}

void grade_selection(int idx, const std::string& label, const Selection& sel,
                     int expected_min) {
  std::ostringstream os;
  os << sel.passed << "/" << sel.total - sel.skipped << " pass";
  if (sel.skipped) os << ", " << sel.skipped << " skipped";
  const bool ok = sel.total >= expected_min &&
                  sel.passed == sel.total - sel.skipped;
  grade(idx, label, ok, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  if (argc > 1) {
    cli = argv[1];
  } else if (const char* env = std::getenv("AIID_CLI")) {
    cli = env;
  } else {
    cli = "./tools/aiid";
  }

  setenv("AIID_THREADS", "2", 1);

  // Criterion 15 first: two identical full-suite runs must agree to the byte
  // and exit cleanly; the graded report below reuses the first run.
  const std::string r1 = "acceptance_run1.json";
  const std::string r2 = "acceptance_run2.json";
  const int e1 =
      spawn(cli + " --seed 0 --out " + r1 + " suite all > /dev/null");
  const int e2 =
      spawn(cli + " --seed 0 --out " + r2 + " suite all > /dev/null");
  const std::string body1 = slurp(r1);
  const bool deterministic = !body1.empty() && body1 == slurp(r2);

  json report;
  try {
    report = json::parse(body1);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot parse %s: %s\n", r1.c_str(), e.what());
    return 99;
  }
  for (const auto& c : report["checks"]) {
    Row row;
    row.name = c["name"].get<std::string>();
    row.pass = c["pass"].get<bool>();
    row.lhs = as_number(c["lhs"]);
    row.rhs = as_number(c["rhs"]);
    row.margin = as_number(c["margin"]);
    row.meta = c["meta"];
    row.skipped = c["meta"].contains("skipped") &&
                  c["meta"]["skipped"].get<bool>();
    g_rows.push_back(std::move(row));
  }

  grade_selection(1, "W1 strong duality on 50 seeded 2-3 qubit pairs",
                  select([](const Row& r) {
                    return starts_with(r.name, "duality-pool/") &&
                           ends_with(r.name, "/duality");
                  }),
                  50);

  grade_selection(2, "diagonal consistency with the Hamming transport value",
                  select([](const Row& r) {
                    return ends_with(r.name, "/diag-consistency");
                  }),
                  20);

  grade_selection(3, "product-state tensorization formula",
                  select([](const Row& r) {
                    return ends_with(r.name, "/product-formula");
                  }),
                  20);

  grade_selection(4, "trace-distance sandwich on all solved instances",
                  select([](const Row& r) {
                    return ends_with(r.name, "/sandwich-lower") ||
                           ends_with(r.name, "/sandwich-upper");
                  }),
                  180);

  {
    const Selection wlv = select([](const Row& r) {
      return ends_with(r.name, "/wlv") || starts_with(r.name, "wlv-fixture/");
    });
    int one_over_n_violations = -1, checked = -1;
    for (const Row& r : g_rows)
      if (r.name == "wlv-one-over-n/violations") {
        one_over_n_violations = static_cast<int>(r.lhs);
        checked = static_cast<int>(as_number(r.meta["checked"]));
      }
    std::ostringstream os;
    os << wlv.passed << "/" << wlv.total << " pass with constant 2/n; stated "
       << "1/n variant violated on " << one_over_n_violations << "/" << checked
       << " instances (informational)";
    grade(5, "local variation vs W1 comparison",
          wlv.total >= 70 && wlv.passed == wlv.total - wlv.skipped &&
              one_over_n_violations >= 0,
          os.str());
  }

  grade_selection(6, "relative-entropy transport bound on 30 product pairs",
                  select([](const Row& r) { return ends_with(r.name, "/marton"); }),
                  30);

  grade_selection(7, "entropy continuity along W1 on all instances",
                  select([](const Row& r) {
                    return ends_with(r.name, "/sw-entropy");
                  }),
                  140);

  {
    const Selection pure = select(
        [](const Row& r) { return ends_with(r.name, "/pure-product"); });
    const Selection msr = select([](const Row& r) {
      return starts_with(r.name, "msr-epsilon/n");
    });
    grade(8, "pure-product bound and span epsilon for defect states",
          pure.total >= 30 && pure.passed == pure.total && msr.total == 3 &&
              msr.passed == 3,
          std::to_string(pure.passed) + "/" + std::to_string(pure.total) +
              " bound, " + std::to_string(msr.passed) + "/3 defect");
  }

  {
    const Selection ent = select([](const Row& r) {
      return starts_with(r.name, "paired/entropy/");
    });
    const Selection tv = select([](const Row& r) {
      return starts_with(r.name, "paired/avg-tv/");
    });
    const Selection sampled = select([](const Row& r) {
      return r.name == "paired/avg-tv-sampled/n200";
    });
    grade(9, "paired-bit source: entropy and average marginals",
          ent.total == 11 && ent.passed == 11 && tv.total == 11 &&
              tv.passed == 11 && sampled.total == 1 && sampled.passed == 1,
          std::to_string(ent.passed) + "/11 entropy, " +
              std::to_string(tv.passed) + "/11 exact TV, " +
              std::to_string(sampled.passed) + "/1 sampled at n=200");
  }

  {
    const Selection wass = select([](const Row& r) {
      return starts_with(r.name, "xi/wass-bound/");
    });
    const Selection fit = select(
        [](const Row& r) { return r.name == "xi/fit-residual/n06"; });
    const Selection rank = select([](const Row& r) {
      return r.name == "xi/slice-rank/n4-r1" || r.name == "xi/slice-rank/n6-r2";
    });
    grade(10, "balanced-type counterexample",
          wass.total == 3 && wass.passed == 3 && fit.passed == 1 &&
              rank.passed == 2,
          std::to_string(wass.passed) + "/3 transport bound, fit residual " +
              std::to_string(fit.passed) + "/1, rank " +
              std::to_string(rank.passed) + "/2");
  }

  {
    const Selection rt =
        select([](const Row& r) { return r.name == "moebius/round-trip"; });
    const Selection ju =
        select([](const Row& r) { return r.name == "moebius/junta-locality"; });
    grade(11, "Moebius inversion machinery",
          rt.passed == 1 && ju.passed == 1,
          "round-trip " + std::to_string(rt.passed) + "/1, junta locality " +
              std::to_string(ju.passed) + "/1");
  }

  {
    const Selection ranks = select([](const Row& r) {
      return starts_with(r.name, "projector/rank-");
    });
    const Selection nest = select([](const Row& r) {
      return starts_with(r.name, "projector/nesting-");
    });
    const Selection cap = select([](const Row& r) {
      return r.name == "projector/defect-capture-n4";
    });
    const Selection tails =
        select([](const Row& r) { return starts_with(r.name, "tail/"); });
    grade(12, "span projectors and tail presets",
          ranks.total == 2 && ranks.passed == 2 && nest.total == 8 &&
              nest.passed == 8 && cap.passed == 1 && tails.total >= 4 &&
              tails.passed == tails.total,
          "ranks " + std::to_string(ranks.passed) + "/2, nesting " +
              std::to_string(nest.passed) + "/8, capture " +
              std::to_string(cap.passed) + "/1, tails " +
              std::to_string(tails.passed) + "/" +
              std::to_string(tails.total));
  }

  grade_selection(13, "five-qubit demonstration state",
                  select([](const Row& r) { return starts_with(r.name, "ame/"); }),
                  6);

  grade_selection(14, "gentle projection bound on 20 seeded constructions",
                  select([](const Row& r) { return starts_with(r.name, "gentle/"); }),
                  20);

  {
    const int einduced = spawn(
        cli + " suite hierarchy --only wlv-fixture --enforce-one-over-n"
              " > /dev/null");
    const bool ok = e1 == 0 && e2 == 0 && deterministic && einduced == 1;
    std::ostringstream os;
    os << "exit codes " << e1 << "/" << e2 << ", reports "
       << (deterministic ? "byte-identical" : "DIFFER")
       << ", induced failure exit " << einduced;
    grade(15, "determinism and failure exit codes", ok, os.str());
  }

  if (g_failures == 0) {
    std::printf("acceptance: all criteria pass\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
